"""
Application Settings — Environment-driven configuration
========================================================
Uses Pydantic BaseSettings to read from .env locally and from
JLB_* environment variables. CLI flags override individual fields.
"""

from pathlib import Path
from typing import Optional

from pydantic_settings import BaseSettings

_PACKAGE_ROOT = Path(__file__).resolve().parent.parent


class Settings(BaseSettings):
    # App
    app_env: str = "development"
    debug: bool = False
    log_level: str = "INFO"

    # Catalog
    data_dir: Path = _PACKAGE_ROOT / "data"
    algebra_file: str = "algebras.dat"
    bialgebra_file: str = "bialgebras.dat"
    chart_file: str = "charts.dat"
    bracket_file: str = "brackets.dat"
    system_file: str = "systems.dat"

    # Sampling
    seed: int = 20240101
    samples: int = 100
    param_samples: int = 5
    tol: float = 1e-9
    axiom_tol: float = 1e-8
    point_low: float = -2.0
    point_high: float = 2.0
    fd_step: float = 1e-6
    max_denominator: int = 12

    # Reports
    report_format: str = "json"
    report_schema_version: str = "1"
    report_out: Optional[Path] = None

    model_config = {
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "env_prefix": "JLB_",
        "extra": "ignore",
    }

    def _resolve(self, name: str) -> Path:
        path = Path(name)
        return path if path.is_absolute() else Path(self.data_dir) / path

    @property
    def algebra_path(self) -> Path:
        return self._resolve(self.algebra_file)

    @property
    def bialgebra_path(self) -> Path:
        return self._resolve(self.bialgebra_file)

    @property
    def chart_path(self) -> Path:
        return self._resolve(self.chart_file)

    @property
    def bracket_path(self) -> Path:
        return self._resolve(self.bracket_file)

    @property
    def system_path(self) -> Path:
        return self._resolve(self.system_file)

    @property
    def is_local(self) -> bool:
        return self.app_env == "development"
