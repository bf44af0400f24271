"""
Phase-space models for the integrable-system construction.

The r-matrix of a system may carry free parameters (``rp1`` ...), so it is
kept as a matrix of expressions rather than an exact RMatrix.
"""

from dataclasses import dataclass
from typing import Tuple

import sympy

from models.bialgebra import JacobiLieBialgebra
from models.expression import Expression
from models.lie import AdjointRep


@dataclass(frozen=True)
class PhaseSpace:
    coords: Tuple[str, ...]
    omega_inv: sympy.ImmutableMatrix

    @classmethod
    def canonical(cls, positions, momenta) -> "PhaseSpace":
        """Darboux coordinates: {q_i, p_j} = δ_ij."""
        n = len(positions)
        omega = sympy.zeros(2 * n, 2 * n)
        for i in range(n):
            omega[i, n + i] = 1
            omega[n + i, i] = -1
        return cls(tuple(positions) + tuple(momenta), sympy.ImmutableMatrix(omega))

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class SystemSpec:
    """One record of the systems file, before any algebra is built."""

    name: str
    bialgebra: str
    coords: Tuple[str, ...]
    momenta: Tuple[str, ...]
    S: Tuple[str, ...]
    hamiltonian: int = 2
    conserved: Tuple[str, ...] = ()
    invariant: str = ""
    line: int = 0


@dataclass(frozen=True)
class DynamicalSystem:
    name: str
    bialg: JacobiLieBialgebra
    r: Tuple[Tuple[Expression, ...], ...]
    S: Tuple[Expression, ...]
    phase: PhaseSpace
    adjoint: AdjointRep
    rparams: Tuple[str, ...] = ()
    spec: SystemSpec = None

    @property
    def dim(self) -> int:
        return self.bialg.dim
