"""Chart Repository — left/right invariant vector fields from charts.dat."""

from collections import OrderedDict
from typing import Dict, Tuple

from config import get_settings
from models.expression import ParseContext, Sym
from models.geometry import GroupChart
from repositories import algebra_repo
from repositories.base import cached_loader, read_records, split_list, split_options
from services.symexpr_service import parse, substitute
from utils.validators import CatalogError, ParseError, UnsupportedChartError


def load_charts(path=None) -> "OrderedDict[str, GroupChart]":
    return _load_charts(str(path or get_settings().chart_path))


@cached_loader
def _load_charts(path: str) -> "OrderedDict[str, GroupChart]":
    charts: "OrderedDict[str, GroupChart]" = OrderedDict()
    for record in read_records(path, "chart"):
        name, options = split_options(record.header)
        coords = tuple(split_list(options.get("coords", "")))
        if not name or not coords:
            raise ParseError(record.where(), "chart record needs a name and coords=...")
        params = []
        fields: Dict[str, Dict[int, Tuple]] = {"XL": {}, "XR": {}}
        for body in record.body:
            word, _, rest = body.text.partition(" ")
            if word == "param":
                params.append(rest.strip())
                continue
            if word not in fields:
                raise ParseError(record.where(body.line), f"unknown chart line {body.text!r}")
            index_text, _, components = rest.strip().partition(" ")
            try:
                index = int(index_text) - 1
            except ValueError:
                raise ParseError(record.where(body.line), f"bad field index {index_text!r}")
            context = ParseContext(coords=coords, params=tuple(params))
            parts = [c.strip() for c in components.split(";")]
            if len(parts) != len(coords):
                raise ParseError(record.where(body.line), f"expected {len(coords)} components, got {len(parts)}")
            fields[word][index] = tuple(parse(p, context, field=record.where(body.line)) for p in parts)
        for side in ("XL", "XR"):
            if sorted(fields[side]) != list(range(len(coords))):
                raise ParseError(record.where(), f"chart {name}: {side} must list fields 1..{len(coords)}")
        charts[name] = GroupChart(
            algebra=name,
            coords=coords,
            XL=tuple(fields["XL"][i] for i in range(len(coords))),
            XR=tuple(fields["XR"][i] for i in range(len(coords))),
            params=tuple(params),
            line=record.line,
        )
    return charts


def get_chart(ref: str, path=None) -> GroupChart:
    """Chart for ``NAME`` or ``NAME[a=b]``; no chart raises UnsupportedChartError."""
    name, mapping = algebra_repo.parse_algebra_ref(ref)
    charts = load_charts(path)
    if name not in charts:
        raise UnsupportedChartError(name, "no chart for this algebra")
    chart = charts[name]
    if not mapping:
        return chart
    unknown = set(mapping) - set(chart.params)
    if unknown:
        raise CatalogError(ref, f"chart {name} has no parameters {sorted(unknown)}")
    exprs = {old: Sym(new) for old, new in mapping.items()}

    def rename(fields):
        return tuple(tuple(substitute(c, exprs) for c in field) for field in fields)

    return GroupChart(
        algebra=chart.algebra,
        coords=chart.coords,
        XL=rename(chart.XL),
        XR=rename(chart.XR),
        params=tuple(mapping.get(p, p) for p in chart.params),
        line=chart.line,
    )


def chart_names(path=None) -> Tuple[str, ...]:
    return tuple(load_charts(path))
