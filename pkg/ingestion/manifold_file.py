# ingestion/manifold_file.py
# Plain-text manifold specification:
#
#   # comments start with '#'
#   dims <d> <n>
#   chart [label]
#   box <lo1> <hi1> ... <lod> <hid>     (constant expressions without spaces, e.g. 2*pi)
#   <component 1 expression>
#   ...
#   <component n expression>
#   chart ...
from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Tuple

from expr.dual import eval_dual
from expr.models import ExpressionDomainError, ExpressionError
from expr.parser import parse
from manifold.models import ChartAtlas, ManifoldError, Parametrization

logger = logging.getLogger(__name__)


class ManifoldFileError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _content_lines(text: str) -> List[Tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line))
    return out


def _constant(token: str, lineno: int) -> float:
    try:
        return float(eval_dual(parse(token, d=0), [0.0]).value)
    except (ExpressionError, ExpressionDomainError) as e:
        raise ManifoldFileError(f"bad box bound {token!r}: {e}", lineno) from e


def parse_manifold(text: str) -> ChartAtlas:
    lines = _content_lines(text)
    if not lines:
        raise ManifoldFileError("empty manifold file", 1)

    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 3 or parts[0] != "dims":
        raise ManifoldFileError("expected header 'dims <d> <n>'", lineno)
    try:
        d, n = int(parts[1]), int(parts[2])
    except ValueError as e:
        raise ManifoldFileError("dims must be integers", lineno) from e

    charts: List[Parametrization] = []
    i = 1
    while i < len(lines):
        lineno, line = lines[i]
        head = line.split(None, 1)
        if head[0] != "chart":
            raise ManifoldFileError(f"expected 'chart', found {line!r}", lineno)
        label = head[1] if len(head) > 1 else f"chart{len(charts) + 1}"
        if i + 1 >= len(lines):
            raise ManifoldFileError("chart without a box line", lineno)

        box_lineno, box_line = lines[i + 1]
        box_parts = box_line.split()
        if box_parts[0] != "box" or len(box_parts) != 1 + 2 * d:
            raise ManifoldFileError(f"expected 'box' with {2 * d} bounds", box_lineno)
        bounds = [_constant(tok, box_lineno) for tok in box_parts[1:]]
        domain = tuple((bounds[2 * k], bounds[2 * k + 1]) for k in range(d))

        comp_lines = lines[i + 2:i + 2 + n]
        if len(comp_lines) != n:
            raise ManifoldFileError(f"chart {label!r} needs {n} component lines", lineno)
        comps = []
        for comp_lineno, comp_text in comp_lines:
            if comp_text.split(None, 1)[0] == "chart":
                raise ManifoldFileError(f"chart {label!r} needs {n} component lines", comp_lineno)
            try:
                comps.append(parse(comp_text, d))
            except ExpressionError as e:
                raise ManifoldFileError(str(e), comp_lineno) from e
        try:
            charts.append(Parametrization(d=d, n=n, components=tuple(comps), domain=domain, label=label))
        except ManifoldError as e:
            raise ManifoldFileError(str(e), lineno) from e
        i += 2 + n

    if not charts:
        raise ManifoldFileError("no charts defined", lines[0][0])
    logger.debug("parsed manifold with %d charts (d=%d, n=%d)", len(charts), d, n)
    return ChartAtlas(tuple(charts))


def read_manifold(path: Path) -> ChartAtlas:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"manifold file not found: {path}")
    return parse_manifold(path.read_text(encoding="utf-8"))


def format_manifold(atlas: ChartAtlas, header_comment: str = "") -> str:
    out: List[str] = []
    if header_comment:
        out.extend(f"# {line}" for line in header_comment.splitlines())
    out.append(f"dims {atlas.d} {atlas.n}")
    for k, chart in enumerate(atlas.charts, start=1):
        out.append(f"chart {chart.label or f'chart{k}'}")
        out.append("box " + " ".join(f"{lo!r} {hi!r}" for lo, hi in chart.domain))
        out.extend(chart.component_texts())
    return "\n".join(out) + "\n"


def write_manifold(atlas: ChartAtlas, path: Path, header_comment: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_manifold(atlas, header_comment), encoding="utf-8")
    return path
