# constructions/builders.py
# Chart atlases of the shipped constructions. Every chart is an expression
# chart over a box, so atlases round-trip through the manifold file format.
from __future__ import annotations

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from constructions.models import ExampleKind, ExampleSpec, InvalidExampleSpec
from manifold.models import ChartAtlas, Parametrization

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


# ---------- expression text helpers ----------

def _num(v: float) -> str:
    return repr(float(v))


def _combine(terms: Sequence[Tuple[float, Optional[str]]]) -> str:
    """Text of sum(coef * factor); factor None means a bare constant."""
    parts = []
    for coef, factor in terms:
        coef = float(coef)
        if coef == 0.0:
            continue
        mag = abs(coef)
        if factor is None:
            body = _num(mag)
        elif mag == 1.0:
            body = factor
        else:
            body = f"{_num(mag)}*{factor}"
        parts.append(("-" if coef < 0 else "+", body))
    if not parts:
        return "0"
    sign, body = parts[0]
    text = f"-{body}" if sign == "-" else body
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def _polynomial(coeffs: Sequence[float]) -> str:
    factors = [None, "x1"] + [f"x1^{k}" for k in range(2, len(coeffs))]
    return _combine(list(zip(coeffs, factors)))


def _center(spec: ExampleSpec, i: int) -> np.ndarray:
    c = np.zeros(spec.n)
    c[0] = i * spec.spacing
    return c


# ---------- circles and spheres ----------

def circle_chart(center: np.ndarray, radius: float, theta_range=(0.0, TWO_PI), label: str = "") -> Parametrization:
    """theta -> center + radius (cos theta, sin theta, 0, ..., 0)."""
    comps = [_combine([(center[0], None), (radius, "cos(x1)")]),
             _combine([(center[1], None), (radius, "sin(x1)")])]
    comps += [_combine([(c, None)]) for c in center[2:]]
    return Parametrization.from_text(comps, [theta_range], label=label)


def sphere_charts(center: np.ndarray, radius: float, d: int, label: str = "") -> List[Parametrization]:
    """
    Round d-sphere in the first d+1 coordinates. For d >= 2 it is covered by the
    2(d+1) faces of the cube [-1, 1]^(d+1), each projected radially.
    """
    if d == 1:
        return [circle_chart(center, radius, label=label)]
    norm = "sqrt(1 + " + " + ".join(f"x{m}^2" for m in range(1, d + 1)) + ")"
    charts = []
    for axis in range(d + 1):
        for sign in (1.0, -1.0):
            others = [j for j in range(d + 1) if j != axis]
            comps = []
            for j in range(len(center)):
                if j == axis:
                    comps.append(_combine([(center[j], None), (sign * radius, f"1/{norm}")]))
                elif j in others:
                    m = others.index(j) + 1
                    comps.append(_combine([(center[j], None), (radius, f"x{m}/{norm}")]))
                else:
                    comps.append(_combine([(center[j], None)]))
            face = f"{'+' if sign > 0 else '-'}{axis + 1}"
            charts.append(Parametrization.from_text(comps, [(-1.0, 1.0)] * d, label=f"{label}-face{face}"))
    return charts


# ---------- cut circles and their connected sum ----------

def _cut_angles(eps: float) -> Dict[str, float]:
    return {"a": 2 * eps, "b": math.pi - 2 * eps, "c": math.pi + 2 * eps, "d": TWO_PI - 2 * eps}


def _sigma1_charts(spec: ExampleSpec) -> List[Parametrization]:
    """Upper arc theta in [2 eps, pi - 2 eps] and lower arc [pi + 2 eps, 2 pi - 2 eps] of every circle."""
    angle = _cut_angles(spec.eps)
    charts = []
    for i in range(spec.count):
        charts.append(circle_chart(_center(spec, i), spec.scale, (angle["a"], angle["b"]), label=f"arc-{i}-upper"))
        charts.append(circle_chart(_center(spec, i), spec.scale, (angle["c"], angle["d"]), label=f"arc-{i}-lower"))
    return charts


def _sigma2_charts(spec: ExampleSpec) -> List[Parametrization]:
    """
    Circles are cut open near theta = 0 and pi (at +-2 eps) into an upper and a
    lower arc. Straight segments join neighbouring circles and close the outer
    openings of the first and last circle. Each corner is replaced by a cubic
    Hermite blend from the arc, trimmed by arc length h, to the segment, trimmed
    by h, with h = min(eps/2, L/4) for the segment length L.
    """
    r, eps, n = spec.scale, spec.eps, spec.n
    last = spec.count - 1
    angle = _cut_angles(eps)

    def point(i: int, theta: float) -> np.ndarray:
        p = _center(spec, i)
        p[0] += r * math.cos(theta)
        p[1] += r * math.sin(theta)
        return p

    def unit_tangent(theta: float) -> np.ndarray:
        t = np.zeros(n)
        t[0], t[1] = -math.sin(theta), math.cos(theta)
        return t

    segments = []
    for i in range(last):
        segments.append((f"bridge-{i}-upper", (i, "a"), (i + 1, "b")))
        segments.append((f"bridge-{i}-lower", (i, "d"), (i + 1, "c")))
    segments.append(("cap-left", (0, "b"), (0, "c")))
    segments.append(("cap-right", (last, "a"), (last, "d")))

    charts: List[Parametrization] = []
    trim: Dict[Tuple[int, str], Tuple[float, np.ndarray]] = {}
    for label, start, end in segments:
        p0, p1 = point(start[0], angle[start[1]]), point(end[0], angle[end[1]])
        length = float(np.linalg.norm(p1 - p0))
        u = (p1 - p0) / length
        h = min(eps / 2, length / 4)
        trim[start] = (h, u)
        trim[end] = (h, -u)
        q0 = p0 + h * u
        step = (length - 2 * h) * u
        comps = [_polynomial([q0[j], step[j]]) for j in range(n)]
        charts.append(Parametrization.from_text(comps, [(0.0, 1.0)], label=f"segment-{label}"))

    for i in range(spec.count):
        for name, lo_key, hi_key in (("upper", "a", "b"), ("lower", "c", "d")):
            lo = angle[lo_key] + trim[(i, lo_key)][0] / r
            hi = angle[hi_key] - trim[(i, hi_key)][0] / r
            charts.append(circle_chart(_center(spec, i), r, (lo, hi), label=f"arc-{i}-{name}"))

    for (i, key), (h, away) in sorted(trim.items()):
        corner = point(i, angle[key])
        # corners at the low end of an arc are reached by decreasing theta
        toward = -1.0 if key in ("a", "c") else 1.0
        theta_a = angle[key] - toward * h / r
        A = point(i, theta_a)
        B = corner + h * away
        mA = h * toward * unit_tangent(theta_a)
        mB = h * away
        c2 = -3 * A - 2 * mA + 3 * B - mB
        c3 = 2 * A + mA - 2 * B + mB
        comps = [_polynomial([A[j], mA[j], c2[j], c3[j]]) for j in range(n)]
        charts.append(Parametrization.from_text(comps, [(0.0, 1.0)], label=f"blend-{i}-{key}"))

    return charts


def build(spec: ExampleSpec) -> ChartAtlas:
    kind = spec.kind
    if kind in (ExampleKind.SIGMA0, ExampleKind.SINGLE_CIRCLE):
        charts = [circle_chart(_center(spec, i), spec.scale, label=f"circle-{i}") for i in range(spec.count)]
    elif kind in (ExampleKind.SPHERE_CHAIN, ExampleKind.SINGLE_SPHERE):
        charts = []
        for i in range(spec.count):
            charts.extend(sphere_charts(_center(spec, i), spec.scale, spec.d, label=f"sphere-{i}"))
    elif kind is ExampleKind.SIGMA1:
        charts = _sigma1_charts(spec)
    elif kind is ExampleKind.SIGMA2:
        charts = _sigma2_charts(spec)
    elif kind is ExampleKind.RANK_DEFICIENT:
        comps = [_num(spec.scale)] + ["0"] * (spec.n - 1)
        charts = [Parametrization.from_text(comps, [(0.0, 1.0)] * spec.d, label="constant")]
    else:
        raise InvalidExampleSpec(f"no builder for {kind!r}")
    logger.debug("built %s: %d charts", kind.value, len(charts))
    return ChartAtlas(tuple(charts))
