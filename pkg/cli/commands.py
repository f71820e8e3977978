# cli/commands.py
from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config import DATA_DIR
from constructions.builders import build
from constructions.checks import predicted_planes, sample_point_cloud, scan_window
from constructions.models import ExampleKind, ExampleSpec
from cli.run_config import RunConfig
from ingestion.manifold_file import parse_manifold, read_manifold, write_manifold
from manifold.charts import check_immersion
from manifold.models import ChartAtlas
from measure.models import MeasureParams
from measure.quadrature import nontransverse_measure
from reports.store import write_report, write_table
from scan.fitting import compare_planes, verify_containment
from scan.scanner import LINKING_FACTOR, fit_exceptional_planes, measure_table, scan_centers
from strata.diagnostics import claim1_diagnostic, tangent_witness
from strata.normal_planes import dichotomy_battery, normal_affine_plane
from tangency.newton import find_critical_points_atlas, looks_like_continuum
from tangency.residual import DegenerateSphereError, is_sphere_transverse, rank_oracle

logger = logging.getLogger(__name__)

EXIT_OK = 0


class VerificationFailed(Exception):
    def __init__(self, check: str, report_path: Path):
        super().__init__(f"verification failed: {check}")
        self.check = check
        self.report_path = report_path


# ---------- shared helpers ----------

def load_atlas(cfg: RunConfig) -> ChartAtlas:
    if not cfg.manifold:
        raise ValueError("a manifold file is required (--manifold)")
    atlas = read_manifold(Path(cfg.manifold))
    for chart in atlas:
        check_immersion(chart, seed=cfg.seed)
    return atlas


def _example_spec(cfg: RunConfig) -> ExampleSpec:
    kwargs: Dict[str, Any] = {"kind": cfg.example, "spacing": cfg.spacing}
    for name in ("n", "d", "count", "eps", "scale"):
        value = getattr(cfg, name)
        if value is not None:
            kwargs[name] = value
    return ExampleSpec(**kwargs)


def _center(cfg: RunConfig, n: int) -> np.ndarray:
    if cfg.center is None:
        raise ValueError("a center is required (--center a1,...,an)")
    if len(cfg.center) != n:
        raise ValueError(f"center has {len(cfg.center)} coordinates; the manifold lives in R^{n}")
    return np.asarray(cfg.center, dtype=float)


def _broadcast(values: Sequence, n: int, what: str) -> List:
    if len(values) == 1:
        return list(values) * n
    if len(values) != n:
        raise ValueError(f"{what} needs 1 or {n} entries, got {len(values)}")
    return list(values)


def _measure_params(cfg: RunConfig) -> MeasureParams:
    return MeasureParams(nodes_per_axis=cfg.nodes_per_axis, tau=cfg.tau, delta=cfg.delta)


def _plane_line(idx: int, plane) -> str:
    directions = "; ".join(str(np.round(v, 6).tolist()) for v in plane.basis.T) or "-"
    return f"plane {idx + 1}: k={plane.k} base={np.round(plane.base, 6).tolist()} directions={directions}"


# ---------- analyze ----------

def _critical_point_entry(atlas: ChartAtlas, a: np.ndarray, cp, tau: float) -> Dict[str, Any]:
    chart = atlas.charts[cp.chart]
    entry: Dict[str, Any] = {
        "chart": cp.chart,
        "x": cp.x.tolist(),
        "p": cp.p.tolist(),
        "residual_norm": cp.residual_norm,
    }
    try:
        entry["transverse_residual"] = is_sphere_transverse(chart, a, cp.x, tau)
        entry["transverse_rank"] = rank_oracle(chart, a, cp.x)
    except DegenerateSphereError:
        entry["transverse_residual"] = entry["transverse_rank"] = None
        entry["degenerate"] = True
    return entry


def cmd_analyze(cfg: RunConfig) -> Tuple[int, Path]:
    atlas = load_atlas(cfg)
    a = _center(cfg, atlas.n)

    points = find_critical_points_atlas(atlas, a, cfg.seeds_per_axis, cfg.tau_newton)
    seed_count = len(atlas) * cfg.seeds_per_axis ** atlas.d
    estimate = nontransverse_measure(atlas, a, cfg.nodes_per_axis, cfg.tau)
    exceptional = estimate.fraction > cfg.delta

    witness = tangent_witness(atlas, a, cfg.nodes_per_axis, cfg.tau) if exceptional else None
    payload: Dict[str, Any] = {
        "center": a.tolist(),
        "d": atlas.d,
        "n": atlas.n,
        "charts": len(atlas),
        "critical_points": [_critical_point_entry(atlas, a, cp, cfg.tau) for cp in points],
        "continuum": looks_like_continuum(points, seed_count),
        "measure": estimate.to_dict(),
        "exceptional": exceptional,
        "verdict": "exceptional" if exceptional else "not exceptional",
        "tangent_witness": None,
    }
    if witness is not None:
        payload["tangent_witness"] = {
            **witness.to_dict(),
            "normal_plane": normal_affine_plane(a, witness.plane).to_dict(),
        }

    path = write_report("analyze", cfg.to_dict(), payload, cfg.output)
    print(f"{payload['verdict']}: fraction={estimate.fraction:.6g}, "
          f"{len(points)} critical points, report {path}")
    return EXIT_OK, path


# ---------- scan ----------

def cmd_scan(cfg: RunConfig) -> Tuple[int, Path]:
    atlas = load_atlas(cfg)
    if cfg.box is None:
        raise ValueError("a scan box is required (--box lo:hi,...)")
    box = _broadcast(cfg.box, atlas.n, "box")
    counts = _broadcast(cfg.centers_per_axis, atlas.n, "centers_per_axis")

    report = scan_centers(atlas, box, counts, _measure_params(cfg))
    fit_exceptional_planes(report, atlas.d, cfg.linking_radius)
    containment = verify_containment(report.planes, report.exceptional_points, LINKING_FACTOR * max(report.spacing))

    payload = {**report.to_payload(), "containment": containment.to_dict()}
    path = write_report("scan", cfg.to_dict(), payload, cfg.output)
    table = write_table(measure_table(report), Path(cfg.table) if cfg.table else None, kind="scan")

    print(f"{len(report.exceptional)} exceptional centers of {len(report.centers)}, "
          f"{len(report.planes)} fitted planes")
    for idx, plane in enumerate(report.planes):
        print(_plane_line(idx, plane))
    logger.info("scan report %s, table %s", path, table)
    return EXIT_OK, path


# ---------- build-example ----------

def cmd_build_example(cfg: RunConfig) -> Tuple[int, Path]:
    if not cfg.example:
        raise ValueError("an example kind is required")
    spec = _example_spec(cfg)
    atlas = build(spec)
    path = Path(cfg.output) if cfg.output else DATA_DIR / "manifolds" / f"{spec.kind.value}.manifold"
    path.parent.mkdir(parents=True, exist_ok=True)
    header = " ".join(f"{k}={v}" for k, v in spec.to_dict().items())
    write_manifold(atlas, path, header_comment=header)

    if parse_manifold(path.read_text(encoding="utf-8")).charts != atlas.charts:
        raise RuntimeError(f"{path} does not read back to the built atlas")

    if cfg.point_cloud:
        cloud = sample_point_cloud(atlas)
        frame = pd.DataFrame(cloud, columns=[f"x{j + 1}" for j in range(atlas.n)])
        write_table(frame, Path(cfg.point_cloud))

    print(f"{spec.kind.value}: {len(atlas)} charts written to {path}")
    return EXIT_OK, path


# ---------- verify ----------

def _containment_check(cfg: RunConfig, atlas: ChartAtlas, spec: ExampleSpec) -> Dict[str, Any]:
    if cfg.box is not None:
        box = _broadcast(cfg.box, atlas.n, "box")
        counts = _broadcast(cfg.centers_per_axis, atlas.n, "centers_per_axis")
    else:
        box, counts = scan_window(spec)
    report = scan_centers(atlas, box, counts, _measure_params(cfg))
    fit_exceptional_planes(report, atlas.d, cfg.linking_radius)
    tol = LINKING_FACTOR * max(report.spacing)
    predicted = predicted_planes(spec, box)
    matching = compare_planes(report.planes, predicted, base_tol=tol)
    containment = verify_containment(predicted, report.exceptional_points, tol)
    return {
        "passed": matching.passed and containment.passed,
        "exceptional_centers": len(report.exceptional),
        "fitted_planes": [p.to_dict() for p in report.planes],
        "predicted_planes": [p.to_dict() for p in predicted],
        "matching": matching.to_dict(),
        "containment": containment.to_dict(),
    }


def cmd_verify(cfg: RunConfig) -> Tuple[int, Path]:
    spec: Optional[ExampleSpec] = _example_spec(cfg) if cfg.example else None
    if cfg.manifold:
        atlas = load_atlas(cfg)
    elif spec is not None:
        atlas = build(spec)
    else:
        raise ValueError("verify needs --manifold or --example")

    claim1_rng, dichotomy_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(2))
    checks: Dict[str, Dict[str, Any]] = {}

    claim1 = claim1_diagnostic(atlas, cfg.trials, claim1_rng, cfg.nodes_per_axis, cfg.tau)
    checks["claim1"] = claim1.to_dict()
    logger.info("claim1: %s", "pass" if claim1.passed else "FAIL")

    battery = dichotomy_battery(atlas.n, cfg.instances, dichotomy_rng, reframe=max(1, cfg.instances // 10))
    checks["dichotomy"] = battery.to_dict()
    logger.info("dichotomy: %s", "pass" if battery.passed else "FAIL")

    if spec is not None and spec.kind is not ExampleKind.RANK_DEFICIENT:
        checks["containment"] = _containment_check(cfg, atlas, spec)
        logger.info("containment: %s", "pass" if checks["containment"]["passed"] else "FAIL")

    failed = [name for name, result in checks.items() if not result["passed"]]
    payload = {"checks": checks, "passed": not failed, "first_failure": failed[0] if failed else None}
    path = write_report("verify", cfg.to_dict(), payload, cfg.output)
    if failed:
        raise VerificationFailed(failed[0], path)
    print(f"all checks passed ({', '.join(checks)}), report {path}")
    return EXIT_OK, path


COMMANDS = {
    "analyze": cmd_analyze,
    "scan": cmd_scan,
    "build-example": cmd_build_example,
    "verify": cmd_verify,
}
