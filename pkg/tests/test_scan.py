import numpy as np
import pytest

from measure.models import MeasureParams
from reports.store import payload_text
from scan.clustering import cluster_candidates
from scan.fitting import compare_planes, fit_affine_plane, max_principal_angle_deg, verify_containment
from scan.models import AffinePlane, DegenerateClusterError
from scan.scanner import center_grid, fit_exceptional_planes, measure_table, scan_centers

Z_AXIS = AffinePlane(base=np.zeros(3), basis=np.array([[0.0], [0.0], [1.0]]))


def _trace(x: float, spacing: float = 0.05) -> np.ndarray:
    z = np.arange(-0.5, 0.5 + 1e-9, spacing)
    return np.column_stack([np.full_like(z, x), np.zeros_like(z), z])


def test_two_traces_give_two_clusters():
    pts = np.vstack([_trace(0.0), _trace(1.0)])
    clusters = cluster_candidates(pts, 1.5 * 0.05)
    assert len(clusters) == 2
    assert sorted(len(c) for c in clusters) == [21, 21]
    assert clusters[0][0] == 0


def test_one_trace_and_trivial_inputs():
    assert len(cluster_candidates(_trace(0.0), 0.075)) == 1
    assert cluster_candidates(np.empty((0, 3)), 0.075) == []
    assert cluster_candidates([[1.0, 2.0, 3.0]], 0.075) == [[0]]
    with pytest.raises(ValueError):
        cluster_candidates(_trace(0.0), 0.0)


def test_fit_jittered_z_axis():
    rng = np.random.default_rng(3)
    z = np.linspace(-1, 1, 50)
    pts = np.column_stack([rng.uniform(-5e-4, 5e-4, 50), rng.uniform(-5e-4, 5e-4, 50), z])
    fit = fit_affine_plane(pts, 1)
    assert fit.plane.k == 1
    assert max_principal_angle_deg(fit.plane, Z_AXIS) <= 0.1
    assert fit.residual <= 2e-3
    assert fit.singular_values[0] > 1e2 * fit.singular_values[1]


def test_fit_point_plane():
    pts = np.array([[1.0, 2.0], [1.2, 2.0], [1.1, 2.3]])
    fit = fit_affine_plane(pts, 0)
    assert fit.plane.basis.shape == (2, 0)
    np.testing.assert_allclose(fit.plane.base, pts.mean(axis=0))
    assert fit.residual == pytest.approx(max(np.linalg.norm(p - pts.mean(axis=0)) for p in pts))


def test_degenerate_clusters_report_rank():
    collinear = _trace(0.0)
    with pytest.raises(DegenerateClusterError) as exc:
        fit_affine_plane(collinear, 2)
    assert exc.value.achieved_rank == 1
    with pytest.raises(DegenerateClusterError):
        fit_affine_plane([[0.0, 0.0, 0.0]], 1)


def test_affine_plane_rejects_non_orthonormal_basis():
    with pytest.raises(ValueError):
        AffinePlane(base=np.zeros(3), basis=np.array([[0.0], [0.0], [2.0]]))


def test_containment():
    pts = _trace(0.0)
    assert verify_containment([Z_AXIS], pts, 0.075).passed
    with_outlier = np.vstack([pts, [[0.5, 0.0, 0.0]]])
    report = verify_containment([Z_AXIS], with_outlier, 0.075)
    assert not report.passed
    assert report.outliers == [len(pts)]
    assert verify_containment([Z_AXIS], [], 0.075).passed


def test_containment_without_planes_flags_every_candidate():
    report = verify_containment([], [[0.0, 0.0, 0.1], [0.0, 0.0, 0.2]], 0.075)
    assert not report.passed
    assert report.outliers == [0, 1]
    assert len(report.distances) == 2


def test_compare_planes():
    tilt = np.radians(5.0)
    tilted = AffinePlane(base=np.zeros(3), basis=np.array([[np.sin(tilt)], [0.0], [np.cos(tilt)]]))
    assert compare_planes([Z_AXIS], [Z_AXIS], base_tol=0.075).passed
    assert not compare_planes([tilted], [Z_AXIS], base_tol=0.075).passed
    missing = compare_planes([Z_AXIS], [], base_tol=0.075)
    assert missing.unmatched_fitted == [0] and not missing.passed


def test_center_grid_order_and_errors():
    centers, counts, spacing = center_grid([(0.0, 1.0), (0.0, 3.0)], 4)
    assert counts == [4, 4]
    assert spacing == pytest.approx([1 / 3, 1.0])
    np.testing.assert_allclose(centers[:2], [[0.0, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        center_grid([(0.0, 1.0)], 3)
    with pytest.raises(ValueError):
        center_grid([(1.0, 1.0)], 5)


def test_circle_scan_recovers_the_z_axis(circle):
    report = scan_centers(circle, [(-0.6, 0.6)] * 3, 25, MeasureParams(nodes_per_axis=64))
    assert len(report.centers) == 25 ** 3
    exceptional = report.exceptional_points
    assert len(exceptional) == 25
    np.testing.assert_allclose(exceptional[:, :2], 0.0, atol=1e-12)

    fit_exceptional_planes(report, d=1)
    assert report.linking_radius == pytest.approx(1.5 * 0.05)
    assert len(report.clusters) == 1 and len(report.planes) == 1
    plane = report.planes[0]
    assert plane.k == 1
    assert max_principal_angle_deg(plane, Z_AXIS) <= 2.0
    assert verify_containment(report.planes, exceptional, 1.5 * 0.05).passed


def test_off_axis_window_has_no_exceptional_centers(circle):
    report = scan_centers(circle, [(0.4, 0.8), (0.4, 0.8), (-0.2, 0.2)], 5, MeasureParams(nodes_per_axis=64))
    assert report.exceptional == []
    fit_exceptional_planes(report, d=1)
    assert report.planes == []


def test_measure_table_and_determinism(circle):
    params = MeasureParams(nodes_per_axis=32)
    first = scan_centers(circle, [(-0.6, 0.6)] * 3, 5, params)
    second = scan_centers(circle, [(-0.6, 0.6)] * 3, 5, params)
    fit_exceptional_planes(first, 1)
    fit_exceptional_planes(second, 1)
    assert payload_text(first.to_payload()) == payload_text(second.to_payload())

    table = measure_table(first)
    assert list(table.columns) == ["a1", "a2", "a3", "measure", "fraction", "exceptional"]
    assert len(table) == 125
    assert table["exceptional"].sum() == len(first.exceptional) == 5


def test_plane_curve_gives_point_planes():
    from constructions.builders import circle_chart

    ring = circle_chart(np.zeros(2), 0.25, label="ring")
    report = scan_centers(ring, [(-0.6, 0.6)] * 2, 25, MeasureParams(nodes_per_axis=64))
    fit_exceptional_planes(report, d=1)
    assert len(report.planes) == 1
    assert report.planes[0].k == 0
    np.testing.assert_allclose(report.planes[0].base, [0.0, 0.0], atol=1e-12)
