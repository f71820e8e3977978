import math

import numpy as np
import pytest

from constructions.builders import build
from constructions.models import ExampleSpec
from measure.quadrature import nontransverse_measure
from strata.diagnostics import (
    StratumSample,
    claim1_diagnostic,
    exceptional_param_set,
    pairwise_E_overlap,
    tangent_witness,
)
from strata.grassmann import GrassmannPlane, RankDeficientDraw, random_grassmann
from strata.normal_planes import (
    NormalPlaneIntersection,
    dichotomy_battery,
    intersect_normal_planes,
    normal_affine_plane,
)

E = np.eye(3)
XY = GrassmannPlane(frame=E[:, :2])
Z = GrassmannPlane(frame=E[:, 2:])


def test_random_frames_are_orthonormal(rng):
    for _ in range(1000):
        n = int(rng.integers(2, 6))
        i = int(rng.integers(1, n + 1))
        P = random_grassmann(n, i, rng)
        assert P.frame.shape == (n, i)
        np.testing.assert_allclose(P.frame.T @ P.frame, np.eye(i), atol=1e-10)


def test_full_dimensional_draw_is_a_basis():
    P = random_grassmann(4, 4, seed=5)
    np.testing.assert_allclose(P.frame @ P.frame.T, np.eye(4), atol=1e-10)


def test_draws_are_deterministic_per_seed():
    np.testing.assert_array_equal(random_grassmann(5, 2, 11).frame, random_grassmann(5, 2, 11).frame)
    assert not np.array_equal(random_grassmann(5, 2, 11).frame, random_grassmann(5, 2, 12).frame)


def test_invalid_dimension_rejected():
    with pytest.raises(ValueError):
        random_grassmann(3, 0)
    with pytest.raises(ValueError):
        random_grassmann(3, 4)


def test_span_rejects_dependent_vectors():
    with pytest.raises(RankDeficientDraw):
        GrassmannPlane.span([[1.0, 2.0], [0.0, 0.0], [0.0, 0.0]])


def test_normal_plane_of_the_xy_plane_is_the_z_axis():
    N = normal_affine_plane(np.zeros(3), XY)
    assert N.k == 1
    assert abs(N.basis[2, 0]) == pytest.approx(1.0)
    assert N.distance([0.0, 0.0, 5.0]) == pytest.approx(0.0, abs=1e-15)


def test_normal_plane_of_the_whole_space_is_a_point():
    a = np.array([0.1, 0.2, 0.3])
    N = normal_affine_plane(a, random_grassmann(3, 3, seed=1))
    assert N.k == 0
    np.testing.assert_array_equal(N.base, a)


def test_normal_plane_is_orthogonal_to_P(rng):
    for _ in range(200):
        n = int(rng.integers(2, 7))
        P = random_grassmann(n, int(rng.integers(1, n)), rng)
        N = normal_affine_plane(rng.standard_normal(n), P)
        assert N.k == n - P.i
        np.testing.assert_allclose(P.frame.T @ N.basis, 0.0, atol=1e-10)


def test_normal_plane_shape_mismatch():
    with pytest.raises(ValueError):
        normal_affine_plane(np.zeros(4), XY)


def test_intersection_dichotomy_examples():
    a = np.zeros(3)
    assert intersect_normal_planes(a, [0.0, 0.0, 1.0], XY) is NormalPlaneIntersection.EQUAL
    assert intersect_normal_planes(a, [1.0, 0.0, 1.0], XY) is NormalPlaneIntersection.EMPTY
    with pytest.raises(ValueError):
        intersect_normal_planes(a, a, XY)


def test_dichotomy_battery_is_exact():
    report = dichotomy_battery(4, instances=2000, seed=0, reframe=200)
    assert report.passed
    assert report.accuracy == 1.0
    assert report.to_dict()["reframed"] == 200
    with pytest.raises(ValueError):
        dichotomy_battery(1, instances=10)


def test_E_of_the_circle_for_its_own_plane(circle):
    est = exceptional_param_set(circle, [0.0, 0.0, 0.7], XY)
    assert est.value == pytest.approx(math.pi / 2, rel=1e-2)


def test_E_is_empty_for_a_transverse_plane(circle):
    assert exceptional_param_set(circle, [0.0, 0.0, 0.7], Z).value == 0.0


def test_E_for_the_whole_space_is_the_plain_measure(circle):
    whole = GrassmannPlane(frame=E)
    for a in ([0.0, 0.0, 0.7], [0.5, 0.0, 0.0]):
        assert exceptional_param_set(circle, a, whole, 128) == nontransverse_measure(circle, a, 128)


def test_claim1_passes_on_immersed_examples(circle, sphere_r4):
    circle_report = claim1_diagnostic(circle, trials=20, seed=0, nodes_per_axis=64)
    assert circle_report.passed and circle_report.checked == {1: 20}
    sphere_report = claim1_diagnostic(sphere_r4, trials=10, seed=0, nodes_per_axis=16)
    assert sphere_report.passed and sphere_report.checked == {1: 10, 2: 10}
    assert sphere_report.to_dict()["box"] == sphere_report.box


def test_claim1_flags_the_rank_deficient_chart():
    report = claim1_diagnostic(build(ExampleSpec(kind="rank-deficient")), trials=5, seed=0, nodes_per_axis=8)
    assert not report.passed
    assert len(report.violations) == 5
    assert report.violations[0]["nodes_hit"] == 8


def test_claim1_is_deterministic_per_seed(circle):
    first = claim1_diagnostic(circle, trials=5, seed=9, nodes_per_axis=16).to_dict()
    assert first == claim1_diagnostic(circle, trials=5, seed=9, nodes_per_axis=16).to_dict()


def test_pairwise_overlap(circle):
    a = np.array([0.0, 0.0, 0.7])
    full = StratumSample(a=a, plane=XY, E_measure=exceptional_param_set(circle, a, XY, 64))
    assert pairwise_E_overlap(circle, full, full, 64).value == pytest.approx(full.E_measure.value)
    xz = GrassmannPlane(frame=E[:, [0, 2]])
    other = StratumSample(a=a, plane=xz, E_measure=exceptional_param_set(circle, a, xz, 64))
    assert pairwise_E_overlap(circle, full, other, 64).value == 0.0


def test_tangent_witness(circle):
    witness = tangent_witness(circle, [0.0, 0.0, 0.7])
    assert witness is not None and witness.i == 2
    N = normal_affine_plane(witness.a, witness.plane)
    assert N.k == 1 and abs(N.basis[2, 0]) == pytest.approx(1.0)
    assert witness.E_measure.value == pytest.approx(math.pi / 2, rel=1e-2)
    assert tangent_witness(circle, [0.5, 0.0, 0.0]) is None


def test_retry_gives_up_after_the_last_draw():
    from utils.retry import with_retry

    calls = []

    @with_retry(max_retries=3, retry_on=(RankDeficientDraw,))
    def always_deficient():
        calls.append(1)
        raise RankDeficientDraw("no luck")

    with pytest.raises(RankDeficientDraw):
        always_deficient()
    assert len(calls) == 3


def test_retry_returns_the_first_success():
    from utils.retry import with_retry

    outcomes = iter([RankDeficientDraw("once"), None])

    @with_retry(max_retries=10, retry_on=(RankDeficientDraw,))
    def flaky():
        err = next(outcomes)
        if err is not None:
            raise err
        return "ok"

    assert flaky() == "ok"
