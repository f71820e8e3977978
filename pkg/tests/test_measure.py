import math

import numpy as np
import pytest

from constructions.builders import build
from constructions.models import ExampleSpec
from manifold.charts import evaluate, translate
from manifold.models import Parametrization
from measure.models import NumericalFailure
from measure.quadrature import (
    is_exceptional,
    nontransverse_measure,
    sample_chart,
)


def test_axis_center_sees_the_whole_circle(circle):
    est = nontransverse_measure(circle, [0.0, 0.0, 0.7])
    assert est.value == pytest.approx(math.pi / 2, rel=1e-2)
    assert est.fraction == pytest.approx(1.0)
    assert est.nodes_hit == est.nodes_total == 256


def test_generic_center_is_measure_zero(circle):
    est = nontransverse_measure(circle, [0.5, 0.0, 0.0])
    assert est.value <= 1e-3 * math.pi / 2
    assert est.tolerance_used == 1e-7


def test_monotone_in_tau(circle):
    a = [0.2, -0.1, 0.3]
    values = [nontransverse_measure(circle, a, 128, tau).value for tau in (1e-7, 1e-3, 1e-1, 0.5)]
    assert values == sorted(values)
    assert values[-1] > 0


def test_translation_equivariance(circle):
    v = np.array([2.0, -1.0, 0.5])
    moved = translate(circle, v)
    for a in ([0.0, 0.0, 0.7], [0.3, 0.1, -0.2]):
        base = nontransverse_measure(circle, a, 128)
        shifted = nontransverse_measure(moved, np.asarray(a) + v, 128)
        assert shifted.value == pytest.approx(base.value, rel=1e-12, abs=1e-15)
        assert shifted.nodes_hit == base.nodes_hit


def test_grid_refinement_is_stable(circle):
    coarse = nontransverse_measure(circle, [0.0, 0.0, 0.7], 128).value
    fine = nontransverse_measure(circle, [0.0, 0.0, 0.7], 256).value
    assert abs(fine - coarse) <= 0.02 * fine


def test_sphere_axis_and_generic_centers(sphere_r4):
    on_axis = nontransverse_measure(sphere_r4, [0.0, 0.0, 0.0, 0.3], 32)
    assert on_axis.fraction == pytest.approx(1.0)
    assert on_axis.total == pytest.approx(4 * math.pi * 0.25 ** 2, rel=5e-3)
    generic = nontransverse_measure(sphere_r4, [0.1, 0.05, -0.2, 0.3], 32)
    assert generic.fraction < 1e-3


def test_is_exceptional(circle):
    assert is_exceptional(circle, [0.0, 0.0, 0.7])
    assert not is_exceptional(circle, [0.5, 0.0, 0.0])


def test_center_on_a_node_is_counted_degenerate(circle):
    node = evaluate(circle, [math.pi / 256])           # first midpoint at 256 nodes
    est = nontransverse_measure(circle, node)
    assert est.nodes_degenerate == 1


def test_too_few_nodes_rejected(circle):
    with pytest.raises(ValueError):
        nontransverse_measure(circle, [0.0, 0.0, 1.0], nodes_per_axis=3)


def test_many_failed_nodes_is_a_numerical_failure():
    phi = Parametrization.from_text(["sqrt(x1)", "x1", "0"], [(-1.0, 1.0)], label="half")
    with pytest.raises(NumericalFailure):
        nontransverse_measure(phi, [0.0, 0.0, 1.0], 64)


def test_few_failed_nodes_are_skipped():
    phi = Parametrization.from_text(["sqrt(x1)", "x1", "0"], [(-0.001, 1.0)], label="edge")
    sample = sample_chart(phi, 1000)
    assert sample.nodes_skipped == 1
    assert sample.nodes_total == 1000
    assert len(sample.weights) == 999


def test_atlas_measure_is_the_sum_over_charts():
    atlas = build(ExampleSpec(kind="sigma0", count=2))
    a = [1.0, 0.0, 0.5]
    whole = nontransverse_measure(atlas, a, 128)
    parts = [nontransverse_measure(chart, a, 128) for chart in atlas]
    assert whole.value == pytest.approx(sum(p.value for p in parts), rel=1e-12)
    assert whole.nodes_total == sum(p.nodes_total for p in parts) == 256
    assert parts[0].value == 0.0
    assert parts[1].value == pytest.approx(math.pi / 2, rel=1e-2)
