import numpy as np
import pytest

from wguide.quadrature import clean_breakpoints, gauss_legendre, panel_rule, tensor_rule


def test_gauss_legendre_is_exact_for_degree_2n_minus_1():
    x, w = gauss_legendre(3, 0.0, 2.0)
    assert np.sum(w * x**5) == pytest.approx(64.0 / 6.0, rel=1e-13)


def test_panel_rule_splits_at_breakpoints():
    nodes, weights, panels = panel_rule([1.0, -1.0, 0.0, 0.0], 4)
    assert nodes.size == 8
    assert np.sum(weights) == pytest.approx(2.0)
    assert [(lo, hi) for lo, hi, _ in panels] == [(-1.0, 0.0), (0.0, 1.0)]
    assert np.all(nodes[panels[0][2]] < 0) and np.all(nodes[panels[1][2]] > 0)


def test_panel_rule_integrates_jump_exactly():
    nodes, weights, _ = panel_rule([-1.0, 0.3, 1.0], 6)
    step = np.where(nodes < 0.3, 1.0, -2.0)
    assert np.sum(weights * step) == pytest.approx(1.3 - 2.0 * 0.7, abs=1e-14)


def test_tensor_rule_points_last_axis_fastest():
    rule = tensor_rule([[0.0, 1.0], [0.0, 2.0]], 3)
    points = rule.points()
    assert points.shape == (9, 2)
    assert points[0, 0] == points[1, 0] == points[2, 0]
    assert points[0, 1] != points[1, 1]
    assert rule.integrate(points[:, 0] * points[:, 1] ** 2) == pytest.approx(4.0 / 3.0)


def test_tensor_rule_scale():
    rule = tensor_rule([[-0.5, 0.5]], 4, scale=0.1)
    assert rule.integrate(np.ones(4)) == pytest.approx(0.1)


def test_clean_breakpoints_needs_two_points():
    with pytest.raises(ValueError):
        clean_breakpoints([0.5, 0.5])
