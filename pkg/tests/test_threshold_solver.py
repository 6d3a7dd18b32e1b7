import numpy as np
import pytest

from wguide.catalog import build_potential
from wguide.errors import (
    ConfigError,
    ConvergenceError,
    SeriesDivergenceError,
    SingularArgumentError,
)
from wguide.potential import beta
from wguide.threshold_solver import (
    ABSENT,
    EXISTS,
    INDETERMINATE,
    MAX_AUTO_MODES,
    MIN_AUTO_MODES,
    DiscretizationConfig,
    ThresholdProblem,
    apply_A,
    apply_R_tilde,
    apply_T,
    f_eps,
    modes_for,
    solve_k,
    verdict_from,
)


def _field(problem, seed=0):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(problem.grid.size) + 1j * rng.standard_normal(problem.grid.size)


def test_config_validation():
    with pytest.raises(ConfigError):
        DiscretizationConfig(mode="iterative")
    with pytest.raises(ConfigError):
        DiscretizationConfig(j_max=0)
    with pytest.raises(ConfigError):
        DiscretizationConfig(longitudinal_rule="trapezoid")
    cfg = DiscretizationConfig()
    assert cfg.order_for(2) == 24 and cfg.order_for(3) == 10
    assert cfg.j_max is None
    assert cfg.replace(j_max=7).j_max_for(None, 0.1) == 7
    assert cfg.replace(mode="series").mode == "series"


def test_verdict_bands():
    assert verdict_from(1e-9 + 0j, 1e-12) == EXISTS
    assert verdict_from(-1e-9 + 0j, 1e-12) == ABSENT
    assert verdict_from(1e-13 + 0.5j, 1e-12) == INDETERMINATE


def test_A_adds_rank_one_threshold_term(symmetric_strip, box, fast_cfg):
    problem = ThresholdProblem(symmetric_strip, box, 0.1, 0.0, fast_cfg)
    g = _field(problem)
    k = 0.05
    difference = apply_A(symmetric_strip, box, 0.1, 0.0, g, k, fast_cfg) - apply_R_tilde(
        symmetric_strip, box, 0.1, 0.0, g, k, fast_cfg
    )
    expected = problem.operator.phi0 * problem.operator.pairing(g) / (2 * k)
    np.testing.assert_allclose(difference, expected, rtol=1e-12, atol=1e-14)


def test_A_is_singular_at_zero(symmetric_strip, box, fast_cfg):
    problem = ThresholdProblem(symmetric_strip, box, 0.1, 0.0, fast_cfg)
    with pytest.raises(SingularArgumentError):
        problem.apply_A(_field(problem), 0.0)


def test_dense_matrix_matches_matrix_free(symmetric_strip, box, fast_cfg):
    problem = ThresholdProblem(symmetric_strip, box, 0.1, 0.0, fast_cfg)
    g = _field(problem, seed=3)
    k = 0.02 + 0.01j
    dense = problem.operator.matrix(k) @ g
    np.testing.assert_allclose(dense, problem.apply_R_tilde(g, k), rtol=1e-11, atol=1e-13)


def test_regular_resolvent_at_zero_closed_form(symmetric_strip, fast_cfg):
    h = 0.1
    potential = build_potential("strip_box", 2, {"amplitude": 1.0})
    problem = ThresholdProblem(symmetric_strip, potential, h, 0.0, fast_cfg)
    g = potential(problem.grid.reference_points) * problem.operator.phi0
    components = problem.operator.components(g, 0.0)
    phi0 = problem.operator.phi[0]
    pairing = np.sum(phi0**2 * problem.grid.transverse_weights)
    x = problem.grid.longitudinal_nodes
    expected = phi0[:, None] * (-(x**2 + h**2) / 2.0)[None, :] * pairing
    np.testing.assert_allclose(components[0], expected, atol=1e-12)

    near = problem.operator.components(g, 1e-6)
    np.testing.assert_allclose(near[0], components[0], atol=1e-7)


def test_zero_potential_is_indeterminate(symmetric_strip, fast_cfg):
    zero = build_potential("zero", 2)
    assert f_eps(symmetric_strip, zero, 0.1, 0.1, 0.0, fast_cfg) == 0
    solution = solve_k(symmetric_strip, zero, 0.1, 0.0, fast_cfg)
    assert solution.k == 0
    assert solution.verdict == INDETERMINATE
    assert solution.e is None


def test_main_regime_root(symmetric_strip, box, fast_cfg):
    h = 0.1
    solution = solve_k(symmetric_strip, box, h, 0.0, fast_cfg)
    leading = 0.5 * h**2 * (2.0 / np.pi)
    assert solution.verdict == EXISTS
    assert abs(solution.k / leading - 1.0) <= 3.0 * (h + beta(2, h))
    assert solution.e == symmetric_strip.mu0 - solution.k * solution.k
    assert solution.residual < solution.diagnostics["tol_k"]
    record = solution.to_record(h=h)
    assert record["h"] == h and record["verdict"] == EXISTS
    assert solution.iterations == len(record["diagnostics"]["trace"]) - 1 >= 1
    assert record["diagnostics"]["j_max"] == 10


def test_repulsive_box_has_no_eigenvalue(symmetric_strip, fast_cfg):
    repulsive = build_potential("box", 2, {"amplitude": 1.0})
    solution = solve_k(symmetric_strip, repulsive, 0.1, 0.0, fast_cfg)
    assert solution.verdict == ABSENT
    assert solution.e is None


def test_series_agrees_with_direct(symmetric_strip, box, fast_cfg):
    cfg = fast_cfg.replace(series_order=8)
    problem = ThresholdProblem(symmetric_strip, box, 0.1, 0.0, cfg)
    series = problem.f_eps(0.003, mode="series")
    direct = problem.f_eps(0.003, mode="direct")
    assert series.value == pytest.approx(direct.value, rel=1e-6)
    assert len(series.terms) == 8
    assert all(b < a for a, b in zip(series.terms[:-1], series.terms[1:]))


def test_series_divergence_is_reported(symmetric_strip, fast_cfg):
    strong = build_potential("box", 2, {"amplitude": -1000.0})
    problem = ThresholdProblem(symmetric_strip, strong, 0.5, 0.9, fast_cfg)
    with pytest.raises(SeriesDivergenceError):
        problem.f_eps(0.01, mode="series")


def test_nystrom_refinement_is_stable(symmetric_strip, box):
    values = [
        f_eps(symmetric_strip, box, 0.003, 0.1, 0.0,
              DiscretizationConfig(j_max=10, nodes_per_panel=order))
        for order in (16, 32)
    ]
    assert values[0] == pytest.approx(values[1], rel=1e-8)


def test_point_rule_close_to_product_rule(symmetric_strip, box, fast_cfg):
    product = f_eps(symmetric_strip, box, 0.003, 0.1, 0.0, fast_cfg)
    point = f_eps(symmetric_strip, box, 0.003, 0.1, 0.0,
                  fast_cfg.replace(longitudinal_rule="point"))
    assert point == pytest.approx(product, rel=1e-3)


def test_dense_solve_size_limit(symmetric_strip, box):
    problem = ThresholdProblem(symmetric_strip, box, 0.1, 0.0,
                               DiscretizationConfig(j_max=2, nodes_per_panel=80))
    with pytest.raises(ConfigError):
        problem.f_eps(0.01, mode="direct")


def test_secant_budget_exhausted(symmetric_strip, fast_cfg):
    lossy = build_potential("box", 2, {"amplitude": {"re": -1.0, "im": 0.5}})
    cfg = fast_cfg.replace(tol_k=1e-300, max_iter=1)
    with pytest.raises(ConvergenceError) as info:
        solve_k(symmetric_strip, lossy, 0.5, 0.9, cfg)
    # the initial guess and the single fixed-point step
    assert len(info.value.trace) == 2
    assert all(residual > 0 for _, residual in info.value.trace)


def test_three_dimensional_guide(square, fast_cfg):
    box3 = build_potential("box", 3, {"amplitude": -1.0})
    solution = solve_k(square, box3, 0.1, 0.0, fast_cfg.replace(nodes_per_panel=6))
    assert solution.verdict == EXISTS
    assert solution.mu0 == pytest.approx(2.0)
    leading = 0.5 * 0.1**3 * square.phi0_at_origin() ** 2
    assert abs(solution.k / leading - 1.0) <= 3.0 * (0.1 + beta(3, 0.1))


def test_mode_count_scales_with_inverse_h(symmetric_strip, square):
    assert modes_for(symmetric_strip, 0.1) == 375
    assert modes_for(symmetric_strip, 0.05) == 752
    assert modes_for(symmetric_strip, 0.95) == MIN_AUTO_MODES
    assert modes_for(symmetric_strip, 1e-4) == MAX_AUTO_MODES
    assert modes_for(square, 0.5) == square.count_below((24.0 * np.pi) ** 2) - 1


def test_default_mode_count_is_recorded(symmetric_strip, box):
    problem = ThresholdProblem(symmetric_strip, box, 0.2, 0.0)
    assert problem.j_max == modes_for(symmetric_strip, 0.2)
    assert problem.operator.phi.shape[0] == problem.j_max + 1


def test_mode_sum_changes_shrink_with_j_max(symmetric_strip, box):
    values = [
        f_eps(symmetric_strip, box, 0.003, 0.1, 0.0, DiscretizationConfig(j_max=j_max))
        for j_max in (20, 40, 80, 160)
    ]
    changes = [abs(b - a) for a, b in zip(values, values[1:])]
    assert changes[0] > changes[1] > changes[2]


def test_default_mode_count_converges_mode_sum(symmetric_strip, box):
    h, k = 0.1, 0.003
    problem = ThresholdProblem(symmetric_strip, box, h, 0.0)
    value = problem.f_eps(k).value
    doubled = f_eps(symmetric_strip, box, k, h, 0.0,
                    DiscretizationConfig(j_max=2 * problem.j_max))
    assert abs(doubled - value) <= 1e-6 * abs(value)


def test_single_mode_pair_at_a_point_mass(asymmetric_strip, box):
    h, k = 0.1, 0.3
    cfg = DiscretizationConfig(j_max=1, nodes_per_panel=11, longitudinal_rule="point")
    problem = ThresholdProblem(asymmetric_strip, box, h, 0.0, cfg)
    centre = 5 * 11 + 5
    np.testing.assert_allclose(problem.grid.transverse_nodes[5], [0.0], atol=1e-15)
    assert problem.grid.longitudinal_nodes[5] == pytest.approx(0.0, abs=1e-15)
    g = np.zeros(problem.grid.size)
    g[centre] = 1.0
    w = problem.grid.weights[centre]
    origin = np.zeros((1, 1))
    phi0 = asymmetric_strip.mode(0).value(origin)[0]
    phi1 = asymmetric_strip.mode(1).value(origin)[0]
    expected = phi0**2 * w / (2 * k) + phi1**2 * w / (2 * asymmetric_strip.kj(1, k))
    value = problem.apply_A(g, k)[centre]
    assert value == pytest.approx(expected, rel=1e-10)


def test_T_stays_bounded_as_h_shrinks(symmetric_strip, fast_cfg):
    potential = build_potential("strip_box", 2, {"amplitude": 1.0})
    k = 0.05
    norms = []
    for h in (0.2, 0.1, 0.05):
        problem = ThresholdProblem(symmetric_strip, potential, h, 0.0, fast_cfg)
        dense = (problem.profile / problem.beta)[:, None] * problem.operator.matrix(k)
        g = _field(problem, seed=5)
        np.testing.assert_allclose(
            dense @ g, apply_T(symmetric_strip, potential, h, 0.0, g, k, fast_cfg),
            rtol=1e-11, atol=1e-14,
        )
        root = np.sqrt(problem.grid.weights)
        norms.append(np.linalg.norm(root[:, None] * dense / root[None, :], 2))
    assert all(np.isfinite(norms))
    assert max(norms) <= 2.0 * norms[0]
