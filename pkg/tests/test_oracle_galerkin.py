import numpy as np
import pytest

from wguide.asymptotics import predict_main
from wguide.catalog import build_potential
from wguide.errors import ConfigError, ConvergenceError, DomainError
from wguide.oracle_galerkin import (
    TruncatedProblem,
    default_shift,
    lowest_eigenvalue,
    project_potential,
    refine,
)
from wguide.potential import compute_moments


def _free_lowest(mu0, spacing, half_length):
    return mu0 + 4.0 / spacing**2 * np.sin(np.pi * spacing / (4.0 * half_length)) ** 2


def test_free_guide_has_no_eigenvalue_below_threshold(symmetric_strip):
    zero = build_potential("zero", 2)
    problem = TruncatedProblem(symmetric_strip, zero, 0.1, 0.0, half_length=5.0,
                               spacing=0.1, modes=2)
    assert problem.points == 99
    assert problem.size == 198
    assert problem.matrix.dtype == np.float64
    result = lowest_eigenvalue(problem, shift=0.999)
    assert result.e is None
    assert result.e_raw.real == pytest.approx(_free_lowest(1.0, 0.1, 5.0), abs=1e-9)


def test_half_length_snaps_to_grid(symmetric_strip, box):
    problem = TruncatedProblem(symmetric_strip, box, 0.1, 0.0, half_length=5.04,
                               spacing=0.1, modes=2)
    assert problem.half_length == pytest.approx(5.0)
    assert problem.nodes[0] == pytest.approx(-4.9)
    assert problem.nodes[-1] == pytest.approx(4.9)


def test_support_must_fit_in_box(symmetric_strip, box):
    with pytest.raises(DomainError):
        TruncatedProblem(symmetric_strip, box, 0.3, 0.0, half_length=0.1,
                         spacing=0.05, modes=2)
    with pytest.raises(ConfigError):
        TruncatedProblem(symmetric_strip, box, 0.1, 0.0, half_length=1.0,
                         spacing=0.1, modes=0)


def test_complex_potential_assembles_complex(symmetric_strip):
    potential = build_potential("box", 2, {"amplitude": {"re": -1.0, "im": 0.3}})
    problem = TruncatedProblem(symmetric_strip, potential, 0.2, 0.0, half_length=2.0,
                               spacing=0.05, modes=2)
    assert not problem.is_real
    assert problem.matrix.dtype == np.complex128


def test_cell_average_integrates_the_potential(symmetric_strip, box):
    h, spacing = 0.2, 0.03
    nodes = -3.0 + spacing * np.arange(1, 200)
    coupling = project_potential(box, h, 0.0, symmetric_strip, 3, nodes, spacing)
    # sum_i delta W(x_i) = int V_h phi_j phi_l
    total = spacing * coupling.blocks.sum(axis=0)
    phi0 = symmetric_strip.mode(0)
    t, w = np.polynomial.legendre.leggauss(40)
    t, w = 0.1 * t, 0.1 * w
    expected = -h * np.sum(w * phi0.value(t) ** 2)
    assert total[0, 0] == pytest.approx(expected, rel=1e-12)
    assert total[0, 1] == pytest.approx(0.0, abs=1e-14)


def test_point_projection(symmetric_strip, box):
    nodes = np.array([-0.2, 0.0, 0.05, 0.3])
    coupling = project_potential(box, 0.2, 0.0, symmetric_strip, 2, nodes, 0.05,
                                 projection="point")
    np.testing.assert_array_equal(coupling.indices, [1, 2])
    with pytest.raises(ConfigError):
        project_potential(box, 0.2, 0.0, symmetric_strip, 2, nodes, 0.05, projection="spline")


def test_default_sizing(symmetric_strip, box):
    problem = TruncatedProblem.sized(symmetric_strip, box, 0.3, 0.5, k_estimate=0.1, modes=2)
    assert problem.spacing == pytest.approx(0.3 / 16.0)
    assert problem.half_length == pytest.approx(150.0, abs=problem.spacing)
    assert problem.sizing_ok in (True, False)
    fallback = TruncatedProblem.sized(symmetric_strip, box, 0.3, 0.5, k_estimate=-0.1, modes=2)
    assert fallback.half_length == pytest.approx(50.0, abs=fallback.spacing)
    assert fallback.sizing_ok is None


def test_default_shift(symmetric_strip, box):
    assert default_shift(1.0) == pytest.approx(0.999)
    moments = compute_moments(box, symmetric_strip)
    prediction = predict_main(0.3, 0.5, symmetric_strip, moments)
    gap = 1.0 - prediction.e.real
    assert default_shift(1.0, prediction) == pytest.approx(prediction.e - 0.5 * gap)


def test_bound_state_and_decay_rate(symmetric_strip, box):
    h, alpha = 0.5, 0.5
    prediction = predict_main(h, alpha, symmetric_strip, compute_moments(box, symmetric_strip))
    problem = TruncatedProblem.sized(symmetric_strip, box, h, alpha,
                                     k_estimate=prediction.k, modes=4)
    result = lowest_eigenvalue(problem, prediction=prediction)
    assert result.e is not None
    assert result.e.real < 1.0
    k = np.sqrt(1.0 - result.e.real)
    assert result.decay_rate == pytest.approx(k, rel=1e-2)
    assert result.to_record(h=h)["h"] == h
    rows = result.profile_rows()
    assert len(rows) == problem.points
    assert max(abs(complex(r["c0_re"], r["c0_im"])) for r in rows) == pytest.approx(1.0)


def test_power_iteration_budget(symmetric_strip, box):
    problem = TruncatedProblem(symmetric_strip, box, 0.2, 0.0, half_length=2.0,
                               spacing=0.05, modes=2)
    with pytest.raises(ConvergenceError):
        lowest_eigenvalue(problem, max_iter=1)


def test_lossy_potential_moves_eigenvalue_off_axis(symmetric_strip):
    h, alpha = 0.5, 0.5
    values = []
    for amplitude in (complex(-1.0, 0.3), complex(-1.0, -0.3)):
        potential = build_potential("box", 2, {"amplitude": amplitude})
        prediction = predict_main(h, alpha, symmetric_strip,
                                  compute_moments(potential, symmetric_strip))
        problem = TruncatedProblem.sized(symmetric_strip, potential, h, alpha,
                                         k_estimate=prediction.k, modes=4)
        assert not problem.is_real
        result = lowest_eigenvalue(problem, prediction=prediction)
        assert result.e is not None
        values.append(result.e)
    assert values[0].real < 1.0
    assert values[0].imag > 0.0
    assert values[1] == pytest.approx(np.conj(values[0]), rel=1e-10)


@pytest.mark.slow
def test_second_order_in_spacing(symmetric_strip, box):
    h, alpha = 0.3, 0.9
    prediction = predict_main(h, alpha, symmetric_strip, compute_moments(box, symmetric_strip))
    values = []
    for spacing in (0.05, 0.025, 0.0125):
        problem = TruncatedProblem(symmetric_strip, box, h, alpha, half_length=180.0,
                                   spacing=spacing, modes=4)
        values.append(lowest_eigenvalue(problem, prediction=prediction).e_raw.real)
    ratio = (values[0] - values[1]) / (values[1] - values[2])
    assert 3.0 <= ratio <= 5.0


@pytest.mark.slow
def test_refine_extrapolates(symmetric_strip, box):
    h, alpha = 0.5, 0.5
    prediction = predict_main(h, alpha, symmetric_strip, compute_moments(box, symmetric_strip))
    problem = TruncatedProblem.sized(symmetric_strip, box, h, alpha,
                                     k_estimate=prediction.k, modes=4)
    result = refine(problem, prediction=prediction)
    assert result.refined
    assert result.modes == 8
    assert result.half_length == pytest.approx(1.5 * problem.half_length, abs=problem.spacing)
    assert result.e is not None
    assert result.error_estimate is not None and result.error_estimate >= 0.0
