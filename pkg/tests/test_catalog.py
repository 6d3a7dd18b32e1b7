import pytest

from wguide.catalog import FIXTURES, build_potential, fixture
from wguide.errors import ConfigError


@pytest.mark.parametrize("name", ["zero", "box", "linear_box", "strip_box", "odd_linear"])
def test_catalog_potentials_build(name):
    potential = build_potential(name, 2)
    assert potential.dimension == 2
    assert potential.name == name


def test_amplitude_forms():
    assert build_potential("box", 2, {"amplitude": 2}).exact["mean"] == 2
    complex_box = build_potential("box", 3, {"amplitude": {"re": -1.0, "im": 0.5}})
    assert complex_box.exact["mean"] == complex(-1.0, 0.5)
    assert not complex_box.is_real()
    with pytest.raises(ConfigError):
        build_potential("box", 2, {"amplitude": {"real": 1.0}})


def test_odd_linear_defaults_to_unit_amplitude():
    potential = build_potential("odd_linear", 2)
    assert potential.strip_profile.exact["first_axes"][0] == pytest.approx(1.0 / 12.0)


def test_catalog_errors():
    with pytest.raises(ConfigError):
        build_potential("gaussian", 2)
    with pytest.raises(ConfigError):
        build_potential("box", 2, {"width": 1.0})
    with pytest.raises(ConfigError):
        build_potential("strip_box", 3)
    with pytest.raises(ConfigError):
        build_potential("tensor", 2, {"factors": [[[-1.0, 1.0, [1.0]]]]})
    with pytest.raises(ConfigError):
        build_potential("tensor", 2, {"factors": [[["a", 1.0, [1.0]]], [[-1.0, 1.0, [1.0]]]]})


def test_tensor_potential_from_config():
    potential = build_potential("tensor", 2, {
        "amplitude": -2.0,
        "factors": [[[-0.5, 0.0, [1.0]], [0.0, 0.5, [2.0]]], [[-1.0, 1.0, [1.0]]]],
    })
    assert potential.exact["mean"] == pytest.approx(-2.0 * 1.5 * 2.0)
    assert potential.breakpoints[0] == (-0.5, 0.0, 0.5)


@pytest.mark.parametrize("tag", sorted(FIXTURES))
def test_fixtures_build(tag):
    fx = fixture(tag)
    potential = fx.build()
    assert potential.dimension == fx.cross_section.n
    assert fx.alpha < 1


def test_unknown_fixture():
    with pytest.raises(ConfigError):
        fixture("supercritical")


def test_unbounded_potential_is_rejected():
    with pytest.raises(ConfigError):
        build_potential("box", 2, {"amplitude": float("inf")})
    assert build_potential("box", 2, {"amplitude": -3.0}).sup_norm() == 3.0
