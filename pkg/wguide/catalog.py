"""
Built-in potentials and the named regime fixtures.

Potentials (all tensor products of polynomial pieces, so their moments are
exact; ids as used in `config.yaml`):
- `zero`: V = 0.
- `box`: V = amplitude on [-1/2, 1/2]^n.
- `linear_box`: V = amplitude * t_1 on [-1/2, 1/2]^n (<V> = 0).
- `strip_box`: V = amplitude * 1{|t_1| < 1/2} 1{|t_2| < 1} (n = 2, separable).
- `odd_linear`: V = amplitude * t_1 1{|t_1| < 1/2} 1{|t_2| < 1} (n = 2,
  separable, <v>' = 0).
- `tensor`: user factors, params {"amplitude": a, "factors": [[[lo, hi, [c0, c1, ...]], ...], ...]}.

Amplitudes are given as a number or as {"re": x, "im": y}.
"""

from dataclasses import dataclass, field

import numpy as np

from .cross_section import CrossSection
from .errors import ConfigError
from .potential import tensor_potential

HALF = (-0.5, 0.5)


def _amplitude(params):
    value = params.get("amplitude", -1.0)
    if isinstance(value, dict):
        unknown = set(value) - {"re", "im"}
        if unknown:
            raise ConfigError(f"unknown amplitude keys: {sorted(unknown)}")
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    return complex(value)


def _check_params(name, params, allowed):
    unknown = set(params) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown parameters for potential {name!r}: {sorted(unknown)}")


def _require_strip(name, n):
    if n != 2:
        raise ConfigError(f"potential {name!r} is defined for n = 2 only, got n = {n}")


def _zero(n, params):
    _check_params("zero", params, ())
    return tensor_potential("zero", 0.0, [[(*HALF, [0.0])] for _ in range(n)])


def _box(n, params):
    _check_params("box", params, ("amplitude",))
    return tensor_potential("box", _amplitude(params), [[(*HALF, [1.0])] for _ in range(n)])


def _linear_box(n, params):
    _check_params("linear_box", params, ("amplitude",))
    factors = [[(*HALF, [0.0, 1.0])]] + [[(*HALF, [1.0])] for _ in range(n - 1)]
    return tensor_potential("linear_box", _amplitude(params), factors)


def _strip(name, amplitude, coefficients):
    profile = tensor_potential(f"{name}_profile", amplitude, [[(*HALF, coefficients)]])
    return tensor_potential(
        name, amplitude, [[(*HALF, coefficients)], [(-1.0, 1.0, [1.0])]],
        strip_profile=profile,
    )


def _strip_box(n, params):
    _require_strip("strip_box", n)
    _check_params("strip_box", params, ("amplitude",))
    return _strip("strip_box", _amplitude(params), [1.0])


def _odd_linear(n, params):
    _require_strip("odd_linear", n)
    _check_params("odd_linear", params, ("amplitude",))
    amplitude = _amplitude(params) if "amplitude" in params else 1.0
    return _strip("odd_linear", amplitude, [0.0, 1.0])


def _tensor(n, params):
    _check_params("tensor", params, ("amplitude", "factors"))
    factors = params.get("factors")
    if not isinstance(factors, list) or len(factors) != n:
        raise ConfigError(f"tensor potential needs one factor list per axis ({n} axes)")
    try:
        pieces = [[(float(lo), float(hi), list(coeffs)) for lo, hi, coeffs in axis]
                  for axis in factors]
        return tensor_potential("tensor", _amplitude(params), pieces)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"malformed tensor factors: {e}") from e


BUILDERS = {
    "zero": _zero,
    "box": _box,
    "linear_box": _linear_box,
    "strip_box": _strip_box,
    "odd_linear": _odd_linear,
    "tensor": _tensor,
}


def build_potential(name, n, params=None):
    """
    Potential `name` of the catalog for an n-dimensional guide.

    Raises:
        ConfigError: unknown name or parameters, or a V that is not bounded.
    """
    if name not in BUILDERS:
        raise ConfigError(f"unknown potential {name!r}; choose one of {sorted(BUILDERS)}")
    potential = BUILDERS[name](n, dict(params or {}))
    if not np.isfinite(potential.sup_norm()):
        raise ConfigError(f"potential {name!r} is unbounded for parameters {params}")
    return potential


SYMMETRIC_STRIP = CrossSection.interval(-np.pi / 2, np.pi / 2)
ASYMMETRIC_STRIP = CrossSection.interval(-np.pi / 3, 2 * np.pi / 3)
SQUARE = CrossSection.rectangle((-np.pi / 2, np.pi / 2), (-np.pi / 2, np.pi / 2))


@dataclass(frozen=True)
class Fixture:
    """A named regime setup: cross-section, potential, alpha and h values."""

    tag: str
    cross_section: CrossSection
    potential: str
    params: dict
    alpha: float
    h_values: tuple
    extra: dict = field(default_factory=dict)

    def build(self, **param_changes):
        params = dict(self.params)
        params.update(param_changes)
        return build_potential(self.potential, self.cross_section.n, params)


FIXTURES = {
    "main": Fixture(
        "main", SYMMETRIC_STRIP, "box", {"amplitude": -1.0}, 0.0, (0.2, 0.1, 0.05, 0.02)
    ),
    "de_baseline": Fixture(
        "de_baseline", SYMMETRIC_STRIP, "box", {"amplitude": -1.0}, 0.0, (0.2, 0.1, 0.05)
    ),
    "critical_alpha_neg": Fixture(
        "critical_alpha_neg", ASYMMETRIC_STRIP, "linear_box", {"amplitude": -1.0}, -1.0,
        (0.1, 0.05),
    ),
    "strip_critical": Fixture(
        "strip_critical", ASYMMETRIC_STRIP, "odd_linear", {"amplitude": 1.0}, 0.25, (0.05,)
    ),
    "cross_validation": Fixture(
        "cross_validation", SYMMETRIC_STRIP, "box", {"amplitude": -1.0}, 0.5, (0.3,),
        extra={"oracle_modes": 28},
    ),
    "dichotomy": Fixture(
        "dichotomy", SYMMETRIC_STRIP, "box", {"amplitude": -1.0}, 0.0, (0.1, 0.05),
        extra={"amplitudes": (-1.0, 1.0, complex(-1.0, 0.3), complex(1.0, 0.3))},
    ),
    "lemma_probe": Fixture(
        "lemma_probe", SQUARE, "box", {"amplitude": -1.0}, 0.0,
        tuple(2.0**-m for m in range(2, 9)),
    ),
}


def fixture(tag):
    if tag not in FIXTURES:
        raise ConfigError(f"unknown regime tag {tag!r}; choose one of {sorted(FIXTURES)}")
    return FIXTURES[tag]
