"""
Compactly supported perturbing potentials and the functionals built on them.

A potential is a closed-form evaluator on R^d together with a support box and
the breakpoints (per axis) where it may jump; every integral splits its
Gauss–Legendre panels at those breakpoints. Tensor-product potentials
(polynomial pieces times indicators on each axis) also carry their moments in
exact arithmetic, so that critical cases with a vanishing mean are declared
exactly rather than inferred from quadrature noise.

Classes:
- `PotentialSpec`: the profile V with box, breakpoints, optional separable
  strip tag and exact moments.
- `ScaledPotential`: h^{-alpha} V(x / h).
- `MomentSet`: <V>, <Phi_0 V> and, for separable strips, <v>' and int v t_1.

Functions:
- `tensor_potential`: build a product of piecewise-polynomial factors.
- `beta`, `epsilon`: the scale functions beta_n(h) and h^{-alpha} beta_n(h).
- `quadrature_moment`, `compute_moments`, `weighted_moment_exact`,
  `expansion_remainder`, `l2_moment`, `lemma_probe`.
"""

# pylint: disable=R0902

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DomainError
from .quadrature import tensor_rule

DEFAULT_ORDER = 32


def beta(n, h):
    """beta_2(h) = h sqrt(|ln h|), beta_3(h) = h, for 0 < h < 1."""
    h = float(h)
    if not 0.0 < h < 1.0:
        raise DomainError(f"scale h must lie in (0, 1), got {h}")
    if n == 2:
        return h * np.sqrt(abs(np.log(h)))
    return h


def epsilon(n, h, alpha):
    """Coupling eps(h) = h^{-alpha} beta_n(h)."""
    return h ** (-alpha) * beta(n, h)


@dataclass(frozen=True)
class PotentialSpec:
    """
    Piecewise-continuous, bounded, compactly supported V: R^d -> C.

    Attributes:
        name (str): Catalog id or a free label.
        evaluator (callable): Maps points of shape (N, d) to N values; it is
            only called on points inside `box`.
        box (tuple): One (lo, hi) pair per axis containing supp V.
        breakpoints (tuple): Per axis, sorted points (box ends included) where
            V may jump.
        strip_profile (PotentialSpec | None): For the separable strip case
            V(t) = v(t_1) 1{|t_2| < 1}, the one-dimensional profile v.
        exact (dict): Exactly known moments: "mean" (<V>), "first" (tuple of
            <t_q V> over transverse axes), "first_axes" (the same over every
            axis), "abs2" (<|V|^2>).
    """

    name: str
    evaluator: Callable
    box: tuple
    breakpoints: tuple
    strip_profile: Optional["PotentialSpec"] = None
    exact: dict = field(default_factory=dict)
    zero: bool = False

    @property
    def dimension(self):
        return len(self.box)

    def __call__(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        values = np.zeros(points.shape[0], dtype=complex)
        inside = np.ones(points.shape[0], dtype=bool)
        for axis, (lo, hi) in enumerate(self.box):
            inside &= (points[:, axis] >= lo) & (points[:, axis] <= hi)
        if self.zero or not inside.any():
            return values
        values[inside] = self.evaluator(points[inside])
        return values

    def rule(self, order=DEFAULT_ORDER, scale=1.0):
        """Panel-aligned tensor rule over the (scaled) support box."""
        return tensor_rule(self.breakpoints, order, scale=scale)

    def scaled(self, h, alpha):
        return ScaledPotential(self, float(h), float(alpha))

    def is_real(self, order=8):
        nodes = self.rule(order).points()
        return bool(np.all(np.abs(self(nodes).imag) == 0.0))

    def sup_norm(self, order=DEFAULT_ORDER):
        """max |V| sampled on the quadrature nodes."""
        if self.zero:
            return 0.0
        return float(np.max(np.abs(self(self.rule(order).points()))))

    def transverse_box(self):
        return self.box[:-1]


@dataclass(frozen=True)
class ScaledPotential:
    """h^{-alpha} V(x / h), supported on h * box."""

    base: PotentialSpec
    h: float
    alpha: float

    def __post_init__(self):
        if not self.h > 0.0:
            raise DomainError(f"scale h must be positive, got {self.h}")
        if not self.alpha < 1.0:
            raise DomainError(f"exponent alpha must be below 1, got {self.alpha}")

    def __call__(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return self.h ** (-self.alpha) * self.base(points / self.h)

    @property
    def box(self):
        return tuple((self.h * lo, self.h * hi) for lo, hi in self.base.box)

    def check_inside(self, cs):
        """Raise `DomainError` unless h * box lies inside Π = Ω × R."""
        ensure_inside(self.base, self.h, cs)


def ensure_inside(potential, h, cs):
    if potential.dimension != cs.n:
        raise DomainError(
            f"potential is {potential.dimension}-dimensional but the guide has n = {cs.n}"
        )
    scaled = [(h * lo, h * hi) for lo, hi in potential.transverse_box()]
    if not cs.box_inside(scaled):
        raise DomainError(
            f"scaled support {scaled} leaves the cross-section {cs.describe()}; "
            "decrease h"
        )


@dataclass(frozen=True)
class MomentSet:
    """
    Moments consumed by the asymptotic predictors.

    Attributes:
        m0: <V>.
        m1: <Phi_0 V>.
        first: <t_q V> for the transverse axes q.
        phi0_origin: phi_0(0).
        phi0_gradient: grad phi_0(0).
        strip_m0: <v>' (separable strips only, else None).
        strip_m1: int v(t_1) t_1 dt_1 (separable strips only, else None).
    """

    m0: complex
    m1: complex
    first: tuple
    phi0_origin: float
    phi0_gradient: tuple
    strip_m0: Optional[complex] = None
    strip_m1: Optional[complex] = None

    @property
    def is_strip(self):
        return self.strip_m0 is not None

    def to_record(self):
        record = {
            "m0": _split(self.m0),
            "m1": _split(self.m1),
            "phi0_origin": self.phi0_origin,
            "phi0_gradient": list(self.phi0_gradient),
        }
        if self.is_strip:
            record["strip_m0"] = _split(self.strip_m0)
            record["strip_m1"] = _split(self.strip_m1)
        return record


def _split(value):
    value = complex(value)
    return {"re": value.real, "im": value.imag}


def _poly_integral(coefficients, lo, hi, power=0):
    """int_lo^hi t^power p(t) dt in exact polynomial arithmetic."""
    poly = Polynomial(coefficients) * Polynomial([0.0] * power + [1.0])
    antiderivative = poly.integ()
    return complex(antiderivative(hi) - antiderivative(lo))


def _factor_integral(pieces, power=0):
    return sum(_poly_integral(coeffs, lo, hi, power) for lo, hi, coeffs in pieces)


def tensor_potential(name, amplitude, factors, strip_profile=None):
    """
    V(t) = amplitude * prod_axis f_axis(t_axis), each f_axis a sum of
    polynomial pieces c(t) on [lo, hi).

    Args:
        name (str): Label.
        amplitude (complex): Overall factor.
        factors (list): Per axis, a list of (lo, hi, coefficients) with
            coefficients in increasing powers.
        strip_profile (PotentialSpec, optional): Separable strip tag.

    Returns:
        PotentialSpec: with exact "mean", "first" and "abs2" moments.
    """
    amplitude = complex(amplitude)
    factors = [
        [(float(lo), float(hi), [complex(c) for c in coeffs]) for lo, hi, coeffs in pieces]
        for pieces in factors
    ]
    for pieces in factors:
        for lo, hi, _ in pieces:
            if not lo < hi:
                raise ValueError(f"empty piece [{lo}, {hi})")

    def evaluate(points):
        values = np.full(points.shape[0], amplitude, dtype=complex)
        for axis, pieces in enumerate(factors):
            t = points[:, axis]
            axis_values = np.zeros_like(t, dtype=complex)
            for lo, hi, coeffs in pieces:
                mask = (t >= lo) & (t < hi)
                if hi == max(p[1] for p in pieces):
                    mask |= t == hi
                axis_values[mask] += Polynomial(coeffs)(t[mask])
            values *= axis_values
        return values

    box = tuple(
        (min(lo for lo, _, _ in pieces), max(hi for _, hi, _ in pieces))
        for pieces in factors
    )
    breakpoints = tuple(
        tuple(sorted({p for lo, hi, _ in pieces for p in (lo, hi)}))
        for pieces in factors
    )

    integrals = [_factor_integral(pieces) for pieces in factors]
    mean = amplitude * np.prod(integrals)
    first = []
    for q in range(len(factors)):
        moment = amplitude * _factor_integral(factors[q], power=1)
        for axis, value in enumerate(integrals):
            if axis != q:
                moment *= value
        first.append(complex(moment))
    abs2 = abs(amplitude) ** 2
    for pieces in factors:
        abs2 *= sum(
            _poly_integral(
                (Polynomial(coeffs) * Polynomial(np.conj(coeffs))).coef, lo, hi
            ).real
            for lo, hi, coeffs in pieces
        )
    zero = amplitude == 0 or any(
        all(c == 0 for _, _, coeffs in pieces for c in coeffs) for pieces in factors
    )
    return PotentialSpec(
        name=name,
        evaluator=evaluate,
        box=box,
        breakpoints=breakpoints,
        strip_profile=strip_profile,
        exact={
            "mean": complex(mean),
            "first": tuple(first[:-1]),
            "first_axes": tuple(first),
            "abs2": float(abs2),
        },
        zero=bool(zero),
    )


def quadrature_moment(potential, weight, order=DEFAULT_ORDER):
    """
    int V * weight over the support box by panel-wise tensor Gauss–Legendre.

    Args:
        potential (PotentialSpec): V.
        weight (callable): Maps points (N, d) to N values; continuous on the box.
        order (int): Nodes per panel per axis.
    """
    if potential.zero:
        return 0j
    rule = potential.rule(order)
    points = rule.points()
    return complex(rule.integrate(potential(points) * weight(points)))


def compute_moments(potential, cs, order=DEFAULT_ORDER):
    """
    <V>, <Phi_0 V> (and the strip moments) for `potential` on `cs`.

    Exactly declared moments take precedence over quadrature.
    """
    if potential.dimension != cs.n:
        raise DomainError(
            f"potential is {potential.dimension}-dimensional but the guide has n = {cs.n}"
        )
    gradient = cs.mode(0).gradient_at_origin()
    if "mean" in potential.exact:
        m0 = potential.exact["mean"]
    else:
        m0 = quadrature_moment(potential, lambda p: np.ones(p.shape[0]), order)
    if "first" in potential.exact:
        first = tuple(potential.exact["first"])
    else:
        first = tuple(
            quadrature_moment(potential, lambda p, q=q: p[:, q], order)
            for q in range(cs.n - 1)
        )
    m1 = complex(np.dot(gradient, np.asarray(first, dtype=complex)))

    strip_m0 = strip_m1 = None
    if potential.strip_profile is not None:
        profile = potential.strip_profile
        if "mean" in profile.exact:
            strip_m0 = profile.exact["mean"]
        else:
            strip_m0 = quadrature_moment(profile, lambda p: np.ones(p.shape[0]), order)
        if "first_axes" in profile.exact:
            strip_m1 = profile.exact["first_axes"][0]
        else:
            strip_m1 = quadrature_moment(profile, lambda p: p[:, 0], order)

    return MomentSet(
        m0=complex(m0),
        m1=m1,
        first=first,
        phi0_origin=cs.phi0_at_origin(),
        phi0_gradient=tuple(float(g) for g in gradient),
        strip_m0=strip_m0,
        strip_m1=strip_m1,
    )


def _phi0_squared_scaled(cs, h):
    phi0 = cs.mode(0)

    def weight(points):
        return phi0.value(h * points[:, : cs.n - 1]) ** 2

    return weight


def weighted_moment_exact(potential, h, cs, order=DEFAULT_ORDER):
    """<phi_0^2 V_h> = h^n int_Q V(xi) phi_0^2(h xi') d xi."""
    ensure_inside(potential, h, cs)
    return h ** cs.n * quadrature_moment(potential, _phi0_squared_scaled(cs, h), order)


def two_term_expansion(moments, h, n):
    """h^n phi_0^2(0) <V> + 2 h^{n+1} phi_0(0) <Phi_0 V>."""
    phi0 = moments.phi0_origin
    return h**n * phi0**2 * moments.m0 + 2.0 * h ** (n + 1) * phi0 * moments.m1


def expansion_remainder(potential, h, cs, order=DEFAULT_ORDER, moments=None):
    """|<phi_0^2 V_h> - two-term expansion|; of order h^{n+2}."""
    if potential.zero:
        return 0.0
    moments = moments or compute_moments(potential, cs, order)
    exact = weighted_moment_exact(potential, h, cs, order)
    return float(abs(exact - two_term_expansion(moments, h, cs.n)))


def l2_moment(potential, h, cs, order=DEFAULT_ORDER):
    """||phi_0 V_h||^2 = h^n int |V(xi)|^2 phi_0^2(h xi') d xi."""
    ensure_inside(potential, h, cs)
    if potential.zero:
        return 0.0
    rule = potential.rule(order)
    points = rule.points()
    weight = _phi0_squared_scaled(cs, h)(points)
    return float(h ** cs.n * rule.integrate(np.abs(potential(points)) ** 2 * weight).real)


def lemma_probe(cs, box=None, exponents=range(2, 9), order=DEFAULT_ORDER):
    """
    Ratios (int_{hQ} |u|^2) / beta_n(h)^2 for u = phi_0(x') exp(-x_n^2), h = 2^-m.

    Returns:
        list[tuple]: (h, ratio) pairs in the order of `exponents`.
    """
    box = box or tuple((-0.5, 0.5) for _ in range(cs.n))
    rule = tensor_rule(box, order)
    points = rule.points()
    weights = rule.weights()
    phi0 = cs.mode(0)
    ratios = []
    for m in exponents:
        h = 2.0 ** (-m)
        if not cs.box_inside([(h * lo, h * hi) for lo, hi in box[:-1]]):
            raise DomainError(f"probe box leaves the cross-section at h = {h}")
        u2 = phi0.value(h * points[:, :-1]) ** 2 * np.exp(-2.0 * (h * points[:, -1]) ** 2)
        integral = h ** cs.n * np.sum(weights * u2)
        ratios.append((h, float(integral / beta(cs.n, h) ** 2)))
    return ratios
