"""
Closed-form predictors for the threshold eigenvalue and its existence.

Every prediction uses the sign convention k = -eps F / 2 of the threshold
equation, so that Re k > 0 means an eigenvalue e = mu_0 - k^2 below the
threshold and Re k < 0 means none.

Regimes:
- `de_baseline`: H_h = -Δ_D + h V with an unscaled V; gap (h^2 / 4) <V phi_0^2>^2.
- `main`: H^h = -Δ_D + h^{-alpha} V(x / h) with Re <V> != 0.
- `critical_alpha_neg`: Re <V> = 0, alpha < 0, decided by phi_0(0) Re <Phi_0 V>.
- `strip_critical`: n = 2, separable V = v(t_1) 1{|t_2| < 1}, <v>' = 0,
  0 <= alpha < 1/2, decided by phi_0(0) phi_0'(0) int v t_1.

Functions:
- `check_conditions(moments)`: sign conditions of every regime.
- `predict_de`, `predict_main`, `predict_critical`, `predict_strip_critical`.
- `strip_bvp(v, h, cs)`: the one-dimensional boundary-value diagnostics that
  control the regularized resolvent in the strip-critical case.
"""

# pylint: disable=R0902,R0913,R0914

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, NotApplicableError
from .potential import compute_moments, ensure_inside, quadrature_moment
from .quadrature import gauss_legendre, panel_rule
from .threshold_solver import ABSENT, EXISTS, INDETERMINATE

ZERO_BAND = 1e-12

DE_BASELINE = "de_baseline"
MAIN = "main"
CRITICAL_ALPHA_NEG = "critical_alpha_neg"
STRIP_CRITICAL = "strip_critical"
REGIMES = (DE_BASELINE, MAIN, CRITICAL_ALPHA_NEG, STRIP_CRITICAL)

REMAINDERS = {
    DE_BASELINE: "O(h^3)",
    MAIN: "O(h + h^(-alpha) beta_n(h))",
    CRITICAL_ALPHA_NEG: "O(h + h^(-1-alpha) beta_n(h))",
    STRIP_CRITICAL: "O(h^(1/2 - alpha))",
}


def _split(value):
    value = complex(value)
    return {"re": value.real, "im": value.imag}


def _sign(value):
    if abs(value) <= ZERO_BAND:
        return 0
    return 1 if value > 0 else -1


@dataclass(frozen=True)
class RegimePrediction:
    """
    Predicted k and e = mu_0 - k^2 for one regime.

    Attributes:
        regime (str): One of `REGIMES`.
        k (complex): Predicted root.
        e (complex): mu_0 - k^2.
        remainder (str): Stated relative remainder order.
        verdict (str): "exists", "absent" or "indeterminate".
        mu0 (float): Threshold.
        h (float), alpha (float): Inputs.
        leading_gap (complex | None): Leading-order mu_0 - e when the regime
            states it separately from k^2.
    """

    regime: str
    k: complex
    e: complex
    remainder: str
    verdict: str
    mu0: float
    h: float
    alpha: float
    leading_gap: Optional[complex] = None

    @classmethod
    def from_k(cls, regime, k, verdict, mu0, h, alpha, leading_gap=None):
        k = complex(k)
        return cls(
            regime=regime,
            k=k,
            e=complex(mu0 - k * k),
            remainder=REMAINDERS[regime],
            verdict=verdict,
            mu0=float(mu0),
            h=float(h),
            alpha=float(alpha),
            leading_gap=leading_gap,
        )

    def to_record(self, **inputs):
        record = dict(inputs)
        record.update(
            {
                "regime": self.regime,
                "k": _split(self.k),
                "e": _split(self.e),
                "remainder": self.remainder,
                "verdict": self.verdict,
                "mu0": self.mu0,
                "h": self.h,
                "alpha": self.alpha,
                "leading_gap": None if self.leading_gap is None else _split(self.leading_gap),
            }
        )
        return record


@dataclass(frozen=True)
class ConditionReport:
    """
    Sign conditions deciding existence in each regime.

    Attributes:
        main: verdict from the sign of Re <V> ("indeterminate" when it vanishes).
        critical: verdict from the sign of phi_0(0) Re <Phi_0 V>, only when
            Re <V> vanishes.
        strip: verdict from <v>' = 0 and the sign of
            phi_0(0) phi_0'(0) Re int v t_1, only for separable strips.
        regime: the regime tag that decides the case.
    """

    main: str
    critical: Optional[str]
    strip: Optional[str]
    regime: str

    @property
    def label(self):
        verdict = {MAIN: self.main, CRITICAL_ALPHA_NEG: self.critical,
                   STRIP_CRITICAL: self.strip}.get(self.regime, self.main)
        return f"{verdict} ({self.regime})"

    def to_record(self):
        return {
            "main": self.main,
            "critical": self.critical,
            "strip": self.strip,
            "regime": self.regime,
            "label": self.label,
        }


def _verdict_from_negative(sign):
    """A negative moment sign means Re k > 0."""
    return {-1: EXISTS, 1: ABSENT, 0: INDETERMINATE}[sign]


def check_conditions(moments):
    """
    Evaluate the existence conditions with a 1e-12 band for "= 0".

    Args:
        moments (MomentSet): Moments of the unscaled profile.

    Returns:
        ConditionReport
    """
    main_sign = _sign(moments.m0.real)
    main = _verdict_from_negative(main_sign)
    critical = strip = None
    regime = MAIN
    if main_sign == 0:
        critical = _verdict_from_negative(_sign(moments.phi0_origin * moments.m1.real))
        regime = CRITICAL_ALPHA_NEG
    if moments.is_strip and _sign(moments.strip_m0.real) == 0:
        product = moments.phi0_origin * moments.phi0_gradient[0] * moments.strip_m1.real
        strip = _verdict_from_negative(_sign(product))
        regime = STRIP_CRITICAL
    return ConditionReport(main=main, critical=critical, strip=strip, regime=regime)


def predict_de(h, potential, cs, order=32):
    """
    Baseline weak coupling H_h = -Δ_D + h V with an unscaled V.

    k = -(h / 2) <V phi_0^2>, e = mu_0 - (h^2 / 4) <V phi_0^2>^2.
    A vanishing <V phi_0^2> is admitted and gives e = mu_0 at this order.

    Raises:
        NotApplicableError: when Re <V phi_0^2> > 0.
        DomainError: when supp V leaves the guide.
    """
    if not h > 0:
        raise DomainError(f"coupling h must be positive, got {h}")
    ensure_inside(potential, 1.0, cs)
    phi0 = cs.mode(0)
    weighted = quadrature_moment(potential, lambda p: phi0.value(p[:, :-1]) ** 2, order)
    sign = _sign(weighted.real)
    if sign > 0:
        raise NotApplicableError(
            f"<V phi_0^2> = {weighted.real:.6g} > 0; the weak-coupling eigenvalue "
            "requires a nonpositive mean"
        )
    if sign == 0:
        weighted = 0j
    k = -0.5 * h * weighted
    verdict = EXISTS if sign < 0 else INDETERMINATE
    return RegimePrediction.from_k(DE_BASELINE, k, verdict, cs.mu0, h, 0.0)


def _second_term(h, alpha, n, moments):
    return h ** (n + 1 - alpha) * moments.phi0_origin * moments.m1


def predict_main(h, alpha, cs, moments):
    """
    Two-term prediction k = -(1/2) h^{n-alpha} (phi_0(0)^2 <V> + 2h phi_0(0) <Phi_0 V>).

    The leading gap (h^{2(n-alpha)} / 4) (phi_0(0)^2 <V>)^2 is reported in
    `leading_gap`; `e` is mu_0 - k^2 with the two-term k.
    """
    if alpha >= 1:
        raise NotApplicableError(f"alpha = {alpha} is out of scope (alpha < 1 required)")
    n = cs.n
    leading = moments.phi0_origin**2 * moments.m0
    k = -0.5 * h ** (n - alpha) * leading - _second_term(h, alpha, n, moments)
    leading_gap = h ** (2 * (n - alpha)) / 4.0 * leading**2
    sign = _sign(moments.m0.real)
    verdict = _verdict_from_negative(sign)
    return RegimePrediction.from_k(
        MAIN, k, verdict, cs.mu0, h, alpha, leading_gap=complex(leading_gap)
    )


def predict_critical(h, alpha, cs, moments):
    """
    Critical case Re <V> = 0 for alpha < 0: k = -h^{n+1-alpha} phi_0(0) <Phi_0 V>.

    Raises:
        NotApplicableError: alpha >= 0, Re <V> not zero, or phi_0(0) Re <Phi_0 V> zero.
    """
    if alpha >= 0:
        raise NotApplicableError(f"the critical-case law holds for alpha < 0, got {alpha}")
    if _sign(moments.m0.real) != 0:
        raise NotApplicableError(f"Re <V> = {moments.m0.real:.6g} is not zero")
    sign = _sign(moments.phi0_origin * moments.m1.real)
    if sign == 0:
        raise NotApplicableError("phi_0(0) Re <Phi_0 V> vanishes; no conclusion at this order")
    k = -_second_term(h, alpha, cs.n, moments)
    return RegimePrediction.from_k(
        CRITICAL_ALPHA_NEG, k, _verdict_from_negative(sign), cs.mu0, h, alpha
    )


def predict_strip_critical(h, alpha, potential, cs, moments=None):
    """
    Strip with separable V = v(t_1) 1{|t_2| < 1} and <v>' = 0:
    k = -2 h^{3-alpha} phi_0(0) phi_0'(0) int v(t_1) t_1 dt_1.

    A symmetric strip (phi_0'(0) = 0) gives k = 0 and verdict "indeterminate".

    Raises:
        NotApplicableError: n != 2, no separable tag, alpha outside [0, 1/2),
            or <v>' != 0.
    """
    if cs.n != 2:
        raise NotApplicableError(f"strip analysis needs n = 2, got n = {cs.n}")
    if potential.strip_profile is None:
        raise NotApplicableError(f"potential {potential.name!r} is not separable")
    if not 0 <= alpha < 0.5:
        raise NotApplicableError(f"strip analysis holds for 0 <= alpha < 1/2, got {alpha}")
    moments = moments or compute_moments(potential, cs)
    if _sign(moments.strip_m0.real) != 0:
        raise NotApplicableError(f"<v>' = {moments.strip_m0.real:.6g} is not zero")
    product = moments.phi0_origin * moments.phi0_gradient[0] * moments.strip_m1
    sign = _sign(product.real)
    if sign == 0:
        return RegimePrediction.from_k(STRIP_CRITICAL, 0j, INDETERMINATE, cs.mu0, h, alpha)
    k = -2.0 * h ** (3 - alpha) * product
    return RegimePrediction.from_k(
        STRIP_CRITICAL, k, _verdict_from_negative(sign), cs.mu0, h, alpha
    )


@dataclass(frozen=True)
class StripBVPResult:
    """
    Squared L^2(Ω) norms of -U'' = v_h phi_0 and of its split U = U_0 + U_1 + U~.

    `modal_values` = sum_j |f_j|^2 / mu_j^2 equals ||U||^2 and
    `modal_gradient` = sum_j |f_j|^2 / mu_j equals ||U'||^2,
    with f_j = <phi_j v_h phi_0>'.
    """

    h: float
    norm_u: float
    norm_du: float
    norm_u0: float
    norm_u1: float
    norm_u_tilde: float
    norm_f_tilde: float
    modal_values: float
    modal_gradient: float
    modes: int

    def to_record(self):
        return dict(self.__dict__)


def _dirichlet_solve(rhs, support, lo, hi, points, order):
    """
    U and U' at `points` for -U'' = rhs on (lo, hi), U(lo) = U(hi) = 0.

    U(x) = ((hi - x) int_lo^x (t - lo) f + (x - lo) int_x^hi (hi - t) f) / L.
    """
    length = hi - lo
    left = np.zeros(points.size, dtype=complex)
    right = np.zeros(points.size, dtype=complex)
    ref, ref_w = gauss_legendre(order, -1.0, 1.0)
    for a, b in zip(support[:-1], support[1:]):
        cut = np.clip(points, a, b)
        for start, stop, target, weight_fn in (
            (np.full_like(cut, a), cut, left, lambda t: t - lo),
            (cut, np.full_like(cut, b), right, lambda t: hi - t),
        ):
            half = 0.5 * (stop - start)
            t = start[:, None] + half[:, None] * (ref[None, :] + 1.0)
            target += np.sum(half[:, None] * ref_w[None, :] * weight_fn(t) * rhs(t), axis=1)
    value = ((hi - points) * left + (points - lo) * right) / length
    slope = (right - left) / length
    return value, slope


def strip_bvp(potential, h, cs, modes=400, order=32):
    """
    Boundary-value diagnostics of -U'' = v_h phi_0 on Ω with v_h(x) = v(x / h).

    Args:
        potential (PotentialSpec): Separable strip potential, or a 1-D profile v.
        h (float): Scale.
        cs (CrossSection): Interval cross-section.
        modes (int): Number of transverse modes in the modal sums.
        order (int): Gauss–Legendre nodes per panel.

    Returns:
        StripBVPResult
    """
    if cs.n != 2:
        raise NotApplicableError(f"strip diagnostics need n = 2, got n = {cs.n}")
    profile = potential.strip_profile or potential
    if profile.dimension != 1:
        raise NotApplicableError(f"profile of {potential.name!r} is not one-dimensional")
    lo, hi = cs.bounds[0]
    support = h * np.asarray(profile.breakpoints[0])
    if not (support[0] > lo and support[-1] < hi):
        raise DomainError(f"scaled support {support[[0, -1]]} leaves {cs.describe()}")

    phi0 = cs.mode(0)
    phi0_origin = cs.phi0_at_origin()
    slope0 = float(phi0.gradient_at_origin()[0])

    def v_h(t):
        shape = np.shape(t)
        return profile(np.reshape(t, (-1, 1)) / h).reshape(shape)

    def phi(t):
        return phi0.value(np.ravel(t)).reshape(np.shape(t))

    sources = {
        "u": lambda t: v_h(t) * phi(t),
        "u0": lambda t: v_h(t) * phi0_origin,
        "u1": lambda t: v_h(t) * slope0 * t,
        "u_tilde": lambda t: v_h(t) * (phi(t) - phi0_origin - slope0 * t),
    }

    breaks = np.unique(np.concatenate(([lo, hi], support)))
    points, weights, _ = panel_rule(breaks, order)
    norms = {}
    for name, rhs in sources.items():
        value, slope = _dirichlet_solve(rhs, support, lo, hi, points, order)
        norms[name] = float(np.sum(weights * np.abs(value) ** 2))
        if name == "u":
            norms["du"] = float(np.sum(weights * np.abs(slope) ** 2))

    sup_nodes, sup_weights, _ = panel_rule(support, order)
    f_tilde = sources["u_tilde"](sup_nodes)
    norm_f_tilde = float(np.sum(sup_weights * np.abs(f_tilde) ** 2))

    mu = cs.eigenvalues(modes)
    basis = cs.mode_values(modes, sup_nodes)
    coefficients = basis @ (sup_weights * sources["u"](sup_nodes))
    power = np.abs(coefficients) ** 2
    return StripBVPResult(
        h=float(h),
        norm_u=norms["u"],
        norm_du=norms["du"],
        norm_u0=norms["u0"],
        norm_u1=norms["u1"],
        norm_u_tilde=norms["u_tilde"],
        norm_f_tilde=norm_f_tilde,
        modal_values=float(np.sum(power / mu**2)),
        modal_gradient=float(np.sum(power / mu)),
        modes=int(modes),
    )
