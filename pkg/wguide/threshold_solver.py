"""
Scalar threshold equation 2k + eps F_eps(k) = 0 and its complex root k_eps.

The regularized mode-sum resolvent

    R~(k) g (x) = sum_{j=0}^{J} phi_j(x') int kappa_j(x_n - t_n) phi_j(t') g(t) dt,
    kappa_0(s) = (exp(-k|s|) - 1) / 2k,   kappa_j(s) = exp(-K_j |s|) / 2K_j,

is discretized by a Nyström rule on the tensor Gauss–Legendre grid over the
scaled support h Q̂. Grid fields are flat arrays indexed a = p * Q + q with p
the transverse node and q the longitudinal node. The transverse integral is the
Gauss–Legendre sum; the longitudinal one is either the sampled kernel (`point`)
or product integration of the exact kernel against the panel-wise Lagrange
interpolant of the field (`product`, default), split at the target node.

Classes:
- `DiscretizationConfig`: J_max, node counts, longitudinal rule, mode, tolerances.
- `NystromGrid`: nodes and weights over h Q̂.
- `LongitudinalKernel`: the (J+1, Q, Q) longitudinal Nyström matrices.
- `ModeSumOperator`: matrix-free A(k) and R~(k), plus the dense R~ matrix.
- `ThresholdProblem`: T_eps(k), F_eps(k) and the secant solve for k_eps.
- `ThresholdSolution`: k_eps, verdict, eigenvalue and diagnostics.

Functions:
- `apply_A`, `apply_R_tilde`, `apply_T`, `f_eps`, `solve_k`: module-level forms
  taking (cs, potential, h, alpha, cfg).
"""

# pylint: disable=R0902,R0913,R0914

import warnings
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np
from scipy.interpolate import BarycentricInterpolator
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .errors import (
    ConfigError,
    ConvergenceError,
    SeriesDivergenceError,
    SingularSystemError,
)
from .potential import beta, epsilon
from .quadrature import gauss_legendre, panel_rule, tensor_rule

EXISTS = "exists"
ABSENT = "absent"
INDETERMINATE = "indeterminate"

MODES = ("series", "direct")
LONGITUDINAL_RULES = ("product", "point")

# Dense direct solves above this grid size are refused.
MAX_DENSE_NODES = 6000

# Automatic j_max (see `modes_for`).
MODE_CUTOFF = 12.0 * np.pi
MIN_AUTO_MODES = 40
MAX_AUTO_MODES = 2000


def modes_for(cs, h):
    """
    Default highest mode index for grid scale h on `cs`.

    Keeps the modes with sqrt(mu_j) <= MODE_CUTOFF / h, clipped to
    [MIN_AUTO_MODES, MAX_AUTO_MODES].
    """
    count = cs.count_below((MODE_CUTOFF / h) ** 2)
    return int(min(MAX_AUTO_MODES, max(MIN_AUTO_MODES, count - 1)))


@dataclass(frozen=True)
class DiscretizationConfig:
    """
    Discretization of T_eps(k) and the root search.

    Attributes:
        j_max (int | None): Highest transverse mode index kept in the mode sum;
            None scales it with 1/h (see `modes_for`).
        nodes_per_panel (int | None): Gauss–Legendre nodes per panel and axis;
            None picks 24 for n = 2 and 10 for n = 3.
        fine_nodes (int): Nodes per sub-interval of the product rule.
        longitudinal_rule (str): "product" or "point".
        mode (str): "direct" (dense LU) or "series" (truncated Neumann series).
        series_order (int): Number N of series terms.
        tol_k (float | None): Root tolerance on |2k + eps F|; None means
            1e-14 * max(1, |k_0|).
        max_iter (int): Root-search steps before giving up, the initial
            fixed-point step included.
        damping (float): Step factor of the fixed-point fallback.
    """

    j_max: Optional[int] = None
    nodes_per_panel: Optional[int] = None
    fine_nodes: int = 64
    longitudinal_rule: str = "product"
    mode: str = "direct"
    series_order: int = 4
    tol_k: Optional[float] = None
    max_iter: int = 50
    damping: float = 0.5

    def __post_init__(self):
        if self.j_max is not None and self.j_max < 1:
            raise ConfigError(f"j_max must be at least 1, got {self.j_max}")
        if self.nodes_per_panel is not None and self.nodes_per_panel < 1:
            raise ConfigError(f"nodes_per_panel must be positive, got {self.nodes_per_panel}")
        if self.fine_nodes < 2:
            raise ConfigError(f"fine_nodes must be at least 2, got {self.fine_nodes}")
        if self.longitudinal_rule not in LONGITUDINAL_RULES:
            raise ConfigError(
                f"longitudinal_rule must be one of {LONGITUDINAL_RULES}, "
                f"got {self.longitudinal_rule!r}"
            )
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.series_order < 1:
            raise ConfigError(f"series_order must be at least 1, got {self.series_order}")
        if self.tol_k is not None and not self.tol_k > 0:
            raise ConfigError(f"tol_k must be positive, got {self.tol_k}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be at least 1, got {self.max_iter}")
        if not 0.0 < self.damping <= 1.0:
            raise ConfigError(f"damping must lie in (0, 1], got {self.damping}")

    def order_for(self, n):
        if self.nodes_per_panel is not None:
            return self.nodes_per_panel
        return 24 if n == 2 else 10

    def j_max_for(self, cs, h):
        if self.j_max is not None:
            return self.j_max
        return modes_for(cs, h)

    def replace(self, **changes):
        values = asdict(self)
        values.update(changes)
        return DiscretizationConfig(**values)


@dataclass(frozen=True)
class NystromGrid:
    """
    Tensor quadrature grid over h Q̂.

    Attributes:
        reference_points (ndarray): (N, n) nodes of the unscaled box Q̂.
        transverse_nodes (ndarray): (P, n-1) scaled transverse nodes.
        transverse_weights (ndarray): (P,) transverse weights.
        longitudinal_nodes (ndarray): (Q,) scaled longitudinal nodes.
        longitudinal_weights (ndarray): (Q,) longitudinal weights.
        panels (list): (lo, hi, slice) longitudinal panels.
    """

    reference_points: np.ndarray
    transverse_nodes: np.ndarray
    transverse_weights: np.ndarray
    longitudinal_nodes: np.ndarray
    longitudinal_weights: np.ndarray
    panels: list

    @classmethod
    def build(cls, potential, h, order):
        reference = tensor_rule(potential.breakpoints, order).points()
        transverse = tensor_rule(potential.breakpoints[:-1], order, scale=h)
        nodes, weights, panels = panel_rule(h * np.asarray(potential.breakpoints[-1]), order)
        return cls(
            reference_points=reference,
            transverse_nodes=transverse.points(),
            transverse_weights=transverse.weights(),
            longitudinal_nodes=nodes,
            longitudinal_weights=weights,
            panels=panels,
        )

    @property
    def shape(self):
        return self.transverse_weights.size, self.longitudinal_weights.size

    @property
    def size(self):
        p, q = self.shape
        return p * q

    @property
    def weights(self):
        return np.multiply.outer(self.transverse_weights, self.longitudinal_weights).ravel()

    def transverse_field(self, values):
        """Broadcast per-transverse-node values (P,) to a grid field (N,)."""
        return np.repeat(np.asarray(values), self.shape[1])


def _kernel(rate, distance, regular):
    if regular:
        if rate == 0:
            return -0.5 * distance
        return np.expm1(-rate * distance) / (2.0 * rate)
    return np.exp(-rate * distance) / (2.0 * rate)


class LongitudinalKernel:
    """
    Longitudinal Nyström matrices W_j[q, b] approximating
    int kappa_j(s_q - y) g(y) dy ≈ sum_b W_j[q, b] g(s_b).
    """

    def __init__(self, nodes, weights, panels, rule="product", fine_nodes=64):
        self.nodes = np.asarray(nodes, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.panels = panels
        self.rule = rule
        if rule == "product":
            self._build_product(fine_nodes)
        else:
            self._distance = np.abs(self.nodes[:, None] - self.nodes[None, :])

    def _build_product(self, fine_nodes):
        count = self.nodes.size
        bases = [
            (index, BarycentricInterpolator(self.nodes[index], np.eye(index.stop - index.start)))
            for _, _, index in self.panels
        ]
        distances, fine_weights, lagrange = [], [], []
        for s in self.nodes:
            row_y, row_w, row_l = [], [], []
            for (lo, hi, _), (index, basis) in zip(self.panels, bases):
                split = s if lo < s < hi else 0.5 * (lo + hi)
                for a, b in ((lo, split), (split, hi)):
                    y, w = gauss_legendre(fine_nodes, a, b)
                    values = np.zeros((fine_nodes, count))
                    values[:, index] = basis(y)
                    row_y.append(y)
                    row_w.append(w)
                    row_l.append(values)
            distances.append(np.abs(s - np.concatenate(row_y)))
            fine_weights.append(np.concatenate(row_w))
            lagrange.append(np.concatenate(row_l))
        self._distance = np.array(distances)
        self._fine_weights = np.array(fine_weights)
        self._lagrange = np.array(lagrange)

    def matrices(self, rates, regular_first=True):
        """(J+1, Q, Q) matrices for rates (k, K_1, ..., K_J)."""
        kappa = np.stack(
            [
                _kernel(rate, self._distance, regular_first and j == 0)
                for j, rate in enumerate(rates)
            ]
        )
        if self.rule == "product":
            weighted = (kappa * self._fine_weights[None]).transpose(1, 0, 2)
            return np.matmul(weighted, self._lagrange).transpose(1, 0, 2)
        return kappa * self.weights[None, None, :]


class ModeSumOperator:
    """Matrix-free A(k) and R~(k) on a `NystromGrid`."""

    def __init__(self, cs, grid, cfg, j_max):
        self.cs = cs
        self.grid = grid
        self.count = j_max + 1
        self.phi = cs.mode_values(self.count, grid.transverse_nodes)
        self._weighted = self.phi * grid.transverse_weights[None, :]
        self.kernel = LongitudinalKernel(
            grid.longitudinal_nodes,
            grid.longitudinal_weights,
            grid.panels,
            rule=cfg.longitudinal_rule,
            fine_nodes=cfg.fine_nodes,
        )
        self.phi0 = grid.transverse_field(self.phi[0])

    def matrices(self, k):
        return self.kernel.matrices(self.cs.rates(self.count, k))

    def _longitudinal(self, g, k):
        field_ = np.asarray(g).reshape(self.grid.shape)
        proj = np.einsum("jp,p,pq->jq", self.phi, self.grid.transverse_weights, field_)
        return np.einsum("jab,jb->ja", self.matrices(k), proj)

    def components(self, g, k):
        """Per-mode terms of R~(k) g, shape (J+1, P, Q)."""
        lon = self._longitudinal(g, k)
        return self.phi[:, :, None] * lon[:, None, :]

    def apply_regular(self, g, k):
        """R~(k) g."""
        return np.einsum("jp,jq->pq", self.phi, self._longitudinal(g, k)).ravel()

    def apply(self, g, k):
        """A(k) g = R~(k) g + phi_0(x') <g phi_0> / 2k."""
        k = self.cs.kj(0, k)
        return self.apply_regular(g, k) + self.phi0 * self.pairing(g) / (2.0 * k)

    def pairing(self, g):
        """<phi_0 g> by the grid quadrature."""
        return np.sum(self.grid.weights * self.phi0 * np.asarray(g))

    def matrix(self, k):
        """Dense R~(k), shape (N, N)."""
        p_count, q_count = self.grid.shape
        longitudinal = self.matrices(k).reshape(self.count, -1)
        dense = np.empty((p_count, q_count, p_count, q_count), dtype=complex)
        for p in range(p_count):
            block = (self.phi[:, p, None] * self._weighted).T @ longitudinal
            dense[p] = block.reshape(p_count, q_count, q_count).transpose(1, 0, 2)
        return dense.reshape(self.grid.size, self.grid.size)


@dataclass
class FResult:
    """Value of F_eps(k) with the diagnostics of its evaluation."""

    value: complex
    mode: str
    terms: list = field(default_factory=list)
    mode_tail: float = 0.0


@dataclass
class ThresholdSolution:
    """
    Root k_eps of 2k + eps F_eps(k) = 0 and the existence verdict.

    Attributes:
        k: The root.
        verdict: "exists", "absent" or "indeterminate".
        e: mu_0 - k^2 when the verdict is "exists", else None.
        residual: |2k + eps F_eps(k)| at return.
        iterations: Number of secant steps.
        diagnostics: Mode, tolerances, trace, series terms, mode tail.
    """

    k: complex
    verdict: str
    e: Optional[complex]
    residual: float
    iterations: int
    mu0: float
    diagnostics: dict = field(default_factory=dict)

    def to_record(self, **inputs):
        record = dict(inputs)
        record.update(
            {
                "k": _split(self.k),
                "verdict": self.verdict,
                "e": None if self.e is None else _split(self.e),
                "residual": self.residual,
                "iterations": self.iterations,
                "mu0": self.mu0,
                "diagnostics": self.diagnostics,
            }
        )
        return record


def _split(value):
    value = complex(value)
    return {"re": value.real, "im": value.imag}


def verdict_from(k, tol_sign):
    if k.real > tol_sign:
        return EXISTS
    if k.real < -tol_sign:
        return ABSENT
    return INDETERMINATE


class ThresholdProblem:
    """
    The Birman–Schwinger reduction for H^h = -Δ_D + h^{-alpha} V(x/h).

    Args:
        cs (CrossSection): Cross-section Ω.
        potential (PotentialSpec): Unscaled profile V.
        h (float): Scale in (0, 1).
        alpha (float): Exponent below 1.
        cfg (DiscretizationConfig, optional): Discretization.
    """

    def __init__(self, cs, potential, h, alpha, cfg=None):
        potential.scaled(h, alpha).check_inside(cs)
        h, alpha = float(h), float(alpha)
        self._setup(
            cs, potential, cfg, h, alpha,
            beta=beta(cs.n, h),
            eps=epsilon(cs.n, h, alpha),
            k_star=h ** (cs.n - alpha),
        )

    @classmethod
    def weak_coupling(cls, cs, potential, coupling, cfg=None):
        """
        H = -Δ_D + c V with V unscaled: grid scale 1, beta = 1, eps = c.

        The threshold equation keeps its form 2k + c <phi_0 (I + c V R~)^{-1} V phi_0> = 0.
        """
        potential.scaled(1.0, 0.0).check_inside(cs)
        problem = cls.__new__(cls)
        problem._setup(
            cs, potential, cfg, 1.0, 0.0, beta=1.0, eps=float(coupling), k_star=float(coupling)
        )
        return problem

    def _setup(self, cs, potential, cfg, h, alpha, beta, eps, k_star):
        # pylint: disable=W0201,W0621
        self.cs = cs
        self.potential = potential
        self.cfg = cfg or DiscretizationConfig()
        self.h = h
        self.alpha = alpha
        self.beta = beta
        self.eps = eps
        self.k_star = k_star
        self.grid = NystromGrid.build(potential, h, self.cfg.order_for(cs.n))
        self.j_max = self.cfg.j_max_for(cs, h)
        self.operator = ModeSumOperator(cs, self.grid, self.cfg, self.j_max)
        self.profile = potential(self.grid.reference_points)

    @property
    def source(self):
        """L_eps phi_0 = beta^{-1} V_h phi_0 on the grid."""
        return self.profile * self.operator.phi0 / self.beta

    def apply_A(self, g, k):
        return self.operator.apply(g, k)

    def apply_R_tilde(self, g, k):
        return self.operator.apply_regular(g, k)

    def apply_T(self, g, k):
        """beta^{-1} V_h R~(k) g."""
        return self.profile * self.apply_R_tilde(g, k) / self.beta

    def _mode_tail(self, k):
        components = self.operator.components(self.source, k)
        total = np.max(np.abs(components.sum(axis=0)))
        if total == 0:
            return 0.0
        return float(np.max(np.abs(components[-1])) / total)

    def f_eps(self, k, mode=None):
        """F_eps(k) = <phi_0 (I + eps T)^{-1} L_eps phi_0>."""
        mode = mode or self.cfg.mode
        k = complex(k)
        if self.potential.zero:
            return FResult(0j, mode)
        if mode == "series":
            return self._f_series(k)
        return self._f_direct(k)

    def _f_series(self, k):
        order = self.cfg.series_order
        vector = self.source
        terms, total = [], 0j
        for j in range(order):
            term = (-self.eps) ** j * self.operator.pairing(vector)
            terms.append(complex(term))
            total += term
            if j + 1 < order:
                vector = self.apply_T(vector, k)
        magnitudes = [abs(t) for t in terms]
        for j in range(1, order):
            if magnitudes[j] > 0 and magnitudes[j] >= magnitudes[j - 1]:
                raise SeriesDivergenceError(
                    f"series term {j} ({magnitudes[j]:.3e}) does not decay below term "
                    f"{j - 1} ({magnitudes[j - 1]:.3e}); use mode 'direct'"
                )
        return FResult(complex(total), "series", magnitudes, self._mode_tail(k))

    def _f_direct(self, k):
        size = self.grid.size
        if size > MAX_DENSE_NODES:
            raise ConfigError(
                f"direct solve on {size} nodes is too large; lower nodes_per_panel "
                "or use mode 'series'"
            )
        system = np.eye(size, dtype=complex) + (
            self.eps / self.beta
        ) * self.profile[:, None] * self.operator.matrix(k)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("error", LinAlgWarning)
                factor = lu_factor(system)
        except (LinAlgWarning, ValueError) as e:
            raise SingularSystemError(f"(I + eps T) is singular at k = {k}: {e}") from e
        if np.any(np.abs(np.diag(factor[0])) == 0):
            raise SingularSystemError(f"(I + eps T) is singular at k = {k}")
        solution = lu_solve(factor, self.source)
        return FResult(
            complex(self.operator.pairing(solution)), "direct", [], self._mode_tail(k)
        )

    def residual(self, k):
        """G(k) = 2k + eps F_eps(k)."""
        return 2.0 * complex(k) + self.eps * self.f_eps(k).value

    def solve(self):
        """
        Secant iteration for the root of G(k) = 2k + eps F_eps(k).

        The first step is the fixed-point map k -> -eps F_eps(k) / 2; it counts
        against `max_iter` like every secant step.

        Returns:
            ThresholdSolution: root, verdict and diagnostics.

        Raises:
            ConvergenceError: when `max_iter` steps do not reach |G| < tol_k.
        """
        cfg = self.cfg
        first = self.f_eps(self.k_star)
        k0 = -0.5 * self.eps * first.value
        tol_k = cfg.tol_k or 1e-14 * max(1.0, abs(k0))
        tol_sign = max(10.0 * tol_k, 1e-12)

        last = self.f_eps(k0)
        g_cur = 2.0 * k0 + self.eps * last.value
        trace = [(k0, abs(g_cur))]
        iterations = 0
        k_prev = g_prev = None
        k_cur = k0
        while abs(g_cur) >= tol_k:
            if iterations >= cfg.max_iter:
                raise ConvergenceError(
                    f"root search did not reach |G| < {tol_k:.3e} "
                    f"in {cfg.max_iter} steps",
                    trace,
                )
            iterations += 1
            if k_prev is None:
                k_next = -0.5 * self.eps * last.value
            else:
                denominator = g_cur - g_prev
                if denominator == 0 or not np.isfinite(denominator):
                    k_next = k_cur - cfg.damping * g_cur / 2.0
                else:
                    k_next = k_cur - g_cur * (k_cur - k_prev) / denominator
            k_prev, g_prev = k_cur, g_cur
            k_cur = k_next
            last = self.f_eps(k_cur)
            g_cur = 2.0 * k_cur + self.eps * last.value
            trace.append((k_cur, abs(g_cur)))

        k_cur = complex(k_cur)
        verdict = verdict_from(k_cur, tol_sign)
        mu0 = self.cs.mu0
        return ThresholdSolution(
            k=k_cur,
            verdict=verdict,
            e=complex(mu0 - k_cur * k_cur) if verdict == EXISTS else None,
            residual=float(abs(g_cur)),
            iterations=iterations,
            mu0=mu0,
            diagnostics={
                "mode": last.mode,
                "eps": self.eps,
                "beta": self.beta,
                "tol_k": tol_k,
                "tol_sign": tol_sign,
                "k_initial": _split(k0),
                "series_terms": last.terms,
                "mode_tail": last.mode_tail,
                "trace": [{"k": _split(k), "residual": r} for k, r in trace],
                "grid_nodes": self.grid.size,
                "j_max": self.j_max,
            },
        )


def apply_A(cs, potential, h, alpha, g, k, cfg=None):
    return ThresholdProblem(cs, potential, h, alpha, cfg).apply_A(g, k)


def apply_R_tilde(cs, potential, h, alpha, g, k, cfg=None):
    return ThresholdProblem(cs, potential, h, alpha, cfg).apply_R_tilde(g, k)


def apply_T(cs, potential, h, alpha, g, k, cfg=None):
    return ThresholdProblem(cs, potential, h, alpha, cfg).apply_T(g, k)


def f_eps(cs, potential, k, h, alpha, cfg=None):
    return ThresholdProblem(cs, potential, h, alpha, cfg).f_eps(k).value


def solve_k(cs, potential, h, alpha, cfg=None):
    """Root k_eps and verdict for (cs, V, h, alpha)."""
    return ThresholdProblem(cs, potential, h, alpha, cfg).solve()
