"""
Brute-force reference eigensolver on a truncated cylinder.

H^h is projected onto the first J transverse modes and discretized with
second-order central differences in x_n on (-L, L) with Dirichlet ends:

    nodes x_i = -L + i δ, i = 1..M, M = 2L/δ - 1, unknown index i * J + j,
    (H u)_{i,j} = (2u_{i,j} - u_{i-1,j} - u_{i+1,j}) / δ^2 + mu_j u_{i,j}
                  + sum_l W_{j,l}(x_i) u_{i,l},
    W_{j,l}(x_n) = h^{-alpha} int_Ω phi_j phi_l V(x' / h, x_n / h) dx'.

The coupling is averaged over the longitudinal cell [x_i - δ/2, x_i + δ/2]
by default so that jumps of V keep the scheme second order; point sampling
is available. The eigenvalue nearest a shift sigma < mu_0 is found by
shift-invert power iteration on a sparse LU factorization.

Classes:
- `Coupling`: projected potential blocks on the cells meeting the support.
- `TruncatedProblem`: the assembled sparse operator.
- `OracleResult`: eigenvalue below mu_0 (or None) with diagnostics.

Functions:
- `project_potential`, `lowest_eigenvalue`, `refine`.
"""

# pylint: disable=R0902,R0913,R0914

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import ConfigError, ConvergenceError, DomainError, SingularSystemError
from .quadrature import gauss_legendre, tensor_rule

PROJECTIONS = ("average", "point")
SIZING_FACTOR = 15.0


@dataclass(frozen=True)
class Coupling:
    """W(x_i) blocks of shape (J, J) for the cells listed in `indices`."""

    indices: np.ndarray
    blocks: np.ndarray

    @property
    def is_zero(self):
        return self.indices.size == 0 or not np.any(self.blocks)


def _cell_nodes(lo, hi, breaks, order):
    """Gauss–Legendre nodes on [lo, hi] split at the breakpoints inside it."""
    cuts = [lo] + [b for b in breaks if lo < b < hi] + [hi]
    nodes, weights = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        x, w = gauss_legendre(order, a, b)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def project_potential(potential, h, alpha, cs, modes, nodes, spacing,
                      projection="average", order=16):
    """
    Project h^{-alpha} V(x / h) onto the transverse modes along the grid.

    Args:
        potential (PotentialSpec): Unscaled profile V.
        h (float), alpha (float): Scale and exponent.
        cs (CrossSection): Cross-section.
        modes (int): Number J of transverse modes.
        nodes (ndarray): Longitudinal grid nodes x_i.
        spacing (float): Grid spacing δ.
        projection (str): "average" over the cell or "point" sampling.
        order (int): Gauss–Legendre nodes per panel.

    Returns:
        Coupling
    """
    if projection not in PROJECTIONS:
        raise ConfigError(f"projection must be one of {PROJECTIONS}, got {projection!r}")
    nodes = np.asarray(nodes, dtype=float)
    lo, hi = (h * b for b in potential.box[-1])
    if potential.zero:
        return Coupling(np.zeros(0, dtype=int), np.zeros((0, modes, modes)))

    transverse = tensor_rule(potential.breakpoints[:-1], max(order, 16), scale=h)
    points = transverse.points()
    phi = cs.mode_values(modes, points)
    weighted = phi * transverse.weights()[None, :]
    breaks = [h * b for b in potential.breakpoints[-1]]

    if projection == "point":
        indices = np.nonzero((nodes >= lo) & (nodes <= hi))[0]
        samples = [(np.array([nodes[i]]), np.array([1.0])) for i in indices]
    else:
        half = 0.5 * spacing
        indices = np.nonzero((nodes + half > lo) & (nodes - half < hi))[0]
        samples = []
        for i in indices:
            a, b = max(nodes[i] - half, lo), min(nodes[i] + half, hi)
            s, w = _cell_nodes(a, b, breaks, order)
            samples.append((s, w / spacing))

    blocks = []
    for s, w in samples:
        grid = np.concatenate(
            [np.repeat(points, s.size, axis=0), np.tile(s, points.shape[0])[:, None]],
            axis=1,
        )
        values = potential(grid / h).reshape(points.shape[0], s.size) @ w
        blocks.append(h ** (-alpha) * np.einsum("ip,jp,p->ij", phi, weighted, values))
    blocks = np.array(blocks) if blocks else np.zeros((0, modes, modes))
    return Coupling(indices.astype(int), blocks)


@dataclass(frozen=True)
class TruncatedProblem:
    """
    Transverse-Galerkin, finite-difference truncation of H^h.

    Attributes:
        cs (CrossSection), potential (PotentialSpec), h (float), alpha (float).
        half_length (float): L, snapped to a multiple of `spacing`.
        spacing (float): δ.
        modes (int): J.
        projection (str): "average" or "point".
        k_estimate (complex | None): Predicted k used for the L >= 15 / Re k rule.
    """

    cs: object
    potential: object
    h: float
    alpha: float
    half_length: float
    spacing: float
    modes: int
    projection: str = "average"
    k_estimate: Optional[complex] = None
    coupling: Coupling = field(default=None, repr=False, compare=False)
    matrix: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not self.half_length > 0 or not self.spacing > 0:
            raise ConfigError("half_length and spacing must be positive")
        if self.modes < 1:
            raise ConfigError(f"modes must be at least 1, got {self.modes}")
        steps = int(round(self.half_length / self.spacing))
        if steps < 2:
            raise ConfigError("half_length must span at least two grid steps")
        object.__setattr__(self, "half_length", steps * self.spacing)
        self.potential.scaled(self.h, self.alpha).check_inside(self.cs)
        lo, hi = (self.h * b for b in self.potential.box[-1])
        if not (-self.half_length < lo and hi < self.half_length):
            raise DomainError(
                f"scaled support [{lo:.6g}, {hi:.6g}] leaves the truncated box "
                f"(-{self.half_length:.6g}, {self.half_length:.6g})"
            )
        coupling = project_potential(
            self.potential, self.h, self.alpha, self.cs, self.modes,
            self.nodes, self.spacing, self.projection,
        )
        object.__setattr__(self, "coupling", coupling)
        object.__setattr__(self, "matrix", self._assemble())

    @classmethod
    def sized(cls, cs, potential, h, alpha, k_estimate=None, modes=8,
              half_length=None, spacing=None, projection="average"):
        """Problem with δ = h * extent / 16 and L = 15 / Re k_estimate by default."""
        extent = potential.box[-1][1] - potential.box[-1][0]
        spacing = spacing or h * extent / 16.0
        if half_length is None:
            if k_estimate is not None and complex(k_estimate).real > 0:
                half_length = SIZING_FACTOR / complex(k_estimate).real
            else:
                half_length = 50.0
            half_length = max(half_length, 4.0 * h * extent)
        return cls(cs, potential, h, alpha, half_length, spacing, modes,
                   projection=projection, k_estimate=k_estimate)

    def variant(self, **changes):
        return replace(self, coupling=None, matrix=None, **changes)

    @property
    def points(self):
        return int(round(self.half_length / self.spacing)) * 2 - 1

    @property
    def nodes(self):
        return -self.half_length + self.spacing * np.arange(1, self.points + 1)

    @property
    def size(self):
        return self.points * self.modes

    @property
    def mu0(self):
        return self.cs.mu0

    @property
    def is_real(self):
        return self.coupling.is_zero or self.potential.is_real()

    @property
    def sizing_ok(self):
        if self.k_estimate is None or complex(self.k_estimate).real <= 0:
            return None
        return bool(self.half_length >= SIZING_FACTOR / complex(self.k_estimate).real)

    def _assemble(self):
        count, modes = self.points, self.modes
        dtype = float if self.is_real else complex
        inv = 1.0 / self.spacing**2
        second = sp.diags(
            [np.full(count - 1, -inv), np.full(count, 2.0 * inv), np.full(count - 1, -inv)],
            [-1, 0, 1],
        )
        mu = self.cs.eigenvalues(modes)
        matrix = sp.kron(second, sp.identity(modes)) + sp.kron(
            sp.identity(count), sp.diags(mu)
        )
        coupling = self.coupling
        if not coupling.is_zero:
            local = np.arange(modes)
            rows = (coupling.indices[:, None, None] * modes + local[None, :, None])
            cols = (coupling.indices[:, None, None] * modes + local[None, None, :])
            rows, cols = np.broadcast_arrays(rows, cols)
            blocks = coupling.blocks if dtype is complex else coupling.blocks.real
            matrix = matrix + sp.coo_matrix(
                (blocks.ravel(), (rows.ravel(), cols.ravel())),
                shape=(self.size, self.size),
            )
        return sp.csc_matrix(matrix, dtype=dtype)


@dataclass
class OracleResult:
    """
    Reference eigenvalue below mu_0, or None.

    Attributes:
        e: Eigenvalue when Re e < mu_0 - margin, else None.
        e_raw: Converged value of the iteration before the margin test.
        margin: max(10 * last change, margin floor).
        error_estimate: Refinement spread (refined results only).
        decay_rate: Fitted decay rate of the mode-0 coefficient.
        profile: (x_n nodes, c_0 values) of the normalized eigenvector.
    """

    e: Optional[complex]
    e_raw: complex
    mu0: float
    margin: float
    last_change: float
    iterations: int
    shift: complex
    half_length: float
    spacing: float
    modes: int
    size: int
    sizing_ok: Optional[bool] = None
    error_estimate: Optional[float] = None
    decay_rate: Optional[float] = None
    refined: bool = False
    profile: tuple = field(default=(), repr=False)

    def to_record(self, **inputs):
        record = dict(inputs)
        record.update(
            {
                "e": None if self.e is None else _split(self.e),
                "e_raw": _split(self.e_raw),
                "mu0": self.mu0,
                "margin": self.margin,
                "last_change": self.last_change,
                "iterations": self.iterations,
                "shift": _split(self.shift),
                "half_length": self.half_length,
                "spacing": self.spacing,
                "modes": self.modes,
                "size": self.size,
                "sizing_ok": self.sizing_ok,
                "error_estimate": self.error_estimate,
                "decay_rate": self.decay_rate,
                "refined": self.refined,
            }
        )
        return record

    def profile_rows(self):
        if not self.profile:
            return []
        x, c0 = self.profile
        return [
            {"x_n": float(xi), "c0_re": float(ci.real), "c0_im": float(ci.imag)}
            for xi, ci in zip(x, c0)
        ]


def _split(value):
    value = complex(value)
    return {"re": value.real, "im": value.imag}


def default_shift(mu0, prediction=None):
    """sigma = e_pred - gap_pred / 2, or mu_0 - 1e-3 mu_0 without a usable prediction."""
    if prediction is not None:
        e_pred = complex(prediction.e)
        gap = mu0 - e_pred.real
        if gap > 0:
            return e_pred - 0.5 * gap
    return complex(mu0 - 1e-3 * mu0)


def _factorize(problem, shift, attempts=4):
    identity = sp.identity(problem.size, format="csc")
    for attempt in range(attempts):
        try:
            return shift, splu(
                sp.csc_matrix(problem.matrix - shift * identity), permc_spec="MMD_AT_PLUS_A"
            )
        except RuntimeError:
            shift = shift - 1e-9 * problem.mu0 * 2**attempt
    raise SingularSystemError(f"shifted operator stays singular near sigma = {shift}")


def _decay_rate(nodes, c0, half_length):
    distance = np.abs(nodes)
    window = (distance >= 0.25 * half_length) & (distance <= 0.5 * half_length)
    magnitude = np.abs(c0[window])
    if magnitude.size < 2 or np.any(magnitude == 0):
        return None
    slope, _ = np.polyfit(distance[window], np.log(magnitude), 1)
    return float(-slope)


def lowest_eigenvalue(problem, shift=None, prediction=None, margin_floor=0.0,
                      max_iter=500, tol=1e-12):
    """
    Eigenvalue of `problem` nearest sigma by shift-invert power iteration.

    Args:
        problem (TruncatedProblem): Assembled problem.
        shift (complex, optional): sigma; defaults to `default_shift`.
        prediction (RegimePrediction, optional): Used for the default shift.
        margin_floor (float): Lower bound of the below-threshold margin.
        max_iter (int): Power iterations.
        tol (float): Stop when the eigenvalue changes by less than tol * mu_0.

    Returns:
        OracleResult

    Raises:
        ConvergenceError: after `max_iter` iterations without convergence.
        SingularSystemError: when every perturbed shift is singular.
    """
    mu0 = problem.mu0
    shift = default_shift(mu0, prediction) if shift is None else complex(shift)
    if problem.is_real:
        shift = complex(shift.real)
    shift, lu = _factorize(problem, shift.real if problem.is_real else shift)

    start = np.full((problem.points, problem.modes), 1e-3, dtype=problem.matrix.dtype)
    start[:, 0] = 1.0
    x = start.ravel() / np.linalg.norm(start)
    e_old = None
    trace = []
    for iteration in range(1, max_iter + 1):
        y = lu.solve(x)
        theta = np.vdot(x, y) / np.vdot(x, x)
        e_new = complex(shift + 1.0 / theta)
        x = y / np.linalg.norm(y)
        trace.append(e_new)
        if e_old is not None and abs(e_new - e_old) < tol * mu0:
            break
        e_old = e_new
    else:
        raise ConvergenceError(
            f"shift-invert iteration did not converge in {max_iter} steps", trace
        )

    last_change = abs(e_new - e_old)
    margin = max(10.0 * last_change, margin_floor)
    c0 = x.reshape(problem.points, problem.modes)[:, 0]
    c0 = c0 / c0[np.argmax(np.abs(c0))]
    below = e_new.real < mu0 - margin
    return OracleResult(
        e=e_new if below else None,
        e_raw=e_new,
        mu0=mu0,
        margin=margin,
        last_change=last_change,
        iterations=iteration,
        shift=complex(shift),
        half_length=problem.half_length,
        spacing=problem.spacing,
        modes=problem.modes,
        size=problem.size,
        sizing_ok=problem.sizing_ok,
        decay_rate=_decay_rate(problem.nodes, c0, problem.half_length) if below else None,
        profile=(problem.nodes, c0),
    )


def refine(problem, base=None, margin_floor=0.0, max_iter=500, **kwargs):
    """
    Re-solve at (δ, 1.5 L, J + 4) and (δ/2, 1.5 L, J + 4) and extrapolate in δ^2.

    e_ext = e_3 + (e_3 - e_2) / 3; the spread max |e - e_ext| over the base and
    both refined values is the error estimate, and the margin is 10 |e_3 - e_2|.
    """
    base = base or lowest_eigenvalue(problem, margin_floor=margin_floor,
                                     max_iter=max_iter, **kwargs)
    gap = problem.mu0 - base.e_raw.real
    shift = base.e_raw - 0.5 * gap if gap > 0 else base.shift
    wide = dict(half_length=1.5 * problem.half_length, modes=problem.modes + 4)
    second = lowest_eigenvalue(problem.variant(spacing=problem.spacing, **wide),
                               shift=shift, margin_floor=margin_floor, max_iter=max_iter)
    third_problem = problem.variant(spacing=0.5 * problem.spacing, **wide)
    third = lowest_eigenvalue(third_problem, shift=shift, margin_floor=margin_floor,
                              max_iter=max_iter)

    e2, e3 = second.e_raw, third.e_raw
    extrapolated = e3 + (e3 - e2) / 3.0
    spread = max(abs(e - extrapolated) for e in (base.e_raw, e2, e3))
    margin = max(10.0 * abs(e3 - e2), margin_floor)
    below = extrapolated.real < problem.mu0 - margin
    return replace(
        third,
        e=extrapolated if below else None,
        e_raw=extrapolated,
        margin=margin,
        error_estimate=float(spread),
        decay_rate=third.decay_rate if below else None,
        refined=True,
    )
