"""
Transverse Dirichlet eigenbasis of the guide's cross-section.

The cross-section Ω is an interval (n = 2) or a rectangle (n = 3), so every
eigenpair is known in closed form:

    interval (a, b), L = b - a:
        mu_m  = ((m + 1) pi / L)^2
        phi_m = sqrt(2 / L) sin((m + 1) pi (x - a) / L)

and the rectangle modes are tensor products sorted by eigenvalue, ties
broken by the lexicographic order of the index pair.

Classes:
- `CrossSection`: Ω, its threshold mu_0 and the mode table.
- `TransverseMode`: one eigenpair with evaluators for phi_j and grad phi_j(0).
- `LinearProfile`: Phi_0(xi') = sum_q d phi_0 / d xi_q (0) xi_q.

Functions:
- `mode(cs, j)`, `kj(cs, j, k)`: module-level forms of the two operations.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BranchError, SingularArgumentError


def _axis_mu(m, length):
    return ((m + 1) * np.pi / length) ** 2


def _axis_phi(m, lo, length, x):
    return np.sqrt(2.0 / length) * np.sin((m + 1) * np.pi * (x - lo) / length)


def _axis_dphi(m, lo, length, x):
    wave = (m + 1) * np.pi / length
    return np.sqrt(2.0 / length) * wave * np.cos(wave * (x - lo))


@lru_cache(maxsize=32)
def _sorted_indices(lengths, count):
    """First `count` index tuples of the tensor basis in nondecreasing-mu order."""
    if len(lengths) == 1:
        return tuple((m,) for m in range(count))
    m = np.arange(count)
    mu = _axis_mu(m, lengths[0])[:, None] + _axis_mu(m, lengths[1])[None, :]
    first, second = np.meshgrid(m, m, indexing="ij")
    order = np.lexsort((second.ravel(), first.ravel(), mu.ravel()))[:count]
    return tuple((int(first.flat[i]), int(second.flat[i])) for i in order)


@dataclass(frozen=True)
class CrossSection:
    """
    Rectangular cross-section Ω ⊂ R^{n-1} containing the transverse origin.

    Attributes:
        bounds (tuple): One (lo, hi) pair per transverse axis, lo < 0 < hi.
    """

    bounds: tuple

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if len(bounds) not in (1, 2):
            raise ValueError("cross-section must be an interval (n=2) or a rectangle (n=3)")
        for lo, hi in bounds:
            if not lo < 0.0 < hi:
                raise ValueError(
                    f"transverse origin must lie strictly inside ({lo}, {hi})"
                )
        object.__setattr__(self, "bounds", bounds)

    @classmethod
    def interval(cls, lo, hi):
        return cls(((lo, hi),))

    @classmethod
    def rectangle(cls, first, second):
        return cls((tuple(first), tuple(second)))

    @property
    def n(self):
        """Dimension of the guide Π = Ω × R."""
        return len(self.bounds) + 1

    @property
    def lengths(self):
        return tuple(hi - lo for lo, hi in self.bounds)

    @property
    def mu0(self):
        return self.mode(0).mu

    def tensor_index(self, j):
        if j < 0:
            raise ValueError(f"mode index must be nonnegative, got {j}")
        return _sorted_indices(self.lengths, j + 1)[j]

    def mode(self, j):
        """The j-th Dirichlet eigenpair in nondecreasing-mu order."""
        return self._build_mode(j, self.tensor_index(j))

    def modes(self, count):
        indices = _sorted_indices(self.lengths, int(count))
        return [self._build_mode(j, index) for j, index in enumerate(indices)]

    def _build_mode(self, j, index):
        mu = sum(_axis_mu(m, length) for m, length in zip(index, self.lengths))
        return TransverseMode(self, j, index, float(mu))

    def eigenvalues(self, count):
        indices = np.array(_sorted_indices(self.lengths, int(count)), dtype=int)
        return sum(
            _axis_mu(indices[:, axis], length) for axis, length in enumerate(self.lengths)
        )

    def count_below(self, value):
        """Number of modes with mu_j <= value."""
        if self.n == 2:
            return int(np.floor(self.lengths[0] * np.sqrt(max(value, 0.0)) / np.pi))
        first, second = self.lengths
        m = np.arange(int(np.floor(first * np.sqrt(max(value, 0.0)) / np.pi)))
        rest = value - _axis_mu(m, first)
        return int(np.sum(np.floor(second * np.sqrt(np.maximum(rest, 0.0)) / np.pi)))

    def mode_values(self, count, points):
        """phi_j at transverse points, shape (count, N)."""
        return np.stack([m.value(points) for m in self.modes(count)])

    def box_inside(self, box):
        """Whether a transverse box [(lo, hi), ...] lies strictly inside Ω."""
        return all(
            lo_box > lo and hi_box < hi
            for (lo_box, hi_box), (lo, hi) in zip(box, self.bounds)
        )

    def phi0_at_origin(self):
        return float(self.mode(0).value(np.zeros((1, self.n - 1)))[0])

    def linear_profile(self):
        return LinearProfile(tuple(self.mode(0).gradient_at_origin()))

    def kj(self, j, k):
        """
        K_j(k) = sqrt(mu_j - mu_0 + k^2) on the branch with Re K_j > 0.

        For j = 0 this is k itself, which must be nonzero.
        """
        k = complex(k)
        if j == 0:
            if k == 0:
                raise SingularArgumentError("K_0(k) = k is singular at k = 0")
            return k
        value = np.sqrt(complex(self.mode(j).mu - self.mu0 + k * k))
        if value.real <= 0.0:
            raise BranchError(f"Re K_{j}({k}) = {value.real} is not positive")
        return value

    def rates(self, count, k):
        """K_1(k) ... K_{count-1}(k) as an array (index 0 left as k)."""
        k = complex(k)
        mu = self.eigenvalues(count)
        rates = np.sqrt((mu - mu[0] + k * k).astype(complex))
        rates[0] = k
        bad = np.nonzero(rates[1:].real <= 0.0)[0]
        if bad.size:
            j = int(bad[0]) + 1
            raise BranchError(f"Re K_{j}({k}) = {rates[j].real} is not positive")
        return rates

    def describe(self):
        if self.n == 2:
            return f"interval({self.bounds[0][0]:.6g}, {self.bounds[0][1]:.6g})"
        (a1, b1), (a2, b2) = self.bounds
        return f"rectangle(({a1:.6g}, {b1:.6g}) x ({a2:.6g}, {b2:.6g}))"


@dataclass(frozen=True)
class TransverseMode:
    """One transverse eigenpair (mu_j, phi_j)."""

    cross_section: CrossSection
    index: int
    tensor_index: tuple
    mu: float

    def value(self, points):
        """phi_j at transverse points of shape (N, n-1) (or (N,) for n = 2)."""
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        result = np.ones(points.shape[0])
        for axis, ((lo, hi), m) in enumerate(
            zip(self.cross_section.bounds, self.tensor_index)
        ):
            result = result * _axis_phi(m, lo, hi - lo, points[:, axis])
        return result

    def gradient_at_origin(self):
        """d phi_j / d xi_q (0) for q = 1..n-1."""
        bounds = self.cross_section.bounds
        grad = []
        for q in range(len(bounds)):
            factor = 1.0
            for axis, ((lo, hi), m) in enumerate(zip(bounds, self.tensor_index)):
                if axis == q:
                    factor *= _axis_dphi(m, lo, hi - lo, 0.0)
                else:
                    factor *= _axis_phi(m, lo, hi - lo, 0.0)
            grad.append(float(factor))
        return np.array(grad)


@dataclass(frozen=True)
class LinearProfile:
    """Phi_0(xi') = sum_q c_q xi_q with c_q = d phi_0 / d xi_q (0)."""

    coefficients: tuple

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        return points[:, : len(self.coefficients)] @ np.asarray(self.coefficients)


def mode(cs, j):
    """The j-th transverse eigenpair of `cs`."""
    return cs.mode(j)


def kj(cs, j, k):
    """K_j(k) of `cs` (see `CrossSection.kj`)."""
    return cs.kj(j, k)
