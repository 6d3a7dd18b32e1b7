"""
Gauss–Legendre panel rules.

Every integral in the package (moments, the Nyström grid of the threshold
solver, the oracle's projected potential) is a tensor product of composite
Gauss–Legendre rules whose panels are split at the breakpoints where the
integrand may jump.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _reference_rule(order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(order, lo, hi):
    """Nodes and weights of the `order`-point rule on [lo, hi]."""
    ref_nodes, ref_weights = _reference_rule(int(order))
    half = 0.5 * (hi - lo)
    return lo + half * (ref_nodes + 1.0), half * ref_weights


def clean_breakpoints(breakpoints):
    """Sorted unique breakpoints (at least two)."""
    points = np.unique(np.asarray(breakpoints, dtype=float))
    if points.size < 2:
        raise ValueError(f"need at least two breakpoints, got {points.tolist()}")
    return points


def panel_rule(breakpoints, order):
    """
    Composite rule over consecutive breakpoints.

    Returns:
        tuple: (nodes, weights, panels) where `panels` is a list of
        (lo, hi, index_slice) for every panel.
    """
    points = clean_breakpoints(breakpoints)
    nodes, weights, panels = [], [], []
    start = 0
    for lo, hi in zip(points[:-1], points[1:]):
        x, w = gauss_legendre(order, lo, hi)
        nodes.append(x)
        weights.append(w)
        panels.append((float(lo), float(hi), slice(start, start + order)))
        start += order
    return np.concatenate(nodes), np.concatenate(weights), panels


@dataclass(frozen=True)
class TensorRule:
    """Tensor product of one composite rule per axis."""

    axes: tuple

    @property
    def dimension(self):
        return len(self.axes)

    @property
    def shape(self):
        return tuple(len(nodes) for nodes, _ in self.axes)

    def points(self):
        """All nodes as an (N, d) array, last axis fastest."""
        grids = np.meshgrid(*[nodes for nodes, _ in self.axes], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def weights(self):
        total = np.ones(1)
        for _, w in self.axes:
            total = np.multiply.outer(total, w).ravel()
        return total

    def integrate(self, values):
        """Integral of nodal `values` (length N) over the rule's box."""
        return np.sum(self.weights() * np.asarray(values))


def tensor_rule(breakpoints_per_axis, order, scale=1.0):
    """Tensor rule on the box spanned by the (scaled) breakpoints of each axis."""
    axes = []
    for breaks in breakpoints_per_axis:
        nodes, weights, _ = panel_rule(scale * np.asarray(breaks, dtype=float), order)
        axes.append((nodes, weights))
    return TensorRule(tuple(axes))
