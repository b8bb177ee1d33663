"""Limited random walk from a single seed vertex.

One iteration is: transition by ``P = (I + A)(I + D)^-1``, drop entries
below ``epsilon``, raise to the power ``r``, renormalise to unit L1 mass.
The walk stops once two consecutive vectors are within ``xi`` in L2.

Vectors are sparse: sorted vertex ids plus strictly positive values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from . import _kernels
from .errors import ParameterError
from .graph import Graph


@dataclass(frozen=True, eq=False)
class SparseProbVector:
    """Sparse nonnegative vector over vertex ids; ``idx`` sorted ascending."""

    idx: np.ndarray
    val: np.ndarray

    @classmethod
    def point(cls, v: int) -> "SparseProbVector":
        return cls(np.array([v], dtype=np.int64), np.array([1.0]))

    @classmethod
    def from_dict(cls, d: Mapping[int, float]) -> "SparseProbVector":
        keys = sorted(d)
        return cls(np.asarray(keys, dtype=np.int64), np.asarray([d[k] for k in keys], dtype=float))

    def to_dict(self) -> dict[int, float]:
        return dict(zip(self.idx.tolist(), self.val.tolist()))

    def to_dense(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        out[self.idx] = self.val
        return out

    def argmax(self) -> int:
        """Vertex with the largest value; ties go to the smallest id."""
        if len(self.idx) == 0:
            raise ValueError("argmax of an empty vector")
        # np.argmax returns the first maximum and idx is sorted
        return int(self.idx[np.argmax(self.val)])

    def total(self) -> float:
        return float(self.val.sum())

    def __len__(self):
        return len(self.idx)

    def __repr__(self):
        if len(self) <= 8:
            return f"SparseProbVector({self.to_dict()})"
        return f"SparseProbVector(<{len(self)} entries>)"


@dataclass(frozen=True)
class LrwParams:
    """Tunables of the exploring, merging and local clustering steps.

    ``batch_size=None`` means ``max(1024, ceil(|B| / 100))`` seeds per round.
    """

    r: float = 2.0
    t_max: int = 100
    epsilon: float = 1e-5
    xi: float = 1e-2
    tau: float = 0.3
    eta: float = 0.3
    batch_size: int | None = None

    def __post_init__(self):
        if not self.r > 1:
            raise ParameterError(f"r must exceed 1, got {self.r}")
        if not (isinstance(self.t_max, (int, np.integer)) and self.t_max >= 1):
            raise ParameterError(f"t_max must be an integer >= 1, got {self.t_max}")
        # epsilon = 0 disables pruning; used by the dense-oracle comparisons
        if not 0 <= self.epsilon < 1:
            raise ParameterError(f"epsilon must lie in [0, 1), got {self.epsilon}")
        for name in ("xi", "tau", "eta"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ParameterError(f"{name} must lie in (0, 1), got {value}")
        if self.batch_size is not None and self.batch_size < 1:
            raise ParameterError(f"batch_size must be positive, got {self.batch_size}")


@dataclass(frozen=True, eq=False)
class WalkOutcome:
    seed: int
    feature: SparseProbVector
    iterations: int
    converged: bool
    last_delta: float
    max_support: int = 0  # largest entry count seen after any prune + normalise


def walk_step(g: Graph, x: SparseProbVector) -> SparseProbVector:
    """Return ``P x`` with ``P = (I + A)(I + D)^-1``, never forming ``P``."""
    deg = g.degrees[x.idx]
    counts = deg + 1
    owner = np.repeat(np.arange(len(x)), counts)
    # position within each closed neighbourhood: 0 is the vertex itself
    pos = np.arange(int(counts.sum()), dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
    is_self = pos == 0
    targets = np.empty(len(pos), dtype=np.int64)
    targets[is_self] = x.idx
    rest = ~is_self
    targets[rest] = g.neighbors[g.offsets[x.idx][owner[rest]] + pos[rest] - 1]
    weights = (x.val / counts)[owner]
    uniq, inv = np.unique(targets, return_inverse=True)
    return SparseProbVector(uniq, np.bincount(inv, weights=weights, minlength=len(uniq)))


def prune(x: SparseProbVector, epsilon: float) -> SparseProbVector:
    """Drop entries below ``epsilon`` without renormalising.

    If every entry would go, the single largest one (smallest id on ties)
    is kept at value 1 so the walk can continue.
    """
    if epsilon <= 0:
        return x
    keep = x.val >= epsilon
    if keep.all():
        return x
    if not keep.any():
        return SparseProbVector.point(x.argmax())
    return SparseProbVector(x.idx[keep], x.val[keep])


def inflate_normalize(x: SparseProbVector, r: float) -> SparseProbVector:
    """Raise each value to the power ``r`` and rescale to unit L1 mass."""
    if len(x) == 0:
        raise ValueError("cannot inflate an empty vector")
    v = x.val * x.val if r == 2 else np.power(x.val, r)
    s = v.sum()
    if s == 0.0:
        # every value underflowed; fall back to the largest pre-inflation entry
        return SparseProbVector.point(x.argmax())
    return SparseProbVector(x.idx, v / s)


def l2_distance(a: SparseProbVector, b: SparseProbVector) -> float:
    """Euclidean distance over the union of both supports."""
    if len(a) == len(b) and np.array_equal(a.idx, b.idx):
        return float(np.sqrt(np.sum((a.val - b.val) ** 2)))
    union = np.union1d(a.idx, b.idx)
    d = np.zeros(len(union))
    d[np.searchsorted(union, a.idx)] += a.val
    d[np.searchsorted(union, b.idx)] -= b.val
    return float(np.sqrt(np.dot(d, d)))


def lrw_iteration(g: Graph, x: SparseProbVector, params: LrwParams) -> SparseProbVector:
    """One full map: transition, prune, inflate, normalise."""
    return inflate_normalize(prune(walk_step(g, x), params.epsilon), params.r)


def explore(g: Graph, seed: int, params: LrwParams = LrwParams(),
            on_step: Callable[[int, SparseProbVector], None] | None = None,
            compiled: bool = True) -> WalkOutcome:
    """Run the limited random walk from ``seed`` until convergence or ``t_max``.

    ``on_step(t, x)`` is called with every iterate ``x^(t)``, t >= 1; it
    forces the pure-numpy path, as does ``compiled=False``.
    """
    if not 0 <= seed < g.n:
        raise IndexError(f"seed {seed} out of range [0, {g.n})")
    if compiled and on_step is None:
        idx, val, t, converged, delta, support = _kernels.explore_kernel(
            g.offsets, g.neighbors, seed, float(params.r), params.t_max,
            float(params.epsilon), float(params.xi), _kernels.scratch(g.n))
        return WalkOutcome(seed, SparseProbVector(idx, val), int(t), bool(converged), float(delta), int(support))
    x = SparseProbVector.point(seed)
    delta = float("inf")
    max_support = 1
    t = 0
    converged = False
    while t < params.t_max:
        t += 1
        nxt = lrw_iteration(g, x, params)
        max_support = max(max_support, len(nxt))
        if on_step is not None:
            on_step(t, nxt)
        delta = l2_distance(nxt, x)
        x = nxt
        if delta < params.xi:
            converged = True
            break
    return WalkOutcome(seed, x, t, converged, delta, max_support)
