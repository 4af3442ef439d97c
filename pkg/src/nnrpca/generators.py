"""Seeded random instance factories and constructive counterexamples."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .graph import analyze, graph_from
from .model import (
    ComponentVector,
    Instance,
    MeasurementSet,
    SparseNoise,
    build_symmetric_instance,
)

CONSTANT = "constant"
UNIFORM = "uniform"
SIGNED_CONSTANT = "signed_constant"


def _words(seed, key):
    words = [int(seed)]
    for k in key:
        if isinstance(k, str):
            words.append(int.from_bytes(k.encode(), "little") % (2**32))
        else:
            words.append(int(k))
    return words


def rng_for(seed, *key) -> np.random.Generator:
    """An independent stream for ``(seed, *key)``, e.g. ``(seed, trial, "omega")``."""
    return np.random.default_rng(np.random.SeedSequence(_words(seed, key)))


def trial_seed(seed, *key) -> int:
    """A 63-bit integer seed derived from ``(seed, *key)``."""
    state = np.random.SeedSequence(_words(seed, key)).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 31 | int(state[1]) >> 1


@dataclass(frozen=True)
class NoiseModel:
    """Each measured entry is corrupted with probability ``density``.

    ``rule`` picks the corruption value: ``constant`` adds ``value``,
    ``signed_constant`` adds ``±value`` with a fair sign, ``uniform`` adds a
    draw from ``[lo, hi)``.
    """

    density: float
    rule: str = CONSTANT
    value: float = 2.0
    lo: float = -1.0
    hi: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.density <= 1.0:
            raise ValueError("density must lie in [0, 1]")
        if self.rule not in (CONSTANT, UNIFORM, SIGNED_CONSTANT):
            raise ValueError(f"unknown noise rule {self.rule!r}")
        if self.rule == UNIFORM and not self.lo < self.hi:
            raise ValueError("uniform noise needs lo < hi")

    def draw(self, rng: np.random.Generator, k: int) -> np.ndarray:
        if self.rule == CONSTANT:
            return np.full(k, float(self.value))
        if self.rule == SIGNED_CONSTANT:
            return np.where(rng.random(k) < 0.5, -1.0, 1.0) * self.value
        return rng.uniform(self.lo, self.hi, k)


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_omega(shape, p: float, seed) -> MeasurementSet:
    """Bernoulli(p) sampling of every candidate pair.

    ``shape`` is ``n`` (symmetric, pairs ``i <= j`` including the diagonal) or
    ``(m, n)`` (asymmetric, all of ``[m] x [n]``).
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = _as_rng(seed)
    if np.ndim(shape) == 0:
        n = int(shape)
        r, c = np.triu_indices(n)
        keep = rng.random(r.size) < p
        return MeasurementSet(r[keep], c[keep], (n, n), True)
    m, n = (int(x) for x in shape)
    keep = rng.random((m, n)) < p
    r, c = np.nonzero(keep)
    return MeasurementSet(r, c, (m, n), False)


def sample_noise(omega: MeasurementSet, model: NoiseModel, seed) -> SparseNoise:
    rng = _as_rng(seed)
    hit = rng.random(len(omega)) < model.density
    vals = model.draw(rng, int(hit.sum()))
    return SparseNoise(omega.rows[hit], omega.cols[hit], vals)


def gen_truth(n: int, lo: float, hi: float, seed) -> ComponentVector:
    """I.i.d. ``U[lo, hi)`` entries; exact zeros are redrawn."""
    if not 0.0 <= lo < hi:
        raise ValueError("need 0 <= lo < hi")
    rng = _as_rng(seed)
    u = rng.uniform(lo, hi, n)
    while np.any(u <= 0):
        bad = u <= 0
        u[bad] = rng.uniform(lo, hi, int(bad.sum()))
    return ComponentVector(u)


def connected_nonbipartite(omega: MeasurementSet) -> bool:
    rep = analyze(graph_from(omega))
    return rep.connected and not rep.has_bipartite_component


def sample_connected_omega(n: int, p: float, seed, max_tries: int = 10_000) -> MeasurementSet:
    """Resample a symmetric ``omega`` until its graph is connected and non-bipartite."""
    rng = _as_rng(seed)
    for _ in range(max_tries):
        om = sample_omega(n, p, rng)
        if connected_nonbipartite(om):
            return om
    raise RuntimeError(f"no connected non-bipartite sample at n={n}, p={p}")


def random_symmetric_instance(n: int, d: float, seed, lo: float = 0.0, hi: float = 2.0,
                              p: float = 1.0, noise_value: float = 2.0) -> Instance:
    """Truth, sampling and noise from three disjoint streams of ``seed``
    (an integer or a tuple of integers).
    """
    key = tuple(seed) if isinstance(seed, tuple) else (seed,)
    u = gen_truth(n, lo, hi, rng_for(*key, "truth"))
    om = sample_omega(n, p, rng_for(*key, "omega"))
    s = sample_noise(om, NoiseModel(d, CONSTANT, noise_value), rng_for(*key, "noise"))
    return build_symmetric_instance(u, om, s)


def build_zero_entry_counterexample(n: int = 3, zero_index: Optional[int] = None) -> Instance:
    """``u*`` is all ones except a zero at ``zero_index`` (default the last
    entry); every pair is measured except that diagonal entry.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    i = n - 1 if zero_index is None else int(zero_index)
    if not 0 <= i < n:
        raise ValueError("zero_index out of range")
    u = np.ones(n)
    u[i] = 0.0
    full = MeasurementSet.full(n)
    keep = ~((full.rows == i) & (full.cols == i))
    return build_symmetric_instance(u, full.subset(keep))


def two_coloring(omega: MeasurementSet) -> np.ndarray:
    """Side (0/1) of each vertex in a connected bipartite graph; vertex 0 is side 0."""
    n = omega.shape[0]
    adj = [[] for _ in range(n)]
    for a, b in zip(omega.rows.tolist(), omega.cols.tolist()):
        adj[a].append(b)
        adj[b].append(a)
    side = np.full(n, -1)
    side[0] = 0
    stack = [0]
    while stack:
        a = stack.pop()
        for b in adj[a]:
            if side[b] < 0:
                side[b] = 1 - side[a]
                stack.append(b)
    return side


def build_bipartite_counterexample(u_star, omega: MeasurementSet) -> Tuple[Instance, np.ndarray]:
    """A noiseless instance on a connected bipartite ``omega`` and a second
    zero-objective point ``u_hat != u*``.

    Vertices on vertex 0's side are scaled up by ``(1 + eps/u_last)``, the
    rest down by ``u_last/(u_last + eps)``, with ``eps = 0.01 * min(u*)`` and
    ``u_last`` the last entry of ``u*``.  Every edge crosses sides, so each
    product ``u_i u_j`` is unchanged.
    """
    u = np.asarray(ComponentVector(u_star))
    if not omega.symmetric:
        raise ValueError("expected a symmetric measurement set")
    rep = analyze(graph_from(omega))
    if not rep.connected or not rep.has_bipartite_component:
        raise ValueError("omega must be connected and bipartite")
    if np.any(u <= 0):
        raise ValueError("u_star must be strictly positive")
    eps = 0.01 * u.min()
    un = u[-1]
    side = two_coloring(omega)
    u_hat = np.where(side == 0, u + u * eps / un, u - u * eps / (un + eps))
    return build_symmetric_instance(u, omega), u_hat
