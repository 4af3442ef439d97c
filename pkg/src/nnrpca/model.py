"""Problem instances for non-negative rank-1 (and rank-r) robust PCA.

Indices are 0-based throughout.  A symmetric measurement set stores each
unordered pair once as ``(i, j)`` with ``i <= j``; diagonal pairs are ordinary
measurements.  An asymmetric set stores ``(i, j)`` with ``i < m`` and ``j < n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Tuple, Union

import numpy as np

SYMMETRIC = "symmetric"
ASYMMETRIC = "asymmetric"
RANK_R = "rank_r"


class ComponentVector(np.ndarray):
    """A 1-d float64 array of non-negative entries."""

    def __new__(cls, entries):
        arr = np.array(entries, dtype=np.float64).reshape(-1)
        if arr.size == 0:
            raise ValueError("component vector must have at least one entry")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValueError("component entries must be finite and non-negative")
        return arr.view(cls)

    @property
    def strictly_positive(self) -> bool:
        return bool(np.min(self) > 0)


def condition_number(x) -> float:
    """Return ``max(x) / min(x)`` for a strictly positive vector."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size == 0 or np.any(x <= 0):
        raise ValueError("condition number needs a strictly positive vector")
    return float(x.max() / x.min())


@dataclass(frozen=True)
class MeasurementSet:
    """Observed index pairs together with the matrix shape they live in."""

    rows: np.ndarray
    cols: np.ndarray
    shape: Tuple[int, int]
    symmetric: bool

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64).reshape(-1)
        cols = np.asarray(self.cols, dtype=np.int64).reshape(-1)
        if rows.shape != cols.shape:
            raise ValueError("rows and cols must have equal length")
        m, n = self.shape
        if self.symmetric and m != n:
            raise ValueError("symmetric measurement set needs a square shape")
        if self.symmetric:
            rows, cols = np.minimum(rows, cols), np.maximum(rows, cols)
        if rows.size and (rows.min() < 0 or cols.min() < 0 or rows.max() >= m or cols.max() >= n):
            raise ValueError(f"index pair outside shape {self.shape}")
        keys = rows * n + cols
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        if keys.size > 1 and np.any(keys[1:] == keys[:-1]):
            raise ValueError("duplicate index pair in measurement set")
        object.__setattr__(self, "rows", rows[order])
        object.__setattr__(self, "cols", cols[order])
        self.rows.setflags(write=False)
        self.cols.setflags(write=False)

    @classmethod
    def symmetric_from_pairs(cls, n: int, pairs: Iterable[Tuple[int, int]]) -> "MeasurementSet":
        pairs = list(pairs)
        arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1], (n, n), True)

    @classmethod
    def asymmetric_from_pairs(cls, m: int, n: int, pairs: Iterable[Tuple[int, int]]) -> "MeasurementSet":
        arr = np.array(list(pairs), dtype=np.int64).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1], (m, n), False)

    @classmethod
    def full(cls, n: int, m: Optional[int] = None) -> "MeasurementSet":
        """All pairs: the upper triangle with diagonal, or the full ``m x n`` grid."""
        if m is None:
            r, c = np.triu_indices(n)
            return cls(r, c, (n, n), True)
        r, c = np.divmod(np.arange(m * n, dtype=np.int64), n)
        return cls(r, c, (m, n), False)

    def __len__(self) -> int:
        return int(self.rows.size)

    def __contains__(self, pair) -> bool:
        i, j = pair
        if self.symmetric:
            i, j = min(i, j), max(i, j)
        return bool(np.any((self.rows == i) & (self.cols == j)))

    def pairs(self):
        return list(zip(self.rows.tolist(), self.cols.tolist()))

    def index_of(self, rows, cols) -> np.ndarray:
        """Positions of the given pairs in this set; -1 where absent."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        if self.symmetric:
            rows, cols = np.minimum(rows, cols), np.maximum(rows, cols)
        n = self.shape[1]
        keys = self.rows * n + self.cols
        query = rows * n + cols
        pos = np.searchsorted(keys, query)
        pos = np.clip(pos, 0, max(keys.size - 1, 0))
        found = keys.size > 0
        hit = (keys[pos] == query) if found else np.zeros(query.shape, dtype=bool)
        return np.where(hit, pos, -1)

    def without(self, mask: np.ndarray) -> "MeasurementSet":
        keep = ~np.asarray(mask, dtype=bool)
        return MeasurementSet(self.rows[keep], self.cols[keep], self.shape, self.symmetric)

    def subset(self, mask: np.ndarray) -> "MeasurementSet":
        keep = np.asarray(mask, dtype=bool)
        return MeasurementSet(self.rows[keep], self.cols[keep], self.shape, self.symmetric)


@dataclass(frozen=True)
class SparseNoise:
    """Nonzero corruptions keyed by index pair."""

    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64).reshape(-1)
        cols = np.asarray(self.cols, dtype=np.int64).reshape(-1)
        vals = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if not (rows.shape == cols.shape == vals.shape):
            raise ValueError("noise rows/cols/values must have equal length")
        keep = vals != 0
        object.__setattr__(self, "rows", rows[keep])
        object.__setattr__(self, "cols", cols[keep])
        object.__setattr__(self, "values", vals[keep])

    @classmethod
    def empty(cls) -> "SparseNoise":
        return cls(np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0))

    @classmethod
    def from_dict(cls, entries: Mapping[Tuple[int, int], float]) -> "SparseNoise":
        if not entries:
            return cls.empty()
        keys = list(entries)
        return cls([k[0] for k in keys], [k[1] for k in keys], [entries[k] for k in keys])

    def __len__(self) -> int:
        return int(self.values.size)

    def as_dict(self):
        return {(int(i), int(j)): float(v) for i, j, v in zip(self.rows, self.cols, self.values)}

    def aligned_to(self, omega: MeasurementSet) -> np.ndarray:
        """Dense noise vector in the order of ``omega``; errors if support escapes it."""
        out = np.zeros(len(omega))
        if len(self) == 0:
            return out
        pos = omega.index_of(self.rows, self.cols)
        if np.any(pos < 0):
            bad = int(np.argmax(pos < 0))
            raise ValueError(
                f"noise entry ({self.rows[bad]}, {self.cols[bad]}) lies outside the measurement set")
        if np.unique(pos).size != pos.size:
            raise ValueError("noise has duplicate entries")
        out[pos] = self.values
        return out


@dataclass(frozen=True)
class Instance:
    """An observed matrix ``X = truth product + S`` restricted to ``omega``.

    ``truth`` is ``u*`` (symmetric), ``(u*, v*)`` (asymmetric) or the ``n x r``
    factor ``U*`` (rank_r).  It is ``None`` for data-driven instances such as a
    video, in which case ``noise_values`` is all zero by convention.
    """

    kind: str
    omega: MeasurementSet
    observed: np.ndarray
    noise_values: np.ndarray
    truth: Optional[Union[np.ndarray, Tuple[np.ndarray, np.ndarray]]] = None
    rank: int = 1

    @property
    def n(self) -> int:
        return self.omega.shape[1]

    @property
    def m(self) -> int:
        return self.omega.shape[0]

    @property
    def bad_mask(self) -> np.ndarray:
        return self.noise_values != 0

    @property
    def good(self) -> MeasurementSet:
        return self.omega.without(self.bad_mask)

    @property
    def bad(self) -> MeasurementSet:
        return self.omega.subset(self.bad_mask)

    @property
    def noise(self) -> SparseNoise:
        b = self.bad_mask
        return SparseNoise(self.omega.rows[b], self.omega.cols[b], self.noise_values[b])

    @property
    def u_star(self) -> Optional[np.ndarray]:
        if self.truth is None:
            return None
        return self.truth[0] if self.kind == ASYMMETRIC else self.truth

    @property
    def v_star(self) -> Optional[np.ndarray]:
        if self.truth is None or self.kind != ASYMMETRIC:
            return None
        return self.truth[1]

    def clean_values(self) -> np.ndarray:
        """The truth product on ``omega`` (observed minus noise)."""
        return _truth_product(self.kind, self.truth, self.omega)

    def dense_observed(self, fill: float = np.nan) -> np.ndarray:
        out = np.full(self.omega.shape, fill)
        out[self.omega.rows, self.omega.cols] = self.observed
        if self.omega.symmetric:
            out[self.omega.cols, self.omega.rows] = self.observed
        return out


def _truth_product(kind, truth, omega: MeasurementSet) -> np.ndarray:
    r, c = omega.rows, omega.cols
    if kind == SYMMETRIC:
        return truth[r] * truth[c]
    if kind == ASYMMETRIC:
        u, v = truth
        return u[r] * v[c]
    U = truth
    return np.einsum("pk,pk->p", U[r], U[c])


def _check_noise(noise: Optional[SparseNoise], omega: MeasurementSet) -> np.ndarray:
    if noise is None:
        return np.zeros(len(omega))
    if isinstance(noise, Mapping):
        noise = SparseNoise.from_dict(noise)
    if omega.symmetric and len(noise):
        noise = SparseNoise(np.minimum(noise.rows, noise.cols),
                            np.maximum(noise.rows, noise.cols), noise.values)
    return noise.aligned_to(omega)


def build_symmetric_instance(u_star, omega: MeasurementSet, noise: Optional[SparseNoise] = None) -> Instance:
    u = ComponentVector(u_star)
    if not omega.symmetric or omega.shape != (u.size, u.size):
        raise ValueError(f"measurement set shape {omega.shape} does not match n={u.size}")
    u = np.asarray(u)
    s = _check_noise(noise, omega)
    x = u[omega.rows] * u[omega.cols] + s
    return Instance(SYMMETRIC, omega, x, s, u)


def build_asymmetric_instance(u_star, v_star, omega: MeasurementSet,
                              noise: Optional[SparseNoise] = None) -> Instance:
    u = np.asarray(ComponentVector(u_star))
    v = np.asarray(ComponentVector(v_star))
    if omega.symmetric or omega.shape != (u.size, v.size):
        raise ValueError(f"measurement set shape {omega.shape} does not match ({u.size}, {v.size})")
    s = _check_noise(noise, omega)
    x = u[omega.rows] * v[omega.cols] + s
    return Instance(ASYMMETRIC, omega, x, s, (u, v))


def build_rank_r_instance(U_star, omega: MeasurementSet, noise: Optional[SparseNoise] = None) -> Instance:
    U = np.array(U_star, dtype=np.float64)
    if U.ndim == 1:
        U = U[:, None]
    if np.any(U < 0) or not np.all(np.isfinite(U)):
        raise ValueError("rank-r factor must be finite and non-negative")
    n, r = U.shape
    if not omega.symmetric or omega.shape != (n, n):
        raise ValueError(f"measurement set shape {omega.shape} does not match n={n}")
    s = _check_noise(noise, omega)
    x = np.einsum("pk,pk->p", U[omega.rows], U[omega.cols]) + s
    return Instance(RANK_R, omega, x, s, U, rank=r)


def instance_from_observations(omega: MeasurementSet, values) -> Instance:
    """A data instance with no known truth (e.g. video frames)."""
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if values.size != len(omega):
        raise ValueError("one value per measured pair is required")
    kind = SYMMETRIC if omega.symmetric else ASYMMETRIC
    return Instance(kind, omega, values, np.zeros(values.size), None)


def balanced_truth(u_star, v_star):
    """Rescale ``(u*, v*)`` to equal norms without changing ``u* v*^T``."""
    u = np.asarray(u_star, dtype=np.float64)
    v = np.asarray(v_star, dtype=np.float64)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return u, v
    s = np.sqrt(nv / nu)
    return u * s, v / s


@dataclass(frozen=True)
class SymmetrizedInstance:
    """The ``(m+n)``-vertex symmetric view of an asymmetric instance.

    Pair ``(i, j)`` of the original becomes ``(i, j + m)``.  ``instance.truth``
    is the concatenated ``w* = [u*; v*]`` exactly as given (not rebalanced).
    """

    instance: Instance
    split: Tuple[int, int]
    alpha: float = 1.0
    source: Optional[Instance] = field(default=None, compare=False, repr=False)

    @property
    def m(self) -> int:
        return self.split[0]

    @property
    def n(self) -> int:
        return self.split[1]

    @property
    def omega(self) -> MeasurementSet:
        return self.instance.omega

    @property
    def w_star(self) -> Optional[np.ndarray]:
        return self.instance.truth


def symmetrize(inst: Instance, alpha: float = 1.0) -> SymmetrizedInstance:
    if inst.kind != ASYMMETRIC:
        raise ValueError("only asymmetric instances can be symmetrized")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    m, n = inst.omega.shape
    omega_bar = MeasurementSet(inst.omega.rows, inst.omega.cols + m, (m + n, m + n), True)
    pos = omega_bar.index_of(inst.omega.rows, inst.omega.cols + m)
    observed = np.empty(len(omega_bar))
    noise = np.empty(len(omega_bar))
    observed[pos] = inst.observed
    noise[pos] = inst.noise_values
    truth = None
    if inst.truth is not None:
        truth = np.concatenate([inst.truth[0], inst.truth[1]])
    sym = Instance(SYMMETRIC, omega_bar, observed, noise, truth)
    return SymmetrizedInstance(sym, (m, n), float(alpha), inst)


def recovery_error(u, truth) -> float:
    """Relative Frobenius error of the recovered product.

    ``u`` and ``truth`` are vectors (``u u^T`` vs ``u* u*^T``), ``n x r``
    factors, or ``(u, v)`` pairs compared through ``u v^T``.
    """
    if isinstance(truth, tuple):
        a, b = (np.asarray(t, dtype=np.float64) for t in truth)
        x, y = (np.asarray(t, dtype=np.float64) for t in u)
        if x.shape != a.shape or y.shape != b.shape:
            raise ValueError("dimension mismatch")
        P = np.outer(a, b)
        Q = np.outer(x, y)
    else:
        A = np.asarray(truth, dtype=np.float64)
        B = np.asarray(u, dtype=np.float64)
        if A.ndim == 1:
            A = A[:, None]
        if B.ndim == 1:
            B = B[:, None]
        if A.shape[0] != B.shape[0]:
            raise ValueError("dimension mismatch")
        P = A @ A.T
        Q = B @ B.T
    denom = np.linalg.norm(P)
    if denom == 0:
        raise ValueError("truth is identically zero")
    return float(np.linalg.norm(Q - P) / denom)
