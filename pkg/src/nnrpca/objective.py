"""Non-smooth l1 objectives, their one-sided directional derivatives,
subgradients, and explicit descent directions away from non-optimal points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import _kernels
from .model import ASYMMETRIC, SYMMETRIC, Instance, SymmetrizedInstance, balanced_truth, symmetrize

NOISELESS_SYM = "noiseless_sym"
NOISELESS_ASYM = "noiseless_asym"
REGULARIZED_SYM = "regularized_sym"
REGULARIZED_ASYM = "regularized_asym"
VARIANTS = (NOISELESS_SYM, NOISELESS_ASYM, REGULARIZED_SYM, REGULARIZED_ASYM)

TAU_RATIO = 1e-9
TAU_STAT = 1e-8


@dataclass(frozen=True)
class ObjectiveSpec:
    """Which objective to evaluate on which instance.

    Asymmetric variants always operate on the symmetrized instance, with the
    variable ``w = [u; v]`` of length ``m + n``.
    """

    instance: Union[Instance, SymmetrizedInstance]
    variant: str
    lam: float = 0.0
    beta: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        asym = self.variant in (NOISELESS_ASYM, REGULARIZED_ASYM)
        if asym != isinstance(self.instance, SymmetrizedInstance):
            raise ValueError(f"variant {self.variant} does not match the instance type")
        if self.lam < 0 or not self.beta > 0 or not self.alpha > 0:
            raise ValueError("need lam >= 0, beta > 0, alpha > 0")

    @property
    def asymmetric(self) -> bool:
        return isinstance(self.instance, SymmetrizedInstance)

    @property
    def base(self) -> Instance:
        return self.instance.instance if self.asymmetric else self.instance

    @property
    def dim(self) -> int:
        return self.base.omega.shape[0]

    @property
    def split(self) -> int:
        return self.instance.m if self.asymmetric else 0

    @property
    def balance_weight(self) -> float:
        return self.alpha if self.asymmetric else 0.0

    @property
    def rows(self) -> np.ndarray:
        return self.base.omega.rows

    @property
    def cols(self) -> np.ndarray:
        return self.base.omega.cols

    @property
    def X(self) -> np.ndarray:
        return self.base.observed

    def truth(self) -> np.ndarray:
        """Ground truth in the optimization variable; balanced for asymmetric problems."""
        if self.base.truth is None:
            raise ValueError("instance has no ground truth")
        if self.asymmetric:
            src = self.instance.source
            if src is not None and src.truth is not None:
                u, v = balanced_truth(*src.truth)
            else:
                m = self.split
                u, v = balanced_truth(self.base.truth[:m], self.base.truth[m:])
            return np.concatenate([u, v])
        return np.asarray(self.base.truth, dtype=np.float64)

    def kernel_args(self):
        return (self.rows, self.cols, self.X, self.split, self.balance_weight, self.lam, self.beta)


def objective_spec(inst, variant: Optional[str] = None, lam: Optional[float] = None,
                   beta: float = 1.0, alpha: float = 1.0) -> ObjectiveSpec:
    """Build an :class:`ObjectiveSpec` with the standard defaults.

    Regularized variants default to ``beta = 1`` and ``lam = n/2`` (symmetric)
    or ``(m+n)/2`` (asymmetric); noiseless variants use ``lam = 0``.
    """
    if isinstance(inst, Instance) and inst.kind == ASYMMETRIC:
        inst = symmetrize(inst, alpha)
    if isinstance(inst, SymmetrizedInstance):
        alpha = inst.alpha
        variant = variant or NOISELESS_ASYM
    else:
        if inst.kind != SYMMETRIC:
            raise ValueError(f"no rank-1 objective for {inst.kind} instances")
        variant = variant or NOISELESS_SYM
    if lam is None:
        if variant in (REGULARIZED_SYM, REGULARIZED_ASYM):
            lam = (inst.instance.omega.shape[0] if isinstance(inst, SymmetrizedInstance) else inst.n) / 2
        else:
            lam = 0.0
    return ObjectiveSpec(inst, variant, float(lam), float(beta), float(alpha))


def _as_vector(spec: ObjectiveSpec, u) -> np.ndarray:
    if isinstance(u, tuple):
        u = np.concatenate([np.asarray(x, dtype=np.float64) for x in u])
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    if u.size != spec.dim:
        raise ValueError(f"expected a vector of length {spec.dim}, got {u.size}")
    return u


def eval_regularizer(u, lam: float, beta: float) -> float:
    """``lam * sum(max(u - beta, 0)^4)``."""
    if lam < 0 or not beta > 0:
        raise ValueError("need lam >= 0 and beta > 0")
    e = np.maximum(np.asarray(u, dtype=np.float64) - beta, 0.0)
    return float(lam * np.sum(e ** 4))


def eval_objective(spec: ObjectiveSpec, u) -> float:
    u = _as_vector(spec, u)
    if np.any(u < 0):
        raise ValueError("objective is defined on the non-negative orthant only")
    return float(_kernels.objective_value(u[:, None], *spec.kernel_args()))


def subgradient(spec: ObjectiveSpec, u) -> np.ndarray:
    """The subgradient picking ``sign(0) = 0`` at every kink."""
    u = _as_vector(spec, u)
    G = np.empty((u.size, 1))
    _kernels.objective_and_subgradient(u[:, None], *spec.kernel_args(), G)
    return G[:, 0]


def directional_derivative(spec: ObjectiveSpec, u, d):
    """Exact one-sided derivative ``lim_{t->0+} (f(u + t d) - f(u)) / t``.

    ``d`` may be a single direction or a ``(K, N)`` stack, in which case an
    array of ``K`` derivatives is returned.
    """
    u = _as_vector(spec, u)
    D = np.asarray(d, dtype=np.float64)
    single = D.ndim == 1
    D = np.atleast_2d(D)
    if D.shape[1] != u.size:
        raise ValueError("direction has the wrong length")
    if np.any(D[:, u == 0] < 0):
        raise ValueError("direction is infeasible: it decreases a zero coordinate")

    r, c = spec.rows, spec.cols
    res = u[r] * u[c] - spec.X
    sgn = np.sign(res)
    at_kink = res == 0
    chunk = max(1, 4_000_000 // max(r.size, 1))
    out = np.empty(D.shape[0])
    for s in range(0, D.shape[0], chunk):
        Dc = D[s:s + chunk]
        rate = Dc[:, r] * u[c] + Dc[:, c] * u[r]
        out[s:s + chunk] = np.where(at_kink, np.abs(rate), sgn * rate).sum(axis=1)

    if spec.asymmetric:
        m = spec.split
        bal = np.sum(u[:m] ** 2) - np.sum(u[m:] ** 2)
        dbal = 2.0 * (D[:, :m] @ u[:m] - D[:, m:] @ u[m:])
        out = out + spec.alpha * (np.sign(bal) * dbal if bal != 0 else np.abs(dbal))
    if spec.lam:
        e = np.maximum(u - spec.beta, 0.0)
        out = out + 4.0 * spec.lam * (D @ e ** 3)
    return float(out[0]) if single else out


@dataclass(frozen=True)
class DirectionReport:
    direction: np.ndarray
    forward: float
    backward: float
    T1: np.ndarray
    T2: np.ndarray
    N: np.ndarray
    gamma: Optional[float] = None
    kind: str = "ratio"

    @property
    def certifies_descent(self) -> bool:
        return self.forward < -TAU_STAT and self.backward > TAU_STAT


def _ratio_partition(u, truth, tau):
    low = truth / u      # > 1 where u undershoots
    high = u / truth     # > 1 where u overshoots
    rho = max(low.max(), high.max())
    T1 = np.flatnonzero(low >= rho * (1 - tau))
    T2 = np.flatnonzero(high >= rho * (1 - tau))
    return rho, T1, T2


def descent_direction(spec: ObjectiveSpec, u, tau_ratio: float = TAU_RATIO) -> DirectionReport:
    """Direction built from the extremal truth-to-iterate ratios.

    Coordinates whose ratio ``u*_i/u_i`` attains the largest mismatch are
    scaled up (``T1``), those whose ``u_i/u*_i`` attains it are scaled down
    (``T2``); everything else is held.  For asymmetric problems a multiple of
    the rescaling direction ``(-u, v)`` is added so that the first-order change
    of ``||u||^2 - ||v||^2`` vanishes.  When ``u v^T`` already equals the
    truth product but the norms are unbalanced, the pure rescaling direction
    is returned instead.
    """
    u = _as_vector(spec, u)
    if np.any(u <= 0):
        raise ValueError("descent direction needs a strictly positive point")
    truth = spec.truth()
    if np.any(truth <= 0):
        raise ValueError("descent direction needs a strictly positive truth")

    if spec.asymmetric:
        m = spec.split
        prod_gap = np.max(np.abs(np.outer(u[:m], u[m:]) - np.outer(truth[:m], truth[m:])))
        scale = np.max(np.outer(truth[:m], truth[m:]))
        if prod_gap <= 1e-14 * scale:
            bal = np.sum(u[:m] ** 2) - np.sum(u[m:] ** 2)
            if bal == 0:
                raise ValueError("point coincides with the truth; no descent direction exists")
            d = np.concatenate([-u[:m], u[m:]]) * np.sign(bal)
            empty = np.zeros(0, dtype=np.int64)
            return DirectionReport(d, directional_derivative(spec, u, d),
                                   directional_derivative(spec, u, -d),
                                   empty, empty, np.arange(u.size), None, "rescale")
    elif np.array_equal(u, truth):
        raise ValueError("point coincides with the truth; no descent direction exists")

    rho, T1, T2 = _ratio_partition(u, truth, tau_ratio)
    if rho <= 1 + tau_ratio:
        raise ValueError("point coincides with the truth; no descent direction exists")
    both = np.union1d(T1, T2)
    N = np.setdiff1d(np.arange(u.size), both)
    pivot = u[both.max()]
    d = np.zeros_like(u)
    d[T1] = u[T1] / pivot
    d[T2] = -u[T2] / pivot

    gamma = None
    if spec.asymmetric:
        m = spec.split
        side = np.where(np.arange(u.size) < m, 1.0, -1.0)
        signed = np.zeros_like(u)
        signed[T1] = 1.0
        signed[T2] = -1.0
        gamma = float(np.sum(side * signed * u ** 2) / (pivot * np.sum(u ** 2)))
        d = d - side * u * gamma

    return DirectionReport(d, directional_derivative(spec, u, d), directional_derivative(spec, u, -d),
                           T1, T2, N, gamma, "ratio")


def balance_linear_term(spec: ObjectiveSpec, u, d) -> float:
    """First-order change of ``||u||^2 - ||v||^2`` along ``d``."""
    u = _as_vector(spec, u)
    d = _as_vector(spec, d)
    m = spec.split
    return float(2.0 * (u[:m] @ d[:m] - u[m:] @ d[m:]))


@dataclass(frozen=True)
class StationarityVerdict:
    verdict: str
    direction: Optional[np.ndarray]
    derivative: float
    directions_tested: int

    @property
    def descent_found(self) -> bool:
        return self.verdict == "certified_descent"


def d_stationarity_test(spec: ObjectiveSpec, u, budget: int = 1000, seed=0,
                        tau: float = TAU_STAT, sense: str = "min") -> StationarityVerdict:
    """Search for a feasible direction with a strictly improving one-sided derivative.

    Tries every feasible signed coordinate direction, the ratio-based descent
    direction when the truth is known, and ``budget`` random unit feasible
    directions.  ``sense="max"`` looks for ascent instead (i.e. descent of
    ``-f``).  Finding nothing is not a proof of stationarity.
    """
    if sense not in ("min", "max"):
        raise ValueError("sense must be 'min' or 'max'")
    u = _as_vector(spec, u)
    if np.any(u < 0):
        raise ValueError("point must be non-negative")
    N = u.size
    zero = u == 0
    eye = np.eye(N)
    cands = [eye, -eye[~zero]]
    if spec.base.truth is not None and np.all(u > 0):
        try:
            cands.append(descent_direction(spec, u).direction[None, :])
        except ValueError:
            pass
    if budget > 0:
        rng = np.random.default_rng(seed)
        R = rng.standard_normal((budget, N))
        R[:, zero] = np.abs(R[:, zero])
        R /= np.linalg.norm(R, axis=1, keepdims=True)
        cands.append(R)
    D = np.vstack(cands)
    fp = directional_derivative(spec, u, D)
    if sense == "max":
        fp = -fp
    k = int(np.argmin(fp))
    if fp[k] < -tau:
        return StationarityVerdict("certified_descent", D[k], float(fp[k]), D.shape[0])
    return StationarityVerdict("no_descent_found", None, float(fp[k]), D.shape[0])
