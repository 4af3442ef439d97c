"""Projected subgradient method with geometrically decaying steps."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import _kernels
from .model import RANK_R, SYMMETRIC, Instance, SymmetrizedInstance, recovery_error
from .objective import ObjectiveSpec, objective_spec

REASONS = {
    _kernels.REASON_MAX_ITERS: "max_iters",
    _kernels.REASON_PLATEAU: "plateau",
    _kernels.REASON_STEP_FLOOR: "step_floor",
}


@dataclass(frozen=True)
class SolverConfig:
    """Step schedule and stopping rules.

    The step at iteration ``k`` moves a distance ``mu0 * decay**k`` along the
    normalized subgradient.  ``mu0=None`` means ``0.1 * ||w0||``.  The plateau
    stop fires when the best objective improved by at most ``stop_tol``
    (relative) over ``stop_window`` steps and the remaining travel
    ``mu_k / (1 - decay)`` is below ``travel_tol * ||w_k||``.
    """

    mu0: Optional[float] = None
    decay: float = 0.995
    max_iters: int = 20000
    positivity_floor: float = 1e-12
    stop_tol: float = 1e-10
    stop_window: int = 500
    travel_tol: float = 1e-6
    rng_seed: int = 0
    trace_every: int = 10
    init: str = "uniform"

    def __post_init__(self):
        if not 0 < self.decay < 1:
            raise ValueError("decay must lie in (0, 1)")
        if self.mu0 is not None and not self.mu0 > 0:
            raise ValueError("mu0 must be positive")
        if self.max_iters < 0 or self.stop_window < 1 or self.trace_every < 1:
            raise ValueError("invalid iteration limits")
        if self.init not in INIT_LAWS:
            raise ValueError(f"unknown init law {self.init!r}")

    def with_seed(self, seed) -> "SolverConfig":
        return replace(self, rng_seed=seed)


def _uniform(rng, shape, eps):
    # uniform on (eps, 1]
    return 1.0 - rng.random(shape) * (1.0 - eps)


def _loguniform(rng, shape, eps):
    # scale-free draw over three decades, [1e-3, 1]
    return 10.0 ** (-3.0 * rng.random(shape))


INIT_LAWS = {"uniform": _uniform, "loguniform": _loguniform}


def random_start(shape, cfg: SolverConfig, seed=None) -> np.ndarray:
    rng = np.random.default_rng(cfg.rng_seed if seed is None else seed)
    return INIT_LAWS[cfg.init](rng, shape, cfg.positivity_floor)


@dataclass
class SolverResult:
    w: np.ndarray
    objective: float
    trace: np.ndarray
    iterations: int
    reason: str
    wall_time: float
    recovery_error: Optional[float] = None
    split: int = 0

    @property
    def u(self) -> np.ndarray:
        if self.w.ndim == 2 and self.w.shape[1] > 1:
            return self.w
        w = self.w.reshape(-1)
        return w[: self.split] if self.split else w

    @property
    def v(self) -> Optional[np.ndarray]:
        if not self.split:
            return None
        return self.w.reshape(-1)[self.split:]

    @property
    def U(self) -> np.ndarray:
        return self.w if self.w.ndim == 2 else self.w[:, None]


def _run(W0, rows, cols, X, split, alpha, lam, beta, cfg: SolverConfig):
    W0 = np.ascontiguousarray(W0, dtype=np.float64)
    if np.any(W0 <= 0) or not np.all(np.isfinite(W0)):
        raise ValueError("initial point must be strictly positive")
    mu0 = cfg.mu0 if cfg.mu0 is not None else 0.1 * float(np.linalg.norm(W0))
    t0 = time.perf_counter()
    W, f, k, reason, trace = _kernels.subgradient_descent(
        W0, rows, cols, np.ascontiguousarray(X, dtype=np.float64), split, alpha, lam, beta,
        mu0, cfg.decay, cfg.max_iters, cfg.positivity_floor, cfg.stop_tol, cfg.stop_window,
        cfg.trace_every, cfg.travel_tol)
    return W, float(f), int(k), REASONS[int(reason)], trace, time.perf_counter() - t0


def solve_symmetric(inst: Instance, spec: Optional[ObjectiveSpec] = None,
                    cfg: Optional[SolverConfig] = None, u0=None) -> SolverResult:
    """Minimize a symmetric rank-1 objective from ``u0`` (random if omitted).

    Returns the best iterate seen, not the last one.
    """
    cfg = cfg or SolverConfig()
    spec = spec or objective_spec(inst)
    if spec.asymmetric or spec.base is not inst:
        raise ValueError("objective spec does not belong to this symmetric instance")
    n = inst.n
    W0 = random_start((n, 1), cfg) if u0 is None else np.asarray(u0, dtype=np.float64).reshape(n, 1)
    W, f, k, reason, trace, wt = _run(W0, *spec.kernel_args(), cfg)
    err = recovery_error(W[:, 0], inst.truth) if inst.truth is not None else None
    return SolverResult(W[:, 0].copy(), f, trace, k, reason, wt, err)


def solve_asymmetric(inst, spec: Optional[ObjectiveSpec] = None,
                     cfg: Optional[SolverConfig] = None, w0=None) -> SolverResult:
    """Minimize the balanced asymmetric objective over ``w = [u; v]``."""
    cfg = cfg or SolverConfig()
    if spec is None:
        spec = objective_spec(inst)
    if not spec.asymmetric:
        raise ValueError("asymmetric solve needs an asymmetric objective spec")
    sym: SymmetrizedInstance = spec.instance
    N = spec.dim
    if w0 is None:
        W0 = random_start((N, 1), cfg)
    elif isinstance(w0, tuple):
        W0 = np.concatenate([np.asarray(x, dtype=np.float64) for x in w0]).reshape(N, 1)
    else:
        W0 = np.asarray(w0, dtype=np.float64).reshape(N, 1)
    W, f, k, reason, trace, wt = _run(W0, *spec.kernel_args(), cfg)
    m = sym.m
    w = W[:, 0].copy()
    err = None
    source = sym.source if sym.source is not None else inst
    if isinstance(source, Instance) and source.truth is not None:
        err = recovery_error((w[:m], w[m:]), source.truth)
    return SolverResult(w, f, trace, k, reason, wt, err, split=m)


def solve_rank_r(inst: Instance, cfg: Optional[SolverConfig] = None, U0=None,
                 r: Optional[int] = None) -> SolverResult:
    """Minimize ``sum_{(i,j) in omega} |(U U^T)_ij - X_ij|`` over ``U >= 0``."""
    cfg = cfg or SolverConfig()
    if inst.kind not in (RANK_R, SYMMETRIC):
        raise ValueError("rank-r solve needs a symmetric or rank_r instance")
    n = inst.n
    if r is None:
        r = inst.rank
    if r < 1 or r > n:
        raise ValueError(f"rank must lie in [1, n]; got r={r}, n={n}")
    W0 = random_start((n, r), cfg) if U0 is None else np.asarray(U0, dtype=np.float64).reshape(n, r)
    W, f, k, reason, trace, wt = _run(W0, inst.omega.rows, inst.omega.cols, inst.observed,
                                      0, 0.0, 0.0, 1.0, cfg)
    err = recovery_error(W, inst.truth) if inst.truth is not None else None
    return SolverResult(W.copy(), f, trace, k, reason, wt, err)
