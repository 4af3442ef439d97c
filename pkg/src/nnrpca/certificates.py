"""Executable recovery-guarantee checks and random-graph bound validators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .graph import analyze, good_bad_subgraphs, graph_from
from .model import ASYMMETRIC, SYMMETRIC, Instance, balanced_truth, condition_number

DEG_CONST = 48.0
DENSITY_CONST = 144.0
SAMPLING_CONST = 1740.0


@dataclass(frozen=True)
class Condition:
    name: str
    lhs: float
    rhs: float
    passed: bool
    relation: str = ">"

    @property
    def margin(self) -> float:
        # positive iff the inequality holds strictly in the stated direction
        if self.relation in (">", ">="):
            return self.lhs - self.rhs
        return self.rhs - self.lhs


@dataclass(frozen=True)
class CertificateReport:
    """Per-condition results of one guarantee check.

    ``notes`` carries derived quantities (implied success probability, whether
    a threshold exceeds 1) that are reported but do not affect ``passed``.
    """

    theorem: str
    conditions: Tuple[Condition, ...]
    constants: Dict[str, float] = field(default_factory=dict)
    notes: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def __getitem__(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def rows(self) -> List[tuple]:
        out = [("theorem", "condition", "lhs", "relation", "rhs", "pass")]
        for c in self.conditions:
            out.append((self.theorem, c.name, repr(float(c.lhs)), c.relation, repr(float(c.rhs)), int(c.passed)))
        for k, v in self.constants.items():
            out.append((self.theorem, f"const:{k}", repr(float(v)), "", "", ""))
        for k, v in self.notes.items():
            out.append((self.theorem, f"note:{k}", repr(float(v)), "", "", ""))
        out.append((self.theorem, "overall", "", "", "", int(self.passed)))
        return out


def _cond(name, lhs, rhs, relation=">") -> Condition:
    ops = {">": lhs > rhs, ">=": lhs >= rhs, "<": lhs < rhs, "<=": lhs <= rhs, "==": lhs == rhs}
    return Condition(name, float(lhs), float(rhs), bool(ops[relation]), relation)


def _truth_vector(inst: Instance) -> np.ndarray:
    if inst.truth is None:
        raise ValueError("instance has no ground truth")
    if inst.kind == ASYMMETRIC:
        return np.concatenate(balanced_truth(*inst.truth))
    if inst.kind != SYMMETRIC:
        raise ValueError("rank-1 certificates only")
    return np.asarray(inst.truth, dtype=np.float64)


def observation_margin(inst: Instance) -> float:
    """Largest admissible ``c``: ``min(1, min_omega X_ij / u*_min^2)``.

    Asymmetric instances use ``w* = [u*; v*]`` rescaled to equal norms.  A
    non-positive value means the assumption fails for every ``c > 0``.
    """
    w = _truth_vector(inst)
    wmin = float(w.min())
    if wmin <= 0:
        return 0.0
    if len(inst.omega) == 0:
        return 1.0
    return float(min(1.0, inst.observed.min() / wmin**2))


def _kappa(w) -> float:
    w = np.asarray(w, dtype=np.float64)
    return condition_number(w) if np.all(w > 0) else math.inf


def check_det_symmetric(inst: Instance, c: float, require_connected: bool = False) -> CertificateReport:
    """Deterministic landscape certificate for a symmetric instance.

    Conditions: ``u* > 0``; ``delta(G) > (48/c^2) kappa^4 Delta(B)``; no
    bipartite component.  ``require_connected`` adds connectivity of the
    sparsity graph.
    """
    if not 0 < c <= 1:
        raise ValueError("c must lie in (0, 1]")
    u = _truth_vector(inst)
    kappa = _kappa(u)
    good, bad = good_bad_subgraphs(inst)
    full = analyze(graph_from(inst.omega))
    rhs = DEG_CONST / c**2 * kappa**4 * bad.max_degree if bad.max_degree else 0.0
    conds = [
        _cond("truth_positive", float(u.min()), 0.0),
        _cond("degree_ratio", good.min_degree, rhs),
        _cond("bipartite_components", full.n_bipartite_components, 0, "=="),
    ]
    if require_connected:
        conds.append(_cond("components", len(full.components), 1, "=="))
    return CertificateReport("det_symmetric", tuple(conds), {"c": c, "kappa": kappa})


def check_det_asymmetric(inst: Instance, c: float) -> CertificateReport:
    """Deterministic certificate on the symmetrized instance; ``kappa`` uses
    the balanced ``w*``.
    """
    if inst.kind != ASYMMETRIC:
        raise ValueError("expected an asymmetric instance")
    if not 0 < c <= 1:
        raise ValueError("c must lie in (0, 1]")
    w = _truth_vector(inst)
    kappa = _kappa(w)
    m, n = inst.omega.shape
    good = analyze(graph_from(inst.good))
    bad = analyze(graph_from(inst.bad))
    rhs = DEG_CONST / c**2 * kappa**4 * bad.max_degree if bad.max_degree else 0.0
    conds = (
        _cond("truth_positive", float(w.min()), 0.0),
        _cond("degree_ratio", good.min_degree, rhs),
        _cond("good_components", len(good.components), 1, "=="),
    )
    return CertificateReport("det_asymmetric", conds, {"c": c, "kappa": kappa})


def _check_prob_args(c, eta, kappa):
    if not 0 < c <= 1:
        raise ValueError("c must lie in (0, 1]")
    if not eta > 0:
        raise ValueError("eta must be positive")
    if not kappa >= 1:
        raise ValueError("kappa must be >= 1")


def check_prob_symmetric(n: int, p: float, d: float, kappa: float, c: float, eta: float = 1.0) -> CertificateReport:
    """Random-model thresholds on the corruption density and sampling rate."""
    if n < 2:
        raise ValueError("need n >= 2")
    _check_prob_args(c, eta, kappa)
    k = DENSITY_CONST / c**2 * kappa**4
    d_thr = 1.0 / (k + 1.0)
    p_thr = SAMPLING_CONST / c**2 * kappa**4 * (1 + eta) * math.log(n) / n
    conds = (_cond("density", d, d_thr, "<"), _cond("sampling", p, p_thr, ">"))
    notes = {"success_probability": 1 - 3 * n ** (-eta), "sampling_vacuous": float(p_thr > 1)}
    return CertificateReport("prob_symmetric", conds, {"c": c, "kappa": kappa, "eta": eta}, notes)


def check_prob_asymmetric(m: int, n: int, p: float, d: float, kappa_w: float, c: float,
                          eta: float = 1.0) -> CertificateReport:
    """As :func:`check_prob_symmetric` for an ``m x n`` matrix with ``n >= m``."""
    if m > n:
        raise ValueError("need n >= m (transpose the instance)")
    if m < 2:
        raise ValueError("need m >= 2")
    _check_prob_args(c, eta, kappa_w)
    r = m / n
    k = DENSITY_CONST / c**2 * kappa_w**4
    d_thr = r / (k + r)
    p_thr = SAMPLING_CONST / c**2 * kappa_w**4 * (1 + eta) * n * math.log(n) / m**2
    conds = (_cond("density", d, d_thr, "<"), _cond("sampling", p, p_thr, ">"))
    notes = {"success_probability": 1 - 10 * n ** (-eta), "sampling_vacuous": float(p_thr > 1)}
    return CertificateReport("prob_asymmetric", conds, {"c": c, "kappa": kappa_w, "eta": eta, "r": r}, notes)


def connectivity_threshold(n: int, eta: float = 1.0, m: Optional[int] = None) -> float:
    """Sampling rate above which ``G(n, p)`` (or the ``m x n`` bipartite
    random graph when ``m`` is given) is connected, and non-bipartite in the
    symmetric case, with high probability.  Capped at 1.
    """
    if n < 2 or (m is not None and m < 2):
        raise ValueError("need at least 2 vertices per side")
    if m is None:
        p = ((2 * eta + 2) * math.log(n) + 2) / (n - 1)
    else:
        p = (m + n) * ((1 + eta) * math.log(m * n) + 1) / ((m - 1) * (n - 1))
    return min(1.0, p)


def connectivity_failure_bound(n: int, eta: float = 1.0, m: Optional[int] = None) -> float:
    """Probability bound on failing connectivity (and non-bipartiteness)
    at :func:`connectivity_threshold`.
    """
    if m is None:
        return 1.5 * n ** (-eta)
    mn = m * n
    return 2 * mn ** (-eta) + 4 * mn ** (-2 * eta)


@dataclass(frozen=True)
class DegreeBounds:
    max_upper: float
    min_lower: float
    min_applicable: bool
    max_failure: float
    min_failure: float


def degree_concentration_bounds(n: int, p: float, eta: float = 1.0, m: Optional[int] = None) -> DegreeBounds:
    """High-probability degree bounds for ``G(n, p)``; with ``m`` given, for the
    ``m x n`` bipartite random graph (``m <= n``).

    ``P(Delta >= max_upper) <= max_failure``; ``P(delta <= min_lower) <=
    min_failure`` holds only when ``min_applicable``.
    """
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    if m is None:
        up = max(1.5 * n * p, 18 * (1 + eta) * math.log(n))
        lo = n * p / 2
        ok = p >= 12 * (1 + eta) * math.log(n) / n
        return DegreeBounds(up, lo, ok, n ** (-eta), n ** (-eta))
    if m > n:
        raise ValueError("need m <= n")
    up = max(1.5 * n * p, 18 * (1 + eta) * n * math.log(n) / m)
    lo = m * p / 2
    ok = p >= 12 * (1 + eta) * math.log(n) / m
    return DegreeBounds(up, lo, ok, 2 * n ** (-eta), 2 * n ** (-eta))


def stationary_box_check(u, c: float, u_star) -> bool:
    """Whether ``u`` lies in ``[(c/2) u*_min^2, 2]`` after rescaling.

    ``u`` and ``u*`` are scaled jointly so that ``max(u*) = 1``: ``u* -> u*/s``
    and ``u -> u/s`` with ``s = max(u*)``, which keeps ``u u^T`` and
    ``u* u*^T`` in the same relation.  Pass ``(u, v)`` pairs as concatenated
    ``w`` vectors.
    """
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    us = np.asarray(u_star, dtype=np.float64).reshape(-1)
    if u.shape != us.shape:
        raise ValueError("dimension mismatch")
    s = float(us.max())
    if not s > 0:
        raise ValueError("u_star must have a positive entry")
    u, us = u / s, us / s
    lo = c / 2 * float(us.min()) ** 2
    return bool(np.all(u >= lo) and np.all(u <= 2.0))


def binomial_sigma(p: float, trials: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / trials)


@dataclass(frozen=True)
class MonteCarloCheck:
    """Empirical frequency of a bad graph event against its probability bound."""

    event: str
    n: int
    m: Optional[int]
    p: float
    trials: int
    empirical: float
    bound: float
    applicable: bool = True

    @property
    def sigma(self) -> float:
        return binomial_sigma(self.bound, self.trials)

    @property
    def passed(self) -> bool:
        return (not self.applicable) or self.empirical <= self.bound + 3 * self.sigma

    def row(self) -> tuple:
        return (self.event, self.n, "" if self.m is None else self.m, repr(self.p), self.trials,
                repr(self.empirical), repr(self.bound), repr(self.sigma), int(self.applicable), int(self.passed))


MC_HEADER = ("event", "n", "m", "p", "trials", "empirical", "bound", "sigma", "applicable", "pass")


def _trial_graphs(n, p, trials, seed, m):
    from .generators import rng_for, sample_omega

    for t in range(trials):
        yield sample_omega(n if m is None else (m, n), p, rng_for(seed, t, "graph"))


def validate_connectivity(n: int, trials: int, seed=0, eta: float = 1.0, m: Optional[int] = None,
                          p: Optional[float] = None) -> MonteCarloCheck:
    """Sample graphs at the connectivity threshold (or at ``p``) and count
    samples that are disconnected, or bipartite in the symmetric case.
    """
    thr = connectivity_threshold(n, eta, m)
    p = thr if p is None else p
    bad = 0
    for om in _trial_graphs(n, p, trials, seed, m):
        rep = analyze(graph_from(om))
        ok = rep.connected and (m is not None or not rep.has_bipartite_component)
        bad += not ok
    event = "disconnected" if m is not None else "disconnected_or_bipartite"
    return MonteCarloCheck(event, n, m, p, trials, bad / trials, connectivity_failure_bound(n, eta, m), p >= thr)


def validate_degrees(n: int, p: float, trials: int, seed=0, eta: float = 1.0,
                     m: Optional[int] = None) -> Tuple[MonteCarloCheck, MonteCarloCheck]:
    """Empirical ``P(Delta >= upper)`` and ``P(delta <= lower)`` over all vertices."""
    b = degree_concentration_bounds(n, p, eta, m)
    hi = lo = 0
    for om in _trial_graphs(n, p, trials, seed, m):
        deg = graph_from(om).degrees()
        hi += int(deg.max() >= b.max_upper)
        lo += int(deg.min() <= b.min_lower)
    return (MonteCarloCheck("max_degree_high", n, m, p, trials, float(hi) / trials, b.max_failure),
            MonteCarloCheck("min_degree_low", n, m, p, trials, float(lo) / trials, b.min_failure,
                            b.min_applicable))
