"""Single-stage Bayesian belief computations.

Beliefs are probability vectors over a type set; mixed actions are row
stacks x(. | k), one action distribution per type.  The belief-augmented
game moves on states (p, q, omega): the players pick mixed actions, a pure
action pair (i, j) realizes from the type-averaged marginals, and each
belief updates to the Bayes posterior given the realized own action.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .games import GameSpec

BELIEF_TOL = 1e-12
RENORM_TOL = 1e-10


class BeliefDriftError(ValueError):
    """Posterior renormalization moved mass by more than the hygiene bound."""


def check_belief(p: np.ndarray, tol: float = BELIEF_TOL) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("belief must be a nonempty vector")
    if np.any(p < -tol) or abs(p.sum() - 1.0) > tol:
        raise ValueError(f"not a probability vector: {p!r}")
    return p


def check_mixed_action(x: np.ndarray, tol: float = BELIEF_TOL) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.size == 0:
        raise ValueError("mixed action must be a (types x actions) matrix")
    if np.any(x < -tol) or np.any(np.abs(x.sum(axis=1) - 1.0) > tol):
        raise ValueError(f"rows are not probability vectors: {x!r}")
    return x


@dataclass(frozen=True)
class Belief:
    """Validated belief over a type set, with support diagnostics."""

    weights: np.ndarray

    def __post_init__(self):
        w = check_belief(self.weights).copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0)

    @property
    def min_positive(self) -> float:
        return float(self.weights[self.weights > 0].min())

    @property
    def inv_sup_norm(self) -> float:
        """max over the support of 1/p(k)."""
        return 1.0 / self.min_positive


@dataclass(frozen=True)
class MixedAction:
    """Validated mixed action: one distribution over actions per type."""

    rows: np.ndarray

    def __post_init__(self):
        r = check_mixed_action(self.rows).copy()
        r.setflags(write=False)
        object.__setattr__(self, "rows", r)


def _as_array(v) -> np.ndarray:
    if isinstance(v, Belief):
        return v.weights
    if isinstance(v, MixedAction):
        return v.rows
    return np.asarray(v, dtype=float)


def action_marginal(x, p) -> np.ndarray:
    """Type-averaged action distribution: sum_k p(k) x(i | k)."""
    x, p = _as_array(x), _as_array(p)
    if x.shape[0] != p.shape[0]:
        raise ValueError(f"type dimension mismatch: {x.shape[0]} vs {p.shape[0]}")
    return p @ x


def bayes_posterior(x, p, i: int) -> np.ndarray:
    """Posterior belief given own mixed action x and realized action i.

    Zero-probability actions leave the belief unchanged.  The posterior is
    renormalized to kill 1-ulp drift; a renormalization factor further than
    1e-10 from 1 raises instead of being silently absorbed.
    """
    x, p = _as_array(x), _as_array(p)
    mass = float(p @ x[:, i])
    if mass == 0.0:
        return p.copy()
    post = x[:, i] * p / mass
    s = post.sum()
    if abs(s - 1.0) > RENORM_TOL:
        raise BeliefDriftError(f"posterior renormalization factor {s!r} is out of tolerance")
    return post / s


def posterior_table(x, p) -> tuple[np.ndarray, np.ndarray]:
    """All posteriors at once: returns (marginal, table) with table[i] the
    posterior after action i (rows for zero-marginal actions equal p)."""
    x, p = _as_array(x), _as_array(p)
    xbar = p @ x
    with np.errstate(invalid="ignore", divide="ignore"):
        table = (x * p[:, None]).T / xbar[:, None]
    dead = xbar == 0.0
    if np.any(dead):
        table[dead] = p
    sums = table.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > RENORM_TOL):
        raise BeliefDriftError("posterior renormalization factor out of tolerance")
    return xbar, table / sums[:, None]


def in_frontier(p, eps: float) -> bool:
    """True iff some coordinate of p is <= eps (boundary inclusive)."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    return bool(np.min(_as_array(p)) <= eps)


@dataclass(frozen=True)
class TransitionAtom:
    p: np.ndarray
    q: np.ndarray
    omega: int
    prob: float


def belief_transition(spec: GameSpec, p, q, omega: int, x, y) -> list[TransitionAtom]:
    """One-stage law of (posterior on K, posterior on L, next state).

    Atoms arising from distinct (i, j) pairs are merged only when their
    belief coordinates agree exactly, preserving the summation structure of
    the kernel.  Masses are nonnegative and total 1.
    """
    p, q = _as_array(p), _as_array(q)
    xbar, p_post = posterior_table(x, p)
    ybar, q_post = posterior_table(y, q)
    acc: dict[tuple, list] = {}
    for i in range(spec.n_i):
        if xbar[i] == 0.0:
            continue
        for j in range(spec.n_j):
            m_ij = xbar[i] * ybar[j]
            if m_ij == 0.0:
                continue
            row = spec.rho[omega, i, j]
            for w2 in np.flatnonzero(row):
                key = (p_post[i].tobytes(), q_post[j].tobytes(), int(w2))
                if key in acc:
                    acc[key][0] += m_ij * row[w2]
                else:
                    acc[key] = [m_ij * row[w2], p_post[i].copy(), q_post[j].copy()]
    return [
        TransitionAtom(p=v[1], q=v[2], omega=key[2], prob=float(v[0]))
        for key, v in acc.items()
    ]


def stage_payoff(spec: GameSpec, p, q, omega: int, x, y) -> float:
    """Expected stage payoff sum p(k) q(l) x(i|k) y(j|l) g(k, l, omega, i, j)."""
    p, q, x, y = _as_array(p), _as_array(q), _as_array(x), _as_array(y)
    return float(np.einsum("k,l,ki,lj,klij->", p, q, x, y, spec.g[:, :, omega]))
