"""Action-level information transforms.

Fix a belief p and a mixed action x with marginal xbar(i) = sum_k p(k)x(i|k).
An action i with positive marginal is *non-revealing* within tolerance eps
when every type plays it within a (1 +- eps) band of the marginal, and
*revealing* otherwise.  The *silent mapping* rebuilds x so that the whole
non-revealing block leaks no information while marginals are conserved; the
*translation mapping* re-centers x from prior p to a nearby prior so that
marginals transfer and posterior differences equal the prior difference.
All classifications use closed inequalities exactly as defined, with no
epsilon fuzz.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beliefs import _as_array, posterior_table


@dataclass(frozen=True)
class NRPartition:
    """Indices of non-revealing / revealing / zero-marginal actions at (x, p)."""

    nr: tuple[int, ...]
    r: tuple[int, ...]
    null: tuple[int, ...]
    mass_nr: float
    mass_r: float


def classify_actions(x, p, eps: float) -> NRPartition:
    """Partition actions into NR / R / null bands at belief p.

    i is NR iff xbar(i) != 0 and (1-eps) xbar(i) <= x(i|k) <= (1+eps) xbar(i)
    for every type k (closed inequalities).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    x, p = _as_array(x), _as_array(p)
    xbar = p @ x
    nr, r, null = [], [], []
    for i in range(x.shape[1]):
        if xbar[i] == 0.0:
            null.append(i)
        elif np.all(x[:, i] >= (1.0 - eps) * xbar[i]) and np.all(x[:, i] <= (1.0 + eps) * xbar[i]):
            nr.append(i)
        else:
            r.append(i)
    return NRPartition(
        nr=tuple(nr),
        r=tuple(r),
        null=tuple(null),
        mass_nr=float(xbar[nr].sum()),
        mass_r=float(xbar[r].sum()),
    )


def eps0_of(eps: float) -> float:
    """The inner tolerance eps0 = (1 - sqrt(1 - 4 eps)) / 2, defined on (0, 1/4].

    Satisfies (1-eps0)^2 + eps0 = 1 - eps and (1-eps0)(1+eps0) + eps0 = 1 + eps,
    which is exactly what makes the silent mapping at eps0 produce an action
    whose NR set at tolerance eps equals the original NR set at eps0.
    """
    if not 0 < eps <= 0.25:
        raise ValueError("eps must lie in (0, 1/4]")
    return (1.0 - np.sqrt(1.0 - 4.0 * eps)) / 2.0


def silent_map(x, p, eps: float) -> np.ndarray:
    """Rebuild x so the NR block carries no information, conserving marginals.

    On NR actions every type plays proportionally to the marginal, scaled by
    its own total NR mass shrunk toward 1; on the rest the row is mixed with
    the marginal at weight eps.  The marginal of the output equals that of x
    exactly, and a type-independent x is a fixed point.
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    x, p = _as_array(x), _as_array(p)
    part = classify_actions(x, p, eps)
    xbar = p @ x
    out = (1.0 - eps) * x + eps * np.tile(xbar, (x.shape[0], 1))
    if part.nr:
        nr = list(part.nr)
        nr_by_type = x[:, nr].sum(axis=1)
        scale = (1.0 - eps) * nr_by_type / part.mass_nr + eps
        out[:, nr] = scale[:, None] * xbar[None, nr]
    return out


def concise_ambiguous_check(x, p, eps: float, tol: float = 1e-10) -> tuple[bool, bool]:
    """Is x eps-concise (NR block proportional to marginals) and eps-ambiguous
    (every posterior coordinate at least eps * min_k p(k)) at p?"""
    if eps <= 0:
        raise ValueError("eps must be positive")
    x, p = _as_array(x), _as_array(p)
    part = classify_actions(x, p, eps)
    xbar, posts = posterior_table(x, p)
    concise = True
    if part.nr:
        nr = list(part.nr)
        nr_by_type = x[:, nr].sum(axis=1)
        target = np.outer(nr_by_type / part.mass_nr, xbar[nr])
        concise = bool(np.max(np.abs(x[:, nr] - target)) <= tol)
    ambiguous = bool(np.all(posts >= eps * p.min() - 1e-15))
    return concise, ambiguous


def nr_stability_check(x, p, eps: float) -> bool:
    """Does the silent map at eps0 leave the NR set invariant, i.e. is
    NR[silent_map(x, p, eps0), eps, p] equal to NR[x, eps0, p]?"""
    e0 = eps0_of(eps)
    x, p = _as_array(x), _as_array(p)
    before = classify_actions(x, p, e0).nr
    after = classify_actions(silent_map(x, p, e0), p, eps).nr
    return before == after


@dataclass(frozen=True)
class ConvexificationWitness:
    """Row-stochastic mixing matrix beta certifying that a transformed action
    is no more informative than the original: posteriors of the new action are
    beta-mixtures of the old ones, marginals are conserved, beta transports
    the marginal onto itself, and posteriors moved by at most ``epsilon`` in
    L1."""

    beta: np.ndarray
    epsilon: float


def make_convexification_witness(x, p, eps: float) -> tuple[np.ndarray, ConvexificationWitness]:
    """Silent-map x at eps0 and build the explicit mixing matrix for it.

    Returns (transformed action, witness with certificate 6 * eps).
    """
    e0 = eps0_of(eps)
    x, p = _as_array(x), _as_array(p)
    part = classify_actions(x, p, e0)
    xbar = p @ x
    n_i = x.shape[1]
    x_new = silent_map(x, p, e0)
    beta = np.zeros((n_i, n_i))
    in_nr = np.zeros(n_i, dtype=bool)
    in_nr[list(part.nr)] = True
    for i in range(n_i):
        if in_nr[i]:
            beta[i] = e0 * xbar
            beta[i, in_nr] += (1.0 - e0) * xbar[in_nr] / part.mass_nr
        else:
            beta[i] = e0 * xbar
            beta[i, i] += 1.0 - e0
    return x_new, ConvexificationWitness(beta=beta, epsilon=6.0 * eps)


def verify_convexification(x, x_new, p, witness: ConvexificationWitness, tol: float = 1e-9) -> list[str]:
    """Check all four certificate properties; returns the violations found."""
    x, x_new, p = _as_array(x), _as_array(x_new), _as_array(p)
    xbar, posts = posterior_table(x, p)
    xbar_new, posts_new = posterior_table(x_new, p)
    bad = []
    if np.any(witness.beta < -tol):
        bad.append("beta has negative entries")
    mix = witness.beta @ posts
    err = np.max(np.abs(posts_new - mix))
    if err > tol:
        bad.append(f"posterior mixing off by {err!r}")
    err = np.max(np.abs(xbar_new - xbar))
    if err > tol:
        bad.append(f"marginal conservation off by {err!r}")
    err = np.max(np.abs(xbar @ witness.beta - xbar))
    if err > tol:
        bad.append(f"marginal transport off by {err!r}")
    l1 = np.abs(posts_new - posts).sum(axis=1)
    if np.any(l1 > witness.epsilon + tol):
        bad.append(f"posterior L1 move {float(l1.max())!r} exceeds {witness.epsilon}")
    return bad


def in_translation_domain(x, p, p_new) -> bool:
    """True iff p_new is strictly positive and every shifted posterior
    coordinate p_new(k) + post(k|i) - p(k) stays nonnegative."""
    x, p, p_new = _as_array(x), _as_array(p), _as_array(p_new)
    if np.any(p_new <= 0.0):
        return False
    _, posts = posterior_table(x, p)
    return bool(np.all(p_new[None, :] + posts - p[None, :] >= 0.0))


def translation_map(x, p, p_new) -> np.ndarray:
    """Re-center x from prior p to prior p_new.

    Inside the admissible domain the output satisfies: marginal under p_new
    equals the marginal of x under p, and posteriors shift exactly by
    p_new - p.  Outside the domain x is returned unchanged (convention).
    """
    x, p, p_new = _as_array(x), _as_array(p), _as_array(p_new)
    if not in_translation_domain(x, p, p_new):
        return x.copy()
    xbar, posts = posterior_table(x, p)
    shifted = p_new[None, :] + posts - p[None, :]  # (i, k)
    return (xbar[:, None] * shifted / p_new[None, :]).T


@dataclass(frozen=True)
class JumpBoundsReport:
    nr_bound: float
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def jump_bounds_check(x, p, eps: float, tol: float = 1e-12) -> JumpBoundsReport:
    """Verify the posterior-jump bounds of a concise action at full-support p.

    NR actions move the belief by at most 2 |1/p|_inf * mass(R) / mass(NR)
    in L1; revealing actions move it by at least eps * min_k p(k).
    """
    x, p = _as_array(x), _as_array(p)
    if np.any(p <= 0.0):
        raise ValueError("p must have full support")
    concise, _ = concise_ambiguous_check(x, p, eps)
    if not concise:
        raise ValueError("x is not eps-concise at p")
    part = classify_actions(x, p, eps)
    _, posts = posterior_table(x, p)
    moves = np.abs(posts - p[None, :]).sum(axis=1)
    bad = []
    nr_bound = np.inf
    if part.nr:
        nr_bound = 2.0 * (1.0 / p.min()) * part.mass_r / part.mass_nr
        for i in part.nr:
            if moves[i] > nr_bound + tol:
                bad.append(f"NR action {i} jumps {moves[i]!r} > bound {nr_bound!r}")
    lower = eps * p.min()
    for i in part.r:
        if moves[i] < lower - tol:
            bad.append(f"revealing action {i} jumps {moves[i]!r} < bound {lower!r}")
    return JumpBoundsReport(nr_bound=float(nr_bound), violations=tuple(bad))
