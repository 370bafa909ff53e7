"""Independent ground truth at small scale.

Discounted values of the underlying game are computed by truncating the
horizon and solving the resulting finite game exactly: by backward induction
over the observed states when both type sets are singletons (complete
information), and otherwise as a saddle point over behavior strategies via
sequence-form linear programming on the truncated tree.

Truncation exploits absorption: once the state absorbs, the continuation is
a known constant and becomes an exact terminal payoff, so the truncation
error is bounded by tail * sup-probability of remaining non-absorbed, not
by the raw discount tail.  The horizon is chosen to push that bound below
tol / 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .beliefs import check_belief
from .games import GameSpec, absorbing_payoff, classify_states
from .values import matrix_game_value_only

DEFAULT_BUDGET = 2_000_000


class BudgetExceededError(RuntimeError):
    """The truncated tree needed for the requested tolerance does not fit the
    LP budget; ``minimal_tol`` is the best tolerance that would."""

    def __init__(self, requested_tol: float, minimal_tol: float):
        super().__init__(
            f"budget exceeded for tol={requested_tol!r}; minimal admissible tol is {minimal_tol!r}"
        )
        self.minimal_tol = minimal_tol


@dataclass(frozen=True)
class OracleResult:
    value: float
    horizon: int
    error_bound: float
    method: str


def _absorbing_tail_payoff(spec: GameSpec, info) -> np.ndarray:
    """tail[w, i, j, k, l] = sum over absorbing w' of rho(w'|w,i,j) g(k,l,w')."""
    out = np.zeros((spec.n_omega, spec.n_i, spec.n_j, spec.n_k, spec.n_l))
    for a in info.absorbing:
        gab = absorbing_payoff(spec, a)  # (k, l)
        out += spec.rho[:, :, :, a][:, :, :, None, None] * gab[None, None, None, :, :]
    return out


def _max_nonabsorbed_reach(spec: GameSpec, info, omega: int, horizon: int) -> float:
    """Supremum over strategy pairs of P(state still non-absorbed after
    ``horizon`` transitions from ``omega``)."""
    live = np.array([w not in info.absorbing for w in range(spec.n_omega)])
    r = live.astype(float)
    for _ in range(horizon):
        nxt = np.einsum("wijv,v->wij", spec.rho, r * live)
        r = np.where(live, nxt.max(axis=(1, 2)), 0.0)
    return float(r[omega])


def _pick_horizon(spec: GameSpec, info, omega: int, lam: float, tol: float, n_max: int = 100_000):
    """Smallest N with (1-lam)^N * reach(N) * |g|_inf <= tol / 2."""
    if lam >= 1.0:
        return 1, 0.0
    live = np.array([w not in info.absorbing for w in range(spec.n_omega)])
    r = live.astype(float)
    n = 0
    while True:
        bound = (1.0 - lam) ** n * float(r[omega]) * spec.g_inf
        if bound <= tol / 2.0 or n >= n_max:
            return max(n, 1), bound
        nxt = np.einsum("wijv,v->wij", spec.rho, r * live)
        r = np.where(live, nxt.max(axis=(1, 2)), 0.0)
        n += 1


def _stage_weights(lam: float | None, n: int, horizon: int):
    """(stage weight, post-stage tail mass) per stage m = 1..horizon."""
    if lam is not None:
        w = lam * (1.0 - lam) ** np.arange(horizon)
        tail = (1.0 - lam) ** (np.arange(horizon) + 1)
    else:
        w = np.full(horizon, 1.0 / n)
        tail = (n - 1.0 - np.arange(horizon)) / n
    return w, tail


def _backward_induction(spec: GameSpec, info, omega: int, lam: float | None, n: int, horizon: int) -> float:
    """Exact truncated value for complete information (singleton type sets)."""
    gabs = np.array(
        [absorbing_payoff(spec, w)[0, 0] if w in info.absorbing else 0.0 for w in range(spec.n_omega)]
    )
    is_abs = np.array([w in info.absorbing for w in range(spec.n_omega)])
    weights, tails = _stage_weights(lam, n, horizon)
    u_next = np.zeros(spec.n_omega)
    for m in range(horizon, 0, -1):
        cont = np.where(is_abs, tails[m - 1] * gabs, u_next)
        u = np.zeros(spec.n_omega)
        for w in range(spec.n_omega):
            if is_abs[w]:
                continue
            M = weights[m - 1] * spec.g[0, 0, w] + np.einsum("ijv,v->ij", spec.rho[w], cont)
            u[w] = matrix_game_value_only(M)
        u_next = u
    return float(u_next[omega])


def _count_tree(spec: GameSpec, info, omega: int, horizon: int) -> tuple[int, int]:
    """(node count, estimated LP nonzeros) of the truncated tree."""
    live = [w for w in range(spec.n_omega) if w not in info.absorbing]
    total = 0.0
    per_stage = {w: 1.0 if w == omega else 0.0 for w in live}
    for m in range(horizon):
        total += sum(per_stage.values())
        if m == horizon - 1:
            break
        nxt = {w: 0.0 for w in live}
        for w, c in per_stage.items():
            if c == 0:
                continue
            for i in range(spec.n_i):
                for j in range(spec.n_j):
                    for w2 in live:
                        if spec.rho[w, i, j, w2] > 0:
                            nxt[w2] += c
        per_stage = nxt
    nodes = int(total)
    nnz = nodes * (
        spec.n_k * spec.n_l * spec.n_i * spec.n_j
        + spec.n_k * (spec.n_i + 1)
        + spec.n_l * (spec.n_j + 1)
    )
    return nodes, nnz


def _sequence_lp(
    spec: GameSpec,
    info,
    p: np.ndarray,
    q: np.ndarray,
    omega: int,
    lam: float | None,
    n: int,
    horizon: int,
) -> float:
    """Sequence-form LP value of the truncated game from (p, q, omega).

    Realization-plan polytopes for both players over the tree of public
    histories; the saddle point solves max_r1 min_r2 r1' A r2 subject to the
    flow constraints E r1 = e, F r2 = f.
    """
    nk, nl, ni, nj = spec.n_k, spec.n_l, spec.n_i, spec.n_j
    weights, tails = _stage_weights(lam, n, horizon)
    abs_tail = _absorbing_tail_payoff(spec, info)
    live = [w for w in range(spec.n_omega) if w not in info.absorbing]

    # breadth-first tree of non-absorbed public histories
    node_omega = [omega]
    node_chance = [1.0]
    node_stage = [1]
    node_parent = [(-1, -1, -1)]  # (parent node, i, j)
    frontier = [0]
    for m in range(1, horizon):
        nxt = []
        for nd in frontier:
            w = node_omega[nd]
            for i in range(ni):
                for j in range(nj):
                    for w2 in live:
                        pr = spec.rho[w, i, j, w2]
                        if pr > 0:
                            node_omega.append(w2)
                            node_chance.append(node_chance[nd] * pr)
                            node_stage.append(m + 1)
                            node_parent.append((nd, i, j))
                            nxt.append(len(node_omega) - 1)
        frontier = nxt
    n_nodes = len(node_omega)

    def seq1(nd: int, k: int, i: int) -> int:
        return 1 + (nd * nk + k) * ni + i

    def seq2(nd: int, l: int, j: int) -> int:
        return 1 + (nd * nl + l) * nj + j

    s1 = 1 + n_nodes * nk * ni
    s2 = 1 + n_nodes * nl * nj
    ne_rows = 1 + n_nodes * nk
    nf_rows = 1 + n_nodes * nl

    e_r, e_c, e_v = [0], [0], [1.0]
    f_r, f_c, f_v = [0], [0], [1.0]
    for nd in range(n_nodes):
        par, pi, pj = node_parent[nd]
        for k in range(nk):
            row = 1 + nd * nk + k
            parent_seq = 0 if par < 0 else seq1(par, k, pi)
            e_r.append(row)
            e_c.append(parent_seq)
            e_v.append(-1.0)
            for i in range(ni):
                e_r.append(row)
                e_c.append(seq1(nd, k, i))
                e_v.append(1.0)
        for l in range(nl):
            row = 1 + nd * nl + l
            parent_seq = 0 if par < 0 else seq2(par, l, pj)
            f_r.append(row)
            f_c.append(parent_seq)
            f_v.append(-1.0)
            for j in range(nj):
                f_r.append(row)
                f_c.append(seq2(nd, l, j))
                f_v.append(1.0)

    a_r, a_c, a_v = [], [], []
    kl = np.einsum("k,l->kl", p, q)
    for nd in range(n_nodes):
        w = node_omega[nd]
        m = node_stage[nd]
        block = node_chance[nd] * kl[:, :, None, None] * (
            weights[m - 1] * spec.g[:, :, w] + tails[m - 1] * abs_tail[w].transpose(2, 3, 0, 1)
        )  # (k, l, i, j)
        nz = np.nonzero(block)
        for k, l, i, j in zip(*nz):
            a_r.append(seq1(nd, int(k), int(i)))
            a_c.append(seq2(nd, int(l), int(j)))
            a_v.append(float(block[k, l, i, j]))

    A = sp.coo_matrix((a_v, (a_r, a_c)), shape=(s1, s2)).tocsr()
    E = sp.coo_matrix((e_v, (e_r, e_c)), shape=(ne_rows, s1)).tocsr()
    F = sp.coo_matrix((f_v, (f_r, f_c)), shape=(nf_rows, s2)).tocsr()

    # variables: (r1 >= 0, u free); maximize u[0]
    n_vars = s1 + nf_rows
    c = np.zeros(n_vars)
    c[s1] = -1.0
    a_ub = sp.hstack([-A.T, F.T], format="csr")
    a_eq = sp.hstack([E, sp.csr_matrix((ne_rows, nf_rows))], format="csr")
    b_eq = np.zeros(ne_rows)
    b_eq[0] = 1.0
    bounds = [(0, None)] * s1 + [(None, None)] * nf_rows
    res = linprog(
        c, A_ub=a_ub, b_ub=np.zeros(s2), A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs"
    )
    if not res.success:
        raise RuntimeError(f"sequence-form LP failed: {res.message}")
    return float(res.x[s1])


def discounted_value(
    spec: GameSpec,
    p,
    q,
    omega: int,
    lam: float,
    tol: float = 1e-3,
    budget: int = DEFAULT_BUDGET,
    force_lp: bool = False,
) -> OracleResult:
    """Discounted value of the underlying game, exact up to ``tol``.

    Complete-information games go through finite-horizon backward induction
    over the observed states; games with genuine private types go through
    the sequence-form LP, whose size must fit the nonzero budget.
    """
    if not 0 < lam <= 1:
        raise ValueError("discount must lie in (0, 1]")
    p = check_belief(np.atleast_1d(np.asarray(p, dtype=float)))
    q = check_belief(np.atleast_1d(np.asarray(q, dtype=float)))
    if p.shape[0] != spec.n_k or q.shape[0] != spec.n_l:
        raise ValueError("prior dimensions do not match the type sets")
    info = classify_states(spec)
    if omega in info.absorbing:
        val = float(p @ absorbing_payoff(spec, omega) @ q)
        return OracleResult(value=val, horizon=0, error_bound=0.0, method="absorbing")
    horizon, bound = _pick_horizon(spec, info, omega, lam, tol)
    if spec.n_k == 1 and spec.n_l == 1 and not force_lp:
        val = _backward_induction(spec, info, omega, lam, 0, horizon)
        return OracleResult(value=val, horizon=horizon, error_bound=bound + 1e-9, method="backward-induction")
    nodes, nnz = _count_tree(spec, info, omega, horizon)
    if nnz > budget:
        n_fit = horizon
        while n_fit > 1:
            _, test_nnz = _count_tree(spec, info, omega, n_fit)
            if test_nnz <= budget:
                break
            n_fit -= 1
        reach = _max_nonabsorbed_reach(spec, info, omega, n_fit)
        minimal = 2.0 * (1.0 - lam) ** n_fit * reach * spec.g_inf
        raise BudgetExceededError(tol, minimal)
    val = _sequence_lp(spec, info, p, q, omega, lam, 0, horizon)
    return OracleResult(value=val, horizon=horizon, error_bound=bound + 1e-8, method="sequence-lp")


def n_stage_value(
    spec: GameSpec, p, q, omega: int, n: int, budget: int = DEFAULT_BUDGET
) -> OracleResult:
    """Exact value of the n-stage game (time-average payoff)."""
    if n < 1:
        raise ValueError("need at least one stage")
    p = check_belief(np.asarray(p, dtype=float))
    q = check_belief(np.asarray(q, dtype=float))
    info = classify_states(spec)
    if omega in info.absorbing:
        val = float(p @ absorbing_payoff(spec, omega) @ q)
        return OracleResult(value=val, horizon=n, error_bound=0.0, method="absorbing")
    if spec.n_k == 1 and spec.n_l == 1:
        val = _backward_induction(spec, info, omega, None, n, n)
        return OracleResult(value=val, horizon=n, error_bound=1e-9, method="backward-induction")
    nodes, nnz = _count_tree(spec, info, omega, n)
    if nnz > budget:
        raise BudgetExceededError(float("nan"), float("nan"))
    val = _sequence_lp(spec, info, p, q, omega, None, n, n)
    return OracleResult(value=val, horizon=n, error_bound=1e-8, method="sequence-lp")


@dataclass(frozen=True)
class ShapeProbeReport:
    triples: int
    concavity_violations: tuple[str, ...]
    convexity_violations: tuple[str, ...]
    lipschitz_violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not (self.concavity_violations + self.convexity_violations + self.lipschitz_violations)


def value_shape_probe(
    spec: GameSpec,
    lam: float,
    n_triples: int,
    rng: np.random.Generator,
    tol: float = 1e-3,
    budget: int = DEFAULT_BUDGET,
) -> ShapeProbeReport:
    """Sample mixture triples and check concavity in p, convexity in q, and
    the |g|_inf-Lipschitz bound, all up to twice the oracle tolerance."""
    info = classify_states(spec)
    omega = info.nonabsorbing[0] if info.nonabsorbing else 0
    conc, conv, lip = [], [], []

    def val(p, q):
        return discounted_value(spec, p, q, omega, lam, tol=tol, budget=budget).value

    for t in range(n_triples):
        beta = float(rng.uniform(0.1, 0.9))
        q0 = rng.dirichlet(np.ones(spec.n_l))
        if spec.n_k > 1:
            pa = rng.dirichlet(np.ones(spec.n_k))
            pb = rng.dirichlet(np.ones(spec.n_k))
            pm = beta * pa + (1.0 - beta) * pb
            va, vb, vm = val(pa, q0), val(pb, q0), val(pm, q0)
            if vm < beta * va + (1.0 - beta) * vb - 2.0 * tol:
                conc.append(f"triple {t}: {vm!r} < mix {beta * va + (1 - beta) * vb!r}")
            if abs(va - vb) > spec.g_inf * np.abs(pa - pb).sum() + 2.0 * tol:
                lip.append(f"triple {t}: Lipschitz gap {abs(va - vb)!r}")
        if spec.n_l > 1:
            p0 = rng.dirichlet(np.ones(spec.n_k))
            qa = rng.dirichlet(np.ones(spec.n_l))
            qb = rng.dirichlet(np.ones(spec.n_l))
            qm = beta * qa + (1.0 - beta) * qb
            va, vb, vm = val(p0, qa), val(p0, qb), val(p0, qm)
            if vm > beta * va + (1.0 - beta) * vb + 2.0 * tol:
                conv.append(f"triple {t}: {vm!r} > mix")
    return ShapeProbeReport(
        triples=n_triples,
        concavity_violations=tuple(conc),
        convexity_violations=tuple(conv),
        lipschitz_violations=tuple(lip),
    )
