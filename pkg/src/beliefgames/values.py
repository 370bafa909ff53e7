"""Vertex-game construction and discounted value machinery.

The *vertex game* lives on states (p, q, omega) where p and q range over the
vertex sets of two simplex triangulations: after every stage the Bayes
posteriors are immediately split back onto vertices, so the state space is
finite while the action sets stay the full mixed-action products.  Stage
games over those compact sets are solved on finite barycentric action grids
as matrix games; the discounted value is the fixed point of the resulting
Shapley operator, a (1 - lambda)-contraction on any fixed grid.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .beliefs import posterior_table, stage_payoff
from .games import GameSpec, absorbing_payoff, classify_states
from .triangulation import SimplexTriangulation

GAP_TOL = 1e-9
_LP_OPTS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


class MatrixGameError(RuntimeError):
    pass


class IterationCapExceeded(RuntimeError):
    def __init__(self, residual: float, iterations: int):
        super().__init__(f"value iteration hit the cap at residual {residual!r}")
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class MatrixGameSolution:
    value: float
    row_strategy: np.ndarray
    col_strategy: np.ndarray
    gap: float


def _lp_max_side(M: np.ndarray) -> tuple[float, np.ndarray]:
    """Maximizing player's LP: max v s.t. mu^T M >= v 1, mu a distribution."""
    n, m = M.shape
    c = np.zeros(n + 1)
    c[0] = -1.0
    a_ub = np.hstack([np.ones((m, 1)), -M.T])
    a_eq = np.zeros((1, n + 1))
    a_eq[0, 1:] = 1.0
    bounds = [(None, None)] + [(0, None)] * n
    res = linprog(
        c, A_ub=a_ub, b_ub=np.zeros(m), A_eq=a_eq, b_eq=np.ones(1),
        bounds=bounds, method="highs", options=_LP_OPTS,
    )
    if not res.success:
        raise MatrixGameError(f"matrix game LP failed: {res.message}")
    mu = np.maximum(res.x[1:], 0.0)
    return float(res.x[0]), mu / mu.sum()


def matrix_game_value(matrix, gap_tol: float = GAP_TOL) -> MatrixGameSolution:
    """Value and optimal mixed strategies of a finite zero-sum matrix game.

    The row player maximizes.  Closed forms cover pure saddle points, single
    rows/columns, and 2x2 games; everything else goes through two LPs.  The
    duality gap (best response regret on both sides) is certified <= gap_tol.
    """
    M = np.atleast_2d(np.asarray(matrix, dtype=float))
    n, m = M.shape
    row_min = M.min(axis=1)
    col_max = M.max(axis=0)
    lo, hi = row_min.max(), col_max.min()
    if lo == hi:
        mu = np.zeros(n)
        mu[int(row_min.argmax())] = 1.0
        nu = np.zeros(m)
        nu[int(col_max.argmin())] = 1.0
        return MatrixGameSolution(float(lo), mu, nu, 0.0)
    if n == 1:
        nu = np.zeros(m)
        nu[int(M[0].argmin())] = 1.0
        return MatrixGameSolution(float(M[0].min()), np.ones(1), nu, 0.0)
    if m == 1:
        mu = np.zeros(n)
        mu[int(M[:, 0].argmax())] = 1.0
        return MatrixGameSolution(float(M[:, 0].max()), mu, np.ones(1), 0.0)
    if n == 2 and m == 2:
        a, b = M[0]
        c, d = M[1]
        den = a + d - b - c
        mu = np.array([d - c, a - b]) / den
        nu = np.array([d - b, a - c]) / den
        val = (a * d - b * c) / den
        return MatrixGameSolution(float(val), mu, nu, 0.0)
    v_row, mu = _lp_max_side(M)
    v_col, nu = _lp_max_side(-M.T)
    gap = float(np.max(M @ nu) - np.min(mu @ M))
    if gap > gap_tol:
        raise MatrixGameError(f"duality gap {gap!r} exceeds {gap_tol}")
    return MatrixGameSolution(0.5 * (v_row - v_col), mu, nu, gap)


def matrix_game_value_only(matrix) -> float:
    """Value without the second LP; used inside value-iteration sweeps."""
    M = np.atleast_2d(np.asarray(matrix, dtype=float))
    n, m = M.shape
    lo, hi = M.min(axis=1).max(), M.max(axis=0).min()
    if lo == hi:
        return float(lo)
    if n == 1:
        return float(M.min())
    if m == 1:
        return float(M.max())
    if n == 2 and m == 2:
        a, b = M[0]
        c, d = M[1]
        return float((a * d - b * c) / (a + d - b - c))
    v, _ = _lp_max_side(M)
    return v


def simplex_grid(n_points: int, resolution: int) -> np.ndarray:
    """All distributions over ``n_points`` atoms with denominator ``resolution``."""
    rows = []
    for c in itertools.combinations(range(resolution + n_points - 1), n_points - 1):
        parts = []
        prev = -1
        for pos in c:
            parts.append(pos - prev - 1)
            prev = pos
        parts.append(resolution + n_points - 2 - prev)
        rows.append(parts)
    return np.array(rows, dtype=float) / float(resolution)


@dataclass(frozen=True)
class ActionGrid:
    """Barycentric grid over the mixed-action set: every type plays a point
    of the resolution-m grid on the action simplex.  Contains all pure
    actions; size C(m + n_actions - 1, n_actions - 1) ** n_types."""

    resolution: int
    points: np.ndarray  # (grid size, n_types, n_actions)

    @property
    def size(self) -> int:
        return self.points.shape[0]


def action_grid(n_types: int, n_actions: int, resolution: int) -> ActionGrid:
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    rows = simplex_grid(n_actions, resolution)
    combos = itertools.product(range(rows.shape[0]), repeat=n_types)
    pts = np.array([[rows[r] for r in combo] for combo in combos])
    return ActionGrid(resolution=resolution, points=pts)


class FiniteBeliefGame:
    """The vertex game: finite states (p-vertex, q-vertex, omega), compact
    mixed-action sets, transitions that split posteriors back onto vertices.

    Immutable after construction.  Stage tensors for a given action-grid
    pair are cached per (grid sizes) key; sweeps only read them.
    """

    def __init__(self, spec: GameSpec, tri_k: SimplexTriangulation, tri_l: SimplexTriangulation):
        if tri_k.n_types != spec.n_k or tri_l.n_types != spec.n_l:
            raise ValueError("triangulation dimensions do not match the type sets")
        self.spec = spec
        self.tri_k = tri_k
        self.tri_l = tri_l
        self.absorbing = classify_states(spec)
        self.n_p = tri_k.n_vertices
        self.n_q = tri_l.n_vertices
        self.n_states = self.n_p * self.n_q * spec.n_omega
        self._tensor_cache: dict = {}

    def state_index(self, ip: int, iq: int, iw: int) -> int:
        return (ip * self.n_q + iq) * self.spec.n_omega + iw

    def states(self):
        return itertools.product(range(self.n_p), range(self.n_q), range(self.spec.n_omega))

    def absorbing_values(self) -> np.ndarray:
        """Exact values at absorbing states: bilinear type-average of the
        constant payoff (belief martingales keep its expectation fixed)."""
        out = np.zeros((self.n_p, self.n_q, self.spec.n_omega))
        for iw in self.absorbing.absorbing:
            table = absorbing_payoff(self.spec, iw)
            out[:, :, iw] = self.tri_k.vertices @ table @ self.tri_l.vertices.T
        return out

    def lifted_value(self, values: np.ndarray, p, q, iw: int) -> float:
        """Extend a per-vertex table to any (p, q) by splitting both beliefs."""
        ip_idx, ip_w = self.tri_k.split_batch(np.asarray(p, dtype=float))
        iq_idx, iq_w = self.tri_l.split_batch(np.asarray(q, dtype=float))
        block = values[np.ix_(ip_idx[0], iq_idx[0])][:, :, iw]
        return float(ip_w[0] @ block @ iq_w[0])

    def transition_atoms(self, ip: int, iq: int, iw: int, x, y) -> dict[tuple[int, int, int], float]:
        """Transition law of the vertex game as {(ip', iq', iw'): prob}."""
        spec = self.spec
        p = self.tri_k.vertices[ip]
        q = self.tri_l.vertices[iq]
        xbar, p_post = posterior_table(x, p)
        ybar, q_post = posterior_table(y, q)
        pk_idx, pk_w = self.tri_k.split_batch(p_post)
        ql_idx, ql_w = self.tri_l.split_batch(q_post)
        out: dict[tuple[int, int, int], float] = {}
        for i in range(spec.n_i):
            if xbar[i] == 0.0:
                continue
            for j in range(spec.n_j):
                mass = xbar[i] * ybar[j]
                if mass == 0.0:
                    continue
                row = spec.rho[iw, i, j]
                for w2 in np.flatnonzero(row):
                    for a in range(pk_idx.shape[1]):
                        if pk_w[i, a] == 0.0:
                            continue
                        for b in range(ql_idx.shape[1]):
                            wt = mass * row[w2] * pk_w[i, a] * ql_w[j, b]
                            if wt == 0.0:
                                continue
                            key = (int(pk_idx[i, a]), int(ql_idx[j, b]), int(w2))
                            out[key] = out.get(key, 0.0) + wt
        return out

    def stage_payoff(self, ip: int, iq: int, iw: int, x, y) -> float:
        return stage_payoff(self.spec, self.tri_k.vertices[ip], self.tri_l.vertices[iq], iw, x, y)

    def stage_tensors(self, grid_x: ActionGrid, grid_y: ActionGrid):
        """Per-state pair (payoff matrix, transition tensor) for the grids.

        The transition tensor W maps a flat value vector to the expected
        continuation per grid pair: stage matrix = lam * g + (1-lam) W @ v.
        """
        key = (id(grid_x.points), id(grid_y.points))
        if key in self._tensor_cache:
            return self._tensor_cache[key]
        spec = self.spec
        tensors = {}
        X = grid_x.points
        Y = grid_y.points
        # per-vertex marginals, posteriors and splits are state-independent
        per_p = []
        for ip in range(self.n_p):
            p = self.tri_k.vertices[ip]
            xbar = np.einsum("k,aki->ai", p, X)
            posts = self._grid_posteriors(X, p, xbar)
            sp = self._split_dense(self.tri_k, posts).reshape(grid_x.size, spec.n_i, self.n_p)
            per_p.append((xbar, sp))
        per_q = []
        for iq in range(self.n_q):
            q = self.tri_l.vertices[iq]
            ybar = np.einsum("l,blj->bj", q, Y)
            posts = self._grid_posteriors(Y, q, ybar)
            sq = self._split_dense(self.tri_l, posts).reshape(grid_y.size, spec.n_j, self.n_q)
            per_q.append((ybar, sq))
        for ip, iq, iw in self.states():
            p = self.tri_k.vertices[ip]
            q = self.tri_l.vertices[iq]
            xbar, sp = per_p[ip]
            ybar, sq = per_q[iq]
            gmat = np.einsum(
                "aki,blj,klij->ab", X * p[None, :, None], Y * q[None, :, None], spec.g[:, :, iw]
            )
            W = np.einsum("ai,bj,ijw,aip,bjq->abpqw", xbar, ybar, spec.rho[iw], sp, sq)
            W = W.reshape(grid_x.size * grid_y.size, self.n_states)
            tensors[(ip, iq, iw)] = (gmat, np.ascontiguousarray(W))
        self._tensor_cache[key] = tensors
        return tensors

    @staticmethod
    def _grid_posteriors(points: np.ndarray, p: np.ndarray, marginals: np.ndarray) -> np.ndarray:
        """Posterior beliefs for every grid action and realized pure action."""
        A, nK, nI = points.shape
        with np.errstate(invalid="ignore", divide="ignore"):
            posts = points.transpose(0, 2, 1) * p[None, None, :] / marginals[:, :, None]
        dead = marginals == 0.0
        if np.any(dead):
            posts[dead] = p
        return posts.reshape(A * nI, nK)

    @staticmethod
    def _split_dense(tri: SimplexTriangulation, posts_flat: np.ndarray) -> np.ndarray:
        idx, wts = tri.split_batch(posts_flat)
        B = posts_flat.shape[0]
        dense = np.zeros((B, tri.n_vertices))
        np.add.at(dense, (np.repeat(np.arange(B), idx.shape[1]), idx.ravel()), wts.ravel())
        return dense


def build_vertex_game(spec, tri_k, tri_l) -> FiniteBeliefGame:
    return FiniteBeliefGame(spec, tri_k, tri_l)


@dataclass(frozen=True)
class ValueFunction:
    """Discounted value table on the vertex-game states, plus convergence
    metadata.  values has shape (n_p_vertices, n_q_vertices, n_omega)."""

    values: np.ndarray
    lam: float
    residual: float
    iterations: int
    grid_m: tuple[int, int]

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def shapley_operator(
    game: FiniteBeliefGame,
    values: np.ndarray,
    lam: float,
    grid_x: ActionGrid,
    grid_y: ActionGrid,
    want_strategies: bool = False,
):
    """One application of the grid Shapley operator to a value table.

    Per state the grid x grid stage matrix lam*g + (1-lam)*E[values] is
    built and its matrix-game value assigned.  A (1-lambda)-contraction in
    sup norm for any fixed grid pair.
    """
    tensors = game.stage_tensors(grid_x, grid_y)
    flat = np.asarray(values, dtype=float).reshape(-1)
    out = np.empty_like(values, dtype=float)
    sols = {} if want_strategies else None
    for (ip, iq, iw), (gmat, W) in tensors.items():
        M = lam * gmat + (1.0 - lam) * (W @ flat).reshape(gmat.shape)
        if want_strategies:
            sol = matrix_game_value(M)
            sols[(ip, iq, iw)] = sol
            out[ip, iq, iw] = sol.value
        else:
            out[ip, iq, iw] = matrix_game_value_only(M)
    return (out, sols) if want_strategies else out


def iteration_cap(lam: float, tol: float, g_inf: float) -> int:
    if lam >= 1.0:
        return 10
    target = max(tol * lam / max(2.0 * g_inf, 1e-300), 1e-300)
    return max(10, 10 * math.ceil(math.log(target) / math.log(1.0 - lam)))


def solve_discounted(
    game: FiniteBeliefGame,
    lam: float,
    grid_x: ActionGrid,
    grid_y: ActionGrid,
    tol: float = 1e-3,
) -> ValueFunction:
    """Iterate the grid Shapley operator to sup-norm residual <= tol * lam.

    The standard contraction bound then puts the fixed-point error on the
    grid below tol.  Absorbing states are pinned to their exact bilinear
    values from the start; they are exact fixed points of the operator.
    """
    if not 0 < lam <= 1:
        raise ValueError("discount must lie in (0, 1]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    tensors = game.stage_tensors(grid_x, grid_y)
    values = game.absorbing_values()
    live = [s for s in game.states() if s[2] not in game.absorbing.absorbing]
    cap = iteration_cap(lam, tol, game.spec.g_inf)
    residual = np.inf
    iterations = 0
    flat = values.reshape(-1).copy()
    while residual > tol * lam:
        if iterations >= cap:
            raise IterationCapExceeded(residual, iterations)
        residual = 0.0
        new_flat = flat.copy()
        for (ip, iq, iw) in live:
            gmat, W = tensors[(ip, iq, iw)]
            M = lam * gmat + (1.0 - lam) * (W @ flat).reshape(gmat.shape)
            v = matrix_game_value_only(M)
            s = game.state_index(ip, iq, iw)
            residual = max(residual, abs(v - flat[s]))
            new_flat[s] = v
        flat = new_flat
        iterations += 1
    return ValueFunction(
        values=flat.reshape(values.shape),
        lam=lam,
        residual=float(residual),
        iterations=iterations,
        grid_m=(grid_x.resolution, grid_y.resolution),
    )


def optimal_stage_solutions(
    game: FiniteBeliefGame, vf: ValueFunction, grid_x: ActionGrid, grid_y: ActionGrid
) -> dict[tuple[int, int, int], MatrixGameSolution]:
    """Per-state optimal grid mixes at the solved value table."""
    _, sols = shapley_operator(game, vf.values, vf.lam, grid_x, grid_y, want_strategies=True)
    return sols


@dataclass(frozen=True)
class SplitOptionReport:
    """How much the optional posterior-split branch for player 2 can change a
    stage game when the continuation value is convex in q: pointwise, the
    split branch can only raise player 1's payoff, so adding it never lowers
    the stage value."""

    max_pointwise_drop: float
    value_gap: float


def split_option_stage_check(
    game: FiniteBeliefGame,
    v_func,
    state: tuple[int, int, int],
    grid_x: ActionGrid,
    grid_y: ActionGrid,
    lam: float,
    x=None,
) -> SplitOptionReport:
    """Compare the plain and split continuation branches of one stage game.

    ``v_func(p, q, iw) -> float`` must be convex in q for the comparison to
    be one-sided.  Returns the worst pointwise drop (plain minus split,
    positive means the split branch hurt player 1) and the value gap between
    the stage game with and without the extra branch.
    """
    ip, iq, iw = state
    spec = game.spec
    p = game.tri_k.vertices[ip]
    q = game.tri_l.vertices[iq]
    X = grid_x.points if x is None else np.asarray(x, dtype=float)[None, :, :]
    Y = grid_y.points
    A, B = X.shape[0], Y.shape[0]
    M_plain = np.zeros((A, B))
    M_split = np.zeros((A, B))
    for a in range(A):
        xbar, p_post = posterior_table(X[a], p)
        for b in range(B):
            ybar, q_post = posterior_table(Y[b], q)
            g_ab = stage_payoff(spec, p, q, iw, X[a], Y[b])
            cont_plain = 0.0
            cont_split = 0.0
            for i in range(spec.n_i):
                if xbar[i] == 0.0:
                    continue
                for j in range(spec.n_j):
                    mass = xbar[i] * ybar[j]
                    if mass == 0.0:
                        continue
                    qsplit = game.tri_l.split(q_post[j])
                    for w2 in np.flatnonzero(spec.rho[iw, i, j]):
                        pr = mass * spec.rho[iw, i, j, w2]
                        cont_plain += pr * v_func(p_post[i], q_post[j], int(w2))
                        cont_split += pr * sum(
                            wt * v_func(p_post[i], game.tri_l.vertices[vix], int(w2))
                            for vix, wt in zip(qsplit.indices, qsplit.weights)
                        )
            M_plain[a, b] = lam * g_ab + (1.0 - lam) * cont_plain
            M_split[a, b] = lam * g_ab + (1.0 - lam) * cont_split
    val_plain = matrix_game_value_only(M_plain)
    val_both = matrix_game_value_only(np.hstack([M_plain, M_split]))
    return SplitOptionReport(
        max_pointwise_drop=float(np.max(M_plain - M_split)),
        value_gap=float(val_plain - val_both),
    )


@dataclass(frozen=True)
class DecompositionReport:
    max_payoff_error: float
    max_transition_error: float
    samples: int


def separable_decomposition_check(
    game: FiniteBeliefGame, n_samples: int, rng: np.random.Generator
) -> DecompositionReport:
    """Reconstruct stage payoff and transition through their separable factor
    forms and report the worst deviation from the direct computations.

    Payoff: sum over (k,i), (l,j) of p(k) q(l) g(k,l,w,i,j) * x(i|k) * y(j|l).
    Transition to (p', q', w'): sum over (i, j) of rho(w'|w,i,j) * c_i * d_j
    with c_i = xbar(i) * split weight of p' at the i-posterior and d_j the
    symmetric factor for q'.
    """
    spec = game.spec
    err_g = 0.0
    err_rho = 0.0
    states = list(game.states())
    for _ in range(n_samples):
        ip, iq, iw = states[rng.integers(len(states))]
        x = rng.dirichlet(np.ones(spec.n_i), size=spec.n_k)
        y = rng.dirichlet(np.ones(spec.n_j), size=spec.n_l)
        p = game.tri_k.vertices[ip]
        q = game.tri_l.vertices[iq]
        # separable payoff reconstruction over index sets K x I and L x J
        m_coef = np.einsum("k,l,klij->kilj", p, q, spec.g[:, :, iw]).reshape(
            spec.n_k * spec.n_i, spec.n_l * spec.n_j
        )
        a_vec = x.reshape(-1)
        b_vec = y.reshape(-1)
        g_sep = float(a_vec @ m_coef @ b_vec)
        g_direct = game.stage_payoff(ip, iq, iw, x, y)
        err_g = max(err_g, abs(g_sep - g_direct))
        # separable transition reconstruction
        xbar, p_post = posterior_table(x, p)
        ybar, q_post = posterior_table(y, q)
        pk_idx, pk_w = game.tri_k.split_batch(p_post)
        ql_idx, ql_w = game.tri_l.split_batch(q_post)
        c = np.zeros((spec.n_i, game.n_p))
        d = np.zeros((spec.n_j, game.n_q))
        np.add.at(c, (np.repeat(np.arange(spec.n_i), pk_idx.shape[1]), pk_idx.ravel()),
                  (xbar[:, None] * pk_w).ravel())
        np.add.at(d, (np.repeat(np.arange(spec.n_j), ql_idx.shape[1]), ql_idx.ravel()),
                  (ybar[:, None] * ql_w).ravel())
        rho_sep = np.einsum("ijw,ip,jq->pqw", spec.rho[iw], c, d)
        direct = game.transition_atoms(ip, iq, iw, x, y)
        rho_direct = np.zeros_like(rho_sep)
        for (a, b, w2), pr in direct.items():
            rho_direct[a, b, w2] = pr
        err_rho = max(err_rho, float(np.max(np.abs(rho_sep - rho_direct))))
    return DecompositionReport(
        max_payoff_error=err_g, max_transition_error=err_rho, samples=n_samples
    )


@dataclass(frozen=True)
class FrontierGapReport:
    """Outcome of the near-boundary value comparison: for frontier vertices,
    the vertex-game value must not fall below the exact-game value by more
    than the boundary gap plus (4 eps + stepsize) * |g|_inf."""

    checked: int
    violations: tuple[str, ...]
    boundary_gap: float
    worst_margin: float

    @property
    def ok(self) -> bool:
        return not self.violations


def frontier_gap_check(
    game: FiniteBeliefGame,
    vf: ValueFunction,
    eps: float,
    oracle_fn,
    combined_tol: float,
) -> FrontierGapReport:
    """Check the frontier value bound using an exact-value callable.

    ``oracle_fn(p, q, iw) -> float`` supplies independent values of the
    underlying game.  Requires the safety-augmented action structure (the
    bound is not proven without it); raises otherwise.
    """
    from .games import RESERVED_I, RESERVED_J

    spec = game.spec
    if RESERVED_I not in spec.i_names or RESERVED_J not in spec.j_names:
        raise ValueError("frontier check requires a safety-augmented game")
    alpha = game.tri_k.stepsize
    zero_face = [ip for ip in range(game.n_p) if game.tri_k.vertices[ip].min() == 0.0]
    frontier = [ip for ip in range(game.n_p) if game.tri_k.vertices[ip].min() <= eps]
    boundary_gap = 0.0
    for ip in zero_face:
        for iq in range(game.n_q):
            for iw in range(spec.n_omega):
                exact = oracle_fn(game.tri_k.vertices[ip], game.tri_l.vertices[iq], iw)
                boundary_gap = max(boundary_gap, abs(vf.values[ip, iq, iw] - exact))
    slack = (4.0 * eps + alpha) * spec.g_inf
    violations = []
    worst = np.inf
    checked = 0
    for ip in frontier:
        for iq in range(game.n_q):
            for iw in range(spec.n_omega):
                exact = oracle_fn(game.tri_k.vertices[ip], game.tri_l.vertices[iq], iw)
                margin = vf.values[ip, iq, iw] - (exact - boundary_gap - slack)
                worst = min(worst, margin)
                checked += 1
                if margin < -combined_tol:
                    violations.append(
                        f"vertex {ip} (q {iq}, omega {iw}): margin {margin!r}"
                    )
    return FrontierGapReport(
        checked=checked,
        violations=tuple(violations),
        boundary_gap=float(boundary_gap),
        worst_margin=float(worst) if checked else 0.0,
    )


@dataclass(frozen=True)
class LimitValueTable:
    """Values per discount-ladder point plus a convergence diagnostic: the
    per-state max-minus-min over the last three ladder points.  Nothing is
    proved by the oscillation being small; it is reported, not asserted."""

    lambdas: tuple[float, ...]
    values: np.ndarray  # (len(lambdas), n_p, n_q, n_omega)
    residuals: tuple[float, ...]
    oscillation: np.ndarray

    @property
    def max_oscillation(self) -> float:
        return float(self.oscillation.max())


def limit_value_table(
    game: FiniteBeliefGame,
    grid_x: ActionGrid,
    grid_y: ActionGrid,
    lambdas,
    tol: float = 1e-3,
) -> LimitValueTable:
    lambdas = tuple(float(l) for l in lambdas)
    if any(l2 >= l1 for l1, l2 in zip(lambdas, lambdas[1:])) or not lambdas:
        raise ValueError("discount ladder must be strictly decreasing")
    vals = []
    residuals = []
    for lam in lambdas:
        vf = solve_discounted(game, lam, grid_x, grid_y, tol=tol)
        vals.append(vf.values)
        residuals.append(vf.residual)
    stack = np.stack(vals)
    tail = stack[-3:] if len(lambdas) >= 3 else stack
    osc = tail.max(axis=0) - tail.min(axis=0)
    return LimitValueTable(
        lambdas=lambdas, values=stack, residuals=tuple(residuals), oscillation=osc
    )
