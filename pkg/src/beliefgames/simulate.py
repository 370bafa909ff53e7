"""Monte Carlo engines for the belief dynamics.

Three simulators:

* ``simulate_revealing`` plays the belief-augmented game under a stationary
  strategy pair and collects the posterior-martingale statistics (stepwise
  increments, L1 variation up to the last exit from the frontier band, L2
  variation).

* ``simulate_coupling`` runs the joint construction that drives the value
  comparison between the continuum game and the vertex game: one belief
  process follows raw Bayes updates, the twin follows the translated action
  and is re-split onto triangulation vertices each stage.  The per-stage
  error increments have zero conditional mean by splitting conservation, so
  the gap between the twins is a martingale whose variance is the sum of
  increment variances; both facts are estimated with standard errors.

* ``paired_value_sim`` lifts a strategy of the vertex game with pure
  opponent moves into the underlying game (the splitting lottery is run
  privately, tilted by the known type) and verifies by paired simulation
  that both discounted payoffs agree.

All randomness flows through numpy Generators seeded from a master seed;
paths are reproducible bit-for-bit given the seed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .beliefs import posterior_table
from .games import GameSpec, classify_states
from .transforms import concise_ambiguous_check, eps0_of, silent_map, translation_map
from .triangulation import SimplexTriangulation, certify_flatness
from .values import ActionGrid, FiniteBeliefGame, ValueFunction, matrix_game_value


class GreedyConciseStrategy:
    """Stationary strategy: solve the grid stage game at the visited state
    with the vertex-game value lifted through splitting as continuation,
    collapse player 1's optimal grid mix to its barycenter, then make it
    concise and ambiguous with the silent mapping at the inner tolerance.

    Evaluations are cached by state; the cache is keyed on exact belief
    bytes so revisits are free and runs stay deterministic.
    """

    def __init__(
        self,
        game: FiniteBeliefGame,
        vf: ValueFunction,
        eps: float,
        grid_x: ActionGrid,
        grid_y: ActionGrid,
    ):
        self.game = game
        self.vf = vf
        self.eps = eps
        self.eps0 = eps0_of(eps)
        self.grid_x = grid_x
        self.grid_y = grid_y
        self._cache: dict = {}

    def raw_action(self, p: np.ndarray, q: np.ndarray, iw: int) -> np.ndarray:
        """Barycenter of the optimal grid mix, before the silent mapping."""
        M = self._stage_matrix(p, q, iw)
        sol = matrix_game_value(M)
        return np.einsum("a,aki->ki", sol.row_strategy, self.grid_x.points)

    def action(self, p: np.ndarray, q: np.ndarray, iw: int) -> np.ndarray:
        key = (p.tobytes(), q.tobytes(), iw)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        x = silent_map(self.raw_action(p, q, iw), p, self.eps0)
        self._cache[key] = x
        return x

    def _stage_matrix(self, p: np.ndarray, q: np.ndarray, iw: int) -> np.ndarray:
        game, spec = self.game, self.game.spec
        lam = self.vf.lam
        X, Y = self.grid_x.points, self.grid_y.points
        A, B = X.shape[0], Y.shape[0]
        xbar = np.einsum("k,aki->ai", p, X)
        ybar = np.einsum("l,blj->bj", q, Y)
        sp = game._split_dense(game.tri_k, game._grid_posteriors(X, p, xbar)).reshape(
            A, spec.n_i, game.n_p
        )
        sq = game._split_dense(game.tri_l, game._grid_posteriors(Y, q, ybar)).reshape(
            B, spec.n_j, game.n_q
        )
        gmat = np.einsum("aki,blj,klij->ab", X * p[None, :, None], Y * q[None, :, None],
                         spec.g[:, :, iw])
        W = np.einsum("ai,bj,ijw,aip,bjq->abpqw", xbar, ybar, spec.rho[iw], sp, sq)
        cont = np.einsum("abpqw,pqw->ab", W, self.vf.values)
        return lam * gmat + (1.0 - lam) * cont


def type_independent_strategy(x_row: np.ndarray, n_types: int):
    """Stationary strategy playing the same action distribution for every type."""
    x = np.tile(np.asarray(x_row, dtype=float), (n_types, 1))

    def strat(p, q, iw):
        return x

    return strat


def uniform_strategy(n_types: int, n_actions: int):
    return type_independent_strategy(np.full(n_actions, 1.0 / n_actions), n_types)


@dataclass(frozen=True)
class MeanWithError:
    mean: float
    se: float

    def within(self, target: float, n_se: float = 3.0) -> bool:
        return abs(self.mean - target) <= n_se * self.se


def _mean_se(samples: np.ndarray) -> MeanWithError:
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    if n == 0:
        return MeanWithError(0.0, 0.0)
    se = float(samples.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return MeanWithError(float(samples.mean()), se)


@dataclass(frozen=True)
class RevealingStats:
    """Belief-martingale statistics from playing the belief-augmented game."""

    n_paths: int
    horizon: int
    variation_l1: MeanWithError          # sum of |dp|_1 up to the last frontier exit
    sum_sq_l2: MeanWithError             # sum of |dp|_2^2 over the whole trace
    increment_mean: np.ndarray           # componentwise mean of dp
    increment_se: np.ndarray
    p_traces: tuple | None = None

    def martingale_ok(self, n_se: float = 3.0) -> bool:
        return bool(np.all(np.abs(self.increment_mean) <= n_se * self.increment_se + 1e-15))


def simulate_revealing(
    spec: GameSpec,
    sigma,
    tau,
    p0,
    q0,
    omega0: int,
    horizon: int,
    n_paths: int,
    seed: int,
    eps: float,
    use_q_split: SimplexTriangulation | None = None,
    keep_traces: bool = False,
) -> RevealingStats:
    """Play the belief-augmented game and measure posterior variation.

    ``sigma`` and ``tau`` are stationary callables (p, q, omega) -> mixed
    action.  When ``use_q_split`` is given, player 2's posterior is re-split
    onto that triangulation's vertices each stage (the optional splitting
    branch); otherwise plain Bayes updates are used on both sides.
    The L1 variation is summed up to T = the last stage at which p stays
    outside the eps-frontier, computed after the fact on the truncated trace.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    rng = np.random.default_rng(seed)
    p0 = np.asarray(p0, dtype=float)
    q0 = np.asarray(q0, dtype=float)
    variations = np.empty(n_paths)
    sumsq = np.empty(n_paths)
    increments: list[np.ndarray] = []
    traces = [] if keep_traces else None
    for path in range(n_paths):
        p, q, w = p0.copy(), q0.copy(), omega0
        ps = [p.copy()]
        for m in range(horizon):
            x = sigma(p, q, w)
            y = tau(p, q, w)
            xbar, p_post = posterior_table(x, p)
            ybar, q_post = posterior_table(y, q)
            i = int(rng.choice(spec.n_i, p=xbar))
            j = int(rng.choice(spec.n_j, p=ybar))
            w = int(rng.choice(spec.n_omega, p=spec.rho[w, i, j]))
            p = p_post[i]
            q_new = q_post[j]
            if use_q_split is not None:
                s = use_q_split.split(q_new)
                pick = int(rng.choice(len(s.indices), p=s.weights / s.weights.sum()))
                q_new = use_q_split.vertices[s.indices[pick]]
            q = q_new
            ps.append(p.copy())
        ps = np.array(ps)
        dps = np.diff(ps, axis=0)
        outside = np.flatnonzero(ps[:-1].min(axis=1) > eps)
        t_last = outside[-1] + 1 if outside.size else 0
        variations[path] = np.abs(dps[:t_last]).sum()
        sumsq[path] = (dps**2).sum()
        increments.append(dps)
        if keep_traces:
            traces.append(ps)
    inc = np.concatenate(increments, axis=0)
    n = inc.shape[0]
    return RevealingStats(
        n_paths=n_paths,
        horizon=horizon,
        variation_l1=_mean_se(variations),
        sum_sq_l2=_mean_se(sumsq),
        increment_mean=inc.mean(axis=0),
        increment_se=inc.std(axis=0, ddof=1) / np.sqrt(n),
        p_traces=tuple(traces) if keep_traces else None,
    )


@dataclass(frozen=True)
class CoupledTrace:
    """One realization of the coupled construction.

    Stage-indexed arrays (length = stages actually run); ``t0`` is the stage
    at which the admissibility conditions first failed (None if never).
    ``z`` holds the per-stage vertex-side error increments, zero from t0 on.
    """

    p: np.ndarray        # (T+1, nK) raw Bayes belief
    p_vertex: np.ndarray # (T+1, nK) vertex-side belief
    q_vertex: np.ndarray # (T+1, nL)
    omega: np.ndarray    # (T+1,)
    actions: np.ndarray  # (T, 2) realized (i, j)
    z: np.ndarray        # (T, nK)
    dp_l1: np.ndarray    # (T,)
    t0: int | None


@dataclass(frozen=True)
class CouplingStats:
    n_paths: int
    horizon: int
    sup_mean_gap_l1: float               # sup over t of mean |P'_(t^T0) - P_(t^T0)|_1
    stopped_gap_l1: MeanWithError        # 1_{T0 finite} |P'_T0 - P_T0|_1
    p_escape_outside_band: float         # P(T0 finite, P'_T0 outside the 2 eps frontier)
    variation_l1: MeanWithError          # sum |dP|_1 up to last frontier exit
    z_mean: np.ndarray
    z_se: np.ndarray
    gap_sq: MeanWithError                # |P'_(h^T0) - P_(h^T0)|_2^2 at the cap
    sum_z_sq: MeanWithError              # sum |Z_m|_2^2
    alpha_required: float
    alpha_satisfied: bool
    stepsize: float

    def zero_mean_ok(self, n_se: float = 3.0) -> bool:
        return bool(np.all(np.abs(self.z_mean) <= n_se * self.z_se + 1e-15))

    def variance_identity_ok(self, n_se: float = 3.0) -> bool:
        diff = self.gap_sq.mean - self.sum_z_sq.mean
        se = np.hypot(self.gap_sq.se, self.sum_z_sq.se)
        return abs(diff) <= n_se * se + 1e-15


def coupling_raw(
    spec: GameSpec,
    tri_k: SimplexTriangulation,
    tri_l: SimplexTriangulation,
    sigma,
    tau_f,
    p0,
    q0,
    omega0: int,
    eps: float,
    horizon: int,
    n_paths: int,
    seed,
    keep_traces: bool = False,
) -> dict:
    """Run coupled paths and return mergeable per-path accumulators.

    ``seed`` may be an int or a tuple of ints; path generators are spawned
    from it, so chunked runs with distinct seeds merge deterministically.
    """
    p0 = np.asarray(p0, dtype=float)
    q0 = np.asarray(q0, dtype=float)
    if not any(np.array_equal(p0, v) for v in tri_k.vertices):
        raise ValueError("initial p must be a vertex of the type-K triangulation")
    if not any(np.array_equal(q0, v) for v in tri_l.vertices):
        raise ValueError("initial q must be a vertex of the type-L triangulation")
    if horizon <= 0 or n_paths <= 0:
        raise ValueError("horizon and path count must be positive")
    path_seeds = np.random.SeedSequence(seed).spawn(n_paths)
    gap_stage_sum = np.zeros(horizon + 1)
    stopped_gap = np.zeros(n_paths)
    stopped_mask = np.zeros(n_paths, dtype=bool)
    escape = np.zeros(n_paths, dtype=bool)
    variation = np.zeros(n_paths)
    gap_sq = np.zeros(n_paths)
    sum_z_sq = np.zeros(n_paths)
    z_sum = np.zeros(spec.n_k)
    z_sumsq = np.zeros(spec.n_k)
    z_count = 0
    traces: list[CoupledTrace] = []

    for path in range(n_paths):
        rng = np.random.default_rng(path_seeds[path])
        p = p0.copy()
        pv = p0.copy()
        qv = q0.copy()
        w = omega0
        t0: int | None = None
        ps = [p.copy()]
        pvs = [pv.copy()]
        qvs = [qv.copy()]
        ws = [w]
        acts = []
        zs = []
        for m in range(1, horizon + 1):
            y = tau_f(pv, qv, w)
            x = sigma(p, qv, w)
            xbar, p_post = posterior_table(x, p)
            alive = t0 is None
            if alive:
                shifted_ok = bool(np.all(pv[None, :] + p_post - p[None, :] >= 0.0))
                if not (shifted_ok and p.min() >= eps and pv.min() > 0.0):
                    t0 = m
                    alive = False
            x_v = translation_map(x, p, pv)
            ybar, q_post = posterior_table(y, qv)
            i = int(rng.choice(spec.n_i, p=xbar))
            j = int(rng.choice(spec.n_j, p=ybar))
            w_next = int(rng.choice(spec.n_omega, p=spec.rho[w, i, j]))
            p_next = p_post[i]
            _, pv_post_table = posterior_table(x_v, pv)
            pv_target = pv_post_table[i]
            s_p = tri_k.split(pv_target)
            pick = int(rng.choice(len(s_p.indices), p=s_p.weights / s_p.weights.sum()))
            pv_next = tri_k.vertices[s_p.indices[pick]].copy()
            s_q = tri_l.split(q_post[j])
            pick_q = int(rng.choice(len(s_q.indices), p=s_q.weights / s_q.weights.sum()))
            qv_next = tri_l.vertices[s_q.indices[pick_q]].copy()
            z = (pv_next - pv_target) if alive else np.zeros_like(p)
            zs.append(z)
            acts.append((i, j))
            ps.append(p_next.copy())
            pvs.append(pv_next.copy())
            qvs.append(qv_next.copy())
            ws.append(w_next)
            p, pv, qv, w = p_next, pv_next, qv_next, w_next
        ps_a = np.array(ps)
        pvs_a = np.array(pvs)
        zs_a = np.array(zs)
        cut = horizon if t0 is None else t0 - 1
        gaps = np.abs(pvs_a - ps_a).sum(axis=1)
        stopped = np.minimum(np.arange(horizon + 1), cut)
        gap_stage_sum += gaps[stopped]
        if t0 is not None:
            stopped_mask[path] = True
            stopped_gap[path] = gaps[t0 - 1]
            escape[path] = pvs_a[t0 - 1].min() > 2.0 * eps
        dps = np.diff(ps_a, axis=0)
        outside = np.flatnonzero(ps_a[:-1].min(axis=1) > eps)
        t_last = outside[-1] + 1 if outside.size else 0
        variation[path] = np.abs(dps[:t_last]).sum()
        live_gap = pvs_a[cut] - ps_a[cut]
        gap_sq[path] = float((live_gap**2).sum())
        sum_z_sq[path] = float((zs_a**2).sum())
        live_z = zs_a[:cut]
        if live_z.size:
            z_sum += live_z.sum(axis=0)
            z_sumsq += (live_z**2).sum(axis=0)
            z_count += live_z.shape[0]
        # pathwise telescoping sanity: the stopped gap equals the summed increments
        resid = np.abs(live_gap - zs_a.sum(axis=0)).max()
        if resid > 1e-10:
            raise AssertionError(f"telescoping identity violated by {resid!r}")
        if keep_traces:
            traces.append(
                CoupledTrace(
                    p=ps_a,
                    p_vertex=pvs_a,
                    q_vertex=np.array(qvs),
                    omega=np.array(ws),
                    actions=np.array(acts, dtype=int).reshape(-1, 2),
                    z=zs_a,
                    dp_l1=np.abs(dps).sum(axis=1),
                    t0=t0,
                )
            )
    return {
        "n_paths": n_paths,
        "horizon": horizon,
        "gap_stage_sum": gap_stage_sum,
        "stopped_gap": stopped_gap,
        "stopped_mask": stopped_mask,
        "escape": escape,
        "variation": variation,
        "gap_sq": gap_sq,
        "sum_z_sq": sum_z_sq,
        "z_sum": z_sum,
        "z_sumsq": z_sumsq,
        "z_count": z_count,
        "traces": tuple(traces),
    }


def merge_coupling_raw(chunks: list[dict]) -> dict:
    """Concatenate per-path accumulators; associative and order-fixed."""
    out = dict(chunks[0])
    out["traces"] = tuple(t for c in chunks for t in c["traces"])
    for c in chunks[1:]:
        if c["horizon"] != out["horizon"]:
            raise ValueError("cannot merge runs with different horizons")
        out["n_paths"] += c["n_paths"]
        out["gap_stage_sum"] = out["gap_stage_sum"] + c["gap_stage_sum"]
        for key in ("stopped_gap", "stopped_mask", "escape", "variation", "gap_sq", "sum_z_sq"):
            out[key] = np.concatenate([out[key], c[key]])
        out["z_sum"] = out["z_sum"] + c["z_sum"]
        out["z_sumsq"] = out["z_sumsq"] + c["z_sumsq"]
        out["z_count"] += c["z_count"]
    return out


def coupling_stats_from_raw(
    raw: dict, spec: GameSpec, tri_k: SimplexTriangulation, eps: float, c_cert: float
) -> CouplingStats:
    n = raw["n_paths"]
    alpha_required = eps**11 / 12.0 * (c_cert + 1.0) ** -1 * spec.n_k**-2
    zc = raw["z_count"]
    if zc > 1:
        z_mean = raw["z_sum"] / zc
        z_var = np.maximum(raw["z_sumsq"] / zc - z_mean**2, 0.0) * zc / (zc - 1)
        z_se = np.sqrt(z_var / zc)
    else:
        z_mean = np.zeros(spec.n_k)
        z_se = np.zeros(spec.n_k)
    return CouplingStats(
        n_paths=n,
        horizon=raw["horizon"],
        sup_mean_gap_l1=float((raw["gap_stage_sum"] / n).max()),
        stopped_gap_l1=_mean_se(np.where(raw["stopped_mask"], raw["stopped_gap"], 0.0)),
        p_escape_outside_band=float((raw["stopped_mask"] & raw["escape"]).mean()),
        variation_l1=_mean_se(raw["variation"]),
        z_mean=z_mean,
        z_se=z_se,
        gap_sq=_mean_se(raw["gap_sq"]),
        sum_z_sq=_mean_se(raw["sum_z_sq"]),
        alpha_required=float(alpha_required),
        alpha_satisfied=bool(tri_k.stepsize <= alpha_required),
        stepsize=tri_k.stepsize,
    )


def simulate_coupling(
    spec: GameSpec,
    tri_k: SimplexTriangulation,
    tri_l: SimplexTriangulation,
    sigma,
    tau_f,
    p0,
    q0,
    omega0: int,
    eps: float,
    horizon: int,
    n_paths: int,
    seed,
    c_cert: float | None = None,
    keep_traces: bool = False,
) -> CouplingStats | tuple[CouplingStats, tuple[CoupledTrace, ...]]:
    """Run the coupled belief processes and estimate their closeness.

    Per stage, in this order: player 2's vertex-side action from ``tau_f``,
    player 1's action from ``sigma`` at the raw state, the translated action
    for the vertex side, the realized pure actions (independent given the
    history, drawn from the raw-side marginals), the state transition, the
    raw Bayes updates, and finally the two independent splitting draws onto
    vertices.  The admissibility stopping time checks, at each stage, that
    the translation is valid (all shifted posterior coordinates nonnegative,
    vertex belief strictly positive) and that the raw belief stays out of
    the eps-frontier; increments freeze once it fails.

    ``p0`` must be a vertex of ``tri_k`` (both processes start there).  The
    theoretical stepsize gate for the chosen eps is reported and warned
    about when unmet, never enforced: it is astronomically small for any
    usable eps because the constants in it are not optimized.
    """
    if c_cert is None:
        c_cert = certify_flatness(tri_k, 2000, np.random.default_rng(0)).c_cert
    alpha_required = eps**11 / 12.0 * (c_cert + 1.0) ** -1 * spec.n_k**-2
    if tri_k.stepsize > alpha_required:
        warnings.warn(
            f"triangulation stepsize {tri_k.stepsize!r} exceeds the theoretical gate "
            f"{alpha_required!r}; estimates remain valid, the proof's constants do not",
            stacklevel=2,
        )
    raw = coupling_raw(
        spec, tri_k, tri_l, sigma, tau_f, p0, q0, omega0, eps, horizon, n_paths, seed,
        keep_traces=keep_traces,
    )
    stats = coupling_stats_from_raw(raw, spec, tri_k, eps, c_cert)
    if keep_traces:
        return stats, raw["traces"]
    return stats


class LiftedStrategy:
    """Play a vertex-game strategy inside the underlying game, one path at a
    time: the splitting lottery runs privately, tilted by the known type so
    the internal vertex belief stays the correct posterior.

    ``sigma_phi(ip, iw, rng) -> x`` samples the vertex-game mixed action at
    (vertex index, state).  The caller supplies the realized type, asks for
    this stage's action distribution, and reports the observed outcome.
    """

    def __init__(self, spec: GameSpec, tri_k: SimplexTriangulation, sigma_phi, ip0: int, rng):
        self.spec = spec
        self.tri_k = tri_k
        self.sigma_phi = sigma_phi
        self.ip = ip0
        self.rng = rng
        self._x = None

    @property
    def vertex_belief(self) -> np.ndarray:
        return self.tri_k.vertices[self.ip]

    def action_distribution(self, k: int, iw: int) -> np.ndarray:
        self._x = self.sigma_phi(self.ip, iw, self.rng)
        return self._x[k]

    def observe(self, k: int, i: int) -> None:
        p = self.tri_k.vertices[self.ip]
        xbar, posts = posterior_table(self._x, p)
        target = posts[i]
        s = self.tri_k.split(target)
        tilt = np.array([self.tri_k.vertices[ix][k] for ix in s.indices]) * s.weights
        total = tilt.sum()
        if total <= 0:
            raise AssertionError("splitting lottery lost the realized type")
        pick = int(self.rng.choice(len(s.indices), p=tilt / total))
        self.ip = int(s.indices[pick])
        self._x = None


@dataclass(frozen=True)
class PairedPayoffStats:
    """Paired discounted payoffs: the lifted strategy in the underlying game
    against the same opponent moves as the vertex-game run."""

    n_paths: int
    horizon: int
    payoff_game: MeanWithError
    payoff_vertex: MeanWithError
    paired_diff: MeanWithError

    def agree(self, n_se: float = 3.0) -> bool:
        return self.paired_diff.within(0.0, n_se)


def paired_value_sim(
    spec: GameSpec,
    tri_k: SimplexTriangulation,
    sigma_phi,
    tau,
    p0,
    omega0: int,
    lam: float,
    n_paths: int,
    seed: int,
    horizon: int | None = None,
    tail_tol: float = 1e-4,
) -> PairedPayoffStats:
    """Simulate the lifted strategy and its vertex-game twin on one space.

    One-sided information only (singleton L).  ``tau(public_history, iw,
    rng) -> j`` is player 2's behavior strategy on the underlying game's
    public histories.  Per path: draw the type from p0, then at each stage
    sample the vertex-game action, play its type-conditional row, observe
    (i, j, next state), and run the tilted splitting lottery.  Discounted
    payoffs are accumulated on both coordinates; their means must agree.
    """
    if spec.n_l != 1:
        raise ValueError("strategy lifting needs one-sided information")
    p0 = np.asarray(p0, dtype=float)
    matches = [t for t, v in enumerate(tri_k.vertices) if np.array_equal(p0, v)]
    if not matches:
        raise ValueError("initial p must be a vertex of the triangulation")
    ip0 = matches[0]
    if horizon is None:
        horizon = max(1, int(np.ceil(np.log(tail_tol) / np.log(1.0 - lam)))) if lam < 1 else 1
    master = np.random.SeedSequence(seed)
    seeds = master.spawn(n_paths)
    pay_g = np.empty(n_paths)
    pay_f = np.empty(n_paths)
    for path in range(n_paths):
        rng = np.random.default_rng(seeds[path])
        k = int(rng.choice(spec.n_k, p=p0))
        lifted = LiftedStrategy(spec, tri_k, sigma_phi, ip0, rng)
        w = omega0
        hist: list[tuple[int, int, int]] = []
        total_g = 0.0
        total_f = 0.0
        disc = lam
        for m in range(horizon):
            row = lifted.action_distribution(k, w)
            x_full = lifted._x
            pv = lifted.vertex_belief
            i = int(rng.choice(spec.n_i, p=row))
            j = int(tau(hist, w, rng))
            total_g += disc * spec.g[k, 0, w, i, j]
            total_f += disc * float(np.einsum("k,ki,ki->", pv, x_full, spec.g[:, 0, w, :, j]))
            lifted.observe(k, i)
            w_next = int(rng.choice(spec.n_omega, p=spec.rho[w, i, j]))
            hist.append((i, j, w_next))
            w = w_next
            disc *= 1.0 - lam
        pay_g[path] = total_g
        pay_f[path] = total_f
    diff = pay_g - pay_f
    return PairedPayoffStats(
        n_paths=n_paths,
        horizon=horizon,
        payoff_game=_mean_se(pay_g),
        payoff_vertex=_mean_se(pay_f),
        paired_diff=_mean_se(diff),
    )
