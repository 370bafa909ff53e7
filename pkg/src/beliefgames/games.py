"""Game data model: validation, state classification, safety augmentation, I/O.

A game is a tuple (K, L, Omega, I, J, rho, g): finite private type sets K and
L for the two players, a finite observed state set Omega, finite action sets
I and J, a transition kernel rho(. | omega, i, j) on Omega, and a payoff
g(k, l, omega, i, j) paid by player 2 to player 1.  A state is *absorbing*
when its payoff is constant in the actions for every type pair and every
action pair loops back to it with probability one.  A game is an *absorbing
game* when exactly one state is non-absorbing.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

ROW_SUM_TOL = 1e-12

# Names reserved by augment_safety; re-augmentation is detected through them.
RESERVED_I = "i*"
RESERVED_J = "j*"
RESERVED_W1 = "w1*"
RESERVED_W2 = "w2*"


class GameFormatError(ValueError):
    """Raised for malformed game documents or invalid construction requests."""


@dataclass(frozen=True)
class GameSpec:
    """Immutable description of a stochastic game with private types.

    rho has shape (n_omega, n_i, n_j, n_omega) and g has shape
    (n_k, n_l, n_omega, n_i, n_j).  Arrays are made read-only at
    construction so instances can be shared freely across workers.
    """

    k_names: tuple[str, ...]
    l_names: tuple[str, ...]
    omega_names: tuple[str, ...]
    i_names: tuple[str, ...]
    j_names: tuple[str, ...]
    rho: np.ndarray
    g: np.ndarray
    g_inf: float = field(default=-1.0)

    def __post_init__(self):
        rho = np.ascontiguousarray(np.asarray(self.rho, dtype=float))
        g = np.ascontiguousarray(np.asarray(self.g, dtype=float))
        rho.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "g", g)
        if self.g_inf < 0:
            object.__setattr__(self, "g_inf", float(np.max(np.abs(g))) if g.size else 0.0)

    @property
    def n_k(self) -> int:
        return len(self.k_names)

    @property
    def n_l(self) -> int:
        return len(self.l_names)

    @property
    def n_omega(self) -> int:
        return len(self.omega_names)

    @property
    def n_i(self) -> int:
        return len(self.i_names)

    @property
    def n_j(self) -> int:
        return len(self.j_names)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GameSpec):
            return NotImplemented
        return (
            self.k_names == other.k_names
            and self.l_names == other.l_names
            and self.omega_names == other.omega_names
            and self.i_names == other.i_names
            and self.j_names == other.j_names
            and np.array_equal(self.rho, other.rho)
            and np.array_equal(self.g, other.g)
        )

    def __hash__(self):
        return hash((self.k_names, self.l_names, self.omega_names, self.i_names, self.j_names))


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __iter__(self):
        return iter(self.violations)


@dataclass(frozen=True)
class AbsorbingInfo:
    """State classification: which states are absorbing, and whether the game
    is an absorbing game (exactly one non-absorbing state, then ``omega0``)."""

    absorbing: tuple[int, ...]
    nonabsorbing: tuple[int, ...]
    is_absorbing_game: bool
    omega0: int | None


def validate_game(spec: GameSpec) -> ValidationReport:
    """Check every GameSpec invariant and list each violation found."""
    bad: list[str] = []
    for name, vals in (
        ("K", spec.k_names),
        ("L", spec.l_names),
        ("Omega", spec.omega_names),
        ("I", spec.i_names),
        ("J", spec.j_names),
    ):
        if len(vals) == 0:
            bad.append(f"empty action set or type/state set: {name}")
        if len(set(vals)) != len(vals):
            bad.append(f"duplicate names in {name}")
    shape_rho = (spec.n_omega, spec.n_i, spec.n_j, spec.n_omega)
    if spec.rho.shape != shape_rho:
        bad.append(f"rho has shape {spec.rho.shape}, expected {shape_rho}")
        return ValidationReport(tuple(bad))
    shape_g = (spec.n_k, spec.n_l, spec.n_omega, spec.n_i, spec.n_j)
    if spec.g.shape != shape_g:
        bad.append(f"g has shape {spec.g.shape}, expected {shape_g}")
        return ValidationReport(tuple(bad))
    if not np.all(np.isfinite(spec.rho)):
        bad.append("rho contains non-finite entries")
    if not np.all(np.isfinite(spec.g)):
        bad.append("g contains non-finite entries")
    if bad:
        return ValidationReport(tuple(bad))
    for w, i, j in itertools.product(range(spec.n_omega), range(spec.n_i), range(spec.n_j)):
        row = spec.rho[w, i, j]
        if np.any(row < 0):
            bad.append(
                f"negative transition probability at (omega={spec.omega_names[w]}, "
                f"i={spec.i_names[i]}, j={spec.j_names[j]})"
            )
        s = float(row.sum())
        if abs(s - 1.0) > ROW_SUM_TOL:
            bad.append(
                f"rho row sums to {s!r} at (omega={spec.omega_names[w]}, "
                f"i={spec.i_names[i]}, j={spec.j_names[j]})"
            )
    g_inf = float(np.max(np.abs(spec.g)))
    if spec.g_inf != g_inf:
        bad.append(f"cached g_inf {spec.g_inf!r} differs from max |g| = {g_inf!r}")
    return ValidationReport(tuple(bad))


def classify_states(spec: GameSpec) -> AbsorbingInfo:
    """Classify each state as absorbing or not, exactly per the definition.

    omega is absorbing iff g(k, l, omega, ., .) is constant in the actions for
    every (k, l) and rho(omega | omega, i, j) = 1 for every (i, j).
    """
    absorbing = []
    nonabsorbing = []
    for w in range(spec.n_omega):
        payoff_const = all(
            np.ptp(spec.g[k, l, w]) == 0.0
            for k in range(spec.n_k)
            for l in range(spec.n_l)
        )
        self_loop = bool(np.all(spec.rho[w, :, :, w] == 1.0))
        if payoff_const and self_loop:
            absorbing.append(w)
        else:
            nonabsorbing.append(w)
    is_abs = len(nonabsorbing) == 1
    return AbsorbingInfo(
        absorbing=tuple(absorbing),
        nonabsorbing=tuple(nonabsorbing),
        is_absorbing_game=is_abs,
        omega0=nonabsorbing[0] if is_abs else None,
    )


def absorbing_payoff(spec: GameSpec, w: int) -> np.ndarray:
    """Constant payoff table g(k, l) of an absorbing state, shape (n_k, n_l)."""
    return spec.g[:, :, w, 0, 0]


def augment_safety(spec: GameSpec) -> GameSpec:
    """Add reserved exit actions i*, j* and two absorbing sink states.

    From every non-absorbing state: (i*, j != j*) moves surely to the sink
    worth -|g|_inf, (i != i*, j*) to the sink worth +|g|_inf, and (i*, j*)
    to a fair coin between the two.  Original transitions, payoffs, and
    absorbing states are untouched.  Payoffs of the new action pairs at
    non-absorbing states are 0; both new actions are dominated there.
    """
    for name, pool in ((RESERVED_I, spec.i_names), (RESERVED_J, spec.j_names),
                       (RESERVED_W1, spec.omega_names), (RESERVED_W2, spec.omega_names)):
        if name in pool:
            raise GameFormatError(f"reserved name {name!r} already present; spec is already augmented")
    info = classify_states(spec)
    g_inf = spec.g_inf
    nw, ni, nj = spec.n_omega + 2, spec.n_i + 1, spec.n_j + 1
    w1, w2 = spec.n_omega, spec.n_omega + 1
    i_star, j_star = spec.n_i, spec.n_j

    rho = np.zeros((nw, ni, nj, nw))
    rho[: spec.n_omega, : spec.n_i, : spec.n_j, : spec.n_omega] = spec.rho
    for w in range(spec.n_omega):
        if w in info.absorbing:
            rho[w, :, :, :] = 0.0
            rho[w, :, :, w] = 1.0
            continue
        rho[w, i_star, :, :] = 0.0
        rho[w, i_star, : spec.n_j, w1] = 1.0
        rho[w, : spec.n_i, j_star, :] = 0.0
        rho[w, : spec.n_i, j_star, w2] = 1.0
        rho[w, i_star, j_star, :] = 0.0
        rho[w, i_star, j_star, w1] = 0.5
        rho[w, i_star, j_star, w2] = 0.5
    rho[w1, :, :, w1] = 1.0
    rho[w2, :, :, w2] = 1.0

    g = np.zeros((spec.n_k, spec.n_l, nw, ni, nj))
    g[:, :, : spec.n_omega, : spec.n_i, : spec.n_j] = spec.g
    for w in info.absorbing:
        g[:, :, w, :, :] = spec.g[:, :, w, 0, 0][:, :, None, None]
    g[:, :, w1, :, :] = -g_inf
    g[:, :, w2, :, :] = g_inf

    return GameSpec(
        k_names=spec.k_names,
        l_names=spec.l_names,
        omega_names=spec.omega_names + (RESERVED_W1, RESERVED_W2),
        i_names=spec.i_names + (RESERVED_I,),
        j_names=spec.j_names + (RESERVED_J,),
        rho=rho,
        g=g,
    )


def _parse_number(v) -> float:
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        try:
            if "/" in v:
                return float(Fraction(v))
            return float(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise GameFormatError(f"cannot parse number {v!r}") from exc
    raise GameFormatError(f"cannot parse number {v!r}")


def spec_from_document(doc: dict) -> GameSpec:
    """Build a validated GameSpec from a parsed game document.

    Omitted rho rows default to a self-loop; omitted g entries default to 0.
    Rows within 1e-12 of stochastic are renormalized; anything worse is
    rejected rather than silently fixed.
    """
    for key in ("K", "L", "Omega", "I", "J"):
        if key not in doc:
            raise GameFormatError(f"game document is missing field {key!r}")
    if "rho" not in doc:
        raise GameFormatError("game document is missing field 'rho'")
    k_names = tuple(str(s) for s in doc["K"])
    l_names = tuple(str(s) for s in doc["L"])
    omega_names = tuple(str(s) for s in doc["Omega"])
    i_names = tuple(str(s) for s in doc["I"])
    j_names = tuple(str(s) for s in doc["J"])
    w_ix = {s: t for t, s in enumerate(omega_names)}
    i_ix = {s: t for t, s in enumerate(i_names)}
    j_ix = {s: t for t, s in enumerate(j_names)}
    k_ix = {s: t for t, s in enumerate(k_names)}
    l_ix = {s: t for t, s in enumerate(l_names)}

    nw, ni, nj = len(omega_names), len(i_names), len(j_names)
    rho = np.zeros((nw, ni, nj, nw))
    for w in range(nw):
        rho[w, :, :, w] = 1.0
    for w_name, by_i in doc.get("rho", {}).items():
        for i_name, by_j in by_i.items():
            for j_name, row in by_j.items():
                try:
                    w, i, j = w_ix[w_name], i_ix[i_name], j_ix[j_name]
                except KeyError as exc:
                    raise GameFormatError(f"unknown name {exc.args[0]!r} in rho") from exc
                vec = np.zeros(nw)
                for w2_name, pr in row.items():
                    if w2_name not in w_ix:
                        raise GameFormatError(f"unknown state {w2_name!r} in rho row")
                    vec[w_ix[w2_name]] = _parse_number(pr)
                s = vec.sum()
                if abs(s - 1.0) > ROW_SUM_TOL or np.any(vec < 0):
                    raise GameFormatError(
                        f"non-stochastic rho row at (omega={w_name}, i={i_name}, j={j_name}): sum={s!r}"
                    )
                # rows within tolerance are stored untouched: silent
                # renormalization would break bit-exact round trips
                rho[w, i, j] = vec

    g = np.zeros((len(k_names), len(l_names), nw, ni, nj))
    for k_name, by_l in doc.get("g", {}).items():
        for l_name, by_w in by_l.items():
            for w_name, by_i in by_w.items():
                for i_name, by_j in by_i.items():
                    for j_name, val in by_j.items():
                        try:
                            g[k_ix[k_name], l_ix[l_name], w_ix[w_name], i_ix[i_name], j_ix[j_name]] = (
                                _parse_number(val)
                            )
                        except KeyError as exc:
                            raise GameFormatError(f"unknown name {exc.args[0]!r} in g") from exc
    spec = GameSpec(k_names, l_names, omega_names, i_names, j_names, rho, g)
    report = validate_game(spec)
    if not report.ok:
        raise GameFormatError("; ".join(report.violations))
    return spec


def spec_to_document(spec: GameSpec) -> dict:
    """Serialize to the nested-map document form (zero payoffs omitted)."""
    rho_doc: dict = {}
    for w in range(spec.n_omega):
        by_i: dict = {}
        for i in range(spec.n_i):
            by_j: dict = {}
            for j in range(spec.n_j):
                row = spec.rho[w, i, j]
                by_j[spec.j_names[j]] = {
                    spec.omega_names[w2]: row[w2] for w2 in range(spec.n_omega) if row[w2] != 0.0
                }
            by_i[spec.i_names[i]] = by_j
        rho_doc[spec.omega_names[w]] = by_i
    g_doc: dict = {}
    for k in range(spec.n_k):
        by_l: dict = {}
        for l in range(spec.n_l):
            by_w: dict = {}
            for w in range(spec.n_omega):
                by_i = {}
                for i in range(spec.n_i):
                    by_j = {
                        spec.j_names[j]: spec.g[k, l, w, i, j]
                        for j in range(spec.n_j)
                        if spec.g[k, l, w, i, j] != 0.0
                    }
                    if by_j:
                        by_i[spec.i_names[i]] = by_j
                if by_i:
                    by_w[spec.omega_names[w]] = by_i
            if by_w:
                by_l[spec.l_names[l]] = by_w
        if by_l:
            g_doc[spec.k_names[k]] = by_l
    return {
        "K": list(spec.k_names),
        "L": list(spec.l_names),
        "Omega": list(spec.omega_names),
        "I": list(spec.i_names),
        "J": list(spec.j_names),
        "rho": rho_doc,
        "g": g_doc,
    }


def load_spec(path: str | Path) -> GameSpec:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GameFormatError(f"malformed game document: {exc}") from exc
    return spec_from_document(doc)


def save_spec(spec: GameSpec, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec_to_document(spec), fh, indent=1, sort_keys=True)
        fh.write("\n")


def big_match() -> GameSpec:
    """The classic 2x2 absorbing game with one play state and two sinks.

    Playing the top row settles the game forever (payoff 1 against the left
    column, 0 against the right); the bottom row keeps playing.  Discounted
    value 1/2 at every discount rate.
    """
    omega = ("play", "won*", "lost*")
    rho = np.zeros((3, 2, 2, 3))
    rho[0, 0, 0, 1] = 1.0  # top/left -> settle at 1
    rho[0, 0, 1, 2] = 1.0  # top/right -> settle at 0
    rho[0, 1, :, 0] = 1.0  # bottom keeps playing
    rho[1, :, :, 1] = 1.0
    rho[2, :, :, 2] = 1.0
    g = np.zeros((1, 1, 3, 2, 2))
    g[0, 0, 0] = [[1.0, 0.0], [0.0, 1.0]]
    g[0, 0, 1] = 1.0
    g[0, 0, 2] = 0.0
    return GameSpec(("k1",), ("l1",), omega, ("T", "B"), ("L", "R"), rho, g)


def random_game(
    rng: np.random.Generator,
    n_k: int = 2,
    n_l: int = 1,
    n_omega: int = 3,
    n_i: int = 2,
    n_j: int = 2,
) -> GameSpec:
    """A dense random valid game with payoffs in [-1, 1]; not absorbing."""
    rho = rng.dirichlet(np.ones(n_omega), size=(n_omega, n_i, n_j))
    g = rng.uniform(-1.0, 1.0, size=(n_k, n_l, n_omega, n_i, n_j))
    return GameSpec(
        tuple(f"k{t+1}" for t in range(n_k)),
        tuple(f"l{t+1}" for t in range(n_l)),
        tuple(f"w{t+1}" for t in range(n_omega)),
        tuple(f"i{t+1}" for t in range(n_i)),
        tuple(f"j{t+1}" for t in range(n_j)),
        rho,
        g,
    )


def random_absorbing_game(
    rng: np.random.Generator,
    n_k: int = 2,
    n_l: int = 1,
    n_absorbing: int = 2,
    n_i: int = 2,
    n_j: int = 2,
    min_absorb: float = 0.6,
) -> GameSpec:
    """A random absorbing game with one play state and fast absorption.

    Every action pair at the play state absorbs with probability at least
    ``min_absorb``, which keeps truncated-horizon solves of the game cheap.
    Payoffs are in [-1, 1]; absorbing payoffs depend on the types only.
    """
    nw = 1 + n_absorbing
    rho = np.zeros((nw, n_i, n_j, nw))
    for i in range(n_i):
        for j in range(n_j):
            stay = rng.uniform(0.0, 1.0 - min_absorb)
            split = rng.dirichlet(np.ones(n_absorbing))
            rho[0, i, j, 0] = stay
            rho[0, i, j, 1:] = (1.0 - stay) * split
    for a in range(1, nw):
        rho[a, :, :, a] = 1.0
    g = np.zeros((n_k, n_l, nw, n_i, n_j))
    g[:, :, 0] = rng.uniform(-1.0, 1.0, size=(n_k, n_l, n_i, n_j))
    for a in range(1, nw):
        g[:, :, a] = rng.uniform(-1.0, 1.0, size=(n_k, n_l))[:, :, None, None]
    spec = GameSpec(
        tuple(f"k{t+1}" for t in range(n_k)),
        tuple(f"l{t+1}" for t in range(n_l)),
        ("play",) + tuple(f"sink{t+1}" for t in range(n_absorbing)),
        tuple(f"i{t+1}" for t in range(n_i)),
        tuple(f"j{t+1}" for t in range(n_j)),
        rho,
        g,
    )
    assert classify_states(spec).is_absorbing_game
    return spec
