"""Equal-volume simplicial grids on the probability simplex.

The simplex over n = d+1 types is cut into N^d cells of equal volume using
the standard staircase decomposition: map p to the sorted coordinates
z_t = N * (p_{t+1} + ... + p_n), so the simplex becomes the region
{N >= z_1 >= ... >= z_d >= 0}, and triangulate each unit cube by fractional-
part order.  Vertices are the grid points with N*p integral; point location
sorts the fractional parts, which also yields the barycentric weights.

The *splitting* of a point p is the discrete law on the located cell's
vertices with the barycentric coordinates as masses; it conserves the mean
(sum of weight * vertex equals p), which is the identity everything
downstream leans on.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

CLAMP_TOL = 1e-10


@dataclass(frozen=True)
class Splitting:
    """Atoms (vertex index, weight) of the mean-preserving split of a point."""

    indices: tuple[int, ...]
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class FlatnessCertificate:
    """Measured stepsize and the smallest constant making the non-flatness
    inequality (1 - weight) <= (C / stepsize) * |vertex - point| hold on the
    sample; ``violations`` is re-checked against the returned constant."""

    stepsize: float
    c_cert: float
    samples: int
    violations: tuple[str, ...]


class SimplexTriangulation:
    """Equal-volume triangulation of the simplex over ``n_types`` types.

    Immutable after construction; locate/split are pure and can be called
    from concurrent workers.
    """

    def __init__(self, n_types: int, resolution: int):
        if resolution < 1:
            raise ValueError("resolution must be >= 1")
        if n_types < 1:
            raise ValueError("need at least one type")
        self.n_types = int(n_types)
        self.resolution = int(resolution)
        self.dim = n_types - 1
        N, d = self.resolution, self.dim

        combos = itertools.combinations(range(N + d), d)
        verts = []
        for c in combos:
            # stars and bars: composition of N into n_types parts
            parts = []
            prev = -1
            for pos in c:
                parts.append(pos - prev - 1)
                prev = pos
            parts.append(N + d - 1 - prev)
            verts.append(parts)
        self._vertex_grid = np.array(verts, dtype=int)
        self.vertices = self._vertex_grid / float(N)
        self._vertex_index = {tuple(v): t for t, v in enumerate(self._vertex_grid)}
        self.cells = self._enumerate_cells()
        self._cell_index = {cell: t for t, cell in enumerate(self.cells)}
        self.stepsize = self._measure_stepsize()

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def _enumerate_cells(self) -> tuple[tuple[int, ...], ...]:
        """All cells as vertex-index tuples, via base point + insertion order."""
        N, d = self.resolution, self.dim
        if d == 0:
            return ((0,),)
        cells = []
        bases = [
            v
            for v in itertools.product(range(N), repeat=d)
            if all(v[t] >= v[t + 1] for t in range(d - 1))
        ]
        for v in bases:
            for perm in itertools.permutations(range(d)):
                zs = [np.array(v, dtype=int)]
                ok = True
                for t in perm:
                    w = zs[-1].copy()
                    w[t] += 1
                    if any(w[s] < w[s + 1] for s in range(d - 1)) or w[0] > N:
                        ok = False
                        break
                    zs.append(w)
                if ok:
                    cell = tuple(sorted(self._vertex_index[tuple(self._z_to_grid(w))] for w in zs))
                    cells.append(cell)
        cells = sorted(set(cells))
        assert len(cells) == N**d, f"cell enumeration found {len(cells)}, expected {N**d}"
        return tuple(cells)

    def _z_to_grid(self, z: np.ndarray) -> np.ndarray:
        """Integer staircase vector (length d) to integer composition (length d+1)."""
        N = self.resolution
        out = np.empty(self.dim + 1, dtype=int)
        out[0] = N - z[0] if self.dim else N
        for t in range(1, self.dim):
            out[t] = z[t - 1] - z[t]
        if self.dim:
            out[self.dim] = z[self.dim - 1]
        return out

    def _clamp(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if np.any(pts < -CLAMP_TOL) or np.any(np.abs(pts.sum(axis=-1) - 1.0) > CLAMP_TOL):
            raise ValueError("point outside the simplex beyond the clamping tolerance")
        pts = np.maximum(pts, 0.0)
        return pts / pts.sum(axis=-1, keepdims=True)

    def split_batch(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized splitting of a batch of points.

        Returns (indices, weights), each of shape (batch, n_types): for each
        point, the vertices of its cell in insertion order and the matching
        barycentric weights (zeros possible on faces).
        """
        pts = self._clamp(np.atleast_2d(pts))
        B = pts.shape[0]
        N, d, n = self.resolution, self.dim, self.n_types
        if d == 0:
            return np.zeros((B, 1), dtype=int), np.ones((B, 1))
        # staircase coordinates, forced monotone against float drift
        z = N * np.cumsum(pts[:, :0:-1], axis=1)[:, ::-1]
        z = np.minimum.accumulate(np.clip(z, 0.0, N), axis=1)
        v = np.floor(z).astype(int)
        f = z - v
        top = v == N
        v[top] -= 1
        f[top] = 1.0
        # descending fractional parts, ties by coordinate index (stable)
        order = np.argsort(-f, axis=1, kind="stable")
        f_sorted = np.take_along_axis(f, order, axis=1)
        wts = np.empty((B, n))
        wts[:, 0] = 1.0 - f_sorted[:, 0]
        if d > 1:
            wts[:, 1:d] = f_sorted[:, :-1] - f_sorted[:, 1:]
        wts[:, d] = f_sorted[:, -1]
        # walk the insertion chain in composition space
        comp = np.empty((B, n, n), dtype=int)  # (batch, chain position, coordinate)
        base = np.empty((B, n), dtype=int)
        base[:, 0] = N - v[:, 0]
        base[:, 1:d] = v[:, : d - 1] - v[:, 1:d]
        base[:, d] = v[:, d - 1]
        comp[:, 0] = base
        rows = np.arange(B)
        cur = base.copy()
        for t in range(d):
            a = order[:, t]
            # z_a += 1 lowers coordinate a and raises coordinate a+1 of the composition
            cur[rows, a] -= 1
            cur[rows, a + 1] += 1
            comp[:, t + 1] = cur
        flat = comp.reshape(B * n, n)
        idx = np.fromiter(
            (self._vertex_index[tuple(row)] for row in flat), dtype=int, count=B * n
        ).reshape(B, n)
        return idx, wts

    def locate(self, p) -> tuple[int, tuple[int, ...], np.ndarray]:
        """Cell containing p: (cell id, vertex indices, barycentric coords)."""
        idx, wts = self.split_batch(np.asarray(p, dtype=float))
        cell = tuple(sorted(int(t) for t in idx[0]))
        return self._cell_index[cell], tuple(int(t) for t in idx[0]), wts[0]

    def split(self, p) -> Splitting:
        """Mean-preserving split of p onto its cell's vertices (zero atoms dropped)."""
        idx, wts = self.split_batch(np.asarray(p, dtype=float))
        keep = wts[0] > 0.0
        return Splitting(indices=tuple(int(t) for t in idx[0][keep]), weights=wts[0][keep])

    def split_value(self, p, values: np.ndarray) -> float:
        """Splitting-weighted average of per-vertex values at p."""
        idx, wts = self.split_batch(np.asarray(p, dtype=float))
        return float(np.dot(wts[0], values[idx[0]]))

    def _measure_stepsize(self) -> float:
        best = 0.0
        for cell in self.cells:
            pts = self.vertices[list(cell)]
            diff = pts[:, None, :] - pts[None, :, :]
            best = max(best, float(np.sqrt((diff**2).sum(axis=2)).max()))
        return best


def build_triangulation(n_types: int, resolution: int) -> SimplexTriangulation:
    return SimplexTriangulation(n_types, resolution)


def certify_flatness(
    tri: SimplexTriangulation, samples: int, rng: np.random.Generator | None = None
) -> FlatnessCertificate:
    """Empirical non-flatness certificate over Dirichlet-uniform samples.

    For each sampled point and each positive-weight vertex of its cell, the
    constant C must satisfy 1 - weight <= (C / s) * |vertex - point|_2 with s
    the measured stepsize; the smallest such C over the sample is returned.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    if tri.dim == 0:
        return FlatnessCertificate(stepsize=0.0, c_cert=0.0, samples=samples, violations=())
    rng = rng if rng is not None else np.random.default_rng(0)
    pts = rng.dirichlet(np.ones(tri.n_types), size=samples)
    idx, wts = tri.split_batch(pts)
    verts = tri.vertices[idx]  # (samples, n, n)
    dist = np.sqrt(((verts - pts[:, None, :]) ** 2).sum(axis=2))
    pos = wts > 0.0
    ratio = np.zeros_like(wts)
    np.divide((1.0 - wts) * tri.stepsize, dist, out=ratio, where=pos & (dist > 0))
    c_cert = float(ratio[pos].max()) if np.any(pos) else 0.0
    # re-check the certificate it returns
    lhs = 1.0 - wts[pos]
    rhs = (c_cert / tri.stepsize) * dist[pos]
    bad = lhs > rhs * (1.0 + 1e-12) + 1e-15
    violations = tuple(
        f"sample violates certificate by {float(l - r)!r}"
        for l, r in zip(lhs[bad], rhs[bad])
    )
    return FlatnessCertificate(
        stepsize=tri.stepsize, c_cert=c_cert, samples=samples, violations=violations
    )


def vertex_count(n_types: int, resolution: int) -> int:
    d = n_types - 1
    return math.comb(resolution + d, d)


def cell_count(n_types: int, resolution: int) -> int:
    return resolution ** (n_types - 1)
