"""Empirical degree statistics of simple graphs.

Provides the degree histogram, the symmetric edge-degree matrix X(d1,d2)
with its diagonal double-count convention (an edge joining two degree-d
vertices adds 2 to X(d,d)), strict-tail cumulative counts, the
tail-correlation surface rho on a geometric integer grid, and the average
neighbor degree profile.  TSV emitters at the bottom are the plot-data
interface used by the CLI.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass

import numpy as np

from .graphs import SimpleGraph

__all__ = [
    "DegreeHistogram",
    "EdgeDegreeMatrix",
    "LogGrid",
    "RhoSurface",
    "NeighborDegreeProfile",
    "TailCounts",
    "TailEdgeCounts",
    "degree_histogram",
    "histogram_from_degrees",
    "edge_degree_matrix",
    "cumulative_degree",
    "cumulative_edges",
    "log_grid",
    "rho_surface",
    "d_nn_profile",
    "write_degrees_tsv",
    "write_edges_tsv",
    "write_dnn_tsv",
]


@dataclass
class DegreeHistogram:
    """Sparse vertex counts by degree; isolated vertices sit in a 0 bucket.

    ``counts`` maps d >= 1 to the number of degree-d vertices;
    ``n_vertices`` includes isolated vertices, so the 0 bucket is
    ``n_vertices - sum(counts.values())``.
    """

    counts: dict
    n_vertices: int

    @property
    def isolated(self) -> int:
        return self.n_vertices - sum(self.counts.values())

    def as_dict(self) -> dict:
        out = {0: self.isolated} if self.isolated else {}
        out.update(sorted(self.counts.items()))
        return out

    def arrays(self):
        """Sorted positive degrees and their counts as int64 arrays."""
        if not self.counts:
            return np.empty(0, np.int64), np.empty(0, np.int64)
        d = np.fromiter(self.counts.keys(), np.int64, len(self.counts))
        c = np.fromiter(self.counts.values(), np.int64, len(self.counts))
        order = np.argsort(d)
        return d[order], c[order]


def degree_histogram(g: SimpleGraph) -> DegreeHistogram:
    deg = g.degrees()
    return histogram_from_degrees(deg)


def histogram_from_degrees(degrees) -> DegreeHistogram:
    """Histogram of an explicit degree sequence (isolated entries allowed)."""
    deg = np.asarray(degrees, dtype=np.int64)
    if deg.size and deg.min() < 0:
        raise ValueError("degrees must be non-negative")
    pos = deg[deg > 0]
    vals, cnts = np.unique(pos, return_counts=True)
    return DegreeHistogram(dict(zip(vals.tolist(), cnts.tolist())), int(deg.size))


@dataclass
class EdgeDegreeMatrix:
    """Sparse symmetric X(d1,d2): edge counts by endpoint-degree pair.

    Stored as ordered-pair cells (both orientations of every off-diagonal
    pair), so ``x`` at a diagonal cell already carries the double count.
    """

    d1: np.ndarray
    d2: np.ndarray
    x: np.ndarray

    def as_dict(self) -> dict:
        return {
            (int(a), int(b)): int(w)
            for a, b, w in zip(self.d1, self.d2, self.x)
        }

    def value(self, d1: int, d2: int) -> int:
        key = (np.int64(d1) << np.int64(32)) | np.int64(d2)
        packed = (self.d1 << np.int64(32)) | self.d2
        i = np.searchsorted(packed, key)
        if i < packed.size and packed[i] == key:
            return int(self.x[i])
        return 0

    def marginals(self):
        """Per-degree row sums: degrees d and sum_d2 X(d, d2)."""
        vals, starts = np.unique(self.d1, return_index=True)
        sums = np.add.reduceat(self.x, starts) if self.x.size else self.x
        return vals, sums

    def unordered_cells(self):
        """(hi, lo, edge_count) per unordered pair; diagonal halved back."""
        keep = self.d1 >= self.d2
        hi = self.d1[keep]
        lo = self.d2[keep]
        w = self.x[keep].copy()
        diag = hi == lo
        w[diag] //= 2
        return hi, lo, w

    @property
    def total_edges(self) -> int:
        return int(self.x.sum()) // 2


def edge_degree_matrix(g: SimpleGraph) -> EdgeDegreeMatrix:
    deg = np.diff(g.indptr).astype(np.int64)
    src_deg = np.repeat(deg, deg)  # degree of the slot's source vertex
    dst_deg = deg[g.indices]
    packed = (src_deg << np.int64(32)) | dst_deg
    keys, counts = np.unique(packed, return_counts=True)
    return EdgeDegreeMatrix(
        d1=(keys >> np.int64(32)),
        d2=(keys & np.int64(0xFFFFFFFF)),
        x=counts.astype(np.int64),
    )


# ---------------------------------------------------------------------------
# cumulative (strict tail) counts

@dataclass
class TailCounts:
    """Evaluator of the strict tail count: at(d) = #vertices of degree > d."""

    degrees: np.ndarray
    suffix: np.ndarray  # suffix[i] = number of vertices with degree >= degrees[i]

    def at(self, d):
        idx = np.searchsorted(self.degrees, np.asarray(d), side="right")
        return self.suffix[idx]

    def as_dict(self) -> dict:
        out = {0: int(self.at(0))}
        for d in self.degrees.tolist():
            out[int(d)] = int(self.at(d))
        return out


def cumulative_degree(h: DegreeHistogram) -> TailCounts:
    d, c = h.arrays()
    suffix = np.zeros(d.size + 1, dtype=np.int64)
    suffix[:-1] = c[::-1].cumsum()[::-1]
    return TailCounts(d, suffix)


@dataclass
class TailEdgeCounts:
    """Evaluator of the edge tail X~: pairs (j1 >= j2) with j1 > max(d1,d2)
    and j2 > min(d1,d2), counted with the matrix's symmetric values."""

    hi: np.ndarray
    lo: np.ndarray
    w: np.ndarray  # diagonal cells carry their doubled value

    def at(self, d1, d2):
        d1 = np.asarray(d1)
        d2 = np.asarray(d2)
        a = np.maximum(d1, d2)
        b = np.minimum(d1, d2)
        mask = (self.hi[..., :] > a[..., None]) & (self.lo[..., :] > b[..., None])
        return (mask * self.w).sum(axis=-1)


def cumulative_edges(x: EdgeDegreeMatrix) -> TailEdgeCounts:
    hi, lo, w = x.unordered_cells()
    w = w.copy()
    w[hi == lo] *= 2  # restore the diagonal convention in tail sums
    return TailEdgeCounts(hi, lo, w)


# ---------------------------------------------------------------------------
# geometric grid and the rho surface

@dataclass
class LogGrid:
    """Deduplicated integer grid floor(alpha^k), k >= 1, capped at d_max."""

    alpha: float
    points: np.ndarray

    def __len__(self):
        return self.points.size

    def __iter__(self):
        return iter(self.points.tolist())


def log_grid(alpha: float, d_max: int) -> LogGrid:
    """Grid values computed by iterated float multiplication, for a
    platform-stable sequence; alpha <= 1 is rejected."""
    if not alpha > 1.0:
        raise ValueError(f"grid ratio alpha must exceed 1, got {alpha!r}")
    if d_max >= 1 and np.log(d_max + 1.0) / np.log(alpha) > 1e7:
        raise ValueError(f"alpha={alpha!r} needs too many grid steps for d_max={d_max}")
    points = []
    x = alpha
    while True:
        v = int(x)
        if v > d_max:
            break
        if not points or v > points[-1]:
            points.append(v)
        nxt = x * alpha
        if nxt == x:
            raise ValueError(f"alpha={alpha!r} too close to 1 to advance the grid")
        x = nxt
    return LogGrid(alpha, np.asarray(points, dtype=np.int64))


@dataclass
class RhoSurface:
    """Tail counts and the tail correlation on grid-point pairs.

    ``cum_deg[i]`` is the vertex tail count above ``grid.points[i]``;
    ``cum_edges`` and ``x_exact`` are dense symmetric K x K arrays; ``rho``
    is NaN where either tail count vanishes (undefined cells are omitted,
    not zero-filled).
    """

    grid: LogGrid
    cum_deg: np.ndarray
    cum_edges: np.ndarray
    rho: np.ndarray
    x_exact: np.ndarray

    def defined(self) -> np.ndarray:
        return ~np.isnan(self.rho)


def _bin_cells(points: np.ndarray, hi, lo, w):
    """Aggregate unordered cells into (K+1)^2 threshold-bin weights.

    Bin index of a value j is the number of grid points strictly below j,
    so the suffix sum over bins > (a, b) realizes the strict-tail
    condition j1 > points[a], j2 > points[b].
    """
    k = points.size
    b1 = np.searchsorted(points, hi, side="left")
    b2 = np.searchsorted(points, lo, side="left")
    h = np.zeros((k + 1, k + 1), dtype=np.int64)
    np.add.at(h, (b1, b2), w)
    return h


def _suffix2d(h: np.ndarray) -> np.ndarray:
    return h[::-1, ::-1].cumsum(axis=0).cumsum(axis=1)[::-1, ::-1]


def _surface_from_h(points, h):
    t = _suffix2d(h)[1:, 1:]
    a = np.arange(points.size)
    return np.where(a[:, None] >= a[None, :], t, t.T)


def rho_surface(h: DegreeHistogram, x: EdgeDegreeMatrix, grid: LogGrid) -> RhoSurface:
    points = grid.points
    tails = cumulative_degree(h)
    cum_deg = tails.at(points)

    hi, lo, w = x.unordered_cells()
    w = w.copy()
    w[hi == lo] *= 2
    cum_edges = _surface_from_h(points, _bin_cells(points, hi, lo, w))

    k = points.size
    x_exact = np.zeros((k, k), dtype=np.int64)
    i1 = np.searchsorted(points, hi)
    i2 = np.searchsorted(points, lo)
    on_grid = (
        (i1 < k) & (i2 < k)
        & (points[np.minimum(i1, k - 1)] == hi)
        & (points[np.minimum(i2, k - 1)] == lo)
    )
    x_exact[i1[on_grid], i2[on_grid]] = w[on_grid]
    x_exact = np.maximum(x_exact, x_exact.T)

    denom = cum_deg[:, None].astype(np.float64) * cum_deg[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.where(denom > 0, cum_edges / denom, np.nan)
    return RhoSurface(grid, cum_deg, cum_edges, rho, x_exact)


# ---------------------------------------------------------------------------
# average neighbor degree

@dataclass
class NeighborDegreeProfile:
    """d_nn(d): mean neighbor degree, defined where degree d has edges."""

    d: np.ndarray
    dnn: np.ndarray

    def as_dict(self) -> dict:
        return {int(a): float(b) for a, b in zip(self.d, self.dnn)}


def d_nn_profile(x: EdgeDegreeMatrix) -> NeighborDegreeProfile:
    if x.x.size == 0:
        return NeighborDegreeProfile(np.empty(0, np.int64), np.empty(0, np.float64))
    vals, starts = np.unique(x.d1, return_index=True)
    num = np.add.reduceat(x.d2 * x.x, starts).astype(np.float64)
    den = np.add.reduceat(x.x, starts).astype(np.float64)
    return NeighborDegreeProfile(vals, num / den)


# ---------------------------------------------------------------------------
# TSV emitters (CLI plot data)

def _open_sink(sink):
    if isinstance(sink, (str, os.PathLike)):
        return open(sink, "w", encoding="ascii"), True
    if isinstance(sink, io.TextIOBase):
        return sink, False
    return io.TextIOWrapper(sink, encoding="ascii", write_through=True), False


def write_degrees_tsv(h: DegreeHistogram, sink) -> None:
    """Rows ``d<TAB>count<TAB>cumulative`` over observed degrees (0 bucket
    included when present); cumulative is the strict tail count."""
    stream, owned = _open_sink(sink)
    tails = cumulative_degree(h)
    try:
        stream.write("d\tcount\tcumulative\n")
        for d, c in h.as_dict().items():
            stream.write(f"{d}\t{c}\t{int(tails.at(d))}\n")
        stream.flush()
    finally:
        if owned:
            stream.close()


def write_edges_tsv(surface: RhoSurface, sink) -> None:
    """Rows ``d1<TAB>d2<TAB>X<TAB>Xcum<TAB>rho`` over grid pairs d1 >= d2
    where rho is defined."""
    stream, owned = _open_sink(sink)
    points = surface.grid.points.tolist()
    try:
        stream.write("d1\td2\tX\tXcum\trho\n")
        for a in range(len(points)):
            for b in range(a + 1):
                r = surface.rho[a, b]
                if np.isnan(r):
                    continue
                stream.write(
                    f"{points[a]}\t{points[b]}\t{int(surface.x_exact[a, b])}\t"
                    f"{int(surface.cum_edges[a, b])}\t{float(r)!r}\n"
                )
        stream.flush()
    finally:
        if owned:
            stream.close()


def write_dnn_tsv(profile: NeighborDegreeProfile, sink) -> None:
    """Rows ``d<TAB>dnn`` over degrees with at least one edge."""
    stream, owned = _open_sink(sink)
    try:
        stream.write("d\tdnn\n")
        for d, v in zip(profile.d.tolist(), profile.dnn.tolist()):
            stream.write(f"{d}\t{v!r}\n")
        stream.flush()
    finally:
        if owned:
            stream.close()
