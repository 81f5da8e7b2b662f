"""Sparse attributed-graph benchmark model.

A sample consists of community labels drawn from a prior, an undirected
graph whose edge probabilities are (log n / n) * Q scaled by the
endpoint communities, and a per-vertex attribute drawn from a discrete
channel conditioned on the vertex's community.  Degrees are logarithmic
in n, the regime where exact recovery has a sharp threshold.

Labels and attribute symbols are 0-based everywhere in memory; 1-based
numbering appears only in serialized text output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

__all__ = [
    "ChannelSpec",
    "erased_channel",
    "noisy_channel",
    "exponent_channel",
    "DbmParams",
    "Graph",
    "DbmSample",
    "sample_dbm",
    "split_graph",
    "degree_profile",
    "degree_profile_matrix",
    "save_sample",
    "load_sample",
]


@dataclass(frozen=True)
class ChannelSpec:
    """Attribute channel: column x is the symbol distribution of community x.

    cond_probs has shape (num_symbols, k).  erasure_symbol marks the
    symbol that carries no community information, when one exists.
    """

    cond_probs: np.ndarray
    erasure_symbol: int | None = None

    def __post_init__(self):
        probs = np.asarray(self.cond_probs, dtype=np.float64)
        if probs.ndim != 2 or probs.shape[0] < 1 or probs.shape[1] < 1:
            raise ValueError("cond_probs must be a (num_symbols, k) matrix")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise ValueError("channel probabilities must be finite and nonnegative")
        col_sums = probs.sum(axis=0)
        if np.any(np.abs(col_sums - 1.0) > 1e-12):
            raise ValueError("channel columns must sum to 1 (tolerance 1e-12)")
        if self.erasure_symbol is not None and not (
            0 <= self.erasure_symbol < probs.shape[0]
        ):
            raise ValueError("erasure_symbol out of range")
        probs.setflags(write=False)
        object.__setattr__(self, "cond_probs", probs)

    @property
    def num_symbols(self) -> int:
        return self.cond_probs.shape[0]

    @property
    def num_communities(self) -> int:
        return self.cond_probs.shape[1]


def erased_channel(alpha: float, n: int, k: int = 2) -> ChannelSpec:
    """Community label revealed with probability 1 - n^-alpha, else a
    dedicated erasure symbol (index k)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    eps = float(n) ** (-alpha)
    probs = np.zeros((k + 1, k))
    for x in range(k):
        probs[x, x] = 1.0 - eps
        probs[k, x] = eps
    return ChannelSpec(probs, erasure_symbol=k)


def noisy_channel(alpha: float, n: int, k: int = 2) -> ChannelSpec:
    """Community label flipped to each other label with probability
    n^-alpha; no erasure symbol."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    eps = float(n) ** (-alpha)
    diag = 1.0 - (k - 1) * eps
    if diag < 0:
        raise ValueError("n^-alpha too large for the label alphabet")
    probs = np.full((k, k), eps)
    np.fill_diagonal(probs, diag)
    return ChannelSpec(probs, erasure_symbol=None)


def exponent_channel(
    d_matrix, n: int, erasure_symbol: int | None = None
) -> ChannelSpec:
    """Channel with likelihoods n^-d[u, x] for off-label symbols.

    d_matrix has shape (num_symbols, k) with num_symbols >= k; row u,
    column x gives the decay exponent of P(u | x).  Rows 0..k-1 are the
    label symbols themselves and must have d[x, x] = 0: entry (x, x) is
    replaced by the residual mass 1 - sum of the others.  +inf encodes
    an impossible symbol.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    d = np.asarray(d_matrix, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] < d.shape[1]:
        raise ValueError("d_matrix must have shape (num_symbols >= k, k)")
    if np.any(np.isnan(d)) or np.any(d < 0):
        raise ValueError("decay exponents must be nonnegative (inf allowed)")
    k = d.shape[1]
    if np.any(np.diag(d[:k, :]) != 0):
        raise ValueError("label symbols must have zero exponent for their own community")
    probs = float(n) ** (-d)
    for x in range(k):
        off = probs[:, x].sum() - probs[x, x]
        if off > 1.0:
            raise ValueError("off-label mass exceeds 1; n too small for these exponents")
        probs[x, x] = 1.0 - off
    return ChannelSpec(probs, erasure_symbol=erasure_symbol)


@dataclass(frozen=True)
class DbmParams:
    """Model parameters: size, community prior, rate matrix, channel.

    Edge probability between communities a and b is (log n / n) * q[a, b],
    which must not exceed 1.  clip_edge_probs opts into clamping at 1
    instead, for tiny n where the logarithmic scaling degenerates.
    """

    n: int
    prior: np.ndarray
    q: np.ndarray
    channel: ChannelSpec
    clip_edge_probs: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        prior = np.asarray(self.prior, dtype=np.float64)
        if prior.ndim != 1 or prior.size < 1:
            raise ValueError("prior must be a 1-D vector")
        if np.any(prior <= 0) or abs(float(prior.sum()) - 1.0) > 1e-12:
            raise ValueError("prior entries must be positive and sum to 1")
        q = np.asarray(self.q, dtype=np.float64)
        k = prior.size
        if q.shape != (k, k):
            raise ValueError("q must be a k x k matrix")
        if not np.all(np.isfinite(q)) or np.any(q < 0):
            raise ValueError("q entries must be finite and nonnegative")
        if np.any(np.abs(q - q.T) > 1e-12):
            raise ValueError("q must be symmetric (tolerance 1e-12)")
        if self.channel.num_communities != k:
            raise ValueError("channel community count does not match prior")
        scale = math.log(self.n) / self.n if self.n > 1 else 0.0
        if not self.clip_edge_probs and np.any(q * scale > 1.0):
            raise ValueError(
                "edge probability above 1; reduce q, grow n, or set clip_edge_probs"
            )
        prior.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "q", q)

    @property
    def k(self) -> int:
        return self.prior.size

    def edge_prob_matrix(self) -> np.ndarray:
        scale = math.log(self.n) / self.n if self.n > 1 else 0.0
        return np.minimum(self.q * scale, 1.0)

    def mean_profile_rate(self, s: int) -> np.ndarray:
        """Rate vector of community s's degree profile: prior * q[:, s]."""
        if not 0 <= s < self.k:
            raise ValueError("community index out of range")
        return self.prior * self.q[:, s]

    def mean_profile(self, s: int) -> np.ndarray:
        """Expected degree profile of community s at size n."""
        log_n = math.log(self.n) if self.n > 1 else 0.0
        return self.mean_profile_rate(s) * log_n


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph in compressed adjacency form.

    indices[indptr[v]:indptr[v+1]] lists the neighbors of v in
    increasing order.  Symmetric by construction.
    """

    num_vertices: int
    indptr: np.ndarray
    indices: np.ndarray

    @classmethod
    def from_edges(cls, num_vertices: int, edges) -> "Graph":
        """Build from an array of undirected edges (any endpoint order).

        Rejects self-loops, duplicate edges, and out-of-range endpoints.
        """
        if num_vertices < 0:
            raise ValueError("num_vertices must be nonnegative")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if e.min() < 0 or e.max() >= num_vertices:
                raise ValueError("edge endpoint out of range")
            lo = np.minimum(e[:, 0], e[:, 1])
            hi = np.maximum(e[:, 0], e[:, 1])
            if np.any(lo == hi):
                raise ValueError("self-loops are not allowed")
            order = np.lexsort((hi, lo))
            lo, hi = lo[order], hi[order]
            dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
            if np.any(dup):
                raise ValueError("duplicate edges are not allowed")
            src = np.concatenate([lo, hi])
            dst = np.concatenate([hi, lo])
            order = np.lexsort((dst, src))
            indices = dst[order]
            counts = np.bincount(src, minlength=num_vertices)
        else:
            indices = np.zeros(0, dtype=np.int64)
            counts = np.zeros(num_vertices, dtype=np.int64)
        indptr = np.zeros(num_vertices + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indptr.setflags(write=False)
        indices.setflags(write=False)
        return cls(num_vertices, indptr, indices)

    @property
    def num_edges(self) -> int:
        return self.indices.size // 2

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edge_list(self) -> np.ndarray:
        """Edges as an (m, 2) array with first endpoint smaller,
        lexicographically sorted."""
        src = np.repeat(np.arange(self.num_vertices, dtype=np.int64), self.degrees())
        keep = src < self.indices
        return np.column_stack([src[keep], self.indices[keep]])

    def to_csr(self) -> sp.csr_matrix:
        data = np.ones(self.indices.size, dtype=np.float64)
        return sp.csr_matrix(
            (data, self.indices, self.indptr),
            shape=(self.num_vertices, self.num_vertices),
        )

    def validate(self) -> None:
        """Check structural invariants; raises ValueError on violation."""
        n = self.num_vertices
        if self.indptr.shape != (n + 1,) or self.indptr[0] != 0:
            raise ValueError("malformed indptr")
        if np.any(np.diff(self.indptr) < 0) or self.indptr[-1] != self.indices.size:
            raise ValueError("malformed indptr")
        if self.indices.size and (self.indices.min() < 0 or self.indices.max() >= n):
            raise ValueError("neighbor index out of range")
        seen = set()
        for v in range(n):
            nb = self.neighbors(v)
            if np.any(np.diff(nb) <= 0):
                raise ValueError("neighbor lists must be strictly increasing")
            if np.any(nb == v):
                raise ValueError("self-loop found")
            for u in nb:
                seen.add((v, int(u)))
        for v, u in seen:
            if (u, v) not in seen:
                raise ValueError("adjacency is not symmetric")


@dataclass(frozen=True)
class DbmSample:
    """One draw from the model: graph, true labels, attributes."""

    graph: Graph
    labels: np.ndarray
    attributes: np.ndarray


def _categorical(rng: np.random.Generator, probs: np.ndarray, size: int) -> np.ndarray:
    cum = np.cumsum(probs)
    draws = np.searchsorted(cum, rng.random(size), side="right")
    return np.minimum(draws, probs.size - 1).astype(np.int64)


def _bernoulli_positions(
    rng: np.random.Generator, p: float, total: int
) -> np.ndarray:
    """0-based success positions in a Bernoulli(p) stream of length total.

    Geometric gap sampling: O(expected successes) instead of O(total).
    """
    if total <= 0 or p <= 0.0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(total, dtype=np.int64)
    chunks = []
    pos = -1
    while True:
        expect = (total - pos) * p
        batch = max(int(expect + 10.0 * math.sqrt(expect + 1.0)) + 1, 16)
        steps = pos + np.cumsum(rng.geometric(p, size=batch))
        cut = int(np.searchsorted(steps, total, side="left"))
        if cut < batch:
            chunks.append(steps[:cut])
            break
        chunks.append(steps)
        pos = int(steps[-1])
    return np.concatenate(chunks).astype(np.int64) if chunks else np.zeros(0, np.int64)


def _decode_triangular(t: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Map flat indices to pairs (i, j), i < j < m, in lexicographic order."""
    tf = t.astype(np.float64)
    c = 2.0 * m - 1.0
    i = np.floor((c - np.sqrt(c * c - 8.0 * tf)) / 2.0).astype(np.int64)
    # float sqrt can miss by one in either direction
    def row_start(r):
        return r * (2 * m - r - 1) // 2

    i = np.where(row_start(i + 1) <= t, i + 1, i)
    i = np.where(row_start(i) > t, i - 1, i)
    j = t - row_start(i) + i + 1
    return i, j


def sample_dbm(params: DbmParams, seed) -> DbmSample:
    """Draw one sample. Deterministic given (params, seed).

    Consumption order of the random stream is fixed: labels, then edges
    block by block in lexicographic community-pair order, then
    attributes community by community.
    """
    rng = np.random.default_rng(seed)
    n, k = params.n, params.k
    labels = _categorical(rng, params.prior, n)
    groups = [np.flatnonzero(labels == c) for c in range(k)]
    w = params.edge_prob_matrix()

    edge_parts = []
    for a in range(k):
        for b in range(a, k):
            p = float(w[a, b])
            ga, gb = groups[a], groups[b]
            if a == b:
                m = ga.size
                total = m * (m - 1) // 2
                pos = _bernoulli_positions(rng, p, total)
                if pos.size:
                    i, j = _decode_triangular(pos, m)
                    edge_parts.append(np.column_stack([ga[i], ga[j]]))
            else:
                total = ga.size * gb.size
                pos = _bernoulli_positions(rng, p, total)
                if pos.size:
                    i, j = pos // gb.size, pos % gb.size
                    edge_parts.append(np.column_stack([ga[i], gb[j]]))
    edges = (
        np.concatenate(edge_parts, axis=0)
        if edge_parts
        else np.zeros((0, 2), dtype=np.int64)
    )
    graph = Graph.from_edges(n, edges)

    attributes = np.zeros(n, dtype=np.int64)
    for c in range(k):
        if groups[c].size:
            attributes[groups[c]] = _categorical(
                rng, params.channel.cond_probs[:, c], groups[c].size
            )
    return DbmSample(graph=graph, labels=labels, attributes=attributes)


def split_graph(sample, gamma: float, seed) -> tuple[Graph, Graph]:
    """Randomly split the edge set: each edge lands in the first graph
    with probability gamma, independently.  Returns (g1, g2) on the full
    vertex set; the two edge sets partition the original."""
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie strictly between 0 and 1")
    graph = sample.graph if isinstance(sample, DbmSample) else sample
    rng = np.random.default_rng(seed)
    edges = graph.edge_list()
    mask = rng.random(edges.shape[0]) < gamma
    g1 = Graph.from_edges(graph.num_vertices, edges[mask])
    g2 = Graph.from_edges(graph.num_vertices, edges[~mask])
    return g1, g2


def degree_profile(graph: Graph, labels: np.ndarray, v: int, k: int) -> np.ndarray:
    """Neighbor counts of v per (estimated) community label."""
    return np.bincount(labels[graph.neighbors(v)], minlength=k).astype(np.int64)


def degree_profile_matrix(graph: Graph, labels: np.ndarray, k: int) -> np.ndarray:
    """All degree profiles at once: row v counts v's neighbors in each
    label class.  One sparse matmul."""
    onehot = np.zeros((graph.num_vertices, k), dtype=np.float64)
    onehot[np.arange(graph.num_vertices), labels] = 1.0
    return graph.to_csr() @ onehot


def save_sample(sample: DbmSample, prefix) -> None:
    """Debug serialization: <prefix>.edges.txt with 'u v' per line
    (0-based vertex ids) and <prefix>.vertices.csv with columns
    vertex,label,attribute (label and attribute 1-based)."""
    prefix = Path(prefix)
    edges = sample.graph.edge_list()
    with open(f"{prefix}.edges.txt", "w") as fh:
        for u, v in edges:
            fh.write(f"{u} {v}\n")
    with open(f"{prefix}.vertices.csv", "w") as fh:
        fh.write("vertex,label,attribute\n")
        for v in range(sample.graph.num_vertices):
            fh.write(f"{v},{sample.labels[v] + 1},{sample.attributes[v] + 1}\n")


def load_sample(prefix) -> DbmSample:
    """Inverse of save_sample."""
    prefix = Path(prefix)
    rows = np.loadtxt(
        f"{prefix}.vertices.csv", delimiter=",", skiprows=1, dtype=np.int64, ndmin=2
    )
    n = rows.shape[0]
    edges_path = Path(f"{prefix}.edges.txt")
    text = edges_path.read_text().strip()
    if text:
        edges = np.array(
            [line.split() for line in text.splitlines()], dtype=np.int64
        )
    else:
        edges = np.zeros((0, 2), dtype=np.int64)
    return DbmSample(
        graph=Graph.from_edges(n, edges),
        labels=rows[:, 1] - 1,
        attributes=rows[:, 2] - 1,
    )
