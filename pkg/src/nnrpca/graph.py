"""Sparsity graphs of measurement sets: components, bipartiteness, degrees."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .model import Instance, MeasurementSet, SymmetrizedInstance


@dataclass(frozen=True)
class SparsityGraph:
    """Undirected graph with optional self-loops.

    ``edges`` is a ``(E, 2)`` array with ``u <= v``; ``(v, v)`` is a self-loop.
    When ``bipartite_shape = (m, n)`` every edge joins a vertex ``< m`` to one
    ``>= m``.
    """

    vertex_count: int
    edges: np.ndarray
    bipartite_shape: Optional[Tuple[int, int]] = None

    @property
    def loops(self) -> np.ndarray:
        return self.edges[self.edges[:, 0] == self.edges[:, 1], 0]

    def degrees(self) -> np.ndarray:
        """Vertex degrees, counting a self-loop once."""
        a, b = self.edges[:, 0], self.edges[:, 1]
        deg = np.bincount(a, minlength=self.vertex_count)
        off = a != b
        deg += np.bincount(b[off], minlength=self.vertex_count)
        return deg


@dataclass(frozen=True)
class GraphReport:
    components: List[np.ndarray]
    bipartite: List[bool]
    max_degree: int
    min_degree: int

    @property
    def connected(self) -> bool:
        return len(self.components) == 1

    @property
    def n_bipartite_components(self) -> int:
        return int(sum(self.bipartite))

    @property
    def has_bipartite_component(self) -> bool:
        return any(self.bipartite)

    def rows(self):
        """CSV-ready rows: one per component, then the degree summary."""
        out = [("component", "size", "bipartite")]
        for k, (comp, bip) in enumerate(zip(self.components, self.bipartite)):
            out.append((k, int(comp.size), int(bip)))
        out.append(("max_degree", self.max_degree, ""))
        out.append(("min_degree", self.min_degree, ""))
        out.append(("connected", int(self.connected), ""))
        return out


def graph_from(omega: MeasurementSet) -> SparsityGraph:
    if omega.symmetric:
        edges = np.stack([omega.rows, omega.cols], axis=1)
        return SparsityGraph(omega.shape[0], edges)
    m, n = omega.shape
    edges = np.stack([omega.rows, omega.cols + m], axis=1)
    return SparsityGraph(m + n, edges, (m, n))


def analyze(g: SparsityGraph) -> GraphReport:
    """Components, per-component bipartiteness and degree extremes.

    Bipartiteness uses the bipartite double cover: a component is bipartite
    iff each vertex ``v`` and its copy ``v'`` land in different components of
    the cover.  A self-loop ``(v, v)`` links ``v`` to ``v'`` directly.
    """
    N = g.vertex_count
    a, b = g.edges[:, 0], g.edges[:, 1]
    ones = np.ones(a.size, dtype=np.int8)
    adj = coo_matrix((ones, (a, b)), shape=(N, N))
    n_comp, label = connected_components(adj, directed=False)

    cover_r = np.concatenate([a, a + N])
    cover_c = np.concatenate([b + N, b])
    cover = coo_matrix((np.ones(cover_r.size, dtype=np.int8), (cover_r, cover_c)), shape=(2 * N, 2 * N))
    _, cover_label = connected_components(cover, directed=False)
    split = cover_label[:N] != cover_label[N:]

    order = np.argsort(label, kind="stable")
    bounds = np.searchsorted(label[order], np.arange(n_comp + 1))
    components = [order[bounds[k]:bounds[k + 1]] for k in range(n_comp)]
    bipartite = [bool(split[c[0]]) for c in components]

    deg = g.degrees()
    if deg.size == 0:
        return GraphReport(components, bipartite, 0, 0)
    return GraphReport(components, bipartite, int(deg.max()), int(deg.min()))


def good_bad_subgraphs(inst) -> Tuple[GraphReport, GraphReport]:
    """Reports for the good-measurement graph and the bad-measurement graph.

    Both graphs span every vertex, so a row without good measurements has
    good-degree 0.  Symmetrized instances are analyzed on ``m + n`` vertices.
    """
    if isinstance(inst, SymmetrizedInstance):
        inst = inst.instance
    if not isinstance(inst, Instance):
        raise TypeError("expected an Instance")
    return analyze(graph_from(inst.good)), analyze(graph_from(inst.bad))
