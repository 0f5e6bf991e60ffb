"""Growing graph with incremental edge and triangle bookkeeping.

Node ids are dense integers assigned in insertion order; nodes are never
removed. Triangle counts are maintained on the undirected projection, so
they stay O(degree) per mutation instead of requiring a full recount.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConnectivityUnreachable,
    EmptyGraph,
    MissingEdge,
    SampleTooLarge,
    UnknownNode,
)


@dataclass(frozen=True)
class NodeSample:
    """A without-replacement subset of node ids."""

    node_ids: frozenset
    size: int


class Graph:
    """Mutable growing graph, undirected or directed.

    The undirected projection is always maintained (``_adj``) together
    with a running triangle count. Directed graphs additionally keep
    in/out neighbor sets; edges never duplicate in the projection and
    self-loops are rejected.
    """

    def __init__(self, directed=False):
        self.directed = bool(directed)
        self._adj = []          # undirected projection neighbor sets
        self._out = [] if directed else None
        self._in = [] if directed else None
        self._edge_count = 0    # projection edges
        self._arc_count = 0     # directed edges (directed graphs only)
        self._triangle_count = 0

    @property
    def node_count(self):
        return len(self._adj)

    @property
    def edge_count(self):
        return self._edge_count

    @property
    def arc_count(self):
        return self._arc_count

    @property
    def triangle_count(self):
        return self._triangle_count

    def _check_node(self, u):
        if not 0 <= u < len(self._adj):
            raise UnknownNode(u)

    def add_node(self):
        self._adj.append(set())
        if self.directed:
            self._out.append(set())
            self._in.append(set())
        return len(self._adj) - 1

    def add_node_with_edges(self, neighbors):
        """Add a node connected to ``neighbors``; returns the new id.

        The triangle count increases by the number of projection edges
        among the neighbors (each such edge closes one new triangle).
        """
        nbrs = list(neighbors)
        if len(set(nbrs)) != len(nbrs):
            raise ValueError("duplicate neighbor ids")
        for w in nbrs:
            self._check_node(w)
        u = self.add_node()
        nbset = set(nbrs)
        closed = 0
        for w in nbrs:
            closed += len(self._adj[w] & nbset)
        self._triangle_count += closed // 2
        for w in nbrs:
            self._adj[u].add(w)
            self._adj[w].add(u)
            if self.directed:
                self._out[u].add(w)
                self._in[w].add(u)
                self._arc_count += 1
        self._edge_count += len(nbrs)
        return u

    def has_edge(self, u, v):
        """Edge presence in the undirected projection."""
        self._check_node(u)
        self._check_node(v)
        return v in self._adj[u]

    def add_edge(self, u, v):
        """Add edge u-v (u->v when directed)."""
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise ValueError("self-loops are not allowed")
        if v in self._adj[u]:
            raise ValueError("edge (%d, %d) already present" % (u, v))
        self._triangle_count += len(self._adj[u] & self._adj[v])
        self._adj[u].add(v)
        self._adj[v].add(u)
        self._edge_count += 1
        if self.directed:
            self._out[u].add(v)
            self._in[v].add(u)
            self._arc_count += 1

    def remove_edge(self, u, v):
        self._check_node(u)
        self._check_node(v)
        if v not in self._adj[u]:
            raise MissingEdge((u, v))
        self._triangle_count -= len(self._adj[u] & self._adj[v])
        self._adj[u].discard(v)
        self._adj[v].discard(u)
        self._edge_count -= 1
        if self.directed:
            if v in self._out[u]:
                self._out[u].discard(v)
                self._in[v].discard(u)
                self._arc_count -= 1
            if u in self._out[v]:
                self._out[v].discard(u)
                self._in[u].discard(v)
                self._arc_count -= 1

    def neighbors(self, u):
        self._check_node(u)
        return self._adj[u]

    def degree(self, u):
        self._check_node(u)
        return len(self._adj[u])

    def in_degrees(self):
        if not self.directed:
            return None
        return [len(s) for s in self._in]

    def average_degree(self):
        if self.node_count == 0:
            raise EmptyGraph("average degree of the empty graph")
        return 2.0 * self._edge_count / self.node_count

    def is_connected(self):
        n = self.node_count
        if n <= 1:
            return True
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for w in self._adj[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == n

    def copy(self):
        g = Graph(directed=self.directed)
        g._adj = [set(s) for s in self._adj]
        if self.directed:
            g._out = [set(s) for s in self._out]
            g._in = [set(s) for s in self._in]
        g._edge_count = self._edge_count
        g._arc_count = self._arc_count
        g._triangle_count = self._triangle_count
        return g

    def edges(self):
        """Projection edges as sorted (u, v) pairs with u < v; for
        directed graphs the directed arcs (u, v) meaning u->v."""
        if self.directed:
            for u in range(self.node_count):
                for v in sorted(self._out[u]):
                    yield (u, v)
        else:
            for u in range(self.node_count):
                for v in sorted(self._adj[u]):
                    if v > u:
                        yield (u, v)


def er_seed(n_seed, p, rng_seed, max_retries=10_000):
    """Connected Erdos-Renyi G(n, p) seed graph.

    Disconnected draws are redrawn from a deterministically incremented
    RNG stream, up to ``max_retries`` attempts.
    """
    if n_seed < 1:
        raise ValueError("n_seed must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    if p == 0.0 and n_seed > 1:
        raise ConnectivityUnreachable("p=0 cannot connect %d nodes" % n_seed)
    for attempt in range(max_retries):
        rng = np.random.default_rng([int(rng_seed), attempt])
        g = Graph()
        for _ in range(n_seed):
            g.add_node()
        for i in range(n_seed):
            for j in range(i + 1, n_seed):
                if rng.random() < p:
                    g.add_edge(i, j)
        if g.is_connected():
            return g
    raise ConnectivityUnreachable(
        "no connected draw in %d attempts" % max_retries)


def sample_nodes(g, n_star, rng):
    """Uniform node sample without replacement."""
    if not 1 <= n_star <= g.node_count:
        raise SampleTooLarge(
            "n_star=%d outside [1, %d]" % (n_star, g.node_count))
    ids = rng.choice(g.node_count, size=n_star, replace=False)
    return NodeSample(node_ids=frozenset(int(i) for i in ids), size=n_star)


def induced_triangles(g, sample):
    """Triangle count of the subgraph induced by ``sample``.

    Cost proportional to the degrees of the sampled nodes; each triangle
    is seen once per induced edge, hence the final division by three.
    """
    nodes = set(sample.node_ids)
    for u in nodes:
        g._check_node(u)
    if len(nodes) != sample.size:
        raise ValueError("sample ids do not match the declared size")
    per_edge = 0
    for u in nodes:
        adj_u = g._adj[u]
        for v in adj_u:
            if v > u and v in nodes:
                per_edge += len(adj_u & g._adj[v] & nodes)
    return per_edge // 3


def triangle_count_scan(g):
    """Full-graph triangle count recomputed from scratch (no counter).

    Used for timing comparisons against the sampled variant; the
    maintained ``triangle_count`` attribute is the O(1) readout.
    """
    per_edge = 0
    for u in range(g.node_count):
        adj_u = g._adj[u]
        for v in adj_u:
            if v > u:
                per_edge += len(adj_u & g._adj[v])
    return per_edge // 3


def write_edge_list(g, path):
    with open(path, "w") as fh:
        for u, v in g.edges():
            fh.write("%d %d\n" % (u, v))
