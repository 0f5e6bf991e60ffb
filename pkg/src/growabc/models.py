"""Mechanistic growth models: duplication-divergence (DMC) and the
Price citation model. Both grow a seed graph to a target size and
record summaries at checkpoint node counts."""

from dataclasses import dataclass

import numpy as np

from .errors import CountTooLarge, PlanInvalid
from .graph import Graph
from .summaries import TrackedSeries, evaluate


@dataclass(frozen=True)
class DmcParams:
    q_m: float  # edge-removal probability
    q_c: float  # complementation (anchor edge) probability

    def __post_init__(self):
        if not 0.0 <= self.q_m <= 1.0:
            raise ValueError("q_m must be in [0, 1]")
        if not 0.0 <= self.q_c <= 1.0:
            raise ValueError("q_c must be in [0, 1]")


@dataclass(frozen=True)
class PriceParams:
    k0: float       # attachment offset added to the in-degree
    p: float        # binomial success probability for the out-degree
    out_cap: int = 610

    def __post_init__(self):
        if self.k0 <= 0:
            raise ValueError("k0 must be > 0")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must be in [0, 1]")
        if self.out_cap < 1:
            raise ValueError("out_cap must be >= 1")


@dataclass(frozen=True)
class GrowthPlan:
    n_target: int
    checkpoints: tuple = ()
    summaries: tuple = ()

    def validate(self, seed_size):
        if seed_size >= self.n_target:
            raise PlanInvalid("seed size %d >= target %d"
                              % (seed_size, self.n_target))
        cps = self.checkpoints
        if self.summaries and not cps:
            raise PlanInvalid("summaries requested but no checkpoints")
        if cps:
            if any(b <= a for a, b in zip(cps, cps[1:])):
                raise PlanInvalid("checkpoints must be strictly increasing")
            if cps[0] <= seed_size:
                raise PlanInvalid("first checkpoint %d <= seed size %d"
                                  % (cps[0], seed_size))
            if cps[-1] > self.n_target:
                raise PlanInvalid("last checkpoint %d > target %d"
                                  % (cps[-1], self.n_target))


def dmc_step(g, params, rng):
    """One duplication-mutation-complementation step.

    Picks an anchor uniformly, duplicates its links, then for each
    neighbor removes one of the two parallel edges with probability q_m
    (the victim chosen by a fair coin), and finally links the duplicate
    to the anchor with probability q_c.
    """
    v = int(rng.integers(g.node_count))
    nbrs = sorted(g.neighbors(v))
    u = g.add_node_with_edges(nbrs)
    for w in nbrs:
        if rng.random() < params.q_m:
            if rng.random() < 0.5:
                g.remove_edge(v, w)
            else:
                g.remove_edge(u, w)
    if rng.random() < params.q_c:
        g.add_edge(u, v)


def preferential_sample(in_degrees, k0, count, rng):
    """Draw ``count`` distinct candidate indices, sequentially, each
    with probability proportional to k0 + in-degree; chosen weights are
    removed before the next draw."""
    n = len(in_degrees)
    if count > n:
        raise CountTooLarge("count=%d > %d candidates" % (count, n))
    if count == 0:
        return set()
    weights = k0 + np.asarray(in_degrees, dtype=float)
    chosen = set()
    for _ in range(count):
        cum = np.cumsum(weights)
        r = rng.random() * cum[-1]
        idx = int(np.searchsorted(cum, r, side="right"))
        idx = min(idx, n - 1)
        chosen.add(idx)
        weights[idx] = 0.0
    return chosen


def price_step(g, params, rng):
    """Add one node to a directed graph, citing existing nodes drawn
    preferentially; the out-degree is Binomial(out_cap, p) clamped to
    the current node count."""
    x = int(rng.binomial(params.out_cap, params.p))
    x = min(x, g.node_count)
    targets = preferential_sample(g.in_degrees(), params.k0, x, rng)
    u = g.add_node()
    for t in sorted(targets):
        g.add_edge(u, t)


def _grow(seed, step, plan, rng, theta, entry_id, rng_seed):
    seed_size = seed.node_count
    plan.validate(seed_size)
    g = seed.copy()
    cps = set(plan.checkpoints)
    rows = []
    while g.node_count < plan.n_target:
        step(g, rng)
        if g.node_count in cps:
            rows.append([evaluate(spec, g, rng) for spec in plan.summaries])
    values = np.asarray(rows, dtype=float)
    if values.size == 0:
        values = values.reshape(0, len(plan.summaries))
    return TrackedSeries(
        entry_id=entry_id,
        rng_seed=rng_seed,
        theta=tuple(theta),
        checkpoints=tuple(plan.checkpoints),
        values=values,
        summary_names=tuple(s.name for s in plan.summaries),
    ), g


def grow_dmc(seed, params, plan, rng, entry_id=0, rng_seed=0,
             return_graph=False):
    """Grow an undirected seed with the DMC model, tracking summaries
    at the plan's checkpoints. Deterministic given the rng stream."""
    if seed.directed:
        raise PlanInvalid("DMC growth needs an undirected seed")
    series, g = _grow(seed, lambda g_, r: dmc_step(g_, params, r), plan, rng,
                      (params.q_m, params.q_c), entry_id, rng_seed)
    return (series, g) if return_graph else series


def grow_price(seed, params, plan, rng, entry_id=0, rng_seed=0,
               return_graph=False):
    """Grow a directed seed with the Price model; new edges point from
    the new node to existing nodes, never duplicated."""
    if not seed.directed:
        raise PlanInvalid("Price growth needs a directed seed")
    series, g = _grow(seed, lambda g_, r: price_step(g_, params, r), plan, rng,
                      (params.k0, params.p), entry_id, rng_seed)
    return (series, g) if return_graph else series


def directed_seed(n_seed, p, rng_seed):
    """Small directed ER-like seed for desk-scale Price runs: an
    undirected connected ER draw with each edge oriented from the
    higher id to the lower (later nodes cite earlier ones)."""
    from .graph import er_seed

    und = er_seed(n_seed, p, rng_seed)
    g = Graph(directed=True)
    for _ in range(n_seed):
        g.add_node()
    for u, v in und.edges():
        g.add_edge(max(u, v), min(u, v))
    return g
