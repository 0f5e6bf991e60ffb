"""Reference table, distances, reconstructed-normal densities,
top-k acceptance, and posterior summaries."""

import math
from collections import namedtuple
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DegenerateCovariance,
    EmptyPosterior,
    KTooLarge,
    LengthMismatch,
    MissingGpFields,
    TooFewInputs,
)


@dataclass(frozen=True)
class PriorBox:
    lower: tuple
    upper: tuple

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("bound vectors differ in length")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("lower bound exceeds upper bound")

    @property
    def dim(self):
        return len(self.lower)


@dataclass(frozen=True)
class ReferenceTableEntry:
    entry_id: int
    rng_seed: int
    theta: tuple
    ext_summaries: tuple
    gp_variances: Optional[tuple] = None
    gp_correlation: Optional[float] = None

    def __post_init__(self):
        if (self.gp_variances is None) != (self.gp_correlation is None):
            raise MissingGpFields(
                "gp_variances and gp_correlation must be given together")


@dataclass
class AbcPosterior:
    accepted: list   # (theta, score) pairs, sorted by score
    method: str
    k: int
    zero_density_fills: int = 0

    def thetas(self):
        return np.array([t for t, _ in self.accepted], dtype=float)


def draw_prior(box, rng):
    """Componentwise uniform draw from the prior box."""
    lo = np.asarray(box.lower, dtype=float)
    hi = np.asarray(box.upper, dtype=float)
    return tuple(lo + rng.random(box.dim) * (hi - lo))


StandardizationResult = namedtuple("StandardizationResult",
                                   ["sds", "replaced"])


def standardization_sds(vectors):
    """Per-summary sample standard deviations of the given summary
    vectors (auxiliary full-size simulations or extrapolated table
    values). Zero sds are replaced by 1 and flagged."""
    arr = np.asarray(vectors, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise TooFewInputs("at least two summary vectors are needed")
    sds = arr.std(axis=0, ddof=1)
    replaced = sds == 0.0
    sds = np.where(replaced, 1.0, sds)
    return StandardizationResult(sds, replaced)


def std_euclidean(x, y, sds):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sds = np.asarray(sds, dtype=float)
    if not (len(x) == len(y) == len(sds)):
        raise LengthMismatch("vector lengths differ")
    z = (x - y) / sds
    return float(np.sqrt(np.dot(z, z)))


def accept_top_k_distance(table, observed, sds, k, method="LS"):
    """Keep the k entries with the smallest standardized distances;
    exact ties break deterministically by entry_id."""
    if k > len(table):
        raise KTooLarge("k=%d > table size %d" % (k, len(table)))
    scored = sorted(
        ((std_euclidean(e.ext_summaries, observed, sds), e.entry_id, e)
         for e in table),
        key=lambda t: (t[0], t[1]))
    accepted = [(e.theta, dist) for dist, _, e in scored[:k]]
    return AbcPosterior(accepted=accepted, method=method, k=k)


def bivariate_density(mean, variances, corr, observed, inflate=1.0):
    """Bivariate normal pdf at ``observed`` for the reconstructed
    summary distribution, with the covariance scaled by ``inflate``."""
    v1, v2 = float(variances[0]), float(variances[1])
    if v1 <= 0.0 or v2 <= 0.0 or not abs(corr) < 1.0 or inflate <= 0.0:
        raise DegenerateCovariance(
            "need positive variances, |corr| < 1, positive inflate")
    z1 = (observed[0] - mean[0]) / math.sqrt(v1 * inflate)
    z2 = (observed[1] - mean[1]) / math.sqrt(v2 * inflate)
    omc = 1.0 - corr * corr
    quad = (z1 * z1 - 2.0 * corr * z1 * z2 + z2 * z2) / omc
    norm = 2.0 * math.pi * inflate * math.sqrt(v1 * v2 * omc)
    try:
        return math.exp(-0.5 * quad) / norm
    except OverflowError:
        return 0.0


def accept_top_k_density(table, observed, k, inflate, rng, method="GPa"):
    """Keep the k entries with the highest reconstructed-normal density.

    Entries whose densities underflow to zero only fill remaining slots,
    chosen uniformly at random among themselves; the number of such
    fills is reported on the posterior.
    """
    if k > len(table):
        raise KTooLarge("k=%d > table size %d" % (k, len(table)))
    for e in table:
        if e.gp_variances is None or e.gp_correlation is None:
            raise MissingGpFields("entry %d lacks GP fields" % e.entry_id)
    densities = [
        (bivariate_density(e.ext_summaries, e.gp_variances,
                           e.gp_correlation, observed, inflate), e)
        for e in table
    ]
    positive = sorted(((d, e) for d, e in densities if d > 0.0),
                      key=lambda t: (-t[0], t[1].entry_id))
    accepted = [(e.theta, d) for d, e in positive[:k]]
    fills = 0
    if len(accepted) < k:
        zeros = [e for d, e in densities if d == 0.0]
        fills = k - len(accepted)
        picks = rng.choice(len(zeros), size=fills, replace=False)
        accepted.extend((zeros[int(i)].theta, 0.0) for i in picks)
    return AbcPosterior(accepted=accepted, method=method, k=k,
                        zero_density_fills=fills)


def posterior_stats(posterior, truth=None):
    """Per-parameter mean, (population) variance, and 2.5%/97.5%
    linear-interpolation quantiles; with a known truth, also the squared
    error of the posterior mean."""
    if not posterior.accepted:
        raise EmptyPosterior("no accepted entries")
    thetas = posterior.thetas()
    stats = {
        "mean": thetas.mean(axis=0).tolist(),
        "variance": thetas.var(axis=0).tolist(),
        "q2.5": np.quantile(thetas, 0.025, axis=0).tolist(),
        "q97.5": np.quantile(thetas, 0.975, axis=0).tolist(),
        "k": posterior.k,
        "method": posterior.method,
        "zero_density_fills": posterior.zero_density_fills,
    }
    if truth is not None:
        err = thetas.mean(axis=0) - np.asarray(truth, dtype=float)
        stats["squared_error"] = (err ** 2).tolist()
    return stats
