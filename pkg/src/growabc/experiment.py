"""Experiment runner: ABC acceptance against a reference table,
replicate simulation studies, and timing reports."""

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .config import config_hash
from .errors import ConfigError
from .graph import sample_nodes, induced_triangles, triangle_count_scan
from .rejection import (
    accept_top_k_density,
    accept_top_k_distance,
    posterior_stats,
    standardization_sds,
    draw_prior,
)
from .seeding import AUX_OFFSET, FILL_OFFSET, OBSERVED_OFFSET, mix_seed
from .table import (
    build_reference_table,
    grow_to,
    load_reference_table,
    simulate_observed,
)


def compute_sds(cfg, entries):
    """Per-summary standardization sds, from the extrapolated table
    values or from auxiliary full-size simulations."""
    if cfg.standardization == "extrapolated":
        return standardization_sds([e.ext_summaries for e in entries]).sds
    if cfg.standardization != "auxiliary":
        raise ConfigError("standardization must be extrapolated or auxiliary")
    vectors = []
    for i in range(cfg.aux_count):
        seed_val = mix_seed(cfg.master_seed, AUX_OFFSET + i)
        rng = np.random.default_rng(seed_val)
        theta = draw_prior(cfg.prior_box(), rng)
        vectors.append(simulate_observed(cfg, theta, rng))
    return standardization_sds(vectors).sds


def run_abc(cfg, entries, observed, sds, fill_rng=None):
    """One acceptance pass with the configured method."""
    k = cfg.accept_k
    if cfg.method in ("S", "LS", "RE", "GPc"):
        return accept_top_k_distance(entries, observed, sds, k,
                                     method=cfg.method)
    inflate = 1.0 if cfg.method == "GPa" else cfg.inflate
    if fill_rng is None:
        fill_rng = np.random.default_rng(
            mix_seed(cfg.master_seed, FILL_OFFSET))
    return accept_top_k_density(entries, observed, k, inflate, fill_rng,
                                method=cfg.method)


def _observed_for(args):
    cfg, truth_idx, rep = args
    truth = cfg.truth_list()[truth_idx]
    seed_val = mix_seed(cfg.master_seed,
                        OBSERVED_OFFSET + truth_idx * 100_000 + rep)
    rng = np.random.default_rng(seed_val)
    return truth_idx, rep, simulate_observed(cfg, truth, rng)


def run_experiment(cfg, out_dir, workers=None):
    """Replicate simulation study: per truth, simulate observed
    networks at n_o, run acceptance against a shared table, and report
    posterior-mean averages, SD, and RMSE.

    Writes table.csv (reused if present), posterior_means.csv, and
    experiment_stats.json under ``out_dir``.
    """
    cfg.validate()
    os.makedirs(out_dir, exist_ok=True)
    table_path = os.path.join(out_dir, "table.csv")
    build_reference_table(cfg, table_path, workers=workers)
    entries, failed, _ = load_reference_table(table_path, config_hash(cfg))
    if cfg.accept_k > len(entries):
        raise ConfigError("accept_k exceeds the usable table size")
    sds = compute_sds(cfg, entries)

    truths = cfg.truth_list()
    jobs = [(cfg, t, r) for t in range(len(truths))
            for r in range(cfg.exp_replicates)]
    if workers is None:
        workers = cfg.workers
    if workers <= 0:
        workers = os.cpu_count() or 1
    if workers == 1 or len(jobs) < 4:
        observed_results = list(map(_observed_for, jobs))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            observed_results = list(pool.map(_observed_for, jobs))
    observed_results.sort(key=lambda t: (t[0], t[1]))

    names = cfg.theta_names()
    means_path = os.path.join(out_dir, "posterior_means.csv")
    per_truth = {t: [] for t in range(len(truths))}
    fills_total = 0
    with open(means_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["truth_idx", "replicate"]
                        + ["true_%s" % n for n in names]
                        + ["mean_%s" % n for n in names])
        for truth_idx, rep, observed in observed_results:
            fill_rng = np.random.default_rng(mix_seed(
                cfg.master_seed,
                FILL_OFFSET + truth_idx * 100_000 + rep))
            posterior = run_abc(cfg, entries, observed, sds, fill_rng)
            fills_total += posterior.zero_density_fills
            mean = posterior.thetas().mean(axis=0)
            per_truth[truth_idx].append(mean)
            writer.writerow([str(truth_idx), str(rep)]
                            + [repr(v) for v in truths[truth_idx]]
                            + [repr(float(v)) for v in mean])

    report = {
        "method": cfg.method,
        "n_o": cfg.n_o,
        "n_s": cfg.n_s,
        "table_size": cfg.table_size,
        "failed_entries": failed,
        "zero_density_fills": fills_total,
        "truths": [],
    }
    for truth_idx, truth in enumerate(truths):
        arr = np.asarray(per_truth[truth_idx], dtype=float)
        avg = arr.mean(axis=0)
        sd = arr.std(axis=0)  # population sd, so rmse^2 = sd^2 + bias^2
        bias = avg - np.asarray(truth)
        rmse = np.sqrt(sd ** 2 + bias ** 2)
        report["truths"].append({
            "truth": list(truth),
            "avg_posterior_mean": avg.tolist(),
            "sd": sd.tolist(),
            "rmse": rmse.tolist(),
            "bias": bias.tolist(),
        })
    stats_path = os.path.join(out_dir, "experiment_stats.json")
    with open(stats_path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report


def abc_run(cfg, table_path, out_dir, observed=None, workers=None):
    """Single acceptance run against an existing (or new) table.

    ``observed``: summary vector; if None, an observed network is
    simulated from the first configured truth. Writes posterior.csv and
    stats.json.
    """
    cfg.validate()
    os.makedirs(out_dir, exist_ok=True)
    if not os.path.exists(table_path):
        build_reference_table(cfg, table_path, workers=workers)
    entries, failed, _ = load_reference_table(table_path, config_hash(cfg))
    sds = compute_sds(cfg, entries)
    truth = None
    if observed is None:
        truth = cfg.truth_list()[0]
        rng = np.random.default_rng(mix_seed(cfg.master_seed,
                                             OBSERVED_OFFSET))
        observed = simulate_observed(cfg, truth, rng)
    posterior = run_abc(cfg, entries, observed, sds)

    names = cfg.theta_names()
    post_path = os.path.join(out_dir, "posterior.csv")
    by_theta = {e.theta: e.entry_id for e in entries}
    with open(post_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rank", "entry_id"] + list(names) + ["score"])
        for rank, (theta, score) in enumerate(posterior.accepted, start=1):
            writer.writerow([str(rank), str(by_theta[theta])]
                            + [repr(float(t)) for t in theta]
                            + [repr(float(score))])
    stats = posterior_stats(posterior, truth=truth)
    stats["failed_entries"] = failed
    stats["observed"] = [float(v) for v in observed]
    stats_path = os.path.join(out_dir, "stats.json")
    with open(stats_path, "w") as fh:
        json.dump(stats, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return posterior


def _time_entry_build(cfg, reps):
    from .table import _build_entry

    start = time.perf_counter()
    for b in range(1, reps + 1):
        _build_entry((cfg, b))
    return (time.perf_counter() - start) / reps


def _time_observed_summary(cfg, reps):
    """Seconds to compute the triangle summary on a full n_o network,
    from scratch, vs on an induced subsample."""
    rng = np.random.default_rng(mix_seed(cfg.master_seed, OBSERVED_OFFSET))
    theta = draw_prior(cfg.prior_box(), rng)
    _, g = grow_to(cfg, theta, rng, cfg.n_o, (), ())
    n_star = min(cfg.n_star, g.node_count)
    start = time.perf_counter()
    for _ in range(reps):
        triangle_count_scan(g)
    full = (time.perf_counter() - start) / reps
    start = time.perf_counter()
    for _ in range(reps):
        induced_triangles(g, sample_nodes(g, n_star, rng))
    sub = (time.perf_counter() - start) / reps
    return full, sub


def timing_report(cfg, out_path, n_o_list=None, table_sizes=(10, 100),
                  methods=("S", "LS")):
    """Wall-clock shape report: per-entry build time per method and
    n_o, observed-summary time full vs subsampled, and projected total
    pipeline time per table size."""
    cfg.validate()
    if n_o_list is None:
        n_o_list = [cfg.n_o]
    reps = max(1, cfg.timing_reps)
    rows = []
    for n_o in n_o_list:
        per_entry = {}
        for method in methods:
            mcfg = replace(cfg, method=method, n_o=n_o)
            seconds = _time_entry_build(mcfg, reps)
            per_entry[method] = seconds
            rows.append(("entry_build", method, n_o, "", repr(seconds)))
        full, sub = _time_observed_summary(replace(cfg, n_o=n_o), reps)
        rows.append(("observed_summary", "full", n_o, "", repr(full)))
        rows.append(("observed_summary", "subsampled", n_o, "", repr(sub)))
        for size in table_sizes:
            for method in methods:
                total = per_entry[method] * size + full
                rows.append(("total", method, n_o, size, repr(total)))
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "method", "n_o", "table_size", "seconds"])
        for row in rows:
            writer.writerow([str(v) for v in row])
    return rows
