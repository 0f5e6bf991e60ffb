"""Reference-table construction and CSV persistence.

One row per prior draw: the parameters, the per-entry RNG seed, and the
extrapolated (or, for method S, exact) summary values at n_o; GP-based
methods additionally store predictive variances and the inter-summary
correlation. Rows are written incrementally and builds are resumable by
entry id, guarded by a config hash in the header comment.
"""

import csv
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import curvefit, gp
from .config import config_hash
from .errors import ConfigError
from .graph import er_seed
from .ingest import read_edge_list, _induced_subgraph
from .models import (
    DmcParams,
    GrowthPlan,
    PriceParams,
    directed_seed,
    grow_dmc,
    grow_price,
)
from .rejection import ReferenceTableEntry, draw_prior
from .seeding import mix_seed
from .summaries import evaluate


def build_seed_graph(cfg):
    if cfg.seed_type == "edgelist":
        if not cfg.seed_path:
            raise ConfigError("seed_type=edgelist needs seed_path")
        g, node_ts = read_edge_list(cfg.seed_path,
                                    directed=cfg.model == "price")
        if cfg.seed_cutoff is not None:
            if node_ts is None:
                raise ConfigError("seed_cutoff needs a timestamp column")
            early = {u for u, ts in node_ts.items()
                     if ts <= cfg.seed_cutoff}
            g = _induced_subgraph(g, early)
        return g
    if cfg.model == "price":
        return directed_seed(cfg.seed_n, cfg.seed_p, cfg.seed_rng)
    return er_seed(cfg.seed_n, cfg.seed_p, cfg.seed_rng)


def _make_params(cfg, theta):
    if cfg.model == "dmc":
        return DmcParams(q_m=theta[0], q_c=theta[1])
    return PriceParams(k0=theta[0], p=theta[1], out_cap=cfg.out_cap)


def grow_to(cfg, theta, rng, n_target, checkpoints, specs):
    """Grow the configured model to n_target, tracking the given
    summaries; returns (TrackedSeries, final graph)."""
    seed = build_seed_graph(cfg)
    plan = GrowthPlan(n_target=n_target, checkpoints=tuple(checkpoints),
                      summaries=tuple(specs))
    params = _make_params(cfg, theta)
    grow = grow_dmc if cfg.model == "dmc" else grow_price
    return grow(seed, params, plan, rng, return_graph=True)


def simulate_observed(cfg, theta, rng):
    """Full-size simulation: summary vector of a model draw at n_o."""
    specs = cfg.summary_specs()
    _, g = grow_to(cfg, theta, rng, cfg.n_o, (), ())
    return tuple(evaluate(spec, g, rng) for spec in specs)


def _entry_values(cfg, theta, rng):
    """Extrapolated summaries (plus GP fields) for one table entry."""
    specs = cfg.summary_specs()
    if cfg.method == "S":
        return simulate_observed(cfg, theta, rng), None, None

    series, _ = grow_to(cfg, theta, rng, cfg.n_s, cfg.checkpoints(), specs)
    grid = np.asarray(series.checkpoints, dtype=float)
    if cfg.method in ("LS", "RE"):
        ext = []
        for spec in specs:
            family = curvefit.DEFAULT_FAMILY_BY_KIND[spec.kind]
            fit = curvefit.fit_series(grid, series.column(spec.name), family)
            ext.append(curvefit.extrapolate(fit, cfg.n_o))
        return tuple(ext), None, None

    # GP methods: power-law mean initialized from the least-squares fit
    fits, means, variances = [], [], []
    for spec in specs:
        col = series.column(spec.name)
        ls = curvefit.fit_series(grid, col, "power")
        kspec = gp.KernelSpec(cfg.kernel,
                              gp.DEFAULT_WARP_BY_KIND[spec.kind])
        fit = gp.fit_map(grid, col, kspec, ls)
        pred = gp.predict(fit, cfg.n_o)
        fits.append(fit)
        means.append(pred.mean)
        variances.append(pred.variance)
    if len(specs) == 2:
        corr = gp.summary_correlation(
            fits, [series.column(s.name) for s in specs]).value
    else:
        corr = 0.0
    return tuple(means), tuple(variances), corr


def _build_entry(args):
    cfg, entry_id = args
    seed_val = mix_seed(cfg.master_seed, entry_id)
    rng = np.random.default_rng(seed_val)
    theta = draw_prior(cfg.prior_box(), rng)
    try:
        ext, gpvars, gpcorr = _entry_values(cfg, theta, rng)
        return (entry_id, seed_val, theta, ext, gpvars, gpcorr, False)
    except Exception:
        return (entry_id, seed_val, theta, None, None, None, True)


def table_columns(cfg):
    names = [s.name for s in cfg.summary_specs()]
    cols = ["entry_id", "rng_seed"] + list(cfg.theta_names())
    cols += ["ext_%s" % n for n in names]
    if cfg.method in ("GPa", "GPb", "GPc"):
        cols += ["gpvar_%s" % n for n in names] + ["gp_corr"]
    cols.append("failed")
    return cols


def _format_row(cfg, result):
    entry_id, seed_val, theta, ext, gpvars, gpcorr, failed = result
    n_sum = len(cfg.summary_specs())
    row = [str(entry_id), str(seed_val)]
    row += [repr(float(t)) for t in theta]
    if failed:
        row += ["nan"] * n_sum
        if cfg.method in ("GPa", "GPb", "GPc"):
            row += ["nan"] * (n_sum + 1)
        row.append("1")
        return row
    row += [repr(float(v)) for v in ext]
    if cfg.method in ("GPa", "GPb", "GPc"):
        row += [repr(float(v)) for v in gpvars]
        row.append(repr(float(gpcorr)))
    row.append("0")
    return row


def _existing_entries(path, expected_hash):
    done = set()
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("# config="):
            raise ConfigError("%s has no config hash line" % path)
        found = first.strip().split("=", 1)[1]
        if found != expected_hash:
            raise ConfigError(
                "config hash mismatch: table %s vs config %s"
                % (found, expected_hash))
        reader = csv.reader(fh)
        next(reader, None)  # header
        for row in reader:
            if row:
                done.add(int(row[0]))
    return done


def build_reference_table(cfg, out_path, workers=None):
    """Build (or resume) the reference table CSV; returns the path."""
    cfg.validate()
    chash = config_hash(cfg)
    done = set()
    if os.path.exists(out_path) and os.path.getsize(out_path) > 0:
        done = _existing_entries(out_path, chash)
    pending = [b for b in range(1, cfg.table_size + 1) if b not in done]

    mode = "a" if done else "w"
    if workers is None:
        workers = cfg.workers
    if workers <= 0:
        workers = os.cpu_count() or 1

    with open(out_path, mode, newline="") as fh:
        writer = csv.writer(fh)
        if not done:
            fh.write("# config=%s\n" % chash)
            writer.writerow(table_columns(cfg))
        jobs = [(cfg, b) for b in pending]
        if workers == 1 or len(jobs) < 4:
            results = map(_build_entry, jobs)
            for result in results:
                writer.writerow(_format_row(cfg, result))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for result in pool.map(_build_entry, jobs, chunksize=4):
                    writer.writerow(_format_row(cfg, result))
    return out_path


def load_reference_table(path, expected_hash=None):
    """Read a table CSV back into ReferenceTableEntry objects.

    Returns (entries, failed_count, header columns). Failed rows are
    excluded from the entries but counted.
    """
    entries = []
    failed = 0
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("# config="):
            raise ConfigError("%s has no config hash line" % path)
        if expected_hash is not None:
            found = first.strip().split("=", 1)[1]
            if found != expected_hash:
                raise ConfigError("config hash mismatch")
        reader = csv.reader(fh)
        header = next(reader)
        theta_cols = [i for i, c in enumerate(header)
                      if not c.startswith(("entry_id", "rng_seed", "ext_",
                                           "gpvar_", "gp_corr", "failed"))]
        ext_cols = [i for i, c in enumerate(header) if c.startswith("ext_")]
        var_cols = [i for i, c in enumerate(header) if c.startswith("gpvar_")]
        corr_col = header.index("gp_corr") if "gp_corr" in header else None
        for row in reader:
            if not row:
                continue
            if row[header.index("failed")] == "1":
                failed += 1
                continue
            entries.append(ReferenceTableEntry(
                entry_id=int(row[0]),
                rng_seed=int(row[1]),
                theta=tuple(float(row[i]) for i in theta_cols),
                ext_summaries=tuple(float(row[i]) for i in ext_cols),
                gp_variances=(tuple(float(row[i]) for i in var_cols)
                              if var_cols else None),
                gp_correlation=(float(row[corr_col])
                                if corr_col is not None else None),
            ))
    return entries, failed, header
