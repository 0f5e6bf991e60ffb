"""Per-realization functional-form fits on the linear scale and their
evaluation at larger network sizes.

Families:
  power:         a * n**c
  power_offset:  a * n**c + d
  inverse:       a / n + c
  digamma:       (euler_gamma + digamma(a*n + 1))**c + d

The objective is the plain sum of squared errors in original units (not
log-log), minimized by damped Gauss-Newton (``scipy.optimize
.least_squares``) with analytic Jacobians and a deterministic
multi-start grid, so fits are reproducible without any RNG.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares
from scipy.special import digamma as psi0
from scipy.special import polygamma

from .errors import NonFiniteInput, NotConverged, TooFewPoints

EULER_GAMMA = float(np.euler_gamma)

FAMILIES = ("power", "power_offset", "inverse", "digamma")

_PARAM_NAMES = {
    "power": ("a", "c"),
    "power_offset": ("a", "c", "d"),
    "inverse": ("a", "c"),
    "digamma": ("a", "c", "d"),
}

# Multi-start grid over (a, c); a log-spaced, c linear.
_A_GRID = np.logspace(-3, 3, 5)
_C_GRID = np.linspace(0.1, 3.0, 5)
_N_REFINE = 3  # optimizer runs from the best grid points by initial SSE


@dataclass(frozen=True)
class FunctionalForm:
    family: str
    params: tuple

    def __call__(self, n):
        return evaluate_form(self.family, np.asarray(self.params, float), n)


@dataclass(frozen=True)
class LsFit:
    form: FunctionalForm
    residual_sse: float
    converged: bool


def evaluate_form(family, params, n):
    n = np.asarray(n, dtype=float)
    if family == "power":
        a, c = params
        return a * n ** c
    if family == "power_offset":
        a, c, d = params
        return a * n ** c + d
    if family == "inverse":
        a, c = params
        return a / n + c
    if family == "digamma":
        a, c, d = params
        h = EULER_GAMMA + psi0(a * n + 1.0)
        return h ** c + d
    raise ValueError("unknown family %r" % (family,))


def _jacobian(family, params, n):
    n = np.asarray(n, dtype=float)
    if family == "power":
        a, c = params
        nc = n ** c
        return np.column_stack([nc, a * nc * np.log(n)])
    if family == "power_offset":
        a, c, d = params
        nc = n ** c
        return np.column_stack([nc, a * nc * np.log(n), np.ones_like(n)])
    if family == "inverse":
        return np.column_stack([1.0 / n, np.ones_like(n)])
    if family == "digamma":
        a, c, d = params
        h = EULER_GAMMA + psi0(a * n + 1.0)
        dh_da = polygamma(1, a * n + 1.0) * n
        with np.errstate(divide="ignore", invalid="ignore"):
            d_dc = np.where(h > 0, h ** c * np.log(h), 0.0)
        return np.column_stack([c * h ** (c - 1.0) * dh_da,
                                d_dc, np.ones_like(n)])
    raise ValueError("unknown family %r" % (family,))


def _bounds(family):
    if family == "digamma":
        return ([1e-9, -np.inf, -np.inf], np.inf)
    return (-np.inf, np.inf)


def _loglog_start(n, s, with_offset):
    """Linear regression on (log n, log s), positive values only."""
    d0 = 0.0
    if with_offset:
        d0 = float(np.min(s)) - 1e-6 * max(1.0, abs(float(np.min(s))))
    pos = s - d0 > 0
    if pos.sum() < 2:
        return None
    ln = np.log(n[pos])
    ls = np.log((s - d0)[pos])
    c, loga = np.polyfit(ln, ls, 1)
    start = [np.exp(loga), c]
    if with_offset:
        start.append(d0)
    return np.array(start)


def _starts(family, n, s):
    starts = []
    if family in ("power", "power_offset"):
        st = _loglog_start(n, s, family == "power_offset")
        if st is not None:
            starts.append(st)
    grid = []
    for a0 in _A_GRID:
        for c0 in _C_GRID:
            if family in ("power", "digamma"):
                x0 = [a0, c0] if family == "power" else [a0, c0, 0.0]
                grid.append(np.array(x0, float))
            elif family == "power_offset":
                grid.append(np.array([a0, c0, 0.0], float))
    # Screen the grid by initial SSE and refine only the best few.
    sses = []
    for x0 in grid:
        r = evaluate_form(family, x0, n) - s
        sses.append(float(np.dot(r, r)) if np.all(np.isfinite(r)) else np.inf)
    order = np.argsort(sses, kind="stable")[:_N_REFINE]
    starts.extend(grid[i] for i in order)
    if family == "digamma":
        # offset start anchored at the series minimum
        d0 = float(np.min(s))
        starts.append(np.array([1.0, 1.0, d0]))
    return starts


def fit_series(n, s, family):
    """Least-squares fit of one functional family to a tracked series."""
    if family not in FAMILIES:
        raise ValueError("unknown family %r" % (family,))
    n = np.asarray(n, dtype=float)
    s = np.asarray(s, dtype=float)
    if not (np.all(np.isfinite(n)) and np.all(np.isfinite(s))):
        raise NonFiniteInput("series contains non-finite values")
    n_params = len(_PARAM_NAMES[family])
    if len(np.unique(n)) < n_params:
        raise TooFewPoints(
            "%d distinct points < %d parameters" % (len(np.unique(n)),
                                                    n_params))
    if np.all(s == 0.0):
        params = (0.0, 1.0) if n_params == 2 else (0.0, 1.0, 0.0)
        return LsFit(FunctionalForm(family, params), 0.0, True)

    if family == "inverse":
        design = np.column_stack([1.0 / n, np.ones_like(n)])
        params, *_ = np.linalg.lstsq(design, s, rcond=None)
        resid = design @ params - s
        return LsFit(FunctionalForm(family, tuple(params)),
                     float(np.dot(resid, resid)), True)

    best = None
    for x0 in _starts(family, n, s):
        try:
            res = least_squares(
                lambda p: evaluate_form(family, p, n) - s,
                x0,
                jac=lambda p: _jacobian(family, p, n),
                bounds=_bounds(family),
                method="trf",
                xtol=1e-15, ftol=1e-15, gtol=1e-14,
                max_nfev=400,
            )
        except (ValueError, np.linalg.LinAlgError):
            continue
        sse = float(np.dot(res.fun, res.fun))
        if best is None or sse < best[0]:
            best = (sse, res)
    if best is None:
        return LsFit(FunctionalForm(family, (np.nan,) * n_params),
                     np.inf, False)
    sse, res = best
    converged = bool(res.success and np.all(np.isfinite(res.x)))
    return LsFit(FunctionalForm(family, tuple(float(v) for v in res.x)),
                 sse, converged)


def extrapolate(fit, n_o):
    """Evaluate a converged fit at ``n_o`` nodes."""
    if not fit.converged:
        raise NotConverged("cannot extrapolate an unconverged fit")
    if n_o <= 0:
        raise ValueError("n_o must be positive")
    with np.errstate(over="ignore", invalid="ignore"):
        value = float(fit.form(float(n_o)))
    if not np.isfinite(value):
        raise OverflowError("extrapolated value is not finite")
    return value


DEFAULT_FAMILY_BY_KIND = {
    "avg_degree": "power",
    "triangle_count": "power",
    "sample_triangle_count": "power_offset",
    "in_degree_mean": "inverse",
    "in_degree_variance": "digamma",
}


class CurveExtrapolator:
    """sklearn-style estimator wrapping :func:`fit_series`.

    ``fit(X, y)`` takes node counts (1-d or a single column) and summary
    values; ``predict(X)`` evaluates the fitted form.
    """

    def __init__(self, family="power"):
        self.family = family

    def get_params(self, deep=True):
        return {"family": self.family}

    def set_params(self, **params):
        for key, value in params.items():
            if not hasattr(self, key):
                raise ValueError("invalid parameter %r" % (key,))
            setattr(self, key, value)
        return self

    def fit(self, X, y):
        n = np.asarray(X, dtype=float).reshape(-1)
        fit = fit_series(n, y, self.family)
        self.fit_ = fit
        self.params_ = fit.form.params
        self.residual_sse_ = fit.residual_sse
        self.converged_ = fit.converged
        return self

    def predict(self, X):
        if not hasattr(self, "fit_"):
            raise NotConverged("estimator is not fitted")
        n = np.asarray(X, dtype=float).reshape(-1)
        return np.array([extrapolate(self.fit_, v) for v in n])
