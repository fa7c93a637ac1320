"""Maximum-likelihood fitting and information-criterion model selection.

Continuous parameters are maximized with a bounded quasi-Newton optimizer
(derivative-free bounded fallback when it fails); integer parameters are
found by exhaustive scan.  The break point ranges over every integer between
the second smallest and second largest observed distance, so that each
regime keeps at least two distinct distances to infer a decay from; this is
also why two-regime models require at least 3 distinct distances.

The truncation bound of models 2, 4, 5 and 7 is pinned to the observed
maximum distance: their likelihood is strictly decreasing in d_max for any
fixed continuous parameters (enlarging the support only bleeds mass outside
the data), so the profile likelihood peaks at the lower bound max(d).  The
uniform-shuffle null is the exception (its mass leans on low d) and gets a
genuine scan with an adaptive window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import minimize

from . import models as m
from .models import Model, ModelParams, PerLength
from .treebank import DistanceSample

EPS = m.EPS
DEFAULT_MIN_DISTINCT = 3        # distinct distances needed by two-regime fits
DEFAULT_MIN_LENGTH = 4          # sentences shorter than this are excluded
BREAK_POINT_INIT = 5
GAMMA_FALLBACK = 10.0           # exponent init when the estimator degenerates
FTOL = 1e-11                    # relative log-likelihood convergence


@dataclass(frozen=True)
class FitResult:
    """One model fitted to one sample."""

    model: Model
    params: ModelParams | None
    log_l: float
    k: int
    aic: float
    bic: float
    converged: bool
    sample_size: int
    status: str = "ok"          # "ok" or "excluded"
    note: str | None = None

    @property
    def excluded(self) -> bool:
        return self.status != "ok"


def information_criteria(log_l: float, k: int, n: int) -> tuple[float, float]:
    """(AIC, BIC) = (2K - 2logL, K logN - 2logL)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2.0 * k - 2.0 * log_l, k * math.log(n) - 2.0 * log_l


def _excluded(model: Model, n: int, note: str) -> FitResult:
    return FitResult(
        model=model, params=None, log_l=float("-inf"), k=model.k,
        aic=float("inf"), bic=float("inf"), converged=False,
        sample_size=n, status="excluded", note=note,
    )


def _result(model, params, log_l, n, converged, note=None) -> FitResult:
    aic, bic = information_criteria(log_l, model.k, n)
    return FitResult(
        model=model, params=params, log_l=log_l, k=model.k, aic=aic,
        bic=bic, converged=converged, sample_size=n, note=note,
    )


# ---------------------------------------------------------------------------
# Initial values
# ---------------------------------------------------------------------------

def _clamp_q(value: float) -> float:
    return min(max(value, EPS), 1.0 - EPS)


def _regression_slope(sample: DistanceSample, lo=None, hi=None) -> float | None:
    """Least-squares slope of log(f(d)/N) on d over observed support."""
    mask = np.ones(len(sample.support), dtype=bool)
    if lo is not None:
        mask &= sample.support >= lo
    if hi is not None:
        mask &= sample.support <= hi
    d = sample.support[mask].astype(float)
    if len(d) < 2:
        return None
    y = np.log(sample.counts[mask] / sample.total)
    d_mean, y_mean = d.mean(), y.mean()
    denom = ((d - d_mean) ** 2).sum()
    return float(((d - d_mean) * (y - y_mean)).sum() / denom)


def _q_init_from_slope(slope: float | None, fallback: float) -> float:
    if slope is None:
        return _clamp_q(fallback)
    if slope >= 0:
        # A flat or rising tail gives a slope with no geometric reading.
        return EPS
    return _clamp_q(1.0 - math.exp(slope))


def _regime_q_inits(sample, break_point) -> tuple[float, float]:
    q_global = _clamp_q(sample.total / sample.weighted_sum)
    b1 = _regression_slope(sample, hi=break_point)
    b2 = _regression_slope(sample, lo=break_point)
    return _q_init_from_slope(b1, q_global), _q_init_from_slope(b2, q_global)


def _gamma_init(sample: DistanceSample, upto: int | None = None) -> float:
    """Power-law exponent estimate 1 + N / sum(f(d) log(d / min(d)))."""
    mask = (sample.support <= upto) if upto is not None else slice(None)
    support = sample.support[mask].astype(float)
    counts = sample.counts[mask]
    denom = float((counts * np.log(support / support[0])).sum())
    if denom <= 0.0:
        return GAMMA_FALLBACK
    return 1.0 + float(counts.sum()) / denom


def _tail_q_init(sample: DistanceSample, break_point: int) -> float:
    """Geometric rate init from distances strictly beyond the break."""
    mask = sample.support > break_point
    if not mask.any():
        return _clamp_q(sample.total / sample.weighted_sum)
    n_tail = int(sample.counts[mask].sum())
    m_tail = int((sample.support[mask] * sample.counts[mask]).sum())
    return _clamp_q(n_tail / m_tail)


def _break_grid(sample: DistanceSample) -> range:
    return range(sample.min2_d, sample.max2_d + 1)


def _clamped_break_init(sample: DistanceSample) -> int:
    return min(max(BREAK_POINT_INIT, sample.min2_d), sample.max2_d)


def initial_values(model: Model, sample: DistanceSample) -> ModelParams:
    """Starting parameters for the maximum-likelihood search.

    q-like rates start at the inverse mean distance; the two regime rates
    come from log-frequency regressions split at the break-point init (5,
    clamped into its bounds); the zeta exponent from the standard power-law
    estimator; d_max at the observed maximum.
    """
    q_init = _clamp_q(sample.total / sample.weighted_sum)
    if model is Model.NULL_FIXED:
        return m.NullParams(sample.max_d)
    if model is Model.GEOMETRIC:
        return m.GeometricParams(q_init)
    if model is Model.GEOMETRIC_TRUNC:
        return m.TruncatedGeometricParams(q_init, sample.max_d)
    if model is Model.ZETA_TRUNC:
        return m.ZetaParams(_gamma_init(sample), sample.max_d)

    if model.is_two_regime:
        if sample.distinct < DEFAULT_MIN_DISTINCT:
            raise ValueError("two-regime init needs >= 3 distinct distances")
        bp = _clamped_break_init(sample)
        if model is Model.TWO_REGIME_GEOMETRIC:
            q1, q2 = _regime_q_inits(sample, bp)
            return m.TwoRegimeGeometricParams(q1, q2, bp)
        if model is Model.TWO_REGIME_GEOMETRIC_TRUNC:
            q1, q2 = _regime_q_inits(sample, bp)
            return m.TruncatedTwoRegimeGeometricParams(
                q1, q2, bp, sample.max_d
            )
        if model is Model.ZETA_GEOMETRIC:
            return m.ZetaGeometricParams(
                _gamma_init(sample, upto=bp), _tail_q_init(sample, bp), bp
            )
        if model is Model.ZETA_GEOMETRIC_TRUNC:
            return m.TruncatedZetaGeometricParams(
                _gamma_init(sample, upto=bp), _tail_q_init(sample, bp), bp,
                sample.max_d,
            )
    raise ValueError(f"no initial values for {model}")


# ---------------------------------------------------------------------------
# Continuous optimization (bounded, with derivative-free fallback)
# ---------------------------------------------------------------------------

def _maximize(objective, x0, bounds) -> tuple[np.ndarray, float, bool]:
    """Maximize ``objective`` within bounds; return (x, value, converged)."""
    lows = [lo if lo is not None else -np.inf for lo, _ in bounds]
    highs = [hi if hi is not None else np.inf for _, hi in bounds]
    x0 = np.clip(np.asarray(x0, dtype=float), lows, highs)

    def negated(x):
        # Line searches may probe a hair outside the box; evaluate at the
        # nearest feasible point instead.
        value = objective(np.clip(x, lows, highs))
        return -value if math.isfinite(value) else 1e300

    best_x, best_val = x0, objective(x0)
    converged = False
    primary = minimize(negated, x0, method="L-BFGS-B", bounds=bounds,
                       options={"ftol": FTOL, "maxiter": 500})
    if -primary.fun > best_val:
        best_x, best_val = primary.x, -primary.fun
    converged = bool(primary.success)
    if not primary.success:
        fallback = minimize(negated, x0, method="Powell", bounds=bounds,
                            options={"ftol": FTOL, "xtol": 1e-10,
                                     "maxiter": 2000})
        if -fallback.fun > best_val:
            best_x, best_val = fallback.x, -fallback.fun
            converged = bool(fallback.success)
    return np.clip(np.asarray(best_x, dtype=float), lows, highs), \
        best_val, converged


Q_BOUNDS = (EPS, 1.0 - EPS)
GAMMA_BOUNDS = (0.0, None)


# ---------------------------------------------------------------------------
# Per-model fits
# ---------------------------------------------------------------------------

def _fit_null_fixed(sample: DistanceSample) -> FitResult:
    lo = sample.max_d
    window = max(4 * sample.max_d, 256)
    support = sample.support.astype(float)
    counts = sample.counts.astype(float)
    n = float(sample.total)
    converged = True
    while True:
        grid = np.arange(lo, lo + window + 1, dtype=float)
        slack = np.log(grid[:, None] + 1.0 - support[None, :])
        ll = (
            n * (math.log(2.0) - np.log(grid) - np.log(grid + 1.0))
            + slack @ counts
        )
        best = int(np.argmax(ll))
        if best < len(grid) - 1:
            break
        if window > 1_000_000:
            converged = False  # pathological sample; report the window edge
            break
        window *= 4
    params = m.NullParams(int(grid[best]))
    return _result(Model.NULL_FIXED, params, float(ll[best]), sample.total,
                   converged)


def _fit_null_mixture(sample, per_length) -> FitResult:
    by_length, lengths = per_length
    params = m.MixtureNullParams(lengths)
    log_l = m.log_likelihood(Model.NULL_MIXTURE, params,
                             per_length=per_length)
    return _result(Model.NULL_MIXTURE, params, log_l, sample.total, True)


def _fit_geometric(sample: DistanceSample) -> FitResult:
    def objective(x):
        return m.log_likelihood(
            Model.GEOMETRIC, m.GeometricParams(float(x[0])), sample
        )

    x0 = [initial_values(Model.GEOMETRIC, sample).q]
    x, log_l, conv = _maximize(objective, x0, [Q_BOUNDS])
    return _result(Model.GEOMETRIC, m.GeometricParams(float(x[0])), log_l,
                   sample.total, conv)


def _fit_geometric_trunc(sample: DistanceSample) -> FitResult:
    d_max = sample.max_d

    def objective(x):
        return m.log_likelihood(
            Model.GEOMETRIC_TRUNC,
            m.TruncatedGeometricParams(float(x[0]), d_max), sample,
        )

    x0 = [initial_values(Model.GEOMETRIC_TRUNC, sample).q]
    x, log_l, conv = _maximize(objective, x0, [Q_BOUNDS])
    return _result(Model.GEOMETRIC_TRUNC,
                   m.TruncatedGeometricParams(float(x[0]), d_max),
                   log_l, sample.total, conv)


def _fit_zeta_trunc(sample: DistanceSample) -> FitResult:
    d_max = sample.max_d

    def objective(x):
        return m.log_likelihood(
            Model.ZETA_TRUNC, m.ZetaParams(float(x[0]), d_max), sample
        )

    x0 = [initial_values(Model.ZETA_TRUNC, sample).gamma]
    x, log_l, conv = _maximize(objective, x0, [GAMMA_BOUNDS])
    return _result(Model.ZETA_TRUNC, m.ZetaParams(float(x[0]), d_max),
                   log_l, sample.total, conv)


def _optimize_two_regime_geometric(
    sample: DistanceSample, break_point: int, d_max: int | None
) -> tuple[m.ModelParams, float, bool]:
    """Best (q1, q2) at a fixed break point (regression-seeded)."""
    q1_init, q2_init = _regime_q_inits(sample, break_point)

    if d_max is None:
        def build(x):
            return m.TwoRegimeGeometricParams(
                float(x[0]), float(x[1]), break_point
            )
        model = Model.TWO_REGIME_GEOMETRIC
    else:
        def build(x):
            return m.TruncatedTwoRegimeGeometricParams(
                float(x[0]), float(x[1]), break_point, d_max
            )
        model = Model.TWO_REGIME_GEOMETRIC_TRUNC

    def objective(x):
        return m.log_likelihood(model, build(x), sample)

    x, log_l, conv = _maximize(objective, [q1_init, q2_init],
                               [Q_BOUNDS, Q_BOUNDS])
    return build(x), log_l, conv


def _optimize_zeta_geometric(
    sample: DistanceSample, break_point: int, d_max: int | None
) -> tuple[m.ModelParams, float, bool]:
    """Best (gamma, q) at a fixed break point."""
    gamma_init = _gamma_init(sample, upto=break_point)
    q_init = _tail_q_init(sample, break_point)

    if d_max is None:
        def build(x):
            return m.ZetaGeometricParams(
                float(x[0]), float(x[1]), break_point
            )
        model = Model.ZETA_GEOMETRIC
    else:
        def build(x):
            return m.TruncatedZetaGeometricParams(
                float(x[0]), float(x[1]), break_point, d_max
            )
        model = Model.ZETA_GEOMETRIC_TRUNC

    def objective(x):
        return m.log_likelihood(model, build(x), sample)

    x, log_l, conv = _maximize(objective, [gamma_init, q_init],
                               [GAMMA_BOUNDS, Q_BOUNDS])
    return build(x), log_l, conv


def _fit_two_regime(model: Model, sample: DistanceSample,
                    min_distinct: int) -> FitResult:
    if sample.distinct < min_distinct:
        return _excluded(
            model, sample.total,
            f"needs >= {min_distinct} distinct distances, "
            f"sample has {sample.distinct}",
        )
    d_max = sample.max_d if model.is_truncated else None
    if model in (Model.TWO_REGIME_GEOMETRIC,
                 Model.TWO_REGIME_GEOMETRIC_TRUNC):
        optimize = _optimize_two_regime_geometric
    else:
        optimize = _optimize_zeta_geometric

    best_params, best_ll, best_conv = None, float("-inf"), False
    for bp in _break_grid(sample):
        params, log_l, conv = optimize(sample, bp, d_max)
        if log_l > best_ll:
            best_params, best_ll, best_conv = params, log_l, conv
    return _result(model, best_params, best_ll, sample.total, best_conv)


def fit(
    model: Model,
    sample: DistanceSample,
    per_length: PerLength | None = None,
    *,
    min_distinct_d: int = DEFAULT_MIN_DISTINCT,
) -> FitResult:
    """Fit one model to a sample by maximum likelihood.

    Unmet model requirements (too few distinct distances, missing
    per-length data) mark the result excluded instead of raising; a
    non-converged optimizer returns the best parameters found with
    ``converged=False``.
    """
    if model is Model.NULL_FIXED:
        return _fit_null_fixed(sample)
    if model is Model.NULL_MIXTURE:
        if per_length is None:
            return _excluded(model, sample.total,
                             "needs per-length samples")
        return _fit_null_mixture(sample, per_length)
    if model is Model.GEOMETRIC:
        return _fit_geometric(sample)
    if model is Model.GEOMETRIC_TRUNC:
        return _fit_geometric_trunc(sample)
    if model is Model.ZETA_TRUNC:
        return _fit_zeta_trunc(sample)
    if model.is_two_regime:
        return _fit_two_regime(model, sample, min_distinct_d)
    raise ValueError(f"unhandled model {model}")


# ---------------------------------------------------------------------------
# Model selection
# ---------------------------------------------------------------------------

MIXED_ENSEMBLE = [
    Model.NULL_MIXTURE, Model.GEOMETRIC, Model.GEOMETRIC_TRUNC,
    Model.TWO_REGIME_GEOMETRIC, Model.TWO_REGIME_GEOMETRIC_TRUNC,
    Model.ZETA_TRUNC, Model.ZETA_GEOMETRIC, Model.ZETA_GEOMETRIC_TRUNC,
]

FIXED_ENSEMBLE = [
    Model.NULL_FIXED, Model.GEOMETRIC, Model.GEOMETRIC_TRUNC,
    Model.TWO_REGIME_GEOMETRIC, Model.TWO_REGIME_GEOMETRIC_TRUNC,
    Model.ZETA_TRUNC, Model.ZETA_GEOMETRIC, Model.ZETA_GEOMETRIC_TRUNC,
]


def ensemble_for(mode: str) -> list[Model]:
    """Model set per analysis mode: mixed lengths use the length-mixture
    null, fixed lengths and artificial samples the bounded-uniform null."""
    if mode == "mixed":
        return list(MIXED_ENSEMBLE)
    if mode in ("fixed", "artificial"):
        return list(FIXED_ENSEMBLE)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class SelectionReport:
    """All fits for one sample plus the winner under one criterion."""

    criterion: str                      # "aic" or "bic"
    fits: dict[Model, FitResult]
    best: Model | None
    deltas: dict[Model, float]
    sample_label: str = ""

    def criterion_value(self, model: Model) -> float:
        fit_result = self.fits[model]
        return fit_result.aic if self.criterion == "aic" else fit_result.bic


def _better(a: tuple[float, int, int], b: tuple[float, int, int]) -> bool:
    # (criterion, K, ensemble order): ties prefer fewer parameters, then
    # the lower model id.
    return a < b


def select(
    sample: DistanceSample,
    model_set: Sequence[Model] | None = None,
    criterion: str = "aic",
    per_length: PerLength | None = None,
    *,
    min_distinct_d: int = DEFAULT_MIN_DISTINCT,
) -> SelectionReport:
    """Fit every applicable model and pick the criterion minimizer."""
    if criterion not in ("aic", "bic"):
        raise ValueError("criterion must be 'aic' or 'bic'")
    if model_set is None:
        model_set = ensemble_for("mixed" if per_length else "fixed")

    fits: dict[Model, FitResult] = {}
    for model in model_set:
        fits[model] = fit(model, sample, per_length,
                          min_distinct_d=min_distinct_d)

    scored = {
        model: (result.aic if criterion == "aic" else result.bic)
        for model, result in fits.items() if not result.excluded
    }
    if not scored:
        return SelectionReport(criterion, fits, None, {},
                               sample_label=sample.label())
    best = None
    best_key = None
    for model, value in scored.items():
        key = (value, model.k, model.order)
        if best_key is None or _better(key, best_key):
            best, best_key = model, key
    floor = min(scored.values())
    deltas = {model: value - floor for model, value in scored.items()}
    return SelectionReport(criterion, fits, best, deltas,
                           sample_label=sample.label())


# ---------------------------------------------------------------------------
# Threshold robustness scan
# ---------------------------------------------------------------------------

FAMILY_PREFERENCE = ["0", "1-2", "5", "3-4", "6-7"]  # ties resolved in order
TWO_REGIME_FAMILIES = {"3-4", "6-7"}


def threshold_scan(
    reports_by_length: Mapping[int, SelectionReport],
    sentence_counts: Mapping[int, int],
    thresholds: Iterable[int],
) -> dict[int, str | None]:
    """Most-voted best-model family under minimum-sentence-count thresholds.

    For each threshold t, lengths observed in fewer than t sentences are
    dropped and the remaining best models are aggregated into families
    {0, 1-2, 3-4, 5, 6-7}.  Ties go to families without two regimes (and
    then to the lower family id).  A threshold that filters everything out
    maps to None.
    """
    results: dict[int, str | None] = {}
    for t in thresholds:
        votes: dict[str, int] = {}
        for n, report in reports_by_length.items():
            if sentence_counts.get(n, 0) < t or report.best is None:
                continue
            family = report.best.family
            votes[family] = votes.get(family, 0) + 1
        if not votes:
            results[t] = None
            continue
        results[t] = min(
            votes,
            key=lambda fam: (-votes[fam], FAMILY_PREFERENCE.index(fam)),
        )
    return results


# ---------------------------------------------------------------------------
# Slope analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlopeSummary:
    """Decay-rate comparison of the two regimes of a fitted model.

    The slope of a geometric curve in log-linear scale is log(1 - q); for
    the zeta-geometric models the first-regime rate is approximated by
    refitting the two-regime geometric with the break point frozen.
    """

    q1: float
    q2: float
    ratio: float
    slope1: float
    slope2: float
    converged: bool


def geometric_log_slope(q: float) -> float:
    """Slope log(1 - q) of a geometric pmf in log-linear scale."""
    return math.log1p(-q)


def slope_analysis(fit_result: FitResult,
                   sample: DistanceSample) -> SlopeSummary:
    """Extract (q1, q2) slopes from a fitted two-regime model."""
    model, params = fit_result.model, fit_result.params
    if not model.is_two_regime or params is None:
        raise ValueError("slope analysis needs a fitted two-regime model")

    if model in (Model.TWO_REGIME_GEOMETRIC,
                 Model.TWO_REGIME_GEOMETRIC_TRUNC):
        q1, q2 = params.q1, params.q2
        converged = fit_result.converged
    else:
        # Approximate the power-law regime with a geometric one: refit the
        # two-regime geometric at the original break point, keep its q1, and
        # keep the original geometric tail rate as q2.
        d_max = sample.max_d if model.is_truncated else None
        refit_params, _, converged = _optimize_two_regime_geometric(
            sample, params.break_point, d_max
        )
        q1 = refit_params.q1
        q2 = params.q
    return SlopeSummary(
        q1=q1, q2=q2, ratio=q1 / q2,
        slope1=geometric_log_slope(q1), slope2=geometric_log_slope(q2),
        converged=converged,
    )
