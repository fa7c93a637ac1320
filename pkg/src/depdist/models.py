"""The eight-model ensemble for dependency distance distributions.

Support is the positive integers d = 1, 2, ...; truncated variants restrict
it to d <= d_max and renormalize.  The two-regime families decay at one rate
up to a break point and at another beyond it, with the two branches pinned to
the same value at the break.

Model ids (used in every report) and their free parameter counts K:

    0.0  uniform-shuffle null, p(d) proportional to d_max+1-d   K=1
    0.1  length-mixture null, no free parameter                 K=0
    1    geometric q(1-q)^(d-1)                                 K=1
    2    right-truncated geometric                              K=2
    3    two-regime geometric (q1, q2, break)                   K=3
    4    right-truncated two-regime geometric                   K=4
    5    right-truncated zeta d^(-gamma)/H(d_max, gamma)        K=2
    6    zeta first regime, geometric second                    K=3
    7    right-truncated zeta-geometric                         K=4

Log-likelihoods are computed in one pass from cached sufficient statistics
(N, M, M', and their restrictions to d <= break), never by rescanning the
sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Union

import numpy as np

from .treebank import DistanceSample, LengthDistribution

EPS = 1e-8  # q-like parameters live in [EPS, 1 - EPS]
NEG_INF = float("-inf")
LOG_TERM_FLOOR = -745.0  # log-probability terms below this count as -inf


class Model(Enum):
    """Member of the model ensemble; ``value`` is the report id."""

    NULL_FIXED = "0.0"
    NULL_MIXTURE = "0.1"
    GEOMETRIC = "1"
    GEOMETRIC_TRUNC = "2"
    TWO_REGIME_GEOMETRIC = "3"
    TWO_REGIME_GEOMETRIC_TRUNC = "4"
    ZETA_TRUNC = "5"
    ZETA_GEOMETRIC = "6"
    ZETA_GEOMETRIC_TRUNC = "7"

    @property
    def id(self) -> str:
        return self.value

    @property
    def k(self) -> int:
        """Number of free parameters."""
        return _K[self]

    @property
    def is_two_regime(self) -> bool:
        return self in _TWO_REGIME

    @property
    def is_truncated(self) -> bool:
        return self in _TRUNCATED

    @property
    def family(self) -> str:
        """Model family used when aggregating best-model votes."""
        return _FAMILY[self]

    @property
    def order(self) -> int:
        """Position in the canonical ensemble ordering (for tie-breaks)."""
        return _ORDER.index(self)

    @classmethod
    def from_id(cls, model_id: str) -> "Model":
        for member in cls:
            if member.value == model_id:
                return member
        raise ValueError(f"unknown model id {model_id!r}")


_ORDER = [
    Model.NULL_FIXED,
    Model.NULL_MIXTURE,
    Model.GEOMETRIC,
    Model.GEOMETRIC_TRUNC,
    Model.TWO_REGIME_GEOMETRIC,
    Model.TWO_REGIME_GEOMETRIC_TRUNC,
    Model.ZETA_TRUNC,
    Model.ZETA_GEOMETRIC,
    Model.ZETA_GEOMETRIC_TRUNC,
]

_K = {
    Model.NULL_FIXED: 1,
    Model.NULL_MIXTURE: 0,
    Model.GEOMETRIC: 1,
    Model.GEOMETRIC_TRUNC: 2,
    Model.TWO_REGIME_GEOMETRIC: 3,
    Model.TWO_REGIME_GEOMETRIC_TRUNC: 4,
    Model.ZETA_TRUNC: 2,
    Model.ZETA_GEOMETRIC: 3,
    Model.ZETA_GEOMETRIC_TRUNC: 4,
}

_TWO_REGIME = {
    Model.TWO_REGIME_GEOMETRIC,
    Model.TWO_REGIME_GEOMETRIC_TRUNC,
    Model.ZETA_GEOMETRIC,
    Model.ZETA_GEOMETRIC_TRUNC,
}

_TRUNCATED = {
    Model.NULL_FIXED,
    Model.GEOMETRIC_TRUNC,
    Model.TWO_REGIME_GEOMETRIC_TRUNC,
    Model.ZETA_TRUNC,
    Model.ZETA_GEOMETRIC_TRUNC,
}

_FAMILY = {
    Model.NULL_FIXED: "0",
    Model.NULL_MIXTURE: "0",
    Model.GEOMETRIC: "1-2",
    Model.GEOMETRIC_TRUNC: "1-2",
    Model.TWO_REGIME_GEOMETRIC: "3-4",
    Model.TWO_REGIME_GEOMETRIC_TRUNC: "3-4",
    Model.ZETA_TRUNC: "5",
    Model.ZETA_GEOMETRIC: "6-7",
    Model.ZETA_GEOMETRIC_TRUNC: "6-7",
}


# ---------------------------------------------------------------------------
# Parameter containers (tagged union)
# ---------------------------------------------------------------------------

def _check_q(name: str, value: float):
    if not (EPS <= value <= 1.0 - EPS):
        raise ValueError(f"{name}={value!r} outside [{EPS}, {1 - EPS}]")


def _check_positive_int(name: str, value: int):
    if not (isinstance(value, (int, np.integer)) and value >= 1):
        raise ValueError(f"{name}={value!r} must be a positive integer")


@dataclass(frozen=True)
class NullParams:
    """Uniform-shuffle null with an estimated support bound."""

    d_max: int

    def __post_init__(self):
        _check_positive_int("d_max", self.d_max)


@dataclass(frozen=True)
class MixtureNullParams:
    """Length-mixture null; fully determined by the length distribution."""

    lengths: LengthDistribution


@dataclass(frozen=True)
class GeometricParams:
    q: float

    def __post_init__(self):
        _check_q("q", self.q)


@dataclass(frozen=True)
class TruncatedGeometricParams:
    q: float
    d_max: int

    def __post_init__(self):
        _check_q("q", self.q)
        _check_positive_int("d_max", self.d_max)


@dataclass(frozen=True)
class TwoRegimeGeometricParams:
    q1: float
    q2: float
    break_point: int

    def __post_init__(self):
        _check_q("q1", self.q1)
        _check_q("q2", self.q2)
        _check_positive_int("break_point", self.break_point)


@dataclass(frozen=True)
class TruncatedTwoRegimeGeometricParams:
    q1: float
    q2: float
    break_point: int
    d_max: int

    def __post_init__(self):
        _check_q("q1", self.q1)
        _check_q("q2", self.q2)
        _check_positive_int("break_point", self.break_point)
        _check_positive_int("d_max", self.d_max)
        if self.break_point > self.d_max:
            raise ValueError("break_point > d_max")


@dataclass(frozen=True)
class ZetaParams:
    gamma: float
    d_max: int

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma={self.gamma!r} must be >= 0")
        _check_positive_int("d_max", self.d_max)


@dataclass(frozen=True)
class ZetaGeometricParams:
    gamma: float
    q: float
    break_point: int

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma={self.gamma!r} must be >= 0")
        _check_q("q", self.q)
        _check_positive_int("break_point", self.break_point)


@dataclass(frozen=True)
class TruncatedZetaGeometricParams:
    gamma: float
    q: float
    break_point: int
    d_max: int

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma={self.gamma!r} must be >= 0")
        _check_q("q", self.q)
        _check_positive_int("break_point", self.break_point)
        _check_positive_int("d_max", self.d_max)
        if self.break_point > self.d_max:
            raise ValueError("break_point > d_max")


ModelParams = Union[
    NullParams,
    MixtureNullParams,
    GeometricParams,
    TruncatedGeometricParams,
    TwoRegimeGeometricParams,
    TruncatedTwoRegimeGeometricParams,
    ZetaParams,
    ZetaGeometricParams,
    TruncatedZetaGeometricParams,
]

PARAM_TYPE = {
    Model.NULL_FIXED: NullParams,
    Model.NULL_MIXTURE: MixtureNullParams,
    Model.GEOMETRIC: GeometricParams,
    Model.GEOMETRIC_TRUNC: TruncatedGeometricParams,
    Model.TWO_REGIME_GEOMETRIC: TwoRegimeGeometricParams,
    Model.TWO_REGIME_GEOMETRIC_TRUNC: TruncatedTwoRegimeGeometricParams,
    Model.ZETA_TRUNC: ZetaParams,
    Model.ZETA_GEOMETRIC: ZetaGeometricParams,
    Model.ZETA_GEOMETRIC_TRUNC: TruncatedZetaGeometricParams,
}


def params_dict(params: ModelParams) -> dict[str, float | int]:
    """Flat parameter mapping for reports (length mixtures summarized)."""
    if isinstance(params, MixtureNullParams):
        return {"min_n": params.lengths.min_n, "max_n": params.lengths.max_n}
    return {
        name: getattr(params, name)
        for name in params.__dataclass_fields__  # type: ignore[attr-defined]
    }


# ---------------------------------------------------------------------------
# Normalization constants
# ---------------------------------------------------------------------------

def harmonic(d_max: int, gamma: float) -> float:
    """Generalized harmonic number: sum of k^(-gamma) for k = 1..d_max."""
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    return float(np.power(np.arange(1, d_max + 1, dtype=float), -gamma).sum())


def two_regime_geometric_constants(
    q1: float, q2: float, break_point: int, d_max: int | None = None
) -> tuple[float, float, float]:
    """Normalizers (c1, c2, tau) of the two-regime geometric models.

    The first regime c1*(1-q1)^(d-1) covers d <= break_point, the second
    c2*(1-q2)^(d-1) covers d > break_point, and tau makes both branches
    agree at the break, so c2 = tau*c1 with
    tau = ((1-q1)/(1-q2))^(break_point-1).  c1 follows from total mass 1:
    c1*(S1 + tau*S2) = 1 with S1 the first-regime geometric sum and S2 the
    (possibly truncated) second-regime sum.
    """
    log1m_q1 = math.log1p(-q1)
    log1m_q2 = math.log1p(-q2)
    tau = math.exp((break_point - 1) * (log1m_q1 - log1m_q2))
    s1 = -math.expm1(break_point * log1m_q1) / q1
    if d_max is None:
        s2 = math.exp(break_point * log1m_q2) / q2
    else:
        if break_point > d_max:
            raise ValueError("break_point > d_max")
        s2 = (
            math.exp(break_point * log1m_q2)
            - math.exp(d_max * log1m_q2)
        ) / q2
    c1 = 1.0 / (s1 + tau * s2)
    return c1, tau * c1, tau


def zeta_geometric_constants(
    gamma: float, q: float, break_point: int, d_max: int | None = None
) -> tuple[float, float, float]:
    """Normalizers (c1, c2, tau) of the zeta-geometric models.

    First regime c1*d^(-gamma) for d <= break_point, second regime
    c2*(1-q)^(d-1) beyond it; tau = break^(-gamma)/(1-q)^(break-1) pins the
    branches together at the break and c1 = 1/(H(break, gamma) + tau*S2).
    """
    log1m_q = math.log1p(-q)
    tau = math.exp(-gamma * math.log(break_point) - (break_point - 1) * log1m_q)
    s1 = harmonic(break_point, gamma)
    if d_max is None:
        s2 = math.exp(break_point * log1m_q) / q
    else:
        if break_point > d_max:
            raise ValueError("break_point > d_max")
        s2 = (math.exp(break_point * log1m_q) - math.exp(d_max * log1m_q)) / q
    c1 = 1.0 / (s1 + tau * s2)
    return c1, tau * c1, tau


# ---------------------------------------------------------------------------
# Probability mass
# ---------------------------------------------------------------------------

def log_pmf(model: Model, params: ModelParams, d) -> np.ndarray | float:
    """log p(d); -inf outside the support.  Accepts scalars or arrays."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr < 1) or np.any(d_arr != np.floor(d_arr)):
        raise ValueError("d must be a positive integer")
    out = _log_pmf_array(model, params, d_arr)
    if np.isscalar(d) or d_arr.ndim == 0:
        return float(out)
    return out


def pmf(model: Model, params: ModelParams, d) -> np.ndarray | float:
    """p(d) in [0, 1]; 0 outside the support."""
    lp = log_pmf(model, params, d)
    return np.exp(lp) if isinstance(lp, np.ndarray) else math.exp(lp)


def _log_pmf_array(model: Model, params, d: np.ndarray) -> np.ndarray:
    if model is Model.NULL_FIXED:
        d_max = params.d_max
        out = np.full(d.shape, NEG_INF)
        ok = d <= d_max
        out[ok] = (
            np.log(2.0 * (d_max + 1 - d[ok]))
            - math.log(d_max) - math.log(d_max + 1)
        )
        return out

    if model is Model.NULL_MIXTURE:
        # Marginal over sentence lengths: p(d) = sum_n p(d|n) p(n).
        prob = np.zeros(d.shape)
        for n, p_n in params.lengths.items():
            ok = d <= n - 1
            prob[ok] += p_n * 2.0 * (n - d[ok]) / (n * (n - 1.0))
        with np.errstate(divide="ignore"):
            return np.log(prob)

    if model is Model.GEOMETRIC:
        q = params.q
        return math.log(q) + (d - 1) * math.log1p(-q)

    if model is Model.GEOMETRIC_TRUNC:
        q, d_max = params.q, params.d_max
        out = np.full(d.shape, NEG_INF)
        ok = d <= d_max
        log_norm = math.log(-math.expm1(d_max * math.log1p(-q)))
        out[ok] = math.log(q) + (d[ok] - 1) * math.log1p(-q) - log_norm
        return out

    if model is Model.TWO_REGIME_GEOMETRIC:
        c1, c2, _ = two_regime_geometric_constants(
            params.q1, params.q2, params.break_point
        )
        return _two_regime_geom_log(d, params, c1, c2, None)

    if model is Model.TWO_REGIME_GEOMETRIC_TRUNC:
        c1, c2, _ = two_regime_geometric_constants(
            params.q1, params.q2, params.break_point, params.d_max
        )
        return _two_regime_geom_log(d, params, c1, c2, params.d_max)

    if model is Model.ZETA_TRUNC:
        gamma, d_max = params.gamma, params.d_max
        out = np.full(d.shape, NEG_INF)
        ok = d <= d_max
        out[ok] = -gamma * np.log(d[ok]) - math.log(harmonic(d_max, gamma))
        return out

    if model is Model.ZETA_GEOMETRIC:
        c1, c2, _ = zeta_geometric_constants(
            params.gamma, params.q, params.break_point
        )
        return _zeta_geom_log(d, params, c1, c2, None)

    if model is Model.ZETA_GEOMETRIC_TRUNC:
        c1, c2, _ = zeta_geometric_constants(
            params.gamma, params.q, params.break_point, params.d_max
        )
        return _zeta_geom_log(d, params, c1, c2, params.d_max)

    raise ValueError(f"unhandled model {model}")


def _two_regime_geom_log(d, params, c1, c2, d_max):
    out = np.full(d.shape, NEG_INF)
    first = d <= params.break_point
    second = ~first if d_max is None else (~first) & (d <= d_max)
    out[first] = math.log(c1) + (d[first] - 1) * math.log1p(-params.q1)
    out[second] = math.log(c2) + (d[second] - 1) * math.log1p(-params.q2)
    return out


def _zeta_geom_log(d, params, c1, c2, d_max):
    out = np.full(d.shape, NEG_INF)
    first = d <= params.break_point
    second = ~first if d_max is None else (~first) & (d <= d_max)
    out[first] = math.log(c1) - params.gamma * np.log(d[first])
    out[second] = math.log(c2) + (d[second] - 1) * math.log1p(-params.q)
    return out


def support_upper(model: Model, params: ModelParams) -> int | None:
    """d_max for truncated models, None for unbounded support."""
    if model is Model.NULL_MIXTURE:
        return params.lengths.max_n - 1
    d_max = getattr(params, "d_max", None)
    return int(d_max) if d_max is not None else None


def total_mass(model: Model, params: ModelParams, upto: int = 10_000) -> float:
    """Total probability mass, for normalization checks.

    Truncated models are summed over their full support.  Unbounded models
    are summed to ``upto`` and closed with the exact geometric tail of the
    second regime (never silently truncated).
    """
    bound = support_upper(model, params)
    if bound is not None:
        d = np.arange(1, bound + 1, dtype=float)
        return float(np.exp(_log_pmf_array(model, params, d)).sum())

    d = np.arange(1, upto + 1, dtype=float)
    head = float(np.exp(_log_pmf_array(model, params, d)).sum())
    if model is Model.GEOMETRIC:
        tail = math.exp(upto * math.log1p(-params.q))
    elif model is Model.TWO_REGIME_GEOMETRIC:
        c1, c2, _ = two_regime_geometric_constants(
            params.q1, params.q2, params.break_point
        )
        if upto < params.break_point:
            raise ValueError("summation cutoff below the break point")
        tail = c2 * math.exp(upto * math.log1p(-params.q2)) / params.q2
    elif model is Model.ZETA_GEOMETRIC:
        c1, c2, _ = zeta_geometric_constants(
            params.gamma, params.q, params.break_point
        )
        if upto < params.break_point:
            raise ValueError("summation cutoff below the break point")
        tail = c2 * math.exp(upto * math.log1p(-params.q)) / params.q
    else:
        raise ValueError(f"unhandled unbounded model {model}")
    return head + tail


# ---------------------------------------------------------------------------
# Sufficient statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SufficientStats:
    """Frequency-weighted sums that determine every log-likelihood.

    n_total (N), weighted_sum (M), log_weighted_sum (M') always; the starred
    variants restrict to d <= break_point; ``w`` is the slack sum
    sum f(d) log(d_max + 1 - d) and ``w_n`` its fixed-length twin
    sum f(d) log(n - d).
    """

    n_total: int
    weighted_sum: int
    log_weighted_sum: float
    n_upto: int | None = None
    weighted_upto: int | None = None
    log_weighted_upto: float | None = None
    w: float | None = None
    w_n: float | None = None


def sufficient_stats(
    sample: DistanceSample,
    break_point: int | None = None,
    d_max: int | None = None,
    n: int | None = None,
) -> SufficientStats:
    """Compute the statistics needed by the compact likelihood forms."""
    n_star = m_star = mlog_star = None
    if break_point is not None:
        n_star, m_star, mlog_star = sample.stats_upto(break_point)
    w = w_n = None
    if d_max is not None:
        if sample.max_d > d_max:
            raise ValueError("observed distance beyond d_max")
        w = float(
            (sample.counts * np.log(d_max + 1 - sample.support)).sum()
        )
    if n is not None:
        if sample.max_d > n - 1:
            raise ValueError("observed distance beyond n - 1")
        w_n = float((sample.counts * np.log(n - sample.support)).sum())
    return SufficientStats(
        n_total=sample.total,
        weighted_sum=sample.weighted_sum,
        log_weighted_sum=sample.log_weighted_sum,
        n_upto=n_star,
        weighted_upto=m_star,
        log_weighted_upto=mlog_star,
        w=w,
        w_n=w_n,
    )


# ---------------------------------------------------------------------------
# Log-likelihoods (compact sufficient-statistic forms)
# ---------------------------------------------------------------------------

PerLength = tuple[Mapping[int, DistanceSample], LengthDistribution]


def log_likelihood(
    model: Model,
    params: ModelParams,
    sample: DistanceSample | None = None,
    per_length: PerLength | None = None,
) -> float:
    """Log-likelihood of a sample under a model.

    Support violations (an observed d beyond d_max, or beyond n - 1 under
    the null models) yield -inf so optimizers reject the region; use
    :func:`supports` to distinguish that case from an underflow.
    """
    if model is Model.NULL_MIXTURE:
        if per_length is None:
            raise ValueError("length-mixture null needs per-length samples")
        by_length, _ = per_length
        total = 0.0
        for n, length_sample in sorted(by_length.items()):
            if length_sample.max_d > n - 1:
                return NEG_INF
            stats = sufficient_stats(length_sample, n=n)
            total += (
                stats.n_total * math.log(2.0 / (n * (n - 1.0))) + stats.w_n
            )
        return total

    if sample is None:
        raise ValueError("sample required")

    # Every pmf here is non-increasing in d, so the smallest per-term log
    # probability sits at the largest observed distance; when it underflows
    # past the double floor the whole likelihood becomes the rejection
    # sentinel (this also covers any support violation).
    if float(_log_pmf_array(
        model, params, np.asarray([float(sample.max_d)])
    )[0]) < LOG_TERM_FLOOR:
        return NEG_INF

    if model is Model.NULL_FIXED:
        d_max = params.d_max
        if sample.max_d > d_max:
            return NEG_INF
        stats = sufficient_stats(sample, d_max=d_max)
        return (
            stats.n_total * math.log(2.0 / (d_max * (d_max + 1.0))) + stats.w
        )

    if model is Model.GEOMETRIC:
        stats = sufficient_stats(sample)
        q = params.q
        return (
            stats.n_total * math.log(q)
            + (stats.weighted_sum - stats.n_total) * math.log1p(-q)
        )

    if model is Model.GEOMETRIC_TRUNC:
        q, d_max = params.q, params.d_max
        if sample.max_d > d_max:
            return NEG_INF
        stats = sufficient_stats(sample)
        log_norm = math.log(-math.expm1(d_max * math.log1p(-q)))
        return (
            stats.n_total * (math.log(q) - log_norm)
            + (stats.weighted_sum - stats.n_total) * math.log1p(-q)
        )

    if model in (Model.TWO_REGIME_GEOMETRIC,
                 Model.TWO_REGIME_GEOMETRIC_TRUNC):
        d_max = getattr(params, "d_max", None)
        if d_max is not None and sample.max_d > d_max:
            return NEG_INF
        c1, c2, _ = two_regime_geometric_constants(
            params.q1, params.q2, params.break_point, d_max
        )
        stats = sufficient_stats(sample, break_point=params.break_point)
        n, m = stats.n_total, stats.weighted_sum
        n_star, m_star = stats.n_upto, stats.weighted_upto
        return (
            n_star * math.log(c1)
            + (n - n_star) * math.log(c2)
            + (m_star - n_star)
            * (math.log1p(-params.q1) - math.log1p(-params.q2))
            + (m - n) * math.log1p(-params.q2)
        )

    if model is Model.ZETA_TRUNC:
        gamma, d_max = params.gamma, params.d_max
        if sample.max_d > d_max:
            return NEG_INF
        stats = sufficient_stats(sample)
        return (
            -gamma * stats.log_weighted_sum
            - stats.n_total * math.log(harmonic(d_max, gamma))
        )

    if model in (Model.ZETA_GEOMETRIC, Model.ZETA_GEOMETRIC_TRUNC):
        d_max = getattr(params, "d_max", None)
        if d_max is not None and sample.max_d > d_max:
            return NEG_INF
        c1, c2, _ = zeta_geometric_constants(
            params.gamma, params.q, params.break_point, d_max
        )
        stats = sufficient_stats(sample, break_point=params.break_point)
        n, m = stats.n_total, stats.weighted_sum
        n_star, m_star = stats.n_upto, stats.weighted_upto
        mlog_star = stats.log_weighted_upto
        return (
            n_star * math.log(c1)
            - params.gamma * mlog_star
            + (n - n_star) * math.log(c2)
            + (m - m_star - n + n_star) * math.log1p(-params.q)
        )

    raise ValueError(f"unhandled model {model}")


def supports(
    model: Model,
    params: ModelParams,
    sample: DistanceSample | None = None,
    per_length: PerLength | None = None,
) -> bool:
    """True when every observed distance lies inside the model's support."""
    if model is Model.NULL_MIXTURE:
        if per_length is None:
            return False
        by_length, _ = per_length
        return all(s.max_d <= n - 1 for n, s in by_length.items())
    bound = support_upper(model, params)
    return bound is None or sample.max_d <= bound
