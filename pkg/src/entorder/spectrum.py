"""Schmidt spectra in log domain: validation, tail functions, summaries.

A :class:`SchmidtSpectrum` holds the natural logs of the Schmidt weights
of a pure bipartite state, nonincreasing and normalized, plus an optional
certified bound on the mass beyond the stored horizon. All downstream
operations (majorization, conversion probability, ratio trends) consume
the tail function g(n) = sum of weights from index n on, also in log
domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    NonPositive,
    NotNormalized,
    NotSorted,
    ValidationError,
)
from .numutil import LN2, NEG_INF, log1mexp, logsumexp

#: relative tolerance for the normalization of a spectrum
NORMALIZATION_RTOL = 1e-9

#: adjacent log weights may invert by this much and still count as a tie,
#: absorbing rounding in analytically generated spectra
ORDER_LOG_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SchmidtSpectrum:
    """Nonincreasing, normalized Schmidt weights stored as natural logs.

    Attributes
    ----------
    log_weights:
        ln(weight) per index, nonincreasing, all finite.
    log_tail_bound:
        ln of a certified upper bound on the total weight beyond the
        stored horizon; ``-inf`` for exact finite-rank states.
    metadata:
        Provenance of analytic families (``family``, ``q``, ``r``, ``k``,
        ``delta``, ``offset``). Free of derived quantities.
    """

    log_weights: np.ndarray
    log_tail_bound: float = NEG_INF
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = np.asarray(self.log_weights, dtype=float).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "log_weights", arr)
        object.__setattr__(self, "log_tail_bound", float(self.log_tail_bound))

    @property
    def length(self) -> int:
        """Number of stored weights (the truncation horizon)."""
        return int(self.log_weights.size)

    @property
    def is_exact(self) -> bool:
        """True when the state is exactly finite rank (no hidden tail)."""
        return self.log_tail_bound == NEG_INF

    @property
    def tail_bound(self) -> float:
        """Linear-domain tail bound; underflows to 0.0 for tiny tails."""
        return math.exp(self.log_tail_bound) if not self.is_exact else 0.0

    def weights(self) -> np.ndarray:
        """Linear-domain weights (entries below ~1e-308 underflow to 0)."""
        return np.exp(self.log_weights)


@dataclass(frozen=True, eq=False)
class TailFunction:
    """g(n) = total weight at index n and beyond, natural-log domain.

    ``log_g`` has ``length + 1`` entries; the last one is the certified
    tail bound at the cut (``-inf`` for exact states).
    """

    log_g: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.log_g, dtype=float).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "log_g", arr)

    @property
    def horizon(self) -> int:
        return int(self.log_g.size - 1)

    def value(self, n: int) -> float:
        """g(n) in linear domain."""
        return float(np.exp(self.log_g[n]))


@dataclass(frozen=True)
class ConditionCheck:
    """Outcome of a single tail-function condition over the stored range."""

    ok: bool
    first_failing: int | None = None

    def to_dict(self):
        return {"ok": self.ok, "first_failing": self.first_failing}


@dataclass(frozen=True)
class ConditionReport:
    """The four conditions a valid tail function satisfies.

    ``positivity``: g(n) > 0, ``strict_monotonicity``: g(n) > g(n+1),
    ``convexity``: weights nonincreasing, ``normalization``: g(0) = 1.
    All four passing means the stored range is consistent with a genuine
    (possibly infinite dimensional) state.
    """

    positivity: ConditionCheck
    strict_monotonicity: ConditionCheck
    convexity: ConditionCheck
    normalization_ok: bool
    normalization_residual: float

    @property
    def all_pass(self) -> bool:
        return (
            self.positivity.ok
            and self.strict_monotonicity.ok
            and self.convexity.ok
            and self.normalization_ok
        )

    def to_dict(self):
        return {
            "positivity": self.positivity.to_dict(),
            "strict_monotonicity": self.strict_monotonicity.to_dict(),
            "convexity": self.convexity.to_dict(),
            "normalization": {
                "ok": self.normalization_ok,
                "residual": self.normalization_residual,
            },
            "all_pass": self.all_pass,
        }


def _normalization_residual(log_weights, log_tail_bound):
    """Midpoint residual of (sum of weights + tail interval) against 1.

    The stored sum S and the certified tail t bracket the true total in
    [S, S + t]; the residual reported is S + t/2 - 1.
    """
    log_s = logsumexp(log_weights)
    log_mid = np.logaddexp(log_s, log_tail_bound - LN2)
    tail = math.exp(log_tail_bound) if log_tail_bound != NEG_INF else 0.0
    return float(math.expm1(log_mid)), float(math.exp(log_s)), tail


def _validate_log_weights(log_weights, log_tail_bound, cut_certified):
    lw = np.asarray(log_weights, dtype=float)
    if lw.size == 0:
        raise ValidationError("spectrum must contain at least one weight")
    if not np.all(np.isfinite(lw)):
        raise NonPositive("all weights must be strictly positive and finite")
    diffs = np.diff(lw)
    if np.any(diffs > ORDER_LOG_TOL):
        bad = int(np.argmax(diffs > ORDER_LOG_TOL))
        raise ValidationError(
            f"log weights increase at index {bad} by more than {ORDER_LOG_TOL}"
        )
    if not (log_tail_bound == NEG_INF or np.isfinite(log_tail_bound)):
        raise ValidationError("tail bound must be finite or exactly zero (-inf log)")

    resid, total, tail = _normalization_residual(lw, log_tail_bound)
    # The true total lies in [S, S + tail]; 1 must be reachable inside
    # that interval up to NORMALIZATION_RTOL.
    if total > 1.0 + NORMALIZATION_RTOL or total + tail < 1.0 - NORMALIZATION_RTOL:
        raise NotNormalized(
            f"stored weights sum to {total!r} with tail bound {tail!r}; "
            f"residual {resid!r} exceeds {NORMALIZATION_RTOL}"
        )

    if log_tail_bound != NEG_INF and not cut_certified:
        # Proxy for ordering at the cut: the whole hidden mass must sit
        # below the last stored weight. Analytic generators certify the
        # cut directly instead (their tails can exceed the last weight
        # even though every hidden weight is ordered).
        if not (log_tail_bound < lw[-1]):
            raise ValidationError(
                "tail bound is not below the last stored weight; "
                "refine the truncation or certify the cut analytically"
            )


def make_spectrum(
    log_weights,
    log_tail_bound=NEG_INF,
    metadata=None,
    *,
    cut_certified=False,
) -> SchmidtSpectrum:
    """Build a spectrum from natural-log weights, validating invariants.

    ``cut_certified`` marks tails whose per-index ordering at the cut is
    guaranteed by the generating family, lifting the tail < last-weight
    proxy check.
    """
    _validate_log_weights(log_weights, log_tail_bound, cut_certified)
    return SchmidtSpectrum(
        np.asarray(log_weights, dtype=float),
        float(log_tail_bound),
        dict(metadata or {}),
    )


def build_spectrum(weights, strict_order: bool = False) -> SchmidtSpectrum:
    """Validate linear-domain weights into a :class:`SchmidtSpectrum`.

    Parameters
    ----------
    weights:
        Positive reals summing to 1 within ``NORMALIZATION_RTOL``.
    strict_order:
        When true, reject any out-of-order input instead of sorting.

    Raises
    ------
    NonPositive, NotSorted, NotNormalized
    """
    w = np.asarray(list(weights), dtype=float)
    if w.size == 0:
        raise ValidationError("weights must be nonempty")
    if not np.all(np.isfinite(w)):
        raise ValidationError("weights must all be finite")
    if np.any(w <= 0.0):
        raise NonPositive("weights must all be strictly positive")
    if strict_order:
        if np.any(np.diff(w) > 0):
            raise NotSorted("weights are not nonincreasing")
    else:
        w = np.sort(w)[::-1]
    log_w = np.log(w)
    resid, total, _ = _normalization_residual(log_w, NEG_INF)
    if abs(resid) > NORMALIZATION_RTOL:
        raise NotNormalized(f"weights sum to {total!r}, residual {resid!r}")
    return SchmidtSpectrum(log_w, NEG_INF, {})


def tail_function(s: SchmidtSpectrum) -> TailFunction:
    """Tail sums g(n) by reverse log-domain accumulation.

    g(length) is the certified tail bound. Accumulation leaves ln g(0)
    within one ulp of 0; the whole curve is shifted by that residual so
    g(0) = 1 holds exactly and ratio comparisons of two spectra agree at
    n = 0 by construction.
    """
    logs = np.append(s.log_weights, s.log_tail_bound)
    log_g = np.logaddexp.accumulate(logs[::-1])[::-1]
    log_g = log_g - log_g[0]
    if np.any(np.diff(log_g) >= 0):
        raise ValidationError("tail function is not strictly decreasing")
    return TailFunction(log_g)


def vidal_conditions(s: SchmidtSpectrum) -> ConditionReport:
    """Check the four tail-function conditions over the stored range.

    Strict positivity and strict monotonicity are evaluated on g; for an
    exact finite-rank state positivity fails right at the rank, where g
    hits zero. Convexity of g is equivalent to the weights being
    nonincreasing and is checked with a 1e-12 log tolerance so that
    analytic rounding ties still pass.
    """
    tf = tail_function(s)
    lg = tf.log_g

    pos_bad = np.nonzero(lg == NEG_INF)[0]
    positivity = ConditionCheck(pos_bad.size == 0, int(pos_bad[0]) if pos_bad.size else None)

    gdiff = np.diff(lg)
    mono_bad = np.nonzero(~(gdiff < 0))[0]
    strict_mono = ConditionCheck(mono_bad.size == 0, int(mono_bad[0]) if mono_bad.size else None)

    wdiff = np.diff(s.log_weights)
    conv_bad = np.nonzero(wdiff > ORDER_LOG_TOL)[0]
    convexity = ConditionCheck(conv_bad.size == 0, int(conv_bad[0]) if conv_bad.size else None)

    resid, total, tail = _normalization_residual(s.log_weights, s.log_tail_bound)
    norm_ok = (
        total <= 1.0 + NORMALIZATION_RTOL
        and total + tail >= 1.0 - NORMALIZATION_RTOL
    )
    return ConditionReport(positivity, strict_mono, convexity, norm_ok, resid)


def summary_stats(s: SchmidtSpectrum) -> dict:
    """Entropy (bits), Schmidt rank, and mean excitation number.

    The excitation count is per mode: sum of n * weight(n). The total
    photon number of the two-mode state is twice this value. For
    truncated analytic families the certified remainder of the
    excitation sum beyond the horizon is included when derivable from
    the family metadata.
    """
    lw = s.log_weights
    p = np.exp(lw)
    entropy_bits = float(-np.dot(p, lw) / LN2)
    mean_exc = float(np.dot(np.arange(s.length, dtype=float), p))
    if s.is_exact:
        rank = s.length
        exc_tail = 0.0
        log_exc_tail = None
    else:
        rank = "truncated"
        from .families import excitation_remainder_bound  # deferred: families imports us

        log_exc_tail = excitation_remainder_bound(s)
        # linear value may underflow to 0.0; the log field keeps the bound
        exc_tail = math.exp(min(log_exc_tail, 709.0)) if log_exc_tail is not None else None
    return {
        "entropy_bits": entropy_bits,
        "schmidt_rank": rank,
        "mean_excitation": mean_exc,
        "excitation_tail_bound": exc_tail,
        "log_excitation_tail_bound": log_exc_tail,
    }


def reconstruct_log_weights(tf: TailFunction) -> np.ndarray:
    """Recover log weights from a tail function: weight(n) = g(n) - g(n+1)."""
    lg = tf.log_g
    return lg[:-1] + log1mexp(np.minimum(lg[1:] - lg[:-1], -1e-300))


def safe_horizon(s: SchmidtSpectrum, tf: TailFunction | None = None, rtol: float = 1e-6) -> int:
    """Largest index n at which the tail bound perturbs ln g(n) by < rtol.

    Comparisons beyond this index would be contaminated by the unknown
    mass past the truncation. Exact states are safe over their whole
    stored range.
    """
    if s.is_exact:
        return s.length
    if tf is None:
        tf = tail_function(s)
    limit = s.log_tail_bound - math.log(rtol)
    # log_g is strictly decreasing; find the last index with log_g >= limit
    idx = np.searchsorted(-tf.log_g, -limit, side="right")
    return max(int(idx) - 1, 0)
