"""Convertibility decisions: majorization, conversion probability, ratio evidence.

Deterministic conversion of pure bipartite states is majorization of the
Schmidt weights; stochastic single-copy conversion is governed by the
ratio of tail functions. Finite data cannot prove a liminf, so the
stochastic verdicts here are evidence-based with an explicit Undecided
state: convertibility is asserted only when the windowed running minimum
provably stabilizes and nothing beyond the window contradicts it, and
non-convertibility only on hard rank facts, certified drift, or record
witnesses.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidFamily, TruncationUnsafe, WindowTooSmall
from .families import pair_ratio
from .numutil import NEG_INF
from .oscillation import (
    OscillationCertificate,
    ProbeReport,
    TrendClass,
    TrendThresholds,
    classify_trend,
    default_window,
    probe_pair,
    trend_flags,
)
from .spectrum import (
    SchmidtSpectrum,
    safe_horizon,
    tail_function,
    vidal_conditions,
)

_MAX_TREND_POINTS = 65536


class Verdict(Enum):
    TwoWay = "TwoWay"
    OneWayAtoB = "OneWayAtoB"
    OneWayBtoA = "OneWayBtoA"
    Incomparable = "Incomparable"
    Undecided = "Undecided"


class _Ev(Enum):
    YES = "yes"
    NO = "no"
    UND = "undecided"


@dataclass(frozen=True)
class ComparisonReport:
    """Outcome of a stochastic-convertibility comparison."""

    verdict: Verdict
    log_epsilon_a_to_b: float
    log_epsilon_b_to_a: float
    window: tuple
    trend_forward: TrendClass | None
    trend_reverse: TrendClass | None
    witnesses: OscillationCertificate | None = None
    probability: float | None = None
    evidence: dict | None = None

    @property
    def epsilon_a_to_b(self) -> float:
        return _safe_exp(self.log_epsilon_a_to_b)

    @property
    def epsilon_b_to_a(self) -> float:
        return _safe_exp(self.log_epsilon_b_to_a)

    def to_dict(self):
        return {
            "verdict": self.verdict.value,
            "epsilon": {
                "a_to_b": self.epsilon_a_to_b,
                "b_to_a": self.epsilon_b_to_a,
                "log_a_to_b": self.log_epsilon_a_to_b,
                "log_b_to_a": self.log_epsilon_b_to_a,
            },
            "window": [int(self.window[0]), int(self.window[1])],
            "trend": {
                "forward": self.trend_forward.value if self.trend_forward else None,
                "reverse": self.trend_reverse.value if self.trend_reverse else None,
            },
            "witnesses": self.witnesses.to_dict() if self.witnesses else None,
            "probability": self.probability,
            "evidence": self.evidence or {},
        }


def _safe_exp(x: float) -> float:
    if x == NEG_INF:
        return 0.0
    if x > 709.0:
        return sys.float_info.max
    return math.exp(x)


def _padded_log_g(a: SchmidtSpectrum, b: SchmidtSpectrum):
    """Tail-function logs of both spectra padded to a common horizon.

    Only valid for exact states, whose g is exactly zero past the rank.
    """
    ga = tail_function(a).log_g
    gb = tail_function(b).log_g
    n = max(ga.size, gb.size)
    pad = lambda g: np.concatenate((g, np.full(n - g.size, NEG_INF)))
    return pad(ga), pad(gb)


def _require_exact(a: SchmidtSpectrum, b: SchmidtSpectrum, what: str):
    if not (a.is_exact and b.is_exact):
        raise TruncationUnsafe(
            f"{what} needs exact finite-rank spectra; a certified tail can flip "
            "the comparison beyond the stored horizon"
        )


def locc_convertible(a: SchmidtSpectrum, b: SchmidtSpectrum) -> bool:
    """Deterministic convertibility a -> b: weights of a majorized by b's.

    Equivalent to g_a(n) >= g_b(n) at every n. A violation inside the
    stored ranges settles the answer for truncated inputs too; otherwise
    both spectra must be exact.
    """
    if not (a.is_exact and b.is_exact):
        ga, gb = tail_function(a).log_g, tail_function(b).log_g
        m = min(ga.size, gb.size)
        if np.any(ga[:m] < gb[:m]):
            return False
        _require_exact(a, b, "majorization")
    ga, gb = _padded_log_g(a, b)
    return bool(np.all(ga >= gb))


def max_probability(a: SchmidtSpectrum, b: SchmidtSpectrum) -> float:
    """Largest success probability of converting a into b stochastically.

    min over n of g_a(n)/g_b(n), clamped to [0, 1]; exactly 1.0 whenever
    a majorizes into b, exactly 0.0 when b has larger rank.
    """
    _require_exact(a, b, "conversion probability")
    ga, gb = _padded_log_g(a, b)
    support = gb > NEG_INF
    diffs = ga[support] - gb[support]
    if np.any(ga[support] == NEG_INF):
        return 0.0
    m = float(np.min(diffs))
    if m >= 0.0:
        return 1.0
    # contract: exactly 1.0 iff majorization holds, so a strictly negative
    # log minimum must not round up to 1.0
    return min(math.exp(m), math.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class _Direction:
    evidence: _Ev
    grade: str


def _direction(no: bool, yes: bool, no_grade: str, yes_grade: str) -> _Direction:
    if no:
        return _Direction(_Ev.NO, no_grade)
    if yes:
        return _Direction(_Ev.YES, yes_grade)
    return _Direction(_Ev.UND, "insufficient")


def _verdict(fwd: _Ev, bwd: _Ev) -> Verdict:
    table = {
        (_Ev.YES, _Ev.YES): Verdict.TwoWay,
        (_Ev.YES, _Ev.NO): Verdict.OneWayAtoB,
        (_Ev.NO, _Ev.YES): Verdict.OneWayBtoA,
        (_Ev.NO, _Ev.NO): Verdict.Incomparable,
    }
    return table.get((fwd, bwd), Verdict.Undecided)


def _windowed_evidence(a, b, window, th):
    """Shared evidence assembly for one ordered pair over a window.

    Returns (fwd, bwd, probe, (log eps fwd, log eps bwd), (trend fwd, trend bwd)).
    """
    n_min, n_max = int(window[0]), int(window[1])
    if n_min < 0 or n_max < n_min:
        raise ValueError(f"bad window {window}")
    tfa, tfb = tail_function(a), tail_function(b)
    mat_hi = min(n_max, safe_horizon(a, tfa, th.truncation_rtol),
                 safe_horizon(b, tfb, th.truncation_rtol))
    pair = pair_ratio(a, b)
    if n_max > mat_hi and not (pair is not None and pair.oscillating):
        raise TruncationUnsafe(
            f"window end {n_max} beyond the truncation-safe horizon {mat_hi} "
            "and the pair has no analytic continuation"
        )
    ns = np.arange(n_min, mat_hi + 1)
    values = tfa.log_g[ns] - tfb.log_g[ns]

    # rank facts: one g hitting zero while the other is positive decides
    # both directions outright (zero is terminal, so at most one side hits
    # it first), no matter how short the finite overlap is
    a_exhausted = bool(np.any((tfa.log_g[ns] == NEG_INF) & (tfb.log_g[ns] > NEG_INF)))
    b_exhausted = bool(np.any((tfb.log_g[ns] == NEG_INF) & (tfa.log_g[ns] > NEG_INF)))
    finite = np.isfinite(values)
    ns, values = ns[finite], values[finite]

    if a_exhausted or b_exhausted:
        fwd = _Direction(_Ev.NO if a_exhausted else _Ev.YES, "rank")
        bwd = _Direction(_Ev.NO if b_exhausted else _Ev.YES, "rank")
        eps_ab = float(np.min(values)) if values.size else NEG_INF
        eps_ba = float(-np.max(values)) if values.size else NEG_INF
        trend_f = classify_trend(values, th) if values.size >= th.min_points else None
        trend_r = classify_trend(-values, th) if values.size >= th.min_points else None
        empty = ProbeReport((), (), False, False, False)
        return fwd, bwd, empty, (eps_ab, eps_ba), (trend_f, trend_r)

    if values.size < th.min_points:
        raise WindowTooSmall(
            f"{values.size} finite window points < minimum {th.min_points}"
        )
    if values.size > _MAX_TREND_POINTS:
        stride = int(math.ceil(values.size / _MAX_TREND_POINTS))
        keep = np.arange(0, values.size, stride)
        if keep[-1] != values.size - 1:
            keep = np.append(keep, values.size - 1)
        ns, values = ns[keep], values[keep]

    flags = trend_flags(values, th)
    probe = probe_pair(a, b, window, th)

    step = th.witness_step_nats
    fwd = _direction(
        no=flags.down_div or len(probe.down_records) >= th.min_witnesses or probe.slow_down,
        yes=flags.min_stable and probe.down_env_drop < step and not probe.slow_down,
        no_grade="trend" if flags.down_div else (
            "witnesses" if len(probe.down_records) >= th.min_witnesses else "slow-drift"),
        yes_grade="stable-minimum",
    )
    bwd = _direction(
        no=flags.up_div or len(probe.up_records) >= th.min_witnesses or probe.slow_up,
        yes=flags.max_stable and probe.up_env_gain < step and not probe.slow_up,
        no_grade="trend" if flags.up_div else (
            "witnesses" if len(probe.up_records) >= th.min_witnesses else "slow-drift"),
        yes_grade="stable-maximum",
    )

    eps_ab = float(np.min(values)) if values.size else NEG_INF
    eps_ba = float(-np.max(values)) if values.size else NEG_INF
    trend_f = classify_trend(values, th)
    trend_r = classify_trend(-values, th)
    return fwd, bwd, probe, (eps_ab, eps_ba), (trend_f, trend_r)


def slocc_decide(
    a: SchmidtSpectrum,
    b: SchmidtSpectrum,
    window=None,
    thresholds: TrendThresholds | None = None,
) -> ComparisonReport:
    """Stochastic-convertibility verdict for a pair of spectra.

    Exact finite-rank pairs are decided by Schmidt rank (with the exact
    conversion probability attached). Truncated pairs are decided from
    the windowed log-ratio: stabilized extremes assert convertibility,
    certified drift or record witnesses deny it, and a full two-sided
    certificate yields Incomparable. Anything short of evidence stays
    Undecided rather than guessing.
    """
    th = thresholds or TrendThresholds()

    if a.is_exact and b.is_exact:
        fwd = a.length >= b.length
        bwd = b.length >= a.length
        verdict = _verdict(_Ev.YES if fwd else _Ev.NO, _Ev.YES if bwd else _Ev.NO)
        ga, gb = _padded_log_g(a, b)
        m = min(a.length, b.length)
        diffs = ga[:m] - gb[:m]
        report_window = (0, max(a.length, b.length))
        trend = None
        return ComparisonReport(
            verdict=verdict,
            log_epsilon_a_to_b=float(np.min(diffs)),
            log_epsilon_b_to_a=float(-np.max(diffs)),
            window=report_window,
            trend_forward=trend,
            trend_reverse=trend,
            probability=max_probability(a, b),
            evidence={"forward": "rank", "backward": "rank"},
        )

    if window is None:
        window = default_window(a, b, th)
    fwd, bwd, probe, (eps_ab, eps_ba), (trend_f, trend_r) = _windowed_evidence(a, b, window, th)

    witnesses = None
    if (len(probe.up_records) >= th.min_witnesses
            and len(probe.down_records) >= th.min_witnesses):
        witnesses = OscillationCertificate(
            probe.up_records, probe.down_records, (int(window[0]), int(window[1]))
        )

    return ComparisonReport(
        verdict=_verdict(fwd.evidence, bwd.evidence),
        log_epsilon_a_to_b=eps_ab,
        log_epsilon_b_to_a=eps_ba,
        window=(int(window[0]), int(window[1])),
        trend_forward=trend_f,
        trend_reverse=trend_r,
        witnesses=witnesses,
        probability=None,
        evidence={"forward": fwd.grade, "backward": bwd.grade},
    )


@dataclass(frozen=True)
class MonotoneEstimate:
    """Estimated location of a state against a totally ordered family.

    ``r_minus`` bounds where the ratio's liminf starts vanishing,
    ``r_plus`` where its limsup becomes finite; a strict gap certifies
    that the state is incomparable to every family member in between.
    """

    r_minus: float
    r_plus: float
    per_r: tuple
    undecided_band: tuple
    orientation: str = "higher r converts to lower r"

    def __post_init__(self):
        if self.r_minus > self.r_plus:
            raise ValueError("r_minus must not exceed r_plus")

    def to_dict(self):
        return {
            "r_minus": self.r_minus,
            "r_plus": self.r_plus,
            "per_r": [[r, v.value] for r, v in self.per_r],
            "undecided_band": list(self.undecided_band),
            "orientation": self.orientation,
        }


def estimate_r_bounds(
    psi: SchmidtSpectrum,
    family_gen,
    r_min: float,
    r_max: float,
    steps: int,
    window=None,
    thresholds: TrendThresholds | None = None,
) -> MonotoneEstimate:
    """Bracket a state inside a parameterized reference family.

    ``family_gen(r)`` must yield a valid spectrum per sampled r (checked
    via the four tail-function conditions). For each r the liminf and
    limsup of g_psi/g_(family r) are classified with the same evidence
    machinery as :func:`slocc_decide`:

    * r_minus estimates inf{r : liminf vanishes}; evidence at the lowest
      sampled r pins it there, otherwise one grid step below the first
      evidenced r (the infimum of an open evidence set).
    * r_plus estimates inf{r : limsup finite}; with no finite-limsup
      evidence anywhere it falls back to r_max.

    Sampled r without evidence either way land in ``undecided_band``;
    if everything is undecided the estimate degrades to the full span.
    """
    th = thresholds or TrendThresholds()
    if steps < 1:
        raise ValueError("steps must be >= 1")
    rs = np.linspace(r_min, r_max, steps)
    grid = (r_max - r_min) / (steps - 1) if steps > 1 else 0.0

    per_r = []
    band = []
    liminf_zero = []
    limsup_finite = []
    for r in rs:
        member = family_gen(float(r))
        if not vidal_conditions(member).all_pass:
            raise InvalidFamily(f"family member at r={r} fails tail-function conditions")
        try:
            fwd, bwd, probe, _, _ = _windowed_evidence(
                psi, member, window or default_window(psi, member, th), th
            )
            fe, be = fwd.evidence, bwd.evidence
        except WindowTooSmall:
            fe = be = _Ev.UND
        per_r.append((float(r), _verdict(fe, be)))
        if fe is _Ev.UND or be is _Ev.UND:
            band.append(float(r))
        if fe is _Ev.NO:
            liminf_zero.append(float(r))
        if be is _Ev.YES:
            limsup_finite.append(float(r))

    if liminf_zero:
        r_minus = max(r_min, min(liminf_zero) - grid)
    elif len(band) == len(per_r):
        r_minus = float(r_min)
    else:
        r_minus = float(r_max)

    if limsup_finite:
        r_plus = min(limsup_finite)
    else:
        r_plus = float(r_max)

    r_minus = min(max(float(r_minus), float(r_min)), float(r_max))
    r_plus = min(max(float(r_plus), float(r_min)), float(r_max))
    if r_minus > r_plus:
        r_minus = r_plus
    return MonotoneEstimate(r_minus, r_plus, tuple(per_r), tuple(band))
