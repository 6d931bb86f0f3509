"""Trend analytics for log-ratio sequences and oscillation certificates.

A comparison between two states reduces to the sequence
ell(n) = ln g_a(n) - ln g_b(n). Whether ell stays bounded below, falls
away, or swings unboundedly both ways decides convertibility. Finite
windows cannot prove limits, so everything here produces evidence with
explicit thresholds:

* windowed running-extreme drift tests (``classify_trend``),
* record witnesses at targeted phases of the oscillating profile
  (``incomparability_certificate``), reaching indices far beyond any
  stored array via the analytic family forms carried in metadata,
* slow-drift detection for ratios that diverge like a power of ln ln n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import TooShort, TruncationUnsafe
from .families import PairRatio, pair_ratio
from .spectrum import SchmidtSpectrum, safe_horizon, tail_function


@dataclass(frozen=True)
class TrendThresholds:
    """Evidence thresholds for trend classification and witness search."""

    drift_nats: float = 5.0       # extreme must move this much over the 2nd half
    min_windows: int = 3          # dyadic sub-windows that must extend the extreme
    min_points: int = 64
    truncation_rtol: float = 1e-6  # max tail contamination of any ln g used
    witness_step_nats: float = 1.0
    min_witnesses: int = 5
    slow_min_total: float = 0.1    # smallest certified slow envelope drift
    slow_min_steps: int = 8
    slow_tail_ratio: float = 0.25  # late-range drift share that rules out convergence

    def __post_init__(self):
        if min(self.drift_nats, self.min_windows, self.min_points,
               self.witness_step_nats, self.min_witnesses) <= 0:
            raise ValueError("thresholds must all be positive")
        if self.witness_step_nats < 1.0 - 1e-9:
            raise ValueError("witness step below one nat cannot form a certificate")


class TrendClass(Enum):
    BoundedBelow = "BoundedBelow"
    DivergesDown = "DivergesDown"
    DivergesUp = "DivergesUp"
    Oscillating = "Oscillating"
    Undecided = "Undecided"


@dataclass(frozen=True)
class TrendFlags:
    """Raw two-sided outcomes of the windowed drift tests."""

    down_div: bool
    up_div: bool
    min_stable: bool
    max_stable: bool


@dataclass(frozen=True)
class OscillationCertificate:
    """Finite witness lists for limsup = +inf and liminf = -inf of ell.

    ``up_witnesses`` holds (index, value) pairs with strictly increasing
    indices and values, every value beating the previous by at least one
    nat; ``down_witnesses`` mirror this downward. Values are natural-log
    ratio units, re-derivable from the two spectra.
    """

    up_witnesses: tuple
    down_witnesses: tuple
    window: tuple

    MIN_ENTRIES = 5
    MIN_STEP = 1.0 - 1e-9

    def __post_init__(self):
        object.__setattr__(self, "up_witnesses", tuple((int(n), float(v)) for n, v in self.up_witnesses))
        object.__setattr__(self, "down_witnesses", tuple((int(n), float(v)) for n, v in self.down_witnesses))
        for name, wit, sign in (("up", self.up_witnesses, 1.0), ("down", self.down_witnesses, -1.0)):
            if len(wit) < self.MIN_ENTRIES:
                raise ValueError(f"{name} witnesses: need at least {self.MIN_ENTRIES}")
            ns = [n for n, _ in wit]
            if any(b <= a for a, b in zip(ns, ns[1:])):
                raise ValueError(f"{name} witnesses: indices must strictly increase")
            vs = [sign * v for _, v in wit]
            if any(b - a < self.MIN_STEP for a, b in zip(vs, vs[1:])):
                raise ValueError(f"{name} witnesses: each entry must extend the extreme by >= 1 nat")

    def to_dict(self):
        return {
            "up_witnesses": [[n, v] for n, v in self.up_witnesses],
            "down_witnesses": [[n, v] for n, v in self.down_witnesses],
            "window": [self.window[0], self.window[1]],
        }


def log_ratio_sequence(a: SchmidtSpectrum, b: SchmidtSpectrum, window, indices=None):
    """ell(n) = ln g_a(n) - ln g_b(n) over an index window, log domain only.

    ``window`` is an inclusive (n_min, n_max) pair within both stored,
    truncation-safe ranges; ``indices`` optionally restricts evaluation
    to a sorted subset (for log-spaced sampling of long windows).

    Returns (indices, values) as arrays. Raises
    :class:`TruncationUnsafe` when either tail bound could move a used
    ln g by more than the default tolerance, and on windows touching
    exhausted (zero-tail) indices of exact states.
    """
    n_min, n_max = int(window[0]), int(window[1])
    if n_min < 0 or n_max < n_min:
        raise ValueError(f"bad window {window}")
    tfa, tfb = tail_function(a), tail_function(b)
    for s, tf in ((a, tfa), (b, tfb)):
        if n_max > safe_horizon(s, tf):
            raise TruncationUnsafe(
                f"window end {n_max} beyond truncation-safe horizon {safe_horizon(s, tf)}"
            )
    if indices is None:
        ns = np.arange(n_min, n_max + 1)
    else:
        ns = np.asarray(indices, dtype=int)
        if ns.size and (ns[0] < n_min or ns[-1] > n_max):
            raise ValueError("indices outside window")
    values = tfa.log_g[ns] - tfb.log_g[ns]
    if not np.all(np.isfinite(values)):
        raise TruncationUnsafe("window touches exhausted indices; ratio undefined there")
    return ns, values


def trend_flags(values, thresholds: TrendThresholds) -> TrendFlags:
    """Two-sided drift tests on a sequence of ratio logs.

    The sequence's list positions define the dyadic structure, so callers
    control the index spacing (linear, geometric, ...) independently.
    """
    v = np.asarray(values, dtype=float)
    if v.size < thresholds.min_points:
        raise TooShort(f"{v.size} points < minimum {thresholds.min_points}")
    half = v.size // 2
    rmin = np.minimum.accumulate(v)
    rmax = np.maximum.accumulate(v)

    def _side(run):
        drift = float(run[-1] - run[half - 1])
        # count dyadic sub-windows [size/2^(j+1), size/2^j) where the
        # running extreme strictly improves
        improving = 0
        hi = v.size
        while hi >= 2:
            lo = hi // 2
            if lo < 1:
                break
            if abs(run[hi - 1] - run[lo - 1]) > 0.0:
                improving += 1
            hi = lo
        return drift, improving

    dmin, wmin = _side(rmin)
    dmax, wmax = _side(rmax)
    th = thresholds
    return TrendFlags(
        down_div=dmin <= -th.drift_nats and wmin >= th.min_windows,
        up_div=dmax >= th.drift_nats and wmax >= th.min_windows,
        min_stable=abs(dmin) < th.drift_nats / 4.0,
        max_stable=abs(dmax) < th.drift_nats / 4.0,
    )


def classify_trend(seq, thresholds: TrendThresholds | None = None) -> TrendClass:
    """Label a log-ratio sequence by its running-extreme behaviour.

    Divergence labels require the extreme to move by ``drift_nats`` over
    the second half and to improve in ``min_windows`` dyadic
    sub-windows; BoundedBelow requires the running minimum to move less
    than a quarter of that. Anything between is Undecided.
    """
    thresholds = thresholds or TrendThresholds()
    if isinstance(seq, tuple) and len(seq) == 2:
        seq = seq[1]
    f = trend_flags(seq, thresholds)
    if f.down_div and f.up_div:
        return TrendClass.Oscillating
    if f.down_div:
        return TrendClass.DivergesDown
    if f.up_div:
        return TrendClass.DivergesUp
    if f.min_stable:
        return TrendClass.BoundedBelow
    return TrendClass.Undecided


# ---------------------------------------------------------------------------
# targeted probing


@dataclass(frozen=True)
class ProbeReport:
    """Candidate extremes and derived record lists for one ordered pair.

    ``up_env_gain`` is how far the top candidate envelope rises above its
    first value (and ``down_env_drop`` how far the bottom one falls): a
    bounded ratio keeps both small even when a single deep rebound
    produces a second record entry.
    """

    up_records: tuple
    down_records: tuple
    slow_up: bool
    slow_down: bool
    analytic: bool
    up_env_gain: float = 0.0
    down_env_drop: float = 0.0
    candidates_max: tuple = field(repr=False, default=())
    candidates_min: tuple = field(repr=False, default=())


def _collect_records(cands, step, sign):
    """Monotone record subsequence with per-entry gain >= step.

    ``sign`` +1 builds rising records from local maxima, -1 falling ones
    from local minima. While only the anchor exists it is replaced by
    any better (lower for +1 / higher for -1) candidate, so record runs
    start from the most extreme early value available.
    """
    records = []
    for n, v in cands:
        s = sign * v
        if not records:
            records.append((n, v))
        elif len(records) == 1 and s < sign * records[0][1]:
            records[0] = (n, v)
        elif s >= sign * records[-1][1] + step:
            records.append((n, v))
    return tuple(records)


_PHASES = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)
_MAX_LOG_ARG = 708.0
_MAX_NEIGHBORHOOD = 20000


def _analytic_candidates(pair: PairRatio, n_min, n_max):
    """Local extremes of ell near every phase target of the profile.

    Targets sit where sin(ln y) crosses its extremes and zeros; each one
    is refined by scanning the integer grid inside a radius wide enough
    to cover the phase misalignment from differing offsets.
    """
    delta = pair.delta
    a_ref = max(pair.max_offset, 1.0)
    lo = max(n_min, 1)
    L_hi = min(_MAX_LOG_ARG, math.log(delta * n_max + a_ref) if n_max < 10**307 else _MAX_LOG_ARG)
    L_lo = math.log(delta * lo + a_ref)
    targets = []
    for base in _PHASES:
        p = max(0, math.ceil((L_lo - base) / (2 * math.pi)))
        L = base + 2 * math.pi * p
        while L <= L_hi:
            targets.append(L)
            L += 2 * math.pi
    targets.sort()
    radius = min(int(math.ceil((math.pi + pair.offset_gap) / delta)) + 1, _MAX_NEIGHBORHOOD)

    cands_max, cands_min = [], []
    for L in targets:
        n0 = int(round((math.exp(L) - a_ref) / delta))
        n0 = max(lo, min(n0, n_max))
        start, stop = max(lo, n0 - radius), min(n_max, n0 + radius)
        ns = np.arange(start, stop + 1, dtype=float)
        vs = pair.values(ns)
        cands_max.append((int(ns[np.argmax(vs)]), float(np.max(vs))))
        cands_min.append((int(ns[np.argmin(vs)]), float(np.min(vs))))
    return sorted(set(cands_max)), sorted(set(cands_min))


def _materialized_candidates(ns, values):
    """Interior local extrema plus endpoints of a stored window."""
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        idx = np.arange(v.size)
    else:
        left = v[1:-1] - v[:-2]
        right = v[1:-1] - v[2:]
        interior = 1 + np.nonzero((left >= 0) & (right >= 0) | ((left <= 0) & (right <= 0)))[0]
        idx = np.unique(np.concatenate(([0], interior, [v.size - 1])))
    cands = [(int(ns[i]), float(v[i])) for i in idx]
    return cands, list(cands)


def _slow_drift(cands, scale_pos, total_min, min_steps, tail_ratio, sign):
    """Detect persistent sub-nat drift of the candidate envelope.

    ``scale_pos`` maps each candidate to its ln ln(argument) position;
    halves of that range must both contribute (a convergent envelope
    stalls in the late half and is rejected).
    """
    if len(cands) < min_steps:
        return False
    vals = np.array([sign * v for _, v in cands])
    pos = np.asarray(scale_pos, dtype=float)
    env = np.minimum.accumulate(vals)
    drops = np.diff(env)
    steps = int(np.sum(drops < 0))
    total = float(env[0] - env[-1])
    if steps < min_steps or total < total_min:
        return False
    mid = (pos[0] + pos[-1]) / 2.0
    late = pos[1:] >= mid
    late_total = float(-np.sum(drops[late]))
    early_total = total - late_total
    if early_total <= 0:
        return True
    return late_total >= tail_ratio * early_total


def probe_pair(a: SchmidtSpectrum, b: SchmidtSpectrum, window, thresholds: TrendThresholds) -> ProbeReport:
    """Witness candidates for ell = ln g_a - ln g_b over a window.

    Uses the analytic family forms when both spectra carry matching-grid
    metadata (reaching indices far past the stored horizon); otherwise
    falls back to the stored window's local extremes. Slow drift is only
    assessed on analytic pairs, where the scale coordinate is known.
    """
    n_min, n_max = int(window[0]), int(window[1])
    pair = pair_ratio(a, b)
    if pair is not None and pair.oscillating:
        n_hi = min(n_max, pair.max_index())
        cmax, cmin = _analytic_candidates(pair, n_min, n_hi)
        analytic = True
    else:
        tfa, tfb = tail_function(a), tail_function(b)
        hi = min(n_max, safe_horizon(a, tfa, thresholds.truncation_rtol),
                 safe_horizon(b, tfb, thresholds.truncation_rtol))
        ns = np.arange(n_min, hi + 1)
        values = tfa.log_g[ns] - tfb.log_g[ns]
        finite = np.isfinite(values)
        cmax, cmin = _materialized_candidates(ns[finite], values[finite])
        pair = None
        analytic = False

    step = thresholds.witness_step_nats
    ups = _collect_records(cmax, step, +1.0)
    downs = _collect_records(cmin, step, -1.0)

    slow_up = slow_down = False
    if analytic and cmax:
        pos_max = [math.log(math.log(pair.delta * max(n, 1) + pair.max_offset)) for n, _ in cmax]
        pos_min = [math.log(math.log(pair.delta * max(n, 1) + pair.max_offset)) for n, _ in cmin]
        slow_up = _slow_drift(cmax, pos_max, thresholds.slow_min_total,
                              thresholds.slow_min_steps, thresholds.slow_tail_ratio, -1.0)
        slow_down = _slow_drift(cmin, pos_min, thresholds.slow_min_total,
                                thresholds.slow_min_steps, thresholds.slow_tail_ratio, +1.0)
    up_gain = max((v for _, v in cmax), default=0.0) - cmax[0][1] if cmax else 0.0
    down_drop = cmin[0][1] - min((v for _, v in cmin), default=0.0) if cmin else 0.0
    return ProbeReport(ups, downs, slow_up, slow_down, analytic,
                       float(up_gain), float(down_drop), tuple(cmax), tuple(cmin))


def default_window(a: SchmidtSpectrum, b: SchmidtSpectrum, thresholds: TrendThresholds | None = None):
    """Widest honest comparison window for a pair of spectra."""
    thresholds = thresholds or TrendThresholds()
    pair = pair_ratio(a, b)
    if pair is not None and pair.oscillating:
        return (0, pair.max_index())
    return (0, min(safe_horizon(a, rtol=thresholds.truncation_rtol),
                   safe_horizon(b, rtol=thresholds.truncation_rtol)))


def incomparability_certificate(
    a: SchmidtSpectrum,
    b: SchmidtSpectrum,
    window=None,
    thresholds: TrendThresholds | None = None,
) -> OscillationCertificate | None:
    """Search for record witnesses of limsup = +inf and liminf = 0.

    Up-witnesses chase indices where the oscillating profile peaks
    (sin(ln y) = 1), down-witnesses its floors (sin(ln y) = -1), both
    refined over nearby grid indices. Returns None when either list
    cannot reach ``min_witnesses`` entries of ``witness_step_nats``
    gains, e.g. for monotone ratios or identical states.
    """
    thresholds = thresholds or TrendThresholds()
    if window is None:
        window = default_window(a, b, thresholds)
    report = probe_pair(a, b, window, thresholds)
    m = thresholds.min_witnesses
    if len(report.up_records) >= m and len(report.down_records) >= m:
        return OscillationCertificate(
            report.up_records[: max(m, len(report.up_records))],
            report.down_records[: max(m, len(report.down_records))],
            (int(window[0]), int(window[1])),
        )
    return None


def verify_certificate(cert: OscillationCertificate, a: SchmidtSpectrum, b: SchmidtSpectrum, atol=1e-12):
    """Recompute every witness value from the two spectra.

    Witnesses inside both stored ranges are checked against the stored
    tail functions; beyond that the analytic pair form is required.
    Raises ValueError on any mismatch beyond ``atol``.
    """
    tfa, tfb = tail_function(a), tail_function(b)
    pair = pair_ratio(a, b)
    stored_hi = min(tfa.horizon, tfb.horizon)
    for name, wit in (("up", cert.up_witnesses), ("down", cert.down_witnesses)):
        for n, v in wit:
            if pair is not None:
                got = float(pair.values(np.array([float(n)]))[0])
            elif n <= stored_hi:
                got = float(tfa.log_g[n] - tfb.log_g[n])
            else:
                raise ValueError(f"witness at {n} beyond stored range and no analytic form")
            if not math.isclose(got, v, rel_tol=atol, abs_tol=atol):
                raise ValueError(f"{name} witness at {n}: stated {v!r}, recomputed {got!r}")
    return True
