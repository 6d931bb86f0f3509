"""Analytic state families: squeezed states and oscillating tail curves.

Two generators beyond the plain two-mode squeezed state:

* ``xi_state(r, ...)``  -- tail g(n) proportional to exp(-delta n) times the
  oscillating profile p_r evaluated along the grid, one state per r.
* ``psi_state(k, ...)`` -- tail proportional to exp(-delta n) times the k-th
  power of the r = 1 profile, one state per integer k.

The profile p_r(x) = (log x)^r (sin log x + 1) + 1/(log x) swings between
~2 (log x)^r and 1/(log x) as log x runs through multiples of pi, which is
what makes distinct family members mutually non-convertible. Shifting the
profile by a large enough offset keeps the resulting tail strictly
decreasing and convex; ``find_offset`` searches for the smallest such shift
on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConditionViolated,
    DomainError,
    NonPositiveP,
    OffsetNotFound,
    QOutOfRange,
)
from .numutil import NEG_INF, log1mexp
from .spectrum import SchmidtSpectrum, make_spectrum

#: largest log-argument the float64 grid can represent (exp(701) < inf)
LOG_ARG_CAP = 700.0


def eval_p(r: float, x):
    """Profile p_r and its first two derivatives at x > 1.

    With L = ln x:

        p   = L^r (sin L + 1) + 1/L
        p'  = q(L)/x,          q  = r L^(r-1) (sin L + 1) + L^r cos L - L^-2
        p'' = (q'(L) - q(L))/x^2,
        q'  = r(r-1) L^(r-2) (sin L + 1) + 2 r L^(r-1) cos L - L^r sin L + 2 L^-3

    Returns (p, p', p'') as floats or arrays matching the input shape.
    """
    if not (r > 0):
        raise ValueError("profile exponent r must be positive")
    scalar = np.isscalar(x)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 1.0):
        raise DomainError("profile defined only for x > 1")
    L = np.log(x)
    sinL = np.sin(L)
    cosL = np.cos(L)
    s1 = sinL + 1.0
    Lr = L**r
    p = Lr * s1 + 1.0 / L
    q = r * Lr / L * s1 + Lr * cosL - 1.0 / L**2
    qp = (
        r * (r - 1.0) * Lr / L**2 * s1
        + 2.0 * r * Lr / L * cosL
        - Lr * sinL
        + 2.0 / L**3
    )
    p1 = q / x
    p2 = (qp - q) / x / x  # two divisions: x*x overflows for x near exp(709)
    if scalar:
        return float(p), float(p1), float(p2)
    return p, p1, p2


@dataclass(frozen=True)
class VidalCurve:
    """Continuous tail surrogate d(x) = exp(-x) * p_r(x + offset)^k.

    ``k = 0`` is the bare exponential (a squeezed state); larger k weights
    the oscillating profile more strongly. The offset must place the
    whole evaluation range in the profile's domain (x + offset > 1).
    """

    k: int
    r: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        if self.k < 0 or self.k != int(self.k):
            raise ValueError("k must be a nonnegative integer")
        if not (self.r > 0):
            raise ValueError("r must be positive")
        if self.offset < 0:
            raise ValueError("offset must be nonnegative")
        if self.k > 0 and self.offset <= 1.0:
            raise ValueError("k >= 1 curves need offset > 1 so that x + offset > 1")

    def log_d(self, x):
        """ln d(x) = -x + k ln p_r(x + offset)."""
        x = np.asarray(x, dtype=float)
        if self.k == 0:
            return -x
        p, _, _ = eval_p(self.r, x + self.offset)
        return -x + self.k * np.log(p)


def curve_conditions(curve: VidalCurve, x):
    """Decrease and convexity functionals of a curve at x.

    Returns (M, C) where M > 0 certifies d' < 0 and C >= 0 certifies
    d'' >= 0 at x. With u = p'/p and w = p''/p at x + offset:

        M = 1 - k u
        C = (1 - k u)^2 + k (w - u^2)

    For k = 1 these reduce (in sign) to p - p' and p - 2p' + p''.
    """
    x = np.asarray(x, dtype=float)
    if curve.k == 0:
        one = np.ones_like(x)
        if one.ndim == 0:
            return 1.0, 1.0
        return one, one.copy()
    p, p1, p2 = eval_p(curve.r, x + curve.offset)
    if np.any(p <= 0):
        raise NonPositiveP("profile not strictly positive at evaluation point")
    u = p1 / p
    w = p2 / p
    M = 1.0 - curve.k * u
    C = (1.0 - curve.k * u) ** 2 + curve.k * (w - u * u)
    if M.ndim == 0:
        return float(M), float(C)
    return M, C


def _condition_bad_mask(k, r, y, margin):
    """True where the decrease/convexity conditions fail at profile argument y."""
    p, p1, p2 = eval_p(r, y)
    u = p1 / p
    w = p2 / p
    M = 1.0 - k * u
    C = (1.0 - k * u) ** 2 + k * (w - u * u)
    return (p <= 0) | (M <= margin) | (C < 0.0)


def find_offset(
    k: int,
    r: float = 1.0,
    grid_step: float = 0.01,
    horizon: float = 100.0,
    margin: float = 0.0,
    a_max: float | None = None,
) -> float:
    """Smallest grid multiple a such that the shifted curve is valid on [0, horizon].

    Validity means M(x) > margin and C(x) >= 0 at every grid point of
    step ``grid_step`` in [0, horizon], with x + a > 1 throughout. The
    check is finite: nothing beyond the horizon is certified. Raises
    :class:`OffsetNotFound` past ``a_max`` (default 1e6 * grid_step).
    """
    if grid_step <= 0 or horizon <= 0:
        raise ValueError("grid_step and horizon must be positive")
    if k == 0:
        return 0.0
    if a_max is None:
        a_max = 1e6 * grid_step

    # Candidates and scan points share one lattice of grid_step multiples,
    # so the window for candidate m covers lattice indices [m, m + W].
    # The lattice is evaluated lazily: most offsets are small, so growing
    # the candidate range in blocks avoids scanning out to a_max.
    m_lo = int(math.floor(1.0 / grid_step)) + 1  # first multiple > 1
    m_hi = int(math.floor(a_max / grid_step))
    if m_hi < m_lo:
        raise OffsetNotFound(f"a_max={a_max} leaves no candidate above 1")
    W = int(math.ceil(horizon / grid_step))

    block = 16384
    prefix = np.zeros(1)
    evaluated = 0  # lattice points computed, starting at index m_lo
    cand_done = 0
    while cand_done < m_hi - m_lo + 1:
        cand_stop = min(cand_done + block, m_hi - m_lo + 1)
        need = cand_stop + W + 1
        if need > evaluated:
            idx = np.arange(m_lo + evaluated, m_lo + need, dtype=float)
            bad = _condition_bad_mask(k, r, idx * grid_step, margin)
            prefix = np.concatenate((prefix, prefix[-1] + np.cumsum(bad)))
            evaluated = need
        window_bad = prefix[cand_done + W + 1 : cand_stop + W + 1] - prefix[cand_done:cand_stop]
        clean = np.nonzero(window_bad == 0)[0]
        if clean.size:
            return float((m_lo + cand_done + int(clean[0])) * grid_step)
        cand_done = cand_stop
    raise OffsetNotFound(
        f"no offset <= {a_max} satisfies the conditions over [0, {horizon}]"
    )


def discretize(
    curve: VidalCurve,
    delta: float,
    n: int,
    scan_step: float = 0.01,
    family: str | None = None,
) -> SchmidtSpectrum:
    """Sample a curve into a spectrum: g(m) = d(delta m)/d(0), m <= n.

    The curve conditions are re-verified on a dense grid over
    [0, delta*(n+1)] before sampling (the extra step past the horizon
    certifies the ordering of the first hidden weight at the cut). The
    tail bound is the exact analytic g(n).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if n < 1:
        raise ValueError("need at least one stored weight")
    span = delta * (n + 1)
    step = min(scan_step, delta)
    xs_count = int(math.ceil(span / step)) + 1

    if curve.k > 0:
        chunk = 1_000_000
        for start in range(0, xs_count, chunk):
            stop = min(start + chunk, xs_count)
            xs = np.minimum(np.arange(start, stop, dtype=float) * step, span)
            if _condition_bad_mask(curve.k, curve.r, xs + curve.offset, 0.0).any():
                raise ConditionViolated(
                    f"curve conditions fail inside [0, {span}] for offset {curve.offset}"
                )

    grid = np.arange(n + 1, dtype=float) * delta
    log_g = curve.log_d(grid)
    log_g = log_g - log_g[0]  # normalization: g(0) = 1 exactly
    diffs = log_g[1:] - log_g[:-1]
    if np.any(diffs >= 0):
        raise ConditionViolated("sampled tail function is not strictly decreasing")
    log_weights = log_g[:-1] + log1mexp(diffs)
    metadata = {
        "family": family or ("xi" if curve.k == 1 and curve.r != 1.0 else "psi"),
        "k": curve.k,
        "r": curve.r,
        "delta": float(delta),
        "offset": float(curve.offset),
    }
    return make_spectrum(log_weights, float(log_g[-1]), metadata, cut_certified=True)


def tmss(q: float, n: int = 1000) -> SchmidtSpectrum:
    """Two-mode squeezed state: weights (1 - q^2) q^(2m), exact tail q^(2n).

    ``q`` is the squeezing parameter in [0, 1); q = 0 gives the product
    state. In the grid-step convention used throughout, delta = -2 ln q.
    """
    if not (0.0 <= q < 1.0):
        raise QOutOfRange(f"q={q} outside [0, 1)")
    if q == 0.0:
        return make_spectrum([0.0], NEG_INF, {"family": "tmss", "q": 0.0})
    if n < 1:
        raise ValueError("need at least one stored weight")
    log_q2 = 2.0 * math.log(q)
    log_head = math.log1p(-(q * q))
    log_weights = log_head + log_q2 * np.arange(n, dtype=float)
    log_tail = log_q2 * n
    metadata = {"family": "tmss", "q": float(q), "delta": -log_q2}
    return make_spectrum(log_weights, log_tail, metadata, cut_certified=True)


def delta_from_q(q: float, convention: str = "schmidt") -> float:
    """Grid step matching a squeezing parameter.

    ``schmidt`` (default): weights fall like q^(2n), delta = -2 ln q.
    ``amplitude``: state amplitudes fall like q^n, delta = -ln q.
    """
    if not (0.0 < q < 1.0):
        raise QOutOfRange(f"q={q} outside (0, 1)")
    if convention == "schmidt":
        return -2.0 * math.log(q)
    if convention == "amplitude":
        return -math.log(q)
    raise ValueError(f"unknown delta convention {convention!r}")


def xi_state(
    r: float,
    delta: float,
    n: int = 10000,
    offset: float | None = None,
    grid_step: float = 0.01,
    margin: float = 0.0,
    a_max: float | None = None,
) -> SchmidtSpectrum:
    """Reference-family member: g(m) proportional to exp(-delta m) p_r(delta m + a)."""
    if offset is None:
        offset = find_offset(1, r, grid_step, delta * (n + 1), margin, a_max)
    curve = VidalCurve(k=1, r=r, offset=offset)
    return discretize(curve, delta, n, family="xi")


def psi_state(
    k: int,
    delta: float,
    n: int = 10000,
    r: float = 1.0,
    offset: float | None = None,
    grid_step: float = 0.01,
    margin: float = 0.0,
    a_max: float | None = None,
) -> SchmidtSpectrum:
    """Ladder member k: g(m) proportional to exp(-delta m) p_r(delta m + a)^k.

    k = 0 reproduces a two-mode squeezed state with q = exp(-delta/2).
    """
    if k == 0:
        offset = 0.0
    elif offset is None:
        offset = find_offset(k, r, grid_step, delta * (n + 1), margin, a_max)
    curve = VidalCurve(k=k, r=r, offset=offset)
    return discretize(curve, delta, n, family="psi")


# ---------------------------------------------------------------------------
# analytic continuation from metadata


@dataclass(frozen=True)
class AnalyticForm:
    """Closed form of ln g for a family-generated spectrum."""

    k: int
    r: float
    offset: float
    delta: float

    def log_g(self, n):
        """ln g(n) for float indices; valid while delta*n stays in float range."""
        n = np.asarray(n, dtype=float)
        out = -self.delta * n
        if self.k:
            p0, _, _ = eval_p(self.r, self.offset)
            p, _, _ = eval_p(self.r, self.delta * n + self.offset)
            out = out + self.k * (np.log(p) - math.log(p0))
        return out


def analytic_form(s: SchmidtSpectrum) -> AnalyticForm | None:
    """Closed form of a spectrum's tail function, if its metadata names one."""
    meta = s.metadata
    family = meta.get("family")
    if family == "tmss":
        q = float(meta.get("q", 0.0))
        if not (0.0 < q < 1.0):
            return None
        return AnalyticForm(k=0, r=1.0, offset=0.0, delta=-2.0 * math.log(q))
    if family in ("xi", "psi"):
        try:
            k = int(meta["k"])
            delta = float(meta["delta"])
            offset = float(meta["offset"])
            r = float(meta.get("r", 1.0))
        except (KeyError, TypeError, ValueError):
            return None
        if not all(map(math.isfinite, (delta, offset, r))):
            return None
        if k < 0 or delta <= 0 or r <= 0 or (k > 0 and offset <= 1.0):
            return None
        return AnalyticForm(k=k, r=r, offset=offset, delta=delta)
    return None


@dataclass(frozen=True)
class PairRatio:
    """Evaluator of ln g_a(n) - ln g_b(n) for two same-grid analytic forms.

    The exponential parts cancel exactly, so the ratio stays well
    conditioned at indices far beyond anything a stored array could
    reach (delta * n up to ~exp(700)).
    """

    a: AnalyticForm
    b: AnalyticForm

    @property
    def delta(self) -> float:
        return self.a.delta

    @property
    def max_offset(self) -> float:
        return max(self.a.offset, self.b.offset)

    @property
    def offset_gap(self) -> float:
        return abs(self.a.offset - self.b.offset)

    @property
    def oscillating(self) -> bool:
        return self.a.k > 0 or self.b.k > 0

    def max_index(self) -> int:
        """Largest index with delta*n + offsets inside float range."""
        return int(math.exp(LOG_ARG_CAP) / self.delta)

    def values(self, n):
        n = np.asarray(n, dtype=float)
        out = np.zeros_like(n)
        for form, sign in ((self.a, 1.0), (self.b, -1.0)):
            if form.k:
                p0, _, _ = eval_p(form.r, form.offset)
                p, _, _ = eval_p(form.r, form.delta * n + form.offset)
                out = out + sign * form.k * (np.log(p) - math.log(p0))
        return out


def pair_ratio(a: SchmidtSpectrum, b: SchmidtSpectrum) -> PairRatio | None:
    """Analytic log-ratio evaluator for two spectra, when both allow one.

    Requires identical grid steps: otherwise the exponential parts do not
    cancel and the materialized window is the only honest comparison.
    """
    fa = analytic_form(a)
    fb = analytic_form(b)
    if fa is None or fb is None:
        return None
    if fa.delta != fb.delta:
        return None
    return PairRatio(fa, fb)


def excitation_remainder_bound(s: SchmidtSpectrum) -> float | None:
    """ln of a certified bound on sum(n * weight(n)) beyond the horizon.

    Uses the exact geometric remainder for squeezed states. For profile
    families it combines p(y) <= 3 (ln y)^(r k) (valid once ln y >= 1)
    with the envelope ratio exp(-delta + rk*delta/(y ln y)), summed as a
    geometric series. Returns None when no certified form applies.
    """
    form = analytic_form(s)
    N = s.length
    if form is None:
        return None
    if form.k == 0:
        # remainder = z^N (N + z/(1-z)) with z = exp(-delta)
        log_z = -form.delta
        z = math.exp(log_z)
        return log_z * N + math.log(N + z / (1.0 - z))
    y_next = form.delta * (N + 1) + form.offset
    L_next = math.log(y_next)
    if L_next < 1.0:
        return None
    rk = form.r * form.k
    rho = math.exp(-form.delta + rk * form.delta / (y_next * L_next))
    if rho >= 1.0:
        return None
    p0, _, _ = eval_p(form.r, form.offset)
    # ln G(N+1) with G(n) = exp(-delta n) * (3 ln y)^(rk) / p(offset)^k
    log_G = (
        -form.delta * (N + 1)
        + form.k * math.log(3.0)
        + rk * math.log(L_next)
        - form.k * math.log(p0)
    )
    log_sum_tail = log_G - math.log1p(-rho)
    log_n_gN = math.log(N) + s.log_tail_bound
    return float(np.logaddexp(log_n_gN, log_sum_tail))
