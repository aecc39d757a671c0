"""Time-dependent Fourier multipliers and resonance geometry.

Everything is evaluated and stored in log space: the composite weights
contain factors like exp(8*rho*|eta|^(1/3)) that overflow doubles long
before the frequencies of interest run out.

The module provides, per frequency (k, eta):

* lambda_at       -- shrinking Gevrey radius lambda(t)
* log_mL          -- linear-stability multiplier, closed arctan form
* log_m           -- sup-over-j Lorentzian growth weight (exact upper
                     envelope, piecewise arctan integrals)
* resonance_layout-- critical times, resonant intervals, coefficient a
* log_q, dq_ratio -- backward-recursion resonance weight and its
                     logarithmic time derivative
* log_J, log_Jt, log_A, log_At -- composite weights
* classify_pair, in_S_t -- paraproduct frequency-set classifiers
* WeightTable     -- cached per-grid evaluation at a fixed time
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from .errors import ConfigError
from .grid import Grid

_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class WeightParams:
    """Parameters of the weight family.

    Constraints: N >= 1, s in (1/3, 1], lambda0 > 0, rho0 in (0, 1),
    gamma_star in (0, 1.5*(s - 1/3)), rho > 0.  j_max = None selects the
    dynamic truncation 4*(|k| + ceil(t^2)) clipped to 10^4.
    """

    N: float = 6.0
    s: float = 0.5
    lambda0: float = 1.0
    rho0: float = 0.1
    gamma_star: float = 0.2
    rho: float = 0.05
    j_max: int | None = None

    def __post_init__(self):
        if self.N < 1:
            raise ConfigError("N must be >= 1")
        if not (1.0 / 3.0 < self.s <= 1.0):
            raise ConfigError("s must lie in (1/3, 1]")
        if self.lambda0 <= 0:
            raise ConfigError("lambda0 must be positive")
        if not (0 < self.rho0 < 1):
            raise ConfigError("rho0 must lie in (0, 1)")
        gmax = 1.5 * (self.s - 1.0 / 3.0)
        if not (0 < self.gamma_star < gmax):
            raise ConfigError(
                f"gamma_star must lie in (0, {gmax:.6g}) for s = {self.s}")
        if self.rho <= 0:
            raise ConfigError("rho must be positive")
        if self.j_max is not None and self.j_max < 1:
            raise ConfigError("j_max must be >= 1 when given")
        if self.lambda0 - self.rho0 / self.gamma_star <= 0:
            raise ConfigError("lambda0 - rho0/gamma_star must stay positive")
        # Exact total decrement of lambda; the 1/gamma_star bound above is
        # slightly optimistic for the sqrt(1+t^2) bracket, so check the true
        # integral as well to guarantee the Gevrey radius never vanishes.
        if self.lambda0 - self.rho0 * _lambda_total_drop(self.gamma_star) <= 0:
            raise ConfigError("lambda(t) would cross zero for these parameters")


def _lambda_total_drop(gamma_star: float) -> float:
    """integral_0^inf (1+tau^2)^(-(1+gamma_star)/2) dtau, closed form."""
    p = 0.5 * (1.0 + gamma_star)
    return 0.5 * math.sqrt(math.pi) * math.exp(gammaln(p - 0.5) - gammaln(p))


def bracket(*comps) -> np.ndarray:
    """Japanese bracket <k, eta> = sqrt(1 + k^2 + eta^2 + ...)."""
    total = 0.0
    for c in comps:
        a = np.asarray(c, dtype=float)
        total = total + a * a
    return np.sqrt(1.0 + total)


# ---------------------------------------------------------------------------
# lambda(t)


def lambda_at(t: float, params: WeightParams) -> float:
    """Gevrey radius lambda(t) = lambda0 - rho0 * int_0^t <tau>^-(1+g*) dtau."""
    if t < 0:
        raise ConfigError("lambda_at requires t >= 0")
    if t == 0.0:
        return params.lambda0
    expo = -(1.0 + params.gamma_star) / 2.0
    val, _ = quad(lambda tau: (1.0 + tau * tau) ** expo, 0.0, t,
                  epsabs=1e-12, epsrel=1e-12, limit=200)
    return params.lambda0 - params.rho0 * val


def dlambda_dt(t: float, params: WeightParams) -> float:
    return -params.rho0 * (1.0 + t * t) ** (-(1.0 + params.gamma_star) / 2.0)


# ---------------------------------------------------------------------------
# m_L: closed arctan form


def log_mL(t, k, eta, params: WeightParams):
    """log m_L(t, k, eta); supports array k, eta.

    m_L starts at <k,eta>^-N and gains exp of the arctan integral of
    5/(1+(tau - eta/k)^2) once |k,eta| <= 10<tau>; the growth factor is
    zero for k = 0 (no resonant time).
    """
    k = np.asarray(k, dtype=float)
    eta = np.asarray(eta, dtype=float)
    base = -params.N * np.log(bracket(k, eta))
    mag2 = k * k + eta * eta
    tau_star = np.sqrt(np.maximum(0.0, mag2 / 100.0 - 1.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        center = np.where(k != 0, eta / np.where(k != 0, k, 1.0), 0.0)
    active = (k != 0) & (t > tau_star)
    growth = 5.0 * (np.arctan(t - center) - np.arctan(tau_star - center))
    out = base + np.where(active, growth, 0.0)
    return out if out.ndim else float(out)


def dmL_ratio(t, k, eta, params: WeightParams):
    """d/dt log m_L; zero for k = 0 or outside the frequency gate."""
    k = np.asarray(k, dtype=float)
    eta = np.asarray(eta, dtype=float)
    mag = np.sqrt(k * k + eta * eta)
    gate = mag <= 10.0 * np.sqrt(1.0 + t * t)
    with np.errstate(divide="ignore", invalid="ignore"):
        center = np.where(k != 0, eta / np.where(k != 0, k, 1.0), 0.0)
    rate = 5.0 / (1.0 + (t - center) ** 2)
    out = np.where(gate & (k != 0), rate, 0.0)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# m: exact upper envelope of Lorentzians


def _default_j_max(k: int, t_max: float) -> int:
    return int(min(10_000, 4 * (abs(k) + math.ceil(max(t_max, 1.0) ** 2))))


class MEnvelope:
    """Exact evaluator of log m(t, k, eta) up to a horizon t_max.

    d/dt log m = max over j != 0 of c_j / (1 + (t - eta/j)^2) with
    c_j = 10/<k-j>^3, gated on |k,eta| <= 10 t^2.  All Lorentzians share
    unit width, so pairwise crossings solve a quadratic and the upper
    envelope is a short list of segments, each integrating to an exact
    arctan difference.  Candidates whose maximum on the window cannot
    reach the envelope's floor are discarded exactly; candidates below
    1e-13 are dropped with integrated error < 1e-11.
    """

    def __init__(self, k: int, eta: float, params: WeightParams, t_max: float,
                 j_max: int | None = None):
        self.k = int(k)
        self.eta = float(eta)
        self.t_max = float(t_max)
        self.t_enter = math.sqrt(math.hypot(k, eta) / 10.0)
        jm = j_max if j_max is not None else (
            params.j_max if params.j_max is not None else _default_j_max(k, t_max))
        self._build(jm)

    def _build(self, jm: int):
        lo, hi = self.t_enter, self.t_max
        if hi <= lo:
            self._breaks = np.array([lo])
            self._amps = np.array([])
            self._cents = np.array([])
            self._cum = np.array([0.0])
            return
        j = np.concatenate([np.arange(-jm, 0), np.arange(1, jm + 1)])
        cents = self.eta / j
        amps = 10.0 / bracket(self.k - j) ** 3
        # exact pruning against the envelope floor
        d_out = np.maximum.reduce([np.zeros_like(cents), lo - cents, cents - hi])
        ub = amps / (1.0 + d_out * d_out)
        d_far = np.maximum(np.abs(lo - cents), np.abs(hi - cents))
        env_floor = np.max(amps / (1.0 + d_far * d_far))
        keep = ub >= max(env_floor, 1e-13)
        cents, amps = cents[keep], amps[keep]
        # identical centers (eta = 0): only the largest amplitude survives
        order = np.lexsort((-amps, cents))
        cents, amps = cents[order], amps[order]
        uniq = np.ones(len(cents), dtype=bool)
        uniq[1:] = np.diff(cents) != 0.0
        cents, amps = cents[uniq], amps[uniq]

        n = len(cents)
        cuts = [lo, hi]
        if n > 1:
            ii, jj = np.triu_indices(n, k=1)
            ci, cj = amps[ii], amps[jj]
            ai, aj = cents[ii], cents[jj]
            A = ci - cj
            B = -2.0 * (ci * aj - cj * ai)
            C = ci * (1.0 + aj * aj) - cj * (1.0 + ai * ai)
            with np.errstate(invalid="ignore", divide="ignore"):
                disc = B * B - 4.0 * A * C
                quad_ok = (np.abs(A) > 1e-300) & (disc >= 0.0)
                sq = np.sqrt(np.where(disc >= 0, disc, 0.0))
                r1 = np.where(quad_ok, (-B + sq) / (2.0 * A), np.nan)
                r2 = np.where(quad_ok, (-B - sq) / (2.0 * A), np.nan)
                lin = (~quad_ok) & (np.abs(B) > 1e-300)
                r3 = np.where(lin, -C / np.where(lin, B, 1.0), np.nan)
            for r in (r1, r2, r3):
                inside = r[np.isfinite(r) & (r > lo) & (r < hi)]
                cuts.extend(inside.tolist())
        breaks = np.unique(np.asarray(cuts))
        mids = 0.5 * (breaks[:-1] + breaks[1:])
        vals = amps[None, :] / (1.0 + (mids[:, None] - cents[None, :]) ** 2)
        arg = np.argmax(vals, axis=1)
        # merge consecutive segments with the same maximizer
        seg_start = [0]
        for i in range(1, len(arg)):
            if arg[i] != arg[seg_start[-1]]:
                seg_start.append(i)
        idx = arg[np.asarray(seg_start)]
        bnds = np.concatenate([breaks[np.asarray(seg_start)], [hi]])
        self._breaks = bnds
        self._amps = amps[idx]
        self._cents = cents[idx]
        seg_int = self._amps * (np.arctan(bnds[1:] - self._cents)
                                - np.arctan(bnds[:-1] - self._cents))
        self._cum = np.concatenate([[0.0], np.cumsum(seg_int)])

    def log_m(self, t: float) -> float:
        if t <= self.t_enter or len(self._amps) == 0:
            return 0.0
        t = min(t, self.t_max)
        i = min(max(bisect.bisect_right(self._breaks, t) - 1, 0), len(self._amps) - 1)
        return float(self._cum[i] + self._amps[i]
                     * (math.atan(t - self._cents[i])
                        - math.atan(self._breaks[i] - self._cents[i])))

    def rate(self, t: float) -> float:
        """d/dt log m at t (one-sided at segment boundaries)."""
        if t < self.t_enter or len(self._amps) == 0:
            return 0.0
        t = min(t, self.t_max)
        i = min(max(bisect.bisect_right(self._breaks, t) - 1, 0), len(self._amps) - 1)
        u = t - self._cents[i]
        return float(self._amps[i] / (1.0 + u * u))


def log_m(t: float, k: int, eta: float, params: WeightParams,
          j_max: int | None = None) -> float:
    """log m(t, k, eta): exact envelope integration; 0 before entering S_t."""
    if t <= 0:
        return 0.0
    return MEnvelope(k, eta, params, t_max=t, j_max=j_max).log_m(t)


def dm_ratio(t: float, k: int, eta: float, params: WeightParams,
             j_max: int | None = None) -> float:
    return MEnvelope(k, eta, params, t_max=max(t, 1.0), j_max=j_max).rate(t)


# ---------------------------------------------------------------------------
# resonance layout


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __contains__(self, t) -> bool:
        return self.lo <= t <= self.hi

    def as_tuple(self) -> tuple[float, float]:
        return (self.lo, self.hi)


@dataclass(frozen=True)
class ResonanceLayout:
    """Critical-time geometry of a resonant frequency pair (eta*k > 0,
    1 <= |k| <= |eta|^(1/3), checked as |k|^3 <= |eta|)."""

    k: int
    eta: float
    t_minus: float
    t_plus: float
    I_left: Interval
    I_right: Interval
    Itilde_left: Interval
    Itilde_right: Interval
    a: float

    @property
    def center(self) -> float:
        return self.eta / self.k

    @property
    def I(self) -> Interval:
        return Interval(self.I_left.lo, self.I_right.hi)

    @property
    def Itilde(self) -> Interval:
        return Interval(self.Itilde_left.lo, self.Itilde_right.hi)


def resonance_layout(k: int, eta: float) -> ResonanceLayout | None:
    """Populated layout iff eta*k > 0 and 1 <= |k| <= |eta|^(1/3)."""
    k = int(k)
    if k == 0 or eta * k <= 0 or abs(k) ** 3 > abs(eta):
        return None
    center = eta / k
    half = eta / (2.0 * k ** 3)  # positive since eta*k > 0
    t_minus, t_plus = center - half, center + half
    a = 4.0 * (1.0 - k ** 3 / (2.0 * eta))
    if abs(k) == 1:
        i_lo, i_hi = center / 3.0, 2.0 * center
    else:
        ak, sk = abs(k), (1 if k > 0 else -1)
        e = abs(eta)
        i_lo = 0.5 * (e / ak + e / (ak + 1))
        i_hi = 0.5 * (e / ak + e / (ak - 1))
    return ResonanceLayout(
        k=k, eta=float(eta), t_minus=t_minus, t_plus=t_plus,
        I_left=Interval(i_lo, center), I_right=Interval(center, i_hi),
        Itilde_left=Interval(t_minus, center), Itilde_right=Interval(center, t_plus),
        a=a)


# ---------------------------------------------------------------------------
# q: backward recursion over resonant intervals


class QNonResonant:
    """Global non-resonant weight q_NR(t, eta) for one eta > 1.

    Built backward in time from q_NR = 1 at the right end of the k = 1
    resonant interval, following the two-piece power laws on each
    Itilde_{j,eta} and staying constant in between.  Where consecutive
    intervals overlap (the paper's k = 1 window reaches into k = 2's, a
    geometry artifact of the simplified interval table) the later-time
    piece wins and the earlier one is clipped, which keeps log q
    continuous everywhere.
    """

    def __init__(self, eta: float, rho: float):
        if eta <= 1.0:
            raise ConfigError("QNonResonant requires eta > 1")
        self.eta = float(eta)
        self.rho = float(rho)
        self.k_max = int(math.floor(abs(eta) ** (1.0 / 3.0) + 1e-9))
        while (self.k_max + 1) ** 3 <= eta:
            self.k_max += 1
        while self.k_max ** 3 > eta:
            self.k_max -= 1
        self._build()

    def _build(self):
        eta, rho = self.eta, self.rho
        # (lo, hi, kind, j, a, ref_t, ref_logq); kind in {R, L, const}
        pieces: list[tuple] = []
        layout1 = resonance_layout(1, eta)
        cur_t = layout1.t_plus
        cur_lq = 0.0
        self.anchor_t = cur_t

        def value_on(piece, t):
            _, _, kind, j, a, ref_t, ref_lq = piece
            if kind == "const":
                return ref_lq
            if kind == "R":
                return ref_lq + (rho + 0.5) * (self._logF(j, a, t)
                                               - self._logF(j, a, ref_t))
            return ref_lq - rho * (self._logG(j, a, t) - self._logG(j, a, ref_t))

        for j in range(1, self.k_max + 1):
            lay = resonance_layout(j, eta)
            c, a = lay.center, lay.a
            if lay.t_plus < cur_t:
                pieces.append((lay.t_plus, cur_t, "const", j, a, lay.t_plus, cur_lq))
                cur_t = lay.t_plus
            elif lay.t_plus > cur_t:
                # the paper's simplified intervals overlap around k = 1, 2;
                # the later (smaller-center) interval takes precedence so
                # every mode's own resonant interval keeps its structure
                while pieces and pieces[-1][0] < lay.t_plus:
                    lo, hi, *rest = pieces[-1]
                    pieces.pop()
                    if hi > lay.t_plus:
                        piece = (lay.t_plus, hi, *rest)
                        pieces.append(piece)
                        cur_lq = value_on(piece, lay.t_plus)
                        break
                cur_t = lay.t_plus
            if lay.t_plus > c:
                pieces.append((c, lay.t_plus, "R", j, a, lay.t_plus, cur_lq))
                cur_lq = cur_lq + (rho + 0.5) * (
                    self._logF(j, a, c) - self._logF(j, a, lay.t_plus))
                cur_t = c
            if c > lay.t_minus:
                pieces.append((lay.t_minus, c, "L", j, a, c, cur_lq))
                cur_lq = cur_lq - rho * (
                    self._logG(j, a, lay.t_minus) - self._logG(j, a, c))
                cur_t = lay.t_minus
        self.t_start = cur_t
        self.log_q_start = cur_lq
        pieces.reverse()
        self.pieces = pieces
        self._lows = [p[0] for p in pieces]

    def _logF(self, j: int, a: float, t: float) -> float:
        u = abs(t - self.eta / j)
        return math.log(j ** 3 / (2.0 * self.eta)) + math.log1p(a * u)

    def _logG(self, j: int, a: float, t: float) -> float:
        return math.log1p(a * abs(t - self.eta / j))

    def log_at(self, t: float) -> float:
        if t >= self.anchor_t:
            return 0.0
        if t <= self.t_start:
            return self.log_q_start
        i = bisect.bisect_right(self._lows, t) - 1
        lo, hi, kind, j, a, ref_t, ref_lq = self.pieces[i]
        if kind == "const":
            return ref_lq
        if kind == "R":
            return ref_lq + (self.rho + 0.5) * (self._logF(j, a, t) - self._logF(j, a, ref_t))
        return ref_lq - self.rho * (self._logG(j, a, t) - self._logG(j, a, ref_t))

    def rate_at(self, t: float) -> float:
        """d/dt log q_NR (one-sided at breakpoints)."""
        if t >= self.anchor_t or t <= self.t_start:
            return 0.0
        i = bisect.bisect_right(self._lows, t) - 1
        lo, hi, kind, j, a, _, _ = self.pieces[i]
        c = self.eta / j
        if kind == "const":
            return 0.0
        if kind == "R":
            return (self.rho + 0.5) * a / (1.0 + a * (t - c))
        return self.rho * a / (1.0 + a * (c - t))

    def breakpoints(self) -> list[float]:
        pts = {self.t_start, self.anchor_t, 2.0 * self.eta}
        for lo, hi, *_ in self.pieces:
            pts.add(lo)
            pts.add(hi)
        return sorted(pts)


_QNR_CACHE: dict[tuple[float, float], QNonResonant] = {}


def _qnr(eta: float, rho: float) -> QNonResonant:
    key = (float(eta), float(rho))
    got = _QNR_CACHE.get(key)
    if got is None:
        if len(_QNR_CACHE) > 4096:
            _QNR_CACHE.clear()
        got = QNonResonant(eta, rho)
        _QNR_CACHE[key] = got
    return got


def _own_resonant_log_factor(t: float, k: int, eta: float) -> float:
    """-1/2 * log F_k(t) on the mode's own Itilde, else 0."""
    lay = resonance_layout(k, eta)
    if lay is None or not (lay.t_minus <= t <= lay.t_plus):
        return 0.0
    u = abs(t - lay.center)
    return -0.5 * (math.log(abs(k) ** 3 / (2.0 * abs(eta))) + math.log1p(lay.a * u))


def log_q(t: float, k: int, eta: float, params: WeightParams) -> float:
    """log q(t, k, eta); q = 1 for |eta| <= 1 and for t > 2|eta|.

    Negative eta uses the reflection q(t, k, eta) = q(t, -k, -eta); pairs
    with eta*k < 0 (and k = 0) carry the non-resonant weight only.
    """
    if abs(eta) <= 1.0:
        return 0.0
    if eta < 0:
        return log_q(t, -k, -eta, params)
    if t > 2.0 * eta:
        return 0.0
    base = _qnr(eta, params.rho).log_at(t)
    return base + _own_resonant_log_factor(t, k, eta)


def dq_ratio(t: float, k: int, eta: float, params: WeightParams) -> float:
    """d/dt log q (one-sided at breakpoints); 0 on constant pieces."""
    if abs(eta) <= 1.0:
        return 0.0
    if eta < 0:
        return dq_ratio(t, -k, -eta, params)
    if t > 2.0 * eta:
        return 0.0
    qnr = _qnr(eta, params.rho)
    rate = qnr.rate_at(t)
    lay = resonance_layout(k, eta)
    if lay is not None and lay.t_minus <= t <= lay.t_plus:
        u = t - lay.center
        rate += -0.5 * lay.a * math.copysign(1.0, u) / (1.0 + lay.a * abs(u)) \
            if u != 0 else 0.0
    return rate


def q_breakpoints(k: int, eta: float, rho: float = 0.05) -> list[float]:
    """All junction times of log q(., k, eta) for continuity checks.

    Locations depend only on eta (piece domains are rho-independent).
    """
    if abs(eta) <= 1.0:
        return []
    if eta < 0:
        return q_breakpoints(-k, -eta, rho)
    pts = set(_qnr(eta, rho).breakpoints())
    lay = resonance_layout(k, eta)
    if lay is not None:
        pts.update([lay.t_minus, lay.center, lay.t_plus,
                    lay.I_left.lo, lay.I_right.hi])
    return sorted(pts)


# ---------------------------------------------------------------------------
# composite weights


def log_Jt(t: float, k: int, eta: float, params: WeightParams) -> float:
    return 8.0 * params.rho * abs(eta) ** (1.0 / 3.0) - log_q(t, k, eta, params)


def log_J(t: float, k: int, eta: float, params: WeightParams) -> float:
    return float(np.logaddexp(log_Jt(t, k, eta, params),
                              8.0 * params.rho * abs(k) ** (1.0 / 3.0)))


def _log_A_from(log_m_val: float, log_J_val: float, lam: float,
                k: float, eta: float, params: WeightParams) -> float:
    gev = lam * (abs(k) + abs(eta)) ** params.s
    return params.N * math.log(float(bracket(k, eta))) - log_m_val + log_J_val + gev


def log_A(t: float, k: int, eta: float, params: WeightParams,
          lam: float | None = None) -> float:
    lam = lambda_at(t, params) if lam is None else lam
    return _log_A_from(log_m(t, k, eta, params), log_J(t, k, eta, params),
                       lam, k, eta, params)


def log_At(t: float, k: int, eta: float, params: WeightParams,
           lam: float | None = None) -> float:
    lam = lambda_at(t, params) if lam is None else lam
    return _log_A_from(log_m(t, k, eta, params), log_Jt(t, k, eta, params),
                       lam, k, eta, params)


# ---------------------------------------------------------------------------
# frequency-set classifiers


def classify_pair(k: int, eta: float, l: int, xi: float) -> str:
    """Reaction / transport / remainder split of a frequency pair.

    Reaction: |k-l, eta-xi| >= 8|l, xi|; transport: 8|k-l, eta-xi| <=
    |l, xi|; remainder covers the middle band, and boundary ties go to
    remainder.
    """
    diff = math.hypot(k - l, eta - xi)
    low = math.hypot(l, xi)
    if diff > 8.0 * low:
        return "reaction"
    if 8.0 * diff < low:
        return "transport"
    return "remainder"


def in_S_t(t: float, k: int, eta: float) -> bool:
    """|k, eta| <= 10 t^2."""
    return math.hypot(k, eta) <= 10.0 * t * t


# ---------------------------------------------------------------------------
# cached per-grid tables


class WeightCache:
    """Amortizes m-envelopes and q pieces across diagnostic times.

    On first use the per-mode envelope segments are packed into padded
    arrays so a whole-grid evaluation at one time is a few vectorized
    gathers instead of a Python loop.
    """

    def __init__(self, grid: Grid, params: WeightParams, t_max: float):
        self.grid = grid
        self.params = params
        self.t_max = float(t_max)
        self._envelopes: dict[tuple[int, float], MEnvelope] = {}
        self._packed = None

    def envelope(self, k: int, eta: float) -> MEnvelope:
        key = (int(k), float(eta))
        env = self._envelopes.get(key)
        if env is None:
            env = MEnvelope(k, eta, self.params, self.t_max)
            self._envelopes[key] = env
        return env

    def _pack(self):
        if self._packed is not None:
            return self._packed
        grid = self.grid
        envs = []
        for k in grid.k_values:
            for eta in grid.eta_values:
                envs.append(self.envelope(int(k), float(eta)))
        n = len(envs)
        S = max(max(len(e._amps) for e in envs), 1)
        starts = np.full((n, S), np.inf)  # segment start times only
        amps = np.zeros((n, S))
        cents = np.zeros((n, S))
        cum = np.zeros((n, S))
        t_enter = np.empty(n)
        for i, e in enumerate(envs):
            m = len(e._amps)
            t_enter[i] = e.t_enter
            if m:
                starts[i, :m] = e._breaks[:m]
                amps[i, :m] = e._amps
                cents[i, :m] = e._cents
                cum[i, :m] = e._cum[:m]
        self._packed = (starts, amps, cents, cum, t_enter)
        return self._packed

    def log_m_and_rate(self, t: float):
        """Whole-grid (log m, d/dt log m) arrays at one time."""
        starts, amps, cents, cum, t_enter = self._pack()
        n, S = amps.shape
        tt = min(t, self.t_max)
        idx = np.clip(np.sum(starts <= tt, axis=1) - 1, 0, S - 1)
        rows = np.arange(n)
        a = amps[rows, idx]
        c = cents[rows, idx]
        b = starts[rows, idx]
        active = (tt > t_enter) & (a > 0)
        lm = np.where(active,
                      cum[rows, idx] + a * (np.arctan(tt - c) - np.arctan(b - c)),
                      0.0)
        u = tt - c
        rate = np.where(active & (t <= self.t_max), a / (1.0 + u * u), 0.0)
        shape = self.grid.shape
        return lm.reshape(shape), rate.reshape(shape)

    def log_q_and_rate(self, t: float):
        """Whole-grid (log q, d/dt log q) arrays at one time."""
        grid, params = self.grid, self.params
        lq = np.zeros(grid.shape)
        dq = np.zeros(grid.shape)
        for j, eta in enumerate(grid.eta_values):
            ae = abs(eta)
            if ae <= 1.0 or t > 2.0 * ae:
                continue
            qnr = _qnr(ae, params.rho)
            base = qnr.log_at(t)
            rate = qnr.rate_at(t)
            if base != 0.0 or rate != 0.0:
                lq[:, j] = base
                dq[:, j] = rate
            sign = 1 if eta > 0 else -1
            kmax = qnr.k_max
            for ak in range(1, kmax + 1):
                lay = resonance_layout(ak, ae)
                if lay is None or not (lay.t_minus <= t <= lay.t_plus):
                    continue
                i = grid.index_of_k(sign * ak)
                u = t - lay.center
                lq[i, j] += -0.5 * (math.log(ak ** 3 / (2.0 * ae))
                                    + math.log1p(lay.a * abs(u)))
                if u != 0.0:
                    dq[i, j] += -0.5 * lay.a * math.copysign(1.0, u) \
                        / (1.0 + lay.a * abs(u))
        return lq, dq


@dataclass
class WeightTable:
    """Per-(k, eta) log weights and rate caches at one time.

    All entries are finite by construction (log-space storage); the m
    entries are nondecreasing in t when tables are built at increasing
    times from one cache.
    """

    grid: Grid
    params: WeightParams
    t: float
    lam: float
    log_mL: np.ndarray
    log_m: np.ndarray
    log_q: np.ndarray
    dm_ratio: np.ndarray
    dq_ratio: np.ndarray
    dmL_ratio: np.ndarray
    log_J: np.ndarray
    log_Jt: np.ndarray
    log_A: np.ndarray
    log_At: np.ndarray

    @classmethod
    def build(cls, grid: Grid, params: WeightParams, t: float,
              cache: WeightCache | None = None) -> "WeightTable":
        if cache is None:
            cache = WeightCache(grid, params, t_max=max(t, 1.0))
        lm, dm = cache.log_m_and_rate(t)
        lq, dq = cache.log_q_and_rate(t)
        K, ETA = grid.K, grid.ETA
        lmL = log_mL(t, K, ETA, params)
        dmL = dmL_ratio(t, K, ETA, params)
        lJt = 8.0 * params.rho * np.abs(ETA) ** (1.0 / 3.0) - lq
        lJ = np.logaddexp(lJt, 8.0 * params.rho * np.abs(K) ** (1.0 / 3.0))
        lam = lambda_at(t, params)
        gev = lam * (np.abs(K) + np.abs(ETA)) ** params.s
        base = params.N * np.log(bracket(K, ETA)) - lm + gev
        table = cls(grid=grid, params=params, t=float(t), lam=lam,
                    log_mL=lmL, log_m=lm, log_q=lq, dm_ratio=dm, dq_ratio=dq,
                    dmL_ratio=dmL, log_J=lJ, log_Jt=lJt,
                    log_A=base + lJ, log_At=base + lJt)
        for name in ("log_mL", "log_m", "log_q", "dm_ratio", "dq_ratio",
                     "log_J", "log_Jt", "log_A", "log_At"):
            if not np.all(np.isfinite(getattr(table, name))):
                raise ConfigError(f"non-finite entries in WeightTable.{name}")
        return table

    @property
    def A(self) -> np.ndarray:
        return np.exp(self.log_A)

    @property
    def At(self) -> np.ndarray:
        return np.exp(self.log_At)

    def dA_ratio(self) -> np.ndarray:
        """d/dt log A = -dm/m + dJ/J + lambda'(t)(|k|+|eta|)^s, exact."""
        dJ_over_J = -self.dq_ratio * np.exp(self.log_Jt - self.log_J)
        gev_rate = dlambda_dt(self.t, self.params) \
            * (np.abs(self.grid.K) + np.abs(self.grid.ETA)) ** self.params.s
        return -self.dm_ratio + dJ_over_J + gev_rate
