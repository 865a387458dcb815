"""Hurwitz zeta and periodic-coefficient series evaluation.

Everything runs through one Euler-Maclaurin core with a rigorous remainder
bound, usable in two tiers: 53-bit floats for exploration and winding scans,
and mpmath arbitrary precision for construction certificates.

Euler-Maclaurin layout (derivation note)
----------------------------------------
For a > 0 and s != 1, summation by parts of sum_{n>=0} (n+a)^(-s) against
the Bernoulli-polynomial kernel gives, for any shift T >= 1 and order K >= 1,

    zeta(s, a) = sum_{n=0}^{T-1} (n+a)^(-s)
               + w^(1-s)/(s-1) + w^(-s)/2
               + sum_{k=1}^{K} B_{2k}/(2k)! * (s)_{2k-1} * w^(-s-2k+1)
               + R_K,        w := T + a,

with (s)_m the rising factorial.  The remainder is the integral of the
periodized Bernoulli polynomial B_{2K+2}({x}) against the (2K+2)-nd
derivative of x^(-s); bounding |B_{2K+2}({x})| by |B_{2K+2}| and integrating
|x^(-s-2K-2)| over (T, infinity) yields, whenever sigma + 2K + 1 > 0,

    |R_K| <= |B_{2K+2}/(2K+2)!| * |(s)_{2K+1}| * w^(-sigma-2K-1)
             * |s+2K+1| / (sigma+2K+1).

This is the classical estimate: the remainder is at most the first omitted
term magnified by |s+2K+1|/(sigma+2K+1).  All terms are produced
incrementally through ratios, so nothing overflows even at large |t|.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import fp, mp

from .arith import PeriodicFunction

POLE_TOLERANCE = 1e-12
_MAX_CORRECTION_ORDER = 30
_MAX_SHIFT_ESCALATIONS = 8


class PoleAtOne(ArithmeticError):
    """Evaluation requested exactly at the simple pole s = 1."""


class DivergesAtOne(ArithmeticError):
    """Absolute tail requested at sigma <= 1 where the series diverges."""


class PrecisionExhausted(ArithmeticError):
    """The working precision cannot certify the requested bound."""


@dataclass(frozen=True)
class ComplexPoint:
    """A point s = sigma + i t given by its real and imaginary parts."""

    sigma: float
    t: float = 0.0

    def __complex__(self):
        return complex(self.sigma, self.t)


@dataclass(frozen=True)
class PrecisionProfile:
    """Working precision plus the truncation tolerance requested of it."""

    working_digits: int = 15
    target_tolerance: float = 1e-12

    def __post_init__(self):
        if self.working_digits < 15:
            raise ValueError("working_digits must be at least 15")
        if not 0 < self.target_tolerance:
            raise ValueError("target_tolerance must be positive")
        if self.target_tolerance < 10.0 ** (-(self.working_digits + 2)):
            raise ValueError("working_digits too small to represent the tolerance")

    @property
    def uses_floats(self):
        return self.working_digits <= 17


EXPLORE = PrecisionProfile(15, 1e-12)
CERTIFY = PrecisionProfile(50, 1e-40)


@dataclass(frozen=True)
class EvalResult:
    value: object  # complex (float tier) or mpmath mpc
    abs_error_bound: float
    pole_flag: bool = False

    def __complex__(self):
        return complex(self.value)


def _as_s(s):
    if isinstance(s, ComplexPoint):
        return complex(s)
    if isinstance(s, Fraction):
        return complex(float(s))
    return complex(s)


def _to_mpc(s):
    """s as an mpc at the current working precision, without a float detour."""
    if isinstance(s, (mp.mpc, mp.mpf)):
        return mp.mpc(s)
    if isinstance(s, ComplexPoint):
        return mp.mpc(s.sigma, s.t)
    if isinstance(s, Fraction):
        return mp.mpc(mp.mpf(s.numerator) / s.denominator)
    return mp.mpc(s)


def _ctx_and_eps(prof: PrecisionProfile):
    if prof.uses_floats:
        return fp, 2.0**-50
    return mp, float(mp.mpf(10) ** (-prof.working_digits))


def _em_core(ctx, s, a, tol, digits):
    """One Euler-Maclaurin evaluation; returns (value, truncation_bound).

    `s`, `a` are ctx numbers; `a` > 0 real; the pole term w^(1-s)/(s-1) is
    included (caller must keep s away from 1).  The shift doubles until
    the remainder bound meets the tolerance; with the correction order
    capped at 30 this always happens within a few doublings for any
    sigma > -55.
    """
    sigma = ctx.re(s) if ctx is mp else s.real
    t_abs = abs(ctx.im(s) if ctx is mp else s.imag)
    T0 = max(10, int(ctx.ceil(t_abs)), (digits + 1) // 2)
    T = T0
    best = None
    for _ in range(_MAX_SHIFT_ESCALATIONS):
        value, bound, magsum = _em_fixed_shift(ctx, s, a, sigma, T)
        if best is None or bound < best[1]:
            best = (value, bound, magsum)
        if bound <= tol:
            break
        T *= 2
    value, bound, magsum = best
    if bound > tol:
        raise PrecisionExhausted(
            f"remainder bound {bound:.3e} misses tolerance {tol:.3e} at s={complex(s)}"
        )
    return value, bound, magsum


def _em_fixed_shift(ctx, s, a, sigma, T):
    head = ctx.mpc(0)
    magsum = ctx.mpf(0)
    for n in range(T):
        term = (n + a) ** (-s)
        head += term
        magsum += abs(term)
    w = T + a
    w_pow_neg_s = w ** (-s)
    pole_part = w * w_pow_neg_s / (s - 1)  # w^(1-s)/(s-1)
    value = head + pole_part + w_pow_neg_s / 2
    magsum += abs(pole_part) + abs(w_pow_neg_s) / 2

    # correction terms t_k = B_{2k}/(2k)! * (s)_{2k-1} * w^(-s-2k+1), built
    # by ratios:  t_{k+1} = t_k * [b_{k+1}/b_k] * (s+2k-1)(s+2k) / w^2
    b_prev = ctx.bernoulli(2) / 2  # B_2/2!
    t_k = b_prev * s * w_pow_neg_s / w  # k = 1
    w2 = w * w
    best_value, best_bound = None, ctx.inf
    k = 1
    while k <= _MAX_CORRECTION_ORDER:
        value += t_k
        magsum += abs(t_k)
        b_next = ctx.bernoulli(2 * k + 2) / ctx.factorial(2 * k + 2)
        b_cur = ctx.bernoulli(2 * k) / ctx.factorial(2 * k)
        t_next = t_k * (b_next / b_cur) * (s + 2 * k - 1) * (s + 2 * k) / w2
        if sigma + 2 * k + 1 > 0:
            bound = abs(t_next) * abs(s + 2 * k + 1) / (sigma + 2 * k + 1)
            if bound < best_bound:
                best_value, best_bound = value, bound
            elif bound > 4 * best_bound:
                break  # asymptotic series turned; stop early
        t_k = t_next
        k += 1
    if best_value is None:  # sigma so negative no valid bound existed
        raise PrecisionExhausted(f"no valid remainder bound for sigma={sigma}")
    return best_value, float(best_bound), magsum


def _eval_hurwitz(s, x, prof):
    """(value, total_bound) for zeta(s, x), x > 0 real, s != 1."""
    ctx, eps = _ctx_and_eps(prof)
    if prof.uses_floats:
        sc = _as_s(s)
        value, bound, magsum = _em_core(ctx, sc, float(x), prof.target_tolerance, 15)
        round_slop = 8 * eps * float(magsum)
        return value, bound + round_slop
    with mp.workdps(prof.working_digits + 10):
        sc = _to_mpc(s)
        xv = _to_mpf(x)
        value, bound, magsum = _em_core(mp, sc, xv, prof.target_tolerance, prof.working_digits)
        round_slop = 8 * eps * float(magsum)
        return value, bound + round_slop


def _to_mpf(x):
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def hurwitz_zeta(s, x, prof: PrecisionProfile = EXPLORE) -> EvalResult:
    """zeta(s, x) = sum_{n>=0} (n+x)^(-s), meromorphically continued.

    `x` must be positive (the contract of interest is x in (0, 1], but any
    positive shift evaluates).  Exactly at s = 1 raises PoleAtOne; within
    1e-12 of the pole the result is flagged instead of fabricated.
    """
    xf = float(x)
    if not xf > 0:
        raise ValueError("shift x must be positive")
    sc = _as_s(s)
    if sc == 1:
        raise PoleAtOne("zeta(s, x) has its simple pole at s = 1")
    if abs(sc - 1) < POLE_TOLERANCE:
        return EvalResult(None, float("inf"), pole_flag=True)
    value, bound = _eval_hurwitz(s, x, prof)
    return EvalResult(value, bound)


def _class_shifts(f: PeriodicFunction, alpha, ctx):
    """(r + alpha)/q for each residue class r, as ctx reals."""
    q = f.period
    if ctx is fp:
        a = float(alpha)
        return [(r + a) / q for r in range(q)]
    a = _to_mpf(alpha) if not isinstance(alpha, mp.mpf) else alpha
    return [(r + a) / q for r in range(q)]


def f_eval(s, f: PeriodicFunction, alpha, prof: PrecisionProfile = EXPLORE) -> EvalResult:
    """F(s) = sum_{n>=0} f(n) (n+alpha)^(-s) for 0 < alpha <= 1.

    Evaluated per residue class: F = q^(-s) sum_r f(r) zeta(s, (r+alpha)/q).
    At s = 1 the series has a simple pole iff sum_r f(r) != 0; in that case
    an exact hit raises PoleAtOne and a near hit (within 1e-12) comes back
    pole-flagged.  When the period sum vanishes the pole cancels and the
    value is computed stably from the combined pole parts.
    """
    if not 0 < float(alpha) <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    sc = _as_s(s)
    res_re, res_im = f.coefficient_sum()
    has_pole = not (res_re == 0 and res_im == 0)
    near_pole = abs(sc - 1) < POLE_TOLERANCE
    if near_pole and has_pole:
        if sc == 1:
            raise PoleAtOne("F(s) has a pole at s = 1 (nonzero period sum)")
        return EvalResult(None, float("inf"), pole_flag=True)
    if near_pole:
        return _f_eval_near_cancelled_pole(sc, f, alpha, prof)

    ctx, eps = _ctx_and_eps(prof)
    q = f.period
    per_class_tol = prof.target_tolerance / max(1, sum(1 for v in f.abs_values() if v))

    def run(ctx_s):
        shifts = _class_shifts(f, alpha, ctx)
        total = ctx.mpc(0)
        bound = 0.0
        qs = ctx.mpf(q) ** (-ctx_s)
        for r in range(q):
            fr = f(r)
            if fr == 0:
                continue
            sub = PrecisionProfile(prof.working_digits, per_class_tol)
            val, b = _eval_hurwitz(ctx_s, shifts[r], sub)
            total += (ctx.mpc(fr.real, fr.imag) if ctx is mp else fr) * val
            bound += abs(fr) * b
        return qs * total, float(abs(qs)) * bound

    if prof.uses_floats:
        value, bound = run(sc)
        return EvalResult(value, bound)
    with mp.workdps(prof.working_digits + 10):
        value, bound = run(_to_mpc(s))
        return EvalResult(value, bound)


def _f_eval_near_cancelled_pole(sc, f, alpha, prof):
    # Period sum is zero: the per-class pole parts w_r^(1-s)/(s-1) combine to
    # an analytic function; expand sum_r f(r) w_r^(1-s) around s = 1.
    ctx, eps = _ctx_and_eps(prof)

    def run(ctx_s, ctx_is_mp):
        q = f.period
        digits = prof.working_digits
        shifts = _class_shifts(f, alpha, ctx)
        t_abs = abs(ctx_s.imag if not ctx_is_mp else mp.im(ctx_s))
        T = max(10, int(fp.ceil(float(t_abs))), (digits + 1) // 2)
        total = ctx.mpc(0)
        bound = 0.0
        # non-pole pieces per class, sharing the same shift T
        for r in range(q):
            fr = f(r)
            if fr == 0:
                continue
            head = sum((n + shifts[r]) ** (-ctx_s) for n in range(T))
            w = T + shifts[r]
            wps = w ** (-ctx_s)
            corr, corr_bound, mags = _em_corrections(ctx, ctx_s, w, wps, prof)
            piece = head + wps / 2 + corr
            frc = ctx.mpc(fr.real, fr.imag) if ctx_is_mp else fr
            total += frc * piece
            bound += abs(fr) * (corr_bound + 8 * eps * float(mags + abs(head)))
        # combined pole part: sum_r f(r) w_r^(1-s)/(s-1)
        u = 1 - ctx_s  # |u| < 1e-12
        lead = ctx.mpc(0)
        second = ctx.mpc(0)
        third_mag = 0.0
        for r in range(q):
            fr = f(r)
            if fr == 0:
                continue
            frc = ctx.mpc(fr.real, fr.imag) if ctx_is_mp else fr
            L = ctx.log(T + shifts[r])
            lead += frc * L
            second += frc * L * L
            third_mag += abs(fr) * float(L) ** 3
        pole_piece = -(lead + u * second / 2)
        bound += abs(u) ** 2 * third_mag
        qs = ctx.mpf(f.period) ** (-ctx_s)
        return qs * (total + pole_piece), float(abs(qs)) * bound

    if prof.uses_floats:
        value, bound = run(sc, False)
        return EvalResult(value, bound)
    with mp.workdps(prof.working_digits + 10):
        value, bound = run(mp.mpc(sc), True)
        return EvalResult(value, bound)


def _em_corrections(ctx, s, w, w_pow_neg_s, prof):
    """Correction sum of the Euler-Maclaurin tail only (no head, no pole)."""
    sigma = float(mp.re(s)) if ctx is mp else s.real
    b_prev = ctx.bernoulli(2) / 2
    t_k = b_prev * s * w_pow_neg_s / w
    w2 = w * w
    total = ctx.mpc(0)
    magsum = ctx.mpf(0)
    best_total, best_bound = None, float("inf")
    k = 1
    while k <= _MAX_CORRECTION_ORDER:
        total += t_k
        magsum += abs(t_k)
        b_next = ctx.bernoulli(2 * k + 2) / ctx.factorial(2 * k + 2)
        b_cur = ctx.bernoulli(2 * k) / ctx.factorial(2 * k)
        t_next = t_k * (b_next / b_cur) * (s + 2 * k - 1) * (s + 2 * k) / w2
        if sigma + 2 * k + 1 > 0:
            bound = float(abs(t_next) * abs(s + 2 * k + 1) / (sigma + 2 * k + 1))
            if bound < best_bound:
                best_total, best_bound = total, bound
            elif bound > 4 * best_bound:
                break
        t_k = t_next
        k += 1
    return best_total, best_bound, magsum


def abs_tail(f: PeriodicFunction, alpha, sigma, N: int, prof: PrecisionProfile = EXPLORE):
    """sum_{n > N} |f(n)| (n+alpha)^(-sigma), exactly rewritten per class as
    Hurwitz zeta values at real argument.  Requires sigma > 1."""
    value, _ = abs_tail_with_bound(f, alpha, sigma, N, prof)
    return value


def abs_coefficient(f: PeriodicFunction, r: int, ctx):
    """|f(r)| at ctx precision, from the exact stored value."""
    re, im = f.exact(r)
    mag2 = re * re + im * im
    if mag2 == 0:
        return ctx.mpf(0)
    if im == 0:
        return abs(ctx.mpf(re.numerator) / re.denominator) if ctx is mp else abs(float(re))
    if ctx is fp:
        return fp.sqrt(float(mag2))
    return mp.sqrt(mp.mpf(mag2.numerator) / mag2.denominator)


def abs_tail_with_bound(f: PeriodicFunction, alpha, sigma, N: int, prof: PrecisionProfile = EXPLORE):
    sigma_f = float(sigma)
    if sigma_f <= 1:
        raise DivergesAtOne("absolute tail diverges for sigma <= 1")
    ctx, eps = _ctx_and_eps(prof)
    q = f.period

    def run(sg):
        total = ctx.mpf(0)
        bound = 0.0
        qs = ctx.mpf(q) ** (-sg)
        for r in range(q):
            a_fr = abs_coefficient(f, r, ctx)
            if a_fr == 0:
                continue
            n0 = r + q * ((N - r) // q + 1)  # smallest n > N with n = r (mod q)
            shift = (n0 + (_to_mpf(alpha) if ctx is mp else float(alpha))) / q
            val, b = _eval_hurwitz(sg, shift, prof)
            total += a_fr * (val.real if ctx is fp else mp.re(val))
            bound += float(a_fr) * b
        return qs * total, float(qs) * bound

    if prof.uses_floats:
        return run(sigma_f)
    with mp.workdps(prof.working_digits + 10):
        return run(_to_mpf(sigma))


def class_partial_sum(f: PeriodicFunction, alpha, sigma, N: int, residue: int,
                      prof: PrecisionProfile = CERTIFY):
    """(value, bound) for sum_{0 <= n <= N, n = residue (mod q)} (n+alpha)^(-sigma)
    WITHOUT the f weights, via two Hurwitz zeta evaluations."""
    q = f.period
    r = residue % q
    count = (N - r) // q + 1 if N >= r else 0
    if count <= 0:
        return (0.0 if prof.uses_floats else mp.mpf(0)), 0.0
    ctx, _ = _ctx_and_eps(prof)

    def run(sg, a):
        qs = ctx.mpf(q) ** (-sg)
        lo, b1 = _eval_hurwitz(sg, (r + a) / q, prof)
        hi, b2 = _eval_hurwitz(sg, (r + q * count + a) / q, prof)
        lo = lo.real if ctx is fp else mp.re(lo)
        hi = hi.real if ctx is fp else mp.re(hi)
        return qs * (lo - hi), float(qs) * (b1 + b2)

    if prof.uses_floats:
        return run(float(sigma), float(alpha))
    with mp.workdps(prof.working_digits + 10):
        return run(_to_mpf(sigma), _to_mpf(alpha))
