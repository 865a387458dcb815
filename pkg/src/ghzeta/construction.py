"""Inductive construction of a unimodular completely multiplicative twist
that drives the twisted partial sums of F toward zero.

Stage j covers the window (N_j, N_j + M_j] with M_j = floor(theta * N_j).
Window members split per residue class b mod q into those owning a private
prime ideal (free phase slot) and the rest.  Phases of non-private new
primes default to one; the private phases are then aimed, by Bohr's
addition of convex curves, so every class sum cancels as much of its
accumulated drift as the free weight allows.  Each stage certifies, in
high-precision interval style arithmetic, that the twisted partial sum
stays under the contraction fraction of the remaining absolute tail.

All certified sums run at a fixed working precision (50 digits by
default); phases are exact unit complex numbers at that precision and are
recorded write-once.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import fp, mp

from .arith import FactorCache, PeriodicFunction
from .density import WindowSpec, private_prime_scan, window_records
from .ideals import AlgebraicAlpha, ideal_factorize
from .zeta import (
    PrecisionExhausted,
    PrecisionProfile,
    abs_coefficient,
    abs_tail_with_bound,
    class_partial_sum,
)


class Unreachable(ValueError):
    """Bohr target outside the reachable annulus of the given radii."""


class ThinClass(RuntimeError):
    """A window class owns fewer private primes than the profile demands."""


@dataclass(frozen=True)
class ConstructionProfile:
    """Window geometry and certification constants.

    The consistency inequality
        (floor/(1-floor)) * (1/(1+theta))^(1+delta) > (1+c)/(1-c)
    ties the density floor, the window ratio and the contraction constant
    together: with it, a window meeting the floor strictly shrinks the
    drift bound from stage to stage.
    """

    theta: Fraction
    n1: int
    q: int = 1
    density_floor: float = 0.54
    contraction: Fraction = Fraction(1, 100)
    min_a_size: int = 5
    delta: float = 0.5
    digits: int = 50
    name: str = "custom"

    def __post_init__(self):
        if not 0 < self.theta < 1:
            raise ValueError("theta must be in (0,1)")
        if self.n1 < 1 or self.q < 1:
            raise ValueError("n1 and q must be positive")
        c = float(self.contraction)
        lhs = (self.density_floor / (1 - self.density_floor)) * (
            1.0 / (1.0 + float(self.theta))
        ) ** (1.0 + self.delta)
        rhs = (1 + c) / (1 - c)
        if lhs <= rhs:
            raise ValueError(
                f"inconsistent profile: density/window/contraction give {lhs:.4f} <= {rhs:.4f}"
            )

    @classmethod
    def desk(cls, q: int = 1):
        """Small-scale profile: multi-stage runs finish in seconds."""
        return cls(theta=Fraction(1, 20), n1=4000 * q, q=q, name="desk")

    @classmethod
    def canonical(cls, q: int = 1):
        """The full-scale constants; single windows are feasible, long
        inductions are not."""
        return cls(theta=Fraction(1, 10**6), n1=10**7 * q, q=q, name="canonical")

    def window_length(self, n: int) -> int:
        return int(self.theta * n)

    @property
    def tolerance(self):
        return 10.0 ** (-(self.digits // 2))

    def precision(self) -> PrecisionProfile:
        return PrecisionProfile(self.digits, 10.0 ** (-(self.digits - 10)))


# ---------------------------------------------------------------------------
# Bohr targeting


def bohr_solve(radii, target, ctx=fp):
    """Phases theta_i with sum_i r_i e^(i theta_i) = target, exactly at
    working precision.

    The reachable set of a linkage with positive link lengths is the
    annulus max(0, 2 max r - sum r) <= |z| <= sum r.  Links are placed
    longest first: each link turns just far enough that the residual
    target stays reachable for the remaining links, and the final two
    links close the triangle exactly.  O(k log k), deterministic.
    """
    if not radii:
        raise ValueError("need at least one radius")
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    radii_c = [ctx.mpf(r) if ctx is mp else float(r) for r in radii]
    z = ctx.mpc(target)
    total = sum(radii_c)
    rmax = max(radii_c)
    inner = max(0 * total, 2 * rmax - total)
    tol = 1e-9 * float(total)
    if abs(z) > total + tol or abs(z) < inner - tol:
        raise Unreachable(
            f"|target| = {abs(z)} outside the reachable annulus [{inner}, {total}]"
        )
    # clamp rounding-level overshoot exactly onto the annulus so the link
    # invariants below hold
    if abs(z) > total:
        z = z * (total / abs(z))
    elif 0 < abs(z) < inner:
        z = z * (inner / abs(z))
    elif abs(z) == 0 and inner > 0:
        raise Unreachable("zero target with a positive inner radius")

    order = sorted(range(len(radii_c)), key=lambda i: (-radii_c[i], i))
    sorted_r = [radii_c[i] for i in order]
    k = len(sorted_r)
    phases = [None] * k

    def unit(w):
        a = abs(w)
        return w / a if a != 0 else ctx.mpc(1)

    w = z
    for i in range(k - 2):
        r = sorted_r[i]
        rest = sorted_r[i + 1 :]
        R = sum(rest)
        inner_rest = max(0 * R, 2 * max(rest) - R)
        aw = abs(w)
        lo = max(inner_rest, abs(aw - r))
        hi = min(R, aw + r)
        rho = lo if lo <= hi else (lo + hi) / 2  # lo <= hi always holds here
        if aw == 0:
            u = ctx.mpc(1)
        else:
            cos_phi = (aw * aw + r * r - rho * rho) / (2 * aw * r)
            cos_phi = max(-1, min(1, cos_phi))
            phi = ctx.acos(cos_phi)
            u = unit(w) * ctx.expjpi(phi / ctx.pi) if ctx is mp else unit(w) * fp.exp(1j * phi)
        phases[i] = u
        w = w - r * u

    if k == 1:
        r = sorted_r[0]
        if abs(abs(z) - r) > tol:
            raise Unreachable("single link cannot reach the target")
        phases[0] = unit(z)
    else:
        ra, rb = sorted_r[k - 2], sorted_r[k - 1]
        aw = abs(w)
        if aw == 0:
            # closes only when the last two links cancel
            if abs(ra - rb) > tol:
                raise Unreachable("zero residual with unequal closing links")
            ua, ub = ctx.mpc(1), ctx.mpc(-1)
        else:
            cos_a = (aw * aw + ra * ra - rb * rb) / (2 * aw * ra)
            cos_a = max(-1, min(1, cos_a))
            ang = ctx.acos(cos_a)
            rot = ctx.expjpi(ang / ctx.pi) if ctx is mp else fp.exp(1j * ang)
            ua = unit(w) * rot
            rem = w - ra * ua
            ub = unit(rem)
        phases[k - 2], phases[k - 1] = ua, ub

    out = [None] * k
    for slot, i in enumerate(order):
        out[i] = ctx.phase(phases[slot]) if ctx is mp else fp.phase(phases[slot])
    return out


# ---------------------------------------------------------------------------
# phase bookkeeping


class PhiAssignment:
    """Write-once map from prime ideal keys to unit phases.

    Unassigned keys (and the residual ideal part) act as phase 1, so only
    informative phases are materialized; `ensure_one` pins a key to the
    default explicitly and is idempotent, while `set_phase` never allows a
    second write.
    """

    def __init__(self, digits=50):
        self._table = {}
        self._digits = digits

    def set_phase(self, key, phase):
        if key in self._table:
            raise RuntimeError(f"phase for {key} already assigned (write-once)")
        with mp.workdps(self._digits + 10):
            if abs(abs(mp.mpc(phase)) - 1) > 1e-14:
                raise ValueError(f"phase for {key} is not unimodular")
        self._table[key] = phase

    def ensure_one(self, key):
        if key in self._table:
            if self._table[key] != 1:
                raise RuntimeError(f"{key} already carries a nontrivial phase")
            return
        self._table[key] = 1

    def get(self, key, default=1):
        return self._table.get(key, default)

    def phase_of_record(self, record):
        """phi(n) for an ideal factorization record: product of assigned
        phases to their exponents; residual part contributes 1."""
        total = 1
        for key, e in record.admissible_part:
            ph = self._table.get(key, 1)
            if ph != 1:
                total = total * ph**e
        return total

    def items(self):
        return sorted(self._table.items(), key=lambda kv: (kv[0].p, kv[0].root))

    def nontrivial_count(self):
        return sum(1 for v in self._table.values() if v != 1)

    def __len__(self):
        return len(self._table)

    def log_rows(self, digits=30):
        rows = []
        with mp.workdps(digits + 10):
            for key, ph in self.items():
                if ph == 1:
                    rows.append((key.p, key.root, "1", "0"))
                else:
                    z = mp.mpc(ph)
                    rows.append((key.p, key.root, mp.nstr(mp.re(z), digits), mp.nstr(mp.im(z), digits)))
        return rows


# ---------------------------------------------------------------------------
# sigma selection


@dataclass(frozen=True)
class SigmaCertificate:
    sigma: object  # mpf
    n1: int
    head: float
    head_bound: float
    tail: float
    tail_bound: float
    contraction: float

    @property
    def certified(self):
        return self.head + self.head_bound < self.contraction * (self.tail - self.tail_bound)


def select_sigma(f: PeriodicFunction, alpha, profile: ConstructionProfile) -> SigmaCertificate:
    """Smallest halving step sigma = 1 + delta/2^k whose head/tail
    inequality holds with certified bounds:

        sum_{n <= N1} |f(n)| (n+alpha)^-sigma
            < contraction * sum_{n > N1} |f(n)| (n+alpha)^-sigma.

    Such a sigma exists because the right side blows up as sigma -> 1+
    while the left side stays bounded."""
    n1 = profile.n1
    prec = profile.precision()
    alpha_val = _alpha_mpf(alpha, profile.digits)
    contraction = float(profile.contraction)
    with mp.workdps(profile.digits + 10):
        for k in range(1, 80):
            sigma = 1 + mp.mpf(profile.delta) / 2**k
            if sigma - 1 < mp.mpf(10) ** (-(profile.digits - 10)):
                break
            head, head_b = _abs_head(f, alpha_val, sigma, n1, prec)
            tail, tail_b = abs_tail_with_bound(f, alpha_val, sigma, n1, prec)
            cert = SigmaCertificate(
                sigma, n1, float(head), head_b, float(tail), tail_b, contraction
            )
            if cert.certified:
                return cert
    raise PrecisionExhausted(
        "no sigma in (1, 1+delta) certified the head/tail inequality at this precision"
    )


def _abs_head(f, alpha_val, sigma, n_top, prec):
    """sum_{0 <= n <= n_top} |f(n)| (n+alpha)^-sigma with certified bound."""
    total = mp.mpf(0)
    bound = 0.0
    for r in range(f.period):
        w = abs_coefficient(f, r, mp)
        if w == 0:
            continue
        val, b = class_partial_sum(f, alpha_val, sigma, n_top, r, prec)
        total += w * val
        bound += float(w) * b
    return total, bound


def _coeff_mpc(f, n):
    """f(n) as an exact mpc at the current working precision."""
    re, im = f.exact(n)
    return mp.mpc(mp.mpf(re.numerator) / re.denominator,
                  mp.mpf(im.numerator) / im.denominator)


def _coeff_is_zero(f, n):
    re, im = f.exact(n)
    return re == 0 and im == 0


def _alpha_mpf(alpha, digits):
    if isinstance(alpha, AlgebraicAlpha):
        return alpha.value(digits)
    if isinstance(alpha, Fraction):
        with mp.workdps(digits + 10):
            return mp.mpf(alpha.numerator) / alpha.denominator
    with mp.workdps(digits + 10):
        return mp.mpf(alpha)


# ---------------------------------------------------------------------------
# stages


@dataclass
class StageState:
    j: int
    n_current: int
    sigma: object
    alpha_val: object
    class_sums: list  # per b: running sum_{n<=N_j, n=b (q)} f(n) phi(n) (n+alpha)^-sigma
    phi: PhiAssignment


@dataclass
class StageReport:
    j: int
    n_start: int
    window: int
    n_next: int
    per_class: list
    induction_lhs: float
    induction_rhs: float
    induction_ok: bool
    new_private: int
    new_default: int

    def to_json(self):
        return {
            "stage": self.j,
            "N_j": self.n_start,
            "M_j": self.window,
            "N_next": self.n_next,
            "classes": self.per_class,
            "induction_lhs": self.induction_lhs,
            "induction_rhs": self.induction_rhs,
            "induction_ok": self.induction_ok,
            "new_private_phases": self.new_private,
            "new_default_phases": self.new_default,
        }


def stage_advance(state: StageState, alpha: AlgebraicAlpha, f: PeriodicFunction,
                  profile: ConstructionProfile, cache: FactorCache | None = None):
    """One induction step: scan the next window, default the non-private
    phases, aim the private ones, and certify both the per-class bound and
    the contraction inequality at the new truncation point."""
    q = profile.q
    n_j = state.n_current
    m_j = profile.window_length(n_j)
    if m_j < 1:
        raise ValueError("window is empty; increase n1 or theta")
    n_next = n_j + m_j
    digits = profile.digits
    tol = profile.tolerance
    prec = profile.precision()

    reports = []
    alpha_q = alpha.with_q(q)
    records = window_records(alpha_q, n_j, m_j, cache)
    scan = private_prime_scan(
        alpha_q, WindowSpec(n_j, Fraction(profile.theta), q, 0), all_classes=True,
        records=records, cache=cache,
    )
    eligible = {n: key for n, key in scan.eligible}

    class_a = {b: [] for b in range(q)}
    class_b = {b: [] for b in range(q)}
    for n in sorted(records):
        (class_a if n in eligible else class_b)[n % q].append(n)
    for b in range(q):
        if len(class_a[b]) < profile.min_a_size:
            raise ThinClass(
                f"stage {state.j}: class {b} mod {q} has {len(class_a[b])} private "
                f"primes, below the floor {profile.min_a_size}"
            )

    # case 3: every new admissible prime that is not a chosen private slot
    private_keys = {eligible[n] for n in eligible}
    new_defaults = 0
    for n in sorted(records):
        for key, _ in records[n].admissible_part:
            if key not in private_keys and state.phi.get(key) == 1:
                before = len(state.phi)
                state.phi.ensure_one(key)
                new_defaults += len(state.phi) - before

    with mp.workdps(digits + 10):
        sigma = state.sigma
        a_val = state.alpha_val
        new_sums = list(state.class_sums)
        for b in range(q):
            fb_abs = abs_coefficient(f, b, mp)
            members_a, members_b = class_a[b], class_b[b]
            # drift: everything in the class that is already pinned down
            locked = mp.mpc(0)
            for n in members_b:
                phi_n = state.phi.phase_of_record(records[n])
                locked += _term(f, n, phi_n, a_val, sigma)
            drift = state.class_sums[b] + locked

            s1 = abs(state.class_sums[b])
            s2 = fb_abs * mp.fsum((n + a_val) ** (-sigma) for n in members_b) if members_b else mp.mpf(0)
            s3 = fb_abs * mp.fsum((n + a_val) ** (-sigma) for n in members_a) if members_a else mp.mpf(0)
            s4, _ = _class_tail(f, a_val, sigma, n_next, b, prec)

            placed = mp.mpc(0)
            if fb_abs == 0:
                for n in members_a:
                    state.phi.set_phase(eligible[n], 1)
                target = mp.mpc(0)
                limit = abs(drift)
            else:
                if abs(drift) <= s3:
                    target = -drift
                else:
                    target = -s3 * drift / abs(drift)
                _aim_private(state, f, eligible, records, members_a,
                             target, a_val, sigma)
                for n in members_a:
                    phi_n = state.phi.phase_of_record(records[n])
                    placed += _term(f, n, phi_n, a_val, sigma)
                limit = max(mp.mpf(0), abs(drift) - s3)
            new_sums[b] = drift + placed
            achieved = abs(new_sums[b])

            bound_ok = achieved <= limit + tol
            dens_limit = (1 - profile.density_floor) * m_j / q
            ratio_applicable = len(members_b) <= dens_limit and s2 > 0
            c = mp.mpf(profile.contraction.numerator) / profile.contraction.denominator
            ratio_ok = (s3 - s2 > c * (s3 + s2)) if ratio_applicable else None
            reports.append({
                "b": b,
                "count_A": len(members_a),
                "count_B": len(members_b),
                "density_ok": len(members_a) >= profile.density_floor * m_j / q,
                "partial_abs_S1": _f(s1),
                "locked_weight_S2": _f(s2),
                "free_weight_S3": _f(s3),
                "tail_weight_S4": _f(s4),
                "drift_re": _f(mp.re(drift)),
                "drift_im": _f(mp.im(drift)),
                "target_re": _f(mp.re(target)),
                "target_im": _f(mp.im(target)),
                "achieved_abs": _f(achieved),
                "class_bound": _f(limit),
                "class_bound_ok": bool(bound_ok),
                "ratio_check": ratio_ok if ratio_ok is None else bool(ratio_ok),
            })
            if not bound_ok:
                raise AssertionError(
                    f"class bound failed at stage {state.j}, class {b}: "
                    f"{achieved} > {limit} + {tol}"
                )

        lhs = abs(mp.fsum(new_sums))
        tail, tail_bound = abs_tail_with_bound(f, a_val, sigma, n_next, prec)
        c = mp.mpf(profile.contraction.numerator) / profile.contraction.denominator
        rhs = c * (tail - tail_bound)
        induction_ok = bool(lhs + tol < rhs)

    new_state = StageState(state.j + 1, n_next, state.sigma, state.alpha_val,
                           new_sums, state.phi)
    report = StageReport(
        state.j, n_j, m_j, n_next, reports,
        float(lhs), float(rhs), induction_ok,
        new_private=len(private_keys), new_default=new_defaults,
    )
    return new_state, report


def _f(x):
    return float(x)


def _term(f, n, phi_n, a_val, sigma):
    return _coeff_mpc(f, n) * phi_n * (n + a_val) ** (-sigma)


def _class_tail(f, a_val, sigma, n_top, b, prec):
    """|f(b)| * sum_{n > n_top, n = b (q)} (n+alpha)^-sigma."""
    from .zeta import _eval_hurwitz  # internal: per-class Hurwitz at real argument

    q = f.period
    w = abs_coefficient(f, b, mp)
    if w == 0:
        return mp.mpf(0), 0.0
    n0 = b + q * ((n_top - b) // q + 1)
    val, bound = _eval_hurwitz(sigma, (n0 + a_val) / q, prec)
    qs = mp.mpf(q) ** (-sigma)
    return w * qs * mp.re(val), float(w * qs) * bound


def _aim_private(state, f, eligible, window_records, members_a, target, a_val, sigma):
    """Choose phases of the private primes so the class-A terms sum to the
    target; the fixed factor of each term (periodic coefficient times the
    already-assigned part of phi) is rotated out before solving."""
    radii = []
    fixed_units = []
    exps = []
    for n in members_a:
        key = eligible[n]
        rec = window_records[n]
        u = 1
        e_key = 0
        for k2, e in rec.admissible_part:
            if k2 == key:
                e_key = e
                continue
            ph = state.phi.get(k2)
            if ph != 1:
                u = u * ph**e
        fn_c = _coeff_mpc(f, n)
        radii.append(abs(fn_c) * (n + a_val) ** (-sigma))
        fixed_units.append(fn_c / abs(fn_c) * u)
        exps.append(e_key)
    angles = bohr_solve(radii, target, ctx=mp)
    for n, ang, unit_fix, e_key in zip(members_a, angles, fixed_units, exps):
        # term must equal r * e^(i ang); strip the fixed unit, take the
        # e-th root for higher prime powers (any branch works, phases are free)
        want = ang - mp.arg(unit_fix)
        phase = mp.expjpi(want / e_key / mp.pi)
        state.phi.set_phase(eligible[n], phase)


# ---------------------------------------------------------------------------
# the full run


@dataclass
class ConstructionReport:
    profile_name: str
    q: int
    n1: int
    sigma_str: str
    sigma_certificate: dict
    stages: list  # StageReport.to_json() dicts
    final_sum_abs: float
    final_tail_fraction: float
    envelope_ok: bool
    recomputation_delta: float
    phi_nontrivial: int
    phi_total: int

    def to_json(self):
        return {
            "profile": self.profile_name,
            "q": self.q,
            "N1": self.n1,
            "sigma": self.sigma_str,
            "sigma_certificate": self.sigma_certificate,
            "stages": self.stages,
            "final_sum_abs": self.final_sum_abs,
            "final_tail_fraction": self.final_tail_fraction,
            "envelope_ok": self.envelope_ok,
            "recomputation_delta": self.recomputation_delta,
            "phi_nontrivial": self.phi_nontrivial,
            "phi_total": self.phi_total,
        }


def run_construction(f: PeriodicFunction, alpha: AlgebraicAlpha,
                     profile: ConstructionProfile, stages: int,
                     cache: FactorCache | None = None):
    """select sigma, run `stages` induction steps, and certify the final
    envelope; returns (ConstructionReport, StageState, phi log rows).

    The report never claims the infinite limit: it records the certified
    finite-stage contraction and the write-once phase log."""
    if stages < 1:
        raise ValueError("need at least one stage")
    q = profile.q
    if f.period != q:
        raise ValueError("profile q must match the coefficient period")
    alpha = alpha.with_q(q)  # admissibility must track the ambient period
    digits = profile.digits
    cert = select_sigma(f, alpha, profile)
    sigma = cert.sigma
    alpha_val = _alpha_mpf(alpha, digits)
    prec = profile.precision()

    with mp.workdps(digits + 10):
        # initial class sums over n <= N1, where every phase is 1
        sums = []
        for b in range(q):
            if _coeff_is_zero(f, b):
                sums.append(mp.mpc(0))
                continue
            val, _ = class_partial_sum(f, alpha_val, sigma, profile.n1, b, prec)
            sums.append(_coeff_mpc(f, b) * val)

    phi = PhiAssignment(digits)
    state = StageState(1, profile.n1, sigma, alpha_val, sums, phi)
    stage_logs = []
    for _ in range(stages):
        state, rep = stage_advance(state, alpha, f, profile, cache)
        stage_logs.append(rep.to_json())

    with mp.workdps(digits + 10):
        incremental = mp.fsum(state.class_sums)
        scratch = _recompute_from_scratch(f, alpha, alpha_val, sigma, profile.n1,
                                          state.n_current, phi, cache, prec)
        delta = float(abs(incremental - scratch))
        tail, tail_b = abs_tail_with_bound(f, alpha_val, sigma, state.n_current, prec)
        envelope = float(abs(incremental)) < float(profile.contraction) * float(tail - tail_b)
        frac = float(abs(incremental) / tail)
        sigma_str = mp.nstr(sigma, digits)
        final_abs = float(abs(incremental))

    report = ConstructionReport(
        profile.name, q, profile.n1, sigma_str,
        {
            "sigma": sigma_str,
            "head": cert.head, "head_bound": cert.head_bound,
            "tail": cert.tail, "tail_bound": cert.tail_bound,
            "certified": cert.certified,
        },
        stage_logs, final_abs, frac, bool(envelope), delta,
        phi.nontrivial_count(), len(phi),
    )
    return report, state, phi.log_rows(digits)


_DIRECT_HEAD_CAP = 200_000


def _recompute_from_scratch(f, alpha, alpha_val, sigma, n1, n_top, phi, cache, prec):
    """Independent re-evaluation of sum_{n <= n_top} f(n) phi(n) (n+alpha)^-sigma.

    On the head n <= N1 the twist is provably 1: a private prime assigned
    in any stage exceeds its window member m, so its residue class meets
    [0, p) only at m > N1, and every other assigned phase defaults to 1.
    The head is therefore summed term by term without factorizations
    (falling back to the zeta route only beyond the direct cap); window
    terms always rebuild phi(n) from their own factorization."""
    if n1 <= _DIRECT_HEAD_CAP:
        head_terms = [
            _coeff_mpc(f, n) * (n + alpha_val) ** (-sigma)
            for n in range(n1 + 1)
            if not _coeff_is_zero(f, n)
        ]
        head = mp.fsum(head_terms)
    else:
        head = mp.mpc(0)
        for b in range(f.period):
            if _coeff_is_zero(f, b):
                continue
            val, _ = class_partial_sum(f, alpha_val, sigma, n1, b, prec)
            head += _coeff_mpc(f, b) * val
    terms = []
    for n in range(n1 + 1, n_top + 1):
        if _coeff_is_zero(f, n):
            continue
        rec = ideal_factorize(alpha, n, cache)
        phi_n = phi.phase_of_record(rec)
        terms.append(_coeff_mpc(f, n) * phi_n * (n + alpha_val) ** (-sigma))
    return head + mp.fsum(terms)
