"""Structural form of periodic-coefficient Dirichlet series.

Three questions, all answered with exact arithmetic:

* rewrite F(s,f,a/b) = b^s * sum_m g(m) m^(-s) with g periodic mod b*q
  (the rational lift);
* decompose any periodic-coefficient series into the canonical combination
  sum_chi P_chi(s) L(s,chi) over primitive Dirichlet characters, with
  Dirichlet-polynomial coefficients, verified coefficient-by-coefficient
  over a full common period;
* decide whether the series is a single product P(s) * L(s,chi), which by
  the Saias-Weingartner criterion is the only way it can avoid zeros in
  sigma > 1.  A support class h mod r with r > 2 and (h,r) = 1 rules the
  form out immediately (the polynomial's least term forces both h and -h
  to carry coefficients, hence r | 2); otherwise Moebius deconvolution
  against every candidate character either produces an exactly verified
  certificate or exhausts the conductor search space.

All certificate arithmetic is exact: coefficients live in cyclotomic
fields and verification is symbolic equality over one full period.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from .arith import PeriodicFunction, divisors, mobius_sieve
from .characters import DirichletCharacter, characters_mod, euler_phi
from .cyclo import Cyclo

IS_PL = "IsPL"
NOT_PL = "NotPL"
UNKNOWN = "Unknown"

RESIDUE_OBSTRUCTION = "ResidueObstruction"
DECONVOLUTION_CERTIFICATE = "DeconvolutionCertificate"
SEARCH_EXHAUSTED = "SearchExhausted"

VERDICT_INFINITE = "infinitely many zeros in sigma > 1"
VERDICT_ZERO_FREE_FORM = "no zeros found; consistent with zero-free form"
VERDICT_ZEROS_FROM_POLY = "zeros exist (from the Dirichlet polynomial factor)"


class UnsupportedAlpha(TypeError):
    """The shift was given without an arithmetic type tag (bare float)."""


@dataclass(frozen=True)
class RationalShift:
    """alpha = a/b in lowest terms with 1 <= a < b."""

    a: int
    b: int

    def __post_init__(self):
        if not (1 <= self.a < self.b):
            raise ValueError("need 1 <= a < b")
        if gcd(self.a, self.b) != 1:
            raise ValueError("a/b must be in lowest terms")

    @property
    def fraction(self):
        return Fraction(self.a, self.b)

    def __str__(self):
        return f"{self.a}/{self.b}"


@dataclass(frozen=True)
class LiftedSeries:
    """g(m) with F(s,f,a/b) = b^s sum_{m>=1} g(m) m^(-s); g has period b*q
    and is supported on the class a mod b."""

    coeffs: PeriodicFunction
    shift: RationalShift
    source_period: int

    def __post_init__(self):
        a, b = self.shift.a, self.shift.b
        for m in range(self.coeffs.period):
            re, im = self.coeffs.exact(m)
            if m % b != a % b and not (re == 0 and im == 0):
                raise ValueError("lift must vanish off the support class")


def lift_rational(f: PeriodicFunction, shift: RationalShift) -> LiftedSeries:
    """Reindex f(n)/(n + a/b)^s over m = b n + a."""
    a, b = shift.a, shift.b
    period = b * f.period
    values = []
    for m in range(period):
        if m % b == a % b:
            n = (m - a) // b % f.period
            values.append(tuple(f.exact(n)))
        else:
            values.append(0)
    return LiftedSeries(PeriodicFunction(period, tuple(values)), shift, f.period)


def coefficients_at_alpha_one(f: PeriodicFunction) -> PeriodicFunction:
    """b(m) = f(m-1): the series F(s,f,1) = sum_{m>=1} b(m) m^(-s)."""
    q = f.period
    return PeriodicFunction(q, tuple(tuple(f.exact(m - 1)) for m in range(q)))


# ---------------------------------------------------------------------------
# canonical decomposition over primitive characters


@dataclass(frozen=True)
class DecompositionResult:
    """sum over primitive chi of P_chi(s) L(s,chi) reproducing the series."""

    period: int
    terms: tuple  # ((DirichletCharacter primitive, ((n, Cyclo), ...)), ...)
    verification_period: int
    verified: bool

    @property
    def characters(self):
        return [chi for chi, _ in self.terms]

    def term_polynomials(self):
        return [(chi, dict(poly)) for chi, poly in self.terms]

    def coefficient(self, m: int) -> Cyclo:
        """Coefficient of m^(-s) of the recombined series, exactly."""
        total = Cyclo.zero()
        for chi, poly in self.terms:
            for n, c in poly:
                if m % n == 0:
                    total = total + c * chi.cyclo(m // n)
        return total


@lru_cache(maxsize=None)
def _char_group(k):
    return tuple(characters_mod(k))


def _exact_coeff(f: PeriodicFunction, m: int) -> Cyclo:
    re, im = f.exact(m)
    return Cyclo.from_rational(re, im)


def decompose(series) -> DecompositionResult:
    """Canonical decomposition of a periodic coefficient function (or a
    LiftedSeries) into primitive-character L-function terms.

    Classes m = r (mod P) split as m = d m' with d = gcd(r, P) and
    m' = r/d (mod P/d) coprime to P/d; the coprime-class indicator expands
    over the character group mod P/d, and each imprimitive L-function is
    exchanged for its primitive part times finitely many Euler factors.
    The result is verified exactly on one full common period.
    """
    g = series.coeffs if isinstance(series, LiftedSeries) else series
    P = g.period
    acc: dict = {}
    chars_seen: dict = {}
    for r in range(1, P + 1):
        val = _exact_coeff(g, r)
        if val.is_zero():
            continue
        d = gcd(r, P)
        Lp = P // d
        rp = (r // d) % Lp if Lp > 1 else 1
        phi = euler_phi(Lp)
        for chi in _char_group(Lp):
            weight = val * chi.cyclo(rp).conjugate()
            if weight.is_zero():
                continue
            weight = weight.scale(Fraction(1, phi))
            prim = chi.primitive_part()
            key = (prim.modulus, prim.angles)
            chars_seen.setdefault(key, prim)
            # L(s, chi mod Lp) = L(s, chi*) * prod_{p | Lp, p coprime to f} (1 - chi*(p) p^-s)
            poly = {d: weight}
            for p in _prime_divisors(Lp):
                if prim.modulus % p == 0:
                    continue
                factor_val = prim.cyclo(p)
                new = {}
                for n, c in poly.items():
                    new[n] = new.get(n, Cyclo.zero()) + c
                    new[n * p] = new.get(n * p, Cyclo.zero()) - c * factor_val
                poly = new
            bucket = acc.setdefault(key, {})
            for n, c in poly.items():
                bucket[n] = bucket.get(n, Cyclo.zero()) + c

    terms = []
    for key in sorted(acc, key=lambda k: (k[0], str(k[1]))):
        poly = {n: c for n, c in acc[key].items() if not c.is_zero()}
        if poly:
            terms.append((chars_seen[key], tuple(sorted(poly.items()))))

    ver_period = P
    for chi, poly in terms:
        supp_lcm = 1
        for n, _ in poly:
            supp_lcm = lcm(supp_lcm, n)
        ver_period = lcm(ver_period, chi.modulus * supp_lcm)
    result = DecompositionResult(P, tuple(terms), ver_period, False)
    for m in range(1, ver_period + 1):
        if not (result.coefficient(m) - _exact_coeff(g, m)).is_zero():
            raise AssertionError(f"decomposition failed to reproduce coefficient {m}")
    return DecompositionResult(P, tuple(terms), ver_period, True)


@lru_cache(maxsize=None)
def _prime_divisors(n):
    from .arith import factorize

    return tuple(p for p, _ in factorize(n).factors)


# ---------------------------------------------------------------------------
# P(s) * L(s,chi) detection


@dataclass(frozen=True)
class PLCertificate:
    verdict: str
    proof_kind: str
    polynomial_support: tuple = ()  # ((n, Cyclo), ...) when IsPL
    character: DirichletCharacter | None = None
    obstruction: tuple | None = None  # (h, r) for the residue obstruction
    verification_period: int = 0
    searched_conductors: int = 0

    def polynomial(self):
        return dict(self.polynomial_support)


def _support_obstruction(g: PeriodicFunction):
    """Smallest modulus r >= 3 with the support inside one class h mod r,
    (h, r) = 1.  Such a class forces r | 2 for any P*L form, contradiction."""
    P = g.period
    support = [m for m in range(1, P + 1) if not _exact_coeff(g, m).is_zero()]
    for r in divisors(P):
        if r < 3:
            continue
        classes = {m % r for m in support}
        if len(classes) == 1:
            h = classes.pop()
            if gcd(h, r) == 1:
                return h, r
    return None


def detect_pl_form(series, search_bound: int | None = None) -> PLCertificate:
    """Decide whether the series is P(s) * L(s,chi).

    IsPL certificates are verified exactly: the reconvolved coefficients
    m -> sum_{n | m} a(n) chi(m/n) agree with the series on a full period
    of both sides.  NotPL comes from the residue obstruction or from
    exhausting all conductors up to the cap (the cap defaults to the
    coefficient period, which covers every conductor that can occur).
    """
    g = series.coeffs if isinstance(series, LiftedSeries) else series
    P = g.period
    cap = search_bound if search_bound is not None else P

    hit = _support_obstruction(g)
    if hit is not None:
        return PLCertificate(NOT_PL, RESIDUE_OBSTRUCTION, obstruction=hit)

    searched = 0
    for k in range(1, cap + 1):
        for chi in _char_group(k):
            if not chi.is_primitive():
                continue
            searched += 1
            cert = _try_deconvolve(g, chi)
            if cert is not None:
                return cert
    if cap >= P:
        return PLCertificate(NOT_PL, SEARCH_EXHAUSTED, searched_conductors=cap)
    return PLCertificate(UNKNOWN, SEARCH_EXHAUSTED, searched_conductors=cap)


def _try_deconvolve(g: PeriodicFunction, chi: DirichletCharacter):
    """a = b * (mu chi); accept iff a vanishes on (X/2, X] and the
    reconvolution reproduces b exactly on a full common period."""
    P = g.period
    k = chi.modulus
    X = 4 * k * P * P
    mu = mobius_sieve(X)
    b_vals = [None] + [_exact_coeff(g, m) for m in range(1, P + 1)]

    def b_at(m):
        return b_vals[(m - 1) % P + 1]

    a: dict = {}
    for n in range(1, X + 1):
        total = Cyclo.zero()
        for d in divisors(n):
            if mu[d] == 0:
                continue
            ang = chi.angle(d)
            if ang is None:
                continue
            term = b_at(n // d) * chi.cyclo(d)
            total = total + (term if mu[d] == 1 else -term)
        if not total.is_zero():
            if n > X // 2:
                return None  # support did not collapse; not this character
            a[n] = total
    if not a:
        return None  # would mean b identically zero, excluded upstream

    supp_lcm = 1
    for n in a:
        supp_lcm = lcm(supp_lcm, n)
    V = lcm(P, k * supp_lcm)
    for m in range(1, V + 1):
        total = Cyclo.zero()
        for n, c in a.items():
            if m % n == 0:
                total = total + c * chi.cyclo(m // n)
        if not (total - b_at(m)).is_zero():
            return None
    return PLCertificate(
        IS_PL,
        DECONVOLUTION_CERTIFICATE,
        polynomial_support=tuple(sorted(a.items())),
        character=chi,
        verification_period=V,
    )


# ---------------------------------------------------------------------------
# the headline decision


@dataclass(frozen=True)
class VerdictReport:
    alpha_kind: str
    alpha_desc: str
    verdict: str
    evidence: tuple
    certificate: PLCertificate | None = None
    lift_prefactor: int = 1  # F = prefactor^s * (analyzed series)
    polynomial_zeros: tuple = ()
    scan_region: tuple | None = None

    def to_json(self):
        out = {
            "alpha_kind": self.alpha_kind,
            "alpha": self.alpha_desc,
            "verdict": self.verdict,
            "evidence": list(self.evidence),
            "lift_prefactor": self.lift_prefactor,
        }
        if self.certificate is not None:
            cert = {
                "verdict": self.certificate.verdict,
                "proof": self.certificate.proof_kind,
            }
            if self.certificate.obstruction:
                cert["obstruction"] = list(self.certificate.obstruction)
            if self.certificate.verdict == IS_PL:
                cert["character_modulus"] = self.certificate.character.modulus
                cert["polynomial"] = {
                    str(n): c.to_json() for n, c in self.certificate.polynomial_support
                }
                cert["verification_period"] = self.certificate.verification_period
            out["certificate"] = cert
        if self.scan_region is not None:
            out["scan_region"] = list(self.scan_region)
            out["polynomial_zeros"] = [[z.real, z.imag] for z in self.polynomial_zeros]
        return out


def nonvanishing_verdict(f: PeriodicFunction, alpha, zero_scan_tmax: float = 30.0) -> VerdictReport:
    """Decide whether F(s,f,alpha) must have zeros in sigma > 1.

    Rational shifts with denominator > 2 and algebraic irrational shifts
    always do.  For alpha in {1, 1/2} the decision runs through the exact
    P*L detector; a product form is reported with the zero set of its
    polynomial factor searched by winding (the L factor never vanishes in
    the half-plane).
    """
    from .ideals import AlgebraicAlpha

    if isinstance(alpha, AlgebraicAlpha):
        return VerdictReport(
            "algebraic-irrational",
            str(alpha),
            VERDICT_INFINITE,
            (
                "shift is algebraic irrational in (0,1)",
                "coefficients are periodic and not identically zero",
                "a unimodular completely multiplicative twist can cancel the series",
            ),
        )
    if isinstance(alpha, float):
        raise UnsupportedAlpha(
            "a bare float carries no arithmetic type; pass a Fraction, "
            "RationalShift, or AlgebraicAlpha"
        )
    if isinstance(alpha, int):
        alpha = Fraction(alpha)
    if isinstance(alpha, RationalShift):
        alpha = alpha.fraction
    if not isinstance(alpha, Fraction):
        raise UnsupportedAlpha(f"unsupported alpha {alpha!r}")
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")

    if alpha == 1:
        series = coefficients_at_alpha_one(f)
        prefactor = 1
        desc = "1"
    else:
        shift = RationalShift(alpha.numerator, alpha.denominator)
        series = lift_rational(f, shift)
        prefactor = shift.b
        desc = str(shift)

    cert = detect_pl_form(series)
    if cert.verdict == NOT_PL:
        evidence = ["series coefficients are periodic and not identically zero"]
        if cert.proof_kind == RESIDUE_OBSTRUCTION:
            h, r = cert.obstruction
            evidence.append(
                f"support lies in the class {h} mod {r} with r > 2, "
                "so no P(s)L(s,chi) form exists"
            )
        else:
            evidence.append(
                "no character up to the full conductor range admits a finite deconvolution"
            )
        evidence.append("a series that is not P(s)L(s,chi) vanishes somewhere in sigma > 1")
        return VerdictReport("rational", desc, VERDICT_INFINITE, tuple(evidence), cert, prefactor)

    # product form: zeros in sigma > 1 can only come from the polynomial factor
    poly = {n: complex(c) for n, c in cert.polynomial_support}
    evidence = [
        f"series = P(s) * L(s, chi mod {cert.character.modulus}) with "
        f"P supported on {sorted(poly)}",
        "L(s, chi) has no zeros with sigma > 1 (Euler product)",
    ]
    if len(poly) == 1:
        return VerdictReport(
            "rational", desc, VERDICT_ZERO_FREE_FORM,
            tuple(evidence + ["P is a single term, hence nonvanishing"]),
            cert, prefactor,
        )
    from .zeros import dirichlet_polynomial_zeros

    zeros, region = dirichlet_polynomial_zeros(poly, t_max=zero_scan_tmax)
    if zeros:
        evidence.append(f"P vanishes inside the scanned region {region}")
        return VerdictReport(
            "rational", desc, VERDICT_ZEROS_FROM_POLY, tuple(evidence),
            cert, prefactor, tuple(zeros), region,
        )
    evidence.append(f"no zeros of P found in the scanned region {region}")
    return VerdictReport(
        "rational", desc, VERDICT_ZERO_FREE_FORM, tuple(evidence),
        cert, prefactor, (), region,
    )
