"""Prime ideal arithmetic for shifts by an algebraic irrational.

An algebraic alpha in (0,1) is carried as its integer minimal polynomial
plus an isolating interval.  For n >= 0 the ideal (n+alpha)*a (a the
denominator ideal, of norm equal to the leading coefficient) is integral
with norm |minpoly(-n)|, so divisibility questions reduce to factoring
plain integers and tracking residue classes of n modulo prime powers:
for an admissible prime p (coprime to leading coefficient, discriminant
and the ambient period q), the degree-1 prime ideals above p correspond
to the simple roots r of minpoly(-x) mod p, and p^v divides (n+alpha)*a
exactly when n lies in the Hensel lift of r mod p^v.  Inadmissible primes
are swept into the residual norm and never carry phase information.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from mpmath import mp

from .arith import (
    FactorCache,
    FactorizationOverflow,
    factorize,
    hensel_lift,
    poly_eval,
    poly_roots_mod_prime_power,
)

NORM_BIT_CAP = 127
DEFAULT_DEGREE_CAP = 4


class PreconditionViolated(ValueError):
    """A congruence-law check was invoked on inputs outside its hypothesis."""


def _content(coeffs):
    g = 0
    for c in coeffs:
        g = gcd(g, abs(c))
    return g


def _sturm_chain(coeffs):
    chain = [[Fraction(c) for c in coeffs]]
    d = len(coeffs) - 1
    chain.append([Fraction(c * (d - i)) for i, c in enumerate(coeffs[:-1])])
    while len(chain[-1]) > 1:
        rem = _poly_rem(chain[-2], chain[-1])
        if not rem:
            break
        chain.append([-c for c in rem])
    return chain


def _poly_rem(a, b):
    a = list(a)
    while len(a) >= len(b):
        f = a[0] / b[0]
        for i, cb in enumerate(b):
            a[i] -= f * cb
        a.pop(0)
    while a and a[0] == 0:
        a.pop(0)
    return a


def _sign_changes(chain, x):
    signs = []
    for poly in chain:
        v = poly_eval(poly, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for i in range(len(signs) - 1) if signs[i] != signs[i + 1])


def count_real_roots(coeffs, lo, hi):
    """Number of distinct real roots in (lo, hi], by Sturm's theorem."""
    chain = _sturm_chain(coeffs)
    return _sign_changes(chain, Fraction(lo)) - _sign_changes(chain, Fraction(hi))


def _sylvester_resultant(a, b):
    """Resultant of two integer polynomials (descending coeffs), exactly."""
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + list(a) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(b) + [0] * (size - n - 1 - i))
    return _int_det(rows)


def _int_det(rows):
    # fraction-free Bareiss elimination
    mat = [list(map(int, r)) for r in rows]
    n = len(mat)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if mat[k][k] == 0:
            for i in range(k + 1, n):
                if mat[i][k]:
                    mat[k], mat[i] = mat[i], mat[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                mat[i][j] = (mat[i][j] * mat[k][k] - mat[i][k] * mat[k][j]) // prev
            mat[i][k] = 0
        prev = mat[k][k]
    return sign * mat[-1][-1]


def poly_discriminant(coeffs):
    """disc(P) = (-1)^(d(d-1)/2) Res(P, P') / lead(P), exactly."""
    d = len(coeffs) - 1
    deriv = [c * (d - i) for i, c in enumerate(coeffs[:-1])]
    res = _sylvester_resultant(coeffs, deriv)
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * res // coeffs[0]


def _is_irreducible(coeffs):
    return _is_irreducible_cached(tuple(int(c) for c in coeffs))


@lru_cache(maxsize=None)
def _is_irreducible_cached(coeffs):
    # build-time certificate; sympy's factorizer is the workhorse here
    from sympy import Poly, Symbol

    x = Symbol("x")
    expr = sum(int(c) * x ** (len(coeffs) - 1 - i) for i, c in enumerate(coeffs))
    return Poly(expr, x).is_irreducible


@dataclass(frozen=True)
class AlgebraicAlpha:
    """An algebraic irrational shift in (0,1): minimal polynomial with
    integer coefficients (descending, content 1, positive leading term)
    plus an isolating interval containing exactly one real root."""

    minpoly: tuple
    interval: tuple  # (lo, hi) Fractions, 0 < lo < hi < 1
    q_context: int = 1
    degree_cap: int = DEFAULT_DEGREE_CAP

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.minpoly)
        object.__setattr__(self, "minpoly", coeffs)
        lo, hi = (Fraction(v) for v in self.interval)
        object.__setattr__(self, "interval", (lo, hi))
        d = len(coeffs) - 1
        if not 2 <= d <= self.degree_cap:
            raise ValueError(f"degree must be in [2, {self.degree_cap}], got {d}")
        if coeffs[0] <= 0:
            raise ValueError("leading coefficient must be positive")
        if _content(coeffs) != 1:
            raise ValueError("minimal polynomial must have content 1")
        if not (0 <= lo < hi <= 1):
            raise ValueError("isolating interval must lie inside (0, 1)")
        if count_real_roots(coeffs, lo, hi) != 1:
            raise ValueError("interval must isolate exactly one real root")
        if self.q_context < 1:
            raise ValueError("q_context must be positive")
        if not _is_irreducible(coeffs):
            raise ValueError("minimal polynomial must be irreducible")

    @property
    def degree(self):
        return len(self.minpoly) - 1

    @property
    def lead(self):
        return self.minpoly[0]

    @property
    def negated_poly(self):
        """Coefficients of minpoly(-x); its roots mod p^v are the residue
        classes of n with p^v | (n+alpha)a."""
        d = self.degree
        return tuple(c if (d - i) % 2 == 0 else -c for i, c in enumerate(self.minpoly))

    @property
    def discriminant(self):
        return poly_discriminant(list(self.minpoly))

    @property
    def bad_modulus(self):
        """Primes outside the admissible set divide this."""
        return abs(self.lead * self.discriminant * self.q_context)

    def with_q(self, q: int) -> "AlgebraicAlpha":
        if q == self.q_context:
            return self
        return AlgebraicAlpha(self.minpoly, self.interval, q, self.degree_cap)

    def value(self, dps: int = 17):
        """The isolated root as an mpf at `dps` digits (float if dps <= 17)."""
        lo, hi = self.interval
        with mp.workdps(dps + 10):
            a = mp.mpf(lo.numerator) / lo.denominator
            b = mp.mpf(hi.numerator) / hi.denominator
            fa = _mp_poly(self.minpoly, a)
            for _ in range(mp.prec + 4):
                mid = (a + b) / 2
                fm = _mp_poly(self.minpoly, mid)
                if fm == 0:
                    a = b = mid
                    break
                if (fm < 0) == (fa < 0):
                    a, fa = mid, fm
                else:
                    b = mid
            root = (a + b) / 2
            return float(root) if dps <= 17 else +root

    def __str__(self):
        return f"root of {list(self.minpoly)} in ({self.interval[0]}, {self.interval[1]})"


def _mp_poly(coeffs, x):
    acc = mp.mpf(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class PrimeIdealKey:
    """A degree-1 prime ideal above p, identified by the residue class of n
    (mod p) for which it divides (n+alpha)a."""

    p: int
    root: int

    degree = 1

    def __post_init__(self):
        if not 0 <= self.root < self.p:
            raise ValueError("root must be a canonical residue mod p")


@dataclass(frozen=True)
class IdealFactorizationRecord:
    n: int
    admissible_part: tuple  # ((PrimeIdealKey, exponent), ...)
    residual_norm: int

    def norm(self):
        total = self.residual_norm
        for key, e in self.admissible_part:
            total *= key.p**e
        return total


def norm_value(alpha: AlgebraicAlpha, n: int) -> int:
    """|minpoly(-n)| = absolute norm of (n+alpha)a, always a positive integer."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    v = abs(poly_eval(alpha.negated_poly, n))
    if v.bit_length() > NORM_BIT_CAP:
        raise FactorizationOverflow(f"norm of n={n} exceeds 2^{NORM_BIT_CAP}")
    return v


def is_admissible_prime(alpha: AlgebraicAlpha, p: int) -> bool:
    return alpha.bad_modulus % p != 0


def prime_ideals_above(alpha: AlgebraicAlpha, p: int):
    """Degree-1 prime ideals above an admissible p, one per root of
    minpoly(-x) mod p.  Empty for inert/inadmissible primes."""
    if not is_admissible_prime(alpha, p):
        return []
    return [PrimeIdealKey(p, r) for r in poly_roots_mod_prime_power(list(alpha.negated_poly), p, 1)]


def ideal_factorize(alpha: AlgebraicAlpha, n: int,
                    cache: FactorCache | None = None) -> IdealFactorizationRecord:
    """Factor (n+alpha)a into admissible degree-1 prime ideals and a
    residual ideal collecting everything outside the admissible set."""
    value = norm_value(alpha, n)
    fact = factorize(value, cache)
    admissible = []
    residual = 1
    for p, e in fact.factors:
        if is_admissible_prime(alpha, p):
            # p | minpoly(-n) with p coprime to lead and disc forces n mod p
            # to be a (simple) root, and the whole p-valuation sits on the
            # single matching degree-1 ideal.
            admissible.append((PrimeIdealKey(p, n % p), e))
        else:
            residual *= p**e
    return IdealFactorizationRecord(n, tuple(admissible), residual)


def root_mod_power(alpha: AlgebraicAlpha, key: PrimeIdealKey, v: int) -> int:
    """Hensel lift of the key's root class to mod p^v: the unique residue
    r_v with p^v | (n+alpha)a iff n = r_v (mod p^v)."""
    if poly_eval(alpha.negated_poly, key.root, key.p) % key.p != 0:
        raise PreconditionViolated(f"{key} is not a root class of the shift polynomial")
    return hensel_lift(list(alpha.negated_poly), key.p, key.root, v)


def divides(alpha: AlgebraicAlpha, key: PrimeIdealKey, v: int, n: int) -> bool:
    """Does the key's prime ideal divide (n+alpha)a to order at least v?"""
    return n % key.p**v == root_mod_power(alpha, key, v)


def congruence_check(alpha: AlgebraicAlpha, key: PrimeIdealKey, v: int,
                     n1: int, n2: int) -> bool:
    """Both n1, n2 are assumed divisible by the key's ideal to order >= v;
    returns n1 = n2 (mod p^v).  Under the hypothesis this is always True,
    which is exactly what makes it a property-test hook."""
    rv = root_mod_power(alpha, key, v)
    pv = key.p**v
    for n in (n1, n2):
        if n % pv != rv:
            raise PreconditionViolated(
                f"n={n} is not divisible by {key} to order {v} (root class {rv} mod {pv})"
            )
    return (n1 - n2) % pv == 0


def conjugate_norm_check(alpha: AlgebraicAlpha, n: int, dps: int = 30) -> float:
    """Relative gap between |minpoly(-n)| and lead * prod |n + alpha_i| over
    all complex roots alpha_i; float-level consistency probe."""
    with mp.workdps(dps):
        roots = mp.polyroots([mp.mpf(c) for c in alpha.minpoly], maxsteps=100)
        prod = mp.mpf(alpha.lead)
        for rt in roots:
            prod *= abs(n + rt)
        exact = norm_value(alpha, n)
        return float(abs(prod - exact) / exact)


SQRT2_MINUS_1 = None  # initialized lazily in fixtures()


def fixtures():
    """Canonical example shift sqrt(2)-1 (minpoly x^2+2x-1)."""
    global SQRT2_MINUS_1
    if SQRT2_MINUS_1 is None:
        SQRT2_MINUS_1 = AlgebraicAlpha((1, 2, -1), (Fraction(2, 5), Fraction(1, 2)))
    return SQRT2_MINUS_1
