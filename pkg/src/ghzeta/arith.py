"""Exact integer arithmetic shared by everything else.

Deterministic primality testing (Miller-Rabin with the proven 64-bit base
set), Brent-cycle Pollard rho factorization, polynomial root finding and
Hensel lifting mod prime powers, and the periodic coefficient container
used by the series evaluators.
"""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

MAX_FACTOR_BITS = 128  # factorization targets are capped at 2**128

_SMALL_PRIME_LIMIT = 5000


def _sieve(limit):
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, int(limit**0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = b"\x00" * len(flags[p * p :: p])
    return [i for i, v in enumerate(flags) if v]


SMALL_PRIMES = _sieve(_SMALL_PRIME_LIMIT)

# Miller-Rabin with these bases is a proven primality test below 3.3 * 10^24,
# which covers the full 64-bit range we mostly live in.
_MR_BASES_64 = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_DETERMINISTIC_BOUND = 3317044064679887385961981
_MR_RANDOM_ROUNDS = 40


class FactorizationOverflow(ValueError):
    """Raised when a factorization target exceeds the 128-bit cap."""


def _mr_witness(n, a):
    d = n - 1
    r = (d & -d).bit_length() - 1
    d >>= r
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def is_prime(n: int) -> bool:
    """Primality test: proven deterministic below ~3.3e24, 40 strong
    probable-prime rounds (seeded by n, hence deterministic) above."""
    if n < 2:
        return False
    for p in SMALL_PRIMES[:20]:
        if n % p == 0:
            return n == p
    if n < _MR_DETERMINISTIC_BOUND:
        bases = _MR_BASES_64
    else:
        rng = random.Random(n)
        bases = [rng.randrange(2, n - 2) for _ in range(_MR_RANDOM_ROUNDS)]
    return not any(_mr_witness(n, a % n) for a in bases if a % n not in (0, 1, n - 1))


def _brent_rho(n):
    # Brent's cycle detection with batched gcd; deterministic constants.
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed to split {n}")  # pragma: no cover


@dataclass(frozen=True)
class Factorization:
    """Complete factorization of a positive integer as (prime, exponent) pairs."""

    target: int
    factors: tuple  # ((p, e), ...) sorted by p

    def __post_init__(self):
        prod = 1
        for p, e in self.factors:
            prod *= p**e
        if prod != self.target:
            raise ValueError("factors do not recompose the target")

    def as_dict(self):
        return dict(self.factors)

    def __str__(self):
        return " ".join(f"{p}^{e}" for p, e in self.factors) if self.factors else "1"


def _factor_into(n, out):
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _brent_rho(n)
    _factor_into(d, out)
    _factor_into(n // d, out)


def factorize(n: int, cache: "FactorCache | None" = None) -> Factorization:
    """Fully factor n (1 <= n < 2**128). n=1 yields an empty factor list."""
    if n < 1:
        raise ValueError(f"factorization target must be positive, got {n}")
    if n.bit_length() > MAX_FACTOR_BITS:
        raise FactorizationOverflow(f"{n} exceeds the 2^{MAX_FACTOR_BITS} cap")
    if cache is not None:
        hit = cache.get(n)
        if hit is not None:
            return hit
    m = n
    out = {}
    for p in SMALL_PRIMES:
        if p * p > m:
            break
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    _factor_into(m, out)
    result = Factorization(n, tuple(sorted(out.items())))
    if cache is not None:
        cache.put(result)
    return result


class FactorCache:
    """Append-only factorization cache, optionally persisted as CSV lines
    ``n,p1^e1 p2^e2 ...``.  Behaves as a function: re-inserting an entry is a
    no-op, and all access is lock-protected."""

    def __init__(self, path=None):
        self._lock = threading.Lock()
        self._table = {}
        self._path = Path(path) if path else None
        if self._path is not None and self._path.exists():
            for line in self._path.read_text().splitlines():
                line = line.strip()
                if not line:
                    continue
                key, _, body = line.partition(",")
                factors = []
                for item in body.split():
                    p, _, e = item.partition("^")
                    factors.append((int(p), int(e) if e else 1))
                self._table[int(key)] = Factorization(int(key), tuple(sorted(factors)))

    def get(self, n):
        with self._lock:
            return self._table.get(n)

    def put(self, fact: Factorization):
        with self._lock:
            if fact.target in self._table:
                return
            self._table[fact.target] = fact
            if self._path is not None:
                with self._path.open("a") as fh:
                    fh.write(f"{fact.target},{fact}\n")

    def __len__(self):
        with self._lock:
            return len(self._table)


# ---------------------------------------------------------------------------
# polynomials over Z, roots mod p^v


class NonSimpleRoot(ArithmeticError):
    """A root mod p has vanishing derivative mod p, so it does not lift
    uniquely to prime-power moduli."""


def poly_eval(coeffs, x, mod=None):
    """Evaluate a polynomial given by descending coefficients [c_d, ..., c_0]."""
    acc = 0
    for c in coeffs:
        acc = acc * x + c
        if mod is not None:
            acc %= mod
    return acc


def poly_derivative(coeffs):
    d = len(coeffs) - 1
    return [c * (d - i) for i, c in enumerate(coeffs[:-1])]


def _poly_mod_reduce(coeffs, p):
    out = [c % p for c in coeffs]
    while out and out[0] == 0:
        out.pop(0)
    return out


def _poly_mulmod(a, b, mod_poly, p):
    # product of a and b reduced mod (mod_poly, p); all descending coeffs
    res = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                res[i + j] = (res[i + j] + ca * cb) % p
    return _poly_divmod_p(res, mod_poly, p)[1]


def _poly_divmod_p(a, b, p):
    a = list(a)
    lead_inv = pow(b[0], -1, p)
    q = []
    while len(a) >= len(b):
        f = a[0] * lead_inv % p
        q.append(f)
        for i, cb in enumerate(b):
            a[i] = (a[i] - f * cb) % p
        a.pop(0)
    while a and a[0] == 0:
        a.pop(0)
    return q, a


def _poly_gcd_p(a, b, p):
    a = _poly_mod_reduce(a, p)
    b = _poly_mod_reduce(b, p)
    while b:
        a, b = b, _poly_divmod_p(a, b, p)[1]
    if a:
        inv = pow(a[0], -1, p)
        a = [c * inv % p for c in a]
    return a


def _roots_mod_p(coeffs, p):
    """All roots of the polynomial in F_p, via gcd with x^p - x and
    equal-degree splitting (deterministically seeded)."""
    cm = _poly_mod_reduce(coeffs, p)
    if not cm:
        raise ValueError("polynomial vanishes identically mod p")
    if len(cm) == 1:
        return []
    if p <= 1000:
        return sorted(x for x in range(p) if poly_eval(cm, x, p) == 0)
    # g = gcd(x^p - x, f) collects the distinct linear factors
    xp = _powmod_x(p, cm, p)
    xp_minus_x = list(xp)
    # subtract x
    if len(xp_minus_x) < 2:
        xp_minus_x = [0] * (2 - len(xp_minus_x)) + xp_minus_x
    xp_minus_x[-2] = (xp_minus_x[-2] - 1) % p
    g = _poly_gcd_p(xp_minus_x, cm, p)
    return sorted(_split_linear(g, p))


def _powmod_x(e, mod_poly, p):
    """x^e reduced mod (mod_poly, p), by square and multiply."""
    result = [1]
    base = [1, 0]  # x
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod_poly, p)
        base = _poly_mulmod(base, base, mod_poly, p)
        e >>= 1
    return result


def _split_linear(g, p):
    """Roots of a product of distinct linear factors mod p (Cantor-Zassenhaus)."""
    deg = len(g) - 1
    if deg <= 0:
        return []
    if deg == 1:
        # g = x + c  ->  root -c
        return [(-g[1] * pow(g[0], -1, p)) % p]
    rng = random.Random(f"{p}:{g}")
    for _ in range(200):
        a = rng.randrange(p)
        # gcd((x+a)^((p-1)/2) - 1, g) splits the root set roughly in half
        h = _powmod_x_shift(a, (p - 1) // 2, g, p)
        h = list(h)
        if h:
            h[-1] = (h[-1] - 1) % p
        else:
            h = [p - 1]
        d = _poly_gcd_p(h, g, p)
        if 0 < len(d) - 1 < deg:
            rest = _poly_divmod_p(g, d, p)[0]
            return _split_linear(d, p) + _split_linear(rest, p)
    raise ArithmeticError(f"failed to split degree-{deg} factor mod {p}")  # pragma: no cover


def _powmod_x_shift(a, e, mod_poly, p):
    """(x + a)^e reduced mod (mod_poly, p); deg(mod_poly) >= 2 assumed."""
    result = [1]
    base = [1, a]
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod_poly, p)
        base = _poly_mulmod(base, base, mod_poly, p)
        e >>= 1
    return result


def hensel_lift(coeffs, p, root, v):
    """Lift a simple root of the polynomial mod p to the unique root mod p^v.

    Raises NonSimpleRoot if the derivative vanishes at the root mod p.
    """
    deriv = poly_derivative(coeffs)
    if poly_eval(deriv, root, p) % p == 0:
        if v > 1:
            raise NonSimpleRoot(f"root {root} mod {p} is not simple")
        return root % p
    r = root % p
    mod = p
    while mod < p**v:
        mod = min(mod * mod, p**v)
        d_inv = pow(poly_eval(deriv, r, mod), -1, mod)
        r = (r - poly_eval(coeffs, r, mod) * d_inv) % mod
    return r


def poly_roots_mod_prime_power(coeffs, p: int, v: int = 1):
    """All x in [0, p^v) with P(x) = 0 mod p^v, for P nonzero mod p.

    Simple roots mod p lift uniquely (Hensel); a non-simple root with v > 1
    raises NonSimpleRoot, since the caller is expected to have excluded
    primes dividing the discriminant.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if v < 1:
        raise ValueError("exponent must be >= 1")
    base_roots = _roots_mod_p(coeffs, p)
    if v == 1:
        return base_roots
    return sorted(hensel_lift(coeffs, p, r, v) for r in base_roots)


def mobius_sieve(limit: int):
    """mu(n) for n = 0..limit (mu(0) = 0), by a linear sieve."""
    mu = [0] * (limit + 1)
    if limit >= 1:
        mu[1] = 1
    primes = []
    is_comp = bytearray(limit + 1)
    for i in range(2, limit + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            if i * p > limit:
                break
            is_comp[i * p] = 1
            if i % p == 0:
                mu[i * p] = 0
                break
            mu[i * p] = -mu[i]
    return mu


def divisors(n: int):
    """Sorted divisors of n."""
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


# ---------------------------------------------------------------------------
# periodic coefficient functions


def _as_exact(z):
    """Exact complex value as a (Fraction, Fraction) pair; floats convert
    exactly (they are dyadic rationals)."""
    if isinstance(z, Fraction):
        return (z, Fraction(0))
    if isinstance(z, (int,)):
        return (Fraction(z), Fraction(0))
    if isinstance(z, float):
        return (Fraction(z), Fraction(0))
    if isinstance(z, complex):
        return (Fraction(z.real), Fraction(z.imag))
    if isinstance(z, tuple) and len(z) == 2:
        return (Fraction(z[0]), Fraction(z[1]))
    raise TypeError(f"unsupported coefficient value {z!r}")


@dataclass(frozen=True)
class PeriodicFunction:
    """Coefficients f(n) of period q; evaluation depends only on n mod q.

    Values are stored exactly as (real, imag) Fraction pairs, so integers,
    Fractions, floats and complex floats are all accepted losslessly.
    """

    period: int
    values: tuple = field(default=())

    def __post_init__(self):
        if self.period < 1:
            raise ValueError("period must be >= 1")
        if len(self.values) != self.period:
            raise ValueError("need exactly one value per residue class")
        exact = tuple(_as_exact(z) for z in self.values)
        object.__setattr__(self, "values", exact)
        if all(re == 0 and im == 0 for re, im in exact):
            raise ValueError("coefficient function must not be identically zero")

    @classmethod
    def constant_one(cls):
        return cls(1, (1,))

    def exact(self, n: int):
        return self.values[n % self.period]

    def __call__(self, n: int) -> complex:
        re, im = self.values[n % self.period]
        return complex(re, im)

    def abs_values(self):
        """|f(r)| per residue class, as floats."""
        return [abs(self(r)) for r in range(self.period)]

    def coefficient_sum(self):
        """Sum of one period of values, exactly."""
        re = sum((v[0] for v in self.values), Fraction(0))
        im = sum((v[1] for v in self.values), Fraction(0))
        return (re, im)

    def is_real(self):
        return all(im == 0 for _, im in self.values)
