"""Window experiments: private prime ideals and smooth windows.

A window (N, N+M] with M = floor(theta*N) is scanned by factoring the
norm of every (n+alpha)*a it contains.  An integer n owns a *private*
prime ideal when some admissible prime power in its factorization has
p exceeding both n and N+M-n: the ideal's residue class n mod p then
meets [0, N+M] in the single point n, so the ideal divides no other
(m+alpha)*a in range.  That arithmetic shortcut is applied and then
re-checked directly by enumerating the residue class.

The smooth complement keeps windows honest: n is smooth-flagged when all
its admissible prime powers stay below M.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import log

from .arith import FactorCache
from .ideals import AlgebraicAlpha, IdealFactorizationRecord, PrimeIdealKey, ideal_factorize

DENSITY_FLOOR = 0.54
DICKMAN_REFERENCE = log(2)  # 1 - rho(2): expected private-prime density for quadratic norms


class EmptyWindow(RuntimeError):
    """No integers of the requested class fall inside the window."""


@dataclass(frozen=True)
class WindowSpec:
    """Window (N, N+M], M = floor(theta*N), restricted to n = b (mod q)."""

    N: int
    theta: Fraction
    q: int = 1
    b: int = 0

    def __post_init__(self):
        object.__setattr__(self, "theta", Fraction(self.theta))
        if self.N <= self.q:
            raise ValueError("window start must exceed the period")
        if not 0 <= self.b < self.q:
            raise ValueError("class b must satisfy 0 <= b < q")
        if self.M < 1:
            raise ValueError("window is empty: floor(theta*N) < 1")

    @property
    def M(self) -> int:
        return int(self.theta * self.N)

    @property
    def end(self) -> int:
        return self.N + self.M

    def members(self, all_classes=False):
        ns = range(self.N + 1, self.end + 1)
        if all_classes:
            return list(ns)
        return [n for n in ns if n % self.q == self.b]


@dataclass
class DensityReport:
    window: WindowSpec
    members: int
    eligible: tuple  # ((n, PrimeIdealKey), ...)
    count_A: int
    threshold: float
    passed: bool
    smooth_count: int
    rho: float
    fraction: float  # count_A / members
    fraction_Mq: float  # count_A / (M/q)

    def to_json(self):
        return {
            "N": self.window.N,
            "M": self.window.M,
            "q": self.window.q,
            "b": self.window.b,
            "members": self.members,
            "count_A": self.count_A,
            "threshold": self.threshold,
            "passed": self.passed,
            "fraction": self.fraction,
            "fraction_Mq": self.fraction_Mq,
            "smooth_count": self.smooth_count,
            "rho": self.rho,
            "eligible": [[n, key.p, key.root] for n, key in self.eligible],
        }


def window_records(alpha: AlgebraicAlpha, N: int, M: int,
                   cache: FactorCache | None = None):
    """Ideal factorizations of every n in (N, N+M]."""
    return {n: ideal_factorize(alpha, n, cache) for n in range(N + 1, N + M + 1)}


def private_key_candidates(record: IdealFactorizationRecord, N: int, M: int,
                           excluded=frozenset()):
    """Admissible primes of the record large enough to be private in
    [0, N+M]: p > max(n, N+M-n)."""
    n = record.n
    cut = max(n, N + M - n)
    out = []
    for key, e in record.admissible_part:
        if key.p > cut and key.p not in excluded:
            out.append((key, e))
    return out


def _verify_private(key: PrimeIdealKey, n: int, end: int) -> bool:
    """Direct residue-class check: the only m in [0, end] with
    m = root (mod p) must be n itself."""
    hits = list(range(key.root, end + 1, key.p))
    return hits == [n]


def private_prime_scan(alpha: AlgebraicAlpha, w: WindowSpec, *, all_classes=False,
                       cache: FactorCache | None = None, records=None,
                       density_floor: float = DENSITY_FLOOR,
                       excluded_primes=frozenset()) -> DensityReport:
    """Classify window members by private prime ownership.

    `excluded_primes` artificially shrinks the admissible set (a testing
    hook: removing primes can only remove eligibility).  The chosen key
    per eligible n is the largest private prime, preferring exponent one,
    and every choice is re-verified by direct residue-class enumeration.
    """
    alpha = alpha.with_q(w.q)
    members = w.members(all_classes=all_classes)
    if not members:
        raise EmptyWindow(f"no n = {w.b} (mod {w.q}) in ({w.N}, {w.end}]")
    if records is None:
        records = window_records(alpha, w.N, w.M, cache)
    eligible = []
    smooth = 0
    for n in members:
        rec = records[n]
        cands = private_key_candidates(rec, w.N, w.M, excluded_primes)
        if cands:
            cands.sort(key=lambda ke: (ke[1] != 1, -ke[0].p))
            key = cands[0][0]
            if not _verify_private(key, n, w.end):
                raise AssertionError(
                    f"privacy shortcut contradicted for n={n}, p={key.p}"
                )
            eligible.append((n, key))
        if all(key.p**e < w.M for key, e in rec.admissible_part
               if key.p not in excluded_primes):
            smooth += 1
    count = len(eligible)
    threshold = density_floor * w.M / w.q
    return DensityReport(
        window=w,
        members=len(members),
        eligible=tuple(eligible),
        count_A=count,
        threshold=threshold,
        passed=count >= threshold,
        smooth_count=smooth,
        rho=w.q * smooth / w.M,
        fraction=count / len(members),
        fraction_Mq=count / (w.M / w.q),
    )


def smooth_set(alpha: AlgebraicAlpha, w: WindowSpec, *,
               cache: FactorCache | None = None, records=None):
    """Members whose admissible prime powers all stay below M."""
    alpha = alpha.with_q(w.q)
    members = w.members()
    if not members:
        raise EmptyWindow(f"no n = {w.b} (mod {w.q}) in ({w.N}, {w.end}]")
    if records is None:
        records = window_records(alpha, w.N, w.M, cache)
    out = []
    for n in members:
        rec = records[n]
        if all(key.p**e < w.M for key, e in rec.admissible_part):
            out.append(n)
    return out


def rescan_soundness(alpha: AlgebraicAlpha, key: PrimeIdealKey, n: int, end: int) -> bool:
    """Brute-force privacy confirmation: walk every m <= end and test
    divisibility of (m+alpha)*a by the key's ideal via the root class."""
    from .ideals import divides

    for m in range(0, end + 1):
        if m == n:
            if not divides(alpha, key, 1, m):
                return False
        elif divides(alpha, key, 1, m):
            return False
    return True


@dataclass
class SweepReport:
    q: int
    theta: Fraction
    reports: list  # DensityReport
    mean_fraction: float
    pass_fraction: float
    flagged: list  # (N, b) pairs under the floor
    dickman_reference: float

    def to_json(self):
        return {
            "q": self.q,
            "theta": str(self.theta),
            "windows": [r.to_json() for r in self.reports],
            "mean_fraction": self.mean_fraction,
            "pass_fraction": self.pass_fraction,
            "flagged": self.flagged,
            "dickman_reference": self.dickman_reference,
        }


def density_sweep(alpha: AlgebraicAlpha, n_list, theta, q: int,
                  cache: FactorCache | None = None,
                  density_floor: float = DENSITY_FLOOR) -> SweepReport:
    """Per-(N, b) density reports over a list of window starts.

    Windows under the floor are flagged, not failed: the stage count
    where the floor provably kicks in is not effective, so the sweep
    measures rather than certifies."""
    if not n_list:
        raise ValueError("need at least one window start")
    theta = Fraction(theta)
    alpha = alpha.with_q(q)
    reports = []
    flagged = []
    for N in n_list:
        M = int(theta * N)
        records = window_records(alpha, N, M, cache)
        for b in range(q):
            w = WindowSpec(N, theta, q, b)
            rep = private_prime_scan(alpha, w, records=records, cache=cache,
                                     density_floor=density_floor)
            reports.append(rep)
            if not rep.passed:
                flagged.append((N, b))
    mean_fraction = sum(r.fraction for r in reports) / len(reports)
    pass_fraction = sum(1 for r in reports if r.passed) / len(reports)
    return SweepReport(q, theta, reports, mean_fraction, pass_fraction, flagged,
                       DICKMAN_REFERENCE)
