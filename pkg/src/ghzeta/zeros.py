"""Zero location in sigma > 1 by boundary argument tracking.

The winding number of F around a rectangle counts interior zeros with
multiplicity (F is analytic and pole-free in the searched half-plane).
Argument increments are accumulated along adaptively refined boundary
samples; a step is accepted only when the local phase change stays below
pi/2, which pins the branch.  Cells that wind once are polished to a
zero by complex secant iteration.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .arith import PeriodicFunction
from .zeta import EXPLORE, PrecisionProfile, f_eval, hurwitz_zeta

REL_MODULUS_FLOOR = 1e-12
MAX_EDGE_DEPTH = 20
_PHASE_CAP = math.pi / 2


class BoundaryTooCloseToZero(ArithmeticError):
    """|F| collapsed on the boundary (or the phase kept jumping after full
    subdivision); perturb the rectangle and retry."""


@dataclass(frozen=True)
class Rectangle:
    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float

    def __post_init__(self):
        if not (self.sigma_min < self.sigma_max and self.t_min < self.t_max):
            raise ValueError("rectangle must have positive area")

    def corners(self):
        return (
            complex(self.sigma_min, self.t_min),
            complex(self.sigma_max, self.t_min),
            complex(self.sigma_max, self.t_max),
            complex(self.sigma_min, self.t_max),
        )

    def contains(self, z, slack=0.0):
        return (self.sigma_min - slack <= z.real <= self.sigma_max + slack
                and self.t_min - slack <= z.imag <= self.t_max + slack)

    def padded(self, d_sigma, d_t):
        return Rectangle(self.sigma_min - d_sigma, self.sigma_max + d_sigma,
                         self.t_min - d_t, self.t_max + d_t)

    def as_tuple(self):
        return (self.sigma_min, self.sigma_max, self.t_min, self.t_max)


@dataclass
class WindingResult:
    rectangle: Rectangle
    winding: int
    min_boundary_modulus: float
    samples: int
    refined_zeros: list = field(default_factory=list)  # (zero, |F(zero)|)


def winding_number(series, rect: Rectangle) -> WindingResult:
    """Track arg F around the rectangle boundary, counterclockwise.

    `series` is any callable s -> complex.  The total phase change must
    close up to a multiple of 2*pi within 1e-6; the winding is that
    multiple.  Raises BoundaryTooCloseToZero when |F| dips under 1e-12 of
    the boundary maximum or a phase jump survives 20 subdivision levels.
    """
    corners = rect.corners()
    state = {"min": float("inf"), "max": 0.0, "count": 0}

    def probe(z):
        v = complex(series(z))
        m = abs(v)
        state["min"] = min(state["min"], m)
        state["max"] = max(state["max"], m)
        state["count"] += 1
        return v

    vals = [probe(z) for z in corners]
    total = 0.0
    for i in range(4):
        z0, z1 = corners[i], corners[(i + 1) % 4]
        v0, v1 = vals[i], vals[(i + 1) % 4]
        n0 = max(8, int(abs(z1 - z0) * 8))
        zs = [z0 + (z1 - z0) * k / n0 for k in range(1, n0)]
        pts = [(z0, v0)] + [(z, probe(z)) for z in zs] + [(z1, v1)]
        for (za, va), (zb, vb) in zip(pts, pts[1:]):
            total += _tracked_delta(probe, za, zb, va, vb, 0, rect, state)

    if state["min"] < REL_MODULUS_FLOOR * state["max"]:
        raise BoundaryTooCloseToZero(
            f"min |F| = {state['min']:.3e} on the boundary of {rect.as_tuple()}"
        )
    k = round(total / (2 * math.pi))
    if abs(total - 2 * math.pi * k) > 1e-6:
        raise BoundaryTooCloseToZero(
            f"argument failed to close around {rect.as_tuple()}: {total}"
        )
    return WindingResult(rect, int(k), state["min"], state["count"])


def _tracked_delta(probe, za, zb, va, vb, depth, rect, state):
    if va == 0 or vb == 0:
        raise BoundaryTooCloseToZero(f"exact boundary zero near {za} on {rect.as_tuple()}")
    d = cmath.phase(vb / va)
    if abs(d) < _PHASE_CAP:
        return d
    if depth >= MAX_EDGE_DEPTH:
        raise BoundaryTooCloseToZero(
            f"phase jump persisted after {MAX_EDGE_DEPTH} subdivisions near {za}"
        )
    zm = (za + zb) / 2
    vm = probe(zm)
    return (_tracked_delta(probe, za, zm, va, vm, depth + 1, rect, state)
            + _tracked_delta(probe, zm, zb, vm, vb, depth + 1, rect, state))


# ---------------------------------------------------------------------------
# search + refinement


@dataclass
class ZeroSearchResult:
    region: Rectangle
    cells: list
    zeros: list  # refined, deduplicated, inside the region

    def zero_list(self):
        return list(self.zeros)


RESIDUAL_TARGET = 1e-8


def zero_search(series, region: Rectangle, grid=(4, 8)) -> ZeroSearchResult:
    """Cover the region with a grid of cells, wind each, and refine every
    winding cell to its zeros.  Cells whose boundary passes too close to a
    zero are retried with slight outward padding, so zeros sitting on grid
    lines (or on the region boundary itself) are still caught; duplicates
    from overlapping padded cells are merged at the end."""
    if region.sigma_min <= 1:
        raise ValueError("zero searches live strictly in sigma > 1")
    nx, ny = grid
    dx = (region.sigma_max - region.sigma_min) / nx
    dy = (region.t_max - region.t_min) / ny
    cells = []
    found = []
    for i in range(nx):
        for j in range(ny):
            cell = Rectangle(
                region.sigma_min + i * dx, region.sigma_min + (i + 1) * dx,
                region.t_min + j * dy, region.t_min + (j + 1) * dy,
            )
            res = _wind_with_retries(series, cell, dx, dy)
            if res.winding > 0:
                zeros = _refine_cell(series, res.rectangle, res.winding)
                res.refined_zeros = [(z, abs(complex(series(z)))) for z in zeros]
                found.extend(z for z, _ in res.refined_zeros)
            cells.append(res)
    uniq = _dedupe(found)
    slack = 1e-6 + 0.02 * max(dx, dy)
    inside = [z for z in uniq if region.contains(z, slack=slack)]
    inside.sort(key=lambda z: (z.imag, z.real))
    return ZeroSearchResult(region, cells, inside)


def _wind_with_retries(series, cell, dx, dy):
    pad = 0.0
    for attempt in range(6):
        try:
            return winding_number(series, cell.padded(pad, pad) if pad else cell)
        except BoundaryTooCloseToZero:
            pad = (pad + 0.013 * min(dx, dy)) * 1.7
    raise BoundaryTooCloseToZero(
        f"cell {cell.as_tuple()} unusable even after boundary perturbation"
    )


def _refine_cell(series, cell, winding, depth=0):
    if winding == 1 or depth >= 6:
        z = _secant(series, cell)
        return [z] if z is not None else []
    # several zeros: split along the longer side until separated
    zeros = []
    if (cell.sigma_max - cell.sigma_min) >= (cell.t_max - cell.t_min):
        mid = (cell.sigma_min + cell.sigma_max) / 2
        halves = [Rectangle(cell.sigma_min, mid, cell.t_min, cell.t_max),
                  Rectangle(mid, cell.sigma_max, cell.t_min, cell.t_max)]
    else:
        mid = (cell.t_min + cell.t_max) / 2
        halves = [Rectangle(cell.sigma_min, cell.sigma_max, cell.t_min, mid),
                  Rectangle(cell.sigma_min, cell.sigma_max, mid, cell.t_max)]
    for half in halves:
        res = _wind_with_retries(series, half,
                                 half.sigma_max - half.sigma_min,
                                 half.t_max - half.t_min)
        if res.winding > 0:
            zeros.extend(_refine_cell(series, res.rectangle, res.winding, depth + 1))
    return zeros


def _secant(series, cell):
    z0 = complex((cell.sigma_min + cell.sigma_max) / 2, (cell.t_min + cell.t_max) / 2)
    z1 = z0 + complex(cell.sigma_max - cell.sigma_min, cell.t_max - cell.t_min) * 0.07
    f0, f1 = complex(series(z0)), complex(series(z1))
    bail = cell.padded(cell.sigma_max - cell.sigma_min, cell.t_max - cell.t_min)
    for _ in range(80):
        if abs(f1) < RESIDUAL_TARGET and abs(f1) <= abs(f0):
            return z1
        if f1 == f0:
            break
        z2 = z1 - f1 * (z1 - z0) / (f1 - f0)
        if not bail.contains(z2, slack=0.5):
            break
        z0, f0, z1 = z1, f1, z2
        f1 = complex(series(z1))
    if abs(f1) < RESIDUAL_TARGET:
        return z1
    # secant wandered; squeeze by winding bisection and retry
    res = None
    for _ in range(3):
        sub = _split_to_winding_cell(series, cell)
        if sub is None:
            break
        cell = sub
        res = _secant_plain(series, cell)
        if res is not None:
            return res
    return res


def _split_to_winding_cell(series, cell):
    dx = (cell.sigma_max - cell.sigma_min) / 2
    dy = (cell.t_max - cell.t_min) / 2
    for i in range(2):
        for j in range(2):
            quad = Rectangle(cell.sigma_min + i * dx, cell.sigma_min + (i + 1) * dx,
                             cell.t_min + j * dy, cell.t_min + (j + 1) * dy)
            try:
                if _wind_with_retries(series, quad, dx, dy).winding > 0:
                    return quad
            except BoundaryTooCloseToZero:
                continue
    return None


def _secant_plain(series, cell):
    z0 = complex((cell.sigma_min + cell.sigma_max) / 2, (cell.t_min + cell.t_max) / 2)
    z1 = z0 + complex(cell.sigma_max - cell.sigma_min, 0) * 0.11
    f0, f1 = complex(series(z0)), complex(series(z1))
    for _ in range(80):
        if abs(f1) < RESIDUAL_TARGET:
            return z1
        if f1 == f0:
            return None
        z0, f0, z1 = z1, f1, z1 - f1 * (z1 - z0) / (f1 - f0)
        f1 = complex(series(z1))
    return None


def _dedupe(zeros, tol=1e-6):
    out = []
    for z in sorted(zeros, key=lambda w: (w.imag, w.real)):
        if all(abs(z - w) > tol for w in out):
            out.append(z)
    return out


# ---------------------------------------------------------------------------
# evaluators


def hurwitz_evaluator(x, prof: PrecisionProfile = EXPLORE):
    """s -> zeta(s, x)."""

    def F(s):
        return complex(hurwitz_zeta(s, x, prof).value)

    return F


def periodic_series_evaluator(f: PeriodicFunction, alpha, prof: PrecisionProfile = EXPLORE):
    """s -> F(s, f, alpha) by per-class Euler-Maclaurin (any real shift)."""

    def F(s):
        return complex(f_eval(s, f, alpha, prof).value)

    return F


def dirichlet_l_evaluator(chi, prof: PrecisionProfile = EXPLORE):
    """s -> L(s, chi) via conductor-level Hurwitz zetas."""
    k = chi.modulus
    table = [(r, chi(r)) for r in range(1, k + 1) if chi(r) != 0]

    def L(s):
        total = 0j
        for r, c in table:
            total += c * complex(hurwitz_zeta(s, r / k if r < k else 1.0, prof).value)
        return k ** (-complex(s)) * total

    return L


def decomposition_evaluator(decomp, prefactor: int = 1, prof: PrecisionProfile = EXPLORE):
    """s -> prefactor^s * sum_chi P_chi(s) L(s, chi) from a DecompositionResult.

    For rational shifts this is the preferred evaluator: the character
    count is small and each L-function needs only conductor-many Hurwitz
    evaluations."""
    pieces = []
    for chi, poly in decomp.terms:
        coeffs = [(n, complex(c)) for n, c in poly]
        pieces.append((dirichlet_l_evaluator(chi, prof), coeffs))

    def F(s):
        sc = complex(s)
        total = 0j
        for L, coeffs in pieces:
            p = sum(c * n ** (-sc) for n, c in coeffs)
            total += p * L(sc)
        if prefactor != 1:
            total *= prefactor**sc
        return total

    return F


def polynomial_evaluator(poly: dict):
    """s -> sum a_n n^(-s) for a finite coefficient dict."""
    items = sorted((n, complex(c)) for n, c in poly.items())

    def P(s):
        sc = complex(s)
        return sum(c * n ** (-sc) for n, c in items)

    return P


def polynomial_sigma_bound(poly: dict, margin: float = 0.5) -> float:
    """A sigma beyond which the least-index term dominates, so the
    polynomial cannot vanish; zeros with sigma > 1 all sit below this."""
    items = sorted((n, abs(complex(c))) for n, c in poly.items())
    n1, a1 = items[0]
    sigma = 1.5
    while sigma < 80:
        tail = sum(a * (n / n1) ** (-sigma) for n, a in items[1:])
        if tail <= margin * a1:
            return sigma
        sigma += 0.5
    return 80.0


def dirichlet_polynomial_zeros(poly: dict, t_max: float = 30.0, sigma_min: float = 1.01):
    """All zeros of the Dirichlet polynomial in [sigma_min, sigma_bound] x
    [0, t_max], found by winding; returns (zeros, region tuple).

    Real-coefficient polynomials have conjugate-symmetric zeros, so their
    scan only dips slightly below t = 0 (to catch real zeros) and reports
    the t >= 0 representatives; complex coefficients get the full
    symmetric t range."""
    if len(poly) <= 1:
        return [], (sigma_min, sigma_min, 0.0, t_max)
    real_coeffs = all(abs(complex(c).imag) < 1e-15 for c in poly.values())
    sigma_hi = polynomial_sigma_bound(poly)
    pad_below = 0.25 if real_coeffs else t_max
    region = Rectangle(sigma_min, sigma_hi, -pad_below, t_max)
    nx = max(2, int((sigma_hi - sigma_min) / 0.4))
    ny = max(4, int((t_max + pad_below) / 1.5))
    result = zero_search(polynomial_evaluator(poly), region, (nx, ny))
    zeros = [z for z in result.zeros if z.imag >= -1e-6] if real_coeffs else result.zeros
    return zeros, region.as_tuple()
