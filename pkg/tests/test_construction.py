import cmath
import math
import random
from fractions import Fraction

import pytest
from mpmath import mp

from ghzeta.arith import FactorCache, PeriodicFunction
from ghzeta.construction import (
    ConstructionProfile,
    PhiAssignment,
    StageState,
    ThinClass,
    Unreachable,
    bohr_solve,
    run_construction,
    select_sigma,
    stage_advance,
)
from ghzeta.ideals import AlgebraicAlpha, PrimeIdealKey, fixtures

ALPHA = fixtures()
ONE = PeriodicFunction.constant_one()


def linkage_sum(radii, phases):
    return sum(r * cmath.exp(1j * p) for r, p in zip(radii, phases))


def test_bohr_boundary_alignment():
    phases = bohr_solve([1, 1, 1, 1, 1], 5 + 0j)
    assert all(abs(p) < 1e-12 for p in phases)


def test_bohr_symmetric_zero():
    radii = [1, 1, 1, 1, 1]
    phases = bohr_solve(radii, 0j)
    assert abs(linkage_sum(radii, phases)) < 1e-12


def test_bohr_inner_boundary():
    phases = bohr_solve([3, 1, 1], 1 + 0j)
    assert phases[0] == pytest.approx(0, abs=1e-12)
    assert abs(abs(phases[1]) - math.pi) < 1e-12
    assert abs(abs(phases[2]) - math.pi) < 1e-12


def test_bohr_random_feasible():
    rng = random.Random(101)
    for _ in range(300):
        k = rng.randrange(2, 13)
        radii = [rng.uniform(0.1, 5) for _ in range(k)]
        total = sum(radii)
        inner = max(0.0, 2 * max(radii) - total)
        mag = rng.uniform(inner, total)
        ang = rng.uniform(0, 2 * math.pi)
        z = mag * cmath.exp(1j * ang)
        phases = bohr_solve(radii, z)
        assert abs(linkage_sum(radii, phases) - z) < 1e-10 * total


def test_bohr_infeasible_rejected():
    with pytest.raises(Unreachable):
        bohr_solve([1, 1], 3 + 0j)
    with pytest.raises(Unreachable):
        bohr_solve([3, 1], 0.5j)
    with pytest.raises(Unreachable):
        bohr_solve([2], 1 + 0j)
    with pytest.raises(Unreachable):
        bohr_solve([3, 1], 0j)


def test_bohr_mp_context():
    with mp.workdps(60):
        radii = [mp.mpf(1), mp.mpf("1.5"), mp.mpf("0.25"), mp.mpf(2)]
        z = mp.mpc("1.25", "-0.5")
        phases = bohr_solve(radii, z, ctx=mp)
        resid = abs(sum(r * mp.expjpi(p / mp.pi) for r, p in zip(radii, phases)) - z)
        assert resid < mp.mpf(10) ** -50


def test_profile_consistency_guard():
    ConstructionProfile.desk(1)
    ConstructionProfile.canonical(2)
    with pytest.raises(ValueError):
        ConstructionProfile(theta=Fraction(1, 5), n1=10)  # window too fat


def test_phi_assignment_write_once():
    phi = PhiAssignment()
    key = PrimeIdealKey(7, 4)
    phi.set_phase(key, -1)
    with pytest.raises(RuntimeError):
        phi.set_phase(key, 1j)
    with pytest.raises(RuntimeError):
        phi.ensure_one(key)
    phi.ensure_one(PrimeIdealKey(7, 5))
    phi.ensure_one(PrimeIdealKey(7, 5))
    assert phi.get(PrimeIdealKey(7, 5)) == 1
    assert phi.get(PrimeIdealKey(71, 13)) == 1  # implicit default
    with pytest.raises(ValueError):
        phi.set_phase(PrimeIdealKey(17, 2), 1.5)  # not unimodular


def test_select_sigma_tiny_example():
    golden = AlgebraicAlpha((1, 1, -1), (Fraction(3, 5), Fraction(7, 10)))
    profile = ConstructionProfile(theta=Fraction(1, 20), n1=20)
    cert = select_sigma(ONE, golden, profile)
    assert cert.certified
    assert 1 < float(cert.sigma) <= 1.003


def test_select_sigma_canonical_scale():
    profile = ConstructionProfile.canonical(1)
    cert = select_sigma(ONE, ALPHA, profile)
    assert cert.certified
    assert 1e-5 < float(cert.sigma) - 1 < 1e-3


def test_stage_zero_drift_cancels_exactly():
    # window (102, 107]: every member owns a private prime, so a zero
    # incoming drift stays zero after the stage
    profile = ConstructionProfile(theta=Fraction(5, 102), n1=102, digits=50)
    with mp.workdps(60):
        state = StageState(1, 102, mp.mpf("1.2"), ALPHA.value(50),
                           [mp.mpc(0)], PhiAssignment(50))
        new_state, report = stage_advance(state, ALPHA, ONE, profile)
        cls = report.per_class[0]
        assert cls["count_B"] == 0
        assert cls["achieved_abs"] < profile.tolerance
        assert abs(new_state.class_sums[0]) < profile.tolerance


def test_stage_thin_class():
    profile = ConstructionProfile(theta=Fraction(1, 20), n1=40, digits=30)
    with mp.workdps(40):
        state = StageState(1, 40, mp.mpf("1.1"), ALPHA.value(30),
                           [mp.mpc(0)], PhiAssignment(30))
        with pytest.raises(ThinClass):
            stage_advance(state, ALPHA, ONE, profile)


def test_desk_run_two_stages():
    cache = FactorCache()
    report, state, log = run_construction(ONE, ALPHA, ConstructionProfile.desk(1), 2, cache)
    assert report.sigma_certificate["certified"]
    assert all(s["induction_ok"] for s in report.stages)
    assert all(c["class_bound_ok"] for s in report.stages for c in s["classes"])
    assert report.recomputation_delta < 1e-20
    assert report.envelope_ok
    # phases all unimodular
    with mp.workdps(60):
        for p, root, re, im in log:
            z = mp.mpc(mp.mpf(re), mp.mpf(im))
            assert abs(abs(z) - 1) < 1e-14


def test_desk_run_q2():
    alpha2 = ALPHA.with_q(2)
    f = PeriodicFunction(2, (1, -1))
    report, state, log = run_construction(f, alpha2, ConstructionProfile.desk(2), 2)
    assert all(s["induction_ok"] for s in report.stages)
    for s in report.stages:
        assert len(s["classes"]) == 2


def test_desk_run_exact_thirds():
    # coefficients that are not dyadic floats: certificates stay exact
    f = PeriodicFunction(2, (Fraction(1, 3), Fraction(2, 3)))
    report, _, _ = run_construction(f, ALPHA.with_q(2), ConstructionProfile.desk(2), 2)
    assert all(s["induction_ok"] for s in report.stages)
    assert report.recomputation_delta < 1e-20


def test_canonical_single_stage():
    report, state, _ = run_construction(ONE, ALPHA, ConstructionProfile.canonical(1), 1)
    stage = report.stages[0]
    assert stage["M_j"] == 10
    assert stage["classes"][0]["count_A"] >= 5
    assert stage["induction_ok"]
    assert state.n_current == 10**7 + 10


def test_ratio_check_recorded():
    report, _, _ = run_construction(ONE, ALPHA, ConstructionProfile.desk(1), 1)
    cls = report.stages[0]["classes"][0]
    if cls["count_B"] <= 0.46 * report.stages[0]["M_j"]:
        assert cls["ratio_check"] is True
    s3, s2 = cls["free_weight_S3"], cls["locked_weight_S2"]
    assert s3 - s2 > (s3 + s2) / 100
