"""Log-partition assembly, MGF, and exact moments against the oracle."""

import math

import numpy as np
import pytest

import isingcyl as ic
from isingcyl.errors import ValidationError
from isingcyl.partition import component_differences

BC = ic.BETA_CRITICAL


def lnz_2x2(beta):
    # 16 states of the 2x2 cylinder: E in {-6, -2, 0, 2, 6}
    return math.log(
        2 * math.exp(6 * beta)
        + 2 * math.exp(2 * beta)
        + 8
        + 2 * math.exp(-2 * beta)
        + 2 * math.exp(-6 * beta)
    )


def test_lnz_smallest_lattice_closed_form():
    spec = ic.LatticeSpec(1, 1)
    assert ic.log_partition(spec, BC).lnZ == pytest.approx(lnz_2x2(BC), abs=1e-11)


def test_lnz_oracle_2x2():
    spec = ic.LatticeSpec(2, 2)
    pmf = ic.enumerate_pmf(spec)
    lo = ic.oracle_log_partition(pmf, 0.3)
    assert ic.log_partition(spec, 0.3).lnZ == pytest.approx(lo, rel=1e-10)


def test_lnz_oracle_equivalence_sweep():
    for N, M in ((1, 1), (2, 1), (1, 2), (2, 2)):
        spec = ic.LatticeSpec(N, M)
        pmf = ic.enumerate_pmf(spec)
        for beta in (0.1, 0.3, BC, 0.7):
            lo = ic.oracle_log_partition(pmf, beta)
            assert abs(ic.log_partition(spec, beta).lnZ - lo) <= 1e-10 * abs(lo)


def test_lnz_free_spin_limit():
    for N, M in ((2, 2), (8, 3)):
        spec = ic.LatticeSpec(N, M)
        assert ic.log_partition(spec, 1e-6).lnZ == pytest.approx(
            4 * M * N * math.log(2), abs=1e-4
        )


def test_lnz_weak_lower_bound():
    for beta in (0.1, BC, 5.0, 50.0):
        assert ic.log_partition(ic.LatticeSpec(3, 2), beta).lnZ >= math.log(2)


def test_free_partition():
    assert ic.free_partition(ic.LatticeSpec(1, 1)) == pytest.approx(4 * math.log(2))
    assert ic.free_partition(ic.LatticeSpec(2, 3)) == pytest.approx(24 * math.log(2))
    assert ic.free_partition(ic.LatticeSpec(5, 5)) == pytest.approx(100 * math.log(2))


def test_log_mgf_zero():
    assert ic.log_mgf(ic.LatticeSpec(5, 5), 0.4, 0.0) == 0.0


def test_log_mgf_oracle():
    spec = ic.LatticeSpec(2, 1)
    pmf = ic.enumerate_pmf(spec)
    assert ic.log_mgf(spec, 0.4, 0.1) == pytest.approx(
        ic.oracle_log_mgf(pmf, 0.4, 0.1), abs=1e-10
    )
    spec = ic.LatticeSpec(1, 1)
    pmf = ic.enumerate_pmf(spec)
    assert ic.log_mgf(spec, BC, 0.05) == pytest.approx(
        ic.oracle_log_mgf(pmf, BC, 0.05), abs=1e-11
    )


def test_log_mgf_range_guard():
    with pytest.raises(ValidationError):
        ic.log_mgf(ic.LatticeSpec(2, 2), 0.4, 0.5)


def test_log_mgf_convexity():
    spec = ic.LatticeSpec(16, 8)
    ss = np.linspace(-0.2, 0.3, 21)
    k = np.array([ic.log_mgf(spec, BC, float(s)) for s in ss])
    second = np.diff(k, 2) / (ss[1] - ss[0]) ** 2
    assert np.all(second >= -1e-12)


def test_cumulants_match_moments():
    spec = ic.LatticeSpec(12, 9)
    mom = ic.energy_moments(spec, 0.38)
    h = 1e-5
    kp = (ic.log_mgf(spec, 0.38, h) - ic.log_mgf(spec, 0.38, -h)) / (2 * h)
    kpp = (ic.log_mgf(spec, 0.38, h) - 2 * 0.0 + ic.log_mgf(spec, 0.38, -h)) / h**2
    # K(s) = ln<e^{sE}>, so K'(0) is the mean energy itself
    assert kp == pytest.approx(mom.mean, rel=1e-6)
    assert kpp == pytest.approx(mom.variance, rel=1e-5)


def test_component_identity_vs_naive_difference():
    # per-theta differencing equals naive lnZ differencing at moderate size
    for N, M in ((50, 50), (100, 100)):
        spec = ic.LatticeSpec(N, M)
        s = 0.01
        naive = ic.log_partition(spec, BC - s).lnZ - ic.log_partition(spec, BC).lnZ
        assert ic.log_mgf(spec, BC, s) == pytest.approx(naive, abs=1e-9)


def test_energy_moments_oracle():
    spec = ic.LatticeSpec(1, 1)
    pmf = ic.enumerate_pmf(spec)
    mom, om = ic.energy_moments(spec, 0.3), ic.oracle_moments(pmf, 0.3)
    assert mom.mean == pytest.approx(om.mean, rel=1e-10)
    assert mom.variance == pytest.approx(om.variance, rel=1e-10)

    spec = ic.LatticeSpec(2, 2)
    pmf = ic.enumerate_pmf(spec)
    mom, om = ic.energy_moments(spec, BC), ic.oracle_moments(pmf, BC)
    assert mom.mean == pytest.approx(om.mean, rel=1e-9)
    assert mom.variance == pytest.approx(om.variance, rel=1e-9)


def test_energy_moments_free_limit():
    spec = ic.LatticeSpec(3, 2)
    mom = ic.energy_moments(spec, 1e-6)
    assert abs(mom.mean) <= 1e-3 * spec.n_bonds


def test_energy_moments_mean_bound_and_variance_positive():
    for N, M in ((1, 1), (4, 3), (32, 32)):
        spec = ic.LatticeSpec(N, M)
        for beta in (0.1, BC, 0.9):
            mom = ic.energy_moments(spec, beta)
            assert abs(mom.mean) <= spec.n_bonds
            assert mom.variance > 0.0


def test_normalized_log_mgf():
    spec = ic.LatticeSpec(8, 8)
    assert ic.normalized_log_mgf(spec, 0.0) == 0.0
    with pytest.raises(ValidationError):
        ic.normalized_log_mgf(spec, -1.0)
    with pytest.raises(ValidationError):
        ic.normalized_log_mgf(ic.LatticeSpec(1, 1), 1.0)
    # negative t admitted only through the override
    v = ic.normalized_log_mgf(spec, -0.5, allow_negative_t=True)
    assert math.isfinite(v)


def test_normalized_log_mgf_oracle():
    spec = ic.LatticeSpec(2, 1)
    pmf = ic.enumerate_pmf(spec)
    t = 0.5
    scale = math.sqrt(4 * spec.M * spec.N * math.log(spec.N))
    s = t / scale
    centering = 4 * math.sqrt(2) * spec.M * spec.N - (4 / math.pi) * spec.N * math.log(spec.N)
    expected = ic.oracle_log_mgf(pmf, BC, s) + s * centering
    assert ic.normalized_log_mgf(spec, t) == pytest.approx(expected, abs=1e-10)


def test_normalized_log_mgf_near_limit():
    # logarithmically slow convergence; measured residual at N=2^16 is ~0.22
    v = ic.normalized_log_mgf(ic.LatticeSpec(2**16, 2**16), 1.0)
    assert abs(v - 4 / math.pi) < 0.25


def test_component_differences_consistency():
    spec = ic.LatticeSpec(7, 3)
    dL1, dL2, dL3, dL4 = component_differences(spec, 0.5, 0.07)
    lp1 = ic.log_partition(spec, 0.43)
    lp0 = ic.log_partition(spec, 0.5)
    assert dL1 == pytest.approx(lp1.L1 - lp0.L1, abs=1e-10)
    assert dL2 == pytest.approx(lp1.L2 - lp0.L2, abs=1e-10)
    assert dL3 == pytest.approx(lp1.L3 - lp0.L3, abs=1e-10)
    assert dL4 == pytest.approx(lp1.L4 - lp0.L4, abs=1e-10)


def test_high_precision_mode_agrees():
    # the double-precision accumulation matches 30-digit software arithmetic
    for N, M, beta in ((64, 16, BC), (128, 8, 0.3), (37, 5, 0.7)):
        spec = ic.LatticeSpec(N, M)
        lp = ic.log_partition(spec, beta)
        hp = ic.log_partition_hp(spec, beta, dps=30)
        for a, b in ((lp.L1, hp.L1), (lp.L2, hp.L2), (lp.L3, hp.L3),
                     (lp.L4, hp.L4), (lp.lnZ, hp.lnZ)):
            assert abs(a - b) <= 1e-12 * max(abs(b), 1.0)


def test_worker_determinism():
    spec = ic.LatticeSpec(4096, 1024)
    a = ic.log_partition(spec, BC, with_derivatives=True, workers=1)
    b = ic.log_partition(spec, BC, with_derivatives=True, workers=8)
    assert a == b
    assert ic.log_mgf(spec, BC, 1e-4, workers=1) == ic.log_mgf(spec, BC, 1e-4, workers=5)


def test_derivative_components():
    spec = ic.LatticeSpec(6, 4)
    lp = ic.log_partition(spec, 0.4, with_derivatives=True)
    M, N = spec.M, spec.N
    assert lp.dL[0] == pytest.approx(4 * M * N / math.tanh(0.8), rel=1e-15)
    assert lp.dL[1] == pytest.approx(2 * N * math.tanh(0.4), rel=1e-15)
    assert lp.d2L[0] == pytest.approx(-8 * M * N / math.sinh(0.8) ** 2, rel=1e-15)
    assert lp.d2L[1] == pytest.approx(2 * N / math.cosh(0.4) ** 2, rel=1e-15)
