"""Log-partition assembly, energy MGF, and exact energy moments.

The log-partition splits as lnZ = L1 - L2 + L3 + L4 with

    L1 = 2MN ln(2 sinh 2b),  L2 = 2N ln(cosh b),
    L3 = 2M sum_theta gamma, L4 = sum_theta f.

Differences of lnZ at nearby temperatures (the MGF) are never formed by
subtracting two separately accumulated sums: L1, L2 difference via log of a
ratio in log1p form, L3, L4 by per-angle differencing.  All angle sums use
exactly rounded accumulation (math.fsum), which makes the result independent
of how the per-angle evaluation was sharded across workers.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import spectrum
from .errors import ValidationError
from .spectrum import BETA_CRITICAL, LatticeSpec, check_beta, theta_grid


def compensated_sum(values):
    """Exactly rounded sum of an array of doubles."""
    return math.fsum(values)


def _chunked(theta, workers, fn):
    """Evaluate fn on theta chunk by chunk; global order is preserved so the
    final exact sum is identical for any worker count."""
    if workers <= 1 or theta.size < 2 * workers:
        return fn(theta)
    chunks = np.array_split(theta, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(fn, chunks))
    return np.concatenate(parts)


@dataclass(frozen=True)
class LogPartition:
    L1: float
    L2: float
    L3: float
    L4: float
    lnZ: float
    dL: tuple | None = None   # (L1', L2', L3', L4')
    d2L: tuple | None = None  # (L1'', L2'', L3'', L4'')


@dataclass(frozen=True)
class EnergyMoments:
    mean: float
    variance: float


def free_partition(spec: LatticeSpec) -> float:
    """ln Z at beta = 0: independent spins, Z = 2^{4MN}."""
    return 4.0 * spec.M * spec.N * math.log(2.0)


def log_partition(spec, beta, with_derivatives=False, workers=1):
    beta = check_beta(beta)
    M, N = spec.M, spec.N
    theta = theta_grid(spec)

    L1 = 2.0 * M * N * math.log(2.0 * math.sinh(2.0 * beta))
    L2 = 2.0 * N * math.log(math.cosh(beta))
    L3 = 2.0 * M * compensated_sum(_chunked(theta, workers, lambda th: spectrum.gamma(beta, th)))
    L4 = compensated_sum(_chunked(theta, workers, lambda th: spectrum.f(beta, th, M)))
    lnZ = L1 - L2 + L3 + L4

    dL = d2L = None
    if with_derivatives:
        s2b = math.sinh(2.0 * beta)
        c2b = math.cosh(2.0 * beta)
        L1p = 4.0 * M * N * c2b / s2b
        L1pp = -8.0 * M * N / (s2b * s2b)
        L2p = 2.0 * N * math.tanh(beta)
        L2pp = 2.0 * N / (math.cosh(beta) ** 2)

        # chunk functions return (n, 2) columns so chunks concatenate along theta
        gd = _chunked(theta, workers,
                      lambda th: np.stack(spectrum.gamma_derivatives(beta, th)[:2], axis=-1))
        L3p = 2.0 * M * compensated_sum(gd[:, 0])
        L3pp = 2.0 * M * compensated_sum(gd[:, 1])

        fd = _chunked(theta, workers,
                      lambda th: np.stack(spectrum.f_derivatives(beta, th, M), axis=-1))
        L4p = compensated_sum(fd[:, 0])
        L4pp = compensated_sum(fd[:, 1])
        dL = (L1p, L2p, L3p, L4p)
        d2L = (L1pp, L2pp, L3pp, L4pp)

    return LogPartition(L1=L1, L2=L2, L3=L3, L4=L4, lnZ=lnZ, dL=dL, d2L=d2L)


def component_differences(spec, beta, s, workers=1):
    """(dL1, dL2, dL3, dL4) with dLi = Li(beta - s) - Li(beta).

    Each component difference carries full relative accuracy even when the
    components themselves are O(MN): L1, L2 via log1p of the sinh/cosh
    ratios, L3, L4 summed per angle.
    """
    beta = check_beta(beta)
    b2 = beta - s
    if not (spectrum.BETA_MIN <= b2 <= spectrum.BETA_MAX):
        raise ValidationError(
            f"beta - s = {b2} outside [{spectrum.BETA_MIN}, {spectrum.BETA_MAX}]"
        )
    M, N = spec.M, spec.N
    theta = theta_grid(spec)

    # sinh(2b-2s)/sinh(2b) = cosh(2s) - coth(2b) sinh(2s)
    r1m1 = (math.cosh(2.0 * s) - 1.0) - (math.sinh(2.0 * s) * math.cosh(2.0 * beta)
                                         / math.sinh(2.0 * beta))
    dL1 = 2.0 * M * N * math.log1p(r1m1)
    # cosh(b-s)/cosh(b) = cosh(s) - tanh(b) sinh(s)
    r2m1 = (math.cosh(s) - 1.0) - math.sinh(s) * math.tanh(beta)
    dL2 = 2.0 * N * math.log1p(r2m1)

    dL3 = 2.0 * M * compensated_sum(
        _chunked(theta, workers,
                 lambda th: spectrum.gamma(b2, th) - spectrum.gamma(beta, th)))
    dL4 = compensated_sum(
        _chunked(theta, workers,
                 lambda th: spectrum.f(b2, th, M) - spectrum.f(beta, th, M)))
    return dL1, dL2, dL3, dL4


def log_mgf(spec, beta, s, workers=1):
    """ln <e^{s E}> = ln Z(beta - s) - ln Z(beta), per-angle differenced."""
    if s == 0.0:
        check_beta(beta)
        return 0.0
    if beta - s == 0.0:
        # beta - s = 0 is admitted through the analytic free-spin value
        check_beta(beta)
        return free_partition(spec) - log_partition(spec, beta, workers=workers).lnZ
    dL1, dL2, dL3, dL4 = component_differences(spec, beta, s, workers=workers)
    return dL1 - dL2 + dL3 + dL4


def normalized_log_mgf(spec, t, allow_negative_t=False, workers=1):
    """ln <e^{t Ehat}> at the critical point, with
    Ehat = (E + 4 sqrt(2) MN - (4/pi) N ln N) / sqrt(4 MN ln N)."""
    if t < 0.0 and not allow_negative_t:
        raise ValidationError(
            "t < 0 requires allow_negative_t=True (unproven regime)"
        )
    if spec.N < 2:
        raise ValidationError("normalized MGF needs N >= 2 (ln N > 0)")
    M, N = spec.M, spec.N
    scale = math.sqrt(4.0 * M * N * math.log(N))
    s = t / scale
    centering = 4.0 * math.sqrt(2.0) * M * N - (4.0 / math.pi) * N * math.log(N)
    return log_mgf(spec, BETA_CRITICAL, s, workers=workers) + s * centering


def log_partition_hp(spec, beta, dps=30):
    """High-precision validation mode: lnZ components in software arithmetic.

    Evaluates the defining formulas for L1..L4 with mpmath at `dps`
    significant digits and returns a LogPartition of rounded doubles.
    Intended for validating the double-precision accumulation at modest N;
    cost is O(N) mpmath evaluations.  Requires the optional mpmath package.
    """
    try:
        import mpmath as mp
    except ImportError as exc:  # pragma: no cover
        raise ImportError(
            "log_partition_hp requires mpmath (pip install mpmath)"
        ) from exc
    beta = check_beta(beta)
    M, N = spec.M, spec.N
    with mp.workdps(dps):
        b = mp.mpf(beta)
        L1 = 2 * M * N * mp.log(2 * mp.sinh(2 * b))
        L2 = 2 * N * mp.log(mp.cosh(b))
        gammas = []
        fs = []
        for n in range(1, N + 1):
            th = mp.pi * (2 * n - 1) / (2 * N)
            x = mp.coth(2 * b) * mp.cosh(2 * b) - mp.cos(th)
            gam = mp.acosh(x)
            gval = (mp.coth(2 * b) - mp.cosh(2 * b) * mp.cos(th)) / mp.sinh(gam)
            q = mp.e ** (-4 * M * gam)
            fs.append(mp.log((1 + q + (1 - q) * gval) / 2))
            gammas.append(gam)
        L3 = 2 * M * mp.fsum(gammas)
        L4 = mp.fsum(fs)
        lnZ = L1 - L2 + L3 + L4
        return LogPartition(
            L1=float(L1), L2=float(L2), L3=float(L3), L4=float(L4), lnZ=float(lnZ)
        )


def energy_moments(spec, beta, workers=1):
    """Exact <E> and Var(E) from the analytic component derivatives."""
    lp = log_partition(spec, beta, with_derivatives=True, workers=workers)
    L1p, L2p, L3p, L4p = lp.dL
    L1pp, L2pp, L3pp, L4pp = lp.d2L
    mean = -(L1p - L2p + L3p + L4p)
    variance = L1pp - L2pp + L3pp + L4pp
    return EnergyMoments(mean=mean, variance=variance)
