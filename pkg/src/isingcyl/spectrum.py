"""Spectral quantities of the cylinder Ising partition formula.

Everything here is a pure function of (beta, theta[, M]).  The angle grid is
theta = pi*(2n-1)/(2N), n = 1..N, and the per-angle quantities are

    cosh(gamma) = coth(2b) cosh(2b) - cos(theta),   gamma >= 0
    g           = [coth(2b) - cosh(2b) cos(theta)] / sinh(gamma)
    f           = ln[1 + e^{-4M gamma} + (1 - e^{-4M gamma}) g] - ln 2

together with their closed-form beta-derivatives.  All functions accept a
scalar or an ndarray of angles and broadcast accordingly.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

BETA_CRITICAL = math.log(1.0 + math.sqrt(2.0)) / 2.0

# coth(2*beta) overflows below ~1e-8 and the formulas degenerate far above
# the critical point; all spectral operations enforce this window.
BETA_MIN = 1e-6
BETA_MAX = 50.0


@dataclass(frozen=True)
class LatticeSpec:
    """Cylinder of circumference 2N (periodic) and height 2M (free)."""

    N: int
    M: int

    def __post_init__(self):
        if self.N < 1:
            raise ValidationError(f"half width N must satisfy N >= 1, got {self.N}")
        if self.M < 1:
            raise ValidationError(f"half height M must satisfy M >= 1, got {self.M}")

    @property
    def n_spins(self):
        return 4 * self.M * self.N

    @property
    def n_bonds(self):
        # 2M rows of 2N horizontal terms plus (2M-1) rows of 2N vertical terms
        return 4 * self.M * self.N + (2 * self.M - 1) * 2 * self.N


def critical_beta():
    """ln(1+sqrt(2))/2, where sinh(2b)=1 and cosh(2b)=sqrt(2)."""
    return BETA_CRITICAL


def check_beta(beta):
    if not (BETA_MIN <= beta <= BETA_MAX):
        raise ValidationError(
            f"beta must lie in [{BETA_MIN}, {BETA_MAX}], got {beta}"
        )
    return float(beta)


def theta_grid(spec):
    """Angles pi*(2n-1)/(2N), each computed directly from its index."""
    n = np.arange(1, spec.N + 1, dtype=np.float64)
    return (np.pi * (2.0 * n - 1.0)) / (2.0 * spec.N)


def _x_minus_one(beta, theta):
    """coth(2b)cosh(2b) - cos(theta) - 1, kept accurate near its zero.

    coth(2b)cosh(2b) - 2 = (sinh(2b) - 1)^2 / sinh(2b) is exactly
    nonnegative, and 1 - cos(theta) = 2 sin^2(theta/2) preserves the
    relative accuracy of small angles.
    """
    s2b = math.sinh(2.0 * beta)
    off_critical = (s2b - 1.0) ** 2 / s2b
    half = np.sin(np.asarray(theta, dtype=np.float64) / 2.0)
    return off_critical + 2.0 * half * half


def gamma(beta, theta):
    """Positive solution of cosh(gamma) = coth(2b)cosh(2b) - cos(theta)."""
    check_beta(beta)
    xm1 = _x_minus_one(beta, theta)
    if np.any(xm1 < 0.0):
        raise ValidationError(
            f"cosh(gamma) < 1 at beta={beta}: outside the admissible domain"
        )
    out = np.log1p(xm1 + np.sqrt(xm1 * (xm1 + 2.0)))
    return float(out) if np.isscalar(theta) else out


def sinh_gamma(beta, theta):
    check_beta(beta)
    xm1 = _x_minus_one(beta, theta)
    out = np.sqrt(xm1 * (xm1 + 2.0))
    return float(out) if np.isscalar(theta) else out


def cosh_gamma(beta, theta):
    check_beta(beta)
    out = 1.0 + _x_minus_one(beta, theta)
    return float(out) if np.isscalar(theta) else out


def g(beta, theta):
    """Boundary weight [coth(2b) - cosh(2b)cos(theta)] / sinh(gamma)."""
    check_beta(beta)
    c2b = math.cosh(2.0 * beta)
    coth2b = c2b / math.sinh(2.0 * beta)
    out = (coth2b - c2b * np.cos(theta)) / sinh_gamma(beta, theta)
    return float(out) if np.isscalar(theta) else out


def gamma_derivatives(beta, theta):
    """First three beta-derivatives of gamma, from the closed forms."""
    check_beta(beta)
    s2b = math.sinh(2.0 * beta)
    c2b = math.cosh(2.0 * beta)
    csch2b = 1.0 / s2b
    coth2b = c2b / s2b
    A = 1.0 - csch2b * csch2b

    xm1 = _x_minus_one(beta, theta)
    cg = 1.0 + xm1
    csg = 1.0 / np.sqrt(xm1 * (xm1 + 2.0))

    gp = 2.0 * c2b * A * csg
    gpp = (
        4.0 * s2b * A * csg
        + 8.0 * c2b**2 * csch2b**3 * csg
        - 4.0 * c2b**2 * A * A * cg * csg**3
    )
    # three-brace layout kept term by term for auditability
    brace1 = 8.0 * c2b * A * csg - 8.0 * c2b**3 * A**3 * csg**3
    brace2 = (
        16.0 * csch2b * coth2b
        - 24.0 * c2b * s2b * cg * A * A * csg * csg
        + 32.0 * c2b * csch2b**2
        - 48.0 * c2b**3 * csch2b**4
    ) * csg
    brace3 = (
        -48.0 * c2b**3 * csch2b**3 * cg * A * csg
        + 24.0 * c2b**3 * cg * cg * A**3 * csg**3
    ) * (csg * csg)
    gppp = brace1 + brace2 + brace3

    if np.isscalar(theta):
        return float(gp), float(gpp), float(gppp)
    return gp, gpp, gppp


def g_derivatives(beta, theta):
    """First and second beta-derivatives of g, from the closed forms."""
    check_beta(beta)
    s2b = math.sinh(2.0 * beta)
    c2b = math.cosh(2.0 * beta)
    csch2b = 1.0 / s2b
    coth2b = c2b / s2b
    A = 1.0 - csch2b * csch2b

    cos_t = np.cos(theta)
    xm1 = _x_minus_one(beta, theta)
    cg = 1.0 + xm1
    csg = 1.0 / np.sqrt(xm1 * (xm1 + 2.0))
    X = coth2b * c2b - cos_t  # = cosh(gamma)
    D = csch2b - cos_t

    gp = (
        -2.0 * (csch2b**2 + s2b * cos_t) * csg
        - 2.0 * c2b**2 * X * A * D * csg**3
    )
    brace1 = -4.0 * c2b**3 * A * A * D * csg**3
    brace2 = (
        8.0 * csch2b**2 * coth2b
        - 4.0 * c2b * cos_t
        - 8.0 * c2b * s2b * X * A * D * csg * csg
    ) * csg
    brace3 = (
        4.0 * c2b * (csch2b**2 + s2b * cos_t) * cg * A * csg
        - 8.0 * c2b**3 * csch2b**3 * X * D * csg
        + 4.0 * c2b**3 * csch2b**2 * X * A * csg
        + 12.0 * c2b**3 * X * cg * A * A * D * csg**3
    ) * (csg * csg)
    gpp = brace1 + brace2 + brace3

    if np.isscalar(theta):
        return float(gp), float(gpp)
    return gp, gpp


def _f_from_parts(q, g_val):
    arg = 0.5 * (1.0 + q + (1.0 - q) * g_val)
    if np.any(arg <= 0.0):
        raise ValidationError(
            "log argument of f is nonpositive (beta far above critical with "
            f"small M); offending g={g_val}, exp(-4M gamma)={q}"
        )
    return np.log(arg)


def f(beta, theta, M):
    """Finite-height correction ln[(1 + q + (1-q)g)/2], q = e^{-4M gamma}.

    When q underflows to 0 this reduces algebraically to ln((1+g)/2).
    """
    if M < 1:
        raise ValidationError(f"M must satisfy M >= 1, got {M}")
    q = np.exp(-4.0 * M * gamma(beta, theta))
    out = _f_from_parts(q, g(beta, theta))
    return float(out) if np.isscalar(theta) else out


def f_derivatives(beta, theta, M):
    """First and second beta-derivatives of f."""
    if M < 1:
        raise ValidationError(f"M must satisfy M >= 1, got {M}")
    gam = gamma(beta, theta)
    gv = g(beta, theta)
    gp, gpp, _ = gamma_derivatives(beta, theta)
    dgp, dgpp = g_derivatives(beta, theta)
    q = np.exp(-4.0 * M * gam)

    denom = 1.0 + q + (1.0 - q) * gv
    if np.any(denom <= 0.0):
        raise ValidationError(
            f"f is undefined at beta={beta}, M={M}: nonpositive denominator"
        )
    num1 = 4.0 * M * gp * q * (gv - 1.0) + (1.0 - q) * dgp
    fp = num1 / denom
    num2 = (
        4.0 * M * gpp * q * (gv - 1.0)
        - 16.0 * M * M * gp * gp * q * (gv - 1.0)
        + 8.0 * M * gp * q * dgp
        + (1.0 - q) * dgpp
    )
    fpp = num2 / denom - fp * fp

    if np.isscalar(theta):
        return float(fp), float(fpp)
    return fp, fpp


def eta(theta):
    """e^{gamma} at the critical point: ((sqrt(3-cos)+sqrt(1-cos))/sqrt(2))^2."""
    cos_t = np.cos(theta)
    out = ((np.sqrt(3.0 - cos_t) + np.sqrt(1.0 - cos_t)) / math.sqrt(2.0)) ** 2
    return float(out) if np.isscalar(theta) else out


def f_p_critical(theta, M):
    """Closed form of df/dbeta at the critical point, via eta."""
    if M < 1:
        raise ValidationError(f"M must satisfy M >= 1, got {M}")
    cos_t = np.cos(theta)
    qm = eta(theta) ** (-4.0 * M)
    num = -2.0 * (1.0 - qm) * (1.0 + cos_t) / np.sqrt((3.0 - cos_t) * (1.0 - cos_t))
    den = 1.0 + qm + (1.0 - qm) * np.sqrt(2.0 * (1.0 - cos_t) / (3.0 - cos_t))
    out = num / den
    return float(out) if np.isscalar(theta) else out


@dataclass(frozen=True)
class SpectrumPoint:
    """All per-angle quantities at one theta (eta is critical-only)."""

    theta: float
    gamma: float
    g: float
    f: float
    gamma_p: float
    gamma_pp: float
    gamma_ppp: float
    g_p: float
    g_pp: float
    f_p: float
    f_pp: float
    eta: float


def spectrum_point(beta, theta, M):
    """Bundle every per-angle quantity at a single (beta, theta, M)."""
    gp, gpp, gppp = gamma_derivatives(beta, theta)
    dgp, dgpp = g_derivatives(beta, theta)
    fp, fpp = f_derivatives(beta, theta, M)
    return SpectrumPoint(
        theta=float(theta),
        gamma=gamma(beta, theta),
        g=g(beta, theta),
        f=f(beta, theta, M),
        gamma_p=gp,
        gamma_pp=gpp,
        gamma_ppp=gppp,
        g_p=dgp,
        g_pp=dgpp,
        f_p=fp,
        f_pp=fpp,
        eta=eta(theta),
    )
