"""Exact spectral reference layer.

Legendre polynomials with rational coefficients, the bifurcation exponents
N_k = k(k+1) - 2 with their eigenvalues mu_k = 2k(k+1), the index function
frak_N, and the diagonal triple-product values j(k).  Everything here is
computed in exact arithmetic because this module is the oracle the
floating-point solvers are tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ParamMismatch

INTEGRALITY_TOL = 1e-12


@dataclass(frozen=True)
class LegendrePoly:
    """P_k with exact rational coefficients, index = power of s."""

    degree: int
    coefficients: tuple[Fraction, ...]

    def __call__(self, s):
        """Evaluate at float or ndarray argument (Horner)."""
        s = np.asarray(s, dtype=float)
        acc = np.zeros_like(s)
        for c in reversed(self.coefficients):
            acc = acc * s + float(c)
        return acc[()] if acc.ndim == 0 else acc

    def eval_exact(self, s: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * s + c
        return acc


def legendre(k: int) -> LegendrePoly:
    """P_k from the three-term recurrence (n+1) P_{n+1} = (2n+1) s P_n - n P_{n-1}."""
    if k < 0:
        raise ValueError("degree must be non-negative")
    p_prev = [Fraction(1)]          # P_0
    if k == 0:
        return LegendrePoly(0, tuple(p_prev))
    p_cur = [Fraction(0), Fraction(1)]  # P_1
    for n in range(1, k):
        nxt = [Fraction(0)] * (n + 2)
        for i, c in enumerate(p_cur):
            nxt[i + 1] += Fraction(2 * n + 1, n + 1) * c
        for i, c in enumerate(p_prev):
            nxt[i] -= Fraction(n, n + 1) * c
        p_prev, p_cur = p_cur, nxt
    return LegendrePoly(k, tuple(p_cur))


def poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return out


def integrate_sym(coeffs) -> Fraction:
    """Exact integral over [-1, 1]; odd powers drop out."""
    total = Fraction(0)
    for m, c in enumerate(coeffs):
        if m % 2 == 0:
            total += c * Fraction(2, m + 1)
    return total


def frak_N(N: float) -> float:
    """Index (-1 + sqrt(1 + 4(N+2)))/2; integer values mark bifurcation exponents."""
    if not N > -2:
        raise ValueError("requires N > -2")
    return 0.5 * (-1.0 + math.sqrt(1.0 + 4.0 * (N + 2.0)))


def is_bifurcation_exponent(N: float, tol: float = INTEGRALITY_TOL) -> bool:
    f = frak_N(N)
    return abs(f - round(f)) < tol and round(f) >= 1


def bifurcation_exponent(k: int) -> float:
    """N_k = k(k+1) - 2."""
    return float(k * (k + 1) - 2)


def eigenvalue(k: int) -> float:
    """mu_k = 2 k (k+1) = 2 (N_k + 2)."""
    return float(2 * k * (k + 1))


def gaunt_j(k: int) -> Fraction:
    """j(k) = k(k+1)/2 * int_{-1}^{1} P_k(s)^3 ds, exactly.

    Computed by cubing the rational coefficient list and integrating term by
    term rather than through the closed-form triple-product formula, so it can
    serve as an independent oracle for the quadrature path.
    """
    if k < 2:
        raise ValueError("defined for k >= 2")
    p = list(legendre(k).coefficients)
    cube = poly_mul(poly_mul(p, p), p)
    return Fraction(k * (k + 1), 2) * integrate_sym(cube)


@dataclass(frozen=True)
class SpectralConstants:
    k: int
    N_k: float
    mu_k: float
    j_k: Fraction

    @classmethod
    def for_order(cls, k: int) -> "SpectralConstants":
        if k < 2:
            raise ValueError("spectral constants start at k = 2")
        return cls(k=k, N_k=bifurcation_exponent(k), mu_k=eigenvalue(k), j_k=gaunt_j(k))


def spectral_table(k_max: int = 15) -> list[SpectralConstants]:
    return [SpectralConstants.for_order(k) for k in range(2, k_max + 1)]


def write_spectral_table(path, k_max: int = 15) -> None:
    from .csvio import write_csv

    rows = [
        [c.k, c.N_k, c.mu_k, c.j_k.numerator, c.j_k.denominator]
        for c in spectral_table(k_max)
    ]
    write_csv(
        path,
        ["k", "N_k", "mu_k", "j_k_numerator", "j_k_denominator"],
        rows,
        meta={"k_max": k_max},
    )


def legendre_residual(k: int, linearized) -> float:
    """Max deviation of a computed linearized mode from the exact P_k.

    ``linearized`` must be computed at (N_k, a*_{N_k}); the bounded mode there
    is P_k((r^2-1)/(r^2+1)) normalized to 1 at r = 0, i.e. multiplied by
    P_k(-1) = (-1)^k.
    """
    from .shooting import a_star

    N_k = bifurcation_exponent(k)
    params = linearized.base.params
    if abs(params.N - N_k) > 1e-9 or abs(params.a - a_star(N_k)) > 1e-9:
        raise ParamMismatch(
            f"profile at (N={params.N}, a={params.a}) is not (N_{k}, a*_{{N_{k}}})"
        )
    pk = legendre(k)
    sign = -1.0 if k % 2 else 1.0
    ts = np.linspace(linearized.t0, min(linearized.t_max, 15.0), 1201)
    s = np.tanh(ts)
    phi = linearized.w(ts)[0]
    return float(np.max(np.abs(phi - sign * pk(s))))
