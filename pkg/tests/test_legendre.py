from fractions import Fraction

import numpy as np
import pytest

from liouville_lab.legendre import (
    SpectralConstants,
    bifurcation_exponent,
    eigenvalue,
    frak_N,
    gaunt_j,
    integrate_sym,
    legendre,
    poly_mul,
    spectral_table,
)


def test_low_order_polynomials():
    assert legendre(0).coefficients == (Fraction(1),)
    assert legendre(1).coefficients == (Fraction(0), Fraction(1))
    assert legendre(2).coefficients == (Fraction(-1, 2), Fraction(0), Fraction(3, 2))
    p3 = legendre(3)
    assert p3(0.0) == 0.0
    assert all(c == 0 for c in p3.coefficients[0::2])  # odd parity


@pytest.mark.parametrize("k", range(0, 12))
def test_value_at_one_and_parity(k):
    p = legendre(k)
    assert p.eval_exact(Fraction(1)) == 1
    assert p.eval_exact(Fraction(-1)) == (-1) ** k
    dead = p.coefficients[(k + 1) % 2 :: 2]
    assert all(c == 0 for c in dead)


@pytest.mark.parametrize("k", range(2, 8))
def test_k_zeros_inside_interval(k):
    roots = np.roots([float(c) for c in reversed(legendre(k).coefficients)])
    real = roots[np.abs(roots.imag) < 1e-12].real
    assert len(real) == k
    assert np.all((real > -1) & (real < 1))


def test_orthogonality_exact():
    polys = {k: legendre(k) for k in range(7)}
    for j in range(7):
        for k in range(j, 7):
            val = integrate_sym(poly_mul(list(polys[j].coefficients), list(polys[k].coefficients)))
            assert val == (Fraction(2, 2 * k + 1) if j == k else 0)


def test_frak_N_values():
    assert abs(frak_N(4.0) - 2.0) < 1e-12
    assert abs(frak_N(10.0) - 3.0) < 1e-12
    assert abs(frak_N(5.0) - 2.1925824035672523) < 1e-12  # (−1+sqrt(29))/2
    with pytest.raises(ValueError):
        frak_N(-2.0)


@pytest.mark.parametrize("k", range(2, 16))
def test_frak_N_inverts_exponents(k):
    assert abs(frak_N(bifurcation_exponent(k)) - k) < 1e-12


def test_gaunt_values():
    assert gaunt_j(2) == Fraction(12, 35)
    assert gaunt_j(3) == 0
    assert gaunt_j(4) > 0
    for k in range(2, 16):
        j = gaunt_j(k)
        if k % 2:
            assert j == 0
        else:
            assert j > 0


@pytest.mark.parametrize("k", range(2, 9))
def test_gaunt_against_float_quadrature(k):
    # independent route: numpy's Legendre-Gauss nodes on the float polynomial
    x, w = np.polynomial.legendre.leggauss(3 * k + 2)
    p = legendre(k)
    quad = float(np.sum(w * p(x) ** 3)) * k * (k + 1) / 2.0
    assert abs(quad - float(gaunt_j(k))) < 1e-12


def test_spectral_constants():
    table = spectral_table(6)
    assert [c.N_k for c in table] == [4.0, 10.0, 18.0, 28.0, 40.0]
    for c in table:
        assert c.mu_k == 2.0 * (c.N_k + 2.0)
        assert c.mu_k == eigenvalue(c.k)
    with pytest.raises(ValueError):
        SpectralConstants.for_order(1)


def test_spectral_table_csv(tmp_path):
    from liouville_lab.csvio import read_csv
    from liouville_lab.legendre import write_spectral_table

    path = tmp_path / "spectral.csv"
    write_spectral_table(path, k_max=6)
    cols, rows, _ = read_csv(path)
    assert cols == ["k", "N_k", "mu_k", "j_k_numerator", "j_k_denominator"]
    byk = {int(r[0]): r for r in rows}
    assert byk[2][1] == 4.0 and byk[2][2] == 12.0
    assert byk[2][3] / byk[2][4] == pytest.approx(12.0 / 35.0)
    assert byk[3][3] == 0.0
