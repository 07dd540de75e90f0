import math

import numpy as np
import pytest

from leggett_lab import (
    CertificationError,
    EcsSpec,
    LogValue,
    gram_expectation,
    gram_matrix,
    gram_norm,
    kappa_K,
    operator_elements,
    pseudospin_bloch,
    pseudospin_map,
    rotation_map,
)
from leggett_lab import fock
from leggett_lab.coherent_algebra import FAMILIES
from conftest import random_direction


# -- LogValue -------------------------------------------------------------------


def test_logvalue_roundtrip_and_arithmetic(rng):
    # cancelling sums cannot beat float cancellation, so the relative-1e-14
    # contract is against the result for same-sign pairs and against the
    # input scale for mixed-sign pairs
    for _ in range(300):
        x = float(rng.uniform(-50, 50))
        y = float(rng.uniform(-50, 50))
        lx, ly = LogValue.from_float(x), LogValue.from_float(y)
        s = (lx + ly).to_float()
        p = (lx * ly).to_float()
        if x * y > 0:
            assert abs(s - (x + y)) <= 1e-14 * abs(x + y)
        else:
            assert abs(s - (x + y)) <= 1e-14 * max(abs(x), abs(y))
        assert abs(p - x * y) <= 1e-13 * abs(x * y)
    assert (LogValue.from_float(3.0) + LogValue.from_float(-3.0)).sign == 0
    assert LogValue.from_float(0.0).to_float() == 0.0
    assert (-LogValue.from_float(2.0)).to_float() == -2.0


def test_logvalue_handles_huge_magnitudes():
    big = LogValue(1, 900.0)  # far beyond float overflow
    bigger = big + big
    assert bigger.log_magnitude == pytest.approx(900.0 + math.log(2.0), abs=1e-12)


# -- EcsSpec --------------------------------------------------------------------


def test_ecs_spec_norm_consistency():
    for alpha in (0.3, 1.0, 2.5):
        for sign in (+1, -1):
            spec = EcsSpec(alpha, sign)
            c = spec.coefficient_tensor()
            g = gram_matrix(alpha)
            norm2 = np.einsum("xy,xu,yv,uv->", c.conj(), g, g, c).real
            assert abs(norm2 - 1.0) < 1e-12


def test_ecs_spec_validation():
    with pytest.raises(ValueError):
        EcsSpec(1.0, 0)
    with pytest.raises(ValueError):
        EcsSpec(-1.0, 1)


# -- K(alpha) -------------------------------------------------------------------


def test_kappa_k_limits():
    assert kappa_K(0.0) == 1.0
    assert kappa_K(0.01) > 0.9999
    assert kappa_K(50.0) > 0.999
    assert np.isfinite(kappa_K(100.0))


def test_kappa_k_band_and_dip():
    grid = np.arange(0.1, 10.0001, 0.01)
    ks = np.array([kappa_K(a) for a in grid])
    assert 0.905 <= ks.min() <= 0.910
    assert np.all(ks <= 1.0 + 1e-12)
    assert abs(grid[np.argmin(ks)] - 1.5) < 0.3


def test_kappa_k_continuity():
    for lo in (0.3, 1.45, 4.0, 20.0):
        a = np.array([lo, lo + 1e-3])
        k = [kappa_K(x) for x in a]
        assert abs(k[1] - k[0]) < 1e-2


def test_kappa_k_oracle_at_alpha1():
    # equatorial two-mode expectation equals -K
    alpha, dim = 1.0, fock.default_dim(1.0)
    psi = fock.ecs_fock(alpha, -1, dim)
    from leggett_lab.geometry import Direction

    eq = Direction(np.pi / 2, 0.7)
    val = fock.two_mode_expectation(
        psi, fock.spin_projection(eq, dim), fock.spin_projection(eq, dim)
    )
    assert abs(val.real - (-kappa_K(alpha))) < 1e-8


# -- Bloch vector ----------------------------------------------------------------


def test_bloch_vacuum_and_reality():
    assert np.allclose(pseudospin_bloch(0.0), [0, 0, -1])
    m = pseudospin_bloch(1.7)
    assert m[1] == 0.0


def test_bloch_matches_oracle():
    alpha, dim = 1.0, fock.default_dim(1.0)
    ca = fock.coherent(alpha, dim)
    sz, sp, sm = fock.pseudo_spin_ops(dim)
    sx = fock.FockOperator(sp.matrix + sm.matrix)
    sy = fock.FockOperator(-1j * (sp.matrix - sm.matrix))
    m = pseudospin_bloch(alpha)
    for comp, op in zip(m, (sx, sy, sz)):
        assert abs(fock.expectation(ca, op) - comp) < 1e-8


def test_bloch_length_bounded():
    for alpha in np.linspace(0.0, 50.0, 101):
        assert np.linalg.norm(pseudospin_bloch(alpha)) <= 1.0 + 1e-12


def test_bloch_continuity():
    for lo in (0.2, 1.0, 5.0):
        m1, m2 = pseudospin_bloch(lo), pseudospin_bloch(lo + 1e-3)
        assert np.linalg.norm(m1 - m2) < 1e-2


# -- coefficient maps --------------------------------------------------------------


def test_rotation_map_examples():
    m = rotation_map(np.pi, 0.0)
    assert np.allclose(m, [[1, 0], [0, -1]], atol=1e-15)
    m = rotation_map(0.0, 0.8)
    assert np.allclose(m, [[0, np.exp(0.8j)], [np.exp(-0.8j), 0]], atol=1e-15)


def test_rotation_map_unitary(rng):
    for _ in range(25):
        m = rotation_map(rng.uniform(0, np.pi), rng.uniform(-np.pi, np.pi))
        assert np.allclose(m.conj().T @ m, np.eye(2), atol=1e-12)


def test_pseudospin_map_examples(rng):
    m = pseudospin_map(np.pi / 2, 0.0)
    assert np.allclose(m, [[1, 0], [0, -1]], atol=1e-15)
    for _ in range(25):
        m = pseudospin_map(rng.uniform(0, np.pi), rng.uniform(-np.pi, np.pi))
        assert np.allclose(m @ m, np.eye(2), atol=1e-12)  # reflection property
        assert np.allclose(m.conj().T @ m, np.eye(2), atol=1e-12)


def test_pseudospin_map_matches_oracle_projection(rng):
    # compare against the Gram-corrected projection of (u.s)|a> onto the
    # two-ket span (the operator also creates a small out-of-span component)
    alpha, dim = 3.0, fock.default_dim(3.0)
    ca, cm = fock.coherent(alpha, dim), fock.coherent(-alpha, dim)
    kets = np.stack([ca.amplitudes, cm.amplitudes])
    g_inv = np.linalg.inv(gram_matrix(alpha))
    g = gram_matrix(alpha)
    for _ in range(10):
        u = random_direction(rng)
        out = fock.spin_projection(u, dim).matrix @ ca.amplitudes
        c_proj = g_inv @ (kets.conj() @ out)
        c_map = pseudospin_map(u.theta, u.phi) @ np.array([1.0, 0.0])
        overlap = abs(c_map.conj() @ g @ c_proj) ** 2
        fid = overlap / (
            (c_map.conj() @ g @ c_map).real * (c_proj.conj() @ g @ c_proj).real
        )
        assert fid >= 0.99


# -- operator elements --------------------------------------------------------------


def test_onoff_elements_alpha5():
    m = operator_elements("onoff", 5.0)
    # 1 - diag = 2 e^{-25} = 2.78e-11 (the quoted 2e-11 rounds this)
    assert abs(m[0, 0] - 1.0) < 3e-11
    assert abs(m[0, 1] - (math.exp(-50.0) - 2 * math.exp(-25.0))) < 1e-15


def test_parity_elements_alpha1():
    m = operator_elements("parity", 1.0)
    assert m[0, 0] == pytest.approx(-math.exp(-2.0), abs=1e-15)
    assert m[0, 1] == pytest.approx(-1.0, abs=1e-15)


def test_all_families_match_oracle():
    alpha, dim = 1.5, fock.default_dim(1.5)
    kets = (fock.coherent(alpha, dim), fock.coherent(-alpha, dim))
    sz, sp, sm = fock.pseudo_spin_ops(dim)
    ops = {
        "onoff": fock.on_off_op(dim),
        "parity": fock.parity_op(dim),
        "sx": fock.FockOperator(sp.matrix + sm.matrix),
        "sy": fock.FockOperator(-1j * (sp.matrix - sm.matrix)),
        "sz": sz,
    }
    for family in FAMILIES:
        m = operator_elements(family, alpha)
        for i in range(2):
            for j in range(2):
                oracle = np.vdot(kets[i].amplitudes, ops[family].matrix @ kets[j].amplitudes)
                assert abs(m[i, j] - oracle) < 1e-8


def test_elements_hermitian_exact():
    for family in FAMILIES:
        m = operator_elements(family, 0.8)
        assert np.array_equal(m, m.conj().T)


def test_elements_certification_aborts_on_mismatch(monkeypatch):
    import leggett_lab.coherent_algebra as ca

    ca._cached_elements.cache_clear()
    real = ca._elements_uncertified

    def broken(family, alpha):
        m = real(family, alpha).copy()
        m[0, 0] += 1e-6
        return m

    monkeypatch.setattr(ca, "_elements_uncertified", broken)
    with pytest.raises(CertificationError):
        ca.operator_elements("onoff", 1.0)
    ca._cached_elements.cache_clear()


# -- gram expectation ----------------------------------------------------------------


def test_gram_expectation_examples():
    alpha = 5.0
    m = operator_elements("onoff", alpha)
    val = gram_expectation([1, 0], m, [1, 0], alpha)
    assert abs(val - (1.0 - 2.0 * math.exp(-25.0))) < 1e-14
    # identity operator (the Gram matrix itself) on equal coefficients: norm^2
    g = gram_matrix(1.0)
    c = np.array([0.6, 0.8])
    assert gram_expectation(c, g, c, 1.0) == pytest.approx(gram_norm(c, 1.0) ** 2, abs=1e-14)


def test_gram_expectation_matches_oracle(rng):
    alpha, dim = 1.0, fock.default_dim(1.0)
    kets = (fock.coherent(alpha, dim).amplitudes, fock.coherent(-alpha, dim).amplitudes)
    op = fock.on_off_op(dim).matrix
    m = operator_elements("onoff", alpha)
    for _ in range(10):
        cb = rng.normal(size=2) + 1j * rng.normal(size=2)
        ck = rng.normal(size=2) + 1j * rng.normal(size=2)
        bra = cb[0] * kets[0] + cb[1] * kets[1]
        ket = ck[0] * kets[0] + ck[1] * kets[1]
        oracle = np.vdot(bra, op @ ket)
        assert abs(gram_expectation(cb, m, ck, alpha) - oracle) < 1e-8


def test_gram_expectation_rejects_degenerate():
    m = operator_elements("onoff", 1.0)
    with pytest.raises(ValueError):
        gram_expectation([0, 0], m, [1, 0], 1.0)
    with pytest.raises(ValueError):
        gram_expectation([1, 0], m, [1, 0], 0.01)
