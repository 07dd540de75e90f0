"""Closed-form and log-domain quantities in the two-ket basis {|a>, |-a>}.

The basis is nonorthogonal with overlap kappa = <a|-a> = e^{-2 a^2} (real a),
so norms and expectations carry the Gram matrix [[1, kappa], [kappa, 1]].
The series behind K(alpha) and the pseudo-spin Bloch vector overflow naive
arithmetic well below alpha = 20; they are summed entirely in the log domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import CertificationError

ORACLE_ALPHA_MAX = 3.0  # two-mode Fock oracles stay cheap below this
MIN_COEFF_ALPHA = 0.05  # Gram matrix conditioning floor for coefficient algebra

FAMILIES = ("onoff", "parity", "sx", "sy", "sz")


# -- signed log-domain scalars -------------------------------------------------


@dataclass(frozen=True)
class LogValue:
    """A real number stored as sign and natural log of magnitude."""

    sign: int
    log_magnitude: float

    @staticmethod
    def from_float(x: float) -> "LogValue":
        if x == 0.0:
            return LogValue(0, -math.inf)
        return LogValue(1 if x > 0 else -1, math.log(abs(x)))

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    def __mul__(self, other: "LogValue") -> "LogValue":
        if self.sign == 0 or other.sign == 0:
            return LogValue(0, -math.inf)
        return LogValue(self.sign * other.sign, self.log_magnitude + other.log_magnitude)

    def __add__(self, other: "LogValue") -> "LogValue":
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        hi, lo = self, other
        if lo.log_magnitude > hi.log_magnitude:
            hi, lo = lo, hi
        diff = lo.log_magnitude - hi.log_magnitude
        if hi.sign == lo.sign:
            return LogValue(hi.sign, hi.log_magnitude + math.log1p(math.exp(diff)))
        rest = -math.expm1(diff)  # 1 - exp(diff), exact near diff = 0
        if rest == 0.0:
            return LogValue(0, -math.inf)
        return LogValue(hi.sign, hi.log_magnitude + math.log(rest))

    def __neg__(self) -> "LogValue":
        return LogValue(-self.sign, self.log_magnitude)


# -- ECS bookkeeping -----------------------------------------------------------


@dataclass(frozen=True)
class EcsSpec:
    """Entangled coherent state N(|a>|-a> + sign |-a>|a>), real a > 0."""

    alpha: float
    sign: int

    def __post_init__(self):
        if self.sign not in (+1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")

    @property
    def kappa(self) -> float:
        return math.exp(-2.0 * self.alpha**2)

    @property
    def norm(self) -> float:
        return 1.0 / math.sqrt(2.0 * (1.0 + self.sign * math.exp(-4.0 * self.alpha**2)))

    def coefficient_tensor(self) -> np.ndarray:
        """2x2 coefficients C[x, y] over basis |x a> (x) |y a|, x,y in {+,-}."""
        c = np.zeros((2, 2), dtype=complex)
        c[0, 1] = self.norm
        c[1, 0] = self.sign * self.norm
        return c


def gram_matrix(alpha: float) -> np.ndarray:
    k = math.exp(-2.0 * alpha * alpha)
    return np.array([[1.0, k], [k, 1.0]])


def gram_norm(coeffs, alpha: float) -> float:
    c = np.asarray(coeffs, dtype=complex)
    val = float(np.real(c.conj() @ gram_matrix(alpha) @ c))
    return math.sqrt(max(val, 0.0))


def gram_expectation(coeffs_bra, elements: np.ndarray, coeffs_ket, alpha: float) -> complex:
    """Sesquilinear contraction bra_i* M[i,j] ket_j over the two-ket basis.

    Raises when either side has negligible Gram norm (the contraction would
    be meaningless once normalized downstream).
    """
    if alpha < MIN_COEFF_ALPHA:
        raise ValueError(f"coefficient algebra needs alpha >= {MIN_COEFF_ALPHA}")
    bra = np.asarray(coeffs_bra, dtype=complex)
    ket = np.asarray(coeffs_ket, dtype=complex)
    if gram_norm(bra, alpha) < 1e-12 or gram_norm(ket, alpha) < 1e-12:
        raise ValueError("coefficient vector has near-zero Gram norm")
    return complex(bra.conj() @ elements @ ket)


# -- log-domain series ---------------------------------------------------------


def _log_even_series(alpha: float) -> float:
    """log of S(a) = sum_n a^{4n} / ((2n)! sqrt(2n+1)).

    Terms evaluated in the log domain; the grid of n extends far enough past
    the peak (2n ~ a^2) that dropped terms sit > 60 nats below the maximum.
    """
    x = alpha * alpha
    peak = max(1.0, 0.5 * x)
    n_hi = int(peak + 12.0 * math.sqrt(peak + 4.0) + 80.0)
    n = np.arange(1, n_hi)
    log_terms = np.empty(n_hi)
    log_terms[0] = 0.0  # n = 0 term is exactly 1
    log_terms[1:] = (
        4.0 * n * math.log(alpha) - gammaln(2 * n + 1) - 0.5 * np.log(2 * n + 1)
    )
    return float(logsumexp(log_terms))


def _log_sinh(x: float) -> float:
    """log(sinh x) for x > 0 without overflow."""
    return x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0)


def kappa_K(alpha: float) -> float:
    """Pseudo-spin transverse correlation coefficient

        K(a) = (2 a^2 / sinh 2a^2) * S(a)^2,
        S(a) = sum_n a^{4n} / ((2n)! sqrt(2n+1)),

    evaluated fully in the log domain; K(0) = 1 by continuity.
    """
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if alpha < 1e-6:
        return 1.0
    x = alpha * alpha
    log_k = math.log(2.0) + 2.0 * math.log(alpha) - _log_sinh(2.0 * x) + 2.0 * _log_even_series(alpha)
    return float(math.exp(log_k))


def kappa_K_grid(alphas) -> np.ndarray:
    return np.array([kappa_K(a) for a in np.asarray(alphas, dtype=float)])


def pseudospin_bloch(alpha: float) -> np.ndarray:
    """Bloch vector m = <a| s |a> of a coherent state under pseudo-spin.

    m_x = 2 a e^{-a^2} S(a) (the s_+ and s_- expectations are equal for real
    a, so their symmetrized sum is twice the lowering-operator series),
    m_y = 0, and m_z = -e^{-2 a^2} since s_z is the photon-number parity.
    """
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if alpha == 0:
        return np.array([0.0, 0.0, -1.0])
    log_mx = math.log(2.0) + math.log(alpha) - alpha * alpha + _log_even_series(alpha)
    return np.array([math.exp(log_mx), 0.0, -math.exp(-2.0 * alpha * alpha)])


# -- coefficient maps ----------------------------------------------------------


def rotation_map(theta: float, phi: float) -> np.ndarray:
    """Asymptotic action of the displacement/Kerr composite on coefficients:
    |a>  -> sin(t/2)|a> + e^{-i p} cos(t/2)|-a>,
    |-a> -> e^{i p} cos(t/2)|a> - sin(t/2)|-a>.
    Columns are the images; the map is exactly unitary."""
    s, c = math.sin(0.5 * theta), math.cos(0.5 * theta)
    ph = np.exp(1j * phi)
    return np.array([[s, ph * c], [np.conj(ph) * c, -s]])


def pseudospin_map(theta: float, phi: float) -> np.ndarray:
    """Asymptotic action of u . s on coefficients for u = (theta, phi):
    |a>  -> sin t cos p |a> - (cos t - i sin t sin p)|-a>,
    |-a> -> -(cos t + i sin t sin p)|a> - sin t cos p |-a>.
    Hermitian, unitary, and involutory (a reflection).  The sign of the
    imaginary part follows the exact matrix elements of u . s between the
    coherent kets (certified against the Fock oracle in the tests)."""
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    return np.array(
        [
            [st * cp, -(ct + 1j * st * sp)],
            [-(ct - 1j * st * sp), -st * cp],
        ]
    )


# -- operator matrix elements ---------------------------------------------------


def _elements_uncertified(family: str, alpha: float) -> np.ndarray:
    k = math.exp(-2.0 * alpha * alpha)
    if family == "onoff":
        e = math.exp(-alpha * alpha)
        return np.array([[1.0 - 2.0 * e, k - 2.0 * e], [k - 2.0 * e, 1.0 - 2.0 * e]], dtype=complex)
    if family in ("parity", "sz"):
        return np.array([[-k, -1.0], [-1.0, -k]], dtype=complex)
    mx = pseudospin_bloch(alpha)[0]
    if family == "sx":
        return np.array([[mx, 0.0], [0.0, -mx]], dtype=complex)
    if family == "sy":
        return np.array([[0.0, -1j * mx], [1j * mx, 0.0]], dtype=complex)
    raise ValueError(f"unknown operator family {family!r}")


def _certify_elements(family: str, alpha: float, m: np.ndarray) -> None:
    from . import fock  # local import: fock never imports this module

    dim = fock.default_dim(alpha)
    kets = (fock.coherent(alpha, dim), fock.coherent(-alpha, dim))
    if family == "onoff":
        op = fock.on_off_op(dim)
    elif family in ("parity", "sz"):
        op = fock.parity_op(dim)
    else:
        _, sp, sm = fock.pseudo_spin_ops(dim)
        if family == "sx":
            op = fock.FockOperator(sp.matrix + sm.matrix)
        else:
            op = fock.FockOperator(-1j * (sp.matrix - sm.matrix))
    worst = 0.0
    for i in range(2):
        for j in range(2):
            oracle = complex(np.vdot(kets[i].amplitudes, op.matrix @ kets[j].amplitudes))
            worst = max(worst, abs(oracle - m[i, j]))
    if worst > 1e-8:
        raise CertificationError(
            f"operator elements {family!r} at alpha={alpha} deviate from the "
            f"Fock oracle by {worst:.3e}"
        )


@lru_cache(maxsize=4096)
def _cached_elements(family: str, alpha: float, certify: bool) -> np.ndarray:
    m = _elements_uncertified(family, alpha)
    if certify:
        _certify_elements(family, alpha, m)
    m.setflags(write=False)
    return m


def operator_elements(family: str, alpha: float, certify: bool | None = None) -> np.ndarray:
    """2x2 matrix M[x, y] = <x a|O|y a> for x, y in {+1, -1}.

    Families: onoff, parity, sx, sy, sz (sz equals parity).  Closed forms are
    certified at build time against the Fock oracle whenever alpha <= 3;
    results are cached per (family, alpha).
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown operator family {family!r}")
    if alpha < MIN_COEFF_ALPHA:
        raise ValueError(f"operator elements need alpha >= {MIN_COEFF_ALPHA}")
    if certify is None:
        certify = alpha <= ORACLE_ALPHA_MAX
    return _cached_elements(family, float(alpha), bool(certify))
