"""Grunsky and Milin coefficients, the Grunsky operator and its norm.

For ``f(z) = c z + b0 + b1/z + ...`` near infinity write ``u = 1/z``,
``v = 1/zeta``. Then

    (f(z) - f(zeta)) / (c (z - zeta)) = 1 - sum_{i,j>=1} (b_{i+j-1}/c) u**i v**j

and the table ``alpha_mn`` is the coefficient of ``u**m v**n`` in minus the
logarithm of this series. The logarithm is expanded in ``v`` with series
coefficients in ``u``.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .beltrami import BeltramiCoeff, moment
from .errors import AccuracyWarning, DomainError, NormalizationError, TruncationError
from .quadrature import DiskQuadrature
from .series import LaurentSeries, compose, revert

SIGN = 1
"""Global sign of the first-order variation: ``alpha_mn = SIGN/pi iint mu z**(m+n-2)``.

Fixed by matching the variation against the exact affine family
``z + b1/z`` (extension ``z + b1 conj(z)``, coefficient ``b1``), whose
table has ``alpha_11 = +b1``.
"""


@dataclass(frozen=True, eq=False)
class GrunskyTable:
    N: int
    alpha: np.ndarray
    source: str = ""

    def operator(self) -> "GrunskyOperator":
        return grunsky_operator(self)

    def to_dict(self) -> dict:
        return {"N": self.N, "source": self.source,
                "alpha": [[[float(a.real), float(a.imag)] for a in row] for row in self.alpha]}

    @classmethod
    def from_dict(cls, d: dict) -> "GrunskyTable":
        alpha = np.array([[complex(re, im) for re, im in row] for row in d["alpha"]], complex)
        return cls(int(d["N"]), alpha, d.get("source", ""))

    def to_csv(self) -> str:
        """Moduli ``|alpha_mn|`` as CSV rows ``m, n, abs``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "n", "abs_alpha"])
        for m in range(self.N):
            for n in range(self.N):
                w.writerow([m + 1, n + 1, f"{abs(self.alpha[m, n]):.15g}"])
        return buf.getvalue()


@dataclass(frozen=True, eq=False)
class GrunskyOperator:
    N: int
    beta: np.ndarray


class GrunskyNorm(NamedTuple):
    value: float
    N: int
    increment: float  # change against the order N-1 truncation


# --------------------------------------------------------------------------
# coefficient tables
# --------------------------------------------------------------------------

def _check_at_infinity(f: LaurentSeries) -> complex:
    if f.at != "inf" or f.k_max != 1 or f[1] == 0:
        raise DomainError("map must be expanded at infinity as c z + b0 + b1/z + ...")
    return f[1]


def _known_b(f: LaurentSeries) -> int | None:
    """Largest k with b_k known, None when all are known."""
    return None if f.exact else -f.k_min


def _log_table(f: LaurentSeries, N: int) -> np.ndarray:
    c = _check_at_infinity(f)
    known = _known_b(f)
    if known is not None and 2 * N - 1 > known:
        raise TruncationError(f"order N={N} needs b_k up to k={2 * N - 1}, series knows k<={known}",
                              max((known + 1) // 2, 0))
    b = np.array([f._get0(-k) for k in range(2 * N)], complex) / c  # b[k] = b_k / c
    # Q[j][i]: coefficient of u**i v**j, truncated at u-degree N
    Q = np.zeros((N + 1, N + 1), complex)
    for j in range(1, N + 1):
        for i in range(1, N + 1):
            Q[j, i] = -b[i + j - 1]
    L = np.zeros((N + 1, N + 1), complex)
    for n in range(1, N + 1):
        acc = -n * Q[n]
        for k in range(1, n):
            acc -= k * np.convolve(L[k], Q[n - k])[: N + 1]
        L[n] = acc / n
    return L[1:, 1:].T.copy()


def _symmetrize(a: np.ndarray) -> np.ndarray:
    return (a + a.T) / 2


def grunsky_coefficients(f: LaurentSeries, N: int) -> GrunskyTable:
    """``alpha_mn``, ``1 <= m, n <= N``, of ``-log((f(z) - f(zeta)) / (z - zeta))``."""
    if N < 1:
        raise DomainError("N must be positive")
    return GrunskyTable(N, _symmetrize(_log_table(f, N)), "grunsky")


def milin_coefficients(f: LaurentSeries, chi: LaurentSeries, N: int) -> GrunskyTable:
    """Coefficients of the same logarithm expanded in powers of ``1/chi(z)``, ``1/chi(zeta)``.

    With ``G = chi^{-1}`` and ``F = f o G`` the logarithm splits into the
    tables of ``F`` minus those of ``G``; the constant terms cancel.
    """
    if N < 1:
        raise DomainError("N must be positive")
    lead = _check_at_infinity(chi)
    if abs(lead.imag) > 1e-14 or lead.real <= 0:
        raise DomainError("chi must satisfy chi'(infinity) > 0")
    order = 2 * N + 1
    G = revert(chi, order)
    F = compose(f, G, order)
    alpha = _log_table(F, N) - _log_table(G, N)
    return GrunskyTable(N, _symmetrize(alpha), "milin")


def grunsky_operator(table: GrunskyTable) -> GrunskyOperator:
    k = np.sqrt(np.arange(1, table.N + 1, dtype=float))
    return GrunskyOperator(table.N, np.outer(k, k) * table.alpha)


# --------------------------------------------------------------------------
# norm
# --------------------------------------------------------------------------

def takagi_top(B: np.ndarray) -> tuple[float, np.ndarray]:
    """Largest singular value of a complex symmetric ``B`` and a unit ``x`` with ``x^T B x = sigma``.

    Uses the real symmetric embedding ``[[A, C], [C, -A]]`` of ``B = A + iC``,
    whose spectrum is ``+-sigma_i``; the top eigenvector ``[p; q]`` gives
    the maximizer ``p - iq`` (up to phase), stable under repeated singular values.
    """
    B = np.asarray(B, complex)
    n = len(B)
    if n == 0:
        return 0.0, np.zeros(0, complex)
    A, C = B.real, B.imag
    M = np.block([[A, C], [C, -A]])
    w, V = np.linalg.eigh((M + M.T) / 2)
    sigma = max(float(w[-1]), 0.0)
    p, q = V[:n, -1], V[n:, -1]
    best = None
    for x in (p - 1j * q, p + 1j * q):
        nx = np.linalg.norm(x)
        if nx == 0:
            continue
        x = x / nx
        val = x @ B @ x
        if best is None or abs(val) > abs(best[0]):
            best = (val, x)
    val, x = best
    if val != 0:
        x = x * np.exp(-0.5j * np.angle(val))
    return sigma, x


def _power_sigma(B: np.ndarray, tol: float = 1e-14, maxiter: int = 10000) -> float:
    rng = np.random.default_rng(0)
    x = rng.normal(size=len(B)) + 1j * rng.normal(size=len(B))
    x /= np.linalg.norm(x)
    s = 0.0
    for _ in range(maxiter):
        y = B.conj().T @ (B @ x)
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0
        x = y / ny
        s_new = np.sqrt(ny)
        if abs(s_new - s) <= tol * max(s_new, 1e-300):
            return float(s_new)
        s = s_new
    return float(s)


def _sigma(B: np.ndarray, method: str) -> float:
    if len(B) == 0:
        return 0.0
    if method == "power" or (method == "auto" and len(B) > 400):
        return _power_sigma(B)
    return takagi_top(B)[0]


def grunsky_norm(op: GrunskyOperator | GrunskyTable, method: str = "auto") -> GrunskyNorm:
    """``sup_{|x|=1} |sum beta_mn x_m x_n|`` for the truncated operator."""
    if isinstance(op, GrunskyTable):
        op = grunsky_operator(op)
    if method not in ("auto", "takagi", "power"):
        raise DomainError(f"unknown method {method!r}")
    value = _sigma(op.beta, method)
    prev = _sigma(op.beta[:-1, :-1], method) if op.N > 1 else 0.0
    return GrunskyNorm(value, op.N, value - prev)


def quadratic_form_h(op: GrunskyOperator | GrunskyTable, x) -> complex:
    """``h_x = sum sqrt(mn) alpha_mn x_m x_n`` for a unit vector ``x``."""
    if isinstance(op, GrunskyTable):
        op = grunsky_operator(op)
    x = np.asarray(x, complex)
    if x.shape != (op.N,):
        raise DomainError(f"x must have length {op.N}")
    if abs(np.linalg.norm(x) - 1) > 1e-10:
        raise NormalizationError("x must be a unit vector")
    return complex(x @ op.beta @ x)


# --------------------------------------------------------------------------
# first-order variation
# --------------------------------------------------------------------------

def grunsky_variation(mu: BeltramiCoeff, N: int, quad: DiskQuadrature | None = None,
                      rtol: float = 1e-6) -> GrunskyTable:
    """First-order table ``alpha_mn = SIGN/pi iint_D mu z**(m+n-2)``.

    Warns with :class:`AccuracyWarning` when the quadrature error estimate of
    any moment exceeds ``rtol`` times the largest moment.
    """
    if N < 1:
        raise DomainError("N must be positive")
    if mu.norm_inf >= 1:
        raise DomainError("coefficient must have sup norm < 1")
    moms = [moment(mu, p, quad) for p in range(2 * N - 1)]
    vals = np.array([m.value for m in moms], complex)
    err = max(m.error for m in moms)
    scale = max(np.max(np.abs(vals)), mu.norm_inf * np.pi * 1e-3)
    if err > rtol * scale:
        warnings.warn(f"quadrature error estimate {err:.3g} may spoil the variation at N={N}",
                      AccuracyWarning, stacklevel=2)
    i = np.arange(N)
    alpha = SIGN / np.pi * vals[i[:, None] + i[None, :]]
    return GrunskyTable(N, alpha, "variation")
