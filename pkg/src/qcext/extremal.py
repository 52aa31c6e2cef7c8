"""Distortion functionals: derivatives, sharp first-order bounds and L1 extremal problems.

The functional derivative of ``J(f) = J(f(a); f(z_j), f'(z_j), ...)`` at the
identity is the rational quadratic differential

    psi0(w) = dJ/domega g(w, a) + sum_{j,k} dJ/domega_{jk} d^k/dzeta^k g(w, zeta)|_{zeta = z_j}

with kernel ``g(w, zeta) = 1/(w - zeta) - 1/(w - p0)``, where ``p0 = 0``
(``fix0``, maps with ``f(0) = 0``) or ``p0 = 1`` (``fix1``, ``f(1) = 1``).
The ``k``-th derivative in ``zeta`` of ``1/(w - zeta)`` is ``k!/(w - zeta)**(k+1)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize

from .beltrami import BeltramiCoeff, QuadDifferential, l1_norm, teichmueller_form
from .errors import AccuracyWarning, DomainError, NonIntegrableError
from .qcmap import UnivalentMap, family_map
from .quadrature import DiskQuadrature


# --------------------------------------------------------------------------
# functionals
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FunctionalSpec:
    """Gradient data of a functional depending on ``f(a)`` and jets of ``f`` at ``z_j``.

    ``grad_points[j][k]`` is ``dJ/d f^{(k)}(z_j)``; ``M`` is the caller's bound
    for ``sup |J|`` over the class, needed only by :func:`kappa0`.
    """

    a: complex | None = None
    grad_a: complex = 0.0
    points: tuple[complex, ...] = ()
    grad_points: tuple[tuple[complex, ...], ...] = ()
    M: float | None = None
    normalization: str = "fix0"

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(complex(z) for z in self.points))
        object.__setattr__(self, "grad_points",
                           tuple(tuple(complex(g) for g in row) for row in self.grad_points))
        if self.normalization not in ("fix0", "fix1"):
            raise DomainError(f"unknown normalization {self.normalization!r}")
        if len(self.grad_points) != len(self.points):
            raise DomainError("grad_points needs one row per boundary point")
        if len(set(self.points)) != len(self.points):
            raise DomainError("boundary points must be distinct")
        if self.a is not None and complex(self.a) in self.points:
            raise DomainError("the interior point must differ from the boundary points")

    @classmethod
    def evaluation(cls, a: complex, M: float | None = None, normalization: str = "fix0",
                   scale: complex = 1.0) -> "FunctionalSpec":
        """``J(f) = scale * f(a)``."""
        return cls(a=complex(a), grad_a=complex(scale), M=M, normalization=normalization)

    def to_dict(self) -> dict:
        pair = lambda c: [float(c.real), float(c.imag)]
        return {"a": None if self.a is None else pair(complex(self.a)),
                "grad_a": pair(complex(self.grad_a)),
                "points": [pair(z) for z in self.points],
                "grad_points": [[pair(g) for g in row] for row in self.grad_points],
                "M": self.M, "normalization": self.normalization}

    @classmethod
    def from_dict(cls, d: dict) -> "FunctionalSpec":
        c = lambda p: complex(p[0], p[1])
        return cls(None if d.get("a") is None else c(d["a"]), c(d.get("grad_a", [0, 0])),
                   tuple(c(z) for z in d.get("points", [])),
                   tuple(tuple(c(g) for g in row) for row in d.get("grad_points", [])),
                   d.get("M"), d.get("normalization", "fix0"))


def _simple_pole(p: complex, order: int = 1, c: complex = 1.0) -> QuadDifferential:
    return QuadDifferential(np.array([c], complex), ((complex(p), order),))


def functional_derivative(spec: FunctionalSpec) -> QuadDifferential:
    """The rational density ``psi0`` of the functional's derivative at the identity."""
    p0 = 0j if spec.normalization == "fix0" else 1 + 0j
    has_a = spec.a is not None and spec.grad_a != 0
    if not has_a and not any(g != 0 for row in spec.grad_points for g in row):
        raise DomainError("functional gradient is zero")
    psi = QuadDifferential.zero()
    if has_a:
        a = complex(spec.a)
        if not abs(a) < 1:
            raise DomainError("interior point must satisfy |a| < 1; boundary points are excluded")
        psi = psi + spec.grad_a * (_simple_pole(a) - _simple_pole(p0))
    for z, row in zip(spec.points, spec.grad_points):
        if not abs(z) > 1:
            raise DomainError(f"point {z} must lie outside the closed unit disk")
        for k, g in enumerate(row):
            if g == 0:
                continue
            term = _simple_pole(z, k + 1, math.factorial(k))
            if k == 0:
                term = term - _simple_pole(p0)
            psi = psi + g * term
    if psi.is_zero():
        raise DomainError("functional derivative vanishes identically")
    return psi


class DistortionBound(NamedTuple):
    value: float
    error: float
    extremal: BeltramiCoeff
    psi0: QuadDifferential


def kappa0_formula(norm_derivative: float, M: float) -> float:
    """``||J'|| / (||J'|| + M + 1)``."""
    return norm_derivative / (norm_derivative + M + 1)


def kappa0(spec: FunctionalSpec, quad: DiskQuadrature | None = None) -> float:
    """Lower bound for the range of ``kappa`` where the sharp bound holds."""
    if spec.M is None:
        raise DomainError("kappa0 needs a caller-supplied bound M = sup |J| over the class")
    if spec.M < 0:
        raise DomainError("M must be nonnegative")
    norm = l1_norm(functional_derivative(spec), quad).value / np.pi
    return kappa0_formula(norm, spec.M)


def distortion_bound(spec: FunctionalSpec, kappa: float,
                     quad: DiskQuadrature | None = None) -> DistortionBound:
    """``(kappa/pi) ||psi0||_1`` and the extremal direction ``kappa |psi0|/psi0``."""
    if not 0 <= kappa < 1:
        raise DomainError(f"kappa must satisfy 0 <= kappa < 1, got {kappa}")
    psi0 = functional_derivative(spec)
    est = l1_norm(psi0, quad)
    if spec.M is not None and kappa > kappa0(spec, quad):
        warnings.warn(f"kappa={kappa} exceeds kappa0={kappa0(spec, quad):.6g}; "
                      "the bound is not guaranteed to be sharp", AccuracyWarning, stacklevel=2)
    return DistortionBound(kappa / np.pi * est.value, kappa / np.pi * est.error,
                           teichmueller_form(psi0, kappa), psi0)


# --------------------------------------------------------------------------
# L1 distance to a span of rational functions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SpanBasis:
    """Fixed points ``e_s`` in the disk and the functions ``(e_s - 1)/((z - 1)(z - e_s))``."""

    points: tuple[complex, ...] = ()

    def __post_init__(self):
        pts = tuple(complex(e) for e in self.points)
        object.__setattr__(self, "points", pts)
        for e in pts:
            if not abs(e) < 1:
                raise DomainError(f"fixed point {e} must lie in the unit disk")
        if len(set(pts)) != len(pts):
            raise DomainError("fixed points must be distinct")

    def __len__(self) -> int:
        return len(self.points)

    def basis(self) -> list[QuadDifferential]:
        return [QuadDifferential.rho(e) for e in self.points]

    def poles(self) -> list[complex]:
        return ([1 + 0j] if self.points else []) + list(self.points)

    @staticmethod
    def omega(p: int, psi0: QuadDifferential) -> QuadDifferential:
        """``z**p - 1 - psi0``, the companion family for the unit disk itself."""
        return QuadDifferential.monomial(p) - 1 - psi0


class L1Result(NamedTuple):
    d: float
    coeffs: np.ndarray
    psi_e: QuadDifferential
    certified: bool
    residuals: np.ndarray  # |<nu, rho_s>| for each s, then |<nu, psi0> - d|
    error: float


class _L1Program:
    """Discretized ``min_xi sum w |P0 + R xi| - offset`` with optional finite-part subtraction."""

    def __init__(self, w, P0, R, subtract_abs: bool, const: float):
        self.w, self.P0, self.R = w, P0, R
        self.sub = subtract_abs
        self.const = const
        self.absP0 = np.abs(P0)

    def _terms(self, r):
        if not self.sub:
            return np.abs(r)
        # |P0 + phi| - |P0| without cancellation
        phi = r - self.P0
        num = np.abs(phi) ** 2 + 2 * np.real(np.conj(self.P0) * phi)
        return num / (np.abs(r) + self.absP0)

    def residual(self, xi):
        return self.P0 + self.R @ xi

    def value(self, xi) -> float:
        return float(np.dot(self.w, self._terms(self.residual(xi)))) + self.const

    def sign(self, xi):
        r = self.residual(xi)
        a = np.abs(r)
        return np.where(a > 0, np.conj(r) / np.where(a > 0, a, 1.0), 0.0)

    def duality(self, xi, d: float) -> np.ndarray:
        nu = self.sign(xi)
        res = [abs(np.dot(self.w, nu * self.R[:, s])) for s in range(self.R.shape[1])]
        pair = nu * self.P0
        if self.sub:
            pair = pair - self.absP0
        res.append(abs(np.dot(self.w, pair) + self.const - d))
        return np.array(res)

    def irls(self, xi, iters: int = 200):
        best, best_v = xi, self.value(xi)
        scale = max(float(np.max(np.abs(self.P0))), 1.0)
        delta = 1e-6 * scale
        for _ in range(iters):
            r = self.residual(best)
            omega = self.w / np.maximum(np.abs(r), delta)
            A = (self.R.conj().T * omega) @ self.R
            b = -(self.R.conj().T * omega) @ self.P0
            try:
                cand = np.linalg.solve(A, b)
            except np.linalg.LinAlgError:
                break
            v = self.value(cand)
            if v < best_v - 1e-15 * abs(best_v):
                best, best_v = cand, v
            else:
                delta *= 0.1
                if delta < 1e-14 * scale:
                    break
        return best


def _solve_l1(prog: _L1Program, m: int, restarts: int, seed: int):
    if m == 0:
        return np.zeros(0, complex)
    # weighted least squares start
    sw = np.sqrt(prog.w)
    xi0 = np.linalg.lstsq(prog.R * sw[:, None], -prog.P0 * sw, rcond=None)[0]
    rng = np.random.default_rng(seed)
    to_real = lambda z: np.concatenate([z.real, z.imag])
    to_cplx = lambda x: x[:m] + 1j * x[m:]
    scale = max(1.0, float(np.max(np.abs(xi0))))
    candidates = []
    for i in range(max(restarts, 1)):
        start = xi0 if i == 0 else xi0 + scale * (rng.normal(size=m) + 1j * rng.normal(size=m))
        res = minimize(lambda x: prog.value(to_cplx(x)), to_real(start), method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000 * m,
                                "maxfev": 8000 * m, "adaptive": m > 2})
        xi = prog.irls(to_cplx(res.x))
        candidates.append((prog.value(xi), tuple(np.round(to_real(xi), 12)), xi))
    candidates.sort(key=lambda c: (c[0], c[1]))
    return candidates[0][2]


def _psi_e(psi0: QuadDifferential, basis: Sequence[QuadDifferential], xi) -> QuadDifferential:
    out = psi0
    for c, rho in zip(xi, basis):
        out = out + complex(c) * rho
    return out


def l1_distance_to_span(psi0: QuadDifferential, e: SpanBasis, quad: DiskQuadrature | None = None,
                        *, restarts: int = 8, seed: int = 0, tol: float = 1e-3) -> L1Result:
    """``d = min_xi || psi0 + sum xi_s rho_s ||_1`` with duality certificate.

    ``certified`` is set when every residual of the optimality conditions
    ``<nu, rho_s> = 0`` and ``<nu, psi0> = d`` (``nu = |psi_e|/psi_e``) is below ``tol``.
    """
    quad = quad or DiskQuadrature()
    if psi0.max_pole_order() > 1:
        raise NonIntegrableError("psi0 has a pole of order > 1 in the closed disk")
    basis = e.basis()
    poles = list(psi0.pole_points()) + e.poles()

    def program(q: DiskQuadrature) -> _L1Program:
        rule = q.rule(poles)
        R = np.stack([b(rule.nodes) for b in basis], axis=1) if basis else np.zeros((len(rule), 0))
        return _L1Program(rule.weights, psi0(rule.nodes), R, False, 0.0)

    prog = program(quad)
    xi = _solve_l1(prog, len(basis), restarts, seed)
    d = prog.value(xi)
    err = abs(d - program(quad.coarse()).value(xi))
    psi_e = _psi_e(psi0, basis, xi)
    norm0 = max(prog.value(np.zeros(len(basis), complex)), 1e-300)
    if psi_e.is_zero() or d <= 1e-10 * norm0:
        return L1Result(0.0 if psi_e.is_zero() else d, xi, psi_e, True,
                        np.zeros(len(basis) + 1), err)
    residuals = prog.duality(xi, d)
    return L1Result(d, xi, psi_e, bool(np.all(residuals <= tol)), residuals, err)


# --------------------------------------------------------------------------
# coefficient problems
# --------------------------------------------------------------------------

class CoefficientExtremal(NamedTuple):
    bound: float
    extremal: UnivalentMap
    valid_range: float


def coefficient_extremal(n: int, kappa: float, order: int | None = None) -> CoefficientExtremal:
    """Sharp bound ``2 kappa/(n-1)`` for ``|a_n|`` and its extremal map.

    For ``n >= 3`` the bound holds for ``kappa <= 1/(n**2 + 1)``; for ``n = 2``
    it holds for every ``kappa < 1``.
    """
    if n < 2:
        raise DomainError("n must be at least 2")
    if not 0 < kappa < 1:
        raise DomainError("kappa must satisfy 0 < kappa < 1")
    order = order if order is not None else max(2 * n, 16)
    if n == 2:
        return CoefficientExtremal(2 * kappa, family_map("koebe", t=kappa, order=order), 1.0)
    return CoefficientExtremal(2 * kappa / (n - 1),
                               family_map("powered_koebe", n=n, t=kappa, order=order),
                               1 / (n ** 2 + 1))


class KappaBounds(NamedTuple):
    lower: float
    upper: float
    linear_at_lower: float  # 2 kappa/(n-1) at kappa = lower
    koebe_at_lower: float  # n kappa**(n-1) at kappa = lower


def kappa_n_bounds(n: int) -> KappaBounds:
    """``1/(n**2+1) <= kappa_n < (2/(n(n-1)))**(1/(n-2))``."""
    if n < 3:
        raise DomainError("the sandwich needs n >= 3")
    lo = 1 / (n ** 2 + 1)
    hi = (2 / (n * (n - 1))) ** (1 / (n - 2))
    return KappaBounds(lo, hi, 2 * lo / (n - 1), n * lo ** (n - 1))


class ConstrainedExtremal(NamedTuple):
    d_n: float
    psi_n: QuadDifferential
    bound: float  # d_n * kappa, accurate to first order in kappa
    certified: bool
    residuals: np.ndarray
    error: float


CUTOFF = 1e-4


def coefficient_extremal_constrained(n: int, e: SpanBasis, kappa: float,
                                     quad: DiskQuadrature | None = None, *,
                                     restarts: int = 8, seed: int = 0, tol: float = 1e-3,
                                     cutoff: float = CUTOFF) -> ConstrainedExtremal:
    """First-order bound for ``|a_n|`` over maps fixing the points ``e``.

    ``z**(-n-1)`` is not integrable at 0, so ``||z**(-n-1) + psi||_1`` is read
    as a Hadamard finite part: the annulus ``cutoff < |z| < 1`` integral of
    ``|z**(-n-1) + psi| - |z|**(-n-1)`` plus ``2 pi / (1 - n)``, the finite
    part of ``iint |z|**(-n-1)``. The cutoff error is O(cutoff**2) and is
    removed by one Richardson step against ``2 * cutoff``. Values may be negative.
    """
    if n < 2:
        raise DomainError("n must be at least 2")
    if not 0 <= kappa < 1:
        raise DomainError("kappa must satisfy 0 <= kappa < 1")
    if any(abs(p) < 1e-14 for p in e.points):
        raise DomainError("fixed points must differ from the origin")
    if len(e) == 0:
        raise NonIntegrableError("z**(-n-1) has a pole of order n+1 at 0; an empty span cannot be integrated")
    quad = quad or DiskQuadrature()
    q = n + 1
    psi0 = QuadDifferential.monomial(-q)
    basis = e.basis()
    poles = e.poles()
    fp_const = 2 * np.pi / (2 - q)

    def program(qd: DiskQuadrature, eps: float) -> _L1Program:
        rule = qd.rule(poles, inner_radius=eps)
        R = np.stack([b(rule.nodes) for b in basis], axis=1)
        return _L1Program(rule.weights, psi0(rule.nodes), R, True, fp_const)

    prog = program(quad, cutoff)
    xi = _solve_l1(prog, len(basis), restarts, seed)
    v1 = prog.value(xi)
    v2 = program(quad, 2 * cutoff).value(xi)
    d = (4 * v1 - v2) / 3
    err = abs(v1 - v2) / 3 + abs(v1 - program(quad.coarse(), cutoff).value(xi))
    residuals = prog.duality(xi, v1)
    psi_n = _psi_e(psi0, basis, xi)
    return ConstrainedExtremal(float(d), psi_n, float(d * kappa),
                               bool(np.all(residuals <= tol)), residuals, float(err))
