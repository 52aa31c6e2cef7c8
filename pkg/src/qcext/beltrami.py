"""Beltrami coefficients, quadratic differentials and their pairing on the unit disk.

A :class:`QuadDifferential` is a rational density ``num(z) / prod (z - p)**m``
kept in lowest terms. A :class:`BeltramiCoeff` is a bounded measurable
coefficient given in closed form (constant, Teichmueller form ``k|psi|/psi``,
monomial ``t |z|**(n+1) / z**(n+1)``), as samples on a polar mesh, or as a
plain callable with a declared sup norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, MissingDataError, NonIntegrableError
from .quadrature import DiskQuadrature, Estimate

_POLE_TOL = 1e-12


# --------------------------------------------------------------------------
# quadratic differentials
# --------------------------------------------------------------------------

def _polyval(c: np.ndarray, z):
    # ascending coefficients, Horner
    z = np.asarray(z, complex)
    out = np.zeros_like(z)
    for a in c[::-1]:
        out = out * z + a
    return out


def _poly_mul_linear(c: np.ndarray, p: complex, times: int = 1) -> np.ndarray:
    for _ in range(times):
        c = np.concatenate([[0j], c]) - p * np.concatenate([c, [0j]])
    return c


def _poly_div_linear(c: np.ndarray, p: complex) -> np.ndarray:
    """Quotient of ``c(z) / (z - p)``, remainder dropped."""
    n = len(c) - 1
    q = np.zeros(n, complex)
    acc = 0j
    for i in range(n, 0, -1):
        acc = c[i] + acc * p
        q[i - 1] = acc
    return q


def _trim_poly(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, complex)
    scale = np.max(np.abs(c)) if len(c) else 0.0
    nz = np.flatnonzero(np.abs(c) > 1e-15 * scale) if scale > 0 else []
    if len(nz) == 0:
        return np.zeros(1, complex)
    return c[: nz[-1] + 1].copy()


@dataclass(frozen=True, eq=False)
class QuadDifferential:
    """``num(z) / prod_j (z - p_j)**m_j`` with ``num`` in ascending powers."""

    num: np.ndarray
    poles: tuple[tuple[complex, int], ...] = ()
    _l1: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        num = _trim_poly(self.num)
        num.setflags(write=False)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "poles", tuple((complex(p), int(m)) for p, m in self.poles if m > 0))

    # constructors ------------------------------------------------------------

    @classmethod
    def polynomial(cls, coeffs: Iterable[complex]) -> "QuadDifferential":
        return cls(np.asarray(list(coeffs), complex))

    @classmethod
    def constant(cls, c: complex = 1.0) -> "QuadDifferential":
        return cls(np.array([c], complex))

    @classmethod
    def monomial(cls, p: int, c: complex = 1.0) -> "QuadDifferential":
        """``c z**p``; negative ``p`` gives a pole of order ``-p`` at 0."""
        if p >= 0:
            return cls(np.concatenate([np.zeros(p, complex), [c]]))
        return cls(np.array([c], complex), ((0j, -p),))

    @classmethod
    def rho(cls, e: complex) -> "QuadDifferential":
        """``(e - 1) / ((z - 1)(z - e))``: simple poles at 1 and ``e``."""
        e = complex(e)
        if abs(e - 1) < _POLE_TOL:
            raise DomainError("rho needs e != 1")
        return cls(np.array([e - 1], complex), ((1 + 0j, 1), (e, 1)))

    @classmethod
    def from_rational(cls, num: Iterable[complex], poles: Iterable[tuple[complex, int]]) -> "QuadDifferential":
        return cls(np.asarray(list(num), complex), tuple(poles))._simplified()

    @classmethod
    def zero(cls) -> "QuadDifferential":
        return cls(np.zeros(1, complex))

    # inspection ----------------------------------------------------------------

    @property
    def den(self) -> np.ndarray:
        d = np.ones(1, complex)
        for p, m in self.poles:
            d = _poly_mul_linear(d, p, m)
        return d

    def is_zero(self) -> bool:
        return not np.any(self.num != 0)

    def pole_points(self) -> list[complex]:
        return [p for p, _ in self.poles]

    def max_pole_order(self, radius: float = 1.0) -> int:
        """Highest pole order in the closed disk ``|z| <= radius``."""
        orders = [m for p, m in self.poles if abs(p) <= radius + _POLE_TOL]
        return max(orders, default=0)

    def monomial_form(self) -> tuple[int, complex] | None:
        """``(p, c)`` when this is ``c z**p``, else None."""
        nz = np.flatnonzero(self.num != 0)
        if len(nz) != 1:
            return None
        p = int(nz[0])
        if not self.poles:
            return p, complex(self.num[p])
        if len(self.poles) == 1 and abs(self.poles[0][0]) == 0 and p == 0:
            return -self.poles[0][1], complex(self.num[0])
        return None

    def __call__(self, z):
        z = np.asarray(z, complex)
        out = _polyval(self.num, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            for p, m in self.poles:
                out = out / (z - p) ** m
        return out

    # algebra ----------------------------------------------------------------------

    def _simplified(self) -> "QuadDifferential":
        num = _trim_poly(self.num)
        poles = []
        scale = max(np.max(np.abs(num)), 1e-300)
        for p, m in self.poles:
            while m > 0 and len(num) > 1 and abs(_polyval(num, p)) <= 1e-13 * scale * max(1, abs(p)) ** (len(num) - 1):
                num = _poly_div_linear(num, p)
                m -= 1
            if m > 0:
                poles.append((p, m))
        if not np.any(num != 0):
            poles = []
        return QuadDifferential(num, tuple(poles))

    def _combine(self, other: "QuadDifferential", a: complex, b: complex) -> "QuadDifferential":
        pts: list[complex] = []
        for p, _ in self.poles + other.poles:
            if not any(abs(p - q) < _POLE_TOL for q in pts):
                pts.append(p)

        def mult(qd, p):
            return sum(m for q, m in qd.poles if abs(q - p) < _POLE_TOL)

        lcm = [(p, max(mult(self, p), mult(other, p))) for p in pts]
        na, nb = self.num.astype(complex), other.num.astype(complex)
        for p, m in lcm:
            na = _poly_mul_linear(na, p, m - mult(self, p))
            nb = _poly_mul_linear(nb, p, m - mult(other, p))
        n = max(len(na), len(nb))
        pa, pb = a * np.pad(na, (0, n - len(na))), b * np.pad(nb, (0, n - len(nb)))
        num = pa + pb
        # cancellation down to rounding level means an exact zero
        if np.max(np.abs(num)) <= 1e-14 * max(np.max(np.abs(pa)), np.max(np.abs(pb))):
            return QuadDifferential.zero()
        return QuadDifferential(num, tuple(lcm))._simplified()

    def __add__(self, other):
        return self._combine(_as_qd(other), 1.0, 1.0)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(_as_qd(other), 1.0, -1.0)

    def __rsub__(self, other):
        return _as_qd(other)._combine(self, 1.0, -1.0)

    def __neg__(self):
        return QuadDifferential(-self.num, self.poles)

    def __mul__(self, s):
        if isinstance(s, QuadDifferential):
            return QuadDifferential(np.convolve(self.num, s.num), self.poles + s.poles)._merge()
        return QuadDifferential(self.num * complex(s), self.poles)

    __rmul__ = __mul__

    def _merge(self) -> "QuadDifferential":
        acc: list[list] = []
        for p, m in self.poles:
            for entry in acc:
                if abs(entry[0] - p) < _POLE_TOL:
                    entry[1] += m
                    break
            else:
                acc.append([p, m])
        return QuadDifferential(self.num, tuple((p, m) for p, m in acc))._simplified()

    def pullback_square(self) -> "QuadDifferential":
        """``4 psi(z**2) z**2``, the quadratic differential of the square-root pullback."""
        num = np.zeros(2 * len(self.num) + 1, complex)
        num[2::2] = 4 * self.num
        poles = []
        for p, m in self.poles:
            if p == 0:
                poles.append((0j, 2 * m))
            else:
                r = np.sqrt(p)
                poles += [(complex(r), m), (complex(-r), m)]
        return QuadDifferential(num, tuple(poles))._simplified()

    # serialization ---------------------------------------------------------------

    def to_dict(self) -> dict:
        pair = lambda c: [float(c.real), float(c.imag)]
        return {"num": [pair(c) for c in self.num],
                "den": [pair(c) for c in self.den],
                "poles": [[*pair(p), m] for p, m in self.poles]}

    @classmethod
    def from_dict(cls, d: dict) -> "QuadDifferential":
        num = [complex(re, im) for re, im in d["num"]]
        poles = [(complex(re, im), int(m)) for re, im, m in d.get("poles", [])]
        qd = cls(np.asarray(num, complex), tuple(poles))
        if "den" in d:
            den = np.asarray([complex(re, im) for re, im in d["den"]], complex)
            if len(den) != len(qd.den) or not np.allclose(den, qd.den, atol=1e-12):
                raise DomainError("den does not match the listed poles")
        return qd

    def __repr__(self) -> str:
        return f"QuadDifferential(num={np.round(self.num, 12)!r}, poles={self.poles!r})"


def _as_qd(x) -> QuadDifferential:
    if isinstance(x, QuadDifferential):
        return x
    return QuadDifferential.constant(complex(x))


# --------------------------------------------------------------------------
# Beltrami coefficients
# --------------------------------------------------------------------------

def _unimodular_power(z, q: int):
    """``|z|**q / z**q`` with value 0 at the origin."""
    z = np.asarray(z, complex)
    safe = np.where(z == 0, 1.0, z)
    u = np.abs(safe) / safe
    return np.where(z == 0, 0.0, u ** q)


@dataclass(frozen=True, eq=False)
class BeltramiCoeff:
    """Measurable coefficient supported on the unit disk (or on its exterior).

    ``form`` is one of constant, teichmueller, monomial, grid, function.
    """

    form: str
    params: dict
    norm_inf: float
    region: str = "disk"

    def __post_init__(self):
        if self.region not in ("disk", "exterior"):
            raise DomainError(f"unknown region {self.region!r}")
        if not self.norm_inf < 1:
            raise DomainError(f"Beltrami coefficient needs sup norm < 1, got {self.norm_inf}")

    # constructors -----------------------------------------------------------------

    @classmethod
    def constant(cls, c: complex, region: str = "disk") -> "BeltramiCoeff":
        return cls("constant", {"c": complex(c)}, abs(c), region)

    @classmethod
    def zero(cls) -> "BeltramiCoeff":
        return cls.constant(0.0)

    @classmethod
    def teichmueller(cls, psi: QuadDifferential, k: float, region: str = "disk") -> "BeltramiCoeff":
        if psi.is_zero():
            raise DomainError("Teichmueller form needs a nonzero quadratic differential")
        if k < 0:
            raise DomainError("k must be nonnegative")
        return cls("teichmueller", {"psi": psi, "k": float(k)}, float(k), region)

    @classmethod
    def monomial(cls, n: int, t: complex, region: str = "disk") -> "BeltramiCoeff":
        """``t |z|**(n+1) / z**(n+1)``."""
        return cls("monomial", {"n": int(n), "t": complex(t)}, abs(t), region)

    @classmethod
    def grid(cls, radii: Sequence[float], thetas: Sequence[float], values) -> "BeltramiCoeff":
        """Samples ``values[i, j]`` at ``radii[i] * exp(1j * thetas[j])``, bilinear in between."""
        radii = np.asarray(radii, float)
        thetas = np.asarray(thetas, float)
        values = np.asarray(values, complex)
        if values.shape != (len(radii), len(thetas)):
            raise DomainError("grid values must have shape (len(radii), len(thetas))")
        norm = float(np.max(np.abs(values))) if values.size else 0.0
        return cls("grid", {"radii": radii, "thetas": thetas, "values": values}, norm)

    @classmethod
    def function(cls, fn: Callable, norm_inf: float, region: str = "disk") -> "BeltramiCoeff":
        """Arbitrary callable; ``norm_inf`` is the caller's (upper) bound."""
        return cls("function", {"fn": fn}, float(norm_inf), region)

    # evaluation --------------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.norm_inf == 0

    def _raw(self, z: np.ndarray) -> np.ndarray:
        f = self.form
        if f == "constant":
            return np.full(z.shape, self.params["c"], complex)
        if f == "monomial":
            return self.params["t"] * _unimodular_power(z, self.params["n"] + 1)
        if f == "teichmueller":
            v = self.params["psi"](z)
            with np.errstate(invalid="ignore", divide="ignore"):
                out = self.params["k"] * np.abs(v) / v
            return np.where(np.isfinite(out), out, 0.0)
        if f == "grid":
            return self._interp(z)
        return np.asarray(self.params["fn"](z), complex)

    def _interp(self, z: np.ndarray) -> np.ndarray:
        r_nodes, th_nodes, vals = self.params["radii"], self.params["thetas"], self.params["values"]
        r = np.clip(np.abs(z), r_nodes[0], r_nodes[-1])
        th = np.mod(np.angle(z), 2 * np.pi)
        i = np.clip(np.searchsorted(r_nodes, r) - 1, 0, max(len(r_nodes) - 2, 0))
        if len(r_nodes) > 1:
            fr = (r - r_nodes[i]) / (r_nodes[i + 1] - r_nodes[i])
            i1 = i + 1
        else:
            fr, i1 = np.zeros_like(r), i
        # periodic in theta; thetas sorted within one period starting at thetas[0]
        n = len(th_nodes)
        ext = np.concatenate([th_nodes, [th_nodes[0] + 2 * np.pi]])
        th = np.mod(np.angle(z) - th_nodes[0], 2 * np.pi) + th_nodes[0]
        j = np.clip(np.searchsorted(ext, th, side="right") - 1, 0, n - 1)
        ft = (th - ext[j]) / (ext[j + 1] - ext[j])
        j1 = (j + 1) % n
        v = ((1 - fr) * ((1 - ft) * vals[i, j] + ft * vals[i, j1])
             + fr * ((1 - ft) * vals[i1, j] + ft * vals[i1, j1]))
        return v

    def __call__(self, z):
        z = np.asarray(z, complex)
        inside = np.abs(z) < 1 if self.region == "disk" else np.abs(z) > 1
        if self.is_zero():
            return np.zeros(z.shape, complex)
        return np.where(inside, self._raw(z), 0.0)

    def moment(self, p: int) -> complex | None:
        """Exact ``iint_D mu z**p dx dy`` for closed forms, None when unavailable."""
        if self.region != "disk" or p < 0:
            return None
        if self.form == "constant":
            return complex(np.pi * self.params["c"]) if p == 0 else 0j
        if self.form == "monomial":
            n, t = self.params["n"], self.params["t"]
            if n + 3 <= 0:
                return None
            return 2 * np.pi * t / (n + 3) if p == n + 1 else 0j
        return None

    def scaled(self, s: complex) -> "BeltramiCoeff":
        if self.form == "constant":
            return BeltramiCoeff.constant(self.params["c"] * s, self.region)
        if self.form == "monomial":
            return BeltramiCoeff.monomial(self.params["n"], self.params["t"] * s, self.region)
        return BeltramiCoeff.function(lambda z, f=self: s * f(z), self.norm_inf * abs(s), self.region)

    def poles(self) -> list[complex]:
        return self.params["psi"].pole_points() if self.form == "teichmueller" else []

    # serialization ----------------------------------------------------------------

    def to_dict(self) -> dict:
        pair = lambda c: [float(np.real(c)), float(np.imag(c))]
        d = {"form": self.form, "region": self.region}
        if self.form == "constant":
            d["c"] = pair(self.params["c"])
        elif self.form == "monomial":
            d.update(n=self.params["n"], t=pair(self.params["t"]))
        elif self.form == "teichmueller":
            d.update(psi=self.params["psi"].to_dict(), k=self.params["k"])
        elif self.form == "grid":
            d.update(radii=self.params["radii"].tolist(), thetas=self.params["thetas"].tolist(),
                     values=[[pair(v) for v in row] for row in self.params["values"]])
        else:
            raise DomainError("function-form coefficients are not serializable")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BeltramiCoeff":
        form, region = d["form"], d.get("region", "disk")
        if form == "constant":
            return cls.constant(complex(*d["c"]), region)
        if form == "monomial":
            return cls.monomial(int(d["n"]), complex(*d["t"]), region)
        if form == "teichmueller":
            return cls.teichmueller(QuadDifferential.from_dict(d["psi"]), float(d["k"]), region)
        if form == "grid":
            vals = np.array([[complex(*v) for v in row] for row in d["values"]], complex)
            return cls.grid(d["radii"], d["thetas"], vals)
        raise DomainError(f"unknown Beltrami form {form!r}")


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------

def _require_quad(quad: DiskQuadrature | None) -> DiskQuadrature:
    return quad if quad is not None else DiskQuadrature()


def l1_norm(psi: QuadDifferential, quad: DiskQuadrature | None = None) -> Estimate:
    """``iint_D |psi| dx dy`` with a coarse-grid error estimate."""
    quad = _require_quad(quad)
    if psi.max_pole_order() > 1:
        raise NonIntegrableError("quadratic differential has a pole of order > 1 in the closed disk")
    if psi.is_zero():
        return Estimate(0.0, 0.0)
    if quad not in psi._l1:
        est = quad.integrate(lambda z: np.abs(psi(z)), psi.pole_points())
        psi._l1[quad] = Estimate(float(np.real(est.value)), est.error)
    return psi._l1[quad]


def pairing(mu: BeltramiCoeff, psi: QuadDifferential, quad: DiskQuadrature | None = None) -> Estimate:
    """``<mu, psi>_D = iint_D mu psi dx dy``.

    Closed-form coefficients paired with polynomial densities use exact moments.
    """
    if mu.is_zero() or psi.is_zero():
        return Estimate(0j, 0.0)
    if not psi.poles and mu.region == "disk":
        moments = [mu.moment(p) for p in range(len(psi.num))]
        if all(m is not None for m in moments):
            return Estimate(complex(sum(c * m for c, m in zip(psi.num, moments))), 0.0)
    if psi.max_pole_order() > 1:
        raise NonIntegrableError("quadratic differential has a pole of order > 1 in the closed disk")
    quad = _require_quad(quad)
    poles = psi.pole_points() + mu.poles()
    return quad.integrate(lambda z: mu(z) * psi(z), poles)


def moment(mu: BeltramiCoeff, p: int, quad: DiskQuadrature | None = None) -> Estimate:
    """``iint_D mu z**p``, exact when the closed form allows it."""
    m = mu.moment(p)
    if m is not None:
        return Estimate(m, 0.0)
    if mu.is_zero():
        return Estimate(0j, 0.0)
    return _require_quad(quad).integrate(lambda z: mu(z) * z ** p, mu.poles())


@dataclass(frozen=True, eq=False)
class MapData:
    """A quasiconformal map ``w`` either affine (``z + nu conj(z)``) or sampled on a polar mesh."""

    nu: complex | None = None
    radii: np.ndarray | None = None
    thetas: np.ndarray | None = None
    values: np.ndarray | None = None
    dz: np.ndarray | None = None
    dzbar: np.ndarray | None = None

    @classmethod
    def affine(cls, nu: complex) -> "MapData":
        return cls(nu=complex(nu))

    @classmethod
    def samples(cls, radii, thetas, values, dz=None, dzbar=None) -> "MapData":
        arr = lambda a: None if a is None else np.asarray(a, complex)
        return cls(None, np.asarray(radii, float), np.asarray(thetas, float),
                   arr(values), arr(dz), arr(dzbar))

    @property
    def is_affine(self) -> bool:
        return self.nu is not None


def chain_rule(nu: BeltramiCoeff, mu: BeltramiCoeff, w_nu: MapData | None = None) -> BeltramiCoeff:
    """Coefficient of ``w^mu o w^nu``: ``(nu + mu*) / (1 + conj(nu) mu*)``.

    ``mu* = mu(w^nu) conj(dw^nu) / dw^nu``. Constant coefficients are read as
    whole-plane affine maps ``z + c conj(z)``, for which the composition is
    again affine.
    """
    if mu.is_zero():
        return nu
    if nu.is_zero():
        return mu
    if nu.form == "constant" and mu.form == "constant" and (w_nu is None or w_nu.is_affine):
        a, b = nu.params["c"], mu.params["c"]
        return BeltramiCoeff.constant((a + b) / (1 + np.conj(a) * b), nu.region)
    if w_nu is None:
        raise MissingDataError("chain rule for non-constant coefficients needs map data for w^nu")
    bound = (nu.norm_inf + mu.norm_inf) / (1 + nu.norm_inf * mu.norm_inf)
    if w_nu.is_affine:
        c = w_nu.nu

        def sigma(z, c=c, mu=mu, nu=nu):
            z = np.asarray(z, complex)
            ms = mu(z + c * np.conj(z))
            n = nu(z)
            return (n + ms) / (1 + np.conj(n) * ms)

        return BeltramiCoeff.function(sigma, bound, nu.region)
    if w_nu.values is None or w_nu.dz is None or w_nu.dzbar is None:
        raise MissingDataError("grid map data needs values and both derivative samples")
    dz, dzb = w_nu.dz, w_nu.dzbar
    if np.any(dz == 0):
        raise DomainError("map data has vanishing dz; not a sense-preserving qc map")
    n = dzb / dz
    ms = mu(w_nu.values) * np.conj(dz) / dz
    s = (n + ms) / (1 + np.conj(n) * ms)
    return BeltramiCoeff.grid(w_nu.radii, w_nu.thetas, s)


def teichmueller_form(psi: QuadDifferential, k: float) -> BeltramiCoeff:
    """``k |psi| / psi``, reduced to constant or monomial form when ``psi = c z**p``."""
    if not 0 <= k < 1:
        raise DomainError(f"Teichmueller form needs 0 <= k < 1, got {k}")
    if psi.is_zero():
        raise DomainError("quadratic differential is identically zero")
    if k == 0:
        return BeltramiCoeff.zero()
    mono = psi.monomial_form()
    if mono is not None:
        p, c = mono
        u = k * abs(c) / c
        return BeltramiCoeff.constant(u) if p == 0 else BeltramiCoeff.monomial(p - 1, u)
    return BeltramiCoeff.teichmueller(psi, k)


def pullback_r2(mu: BeltramiCoeff) -> BeltramiCoeff:
    """``mu(z**2) conj(z) / z``, the coefficient of the square-root conjugate map."""
    if mu.is_zero():
        return mu
    if mu.form == "constant":
        return BeltramiCoeff.monomial(1, mu.params["c"], mu.region)
    if mu.form == "monomial":
        return BeltramiCoeff.monomial(2 * mu.params["n"] + 3, mu.params["t"], mu.region)
    if mu.form == "teichmueller":
        return BeltramiCoeff.teichmueller(mu.params["psi"].pullback_square(), mu.params["k"], mu.region)

    def pulled(z, mu=mu):
        z = np.asarray(z, complex)
        return mu(z * z) * _unimodular_power(z, 2)

    return BeltramiCoeff.function(pulled, mu.norm_inf, mu.region)


class AlphaDResult(NamedTuple):
    value: float
    omega: np.ndarray  # ascending coefficients, normalized so that ||omega**2||_1 = 1
    error: float


def _takagi_top(B: np.ndarray) -> tuple[float, np.ndarray]:
    from .grunsky import takagi_top
    return takagi_top(B)


def alpha_D(mu: BeltramiCoeff, degree: int = 8, restarts: int = 32,
            quad: DiskQuadrature | None = None, *, method: str = "takagi",
            seed: int = 0) -> AlphaDResult:
    """Lower bound for ``sup |<mu/||mu||, omega**2>|`` over ``||omega**2||_1 = 1``.

    The sup runs over polynomials ``omega`` of degree at most ``degree``. With
    ``b_j = a_j sqrt(pi/(j+1))`` the ratio is ``|b^T B b| / |b|**2`` where
    ``B_jk = sqrt((j+1)(k+1)) / pi * iint mu z**(j+k)``, so the restricted sup
    is exactly the top singular value of ``B``. ``method="ascent"`` runs
    normalized-gradient ascent from ``restarts`` random starts instead.
    """
    if mu.is_zero():
        raise DomainError("alpha_D needs a nonzero coefficient")
    if degree < 0:
        raise DomainError("degree must be nonnegative")
    d = degree + 1
    mom = [moment(mu, p, quad) for p in range(2 * d - 1)]
    err = max(m.error for m in mom) / mu.norm_inf
    M = np.array([m.value for m in mom], complex) / mu.norm_inf
    j = np.arange(d)
    s = np.sqrt(j + 1.0)
    B = np.outer(s, s) * M[j[:, None] + j[None, :]] / np.pi
    if method == "takagi":
        val, b = _takagi_top(B)
    elif method == "ascent":
        val, b = _ascent(B, restarts, seed)
    else:
        raise DomainError(f"unknown alpha_D method {method!r}")
    a = b * np.sqrt((j + 1.0) / np.pi)
    return AlphaDResult(float(val), a, float(err * (d ** 2) / np.pi))


def _ascent(B: np.ndarray, restarts: int, seed: int, iters: int = 500) -> tuple[float, np.ndarray]:
    rng = np.random.default_rng(seed)
    step = 1.0 / max(np.linalg.norm(B, 2), 1e-300)
    best, best_b = -1.0, None
    for _ in range(max(restarts, 1)):
        b = rng.normal(size=len(B)) + 1j * rng.normal(size=len(B))
        b /= np.linalg.norm(b)
        for _ in range(iters):
            q = b @ B @ b
            phase = q / abs(q) if q != 0 else 1.0
            g = np.conj(np.conj(phase) * (B @ b))
            nb = b + step * g
            nb /= np.linalg.norm(nb)
            if np.linalg.norm(nb - b) < 1e-14:
                b = nb
                break
            b = nb
        v = abs(b @ B @ b)
        if v > best:
            best, best_b = v, b
    return best, best_b
