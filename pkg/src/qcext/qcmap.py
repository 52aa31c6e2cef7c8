"""Univalent maps with quasiconformal extension.

Two normalizations are used. ``"sigma"`` maps live on ``|z| > 1`` as
``z + b0 + b1/z + ...`` with the extension on the disk; ``"S"`` maps live on
``|z| < 1`` as ``z + a2 z**2 + ...`` with the extension on ``|z| > 1``.
Exact series exist only for the closed-form families; a general coefficient
is handled to first order by :func:`first_order_map`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .beltrami import BeltramiCoeff, _unimodular_power, moment
from .errors import AccuracyWarning, DomainError
from .grunsky import SIGN
from .quadrature import DiskQuadrature, Estimate
from .series import DEFAULT_ORDER, LaurentSeries, algebra, compose


@dataclass(frozen=True, eq=False)
class UnivalentMap:
    series: LaurentSeries
    normalization: str = "sigma"
    extension: BeltramiCoeff | None = None
    family_tag: str = ""
    first_order_only: bool = False

    def __post_init__(self):
        s = self.series
        if self.normalization == "sigma":
            if s.at != "inf" or s.k_max != 1 or abs(s[1] - 1) > 1e-12:
                raise DomainError("sigma normalization needs z + b0 + b1/z + ... at infinity")
        elif self.normalization == "S":
            if s.at != "zero" or s.k_min < 0 or abs(s._get0(0)) > 1e-14 or abs(s[1] - 1) > 1e-12:
                raise DomainError("S normalization needs z + a2 z**2 + ... at zero")
        else:
            raise DomainError(f"unknown normalization {self.normalization!r}")

    @property
    def k(self) -> float | None:
        return None if self.extension is None else self.extension.norm_inf

    def to_dict(self) -> dict:
        return {"normalization": self.normalization,
                "series": self.series.to_dict(),
                "extension": None if self.extension is None else self.extension.to_dict(),
                "family_tag": self.family_tag,
                "first_order_only": self.first_order_only}

    @classmethod
    def from_dict(cls, d: dict) -> "UnivalentMap":
        ext = d.get("extension")
        return cls(LaurentSeries.from_dict(d["series"]), d.get("normalization", "sigma"),
                   None if ext is None else BeltramiCoeff.from_dict(ext),
                   d.get("family_tag", ""), bool(d.get("first_order_only", False)))


def _check_unit(name: str, v: complex) -> None:
    if not abs(v) < 1:
        raise DomainError(f"{name} must lie in the unit disk, got {v}")


def koebe_series(t: complex, order: int = DEFAULT_ORDER) -> LaurentSeries:
    """``z / (1 - t z)**2`` at zero, through ``z**order``."""
    one_minus = LaurentSeries.from_coeffs([1.0, -t], 0, exact=True)
    return algebra("div", LaurentSeries.identity(), one_minus * one_minus, order=order)


def powered_koebe_series(n: int, t: complex, order: int = DEFAULT_ORDER) -> LaurentSeries:
    """``f_{1,t}(z**(n-1))**(1/(n-1)) = z + 2t/(n-1) z**n + ...`` through ``z**order``."""
    p = n - 1
    # enough terms of f_{1,t} for the root to reach z**order
    base = koebe_series(t, order // p + 2)
    inner = compose(base, LaurentSeries.monomial(p, 1.0), order)
    return algebra("pow", inner, r=Fraction(1, p), order=order).truncate(order)


def family_map(kind: str, *, b1: complex | None = None, t: complex | None = None,
               n: int | None = None, order: int = DEFAULT_ORDER,
               quad: DiskQuadrature | None = None) -> UnivalentMap:
    """Closed-form families: affine, koebe, powered_koebe, monomial_extension."""
    if kind == "affine":
        if b1 is None:
            raise DomainError("affine family needs b1")
        _check_unit("b1", b1)
        return UnivalentMap(LaurentSeries.hydrodynamic([0.0, b1]), "sigma",
                            BeltramiCoeff.constant(b1), f"affine(b1={b1})")
    if t is None:
        raise DomainError(f"{kind} family needs t")
    _check_unit("t", t)
    if kind == "koebe":
        return UnivalentMap(koebe_series(t, order), "S",
                            BeltramiCoeff.monomial(2, t, region="exterior"), f"koebe(t={t})")
    if kind == "powered_koebe":
        if n is None or n < 2:
            raise DomainError("powered_koebe needs n >= 2")
        return UnivalentMap(powered_koebe_series(n, t, order), "S",
                            BeltramiCoeff.monomial(n, t, region="exterior"),
                            f"powered_koebe(n={n}, t={t})")
    if kind == "monomial_extension":
        if n is None:
            raise DomainError("monomial_extension needs n")
        mu = BeltramiCoeff.monomial(n, t)
        return UnivalentMap(first_order_map(mu, quad, order), "sigma", mu,
                            f"monomial_extension(n={n}, t={t})", first_order_only=True)
    raise DomainError(f"unknown family {kind!r}")


def _b0(mu: BeltramiCoeff, normalization: str, quad: DiskQuadrature | None) -> Estimate:
    # fix0: (1/pi) iint mu / w ; fix1: (1/pi) iint mu / (w - 1)
    if mu.is_zero():
        return Estimate(0j, 0.0)
    if normalization == "fix0":
        if mu.form in ("constant", "monomial") and mu.region == "disk":
            return Estimate(0j, 0.0)  # angular integral of a pure frequency
        q = quad or DiskQuadrature()
        return q.integrate(lambda w: mu(w) / w, [0j] + mu.poles())
    if normalization == "fix1":
        # 1/(w-1) = -sum w**j inside the disk; closed forms hit one moment only
        if mu.region == "disk" and mu.form == "constant":
            return Estimate(-np.pi * mu.params["c"], 0.0)
        if mu.region == "disk" and mu.form == "monomial" and mu.params["n"] >= -1:
            return Estimate(-mu.moment(mu.params["n"] + 1), 0.0)
        q = quad or DiskQuadrature()
        return q.integrate(lambda w: mu(w) / (w - 1), [1 + 0j] + mu.poles())
    raise DomainError(f"unknown normalization {normalization!r}")


def first_order_map(mu: BeltramiCoeff, quad: DiskQuadrature | None = None,
                    order: int = 16, normalization: str = "fix0",
                    rtol: float = 1e-6) -> LaurentSeries:
    """First-order map ``z + b0 + b1/z + ... + b_order/z**order`` on ``|z| > 1``.

    ``b_k = SIGN/pi iint mu w**(k-1)`` for ``k >= 1``; ``b0`` keeps ``f(0) = 0``
    (``fix0``) or ``f(1) = 1`` (``fix1``).
    """
    if mu.region != "disk":
        raise DomainError("first-order map needs a coefficient supported on the disk")
    if order < 1:
        raise DomainError("order must be positive")
    est = [_b0(mu, normalization, quad)] + [moment(mu, k - 1, quad) for k in range(1, order + 1)]
    b = np.array([e.value for e in est], complex) * SIGN / np.pi
    err = max(e.error for e in est) / np.pi
    if err > rtol * max(np.max(np.abs(b)), mu.norm_inf * 1e-3):
        warnings.warn(f"quadrature error estimate {err:.3g} in first-order coefficients",
                      AccuracyWarning, stacklevel=2)
    return LaurentSeries.hydrodynamic(b, exact=False)


def taylor_coefficient(f: UnivalentMap | LaurentSeries, n: int) -> complex:
    """``a_n`` for S-normalized maps, ``b_n`` for sigma-normalized ones."""
    s = f.series if isinstance(f, UnivalentMap) else f
    return s[n] if s.at == "zero" else s[-n]


def to_sigma(f: UnivalentMap, order: int | None = None) -> UnivalentMap:
    """Conjugate an S-normalized map by ``1/z``: ``F(zeta) = 1/f(1/zeta)``.

    The extension transforms as ``mu(1/zeta) zeta**2 / conj(zeta)**2``.
    """
    if f.normalization == "sigma":
        return f
    s = f.series
    flipped = LaurentSeries(-s.k_max, -s.k_min, s.coeffs[::-1], "inf", s.exact)
    order = order if order is not None else (s.k_max if not s.exact else DEFAULT_ORDER)
    F = algebra("div", LaurentSeries.monomial(0, 1.0, "inf"), flipped, order=order)
    ext = f.extension
    if ext is not None:
        if ext.form == "monomial" and ext.region == "exterior":
            ext = BeltramiCoeff.monomial(-ext.params["n"] - 6, ext.params["t"])
        elif ext.form == "constant" and ext.region == "exterior":
            ext = BeltramiCoeff.monomial(-5, ext.params["c"])
        else:
            ext = BeltramiCoeff.function(
                lambda z, e=ext: e(1 / np.asarray(z, complex)) * _unimodular_power(z, -4),
                ext.norm_inf)
    return UnivalentMap(F, "sigma", ext, f"sigma({f.family_tag})", f.first_order_only)
