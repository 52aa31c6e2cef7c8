"""Truncated Laurent series with complex coefficients.

A :class:`LaurentSeries` holds the coefficients ``c_k`` of ``sum c_k z**k`` on an
exponent window ``k_min..k_max`` together with its expansion point, either
``"zero"`` or ``"inf"``. The window end facing away from the expansion point is
the truncation edge: for a series at ``0`` the terms above ``k_max`` are
unknown, for a series at infinity the terms below ``k_min`` are unknown. A
series flagged ``exact`` is a Laurent polynomial, all terms outside the window
being zero.

Internally every operation works in the local variable ``x`` (``x = z`` at
zero, ``x = 1/z`` at infinity), where a series is ``x**val * (c0 + c1 x + ...)``
known modulo ``O(x**prec)``. Results keep ``prec`` as the minimum supported by
the operands, so truncation never silently grows.

Branches of ``log``, ``sqrt`` and fractional powers are fixed by the principal
value at the leading coefficient::

    sqrt(c x**v (1 + h)) = sqrt(c) x**(v/2) (1 + h)**(1/2)

with ``sqrt(c)`` from :func:`cmath.sqrt`.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal

import numpy as np

from .errors import DomainError, NotInvertibleError, SingularSeriesError, TruncationError

Point = Literal["zero", "inf"]

DEFAULT_ORDER = 32
"""Number of terms produced when an exact input yields an infinite expansion."""

MAX_TERMS = 4096


# --------------------------------------------------------------------------
# local representation
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class _Local:
    """``x**val * sum c[i] x**i`` known modulo ``O(x**prec)``; prec None = exact."""

    val: int
    c: np.ndarray
    prec: int | None

    @property
    def top(self) -> int:
        return self.val + len(self.c)

    def coeff(self, e: int) -> complex:
        i = e - self.val
        if 0 <= i < len(self.c):
            return self.c[i]
        return 0j


def _trim(val: int, c: np.ndarray, prec: int | None) -> _Local:
    if prec is not None:
        n = max(prec - val, 0)
        if len(c) > n:
            c = c[:n]
        elif len(c) < n:
            c = np.concatenate([c, np.zeros(n - len(c), complex)])
    if len(c) > MAX_TERMS:
        raise TruncationError(f"series window exceeds {MAX_TERMS} terms", MAX_TERMS)
    return _Local(val, np.asarray(c, complex), prec)


def _min_prec(*ps: int | None) -> int | None:
    finite = [p for p in ps if p is not None]
    return min(finite) if finite else None


def _add(a: _Local, b: _Local) -> _Local:
    val = min(a.val, b.val)
    prec = _min_prec(a.prec, b.prec)
    top = max(a.top, b.top)
    if prec is not None:
        top = min(top, prec)
    n = max(top - val, 0)
    c = np.zeros(n, complex)
    for s in (a, b):
        lo = s.val - val
        m = min(len(s.c), n - lo)
        if m > 0:
            c[lo:lo + m] += s.c[:m]
    return _trim(val, c, prec)


def _scale(a: _Local, s: complex) -> _Local:
    return _Local(a.val, a.c * s, a.prec)


def _mul(a: _Local, b: _Local) -> _Local:
    val = a.val + b.val
    prec = _min_prec(
        None if b.prec is None else a.val + b.prec,
        None if a.prec is None else b.val + a.prec,
    )
    if len(a.c) == 0 or len(b.c) == 0:
        return _trim(val, np.zeros(0, complex), prec)
    c = np.convolve(a.c, b.c)
    return _trim(val, c, prec)


def _strip(a: _Local) -> _Local:
    """Drop exact leading zeros; each dropped term costs one term of precision."""
    nz = np.flatnonzero(a.c)
    if len(nz) == 0:
        raise SingularSeriesError("series is identically zero to working order")
    k = int(nz[0])
    return _Local(a.val + k, a.c[k:], a.prec)


def _rel_len(a: _Local, order: int) -> int:
    """Relative length (number of known terms after the leading one)."""
    if a.prec is None:
        return order
    return a.prec - a.val


def _inv(a: _Local, order: int) -> _Local:
    a = _strip(a)
    if a.prec is None and len(a.c) == 1:
        return _Local(-a.val, np.array([1 / a.c[0]]), None)
    n = _rel_len(a, order)
    f = np.zeros(n, complex)
    m = min(n, len(a.c))
    f[:m] = a.c[:m]
    g = np.zeros(n, complex)
    g[0] = 1 / f[0]
    for k in range(1, n):
        g[k] = -np.dot(f[1:k + 1], g[k - 1::-1][:k]) / f[0]
    return _Local(-a.val, g, -a.val + n)


def _pow_unit(f: np.ndarray, r: complex) -> np.ndarray:
    """``(f0 + f1 x + ...)**r`` with f0 != 0, principal branch at f0."""
    n = len(f)
    g = np.zeros(n, complex)
    if r.imag == 0 and r.real == int(r.real):
        g[0] = f[0] ** int(r.real)
    else:
        g[0] = cmath.exp(r * cmath.log(f[0]))
    for k in range(1, n):
        j = np.arange(1, k + 1)
        g[k] = np.dot(((r + 1) * j - k) * f[1:k + 1], g[k - 1::-1][:k]) / (k * f[0])
    return g


def _padded(a: _Local, n: int) -> np.ndarray:
    f = np.zeros(n, complex)
    m = min(n, len(a.c))
    f[:m] = a.c[:m]
    return f


def _pow(a: _Local, r: Fraction | int, order: int) -> _Local:
    a = _strip(a)
    r = Fraction(r)
    new_val = a.val * r
    if new_val.denominator != 1:
        raise SingularSeriesError(
            f"x**{a.val} raised to {r} is not a Laurent series (branch point at expansion point)")
    if r.denominator == 1 and r >= 0 and a.prec is None:
        out = _Local(0, np.array([1 + 0j]), None)
        for _ in range(int(r)):
            out = _mul(out, a)
        return out
    n = _rel_len(a, order)
    rv = complex(float(r))
    g = _pow_unit(_padded(a, n), rv)
    return _Local(int(new_val), g, int(new_val) + n)


def _log(a: _Local, order: int) -> _Local:
    a = _strip(a)
    if a.val != 0:
        raise SingularSeriesError("log needs a nonzero constant leading term")
    n = _rel_len(a, order)
    f = _padded(a, n)
    out = np.zeros(n, complex)
    out[0] = cmath.log(f[0])
    for k in range(1, n):
        j = np.arange(1, k)
        out[k] = (f[k] - np.dot(j * out[1:k], f[k - 1:0:-1][:k - 1]) / k) / f[0]
    return _Local(0, out, n)


def _exp(a: _Local, order: int) -> _Local:
    if a.val < 0 and np.any(a.c[: min(len(a.c), -a.val)] != 0):
        raise SingularSeriesError("exp of a series with a pole at the expansion point")
    n = a.prec if a.prec is not None else order
    h = np.zeros(n, complex)
    for e in range(max(a.val, 0), min(a.top, n)):
        h[e] = a.coeff(e)
    out = np.zeros(n, complex)
    out[0] = cmath.exp(h[0])
    for k in range(1, n):
        j = np.arange(1, k + 1)
        out[k] = np.dot(j * h[1:k + 1], out[k - 1::-1][:k]) / k
    return _Local(0, out, n)


# --------------------------------------------------------------------------
# public type
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LaurentSeries:
    """Truncated Laurent series ``sum_{k=k_min}^{k_max} coeffs[k-k_min] z**k``."""

    k_min: int
    k_max: int
    coeffs: np.ndarray
    at: Point = "zero"
    exact: bool = False

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if self.k_max < self.k_min:
            raise DomainError("k_min must not exceed k_max")
        if len(c) != self.k_max - self.k_min + 1:
            raise DomainError("coefficient array length must equal k_max - k_min + 1")
        if self.at not in ("zero", "inf"):
            raise DomainError(f"unknown expansion point {self.at!r}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # constructors ---------------------------------------------------------

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[complex], k_min: int = 0, at: Point = "zero",
                    exact: bool = False, order: int | None = None) -> "LaurentSeries":
        """Series with ``coeffs[i]`` multiplying ``z**(k_min + i)``.

        ``order`` pads the window with zeros on the truncation side: up to
        ``z**order`` at zero, down to ``z**-order`` at infinity.
        """
        c = np.asarray(list(coeffs), complex)
        k_max = k_min + len(c) - 1
        if order is not None:
            if at == "zero" and order > k_max:
                c = np.concatenate([c, np.zeros(order - k_max, complex)])
                k_max = order
            elif at == "inf" and -order < k_min:
                c = np.concatenate([np.zeros(k_min + order, complex), c])
                k_min = -order
        return cls(k_min, k_max, c, at, exact)

    @classmethod
    def monomial(cls, k: int, coeff: complex = 1.0, at: Point = "zero") -> "LaurentSeries":
        return cls(k, k, np.array([coeff], complex), at, exact=True)

    @classmethod
    def identity(cls, at: Point = "zero") -> "LaurentSeries":
        return cls.monomial(1, 1.0, at)

    @classmethod
    def hydrodynamic(cls, b: Iterable[complex], exact: bool = True) -> "LaurentSeries":
        """``z + b[0] + b[1]/z + b[2]/z**2 + ...`` at infinity."""
        b = list(b)
        c = np.array([1.0] + b, complex)[::-1]
        return cls(1 - len(b), 1, c, "inf", exact)

    # local form ------------------------------------------------------------

    def _local(self) -> _Local:
        if self.at == "zero":
            return _Local(self.k_min, self.coeffs.copy(), None if self.exact else self.k_max + 1)
        return _Local(-self.k_max, self.coeffs[::-1].copy(), None if self.exact else -self.k_min + 1)

    @classmethod
    def _from_local(cls, loc: _Local, at: Point) -> "LaurentSeries":
        c = loc.c
        val = loc.val
        if len(c) == 0:
            # nothing known beyond the truncation edge: keep a single zero slot
            c = np.zeros(1, complex)
            val = loc.prec - 1 if loc.prec is not None else 0
        exact = loc.prec is None
        if exact:
            nz = np.flatnonzero(c)
            if len(nz):
                c = c[nz[0]:nz[-1] + 1]
                val += int(nz[0])
            else:
                c, val = np.zeros(1, complex), 0
        if at == "zero":
            return cls(val, val + len(c) - 1, c, "zero", exact)
        return cls(-(val + len(c) - 1), -val, c[::-1], "inf", exact)

    # inspection --------------------------------------------------------------

    @property
    def order(self) -> int | None:
        """Truncation edge exponent: last known power (None when exact)."""
        if self.exact:
            return None
        return self.k_max if self.at == "zero" else self.k_min

    def __getitem__(self, k: int) -> complex:
        if self.k_min <= k <= self.k_max:
            return complex(self.coeffs[k - self.k_min])
        unknown = (self.at == "zero" and k > self.k_max) or (self.at == "inf" and k < self.k_min)
        if unknown and not self.exact:
            raise TruncationError(f"coefficient of z**{k} lies beyond the truncation edge",
                                  self.order)
        return 0j

    def coefficient(self, k: int) -> complex:
        return self[k]

    def __call__(self, z):
        z = np.asarray(z, complex)
        k = np.arange(self.k_min, self.k_max + 1)
        return np.sum(self.coeffs * z[..., None] ** k, axis=-1)

    def __repr__(self) -> str:
        return (f"LaurentSeries(at={self.at}, k={self.k_min}..{self.k_max}, "
                f"exact={self.exact}, coeffs={np.round(self.coeffs, 12)!r})")

    def truncate(self, order: int) -> "LaurentSeries":
        """Drop everything beyond ``order`` on the truncation side."""
        loc = self._local()
        prec = (order + 1) if self.at == "zero" else (-order + 1)
        prec = _min_prec(loc.prec, prec)
        return LaurentSeries._from_local(_trim(loc.val, loc.c, prec), self.at)

    def allclose(self, other: "LaurentSeries", atol: float = 1e-12) -> bool:
        lo = max(self.k_min, other.k_min) if self.at == "inf" else min(self.k_min, other.k_min)
        hi = min(self.k_max, other.k_max) if self.at == "zero" else max(self.k_max, other.k_max)
        for k in range(lo, hi + 1):
            if abs(self._get0(k) - other._get0(k)) > atol:
                return False
        return True

    def _get0(self, k: int) -> complex:
        if self.k_min <= k <= self.k_max:
            return complex(self.coeffs[k - self.k_min])
        return 0j

    def derivative(self) -> "LaurentSeries":
        k = np.arange(self.k_min, self.k_max + 1)
        return LaurentSeries(self.k_min - 1, self.k_max - 1, self.coeffs * k, self.at, self.exact)

    def substitute_power(self, p: int) -> "LaurentSeries":
        """``f(z**p)`` for a positive integer ``p``."""
        if p < 1:
            raise DomainError("power substitution needs p >= 1")
        c = np.zeros((self.k_max - self.k_min) * p + 1, complex)
        c[::p] = self.coeffs
        return LaurentSeries(self.k_min * p, self.k_max * p, c, self.at, self.exact)

    # arithmetic -------------------------------------------------------------

    def _coerce(self, other) -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            if other.at != self.at:
                raise DomainError("series expanded at different points cannot be combined")
            return other
        return LaurentSeries.monomial(0, complex(other), self.at)

    def __add__(self, other):
        other = self._coerce(other)
        return LaurentSeries._from_local(_add(self._local(), other._local()), self.at)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.k_min, self.k_max, -self.coeffs, self.at, self.exact)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            return LaurentSeries(self.k_min, self.k_max, self.coeffs * complex(other),
                                 self.at, self.exact)
        other = self._coerce(other)
        return LaurentSeries._from_local(_mul(self._local(), other._local()), self.at)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return algebra("div", self, other)

    def __rtruediv__(self, other):
        return algebra("div", self._coerce(other), self)

    def __pow__(self, r):
        return algebra("pow", self, r=r)

    # serialization ----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "k_min": self.k_min,
            "k_max": self.k_max,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
            "at": self.at,
            "exact": self.exact,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LaurentSeries":
        coeffs = np.array([complex(re, im) for re, im in d["coeffs"]], complex)
        return cls(int(d["k_min"]), int(d["k_max"]), coeffs, d.get("at", "zero"),
                   bool(d.get("exact", False)))


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------

def algebra(kind: str, f: LaurentSeries, g: LaurentSeries | complex | None = None, *,
            r: Fraction | int | float | None = None, order: int = DEFAULT_ORDER) -> LaurentSeries:
    """Series arithmetic: ``kind`` in add, sub, mul, div, log, exp, sqrt, pow.

    ``order`` is the number of terms kept when an exact operand produces an
    infinite expansion (division by a non-monomial, log, fractional powers).
    """
    if kind in ("add", "sub", "mul", "div") and g is None:
        raise DomainError(f"{kind} needs two operands")
    if kind == "add":
        return f + g
    if kind == "sub":
        return f - g
    if kind == "mul":
        return f * g
    if kind == "div":
        g = f._coerce(g)
        return LaurentSeries._from_local(_mul(f._local(), _inv(g._local(), order)), f.at)
    if kind == "log":
        return LaurentSeries._from_local(_log(f._local(), order), f.at)
    if kind == "exp":
        return LaurentSeries._from_local(_exp(f._local(), order), f.at)
    if kind == "sqrt":
        return LaurentSeries._from_local(_pow(f._local(), Fraction(1, 2), order), f.at)
    if kind == "pow":
        if r is None:
            raise DomainError("pow needs an exponent r")
        rr = Fraction(r).limit_denominator(10**6) if isinstance(r, float) else Fraction(r)
        return LaurentSeries._from_local(_pow(f._local(), rr, order), f.at)
    raise DomainError(f"unknown algebra kind {kind!r}")


def _local_var_of(f: LaurentSeries, g: LaurentSeries, order: int) -> _Local:
    """Local variable of ``f``'s expansion written as a series in ``g``'s local variable."""
    y = g._local()
    if f.at == "inf":
        y = _inv(y, order)
    return y


def compose(f: LaurentSeries, g: LaurentSeries, order: int = DEFAULT_ORDER) -> LaurentSeries:
    """Coefficients of ``f(g(z))``, expanded at ``g``'s expansion point.

    ``g`` must send its expansion point to ``f``'s (``g -> 0`` when ``f`` is
    expanded at zero, ``g -> inf`` when ``f`` is expanded at infinity) unless
    ``f`` is an exact Laurent polynomial, in which case any ``g`` works.
    """
    if not np.any(g.coeffs != 0):
        raise DomainError("inner series is identically zero")
    floc = f._local()
    y = _strip(_local_var_of(f, g, order))
    if not f.exact and y.val < 1:
        raise DomainError("compose: inner map does not send its expansion point to the "
                          "outer map's expansion point")
    # O(x**prec) in f becomes O(y**prec)
    cap = floc.prec * y.val if floc.prec is not None else None
    if floc.val < 0:
        power = _pow_int(_inv(y, order), -floc.val)
    else:
        power = _pow_int(y, floc.val)
    acc = _Local(0, np.zeros(1, complex), None)
    for e in range(floc.val, floc.top):
        if cap is not None:
            power = _trim(power.val, power.c, _min_prec(power.prec, cap))
        c = floc.coeff(e)
        if c != 0:
            acc = _add(acc, _scale(power, c))
        if e + 1 < floc.top:
            power = _mul(power, y)
    prec = _min_prec(acc.prec, cap)
    return LaurentSeries._from_local(_trim(acc.val, acc.c, prec), g.at)


def _pow_int(y: _Local, n: int) -> _Local:
    out = _Local(0, np.array([1 + 0j]), None)
    base = y
    while n:
        if n & 1:
            out = _mul(out, base)
        n >>= 1
        if n:
            base = _mul(base, base)
    return out


def _revert_local(f: _Local, n: int) -> np.ndarray:
    """Coefficients g_1..g_{n-1} of the compositional inverse of ``f = c1 x + ...``."""
    c1 = f.coeff(1)
    fc = np.array([f.coeff(e) for e in range(n)], complex)
    g = np.zeros(n, complex)
    g[1] = 1 / c1
    for k in range(2, n):
        # coefficient k of f(g) with g known through k-1 (g_k enters only via c1 g_k)
        acc = 0j
        p = g[:k + 1].copy()  # g**1
        for j in range(2, k + 1):
            p = np.convolve(p, g[:k + 1])[:k + 1]
            acc += fc[j] * p[k]
        g[k] = -acc / c1
    return g


def revert(f: LaurentSeries, order: int = DEFAULT_ORDER) -> LaurentSeries:
    """Compositional inverse: ``compose(f, revert(f)) = z`` to working order.

    At zero ``f = c1 z + ...`` with ``c1 != 0``; at infinity ``f = c z + c0 + c1/z + ...``.
    """
    loc = f._local()
    if f.at == "zero":
        if loc.coeff(0) != 0 and np.any(f.coeffs[: max(0, -f.k_min)] != 0):
            raise DomainError("revert at zero needs f(0) = 0")
        if any(loc.coeff(e) != 0 for e in range(loc.val, 1)):
            raise DomainError("revert at zero needs f(0) = 0 and no poles")
        if loc.coeff(1) == 0:
            raise NotInvertibleError("vanishing linear coefficient")
        n = loc.prec if loc.prec is not None else order + 1
        g = _revert_local(loc, n)
        return LaurentSeries._from_local(_Local(0, g, n), "zero")
    # at infinity: F(x) = 1/f(1/x) has a simple zero at x = 0
    if f.k_max != 1 or f[1] == 0:
        raise NotInvertibleError("revert at infinity needs f = c z + c0 + ... with c != 0")
    F = _inv(loc, order + 1)
    n = F.prec if F.prec is not None else order + 1
    G = _revert_local(F, n)
    return LaurentSeries._from_local(_inv(_Local(0, G, n), order + 1), "inf")


def _require_hydrodynamic(f: LaurentSeries) -> None:
    if f.at != "inf" or f.k_max != 1 or abs(f[1] - 1) > 1e-14:
        raise DomainError("map must be hydrodynamically normalized: z + b0 + b1/z + ... at infinity")


def r2_transform(f: LaurentSeries, order: int = DEFAULT_ORDER) -> LaurentSeries:
    """Square-root transform ``f(z**2)**(1/2)``: an odd series ``z + (b0/2)/z + ...``."""
    _require_hydrodynamic(f)
    # f(z**2)**(1/2) = z * q(z**2)**(1/2) with q = f/z; taking the root before
    # stretching keeps every even-index coefficient exactly zero
    q = f * LaurentSeries.monomial(-1, 1.0, "inf")  # 1 + b0/z + ...
    s = LaurentSeries._from_local(_pow(q._local(), Fraction(1, 2), order), "inf")
    return s.substitute_power(2) * LaurentSeries.monomial(1, 1.0, "inf")


def r20_transform(f: LaurentSeries, f0: complex, order: int = DEFAULT_ORDER) -> LaurentSeries:
    """``(f(z**2) - f0)**(1/2)`` where ``f0`` is the value of the extension at 0."""
    _require_hydrodynamic(f)
    return r2_transform(f - complex(f0), order)


def schwarzian(f: LaurentSeries, order: int = DEFAULT_ORDER) -> LaurentSeries:
    """``(f''/f')' - (f''/f')**2 / 2`` as a series."""
    d1 = f.derivative()
    if not np.any(d1.coeffs != 0):
        raise SingularSeriesError("vanishing derivative")
    d2 = d1.derivative()
    h = algebra("div", d2, d1, order=order)
    return h.derivative() - 0.5 * (h * h)


def bers_norm(f: LaurentSeries, radii: Iterable[float] | None = None, n_theta: int = 256,
              order: int = DEFAULT_ORDER) -> float:
    """``sup (|z|**2 - 1)**2 |S_f(z)|`` over a polar grid in ``|z| > 1``."""
    if f.at != "inf":
        raise DomainError("exterior-disk norm needs a series at infinity")
    s = schwarzian(f, order)
    if radii is None:
        radii = 1 + np.geomspace(1e-2, 4.0, 80)
    radii = np.asarray(list(radii), float)
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    z = radii[:, None] * np.exp(1j * theta)[None, :]
    vals = (np.abs(z) ** 2 - 1) ** 2 * np.abs(s(z))
    return float(vals.max())
