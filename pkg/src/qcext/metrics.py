"""Hyperbolic and Teichmueller distances and the Schwarz-type bounds built on them.

Distances use curvature -4: ``d(z1, z2) = artanh |(z1 - z2) / (1 - conj(z1) z2)|``.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError


def _in_disk(name: str, z: complex) -> None:
    if not abs(z) < 1:
        raise DomainError(f"{name} must lie in the open unit disk, got {z}")


def hyperbolic_distance(z1: complex, z2: complex) -> float:
    _in_disk("z1", z1)
    _in_disk("z2", z2)
    q = abs((z1 - z2) / (1 - np.conj(z1) * z2))
    return float(np.arctanh(min(q, 1.0)))


def teich_distance(k: float) -> float:
    """Teichmueller distance ``artanh k`` from the base point."""
    if not 0 <= k < 1:
        raise DomainError(f"k must satisfy 0 <= k < 1, got {k}")
    return float(np.arctanh(k))


class GolusinBound(NamedTuple):
    value: float
    witness: complex  # g0(t), which attains the bound on the ray arg t = arg c_m


def golusin_witness(m: int, c_m: complex, t):
    """``g0(t) = t**m (t + c_m) / (1 + conj(c_m) t)``."""
    t = np.asarray(t, complex)
    return t ** m * (t + c_m) / (1 + np.conj(c_m) * t)


def _check_golusin(m: int, c_m: complex, t: complex) -> None:
    if m < 1:
        raise DomainError("m must be at least 1")
    if not 0 < abs(c_m) <= 1 + 1e-15:
        raise DomainError(f"need 0 < |c_m| <= 1, got |c_m| = {abs(c_m)}")
    _in_disk("t", t)


def golusin_bound(m: int, c_m: complex, t: complex) -> GolusinBound:
    """``|t|**m (|t| + |c_m|) / (1 + |c_m| |t|)`` for ``g = c_m t**m + ...`` with ``|g| < 1``."""
    _check_golusin(m, c_m, t)
    r, c = abs(t), abs(c_m)
    return GolusinBound(float(r ** m * (r + c) / (1 + c * r)), complex(golusin_witness(m, c_m, t)))


def growth_bound(m: int, c_m: complex, t: complex) -> float:
    """``tanh`` of the Golusin bound: growth on a geodesic disk."""
    return float(np.tanh(golusin_bound(m, c_m, t).value))


def ball_relation(rho: float, k: float) -> float:
    """Distance ``artanh(tanh(rho) / k)`` in the ball of radius ``k``."""
    if not 0 < k <= 1:
        raise DomainError(f"k must satisfy 0 < k <= 1, got {k}")
    if rho < 0:
        raise DomainError("rho must be nonnegative")
    s = np.tanh(rho)
    if k < 1 and s >= k:
        raise DomainError(f"tanh(rho) = {s} lies outside the ball of radius {k}")
    if k == 1:
        return float(rho)
    return float(np.arctanh(s / k))


def blaschke(zeros: Sequence[complex], m: int = 0, rotation: float = 0.0):
    """``e^{i rotation} t**m prod (t - a)/(1 - conj(a) t)`` and its coefficient at ``t**m``."""
    zeros = np.asarray(zeros, complex)
    if np.any(np.abs(zeros) >= 1) or np.any(zeros == 0):
        raise DomainError("Blaschke zeros must lie in 0 < |a| < 1")
    u = np.exp(1j * rotation)

    def g(t):
        t = np.asarray(t, complex)
        out = u * t ** m
        for a in zeros:
            out = out * (t - a) / (1 - np.conj(a) * t)
        return out

    return g, complex(u * np.prod(-zeros))
