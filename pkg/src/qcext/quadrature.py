"""Product quadrature on the unit disk with local refinement at poles.

The global rule is Gauss-Legendre in ``r`` times the midpoint rule in
``theta``. Every marked pole ``p`` within ``refine_radius`` of the closed disk
gets a local polar patch centred at ``p``: in local coordinates
``z = p + rho e^{i phi}`` the Jacobian ``rho`` cancels a simple pole, and the
radial panels are graded geometrically toward the pole. Patch and global rule
are glued with a smooth partition of unity, so integrands with simple poles
are integrated to near spectral accuracy away from the zeros of ``|psi|``.

Weights are positive and always sum to ``pi`` (area of the disk) up to
rounding; the patch weights are scaled so that each patch reproduces the
global rule's integral of its cutoff function.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, NodeShiftWarning


class Estimate(NamedTuple):
    """A quadrature value with an error estimate (difference to a coarser rule)."""

    value: complex | float
    error: float


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values) -> complex:
        # fixed summation order keeps results reproducible bit for bit
        return complex(np.dot(self.weights, np.asarray(values, complex)))

    def __len__(self) -> int:
        return len(self.nodes)


def _bump(s: np.ndarray) -> np.ndarray:
    """C-infinity cutoff: 1 at s = 0, 0 for s >= 1, all derivatives flat at both ends."""
    s = np.asarray(s, float)
    u = np.clip(s, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(u < 1, np.exp(-1 / np.where(u < 1, 1 - u, 1.0)), 0.0)
        b = np.where(u > 0, np.exp(-1 / np.where(u > 0, u, 1.0)), 0.0)
    return a / (a + b)


@lru_cache(maxsize=64)
def _gauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


def _graded_panels(lo: float, hi: float, n_panels: int, ratio: float = 4.0,
                   n_outer: int = 1) -> np.ndarray:
    """Panel edges on [lo, hi] shrinking geometrically toward ``lo``.

    The outermost geometric panel is split into ``n_outer`` equal panels.
    """
    frac = ratio ** -np.arange(n_panels - 1, 0, -1, dtype=float)
    outer = np.linspace(frac[-1], 1.0, n_outer + 1)[1:] if n_panels > 1 else np.array([1.0])
    return np.concatenate([[lo], lo + (hi - lo) * frac, lo + (hi - lo) * outer[:-1], [hi]])


def _panel_rule(edges: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _gauss(n)
    a, b = edges[:-1, None], edges[1:, None]
    return (a + (b - a) * x).ravel(), ((b - a) * w).ravel()


@dataclass(frozen=True)
class DiskQuadrature:
    """Resolution descriptor for disk integrals.

    ``n_r`` Gauss-Legendre nodes in radius, ``n_theta`` midpoint nodes in
    angle; each pole patch uses ``n_panels`` graded radial panels of
    ``n_local_r`` nodes and ``n_local_theta`` angular nodes.
    """

    n_r: int = 128
    n_theta: int = 512
    refine_radius: float = 0.1
    n_local_r: int = 10
    n_local_theta: int = 128
    n_panels: int = 6
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.n_r < 1 or self.n_theta < 1:
            raise DomainError("quadrature resolution must be positive")

    def coarse(self) -> "DiskQuadrature":
        """Half-resolution companion used for error estimates."""
        return replace(self, n_r=max(self.n_r // 2, 2), n_theta=max(self.n_theta // 2, 4),
                       n_local_r=max(self.n_local_r // 2, 2),
                       n_local_theta=max(self.n_local_theta // 2, 8), _cache={})

    @property
    def n_nodes(self) -> int:
        return self.n_r * self.n_theta

    # ------------------------------------------------------------------

    def rule(self, poles: Iterable[complex] = (), inner_radius: float = 0.0) -> QuadratureRule:
        """Nodes and weights for the disk (or the annulus ``inner_radius < |z| < 1``)."""
        key = (tuple(sorted({complex(p) for p in poles}, key=lambda c: (c.real, c.imag))),
               float(inner_radius))
        if key not in self._cache:
            self._cache[key] = self._build(list(key[0]), key[1])
        return self._cache[key]

    def _global(self, inner: float, shift: float = 0.0):
        if inner > 0:
            n_pan = max(int(np.ceil(np.log(1 / inner) / np.log(4.0))), 1)
            per = max(self.n_r // 4, 4)
            r, wr = _panel_rule(_graded_panels(inner, 1.0, n_pan + 1), per)
        else:
            r, wr = _gauss(self.n_r)
        th = 2 * np.pi * (np.arange(self.n_theta) + 0.5 + shift) / self.n_theta
        z = (r[:, None] * np.exp(1j * th)[None, :]).ravel()
        w = ((wr * r)[:, None] * np.full(self.n_theta, 2 * np.pi / self.n_theta)[None, :]).ravel()
        return z, w

    def _patch(self, p: complex, delta: float):
        phi = 2 * np.pi * (np.arange(self.n_local_theta) + 0.5) / self.n_local_theta
        u = np.exp(1j * phi)
        beta = (np.conj(p) * u).real
        disc = beta ** 2 + 1 - abs(p) ** 2
        zs, ws = [], []
        dphi = 2 * np.pi / self.n_local_theta
        for j in range(self.n_local_theta):
            if disc[j] <= 0:
                continue
            root = np.sqrt(disc[j])
            lo = max(0.0, -beta[j] - root)
            hi = min(delta, -beta[j] + root)
            if hi <= lo:
                continue
            rho, wr = _panel_rule(_graded_panels(lo, hi, self.n_panels, n_outer=4), self.n_local_r)
            zs.append(p + rho * u[j])
            ws.append(wr * rho * dphi * _bump(rho / delta))
        if not zs:
            return np.zeros(0, complex), np.zeros(0)
        return np.concatenate(zs), np.concatenate(ws)

    def _build(self, poles: list[complex], inner: float) -> QuadratureRule:
        # only poles near the closed disk and away from the origin need patches;
        # the global polar grid already resolves a simple pole at 0
        marked = [p for p in poles if abs(p) > 1e-14 and abs(p) < 1 + self.refine_radius]
        deltas = []
        for i, p in enumerate(marked):
            d = self.refine_radius
            others = [abs(p - q) for k, q in enumerate(marked) if k != i]
            if others:
                d = min(d, 0.45 * min(others))
            d = min(d, 0.45 * (abs(p) - inner) if abs(p) > inner else d)
            deltas.append(d)

        shift = 0.0
        z, w = self._global(inner)
        if poles and np.min(np.abs(z[:, None] - np.asarray(poles)[None, :])) < 1e-12:
            warnings.warn("pole on a quadrature node; rotating the angular grid by half a step",
                          NodeShiftWarning, stacklevel=3)
            shift = 0.5
            z, w = self._global(inner, shift)

        keep = np.ones_like(w)
        patch_nodes, patch_weights = [], []
        for p, d in zip(marked, deltas):
            chi = _bump(np.abs(z - p) / d)
            target = float(np.dot(w, chi))
            pz, pw = self._patch(p, d)
            s = pw.sum()
            if s > 0 and target > 0:
                pw = pw * (target / s)
                keep -= chi
                patch_nodes.append(pz)
                patch_weights.append(pw)
        nodes = np.concatenate([z] + patch_nodes)
        weights = np.concatenate([w * keep] + patch_weights)
        mask = weights > 0
        return QuadratureRule(nodes[mask], weights[mask])

    # ------------------------------------------------------------------

    def integrate(self, fn, poles: Sequence[complex] = (), inner_radius: float = 0.0,
                  estimate: bool = True) -> Estimate:
        """Integrate ``fn(z)`` over the disk with an error estimate from the coarse rule."""
        rule = self.rule(poles, inner_radius)
        val = rule.integrate(fn(rule.nodes))
        err = 0.0
        if estimate:
            crule = self.coarse().rule(poles, inner_radius)
            err = abs(val - crule.integrate(fn(crule.nodes)))
        return Estimate(val, float(err))
