"""Random placement of the cooperating pair relative to the base station.

Handset locations follow a homogeneous Poisson point process of density
``rho``, so the distance from a handset to its nearest neighbor has the
Rayleigh-type density ``2*pi*rho*r*exp(-pi*rho*r^2)`` and the neighbor's
bearing is uniform.  The tagged handset sits at a fixed distance ``r1`` from
the base station.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate


@dataclass(frozen=True)
class Geometry:
    """One placement of the pair: distances in meters, bearing in radians."""

    r1: float      # tagged handset to BS
    r: float       # tagged handset to its nearest neighbor
    theta: float   # bearing of the neighbor, in [-pi/2, 3*pi/2)
    r2: float      # neighbor to BS


def nn_distance_pdf(r, rho: float):
    """Density of the nearest-neighbor distance under a PPP of density rho."""
    if rho <= 0:
        raise ValueError(f"rho must be > 0, got {rho!r}")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("distance must be >= 0")
    out = 2.0 * math.pi * rho * r * np.exp(-math.pi * rho * r * r)
    return out if out.ndim else float(out)


def nn_distance_cdf(r, rho: float):
    """Closed-form CDF of the nearest-neighbor distance, 1 - exp(-pi*rho*r^2)."""
    if rho <= 0:
        raise ValueError(f"rho must be > 0, got {rho!r}")
    r = np.asarray(r, dtype=float)
    out = -np.expm1(-math.pi * rho * np.square(np.maximum(r, 0.0)))
    return out if out.ndim else float(out)


def partner_distance_to_bs(r1: float, r: float, theta: float) -> float:
    """Distance from the neighbor to the BS via the law of cosines."""
    if r1 <= 0:
        raise ValueError(f"r1 must be > 0, got {r1!r}")
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r!r}")
    s = r * r + r1 * r1 + 2.0 * r1 * r * math.cos(theta)
    if s < 0.0:
        # analytically impossible; tolerate rounding just below zero
        if s > -1e-12 * (r * r + r1 * r1):
            s = 0.0
        else:
            raise ValueError(f"squared distance came out negative: {s!r}")
    return math.sqrt(s)


def sample_r(rng: np.random.Generator, rho: float, n: int | None = None):
    """Draw nearest-neighbor distances by inverse CDF, one uniform per draw.

    Uses r = sqrt(-log(1-u)/(pi*rho)) with u in [0,1), which is finite for
    every representable u.
    """
    u = rng.random(n)
    return np.sqrt(-np.log1p(-u) / (math.pi * rho))


def sample_theta(rng: np.random.Generator, n: int | None = None):
    """Uniform bearing on the half-open interval [-pi/2, 3*pi/2)."""
    return -0.5 * math.pi + 2.0 * math.pi * rng.random(n)


def sample_nn_geometry(rng: np.random.Generator, rho: float, r1: float) -> Geometry:
    """Sample one pair placement; r1 is a fixed experiment parameter."""
    if rho <= 0:
        raise ValueError(f"rho must be > 0, got {rho!r}")
    if r1 <= 0:
        raise ValueError(f"r1 must be > 0, got {r1!r}")
    r = float(sample_r(rng, rho))
    theta = float(sample_theta(rng))
    return Geometry(r1=r1, r=r, theta=theta, r2=partner_distance_to_bs(r1, r, theta))


def sample_nn_geometries(rng: np.random.Generator, rho: float, r1: float, n: int):
    """Vectorized sampler: returns arrays (r, theta, r2) of length n.

    Draw order (all r first, then all theta) is part of the reproducibility
    contract for a given generator state.
    """
    if rho <= 0 or r1 <= 0:
        raise ValueError("rho and r1 must be > 0")
    r = sample_r(rng, rho, n)
    theta = sample_theta(rng, n)
    r2 = np.sqrt(np.maximum(r * r + r1 * r1 + 2.0 * r1 * r * np.cos(theta), 0.0))
    return r, theta, r2


def mean_nn_distance(rho: float) -> float:
    """Mean nearest-neighbor distance by adaptive quadrature.

    Agrees with the closed form 1/(2*sqrt(rho)) to ~1e-9 relative; kept as a
    quadrature so it can serve as an independent check of that closed form.
    """
    if rho <= 0:
        raise ValueError(f"rho must be > 0, got {rho!r}")
    scale = 1.0 / math.sqrt(math.pi * rho)
    val, _ = integrate.quad(
        lambda r: r * nn_distance_pdf(r, rho), 0.0, 40.0 * scale,
        epsabs=0.0, epsrel=1e-12, limit=200,
    )
    return val
