"""Outage-constrained transmit powers for the cooperative and baseline schemes.

Every link sees free-space path loss and unit-exponential-scaled Rayleigh
fading, so each per-link outage probability inverts in closed form to a
"desired power" of the shape ``coeff * distance^2``.  The cooperative scheme
additionally needs the per-link cellular outage target that makes the
composite (three-slot) outage hit the end-to-end target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import Geometry
from .params import LinearParams

_16PI2 = 16.0 * math.pi * math.pi


@dataclass(frozen=True)
class OutageTargets:
    """Per-link outage targets derived from the end-to-end target.

    ``eps_short`` is the probability that both short-range decodes succeed;
    ``eps_total = 1 + eps_short`` is the expected-slot multiplier applied to
    the cellular powers (slot 3 runs only after a successful exchange).
    """

    p_out: float
    eps_short: float
    eps_total: float
    p_out_nc: float   # per-cellular-link target, cooperative scheme
    p_out_c: float    # per-link target, conventional scheme

    @classmethod
    def for_target(cls, p_out: float) -> "OutageTargets":
        eps = (1.0 - p_out) ** 2
        return cls(
            p_out=p_out,
            eps_short=eps,
            eps_total=1.0 + eps,
            p_out_nc=per_link_outage_nncc(p_out),
            p_out_c=per_link_outage_conventional(p_out),
        )


@dataclass(frozen=True)
class PowerCoefficients:
    """Per-square-meter desired-power coefficients (both strictly positive)."""

    zeta: float  # short-range link: power = zeta * r^2, W/m^2
    eta: float   # cellular link: power = eta * r_i^2, W/m^2


@dataclass(frozen=True)
class PowerBreakdown:
    """Per-link desired powers and scheme totals, in watts.

    An instance describes a single scheme: the cooperative constructor leaves
    ``total_conventional`` zero and vice versa.
    """

    p12: float
    p21: float
    p1b: float
    p2b: float
    total_nncc: float
    total_conventional: float


def composite_outage_nncc(x: float, p_out: float) -> float:
    """End-to-end outage of the cooperative scheme at per-cellular-link outage x.

    With probability (1-p_out)^2 the exchange succeeds and a message is lost
    only if both of its uplink copies fail (x^2); otherwise the pair falls
    back to solo uplinks and at least one failing counts (1-(1-x)^2).
    """
    eps = (1.0 - p_out) ** 2
    return eps * x * x + (1.0 - eps) * (2.0 * x - x * x)


def per_link_outage_nncc(p_out: float) -> float:
    """Per-cellular-link outage target that meets the end-to-end target.

    Root in (0,1) of the quadratic (2*eps-1)*x^2 + 2*(1-eps)*x - p_out = 0
    with eps = (1-p_out)^2, evaluated in the form 2*p/(b + sqrt(b^2+4*a*p))
    which stays fully conditioned through the sign change of 2*eps-1 at
    p_out = 1 - 1/sqrt(2).
    """
    if not (0.0 < p_out < 1.0):
        raise ValueError(f"p_out must lie in (0, 1), got {p_out!r}")
    eps = (1.0 - p_out) ** 2
    a = 2.0 * eps - 1.0
    b = 2.0 * (1.0 - eps)
    return 2.0 * p_out / (b + math.sqrt(b * b + 4.0 * a * p_out))


def per_link_outage_conventional(p_out: float) -> float:
    """Per-link outage target when both uplinks must individually succeed."""
    if not (0.0 <= p_out < 1.0):
        raise ValueError(f"p_out must lie in [0, 1), got {p_out!r}")
    # 1 - sqrt(1-p) without cancellation for small p
    return -math.expm1(0.5 * math.log1p(-p_out))


def _desired_power_coeff(gap: float, bandwidth: float, lam: float,
                         gain_product: float, sigma2: float,
                         n0: float, rate: float, p_link: float) -> float:
    """Common inversion: outage-target -> power-per-m^2 for one Rayleigh link."""
    if not (0.0 < p_link < 1.0):
        raise ValueError(f"per-link outage must lie in (0, 1), got {p_link!r}")
    snr_needed = gap * math.expm1(math.log(2.0) * rate / bandwidth)
    return (_16PI2 * n0 * bandwidth * snr_needed
            / (sigma2 * gain_product * lam * lam * (-math.log1p(-p_link))))


def short_range_coeff(params: LinearParams) -> float:
    """Short-range coefficient zeta: desired exchange power is zeta * r^2."""
    return _desired_power_coeff(
        params.delta_s, params.b_s, params.lambda_s,
        params.g_u1 * params.g_u2, params.sigma2_short,
        params.n0, params.rate, params.p_out_target,
    )


def cellular_coeff(params: LinearParams, p_link: float) -> float:
    """Cellular coefficient eta: desired uplink power is eta * r_i^2.

    Serves both schemes; pass the cooperative or the conventional per-link
    target.  A single coefficient covers both handsets, which assumes they
    share the antenna gain (g_u1 is used).
    """
    return _desired_power_coeff(
        params.delta_c, params.b_c, params.lambda_c,
        params.g_u1 * params.g_bs, params.sigma2_cell,
        params.n0, params.rate, p_link,
    )


def power_coefficients(params: LinearParams) -> PowerCoefficients:
    """Both cooperative-scheme coefficients for a validated parameter set."""
    targets = OutageTargets.for_target(params.p_out_target)
    return PowerCoefficients(
        zeta=short_range_coeff(params),
        eta=cellular_coeff(params, targets.p_out_nc),
    )


def nncc_power_breakdown(geom: Geometry, params: LinearParams) -> PowerBreakdown:
    """Desired powers and total for one cooperation round at a fixed placement.

    The total charges the cellular powers with the expected slot count
    ``1 + (1-p_out)^2`` and must coincide with its quadratic form in
    (r, theta); the construction checks that identity.
    """
    targets = OutageTargets.for_target(params.p_out_target)
    coeff = power_coefficients(params)
    p12 = coeff.zeta * geom.r * geom.r
    p1b = coeff.eta * geom.r1 * geom.r1
    p2b = coeff.eta * geom.r2 * geom.r2
    total = 2.0 * p12 + targets.eps_total * (p1b + p2b)

    ee = targets.eps_total * coeff.eta
    quadratic = ((2.0 * coeff.zeta + ee) * geom.r * geom.r
                 + 2.0 * ee * geom.r1 * math.cos(geom.theta) * geom.r
                 + 2.0 * ee * geom.r1 * geom.r1)
    assert math.isclose(total, quadratic, rel_tol=1e-9), (total, quadratic)

    return PowerBreakdown(p12=p12, p21=p12, p1b=p1b, p2b=p2b,
                          total_nncc=total, total_conventional=0.0)


def conventional_power(geom: Geometry, params: LinearParams) -> PowerBreakdown:
    """Desired powers for the non-cooperative baseline (solo uplinks only)."""
    targets = OutageTargets.for_target(params.p_out_target)
    eta_c = cellular_coeff(params, targets.p_out_c)
    p1b = eta_c * geom.r1 * geom.r1
    p2b = eta_c * geom.r2 * geom.r2
    return PowerBreakdown(p12=0.0, p21=0.0, p1b=p1b, p2b=p2b,
                          total_nncc=0.0, total_conventional=p1b + p2b)


def short_range_outage_prob(p_tx: float, r: float, params: LinearParams) -> float:
    """Outage probability of the exchange link at transmit power ``p_tx``."""
    if p_tx <= 0:
        raise ValueError(f"p_tx must be > 0, got {p_tx!r}")
    if r <= 0:
        raise ValueError(f"r must be > 0, got {r!r}")
    snr_needed = params.delta_s * math.expm1(math.log(2.0) * params.rate / params.b_s)
    exponent = (_16PI2 * params.n0 * params.b_s * r * r * snr_needed
                / (p_tx * params.sigma2_short * params.g_u1 * params.g_u2
                   * params.lambda_s * params.lambda_s))
    return -math.expm1(-exponent)


def link_capacity(snr: float, bandwidth: float, gap: float) -> float:
    """Gap-adjusted Shannon rate B * log2(1 + snr/gap), bits/s."""
    if snr < 0:
        raise ValueError(f"snr must be >= 0, got {snr!r}")
    if bandwidth <= 0:
        raise ValueError(f"bandwidth must be > 0, got {bandwidth!r}")
    if gap < 1.0:
        raise ValueError(f"gap must be >= 1 (linear), got {gap!r}")
    return bandwidth * math.log2(1.0 + snr / gap)


def received_snr_short(p_tx: float, r: float, fading: float, params: LinearParams) -> float:
    """Received SNR on the handset-to-handset link for one fading draw."""
    if r <= 0:
        raise ValueError(f"r must be > 0 (free-space model diverges), got {r!r}")
    if p_tx < 0 or fading < 0:
        raise ValueError("p_tx and fading must be >= 0")
    spread = params.lambda_s / (4.0 * math.pi * r)
    return (p_tx / (params.n0 * params.b_s)) * spread * spread * params.g_u1 * params.g_u2 * fading


def received_snr_cellular(p_tx: float, ri: float, fading: float, params: LinearParams,
                          user: int = 1) -> float:
    """Received SNR at the BS from handset ``user`` for one fading draw."""
    if ri <= 0:
        raise ValueError(f"ri must be > 0 (free-space model diverges), got {ri!r}")
    if p_tx < 0 or fading < 0:
        raise ValueError("p_tx and fading must be >= 0")
    g_u = params.g_u1 if user == 1 else params.g_u2
    spread = params.lambda_c / (4.0 * math.pi * ri)
    return (p_tx / (params.n0 * params.b_c)) * spread * spread * g_u * params.g_bs * fading
