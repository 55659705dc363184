"""Angle-dependent reduction ratio of the linear-actuator guide-rod knee.

A crank of length r turns about the knee axis; a ball-screw actuator anchored
at distance S0 + r from the axis drives the crank tip. The actuator length at
crank angle theta follows the law of cosines,

    s(theta) = sqrt((S0 + r)^2 + r^2 - 2 r (S0 + r) cos(theta)),

so screw rotation per joint radian (the reduction ratio) is

    k(theta) = (2 pi / Q) * ds/dtheta
             = 2 pi r (S0 + r) sin(theta) / (Q * s(theta)),

with Q the screw lead. The crank angle maps to knee angle via
q2 = theta - pi + delta_theta, where delta_theta is an assembly offset.

k vanishes at both ends of [0, pi] and has exactly one interior maximum:
setting d(sin(theta)/s)/dtheta = 0 factors into ((S0+r)cos(theta) - r)^2 = 0,
so the peak sits at cos(theta*) = r/(S0+r), where the crank is perpendicular
to the actuator line and k_max = 2*pi*r/Q exactly. For S0 > r this places
theta* in (pi/3, pi/2), i.e. the knee-angle argmax in (-2*pi/3, -pi/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateGeometryError, DomainError, MechanismRangeError
from .leg import DEFAULT_Q2_CAP, LegModel, knee_to_com_ratio

THETA_MIN = 0.01
THETA_MAX = math.pi - 0.001
"""Working-range guard band for the crank angle (rad)."""


@dataclass(frozen=True)
class VrrParams:
    """Guide-rod mechanism design variables, SI units.

    r: crank length (m); s0: frame length (m); delta_theta: assembly offset
    (rad); lead: ball-screw lead (m per revolution).
    """

    r: float
    s0: float
    delta_theta: float = 0.0
    lead: float = 0.010

    def __post_init__(self):
        if self.r <= 0:
            raise DomainError(f"crank length r={self.r} must be positive")
        if self.s0 <= self.r:
            raise DomainError(
                f"frame length s0={self.s0} must exceed crank length r={self.r}")
        if self.lead <= 0:
            raise DomainError(f"screw lead={self.lead} must be positive")
        if abs(self.delta_theta) > math.pi / 6:
            raise DomainError(
                f"assembly offset delta_theta={self.delta_theta} outside +-pi/6")


@dataclass(frozen=True)
class FrrParams:
    """Fixed reduction ratio baseline: motor rad per joint rad."""

    k_fixed: float

    def __post_init__(self):
        if self.k_fixed <= 0:
            raise DomainError(f"k_fixed={self.k_fixed} must be positive")


@dataclass
class RatioCurve:
    """Sampled ratio curve with the refined location/value of its maximum."""

    samples: list[tuple[float, float]]
    argmax_q2: float
    k_max: float


def crank_angle(params: VrrParams, q2: float) -> float:
    """Crank-to-frame angle theta for a knee angle q2."""
    return q2 + math.pi - params.delta_theta


def joint_angle(params: VrrParams, theta: float) -> float:
    """Knee angle q2 for a crank angle theta (inverse of crank_angle)."""
    return theta - math.pi + params.delta_theta


def _ratio_at_theta(params: VrrParams, theta: float) -> float:
    radicand = (params.s0 + params.r) ** 2 + params.r ** 2 \
        - 2.0 * params.r * (params.s0 + params.r) * math.cos(theta)
    if radicand <= 0.0:
        raise DegenerateGeometryError(
            f"degenerate linkage geometry at theta={theta:.6g}: "
            f"sqrt argument {radicand:.6g} <= 0 for r={params.r}, s0={params.s0}")
    num = 2.0 * math.pi * params.r * (params.s0 + params.r) * math.sin(theta)
    return num / (params.lead * math.sqrt(radicand))


def reduction_ratio(params: VrrParams, q2: float) -> float:
    """Motor-to-joint reduction ratio k(q2), dimensionless and >= 0.

    Vanishes at the range endpoints theta = 0 and theta = pi (sin theta = 0);
    angles strictly outside [0, pi] are range errors.
    """
    theta = crank_angle(params, q2)
    if not (0.0 <= theta <= math.pi):
        raise MechanismRangeError(
            f"crank angle theta={theta:.6g} rad outside the working range [0, pi] "
            f"for q2={q2:.6g}, delta_theta={params.delta_theta:.6g}")
    return _ratio_at_theta(params, theta)


def check_working_range(params: VrrParams, q2_lo: float, q2_hi: float,
                        theta_min: float = THETA_MIN,
                        theta_max: float = THETA_MAX) -> None:
    """Reject configurations whose crank angle leaves (theta_min, theta_max).

    theta is affine in q2, so checking the interval endpoints suffices.
    """
    if q2_lo > q2_hi:
        raise DomainError(f"empty knee range [{q2_lo}, {q2_hi}]")
    for q2 in (q2_lo, q2_hi):
        theta = crank_angle(params, q2)
        if not (theta_min < theta < theta_max):
            raise MechanismRangeError(
                f"q2={q2:.6g} maps to theta={theta:.6g} rad outside "
                f"({theta_min:.6g}, {theta_max:.6g}) for r={params.r}, "
                f"s0={params.s0}, delta_theta={params.delta_theta:.6g}")


def peak_crank_angle(params: VrrParams) -> float:
    """Crank angle of the unique interior maximum of k on (0, pi).

    The crank is perpendicular to the actuator line there, giving
    cos(theta*) = r/(S0+r) and k(theta*) = 2*pi*r/lead.
    """
    return math.acos(params.r / (params.s0 + params.r))


def ratio_curve(params: VrrParams, q2_lo: float, q2_hi: float, n: int) -> RatioCurve:
    """Uniformly sample k over [q2_lo, q2_hi] and locate its maximum.

    The coarse argmax is refined by a golden-section pass to 1e-6 rad.
    Sampling errors carry the offending sample index.
    """
    if n < 2:
        raise DomainError(f"need at least 2 samples, got n={n}")
    if q2_lo >= q2_hi:
        raise DomainError(f"require q2_lo < q2_hi, got [{q2_lo}, {q2_hi}]")
    step = (q2_hi - q2_lo) / (n - 1)
    samples: list[tuple[float, float]] = []
    for i in range(n):
        q2 = q2_hi if i == n - 1 else q2_lo + i * step
        try:
            samples.append((q2, reduction_ratio(params, q2)))
        except DomainError as exc:
            raise MechanismRangeError(f"sample {i} (q2={q2:.6g}): {exc}") from exc

    i_best = max(range(n), key=lambda i: samples[i][1])
    lo = samples[max(i_best - 1, 0)][0]
    hi = samples[min(i_best + 1, n - 1)][0]
    argmax_q2, k_max = _golden_max(lambda q2: reduction_ratio(params, q2), lo, hi)
    if k_max < samples[i_best][1]:
        argmax_q2, k_max = samples[i_best]
    return RatioCurve(samples=samples, argmax_q2=argmax_q2, k_max=k_max)


def _golden_max(f, lo: float, hi: float, tol: float = 1e-6) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def effective_overall_ratio(params: VrrParams | FrrParams, model: LegModel,
                            q2: float, cap: float = DEFAULT_Q2_CAP) -> float:
    """Motor-to-CoM transmission ratio k(q2) * lambda(q2) in rad/m."""
    lam = knee_to_com_ratio(model, q2, cap)
    if isinstance(params, FrrParams):
        return params.k_fixed * lam
    return reduction_ratio(params, q2) * lam
