"""Parametric PMSM output model: torque-speed envelope, losses, joint torque.

The available-torque envelope is piecewise in speed:

* constant peak torque up to omega_break (thermal/current limit),
* constant peak power p_peak/omega above it (power limit),
* a linear derate of the power-limited branch to zero between omega_hpl and
  omega_max, standing in for the steep high-speed loss growth,
* zero at and beyond omega_max.

Losses are modeled as three-phase copper loss 1.5*R*iq^2 plus lumped
speed-proportional and speed-squared terms. The default coefficients are
fitted once so that at peak current and omega_max the losses cancel the
electromagnetic power (no net output at top speed); see default_motor().
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError

RADS_PER_RPM = math.pi / 30.0


@dataclass(frozen=True)
class MotorParams:
    """Envelope and loss parameters of the joint motor plus drivetrain.

    tau_peak: peak torque (Nm); i_q_peak: peak q-axis current (A);
    k_t: torque constant (Nm/A); p_peak: peak mechanical power (W);
    omega_break, omega_max: power-limit onset and zero-torque speeds (rad/s);
    omega_hpl: onset of the high-speed derate (rad/s, default 0.75*omega_max);
    r_phase: effective winding resistance (ohm); c_iron1, c_iron2: lumped
    speed and speed-squared loss coefficients; eta_j: transmission efficiency.
    """

    tau_peak: float
    i_q_peak: float
    k_t: float
    p_peak: float
    omega_break: float
    omega_max: float
    r_phase: float
    c_iron1: float
    c_iron2: float
    eta_j: float = 0.90
    omega_hpl: float = field(default=0.0)

    def __post_init__(self):
        if self.omega_hpl == 0.0:
            object.__setattr__(self, "omega_hpl", 0.75 * self.omega_max)
        if self.tau_peak <= 0 or self.p_peak <= 0:
            raise DomainError("tau_peak and p_peak must be positive")
        if not (0.0 < self.omega_break < self.omega_max):
            raise DomainError(
                f"need 0 < omega_break < omega_max, got {self.omega_break}, {self.omega_max}")
        if not (self.omega_break <= self.omega_hpl < self.omega_max):
            raise DomainError(
                f"omega_hpl={self.omega_hpl} must lie in [omega_break, omega_max)")
        if not (0.0 < self.eta_j <= 1.0):
            raise DomainError(f"eta_j={self.eta_j} outside (0, 1]")
        if self.r_phase < 0 or self.c_iron1 < 0 or self.c_iron2 < 0:
            raise DomainError("loss coefficients must be nonnegative")
        corner = self.tau_peak * self.omega_break
        if abs(corner - self.p_peak) > 0.02 * self.p_peak:
            raise DomainError(
                f"envelope corner mismatch: tau_peak*omega_break={corner:.6g} "
                f"differs from p_peak={self.p_peak:.6g} by more than 2%")
        tau_kt = self.k_t * self.i_q_peak
        if abs(tau_kt - self.tau_peak) > 0.02 * self.tau_peak:
            raise DomainError(
                f"k_t*i_q_peak={tau_kt:.6g} differs from tau_peak={self.tau_peak:.6g} "
                f"by more than 2%")


@dataclass(frozen=True)
class EnvelopePoint:
    """One sample of the torque/power envelope."""

    omega: float
    tau_max: float
    p_out: float
    p_loss: float


def default_motor(eta_j: float = 0.90) -> MotorParams:
    """72 V, 1.5 kW / 9.37 Nm knee-drive preset used by the bundled configs.

    omega_break sits at the constant-torque/constant-power corner; omega_max
    anchors to the 4800 rpm no-load region. r_phase and c_iron1 are fixed
    plausible values; c_iron2 solves

        k_t*i_q_peak*omega_max = 1.5*r_phase*i_q_peak^2
                                 + c_iron1*omega_max + c_iron2*omega_max^2

    so that net output power vanishes at (i_q_peak, omega_max).
    """
    tau_peak = 9.37
    i_q_peak = 92.0
    p_peak = 1500.0
    omega_max = 4800.0 * RADS_PER_RPM
    r_phase = 0.05
    c_iron1 = 0.5
    copper = 1.5 * r_phase * i_q_peak ** 2
    c_iron2 = (tau_peak * omega_max - copper - c_iron1 * omega_max) / omega_max ** 2
    return MotorParams(
        tau_peak=tau_peak,
        i_q_peak=i_q_peak,
        k_t=tau_peak / i_q_peak,
        p_peak=p_peak,
        omega_break=p_peak / tau_peak,
        omega_max=omega_max,
        r_phase=r_phase,
        c_iron1=c_iron1,
        c_iron2=c_iron2,
        eta_j=eta_j,
    )


def max_torque(params: MotorParams, omega: float) -> float:
    """Available torque at motor speed omega >= 0 (Nm); continuous in omega."""
    if omega < 0:
        raise DomainError(f"omega={omega} must be nonnegative; pass |omega|")
    if omega <= params.omega_break:
        return params.tau_peak
    if omega >= params.omega_max:
        return 0.0
    tau = params.p_peak / omega
    if omega > params.omega_hpl:
        tau *= (params.omega_max - omega) / (params.omega_max - params.omega_hpl)
    return tau


def power_loss(params: MotorParams, i_q: float, omega: float) -> float:
    """Total copper + iron + mechanical loss (W), nonnegative."""
    return (1.5 * params.r_phase * i_q * i_q
            + params.c_iron1 * abs(omega)
            + params.c_iron2 * omega * omega)


def joint_torque(params: MotorParams, tau_m: float, k: float) -> float:
    """Joint-side torque tau_m * k * eta_j for reduction ratio k >= 0."""
    if k < 0:
        raise DomainError(f"reduction ratio k={k} must be nonnegative")
    return tau_m * k * params.eta_j


def envelope_table(params: MotorParams, n: int) -> list[EnvelopePoint]:
    """n uniform envelope samples over omega in [0, omega_max].

    Loss is evaluated at the envelope current i_q = tau_max/k_t.
    """
    if n < 2:
        raise DomainError(f"need at least 2 samples, got n={n}")
    step = params.omega_max / (n - 1)
    table = []
    for i in range(n):
        omega = params.omega_max if i == n - 1 else i * step
        tau = max_torque(params, omega)
        table.append(EnvelopePoint(
            omega=omega,
            tau_max=tau,
            p_out=tau * omega,
            p_loss=power_loss(params, tau / params.k_t, omega),
        ))
    return table
