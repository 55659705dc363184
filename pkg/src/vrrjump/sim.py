"""Forward simulation of explosive takeoff under the motor envelope.

Model closure: the robot is a point mass m_tot at the CoM, driven along the
vertical by the knee through the CoM Jacobian J(q2):

    omega_m = k(q2) * dq2                  motor speed
    tau_m   = max_torque(|omega_m|)        maximum-effort command
    tau_J   = tau_m * k(q2) * eta_j        joint torque
    m ydd   = tau_J / J(q2) - m g          CoM dynamics
    qdd     = (ydd - J'(q2) dq2^2) / J(q2) joint acceleration

Link rotational inertia and reflected actuator inertia are neglected. The
state (q2, dq2, w_motor) is integrated with classic fixed-step RK4; motor
work w_motor accumulates tau_m * omega_m.

Takeoff events:

* AngleCap -- q2 reaches the configured extension cap. Because dq2 grows like
  1/J near full extension, steps shrink as the cap approaches (each step
  covers at most a quarter of the remaining gap) so stage evaluations never
  cross the kinematic singularity; the loop lands on the cap within 1e-9 rad.
* ContactForceZero -- the ground reaction m*(ydd + g) = tau_J/J crosses zero
  while extending; the crossing is located by bisecting the step size. The
  event is disarmed at rest so a torqueless motor holds the pose instead of
  "taking off" with zero force.

If the commanded torque cannot lift the CoM at the initial pose the state is
held at rest until t_max (Timeout): the crouch posture is assumed supported,
which also keeps under-actuated optimizer candidates well defined. A state
that leaves the valid range mid-flight (knee collapsing past -pi, or the
crank angle leaving its working range) raises SimulationRangeError carrying
the last valid state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import DomainError, MechanismRangeError, SimulationRangeError
from .leg import KneeState, LegModel, com_height
from .mechanism import FrrParams, VrrParams, check_working_range
from .motor import MotorParams

_CAP_TOL = 1e-9
_MIN_SPEED = 1e-9


class TakeoffRule(str, Enum):
    CONTACT_FORCE_ZERO = "contact_force_zero"
    ANGLE_CAP = "angle_cap"
    EITHER = "either"


class Termination(str, Enum):
    CONTACT_FORCE_ZERO = "contact_force_zero"
    ANGLE_CAP = "angle_cap"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class SimConfig:
    """Initial pose, step size, horizon and takeoff detection rule."""

    q2_init: float
    dt: float = 1e-4
    t_max: float = 1.0
    q2_takeoff_cap: float = -0.05
    takeoff_rule: TakeoffRule = TakeoffRule.EITHER

    def __post_init__(self):
        if self.dt <= 0:
            raise DomainError(f"dt={self.dt} must be positive")
        if self.t_max < 10 * self.dt:
            raise DomainError(f"t_max={self.t_max} must be at least 10*dt")
        if not (self.q2_takeoff_cap <= -0.01):
            raise DomainError(
                f"q2_takeoff_cap={self.q2_takeoff_cap} must be <= -0.01 rad")
        if not (-math.pi <= self.q2_init < self.q2_takeoff_cap):
            raise DomainError(
                f"q2_init={self.q2_init} must lie in [-pi, cap={self.q2_takeoff_cap})")


@dataclass(frozen=True)
class SimState:
    """One trajectory sample; joint, CoM, motor and contact channels."""

    t: float
    q2: float
    dq2: float
    y_com: float
    dy_com: float
    tau_m: float
    tau_j: float
    omega_m: float
    p_m: float
    p_j: float
    f_contact: float
    w_motor: float


@dataclass
class TakeoffResult:
    w_takeoff: float
    h_jump: float
    t_takeoff: float
    q2_at_takeoff: float
    terminated_by: Termination
    trajectory: list[SimState] = field(default_factory=list)


def contact_force(leg: LegModel, q2: float, dq2: float, ddy_com: float) -> float:
    """Ground reaction m_tot*(ydd + g); takeoff once it reaches zero."""
    return leg.total_mass() * (ddy_com + leg.g)


def takeoff_energy(leg: LegModel, q2: float, dy_com: float) -> float:
    """Mechanical CoM energy 0.5*m*dy^2 + m*g*y(q2) at a state (J)."""
    m = leg.total_mass()
    return 0.5 * m * dy_com * dy_com + m * leg.g * com_height(leg, q2)


def jump_height(leg: LegModel, w_takeoff: float) -> float:
    """CoM rise above the fully extended stance implied by takeoff energy.

    Negative values mean the energy does not suffice to reach full extension.
    """
    if w_takeoff < 0:
        raise DomainError(f"w_takeoff={w_takeoff} must be nonnegative")
    return w_takeoff / (leg.total_mass() * leg.g) - leg.standing_com_height


def simulate_jump(leg: LegModel, motor: MotorParams,
                  mech: VrrParams | FrrParams, cfg: SimConfig,
                  record: bool = True) -> TakeoffResult:
    """Integrate a maximum-effort takeoff and report energy and height.

    With record=False the trajectory list is left empty (used by the
    optimizer); the scalar outputs are identical either way.
    """
    vrr = isinstance(mech, VrrParams)
    if vrr:
        check_working_range(mech, cfg.q2_init, cfg.q2_takeoff_cap)

    m_tot = leg.total_mass()
    g = leg.g
    jfac = leg.jacobian_scale
    jfac_half = 0.5 * jfac
    eta = motor.eta_j
    tau_peak = motor.tau_peak
    p_peak = motor.p_peak
    w_break = motor.omega_break
    w_max = motor.omega_max
    w_hpl = motor.omega_hpl
    derate = 1.0 / (w_max - w_hpl)
    cap = cfg.q2_takeoff_cap
    sin = math.sin
    cos = math.cos
    sqrt = math.sqrt

    if vrr:
        a_sq = (mech.s0 + mech.r) ** 2 + mech.r ** 2
        a_cos = 2.0 * mech.r * (mech.s0 + mech.r)
        k_num = math.pi * a_cos / mech.lead
        th_off = math.pi - mech.delta_theta
        k_const = 0.0
    else:
        k_const = mech.k_fixed

    def ratio(q2: float) -> float:
        if not vrr:
            return k_const
        th = q2 + th_off
        if th <= 0.0 or th >= math.pi:
            raise MechanismRangeError(
                f"crank angle theta={th:.6g} left (0, pi) at q2={q2:.6g}")
        return k_num * sin(th) / sqrt(a_sq - a_cos * cos(th))

    def envelope(aw: float) -> float:
        if aw <= w_break:
            return tau_peak
        if aw >= w_max:
            return 0.0
        tau = p_peak / aw
        if aw > w_hpl:
            tau *= (w_max - aw) * derate
        return tau

    def derivs(q2: float, dq2: float) -> tuple[float, float]:
        """(qdd, motor power) at a state."""
        k = ratio(q2)
        om = k * dq2
        tau = envelope(-om if om < 0.0 else om)
        jj = -jfac * sin(0.5 * q2)
        jp = -jfac_half * cos(0.5 * q2)
        ydd = tau * k * eta / (jj * m_tot) - g
        return (ydd - jp * dq2 * dq2) / jj, tau * om

    def joint_force(q2: float, dq2: float) -> float:
        """Contact force tau_J/J = tau_J * lambda, equal to m*(ydd + g)."""
        k = ratio(q2)
        tau = envelope(abs(k * dq2))
        return tau * k * eta / (-jfac * sin(0.5 * q2))

    def snapshot(t: float, q2: float, dq2: float, wm: float) -> SimState:
        k = ratio(q2)
        om = k * dq2
        tau_m = envelope(abs(om))
        tau_j = tau_m * k * eta
        jj = -jfac * sin(0.5 * q2)
        return SimState(
            t=t, q2=q2, dq2=dq2,
            y_com=2.0 * jfac * cos(0.5 * q2),
            dy_com=jj * dq2,
            tau_m=tau_m, tau_j=tau_j, omega_m=om,
            p_m=tau_m * om, p_j=eta * tau_m * om,
            f_contact=tau_j / jj,
            w_motor=wm,
        )

    def rk4(q2: float, dq2: float, wm: float, h: float):
        h2 = 0.5 * h
        a1, w1 = derivs(q2, dq2)
        v2 = dq2 + h2 * a1
        a2, w2 = derivs(q2 + h2 * dq2, v2)
        v3 = dq2 + h2 * a2
        a3, w3 = derivs(q2 + h2 * v2, v3)
        v4 = dq2 + h * a3
        a4, w4 = derivs(q2 + h * v3, v4)
        h6 = h / 6.0
        return (q2 + h6 * (dq2 + 2.0 * (v2 + v3) + v4),
                dq2 + h6 * (a1 + 2.0 * (a2 + a3) + a4),
                wm + h6 * (w1 + 2.0 * (w2 + w3) + w4))

    rule = cfg.takeoff_rule
    cap_armed = rule in (TakeoffRule.ANGLE_CAP, TakeoffRule.EITHER)
    force_armed = rule in (TakeoffRule.CONTACT_FORCE_ZERO, TakeoffRule.EITHER)

    q2, dq2, wm = cfg.q2_init, 0.0, 0.0
    t = 0.0
    trajectory: list[SimState] = []

    # Static hold: the commanded torque cannot start lifting the CoM.
    if joint_force(q2, 0.0) <= m_tot * g:
        if record:
            trajectory.append(snapshot(0.0, q2, 0.0, 0.0))
            trajectory.append(snapshot(cfg.t_max, q2, 0.0, 0.0))
        w = takeoff_energy(leg, q2, 0.0)
        return TakeoffResult(
            w_takeoff=w, h_jump=jump_height(leg, w), t_takeoff=cfg.t_max,
            q2_at_takeoff=q2, terminated_by=Termination.TIMEOUT,
            trajectory=trajectory)

    terminated = Termination.TIMEOUT
    force_hit = False
    try:
        while True:
            if q2 < -math.pi:
                raise MechanismRangeError(
                    f"knee collapsed past -pi (q2={q2:.6g})")
            if record:
                trajectory.append(snapshot(t, q2, dq2, wm))
            if force_hit:
                terminated = Termination.CONTACT_FORCE_ZERO
                break
            gap = cap - q2
            if gap <= _CAP_TOL:
                if cap_armed:
                    terminated = Termination.ANGLE_CAP
                    break
                raise MechanismRangeError(
                    f"knee reached the extension cap {cap:.6g} rad but the "
                    "takeoff rule only accepts a contact-force crossing")
            if t >= cfg.t_max - 1e-15:
                terminated = Termination.TIMEOUT
                break
            h = cfg.dt if cfg.t_max - t > cfg.dt else cfg.t_max - t
            if dq2 > 0.0:
                h_cap = 0.25 * gap / dq2
                if h_cap < h:
                    h = h_cap
            nq2, ndq2, nwm = rk4(q2, dq2, wm, h)
            if force_armed and dq2 > _MIN_SPEED and joint_force(nq2, ndq2) <= 0.0:
                lo, hi = 0.0, h
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    mq2, mdq2, _ = rk4(q2, dq2, wm, mid)
                    if joint_force(mq2, mdq2) <= 0.0:
                        hi = mid
                    else:
                        lo = mid
                nq2, ndq2, nwm = rk4(q2, dq2, wm, hi)
                h = hi
                force_hit = True
            q2, dq2, wm = nq2, ndq2, nwm
            t += h
    except MechanismRangeError as exc:
        last_state = None
        try:
            last_state = snapshot(t, q2, dq2, wm)
        except MechanismRangeError:
            if trajectory:
                last_state = trajectory[-1]
        raise SimulationRangeError(
            f"simulation left the valid range at t={t:.6g} s: {exc}",
            last_state=last_state) from exc

    jj = -jfac * math.sin(0.5 * q2)
    w = takeoff_energy(leg, q2, jj * dq2)
    return TakeoffResult(
        w_takeoff=w,
        h_jump=jump_height(leg, w),
        t_takeoff=t,
        q2_at_takeoff=q2,
        terminated_by=terminated,
        trajectory=trajectory,
    )


def ballistic_check(leg: LegModel, state: KneeState, duration: float,
                    dt: float = 1e-4) -> float:
    """Integrate the torqueless dynamics and return max |dE|/E over the window.

    Uses the same RK4 scheme as simulate_jump with tau = 0, for which the
    exact CoM motion is free fall and total mechanical energy is conserved;
    the return value measures pure integrator drift. Integration stops early
    if the knee leaves (-pi + 1e-3, -0.01).
    """
    if duration < 0 or dt <= 0:
        raise DomainError("duration must be >= 0 and dt > 0")
    jfac = leg.jacobian_scale
    jfac_half = 0.5 * jfac
    m = leg.total_mass()
    g = leg.g

    def accel(q2: float, dq2: float) -> float:
        jj = -jfac * math.sin(0.5 * q2)
        jp = -jfac_half * math.cos(0.5 * q2)
        return (-g - jp * dq2 * dq2) / jj

    def energy(q2: float, dq2: float) -> float:
        dy = -jfac * math.sin(0.5 * q2) * dq2
        return 0.5 * m * dy * dy + m * g * 2.0 * jfac * math.cos(0.5 * q2)

    q2, dq2 = state.q2, state.dq2
    e0 = energy(q2, dq2)
    worst = 0.0
    h2 = 0.5 * dt
    h6 = dt / 6.0
    for _ in range(int(round(duration / dt))):
        if not (-math.pi + 1e-3 < q2 < -0.01):
            break
        a1 = accel(q2, dq2)
        v2 = dq2 + h2 * a1
        a2 = accel(q2 + h2 * dq2, v2)
        v3 = dq2 + h2 * a2
        a3 = accel(q2 + h2 * v2, v3)
        v4 = dq2 + dt * a3
        a4 = accel(q2 + dt * v3, v4)
        q2 += h6 * (dq2 + 2.0 * (v2 + v3) + v4)
        dq2 += h6 * (a1 + 2.0 * (a2 + a3) + a4)
        drift = abs(energy(q2, dq2) - e0) / abs(e0)
        if drift > worst:
            worst = drift
    return worst
