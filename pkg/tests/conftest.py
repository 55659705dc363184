import dataclasses

import pytest

from vrrjump import (JacobianMode, LegModel, MotorParams, SimConfig,
                     VrrParams, default_motor)


@pytest.fixture
def leg() -> LegModel:
    """Full-scale reference leg, geometric Jacobian."""
    return LegModel(l1=0.45, l2=0.45, a1=0.225, a2=0.225,
                    m1=2.5, m2=5.0, m3=20.0)


@pytest.fixture
def leg_paper() -> LegModel:
    return LegModel(l1=0.45, l2=0.45, a1=0.225, a2=0.225,
                    m1=2.5, m2=5.0, m3=20.0,
                    jacobian_mode=JacobianMode.PAPER_LITERAL)


@pytest.fixture
def motor() -> MotorParams:
    return default_motor()


@pytest.fixture
def mech_opt() -> VrrParams:
    """Reference optimized mechanism: r=47 mm, S0=150 mm."""
    return VrrParams(r=0.047, s0=0.150)


@pytest.fixture
def deep_crouch() -> SimConfig:
    return SimConfig(q2_init=-2.6180)


def motor_variant(base: MotorParams, tau_peak: float | None = None,
                  p_peak: float | None = None) -> MotorParams:
    """Rescale peak torque/power keeping the envelope invariants consistent."""
    tau = base.tau_peak if tau_peak is None else tau_peak
    p = base.p_peak if p_peak is None else p_peak
    return dataclasses.replace(
        base, tau_peak=tau, p_peak=p,
        i_q_peak=tau / base.k_t,
        omega_break=p / tau,
        omega_hpl=max(0.75 * base.omega_max, p / tau),
    )
