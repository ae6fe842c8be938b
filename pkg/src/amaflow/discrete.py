"""Alternating-minimization iterations as standalone solvers.

Both solvers are the unit-step explicit Euler discretization of the
continuous system in :mod:`amaflow.dynamics`; they share its
:func:`~amaflow.dynamics.alternating_update`, so a trajectory from
``integrate(..., method="euler", h=1)`` and a solver run with the same
schedules agree exactly. Schedules are sampled at t = k for iteration k.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import CapabilityError, ConditionError, ConvergenceError
from .dynamics import Trajectory, TrajectorySample, alternating_update
from .linop import ScaledIdentityMap
from .problem import PrimalDualState, TwoBlockProblem
from .schedules import ParameterSchedule, ScalarSchedule

__all__ = ["SolveConfig", "SolveResult", "prox_ama_step", "prox_ama_run", "ama_run"]


@dataclass(frozen=True)
class SolveConfig:
    max_iters: int = 20000
    tol_kkt: float = 1e-6
    tol_feas: float = 1e-6
    record_every: int = 1

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be positive, got {self.max_iters}")
        if self.tol_kkt <= 0.0 or self.tol_feas <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")


@dataclass
class SolveResult:
    final: PrimalDualState
    iterates: Trajectory
    status: str  # converged | max_iters | error
    iterations_used: int
    message: str = ""


def prox_ama_step(p: TwoBlockProblem, M1_k, M2_k, c_k: float,
                  s_k: PrimalDualState, tau_k: Optional[float] = None) -> PrimalDualState:
    """One iteration: x-argmin, z-argmin with the fresh x, multiplier ascent."""
    x_new, z_new, w = alternating_update(p, M1_k, M2_k, c_k, tau_k, s_k)
    return PrimalDualState(x_new, z_new, s_k.y + w, s_k.t + 1)


def _run_loop(p: TwoBlockProblem, snapshot, s0: PrimalDualState, cfg: SolveConfig,
              method: str, require_uniform: bool) -> SolveResult:
    def sample(k, state):
        return TrajectorySample(float(k), state, p.feasibility_residual(state),
                                p.kkt_residual(state))

    s = s0.with_time(0.0)
    first = sample(0, s)
    samples = [first]
    if _within(first.kkt, cfg):
        traj = Trajectory(samples, method, 1.0, 0.0)
        return SolveResult(s, traj, "converged", 0)

    status, message = "max_iters", ""
    used = cfg.max_iters
    for k in range(cfg.max_iters):
        m1_k, m2_k, c_k, tau_k = snapshot(k)
        try:
            x_new, z_new, w = alternating_update(p, m1_k, m2_k, c_k, tau_k, s,
                                                 require_uniform=require_uniform)
        except (ConvergenceError, ConditionError) as exc:
            status, message, used = "error", str(exc), k
            break
        s = PrimalDualState(x_new, z_new, s.y + w, float(k + 1))
        smp = sample(k + 1, s)
        done = _within(smp.kkt, cfg)
        if done or (k + 1) % cfg.record_every == 0 or k + 1 == cfg.max_iters:
            samples.append(smp)
        if done:
            status, used = "converged", k + 1
            break

    if status == "error" and samples[-1].t != s.t:
        samples.append(sample(s.t, s))
    traj = Trajectory(samples, method, 1.0, float(used))
    return SolveResult(s, traj, status, used, message)


def _within(kkt, cfg: SolveConfig) -> bool:
    return kkt.rx <= cfg.tol_kkt and kkt.rz <= cfg.tol_kkt and kkt.feas <= cfg.tol_feas


def prox_ama_run(p: TwoBlockProblem, sched: ParameterSchedule, s0: PrimalDualState,
                 cfg: SolveConfig) -> SolveResult:
    """Iterate the proximal alternating scheme until the residuals pass."""
    tau = sched.tau

    def snapshot(k):
        t = float(k)
        return (sched.M1.at(t), sched.M2.at(t), sched.c.value_at(t),
                tau.value_at(t) if tau is not None else None)

    return _run_loop(p, snapshot, s0, cfg, "prox-ama", require_uniform=True)


def ama_run(p: TwoBlockProblem, c_schedule: ScalarSchedule, s0: PrimalDualState,
            cfg: SolveConfig) -> SolveResult:
    """The classic alternating scheme: no metrics, no smooth couplings.

    Requires h1 = h2 = 0. The z-subproblem is only required to be attained
    here, not strongly convex, so the uniform-positivity gate is relaxed.
    """
    if p.h1.kind != "zero" or p.h2.kind != "zero":
        raise CapabilityError("the plain alternating scheme requires h1 = h2 = 0")
    zero_x = ScaledIdentityMap(p.dim_x, 0.0)
    zero_z = ScaledIdentityMap(p.dim_z, 0.0)

    def snapshot(k):
        return (zero_x, zero_z, c_schedule.value_at(float(k)), None)

    return _run_loop(p, snapshot, s0, cfg, "ama", require_uniform=False)
