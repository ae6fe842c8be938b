"""Lyapunov energy, monotonicity checking, and run summaries.

The energy of a state s = (x, z, y) against a reference saddle point
s* = (x*, z*, y*) at time t is

    E = (2 sigma c(t) - c(t)^2 |A|^2) |x - x*|^2
      + c(t) |x - x*|^2_{M1(t)}
      + |z - z*|^2_{c(t) M2(t) + c(t)^2 B*B}
      + |y - y*|^2

which is nonincreasing along exact solutions of the continuous system for
validated schedules. Discrete trajectories satisfy it up to integrator error,
which the monotonicity check absorbs with a small per-step slack.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .dynamics import Trajectory
from .problem import PrimalDualState, TwoBlockProblem
from .schedules import ParameterSchedule, ValidationReport

__all__ = ["EnergySample", "energy", "check_energy_monotone", "SummaryReport", "report"]

REF_KKT_TOL = 1e-6


@dataclass(frozen=True)
class EnergySample:
    t: float
    energy: float
    components: tuple  # (x-term, x-metric-term, z-metric-term, y-term)


def _check_reference(p: TwoBlockProblem, ref: PrimalDualState) -> None:
    res = p.kkt_residual(ref)
    if res.max > REF_KKT_TOL:
        raise ValueError(
            f"reference state is not a verified saddle point: max residual {res.max:.3e}"
        )


def energy(p: TwoBlockProblem, sched: ParameterSchedule, t: float,
           s: PrimalDualState, ref: PrimalDualState) -> EnergySample:
    """Evaluate the energy of ``s`` against a verified reference saddle."""
    _check_reference(p, ref)
    c = sched.c.value_at(t)
    dx = s.x - ref.x
    dz = s.z - ref.z
    dy = s.y - ref.y
    sigma = p.f.strong_convexity
    x_term = (2.0 * sigma * c - c * c * p.norm_A**2) * float(dx @ dx)
    x_metric = c * float(dx @ sched.M1.at(t).apply(dx))
    bdz = p.B.apply(dz)
    z_metric = c * float(dz @ sched.M2.at(t).apply(dz)) + c * c * float(bdz @ bdz)
    y_term = float(dy @ dy)
    total = x_term + x_metric + z_metric + y_term
    return EnergySample(t, total, (x_term, x_metric, z_metric, y_term))


def check_energy_monotone(traj: Trajectory, ref: Optional[PrimalDualState] = None,
                          p: Optional[TwoBlockProblem] = None,
                          sched: Optional[ParameterSchedule] = None):
    """Verify nonincrease of the energy along a recorded trajectory.

    Uses the energies recorded on the samples when present; otherwise all of
    ``ref``, ``p`` and ``sched`` must be supplied so the energies can be
    recomputed. Each step is allowed slack 1e-6 * (1 + E_i) for integrator
    error. Returns ``(passed, max_violation)``.
    """
    if len(traj.samples) < 2:
        raise ValueError("monotonicity check needs at least two samples")
    values = traj.energies()
    if any(v is None for v in values):
        if p is None or sched is None or ref is None:
            raise ValueError(
                "trajectory has no recorded energies; supply p, sched and ref"
            )
        values = [energy(p, sched, smp.t, smp.state, ref).energy
                  for smp in traj.samples]
    worst = 0.0
    for e_prev, e_next in zip(values, values[1:]):
        slack = 1e-6 * (1.0 + e_prev)
        worst = max(worst, e_next - e_prev - slack)
    return worst <= 0.0, max(0.0, worst)


@dataclass
class SummaryReport:
    """Structured outcome of a run, ready for serialization."""

    status: str
    kind: str  # "discrete" | "continuous"
    iterations: Optional[int]
    horizon: Optional[float]
    final_t: Optional[float]
    final_feas: Optional[float]
    final_kkt_rx: Optional[float]
    final_kkt_rz: Optional[float]
    energy_start: Optional[float] = None
    energy_end: Optional[float] = None
    energy_monotone: Optional[bool] = None
    energy_max_violation: Optional[float] = None
    time_to_tolerance: Optional[float] = None
    validation: Optional[ValidationReport] = None
    message: str = ""

    def as_dict(self) -> dict:
        out = {
            "status": self.status,
            "kind": self.kind,
            "iterations": self.iterations,
            "horizon": self.horizon,
            "final_t": self.final_t,
            "final_feas": self.final_feas,
            "final_kkt_rx": self.final_kkt_rx,
            "final_kkt_rz": self.final_kkt_rz,
        }
        if self.energy_start is not None:
            out.update({
                "energy_start": self.energy_start,
                "energy_end": self.energy_end,
                "energy_monotone": self.energy_monotone,
                "energy_max_violation": self.energy_max_violation,
            })
        if self.time_to_tolerance is not None:
            out["time_to_tolerance"] = self.time_to_tolerance
        if self.validation is not None:
            out["validation_mode"] = self.validation.mode
            out["validation_passed"] = self.validation.passed
            failed = self.validation.failed_rules()
            if failed:
                out["validation_failed_rules"] = ",".join(failed)
        if self.message:
            out["message"] = self.message
        return out


def _first_time_within(traj: Trajectory, tol: float) -> Optional[float]:
    for smp in traj.samples:
        if max(smp.kkt.rx, smp.kkt.rz, smp.feas) <= tol:
            return smp.t
    return None


def report(result_or_traj, p: TwoBlockProblem,
           ref: Optional[PrimalDualState] = None,
           sched: Optional[ParameterSchedule] = None,
           validation: Optional[ValidationReport] = None,
           tol: float = 1e-6) -> SummaryReport:
    """Summarize a solver result or a raw trajectory.

    The energy section appears only when it can be computed: recorded
    energies on the trajectory, or a reference plus schedules to recompute
    them. ``time_to_tolerance`` reports when all residuals first dropped
    below ``tol`` among the recorded samples.
    """
    status = "ok"
    message = ""
    iterations = None
    if isinstance(result_or_traj, Trajectory):
        traj = result_or_traj
        kind = "discrete" if traj.method in ("prox-ama", "ama") else "continuous"
    else:
        traj = result_or_traj.iterates
        status = result_or_traj.status
        message = result_or_traj.message
        iterations = result_or_traj.iterations_used
        kind = "discrete"

    if not traj.samples:
        return SummaryReport("error", kind, iterations, None, None, None, None, None,
                             validation=validation, message=message or "empty trajectory")

    last = traj.final
    rep = SummaryReport(
        status=status,
        kind=kind,
        iterations=iterations,
        horizon=traj.horizon,
        final_t=last.t,
        final_feas=last.feas,
        final_kkt_rx=last.kkt.rx,
        final_kkt_rz=last.kkt.rz,
        validation=validation,
        message=message,
    )
    rep.time_to_tolerance = _first_time_within(traj, tol)

    energies = traj.energies()
    have_recorded = len(traj.samples) >= 2 and all(v is not None for v in energies)
    can_recompute = ref is not None and sched is not None and len(traj.samples) >= 2
    if have_recorded or can_recompute:
        if not have_recorded:
            energies = [energy(p, sched, smp.t, smp.state, ref).energy
                        for smp in traj.samples]
        rep.energy_start = float(energies[0])
        rep.energy_end = float(energies[-1])
        if have_recorded:
            ok, worst = check_energy_monotone(traj)
        else:
            ok, worst = check_energy_monotone(traj, ref, p, sched)
        rep.energy_monotone = ok
        rep.energy_max_violation = worst
    return rep
