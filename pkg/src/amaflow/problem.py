"""Two-block problem instances and the residuals that define "solved".

A problem is

    minimize  f(x) + h1(x) + g(z) + h2(z)
    subject to  A x + B z = b

with f strongly convex, h1 and h2 smooth, and A nonzero. The Lagrangian uses
the multiplier convention ``<y, b - Ax - Bz>``; optimality is measured through
prox fixed points at unit step, which vanish exactly at saddle points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import CapabilityError, DimensionMismatchError
from .functions import SeparableFunction
from .linop import LinearMap, as_vector, operator_norm

__all__ = ["PrimalDualState", "TwoBlockProblem", "KKTResidual"]


@dataclass(frozen=True)
class PrimalDualState:
    """A primal-dual triple (x, z, y) stamped with a time or iteration index."""

    x: np.ndarray
    z: np.ndarray
    y: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "z", np.asarray(self.z, dtype=float))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))

    def with_time(self, t: float) -> "PrimalDualState":
        return PrimalDualState(self.x, self.z, self.y, t)


class KKTResidual(NamedTuple):
    """Prox fixed-point violations; all three are zero exactly at saddles."""

    rx: float
    rz: float
    feas: float

    @property
    def max(self) -> float:
        return max(self.rx, self.rz, self.feas)


@dataclass(eq=False)
class TwoBlockProblem:
    """Immutable problem data; all residual/objective operations live here."""

    f: SeparableFunction
    h1: SeparableFunction
    g: SeparableFunction
    h2: SeparableFunction
    A: LinearMap
    B: LinearMap
    b: np.ndarray
    norm_A: float = field(init=False, repr=False)
    norm_B: float = field(init=False, repr=False)

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=float)
        if self.b.ndim != 1:
            raise ValueError("right-hand side b must be a vector")
        if self.f.strong_convexity <= 0.0:
            raise ValueError(
                f"f must be strongly convex; got modulus {self.f.strong_convexity}"
            )
        for name, fun in (("h1", self.h1), ("h2", self.h2)):
            if fun.grad_lipschitz is None:
                raise ValueError(f"{name} must be smooth (gradient available)")
        if self.A.dim_in != self.f.dim or self.h1.dim != self.f.dim:
            raise DimensionMismatchError("x block", self.f.dim, self.A.dim_in)
        if self.B.dim_in != self.g.dim or self.h2.dim != self.g.dim:
            raise DimensionMismatchError("z block", self.g.dim, self.B.dim_in)
        if self.A.dim_out != self.b.shape[0] or self.B.dim_out != self.b.shape[0]:
            raise DimensionMismatchError("constraint rows", self.b.shape[0], self.A.dim_out)
        self.norm_A = operator_norm(self.A)
        self.norm_B = operator_norm(self.B)
        if self.norm_A <= 0.0:
            raise ValueError("A must be a nonzero operator")

    @property
    def dim_x(self) -> int:
        return self.f.dim

    @property
    def dim_z(self) -> int:
        return self.g.dim

    @property
    def dim_y(self) -> int:
        return self.b.shape[0]

    def state(self, x, z, y, t: float = 0.0) -> PrimalDualState:
        """Build a state, checking dimensions against this problem."""
        return PrimalDualState(
            as_vector(x, self.dim_x, "x"),
            as_vector(z, self.dim_z, "z"),
            as_vector(y, self.dim_y, "y"),
            t,
        )

    def primal_objective(self, x, z) -> float:
        x = as_vector(x, self.dim_x, "x")
        z = as_vector(z, self.dim_z, "z")
        return self.f(x) + self.h1(x) + self.g(z) + self.h2(z)

    def lagrangian(self, s: PrimalDualState) -> float:
        y = as_vector(s.y, self.dim_y, "y")
        primal = self.primal_objective(s.x, s.z)
        if math.isinf(primal):
            return primal
        gap = self.b - self.A.apply(s.x) - self.B.apply(s.z)
        return primal + float(y @ gap)

    def dual_objective(self, y) -> float:
        """Fenchel dual value ``-f*(A*y) - g*(B*y) + <y, b>``.

        Only available when the smooth couplings are absent: with h1 or h2
        nonzero the dual involves infimal convolutions this toolkit does not
        approximate.
        """
        if self.h1.kind != "zero" or self.h2.kind != "zero":
            raise CapabilityError("dual objective requires h1 = h2 = 0")
        y = as_vector(y, self.dim_y, "y")
        f_star = self.f.conj_eval(self.A.adjoint_apply(y))
        g_star = self.g.conj_eval(self.B.adjoint_apply(y))
        if math.isinf(f_star) or math.isinf(g_star):
            return -math.inf
        return -f_star - g_star + float(y @ self.b)

    def feasibility_residual(self, s: PrimalDualState) -> float:
        x = as_vector(s.x, self.dim_x, "x")
        z = as_vector(s.z, self.dim_z, "z")
        return float(np.linalg.norm(self.A.apply(x) + self.B.apply(z) - self.b))

    def kkt_residual(self, s: PrimalDualState) -> KKTResidual:
        """Unit-step prox fixed-point residuals for the optimality system."""
        x = as_vector(s.x, self.dim_x, "x")
        z = as_vector(s.z, self.dim_z, "z")
        y = as_vector(s.y, self.dim_y, "y")
        rx = x - self.f.prox(1.0, x + self.A.adjoint_apply(y) - self.h1.grad(x))
        rz = z - self.g.prox(1.0, z + self.B.adjoint_apply(y) - self.h2.grad(z))
        return KKTResidual(
            float(np.linalg.norm(rx)),
            float(np.linalg.norm(rz)),
            self.feasibility_residual(s),
        )
