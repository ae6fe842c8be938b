"""Catalog of convex functions with closed-form prox/gradient/conjugate.

Each function knows its strong-convexity modulus ``strong_convexity`` and, for
smooth kinds, the Lipschitz constant of its gradient ``grad_lipschitz``
(``None`` when the gradient does not exist). Values are extended-real:
indicators return ``math.inf`` outside their set, never a float overflow.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import CapabilityError, ConvergenceError
from .linop import LinearMap, as_vector, min_eigenvalue_sym, operator_norm

__all__ = [
    "SeparableFunction",
    "QuadraticDistance",
    "L1Norm",
    "BoxIndicator",
    "ZeroFunction",
    "QuadraticForm",
]


class SeparableFunction:
    """Base class: evaluation, prox, gradient, conjugate capabilities.

    Capabilities not available for a kind raise :class:`CapabilityError`.
    ``conj_grad`` is single-valued exactly when ``strong_convexity > 0``; the
    base implementation runs a proximal-point iteration so that any strongly
    convex kind works even without a closed form.
    """

    kind: str
    dim: int
    strong_convexity: float = 0.0
    grad_lipschitz: float | None = None

    def __call__(self, x) -> float:
        raise NotImplementedError

    def prox(self, gamma: float, x) -> np.ndarray:
        raise NotImplementedError

    def grad(self, x) -> np.ndarray:
        raise CapabilityError(f"{self.kind} has no gradient")

    def conj_eval(self, s) -> float:
        raise CapabilityError(f"{self.kind} has no closed-form conjugate")

    def conj_grad(self, s) -> np.ndarray:
        # argmax_p { <s,p> - fun(p) }: proximal-point iteration with step
        # 1/sigma, linearly convergent by strong convexity.
        if self.strong_convexity <= 0.0:
            raise CapabilityError(
                f"{self.kind} is not strongly convex; conjugate gradient is set-valued"
            )
        s = as_vector(s, self.dim, "conj_grad input")
        eta = 1.0 / self.strong_convexity
        p = np.zeros(self.dim)
        for _ in range(10000):
            p_next = self.prox(eta, p + eta * s)
            step = float(np.linalg.norm(p_next - p))
            p = p_next
            if step < 1e-12:
                return p
        raise ConvergenceError(
            f"conj_grad fallback for {self.kind} did not converge", best_estimate=p
        )

    def _check_gamma(self, gamma: float) -> float:
        gamma = float(gamma)
        if gamma <= 0.0:
            raise ValueError(f"prox step must be positive, got {gamma}")
        return gamma


class QuadraticDistance(SeparableFunction):
    """``(w/2)·||x - d||^2`` with ``w > 0``; strongly convex and smooth."""

    kind = "quadratic_distance"

    def __init__(self, d, weight: float = 1.0):
        self.d = np.asarray(d, dtype=float)
        if self.d.ndim != 1:
            raise ValueError("anchor d must be a vector")
        self.weight = float(weight)
        if self.weight <= 0.0:
            raise ValueError(f"weight must be positive, got {weight}")
        self.dim = self.d.shape[0]
        self.strong_convexity = self.weight
        self.grad_lipschitz = self.weight

    def __call__(self, x):
        x = as_vector(x, self.dim, "eval input")
        return 0.5 * self.weight * float(np.sum((x - self.d) ** 2))

    def prox(self, gamma, x):
        gamma = self._check_gamma(gamma)
        x = as_vector(x, self.dim, "prox input")
        return (x + gamma * self.weight * self.d) / (1.0 + gamma * self.weight)

    def grad(self, x):
        x = as_vector(x, self.dim, "grad input")
        return self.weight * (x - self.d)

    def conj_grad(self, s):
        s = as_vector(s, self.dim, "conj_grad input")
        return self.d + s / self.weight

    def conj_eval(self, s):
        s = as_vector(s, self.dim, "conjugate input")
        return float(np.sum(s**2)) / (2.0 * self.weight) + float(s @ self.d)


class L1Norm(SeparableFunction):
    """``w·||x||_1``; ``weight = 0`` degenerates to the zero function."""

    kind = "l1"

    def __init__(self, dim: int, weight: float = 1.0):
        if dim <= 0:
            raise ValueError(f"dimension must be positive, got {dim}")
        self.weight = float(weight)
        if self.weight < 0.0:
            raise ValueError(f"weight must be nonnegative, got {weight}")
        self.dim = dim
        self.grad_lipschitz = None

    def __call__(self, x):
        x = as_vector(x, self.dim, "eval input")
        return self.weight * float(np.sum(np.abs(x)))

    def prox(self, gamma, x):
        gamma = self._check_gamma(gamma)
        x = as_vector(x, self.dim, "prox input")
        thresh = gamma * self.weight
        return np.sign(x) * np.maximum(np.abs(x) - thresh, 0.0)

    def conj_eval(self, s):
        # Indicator of the weight-radius sup-norm ball.
        s = as_vector(s, self.dim, "conjugate input")
        if float(np.max(np.abs(s), initial=0.0)) <= self.weight + 1e-12:
            return 0.0
        return math.inf


class BoxIndicator(SeparableFunction):
    """Indicator of the box ``[lo, hi]`` (componentwise)."""

    kind = "box_indicator"

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        if self.lo.shape != self.hi.shape or self.lo.ndim != 1:
            raise ValueError("box bounds must be equal-length vectors")
        if np.any(self.lo > self.hi):
            raise ValueError("box has lo > hi in some component")
        self.dim = self.lo.shape[0]
        self.grad_lipschitz = None

    def __call__(self, x):
        x = as_vector(x, self.dim, "eval input")
        inside = np.all(x >= self.lo - 1e-12) and np.all(x <= self.hi + 1e-12)
        return 0.0 if inside else math.inf

    def prox(self, gamma, x):
        self._check_gamma(gamma)
        x = as_vector(x, self.dim, "prox input")
        return np.clip(x, self.lo, self.hi)

    def conj_eval(self, s):
        # Support function of the box.
        s = as_vector(s, self.dim, "conjugate input")
        return float(np.sum(np.maximum(self.lo * s, self.hi * s)))


class ZeroFunction(SeparableFunction):
    """Identically zero; the smooth couplings h1, h2 default to this."""

    kind = "zero"

    def __init__(self, dim: int):
        if dim <= 0:
            raise ValueError(f"dimension must be positive, got {dim}")
        self.dim = dim
        self.grad_lipschitz = 0.0

    def __call__(self, x):
        as_vector(x, self.dim, "eval input")
        return 0.0

    def prox(self, gamma, x):
        self._check_gamma(gamma)
        return as_vector(x, self.dim, "prox input").copy()

    def grad(self, x):
        as_vector(x, self.dim, "grad input")
        return np.zeros(self.dim)

    def conj_eval(self, s):
        # Indicator of the origin.
        s = as_vector(s, self.dim, "conjugate input")
        return 0.0 if float(np.max(np.abs(s), initial=0.0)) <= 1e-12 else math.inf


class QuadraticForm(SeparableFunction):
    """``(1/2)<x, Qx> + <q, x>`` for symmetric PSD ``Q``.

    Prox and conjugate gradient go through dense solves. No closed-form
    conjugate value is exposed.
    """

    kind = "quadratic_form"

    def __init__(self, Q: LinearMap, q):
        self.q = np.asarray(q, dtype=float)
        if self.q.ndim != 1:
            raise ValueError("linear term q must be a vector")
        if Q.dim_in != Q.dim_out or Q.dim_in != self.q.shape[0]:
            raise ValueError("Q must be square and match the dimension of q")
        self.Q = Q
        self.dim = self.q.shape[0]
        self._Qmat = Q.as_matrix()
        sigma = min_eigenvalue_sym(Q)
        if sigma < -1e-10:
            raise ValueError(f"Q must be positive semidefinite; min eigenvalue {sigma:.3e}")
        self.strong_convexity = max(sigma, 0.0)
        self.grad_lipschitz = operator_norm(Q)

    def __call__(self, x):
        x = as_vector(x, self.dim, "eval input")
        return 0.5 * float(x @ (self._Qmat @ x)) + float(self.q @ x)

    def prox(self, gamma, x):
        gamma = self._check_gamma(gamma)
        x = as_vector(x, self.dim, "prox input")
        lhs = np.eye(self.dim) + gamma * self._Qmat
        return np.linalg.solve(lhs, x - gamma * self.q)

    def grad(self, x):
        x = as_vector(x, self.dim, "grad input")
        return self._Qmat @ x + self.q

    def conj_grad(self, s):
        if self.strong_convexity <= 0.0:
            raise CapabilityError("quadratic_form with singular Q: conjugate gradient is set-valued")
        s = as_vector(s, self.dim, "conj_grad input")
        return np.linalg.solve(self._Qmat, s - self.q)
