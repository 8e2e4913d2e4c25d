"""Vector arithmetic, the objective contract, and shared numerical utilities.

Iterates, gradients, residuals, and vertices are all plain 1-D float64
numpy arrays.  Scalars are 64-bit floats throughout; randomness is confined
to explicit seed parameters.
"""

import math
from dataclasses import dataclass

import numpy as np


class OptError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(OptError):
    """Operands with incompatible dimensions."""


class InfeasibleError(OptError):
    """A point (or requested construction) lies outside the feasible region."""


class ConvergenceError(OptError):
    """An iterative routine ran out of iterations.

    Carries the last observed residual so callers can judge how close it got.
    """

    def __init__(self, message, last_residual=None):
        super().__init__(message)
        self.last_residual = last_residual


class CriticalPointError(OptError):
    """An operation that is undefined at a critical point (zero gradient)."""


def as_vector(x):
    """Coerce array-like input to a 1-D float64 array, rejecting non-finite entries."""
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.size == 0:
        raise DimensionError("expected at least one entry")
    if not np.all(np.isfinite(v)):
        raise OptError("vector contains non-finite entries")
    return v


def inner(a, b):
    """Euclidean inner product of two vectors of equal dimension."""
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.size != b.size:
        raise DimensionError("inner product of dimensions %d and %d" % (a.size, b.size))
    return float(np.dot(a, b))


def norm(a):
    """Euclidean norm."""
    return float(np.linalg.norm(np.asarray(a, dtype=float).reshape(-1)))


class Objective:
    """Evaluation/gradient contract shared by every solver.

    Subclasses implement ``eval`` and ``grad``.  The optional constants are
    declared by the subclass (never estimated implicitly) and default to
    unknown.  ``known_optimum`` is the optimal objective value when the
    caller knows it, used only for gap reporting in tests and reports.
    """

    smoothness_L = None
    strong_convexity_S = None
    grad_dominated_mu = None
    known_optimum = None
    is_quadratic = False

    def eval(self, x):
        raise NotImplementedError

    def grad(self, x):
        raise NotImplementedError

    def directional_curvature(self, d):
        """Second derivative of t -> f(x + t*d); constant for quadratics.

        Only objectives declaring quadratic structure provide it; it is what
        the closed-form line search consumes.
        """
        raise OptError("objective does not declare quadratic structure")


@dataclass
class SmoothnessEstimate:
    """Sampled upper bound on the gradient Lipschitz constant."""

    L_hat: float
    num_pairs: int
    seed: int


def _sample_feasible(region, rng, num_directions=4):
    # random convex combination of oracle vertices for random directions;
    # stays projection-free and inside the region by convexity
    points = []
    for _ in range(num_directions):
        c = rng.standard_normal(region.dim)
        points.append(region.lmo(c).point)
    weights = rng.dirichlet(np.ones(len(points)))
    out = np.zeros(region.dim)
    for w, p in zip(weights, points):
        out += w * p
    return out


def estimate_smoothness(obj, region, num_pairs=1000, seed=0, safety=1.0):
    """Estimate the smoothness constant from sampled feasible pairs.

    Draws pairs of random convex combinations of oracle outputs and returns
    ``safety`` times the largest difference quotient
    ||grad f(y) - grad f(x)|| / ||y - x||.  Deterministic given the seed.
    """
    if num_pairs < 1:
        raise OptError("num_pairs must be >= 1")
    if safety < 1.0:
        raise OptError("safety factor must be >= 1")
    rng = np.random.default_rng(seed)
    best = 0.0
    degenerate = 0
    for _ in range(num_pairs):
        x = _sample_feasible(region, rng)
        y = _sample_feasible(region, rng)
        gap = norm(y - x)
        if gap <= 1e-15:
            degenerate += 1
            continue
        quotient = norm(np.asarray(obj.grad(y), float) - np.asarray(obj.grad(x), float)) / gap
        if quotient > best:
            best = quotient
    if degenerate == num_pairs:
        raise OptError("all sampled pairs were degenerate (region may be a single point)")
    return SmoothnessEstimate(L_hat=safety * best, num_pairs=num_pairs, seed=seed)


def check_gradient(obj, x, h=1e-6):
    """Largest coordinate-wise gap between grad(x) and a central finite difference."""
    if h <= 0:
        raise OptError("finite-difference step must be positive")
    x = as_vector(x)
    g = as_vector(obj.grad(x))
    if g.size != x.size:
        raise DimensionError("gradient dimension %d does not match point dimension %d"
                             % (g.size, x.size))
    worst = 0.0
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        f_plus = float(obj.eval(x + step))
        f_minus = float(obj.eval(x - step))
        if not (math.isfinite(f_plus) and math.isfinite(f_minus)):
            raise OptError("objective is non-finite near the probe point")
        worst = max(worst, abs((f_plus - f_minus) / (2.0 * h) - g[i]))
    return worst
