"""Benchmark objectives and synthetic instance generators.

Five problem families: squared distance, least squares, regularized
logistic loss, the Beckmann congestion potential over a link network,
and Huber-loss matrix completion, plus a generic quadratic.  Matrix
iterates are flattened row-major so every solver sees one dense vector
representation.  Generators are deterministic given their seed.
"""

import math

import numpy as np

from .core import DimensionError, InfeasibleError, Objective, OptError, as_vector
from .regions import DagNetwork, project_l1


class SquaredDistance(Objective):
    """f(x) = scale * ||x - center||^2."""

    def __init__(self, center, scale=1.0, known_optimum=None):
        self.center = as_vector(center)
        if scale <= 0:
            raise OptError("scale must be positive")
        self.scale = float(scale)
        self.smoothness_L = 2.0 * self.scale
        self.strong_convexity_S = 2.0 * self.scale
        self.grad_dominated_mu = 2.0 * self.scale
        self.known_optimum = known_optimum
        self.is_quadratic = True

    def _check(self, x):
        x = as_vector(x)
        if x.size != self.center.size:
            raise DimensionError("point dimension %d, objective dimension %d"
                                 % (x.size, self.center.size))
        return x

    def eval(self, x):
        r = self._check(x) - self.center
        return self.scale * float(np.dot(r, r))

    def grad(self, x):
        return 2.0 * self.scale * (self._check(x) - self.center)

    def directional_curvature(self, d):
        d = as_vector(d)
        return 2.0 * self.scale * float(np.dot(d, d))


class LeastSquaresInstance(Objective):
    """f(x) = ||Ax - y||^2 with the smoothness constant 2*sigma_max(A)^2."""

    def __init__(self, A, y):
        self.A = np.asarray(A, dtype=float)
        if self.A.ndim != 2:
            raise DimensionError("design matrix must be 2-D")
        self.y = as_vector(y)
        if self.y.size != self.A.shape[0]:
            raise DimensionError("matrix has %d rows, observations have %d"
                                 % (self.A.shape[0], self.y.size))
        svals = np.linalg.svd(self.A, compute_uv=False)
        self.smoothness_L = 2.0 * float(svals[0]) ** 2
        smin = float(svals[-1])
        if self.A.shape[0] >= self.A.shape[1] and smin > 0:
            self.strong_convexity_S = 2.0 * smin ** 2
            self.grad_dominated_mu = self.strong_convexity_S
        self.is_quadratic = True

    def _check(self, x):
        x = as_vector(x)
        if x.size != self.A.shape[1]:
            raise DimensionError("point dimension %d, objective dimension %d"
                                 % (x.size, self.A.shape[1]))
        return x

    def eval(self, x):
        r = self.A @ self._check(x) - self.y
        return float(np.dot(r, r))

    def grad(self, x):
        return 2.0 * (self.A.T @ (self.A @ self._check(x) - self.y))

    def directional_curvature(self, d):
        Ad = self.A @ as_vector(d)
        return 2.0 * float(np.dot(Ad, Ad))


def _sigmoid_of_negative(z):
    """1 / (1 + exp(z)) evaluated without overflow."""
    out = np.empty_like(z)
    pos = z >= 0
    ez = np.exp(-z[pos])
    out[pos] = ez / (1.0 + ez)
    ez = np.exp(z[~pos])
    out[~pos] = 1.0 / (1.0 + ez)
    return out


class LogisticInstance(Objective):
    """f(x) = (1/m) sum ln(1 + exp(-y_i <a_i, x>)) with labels in {-1, +1}."""

    def __init__(self, A, y):
        self.A = np.asarray(A, dtype=float)
        if self.A.ndim != 2:
            raise DimensionError("sample matrix must be 2-D")
        self.y = as_vector(y)
        if self.y.size != self.A.shape[0]:
            raise DimensionError("matrix has %d rows, labels have %d"
                                 % (self.A.shape[0], self.y.size))
        if not np.all(np.abs(self.y) == 1.0):
            raise OptError("labels must be -1 or +1")
        self.m = self.A.shape[0]
        top = float(np.linalg.svd(self.A, compute_uv=False)[0])
        self.smoothness_L = top ** 2 / (4.0 * self.m)

    def _check(self, x):
        x = as_vector(x)
        if x.size != self.A.shape[1]:
            raise DimensionError("point dimension %d, objective dimension %d"
                                 % (x.size, self.A.shape[1]))
        return x

    def eval(self, x):
        margins = self.y * (self.A @ self._check(x))
        return float(np.logaddexp(0.0, -margins).mean())

    def grad(self, x):
        margins = self.y * (self.A @ self._check(x))
        return -(self.A.T @ (self.y * _sigmoid_of_negative(margins))) / self.m


class BeckmannInstance(Objective):
    """Congestion potential sum_a ff_a * (x_a + 0.03 x_a^5 / cap_a^4).

    The gradient is the volume-delay travel time ff_a * (1 + 0.15 (x/cap)^4).
    Flows must be nonnegative; entries below -1e-9 raise InfeasibleError.
    """

    def __init__(self, network):
        self.network = network
        self.free_flow = network.free_flow
        self.capacity = network.capacity

    def _check(self, x):
        x = as_vector(x)
        if x.size != self.network.num_links:
            raise DimensionError("flow dimension %d, network has %d links"
                                 % (x.size, self.network.num_links))
        if float(x.min()) < -1e-9:
            raise InfeasibleError("negative flow %g on some link" % float(x.min()))
        return x

    def eval(self, x):
        x = self._check(x)
        return float(np.dot(self.free_flow, x + 0.03 * x ** 5 / self.capacity ** 4))

    def grad(self, x):
        x = self._check(x)
        return self.free_flow * (1.0 + 0.15 * (x / self.capacity) ** 4)


class HuberCompletionInstance(Objective):
    """f(X) = (1/|I|) sum over observed (i,j) of h_rho(Y_ij - X_ij).

    h_rho(r) = r^2/2 for |r| <= rho, else rho*(|r| - rho/2).  Iterates are
    matrices flattened row-major; the gradient is supported on the observed
    entries and is (1/|I|)-Lipschitz, so smoothness_L = 1/|I|.
    """

    def __init__(self, shape, rows, cols, values, rho=1.0):
        self.shape = (int(shape[0]), int(shape[1]))
        if self.shape[0] < 1 or self.shape[1] < 1:
            raise DimensionError("matrix shape must be positive")
        self.rows = np.asarray(rows, dtype=int)
        self.cols = np.asarray(cols, dtype=int)
        self.values = as_vector(values)
        if not (self.rows.size == self.cols.size == self.values.size):
            raise DimensionError("rows, cols, values must have equal length")
        if self.rows.size < 1:
            raise OptError("completion instance needs at least one observation")
        if (self.rows.min() < 0 or self.rows.max() >= self.shape[0]
                or self.cols.min() < 0 or self.cols.max() >= self.shape[1]):
            raise OptError("observed index outside the matrix shape")
        if rho <= 0:
            raise OptError("rho must be positive")
        self.rho = float(rho)
        self.count = self.rows.size
        self.smoothness_L = 1.0 / self.count
        self.dim = self.shape[0] * self.shape[1]

    def _check(self, x):
        x = as_vector(x)
        if x.size != self.dim:
            raise DimensionError("point dimension %d, objective dimension %d"
                                 % (x.size, self.dim))
        return x.reshape(self.shape)

    def eval(self, x):
        r = self.values - self._check(x)[self.rows, self.cols]
        a = np.abs(r)
        losses = np.where(a <= self.rho, 0.5 * r * r, self.rho * (a - 0.5 * self.rho))
        return float(losses.sum()) / self.count

    def grad(self, x):
        r = self.values - self._check(x)[self.rows, self.cols]
        G = np.zeros(self.shape)
        np.add.at(G, (self.rows, self.cols), -np.clip(r, -self.rho, self.rho) / self.count)
        return G.reshape(-1)


class GenericQuadraticInstance(Objective):
    """f(x) = x'Ax/2 + b'x with A symmetrized on construction."""

    def __init__(self, A, b):
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError("quadratic matrix must be square")
        self.A = 0.5 * (A + A.T)
        self.b = as_vector(b)
        if self.b.size != self.A.shape[0]:
            raise DimensionError("matrix is %dx%d, offset has size %d"
                                 % (A.shape[0], A.shape[1], self.b.size))
        evals = np.linalg.eigvalsh(self.A)
        if float(evals[-1]) > 0:
            self.smoothness_L = float(evals[-1])
        if float(evals[0]) > 0:
            self.strong_convexity_S = float(evals[0])
            self.grad_dominated_mu = float(evals[0])
        self.is_quadratic = True
        x_flat = np.linalg.lstsq(self.A, -self.b, rcond=None)[0]
        self.unconstrained_min_value = float(0.5 * x_flat @ self.A @ x_flat
                                             + self.b @ x_flat)
        self.unconstrained_minimizer = x_flat

    def _check(self, x):
        x = as_vector(x)
        if x.size != self.b.size:
            raise DimensionError("point dimension %d, objective dimension %d"
                                 % (x.size, self.b.size))
        return x

    def eval(self, x):
        x = self._check(x)
        return float(0.5 * x @ self.A @ x + self.b @ x)

    def grad(self, x):
        return self.A @ self._check(x) + self.b

    def directional_curvature(self, d):
        d = as_vector(d)
        return float(d @ self.A @ d)


class LiftedObjective(Objective):
    """g(z) = f(z_pos - z_neg) over the doubled space of split signs.

    The gradient is the concatenation (grad f, -grad f); the smoothness
    constant doubles because the lift map has operator norm sqrt(2).
    """

    def __init__(self, inner):
        self.inner = inner
        if inner.smoothness_L is not None:
            self.smoothness_L = 2.0 * inner.smoothness_L
        self.known_optimum = inner.known_optimum
        self.is_quadratic = inner.is_quadratic

    def eval(self, z):
        return self.inner.eval(project_l1(z))

    def grad(self, z):
        g = np.asarray(self.inner.grad(project_l1(z)), dtype=float)
        return np.concatenate([g, -g])

    def directional_curvature(self, d):
        return self.inner.directional_curvature(project_l1(d))


def lift_objective(inner):
    """Objective over the doubled sign-split space; see LiftedObjective."""
    return LiftedObjective(inner)


def eval_and_grad(obj, x):
    """Convenience pair (f(x), grad f(x))."""
    return float(obj.eval(x)), np.asarray(obj.grad(x), dtype=float)


def sparse_recovery(m=200, n=500, sparsity=25, sigma=0.05, seed=0):
    """Noisy Gaussian sensing of a planted sparse signal.

    Returns (LeastSquaresInstance, planted x*, tau = ||x*||_1).
    """
    if m < 1 or n < 1:
        raise OptError("dimensions must be positive")
    if not 1 <= sparsity <= n:
        raise OptError("sparsity must lie in 1..n")
    if sigma < 0:
        raise OptError("noise level must be nonnegative")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n))
    support = rng.choice(n, size=sparsity, replace=False)
    coeffs = rng.standard_normal(sparsity)
    while np.any(coeffs == 0.0):
        coeffs = rng.standard_normal(sparsity)
    x_star = np.zeros(n)
    x_star[support] = coeffs
    y = A @ x_star + sigma * rng.standard_normal(m)
    tau = float(np.abs(x_star).sum())
    return LeastSquaresInstance(A, y), x_star, tau


def logistic_sparse(m=200, n=500, sparsity=25, seed=0):
    """Separable logistic data from a planted sparse direction.

    Returns (LogisticInstance, planted x*, tau = ||x*||_1).
    """
    if m < 1 or n < 1:
        raise OptError("dimensions must be positive")
    if not 1 <= sparsity <= n:
        raise OptError("sparsity must lie in 1..n")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n))
    support = rng.choice(n, size=sparsity, replace=False)
    coeffs = rng.standard_normal(sparsity)
    while np.any(coeffs == 0.0):
        coeffs = rng.standard_normal(sparsity)
    x_star = np.zeros(n)
    x_star[support] = coeffs
    y = np.where(A @ x_star >= 0.0, 1.0, -1.0)
    tau = float(np.abs(x_star).sum())
    return LogisticInstance(A, y), x_star, tau


def _layered_network(layers, width, drop, rng, unit_demands):
    """One sampled layered DAG; raises InfeasibleError when disconnected."""
    num_nodes = layers * width
    links = []
    for layer in range(layers - 1):
        for p in range(width):
            tail = layer * width + p
            for q in range(width):
                if rng.random() >= drop:
                    links.append((len(links), tail, (layer + 1) * width + q,
                                  rng.uniform(1.0, 2.0), rng.uniform(2.0, 6.0)))
    if not links:
        raise InfeasibleError("no links survived the drop step")
    demands = []
    for p in range(width):
        for q in range(width):
            if unit_demands:
                amount = 1.0
            else:
                amount = rng.uniform(0.0, 1.0)
                while amount <= 0.0:
                    amount = rng.uniform(0.0, 1.0)
            demands.append((p, (layers - 1) * width + q, amount))
    network = DagNetwork(num_nodes, links, demands)
    network.route_all(np.ones(network.num_links))  # connectivity probe
    return network


def _connected_network(layers, width, drop, seed, unit_demands):
    if layers < 2 or width < 1:
        raise OptError("need at least 2 layers and 1 node per layer")
    if not 0.0 <= drop < 1.0:
        raise OptError("drop probability must lie in [0, 1)")
    for attempt in range(100):
        rng = np.random.default_rng([seed, attempt])
        try:
            return _layered_network(layers, width, drop, rng, unit_demands), rng
        except InfeasibleError:
            continue
    raise OptError("no connected network in 100 attempts (drop too high?)")


def traffic(layers=4, width=3, drop=0.5, seed=0):
    """Layered random network with uniform demands between the end layers.

    Returns (BeckmannInstance, DagNetwork).  Disconnected draws are retried
    with an incremented sub-seed, up to 100 attempts.
    """
    network, _ = _connected_network(layers, width, drop, seed, unit_demands=False)
    return BeckmannInstance(network), network


def flow_quadratic(layers=4, width=3, drop=0.5, seed=0, epsilon=1e-3):
    """Strongly convex quadratic over a unit-demand path polytope.

    f(x) = x'Ax/2 + b'x with A = M'M + epsilon*I and b aimed so the
    unconstrained minimizer is a feasible flow.  Returns
    (GenericQuadraticInstance, DagNetwork, reference flow).
    """
    network, rng = _connected_network(layers, width, drop, seed, unit_demands=True)
    d = network.num_links
    M = rng.standard_normal((d, d)) / math.sqrt(d)
    A = M.T @ M + epsilon * np.eye(d)
    weights = rng.dirichlet(np.ones(3))
    x_ref = np.zeros(d)
    for w in weights:
        flow, _ = network.route_all(rng.standard_normal(d))
        x_ref += w * flow
    b = -(A @ x_ref)
    return GenericQuadraticInstance(A, b), network, x_ref


def completion(m=30, n=40, rank=2, observed_fraction=0.3, seed=0,
               noise_sigma=0.0, rho=1.0):
    """Planted low-rank matrix observed on a uniform random index set.

    Returns (HuberCompletionInstance, planted matrix).  The number of
    observations is round(observed_fraction * m * n).
    """
    if m < 1 or n < 1:
        raise OptError("dimensions must be positive")
    if not 1 <= rank <= min(m, n):
        raise OptError("rank must lie in 1..min(m, n)")
    if not 0.0 < observed_fraction <= 1.0:
        raise OptError("observed_fraction must lie in (0, 1]")
    if noise_sigma < 0:
        raise OptError("noise level must be nonnegative")
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((m, rank))
    V = rng.standard_normal((n, rank))
    planted = U @ V.T
    count = max(int(round(observed_fraction * m * n)), 1)
    flat = rng.choice(m * n, size=count, replace=False)
    rows, cols = np.divmod(flat, n)
    values = planted[rows, cols]
    if noise_sigma > 0:
        values = values + noise_sigma * rng.standard_normal(count)
    return HuberCompletionInstance((m, n), rows, cols, values, rho=rho), planted


_FAMILIES = {
    "sparse_recovery": sparse_recovery,
    "logistic_sparse": logistic_sparse,
    "traffic": traffic,
    "flow_quadratic": flow_quadratic,
    "completion": completion,
}


def generate_instance(family, seed=0, **params):
    """Dispatch to a named generator; returns that generator's tuple."""
    if family not in _FAMILIES:
        raise OptError("unknown instance family %r (have: %s)"
                       % (family, ", ".join(sorted(_FAMILIES))))
    return _FAMILIES[family](seed=seed, **params)


def load_labeled_csv(path):
    """Numeric CSV with one sample per row, label in the last column."""
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    if data.shape[1] < 2:
        raise OptError("labeled CSV needs at least one feature column: %s" % path)
    return data[:, :-1], data[:, -1]


def load_triplets_csv(path):
    """Numeric CSV of (row, col, value) triplets for completion data."""
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    if data.shape[1] != 3:
        raise OptError("triplet CSV needs exactly three columns: %s" % path)
    return data[:, 0].astype(int), data[:, 1].astype(int), data[:, 2]
