"""Feasible regions: linear-minimization oracles, membership, vertex bookkeeping.

Every region exposes ``dim``, ``lmo(c) -> Vertex``, ``contains(x, tol)``,
``diameter_bound``, and the capability flags ``supports_away`` /
``supports_dicg``.  Oracles are deterministic and re-entrant; ties are broken
by the lowest index (or lexicographically smallest path).
"""

import math

import numpy as np

from .core import (ConvergenceError, DimensionError, InfeasibleError, OptError,
                   as_vector)

ZERO_TOL = 1e-12  # support threshold for masked away oracles


class Vertex:
    """A region vertex identified by a canonical key.

    Two vertices compare equal iff their keys are equal.  Nuclear-ball
    vertices are stored in factored rank-one form and materialized lazily.
    """

    __slots__ = ("key", "_point", "_factors", "degenerate")

    def __init__(self, key, point=None, factors=None, degenerate=False):
        if point is None and factors is None:
            raise OptError("vertex needs a point or rank-one factors")
        self.key = key
        self._point = point
        self._factors = factors
        self.degenerate = degenerate

    @property
    def point(self):
        if self._point is None:
            coeff, u, v = self._factors
            self._point = coeff * np.outer(u, v).reshape(-1)
        return self._point

    def __eq__(self, other):
        return isinstance(other, Vertex) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return "Vertex(key=%r)" % (self.key,)


class ScaledSimplex:
    """The tau-scaled probability simplex with vertices tau * e_i."""

    supports_away = True
    supports_dicg = True

    def __init__(self, n, tau):
        if n < 1:
            raise DimensionError("simplex needs dimension >= 1")
        if tau <= 0:
            raise OptError("tau must be positive")
        self.dim = int(n)
        self.tau = float(tau)
        self.diameter_bound = self.tau * math.sqrt(2.0)

    def _vertex(self, i):
        point = np.zeros(self.dim)
        point[i] = self.tau
        return Vertex(int(i), point)

    def lmo(self, c):
        c = as_vector(c)
        if c.size != self.dim:
            raise DimensionError("cost dimension %d, region dimension %d" % (c.size, self.dim))
        return self._vertex(int(np.argmin(c)))

    def contains(self, x, tol=1e-9):
        x = as_vector(x)
        if x.size != self.dim:
            return False
        return (float(x.min()) >= -tol
                and abs(float(x.sum()) - self.tau) <= tol * max(1.0, self.tau))

    def dicg_away(self, x, gradient):
        x = as_vector(x)
        g = as_vector(gradient)
        masked = np.where(x > ZERO_TOL, g, -np.inf)
        if not np.any(np.isfinite(masked)):
            raise InfeasibleError("iterate has no positive coordinate to move away from")
        return self._vertex(int(np.argmax(masked)))


class L1Ball:
    """The l1 ball of radius tau with vertices +-tau * e_i."""

    supports_away = True
    supports_dicg = False

    def __init__(self, n, tau):
        if n < 1:
            raise DimensionError("l1 ball needs dimension >= 1")
        if tau <= 0:
            raise OptError("tau must be positive")
        self.dim = int(n)
        self.tau = float(tau)
        self.diameter_bound = 2.0 * self.tau

    def lmo(self, c):
        c = as_vector(c)
        if c.size != self.dim:
            raise DimensionError("cost dimension %d, region dimension %d" % (c.size, self.dim))
        i = int(np.argmax(np.abs(c)))
        sign = 1.0 if c[i] >= 0 else -1.0  # sign(0) treated as +1
        point = np.zeros(self.dim)
        point[i] = -sign * self.tau
        return Vertex((i, -int(sign)), point)

    def contains(self, x, tol=1e-9):
        x = as_vector(x)
        if x.size != self.dim:
            return False
        return float(np.abs(x).sum()) <= self.tau + tol * max(1.0, self.tau)


class ExplicitPolytope:
    """Convex hull of an explicit vertex list; vertices keyed by list index."""

    supports_away = True
    supports_dicg = False

    def __init__(self, vertices):
        V = np.asarray(vertices, dtype=float)
        if V.ndim != 2 or V.shape[0] < 1:
            raise DimensionError("need a nonempty 2-D vertex array")
        self.vertices = V
        self.dim = V.shape[1]
        best = 0.0
        for i in range(V.shape[0]):
            gaps = np.linalg.norm(V - V[i], axis=1)
            best = max(best, float(gaps.max()))
        self.diameter_bound = best

    def lmo(self, c):
        c = as_vector(c)
        if c.size != self.dim:
            raise DimensionError("cost dimension %d, region dimension %d" % (c.size, self.dim))
        scores = self.vertices @ c
        i = int(np.argmin(scores))
        return Vertex(i, self.vertices[i].copy())

    def contains(self, x, tol=1e-9):
        x = as_vector(x)
        if x.size != self.dim:
            return False
        # barycentric least squares: x = sum w_i v_i, sum w_i = 1, w >= 0
        A = np.vstack([self.vertices.T, np.ones(self.vertices.shape[0])])
        rhs = np.concatenate([x, [1.0]])
        w, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        resid = A @ w - rhs
        scale = max(1.0, float(np.abs(x).max()))
        return float(np.abs(resid).max()) <= tol * scale and float(w.min()) >= -tol


def lmo_scaled_simplex(c, tau):
    """Vertex of the tau-scaled simplex minimizing <c, v>."""
    c = as_vector(c)
    return ScaledSimplex(c.size, tau).lmo(c)


def lmo_l1_ball(c, tau):
    """Vertex of the tau-radius l1 ball minimizing <c, v>."""
    c = as_vector(c)
    return L1Ball(c.size, tau).lmo(c)


def project_l1(z):
    """Map a lifted simplex point back to the l1 ball: first half minus second."""
    z = as_vector(z)
    if z.size % 2:
        raise DimensionError("lifted vectors have even dimension, got %d" % z.size)
    half = z.size // 2
    return z[:half] - z[half:]


def _exact_slack_pair(xi, amount):
    """A pair (p, q) >= 0 with the float subtraction p - q == xi exactly.

    Tries to absorb ``amount`` of extra mass, p + q ~= |xi| + amount.  A zero
    coordinate takes any amount as an equal pair.  Otherwise the preferred
    construction puts slack s = amount / 2 on both sides and probes a few
    ulps for a grid-aligned pair; when that fails, s is capped at |xi| so the
    subtraction recovering the slack side is exact by Sterbenz's lemma, which
    bounds the absorbable mass at 2 |xi|.
    """
    if xi == 0.0:
        s = max(amount, 0.0) / 2.0
        return s, s
    ax = abs(xi)
    s = max(amount, 0.0) / 2.0
    if s > ax:
        # large slack: both sides land near s, whose grid must contain xi
        base = s
        for _ in range(8):
            if xi > 0.0:
                q = base
                p = q + xi
            else:
                p = base
                q = p - xi
            if p >= 0.0 and q >= 0.0 and p - q == xi:
                return p, q
            base = math.nextafter(base, math.inf)
        s = ax
    if xi > 0.0:
        p = xi + s  # in [xi, 2 xi], so p - xi is exact
        q = p - xi
        return p, q
    q = ax + s  # in [|xi|, 2 |xi|], so q - |xi| is exact
    p = q - ax
    return p, q


def lift_l1(x, tau):
    """Embed an l1-ball point into the tau-scaled simplex on 2n coordinates.

    Produces z >= 0 with z[:n] - z[n:] == x bit for bit and sum(z) == tau to
    a relative 1e-12; slack is spread as z_i ~ x_i^+ + delta,
    z_{n+i} ~ x_i^- + delta with delta = (tau - ||x||_1) / 2n, using pairs
    whose float subtraction stays exact.  Raises when the slack exceeds what
    exact pairs can absorb (possible only when x has no zero coordinate and
    tau is a large multiple of ||x||_1).
    """
    x = as_vector(x)
    if tau <= 0:
        raise OptError("tau must be positive")
    n = x.size
    l1 = math.fsum(abs(float(t)) for t in x)
    if l1 > tau + 1e-9:
        raise InfeasibleError("||x||_1 = %.17g exceeds tau = %.17g" % (l1, tau))

    p = np.empty(n)
    q = np.empty(n)
    used = np.zeros(n)
    stuck = np.zeros(n, dtype=bool)
    even = max(tau - l1, 0.0) / n
    for i in range(n):
        used[i] = even
        p[i], q[i] = _exact_slack_pair(float(x[i]), even)

    # waterfall the residual onto coordinates that still absorb mass
    tol = 1e-13 * max(1.0, tau)
    for _ in range(2 * n + 2):
        rho = tau - math.fsum(p.tolist()) - math.fsum(q.tolist())
        if abs(rho) <= tol or rho < 0.0:
            break
        candidates = [i for i in range(n) if not stuck[i]]
        if not candidates:
            break
        # zero coordinates absorb anything; otherwise largest value first
        i = min(candidates, key=lambda j: (x[j] != 0.0, -abs(x[j]), j))
        before = p[i] + q[i]
        pi, qi = _exact_slack_pair(float(x[i]), used[i] + rho)
        if pi + qi <= before + 0.25 * rho:
            stuck[i] = True
            continue
        used[i] += (pi + qi) - before
        p[i], q[i] = pi, qi

    rho = tau - math.fsum(p.tolist()) - math.fsum(q.tolist())
    if abs(rho) > tol:
        raise OptError("cannot place slack %.17g exactly; exact pairs absorb "
                       "at most about 2 ||x||_1 beyond ||x||_1" % rho)
    return np.concatenate([p, q])


def _top_singular_pair(C, v_start, tol, max_iters):
    """Leading singular pair of C by power iteration on C^T C."""
    n = C.shape[1]
    v = v_start / np.linalg.norm(v_start)
    sigma = 0.0
    dead = 0
    residual = None
    for _ in range(max_iters):
        w = C.T @ (C @ v)
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            # v fell in the null space; restart from the next basis vector
            v = np.zeros(n)
            v[dead % n] = 1.0
            dead += 1
            continue
        v = w / nw
        sigma_new = float(np.linalg.norm(C @ v))
        residual = abs(sigma_new - sigma)
        if residual <= tol * max(sigma_new, 1e-300):
            sigma = sigma_new
            u = C @ v
            return u / np.linalg.norm(u), v, sigma
        sigma = sigma_new
    raise ConvergenceError("power iteration did not converge in %d iterations" % max_iters,
                           last_residual=residual)


class NuclearBall:
    """Matrices of nuclear norm at most tau, flattened row-major to vectors."""

    supports_away = False
    supports_dicg = False

    def __init__(self, num_rows, num_cols, tau, power_tol=1e-9, max_power_iters=None, seed=0):
        if num_rows < 1 or num_cols < 1:
            raise DimensionError("matrix shape must be positive")
        if tau <= 0:
            raise OptError("tau must be positive")
        self.shape = (int(num_rows), int(num_cols))
        self.dim = self.shape[0] * self.shape[1]
        self.tau = float(tau)
        self.power_tol = float(power_tol)
        self.max_power_iters = (int(max_power_iters) if max_power_iters is not None
                                else 1000 * max(self.shape))
        self.diameter_bound = 2.0 * self.tau
        start = np.random.default_rng(seed).standard_normal(self.shape[1])
        self._start = start / np.linalg.norm(start)

    def _vertex(self, u, v, degenerate=False):
        # canonical sign: largest-magnitude entry of v is positive, so
        # (u, v) and (-u, -v) share one key
        j = int(np.argmax(np.abs(v)))
        if v[j] < 0:
            u, v = -u, -v
        key = (np.round(u, 10).tobytes(), np.round(v, 10).tobytes())
        coeff = self.tau if degenerate else -self.tau
        return Vertex(key, factors=(coeff, u, v), degenerate=degenerate)

    def lmo(self, c):
        C = as_vector(c)
        if C.size != self.dim:
            raise DimensionError("cost dimension %d, region dimension %d" % (C.size, self.dim))
        C = C.reshape(self.shape)
        if not np.any(C):
            # zero cost: every response has value 0; flag the arbitrary pick
            u = np.zeros(self.shape[0])
            u[0] = 1.0
            v = np.zeros(self.shape[1])
            v[0] = 1.0
            return self._vertex(u, v, degenerate=True)
        u, v, _ = _top_singular_pair(C, self._start, self.power_tol, self.max_power_iters)
        return self._vertex(u, v)

    def contains(self, x, tol=1e-9):
        x = as_vector(x)
        if x.size != self.dim:
            return False
        sigmas = np.linalg.svd(x.reshape(self.shape), compute_uv=False)
        return float(sigmas.sum()) <= self.tau + tol * max(1.0, self.tau)


def lmo_nuclear_ball(c_matrix, tau, power_tol=1e-9, max_power_iters=None, seed=0):
    """Rank-one vertex -tau * u v^T of the nuclear-norm ball minimizing <c, v>."""
    C = np.asarray(c_matrix, dtype=float)
    if C.ndim != 2:
        raise DimensionError("cost must be a 2-D matrix")
    region = NuclearBall(C.shape[0], C.shape[1], tau, power_tol, max_power_iters, seed)
    return region.lmo(C.reshape(-1))


class DagNetwork:
    """Directed acyclic link network with free-flow times, capacities, demands.

    ``links`` is a list of (id, tail, head, free_flow_time, capacity) with ids
    exactly 0..M-1; ``demands`` is a list of (origin, destination, amount).
    """

    def __init__(self, num_nodes, links, demands):
        self.num_nodes = int(num_nodes)
        self.num_links = len(links)
        if self.num_nodes < 1:
            raise DimensionError("network needs at least one node")
        self.tail = np.zeros(self.num_links, dtype=int)
        self.head = np.zeros(self.num_links, dtype=int)
        self.free_flow = np.zeros(self.num_links)
        self.capacity = np.zeros(self.num_links)
        seen = set()
        for link_id, tail, head, free_flow, capacity in links:
            link_id = int(link_id)
            if link_id < 0 or link_id >= self.num_links or link_id in seen:
                raise OptError("link ids must cover 0..%d exactly once" % (self.num_links - 1))
            seen.add(link_id)
            if not (0 <= tail < self.num_nodes and 0 <= head < self.num_nodes):
                raise OptError("link %d references an unknown node" % link_id)
            if free_flow <= 0 or capacity <= 0:
                raise OptError("link %d needs positive free-flow time and capacity" % link_id)
            self.tail[link_id] = int(tail)
            self.head[link_id] = int(head)
            self.free_flow[link_id] = float(free_flow)
            self.capacity[link_id] = float(capacity)
        self.demands = []
        for origin, dest, amount in demands:
            if not (0 <= origin < self.num_nodes and 0 <= dest < self.num_nodes):
                raise OptError("demand references an unknown node")
            if amount <= 0:
                raise OptError("demand amounts must be positive")
            self.demands.append((int(origin), int(dest), float(amount)))

        # adjacency sorted by (head, link id) so greedy walks are lexicographic
        self.out_links = [[] for _ in range(self.num_nodes)]
        for link_id in range(self.num_links):
            self.out_links[self.tail[link_id]].append((self.head[link_id], link_id))
        for entries in self.out_links:
            entries.sort()
        self._topo = self._topological_order()

    def _topological_order(self):
        indeg = np.zeros(self.num_nodes, dtype=int)
        for link_id in range(self.num_links):
            indeg[self.head[link_id]] += 1
        frontier = [node for node in range(self.num_nodes) if indeg[node] == 0]
        order = []
        while frontier:
            node = frontier.pop()
            order.append(node)
            for head, _ in self.out_links[node]:
                indeg[head] -= 1
                if indeg[head] == 0:
                    frontier.append(head)
        if len(order) != self.num_nodes:
            raise OptError("network contains a cycle")
        return order

    @classmethod
    def parse(cls, text):
        """Parse the plain-text network format.

        ``nodes <N> links <M>`` on the first data line, then ``link <id>
        <from> <to> <free_flow_time> <capacity>`` and ``demand <origin>
        <dest> <amount>`` lines; ``#`` starts a comment.
        """
        header = None
        links = []
        demands = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if header is None:
                if len(parts) != 4 or parts[0] != "nodes" or parts[2] != "links":
                    raise OptError("expected header 'nodes <N> links <M>', got %r" % raw)
                header = (int(parts[1]), int(parts[3]))
            elif parts[0] == "link":
                if len(parts) != 6:
                    raise OptError("malformed link line %r" % raw)
                links.append((int(parts[1]), int(parts[2]), int(parts[3]),
                              float(parts[4]), float(parts[5])))
            elif parts[0] == "demand":
                if len(parts) != 4:
                    raise OptError("malformed demand line %r" % raw)
                demands.append((int(parts[1]), int(parts[2]), float(parts[3])))
            else:
                raise OptError("unrecognized line %r" % raw)
        if header is None:
            raise OptError("missing 'nodes ... links ...' header")
        if len(links) != header[1]:
            raise OptError("header announced %d links, found %d" % (header[1], len(links)))
        return cls(header[0], links, demands)

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="utf-8") as handle:
            return cls.parse(handle.read())

    def _distances(self, costs, dest, maximize, allowed):
        bad = -math.inf if maximize else math.inf
        dist = np.full(self.num_nodes, bad)
        dist[dest] = 0.0
        for node in reversed(self._topo):
            for head, link_id in self.out_links[node]:
                if allowed is not None and not allowed[link_id]:
                    continue
                if not math.isfinite(dist[head]):
                    continue
                cand = costs[link_id] + dist[head]
                if (cand > dist[node]) if maximize else (cand < dist[node]):
                    dist[node] = cand
        return dist

    def _walk(self, costs, dist, origin, dest, maximize, allowed):
        # first (head, link) attaining the optimal value at each node gives
        # the lexicographically smallest optimal path
        path = []
        node = origin
        while node != dest:
            chosen = None
            for head, link_id in self.out_links[node]:
                if allowed is not None and not allowed[link_id]:
                    continue
                if not math.isfinite(dist[head]):
                    continue
                if costs[link_id] + dist[head] == dist[node]:
                    chosen = (head, link_id)
                    break
            if chosen is None:
                # float drift guard; pick the best-valued successor instead
                best = None
                for head, link_id in self.out_links[node]:
                    if allowed is not None and not allowed[link_id]:
                        continue
                    if not math.isfinite(dist[head]):
                        continue
                    cand = costs[link_id] + dist[head]
                    rank = (-cand, head, link_id) if maximize else (cand, head, link_id)
                    if best is None or rank < best[0]:
                        best = (rank, (head, link_id))
                if best is None:
                    raise InfeasibleError("no path from node %d to node %d" % (origin, dest))
                chosen = best[1]
            path.append(chosen[1])
            node = chosen[0]
        return path

    def route_all(self, costs, demands=None, maximize=False, allowed=None):
        """Route every demand along its extreme-cost path; returns (flow, key)."""
        costs = as_vector(costs)
        if costs.size != self.num_links:
            raise DimensionError("cost dimension %d, network has %d links"
                                 % (costs.size, self.num_links))
        demands = self.demands if demands is None else demands
        if not demands:
            raise OptError("network has no demands to route")
        flow = np.zeros(self.num_links)
        key_parts = []
        dist_cache = {}
        for origin, dest, amount in demands:
            if dest not in dist_cache:
                dist_cache[dest] = self._distances(costs, dest, maximize, allowed)
            dist = dist_cache[dest]
            if not math.isfinite(dist[origin]):
                raise InfeasibleError("no usable path for demand pair (%d, %d)" % (origin, dest))
            path = self._walk(costs, dist, origin, dest, maximize, allowed)
            for link_id in path:
                flow[link_id] += amount
            key_parts.append(tuple(path))
        return flow, tuple(key_parts)


def lmo_dag_flow(link_costs, network, demands=None):
    """Flow vertex routing each demand along its cheapest path."""
    flow, key = network.route_all(link_costs, demands=demands)
    return Vertex(key, flow)


class DagFlowRegion:
    """Path-polytope of a DAG network: demands split over origin-dest paths."""

    supports_away = True

    def __init__(self, network):
        self.network = network
        self.dim = network.num_links
        if not network.demands:
            raise OptError("flow region needs at least one demand")
        total = sum(amount for _, _, amount in network.demands)
        self.total_demand = total
        self.diameter_bound = 2.0 * total * math.sqrt(max(network.num_nodes - 1, 1))
        self.supports_dicg = all(amount == 1.0 for _, _, amount in network.demands)
        self._supply = np.zeros(network.num_nodes)
        for origin, dest, amount in network.demands:
            self._supply[origin] += amount
            self._supply[dest] -= amount

    def lmo(self, c):
        return lmo_dag_flow(c, self.network)

    def contains(self, x, tol=1e-9):
        x = as_vector(x)
        if x.size != self.dim:
            return False
        if float(x.min()) < -tol:
            return False
        net = self.network
        balance = -self._supply.copy()
        np.add.at(balance, net.tail, x)
        np.add.at(balance, net.head, -x)
        return float(np.abs(balance).max()) <= tol * max(1.0, self.total_demand)

    def dicg_away(self, x, gradient):
        x = as_vector(x)
        g = as_vector(gradient)
        allowed = x > ZERO_TOL
        flow, key = self.network.route_all(g, maximize=True, allowed=allowed)
        return Vertex(key, flow)


class ActiveSet:
    """Convex decomposition of the current iterate over region vertices."""

    PRUNE_TOL = 1e-15

    def __init__(self, vertex, weight=1.0):
        self._entries = {vertex.key: [vertex, float(weight)]}

    def __len__(self):
        return len(self._entries)

    def __contains__(self, key):
        return key in self._entries

    def weight(self, key):
        return self._entries[key][1]

    def items(self):
        """Pairs (vertex, weight) in sorted key order."""
        return [(entry[0], entry[1]) for _, entry in sorted(self._entries.items())]

    def _prune(self):
        for key in [k for k, entry in self._entries.items() if entry[1] <= self.PRUNE_TOL]:
            if self._entries[key][1] < -1e-12:
                raise OptError("active-set weight went negative: %r" % key)
            del self._entries[key]

    def fw_update(self, vertex, gamma):
        """Blend toward ``vertex``: weights scale by (1 - gamma), vertex gains gamma."""
        for entry in self._entries.values():
            entry[1] *= (1.0 - gamma)
        entry = self._entries.get(vertex.key)
        if entry is None:
            self._entries[vertex.key] = [vertex, gamma]
        else:
            entry[1] += gamma
        self._prune()

    def away_update(self, vertex, gamma):
        """Move away from ``vertex``: weights scale by (1 + gamma), vertex loses gamma."""
        if vertex.key not in self._entries:
            raise OptError("away vertex is not in the active set")
        for entry in self._entries.values():
            entry[1] *= (1.0 + gamma)
        self._entries[vertex.key][1] -= gamma
        self._prune()

    def away_argmax(self, gradient):
        """The active vertex maximizing <gradient, v>; ties to the smallest key."""
        g = np.asarray(gradient, dtype=float)
        best = None
        for key, (vertex, weight) in sorted(self._entries.items()):
            score = float(np.dot(g, vertex.point))
            if best is None or score > best[0]:
                best = (score, vertex, weight)
        return best[1], best[2]

    def combination(self):
        out = None
        for _, (vertex, weight) in self._entries.items():
            out = weight * vertex.point if out is None else out + weight * vertex.point
        return out

    def validate(self, x):
        """Check positivity, unit mass, and that the combination reproduces x."""
        total = 0.0
        for _, (_, weight) in self._entries.items():
            if weight <= 0.0:
                raise OptError("active-set weight %g is not positive" % weight)
            total += weight
        if abs(total - 1.0) > 1e-9:
            raise OptError("active-set weights sum to %.17g" % total)
        gap = float(np.abs(self.combination() - np.asarray(x, float)).max())
        if gap > 1e-8:
            raise OptError("active-set combination drifted %g from the iterate" % gap)


def away_vertex(active, gradient):
    """Away vertex and its weight cap from an explicit active set.

    Returns (vertex, gamma_max) with gamma_max = w / (1 - w), or +inf when the
    vertex carries all the weight (the caller then takes a forward step).
    """
    vertex, weight = active.away_argmax(gradient)
    if 1.0 - weight <= 0.0:
        return vertex, math.inf
    return vertex, weight / (1.0 - weight)


def dicg_away_vertex(x, gradient, region):
    """Away vertex supported on the positive coordinates of x, no active set."""
    if not getattr(region, "supports_dicg", False):
        raise OptError("region does not support decomposition-invariant away steps")
    return region.dicg_away(x, gradient)
