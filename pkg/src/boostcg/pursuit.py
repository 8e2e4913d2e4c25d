"""Alignment measure and the gradient-pursuit direction builder.

The pursuit chases the negative gradient with a short matching-pursuit loop
over oracle vertices, producing a feasible direction whose alignment with
the negative gradient improves by at least ``delta`` per accepted round.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .core import CriticalPointError, InfeasibleError, OptError

RESIDUAL_STOP = 1e-13   # relative residual below which the pursuit has converged
DIRECTION_TOL = 1e-15   # smallest norm admitting the backward (reduction) candidate


@dataclass
class PursuitConfig:
    """Acceptance threshold and round cap for the pursuit loop."""

    delta: float = 1e-3
    max_rounds_K: int = None  # None means unbounded

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise OptError("delta must lie strictly between 0 and 1")
        if self.max_rounds_K is not None and self.max_rounds_K < 1:
            raise OptError("max_rounds_K must be at least 1")


@dataclass
class PursuitRound:
    """One accepted pursuit round."""

    round: int
    lam: float
    kind: str                   # "forward" or "backward"
    align_after: float
    residual_norm: float        # ||r_k|| at the start of the round
    backward_factor: float = None


@dataclass
class PursuitOutcome:
    """Direction built by the pursuit together with its round trace."""

    direction_g: np.ndarray
    scale_Lambda: float
    rounds_Kt: int
    truncated_by_K: bool
    alignment_final: float
    round_trace: list = field(default_factory=list)
    v0: object = None
    oracle_calls: int = 0
    degenerate: bool = False


def align(d, d_hat):
    """Cosine agreement <d, d_hat> / (||d|| ||d_hat||), clamped to [-1, 1].

    Returns -1 when the estimate d_hat is (numerically) zero; a zero target
    d is a critical point and raises.
    """
    d = np.asarray(d, dtype=float)
    d_hat = np.asarray(d_hat, dtype=float)
    nd = float(np.linalg.norm(d))
    if nd == 0.0:
        raise CriticalPointError("alignment is undefined for a zero target direction")
    nh = float(np.linalg.norm(d_hat))
    if nh <= DIRECTION_TOL:
        return -1.0
    value = float(np.dot(d, d_hat)) / (nd * nh)
    return min(1.0, max(-1.0, value))


def gradient_pursuit(neg_gradient, anchor, region, cfg):
    """Build a feasible direction from ``anchor`` chasing ``neg_gradient``.

    Runs forward/backward pursuit rounds, each spending one oracle call,
    until the alignment gain drops below cfg.delta, the round cap is hit,
    or the residual is exhausted.  Returns the normalized direction
    g = d_K / Lambda with anchor + g feasible.
    """
    neg = np.asarray(neg_gradient, dtype=float)
    anchor = np.asarray(anchor, dtype=float)
    neg_norm = float(np.linalg.norm(neg))
    if neg_norm == 0.0:
        raise CriticalPointError("pursuit requires a nonzero negative gradient")

    d = np.zeros_like(neg)
    lam_total = 0.0
    current_align = -1.0
    rounds = []
    v0 = None
    calls = 0
    truncated = False
    k = 0
    while True:
        if cfg.max_rounds_K is not None and k >= cfg.max_rounds_K:
            truncated = True
            break
        residual = neg - d
        residual_norm = float(np.linalg.norm(residual))
        if residual_norm <= RESIDUAL_STOP * neg_norm:
            break  # nothing left to chase
        vertex = region.lmo(-residual)
        calls += 1
        if k == 0:
            v0 = vertex
        u_forward = vertex.point - anchor
        score_forward = float(np.dot(residual, u_forward))
        d_norm = float(np.linalg.norm(d))
        backward = False
        if d_norm > DIRECTION_TOL:
            u_backward = -d / d_norm
            score_backward = float(np.dot(residual, u_backward))
            if score_backward > score_forward:  # forward preferred on ties
                backward = True
        u = u_backward if backward else u_forward
        score = score_backward if backward else score_forward
        u_norm_sq = float(np.dot(u, u))
        if k == 0 and (u_norm_sq <= 1e-30 or score <= 0.0):
            # the oracle vertex carries no residual mass; fall back to the
            # plain conditional-gradient direction and flag the outcome
            g = u_forward
            final = align(neg, g)
            record = PursuitRound(0, 0.0, "forward", final, residual_norm)
            return PursuitOutcome(g, 1.0, 1, False, final, [record], v0, calls, True)
        lam = score / u_norm_sq
        d_new = d + lam * u
        new_align = align(neg, d_new)
        if new_align - current_align < cfg.delta:
            break  # the round did not buy enough alignment
        factor = None
        if backward:
            factor = 1.0 - lam / d_norm
            if factor < 0.5 - 1e-12:
                raise OptError("backward pursuit factor %.17g fell below 1/2" % factor)
            lam_total *= factor
        else:
            lam_total += lam
        d = d_new
        current_align = new_align
        rounds.append(PursuitRound(k, lam, "backward" if backward else "forward",
                                   new_align, residual_norm, factor))
        k += 1

    num_rounds = len(rounds)
    if num_rounds == 0:
        raise OptError("pursuit accepted no rounds")
    if lam_total <= 0.0:
        raise OptError("pursuit scale Lambda = %.17g is not positive" % lam_total)
    if num_rounds == 1 and rounds[0].kind == "forward":
        g = v0.point - anchor  # single-round normalization is exact
    else:
        g = d / lam_total
    outcome = PursuitOutcome(g, lam_total, num_rounds, truncated, align(neg, g),
                             rounds, v0, calls, False)
    if not region.contains(anchor + g, 1e-9):
        raise InfeasibleError("pursuit direction leaves the region")
    return outcome


@dataclass
class ThetaRow:
    """Relative alignment improvement statistics for one round index."""

    k: int
    mean: float
    std: float
    count: int
    excluded: int


def theta_from_alignments(sequences):
    """Theta statistics from raw per-iteration alignment sequences.

    For each round index k >= 2 (1-based), collects
    (a_k - a_{k-1}) / a_{k-1} over all sequences long enough, excluding (and
    counting) samples whose previous alignment is not positive.
    """
    if not sequences:
        raise OptError("no alignment sequences supplied")
    longest = max(len(seq) for seq in sequences)
    table = []
    for k in range(2, longest + 1):
        samples = []
        excluded = 0
        for seq in sequences:
            if len(seq) < k:
                continue
            previous = seq[k - 2]
            if previous <= 0.0:
                excluded += 1
                continue
            samples.append((seq[k - 1] - previous) / previous)
        if samples:
            arr = np.asarray(samples)
            mean = float(arr.mean())
            std = float(arr.std())  # population standard deviation
        else:
            mean = math.nan
            std = math.nan
        table.append(ThetaRow(k, mean, std, len(samples), excluded))
    return table


def theta_statistics(outcomes):
    """Theta statistics over the round traces of pursuit outcomes."""
    sequences = [[record.align_after for record in outcome.round_trace]
                 for outcome in outcomes]
    return theta_from_alignments(sequences)
