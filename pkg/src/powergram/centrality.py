"""Edge centrality: Gramian-gradient ranking and the static NNEC baseline.

The edge centrality matrix collects, for every candidate edge, the
first-order sensitivity of a controllability metric to that edge's
coupling strength. Each entry costs one Lyapunov solve: if W is the
infinite-horizon Gramian and F the direction the state matrix moves when
the edge strengthens, then X solving A X + X A^T + F W + W F^T = 0 is
the Gramian's derivative, and the metric gradients are

    trace:          tr(X)
    logdet:         tr(W^-1 X)
    neg-trace-inv:  tr(W^-2 X)

Edges are ranked by |gradient| descending; the top-s edges form the
modification set handed to the optimizer. The nearest-neighbor edge
centrality (NNEC) is the purely topological baseline: it sees only the
coupling weights, never the dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .gramian import GramianMetric, gramian_infinite
from .linalg import solve_lyapunov, spd_inverse_and_logdet
from .network import EdgeId, GeneratorNetwork, ReducedSystem, edge_laplacian

__all__ = [
    "SUPPORT_THRESHOLD",
    "CandidateKind",
    "CandidateEdgeSet",
    "EdgeCentralityReport",
    "edge_direction_matrix",
    "ecm_entry",
    "build_ecm",
    "select_edge_set",
    "nnec_report",
]

# Couplings below this are treated as absent: printed network matrices
# carry rounding noise well above machine epsilon.
SUPPORT_THRESHOLD = 1e-12


class CandidateKind(Enum):
    ALL_PAIRS = "all-pairs"
    LAPLACIAN_SUPPORT = "laplacian"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class CandidateEdgeSet:
    """Ordered, duplicate-free set of edges eligible for modification."""

    edges: tuple[EdgeId, ...]
    provenance: CandidateKind

    def __post_init__(self):
        edges = tuple(self.edges)
        if len(set(edges)) != len(edges):
            raise ValueError("candidate edge set contains duplicates")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def all_pairs(cls, N: int) -> "CandidateEdgeSet":
        """Every unordered generator pair, in (j, i) lexicographic order."""
        if N < 2:
            raise ValueError(f"need at least 2 generators, got N={N}")
        edges = tuple(
            EdgeId(i, j) for j in range(1, N) for i in range(j + 1, N + 1)
        )
        return cls(edges=edges, provenance=CandidateKind.ALL_PAIRS)

    @classmethod
    def laplacian_support(
        cls, net: GeneratorNetwork, threshold: float = SUPPORT_THRESHOLD
    ) -> "CandidateEdgeSet":
        """Edges that actually exist in the network: coupling above threshold.

        This is the default candidate set, since creating brand-new
        transmission lines is not a feasible modification.
        """
        edges = tuple(
            edge
            for edge in cls.all_pairs(net.N).edges
            if net.edge_weight(edge) > threshold
        )
        return cls(edges=edges, provenance=CandidateKind.LAPLACIAN_SUPPORT)

    @classmethod
    def explicit(cls, edges) -> "CandidateEdgeSet":
        return cls(edges=tuple(edges), provenance=CandidateKind.EXPLICIT)

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def __contains__(self, edge: EdgeId) -> bool:
        return edge in self.edges


@dataclass(frozen=True)
class EdgeCentralityReport:
    """Centrality values, impacts, and the induced edge ranking.

    ``upsilon`` and ``impact`` are dense N x N, mirrored across the
    diagonal for display, zero outside the candidate set; ``tau`` holds
    the impacts in ranking order (non-increasing).
    """

    metric: GramianMetric
    candidate: CandidateEdgeSet
    upsilon: np.ndarray
    impact: np.ndarray
    ranking: tuple[EdgeId, ...]
    tau: np.ndarray

    def value(self, edge: EdgeId) -> float:
        return float(self.upsilon[edge.i - 1, edge.j - 1])


def edge_direction_matrix(
    sys: ReducedSystem, net: GeneratorNetwork, edge: EdgeId
) -> np.ndarray:
    """Derivative of the reduced state matrix w.r.t. one coupling weight.

    Because A depends affinely on L, this equals
    A(L + V_edge) - A(L) exactly, where V_edge is the elementary edge
    Laplacian; in block form [[0, 0], [-M^-1 V U, 0]].
    """
    N = net.N
    V = edge_laplacian(edge, N)
    F = np.zeros_like(sys.A)
    F[N - 1 :, : N - 1] = -(V @ sys.U) / net.M[:, None]
    return F


def _gradient_weights(W: np.ndarray, metric: GramianMetric) -> np.ndarray | None:
    """Left factor G such that the metric gradient entry is tr(G X)."""
    if metric is GramianMetric.TRACE:
        return None
    W_inv, _ = spd_inverse_and_logdet(W)
    if metric is GramianMetric.LOG_DET:
        return W_inv
    return W_inv @ W_inv


def _entry_from_direction(
    A: np.ndarray, W: np.ndarray, F: np.ndarray, G: np.ndarray | None
) -> float:
    X = solve_lyapunov(A, F @ W + W @ F.T)
    if G is None:
        return float(np.trace(X))
    return float(np.trace(G @ X))


def ecm_entry(
    sys: ReducedSystem, W: np.ndarray, edge: EdgeId, metric: GramianMetric
) -> float:
    """Sensitivity of one metric to one edge's coupling strength.

    ``W`` must be the infinite-horizon Gramian of ``sys`` (that pairing
    is what makes the Lyapunov-solve shortcut equal the true gradient).
    """
    F = edge_direction_matrix(sys, sys.network, edge)
    G = _gradient_weights(np.asarray(W, dtype=float), metric)
    return _entry_from_direction(sys.A, W, F, G)


def _ranked(edges, impact_of) -> tuple[tuple[EdgeId, ...], np.ndarray]:
    # Impact ties are broken lexicographically in (j, i) so rankings are
    # reproducible across platforms.
    ranking = tuple(
        sorted(edges, key=lambda e: (-impact_of(e), e.j, e.i))
    )
    tau = np.array([impact_of(e) for e in ranking])
    return ranking, tau


def build_ecm(
    sys: ReducedSystem,
    net: GeneratorNetwork,
    candidate: CandidateEdgeSet,
    metric: GramianMetric,
) -> EdgeCentralityReport:
    """Centrality values for every candidate edge, plus the ranking.

    One Lyapunov solve per edge on top of the single Gramian solve.
    """
    if len(candidate) == 0:
        raise ValueError("candidate edge set is empty")
    for edge in candidate:
        if edge.i > net.N:
            raise ValueError(f"candidate edge {edge} out of range for N={net.N}")
    W = gramian_infinite(sys).W
    G = _gradient_weights(W, metric)
    N = net.N
    upsilon = np.zeros((N, N))
    for edge in candidate:
        F = edge_direction_matrix(sys, net, edge)
        value = _entry_from_direction(sys.A, W, F, G)
        upsilon[edge.i - 1, edge.j - 1] = value
        upsilon[edge.j - 1, edge.i - 1] = value
    impact = np.abs(upsilon)
    ranking, tau = _ranked(
        candidate.edges, lambda e: impact[e.i - 1, e.j - 1]
    )
    return EdgeCentralityReport(
        metric=metric,
        candidate=candidate,
        upsilon=upsilon,
        impact=impact,
        ranking=ranking,
        tau=tau,
    )


def select_edge_set(report: EdgeCentralityReport, s: int) -> tuple[EdgeId, ...]:
    """The s most impactful edges of a centrality report, best first."""
    if not 1 <= s <= len(report.ranking):
        raise ValueError(
            f"selection size s={s} out of range 1..{len(report.ranking)}"
        )
    return report.ranking[:s]


def nnec_report(net: GeneratorNetwork):
    """Nearest-neighbor edge centrality: the topology-only baseline.

    lambda_ji = (rho_j + rho_i - 2 g_ji) / (|rho_j - rho_i| + 1) * g_ji
    with rho_k the total coupling strength at node k. Returns the dense
    matrix and the descending ranking over the Laplacian support. Depends
    only on L, never on M or D.
    """
    N = net.N
    G = -net.L.copy()
    np.fill_diagonal(G, 0.0)
    G[G <= SUPPORT_THRESHOLD] = 0.0
    rho = G.sum(axis=1)
    lam = np.zeros((N, N))
    support = CandidateEdgeSet.laplacian_support(net)
    for edge in support:
        a, b = edge.i - 1, edge.j - 1
        g = G[a, b]
        value = (rho[a] + rho[b] - 2.0 * g) / (abs(rho[a] - rho[b]) + 1.0) * g
        lam[a, b] = value
        lam[b, a] = value
    ranking, _ = _ranked(support.edges, lambda e: lam[e.i - 1, e.j - 1])
    return lam, ranking
