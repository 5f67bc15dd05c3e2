"""Semantic-field discovery inside a poem.

Content-word lemmas are clustered by cosine similarity with affinity
propagation; each cluster gets a centroid and a topic word (the nearest
vocabulary word to the centroid).  Centroid distances feed the semantic
aesthetics and the metaphor search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_array

from .corpus import Poem, content_lemmas
from .lexres import EmbeddingStore


class AffinityPropagation(BaseEstimator, ClusterMixin):
    """Exemplar clustering on a precomputed similarity matrix.

    Responsibility/availability message passing per Frey & Dueck, run
    deterministically (no noise injection).  The cluster count is
    data-driven.  Items whose mutual similarity reaches their
    self-similarity are indistinguishable and merged up front, which also
    resolves the all-identical-items degeneracy to a single cluster.  If
    the messages never commit to an exemplar (uniform similarities), every
    item stays its own cluster and ``converged_`` is False.
    """

    def __init__(
        self,
        damping: float = 0.9,
        max_iter: int = 200,
        convergence_iter: int = 15,
        preference: float | None = None,
    ):
        self.damping = damping
        self.max_iter = max_iter
        self.convergence_iter = convergence_iter
        self.preference = preference

    def fit(self, X, y=None):
        if not 0.5 <= self.damping < 1.0:
            raise ValueError(f"damping {self.damping} outside [0.5, 1)")
        S = check_array(X, dtype=np.float64)
        n = S.shape[0]
        if S.shape != (n, n):
            raise ValueError(f"similarity matrix must be square, got {S.shape}")
        if not np.allclose(S, S.T):
            raise ValueError("similarity matrix must be symmetric")

        group_of, reps = self._merge_indistinguishable(S)
        labels_small, exemplars_small, converged, n_iter = self._message_passing(
            S[np.ix_(reps, reps)]
        )
        self.labels_ = np.array([labels_small[group_of[i]] for i in range(n)])
        self.exemplar_indices_ = np.array([reps[e] for e in exemplars_small])
        self.converged_ = converged
        self.n_iter_ = n_iter
        return self

    @staticmethod
    def _merge_indistinguishable(S: np.ndarray, tol: float = 1e-12):
        """Union items i, j with S[i,j] >= min(S[i,i], S[j,j]) - tol."""
        n = S.shape[0]
        parent = list(range(n))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(n):
            for j in range(i + 1, n):
                if S[i, j] >= min(S[i, i], S[j, j]) - tol:
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[max(ri, rj)] = min(ri, rj)
        reps = sorted({find(i) for i in range(n)})
        rep_slot = {rep: slot for slot, rep in enumerate(reps)}
        group_of = [rep_slot[find(i)] for i in range(n)]
        return group_of, reps

    def _message_passing(self, S: np.ndarray):
        n = S.shape[0]
        if n == 1:
            return np.zeros(1, dtype=int), [0], True, 0

        S = S.copy()
        offdiag = S[~np.eye(n, dtype=bool)]
        preference = float(np.median(offdiag)) if self.preference is None else self.preference
        np.fill_diagonal(S, preference)

        R = np.zeros((n, n))
        A = np.zeros((n, n))
        rows = np.arange(n)
        exemplar_mask = np.zeros(n, dtype=bool)
        stable = 0
        converged = False
        iteration = 0
        for iteration in range(1, self.max_iter + 1):
            # responsibilities
            AS = A + S
            first_idx = AS.argmax(axis=1)
            first_max = AS[rows, first_idx]
            AS[rows, first_idx] = -np.inf
            second_max = AS.max(axis=1)
            R_new = S - first_max[:, None]
            R_new[rows, first_idx] = S[rows, first_idx] - second_max
            R = self.damping * R + (1.0 - self.damping) * R_new

            # availabilities
            Rp = np.maximum(R, 0.0)
            Rp[rows, rows] = R[rows, rows]
            A_new = Rp.sum(axis=0)[None, :] - Rp
            diag = A_new[rows, rows].copy()
            A_new = np.minimum(A_new, 0.0)
            A_new[rows, rows] = diag
            A = self.damping * A + (1.0 - self.damping) * A_new

            mask = (np.diag(A) + np.diag(R)) > 0.0
            if mask.any() and (mask == exemplar_mask).all():
                stable += 1
                if stable >= self.convergence_iter:
                    converged = True
                    break
            else:
                stable = 1 if mask.any() else 0
            exemplar_mask = mask

        exemplars = np.flatnonzero(exemplar_mask)
        if exemplars.size == 0:
            # Messages never committed: leave every item alone, flagged.
            return np.arange(n), list(range(n)), False, iteration
        labels = exemplars[S[:, exemplars].argmax(axis=1)]
        labels[exemplars] = exemplars
        slot = {int(e): k for k, e in enumerate(exemplars)}
        return np.array([slot[int(l)] for l in labels]), [int(e) for e in exemplars], converged, iteration

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_


@dataclass(frozen=True)
class SemanticFields:
    """Clustered content lemmas of one poem."""

    clusters: tuple[tuple[str, ...], ...]
    centroids: np.ndarray  # one row per cluster
    topics: tuple[str, ...]
    pairwise_distances: np.ndarray  # symmetric cosine distances, zero diagonal
    excluded: tuple[str, ...]  # lemmas without an embedding
    converged: bool

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    def members(self) -> frozenset[str]:
        return frozenset(lemma for cluster in self.clusters for lemma in cluster)


@dataclass(frozen=True)
class SemanticAesthetics:
    n_clusters: int
    avg_distance: float
    max_distance: float


def cosine_similarity_matrix(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1)
    norms[norms == 0.0] = 1.0
    unit = vectors / norms[:, None]
    return unit @ unit.T


def cluster_poem(
    poem: Poem,
    store: EmbeddingStore,
    damping: float = 0.9,
    max_iter: int = 200,
    convergence_iter: int = 15,
) -> SemanticFields | None:
    """Cluster a poem's content lemmas in embedding space.

    Lemmas are deduplicated; ones without an embedding are excluded and
    reported.  Returns None when nothing is embeddable.
    """
    lemmas = content_lemmas(poem)
    embeddable = [l for l in lemmas if l in store]
    excluded = tuple(l for l in lemmas if l not in store)
    if not embeddable:
        return None

    vectors = np.stack([store.vector(l) for l in embeddable])
    similarity = cosine_similarity_matrix(vectors)
    ap = AffinityPropagation(damping=damping, max_iter=max_iter, convergence_iter=convergence_iter)
    labels = ap.fit_predict(similarity)

    order: list[int] = []
    members: dict[int, list[int]] = {}
    for i, label in enumerate(labels):
        label = int(label)
        if label not in members:
            members[label] = []
            order.append(label)
        members[label].append(i)

    clusters = tuple(tuple(embeddable[i] for i in members[label]) for label in order)
    centroids = np.stack([vectors[members[label]].mean(axis=0) for label in order])
    topics = tuple(store.nearest_to_vector(c) for c in centroids)
    distances = 1.0 - cosine_similarity_matrix(centroids)
    np.fill_diagonal(distances, 0.0)
    distances = np.maximum(distances, 0.0)
    return SemanticFields(
        clusters=clusters,
        centroids=centroids,
        topics=topics,
        pairwise_distances=distances,
        excluded=excluded,
        converged=ap.converged_,
    )


def semantic_aesthetics(fields: SemanticFields) -> SemanticAesthetics:
    """Cluster count plus mean and max of the off-diagonal centroid
    distances; a single cluster scores 0 for both distances."""
    k = fields.n_clusters
    if k < 1:
        raise ValueError("semantic aesthetics need at least one cluster")
    if k == 1:
        return SemanticAesthetics(1, 0.0, 0.0)
    off = fields.pairwise_distances[~np.eye(k, dtype=bool)]
    return SemanticAesthetics(k, float(off.mean()), float(off.max()))
