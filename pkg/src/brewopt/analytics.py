"""Performance measures, statistical comparison, and solution-diversity analysis.

Everything here is pure over immutable trial sets: summary statistics in the
error/efficiency/reliability/diversity layout, a rank-sum significance test,
pairwise solution distances, and k-means clustering with majority-rule
selection of the cluster count.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .optimizers import TrialRecord

# Critical-value constants: Hartigan's rule-of-thumb threshold and the
# conventional z for the Duda-Hart test.
HARTIGAN_THRESHOLD = 10.0
DUDA_HART_Z = 3.20


def population_diversity(positions: np.ndarray) -> float:
    """Mean Euclidean distance of members from the componentwise centroid."""
    pts = np.asarray(positions, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("positions must be a non-empty (N, D) array")
    center = pts.mean(axis=0)
    return float(np.sqrt(((pts - center) ** 2).sum(axis=1)).mean())


@dataclass(frozen=True)
class Stats:
    best: float
    worst: float
    median: float
    mean: float
    stdev: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "Stats":
        arr = np.asarray(values, dtype=float)
        return cls(
            best=float(arr.min()),
            worst=float(arr.max()),
            median=float(np.median(arr)),
            mean=float(arr.mean()),
            stdev=float(arr.std(ddof=1)) if arr.size > 1 else 0.0,
        )

    def as_dict(self) -> dict:
        return {
            "best": self.best,
            "worst": self.worst,
            "median": self.median,
            "mean": self.mean,
            "stdev": self.stdev,
        }


@dataclass(frozen=True)
class MeasureSummary:
    error: Stats
    efficiency: Stats | None  # None when no trial succeeded
    reliability: float  # percent of successful trials
    successes: int
    trials: int
    diversity_successful: float | None
    diversity_failed: float | None

    def as_dict(self) -> dict:
        return {
            "error": self.error.as_dict(),
            "efficiency": self.efficiency.as_dict() if self.efficiency else None,
            "reliability": self.reliability,
            "successes": self.successes,
            "trials": self.trials,
            "diversity_successful": self.diversity_successful,
            "diversity_failed": self.diversity_failed,
        }


def efficiency(trials: Sequence["TrialRecord"]) -> Stats | None:
    """Evaluation counts of successful trials; None when none succeeded."""
    fes = [t.fes_used for t in trials if t.success]
    return Stats.of(fes) if fes else None


def reliability(trials: Sequence["TrialRecord"]) -> float:
    if not trials:
        raise ValueError("no trials")
    return 100.0 * sum(1 for t in trials if t.success) / len(trials)


def summarize_trials(trials: Sequence["TrialRecord"]) -> MeasureSummary:
    if not trials:
        raise ValueError("no trials")
    div_ok = [population_diversity(t.final_population) for t in trials if t.success]
    div_fail = [population_diversity(t.final_population) for t in trials if not t.success]
    return MeasureSummary(
        error=Stats.of([t.best_error for t in trials]),
        efficiency=efficiency(trials),
        reliability=reliability(trials),
        successes=sum(1 for t in trials if t.success),
        trials=len(trials),
        diversity_successful=float(np.mean(div_ok)) if div_ok else None,
        diversity_failed=float(np.mean(div_fail)) if div_fail else None,
    )


class Significance(enum.Enum):
    LEFT = "left-significant"  # first sample significantly lower
    RIGHT = "right-significant"  # second sample significantly lower
    NONE = "not-significant"


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _exact_two_sided_p(doubled_ranks: list[int], n1: int, observed_doubled: int) -> float:
    """Exact permutation p-value of the rank sum via subset-sum counting."""
    counts: list[dict[int, int]] = [dict() for _ in range(n1 + 1)]
    counts[0][0] = 1
    for w in doubled_ranks:
        for c in range(min(n1, len(doubled_ranks)) - 1, -1, -1):
            if not counts[c]:
                continue
            target = counts[c + 1]
            for s, cnt in counts[c].items():
                target[s + w] = target.get(s + w, 0) + cnt
    dist = counts[n1]
    total = sum(dist.values())
    p_le = sum(cnt for s, cnt in dist.items() if s <= observed_doubled) / total
    p_ge = sum(cnt for s, cnt in dist.items() if s >= observed_doubled) / total
    return min(1.0, 2.0 * min(p_le, p_ge))


def rank_sum_p(sample_a: Sequence[float], sample_b: Sequence[float]) -> float:
    """Two-sided p-value of the two-sample rank-sum test.

    Exact permutation distribution for small samples (combined n <= 20),
    tie-corrected normal approximation with continuity correction otherwise.
    """
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("samples must be non-empty")
    pooled = np.concatenate([a, b])
    ranks = _midranks(pooled)
    n1, n2 = a.size, b.size
    n = n1 + n2
    w = float(ranks[:n1].sum())

    if n <= 20:
        doubled = [int(round(2 * r)) for r in ranks]
        return _exact_two_sided_p(doubled, n1, int(round(2 * w)))

    mu = n1 * (n + 1) / 2.0
    _, tie_counts = np.unique(pooled, return_counts=True)
    tie_term = float(((tie_counts**3 - tie_counts)).sum()) / (n * (n - 1))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if var <= 0:
        return 1.0
    diff = w - mu
    z = math.copysign(max(0.0, abs(diff) - 0.5), diff) / math.sqrt(var)
    return float(math.erfc(abs(z) / math.sqrt(2.0)))


def wilcoxon_1x1(
    sample_a: Sequence[float],
    sample_b: Sequence[float],
    alpha: float = 0.05,
) -> Significance:
    """Pairwise rank-sum comparison; direction points at the lower sample."""
    p = rank_sum_p(sample_a, sample_b)
    if p >= alpha:
        return Significance.NONE
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    ranks = _midranks(np.concatenate([a, b]))
    mean_rank_a = ranks[: a.size].mean()
    mean_rank_b = ranks[a.size :].mean()
    return Significance.LEFT if mean_rank_a < mean_rank_b else Significance.RIGHT


@dataclass(frozen=True)
class DistanceMatrix:
    entries: np.ndarray
    labels: tuple[int, ...]

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def upper_triangle(self) -> np.ndarray:
        i, j = np.triu_indices(self.size, k=1)
        return self.entries[i, j]


def distance_matrix(
    solutions: Sequence[np.ndarray],
    labels: Sequence[int] | None = None,
    *,
    scale: np.ndarray | None = None,
) -> DistanceMatrix:
    """Pairwise Euclidean distances between solution vectors.

    Distances are taken on raw quantity units by default; pass ``scale``
    (per-dimension bounds) to compare on bound-normalised coordinates.
    """
    pts = np.asarray(solutions, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("solutions must be a non-empty (n, D) array")
    if scale is not None:
        safe = np.where(np.asarray(scale, dtype=float) > 0, scale, 1.0)
        pts = pts / safe
    diff = pts[:, None, :] - pts[None, :, :]
    entries = np.sqrt((diff**2).sum(axis=2))
    if labels is None:
        labels = tuple(range(pts.shape[0]))
    return DistanceMatrix(entries=entries, labels=tuple(int(x) for x in labels))


def distance_summary(matrix: DistanceMatrix) -> dict:
    """Mean/stdev/min/max over distinct pairs, plus the farthest pair's labels."""
    if matrix.size < 2:
        raise ValueError("need at least two solutions for a distance summary")
    upper = matrix.upper_triangle()
    i, j = np.triu_indices(matrix.size, k=1)
    far = int(np.argmax(upper))
    return {
        "mean": float(upper.mean()),
        "stdev": float(upper.std(ddof=1)) if upper.size > 1 else 0.0,
        "min": float(upper.min()),
        "max": float(upper.max()),
        "farthest_pair": (matrix.labels[i[far]], matrix.labels[j[far]]),
    }


def distance_density(matrix: DistanceMatrix, bins: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Normalised histogram (densities, edges) of the pairwise distances."""
    upper = matrix.upper_triangle()
    if upper.size == 0:
        raise ValueError("need at least two solutions for a distance density")
    density, edges = np.histogram(upper, bins=bins, density=True)
    return density, edges


@dataclass(frozen=True)
class KMeansResult:
    assignments: np.ndarray
    centroids: np.ndarray
    wcss: float
    wcss_per_iteration: tuple[float, ...]  # from the winning restart


def _kmeans_pp_seeds(pts: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = pts.shape[0]
    centroids = np.empty((k, pts.shape[1]))
    centroids[0] = pts[int(rng.integers(n))]
    sq = ((pts - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = sq.sum()
        if total > 0:
            probs = sq / total
            idx = int(rng.choice(n, p=probs))
        else:
            idx = int(rng.integers(n))
        centroids[j] = pts[idx]
        sq = np.minimum(sq, ((pts - centroids[j]) ** 2).sum(axis=1))
    return centroids


def _lloyd(
    pts: np.ndarray, centroids: np.ndarray, max_iter: int
) -> tuple[np.ndarray, np.ndarray, float, list[float]]:
    k = centroids.shape[0]
    assignments = None
    wcss_trace: list[float] = []
    for _ in range(max_iter):
        sq = ((pts[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assignments = sq.argmin(axis=1)
        for j in range(k):
            if not np.any(new_assignments == j):
                # Re-seed an empty cluster with the point farthest from its centroid.
                farthest = int(sq[np.arange(len(pts)), new_assignments].argmax())
                new_assignments[farthest] = j
                centroids[j] = pts[farthest]
        if assignments is not None and np.array_equal(new_assignments, assignments):
            break
        assignments = new_assignments
        for j in range(k):
            centroids[j] = pts[assignments == j].mean(axis=0)
        sq = ((pts - centroids[assignments]) ** 2).sum(axis=1)
        wcss_trace.append(float(sq.sum()))
    sq = ((pts - centroids[assignments]) ** 2).sum(axis=1)
    return assignments, centroids, float(sq.sum()), wcss_trace


def kmeans(
    solutions: Sequence[np.ndarray],
    k: int,
    rng: np.random.Generator,
    *,
    restarts: int = 10,
    max_iter: int = 300,
) -> KMeansResult:
    """Lloyd iterations from k-means++ seeding; best of ``restarts`` by WCSS."""
    pts = np.asarray(solutions, dtype=float)
    if pts.ndim != 2:
        raise ValueError("solutions must be an (n, D) array")
    if not 1 <= k <= pts.shape[0]:
        raise ValueError(f"k={k} must be in [1, {pts.shape[0]}]")
    best: KMeansResult | None = None
    for _ in range(restarts):
        seeds = _kmeans_pp_seeds(pts, k, rng)
        assignments, centroids, wcss, trace = _lloyd(pts, seeds.copy(), max_iter)
        if best is None or wcss < best.wcss:
            best = KMeansResult(
                assignments=assignments,
                centroids=centroids,
                wcss=wcss,
                wcss_per_iteration=tuple(trace),
            )
    return best


def _total_scatter(pts: np.ndarray) -> float:
    center = pts.mean(axis=0)
    return float(((pts - center) ** 2).sum())


def calinski_harabasz(pts: np.ndarray, assignments: np.ndarray, k: int) -> float | None:
    n = pts.shape[0]
    if k < 2 or n <= k:
        return None
    w = 0.0
    b = 0.0
    center = pts.mean(axis=0)
    for j in range(k):
        cluster = pts[assignments == j]
        cj = cluster.mean(axis=0)
        w += float(((cluster - cj) ** 2).sum())
        b += len(cluster) * float(((cj - center) ** 2).sum())
    if w == 0.0:
        return math.inf
    return (b / (k - 1)) / (w / (n - k))


def davies_bouldin(pts: np.ndarray, assignments: np.ndarray, k: int) -> float | None:
    if k < 2:
        return None
    centroids = np.array([pts[assignments == j].mean(axis=0) for j in range(k)])
    scatter = np.array(
        [
            float(np.sqrt(((pts[assignments == j] - centroids[j]) ** 2).sum(axis=1)).mean())
            for j in range(k)
        ]
    )
    worst = 0.0
    for i in range(k):
        ratios = []
        for j in range(k):
            if j == i:
                continue
            sep = float(np.sqrt(((centroids[i] - centroids[j]) ** 2).sum()))
            if sep == 0.0:
                return None  # coincident centroids: index undefined
            ratios.append((scatter[i] + scatter[j]) / sep)
        worst += max(ratios)
    return worst / k


def silhouette(pts: np.ndarray, assignments: np.ndarray, k: int) -> float | None:
    n = pts.shape[0]
    if k < 2 or n < 2:
        return None
    dists = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    scores = np.zeros(n)
    for i in range(n):
        own = assignments == assignments[i]
        own_size = int(own.sum())
        if own_size <= 1:
            scores[i] = 0.0
            continue
        a = dists[i][own].sum() / (own_size - 1)
        b = math.inf
        for j in range(k):
            if j == assignments[i]:
                continue
            other = assignments == j
            if other.any():
                b = min(b, float(dists[i][other].mean()))
        if not math.isfinite(b) or max(a, b) == 0:
            scores[i] = 0.0
        else:
            scores[i] = (b - a) / max(a, b)
    return float(scores.mean())


def c_index(pts: np.ndarray, assignments: np.ndarray, k: int) -> float | None:
    n = pts.shape[0]
    if n < 2:
        return None
    iu, ju = np.triu_indices(n, k=1)
    all_d = np.sqrt(((pts[iu] - pts[ju]) ** 2).sum(axis=1))
    within = assignments[iu] == assignments[ju]
    n_within = int(within.sum())
    if n_within == 0:
        return None
    s_w = float(all_d[within].sum())
    ordered = np.sort(all_d)
    s_min = float(ordered[:n_within].sum())
    s_max = float(ordered[-n_within:].sum())
    if s_max == s_min:
        return None
    return (s_w - s_min) / (s_max - s_min)


def cluster_indices(
    solutions: Sequence[np.ndarray],
    assignments: np.ndarray,
    k: int,
    *,
    wcss_by_k: dict[int, float] | None = None,
) -> dict[str, float | None]:
    """Scores of the implemented validity indices for one partition.

    Calinski-Harabasz, C-index, Davies-Bouldin and Silhouette come from the
    partition alone. Krzanowski-Lai, Hartigan and Duda-Hart compare scatter
    across consecutive cluster counts, so they are only reported when
    ``wcss_by_k`` provides within-cluster sums of squares for k-1, k and k+1;
    otherwise they are None, as are indices undefined on degenerate data.
    """
    pts = np.asarray(solutions, dtype=float)
    scores: dict[str, float | None] = {
        "calinski_harabasz": calinski_harabasz(pts, assignments, k),
        "c_index": c_index(pts, assignments, k),
        "davies_bouldin": davies_bouldin(pts, assignments, k),
        "silhouette": silhouette(pts, assignments, k),
        "krzanowski_lai": None,
        "hartigan": None,
        "duda_hart": None,
    }
    if wcss_by_k:
        n, p = pts.shape
        scores["krzanowski_lai"] = _krzanowski_lai(wcss_by_k, k, p)
        scores["hartigan"] = _hartigan(wcss_by_k, k, n)
        scores["duda_hart"] = _duda_hart_ratio(wcss_by_k, k)
    return scores


def _krzanowski_lai(wcss_by_k: dict[int, float], k: int, p: int) -> float | None:
    def diff(kk: int) -> float | None:
        if kk - 1 not in wcss_by_k or kk not in wcss_by_k:
            return None
        return (kk - 1) ** (2.0 / p) * wcss_by_k[kk - 1] - kk ** (2.0 / p) * wcss_by_k[kk]

    d_k, d_k1 = diff(k), diff(k + 1)
    if d_k is None or d_k1 is None or d_k1 == 0.0:
        return None
    return abs(d_k) / abs(d_k1)


def _hartigan(wcss_by_k: dict[int, float], k: int, n: int) -> float | None:
    if k not in wcss_by_k or k + 1 not in wcss_by_k or wcss_by_k[k + 1] == 0.0:
        return None
    return (wcss_by_k[k] / wcss_by_k[k + 1] - 1.0) * (n - k - 1)


def _duda_hart_ratio(wcss_by_k: dict[int, float], k: int) -> float | None:
    if k not in wcss_by_k or k + 1 not in wcss_by_k or wcss_by_k[k] == 0.0:
        return None
    return wcss_by_k[k + 1] / wcss_by_k[k]


def duda_hart_critical(p: int, n: int) -> float:
    """Critical value for the Duda-Hart scatter-ratio test."""
    return 1.0 - 2.0 / (math.pi * p) - DUDA_HART_Z * math.sqrt(
        2.0 * (1.0 - 8.0 / (math.pi**2 * p)) / (n * p)
    )


def majority_winner(votes: dict[int, int]) -> int:
    """Modal cluster count; ties resolve to the lower k."""
    if not votes:
        raise ValueError("no votes")
    return min(votes, key=lambda k: (-votes[k], k))


@dataclass(frozen=True)
class ClusterReport:
    k: int
    assignments: np.ndarray
    sizes: tuple[int, ...]
    index_votes: dict[int, int]
    index_choices: dict[str, int | None]
    majority: int

    def as_dict(self) -> dict:
        return {
            "k": int(self.k),
            "assignments": [int(a) for a in self.assignments],
            "sizes": [int(s) for s in self.sizes],
            "index_votes": {str(k): int(v) for k, v in self.index_votes.items()},
            "index_choices": self.index_choices,
            "majority": int(self.majority),
        }


def select_k_majority(
    solutions: Sequence[np.ndarray],
    k_range: Iterable[int] = range(2, 7),
    rng: np.random.Generator | None = None,
) -> ClusterReport:
    """Choose the cluster count by majority vote of the validity indices.

    Each index votes for its best k over the candidate range; the modal k
    wins, ties resolving to the lower k.
    """
    pts = np.asarray(solutions, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two solutions to cluster")
    if rng is None:
        rng = np.random.default_rng(0)
    n, p = pts.shape
    candidates = sorted(k for k in k_range if 2 <= k <= n)
    if not candidates:
        raise ValueError("no feasible cluster counts in range")

    fit_ks = sorted({1} | set(candidates) | {k + 1 for k in candidates if k + 1 <= n})
    fits: dict[int, KMeansResult] = {}
    wcss_by_k: dict[int, float] = {1: _total_scatter(pts)}
    for k in fit_ks:
        if k == 1:
            continue
        fits[k] = kmeans(pts, k, rng)
        wcss_by_k[k] = fits[k].wcss

    per_k_scores = {
        k: cluster_indices(pts, fits[k].assignments, k, wcss_by_k=wcss_by_k)
        for k in candidates
    }

    def argbest(index: str, maximise: bool) -> int | None:
        scored = [(k, per_k_scores[k][index]) for k in candidates]
        scored = [(k, s) for k, s in scored if s is not None and not math.isnan(s)]
        if not scored:
            return None
        if maximise:
            return max(scored, key=lambda t: (t[1], -t[0]))[0]
        return min(scored, key=lambda t: (t[1], t[0]))[0]

    def smallest_passing(index: str, passes) -> int | None:
        scored = [(k, per_k_scores[k][index]) for k in candidates]
        scored = [(k, s) for k, s in scored if s is not None and not math.isnan(s)]
        if not scored:
            return None
        for k, s in scored:
            if passes(s):
                return k
        return None

    choices: dict[str, int | None] = {
        "calinski_harabasz": argbest("calinski_harabasz", maximise=True),
        "krzanowski_lai": argbest("krzanowski_lai", maximise=True),
        "c_index": argbest("c_index", maximise=False),
        "davies_bouldin": argbest("davies_bouldin", maximise=False),
        "silhouette": argbest("silhouette", maximise=True),
    }
    # Comparative rules: smallest k passing, falling back to the closest call.
    hart = smallest_passing("hartigan", lambda s: s <= HARTIGAN_THRESHOLD)
    choices["hartigan"] = hart if hart is not None else argbest("hartigan", maximise=False)
    crit = duda_hart_critical(p, n)
    duda = smallest_passing("duda_hart", lambda s: s >= crit)
    choices["duda_hart"] = duda if duda is not None else argbest("duda_hart", maximise=True)

    votes = Counter(k for k in choices.values() if k is not None)
    if not votes:
        raise ValueError("no index produced a vote")
    winner = majority_winner(votes)
    assignments = fits[winner].assignments
    sizes = tuple(int((assignments == j).sum()) for j in range(winner))
    return ClusterReport(
        k=winner,
        assignments=assignments,
        sizes=sizes,
        index_votes={k: votes.get(k, 0) for k in candidates},
        index_choices=choices,
        majority=votes[winner],
    )


def improvement_raster(trials: Sequence["TrialRecord"], iterations: int = 300) -> np.ndarray:
    """Improvement flags, one row per trial over the first ``iterations`` steps.

    Failed trials render as blank rows, matching the raster convention used
    for the improvement figures.
    """
    raster = np.zeros((len(trials), iterations), dtype=int)
    for row, trial in enumerate(trials):
        if not trial.success:
            continue
        for it in trial.improvement_iters:
            if 1 <= it <= iterations:
                raster[row, it - 1] = 1
    return raster
