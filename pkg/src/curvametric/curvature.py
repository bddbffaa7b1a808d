"""Global curvature functions of weighted samples.

Two kernels are evaluated: the inverse tangent-point radius

    1 / r_tp(x, y; H) = 2 dist(y, x + H) / |y - x|^2        (0 when y = x
                                                              or y in x + H)

against a tangent plane H at x, and the (m+2)-point curvature
vol / diam^(m+2) from the simplex module.  Global values at a point are
suprema over partners: a linear scan for the tangent-point kernel, and
either exhaustive enumeration over vertex tuples or a seeded local search
with a flatness-based pruning certificate for the Menger kernel.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .grassmann import Plane
from .multiscale import _beta_full, best_plane_through
from .sampled_set import WeightedSample, neighbors_within
from .simplex import gram_volumes, unit_ball_volume

# Exhaustive Menger enumeration is refused above this count unless overridden.
EXACT_CUTOFF = 60
# Local search configuration of the pruned Menger search.
SEARCH_STARTS = 32
SEARCH_NEIGHBORS = 16
# Largest tuple count a single pruning bracket may enumerate.
PRUNE_BUDGET = 200_000


def beta_curvature_constant(n: int, m: int) -> float:
    """Constant C(n, m) = (2 + 4 sqrt(n-m-1))^n / 2^(n-m-1) bounding the
    tuple curvature K <= C beta(x, d) / d at a vertex x of a tuple with
    diameter d."""
    if not 1 <= m < n:
        raise ValueError("need 1 <= m < n")
    k = n - m - 1
    return (2.0 + 4.0 * math.sqrt(k)) ** n / 2.0 ** k


def tangent_point_inv_radius(x: np.ndarray, y: np.ndarray, h: Plane) -> float:
    """Inverse tangent-point radius 2 dist(y, x+H) / |y-x|^2; zero when y
    coincides with x or lies on the plane."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = y - x
    den = float(d @ d)
    if den == 0.0:
        return 0.0
    rej = h.reject(d)
    return 2.0 * float(np.linalg.norm(rej)) / den


def _tp_values(points: np.ndarray, x: np.ndarray, frame: np.ndarray) -> np.ndarray:
    diffs = points - x
    den = np.einsum("ij,ij->i", diffs, diffs)
    rej = diffs - (diffs @ frame.T) @ frame
    num = 2.0 * np.sqrt(np.einsum("ij,ij->i", rej, rej))
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(den > 0.0, num / den, 0.0)
    return vals


def tp_global(sample: WeightedSample, x_index: int, plane: Optional[Plane] = None):
    """Largest inverse tangent-point radius at sample point x_index over all
    partner points, with the lowest maximizing partner index.

    The plane defaults to the sample's analytic tangent at the point.
    """
    if plane is None:
        frame = _require_tangents(sample)[x_index]
    else:
        frame = np.asarray(plane.frame, dtype=float)
    vals = _tp_values(sample.points, sample.points[x_index], frame)
    j = int(np.argmax(vals))
    return float(vals[j]), j


def _require_tangents(sample: WeightedSample) -> np.ndarray:
    if sample.tangents is None:
        raise ValueError(
            "sample has no tangent planes; generate with analytic tangents or"
            " attach PCA tangents first"
        )
    return sample.tangents


def _tuple_curvatures(x: np.ndarray, others: np.ndarray) -> np.ndarray:
    """Curvatures of the tuples (x, others[t, 0], ..., others[t, m]),
    batched over the leading axis of others (T, m+1, n)."""
    edges = others - x
    vols = gram_volumes(edges)
    t, k, n = others.shape
    pts = np.concatenate([np.broadcast_to(x, (t, 1, n)), others], axis=1)
    diff = pts[:, :, None, :] - pts[:, None, :, :]
    d2 = np.einsum("tijk,tijk->tij", diff, diff)
    diam = np.sqrt(np.max(d2, axis=(1, 2)))
    with np.errstate(divide="ignore", invalid="ignore"):
        k_vals = np.where(diam > 0.0, vols / diam ** (k + 1), 0.0)
    return k_vals


def menger_global_exact(
    sample: WeightedSample,
    x_index: int,
    exact_cutoff: int = EXACT_CUTOFF,
    override: bool = False,
):
    """Exhaustive supremum of the tuple curvature at x_index over all
    (m+1)-subsets of the other points, in lexicographic order; ties keep the
    lexicographically first tuple.  Refuses samples above exact_cutoff
    points unless override is set.

    Returns (value, witness) where witness is the full index tuple starting
    with x_index.
    """
    n_pts = sample.count
    if n_pts > exact_cutoff and not override:
        raise ValueError(
            "sample has %d points; exhaustive enumeration above %d requires override"
            % (n_pts, exact_cutoff)
        )
    m = sample.intrinsic_dim
    others = [i for i in range(n_pts) if i != x_index]
    combos = np.array(list(combinations(others, m + 1)), dtype=int)
    x = sample.points[x_index]
    best_val, best_tuple = -1.0, None
    chunk = 65536
    for start in range(0, combos.shape[0], chunk):
        block = combos[start : start + chunk]
        vals = _tuple_curvatures(x, sample.points[block])
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val = float(vals[j])
            best_tuple = tuple(int(v) for v in block[j])
    return best_val, (x_index,) + best_tuple


@dataclass(frozen=True)
class PrunedResult:
    value: float
    witness: tuple
    certified: bool
    prune_stats: dict


def _local_search(sample, x_index, rng, neighbor_lists):
    """Seeded multi-start hill climb over vertex tuples; returns the best
    (value, sorted tuple) pair and the number of tuples evaluated."""
    m = sample.intrinsic_dim
    x = sample.points[x_index]
    others = np.array([i for i in range(sample.count) if i != x_index], dtype=int)
    evaluated = 0
    best_val, best_tuple = -1.0, None

    def consider(val, tup):
        nonlocal best_val, best_tuple
        key = tuple(int(v) for v in sorted(tup))
        if val > best_val or (val == best_val and key < best_tuple):
            best_val, best_tuple = float(val), key

    n_starts = min(SEARCH_STARTS, len(others))
    for _ in range(n_starts):
        # tuples stay index-sorted so kernel bits match enumeration order
        cur = np.sort(rng.choice(others, size=m + 1, replace=False))
        cur_val = float(_tuple_curvatures(x, sample.points[cur][None])[0])
        evaluated += 1
        improved = True
        while improved:
            improved = False
            cands = []
            for slot in range(m + 1):
                for c in neighbor_lists[cur[slot]]:
                    if c == x_index or c in cur:
                        continue
                    cand = cur.copy()
                    cand[slot] = c
                    cands.append(np.sort(cand))
            if not cands:
                break
            cands = np.array(cands, dtype=int)
            vals = _tuple_curvatures(x, sample.points[cands])
            evaluated += len(cands)
            j = int(np.argmax(vals))
            if vals[j] > cur_val:
                cur, cur_val = cands[j], float(vals[j])
                improved = True
        consider(cur_val, cur)
    return best_val, best_tuple, evaluated


def menger_global_pruned(
    sample: WeightedSample,
    x_index: int,
    seed: int = 0,
    budget: int = PRUNE_BUDGET,
):
    """Seeded local search for the global tuple curvature at x_index, with a
    flatness-based pruning pass over dyadic diameter brackets.

    Tuples with diameter in (d/2, d] have curvature at most
    4 C(n,m) beta(x, d) / d with beta on the closed ball, so brackets whose
    bound does not exceed the incumbent are skipped wholesale; the first
    bracket that cannot be skipped is enumerated in full (it covers every
    finer bracket).  When that succeeds the result carries certified=True
    and agrees with the exhaustive search; if enumeration would exceed the
    budget the incumbent is returned uncertified.
    """
    m, n = sample.intrinsic_dim, sample.ambient_dim
    n_pts = sample.count
    x = sample.points[x_index]
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=int(seed) & (2 ** 63 - 1), spawn_key=(x_index,))
    )
    k_nn = min(SEARCH_NEIGHBORS + 1, n_pts)
    _, nn_idx = sample.index.query(sample.points, k=k_nn)
    neighbor_lists = [
        [int(j) for j in row if j != i][:SEARCH_NEIGHBORS]
        for i, row in enumerate(np.atleast_2d(nn_idx))
    ]
    best_val, best_tuple, evaluated = _local_search(sample, x_index, rng, neighbor_lists)

    const = beta_curvature_constant(n, m)
    diffs = sample.points - x
    d_top = 2.0 * float(np.sqrt(np.max(np.einsum("ij,ij->i", diffs, diffs))))
    stats = {
        "starts": min(SEARCH_STARTS, n_pts - 1),
        "tuples_evaluated": evaluated,
        "brackets_skipped": 0,
        "bracket_enumerated": None,
        "budget_exceeded": False,
    }
    certified = False
    d_j = d_top
    level = 0
    while True:
        ball = neighbors_within(sample, x, d_j, closed=True)
        ball = ball[ball != x_index]
        if ball.size < m + 1:
            # no tuples at this scale or finer
            certified = True
            break
        rel = sample.points[ball] - x
        if not np.any(np.einsum("ij,ij->i", rel, rel) > 0.0):
            # only exact duplicates of x remain; their tuples have curvature 0
            certified = True
            break
        b_val, _, _ = _beta_full(sample, x_index, d_j, "optimize", closed=True)
        bound = 4.0 * const * b_val / d_j
        if bound <= best_val:
            stats["brackets_skipped"] += 1
            d_j *= 0.5
            level += 1
            continue
        n_tuples = math.comb(ball.size, m + 1)
        if n_tuples > budget:
            stats["budget_exceeded"] = True
            break
        combos = np.array(list(combinations(ball.tolist(), m + 1)), dtype=int)
        chunk = 65536
        for start in range(0, combos.shape[0], chunk):
            block = combos[start : start + chunk]
            vals = _tuple_curvatures(x, sample.points[block])
            j = int(np.argmax(vals))
            if vals[j] > best_val or (
                vals[j] == best_val
                and best_tuple is not None
                and tuple(int(v) for v in block[j]) < best_tuple
            ):
                best_val = float(vals[j])
                best_tuple = tuple(int(v) for v in block[j])
        evaluated += combos.shape[0]
        stats["tuples_evaluated"] = evaluated
        stats["bracket_enumerated"] = level
        certified = True
        break
    if certified and best_val == 0.0:
        # canonical zero witness: the lexicographically first tuple
        others = [i for i in range(n_pts) if i != x_index]
        best_tuple = tuple(others[: m + 1])
    return PrunedResult(best_val, (x_index,) + tuple(best_tuple), certified, stats)


@dataclass(frozen=True)
class CurvatureField:
    """Per-point global curvature values with witnesses.

    kind is 'tangent_point' (witnesses: partner index per point) or 'menger'
    (witnesses: full vertex tuples, one row per point).  certified marks
    points whose pruned search completed its pruning pass; it is all-True
    for exact evaluation.
    """

    kind: str
    values: np.ndarray
    witnesses: np.ndarray
    method: str
    tangent_source: str
    certified: np.ndarray
    prune_stats: list


def _resolve_tangent_frames(sample, tangent_source):
    if tangent_source == "analytic":
        return _require_tangents(sample), "analytic"
    if isinstance(tangent_source, str) and tangent_source.startswith("pca"):
        if ":" in tangent_source:
            radius = float(tangent_source.split(":", 1)[1])
        else:
            radius = 8.0 * sample.mean_spacing
        frames = np.zeros((sample.count, sample.intrinsic_dim, sample.ambient_dim))
        for i in range(sample.count):
            frames[i] = best_plane_through(sample, i, radius).frame
        return frames, "pca:%g" % radius
    raise ValueError("tangent_source must be 'analytic' or 'pca[:radius]'")


def curvature_field(
    sample: WeightedSample,
    kind: str,
    tangent_source="analytic",
    method: str = "auto",
    seed: int = 0,
    threads: int = 1,
    exact_cutoff: int = EXACT_CUTOFF,
) -> CurvatureField:
    """Global curvature at every sample point.

    kind 'tangent_point' scans partners against the tangent plane from
    tangent_source; kind 'menger' runs the exhaustive search ('exact', the
    default below exact_cutoff points) or the certified local search
    ('pruned').  The thread count only distributes the per-point loop;
    values are written by point index and do not depend on it.
    """
    n_pts = sample.count
    if kind == "tangent_point":
        frames, source = _resolve_tangent_frames(sample, tangent_source)
        values = np.zeros(n_pts)
        witnesses = np.zeros(n_pts, dtype=int)

        def run_tp(i):
            vals = _tp_values(sample.points, sample.points[i], frames[i])
            j = int(np.argmax(vals))
            values[i] = vals[j]
            witnesses[i] = j

        _run_indexed(run_tp, n_pts, threads)
        return CurvatureField(
            kind, values, witnesses, "scan", source, np.ones(n_pts, dtype=bool), []
        )
    if kind == "menger":
        if method == "auto":
            method = "exact" if n_pts <= exact_cutoff else "pruned"
        values = np.zeros(n_pts)
        witnesses = np.zeros((n_pts, sample.intrinsic_dim + 2), dtype=int)
        certified = np.ones(n_pts, dtype=bool)
        stats: list = [None] * n_pts
        if method == "exact":
            def run_exact(i):
                values[i], wit = menger_global_exact(sample, i, exact_cutoff, override=True)
                witnesses[i] = wit
            _run_indexed(run_exact, n_pts, threads)
            return CurvatureField(kind, values, witnesses, "exact", "none", certified, [])
        if method == "pruned":
            def run_pruned(i):
                res = menger_global_pruned(sample, i, seed=seed)
                values[i] = res.value
                witnesses[i] = res.witness
                certified[i] = res.certified
                stats[i] = res.prune_stats
            _run_indexed(run_pruned, n_pts, threads)
            return CurvatureField(kind, values, witnesses, "pruned", "none", certified, stats)
        raise ValueError("method must be 'auto', 'exact' or 'pruned'")
    raise ValueError("kind must be 'tangent_point' or 'menger'")


def _run_indexed(fn, n, threads):
    if threads <= 1:
        for i in range(n):
            fn(i)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fn, range(n)))


@dataclass(frozen=True)
class CoupleResult:
    is_couple: bool
    s_indices: np.ndarray
    s_weight: float
    weight_threshold: float
    tp_threshold: float
    tp_lower_bound_ok: Optional[bool]
    notes: list


def high_energy_couple_check(
    sample: WeightedSample,
    x_index: int,
    y_index: int,
    lam: float,
    alpha: float,
    d: float,
) -> CoupleResult:
    """Checks whether (x, y) is a high-energy couple at scale d: the points
    must satisfy d/2 <= |x - y| <= 2d, and the set S of sample points z near
    x whose tangent plane misses y by at least alpha d must carry weight at
    least lam omega_m alpha^(2m) d^m.

    When alpha < 1/2 the result also verifies that every z in S has global
    inverse tangent-point radius exceeding alpha / (9 d); for alpha >= 1/2
    that guarantee does not apply and tp_lower_bound_ok is None.
    """
    if not (0 < alpha and 0 < lam and 0 < d):
        raise ValueError("alpha, lam and d must be positive")
    tangents = _require_tangents(sample)
    m = sample.intrinsic_dim
    x = sample.points[x_index]
    y = sample.points[y_index]
    sep = float(np.linalg.norm(y - x))
    cond_sep = d / 2.0 <= sep <= 2.0 * d
    ball = neighbors_within(sample, x, alpha * alpha * d)
    notes = []
    if ball.size:
        z = sample.points[ball]
        off = y - z
        rej = off - np.einsum("pij,pj,pik->pk", tangents[ball], off, tangents[ball])
        dist = np.linalg.norm(rej, axis=1)
        s_mask = dist >= alpha * d
        s_indices = ball[s_mask]
    else:
        s_indices = np.array([], dtype=int)
    s_weight = float(sample.weights[s_indices].sum()) if s_indices.size else 0.0
    threshold = lam * unit_ball_volume(m) * alpha ** (2 * m) * d ** m
    is_couple = bool(cond_sep and s_weight >= threshold)
    if not cond_sep:
        notes.append("separation |x-y| = %.6g outside [d/2, 2d]" % sep)
    tp_threshold = alpha / (9.0 * d)
    if alpha >= 0.5:
        tp_ok = None
        notes.append("alpha >= 1/2: tangent-point lower bound not guaranteed")
    else:
        tp_ok = True
        for z_idx in s_indices:
            val, _ = tp_global(sample, int(z_idx))
            if not val > tp_threshold:
                tp_ok = False
                break
    return CoupleResult(
        is_couple, s_indices, s_weight, threshold, tp_threshold, tp_ok, notes
    )


def write_field_csv(field: CurvatureField, path) -> None:
    """Field as CSV: point_index, value, witness index columns.  Values use
    repr so a read-back reproduces them bit for bit."""
    wit = np.atleast_2d(field.witnesses.T).T
    n_wit = wit.shape[1] if wit.ndim == 2 else 1
    with open(path, "w", encoding="utf-8") as fh:
        cols = ["point_index", "value"] + ["witness_%d" % j for j in range(n_wit)]
        fh.write(",".join(cols) + "\n")
        for i in range(field.values.shape[0]):
            row = [str(i), repr(float(field.values[i]))]
            row += [str(int(v)) for v in np.atleast_1d(wit[i])]
            fh.write(",".join(row) + "\n")


def field_summary(field: CurvatureField) -> dict:
    """JSON-ready summary: extremes, mean, and the method flags."""
    vals = field.values
    return {
        "kind": field.kind,
        "method": field.method,
        "tangent_source": field.tangent_source,
        "count": int(vals.shape[0]),
        "min": float(vals.min()),
        "max": float(vals.max()),
        "mean": float(vals.mean()),
        "certified_fraction": float(np.mean(field.certified)),
    }


def write_field_json(field: CurvatureField, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(field_summary(field), fh, indent=2, sort_keys=True)
        fh.write("\n")
