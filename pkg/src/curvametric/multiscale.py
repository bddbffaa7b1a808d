"""Multiscale flatness numbers of weighted samples.

The one-sided flatness number of a sample at a point x and scale r is

    beta(x, r) = (1/r) inf_H  sup { dist(z, x + H) : z in sample, |z - x| < r }

over m-planes H through x; the bilateral number theta(x, r) replaces the sup
by the symmetric Hausdorff-distance sum between the sample and the plane
inside the closed ball.  The infimum is approximated by a weighted PCA plane
followed by a bounded number of descent steps on the max-distance objective;
analytic tangents, when present, seed the candidate set, so the optimizer
never loses to them by more than the float tolerance.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .grassmann import Plane, _orthonormalize_rows
from .sampled_set import WeightedSample, neighbors_within, sample_diam

# Probe spacing (relative to the ball radius) of the plane-to-set grid.
THETA_GRID_DELTA = 0.05
# Scales below this multiple of the mean sample spacing are unreliable.
SPACING_FLOOR = 4.0
# Default number of dyadic scales, starting at diam / 4.
DEFAULT_SCALES = 8
# Maximum descent iterations polishing the PCA plane.
POLISH_ITERS = 20
# A beta value only enters hole-constant ratios when it exceeds this multiple
# of (spacing / r).
BETA_RELIABLE_FACTOR = 10.0


@dataclass(frozen=True)
class ScaleProfile:
    """Per-point, per-scale flatness table.

    beta and theta have shape (len(base_indices), len(radii)); theta is None
    when not requested.  frames holds the minimizing plane frame per entry,
    shape (B, K, m, n).
    """

    base_indices: np.ndarray
    radii: np.ndarray
    beta: np.ndarray
    theta: Optional[np.ndarray]
    frames: np.ndarray
    intrinsic_dim: int
    ambient_dim: int
    optimizer_gap: float


@dataclass(frozen=True)
class FinenessReport:
    """Empirical regularity and hole constants with their witness tables."""

    a_sigma: float
    m_sigma: Optional[float]
    table: dict
    worst_pairs: list
    notes: list


@dataclass(frozen=True)
class DecayFit:
    """Log-log least-squares fit of max-beta against scale."""

    kappa_hat: float
    constant_hat: float
    residual: float
    kappa_bound: float
    satisfies_bound: bool
    radii: np.ndarray
    max_beta: np.ndarray


def _resolve_point(sample: WeightedSample, x):
    """Accept either a point index or explicit coordinates."""
    if isinstance(x, (int, np.integer)):
        i = int(x)
        return sample.points[i], i
    arr = np.asarray(x, dtype=float)
    if arr.shape != (sample.ambient_dim,):
        raise ValueError(
            "x must be a point index or an array of shape (%d,)" % sample.ambient_dim
        )
    return arr, None


def dyadic_radii(sample: WeightedSample, scales: int = DEFAULT_SCALES) -> np.ndarray:
    """Dyadic scale grid diam/4, diam/8, ... with the spacing floor applied.

    Raises when every scale falls below SPACING_FLOOR times the mean sample
    spacing.
    """
    top = sample_diam(sample).value / 4.0
    radii = top * 0.5 ** np.arange(scales)
    floor = SPACING_FLOOR * sample.mean_spacing
    keep = radii >= floor
    if not np.any(keep):
        raise ValueError(
            "all %d dyadic scales fall below the spacing floor %.3g"
            " (= %g x mean spacing); sample is too sparse" % (scales, floor, SPACING_FLOOR)
        )
    return radii[keep]


def _ball_offsets(sample: WeightedSample, point: np.ndarray, r: float, closed: bool):
    idx = neighbors_within(sample, point, r, closed=closed)
    offs = sample.points[idx] - point
    return idx, offs


def _pca_frame(offs: np.ndarray, weights: np.ndarray, m: int) -> np.ndarray:
    """Frame of the weighted second-moment top-m eigenspace, with the sign of
    each row fixed so its first nonnegligible component is positive.

    offs must be in units of the ball radius (|offs| <= 1).  Weights carry a
    smooth radial window (1 - |offs|^2)^2: a hard ball cutoff makes the
    moment error scale with the spacing, the window drops it to spacing^2,
    which is what keeps PCA tangent planes usable inside sup kernels.
    """
    rad2 = np.einsum("ij,ij->i", offs, offs)
    w = weights * np.clip(1.0 - rad2, 0.0, None) ** 2
    total = w.sum()
    if total > 0.0:
        w = w / total
    second = np.einsum("i,ij,ik->jk", w, offs, offs)
    _, vecs = np.linalg.eigh(second)
    frame = vecs[:, ::-1][:, :m].T.copy()
    for row in frame:
        nz = np.nonzero(np.abs(row) > 1e-12 * max(1.0, np.max(np.abs(row))))[0]
        if nz.size and row[nz[0]] < 0:
            row *= -1.0
    return frame


def _sup_dist(frame: np.ndarray, offs: np.ndarray):
    rej = offs - (offs @ frame.T) @ frame
    d = np.linalg.norm(rej, axis=1)
    j = int(np.argmax(d))
    return float(d[j]), j


def _polish_frame(frame: np.ndarray, offs: np.ndarray, iters: int = POLISH_ITERS):
    """Descent on the max-distance objective: rotate the plane toward the
    worst offset, halving the step on failure.  Returns the best frame seen
    and its objective value."""
    best_val, j = _sup_dist(frame, offs)
    best = frame
    cur, cur_val = frame, best_val
    step = 0.5
    for _ in range(iters):
        d = offs[j]
        dn = float(np.linalg.norm(d))
        if dn <= 0.0:
            break
        coef = cur @ d
        cn = float(np.linalg.norm(coef))
        rej = d - cur.T @ coef
        rn = float(np.linalg.norm(rej))
        if rn <= 1e-15 * dn:
            break
        u = rej / rn
        if cn <= 1e-15 * dn:
            coef_unit = np.zeros(cur.shape[0])
            coef_unit[0] = 1.0
            v = cur[0]
        else:
            coef_unit = coef / cn
            v = cur.T @ coef_unit
        phi = step * math.atan2(rn, cn)
        shift = (math.cos(phi) - 1.0) * v + math.sin(phi) * u
        cand = _orthonormalize_rows(cur + np.outer(coef_unit, shift))
        val, jc = _sup_dist(cand, offs)
        if val < cur_val:
            cur, cur_val, j = cand, val, jc
            if val < best_val:
                best, best_val = cand, val
        else:
            step *= 0.5
            if step < 1e-4:
                break
    return best, best_val


def _beta_candidates(sample, point, index, plane_strategy, plane):
    if plane_strategy == "given":
        if plane is None:
            raise ValueError("plane_strategy='given' requires a plane")
        return [np.asarray(plane.frame, dtype=float)], False
    if plane_strategy == "analytic_tangent":
        if sample.tangents is None or index is None:
            raise ValueError(
                "plane_strategy='analytic_tangent' needs a sample with tangents"
                " and x given as a point index"
            )
        return [sample.tangents[index]], False
    if plane_strategy == "optimize":
        cands = []
        if sample.tangents is not None and index is not None:
            cands.append(sample.tangents[index])
        return cands, True
    raise ValueError("unknown plane_strategy %r" % plane_strategy)


def _beta_full(
    sample: WeightedSample,
    x,
    r: float,
    plane_strategy: str = "optimize",
    plane: Optional[Plane] = None,
    closed: bool = False,
    extra_indices: Optional[np.ndarray] = None,
):
    """beta value together with the minimizing frame and the PCA-to-polished
    improvement (optimizer gap).

    All internal geometry runs on offsets divided by r and weights divided by
    their ball total, so dilating the sample by a power of two reproduces the
    computation bit for bit.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    point, index = _resolve_point(sample, x)
    idx, offs = _ball_offsets(sample, point, r, closed)
    if extra_indices is not None and extra_indices.size:
        idx = np.union1d(idx, extra_indices)
        offs = sample.points[idx] - point
    m = sample.intrinsic_dim
    u = offs / r
    if not np.any(np.linalg.norm(u, axis=1) > 1e-12):
        frame = np.eye(sample.ambient_dim)[:m]
        return 0.0, frame, 0.0
    candidates, do_opt = _beta_candidates(sample, point, index, plane_strategy, plane)
    gap = 0.0
    if do_opt:
        w = sample.weights[idx]
        pca = _pca_frame(u, w, m)
        pca_val, _ = _sup_dist(pca, u)
        polished, pol_val = _polish_frame(pca, u)
        gap = max(0.0, pca_val - pol_val)
        candidates = candidates + [pca, polished]
    best_frame, best_val = None, math.inf
    for frame in candidates:
        val, _ = _sup_dist(frame, u)
        if val < best_val:
            best_frame, best_val = frame, val
    return best_val, best_frame, gap


def beta(
    sample: WeightedSample,
    x,
    r: float,
    plane_strategy: str = "optimize",
    plane: Optional[Plane] = None,
    closed: bool = False,
) -> float:
    """One-sided flatness number at x and scale r (open ball by default).

    x may be a point index or explicit coordinates; plane_strategy is
    'optimize' (PCA seed plus descent polish, never worse than an analytic
    tangent when one is attached), 'analytic_tangent', or 'given' with an
    explicit plane.  Returns 0 when no other points lie in the ball.
    """
    val, _, _ = _beta_full(sample, x, r, plane_strategy, plane, closed)
    return val


def best_plane_through(sample: WeightedSample, x, r: float) -> Plane:
    """Weighted PCA plane of the ball offsets at x; deterministic up to the
    documented sign convention.  Raises when fewer than m points besides
    near-duplicates of x lie in the open ball."""
    point, _ = _resolve_point(sample, x)
    idx, offs = _ball_offsets(sample, point, r, closed=False)
    m = sample.intrinsic_dim
    live = np.linalg.norm(offs, axis=1) > 1e-12 * r
    if np.count_nonzero(live) < m:
        raise ValueError(
            "need at least m = %d sample points in the ball besides x, found %d"
            % (m, int(np.count_nonzero(live)))
        )
    w = sample.weights[idx]
    # offsets in units of r, weights normalized: dilation-covariant bit for bit
    return Plane(_pca_frame(offs / r, w, m))


def _probe_grid(m: int) -> np.ndarray:
    """Deterministic unit-ball grid with about (4 / delta)^m probe points."""
    q = math.ceil(4.0 / THETA_GRID_DELTA / 2.0) * 2
    axes = [(-1.0 + (np.arange(q) + 0.5) * 2.0 / q) for _ in range(m)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([ax.ravel() for ax in mesh])
    keep = np.einsum("ij,ij->i", pts, pts) <= 1.0
    return pts[keep]


def theta(sample: WeightedSample, x, r: float) -> float:
    """Bilateral flatness number at x and scale r (closed ball).

    Sum of the set-to-plane sup distance and the plane-to-set sup distance,
    the latter probed on a deterministic grid over the plane disk, divided
    by r.  Candidate planes are the PCA plane and the analytic tangent.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    point, index = _resolve_point(sample, x)
    idx, offs = _ball_offsets(sample, point, r, closed=True)
    if idx.size == 0:
        raise ValueError("no sample points in the closed ball; theta undefined")
    m = sample.intrinsic_dim
    # offsets in units of r: dilation-covariant bit for bit
    u = offs / r
    w = sample.weights[idx]
    candidates = [_pca_frame(u, w, m)]
    if sample.tangents is not None and index is not None:
        candidates.append(sample.tangents[index])
    grid = _probe_grid(m)
    if idx.size > 128:
        local = cKDTree(u)
        def probe_dist(probes):
            d, _ = local.query(probes)
            return float(np.max(d))
    else:
        def probe_dist(probes):
            diff = probes[:, None, :] - u[None, :, :]
            d2 = np.einsum("ijk,ijk->ij", diff, diff)
            return float(math.sqrt(np.max(np.min(d2, axis=1))))
    best = math.inf
    for frame in candidates:
        set_to_plane, _ = _sup_dist(frame, u)
        plane_to_set = probe_dist(grid @ frame)
        best = min(best, set_to_plane + plane_to_set)
    return best


def scale_profile(
    sample: WeightedSample,
    radii: Optional[Sequence[float]] = None,
    base_indices: Optional[Sequence[int]] = None,
    plane_strategy: str = "optimize",
    include_theta: bool = True,
) -> ScaleProfile:
    """Flatness table over base points x scales.

    Defaults: the dyadic grid from dyadic_radii and all sample points.
    """
    if radii is None:
        radii = dyadic_radii(sample)
    radii = np.asarray(radii, dtype=float)
    if base_indices is None:
        base_indices = np.arange(sample.count)
    base_indices = np.asarray(base_indices, dtype=int)
    nb, nk = base_indices.size, radii.size
    m, n = sample.intrinsic_dim, sample.ambient_dim
    beta_tab = np.zeros((nb, nk))
    theta_tab = np.zeros((nb, nk)) if include_theta else None
    frames = np.zeros((nb, nk, m, n))
    gap = 0.0
    for bi, pi in enumerate(base_indices):
        for ki, r in enumerate(radii):
            val, frame, g = _beta_full(sample, int(pi), float(r), plane_strategy)
            beta_tab[bi, ki] = val
            frames[bi, ki] = frame
            gap = max(gap, g)
            if include_theta:
                theta_tab[bi, ki] = theta(sample, int(pi), float(r))
    return ScaleProfile(
        base_indices, radii, beta_tab, theta_tab, frames, m, n, gap
    )


def write_profile_csv(profile: ScaleProfile, path: str):
    """Dump the profile as point_index, r, beta, theta, frame components."""
    m, n = profile.intrinsic_dim, profile.ambient_dim
    header = ["point_index", "r", "beta", "theta"]
    header += ["frame_%d_%d" % (i, j) for i in range(m) for j in range(n)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for bi, pi in enumerate(profile.base_indices):
            for ki, r in enumerate(profile.radii):
                th = profile.theta[bi, ki] if profile.theta is not None else math.nan
                row = [int(pi), repr(float(r)), repr(float(profile.beta[bi, ki])), repr(float(th))]
                row += [repr(float(v)) for v in profile.frames[bi, ki].ravel()]
                writer.writerow(row)


def fineness(
    sample: WeightedSample,
    radii: Optional[Sequence[float]] = None,
    base_indices: Optional[Sequence[int]] = None,
    max_hole_bases: int = 64,
) -> FinenessReport:
    """Empirical Ahlfors-regularity constant and hole constant.

    The regularity constant is the minimum over all points and guarded
    scales of weight(ball) / r^m.  The hole constant is the largest
    theta / beta ratio over a strided subset of base points, restricted to
    entries whose beta exceeds BETA_RELIABLE_FACTOR x (spacing / r).
    """
    if radii is None:
        radii = dyadic_radii(sample)
    radii = np.asarray(radii, dtype=float)
    m = sample.intrinsic_dim
    spacing = sample.mean_spacing

    ratios = np.zeros((sample.count, radii.size))
    for ki, r in enumerate(radii):
        hits = sample.index.query_ball_point(sample.points, r)
        for pi, idx in enumerate(hits):
            if idx:
                arr = np.asarray(idx, dtype=int)
                diff = sample.points[arr] - sample.points[pi]
                keep = np.einsum("ij,ij->i", diff, diff) < r * r
                ratios[pi, ki] = sample.weights[arr[keep]].sum() / r ** m
    a_sigma = float(ratios.min())

    if base_indices is None:
        stride = max(1, sample.count // max_hole_bases)
        base_indices = np.arange(0, sample.count, stride)
    base_indices = np.asarray(base_indices, dtype=int)
    hole_entries = []
    for pi in base_indices:
        for r in radii:
            b = beta(sample, int(pi), float(r))
            if b <= BETA_RELIABLE_FACTOR * spacing / r:
                continue
            t = theta(sample, int(pi), float(r))
            hole_entries.append((t / b, int(pi), float(r), b, t))
    notes = []
    if hole_entries:
        hole_entries.sort(reverse=True)
        m_sigma = float(hole_entries[0][0])
        if m_sigma < 2.0:
            notes.append("hole-constant estimate below the definitional minimum 2")
        worst = [
            {"point_index": pi, "r": r, "beta": b, "theta": t, "ratio": q}
            for q, pi, r, b, t in hole_entries[:5]
        ]
    else:
        m_sigma = None
        worst = []
        notes.append(
            "no (x, r) entry had beta above %g x spacing/r; hole constant undefined"
            % BETA_RELIABLE_FACTOR
        )
    table = {
        "radii": radii,
        "weight_ratio_min_per_scale": ratios.min(axis=0),
        "weight_ratio": ratios,
    }
    return FinenessReport(a_sigma, m_sigma, table, worst, notes)


def decay_fit(profile: ScaleProfile, p: float, energy_kind: str) -> DecayFit:
    """Least-squares slope of log max-beta against log r, compared with the
    decay exponent the finite-energy theory guarantees.

    energy_kind 'menger' uses (p - m) / (p (m + 1) + 2 m); 'tangent_point'
    uses (p - m) / (p + m).  Requires at least 4 usable scales; raises
    'too flat to fit' when the profile is at the noise floor.
    """
    m = profile.intrinsic_dim
    if p <= m:
        raise ValueError("need p > m for a finite-energy decay exponent")
    if energy_kind == "menger":
        bound = (p - m) / (p * (m + 1) + 2 * m)
    elif energy_kind == "tangent_point":
        bound = (p - m) / (p + m)
    else:
        raise ValueError("energy_kind must be 'menger' or 'tangent_point'")
    max_beta = profile.beta.max(axis=0)
    usable = max_beta > 1e-12
    if not np.any(usable):
        raise ValueError("too flat to fit: all max-beta values at the noise floor")
    if np.count_nonzero(usable) < 4:
        raise ValueError(
            "need at least 4 usable scales for the decay fit, have %d"
            % int(np.count_nonzero(usable))
        )
    x = np.log(profile.radii[usable])
    y = np.log(max_beta[usable])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return DecayFit(
        kappa_hat=float(slope),
        constant_hat=float(math.exp(intercept)),
        residual=rms,
        kappa_bound=float(bound),
        satisfies_bound=bool(slope >= bound - 0.05),
        radii=profile.radii[usable],
        max_beta=max_beta[usable],
    )


def attach_pca_tangents(sample: WeightedSample, radius: Optional[float] = None) -> WeightedSample:
    """Copy of the sample with PCA tangent planes attached at every point.

    Default radius: 8 x mean sample spacing.
    """
    if radius is None:
        radius = 8.0 * sample.mean_spacing
    frames = np.zeros((sample.count, sample.intrinsic_dim, sample.ambient_dim))
    for i in range(sample.count):
        frames[i] = best_plane_through(sample, i, radius).frame
    return sample.with_tangents(frames)
