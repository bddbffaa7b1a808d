"""Graph patches on regular grids: finite-difference calculus, the discrete
Hardy-Littlewood maximal function, the pointwise gradient inequality, the
flatness bound driven by second derivatives, and the oscillation scaling law.

A patch holds f: [-2R, 2R]^m -> R^codim sampled on a uniform lattice with
spacing h, together with central-difference first and second derivatives
(one-sided second-order stencils on the boundary ring).  All pointwise checks
restrict to the inner ball |z| <= R, mirroring the ball-inside-double-ball
geometry the estimates are stated on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from .sampled_set import WeightedSample, _graph_function

# exhaustive pair scan up to this many inner nodes, seeded sampling above
PAIR_SCAN_EXHAUSTIVE = 4096
PAIR_SCAN_RANDOM = 10**6
# caps keep ball scans bounded; stride subsampling stays deterministic
MAX_SCAN_CENTERS = 128
OSC_PAIR_CAP = 1024
FIT_CENTER_CAP = 64
# ambient energy ball is this multiple of the oscillation scale
FIT_BALL_FACTOR = 5.0
SLOPE_SLACK = 0.05


@dataclass(frozen=True)
class GraphPatch:
    """f on a uniform centered lattice with finite-difference derivatives.

    values: grid_shape + (codim,); gradient: grid_shape + (codim, m);
    hessian: grid_shape + (codim, m, m).  normalized records f(0) = 0 and
    Df(0) = 0 at the center node.
    """

    m: int
    codim: int
    h: float
    extent: float
    coords: np.ndarray
    values: np.ndarray
    gradient: np.ndarray
    hessian: np.ndarray
    normalized: bool

    @property
    def grid_shape(self):
        return self.values.shape[:-1]

    @property
    def node_count(self) -> int:
        return int(np.prod(self.grid_shape))

    def node_points(self) -> np.ndarray:
        """Lattice coordinates, flattened in C order, shape (N, m)."""
        grids = np.meshgrid(*([self.coords] * self.m), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def flat_gradient(self) -> np.ndarray:
        """Gradient per node flattened in C order, shape (N, codim, m)."""
        return self.gradient.reshape(self.node_count, self.codim, self.m)


def _derivatives(values: np.ndarray, h: float):
    m = values.ndim - 1
    codim = values.shape[-1]
    grid = values.shape[:-1]
    gradient = np.empty(grid + (codim, m))
    hessian = np.empty(grid + (codim, m, m))
    for c in range(codim):
        for i in range(m):
            gi = np.gradient(values[..., c], h, axis=i, edge_order=2)
            gradient[..., c, i] = gi
            for j in range(m):
                hessian[..., c, i, j] = np.gradient(gi, h, axis=j, edge_order=2)
    return gradient, hessian


def make_patch(values: np.ndarray, h: float) -> GraphPatch:
    """Patch from raw grid values (grid_shape + (codim,)); the lattice must be
    square with an odd side so the origin is a node."""
    values = np.asarray(values, dtype=float)
    if values.ndim < 2:
        raise ValueError("values must have shape grid_shape + (codim,)")
    m = values.ndim - 1
    sides = values.shape[:-1]
    if len(set(sides)) != 1:
        raise ValueError("grid must be square, got sides %s" % (sides,))
    side = sides[0]
    if side < 3 or side % 2 == 0:
        raise ValueError("grid side must be odd and at least 3, got %d" % side)
    if h <= 0:
        raise ValueError("spacing h must be positive")
    half = (side - 1) // 2
    coords = h * np.arange(-half, half + 1)
    gradient, hessian = _derivatives(values, h)
    center = (half,) * m
    scale = 1.0 + float(np.abs(values).max())
    normalized = (
        float(np.abs(values[center]).max()) <= 1e-9 * scale
        and float(np.abs(gradient[center]).max()) <= 1e-9 * scale
    )
    return GraphPatch(
        m, values.shape[-1], float(h), half * h / 2.0, coords,
        values, gradient, hessian, normalized,
    )


def analytic_patch(
    function: str, m: int = 2, radius: float = 1.0, h: float = None, params=None
) -> GraphPatch:
    """Builtin patch over [-2 radius, 2 radius]^m for the named height
    function (flat, affine, paraboloid, quadratic, sinusoid)."""
    if h is None:
        h = radius / 16.0
    params = dict(params or {})
    fval, _ = _graph_function(function, params, m)
    half = int(round(2.0 * radius / h))
    coords = h * np.arange(-half, half + 1)
    grids = np.meshgrid(*([coords] * m), indexing="ij")
    z = np.stack([g.ravel() for g in grids], axis=1)
    vals = fval(z).reshape(grids[0].shape + (1,))
    return make_patch(vals, h)


def write_patch_csv(patch: GraphPatch, path) -> None:
    head = (
        ["i%d" % a for a in range(patch.m)]
        + ["x%d" % a for a in range(patch.m)]
        + ["f%d" % c for c in range(patch.codim)]
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(head) + "\n")
        for idx in np.ndindex(patch.grid_shape):
            row = (
                ["%d" % i for i in idx]
                + [repr(float(patch.coords[i])) for i in idx]
                + [repr(float(v)) for v in patch.values[idx]]
            )
            fh.write(",".join(row) + "\n")


def load_patch_csv(path) -> GraphPatch:
    """Patch from a grid dump (node multi-index, coordinates, values);
    derivatives are recomputed.  The lattice must be complete, uniform and
    centered on the origin."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        m = sum(1 for c in header if c.startswith("i"))
        codim = sum(1 for c in header if c.startswith("f"))
        if m == 0 or codim == 0 or len(header) != 2 * m + codim:
            raise ValueError("unrecognized patch header %r" % header)
        rows = np.loadtxt(fh, delimiter=",", ndmin=2)
    idx = rows[:, :m].astype(int)
    coords_cols = rows[:, m : 2 * m]
    fvals = rows[:, 2 * m :]
    side = int(idx.max()) + 1
    values = np.full((side,) * m + (codim,), np.nan)
    values[tuple(idx.T)] = fvals
    if np.isnan(values).any():
        raise ValueError("grid dump is missing nodes")
    axis = np.full(side, np.nan)
    axis[idx[:, 0]] = coords_cols[:, 0]
    steps = np.diff(axis)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise ValueError("grid spacing is not uniform")
    if abs(axis[0] + axis[-1]) > 1e-9 * (abs(axis[-1]) + 1.0):
        raise ValueError("grid must be centered on the origin")
    return make_patch(values, float(steps[0]))


def sample_graph(patch: GraphPatch) -> WeightedSample:
    """Weighted sample of the graph surface: points (z, f(z)), weights
    cell volume times sqrt(det(I + Df^T Df)), orthonormal analytic tangent
    frames.  Cells are h^m with halved extent on the boundary ring
    (trapezoid rule), so the total weight converges at second order."""
    n = patch.m + patch.codim
    zs = patch.node_points()
    vals = patch.values.reshape(patch.node_count, patch.codim)
    grads = patch.flat_gradient()
    pts = np.concatenate([zs, vals], axis=1)
    gram = np.eye(patch.m) + np.einsum("pci,pcj->pij", grads, grads)
    dens = np.sqrt(np.linalg.det(gram))
    edge = np.full(patch.grid_shape[0], patch.h)
    edge[0] = edge[-1] = patch.h / 2.0
    cell = edge
    for _ in range(patch.m - 1):
        cell = np.multiply.outer(cell, edge)
    w = cell.ravel() * dens
    rows = np.zeros((patch.node_count, patch.m, n))
    for i in range(patch.m):
        rows[:, i, i] = 1.0
        rows[:, i, patch.m :] = grads[:, :, i]
    # sequential Gram-Schmidt keeps frames deterministic
    frames = np.zeros_like(rows)
    for i in range(patch.m):
        v = rows[:, i].copy()
        for j in range(i):
            v -= frames[:, j] * np.einsum("pk,pk->p", v, frames[:, j])[:, None]
        v /= np.linalg.norm(v, axis=1)[:, None]
        frames[:, i] = v
    meta = {"analytic_measure": None, "h": patch.h, "extent": patch.extent}
    return WeightedSample(pts, w, patch.m, frames, meta)


def _ball_kernel(k: int, r_over_h: float, m: int) -> np.ndarray:
    axes = np.arange(-k, k + 1, dtype=float)
    grids = np.meshgrid(*([axes] * m), indexing="ij")
    d2 = sum(g * g for g in grids)
    return (d2 < r_over_h**2).astype(float)


def maximal_function(field: np.ndarray, h: float, s: float = 1.0) -> np.ndarray:
    """Discrete maximal function: at each node the sup over dyadic radii of
    the average of field^s over lattice nodes in the open ball, to the power
    1/s.  The radius-h term is the field itself, so M(g) >= g exactly.
    """
    field = np.asarray(field, dtype=float)
    if s < 1:
        raise ValueError("s must be at least 1")
    if np.any(field < 0):
        raise ValueError("field must be non-negative")
    m = field.ndim
    fs = field if s == 1 else field**s
    out = fs.copy()
    diag = h * math.sqrt(sum((side - 1) ** 2 for side in field.shape))
    ones = np.ones_like(field)
    r = 2.0 * h
    while True:
        if r >= diag:
            # one ball covers the whole grid from any node
            out = np.maximum(out, fs.mean())
            break
        k = int(np.ceil(r / h)) - 1
        kernel = _ball_kernel(k, r / h, m)
        num = fftconvolve(fs, kernel, mode="same")
        cnt = np.rint(fftconvolve(ones, kernel, mode="same"))
        out = np.maximum(out, np.clip(num, 0.0, None) / cnt)
        r *= 2.0
    return out if s == 1 else out ** (1.0 / s)


def hessian_norm(patch: GraphPatch) -> np.ndarray:
    """Pointwise Frobenius norm of the second-derivative tensor."""
    return np.sqrt(np.einsum("...cij,...cij->...", patch.hessian, patch.hessian))


def _inner_flat_indices(patch: GraphPatch, radius: float = None) -> np.ndarray:
    zs = patch.node_points()
    if radius is None:
        radius = patch.extent
    return np.nonzero(np.einsum("ij,ij->i", zs, zs) <= radius**2)[0]


def _stride_cap(indices: np.ndarray, cap: int) -> np.ndarray:
    if indices.shape[0] <= cap:
        return indices
    pick = np.linspace(0, indices.shape[0] - 1, cap).astype(int)
    return indices[pick]


def hajlasz_check(patch: GraphPatch, p: float, s: float = None, seed: int = 0):
    """Smallest c with |Df(x) - Df(y)| <= c |x - y| (g(x) + g(y)) over inner
    node pairs, where g is the maximal function of the second-derivative norm
    with inner exponent s in (m, p).  Returns (c_min, worst_pair) with the
    worst pair as grid multi-indices; (0.0, None) when the gradient is
    constant."""
    if s is None:
        s = (patch.m + p) / 2.0
    if not patch.m < s < p:
        raise ValueError("need m < s < p, got m=%d s=%g p=%g" % (patch.m, s, p))
    g = maximal_function(hessian_norm(patch), patch.h, s).ravel()
    zs = patch.node_points()
    grads = patch.flat_gradient().reshape(patch.node_count, -1)
    scale = 1.0 + float(np.abs(grads).max())
    if np.all(g == 0.0):
        if float(np.abs(grads - grads[0]).max()) > 1e-9 * scale:
            raise ValueError(
                "second derivatives vanish identically but the gradient"
                " varies; inconsistent stencils"
            )
        return 0.0, None
    inner = _inner_flat_indices(patch)
    k = inner.shape[0]
    best = 0.0
    worst = None

    def scan(ai: np.ndarray, bi: np.ndarray):
        nonlocal best, worst
        num = np.linalg.norm(grads[ai] - grads[bi], axis=1)
        dist = np.linalg.norm(zs[ai] - zs[bi], axis=1)
        den = dist * (g[ai] + g[bi])
        bad = (den == 0.0) & (num > 1e-12 * scale)
        if np.any(bad):
            raise ValueError(
                "gradient differs across a pair where the maximal field"
                " vanishes; inconsistent stencils"
            )
        ok = den > 0.0
        if not np.any(ok):
            return
        ratio = num[ok] / den[ok]
        j = int(np.argmax(ratio))
        if ratio[j] > best:
            best = float(ratio[j])
            va, vb = ai[ok][j], bi[ok][j]
            worst = (
                tuple(int(q) for q in np.unravel_index(va, patch.grid_shape)),
                tuple(int(q) for q in np.unravel_index(vb, patch.grid_shape)),
            )

    if k <= PAIR_SCAN_EXHAUSTIVE:
        for a in range(k - 1):
            rest = inner[a + 1 :]
            scan(np.full(rest.shape[0], inner[a]), rest)
    else:
        rng = np.random.default_rng(seed)
        drawn = 0
        while drawn < PAIR_SCAN_RANDOM:
            take = min(200_000, PAIR_SCAN_RANDOM - drawn)
            ai = inner[rng.integers(0, k, take)]
            bi = inner[rng.integers(0, k, take)]
            keep = ai != bi
            scan(ai[keep], bi[keep])
            drawn += take
    return best, worst


def beta_bound_check(patch: GraphPatch, s: float = None, max_centers: int = MAX_SCAN_CENTERS):
    """Calibrates the smallest C making flatness(a, r) <= C M r hold with
    M the maximal function of the second-derivative norm, over inner-ball
    centers and dyadic radii below the inner extent.  Returns (g_field,
    c_hat) with g_field = c_hat * M on the grid."""
    from .multiscale import _beta_full

    if s is None:
        s = patch.m + 1.0
    if s <= patch.m:
        raise ValueError("need s > m, got s=%g m=%d" % (s, patch.m))
    mgrid = maximal_function(hessian_norm(patch), patch.h, s)
    mflat = mgrid.ravel()
    sample = sample_graph(patch)
    radii = []
    r = patch.extent / 2.0
    # floor in domain-grid units: balls this size hold enough lattice nodes
    while r >= 4.0 * patch.h:
        radii.append(r)
        r /= 2.0
    if not radii:
        raise ValueError("patch too coarse: no usable radius below the extent")
    centers = _stride_cap(_inner_flat_indices(patch), max_centers)
    c_hat = 0.0
    for ci in centers:
        for r in radii:
            beta, _, _ = _beta_full(sample, int(ci), r, "optimize")
            mv = mflat[ci]
            if mv == 0.0:
                if beta > 1e-12:
                    return mgrid * math.inf, math.inf
                continue
            c_hat = max(c_hat, beta / mv)
    return c_hat * mgrid, c_hat


@dataclass(frozen=True)
class OscillationProfile:
    """Sup over contained balls of the gradient oscillation, per radius;
    nondecreasing in the radius."""

    radii: np.ndarray
    oscillation: np.ndarray


def _ball_osc(df: np.ndarray, tree: cKDTree, center: np.ndarray, rho: float) -> float:
    idx = np.sort(np.asarray(tree.query_ball_point(center, rho), dtype=int))
    if idx.shape[0] > OSC_PAIR_CAP:
        idx = idx[np.linspace(0, idx.shape[0] - 1, OSC_PAIR_CAP).astype(int)]
    if idx.shape[0] < 2:
        return 0.0
    return float(pdist(df[idx]).max())


def oscillation_profile(
    patch: GraphPatch, region_radius: float = None, max_centers: int = MAX_SCAN_CENTERS
) -> OscillationProfile:
    """Gradient oscillation profile over dyadic radii: for each radius the
    max, over lattice-centered balls contained in the region, of the largest
    pairwise gradient difference inside the ball."""
    if region_radius is None:
        region_radius = patch.extent
    if region_radius > 2.0 * patch.extent:
        raise ValueError("region exceeds the grid")
    zs = patch.node_points()
    df = patch.flat_gradient().reshape(patch.node_count, -1)
    tree = cKDTree(zs)
    radii = []
    rho = region_radius
    while rho >= 2.0 * patch.h:
        radii.append(rho)
        rho /= 2.0
    if not radii:
        raise ValueError("region too small: no radius above twice the spacing")
    radii = np.array(radii[::-1])
    region = _inner_flat_indices(patch, region_radius)
    dist = np.linalg.norm(zs[region], axis=1)
    osc = np.empty(radii.shape[0])
    for a, rho in enumerate(radii):
        centers = _stride_cap(region[dist <= region_radius - rho + 1e-12], max_centers)
        osc[a] = max(
            (_ball_osc(df, tree, zs[ci], rho) for ci in centers), default=0.0
        )
    # containment makes the true sup nondecreasing; smooth out grid wobble
    osc = np.maximum.accumulate(osc)
    return OscillationProfile(radii, osc)


def oscillation_energy_fit(
    patch: GraphPatch,
    p: float,
    field,
    sample: WeightedSample = None,
    max_centers: int = FIT_CENTER_CAP,
):
    """Scaling-law fit: gradient oscillation over the domain ball of radius s
    against the local L^p curvature average over the ambient ball of radius
    5s, as log(osc / M_p) vs log s.  The verdict asks the fitted slope to
    clear tau - 0.05 with tau = 1 - m/p; smooth patches come in near 1.

    field is a curvature field on `sample` (default: this patch's graph
    sample; a coarser graph sample of the same surface also works).
    """
    if p <= patch.m:
        raise ValueError("need p > m, got p=%g m=%d" % (p, patch.m))
    if sample is None:
        sample = sample_graph(patch)
    if field.values.shape[0] != sample.count:
        raise ValueError(
            "field has %d values but the sample has %d points"
            % (field.values.shape[0], sample.count)
        )
    tau = 1.0 - patch.m / p
    zs = patch.node_points()
    df = patch.flat_gradient().reshape(patch.node_count, -1)
    tree = cKDTree(zs)
    vals = patch.values.reshape(patch.node_count, patch.codim)
    scales = []
    sc = patch.extent / FIT_BALL_FACTOR
    while sc >= 2.0 * patch.h:
        scales.append(sc)
        sc /= 2.0
    if not scales:
        raise ValueError("patch too coarse for any oscillation scale")
    centers = _stride_cap(_inner_flat_indices(patch), max_centers)
    kp = np.asarray(field.values, dtype=float) ** p
    xs, ys = [], []
    skipped_empty = 0
    for ci in centers:
        fb = np.concatenate([zs[ci], vals[ci]])
        for sc in scales:
            osc = _ball_osc(df, tree, zs[ci], sc)
            idx = np.asarray(
                sample.index.query_ball_point(fb, FIT_BALL_FACTOR * sc), dtype=int
            )
            if idx.shape[0]:
                d = sample.points[idx] - fb
                idx = idx[
                    np.einsum("ij,ij->i", d, d) < (FIT_BALL_FACTOR * sc) ** 2
                ]
            wsum = float(sample.weights[idx].sum()) if idx.shape[0] else 0.0
            if wsum == 0.0:
                skipped_empty += 1
                continue
            mp = (float((kp[idx] * sample.weights[idx]).sum()) / wsum) ** (1.0 / p)
            if osc <= 0.0:
                continue
            if mp == 0.0:
                raise ValueError(
                    "curvature field vanishes on a ball where the gradient"
                    " oscillates; field and patch disagree"
                )
            xs.append(math.log(sc))
            ys.append(math.log(osc / mp))
    report = {
        "tau": tau,
        "p": float(p),
        "m": patch.m,
        "scales": [float(sc) for sc in scales],
        "centers": int(centers.shape[0]),
        "points_fit": len(xs),
        "skipped_empty_balls": skipped_empty,
    }
    if not xs:
        report.update(vacuous=True, passes=True, fitted_exponent=None)
        return None, report
    if len(set(xs)) < 2:
        raise ValueError("need at least two distinct scales with oscillation")
    slope, intercept = np.polyfit(np.array(xs), np.array(ys), 1)
    report.update(
        vacuous=False,
        fitted_exponent=float(slope),
        intercept=float(intercept),
        passes=bool(slope >= tau - SLOPE_SLACK),
    )
    return float(slope), report
