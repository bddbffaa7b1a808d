"""Weighted point samples of m-dimensional sets in R^n.

A sample couples points with positive weights that stand in for the
m-dimensional Hausdorff measure of the patches they represent, plus optional
analytic tangent planes.  Generators for reference shapes (circle, sphere,
ellipsoid, torus, flat disk, function graphs, stacked tangent spheres) use
deterministic low-discrepancy lattices whose phase is derived from the seed,
so equal specs reproduce byte-identical samples while distinct seeds vary
the sample positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import ellipeinc, ellipkinc

from .grassmann import Plane

# Exact pairwise diameter is evaluated up to this size; larger samples use a
# double farthest-point sweep (factor >= 1/sqrt(3)) and flag the result.
EXACT_DIAM_LIMIT = 4096

GENERATOR_KINDS = (
    "circle",
    "sphere",
    "ellipsoid",
    "torus",
    "flat_disk",
    "graph_of_function",
    "stacked_spheres",
)

_GOLDEN_CONJ = (math.sqrt(5.0) - 1.0) / 2.0


class DiamResult(NamedTuple):
    value: float
    exact: bool


@dataclass(frozen=True)
class WeightedSample:
    """Immutable weighted sample of an m-set in R^n.

    points: (N, n) positions; weights: (N,) positive measure weights;
    tangents: optional (N, m, n) stack of orthonormal tangent frames.
    """

    points: np.ndarray
    weights: np.ndarray
    intrinsic_dim: int
    tangents: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        m = int(self.intrinsic_dim)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-d array, got shape %s" % (pts.shape,))
        n_pts, n = pts.shape
        if not 1 <= m < n:
            raise ValueError("need 1 <= intrinsic_dim (%d) < ambient dim (%d)" % (m, n))
        if n_pts < m + 2:
            raise ValueError("need at least m + 2 = %d points, got %d" % (m + 2, n_pts))
        if w.shape != (n_pts,):
            raise ValueError("weights shape %s does not match %d points" % (w.shape, n_pts))
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain non-finite entries")
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise ValueError("weights must be finite and positive")
        tg = self.tangents
        if tg is not None:
            tg = np.asarray(tg, dtype=float)
            if tg.shape != (n_pts, m, n):
                raise ValueError(
                    "tangents shape %s, expected %s" % (tg.shape, (n_pts, m, n))
                )
            gram = np.einsum("pik,pjk->pij", tg, tg)
            dev = np.max(np.abs(gram - np.eye(m)))
            if dev > 1e-8:
                raise ValueError("tangent frames not orthonormal (deviation %.3e)" % dev)
            tg = tg.copy()
            tg.setflags(write=False)
        pts = pts.copy()
        pts.setflags(write=False)
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "intrinsic_dim", m)
        object.__setattr__(self, "tangents", tg)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    @cached_property
    def index(self) -> cKDTree:
        """Spatial index over the points."""
        return cKDTree(self.points)

    @cached_property
    def mean_spacing(self) -> float:
        """Mean nearest-neighbor distance."""
        k = min(2, self.count)
        dists, _ = self.index.query(self.points, k=k)
        return float(np.mean(dists[:, -1]))

    def tangent_plane(self, i: int) -> Plane:
        """Analytic tangent plane at point i; raises when tangents are absent."""
        if self.tangents is None:
            raise ValueError("sample carries no tangent planes")
        return Plane(self.tangents[i])

    def with_tangents(self, tangents: np.ndarray) -> "WeightedSample":
        """Copy of this sample with the given tangent frames attached."""
        return WeightedSample(
            self.points, self.weights, self.intrinsic_dim, tangents, dict(self.meta)
        )

    def total_weight(self) -> float:
        return float(math.fsum(self.weights.tolist()))


@dataclass(frozen=True)
class ShapeSpec:
    """Declarative description of a generated sample: shape kind, shape
    parameters, sample count and lattice seed."""

    kind: str
    count: int
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(
                "unknown shape kind %r (choose from %s)" % (self.kind, ", ".join(GENERATOR_KINDS))
            )
        if self.count < 3:
            raise ValueError("count must be at least 3")


def _phase(seed: int, salt: int = 0) -> float:
    """Deterministic lattice phase in [0, 1) derived from the seed."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(seed) & (2 ** 63 - 1),
                                                       spawn_key=(salt,)))
    return float(rng.uniform(0.0, 1.0))


def _orthocomplement_frames(normals: np.ndarray) -> np.ndarray:
    """Orthonormal frames (N, 2, 3) of the planes orthogonal to unit normals."""
    n_pts = normals.shape[0]
    # most orthogonal coordinate axis per point
    axis = np.argmin(np.abs(normals), axis=1)
    e = np.zeros((n_pts, 3))
    e[np.arange(n_pts), axis] = 1.0
    t1 = e - normals * np.einsum("ij,ij->i", e, normals)[:, None]
    t1 /= np.linalg.norm(t1, axis=1)[:, None]
    t2 = np.cross(normals, t1)
    return np.stack([t1, t2], axis=1)


def _fibonacci_sphere(count: int, phase: float) -> np.ndarray:
    """Unit-sphere lattice with equal-area latitude bands and golden-ratio
    azimuths, rotated by the given phase."""
    i = np.arange(count)
    z = 1.0 - 2.0 * (i + 0.5) / count
    az = 2.0 * math.pi * ((i * _GOLDEN_CONJ + phase) % 1.0)
    rad = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack([rad * np.cos(az), rad * np.sin(az), z])


def _generate_circle(spec: ShapeSpec) -> WeightedSample:
    radius = float(spec.params.get("radius", 1.0))
    if radius <= 0:
        raise ValueError("circle radius must be positive")
    n = spec.count
    ang = 2.0 * math.pi * (np.arange(n) + _phase(spec.seed)) / n
    pts = radius * np.column_stack([np.cos(ang), np.sin(ang)])
    tangents = np.column_stack([-np.sin(ang), np.cos(ang)])[:, None, :]
    w = np.full(n, 2.0 * math.pi * radius / n)
    meta = {"analytic_measure": 2.0 * math.pi * radius, "radius": radius}
    return WeightedSample(pts, w, 1, tangents, meta)


def _generate_sphere(spec: ShapeSpec) -> WeightedSample:
    radius = float(spec.params.get("radius", 1.0))
    if radius <= 0:
        raise ValueError("sphere radius must be positive")
    n = spec.count
    u = _fibonacci_sphere(n, _phase(spec.seed))
    pts = radius * u
    tangents = _orthocomplement_frames(u)
    w = np.full(n, 4.0 * math.pi * radius * radius / n)
    meta = {"analytic_measure": 4.0 * math.pi * radius * radius, "radius": radius}
    return WeightedSample(pts, w, 2, tangents, meta)


def ellipsoid_area(a: float, b: float, c: float) -> float:
    """Surface area of the ellipsoid with semi-axes a, b, c via incomplete
    elliptic integrals."""
    axes = sorted([float(a), float(b), float(c)], reverse=True)
    a, b, c = axes
    if a <= 0:
        raise ValueError("semi-axes must be positive")
    if (a - c) / a < 1e-12:
        return 4.0 * math.pi * a * a
    phi = math.acos(c / a)
    k2 = (a * a * (b * b - c * c)) / (b * b * (a * a - c * c))
    se, sf = float(ellipeinc(phi, k2)), float(ellipkinc(phi, k2))
    s = math.sin(phi)
    return 2.0 * math.pi * c * c + (2.0 * math.pi * a * b / s) * (
        se * s * s + sf * math.cos(phi) ** 2
    )


def _generate_ellipsoid(spec: ShapeSpec) -> WeightedSample:
    semi_axes = spec.params.get("semi_axes", (2.0, 1.0, 1.0))
    a, b, c = (float(v) for v in semi_axes)
    if min(a, b, c) <= 0:
        raise ValueError("semi-axes must be positive")
    n = spec.count
    u = _fibonacci_sphere(n, _phase(spec.seed))
    d = np.array([a, b, c])
    pts = u * d
    # area element of x -> D x at sphere normal u is abc * |D^-1 u|
    inv = u / d
    jac = a * b * c * np.linalg.norm(inv, axis=1)
    w = (4.0 * math.pi / n) * jac
    normals = inv / np.linalg.norm(inv, axis=1)[:, None]
    tangents = _orthocomplement_frames(normals)
    meta = {"analytic_measure": ellipsoid_area(a, b, c), "semi_axes": (a, b, c)}
    return WeightedSample(pts, w, 2, tangents, meta)


def _generate_torus(spec: ShapeSpec) -> WeightedSample:
    major = float(spec.params.get("major_radius", 2.0))
    minor = float(spec.params.get("minor_radius", 1.0))
    if not 0 < minor < major:
        raise ValueError("need 0 < minor_radius < major_radius")
    n = spec.count
    i = np.arange(n)
    u = 2.0 * math.pi * ((i + 0.5) / n + _phase(spec.seed, 0)) % (2.0 * math.pi)
    v = 2.0 * math.pi * ((i * _GOLDEN_CONJ + _phase(spec.seed, 1)) % 1.0)
    ring = major + minor * np.cos(v)
    pts = np.column_stack([ring * np.cos(u), ring * np.sin(u), minor * np.sin(v)])
    # parameter area element r (R + r cos v) du dv
    w = (2.0 * math.pi) ** 2 / n * minor * ring
    tu = np.column_stack([-np.sin(u), np.cos(u), np.zeros(n)])
    tv = np.column_stack([-np.cos(u) * np.sin(v), -np.sin(u) * np.sin(v), np.cos(v)])
    tangents = np.stack([tu, tv], axis=1)
    meta = {
        "analytic_measure": 4.0 * math.pi ** 2 * major * minor,
        "major_radius": major,
        "minor_radius": minor,
    }
    return WeightedSample(pts, w, 2, tangents, meta)


def _generate_flat_disk(spec: ShapeSpec) -> WeightedSample:
    radius = float(spec.params.get("radius", 1.0))
    m = int(spec.params.get("m", 2))
    ambient = int(spec.params.get("ambient_dim", m + 1))
    if radius <= 0:
        raise ValueError("disk radius must be positive")
    if m not in (1, 2):
        raise ValueError("flat_disk supports m in {1, 2}")
    if ambient <= m:
        raise ValueError("ambient_dim must exceed m")
    n = spec.count
    i = np.arange(n)
    if m == 1:
        t = ((i + 0.5) / n + _phase(spec.seed)) % 1.0
        coords = (2.0 * t - 1.0)[:, None] * radius
        measure = 2.0 * radius
    else:
        r = radius * np.sqrt((i + 0.5) / n)
        th = 2.0 * math.pi * ((i * _GOLDEN_CONJ + _phase(spec.seed)) % 1.0)
        coords = np.column_stack([r * np.cos(th), r * np.sin(th)])
        measure = math.pi * radius * radius
    pts = np.zeros((n, ambient))
    pts[:, :m] = coords
    w = np.full(n, measure / n)
    frame = np.eye(ambient)[:m]
    tangents = np.broadcast_to(frame, (n, m, ambient)).copy()
    meta = {"analytic_measure": measure, "radius": radius}
    return WeightedSample(pts, w, m, tangents, meta)


def _graph_function(name: str, params: dict, m: int):
    """Value and gradient callables for the named graph heights f: R^m -> R."""
    if name == "flat":
        return (lambda z: np.zeros(z.shape[0]),
                lambda z: np.zeros_like(z))
    if name == "affine":
        slope = np.asarray(params.get("slope", [0.5, -0.25][:m]), dtype=float)
        return (lambda z: z @ slope,
                lambda z: np.broadcast_to(slope, z.shape).copy())
    if name == "paraboloid":
        c = float(params.get("scale", 1.0))
        return (lambda z: 0.5 * c * np.einsum("ij,ij->i", z, z),
                lambda z: c * z)
    if name == "quadratic":
        a = np.asarray(params.get("matrix", np.diag([1.0, -0.5][:m])), dtype=float)
        return (lambda z: 0.5 * np.einsum("ij,jk,ik->i", z, a, z),
                lambda z: z @ a.T)
    if name == "sinusoid":
        amp = float(params.get("amplitude", 0.3))
        freq = float(params.get("frequency", 2.0))
        if m == 1:
            return (lambda z: amp * np.sin(freq * z[:, 0]),
                    lambda z: amp * freq * np.cos(freq * z))
        return (
            lambda z: amp * np.sin(freq * z[:, 0]) * np.sin(freq * z[:, 1]),
            lambda z: amp * freq * np.column_stack(
                [
                    np.cos(freq * z[:, 0]) * np.sin(freq * z[:, 1]),
                    np.sin(freq * z[:, 0]) * np.cos(freq * z[:, 1]),
                ]
            ),
        )
    raise ValueError("unknown graph function %r" % name)


def _generate_graph(spec: ShapeSpec) -> WeightedSample:
    m = int(spec.params.get("m", 2))
    if m not in (1, 2):
        raise ValueError("graph_of_function supports m in {1, 2}")
    radius = float(spec.params.get("radius", 1.0))
    name = spec.params.get("function", "paraboloid")
    fval, fgrad = _graph_function(name, spec.params, m)
    n = spec.count
    from scipy.stats import qmc

    halton = qmc.Halton(d=m, scramble=True, seed=int(spec.seed) & (2 ** 63 - 1))
    z = radius * (2.0 * halton.random(n) - 1.0)
    heights = fval(z)
    grads = fgrad(z)
    pts = np.column_stack([z, heights])
    # graph area element sqrt(1 + |Df|^2) for codimension one
    dens = np.sqrt(1.0 + np.einsum("ij,ij->i", grads, grads))
    w = (2.0 * radius) ** m / n * dens
    # tangent frame: orthonormalized rows (e_i, d_i f)
    tangents = np.zeros((n, m, m + 1))
    for i in range(m):
        tangents[:, i, i] = 1.0
        tangents[:, i, m] = grads[:, i]
    t0 = tangents[:, 0]
    t0 /= np.linalg.norm(t0, axis=1)[:, None]
    if m == 2:
        t1 = tangents[:, 1] - t0 * np.einsum("ij,ij->i", tangents[:, 1], t0)[:, None]
        t1 /= np.linalg.norm(t1, axis=1)[:, None]
        tangents = np.stack([t0, t1], axis=1)
    else:
        tangents = t0[:, None, :]
    meta = {"analytic_measure": None, "function": name, "radius": radius}
    return WeightedSample(pts, w, m, tangents, meta)


def _generate_stacked_spheres(spec: ShapeSpec) -> WeightedSample:
    depth = int(spec.params.get("depth", 3))
    if depth < 1:
        raise ValueError("depth must be at least 1")
    radii = np.array([2.0 ** (-i - 2) for i in range(depth)])
    # sphere i touches p_i = (2^-i, 0, 0) and p_{i+1}, centered midway
    centers = np.zeros((depth, 3))
    centers[:, 0] = [(2.0 ** (-i) + 2.0 ** (-i - 1)) / 2.0 for i in range(depth)]
    areas = 4.0 * math.pi * radii ** 2
    raw = spec.count * areas / areas.sum()
    counts = np.maximum(6, np.floor(raw).astype(int))
    while counts.sum() > spec.count and np.any(counts > 6):
        counts[int(np.argmax(counts))] -= 1
    counts[0] += max(0, spec.count - int(counts.sum()))
    pts, wts, tg = [], [], []
    for i in range(depth):
        u = _fibonacci_sphere(int(counts[i]), _phase(spec.seed, i))
        pts.append(centers[i] + radii[i] * u)
        wts.append(np.full(int(counts[i]), areas[i] / counts[i]))
        tg.append(_orthocomplement_frames(u))
    meta = {
        "analytic_measure": float(areas.sum()),
        "depth": depth,
        "radii": radii.tolist(),
        "tangency_points": [(2.0 ** (-i - 1), 0.0, 0.0) for i in range(depth)],
    }
    return WeightedSample(
        np.vstack(pts), np.concatenate(wts), 2, np.concatenate(tg, axis=0), meta
    )


_GENERATORS = {
    "circle": _generate_circle,
    "sphere": _generate_sphere,
    "ellipsoid": _generate_ellipsoid,
    "torus": _generate_torus,
    "flat_disk": _generate_flat_disk,
    "graph_of_function": _generate_graph,
    "stacked_spheres": _generate_stacked_spheres,
}


def generate(spec: ShapeSpec) -> WeightedSample:
    """Generate the deterministic sample a ShapeSpec describes."""
    sample = _GENERATORS[spec.kind](spec)
    meta = dict(sample.meta)
    meta.update({"kind": spec.kind, "seed": spec.seed, "count": spec.count})
    return WeightedSample(
        sample.points, sample.weights, sample.intrinsic_dim, sample.tangents, meta
    )


# ------------------------------------------------------------------- loaders


def _load_csv(path: str, m: int, has_weights: Optional[bool], total_measure: float):
    rows = []
    header_cols = None
    n_fields = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            fields = [f.strip() for f in body.split(",")]
            if header_cols is None and n_fields is None:
                try:
                    rows.append([float(f) for f in fields])
                    n_fields = len(fields)
                except ValueError:
                    header_cols = fields
                    n_fields = len(fields)
                continue
            if len(fields) != n_fields:
                raise ValueError(
                    "row %d has %d fields, expected %d" % (lineno, len(fields), n_fields)
                )
            try:
                rows.append([float(f) for f in fields])
            except ValueError as exc:
                raise ValueError("row %d is not numeric: %s" % (lineno, exc)) from None
    if not rows:
        raise ValueError("no data rows in %s" % path)
    data = np.array(rows)
    if header_cols is not None:
        weighted = header_cols[-1].lower() == "w"
    elif has_weights is not None:
        weighted = has_weights
    else:
        weighted = False
    if weighted:
        pts, w = data[:, :-1], data[:, -1]
    else:
        pts = data
        w = np.full(data.shape[0], total_measure / data.shape[0])
    return WeightedSample(pts, w, m, None, {"source": path})


def _load_obj(path: str):
    verts = []
    faces = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                if len(parts) < 4:
                    raise ValueError("line %d: vertex needs 3 coordinates" % lineno)
                verts.append([float(p) for p in parts[1:4]])
            elif parts[0] == "f":
                idx = []
                for p in parts[1:]:
                    head = p.split("/")[0]
                    i = int(head)
                    if i < 1:
                        raise ValueError("line %d: face indices must be positive" % lineno)
                    idx.append(i - 1)
                if len(idx) != 3:
                    raise ValueError(
                        "line %d: only triangular faces are supported (got %d vertices)"
                        % (lineno, len(idx))
                    )
                faces.append(idx)
    if not verts:
        raise ValueError("no vertices in %s" % path)
    if not faces:
        raise ValueError("no faces in %s" % path)
    v = np.array(verts)
    f = np.array(faces)
    if np.any(f >= len(v)):
        raise ValueError("face references vertex beyond the vertex list")
    cross = np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]])
    areas = 0.5 * np.linalg.norm(cross, axis=1)
    if areas.sum() <= 0.0:
        raise ValueError("zero-area mesh: all faces are degenerate")
    w = np.zeros(len(v))
    for j in range(3):
        np.add.at(w, f[:, j], areas / 3.0)
    used = w > 0.0
    if not np.all(used):
        v, w = v[used], w[used]
    return WeightedSample(v, w, 2, None, {"source": path})


def load_points(
    path: str,
    format: str,
    m: int,
    has_weights: Optional[bool] = None,
    total_measure: float = 1.0,
) -> WeightedSample:
    """Load a weighted sample from a CSV point list or a triangulated OBJ.

    CSV rows are comma-separated floats with optional `#` comments and an
    optional header `x1,...,xn[,w]`; without a weight column, weights are
    uniform with the given total.  OBJ meshes must consist of `v` records and
    triangular `f` records; each vertex receives one third of the area of
    every incident triangle, and vertices not referenced by any face are
    dropped.
    """
    if format == "csv":
        return _load_csv(path, m, has_weights, total_measure)
    if format == "obj":
        if m != 2:
            raise ValueError("OBJ meshes are surfaces; m must be 2")
        return _load_obj(path)
    raise ValueError("unknown format %r (expected 'csv' or 'obj')" % format)


# ---------------------------------------------------------------- ball query


def neighbors_within(
    sample: WeightedSample, x: np.ndarray, r: float, closed: bool = False
) -> np.ndarray:
    """Indices (ascending) of sample points within distance r of x.

    The default is the open ball (strict inequality); pass closed=True for
    the closed ball.  Membership is decided by an exact squared-distance
    comparison, not by kd-tree internals.
    """
    if r < 0:
        raise ValueError("radius must be nonnegative")
    x = np.asarray(x, dtype=float)
    guard = np.nextafter(r, np.inf) if closed else r
    cand = sample.index.query_ball_point(x, guard)
    if not cand:
        return np.array([], dtype=int)
    cand = np.sort(np.asarray(cand, dtype=int))
    diff = sample.points[cand] - x
    d2 = np.einsum("ij,ij->i", diff, diff)
    keep = d2 <= r * r if closed else d2 < r * r
    return cand[keep]


def ball_weight(sample: WeightedSample, x: np.ndarray, r: float, closed: bool = False) -> float:
    """Total weight carried by the (open by default) ball of radius r at x."""
    idx = neighbors_within(sample, x, r, closed=closed)
    if idx.size == 0:
        return 0.0
    return float(math.fsum(sample.weights[idx].tolist()))


def sample_diam(sample: WeightedSample) -> DiamResult:
    """Diameter of the point set.

    Exact for up to EXACT_DIAM_LIMIT points; beyond that a double
    farthest-point sweep is used (within factor 1/sqrt(3) of the truth) and
    the result is flagged as approximate.
    """
    pts = sample.points
    n = pts.shape[0]
    if n <= EXACT_DIAM_LIMIT:
        best = 0.0
        step = 512
        for start in range(0, n, step):
            block = pts[start : start + step]
            diff = block[:, None, :] - pts[None, :, :]
            d2 = np.einsum("ijk,ijk->ij", diff, diff)
            best = max(best, float(np.max(d2)))
        return DiamResult(math.sqrt(best), True)

    def farthest_from(p):
        diff = pts - p
        d2 = np.einsum("ij,ij->i", diff, diff)
        j = int(np.argmax(d2))
        return j, float(d2[j])

    centered = pts - pts.mean(axis=0)
    start = int(np.argmax(np.einsum("ij,ij->i", centered, centered)))
    a, _ = farthest_from(pts[start])
    _, d2 = farthest_from(pts[a])
    return DiamResult(math.sqrt(d2), False)
