"""Discrete modulus of curve families on a square-cell grid.

Cell centers are graph nodes; E and F are node sets.  A density assigns a
rho-length ``rho_e >= 0`` to every edge and costs ``sum sigma_e rho_e^2``,
where ``sigma_e`` is the stencil weight times the mean cell weight.  The
4-neighbor stencil (sigma = 1) and the 8-neighbor stencil (2/3 axis, 1/6
diagonal) both reproduce the Dirichlet integral for linear functions, so
the discrete modulus converges to the continuum one.

Two solvers share this discretization:

* ``potential``: the 2-modulus of all E-to-F paths equals the effective
  conductance of the network.  One sparse solve gives the potential u, the
  density ``|du|`` (upper bound via the shortest path) and the unit current
  (lower bound via ``1 / sum(eta^2 / sigma)``).
* ``lazy``: lazy constraint generation.  Dijkstra finds violated shortest
  paths, they join the active set and the dual QP over active paths is
  re-solved until the primal and dual bounds meet.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import sparse
from scipy.optimize import minimize
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.sparse.linalg import spsolve

from . import blocks

E_CONST = math.e
_EDGE_FLOOR = 1e-12

# --- geometry primitives -----------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    a: complex
    b: complex

    def sample(self, step: float) -> np.ndarray:
        n = max(2, int(math.ceil(abs(self.b - self.a) / step)) + 1)
        t = np.linspace(0.0, 1.0, n)
        return self.a + t * (self.b - self.a)


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def sample(self, step: float) -> np.ndarray:
        n = max(8, int(math.ceil(2 * math.pi * self.radius / step)) + 1)
        th = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
        return self.center + self.radius * np.exp(1j * th)


@dataclass(frozen=True)
class PointSet:
    points: tuple

    def sample(self, step: float) -> np.ndarray:
        return np.asarray(self.points, dtype=complex)


@dataclass(frozen=True)
class Disk:
    """Filled disk; rasterized by cell centers (not by sampling)."""

    center: complex
    radius: float


@dataclass(frozen=True)
class DiskComplement:
    """Everything at distance >= radius from center."""

    center: complex
    radius: float


@dataclass(frozen=True)
class HalfPlane:
    """Cells with x <= value (side="left") or x >= value (side="right")."""

    value: float
    side: str = "left"


Primitive = Union[Segment, Circle, PointSet, Disk, DiskComplement, HalfPlane]


def _point_segment_dist(p: complex, s: Segment) -> float:
    d = s.b - s.a
    L2 = abs(d) ** 2
    if L2 == 0:
        return abs(p - s.a)
    t = min(1.0, max(0.0, ((p - s.a) * d.conjugate()).real / L2))
    return abs(p - (s.a + t * d))


def _segments_intersect(s: Segment, t: Segment) -> bool:
    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    d1, d2 = s.b - s.a, t.b - t.a
    den = cross(d1, d2)
    if den == 0:
        return False
    u = cross(t.a - s.a, d2) / den
    v = cross(t.a - s.a, d1) / den
    return 0 <= u <= 1 and 0 <= v <= 1


def primitive_distance(x: Primitive, y: Primitive) -> float:
    """Exact distance between two curve-type primitives."""
    if isinstance(y, Segment) and not isinstance(x, Segment):
        x, y = y, x
    if isinstance(x, Segment) and isinstance(y, Segment):
        if _segments_intersect(x, y):
            return 0.0
        return min(
            _point_segment_dist(x.a, y), _point_segment_dist(x.b, y),
            _point_segment_dist(y.a, x), _point_segment_dist(y.b, x),
        )
    if isinstance(x, Segment) and isinstance(y, Circle):
        dmin = _point_segment_dist(y.center, x)
        dmax = max(abs(x.a - y.center), abs(x.b - y.center))
        if dmin <= y.radius <= dmax:
            return 0.0
        return min(abs(dmin - y.radius), abs(dmax - y.radius))
    if isinstance(x, Circle) and isinstance(y, Circle):
        d = abs(x.center - y.center)
        if abs(x.radius - y.radius) <= d <= x.radius + y.radius:
            return 0.0
        return d - x.radius - y.radius if d > x.radius + y.radius else abs(x.radius - y.radius) - d
    if isinstance(x, PointSet) or isinstance(y, PointSet):
        ps, other = (x, y) if isinstance(x, PointSet) else (y, x)
        return min(primitive_distance(Segment(p, p), other) for p in ps.points)
    raise TypeError(f"no distance for {type(x).__name__}/{type(y).__name__}")


def _far_points(x: Primitive):
    if isinstance(x, Segment):
        return [(x.a, 0.0), (x.b, 0.0)]
    if isinstance(x, Circle):
        return [(x.center, x.radius)]
    if isinstance(x, PointSet):
        return [(p, 0.0) for p in x.points]
    raise TypeError(f"no diameter for {type(x).__name__}")


def set_distance(A: Sequence[Primitive], B: Sequence[Primitive]) -> float:
    return min(primitive_distance(a, b) for a in A for b in B)


def set_diameter(A: Sequence[Primitive]) -> float:
    """Diameter of a union of segments, circles and points."""
    pts = [fp for a in A for fp in _far_points(a)]
    best = 0.0
    for i, (p, rp) in enumerate(pts):
        for q, rq in pts[i:]:
            best = max(best, abs(p - q) + rp + rq)
    return best


# --- problems ----------------------------------------------------------------------


@dataclass
class ModulusProblem:
    """Grid (x0, y0, x1, y1) with ``resolution`` cells along x, square cells."""

    domain: tuple
    resolution: int
    source: np.ndarray
    target: np.ndarray
    weight: Optional[np.ndarray] = None
    connectivity: int = 4

    def __post_init__(self):
        self.source = np.asarray(self.source, dtype=bool)
        self.target = np.asarray(self.target, dtype=bool)
        if self.source.shape != self.shape or self.target.shape != self.shape:
            raise ValueError("source/target masks must match the grid shape")
        if not self.source.any() or not self.target.any():
            raise ValueError("source and target must be nonempty")
        if np.any(self.source & self.target):
            raise ValueError("source and target overlap")
        if self.weight is not None:
            self.weight = np.asarray(self.weight, dtype=float)
            if self.weight.shape != self.shape:
                raise ValueError("weight must match the grid shape")
            if np.any(~(self.weight >= 0)) or not np.all(np.isfinite(self.weight)):
                raise ValueError("weight must be finite and nonnegative")
        if self.connectivity not in (4, 8):
            raise ValueError("connectivity must be 4 or 8")

    @property
    def h(self) -> float:
        x0, _, x1, _ = self.domain
        return (x1 - x0) / self.resolution

    @property
    def shape(self) -> tuple:
        return grid_shape(self.domain, self.resolution)

    def centers(self) -> np.ndarray:
        return cell_centers(self.domain, self.resolution)


def grid_shape(domain, resolution: int) -> tuple:
    x0, y0, x1, y1 = domain
    if not (x1 > x0 and y1 > y0) or resolution < 2:
        raise ValueError("bad domain or resolution")
    ny = max(1, int(round(resolution * (y1 - y0) / (x1 - x0))))
    return (ny, resolution)


def cell_centers(domain, resolution: int) -> np.ndarray:
    """Complex cell centers, indexed [row (y), col (x)]."""
    x0, y0, x1, _ = domain
    ny, nx = grid_shape(domain, resolution)
    h = (x1 - x0) / nx
    x = x0 + (np.arange(nx) + 0.5) * h
    y = y0 + (np.arange(ny) + 0.5) * h
    return x[None, :] + 1j * y[:, None]


def rasterize(prims: Sequence[Primitive], domain, resolution: int) -> np.ndarray:
    """Cells hit by curve primitives (dense sampling) or covered by region primitives."""
    shape = grid_shape(domain, resolution)
    x0, y0, x1, _ = domain
    h = (x1 - x0) / resolution
    mask = np.zeros(shape, dtype=bool)
    zc = None
    for pr in prims:
        if isinstance(pr, (Disk, DiskComplement, HalfPlane)):
            if zc is None:
                zc = cell_centers(domain, resolution)
            if isinstance(pr, Disk):
                mask |= np.abs(zc - pr.center) <= pr.radius
            elif isinstance(pr, DiskComplement):
                mask |= np.abs(zc - pr.center) >= pr.radius
            else:
                mask |= (zc.real <= pr.value) if pr.side == "left" else (zc.real >= pr.value)
            continue
        pts = pr.sample(h / 4)
        j = np.floor((pts.real - x0) / h).astype(np.int64)
        i = np.floor((pts.imag - y0) / h).astype(np.int64)
        ok = (i >= 0) & (i < shape[0]) & (j >= 0) & (j < shape[1])
        mask[i[ok], j[ok]] = True
    return mask


def problem_from_primitives(domain, resolution, E, F, weight=None, connectivity=4) -> ModulusProblem:
    src = rasterize(E, domain, resolution)
    tgt = rasterize(F, domain, resolution) & ~src
    return ModulusProblem(tuple(domain), resolution, src, tgt, weight, connectivity)


def ring_problem(resolution: int = 256, R: float = 0.9, ratio: float = E_CONST, connectivity: int = 4,
                 center: complex = 0j, half_width: float = 1.0) -> ModulusProblem:
    """Ring family: E = closed disk of radius R/ratio, F = outside radius R."""
    dom = (center.real - half_width, center.imag - half_width, center.real + half_width, center.imag + half_width)
    return problem_from_primitives(dom, resolution, [Disk(center, R / ratio)], [DiskComplement(center, R)],
                                   connectivity=connectivity)


def square_problem(resolution: int = 256, connectivity: int = 4) -> ModulusProblem:
    """Unit square with E the left column of cells and F the right column.

    Curves run between the two column centers, so the discrete rectangle has
    length 1 - h and height 1 (modulus N / (N - 1) on the 4-neighbor grid).
    """
    dom = (0.0, 0.0, 1.0, 1.0)
    h = 1.0 / resolution
    return problem_from_primitives(dom, resolution, [HalfPlane(h, "left")], [HalfPlane(1 - h, "right")],
                                   connectivity=connectivity)


# --- graph ---------------------------------------------------------------------------

# (offset, stencil weight) per connectivity; each undirected edge listed once
_STENCIL = {
    4: [((0, 1), 1.0), ((1, 0), 1.0)],
    8: [((0, 1), 2 / 3), ((1, 0), 2 / 3), ((1, 1), 1 / 6), ((1, -1), 1 / 6)],
}


@dataclass
class _Graph:
    n: int
    a: np.ndarray
    b: np.ndarray
    sigma: np.ndarray


def _build_graph(pb: ModulusProblem) -> _Graph:
    ny, nx = pb.shape
    idx = np.arange(ny * nx).reshape(ny, nx)
    w = np.ones(pb.shape) if pb.weight is None else pb.weight
    fixed = (pb.source | pb.target).ravel()
    A, B, S = [], [], []
    for (di, dj), st in _STENCIL[pb.connectivity]:
        i0, i1 = max(0, -di), ny - max(0, di)
        j0, j1 = max(0, -dj), nx - max(0, dj)
        a = idx[i0:i1, j0:j1].ravel()
        b = idx[i0 + di : i1 + di, j0 + dj : j1 + dj].ravel()
        sig = st * 0.5 * (w.ravel()[a] + w.ravel()[b])
        # edges inside E or inside F carry no potential drop
        keep = (sig > 0) & ~(fixed[a] & fixed[b] & (pb.source.ravel()[a] == pb.source.ravel()[b]))
        A.append(a[keep])
        B.append(b[keep])
        S.append(sig[keep])
    return _Graph(ny * nx, np.concatenate(A), np.concatenate(B), np.concatenate(S))


def _adjacency(g: _Graph, w: np.ndarray) -> sparse.csr_matrix:
    return sparse.csr_matrix(
        (np.concatenate([w, w]), (np.concatenate([g.a, g.b]), np.concatenate([g.b, g.a]))), shape=(g.n, g.n)
    )


def _shortest(g: _Graph, rho_e: np.ndarray, sources: np.ndarray):
    # csgraph drops explicit zeros, so a tiny floor keeps zero-density edges
    G = _adjacency(g, np.maximum(rho_e, _EDGE_FLOOR))
    dist, pred, _ = dijkstra(G, directed=False, indices=sources, return_predecessors=True, min_only=True)
    return dist, pred


# --- solver ---------------------------------------------------------------------------


class ModulusNotConverged(RuntimeError):
    def __init__(self, msg, lower, upper):
        super().__init__(msg)
        self.lower = lower
        self.upper = upper


@dataclass
class ModulusResult:
    value: float
    rho: np.ndarray  # per-cell density: sqrt of the energy density at each node
    iterations: int
    duality_gap: float
    lower: float
    upper: float
    n_paths: int
    min_length: float = field(default=math.nan)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "duality_gap": self.duality_gap,
            "iterations": self.iterations,
            "n_paths": self.n_paths,
            "min_length": self.min_length,
        }


def _cell_density(g: _Graph, rho_e: np.ndarray, shape, h: float) -> np.ndarray:
    """Per-cell density with sum(rho_cell^2 h^2) equal to the edge energy."""
    e = g.sigma * rho_e**2
    acc = np.bincount(g.a, e, g.n) + np.bincount(g.b, e, g.n)
    return (np.sqrt(0.5 * acc) / h).reshape(shape)


def discrete_modulus(pb: ModulusProblem, method: str = "potential", tol: float = 1e-3, gap_tol: float = 1e-3,
                     max_paths: int = 10_000, batch: int = 64) -> ModulusResult:
    """Modulus of the family of E-to-F paths."""
    if method == "potential":
        return _modulus_potential(pb, tol, gap_tol)
    if method == "lazy":
        return _modulus_lazy(pb, tol, gap_tol, max_paths, batch)
    raise ValueError(f"unknown method {method!r}")


def _modulus_potential(pb: ModulusProblem, tol: float, gap_tol: float) -> ModulusResult:
    g = _build_graph(pb)
    n = g.n
    src = pb.source.ravel()
    tgt = pb.target.ravel()
    sources = np.flatnonzero(src)
    W = _adjacency(g, g.sigma)
    ncomp, label = connected_components(W, directed=False)
    live_labels = np.intersect1d(np.unique(label[src]), np.unique(label[tgt]))
    if live_labels.size == 0:
        return ModulusResult(0.0, np.zeros(pb.shape), 1, 0.0, 0.0, 0.0, 0, math.inf)
    live = np.isin(label, live_labels)
    free = live & ~src & ~tgt
    u = np.zeros(n)
    u[tgt] = 1.0
    fi = np.flatnonzero(free)
    if fi.size:
        Lap = sparse.diags(np.asarray(W.sum(axis=1)).ravel()) - W
        Lff = Lap[fi][:, fi].tocsc()
        rhs = -(Lap[fi][:, np.flatnonzero(tgt)] @ np.ones(int(tgt.sum())))
        u[fi] = spsolve(Lff, rhs)
    drop = u[g.b] - u[g.a]
    on = live[g.a] & live[g.b]
    rho_e = np.where(on, np.abs(drop), 0.0)
    energy = float(np.sum(g.sigma * rho_e**2))
    dist, _ = _shortest(g, rho_e, sources)
    lmin = float(np.min(dist[tgt]))
    upper = energy / lmin**2
    # unit current: current leaving E over the live component
    cur = g.sigma * drop * on
    out_e = np.bincount(g.a, cur, n) - np.bincount(g.b, cur, n)
    I = float(np.sum(out_e[src]))
    eta = np.abs(cur) / I
    lower = 1.0 / float(np.sum(eta**2 / g.sigma))
    # conservation residual of the current at free nodes
    resid = float(np.max(np.abs(out_e[fi]))) / I if fi.size else 0.0
    if resid > 1e-6:
        raise ModulusNotConverged(f"linear solve residual {resid:.2e}", lower, upper)
    lower = min(lower, upper)
    return ModulusResult(
        upper, _cell_density(g, rho_e / lmin, pb.shape, pb.h), 1, upper - lower, lower, upper, 0, lmin
    )


def _path_edges(pred: np.ndarray, t: int, edge_id: dict) -> list:
    out = []
    v = t
    while pred[v] >= 0:
        u = int(pred[v])
        out.append(edge_id[(min(u, v), max(u, v))])
        v = u
    return out


def _modulus_lazy(pb: ModulusProblem, tol: float, gap_tol: float, max_paths: int, batch: int) -> ModulusResult:
    g = _build_graph(pb)
    m = g.a.size
    edge_id = {(int(min(a, b)), int(max(a, b))): i for i, (a, b) in enumerate(zip(g.a, g.b))}
    sources = np.flatnonzero(pb.source.ravel())
    targets = np.flatnonzero(pb.target.ravel())
    rho_e = np.zeros(m)
    dist, pred = _shortest(g, rho_e, sources)
    if not np.any(np.isfinite(dist[targets])):
        return ModulusResult(0.0, np.zeros(pb.shape), 0, 0.0, 0.0, 0.0, 0, math.inf)
    inv_sqrt_s = 1.0 / np.sqrt(g.sigma)
    ri, rj = [], []
    seen: set = set()
    lam = np.zeros(0)
    lower, upper, lmin, energy = 0.0, math.inf, 0.0, 0.0
    it = 0
    while True:
        it += 1
        dt = dist[targets]
        viol = targets[np.isfinite(dt) & (dt < 1 - tol)]
        added = 0
        if viol.size:
            order = viol[np.argsort(dist[viol], kind="stable")]
            stride = max(1, order.size // batch)
            for t in np.concatenate([order[:1], order[::stride]]):
                edges = _path_edges(pred, int(t), edge_id)
                key = tuple(sorted(edges))
                if key in seen:
                    continue
                seen.add(key)
                k = len(seen) - 1
                ri.extend(edges)
                rj.extend([k] * len(edges))
                added += 1
                if added >= batch:
                    break
        if added == 0:
            break
        if len(seen) > max_paths:
            raise ModulusNotConverged(f"path cap {max_paths} reached", lower, upper)
        k = len(seen)
        ri_a = np.asarray(ri)
        Bm = sparse.csr_matrix((inv_sqrt_s[ri_a], (ri_a, rj)), shape=(m, k))
        lam0 = np.concatenate([lam, np.full(k - lam.size, lam.mean() if lam.size else 1.0)])

        def fun(x):
            y = Bm @ x
            return 0.25 * float(y @ y) - float(x.sum()), 0.5 * (Bm.T @ y) - 1.0

        res = minimize(fun, lam0, jac=True, method="L-BFGS-B", bounds=[(0, None)] * k,
                       options={"maxiter": 10000, "ftol": 1e-15, "gtol": 1e-12})
        lam = res.x
        rho_e = 0.5 * inv_sqrt_s * (Bm @ lam)
        energy = float(np.sum(g.sigma * rho_e**2))
        dist, pred = _shortest(g, rho_e, sources)
        lmin = float(np.min(dist[targets]))
        if lmin > 0 and energy > 0:
            upper = min(upper, energy / lmin**2)
            lower = max(lower, float(lam.sum()) ** 2 / (4 * energy))
        if upper < math.inf and upper - lower <= gap_tol * upper and lmin >= 1 - tol:
            break
    value = upper if upper < math.inf else energy
    return ModulusResult(value, _cell_density(g, rho_e / max(lmin, 1e-300), pb.shape, pb.h), it,
                         max(0.0, upper - lower), lower, upper, len(seen), lmin)


# --- segment-circle family, Vaisala bound ----------------------------------------------------


@dataclass(frozen=True)
class SegmentCircleFamily:
    """E = [z + L, z + eL]; F = [z, z - e^2 L] with the circle |w - z| = e^2 |L|."""

    z: complex
    Lambda: complex
    E: tuple
    F: tuple

    def domain(self, margin: float = 1.15) -> tuple:
        half = margin * math.e**2 * abs(self.Lambda)
        return (self.z.real - half, self.z.imag - half, self.z.real + half, self.z.imag + half)

    def problem(self, resolution: int, connectivity: int = 4) -> ModulusProblem:
        return problem_from_primitives(self.domain(), resolution, self.E, self.F, connectivity=connectivity)


def build_segment_circle_family(z, Lambda) -> SegmentCircleFamily:
    from .core import LogPolar, as_point

    lam = Lambda.to_complex() if isinstance(Lambda, LogPolar) else complex(Lambda)
    if lam == 0:
        raise ValueError("Lambda must be nonzero")
    z = as_point(z)
    e = math.e
    E = (Segment(z + lam, z + e * lam),)
    F = (Segment(z, z - e**2 * lam), Circle(z, e**2 * abs(lam)))
    return SegmentCircleFamily(z, lam, E, F)


def vaisala_lower_bound(E: Sequence[Primitive], F: Sequence[Primitive], C_tilde: float = 1.0) -> float:
    """C_tilde log(1 + min(diam E, diam F) / dist(E, F)); +inf when the sets touch."""
    d = set_distance(E, F)
    if d == 0:
        return math.inf
    return C_tilde * math.log1p(min(set_diameter(E), set_diameter(F)) / d)


def rasterization_gap(pb: ModulusProblem) -> float:
    """Smallest Chebyshev distance, in cells, between an E cell and an F cell."""
    from scipy.spatial import cKDTree

    ie = np.argwhere(pb.source)
    jf = np.argwhere(pb.target)
    d, _ = cKDTree(jf).query(ie, p=np.inf)
    return float(np.min(d))


# --- modulus inequality ----------------------------------------------------------------


@dataclass(frozen=True)
class InequalityCheck:
    ratio: float
    image_modulus: float
    weighted_modulus: float


def _pushforward_mask(f: Callable, pb: ModulusProblem, mask: np.ndarray, dom, res: int, sub: int) -> np.ndarray:
    ny, nx = pb.shape
    x0, y0, _, _ = pb.domain
    h = pb.h
    ii, jj = np.nonzero(mask)
    off = (np.arange(sub) + 0.5) / sub
    ox, oy = np.meshgrid(off, off)
    pts = (x0 + (jj[:, None] + ox.ravel()[None, :]) * h) + 1j * (y0 + (ii[:, None] + oy.ravel()[None, :]) * h)
    w = np.asarray(f(pts.ravel()))
    shape = grid_shape(dom, res)
    hh = (dom[2] - dom[0]) / res
    j = np.floor((w.real - dom[0]) / hh).astype(np.int64)
    i = np.floor((w.imag - dom[1]) / hh).astype(np.int64)
    ok = (i >= 0) & (i < shape[0]) & (j >= 0) & (j < shape[1])
    out = np.zeros(shape, dtype=bool)
    out[i[ok], j[ok]] = True
    return out


def check_modulus_inequality(f: Callable, pb: ModulusProblem, sub: int = 3) -> InequalityCheck:
    """Ratio M(f(Gamma)) / M_{K_f}(Gamma) for the problem's path family.

    The image family is rasterized on the same grid by pushing supersampled
    E and F cells forward; the weight K_f comes from finite differences at
    cell centers.  ``f`` must accept complex arrays.
    """
    dom = pb.domain
    zc = pb.centers()
    src_img = _pushforward_mask(f, pb, pb.source, dom, pb.resolution, sub)
    tgt_img = _pushforward_mask(f, pb, pb.target, dom, pb.resolution, sub) & ~src_img
    if not src_img.any() or not tgt_img.any():
        raise ValueError("image of E or F vanishes at this resolution; refine the grid")
    img = ModulusProblem(dom, pb.resolution, src_img, tgt_img, None, pb.connectivity)
    K = blocks.distortion_field(f, zc, 1e-6 * pb.h)
    K = np.where(pb.source | pb.target, 1.0, K)
    base = 1.0 if pb.weight is None else pb.weight
    wpb = ModulusProblem(dom, pb.resolution, pb.source, pb.target, base * K, pb.connectivity)
    m_img = discrete_modulus(img).value
    m_w = discrete_modulus(wpb).value
    return InequalityCheck(m_img / m_w, m_img, m_w)


# --- I/O -----------------------------------------------------------------------------------


def _prim_from_json(d: dict) -> Primitive:
    kind = d["type"]
    if kind == "segment":
        return Segment(complex(*d["a"]), complex(*d["b"]))
    if kind == "circle":
        return Circle(complex(*d["center"]), float(d["radius"]))
    if kind == "disk":
        return Disk(complex(*d["center"]), float(d["radius"]))
    if kind == "outside":
        return DiskComplement(complex(*d["center"]), float(d["radius"]))
    if kind == "points":
        return PointSet(tuple(complex(*p) for p in d["points"]))
    if kind == "halfplane":
        return HalfPlane(float(d["x"]), d.get("side", "left"))
    raise ValueError(f"unknown primitive {kind!r}")


def problem_from_config(cfg: dict) -> ModulusProblem:
    """Presets ``ring`` / ``square`` / ``segment_circle`` or explicit E/F primitive lists."""
    res = int(cfg.get("resolution", 256))
    conn = int(cfg.get("connectivity", 4))
    preset = cfg.get("preset")
    if preset == "ring":
        return ring_problem(res, float(cfg.get("R", 0.9)), float(cfg.get("ratio", math.e)), conn)
    if preset == "square":
        return square_problem(res, conn)
    if preset == "segment_circle":
        lam = complex(*cfg.get("Lambda", [0.1, 0.0]))
        fam = build_segment_circle_family(complex(*cfg.get("z", [0.0, 0.0])), lam)
        return fam.problem(res, conn)
    if preset is not None:
        raise ValueError(f"unknown preset {preset!r}")
    E = [_prim_from_json(d) for d in cfg["E"]]
    F = [_prim_from_json(d) for d in cfg["F"]]
    weight = None
    if "weight" in cfg and cfg["weight"] is not None:
        weight = float(cfg["weight"])
    pb = problem_from_primitives(tuple(cfg["domain"]), res, E, F, None, conn)
    if weight is not None:
        pb.weight = np.full(pb.shape, weight)
    return pb


def result_json(res: ModulusResult, extra: Optional[dict] = None) -> str:
    d = {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in res.to_dict().items()}
    if extra:
        d.update(extra)
    return json.dumps(d, indent=2, sort_keys=True)


def rho_svg(rho: np.ndarray, size: int = 512, max_cells: int = 128) -> str:
    """Grayscale heatmap of the density, block-averaged to at most max_cells per side."""
    a = np.asarray(rho, dtype=float)
    step = max(1, int(math.ceil(max(a.shape) / max_cells)))
    ny, nx = a.shape[0] // step, a.shape[1] // step
    a = a[: ny * step, : nx * step].reshape(ny, step, nx, step).mean(axis=(1, 3))
    top = float(np.max(a)) or 1.0
    cw = size / nx
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size * ny / nx:.0f}">']
    for i in range(ny):
        for j in range(nx):
            v = int(round(255 * (1 - a[i, j] / top)))
            if v == 255:
                continue
            y = (ny - 1 - i) * cw
            parts.append(f'<rect x="{j * cw:.2f}" y="{y:.2f}" width="{cw:.2f}" height="{cw:.2f}" fill="rgb({v},{v},{v})"/>')
    parts.append("</svg>")
    return "\n".join(parts)
