"""Poincare-disk geometry at curvature -a**2 (Euclidean plane at a = 0).

Model metric for a > 0: g = (2 / (a * (1 - |x|^2)))^2 * delta on the open
unit disk, so geodesic distances, areas and mesh generation all live in
dimensionless model coordinates while lengths carry the 1/a scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .errors import ConfigError, DomainError, MeshQualityError

if TYPE_CHECKING:
    from .simplicial import Cochain

__all__ = [
    "TriMesh",
    "distance",
    "pairwise_distances",
    "radial_distance",
    "model_radius",
    "triangle_area",
    "mesh_area",
    "ball_mesh",
    "mesh_edge_lengths",
    "cutoff_profile",
    "cutoff_cochain",
]

@dataclass(frozen=True)
class TriMesh:
    """Triangulated geodesic ball in model coordinates.

    vertices : (V, 2) float array of model coordinates
    triangles : (F, 3) int array, counterclockwise in model coordinates
    curvature : a >= 0, the space has sectional curvature -a**2
    provenance : generation parameters (target radius, edge length, ...)
    """

    vertices: np.ndarray
    triangles: np.ndarray
    curvature: float
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=float))
        t = np.ascontiguousarray(np.asarray(self.triangles, dtype=np.int64))
        if v.ndim != 2 or v.shape[1] != 2:
            raise ConfigError("vertices must be an (V, 2) array")
        if t.ndim != 2 or t.shape[1] != 3:
            raise ConfigError("triangles must be an (F, 3) array")
        if self.curvature < 0:
            raise DomainError("curvature parameter a must be >= 0")
        if self.curvature > 0 and np.any(np.sum(v * v, axis=1) >= 1.0):
            raise DomainError("vertices must lie strictly inside the unit disk when a > 0")
        v.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_triangles(self) -> int:
        return self.triangles.shape[0]


def _as_complex(points) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    if p.ndim == 1:
        p = p[np.newaxis, :]
    return p[:, 0] + 1j * p[:, 1]


def _check_inside(z: np.ndarray, a: float):
    if a > 0 and np.any(np.abs(z) >= 1.0):
        raise DomainError("point outside the open unit disk for a > 0")


def pairwise_distances(p, q, a: float) -> np.ndarray:
    """Geodesic distances between matching rows of two point arrays."""
    zp, zq = _as_complex(p), _as_complex(q)
    _check_inside(zp, a)
    _check_inside(zq, a)
    if a == 0.0:
        return np.abs(zp - zq)
    # Moebius-invariant form: d = (2/a) artanh(|p-q| / |1 - conj(p) q|)
    delta = np.abs(zp - zq) / np.abs(1.0 - np.conj(zp) * zq)
    return (2.0 / a) * np.arctanh(delta)


def distance(p, q, a: float) -> float:
    """Geodesic distance between two points at curvature -a**2."""
    return float(pairwise_distances([p], [q], a)[0])


def radial_distance(points, a: float) -> np.ndarray:
    """Geodesic distance from the origin (the fixed reference point)."""
    z = _as_complex(points)
    _check_inside(z, a)
    if a == 0.0:
        return np.abs(z)
    return (2.0 / a) * np.arctanh(np.abs(z))


def model_radius(rho: float, a: float) -> float:
    """Model-coordinate radius of the geodesic circle of radius rho."""
    if rho < 0:
        raise DomainError("geodesic radius must be >= 0")
    if a == 0.0:
        return rho
    return math.tanh(a * rho / 2.0)


def _triangle_areas_flat(l1, l2, l3):
    s = (l1 + l2 + l3) / 2.0
    return np.sqrt(np.maximum(s * (s - l1) * (s - l2) * (s - l3), 0.0))


def _triangle_areas_hyperbolic(l1, l2, l3, a):
    # Excess formula tan(E/4) = sqrt(prod tanh(...)); stable for tiny triangles,
    # exactly equivalent to the angle-defect definition.
    s = a * (l1 + l2 + l3) / 2.0
    t = (
        np.tanh(s / 2.0)
        * np.tanh((s - a * l1) / 2.0)
        * np.tanh((s - a * l2) / 2.0)
        * np.tanh((s - a * l3) / 2.0)
    )
    return 4.0 * np.arctan(np.sqrt(np.maximum(t, 0.0))) / (a * a)


def triangle_area(l1: float, l2: float, l3: float, a: float) -> float:
    """Area of the geodesic triangle with side lengths l1, l2, l3.

    Heron's formula at a = 0; the angle defect divided by a**2 at a > 0.
    Degenerate (equality) triangles have zero area; a violated triangle
    inequality raises DomainError.
    """
    sides = sorted((l1, l2, l3))
    if sides[0] <= 0:
        raise DomainError("triangle side lengths must be positive")
    if sides[0] + sides[1] < sides[2]:
        raise DomainError("triangle inequality violated")
    if a == 0.0:
        return float(_triangle_areas_flat(l1, l2, l3))
    return float(_triangle_areas_hyperbolic(l1, l2, l3, a))


def mesh_edge_lengths(mesh: TriMesh) -> tuple[np.ndarray, np.ndarray]:
    """Undirected edge list (sorted pairs, lexicographic) and geodesic lengths."""
    t = mesh.triangles
    pairs = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    pairs = np.sort(pairs, axis=1)
    edges = np.unique(pairs, axis=0)
    lengths = pairwise_distances(
        mesh.vertices[edges[:, 0]], mesh.vertices[edges[:, 1]], mesh.curvature
    )
    return edges, lengths


def mesh_area(mesh: TriMesh) -> float:
    """Total geodesic area, as the sum of geodesic triangle areas."""
    v = mesh.vertices
    t = mesh.triangles
    a = mesh.curvature
    l1 = pairwise_distances(v[t[:, 1]], v[t[:, 2]], a)
    l2 = pairwise_distances(v[t[:, 0]], v[t[:, 2]], a)
    l3 = pairwise_distances(v[t[:, 0]], v[t[:, 1]], a)
    if a == 0.0:
        return float(np.sum(_triangle_areas_flat(l1, l2, l3)))
    return float(np.sum(_triangle_areas_hyperbolic(l1, l2, l3, a)))


def _ring_sizes(a: float, h: float, n_rings: int) -> list[int]:
    sizes = []
    for i in range(1, n_rings + 1):
        if a == 0.0:
            m = round(2.0 * math.pi * i)
        else:
            m = round(2.0 * math.pi * math.sinh(a * i * h) / (a * h))
        sizes.append(int(m))
    return sizes


def _stitch_rings(
    inner: np.ndarray,
    outer: np.ndarray,
    inner_start: float,
    outer_start: float,
) -> list[tuple[int, int, int]]:
    """Zigzag triangulation of the annulus between two angle-ordered rings.

    Rings are uniform in angle but may start at different phases; the outer
    traversal begins at the vertex angularly closest above the inner start.
    """
    m, big = len(inner), len(outer)
    step_i = 2.0 * math.pi / m
    step_j = 2.0 * math.pi / big
    offsets = np.mod(outer_start + step_j * np.arange(big) - inner_start, 2.0 * math.pi)
    j0 = int(np.argmin(offsets))
    phi0 = float(offsets[j0])
    tris = []
    i = j = 0
    while i < m or j < big:
        if i < m and j < big:
            advance_inner = (i + 1) * step_i <= phi0 + (j + 1) * step_j
        else:
            advance_inner = i < m
        oj = outer[(j0 + j) % big]
        if advance_inner:
            tris.append((inner[i % m], oj, inner[(i + 1) % m]))
            i += 1
        else:
            tris.append((inner[i % m], oj, outer[(j0 + j + 1) % big]))
            j += 1
    return tris


def _intrinsic_cot_sums(vertices: np.ndarray, tris: np.ndarray, a: float):
    """Per-edge cotangent sums of the opposite intrinsic angles (vectorized)."""
    pairs = np.concatenate([tris[:, [1, 2]], tris[:, [0, 2]], tris[:, [0, 1]]])
    opp = np.sort(pairs, axis=1)
    edges, inverse = np.unique(opp, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    L = pairwise_distances(vertices[opp[:, 0]], vertices[opp[:, 1]], a).reshape(3, -1).T
    l0, l1, l2 = L[:, 0], L[:, 1], L[:, 2]
    cos = np.empty_like(L)
    cos[:, 0] = (l1**2 + l2**2 - l0**2) / (2 * l1 * l2)
    cos[:, 1] = (l0**2 + l2**2 - l1**2) / (2 * l0 * l2)
    cos[:, 2] = (l0**2 + l1**2 - l2**2) / (2 * l0 * l1)
    np.clip(cos, -1.0, 1.0, out=cos)
    cot = cos / np.sqrt(np.maximum(1.0 - cos * cos, 1e-300))
    sums = np.zeros(edges.shape[0])
    np.add.at(sums, inverse, cot.T.reshape(-1))
    return edges, sums


def _edge_cot(vertices, a, u, v, p) -> float:
    """Cotangent of the intrinsic angle at p opposite edge (u, v)."""
    lu = distance(vertices[u], vertices[p], a)
    lv = distance(vertices[v], vertices[p], a)
    le = distance(vertices[u], vertices[v], a)
    c = (lu * lu + lv * lv - le * le) / (2 * lu * lv)
    c = min(1.0, max(-1.0, c))
    return c / math.sqrt(max(1.0 - c * c, 1e-300))


def _ccw(vertices, i, j, k) -> bool:
    (x0, y0), (x1, y1), (x2, y2) = vertices[i], vertices[j], vertices[k]
    return (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0) > 0.0


def _flip_to_intrinsic_delaunay(vertices: np.ndarray, tris: np.ndarray, a: float) -> np.ndarray:
    """Deterministic edge flips until every interior edge has cot sum >= 0.

    Raw zigzag stitching can leave a few locally non-Delaunay edges near the
    center, which would produce non-positive star weights downstream.
    """
    from collections import deque

    edges, sums = _intrinsic_cot_sums(vertices, tris, a)
    bad = edges[sums < -1e-12]
    if bad.size == 0:
        return tris

    tris = [list(t) for t in tris]
    edge_faces: dict[tuple[int, int], list[int]] = {}
    for f, (u, v, w) in enumerate(tris):
        for x, y in ((u, v), (v, w), (w, u)):
            edge_faces.setdefault((min(x, y), max(x, y)), []).append(f)

    queue = deque(tuple(e) for e in bad)
    queued = set(queue)
    budget = 20 * len(edges)
    while queue:
        budget -= 1
        if budget < 0:
            raise MeshQualityError("intrinsic Delaunay flipping did not terminate")
        key = queue.popleft()
        queued.discard(key)
        faces = edge_faces.get(key, [])
        if len(faces) != 2:
            continue
        f1, f2 = faces
        # orient so that face f1 traverses u -> v
        u, v = key
        if (u, v) not in _directed_pairs(tris[f1]):
            f1, f2 = f2, f1
        if (u, v) not in _directed_pairs(tris[f1]) or (v, u) not in _directed_pairs(tris[f2]):
            continue
        p = next(x for x in tris[f1] if x not in key)
        q = next(x for x in tris[f2] if x not in key)
        if _edge_cot(vertices, a, u, v, p) + _edge_cot(vertices, a, u, v, q) >= -1e-12:
            continue
        if not (_ccw(vertices, u, q, p) and _ccw(vertices, v, p, q)):
            continue  # non-convex quad; leave the edge alone
        for f in (f1, f2):
            for x, y in _directed_pairs(tris[f]):
                edge_faces[(min(x, y), max(x, y))].remove(f)
        tris[f1] = [u, q, p]
        tris[f2] = [v, p, q]
        for f in (f1, f2):
            for x, y in _directed_pairs(tris[f]):
                edge_faces.setdefault((min(x, y), max(x, y)), []).append(f)
        for x, y in ((u, p), (p, v), (v, q), (q, u)):
            k2 = (min(x, y), max(x, y))
            if k2 not in queued:
                queue.append(k2)
                queued.add(k2)
    return np.array(tris, dtype=np.int64)


def _directed_pairs(face) -> tuple:
    u, v, w = face
    return ((u, v), (v, w), (w, u))


def _audit_mesh(mesh: TriMesh, h: float):
    v = mesh.vertices
    t = mesh.triangles
    ux = v[t[:, 1], 0] - v[t[:, 0], 0]
    uy = v[t[:, 1], 1] - v[t[:, 0], 1]
    wx = v[t[:, 2], 0] - v[t[:, 0], 0]
    wy = v[t[:, 2], 1] - v[t[:, 0], 1]
    if np.any(ux * wy - uy * wx <= 0.0):
        raise MeshQualityError("generated triangle is not counterclockwise")
    _, lengths = mesh_edge_lengths(mesh)
    slack = 1e-9 * h
    if np.any(lengths < h / 2 - slack) or np.any(lengths > 2 * h + slack):
        bad = float(lengths.min()), float(lengths.max())
        raise MeshQualityError(
            f"edge lengths {bad} leave the admissible band [{h / 2}, {2 * h}]"
        )


def ball_mesh(a: float, rho_max: float, h: float) -> TriMesh:
    """Concentric-ring triangulation of the geodesic ball of radius rho_max.

    Ring i sits at geodesic radius i*h and carries round(2*pi*sinh(a*i*h)/(a*h))
    vertices (round(2*pi*i) at a = 0); consecutive rings are stitched by a
    zigzag. Deterministic for fixed inputs. Every edge length must land in
    [h/2, 2h] or the mesh is rejected.
    """
    if a < 0:
        raise DomainError("curvature parameter a must be >= 0")
    if rho_max <= 0:
        raise ConfigError("rho_max must be positive")
    if not 0 < h <= rho_max:
        raise ConfigError("edge length h must satisfy 0 < h <= rho_max")
    n_rings = round(rho_max / h)
    if n_rings < 1:
        raise ConfigError("parameters produce fewer than 3 boundary vertices")
    sizes = _ring_sizes(a, h, n_rings)

    verts = [(0.0, 0.0)]
    ring_ids: list[np.ndarray] = []
    # fixed irrational twist per ring: breaks the reflection symmetries that can
    # make zigzag quads exactly cocircular (zero cotangent star weights)
    twist = 0.6180339887498949
    for i, m in enumerate(sizes, start=1):
        r = model_radius(i * h, a)
        theta = 2.0 * np.pi * np.arange(m) / m + twist * i
        start = len(verts)
        verts.extend(zip(r * np.cos(theta), r * np.sin(theta)))
        ring_ids.append(np.arange(start, start + m))

    tris: list[tuple[int, int, int]] = []
    first = ring_ids[0]
    for j in range(len(first)):
        tris.append((0, int(first[j]), int(first[(j + 1) % len(first)])))
    for i, (inner, outer) in enumerate(zip(ring_ids[:-1], ring_ids[1:]), start=1):
        tris.extend(_stitch_rings(inner, outer, twist * i, twist * (i + 1)))

    vertices = np.array(verts, dtype=float)
    triangles = _flip_to_intrinsic_delaunay(vertices, np.array(tris, dtype=np.int64), a)

    mesh = TriMesh(
        vertices=vertices,
        triangles=triangles,
        curvature=float(a),
        provenance={
            "generator": "ball_mesh",
            "rho_max": float(rho_max),
            "edge_length": float(h),
            "rings": n_rings,
            "realized_radius": float(n_rings * h),
        },
    )
    _audit_mesh(mesh, h)
    return mesh


def cutoff_profile(t):
    """Cubic profile phi: 1 on [0, 1], 0 on [2, inf), smoothstep between.

    Satisfies chi_[0,1) <= phi <= chi_[0,2) and sup |phi'| = 1.5.
    """
    t = np.asarray(t, dtype=float)
    s = np.clip(t - 1.0, 0.0, 1.0)
    out = 1.0 - 3.0 * s * s + 2.0 * s * s * s
    return out if out.ndim else float(out)


def cutoff_cochain(mesh: TriMesh, R: float) -> "Cochain":
    """Vertex cochain phi_R(v) = phi(rho(v) / R) for scale R > 1."""
    from .simplicial import Cochain

    if R <= 1.0:
        raise DomainError("cutoff scale R must exceed 1")
    rho = radial_distance(mesh.vertices, mesh.curvature)
    return Cochain(0, cutoff_profile(rho / R))
