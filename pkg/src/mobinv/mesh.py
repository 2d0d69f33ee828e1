"""Triangle meshes read as height fields z = f(x, y).

The discrete pipeline lives here: OFF/OBJ ingestion, ordered 1-ring
neighborhoods, per-vertex least-squares jet estimation, mixed Voronoi vertex
areas, planar-domain deformation through a Moebius map, and a synthetic grid
generator for the experiments.

Meshes are immutable after construction; the per-vertex fan structure is
built once on first use and shared read-only.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateTriangle,
    NonManifoldVertex,
    NonTriangleFace,
    ParseError,
    SingularPoint,
    TooFewNeighbors,
)
from .jets import AnalyticField, Jet
from .xform import MobiusMap

# Fits whose scaled normal system is worse-conditioned than this are marked
# invalid rather than trusted.
COND_LIMIT = 1e10


class TriMesh:
    """Indexed triangle mesh: vertices (N, 3) float, faces (M, 3) int."""

    def __init__(self, vertices, faces):
        V = np.array(vertices, dtype=float)
        F = np.array(faces, dtype=int)
        if V.ndim != 2 or V.shape[1] != 3:
            raise ValueError(f"vertices must be (N, 3), got {V.shape}")
        if F.size == 0:
            F = F.reshape(0, 3)
        if F.ndim != 2 or F.shape[1] != 3:
            raise ValueError(f"faces must be (M, 3), got {F.shape}")
        if F.size and (F.min() < 0 or F.max() >= len(V)):
            raise ValueError("face index out of range")
        same = (F[:, 0] == F[:, 1]) | (F[:, 1] == F[:, 2]) | (F[:, 0] == F[:, 2])
        if np.any(same):
            raise ValueError(f"degenerate face (repeated index) at face {np.argmax(same)}")
        V.flags.writeable = False
        F.flags.writeable = False
        self.vertices = V
        self.faces = F
        self._rings = None

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    def _build_rings(self):
        """Order each vertex's incident fan; classifies interior vs boundary.

        For every incident face (v, a, b) (rotated so v is first, winding
        kept) the directed edge a -> b is recorded.  A manifold, orientable
        fan chains these edges into a single cycle (interior) or a single
        open path (boundary); anything else raises NonManifoldVertex.
        """
        incident = [[] for _ in range(self.n_vertices)]
        for fi, (i, j, k) in enumerate(self.faces):
            incident[i].append((j, k))
            incident[j].append((k, i))
            incident[k].append((i, j))
        rings = []
        for v, edges in enumerate(incident):
            if not edges:
                rings.append(((), False))
                continue
            nxt = {}
            for a, b in edges:
                if a in nxt:
                    raise NonManifoldVertex(
                        f"vertex {v}: duplicated directed edge {v}-{a}"
                    )
                nxt[a] = b
            heads = set(nxt)
            tails = set(nxt.values())
            starts = heads - tails
            if len(starts) > 1:
                raise NonManifoldVertex(f"vertex {v}: fan splits into several sheets")
            interior = not starts
            start = min(starts) if starts else min(heads)
            chain = [start]
            cur = start
            while cur in nxt:
                cur = nxt.pop(cur)
                if cur == start:
                    break
                chain.append(cur)
            if nxt:
                raise NonManifoldVertex(f"vertex {v}: disconnected fan")
            rings.append((tuple(chain), interior))
        self._rings = rings

    def ring(self, v):
        if self._rings is None:
            self._build_rings()
        return self._rings[v]


@dataclass(frozen=True)
class VertexEstimate:
    """Fitted 2-D jet of the height field at a vertex, plus its area weight."""

    vertex: int
    jet: Jet
    area: float
    interior: bool
    valid: bool


def one_ring(mesh: TriMesh, v):
    """Ordered 1-ring neighbors of v and whether the fan closes."""
    if not 0 <= v < mesh.n_vertices:
        raise IndexError(f"vertex {v} out of range")
    return mesh.ring(v)


def ls_jet_fit(mesh: TriMesh, v, min_neighbors=5, area_mode="planar") -> VertexEstimate:
    """Least-squares second-order Taylor fit of z over the 1-ring of v.

    Solves z_i - z_v ~ fx dx + fy dy + fxx dx^2/2 + fxy dx dy + fyy dy^2/2
    over the planar offsets of the neighbors.  Offsets are centered at v and
    rescaled by their mean norm before solving, which keeps the normal system
    well conditioned on skinny rings.  The constant term is pinned to z_v.
    """
    neighbors, interior = one_ring(mesh, v)
    if len(neighbors) < min_neighbors:
        raise TooFewNeighbors(
            f"vertex {v} has {len(neighbors)} neighbors, need {min_neighbors}"
        )
    p = mesh.vertices[v]
    nb = mesh.vertices[list(neighbors)]
    dx = nb[:, 0] - p[0]
    dy = nb[:, 1] - p[1]
    dz = nb[:, 2] - p[2]
    h = np.mean(np.hypot(dx, dy))
    if h == 0.0:
        raise DegenerateTriangle(f"all neighbors of vertex {v} coincide with it")
    sx, sy = dx / h, dy / h
    A = np.column_stack([sx, sy, 0.5 * sx * sx, sx * sy, 0.5 * sy * sy])
    coef, _, rank, sv = np.linalg.lstsq(A, dz, rcond=None)
    cond = np.inf if sv[-1] == 0.0 else sv[0] / sv[-1]
    valid = bool(rank == 5 and cond < COND_LIMIT)
    fx, fy = coef[0] / h, coef[1] / h
    fxx, fxy, fyy = coef[2] / h**2, coef[3] / h**2, coef[4] / h**2
    jet = Jet(2, p[2], [fx, fy], [[fxx, fxy], [fxy, fyy]])
    area = mixed_voronoi_area(mesh, v, area_mode) if interior else 0.0
    return VertexEstimate(v, jet, area, interior, valid)


def _sector_area(pv, pp, pq):
    """Mixed-Voronoi contribution of the triangle (pv, pp, pq) at pv.

    Voronoi (cotangent) sector for non-obtuse triangles, half the triangle
    area when the angle at pv is obtuse, a quarter when another angle is.
    Works for 2-D (planar) or 3-D (embedded) coordinates.
    """
    e_p = pp - pv
    e_q = pq - pv
    if len(e_p) == 2:
        area2 = abs(e_p[0] * e_q[1] - e_p[1] * e_q[0])
    else:
        area2 = float(np.linalg.norm(np.cross(e_p, e_q)))
    scale = max(e_p @ e_p, e_q @ e_q)
    if area2 <= 1e-14 * scale:
        raise DegenerateTriangle("triangle with (numerically) zero area")
    if e_p @ e_q < 0:          # obtuse at the center vertex
        return 0.25 * area2    # half of area = half of (area2 / 2)
    u = pv - pp
    w = pq - pp
    if u @ w < 0:              # obtuse at pp
        return 0.125 * area2
    u2 = pv - pq
    w2 = pp - pq
    if u2 @ w2 < 0:            # obtuse at pq
        return 0.125 * area2
    cot_q = (u2 @ w2) / area2
    cot_p = (u @ w) / area2
    return 0.125 * ((e_p @ e_p) * cot_q + (e_q @ e_q) * cot_p)


def mixed_voronoi_area(mesh: TriMesh, v, mode="planar") -> float:
    """Mixed Voronoi cell area of v summed over its incident triangles.

    "planar" measures triangles in the (x, y) parameter domain of the height
    field; "embedded" uses the full 3-D coordinates for comparison.
    """
    if mode not in ("planar", "embedded"):
        raise ValueError(f"area mode must be 'planar' or 'embedded', got {mode!r}")
    take = slice(0, 2) if mode == "planar" else slice(0, 3)
    neighbors, interior = one_ring(mesh, v)
    total = 0.0
    m = len(neighbors)
    n_tris = m if interior else m - 1
    pv = mesh.vertices[v][take]
    for t in range(n_tris):
        pp = mesh.vertices[neighbors[t]][take]
        pq = mesh.vertices[neighbors[(t + 1) % m]][take]
        total += _sector_area(pv, pp, pq)
    return total


def deform_domain(mesh: TriMesh, mmap: MobiusMap) -> TriMesh:
    """Push the (x, y) domain of the height field through a 2-D Moebius map."""
    if mmap.dim != 2:
        raise ValueError("domain deformation needs a 2-D map")
    try:
        xy = mmap.apply(mesh.vertices[:, :2])
    except SingularPoint as exc:
        raise SingularPoint(
            f"vertex {exc.index} hits an inversion center under the deformation",
            index=exc.index,
        ) from exc
    return TriMesh(np.column_stack([xy, mesh.vertices[:, 2]]), mesh.faces)


def synthetic_grid(field: AnalyticField, k, extent=(-1.0, 1.0, -1.0, 1.0)) -> TriMesh:
    """Regular k x k grid over [x0,x1] x [y0,y1], diagonal split, z = field(x, y)."""
    if k < 2:
        raise ValueError("grid resolution must be at least 2")
    x0, x1, y0, y1 = extent
    xs = np.linspace(x0, x1, k)
    ys = np.linspace(y0, y1, k)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    Z = np.array([[field.value((x, y)) for x in xs] for y in ys])
    V = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])
    faces = []
    for j in range(k - 1):
        for i in range(k - 1):
            v00 = j * k + i
            v10 = j * k + i + 1
            v01 = (j + 1) * k + i
            v11 = (j + 1) * k + i + 1
            faces.append((v00, v10, v11))
            faces.append((v00, v11, v01))
    return TriMesh(V, np.array(faces))


# ---------------------------------------------------------------------------
# file formats


def _fmt(x):
    return repr(float(x))


def load_mesh(path, fmt=None) -> TriMesh:
    """Read an OFF or OBJ triangle mesh; format from the extension if not given."""
    if fmt is None:
        fmt = os.path.splitext(path)[1].lstrip(".").upper() or "OFF"
    fmt = fmt.upper()
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()
    if fmt == "OFF":
        return _parse_off(lines, path)
    if fmt == "OBJ":
        return _parse_obj(lines, path)
    raise ValueError(f"unsupported mesh format {fmt!r}")


def _parse_off(lines, path):
    content = [
        (i + 1, ln.strip()) for i, ln in enumerate(lines)
        if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not content or content[0][1] != "OFF":
        lineno = content[0][0] if content else 1
        raise ParseError(f"{path}:{lineno}: missing OFF header")
    try:
        counts = content[1][1].split()
        nv, nf = int(counts[0]), int(counts[1])
    except (IndexError, ValueError) as exc:
        raise ParseError(f"{path}:{content[1][0]}: bad count line") from exc
    rows = content[2:]
    if len(rows) < nv + nf:
        raise ParseError(f"{path}: expected {nv + nf} records, found {len(rows)}")
    verts = []
    for lineno, ln in rows[:nv]:
        parts = ln.split()
        try:
            verts.append([float(parts[0]), float(parts[1]), float(parts[2])])
        except (IndexError, ValueError) as exc:
            raise ParseError(f"{path}:{lineno}: bad vertex line") from exc
    faces = []
    for lineno, ln in rows[nv:nv + nf]:
        parts = ln.split()
        try:
            cnt = int(parts[0])
            idx = [int(p) for p in parts[1:1 + cnt]]
        except (IndexError, ValueError) as exc:
            raise ParseError(f"{path}:{lineno}: bad face line") from exc
        if cnt != 3 or len(idx) != 3:
            raise NonTriangleFace(f"{path}:{lineno}: face with {cnt} vertices")
        faces.append(idx)
    return TriMesh(np.array(verts), np.array(faces, dtype=int).reshape(-1, 3))


def _parse_obj(lines, path):
    verts = []
    faces = []
    for i, raw in enumerate(lines, start=1):
        ln = raw.strip()
        if not ln or ln.startswith("#"):
            continue
        tag, *rest = ln.split()
        if tag == "v":
            try:
                verts.append([float(rest[0]), float(rest[1]), float(rest[2])])
            except (IndexError, ValueError) as exc:
                raise ParseError(f"{path}:{i}: bad vertex line") from exc
        elif tag == "f":
            if len(rest) != 3:
                raise NonTriangleFace(f"{path}:{i}: face with {len(rest)} vertices")
            try:
                idx = [int(tok.split("/")[0]) - 1 for tok in rest]
            except ValueError as exc:
                raise ParseError(f"{path}:{i}: bad face line") from exc
            faces.append(idx)
        # all other record types are ignored
    return TriMesh(np.array(verts).reshape(-1, 3),
                   np.array(faces, dtype=int).reshape(-1, 3))


def save_mesh(mesh: TriMesh, path, fmt=None):
    """Write OFF or OBJ; float formatting round-trips every finite double."""
    if fmt is None:
        fmt = os.path.splitext(path)[1].lstrip(".").upper() or "OFF"
    fmt = fmt.upper()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if fmt == "OFF":
            fh.write("OFF\n")
            fh.write(f"{mesh.n_vertices} {mesh.n_faces} 0\n")
            for v in mesh.vertices:
                fh.write(f"{_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}\n")
            for f in mesh.faces:
                fh.write(f"3 {f[0]} {f[1]} {f[2]}\n")
        elif fmt == "OBJ":
            for v in mesh.vertices:
                fh.write(f"v {_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}\n")
            for f in mesh.faces:
                fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")
        else:
            raise ValueError(f"unsupported mesh format {fmt!r}")
