"""Boolean difference of closed triangle meshes.

Each connected shell of the target is cut separately, because composed objects
are unions of overlapping closed shells rather than one clean solid.  For a
shell ``A`` and cutter ``K``:

* triangles of one mesh that intersect triangles of the other are split by the
  planes of the triangles they meet (polygon/plane splitting as in BSP CSG),
  so no fragment crosses the other surface;
* each fragment is classified by the generalized winding number of the other
  mesh at an interior point;
* the parts of ``A`` outside ``K`` and the parts of ``K`` inside ``A`` (flipped)
  are welded, T-junctions are split, and polygons are fan-triangulated.

The result is validated (every edge shared by exactly two triangles); on
failure, or on exactly coplanar overlaps, the cutter is shifted by a tiny
random offset and the cut is retried.
"""
from __future__ import annotations

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _cc
from scipy.spatial import cKDTree

from ..errors import BooleanFailure, InvalidInput
from ..mesh import TriMesh, bounds, connected_components, is_closed, is_consistently_oriented
from ..seeding import stream

PLANE_EPS = 1e-7
# Plane snapping moves a crossing point by up to PLANE_EPS / sin(angle), so
# points from the two sides of a cut are merged at a coarser tolerance.
WELD_TOL = 1e-6
TJUNCTION_TOL = 1e-6
JITTER = 1e-5


class _Degenerate(Exception):
    pass


def boolean_difference(target: TriMesh, cutter: TriMesh, *, seed: int = 0, max_retries: int = 3) -> TriMesh:
    """``target`` minus ``cutter``.

    Faces taken from the cutter get the surface group of the nearest target
    triangle, so they inherit that surface's texture.

    Raises:
        InvalidInput: either mesh is not closed.
        BooleanFailure: no valid result after ``max_retries`` jittered retries.
    """
    if not is_closed(target) or not is_closed(cutter):
        raise InvalidInput("boolean_difference needs closed meshes")
    if target.n_triangles == 0 or cutter.n_triangles == 0:
        return target
    rng = stream(seed, "csg-jitter")
    k = cutter
    for _ in range(max_retries + 1):
        try:
            return _difference(target, k)
        except _Degenerate:
            # a rigid shift keeps flat faces flat; bending them would trade
            # exact coplanarity for ill-conditioned near-coplanarity
            shift = rng.normal(size=3)
            shift *= JITTER / np.linalg.norm(shift)
            k = TriMesh(cutter.vertices + shift, cutter.triangles, cutter.uvs, cutter.groups)
    raise BooleanFailure(f"boolean difference failed after {max_retries} jittered retries")


def _difference(target: TriMesh, cutter: TriMesh) -> TriMesh:
    labels = connected_components(target)
    kbox = bounds(cutter)
    pieces = []
    for comp in range(int(labels.max()) + 1):
        shell = _submesh(target, labels == comp)
        if not bounds(shell).overlaps(kbox, pad=PLANE_EPS):
            pieces.append(shell)
        else:
            pieces.append(_shell_difference(shell, cutter))
    return _concat(pieces)


def _submesh(m: TriMesh, mask: np.ndarray) -> TriMesh:
    tris = m.triangles[mask]
    used, inverse = np.unique(tris, return_inverse=True)
    return TriMesh(m.vertices[used], inverse.reshape(-1, 3), m.uvs[mask], m.groups[mask])


def _concat(meshes) -> TriMesh:
    """Concatenate keeping group ids as they are."""
    meshes = [m for m in meshes if m.n_triangles]
    if not meshes:
        return TriMesh.empty()
    offsets = np.cumsum([0] + [m.n_vertices for m in meshes[:-1]])
    return TriMesh(
        np.concatenate([m.vertices for m in meshes]),
        np.concatenate([m.triangles + o for m, o in zip(meshes, offsets)]),
        np.concatenate([m.uvs for m in meshes]),
        np.concatenate([m.groups for m in meshes]),
    )


# ---------------------------------------------------------------------------
# geometry helpers


def _planes(corners: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
    length = np.linalg.norm(n, axis=1, keepdims=True)
    n = n / np.where(length > 0, length, 1.0)
    return n, np.einsum("ij,ij->i", n, corners[:, 0])


def winding_numbers(points: np.ndarray, corners: np.ndarray) -> np.ndarray:
    """Generalized winding number of a closed triangle soup at each point.

    Sum of signed solid angles (Van Oosterom and Strackee) over ``4 pi``:
    about 1 inside, 0 outside.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    out = np.zeros(len(points))
    if len(corners) == 0 or len(points) == 0:
        return out
    c = [[corners[:, v, i][None, :] for i in range(3)] for v in range(3)]
    step = max(1, 400_000 // len(corners))
    for s in range(0, len(points), step):
        q = [points[s : s + step, i][:, None] for i in range(3)]
        ax, ay, az = (c[0][i] - q[i] for i in range(3))
        bx, by, bz = (c[1][i] - q[i] for i in range(3))
        cx, cy, cz = (c[2][i] - q[i] for i in range(3))
        la = np.sqrt(ax * ax + ay * ay + az * az)
        lb = np.sqrt(bx * bx + by * by + bz * bz)
        lc = np.sqrt(cx * cx + cy * cy + cz * cz)
        det = ax * (by * cz - bz * cy) + ay * (bz * cx - bx * cz) + az * (bx * cy - by * cx)
        denom = la * lb * lc + (ax * bx + ay * by + az * bz) * lc + (bx * cx + by * cy + bz * cz) * la + (cx * ax + cy * ay + cz * az) * lb
        out[s : s + step] = np.arctan2(det, denom).sum(axis=1) / (2 * np.pi)
    return out


def _odd(w: np.ndarray) -> np.ndarray:
    """Inside test by winding parity.

    Displaced shells can fold over themselves, giving winding numbers of -1
    or 2 near a fold.  Parity flips across every sheet, so exactly one side of
    each crossing is kept and edges still pair up.
    """
    return np.rint(w).astype(np.int64) % 2 == 1


def _box_pairs(ca: np.ndarray, cb: np.ndarray, pad: float) -> tuple[np.ndarray, np.ndarray]:
    empty = np.zeros(0, dtype=np.int64)
    if len(ca) == 0 or len(cb) == 0:
        return empty, empty
    lo_a, hi_a = ca.min(axis=1) - pad, ca.max(axis=1) + pad
    lo_b, hi_b = cb.min(axis=1), cb.max(axis=1)
    out_i, out_j = [], []
    step = max(1, 1_000_000 // max(1, len(cb)))
    for s in range(0, len(ca), step):
        ov = np.all(lo_a[s : s + step, None] <= hi_b[None], axis=2) & np.all(lo_b[None] <= hi_a[s : s + step, None], axis=2)
        i, j = np.nonzero(ov)
        out_i.append(i + s)
        out_j.append(j)
    return np.concatenate(out_i), np.concatenate(out_j)


def _line_interval(tri: np.ndarray, s: np.ndarray, direction: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Extent along ``direction`` of each triangle's intersection with the other plane."""
    on = np.abs(s) <= PLANE_EPS
    proj = np.einsum("pki,pi->pk", tri, direction)
    lo = np.where(on, proj, np.inf).min(axis=1)
    hi = np.where(on, proj, -np.inf).max(axis=1)
    for i, j in ((0, 1), (1, 2), (2, 0)):
        si, sj = s[:, i], s[:, j]
        cross = (si * sj < 0) & ~on[:, i] & ~on[:, j]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(cross, si / (si - sj), 0.0)
        p = proj[:, i] + t * (proj[:, j] - proj[:, i])
        lo = np.where(cross, np.minimum(lo, p), lo)
        hi = np.where(cross, np.maximum(hi, p), hi)
    return lo, hi


def _intersecting_pairs(ta: np.ndarray, tk: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs (into ``ta``, ``tk``) of triangles that truly intersect."""
    i, j = _box_pairs(ta, tk, PLANE_EPS)
    if len(i) == 0:
        return i, j
    na, da = _planes(ta[i])
    nk, dk = _planes(tk[j])
    s_k = np.einsum("pki,pi->pk", tk[j], na) - da[:, None]  # cutter vertices vs target plane
    s_a = np.einsum("pki,pi->pk", ta[i], nk) - dk[:, None]
    coplanar = np.all(np.abs(s_k) <= PLANE_EPS, axis=1) | np.all(np.abs(s_a) <= PLANE_EPS, axis=1)
    if coplanar.any():
        raise _Degenerate("coplanar triangles")
    separated = (
        np.all(s_k > PLANE_EPS, axis=1) | np.all(s_k < -PLANE_EPS, axis=1)
        | np.all(s_a > PLANE_EPS, axis=1) | np.all(s_a < -PLANE_EPS, axis=1)
    )
    i, j, na, nk, s_k, s_a = i[~separated], j[~separated], na[~separated], nk[~separated], s_k[~separated], s_a[~separated]
    if len(i) == 0:
        return i, j
    direction = np.cross(na, nk)
    lo_a, hi_a = _line_interval(ta[i], s_a, direction)
    lo_k, hi_k = _line_interval(tk[j], s_k, direction)
    tol = PLANE_EPS * np.linalg.norm(direction, axis=1)
    keep = (lo_a <= hi_k + tol) & (lo_k <= hi_a + tol)
    return i[keep], j[keep]


def _split(poly: list, plane: tuple) -> tuple[list, list]:
    """Split a convex polygon (list of xyz tuples) into front and back parts."""
    nx, ny, nz, d = plane
    s = [nx * p[0] + ny * p[1] + nz * p[2] - d for p in poly]
    cls = [1 if x > PLANE_EPS else (-1 if x < -PLANE_EPS else 0) for x in s]
    if min(cls) >= 0:
        return [poly], []
    if max(cls) <= 0:
        return [], [poly]
    front, back = [], []
    k = len(poly)
    for a in range(k):
        b = (a + 1) % k
        pa, ca = poly[a], cls[a]
        if ca >= 0:
            front.append(pa)
        if ca <= 0:
            back.append(pa)
        if ca * cls[b] < 0:
            p, q, sp, sq = pa, poly[b], s[a], s[b]
            if q < p:  # same point whichever triangle computes it
                p, q, sp, sq = q, p, sq, sp
            t = sp / (sp - sq)
            x = (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]), p[2] + t * (q[2] - p[2]))
            front.append(x)
            back.append(x)
    out_f = [front] if len(front) >= 3 else []
    out_b = [back] if len(back) >= 3 else []
    return out_f, out_b


def _fragments(tri: np.ndarray, planes: list) -> list:
    pieces = [[tuple(map(float, p)) for p in tri]]
    for plane in planes:
        nxt = []
        for poly in pieces:
            f, b = _split(poly, plane)
            nxt.extend(f)
            nxt.extend(b)
        pieces = nxt
    return pieces


def _interior_point(poly: list) -> np.ndarray:
    return np.asarray(poly).mean(axis=0)


# ---------------------------------------------------------------------------
# the cut


def _shell_difference(a: TriMesh, k: TriMesh) -> TriMesh:
    ta, tk = a.corners(), k.corners()
    kbox, abox = bounds(k), bounds(a)
    in_box_a = np.all(ta.max(axis=1) >= kbox.min - PLANE_EPS, axis=1) & np.all(ta.min(axis=1) <= kbox.max + PLANE_EPS, axis=1)
    in_box_k = np.all(tk.max(axis=1) >= abox.min - PLANE_EPS, axis=1) & np.all(tk.min(axis=1) <= abox.max + PLANE_EPS, axis=1)
    idx_a, idx_k = np.nonzero(in_box_a)[0], np.nonzero(in_box_k)[0]

    pi, pj = _intersecting_pairs(ta[idx_a], tk[idx_k])
    pi, pj = idx_a[pi], idx_k[pj]
    na, da = _planes(ta)
    nk, dk = _planes(tk)

    split_a = np.unique(pi)
    split_k = np.unique(pj)
    whole_a = np.setdiff1d(idx_a, split_a)
    whole_k = np.setdiff1d(idx_k, split_k)

    # split intersecting triangles by the planes of the triangles they meet
    order = np.argsort(pi, kind="stable")
    frag_a = _split_all(ta, pi[order], pj[order], nk, dk)
    order = np.argsort(pj, kind="stable")
    frag_k = _split_all(tk, pj[order], pi[order], na, da)

    # classify unsplit triangles one edge-connected patch at a time
    keep_whole_a = _classify_whole(a.triangles, ta, split_a, whole_a, tk, inside=False)
    keep_whole_k = _classify_whole(k.triangles, tk, split_k, whole_k, ta, inside=True)
    if frag_a:
        wa = winding_numbers(np.array([_interior_point(p) for _, p in frag_a]), tk)
        frag_a = [f for f, w in zip(frag_a, _odd(wa)) if not w]
    if frag_k:
        wk = winding_numbers(np.array([_interior_point(p) for _, p in frag_k]), ta)
        frag_k = [f for f, w in zip(frag_k, _odd(wk)) if w]

    removed_a = np.zeros(a.n_triangles, dtype=bool)
    removed_a[idx_a] = True
    removed_a[keep_whole_a] = False  # whole survivors stay as original triangles unless near a split
    # untouched triangles adjacent to split ones may receive T-junction vertices
    near_split = np.zeros(a.n_vertices, dtype=bool)
    near_split[a.triangles[split_a].ravel()] = True
    ring = ~removed_a & np.any(near_split[a.triangles], axis=1)

    polys, src, flip = [], [], []
    for t in np.nonzero(ring)[0]:
        polys.append([tuple(map(float, p)) for p in ta[t]])
        src.append(int(t))
        flip.append(False)
    for t, poly in frag_a:
        polys.append(poly)
        src.append(int(t))
        flip.append(False)
    for t in keep_whole_k:
        polys.append([tuple(map(float, p)) for p in tk[t]])
        src.append(-1 - int(t))
        flip.append(True)
    for t, poly in frag_k:
        polys.append(poly)
        src.append(-1 - int(t))
        flip.append(True)

    untouched = ~removed_a & ~ring
    return _assemble(a, k, untouched, polys, np.array(src, dtype=np.int64), np.array(flip, dtype=bool))


def _edge_labels(triangles: np.ndarray, members: np.ndarray) -> np.ndarray:
    """Label each member triangle by its edge-connected component among members."""
    n = len(members)
    e = np.sort(triangles[members][:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
    owner = np.repeat(np.arange(n), 3)
    _, key = np.unique(e, axis=0, return_inverse=True)
    key = key.ravel()
    order = np.argsort(key, kind="stable")
    same = key[order][1:] == key[order][:-1]
    rows, cols = owner[order][:-1][same], owner[order][1:][same]
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    return _cc(graph, directed=False)[1]


def _classify_whole(triangles: np.ndarray, corners: np.ndarray, split: np.ndarray, in_box: np.ndarray, other: np.ndarray, inside: bool, samples: int = 5) -> np.ndarray:
    """Unsplit in-box triangles to keep.

    Patches of unsplit triangles never cross the other surface, so one
    majority vote over a few triangles decides each patch.  Patches reaching
    outside the other mesh's box are outside it without any test.
    """
    if len(in_box) == 0:
        return in_box
    members = np.setdiff1d(np.arange(len(triangles)), split)
    labels = _edge_labels(triangles, members)
    boxed = np.zeros(len(triangles), dtype=bool)
    boxed[in_box] = True
    patch_outside = np.zeros(labels.max() + 1, dtype=bool)
    patch_outside[labels[~boxed[members]]] = True
    keep_patch = np.zeros(labels.max() + 1, dtype=bool)
    keep_patch[:] = not inside
    todo = np.nonzero(~patch_outside)[0]
    if len(todo):
        order = np.argsort(labels, kind="stable")
        starts = np.searchsorted(labels[order], todo)
        ends = np.searchsorted(labels[order], todo, side="right")
        picks = [order[s : min(e, s + samples)] for s, e in zip(starts, ends)]
        idx = members[np.concatenate(picks)]
        w = winding_numbers(corners[idx].mean(axis=1), other)
        votes = np.split(_odd(w), np.cumsum([len(p) for p in picks])[:-1])
        is_in = np.array([v.mean() > 0.5 for v in votes])
        keep_patch[todo] = is_in if inside else ~is_in
    keep = np.zeros(len(triangles), dtype=bool)
    keep[members] = keep_patch[labels]
    return in_box[keep[in_box]]


def _split_all(tris: np.ndarray, owner: np.ndarray, other: np.ndarray, n_other: np.ndarray, d_other: np.ndarray) -> list:
    out = []
    if len(owner) == 0:
        return out
    bounds_ = np.flatnonzero(np.diff(owner)) + 1
    for grp in np.split(np.arange(len(owner)), bounds_):
        t = int(owner[grp[0]])
        planes = [(*map(float, n_other[o]), float(d_other[o])) for o in np.unique(other[grp])]
        out.extend((t, p) for p in _fragments(tris[t], planes))
    return out


def _assemble(a: TriMesh, k: TriMesh, untouched: np.ndarray, polys: list, src: np.ndarray, flip: np.ndarray) -> TriMesh:
    if not polys:
        return _finalize(a, k, untouched, np.zeros((0, 3)), [], [])
    sizes = np.array([len(p) for p in polys])
    pts = np.array([p for poly in polys for p in poly], dtype=np.float64)

    # weld polygon points among themselves and onto the shell's own vertices
    allpts = np.concatenate([a.vertices, pts])
    pairs = cKDTree(allpts).query_pairs(WELD_TOL, output_type="ndarray")
    n_all = len(allpts)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])) if len(pairs) else (np.zeros(0), (np.zeros(0, int), np.zeros(0, int))), shape=(n_all, n_all))
    _, label = _cc(graph, directed=False)
    rep = np.full(label.max() + 1, n_all, dtype=np.int64)
    np.minimum.at(rep, label, np.arange(n_all))
    point_id = rep[label][a.n_vertices :]
    # new vertex table: shell vertices first, then representatives from polygon points
    new_ids = np.unique(point_id[point_id >= a.n_vertices])
    remap = np.full(n_all, -1, dtype=np.int64)
    remap[: a.n_vertices] = np.arange(a.n_vertices)
    remap[new_ids] = a.n_vertices + np.arange(len(new_ids))
    vertices = np.concatenate([a.vertices, allpts[new_ids]])
    ids = remap[point_id]

    loops = []
    start = 0
    for size in sizes:
        loop = ids[start : start + size].tolist()
        start += size
        dedup = [v for i, v in enumerate(loop) if v != loop[i - 1]]
        loops.append(dedup)

    loops = _split_tjunctions(vertices, loops)
    return _triangulate(a, k, vertices, untouched, loops, src, flip)


def _split_tjunctions(vertices: np.ndarray, loops: list) -> list:
    """Insert every vertex lying strictly inside a loop edge into that edge."""
    used = np.unique(np.concatenate([np.asarray(l, dtype=np.int64) for l in loops if l] or [np.zeros(0, np.int64)]))
    if len(used) == 0:
        return loops
    tree = cKDTree(vertices[used])
    e_loop, e_pos, e_a, e_b = [], [], [], []
    for li, loop in enumerate(loops):
        n = len(loop)
        for i in range(n):
            e_loop.append(li)
            e_pos.append(i)
            e_a.append(loop[i])
            e_b.append(loop[(i + 1) % n])
    e_a, e_b = np.array(e_a), np.array(e_b)
    pa, pb = vertices[e_a], vertices[e_b]
    mid = 0.5 * (pa + pb)
    radius = 0.5 * np.linalg.norm(pb - pa, axis=1) + TJUNCTION_TOL
    hits = tree.query_ball_point(mid, radius)
    counts = np.array([len(h) for h in hits])
    if counts.sum() == 0:
        return loops
    edge_idx = np.repeat(np.arange(len(e_a)), counts)
    cand = used[np.concatenate([np.asarray(h, dtype=np.int64) for h in hits if h])]
    ok = (cand != e_a[edge_idx]) & (cand != e_b[edge_idx])
    edge_idx, cand = edge_idx[ok], cand[ok]
    d = pb[edge_idx] - pa[edge_idx]
    rel = vertices[cand] - pa[edge_idx]
    dd = np.einsum("ij,ij->i", d, d)
    t = np.einsum("ij,ij->i", rel, d) / np.where(dd > 0, dd, 1.0)
    dist = np.linalg.norm(rel - t[:, None] * d, axis=1)
    on = (t > 0) & (t < 1) & (dist <= TJUNCTION_TOL)
    if not on.any():
        return loops
    inserts: dict = {}
    for e, c, tt in zip(edge_idx[on], cand[on], t[on]):
        inserts.setdefault(int(e), []).append((float(tt), int(c)))
    e_loop = np.array(e_loop)
    e_pos = np.array(e_pos)
    by_loop: dict = {}
    for e, items in inserts.items():
        items.sort()
        by_loop.setdefault(int(e_loop[e]), {})[int(e_pos[e])] = [c for _, c in items]
    out = list(loops)
    for li, extra in by_loop.items():
        loop = loops[li]
        new = []
        for i, v in enumerate(loop):
            new.append(v)
            new.extend(extra.get(i, ()))
        out[li] = new
    return out


def _barycentric(p: np.ndarray, tri: np.ndarray) -> np.ndarray:
    v0, v1, v2 = tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0], p - tri[:, 0]
    d00 = np.einsum("ij,ij->i", v0, v0)
    d01 = np.einsum("ij,ij->i", v0, v1)
    d11 = np.einsum("ij,ij->i", v1, v1)
    d20 = np.einsum("ij,ij->i", v2, v0)
    d21 = np.einsum("ij,ij->i", v2, v1)
    den = d00 * d11 - d01 * d01
    den = np.where(den != 0, den, 1.0)
    l1 = (d11 * d20 - d01 * d21) / den
    l2 = (d00 * d21 - d01 * d20) / den
    return np.stack([1 - l1 - l2, l1, l2], axis=1)


def _clean_loop(loop: list) -> list:
    """Remove repeats and a-b-a spikes left by welding; split figure-eights.

    Both removals drop edges that would cancel each other, so edge pairing
    across the whole mesh is preserved.
    """
    loop = list(loop)
    changed = True
    while changed and len(loop) >= 3:
        changed = False
        n = len(loop)
        for i in range(n):
            if loop[i] == loop[(i + 1) % n]:
                del loop[(i + 1) % n]
                changed = True
                break
            if loop[i - 1] == loop[(i + 1) % n]:
                # drop loop[i] and one copy of its repeated neighbour
                for j in sorted({i, (i + 1) % n}, reverse=True):
                    del loop[j]
                changed = True
                break
    if len(loop) < 3:
        return []
    seen = {}
    for i, v in enumerate(loop):
        if v in seen:
            j = seen[v]
            inner, outer = loop[j:i], loop[:j] + loop[i:]
            return _clean_loop(inner) + _clean_loop(outer)
        seen[v] = i
    return [loop]


def _triangulate(a: TriMesh, k: TriMesh, vertices: np.ndarray, untouched: np.ndarray, loops: list, src: np.ndarray, flip: np.ndarray) -> TriMesh:
    """Fan every polygon around a new centroid vertex (plain triangles stay)."""
    tris, tri_src, centers = [], [], []
    next_id = len(vertices)
    for loop, s, f in ((l, s, f) for raw, s, f in zip(loops, src, flip) for l in _clean_loop(raw)):
        if f:
            loop = loop[::-1]
        if len(loop) == 3:
            tris.append(loop)
            tri_src.append(s)
            continue
        c = next_id
        next_id += 1
        centers.append(vertices[loop].mean(axis=0))
        for i in range(len(loop)):
            tris.append([c, loop[i], loop[(i + 1) % len(loop)]])
            tri_src.append(s)
    if centers:
        vertices = np.concatenate([vertices, np.array(centers)])
    return _finalize(a, k, untouched, vertices, tris, tri_src)


def _finalize(a: TriMesh, k: TriMesh, untouched: np.ndarray, vertices: np.ndarray, tris, tri_src) -> TriMesh:
    keep_t = a.triangles[untouched]
    if not len(tris):
        if not untouched.any():
            return TriMesh.empty()
        out = _submesh(a, untouched)
        if not is_closed(out):
            raise _Degenerate("open result")
        return out
    tris = np.asarray(tris, dtype=np.int64)
    tri_src = np.asarray(tri_src, dtype=np.int64)
    corners = vertices[tris]

    uvs = np.zeros((len(tris), 3, 2))
    groups = np.zeros(len(tris), dtype=np.int64)
    from_a = tri_src >= 0
    if from_a.any():
        orig = tri_src[from_a]
        ta = a.corners()[orig]
        for c in range(3):
            lam = _barycentric(corners[from_a, c], ta)
            uvs[from_a, c] = np.einsum("ik,ikj->ij", lam, a.uvs[orig])
        groups[from_a] = a.groups[orig]
    from_k = ~from_a
    if from_k.any():
        centroids = corners[from_k].mean(axis=1)
        tree = cKDTree(a.corners().mean(axis=1))
        _, nearest = tree.query(centroids)
        groups[from_k] = a.groups[nearest]
        kb = bounds(k)
        ext = max(float(kb.extent.max()), 1e-12)
        n = np.cross(corners[from_k, 1] - corners[from_k, 0], corners[from_k, 2] - corners[from_k, 0])
        axis = np.argmax(np.abs(n), axis=1)
        plane_axes = np.array([[1, 2], [0, 2], [0, 1]])[axis]
        local = (corners[from_k] - kb.min) / ext
        rows = np.arange(len(local))[:, None]
        uvs[from_k, :, 0] = local[rows, :, plane_axes[:, [0]]].reshape(-1, 3)
        uvs[from_k, :, 1] = local[rows, :, plane_axes[:, [1]]].reshape(-1, 3)
    uvs = np.clip(uvs, 0.0, 1.0)

    all_tris = np.concatenate([keep_t, tris])
    all_uvs = np.concatenate([a.uvs[untouched], uvs])
    all_groups = np.concatenate([a.groups[untouched], groups])
    is_k = np.concatenate([np.zeros(len(keep_t), dtype=bool), from_k])
    # slivers collapsed by welding; dropping them keeps every edge paired
    ok = (all_tris[:, 0] != all_tris[:, 1]) & (all_tris[:, 1] != all_tris[:, 2]) & (all_tris[:, 2] != all_tris[:, 0])
    all_tris, all_uvs, all_groups, is_k = all_tris[ok], all_uvs[ok], all_groups[ok], is_k[ok]
    used, inverse = np.unique(all_tris, return_inverse=True)
    out = TriMesh(vertices[used], inverse.reshape(-1, 3), all_uvs, all_groups)
    if not is_closed(out):
        raise _Degenerate("open result")
    out = _orient_cutter_patches(out, is_k)
    if not is_consistently_oriented(out):
        raise _Degenerate("inconsistently oriented result")
    return out


def _orient_cutter_patches(m: TriMesh, is_k: np.ndarray) -> TriMesh:
    """Flip cutter-derived patches that disagree with the target faces they meet.

    Only happens where the target folds over itself.  Expects a closed mesh.
    """
    if not is_k.any():
        return m
    n = m.n_triangles
    directed = m.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
    owner = np.repeat(np.arange(n), 3)
    key = np.sort(directed, axis=1)
    order = np.lexsort((key[:, 1], key[:, 0]))
    first, second = order[0::2], order[1::2]  # closed: every edge appears twice
    t1, t2 = owner[first], owner[second]
    same_dir = directed[first, 0] == directed[second, 0]
    both_k = is_k[t1] & is_k[t2]
    graph = coo_matrix((np.ones(both_k.sum()), (t1[both_k], t2[both_k])), shape=(n, n))
    _, patch = _cc(graph, directed=False)
    mixed = is_k[t1] != is_k[t2]
    kt = np.where(is_k[t1[mixed]], t1[mixed], t2[mixed])
    bad = same_dir[mixed]
    n_patch = patch.max() + 1
    wrong = np.bincount(patch[kt], weights=bad, minlength=n_patch)
    total = np.bincount(patch[kt], minlength=n_patch)
    if np.any((wrong > 0) & (wrong < total)):
        raise _Degenerate("cutter patch meets the target with mixed orientation")
    flip_patch = (total > 0) & (wrong == total)
    flip = is_k & flip_patch[patch]
    if not flip.any():
        return m
    tris = m.triangles.copy()
    uvs = m.uvs.copy()
    tris[flip] = tris[flip][:, ::-1]
    uvs[flip] = uvs[flip][:, ::-1]
    return TriMesh(m.vertices, tris, uvs, m.groups)
