#!/usr/bin/env python3
"""Centroidal Voronoi polygon meshes of rectangles, written in the text mesh format.

Seeds are relaxed with Lloyd iterations; boundary cells are closed by mirroring
seeds across the rectangle sides. A domain may be split along vertical lines
into independently meshed strips; the strips are glued by inserting the
interface vertices of each side into the cells of the other, so every
interface face is shared exactly.

Usage:
  generate_voronoi_mesh.py --box x0 x1 y0 y1 --cells N [--split X ...]
                           [--labels left_label right_label ...] [--seed S] -o out.mesh
"""
import argparse
import sys

import numpy as np
from scipy.spatial import Voronoi


def mirrored(seeds, box):
    x0, x1, y0, y1 = box
    parts = [seeds]
    for axis, lo, hi in ((0, x0, x1), (1, y0, y1)):
        a = seeds.copy()
        a[:, axis] = 2 * lo - a[:, axis]
        b = seeds.copy()
        b[:, axis] = 2 * hi - b[:, axis]
        parts += [a, b]
    return np.vstack(parts)


def polygon_area_centroid(pts):
    x, y = pts[:, 0], pts[:, 1]
    xs, ys = np.roll(x, -1), np.roll(y, -1)
    cross = x * ys - xs * y
    area = 0.5 * cross.sum()
    cx = ((x + xs) * cross).sum() / (6 * area)
    cy = ((y + ys) * cross).sum() / (6 * area)
    return area, np.array([cx, cy])


def voronoi_cells(seeds, box):
    vor = Voronoi(mirrored(seeds, box))
    cells = []
    for i in range(len(seeds)):
        region = vor.regions[vor.point_region[i]]
        if -1 in region or len(region) < 3:
            raise RuntimeError("unbounded cell; increase Lloyd iterations")
        cells.append(list(region))
    return vor.vertices.copy(), cells


def lloyd(n, box, rng, iters):
    x0, x1, y0, y1 = box
    seeds = np.column_stack([rng.uniform(x0, x1, n), rng.uniform(y0, y1, n)])
    for _ in range(iters):
        verts, cells = voronoi_cells(seeds, box)
        seeds = np.array([polygon_area_centroid(verts[c])[1] for c in cells])
    return seeds


def snap(verts, box, tol):
    x0, x1, y0, y1 = box
    for v in verts:
        for axis, lo, hi in ((0, x0, x1), (1, y0, y1)):
            if abs(v[axis] - lo) < tol:
                v[axis] = lo
            if abs(v[axis] - hi) < tol:
                v[axis] = hi


def on_boundary(v, box, tol=1e-12):
    x0, x1, y0, y1 = box
    return (abs(v[0] - x0) < tol or abs(v[0] - x1) < tol or
            abs(v[1] - y0) < tol or abs(v[1] - y1) < tol)


def is_corner(v, box, tol=1e-12):
    x0, x1, y0, y1 = box
    return ((abs(v[0] - x0) < tol or abs(v[0] - x1) < tol) and
            (abs(v[1] - y0) < tol or abs(v[1] - y1) < tol))


def collapse_short_edges(verts, cells, box, min_len):
    parent = list(range(len(verts)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def rank(v):
        return 2 if is_corner(verts[v], box) else (1 if on_boundary(verts[v], box) else 0)

    for c in cells:
        for a, b in zip(c, c[1:] + c[:1]):
            ra, rb = find(a), find(b)
            if ra == rb:
                continue
            if np.linalg.norm(verts[ra] - verts[rb]) >= min_len:
                continue
            ka, kb = rank(ra), rank(rb)
            if ka == 2 and kb == 2:
                continue
            if ka == kb == 1:
                # two boundary vertices on different sides cannot merge
                same_side = (abs(verts[ra][0] - verts[rb][0]) < 1e-12 or
                             abs(verts[ra][1] - verts[rb][1]) < 1e-12)
                if not same_side:
                    continue
            keep, drop = (ra, rb) if ka >= kb else (rb, ra)
            if ka == kb == 0:
                verts[keep] = 0.5 * (verts[ra] + verts[rb])
            parent[drop] = keep
    out = []
    for c in cells:
        loop = []
        for v in c:
            r = find(v)
            if not loop or loop[-1] != r:
                loop.append(r)
        while len(loop) > 1 and loop[0] == loop[-1]:
            loop.pop()
        out.append(loop)
    return verts, out


def compact(verts, cells):
    used = sorted({v for c in cells for v in c})
    remap = {v: i for i, v in enumerate(used)}
    return verts[used], [[remap[v] for v in c] for c in cells]


def mesh_rectangle(box, n, rng, iters):
    seeds = lloyd(n, box, rng, iters)
    verts, cells = voronoi_cells(seeds, box)
    scale = max(box[1] - box[0], box[3] - box[2])
    snap(verts, box, 1e-9 * scale)
    spacing = np.sqrt((box[1] - box[0]) * (box[3] - box[2]) / n)
    verts, cells = collapse_short_edges(verts, cells, box, 0.05 * spacing)
    verts, cells = compact(verts, cells)
    fixed = []
    for c in cells:
        area, _ = polygon_area_centroid(verts[c])
        if area < 0:
            c = c[::-1]
        fixed.append(c)
    return verts, fixed


def glue(meshes, split_xs, tol=1e-12):
    """Concatenate strip meshes, refining interface edges so faces match."""
    all_verts = []
    all_cells = []
    for verts, cells in meshes:
        off = sum(len(v) for v in all_verts)
        all_verts.append(verts)
        all_cells.extend([[v + off for v in c] for c in cells])
    verts = np.vstack(all_verts)
    # merge coincident vertices (interface corners)
    key = {}
    remap = np.arange(len(verts))
    for i, v in enumerate(verts):
        k = (round(v[0], 12), round(v[1], 12))
        if k in key:
            remap[i] = key[k]
        else:
            key[k] = i
    cells = [[int(remap[v]) for v in c] for c in all_cells]
    for xs in split_xs:
        iface = sorted({v for c in cells for v in c if abs(verts[v][0] - xs) < tol},
                       key=lambda v: verts[v][1])
        new_cells = []
        for c in cells:
            loop = []
            for a, b in zip(c, c[1:] + c[:1]):
                loop.append(a)
                if abs(verts[a][0] - xs) < tol and abs(verts[b][0] - xs) < tol:
                    ya, yb = verts[a][1], verts[b][1]
                    lo, hi = min(ya, yb), max(ya, yb)
                    inner = [v for v in iface if lo + tol < verts[v][1] < hi - tol]
                    inner.sort(key=lambda v: verts[v][1], reverse=bool(ya > yb))
                    loop.extend(inner)
            new_cells.append(loop)
        cells = new_cells
    return compact(verts, cells)


def main(argv):
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--box", nargs=4, type=float, required=True)
    ap.add_argument("--cells", type=int, required=True)
    ap.add_argument("--split", nargs="*", type=float, default=[])
    ap.add_argument("--labels", nargs="*", type=int, default=None)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--lloyd", type=int, default=60)
    ap.add_argument("-o", "--output", required=True)
    args = ap.parse_args(argv)

    x0, x1, y0, y1 = args.box
    edges = [x0] + sorted(args.split) + [x1]
    labels = args.labels or [0] * (len(edges) - 1)
    if len(labels) != len(edges) - 1:
        ap.error("need one label per strip")
    rng = np.random.default_rng(args.seed)
    total = (x1 - x0)
    meshes, strip_labels = [], []
    for i in range(len(edges) - 1):
        box = (edges[i], edges[i + 1], y0, y1)
        n = max(4, round(args.cells * (edges[i + 1] - edges[i]) / total))
        verts, cells = mesh_rectangle(box, n, rng, args.lloyd)
        meshes.append((verts, cells))
        strip_labels += [labels[i]] * len(cells)
    verts, cells = glue(meshes, args.split) if len(meshes) > 1 else meshes[0]

    with open(args.output, "w") as out:
        out.write(f"{len(verts)} {len(cells)}\n")
        for v in verts:
            out.write(f"{v[0]:.17g} {v[1]:.17g}\n")
        for lab, c in zip(strip_labels, cells):
            out.write(f"{lab} {len(c)} " + " ".join(str(v) for v in c) + "\n")
    print(f"{args.output}: {len(verts)} vertices, {len(cells)} cells", file=sys.stderr)


if __name__ == "__main__":
    main(sys.argv[1:])
