#!/usr/bin/env python3
"""Write the Delaunay fixtures in data/ (Gmsh is not required).

The benchmark-3 network is triangulated with the `triangle` package and the result is
written as Gmsh ASCII meshes, format 2.2 and 4.1. Fracture edges are stored as line
elements in physical groups FRACTURE_<i>.

    pip install triangle
    python3 tools/make_delaunay_fixtures.py [--max-area 4e-3]
"""

import argparse
import csv
import itertools
import pathlib

import numpy as np
import triangle

ROOT = pathlib.Path(__file__).resolve().parent.parent


def read_network(path):
    with open(path) as f:
        rows = [r for r in csv.reader(f) if r and not r[0].startswith("x0")]
    return [tuple(map(float, r[:4])) for r in rows]


def crossing(p, q):
    (x0, y0, x1, y1), (u0, v0, u1, v1) = p, q
    r = np.array([x1 - x0, y1 - y0])
    s = np.array([u1 - u0, v1 - v0])
    den = r[0] * s[1] - r[1] * s[0]
    if abs(den) < 1e-14:
        return None
    d = np.array([u0 - x0, v0 - y0])
    t = (d[0] * s[1] - d[1] * s[0]) / den
    u = (d[0] * r[1] - d[1] * r[0]) / den
    eps = 1e-9
    if -eps <= t <= 1 + eps and -eps <= u <= 1 + eps:
        return float(np.clip(t, 0, 1)), float(np.clip(u, 0, 1))
    return None


def pslg(fractures, seg_len):
    verts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    segs = [(0, 1), (1, 2), (2, 3), (3, 0)]
    marks = [1, 1, 1, 1]

    def vid(p):
        for k, v in enumerate(verts):
            if abs(v[0] - p[0]) < 1e-10 and abs(v[1] - p[1]) < 1e-10:
                return k
        verts.append(p)
        return len(verts) - 1

    stations = {i: [0.0, 1.0] for i in range(len(fractures))}
    for i, j in itertools.combinations(range(len(fractures)), 2):
        hit = crossing(fractures[i], fractures[j])
        if hit:
            stations[i].append(hit[0])
            stations[j].append(hit[1])
    for i, (x0, y0, x1, y1) in enumerate(fractures):
        ts = sorted(set(round(t, 12) for t in stations[i]))
        # Refine along the fracture: pieces no longer than seg_len.
        length = np.hypot(x1 - x0, y1 - y0)
        fine = []
        for a, b in zip(ts, ts[1:]):
            k = max(1, int(np.ceil((b - a) * length / seg_len)))
            fine.extend(a + (b - a) * m / k for m in range(k))
        fine.append(ts[-1])
        ids = [vid((x0 + t * (x1 - x0), y0 + t * (y1 - y0))) for t in fine]
        for a, b in zip(ids, ids[1:]):
            segs.append((a, b))
            marks.append(i + 2)
    return dict(vertices=np.array(verts), segments=np.array(segs), segment_markers=np.array(marks))


def fracture_edges(tri):
    out = []
    for (a, b), m in zip(tri["segments"], tri["segment_markers"].ravel()):
        if m >= 2:
            out.append((int(a), int(b), int(m) - 1))
    return out


def write_v2(path, tri, nfrac):
    nodes = tri["vertices"]
    cells = tri["triangles"]
    lines = fracture_edges(tri)
    with open(path, "w") as f:
        f.write("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n")
        f.write(f"$PhysicalNames\n{nfrac + 1}\n")
        for i in range(1, nfrac + 1):
            f.write(f'1 {i} "FRACTURE_{i}"\n')
        f.write(f'2 {nfrac + 1} "DOMAIN"\n$EndPhysicalNames\n')
        f.write(f"$Nodes\n{len(nodes)}\n")
        for k, (x, y) in enumerate(nodes):
            f.write(f"{k + 1} {x:.17g} {y:.17g} 0\n")
        f.write("$EndNodes\n")
        f.write(f"$Elements\n{len(lines) + len(cells)}\n")
        e = 1
        for a, b, tag in lines:
            f.write(f"{e} 1 2 {tag} {tag} {a + 1} {b + 1}\n")
            e += 1
        for t in cells:
            f.write(f"{e} 2 2 {nfrac + 1} 1 {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")
            e += 1
        f.write("$EndElements\n")


def write_v41(path, tri, nfrac):
    nodes = tri["vertices"]
    cells = tri["triangles"]
    lines = fracture_edges(tri)
    with open(path, "w") as f:
        f.write("$MeshFormat\n4.1 0 8\n$EndMeshFormat\n")
        f.write(f"$PhysicalNames\n{nfrac + 1}\n")
        for i in range(1, nfrac + 1):
            f.write(f'1 {i} "FRACTURE_{i}"\n')
        f.write(f'2 {nfrac + 1} "DOMAIN"\n$EndPhysicalNames\n')
        # One curve entity per fracture and one surface; points are not listed.
        f.write(f"$Entities\n0 {nfrac} 1 0\n")
        for i in range(1, nfrac + 1):
            f.write(f"{i} 0 0 0 1 1 0 1 {i} 0\n")
        f.write(f"1 0 0 0 1 1 0 1 {nfrac + 1} 0\n$EndEntities\n")
        n = len(nodes)
        f.write(f"$Nodes\n1 {n} 1 {n}\n2 1 0 {n}\n")
        for k in range(n):
            f.write(f"{k + 1}\n")
        for x, y in nodes:
            f.write(f"{x:.17g} {y:.17g} 0\n")
        f.write("$EndNodes\n")
        by_tag = {}
        for a, b, tag in lines:
            by_tag.setdefault(tag, []).append((a, b))
        nel = len(lines) + len(cells)
        f.write(f"$Elements\n{len(by_tag) + 1} {nel} 1 {nel}\n")
        e = 1
        for tag in sorted(by_tag):
            f.write(f"1 {tag} 1 {len(by_tag[tag])}\n")
            for a, b in by_tag[tag]:
                f.write(f"{e} {a + 1} {b + 1}\n")
                e += 1
        f.write(f"2 1 2 {len(cells)}\n")
        for t in cells:
            f.write(f"{e} {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")
            e += 1
        f.write("$EndElements\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-area", type=float, default=4e-3)
    ap.add_argument("--min-angle", type=float, default=18.0)
    ap.add_argument("--fracture-h", type=float, default=0.0145)
    args = ap.parse_args()
    fr = read_network(ROOT / "data" / "benchmark3_fractures.csv")
    tri = triangle.triangulate(pslg(fr, args.fracture_h), f"pq{args.min_angle}a{args.max_area}")
    write_v2(ROOT / "data" / "benchmark3_delaunay.msh", tri, len(fr))
    write_v41(ROOT / "data" / "benchmark3_delaunay_v41.msh", tri, len(fr))
    print(f"{len(tri['triangles'])} triangles, {len(fracture_edges(tri))} fracture edges")


if __name__ == "__main__":
    main()
