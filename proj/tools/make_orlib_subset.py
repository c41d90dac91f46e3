#!/usr/bin/env python3
"""Generate ORLib-format p-median instances and their exact optima.

Instances follow the shape of the OR-Library pmed1..pmed15 files (vertex count,
edge count, p): a random spanning tree plus uniformly drawn extra edges, integer
costs uniform in [1, 100]. Optima come from the classic p-median MILP solved with
HiGHS through scipy.optimize.milp, on the all-pairs shortest path matrix.

Writes <out>/<name>.txt for every instance and <out>/optima.txt (sidecar).
"""
import argparse
import pathlib
import random
import time

import numpy as np
from scipy.optimize import LinearConstraint, Bounds, milp
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import shortest_path

# (name, n, m, p) mirrors the published pmed1..pmed15 header lines.
SHAPES = [
    ("spmed1", 100, 200, 5), ("spmed2", 100, 200, 10), ("spmed3", 100, 200, 10),
    ("spmed4", 100, 200, 20), ("spmed5", 100, 200, 33),
    ("spmed6", 200, 800, 5), ("spmed7", 200, 800, 10), ("spmed8", 200, 800, 20),
    ("spmed9", 200, 800, 40), ("spmed10", 200, 800, 67),
    ("spmed11", 300, 1800, 5), ("spmed12", 300, 1800, 10), ("spmed13", 300, 1800, 30),
    ("spmed14", 300, 1800, 60), ("spmed15", 300, 1800, 100),
]


def random_graph(rng, n, m):
    order = list(range(1, n + 1))
    rng.shuffle(order)
    edges, seen = [], set()
    for pos in range(1, n):
        a, b = order[pos], order[rng.randrange(pos)]
        seen.add((min(a, b), max(a, b)))
        edges.append((a, b))
    while len(edges) < m:
        a, b = rng.randint(1, n), rng.randint(1, n)
        key = (min(a, b), max(a, b))
        if a == b or key in seen:
            continue
        seen.add(key)
        edges.append((a, b))
    rng.shuffle(edges)
    return [(a, b, rng.randint(1, 100)) for a, b in edges]


def distance_matrix(n, edges):
    rows = [a - 1 for a, _, _ in edges] + [b - 1 for _, b, _ in edges]
    cols = [b - 1 for _, b, _ in edges] + [a - 1 for a, _, _ in edges]
    vals = [c for _, _, c in edges] * 2
    g = coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    return shortest_path(g, directed=False)


def solve_pmedian(d, p):
    n = d.shape[0]
    # variables: x[i, j] (i served by j) then y[j]
    nx = n * n
    c = np.concatenate([d.ravel(), np.zeros(n)])
    r, cidx, v = [], [], []
    # sum_j x[i, j] = 1
    for i in range(n):
        r += [i] * n
        cidx += list(range(i * n, i * n + n))
        v += [1.0] * n
    assign = coo_matrix((v, (r, cidx)), shape=(n, nx + n))
    # x[i, j] - y[j] <= 0
    idx = np.arange(nx)
    link = coo_matrix(
        (np.concatenate([np.ones(nx), -np.ones(nx)]),
         (np.concatenate([idx, idx]), np.concatenate([idx, nx + idx % n]))),
        shape=(nx, nx + n))
    count = coo_matrix((np.ones(n), (np.zeros(n, dtype=int), nx + np.arange(n))), shape=(1, nx + n))
    cons = [LinearConstraint(assign, 1, 1), LinearConstraint(link, -np.inf, 0), LinearConstraint(count, p, p)]
    integrality = np.concatenate([np.zeros(nx), np.ones(n)])
    res = milp(c, constraints=cons, integrality=integrality, bounds=Bounds(0, 1),
               options={"mip_rel_gap": 0.0})
    if not res.success:
        raise RuntimeError(res.message)
    y = res.x[nx:]
    medoids = np.flatnonzero(y > 0.5)
    td = d[:, medoids].min(axis=1).sum()
    return int(round(td)), medoids


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/orlib")
    ap.add_argument("--seed", type=int, default=19900101)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sidecar = ["# instance optimum", "# exact p-median optimum, HiGHS MILP (mip_rel_gap=0) on shortest-path distances",
               f"# generated by tools/make_orlib_subset.py --seed {args.seed}"]
    for idx, (name, n, m, p) in enumerate(SHAPES):
        rng = random.Random(args.seed * 1000 + idx)
        edges = random_graph(rng, n, m)
        with open(out / f"{name}.txt", "w") as f:
            f.write(f" {n} {m} {p}\n")
            for a, b, c in edges:
                f.write(f" {a} {b} {c}\n")
        d = distance_matrix(n, edges)
        t0 = time.time()
        opt, medoids = solve_pmedian(d, p)
        print(f"{name}: n={n} m={m} p={p} optimum={opt} ({time.time() - t0:.1f}s)", flush=True)
        sidecar.append(f"{name} {opt}")
    (out / "optima.txt").write_text("\n".join(sidecar) + "\n")


if __name__ == "__main__":
    main()
