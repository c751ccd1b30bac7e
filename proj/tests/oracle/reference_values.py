"""Reference optima computed independently of the C++ library.

Every fixed topology is a convex problem (sum of Euclidean norms), solved
here as a second-order cone program. Minimizing over all full topologies,
whose relaxations include the degenerate trees, gives the Steiner minimum
tree. A fixed line y = 0 becomes free attachment points (x, 0), one per
group of a terminal partition.

Run: python3 reference_values.py   (needs numpy, cvxpy)
"""

import itertools
import math

import cvxpy as cp
import numpy as np


def full_topologies(n):
    """Edge lists on terminals 0..n-1 and Steiner nodes n..2n-3."""
    if n == 2:
        yield [(0, 1)]
        return
    def grow(edges, k, next_steiner):
        if k == n:
            yield edges
            return
        for i, (u, v) in enumerate(edges):
            s = next_steiner
            rest = edges[:i] + edges[i + 1:]
            yield from grow(rest + [(u, s), (s, v), (s, k)], k + 1, s + 1)
    yield from grow([(0, n), (1, n), (2, n)], 3, n + 1)


def tree_min(points, edges, n_steiner, free_on_line=()):
    """Minimum length of a topology; indices in free_on_line slide on y = 0."""
    pts = np.asarray(points, dtype=float)
    s = cp.Variable((n_steiner, 2)) if n_steiner else None
    free = {i: cp.Variable() for i in free_on_line}
    n = len(pts)

    def pos(i):
        if i in free:
            return cp.hstack([free[i], 0.0])
        if i < n:
            return pts[i]
        return s[i - n]

    cost = sum(cp.norm(pos(u) - pos(v)) for u, v in edges)
    prob = cp.Problem(cp.Minimize(cost))
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
    return prob.value


def est_opt(points):
    n = len(points)
    if n == 1:
        return 0.0
    return min(tree_min(points, e, max(n - 2, 0)) for e in full_topologies(n))


def partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in partitions(rest):
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]
        yield [[first]] + p


def line_group(points):
    """Optimal tree over the points plus one attachment on y = 0."""
    if len(points) == 1:
        return points[0][1]
    ext = list(points) + [(0.0, 0.0)]
    n = len(ext)
    return min(tree_min(ext, e, n - 2, free_on_line=(n - 1,)) for e in full_topologies(n))


def esfl_opt_canonical(points):
    cache = {}
    best = math.inf
    for part in partitions(list(range(len(points)))):
        total = 0.0
        for g in part:
            key = tuple(g)
            if key not in cache:
                cache[key] = line_group([points[i] for i in g])
            total += cache[key]
        best = min(best, total)
    return best


def esfl_opt(points, a, b, c):
    """Line a x + b y = c; each side handled in its own frame."""
    nrm = math.hypot(a, b)
    a, b, c = a / nrm, b / nrm, c / nrm
    up, down = [], []
    for x, y in points:
        d = a * x + b * y - c
        t = b * x - a * y
        if abs(d) < 1e-12:
            continue
        (up if d > 0 else down).append((t, abs(d)))
    return sum(esfl_opt_canonical(side) for side in (up, down) if side)


def esl_opt(points):
    best = math.inf
    for p, q in itertools.combinations(points, 2):
        a, b = -(q[1] - p[1]), q[0] - p[0]
        c = a * p[0] + b * p[1]
        best = min(best, esfl_opt(points, a, b, c))
    return best


def mst(points):
    n = len(points)
    seen, total = {0}, 0.0
    while len(seen) < n:
        d, j = min((math.dist(points[i], points[j]), j) for i in seen for j in range(n) if j not in seen)
        seen.add(j)
        total += d
    return total


if __name__ == "__main__":
    cases_est = {
        "triangle": [(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)],
        "square": [(0, 0), (1, 0), (1, 1), (0, 1)],
        "collinear": [(0, 0), (1, 0), (2, 0)],
        "random4": [(0.1, 0.2), (0.9, 0.35), (0.55, 0.95), (0.3, 0.7)],
        "random5": [(0.0, 0.0), (1.2, 0.1), (0.7, 0.9), (0.2, 1.1), (1.0, 1.3)],
        "random6": [(0.05, 0.4), (0.8, 0.05), (1.1, 0.75), (0.6, 1.2), (0.1, 1.0), (0.5, 0.5)],
    }
    for name, pts in cases_est.items():
        print(f"est {name}: {est_opt(pts):.15f}")

    cases_esfl = {
        "pair_close": ([(0, 1), (1, 1)], (0, 1, 0)),
        "pair_far": ([(0, 1), (100, 1)], (0, 1, 0)),
        "random3": ([(0.2, 0.5), (0.9, 0.8), (0.5, 1.4)], (0, 1, 0)),
        "random4": ([(0.1, 0.3), (0.6, 0.9), (1.0, 0.4), (0.4, 1.5)], (0, 1, 0)),
        "two_sides": ([(0.0, 1.0), (0.8, 0.6), (0.3, -0.7), (1.1, -0.2)], (0.2, 1.0, 0.1)),
        "tilted": ([(0.0, 2.0), (1.0, 2.5), (2.0, 1.8)], (1.0, -1.0, -3.0)),
    }
    for name, (pts, line) in cases_esfl.items():
        print(f"esfl {name}: {esfl_opt(pts, *line):.15f}")

    cases_esl = {
        "triangle": [(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)],
        "square": [(0, 0), (1, 0), (1, 1), (0, 1)],
        "random4": [(0.0, 0.0), (1.0, 0.3), (0.4, 1.1), (1.3, 1.0)],
    }
    for name, pts in cases_esl.items():
        print(f"esl {name}: {esl_opt(pts):.15f}")

    seed42 = [(0.0, 0.0), (1.510311065909078, 0.0), (1.2780627877093949, 0.0),
              (1.5042904014960532, 0.75), (0.2725453672648741, 0.75)]
    m = mst(seed42)
    print(f"seed42 M: {m:.15f} est: {est_opt(seed42):.15f} offset: {math.sqrt(2) * m:.15f}")
    print(f"seed42 gadget esfl: {esfl_opt(seed42, 1, 1, -2 * m):.15f}")
