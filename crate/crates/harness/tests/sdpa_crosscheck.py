"""Solve SDPA sparse files (.dat-s) with cvxpy and print one optimal value per file.

Reads the dual form  max F0.Y  s.t.  Fi.Y = ci,  Y psd  (block diagonal).
Off-diagonal entries are listed once and stand for both triangles.
When the file carries a `* layout psd=n free=p slack=s` comment, the
diagonal block is read back as p free variables (split into +/- parts) and
s inequality slacks, which keeps the external solver away from the
unbounded split direction.
Zero-rhs equalities with a psd matrix are eliminated first by restricting G
to their common null space.
Usage: python3 sdpa_crosscheck.py FILE...
"""
import sys

import cvxpy as cp
import numpy as np


def read(path):
    layout = None
    body = []
    for raw in open(path):
        if raw.startswith("* layout"):
            layout = dict(kv.split("=") for kv in raw.split()[2:])
            layout = {k: int(v) for k, v in layout.items()}
        line = raw.split("*")[0].replace(",", " ").replace("{", " ").replace("}", " ").strip()
        if line:
            body.append(line)
    m = int(body[0].split()[0])
    nblocks = int(body[1].split()[0])
    sizes = [int(s) for s in body[2].split()[:nblocks]]
    c = np.array([float(v) for v in body[3].split()[:m]])
    mats = [[{} for _ in sizes] for _ in range(m + 1)]
    for l in body[4:]:
        k, b, i, j, v = l.split()
        mats[int(k)][int(b) - 1][(int(i) - 1, int(j) - 1)] = float(v)
    return sizes, c, mats, layout


def dense(entries, n):
    M = np.zeros((n, n))
    for (i, j), v in entries.items():
        M[i, j] = M[j, i] = v
    return M


def face(sizes, c, mats, layout):
    """Basis V with G = V X V^T: every equality <M, G> = 0 with M psd and no
    other variables forces G M = 0."""
    n = sizes[0]
    V = np.eye(n)
    for k in range(1, len(c) + 1):
        if c[k - 1] != 0 or (len(sizes) > 1 and mats[k][1]):
            continue
        M = V.T @ dense(mats[k][0], n) @ V
        w, U = np.linalg.eigh(M)
        scale = max(abs(w).max(), 1.0)
        if w.min() < -1e-12 * scale:
            continue
        keep = w <= 1e-12 * scale
        V = V @ U[:, keep]
    return V


def solve(path):
    sizes, c, mats, layout = read(path)
    n = sizes[0]
    V = face(sizes, c, mats, layout)
    X = cp.Variable((V.shape[1], V.shape[1]), symmetric=True)
    cons = [X >> 0]
    if layout is None:
        p, s = 0, 0
        extra = cp.Variable(-sizes[1], nonneg=True) if len(sizes) > 1 else None
    else:
        p, s = layout["free"], layout["slack"]
        extra = None
    F = cp.Variable(p) if p else None

    def dot(k):
        terms = []
        is_ineq = False
        if mats[k][0]:
            M = V.T @ dense(mats[k][0], n) @ V
            if np.abs(M).max() > 1e-14:
                terms.append(cp.trace(M @ X))
        if len(sizes) > 1:
            for (i, _), v in mats[k][1].items():
                if extra is not None:
                    terms.append(v * extra[i])
                elif i < p:
                    terms.append(v * F[i])
                elif i >= 2 * p:
                    is_ineq = True
        return (sum(terms) if terms else None), is_ineq

    for k in range(1, len(c) + 1):
        lhs, ineq = dot(k)
        if lhs is None:
            if c[k - 1] != 0 and not ineq:
                return "infeasible", float("nan")
            continue
        cons.append(lhs <= c[k - 1] if ineq else lhs == c[k - 1])
    obj, _ = dot(0)
    prob = cp.Problem(cp.Maximize(obj), cons)
    prob.solve(solver=cp.CLARABEL)
    return prob.status, prob.value


if __name__ == "__main__":
    for path in sys.argv[1:]:
        status, value = solve(path)
        print(f"{path} {status} {value!r}")
