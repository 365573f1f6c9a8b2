"""Derive the frozen corner fixture (src/interlock/data/fixture.json).

Searches for local joint positions that maximize the smallest margin over
the confinement, clearance, threading and tangle-crossing predicates on the
canonical frame (equilateral, side 1, eps = 0.01, legs 5), then writes the
parameters together with the golden hull combinatorics of B, C, D, x, y.

Usage: python tools/derive_fixture.py [--restarts N] [--seed S] [--out PATH]
"""

import argparse
import json
import sys

import numpy as np
from scipy.optimize import minimize

from interlock import _kernels as K
from interlock.construction import (
    _U1, _U2, canonical_frame, fixture_from_params, frame_points, tangle_local, two_chain_points,
)
from interlock.geom import convex_hull_small

KEYS = ["xy_dir", "C", "CB_dir", "CD_dir", "BA_dir", "xw_dir", "v", "aim_a", "aim_b",
        "z", "zH_dir", "F", "FG_dir"]
TEN = ("w", "x", "y", "z", "H", "G", "F", "D", "C", "B", "A")
EPS = 0.01
LEG = 5.0
CLEAR = 0.01  # clearance in eps units
W_DEPTH = 0.3  # required depth of w below the leg plane, eps units
VIRTUAL_GAP = 0.06  # required clearance of a pierce point from a non-link edge
VS_CAP = 0.1  # |v| along the corner bisector, eps units


def unpack(p):
    return {k: p[3 * i:3 * i + 3] for i, k in enumerate(KEYS)}


def pack(params):
    return np.concatenate([np.asarray(params[k], dtype=float) for k in KEYS])


def chain_clearances(P, eps):
    """Margins of all same-chain link pairs of an open chain given as a point list."""
    out = []
    n = len(P) - 1
    X = np.ascontiguousarray(P)
    for a in range(n):
        for b in range(a + 1, n):
            if b == a + 1:
                d = K.adjacent_overlap_dist(X, a, a + 1, a + 2)
            else:
                d = K.seg_seg_dist(X[a], X[a + 1], X[b], X[b + 1])
            out.append(d / eps - CLEAR)
    return out


def cross_clearances(P, Q, eps):
    return [K.seg_seg_dist(P[a], P[a + 1], Q[b], Q[b + 1]) / eps - CLEAR
            for a in range(len(P) - 1) for b in range(len(Q) - 1)]


def pierce(s0, s1, t0, t1, t2, eps):
    return K.seg_tri_pierce(s0, s1, t0, t1, t2, 1e-12)[1] / eps


def hull_general_position(pts):
    """Smallest point-to-plane height over all 4-subsets (keeps the hull combinatorics stable)."""
    best = np.inf
    for skip in range(len(pts)):
        quad = [q for i, q in enumerate(pts) if i != skip]
        for i in range(4):
            a, b, c = (quad[j] for j in range(4) if j != i)
            nrm = np.cross(b - a, c - a)
            best = min(best, abs(np.dot(quad[i] - a, nrm)) / np.linalg.norm(nrm))
    return best


def edge_gap(s0, s1, tri, edge, eps):
    """In-plane distance from the crossing point of s0s1 to edge (i, j) of tri, eps units."""
    a, b, c = tri
    n = np.cross(b - a, c - a)
    n /= np.linalg.norm(n)
    d0, d1 = np.dot(s0 - a, n), np.dot(s1 - a, n)
    if d0 == d1:
        return -1.0
    x = s0 + d0 / (d0 - d1) * (s1 - s0)
    u, w = tri[edge[0]], tri[edge[1]]
    o = tri[3 - edge[0] - edge[1]]
    en = np.cross(n, w - u)
    en /= np.linalg.norm(en)
    if np.dot(o - u, en) < 0:
        en = -en
    return np.dot(x - u, en) / eps


def side_gap(pnt, tri, eps):
    a, b, c = tri
    n = np.cross(b - a, c - a)
    return abs(np.dot(pnt - a, n / np.linalg.norm(n))) / eps


def margins(p, frame=None, names=False):
    frame = frame or canonical_frame(EPS)
    eps = frame.eps
    fx = fixture_from_params(unpack(p))
    pts = frame_points(frame, fx)
    pts.update(two_chain_points(pts, LEG))
    O, P1, P2 = frame.corner_centers
    m = {}
    for k in ("A", "B", "C", "D", "w", "x", "y", "v"):
        m[f"conf_{k}"] = 1 - np.linalg.norm(pts[k] - O) / eps
    for k in ("z", "H", "aim_a"):
        m[f"conf_{k}"] = 1 - np.linalg.norm(pts[k] - P1) / eps
    for k in ("F", "G", "aim_b"):
        m[f"conf_{k}"] = 1 - np.linalg.norm(pts[k] - P2) / eps
    ten = np.array([pts[k] for k in TEN])
    two = np.array([pts[k] for k in ("a", "v", "b")])
    for i, c in enumerate(chain_clearances(ten, eps)):
        m[f"ten_self_{i}"] = c
    for i, c in enumerate(chain_clearances(two, eps)):
        m[f"two_self_{i}"] = c
    for i, c in enumerate(cross_clearances(ten, two, eps)):
        m[f"inter_{i}"] = c
    g = pts.__getitem__
    m["pierces_DCF"] = pierce(g("v"), g("a"), g("D"), g("C"), g("F"), eps)
    m["straddles_yw"] = pierce(g("y"), g("w"), g("a"), g("v"), g("b"), eps)
    m["straddles_BC"] = pierce(g("B"), g("C"), g("a"), g("v"), g("b"), eps)
    m["straddles_AB"] = pierce(g("A"), g("B"), g("a"), g("v"), g("b"), eps)
    m["jag_z"] = pierce(g("v"), g("a"), g("y"), g("z"), g("H"), eps)
    m["jag_F"] = pierce(g("v"), g("b"), g("D"), g("F"), g("G"), eps)
    m["v_outside_T"] = K.tet_signed_dist(g("v"), g("B"), g("C"), g("D"), g("F")) / eps
    # B lies beyond vb (outside the wedge), so BC and AB cross over vb before piercing
    nrm = np.cross(g("a") - g("v"), g("b") - g("v"))
    nrm /= np.linalg.norm(nrm)
    ub = (g("b") - g("v")) / np.linalg.norm(g("b") - g("v"))
    out_b = np.cross(ub, nrm)
    if np.dot(out_b, g("a") - g("v")) > 0:
        out_b = -out_b
    m["B_beyond_vb"] = np.dot(g("B") - g("v"), out_b) / eps
    # the free end w sits deep on the far side of the leg plane from y
    side = np.sign(np.dot(g("y") - g("v"), nrm))
    m["w_depth"] = -side * np.dot(g("w") - g("v"), nrm) / eps - W_DEPTH
    # pierce points must stay well away from edges that are not links
    legs = (g("a"), g("v"), g("b"))
    m["yw_off_va"] = edge_gap(g("y"), g("w"), legs, (0, 1), eps) - VIRTUAL_GAP
    m["yw_off_vb"] = edge_gap(g("y"), g("w"), legs, (1, 2), eps) - VIRTUAL_GAP
    m["y_side"] = side_gap(g("y"), legs, eps) - VIRTUAL_GAP
    dcf = (g("D"), g("C"), g("F"))
    m["DCF_off_CF"] = edge_gap(g("v"), g("a"), dcf, (1, 2), eps) - VIRTUAL_GAP
    m["DCF_v_side"] = side_gap(g("v"), dcf, eps) - VIRTUAL_GAP
    m["jag_z_off_yH"] = edge_gap(g("v"), g("a"), (g("y"), g("z"), g("H")), (0, 2), eps) - VIRTUAL_GAP
    m["jag_F_off_DG"] = edge_gap(g("v"), g("b"), (g("D"), g("F"), g("G")), (0, 2), eps) - VIRTUAL_GAP
    m["v_bisector"] = 2.0 * (VS_CAP - abs(fx["v"][0]))
    # bare tangle (short arms) in eps units
    loc = tangle_local(fx)
    loc["z"] = loc["y"] + 0.5 * _U1
    loc["E"] = loc["D"] + 0.5 * _U2
    three = np.array([loc[k] for k in ("w", "x", "y", "z")])
    four = np.array([loc[k] for k in ("A", "B", "C", "D", "E")])
    for k in ("z", "E"):
        m[f"tconf_{k}"] = 1 - np.linalg.norm(loc[k])
    for i, c in enumerate(chain_clearances(three, 1.0) + chain_clearances(four, 1.0)
                          + cross_clearances(three, four, 1.0)):
        m[f"tangle_clear_{i}"] = c
    L = loc.__getitem__
    m["xy_BCD"] = pierce(L("x"), L("y"), L("B"), L("C"), L("D"), 1.0)
    bcd = (L("B"), L("C"), L("D"))
    m["xy_BCD_off_BD"] = edge_gap(L("x"), L("y"), bcd, (0, 2), 1.0) - VIRTUAL_GAP
    m["xy_BCD_x_side"] = side_gap(L("x"), bcd, 1.0) - VIRTUAL_GAP
    m["xy_BCD_y_side"] = side_gap(L("y"), bcd, 1.0) - VIRTUAL_GAP
    m["hull_general"] = hull_general_position([L(k) for k in ("B", "C", "D", "x", "y")])
    m["V_through_three"] = max(
        pierce(L(s0), L(s1), L(t0), L(t1), L(t2), 1.0)
        for s0, s1 in (("B", "C"), ("C", "D"))
        for t0, t1, t2 in (("w", "x", "y"), ("x", "y", "z"))
    )
    if names:
        return m
    return np.array(list(m.values()))


def soft_objective(p, target):
    mm = margins(p)
    short = np.clip(target - mm, 0, None)
    reg = sum((np.linalg.norm(v) - 1) ** 2 for k, v in unpack(p).items() if k.endswith("_dir"))
    return float(np.sum(short ** 2) + 0.1 * reg)


def random_start(rng):
    params = {}
    for k in KEYS:
        if k.endswith("_dir"):
            params[k] = rng.normal(size=3)
        else:
            params[k] = rng.uniform(-0.3, 0.3, size=3)
    return pack(params)


def refine(p, iters=200):
    n = len(p)

    def neg_t(q):
        return -q[-1]

    cons = {"type": "ineq", "fun": lambda q: margins(q[:n]) - q[-1]}
    q0 = np.append(p, min(margins(p)))
    res = minimize(neg_t, q0, constraints=[cons], method="SLSQP",
                   options={"maxiter": iters, "ftol": 1e-10})
    return res.x[:n], res.x[-1]


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--restarts", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="src/interlock/data/fixture.json")
    ap.add_argument("--start", help="existing fixture json to refine instead of random starts")
    ap.add_argument("--refine-only", action="store_true", help="skip the soft stage for --start")
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    best = None
    starts = []
    if args.start:
        with open(args.start) as fh:
            starts.append(pack(json.load(fh)["params"]))
    else:
        starts = [random_start(rng) for _ in range(args.restarts)]
    if args.refine_only and args.start:
        starts_soft = []
        best = (starts[0], float(np.min(margins(starts[0]))))
    else:
        starts_soft = starts
    for i, p0 in enumerate(starts_soft):
        res = minimize(soft_objective, p0, args=(0.1,), method="L-BFGS-B",
                       options={"maxiter": 3000})
        worst = float(np.min(margins(res.x)))
        print(f"start {i}: soft worst margin {worst:.4f}", file=sys.stderr)
        if best is None or worst > best[1]:
            best = (res.x, worst)
    p, _ = best
    if best[1] > -0.05:
        p, t = refine(p, iters=600)
        print(f"refined worst margin {t:.4f}", file=sys.stderr)
    named = margins(p, names=True)
    worst = sorted(named.items(), key=lambda kv: kv[1])[:8]
    for k, v in worst:
        print(f"  {k}: {v:.4f}", file=sys.stderr)
    params = {k: [float(x) for x in v] for k, v in unpack(p).items()}
    for k in params:
        if k.endswith("_dir"):
            params[k] = [float(x) for x in np.asarray(params[k]) / np.linalg.norm(params[k])]
    fx = fixture_from_params(params)
    loc = tangle_local(fx)
    hull = convex_hull_small({k: loc[k] for k in ("B", "C", "D", "x", "y")})
    out = {"version": 1, "units": "eps", "params": params, "golden_hull": hull.to_dict(),
           "worst_margin": float(min(named.values()))}
    with open(args.out, "w") as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")


if __name__ == "__main__":
    main()
