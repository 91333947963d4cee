#!/usr/bin/env python3
"""Builds the canonical offlinemania-1 track file.

The circuit is a sequence of straights and constant-radius arcs. Turn angles
and radii are fixed; straight lengths are solved so the loop closes and the
centerline has the requested total length. The result is resampled into a
dense polyline starting at the middle of the start straight.
"""
import argparse
import json
import re
import math

import numpy as np
from scipy.optimize import minimize

# (turn angle in degrees, radius in meters); positive = left (counter-clockwise)
TURNS = [
    (180.0, 9.0),   # hairpin, the first corner after the start area
    (-90.0, 12.0),
    (90.0, 10.0),
    (90.0, 11.0),
    (90.0, 13.0),
    (-60.0, 14.0),
    (60.0, 14.0),
]
# preferred straight lengths; straight i precedes turn i, the last closes the loop
PREFERRED = [28.0, 12.0, 10.0, 8.0, 20.0, 6.0, 4.0, 22.0]
MIN_STRAIGHT = [18.0, 6.0, 4.0, 4.0, 6.0, 2.0, 2.0, 10.0]


def trace(straights, step=0.5):
    pts = []
    x, y, h = 0.0, 0.0, 0.0
    for i, length in enumerate(straights):
        n = max(1, int(math.ceil(length / step)))
        for k in range(n):
            pts.append((x + math.cos(h) * length * k / n, y + math.sin(h) * length * k / n))
        x += math.cos(h) * length
        y += math.sin(h) * length
        if i < len(TURNS):
            ang, r = TURNS[i]
            a = math.radians(ang)
            sgn = 1.0 if a > 0 else -1.0
            cx, cy = x - sgn * r * math.sin(h), y + sgn * r * math.cos(h)
            n = max(2, int(math.ceil(abs(a) * r / step)))
            for k in range(n):
                hh = h + a * k / n
                pts.append((cx + sgn * r * math.sin(hh), cy - sgn * r * math.cos(hh)))
            h += a
            x, y = cx + sgn * r * math.sin(h), cy - sgn * r * math.cos(h)
    return pts, (x, y)


def closure_and_length(straights):
    _, end = trace(straights)
    arcs = sum(abs(math.radians(a)) * r for a, r in TURNS)
    return end, arcs + sum(straights)


def solve(total):
    def objective(v):
        return float(np.sum((np.asarray(v) - PREFERRED) ** 2))

    cons = [
        {"type": "eq", "fun": lambda v: closure_and_length(v)[0][0]},
        {"type": "eq", "fun": lambda v: closure_and_length(v)[0][1]},
        {"type": "eq", "fun": lambda v: closure_and_length(v)[1] - total},
    ]
    bounds = list(zip(MIN_STRAIGHT, [None] * len(MIN_STRAIGHT)))
    res = minimize(objective, PREFERRED, bounds=bounds, constraints=cons, method="SLSQP")
    if not res.success:
        raise SystemExit(f"closure solve failed: {res.message}")
    return list(res.x)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--length", type=float, default=236.0)
    ap.add_argument("--out", default="assets/offlinemania-1.json")
    ap.add_argument("--plot")
    args = ap.parse_args()

    straights = solve(args.length)
    pts, end = trace(straights)
    assert math.hypot(*end) < 1e-6, end
    # start the loop in the middle of the start straight (the final straight
    # runs into the first one, so shift by half of the first straight)
    pts = np.asarray(pts)
    first_half = straights[0] / 2.0
    seg = np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])[:-1]
    shift = int(np.argmin(np.abs(cum - first_half)))
    pts = np.roll(pts, -shift, axis=0)
    pts -= pts[0]
    pts = np.round(pts, 6)

    doc = {
        "version": "1",
        "name": "offlinemania-1",
        "half_width": 6.0,
        "centerline": [[float(x), float(y)] for x, y in pts],
        "start_area": {
            "center": [0.0, 0.0],
            "size_m": 8.0,
            "heading_offset_deg_range": [-30.0, 30.0],
        },
    }
    text = json.dumps(doc, indent=2)
    # one centerline point per line
    text = re.sub(r"\[\s+(-?[0-9.e+-]+),\s+(-?[0-9.e+-]+)\s+\]", r"[\1, \2]", text)
    with open(args.out, "w") as f:
        f.write(text + "\n")
    perim = float(np.sum(np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=1)))
    print(f"straights={[round(float(s), 2) for s in straights]} vertices={len(pts)} L={perim:.3f}")

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        fig, ax = plt.subplots(figsize=(8, 8))
        ax.plot(pts[:, 0], pts[:, 1], "k-")
        ax.plot(pts[0, 0], pts[0, 1], "ro")
        ax.set_aspect("equal")
        fig.savefig(args.plot)


if __name__ == "__main__":
    main()
