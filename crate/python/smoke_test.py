"""Smoke test for the compiled extension.

Build and install first, e.g. `maturin develop` (or `maturin build` plus
`pip install`) in crates/python, then run `python python/smoke_test.py`
from the repository root.
"""

import json
import math
import random

import boundary_recon as br


def circle(k, r=1.0):
    return [(r * math.cos(2 * math.pi * j / k), r * math.sin(2 * math.pi * j / k)) for j in range(k)]


def main():
    pts = circle(32)
    shuffled = pts[:]
    random.Random(3).shuffle(shuffled)

    ordered = br.order_points(shuffled)
    walk = [pts.index(shuffled[i]) for i in ordered.sigma]
    step = (walk[1] - walk[0]) % 32
    assert step in (1, 31) and all((b - a) % 32 == step for a, b in zip(walk, walk[1:])), walk
    assert json.loads(ordered.density_report())["condition3_violations"] == []

    dom = br.ReconstructedDomain(shuffled)
    assert dom.contains(0.0, 0.0) and not dom.contains(1.5, 0.0)
    assert abs(dom.distance(2.0, 0.0) - 1.0) < 1e-4
    spline = dom.spline
    assert abs(spline.total_length() - 2 * math.pi) < 1e-3
    assert set(json.loads(spline.to_json())) == {"knots", "coeffs_x", "coeffs_y"}

    nodes, kinds = br.discretize(dom, 0.15)
    assert len(nodes) == len(kinds) and {"outer", "interior"} == set(kinds)

    report = br.poisson_disk(0.1)
    assert report["max_error"] < 1e-4, report

    vx, vy = br.boundary_velocity(0.1, 0.0, 1.0, 0.0, 0.04)
    assert abs(math.hypot(vx, vy) - 0.042) < 1e-12

    sim = br.Simulation(json.dumps({"R_d": 0.25, "N_t": 2, "spacing": {"h_min": 0.05, "h_max": 0.15}}))
    area = sim.dendrite_area()
    record = json.loads(sim.step())
    assert record["step"] == 1 and sim.dendrite_area() > area

    try:
        br.order_points([(0.0, 0.0), (1.0, 0.0)])
    except br.BoundaryReconError as e:
        assert "TooFewPoints" in str(e)
    else:
        raise AssertionError("expected BoundaryReconError")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
