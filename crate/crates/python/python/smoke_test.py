"""Smoke test for the Python bindings. Run after `pip install -e crates/python`."""

import math

import porous_channel_py as pc


def main():
    p = pc.solve(0.8, 100.0, "II")
    assert p.label == "TypeII", p
    y1, y2 = p.turning_points()
    assert abs(y1 + 0.7454) < 1e-3 and abs(y2 - 0.5494) < 1e-3, (y1, y2)
    f, fp, _, _ = p.eval(-1.0)
    assert abs(f - 0.8) < 1e-12 and abs(fp) < 1e-12
    assert p.k_residual() < 1e-8 * max(1.0, abs(p.K))

    s = pc.shoot(0.8, 100.0, "II")
    assert p.max_f_distance(s) < 1e-5

    one = pc.solve(1.0, 30.0)
    assert all(abs(v - 1.0) < 1e-10 for v in one.f)

    branches = pc.discover_branches(0.8, 0.0, 40.0)
    fold = next(b.fold() for b in branches if b.fold() is not None)
    assert abs(fold[0] - 14.1) < 0.1, fold
    assert pc.solution_count(branches, 10.0) == 1
    assert pc.solution_count(branches, 30.0) == 3

    _, slope = pc.type_i(-0.8, 0.8, 0.01)
    assert abs(slope - 0.1781) < 5e-4
    a1, a2 = pc.type_ii_turning_points(0.8, 1.0 / 800.0)
    assert abs(a1 + 0.9363) < 2e-3 and abs(a2 - 0.8750) < 2e-3

    t3 = pc.solve(0.8, 400.0, "III")
    beta = pc.estimate_beta(t3)
    assert 0.0 < beta < 0.8
    layer = pc.Layer(0.04, 0.8, 400.0)
    layer.check_invariants()
    assert math.isclose(layer.eval(0.0), 0.76, abs_tol=1e-12)

    u, v = pc.velocity(p, 1.0, 0.0)
    assert math.isfinite(u) and math.isfinite(v)
    assert pc.divergence(p) < 1e-6

    try:
        pc.solve(1.5, 10.0)
    except ValueError:
        pass
    else:
        raise AssertionError("a > 1 accepted")

    print("python bindings ok:", p)


if __name__ == "__main__":
    main()
