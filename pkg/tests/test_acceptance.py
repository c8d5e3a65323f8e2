"""Acceptance suite: one test per criterion, summarized at the end of the run."""
from __future__ import annotations

import math
import random
import time
from fractions import Fraction

import mpmath

from conftest import FIXTURES, fixture_text
from oracles import brute_force, naive_generate, random_instances, random_specs
from icotomo import formats as fmt
from icotomo.cli import main
from icotomo.geometry import (
    FIVEFOLD_AXIS, FIVEFOLD_AXIS_STAR, ModulePoint, Point3, Direction, embed, fivefold_directions, membership,
)
from icotomo.modelset import central_slice, check_generic_bounded, example_spec, generate
from icotomo.plot import PlotSpec, plot
from icotomo.qtau import HALF, ONE, TAU, QTau, galois, sign
from icotomo.reconstruction import (
    Infeasible, ReconstructionInstance, Solution, enumerate_all, solve_fixed, solve_search_2d, verify_solution,
)
from icotomo.tomography import grid, xray
from icotomo.uniqueness import (
    Counterexample, Determined, check_determination, find_u_polygon, is_convex_subset, witness_pair,
)
from icotomo.window import Location, classify, example_shift, window_edges, window_icosahedron


def _random_qtau(rng: random.Random) -> QTau:
    bound = 10**6
    if rng.random() < 0.3:
        # close to zero: p + q tau with p ~ -q tau
        q = rng.randint(-bound, bound)
        return QTau(-round(q * 1.618033988749895) + rng.randint(-2, 2), q)
    return QTau(
        Fraction(rng.randint(-bound, bound), rng.randint(1, 1000)),
        Fraction(rng.randint(-bound, bound), rng.randint(1, 1000)),
    )


def test_c01_arithmetic():
    start = time.perf_counter()
    rng = random.Random(2024)
    xs = [_random_qtau(rng) for _ in range(1200)]
    mpmath.mp.prec = 250
    tau = (1 + mpmath.sqrt(5)) / 2
    for i, x in enumerate(xs):
        y, z = xs[i - 1], xs[i - 2]
        assert (x + y) + z == x + (y + z) and (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        if not x.is_zero:
            assert x * x.inverse() == ONE
        assert galois(x * y) == galois(x) * galois(y) and galois(x + y) == galois(x) + galois(y)
        ref = mpmath.mpf(x.a.numerator) / x.a.denominator + mpmath.mpf(x.b.numerator) / x.b.denominator * tau
        assert sign(x) == (ref > 0) - (ref < 0)
    assert time.perf_counter() - start < 5


def test_c02_module_and_star():
    rng = random.Random(7)
    for _ in range(1000):
        m = ModulePoint(*(rng.randint(-10**4, 10**4) for _ in range(6)))
        p = embed(m)
        assert membership(p) == m
        assert p.star().star() == p
    b2 = Point3((TAU + 1) * HALF, TAU * HALF, HALF)
    assert b2.star() == Point3((2 - TAU) * HALF, (1 - TAU) * HALF, HALF)


def test_c03_window():
    w = window_icosahedron()
    edges = window_edges(w)
    assert len(w.vertices) == 12 and len(edges) == 30 and len(w.faces) == 20
    assert {(a - b).norm2() for a, b in edges} == {4 * (TAU - 1) ** 2}
    assert len(w.vertices) - len(edges) + len(w.faces) == 2
    assert all(classify(w, v) is Location.BOUNDARY for v in w.vertices)


def test_c04_generation_oracle():
    start = time.perf_counter()
    for spec in random_specs(3, seed=99):
        pts = generate(spec).points
        assert pts and pts == naive_generate(spec)
    assert time.perf_counter() - start < 30


def test_c05_genericity():
    rep = check_generic_bounded(example_spec(3))
    assert rep.checked > 0 and rep.boundary_hits == []


def test_c06_xray_grid(central3):
    rng = random.Random(6)
    pts = central3.physical()
    d = fivefold_directions()
    for _ in range(50):
        sub = rng.sample(pts, rng.randint(1, len(pts)))
        u, v = rng.sample(d, 2)
        assert set(sub) <= set(grid([xray(sub, u), xray(sub, v)]).points)
    for _ in range(50):
        sub = rng.sample(pts, 2)
        assert set(grid([xray(sub, u) for u in rng.sample(d, 3)]).points) == set(sub)
    stars = [p.star() for p in pts]
    for u in d:
        x, xs = xray(pts, u), xray(stars, u.star())
        assert x.count_multiset() == xs.count_multiset()
        assert all(xs[line.star()] == c for line, c in x.counts.items())


def _second_direction() -> Direction:
    """Edge of the pentagon of icosahedron neighbours around the vertex (tau, 0, 1)."""
    a, b = Point3(1, -TAU, 0), Point3(0, -1, TAU)
    for v in (a, b):
        assert (v - FIVEFOLD_AXIS).norm2() == QTau(4)
    assert (a - b).norm2() == QTau(4)
    return Direction(a - b)


def test_c07_round_trip():
    start = time.perf_counter()
    u1 = Direction(Point3(0, 1, 0))
    u2 = _second_direction()
    assert u2.is_fivefold_orthogonal and not u2.parallel(u1)
    # in-plane angle 72 degrees: slope tan(2 pi / 5) in the frame (e1, axis x e1)
    v = u2.representative.to_float()
    n = FIVEFOLD_AXIS.to_float()
    e2 = (-n[2], 0.0, n[0])
    x = v[1]
    y = sum(a * b for a, b in zip(v, e2)) / math.hypot(*e2)
    assert abs(abs(y / x) - math.tan(2 * math.pi / 5)) < 1e-9
    s = example_shift()
    patch = generate(example_spec(3))
    pts = central_slice(patch).physical()
    inst = ReconstructionInstance(xray(pts, u1), xray(pts, u2), window_icosahedron(), s)
    res = solve_fixed(inst)
    assert isinstance(res, Solution)
    assert xray(res.points, u1) == inst.first and xray(res.points, u2) == inst.second
    w = window_icosahedron(s)
    assert all(classify(w, p.star()) is Location.INTERIOR for p in res.points)
    assert verify_solution(inst, res.points) == []
    assert main(["demo", "--no-search"]) == 0
    assert time.perf_counter() - start < 10


def test_c08_flow_oracle(central3):
    for inst in random_instances(central3.physical(), 100, seed=31):
        want = brute_force(inst)
        assert solve_fixed(inst).feasible == bool(want)
        en = enumerate_all(inst, limit=10_000)
        assert not en.truncated and len(en) == len(want)
        assert {frozenset(s.points) for s in en.solutions} == set(want)


def test_c09_translate_search(central3):
    pts = central3.physical()
    d = fivefold_directions()
    inst = ReconstructionInstance(xray(pts, d[0]), xray(pts, d[1]), window_icosahedron())
    start = time.perf_counter()
    res = solve_search_2d(inst, example_shift().dot(FIVEFOLD_AXIS_STAR))
    assert time.perf_counter() - start < 60
    assert not isinstance(res, Infeasible)
    assert verify_solution(inst, res.solution.points, res.translate) == []


def test_c10_non_uniqueness(central3, dirs3):
    amb = central3.physical()
    P = find_u_polygon(amb, dirs3, 10)
    assert P is not None
    c1, c2 = witness_pair(P, amb)
    assert set(c1) != set(c2)
    assert is_convex_subset(c1, amb) and is_convex_subset(c2, amb)
    assert all(xray(c1, u) == xray(c2, u) for u in dirs3)
    res = check_determination(amb, dirs3, max(len(c1), len(c2)))
    assert isinstance(res, Counterexample)
    assert all(xray(res.first, u) == xray(res.second, u) for u in dirs3)


def test_c11_four_directions(central3, dirs4):
    amb = central3.physical()
    assert find_u_polygon(amb, dirs4, 10) is None
    res = check_determination(amb, dirs4, 10)
    assert isinstance(res, Determined) and res.size_bound == 10


def test_c12_round_trips(central3):
    names = sorted(p.name for p in FIXTURES.iterdir() if p.is_file())
    assert names
    for name in names:
        text = fixture_text(name)
        if name.endswith(".win"):
            assert fmt.serialize_window(fmt.parse_window(text)) == text
        elif name.startswith("dirs"):
            assert fmt.serialize_directions(fmt.parse_directions(text)) == text
        elif text.startswith("slice"):
            assert fmt.serialize_slice(fmt.parse_slice(text)) == text
        else:
            assert fmt.serialize_points(fmt.parse_points(text)) == text
    spec = PlotSpec("slice-star-with-window", slice=central3, window=window_icosahedron(example_shift()))
    assert plot(spec) == plot(spec)
