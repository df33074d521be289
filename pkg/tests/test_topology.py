import itertools
import math
import random

import pytest

from grushko.topology import (
    ChainComplex,
    Poset,
    SimplicialComplex,
    betti,
    components,
    homology_report_json,
    integral_homology,
    join_poset,
    matrix_rank,
    matrix_snf,
    verify_wedge,
)

TRIANGLE = SimplicialComplex.from_maximal([(0, 1), (1, 2), (0, 2)])
DISK = SimplicialComplex.from_maximal([(0, 1, 2)])
RP2 = SimplicialComplex.from_maximal([
    (1, 2, 3), (1, 2, 4), (1, 3, 5), (1, 4, 6), (1, 5, 6),
    (2, 3, 6), (2, 4, 5), (2, 5, 6), (3, 4, 5), (3, 4, 6)])


def test_face_closure_enforced():
    with pytest.raises(ValueError):
        SimplicialComplex(frozenset([(0, 1, 2)]))


def test_boundary_squared_zero():
    for cx in (TRIANGLE, DISK, RP2, join_poset([2, 2]).order_complex()):
        assert ChainComplex(cx).boundary_squared_is_zero()


def test_triangle_circle():
    assert betti(TRIANGLE, "Q") == {0: 0, 1: 1}
    assert integral_homology(TRIANGLE) == {0: (0, ()), 1: (1, ())}


def test_disk_contractible():
    assert betti(DISK, "Q") == {0: 0, 1: 0, 2: 0}
    assert all(r == 0 and not t for r, t in integral_homology(DISK).values())


def test_projective_plane_torsion():
    assert RP2.euler_characteristic() == 1
    assert integral_homology(RP2) == {0: (0, ()), 1: (0, (2,)), 2: (0, ())}
    assert betti(RP2, "Q") == {0: 0, 1: 0, 2: 0}
    assert betti(RP2, 2) == {0: 0, 1: 1, 2: 1}
    assert betti(RP2, 3) == {0: 0, 1: 0, 2: 0}


def test_betti_rejects_composite_characteristic():
    with pytest.raises(ValueError):
        betti(TRIANGLE, 4)


def test_components():
    assert len(components(TRIANGLE)) == 1
    pieces = SimplicialComplex.from_maximal([(0, 1), (1, 2), (0, 2), (5, 6), (7,)])
    assert len(components(pieces)) == 3
    isolated = SimplicialComplex.from_maximal([(0,), (1,), (2,)])
    assert len(components(isolated)) == 3


def test_order_complex_shapes():
    chain = Poset.from_covers("abc", [("a", "b"), ("b", "c")])
    cx = chain.order_complex()
    assert cx.dimension == 2 and cx.f_vector() == [3, 3, 1]
    anti = Poset.from_leq(range(4), lambda a, b: False)
    assert betti(anti.order_complex(), "Q") == {0: 3}
    square = join_poset([2, 2]).order_complex()
    assert square.f_vector() == [8, 8]
    assert betti(square, "Q") == {0: 0, 1: 1}


def test_poset_height_and_covers_cycle():
    p = Poset.from_covers(range(4), [(0, 1), (1, 2), (2, 3)])
    assert p.height() == 4
    with pytest.raises(ValueError):
        Poset.from_covers(range(2), [(0, 1), (1, 0)])


def test_join_poset_sizes():
    p = join_poset([2, 3])
    assert len(p) == (2 + 1) * (3 + 1) - 1
    with pytest.raises(ValueError):
        join_poset([0, 2])
    with pytest.raises(ValueError):
        join_poset([101, 101])


def test_verify_wedge_examples():
    assert verify_wedge((1, 3)).ok
    rep = verify_wedge((2, 2))
    assert rep.ok and rep.expected_degree == 1 and rep.expected_rank == 1
    rep = verify_wedge((3, 2, 2))
    assert rep.ok and rep.expected_degree == 2 and rep.expected_rank == 2


def test_euler_characteristic_matches_betti():
    for cx in (TRIANGLE, DISK, RP2, join_poset([3, 2]).order_complex()):
        bq = betti(cx, "Q")
        assert cx.euler_characteristic() - 1 == sum((-1) ** k * b for k, b in bq.items())


def test_field_independence_on_wedges():
    for sizes in [(2, 2), (3, 3), (2, 3, 2)]:
        cx = join_poset(list(sizes)).order_complex()
        assert betti(cx, "Q") == betti(cx, 2) == betti(cx, 3)


def _naive_snf_by_minors(cols, size):
    """Determinantal-divisor oracle: d_k = gcd of all k x k minors."""
    rows = sorted({r for col in cols for r in col})
    mat = [[col.get(r, 0) for col in cols] for r in rows]
    m, n = len(mat), len(cols)
    divisors = []
    prev = 1
    for k in range(1, min(m, n) + 1):
        g = 0
        for ri in itertools.combinations(range(m), k):
            for ci in itertools.combinations(range(n), k):
                sub = [[mat[i][j] for j in ci] for i in ri]
                g = math.gcd(g, round(_det(sub)))
        if g == 0:
            break
        divisors.append(g // prev)
        prev = g
    return divisors


def _det(mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        total += (-1) ** j * mat[0][j] * _det(minor)
    return total


def test_snf_against_minor_oracle():
    rng = random.Random(41)
    for _ in range(40):
        m, n = rng.randrange(1, 5), rng.randrange(1, 5)
        cols = {}
        for c in range(n):
            col = {r: rng.randrange(-4, 5) for r in range(m) if rng.random() < 0.7}
            col = {r: v for r, v in col.items() if v}
            if col:
                cols[c] = col
        got = sorted(matrix_snf(cols))
        want = sorted(_naive_snf_by_minors(list(cols.values()), (m, n)))
        assert got == want, (cols, got, want)
        # rank over Q agrees with the number of invariant factors
        assert matrix_rank(cols, "Q") == len(got)
        assert matrix_rank(cols, 5) <= len(got)


def test_snf_divisibility_chain():
    rng = random.Random(42)
    for _ in range(30):
        cols = {}
        for c in range(rng.randrange(1, 6)):
            col = {r: rng.randrange(-6, 7) for r in range(rng.randrange(1, 6))}
            col = {r: v for r, v in col.items() if v}
            if col:
                cols[c] = col
        factors = matrix_snf(cols)
        for a, b in zip(factors, factors[1:]):
            assert b % a == 0


def test_integral_free_ranks_match_rational_betti():
    for cx in (TRIANGLE, DISK, RP2, join_poset([2, 2, 2]).order_complex()):
        bq = betti(cx, "Q")
        hom = integral_homology(cx)
        assert {k: r for k, (r, _) in hom.items()} == bq


def test_complex_json_roundtrip():
    for cx in (TRIANGLE, RP2):
        assert SimplicialComplex.from_json(cx.to_json()) == cx
    report = homology_report_json(RP2)
    assert '"torsion": [2]' in report


def test_empty_and_point():
    assert betti(SimplicialComplex(frozenset()), "Q") == {}
    point = SimplicialComplex.from_maximal([(0,)])
    assert betti(point, "Q") == {0: 0}
    assert integral_homology(point) == {0: (0, ())}
