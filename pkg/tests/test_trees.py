import itertools
import math
import random

import pytest

from grushko.words import conjugate, identity, parse, random_reduced_word
from grushko.trees import (
    BudgetExceededError,
    CollapseError,
    MarkedTree,
    TreeShape,
    adapted_order,
    bs_path,
    bs_vertex,
    caterpillar,
    collapse,
    convex_hull_vertices,
    enumerate_shapes,
    fixed_point,
    path_shape,
    shape_poset,
    standard_marking,
)
from grushko.visibility import hull_order_is_adapted

W = parse


def test_caterpillar_markings():
    t = caterpillar(3)
    assert [t.shape.slot_of[v] for v in range(3)] == [1, 2, 3]
    t2 = caterpillar(4, (1, 3, 2, 4))
    assert [t2.shape.slot_of[v] for v in range(4)] == [1, 3, 2, 4]
    with pytest.raises(ValueError):
        caterpillar(3, (1, 1, 2))


def test_marking_must_align_cores():
    shape = path_shape((1, 2))
    with pytest.raises(ValueError):
        MarkedTree(shape, (W("x2", 2), W("x1", 2)))
    ok = MarkedTree(shape, (W("x2.x1.x2", 2), W("x2", 2)))
    assert not ok.standard


def test_fixed_points():
    t = caterpillar(3)
    p = fixed_point(t, W("x1", 3))
    assert p.word == identity(3) and t.shape.slot_of[p.vertex] == 1
    q = fixed_point(t, W("x1.x2.x1", 3))
    assert q.word == W("x1", 3) and t.shape.slot_of[q.vertex] == 2
    # coset canonicalization: w and w*b name the same vertex
    v2 = t.vertex_of_slot(2)
    assert bs_vertex(t, W("x1.x2", 3), v2) == bs_vertex(t, W("x1", 3), v2)


def test_bs_path_examples():
    t = caterpillar(3)
    v1 = fixed_point(t, W("x1", 3))
    v2 = fixed_point(t, W("x2", 3))
    assert [e for e, _ in bs_path(t, v1, v2)] == [0]
    # one fundamental edge, translated by x1
    moved = bs_vertex(t, W("x1", 3), t.vertex_of_slot(2))
    assert bs_path(t, v1, moved) == [(0, W("x1", 3))]
    target = bs_vertex(t, W("x3", 3), t.vertex_of_slot(2))
    path = bs_path(t, v1, target)
    assert [e for e, _ in path] == [0, 1, 1]
    back = bs_path(t, target, v1)
    assert [e for e, _ in back] == [1, 1, 0]
    assert bs_path(t, v1, v1) == []


def test_bs_path_metric_on_samples():
    rng = random.Random(21)
    t = caterpillar(4)
    verts = []
    for _ in range(6):
        w = random_reduced_word(rng, 4, rng.randrange(0, 4))
        verts.append(bs_vertex(t, w, rng.randrange(4)))
    for p, q, r in itertools.permutations(verts, 3):
        dpq = len(bs_path(t, p, q))
        dqr = len(bs_path(t, q, r))
        dpr = len(bs_path(t, p, r))
        assert dpr <= dpq + dqr


def test_bs_path_budget():
    t = caterpillar(3)
    v1 = fixed_point(t, W("x1", 3))
    far = bs_vertex(t, random_reduced_word(random.Random(3), 3, 8), 2)
    with pytest.raises(BudgetExceededError):
        bs_path(t, v1, far, vertex_cap=10)


def test_collapse():
    star = TreeShape(3, (0, 1, 2, 3), ((0, 1), (0, 2), (0, 3)))
    smaller = collapse(star, [0])
    assert smaller.num_vertices == 3
    assert sorted(smaller.slot_of) == [1, 2, 3]
    assert collapse(star, []) == star
    with pytest.raises(CollapseError):
        collapse(path_shape((1, 2)), [0])
    with pytest.raises(CollapseError):
        collapse(path_shape((1, 2, 3)), [0, 1])


def _count_shapes_by_formula(n: int) -> int:
    """Independent count via degree-constrained labeled-tree enumeration.

    Labeled trees on n marked + t trivial vertices where each trivial vertex
    has degree >= 3, counted by summing multinomial coefficients over the
    trivial degrees, then divided by t! (no labeled shape has an automorphism
    moving trivial vertices, so orbits have full size).
    """
    total = 0
    for t in range(0, max(n - 1, 1)):
        V = n + t
        if V == 2 and t == 0:
            total += 1 if n == 2 else 0
            continue
        slots = V - 2
        count = 0
        for cs in itertools.product(range(2, slots + 1), repeat=t):
            used = sum(cs)
            if used > slots:
                continue
            ways = math.factorial(slots)
            for c in cs:
                ways //= math.factorial(c)
            ways //= math.factorial(slots - used)
            count += ways * n ** (slots - used)
        if t == 0:
            count = n ** slots if V > 2 else count
        total += count // math.factorial(t)
    return total


def test_enumerate_shapes_counts():
    for n, expected in [(2, 1), (3, 4), (4, 32), (5, 396)]:
        got = enumerate_shapes(n)
        assert len(got) == expected
        assert len(got) == _count_shapes_by_formula(n)
        assert len({s.canonical_key() for s in got}) == expected
    assert len(enumerate_shapes(3, up_to_relabeling=True)) == 2
    assert len(enumerate_shapes(4, up_to_relabeling=True)) == 5


def test_canonical_key_relabeling_invariant():
    rng = random.Random(23)
    for shape in enumerate_shapes(4)[::3]:
        V = shape.num_vertices
        perm = list(range(V))
        rng.shuffle(perm)
        slot_of = [0] * V
        for v in range(V):
            slot_of[perm[v]] = shape.slot_of[v]
        edges = tuple(tuple(sorted((perm[u], perm[v]))) for u, v in shape.edges)
        moved = TreeShape(4, tuple(slot_of), edges)
        assert moved.canonical_key() == shape.canonical_key()


def test_shapes_are_reduced():
    for s in enumerate_shapes(4):
        deg = [0] * s.num_vertices
        for u, v in s.edges:
            deg[u] += 1
            deg[v] += 1
        for v in range(s.num_vertices):
            if s.slot_of[v] == 0:
                assert deg[v] >= 3
            if deg[v] == 1:
                assert s.slot_of[v] > 0


def test_shape_poset_chains():
    for n, chain in [(2, 1), (3, 2), (4, 3)]:
        sp = shape_poset(n)
        assert sp.longest_chain() == chain


def test_poset_relation_is_transitive_by_construction():
    sp = shape_poset(4)
    for i in range(len(sp.shapes)):
        for j in sp.below[i]:
            assert sp.below[j] <= sp.below[i]


def test_adapted_order():
    assert adapted_order(caterpillar(3)) == (1, 2, 3)
    star = TreeShape(3, (0, 1, 2, 3), ((0, 1), (0, 2), (0, 3)))
    assert adapted_order(MarkedTree(star, standard_marking(3))) == (1, 2, 3)
    rng = random.Random(22)
    for shape in enumerate_shapes(5)[::40]:
        tree = MarkedTree(shape, standard_marking(5))
        order = adapted_order(tree)
        assert hull_order_is_adapted(tree, order)


def test_convex_hull():
    t = caterpillar(4)
    hull = convex_hull_vertices(t.shape, [0, 2])
    assert hull == {0, 1, 2}


def test_tree_json_roundtrip():
    t = caterpillar(4, (1, 3, 2, 4))
    assert MarkedTree.from_json(t.to_json()) == t
    mk = (W("x1", 3), conjugate(W("x2", 3), W("x3.x1", 3)), W("x3", 3))
    t2 = MarkedTree(path_shape((1, 3, 2)), mk)
    assert MarkedTree.from_json(t2.to_json()) == t2


def test_shape_dot():
    dot = caterpillar(3).shape.to_dot()
    assert "x1" in dot and "e1" in dot
