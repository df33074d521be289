import itertools
import random

import pytest

from grushko.words import Word, conjugate, generator, generators, parse, random_reduced_word
from grushko.factors import (
    CertificateError,
    CompletingBasis,
    VisibleIn,
    W2Factor,
    canonical_class,
    canonical_pair,
    make_factor,
    make_partial_basis,
    pair_index,
    parse_class,
    same_class_oracle,
)
from grushko.trees import caterpillar

W = parse


def test_make_factor_validation():
    f = make_factor(W("x1", 4), W("x2", 4),
                    CompletingBasis(tuple(generators(4))))
    assert f.rank == 4
    with pytest.raises(ValueError):
        make_factor(W("x1", 4), W("x1", 4))
    with pytest.raises(ValueError):
        make_factor(W("x1.x2", 4), W("x1", 4))
    with pytest.raises(CertificateError):
        make_factor(W("x1", 4), W("x3", 4), CompletingBasis(tuple(generators(4))[:2] * 2))


def test_visibility_certificate_rejects_invisible():
    tree = caterpillar(3)
    with pytest.raises(CertificateError):
        make_factor(W("x1", 3), W("x3.x2.x3", 3), VisibleIn(tree))
    make_factor(W("x1", 3), W("x2", 3), VisibleIn(tree))


def test_canonical_class_examples():
    same = [
        (make_factor(W("x1", 3), W("x2", 3)), make_factor(W("x1", 3), W("x1.x2.x1", 3))),
        (make_factor(W("x1", 3), W("x3.x2.x3", 3)), make_factor(W("x3.x1.x3", 3), W("x2", 3))),
    ]
    for f, g in same:
        assert canonical_class(f) == canonical_class(g)
    assert canonical_class(make_factor(W("x1", 3), W("x2", 3))) != \
        canonical_class(make_factor(W("x1", 3), W("x3", 3)))


def _involutions(n, max_conj):
    out = []
    def grow(prefix, remaining):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for k in range(1, n + 1):
            if not prefix or prefix[-1] != k:
                grow(prefix + [k], remaining - 1)
    words = []
    for glen in range(max_conj + 1):
        out.clear()
        grow([], glen)
        for g in list(out):
            for core in range(1, n + 1):
                w = conjugate(generator(core, n), Word(g, n))
                if len(w) == 2 * glen + 1:
                    words.append(w)
    return sorted(set(words), key=lambda w: w.key())


def test_canonical_agrees_with_oracle_exhaustively():
    """Each canonical class is one oracle class, distinct classes separate.

    Exhaustive over factors with |a| + |b| <= 6 at rank 4 against the
    bounded search at length 8; a single disagreement here means the
    canonical form is unsound and the build must fail.
    """
    n = 4
    invs = _involutions(n, 2)
    factors = [W2Factor(a, b) for a, b in itertools.combinations(invs, 2)
               if len(a) + len(b) <= 6]
    byclass = {}
    for f in factors:
        byclass.setdefault(canonical_class(f), []).append(f)
    for cls, members in byclass.items():
        rep = members[0]
        for other in members[1:]:
            assert same_class_oracle(rep, other, 8), (rep, other)
    reps = [ms[0] for ms in byclass.values()]
    for f, g in itertools.combinations(reps, 2):
        assert not same_class_oracle(f, g, 8), (f, g)


def test_canonical_pair_invariances():
    rng = random.Random(13)
    for _ in range(250):
        n = rng.choice([3, 4, 5])
        a = conjugate(generator(rng.randrange(1, n + 1), n),
                      random_reduced_word(rng, n, rng.randrange(0, 4)))
        b = conjugate(generator(rng.randrange(1, n + 1), n),
                      random_reduced_word(rng, n, rng.randrange(0, 4)))
        if a == b:
            continue
        pair = canonical_pair(a, b)
        w = random_reduced_word(rng, n, rng.randrange(0, 4))
        assert canonical_pair(conjugate(a, w), conjugate(b, w)) == pair
        assert canonical_pair(b, a) == pair
        assert canonical_pair(a, conjugate(b, a)) == pair
        assert canonical_pair(conjugate(a, b), b) == pair
        assert canonical_pair(*pair) == pair


def test_pair_index():
    assert canonical_class(W2Factor(W("x1", 4), W("x2", 4))).pair_index == 1
    assert canonical_class(W2Factor(W("x1", 4), W("x3", 4))).pair_index is None
    rng = random.Random(14)
    g = random_reduced_word(rng, 4, 5)
    f = W2Factor(W("x3", 4), conjugate(W("x4", 4), g))
    assert pair_index(f, 4) == 2
    # odd rank: the last generator stays unpaired
    assert canonical_class(W2Factor(W("x3", 3), W("x2", 3))).pair_index is None


def test_pair_index_conjugation_invariant():
    rng = random.Random(15)
    for _ in range(100):
        n = 4
        i, j = rng.sample(range(1, 5), 2)
        f = W2Factor(conjugate(generator(i, n), random_reduced_word(rng, n, 2)),
                     conjugate(generator(j, n), random_reduced_word(rng, n, 2)))
        w = random_reduced_word(rng, n, rng.randrange(0, 4))
        assert pair_index(f, n) == pair_index(f.conjugated_by(w), n)


def test_same_class_oracle_examples():
    f = make_factor(W("x1", 3), W("x2", 3))
    g = make_factor(W("x1", 3), W("x1.x2.x1", 3))
    assert same_class_oracle(f, g, 2)
    assert same_class_oracle(f, f, 0)  # reflexive at any window
    assert same_class_oracle(f, f, 1)
    assert not same_class_oracle(f, make_factor(W("x1", 3), W("x3", 3)), 6)


def test_class_text_roundtrip():
    cls = canonical_class(W2Factor(W("x1", 4), W("x3.x2.x3", 4)))
    assert str(cls) == "W2[a=x1;b=x3*x2*x3;pair=1]"
    back = parse_class(str(cls), 4)
    assert back == cls and back.pair_index == cls.pair_index


def test_make_partial_basis_validation():
    cert = CompletingBasis(tuple(generators(4)))
    cA = canonical_class(make_factor(W("x1", 4), W("x2", 4), cert))
    cB = canonical_class(make_factor(W("x3", 4), W("x4", 4), cert))
    pb = make_partial_basis([cA, cB])
    assert len(pb) == 2 and pb.rank == 4
    with pytest.raises(ValueError):
        make_partial_basis([])
    with pytest.raises(ValueError):  # duplicate pair index
        cert2 = CompletingBasis((W("x1", 4), W("x3.x2.x3", 4), W("x3", 4), W("x4", 4)))
        dup = canonical_class(make_factor(W("x1", 4), W("x3.x2.x3", 4), cert2))
        make_partial_basis([cA, dup])
    with pytest.raises(ValueError):  # not paired
        make_partial_basis([canonical_class(make_factor(W("x1", 4), W("x3", 4), cert))])
    with pytest.raises(ValueError):  # missing certificate
        make_partial_basis([canonical_class(make_factor(W("x1", 4), W("x2", 4)))])
