"""Visibility of dihedral factors in marked Grushko trees.

A factor A = <a, b> is visible in a tree S when the minimal A-invariant
line meets its translates in at most a point; equivalently the quotient
segment between the fixed points of a and b embeds in the quotient graph.
Operationally: the edge-orbit labels along the Bass-Serre path between
fixed_point(a) and fixed_point(b) are pairwise distinct.

The path is computed by tiling: the Bass-Serre tree is a union of
translates g.L of the fundamental domain, adjacent along marked vertices,
and the tile itinerary of the path is the word g_a^-1 g_b written in the
marking basis.  The labels are then shape-path labels between consecutive
slot vertices.  Tests check this route against the lazy bs_path search.
"""

from __future__ import annotations

from dataclasses import dataclass

from .words import Word, conjugate, identity, involution_core, reduce
from .factors import CanonicalClass, VisibleIn, W2Factor, canonical_class
from .trees import MarkedTree, adapted_order, convex_hull_vertices
from . import kernels


class CertificationError(RuntimeError):
    """A certification search failed; reported loudly, never dropped."""


def _slot_walk(tree: MarkedTree, f: W2Factor) -> list[int]:
    """Slot itinerary of the Bass-Serre path between the two fixed points."""
    ja, ga = involution_core(f.a)
    jb, gb = involution_core(f.b)
    _, ca = involution_core(tree.marking_word(ja))
    _, cb = involution_core(tree.marking_word(jb))
    h = (ca * ~ga) * (gb * ~cb)  # tile move g_a^-1 g_b
    h = tree.in_marking_letters(h)
    return [ja, *h.letters, jb]


def path_labels(tree: MarkedTree, f: W2Factor) -> list[int]:
    """Edge-orbit labels along the path between the fixed points of a and b."""
    walk = _slot_walk(tree, f)
    labels: list[int] = []
    for a, b in zip(walk, walk[1:]):
        if a != b:
            labels.extend(tree.labels_between(tree.vertex_of_slot(a), tree.vertex_of_slot(b)))
    return labels


def is_visible(tree: MarkedTree, f: W2Factor | CanonicalClass) -> bool:
    """True iff the fixed-point path meets each edge orbit at most once."""
    if isinstance(f, CanonicalClass):
        f = W2Factor(f.a, f.b)
    labels = path_labels(tree, f)
    return len(labels) == len(set(labels))


def segment_conjugators(tree: MarkedTree, x: int, y: int) -> list[Word]:
    """All products of the stabilizer involutions met along the segment.

    x and y are slots; the segment between their fixed points in the
    fundamental domain passes p marked vertices (endpoints included) with
    stabilizer generators b_1..b_p in order, and the conjugators are the
    2^p subproducts b_1^{e_1} ... b_p^{e_p}.  Every factor <b_x, g b_y g^-1>
    visible in the tree has a conjugator of this form.
    """
    if x == y:
        raise ValueError("need two distinct slots")
    shape = tree.shape
    u, v = tree.vertex_of_slot(x), tree.vertex_of_slot(y)
    stops = [x]
    for _, far in shape.path(u, v):
        s = shape.slot_of[far]
        if s:
            stops.append(s)
    words = []
    for bits in range(1 << len(stops)):
        w = identity(tree.n)
        for i, slot in enumerate(stops):
            if bits >> i & 1:
                w = w * tree.marking_word(slot)
        words.append(w)
    return words


@dataclass(frozen=True)
class VisibleFamily:
    """The finitely many visible classes of one pair index in one tree."""

    tree: MarkedTree
    pair_index: int
    classes: tuple[CanonicalClass, ...]

    def __len__(self) -> int:
        return len(self.classes)


def visible_classes(tree: MarkedTree, i: int) -> VisibleFamily:
    """Visible paired classes <b_{2i-1}, g b_{2i} g^-1> over segment conjugators."""
    n = tree.n
    if 2 * i > n or i < 1:
        raise ValueError(f"pair index {i} out of range for rank {n}")
    a = tree.marking_word(2 * i - 1)
    y = tree.marking_word(2 * i)
    seen: dict[CanonicalClass, CanonicalClass] = {}
    for g in segment_conjugators(tree, 2 * i - 1, 2 * i):
        b = conjugate(y, g)
        if b == a:
            continue
        f = W2Factor(a, b)
        if not is_visible(tree, f):
            continue
        cls = canonical_class(f).with_certificate(VisibleIn(tree))
        seen.setdefault(cls, cls)
    classes = tuple(sorted(seen.values(), key=lambda c: (c.a.key(), c.b.key())))
    return VisibleFamily(tree, i, classes)


def visible_classes_brute(tree: MarkedTree, i: int, max_len: int) -> set[CanonicalClass]:
    """Independent enumeration: every conjugator g with |g| <= max_len.

    This is the oracle side of the finiteness statement for visible paired
    factors; the kernel route requires the standard marking, otherwise a
    plain python walk runs.
    """
    n = tree.n
    if 2 * i > n or i < 1:
        raise ValueError(f"pair index {i} out of range for rank {n}")
    a = tree.marking_word(2 * i - 1)
    y = tree.marking_word(2 * i)
    out: set[CanonicalClass] = set()
    if tree.standard:
        segmask, seglen = kernels.segment_tables(tree)
        for letters in kernels.sweep_visible(segmask, seglen, 2 * i - 1, 2 * i, n, max_len):
            b = conjugate(y, Word(letters, n))
            if b == a:
                continue
            out.add(canonical_class(W2Factor(a, b)).with_certificate(VisibleIn(tree)))
        return out
    stack: list[tuple[int, ...]] = [()]
    while stack:
        letters = stack.pop()
        g = Word(letters, n)
        b = conjugate(y, g)
        if b != a and is_visible(tree, W2Factor(a, b)):
            out.add(canonical_class(W2Factor(a, b)).with_certificate(VisibleIn(tree)))
        if len(letters) < max_len:
            for k in range(1, n + 1):
                if not letters or letters[-1] != k:
                    stack.append(letters + (k,))
    return out


# ---------------------------------------------------------------------------
# constructive basis certification
# ---------------------------------------------------------------------------

def certify_partial_basis(tree: MarkedTree, classes) -> tuple[Word, ...]:
    """Build a basis realizing the given visible classes jointly.

    Returns involutions (y_1..y_n), indexed along adapted_order(tree), such
    that consecutive construction prefixes generate the corresponding
    marking prefixes and each input class is <y_alpha, y_beta> for its core
    slots.  This is the constructive proof that visible classes on disjoint
    cores form a partial basis; it raises CertificationError when a class
    is not visible here and on core collisions.
    """
    from . import membership

    order = adapted_order(tree)
    pos = {slot: i for i, slot in enumerate(order)}
    n = tree.n
    used: set[int] = set()
    chosen: dict[int, tuple[Word, CanonicalClass]] = {}
    for cls in classes:
        r, s = cls.cores()
        if r == s:
            raise CertificationError(f"core collision inside {cls}")
        if r in used or s in used:
            raise CertificationError("core collision across classes")
        used.update((r, s))
        if not is_visible(tree, cls):
            raise CertificationError(f"{cls} is not visible in this tree")
        alpha, beta = (r, s) if pos[r] < pos[s] else (s, r)
        g = _segment_conjugator_for(tree, cls, alpha, beta)
        chosen[beta] = (g, cls)

    basis = []
    for slot in order:
        b = tree.marking_word(slot)
        if slot in chosen:
            g, _ = chosen[slot]
            basis.append(conjugate(b, g))
        else:
            basis.append(b)
    out = tuple(basis)
    if not membership.is_basis(list(out)):
        raise CertificationError("constructed tuple fails the basis check")
    return out


def _segment_conjugator_for(tree: MarkedTree, cls: CanonicalClass,
                            alpha: int, beta: int) -> Word:
    """Smallest segment conjugator g with <b_alpha, g b_beta g^-1> in cls.

    Interior letters of g then involve only earlier marked vertices, which
    is what makes the inductive prefix property hold.  Leading b_alpha and
    trailing b_beta letters never change the subgroup and are dropped.
    """
    a = tree.marking_word(alpha)
    y = tree.marking_word(beta)
    candidates = sorted(segment_conjugators(tree, alpha, beta), key=lambda w: w.key())
    for g in candidates:
        g = _strip(g, a, y)
        b = conjugate(y, g)
        if b == a:
            continue
        if canonical_class(W2Factor(a, b)) == cls:
            return g
    raise CertificationError(
        f"no segment conjugator recovers {cls}; finiteness of visible classes violated")


def _strip(g: Word, a: Word, y: Word) -> Word:
    changed = True
    while changed:
        changed = False
        la, ly = len(a), len(y)
        if len(g) >= la and g.letters[:la] == a.letters:
            g = reduce(g.letters[la:], g.rank)
            changed = True
        if len(g) >= ly and g.letters[-ly:] == y.letters:
            g = reduce(g.letters[:-ly], g.rank)
            changed = True
    return g


def prefix_property_holds(tree: MarkedTree, basis: tuple[Word, ...]) -> bool:
    """Check x-prefix generation: marking slot of position i lies in <y_1..y_i>."""
    from . import membership

    order = adapted_order(tree)
    for i in range(1, len(basis) + 1):
        core = membership.fold(list(basis[:i]))
        target = tree.marking_word(order[i - 1])
        if not membership.contains(core, target):
            return False
    return True


def hull_order_is_adapted(tree: MarkedTree, order: tuple[int, ...]) -> bool:
    """Independent check: each prefix hull avoids all later fixed points."""
    shape = tree.shape
    for i in range(1, len(order)):
        hull = convex_hull_vertices(shape, [tree.vertex_of_slot(k) for k in order[:i]])
        if any(tree.vertex_of_slot(k) in hull for k in order[i:]):
            return False
    return True


# ---------------------------------------------------------------------------
# per-tree fibers of the basis complex
# ---------------------------------------------------------------------------

@dataclass
class TreeFiber:
    """All paired partial bases visible in one tree, ordered by inclusion."""

    tree: MarkedTree
    families: tuple[VisibleFamily, ...]
    elements: list[frozenset[CanonicalClass]]

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(fam) for fam in self.families)


def bp_fiber(tree: MarkedTree, certify: bool = True) -> TreeFiber:
    """Nonempty class sets with at most one class per pair index, all visible.

    Every element is validated through certify_partial_basis, which is the
    executable content of the pointwise-to-setwise upgrade.
    """
    n = tree.n
    families = tuple(visible_classes(tree, i) for i in range(1, n // 2 + 1))
    elements: list[frozenset[CanonicalClass]] = []

    def grow(idx: int, current: tuple[CanonicalClass, ...]):
        if idx == len(families):
            if current:
                elements.append(frozenset(current))
            return
        grow(idx + 1, current)
        for cls in families[idx].classes:
            grow(idx + 1, current + (cls,))

    grow(0, ())
    if certify:
        for element in elements:
            certify_partial_basis(tree, sorted(element, key=lambda c: c.pair_index))
    return TreeFiber(tree, families, elements)
