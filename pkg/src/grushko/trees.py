"""Marked Grushko W_n-trees as graphs of groups, and the spine poset.

A tree shape is a finite tree with n "marked" vertices carrying slots 1..n
(the Z/2 vertex groups) and optional trivial vertices of valence >= 3
(reduced representative; subdivision points are smoothed away).  A marked
tree attaches to slot j an involution with generator core x_j; the marking
tuple is a basis, and it consists of the stabilizers of the vertices of a
connected fundamental domain L of the Bass-Serre tree, so it is adapted.

The Bass-Serre tree is navigated lazily: it is tiled by translates g.L
glued along marked vertices, with tile adjacency the Cayley graph of W_n
over the marking basis.  bs_path searches it bidirectionally under a vertex
cap; the visibility module uses the tiling directly.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass

from .words import Word, generators, involution_core, parse
from . import membership


class BudgetExceededError(RuntimeError):
    """A lazy search exceeded its vertex cap (inputs too large, not absence)."""


class CollapseError(ValueError):
    """A collapse would merge two marked vertices (a forbidden degeneracy)."""


# ---------------------------------------------------------------------------
# shapes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TreeShape:
    """Finite tree with slot labels; slot_of[v] is 0 for trivial vertices."""

    n: int
    slot_of: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        V = len(self.slot_of)
        if len(self.edges) != V - 1:
            raise ValueError("not a tree: wrong edge count")
        seen = [False] * V
        adj = self.adjacency()
        stack = [0]
        seen[0] = True
        while stack:
            u = stack.pop()
            for v, _ in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        if not all(seen):
            raise ValueError("not a tree: disconnected")
        slots = sorted(s for s in self.slot_of if s)
        if slots != list(range(1, self.n + 1)):
            raise ValueError("slots must be exactly 1..n")
        deg = [0] * V
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        for v in range(V):
            if self.slot_of[v] == 0 and deg[v] < 3:
                raise ValueError("trivial vertices need valence >= 3")

    @property
    def num_vertices(self) -> int:
        return len(self.slot_of)

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Per-vertex list of (neighbor, edge index)."""
        adj: list[list[tuple[int, int]]] = [[] for _ in self.slot_of]
        for i, (u, v) in enumerate(self.edges):
            adj[u].append((v, i))
            adj[v].append((u, i))
        return adj

    def vertex_of_slot(self, k: int) -> int:
        return self.slot_of.index(k)

    def path(self, u: int, v: int) -> list[tuple[int, int]]:
        """Unique path u -> v as a list of (edge index, far vertex)."""
        if u == v:
            return []
        adj = self.adjacency()
        prev: dict[int, tuple[int, int]] = {u: (-1, -1)}
        queue = deque([u])
        while queue:
            w = queue.popleft()
            if w == v:
                break
            for x, e in adj[w]:
                if x not in prev:
                    prev[x] = (w, e)
                    queue.append(x)
        out = []
        w = v
        while w != u:
            pw, e = prev[w]
            out.append((e, w))
            w = pw
        out.reverse()
        return out

    def canonical_key(self) -> tuple:
        """Key invariant under relabeling of trivial vertices.

        A vertex is pinned down by its distance vector to the marked
        vertices (two distinct vertices always differ toward some leaf),
        so sorting by (slot, distance vector) is a canonical order.
        """
        dist = self._distance_matrix()
        marked = [self.vertex_of_slot(k) for k in range(1, self.n + 1)]
        keys = []
        for v in range(self.num_vertices):
            keys.append((self.slot_of[v], tuple(dist[v][m] for m in marked), v))
        order = sorted(keys)
        relabel = {old: new for new, (_, _, old) in enumerate(order)}
        slots = tuple(s for s, _, _ in order)
        edges = tuple(sorted(tuple(sorted((relabel[u], relabel[v]))) for u, v in self.edges))
        return (self.n, slots, edges)

    def relabeled_canonical(self) -> "TreeShape":
        n, slots, edges = self.canonical_key()
        return TreeShape(n, slots, edges)

    def _distance_matrix(self) -> list[list[int]]:
        V = self.num_vertices
        adj = self.adjacency()
        dist = []
        for s in range(V):
            d = [-1] * V
            d[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for v, _ in adj[u]:
                    if d[v] < 0:
                        d[v] = d[u] + 1
                        queue.append(v)
            dist.append(d)
        return dist

    def to_dot(self) -> str:
        lines = ["graph shape {"]
        for v, s in enumerate(self.slot_of):
            if s:
                lines.append(f'  {v} [label="x{s}"];')
            else:
                lines.append(f'  {v} [label="" shape=point];')
        for i, (u, v) in enumerate(self.edges):
            lines.append(f'  {u} -- {v} [label="e{i + 1}"];')
        lines.append("}")
        return "\n".join(lines)


def path_shape(order: tuple[int, ...]) -> TreeShape:
    """Path-shaped tree whose k-th vertex carries slot order[k]."""
    n = len(order)
    if sorted(order) != list(range(1, n + 1)):
        raise ValueError(f"not a permutation of 1..{n}: {order}")
    return TreeShape(n, tuple(order), tuple((i, i + 1) for i in range(n - 1)))


# ---------------------------------------------------------------------------
# marked trees
# ---------------------------------------------------------------------------

class MarkedTree:
    """A tree shape plus a marking: slot j carries an involution with core x_j."""

    def __init__(self, shape: TreeShape, marking: tuple[Word, ...]):
        n = shape.n
        if len(marking) != n:
            raise ValueError(f"need {n} marking involutions")
        for j, b in enumerate(marking, start=1):
            if b.rank != n:
                raise ValueError("marking rank mismatch")
            if not b.is_involution:
                raise ValueError(f"marking of slot {j} is not an involution")
            if involution_core(b)[0] != j:
                raise ValueError(f"marking of slot {j} must have core x{j}")
        if not membership.is_basis(list(marking)):
            raise ValueError("marking is not a basis")
        self.shape = shape
        self.marking = tuple(marking)
        self.n = n
        self.standard = all(len(b) == 1 for b in marking)
        self._slot_vertex = tuple(shape.vertex_of_slot(k) for k in range(1, n + 1))
        self._label_cache: dict[tuple[int, int], tuple[int, ...]] = {}
        self._inverse_marking = None

    def marking_word(self, slot: int) -> Word:
        return self.marking[slot - 1]

    def vertex_of_slot(self, k: int) -> int:
        return self._slot_vertex[k - 1]

    def labels_between(self, u: int, v: int) -> tuple[int, ...]:
        """Edge indices along the shape path between two shape vertices."""
        key = (u, v)
        if key not in self._label_cache:
            self._label_cache[key] = tuple(e for e, _ in self.shape.path(u, v))
        return self._label_cache[key]

    def in_marking_letters(self, w: Word) -> Word:
        """Rewrite w as a word in the marking basis (letters name slots)."""
        if self.standard:
            return w
        if self._inverse_marking is None:
            phi = membership.make_automorphism(list(self.marking))
            self._inverse_marking = phi.inverse()
        return self._inverse_marking(w)

    def __eq__(self, other) -> bool:
        return (isinstance(other, MarkedTree) and self.shape == other.shape
                and self.marking == other.marking)

    def __hash__(self) -> int:
        return hash((self.shape, self.marking))

    def __repr__(self) -> str:
        mk = ",".join(str(b) for b in self.marking)
        return f"MarkedTree(n={self.n}, marking=[{mk}])"

    # -- JSON ----------------------------------------------------------
    def to_json(self) -> str:
        data = {
            "vertices": [
                {"id": v, "label": "trivial" if s == 0 else {"slot": s}}
                for v, s in enumerate(self.shape.slot_of)
            ],
            "edges": [[u, v] for u, v in self.shape.edges],
            "marking": {str(k): str(self.marking[k - 1]) for k in range(1, self.n + 1)},
        }
        return json.dumps(data, ensure_ascii=False)

    @staticmethod
    def from_json(text: str) -> "MarkedTree":
        data = json.loads(text)
        verts = data["vertices"]
        slot_of = [0] * len(verts)
        for item in verts:
            lab = item["label"]
            slot_of[item["id"]] = 0 if lab == "trivial" else int(lab["slot"])
        n = max(slot_of)
        shape = TreeShape(n, tuple(slot_of), tuple(tuple(e) for e in data["edges"]))
        marking = tuple(parse(data["marking"][str(k)], n) for k in range(1, n + 1))
        return MarkedTree(shape, marking)


def standard_marking(n: int) -> tuple[Word, ...]:
    return generators(n)


def caterpillar(n: int, order: tuple[int, ...] | None = None) -> MarkedTree:
    """Path of n Z/2 vertices carrying x_{order(1)}, ..., x_{order(n)}."""
    if order is None:
        order = tuple(range(1, n + 1))
    return MarkedTree(path_shape(tuple(order)), standard_marking(n))


# ---------------------------------------------------------------------------
# Bass-Serre navigation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BSVertex:
    """Point w.v of the Bass-Serre tree, with w a canonical coset word."""

    word: Word
    vertex: int


def bs_vertex(tree: MarkedTree, w: Word, v: int) -> BSVertex:
    """Canonicalize (w, v): for a marked vertex take min(w, w*b) in word order."""
    s = tree.shape.slot_of[v]
    if s:
        wb = w * tree.marking_word(s)
        if wb.key() < w.key():
            w = wb
    return BSVertex(w, v)


def fixed_point(tree: MarkedTree, a: Word) -> BSVertex:
    """The unique point of the tree fixed by the involution a."""
    j, g = involution_core(a)
    b = tree.marking_word(j)
    _, c = involution_core(b)
    return bs_vertex(tree, g * ~c, tree.vertex_of_slot(j))


def _bs_neighbors(tree: MarkedTree, p: BSVertex):
    """Adjacent Bass-Serre vertices with (edge label, translate) decorations."""
    adj = tree.shape.adjacency()
    w, v = p.word, p.vertex
    s = tree.shape.slot_of[v]
    translates = [w] if s == 0 else [w, w * tree.marking_word(s)]
    for g in translates:
        for u, e in adj[v]:
            yield bs_vertex(tree, g, u), e, g


def bs_path(tree: MarkedTree, p: BSVertex, q: BSVertex,
            vertex_cap: int = 10 ** 6) -> list[tuple[int, Word]]:
    """Unique reduced edge path p -> q as (edge orbit label, translate) steps.

    Lazy bidirectional search over translates of the fundamental domain,
    hashing vertices by canonical coset words.  Raises BudgetExceededError
    past the vertex cap; that signals oversized inputs, not a missing path.
    """
    p = bs_vertex(tree, p.word, p.vertex)
    q = bs_vertex(tree, q.word, q.vertex)
    if p == q:
        return []
    # parent maps: vertex -> (previous vertex, edge label, translate)
    sides = [{p: None}, {q: None}]
    frontiers = [deque([p]), deque([q])]
    meet = None
    visited = 2
    while meet is None:
        side = 0 if len(sides[0]) <= len(sides[1]) else 1
        if not frontiers[side]:
            raise AssertionError("bass-serre tree search exhausted a side")
        for _ in range(len(frontiers[side])):
            cur = frontiers[side].popleft()
            for nxt, e, g in _bs_neighbors(tree, cur):
                if nxt in sides[side]:
                    continue
                sides[side][nxt] = (cur, e, g)
                frontiers[side].append(nxt)
                visited += 1
                if visited > vertex_cap:
                    raise BudgetExceededError(f"bs_path exceeded {vertex_cap} vertices")
                if nxt in sides[1 - side]:
                    meet = nxt
                    break
            if meet is not None:
                break

    def walk_back(side_map, end):
        steps = []
        cur = end
        while side_map[cur] is not None:
            prev, e, g = side_map[cur]
            steps.append((e, g))
            cur = prev
        return steps

    forward = list(reversed(walk_back(sides[0], meet)))
    backward = walk_back(sides[1], meet)
    return forward + backward


# ---------------------------------------------------------------------------
# collapses and the spine poset
# ---------------------------------------------------------------------------

def collapse(shape: TreeShape, edge_set) -> TreeShape:
    """Collapse each component of the given edge set to a point.

    Raises CollapseError when a component contains two marked vertices.
    Valence-2 trivial vertices produced by a collapse are smoothed (this
    cannot happen when the input is reduced, but is kept as a safeguard).
    """
    edge_set = set(edge_set)
    for e in edge_set:
        if not 0 <= e < len(shape.edges):
            raise ValueError(f"no edge {e}")
    V = shape.num_vertices
    parent = list(range(V))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for e in edge_set:
        u, v = shape.edges[e]
        parent[find(u)] = find(v)
    groups: dict[int, list[int]] = {}
    for v in range(V):
        groups.setdefault(find(v), []).append(v)
    new_slot = {}
    for root, members in groups.items():
        slots = [shape.slot_of[v] for v in members if shape.slot_of[v]]
        if len(slots) > 1:
            raise CollapseError(f"collapse would merge marked slots {sorted(slots)}")
        new_slot[root] = slots[0] if slots else 0
    roots = sorted(groups)
    index = {r: i for i, r in enumerate(roots)}
    slot_of = [new_slot[r] for r in roots]
    edges = []
    for i, (u, v) in enumerate(shape.edges):
        if i in edge_set:
            continue
        edges.append((index[find(u)], index[find(v)]))
    slot_of, edges = _smooth(slot_of, edges)
    return TreeShape(shape.n, tuple(slot_of), tuple(tuple(sorted(e)) for e in edges))


def _smooth(slot_of: list[int], edges: list[tuple[int, int]]):
    """Remove trivial valence-2 vertices, joining their two edges."""
    while True:
        deg: dict[int, list[int]] = {v: [] for v in range(len(slot_of))}
        for i, (u, v) in enumerate(edges):
            deg[u].append(i)
            deg[v].append(i)
        target = next((v for v in range(len(slot_of))
                       if slot_of[v] == 0 and len(deg[v]) == 2), None)
        if target is None:
            return slot_of, edges
        e1, e2 = deg[target]
        ends = [x for e in (e1, e2) for x in edges[e] if x != target]
        edges = [e for i, e in enumerate(edges) if i not in (e1, e2)]
        edges.append((ends[0], ends[1]))
        keep = [v for v in range(len(slot_of)) if v != target]
        remap = {v: i for i, v in enumerate(keep)}
        slot_of = [slot_of[v] for v in keep]
        edges = [(remap[u], remap[v]) for u, v in edges]


def _anonymous_shapes(n: int) -> list[tuple[tuple[int, ...], tuple[tuple[int, int], ...]]]:
    """Reduced shapes with n indistinct marked vertices, grown leaf by leaf.

    Every reduced shape loses a marked leaf (all leaves are marked), and
    removal inverts either a leaf attachment or an edge subdivision plus
    attachment, so growing both ways from the 2-vertex shape is exhaustive.
    Entries use slot 1 for "marked" and 0 for trivial.
    """
    def canon(slot_of, edges):
        marks = tuple(1 if s else 0 for s in slot_of)
        return _ahu_key(marks, edges)

    base = ((1, 1), ((0, 1),))
    current = {canon(*base): base}
    for _ in range(n - 2):
        grown = {}
        for slot_of, edges in current.values():
            V = len(slot_of)
            for v in range(V):  # attach a marked leaf at an existing vertex
                s2 = slot_of + (1,)
                e2 = edges + ((v, V),)
                key = canon(s2, e2)
                grown.setdefault(key, (s2, e2))
            for u, v in edges:  # subdivide an edge and attach there
                s2 = slot_of + (0, 1)
                e2 = tuple(e for e in edges if e != (u, v)) + ((u, V), (v, V), (V, V + 1))
                key = canon(s2, e2)
                grown.setdefault(key, (s2, e2))
        current = grown
    return list(current.values())


def _ahu_key(colors: tuple[int, ...], edges) -> tuple:
    """Canonical key of a colored tree (rooted at the center, AHU encoding)."""
    V = len(colors)
    adj: list[list[int]] = [[] for _ in range(V)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    if V == 1:
        return (colors[0],)
    # find the center by peeling leaves
    deg = [len(a) for a in adj]
    layer = [v for v in range(V) if deg[v] <= 1]
    removed = 0
    alive = [True] * V
    while V - removed > 2:
        nxt = []
        for v in layer:
            alive[v] = False
            removed += 1
            for u in adj[v]:
                if alive[u]:
                    deg[u] -= 1
                    if deg[u] == 1:
                        nxt.append(u)
        layer = nxt
    centers = [v for v in range(V) if alive[v]]

    def encode(root, parent):
        subs = sorted(encode(u, root) for u in adj[root] if u != parent)
        return (colors[root], tuple(subs))

    if len(centers) == 1:
        return encode(centers[0], -1)
    c1, c2 = centers
    return min((encode(c1, c2), encode(c2, c1)), (encode(c2, c1), encode(c1, c2)))


def enumerate_shapes(n: int, up_to_relabeling: bool = False) -> list[TreeShape]:
    """All reduced shapes for rank n up to label-preserving isomorphism.

    With up_to_relabeling=True, shapes are quotiented by slot permutations
    instead (one labeled representative per unlabeled shape).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    out = {}
    for slot_of, edges in _anonymous_shapes(n):
        marked = [v for v, s in enumerate(slot_of) if s]
        perms = [tuple(range(1, n + 1))] if up_to_relabeling else itertools.permutations(range(1, n + 1))
        for perm in perms:
            assigned = list(slot_of)
            for v, s in zip(marked, perm):
                assigned[v] = s
            shape = TreeShape(n, tuple(assigned), tuple(tuple(sorted(e)) for e in edges))
            key = shape.canonical_key()
            if key not in out:
                out[key] = shape.relabeled_canonical()
    return sorted(out.values(), key=lambda s: s.canonical_key())


@dataclass
class ShapePoset:
    """Labeled reduced shapes ordered by "collapses onto"."""

    shapes: list[TreeShape]
    below: list[set[int]]  # strictly smaller elements (collapses of shapes[i])

    def longest_chain(self) -> int:
        order = sorted(range(len(self.shapes)), key=lambda i: len(self.shapes[i].edges))
        best = [1] * len(self.shapes)
        for i in order:
            for j in self.below[i]:
                best[i] = max(best[i], best[j] + 1)
        return max(best) if best else 0

    def relation_pairs(self) -> list[tuple[int, int]]:
        return [(j, i) for i in range(len(self.shapes)) for j in self.below[i]]


def shape_poset(n: int) -> ShapePoset:
    """The spine poset at rank n: S <= T when T collapses onto S."""
    shapes = enumerate_shapes(n)
    index = {s.canonical_key(): i for i, s in enumerate(shapes)}
    below: list[set[int]] = [set() for _ in shapes]
    for i, shape in enumerate(shapes):
        m = len(shape.edges)
        for r in range(1, m):
            for subset in itertools.combinations(range(m), r):
                try:
                    smaller = collapse(shape, subset)
                except CollapseError:
                    continue
                below[i].add(index[smaller.canonical_key()])
    # transitive closure (single-subset collapses already compose, but be safe)
    changed = True
    while changed:
        changed = False
        for i in range(len(shapes)):
            extra = set()
            for j in below[i]:
                extra |= below[j] - below[i]
            if extra:
                below[i] |= extra
                changed = True
    return ShapePoset(shapes, below)


# ---------------------------------------------------------------------------
# adapted orderings
# ---------------------------------------------------------------------------

def adapted_order(tree: MarkedTree) -> tuple[int, ...]:
    """Slot ordering whose prefix hulls exclude all later fixed points.

    Greedy peeling: repeatedly remove the largest-slot marked vertex that is
    a leaf of the convex hull of the remaining marked vertices; the reversed
    peel sequence has the prefix-hull property.
    """
    shape = tree.shape
    adj = shape.adjacency()
    alive = [True] * shape.num_vertices
    deg = [len(a) for a in adj]
    remaining = set(range(1, tree.n + 1))
    peeled = []

    def prune_trivial():
        changed = True
        while changed:
            changed = False
            for v in range(shape.num_vertices):
                if alive[v] and shape.slot_of[v] == 0 and deg[v] <= 1:
                    alive[v] = False
                    changed = True
                    for u, _ in adj[v]:
                        if alive[u]:
                            deg[u] -= 1

    while remaining:
        candidates = [k for k in remaining
                      if deg[tree.vertex_of_slot(k)] <= 1 and alive[tree.vertex_of_slot(k)]]
        k = max(candidates)
        peeled.append(k)
        remaining.discard(k)
        v = tree.vertex_of_slot(k)
        alive[v] = False
        for u, _ in adj[v]:
            if alive[u]:
                deg[u] -= 1
        prune_trivial()
    return tuple(reversed(peeled))


def convex_hull_vertices(shape: TreeShape, vertices) -> set[int]:
    """Vertex set of the minimal subtree containing the given vertices."""
    want = set(vertices)
    if not want:
        return set()
    alive = set(range(shape.num_vertices))
    adj = shape.adjacency()
    deg = {v: len(adj[v]) for v in alive}
    changed = True
    while changed:
        changed = False
        for v in list(alive):
            if v not in want and deg[v] <= 1:
                alive.discard(v)
                changed = True
                for u, _ in adj[v]:
                    if u in alive:
                        deg[u] -= 1
    return alive
