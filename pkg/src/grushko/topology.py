"""Posets, order complexes, and simplicial homology over Q, F_p, and Z.

Boundary matrices are kept sparse (dict columns); ranks over a field come
from sparse Gaussian elimination with Markowitz-style pivoting, and
integral homology from Smith normal form: unit (+-1) pivots are eliminated
sparsely -- a unimodular operation contributing invariant factor 1 -- and
whatever remains (tiny in practice) goes through a dense textbook SNF with
exact integer arithmetic.
"""

from __future__ import annotations

import heapq
import itertools
import json
from dataclasses import dataclass
from fractions import Fraction


# ---------------------------------------------------------------------------
# posets
# ---------------------------------------------------------------------------

class Poset:
    """Finite strict poset on opaque hashable elements."""

    def __init__(self, elements, above: list[set[int]]):
        self.elements = list(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise ValueError("duplicate poset elements")
        self.above = above  # above[i] = indices of elements strictly greater

    @classmethod
    def from_leq(cls, elements, leq) -> "Poset":
        elements = list(elements)
        above = [set() for _ in elements]
        for i, a in enumerate(elements):
            for j, b in enumerate(elements):
                if i != j and leq(a, b) and not leq(b, a):
                    above[i].add(j)
        return cls(elements, above)

    @classmethod
    def from_covers(cls, elements, covers) -> "Poset":
        """covers: iterable of (smaller, larger); closure computed here."""
        elements = list(elements)
        index = {e: i for i, e in enumerate(elements)}
        above = [set() for _ in elements]
        for small, large in covers:
            above[index[small]].add(index[large])
        changed = True
        while changed:
            changed = False
            for i in range(len(elements)):
                extra = set()
                for j in above[i]:
                    extra |= above[j] - above[i]
                if extra:
                    above[i] |= extra
                    changed = True
        for i in range(len(elements)):
            if i in above[i]:
                raise ValueError("cover relation has a cycle")
        return cls(elements, above)

    def __len__(self) -> int:
        return len(self.elements)

    def less(self, a, b) -> bool:
        return self.index[b] in self.above[self.index[a]]

    def chains(self):
        """All nonempty chains, as tuples of element indices, increasing."""
        n = len(self.elements)
        out = []

        def grow(chain):
            out.append(tuple(chain))
            for j in sorted(self.above[chain[-1]]):
                chain.append(j)
                grow(chain)
                chain.pop()

        for i in range(n):
            grow([i])
        return out

    def order_complex(self) -> "SimplicialComplex":
        """Simplices are the chains (geometric realization of the poset)."""
        return SimplicialComplex(frozenset(self.chains()), len(self.elements))

    def height(self) -> int:
        """Length of the longest chain (number of elements in it)."""
        best = [1] * len(self.elements)
        # elements with nothing above are finished first
        for i in sorted(range(len(self.elements)), key=lambda i: len(self.above[i])):
            for j in self.above[i]:
                best[i] = max(best[i], best[j] + 1)
        return max(best, default=0)

    def isomorphic_via(self, other: "Poset", mapping: dict) -> bool:
        """Verify that an explicit element bijection is an order isomorphism."""
        if len(self) != len(other) or len(mapping) != len(self):
            return False
        if set(mapping) != set(self.elements) or set(mapping.values()) != set(other.elements):
            return False
        for a in self.elements:
            for b in self.elements:
                if a is b:
                    continue
                if self.less(a, b) != other.less(mapping[a], mapping[b]):
                    return False
        return True


# ---------------------------------------------------------------------------
# simplicial complexes
# ---------------------------------------------------------------------------

class SimplicialComplex:
    """Face-closed set of simplices over integer vertex ids."""

    def __init__(self, simplices: frozenset, num_vertices: int | None = None):
        self.simplices = frozenset(tuple(sorted(s)) for s in simplices)
        for s in self.simplices:
            if len(set(s)) != len(s):
                raise ValueError(f"degenerate simplex {s}")
            for k in range(len(s)):
                face = s[:k] + s[k + 1:]
                if face and face not in self.simplices:
                    raise ValueError(f"missing face {face} of {s}")
        self.vertices = sorted({v for s in self.simplices for v in s})
        self.num_vertices = num_vertices if num_vertices is not None else len(self.vertices)

    @classmethod
    def from_maximal(cls, maximal) -> "SimplicialComplex":
        closed = set()
        for s in maximal:
            s = tuple(sorted(s))
            for k in range(1, len(s) + 1):
                closed.update(itertools.combinations(s, k))
        return cls(frozenset(closed))

    @property
    def dimension(self) -> int:
        return max((len(s) for s in self.simplices), default=0) - 1

    def f_vector(self) -> list[int]:
        f = [0] * (self.dimension + 1)
        for s in self.simplices:
            f[len(s) - 1] += 1
        return f

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * f for i, f in enumerate(self.f_vector()))

    def k_simplices(self, k: int) -> list[tuple]:
        return sorted(s for s in self.simplices if len(s) == k + 1)

    def to_json(self) -> str:
        maximal = [s for s in self.simplices
                   if not any(set(s) < set(t) for t in self.simplices if len(t) == len(s) + 1)]
        return json.dumps({
            "vertices": self.vertices,
            "simplices": sorted(sorted(s) for s in maximal),
        })

    @staticmethod
    def from_json(text: str) -> "SimplicialComplex":
        data = json.loads(text)
        simplices = list(data["simplices"]) + [[v] for v in data["vertices"]]
        return SimplicialComplex.from_maximal(simplices)

    def __eq__(self, other) -> bool:
        return isinstance(other, SimplicialComplex) and self.simplices == other.simplices

    def __hash__(self) -> int:
        return hash(self.simplices)


class ChainComplex:
    """Sparse integer boundary matrices of a simplicial complex, augmented.

    Degree k columns are indexed by k-simplices; degree 0 boundaries map to
    the empty simplex (reduced homology throughout).
    """

    def __init__(self, complex_: SimplicialComplex):
        self.complex = complex_
        self.grades = [complex_.k_simplices(k) for k in range(complex_.dimension + 1)]
        self.boundaries: list[dict[int, dict[int, int]]] = []
        # degree 0: augmentation into the empty simplex
        if self.grades:
            self.boundaries.append({c: {0: 1} for c in range(len(self.grades[0]))})
        for k in range(1, len(self.grades)):
            rows = {s: i for i, s in enumerate(self.grades[k - 1])}
            cols: dict[int, dict[int, int]] = {}
            for c, s in enumerate(self.grades[k]):
                col = {}
                for i in range(len(s)):
                    face = s[:i] + s[i + 1:]
                    col[rows[face]] = (-1) ** i
                cols[c] = col
            self.boundaries.append(cols)

    def boundary_squared_is_zero(self) -> bool:
        for k in range(1, len(self.boundaries)):
            lower = self.boundaries[k - 1]
            for col in self.boundaries[k].values():
                acc: dict[int, int] = {}
                for r, v in col.items():
                    for r2, v2 in lower[r].items():
                        acc[r2] = acc.get(r2, 0) + v * v2
                if any(acc.values()):
                    return False
        return True


# ---------------------------------------------------------------------------
# sparse elimination
# ---------------------------------------------------------------------------

def _sparse_eliminate(cols: dict[int, dict[int, int]], p: int | None):
    """Eliminate with unit pivots (any pivot mod p); returns (pivots, leftover).

    leftover is the list of remaining columns (dicts) containing no +-1
    entry; empty when p is given.  Unit pivoting is a unimodular operation,
    so for integer matrices the Smith form is diag(1,...,1) + SNF(leftover).
    """
    cols = {c: dict(col) for c, col in cols.items() if col}
    if p is not None:
        for col in cols.values():
            for r in list(col):
                col[r] %= p
                if not col[r]:
                    del col[r]
        cols = {c: col for c, col in cols.items() if col}
    rows: dict[int, set[int]] = {}
    for c, col in cols.items():
        for r in col:
            rows.setdefault(r, set()).add(c)
    heap = [(len(col), c) for c, col in cols.items()]
    heapq.heapify(heap)
    stash: set[int] = set()
    pivots = 0

    def push(c):
        if c in cols and cols[c]:
            heapq.heappush(heap, (len(cols[c]), c))

    while heap or stash:
        if not heap:
            # a stashed column may have gained a unit entry since
            retry = [c for c in stash
                     if c in cols and any(v in (1, -1) for v in cols[c].values())]
            if not retry:
                break
            for c in retry:
                stash.discard(c)
                push(c)
            continue
        nnz, c0 = heapq.heappop(heap)
        if c0 not in cols or not cols[c0]:
            cols.pop(c0, None)
            continue
        if len(cols[c0]) != nnz:
            push(c0)
            continue
        col0 = cols[c0]
        if p is None:
            units = [r for r, v in col0.items() if v in (1, -1)]
            if not units:
                stash.add(c0)
                continue
            r0 = min(units, key=lambda r: len(rows[r]))
        else:
            r0 = min(col0, key=lambda r: len(rows[r]))
        v0 = col0[r0]
        pivots += 1
        inv = v0 if p is None else pow(v0, -1, p)
        touched = rows[r0] - {c0}
        for c in touched:
            col = cols[c]
            factor = col[r0] * inv if p is None else col[r0] * inv % p
            for r, v in col0.items():
                new = col.get(r, 0) - factor * v
                if p is not None:
                    new %= p
                if new:
                    if r not in col:
                        rows.setdefault(r, set()).add(c)
                    col[r] = new
                elif r in col:
                    del col[r]
                    rows[r].discard(c)
            if c in stash and any(v in (1, -1) for v in col.values()):
                stash.discard(c)
            push(c)
        for r in col0:
            rows[r].discard(c0)
        del cols[c0]
        rows.pop(r0, None)
    leftover = [col for col in cols.values() if col]
    return pivots, leftover


def _dense_snf(cols: list[dict[int, int]]) -> list[int]:
    """Textbook Smith normal form of a small integer matrix; invariant factors."""
    if not cols:
        return []
    row_ids = sorted({r for col in cols for r in col})
    rmap = {r: i for i, r in enumerate(row_ids)}
    m, n = len(row_ids), len(cols)
    a = [[0] * n for _ in range(m)]
    for j, col in enumerate(cols):
        for r, v in col.items():
            a[rmap[r]][j] = v
    factors = []
    top = 0
    while True:
        entries = [(abs(a[i][j]), i, j) for i in range(top, m) for j in range(top, n) if a[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        a[top], a[pi] = a[pi], a[top]
        for row in a:
            row[top], row[pj] = row[pj], row[top]
        dirty = True
        while dirty:
            dirty = False
            for i in range(top + 1, m):
                if a[i][top]:
                    q = a[i][top] // a[top][top]
                    for j in range(top, n):
                        a[i][j] -= q * a[top][j]
                    if a[i][top]:
                        a[top], a[i] = a[i], a[top]
                        dirty = True
            for j in range(top + 1, n):
                if a[top][j]:
                    q = a[top][j] // a[top][top]
                    for i in range(top, m):
                        a[i][j] -= q * a[i][top]
                    if a[top][j]:
                        for i in range(top, m):
                            a[i][top], a[i][j] = a[i][j], a[i][top]
                        dirty = True
            if not dirty:
                d = a[top][top]
                bad = next(((i, j) for i in range(top + 1, m) for j in range(top + 1, n)
                            if a[i][j] % d), None)
                if bad is not None:
                    i, _ = bad
                    for j in range(top, n):
                        a[top][j] += a[i][j]
                    dirty = True
        factors.append(abs(a[top][top]))
        top += 1
        if top >= m or top >= n:
            break
    return factors


def _dense_rank_q(cols: list[dict[int, int]]) -> int:
    if not cols:
        return 0
    row_ids = sorted({r for col in cols for r in col})
    rmap = {r: i for i, r in enumerate(row_ids)}
    mat = [[Fraction(0)] * len(cols) for _ in row_ids]
    for j, col in enumerate(cols):
        for r, v in col.items():
            mat[rmap[r]][j] = Fraction(v)
    rank = 0
    for j in range(len(cols)):
        piv = next((i for i in range(rank, len(mat)) if mat[i][j]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        pv = mat[rank][j]
        for i in range(len(mat)):
            if i != rank and mat[i][j]:
                f = mat[i][j] / pv
                for jj in range(j, len(cols)):
                    mat[i][jj] -= f * mat[rank][jj]
        rank += 1
    return rank


def matrix_rank(cols: dict[int, dict[int, int]], field) -> int:
    """Rank of a sparse integer matrix over Q (field="Q") or F_p (field=p)."""
    if field == "Q":
        pivots, leftover = _sparse_eliminate(cols, None)
        return pivots + _dense_rank_q(leftover)
    p = int(field)
    if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"{p} is not prime")
    pivots, leftover = _sparse_eliminate(cols, p)
    assert not leftover
    return pivots


def matrix_snf(cols: dict[int, dict[int, int]]) -> list[int]:
    """Invariant factors (including the unit ones) of a sparse integer matrix."""
    pivots, leftover = _sparse_eliminate(cols, None)
    return [1] * pivots + _dense_snf(leftover)


# ---------------------------------------------------------------------------
# homology
# ---------------------------------------------------------------------------

def betti(complex_: SimplicialComplex, field) -> dict[int, int]:
    """Reduced Betti numbers by field rank of the augmented boundaries."""
    if not complex_.simplices:
        return {}
    cc = ChainComplex(complex_)
    ranks = [matrix_rank(b, field) for b in cc.boundaries]
    ranks.append(0)
    out = {}
    for k in range(len(cc.grades)):
        out[k] = len(cc.grades[k]) - ranks[k] - ranks[k + 1]
    return out


def integral_homology(complex_: SimplicialComplex) -> dict[int, tuple[int, tuple[int, ...]]]:
    """Per-degree (free rank, torsion divisors) via Smith normal form."""
    if not complex_.simplices:
        return {}
    cc = ChainComplex(complex_)
    snfs = [matrix_snf(b) for b in cc.boundaries]
    snfs.append([])
    out = {}
    for k in range(len(cc.grades)):
        rank = len(cc.grades[k]) - len(snfs[k]) - len(snfs[k + 1])
        torsion = tuple(sorted(d for d in snfs[k + 1] if d > 1))
        out[k] = (rank, torsion)
    return out


def components(complex_: SimplicialComplex) -> list[set]:
    """Connected components of the 1-skeleton (union-find over edges)."""
    parent = {v: v for v in complex_.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for s in complex_.simplices:
        if len(s) == 2:
            parent[find(s[0])] = find(s[1])
    groups: dict = {}
    for v in complex_.vertices:
        groups.setdefault(find(v), set()).add(v)
    return sorted(groups.values(), key=lambda g: sorted(g)[0])


def homology_report_json(complex_: SimplicialComplex) -> str:
    hom = integral_homology(complex_)
    return json.dumps({
        "degrees": {str(k): {"rank": r, "torsion": list(t)} for k, (r, t) in hom.items()}
    })


# ---------------------------------------------------------------------------
# selection posets and the wedge verification
# ---------------------------------------------------------------------------

def join_poset(sizes: list[int]) -> Poset:
    """Nonempty partial selections from k disjoint blocks, ordered by inclusion.

    Elements pick at most one item from each block; the order complex is
    contractible when some block has one item, and otherwise a wedge of
    prod(sizes_i - 1) spheres of dimension k-1.
    """
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("sizes must be positive")
    total = 1
    for s in sizes:
        total *= s
    if total > 10 ** 4:
        raise ValueError("desk scale exceeded: product of sizes > 10^4")
    items = []
    for block, size in enumerate(sizes):
        items.append([(block, i) for i in range(size)])
    elements = []
    for combo in itertools.product(*[[None, *blk] for blk in items]):
        chosen = frozenset(x for x in combo if x is not None)
        if chosen:
            elements.append(chosen)
    return Poset.from_leq(elements, lambda a, b: a <= b)


@dataclass
class WedgeReport:
    sizes: tuple[int, ...]
    betti_q: dict[int, int]
    betti_f2: dict[int, int]
    betti_f3: dict[int, int]
    torsion_free: bool
    expected_degree: int
    expected_rank: int
    ok: bool


def verify_wedge(sizes) -> WedgeReport:
    """Check homology of the selection poset against the wedge prediction."""
    sizes = tuple(sizes)
    complex_ = join_poset(list(sizes)).order_complex()
    bq = betti(complex_, "Q")
    b2 = betti(complex_, 2)
    b3 = betti(complex_, 3)
    hom = integral_homology(complex_)
    torsion_free = all(not t for _, t in hom.values())
    k = len(sizes)
    rank = 1
    for s in sizes:
        rank *= s - 1
    expected = {d: (rank if (d == k - 1 and rank) else 0) for d in bq}
    ok = (bq == expected and b2 == expected and b3 == expected and torsion_free
          and all(hom[d][0] == expected[d] for d in expected))
    return WedgeReport(sizes, bq, b2, b3, torsion_free, k - 1, rank, ok)
