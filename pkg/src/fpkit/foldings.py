"""Stallings foldings for finitely generated subgroups of free groups:
membership, rank, basis extraction, and canonical coset representatives.

A folded graph is a deterministic labeled automaton: no vertex has two
outgoing or two incoming edges with the same label.  Construction builds a
wedge of loops and folds with a worklist (lowest vertex first), then prunes
to the core and renumbers vertices canonically by breadth-first search, so
identical inputs produce identical graphs.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

from .words import Alphabet, Word

__all__ = ["SubgroupGraph", "fold"]

NONE = -1


class _UnionFind:
    def __init__(self):
        self.parent: list[int] = []

    def add(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a: int, b: int) -> int:
        """Merge, keeping the lower index as representative."""
        a, b = self.find(a), self.find(b)
        if a == b:
            return a
        if b < a:
            a, b = b, a
        self.parent[b] = a
        return a


class SubgroupGraph:
    """Folded core graph of a finitely generated subgroup of a free group.

    Immutable once built; ``nxt[v][g]``/``prv[v][g]`` give the endpoint of
    the g-labeled edge leaving/entering v (or -1).
    """

    __slots__ = ("alphabet", "nxt", "prv", "base", "_minreps", "_basis")

    def __init__(self, alphabet: Alphabet, nxt, prv):
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "nxt", tuple(tuple(row) for row in nxt))
        object.__setattr__(self, "prv", tuple(tuple(row) for row in prv))
        object.__setattr__(self, "base", 0)
        object.__setattr__(self, "_minreps", None)
        object.__setattr__(self, "_basis", None)

    def __setattr__(self, *a):
        raise AttributeError("SubgroupGraph is immutable")

    # -- basic structure -------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return len(self.nxt)

    @property
    def edge_count(self) -> int:
        return sum(1 for row in self.nxt for t in row if t != NONE)

    def rank(self) -> int:
        """Free rank: edges - vertices + 1 of the connected core."""
        if self.vertex_count == 0:
            return 0
        return self.edge_count - self.vertex_count + 1

    def step(self, v: int, gi: int, sign: int) -> int:
        return self.nxt[v][gi] if sign > 0 else self.prv[v][gi]

    def trace(self, w: Word) -> tuple[int, int]:
        """Follow ``w`` from the base; returns (vertex reached, number of
        letters consumed)."""
        v = self.base
        consumed = 0
        for g, s in w.letters():
            t = self.step(v, self.alphabet.index(g), s)
            if t == NONE:
                return v, consumed
            v = t
            consumed += 1
        return v, consumed

    def contains(self, w: Word) -> bool:
        """Membership by tracing; the empty word is always a member."""
        w = w.in_alphabet(self.alphabet)
        v = self.base
        for g, s in w.letters():
            t = self.step(v, self.alphabet.index(g), s)
            if t == NONE:
                return False
            v = t
        return v == self.base

    # -- spanning tree, basis, expressions --------------------------------

    def _tree(self):
        """BFS spanning tree from the base; edge order is alphabet order,
        forward before backward.  Returns (parent letter array, tree edge
        set keyed (source vertex, generator index))."""
        parent: list[tuple[int, int, int] | None] = [None] * self.vertex_count
        seen = [False] * self.vertex_count
        seen[self.base] = True
        tree_edges: set[tuple[int, int]] = set()
        order = deque([self.base])
        while order:
            v = order.popleft()
            for gi in range(len(self.alphabet)):
                for sign in (1, -1):
                    t = self.step(v, gi, sign)
                    if t != NONE and not seen[t]:
                        seen[t] = True
                        parent[t] = (v, gi, sign)
                        tree_edges.add((v, gi) if sign > 0 else (t, gi))
                        order.append(t)
        return parent, tree_edges

    def _path_syllables(self, parent, v) -> list[tuple[int, int]]:
        """Letters (generator index, sign) along the tree path base -> v."""
        out = []
        while v != self.base:
            u, gi, sign = parent[v]
            out.append((gi, sign))
            v = u
        out.reverse()
        return out

    def basis(self) -> tuple[Word, ...]:
        """Free basis from the spanning tree, in deterministic edge order."""
        if self._basis is not None:
            return self._basis[0]
        parent, tree_edges = self._tree()
        paths = {v: self._path_syllables(parent, v) for v in range(self.vertex_count)}
        gens = self.alphabet.generators
        basis: list[Word] = []
        index: dict[tuple[int, int], int] = {}
        for v in range(self.vertex_count):
            for gi in range(len(self.alphabet)):
                w = self.nxt[v][gi]
                if w == NONE or (v, gi) in tree_edges:
                    continue
                letters = paths[v] + [(gi, 1)] + [(h, -s) for h, s in reversed(paths[w])]
                word = Word(self.alphabet, [(gens[h], s) for h, s in letters])
                index[(v, gi)] = len(basis)
                basis.append(word)
        object.__setattr__(self, "_basis", (tuple(basis), index, parent, tree_edges))
        return self._basis[0]

    def express_in_basis(self, w: Word) -> list[tuple[int, int]]:
        """Schreier rewriting: expression of a member in the tree basis as
        (basis index, sign) factors.  Raises ValueError for non-members."""
        if not self.contains(w):
            raise ValueError(f"{w} is not in the subgroup")
        self.basis()
        _, index, _, tree_edges = self._basis
        out: list[tuple[int, int]] = []
        v = self.base
        for g, s in w.letters():
            gi = self.alphabet.index(g)
            if s > 0:
                key, t = (v, gi), self.nxt[v][gi]
            else:
                t = self.prv[v][gi]
                key = (t, gi)
            if key in index:
                out.append((index[key], s))
            v = t
        reduced: list[tuple[int, int]] = []
        for f in out:
            if reduced and reduced[-1][0] == f[0] and reduced[-1][1] == -f[1]:
                reduced.pop()
            else:
                reduced.append(f)
        return reduced

    # -- cosets ------------------------------------------------------------

    def _minrep_table(self):
        """Shortlex-minimal word from the base to every vertex, as letter
        lists; BFS with ordered edges yields shortlex minima."""
        if self._minreps is not None:
            return self._minreps
        reps: list[list[tuple[int, int]] | None] = [None] * self.vertex_count
        reps[self.base] = []
        order = deque([self.base])
        while order:
            v = order.popleft()
            for gi in range(len(self.alphabet)):
                for sign in (1, -1):
                    t = self.step(v, gi, sign)
                    if t != NONE and reps[t] is None:
                        reps[t] = reps[v] + [(gi, sign)]
                        order.append(t)
        object.__setattr__(self, "_minreps", reps)
        return reps

    def coset_of(self, w: Word) -> tuple[int, tuple[tuple[int, int], ...]]:
        """Identify the right coset (subgroup)*w by the maximal traced
        prefix: (vertex, untraceable tail letters)."""
        w = w.in_alphabet(self.alphabet)
        v = self.base
        tail: list[tuple[int, int]] = []
        letters = [(self.alphabet.index(g), s) for g, s in w.letters()]
        i = 0
        for gi, s in letters:
            t = self.step(v, gi, s)
            if t == NONE:
                break
            v = t
            i += 1
        tail = letters[i:]
        return v, tuple(tail)

    def coset_representative(self, w: Word) -> Word:
        """Shortlex-minimal word in the right coset (subgroup)*w."""
        v, tail = self.coset_of(w)
        reps = self._minrep_table()
        gens = self.alphabet.generators
        letters = reps[v] + list(tail)
        return Word(self.alphabet, [(gens[gi], s) for gi, s in letters])


def fold(alphabet: Alphabet, generators: Iterable[Word]) -> SubgroupGraph:
    """Folded core graph of the subgroup generated by the given words.
    Identity generators are ignored; the empty set yields the base vertex
    alone (the trivial subgroup)."""
    words = [w.in_alphabet(alphabet) for w in generators if not w.is_identity]
    uf = _UnionFind()
    base = uf.add()
    ngen = len(alphabet)
    # adjacency as edge multiset per vertex; folding merges endpoints
    out_edges: list[list[tuple[int, int]]] = [[]]  # vertex -> [(gi, target)]
    in_edges: list[list[tuple[int, int]]] = [[]]   # vertex -> [(gi, source)]

    def add_vertex():
        out_edges.append([])
        in_edges.append([])
        return uf.add()

    def add_edge(u, gi, v):
        out_edges[u].append((gi, v))
        in_edges[v].append((gi, u))

    for w in words:
        letters = [(alphabet.index(g), s) for g, s in w.letters()]
        cur = base
        for k, (gi, s) in enumerate(letters):
            nxt_v = base if k == len(letters) - 1 else add_vertex()
            if s > 0:
                add_edge(cur, gi, nxt_v)
            else:
                add_edge(nxt_v, gi, cur)
            cur = nxt_v

    # Fold: repeatedly merge distinct endpoints of same-labeled edges at a
    # vertex, lowest vertex index first.
    pending = deque(range(len(uf.parent)))
    in_queue = [True] * len(uf.parent)
    while pending:
        v = pending.popleft()
        in_queue[v] = False
        if uf.find(v) != v:
            continue
        merged = None
        for edges, _dir in ((out_edges, 1), (in_edges, -1)):
            by_label: dict[int, int] = {}
            for gi, t in edges[v]:
                t = uf.find(t)
                if gi in by_label and by_label[gi] != t:
                    merged = (by_label[gi], t)
                    break
                by_label[gi] = t
            if merged:
                break
        if not merged:
            continue
        a, b = merged
        rep = uf.union(a, b)
        other = b if rep == a else a
        out_edges[rep].extend(out_edges[other])
        in_edges[rep].extend(in_edges[other])
        out_edges[other] = []
        in_edges[other] = []
        for x in (rep, v):
            x = uf.find(x)
            if not in_queue[x]:
                pending.append(x)
                in_queue[x] = True

    # Deduplicate edges on representatives.
    live = sorted({uf.find(v) for v in range(len(uf.parent))})
    nxt_map: dict[int, dict[int, int]] = {v: {} for v in live}
    prv_map: dict[int, dict[int, int]] = {v: {} for v in live}
    for v in live:
        for gi, t in out_edges[v]:
            t = uf.find(t)
            nxt_map[v][gi] = t
            prv_map[t][gi] = v

    # Prune to the core: drop degree-one vertices other than the base.
    base_rep = uf.find(base)
    changed = True
    while changed:
        changed = False
        for v in list(nxt_map):
            if v == base_rep:
                continue
            degree = len(nxt_map[v]) + len(prv_map[v])
            if degree <= 1:
                for gi, t in list(nxt_map[v].items()):
                    del prv_map[t][gi]
                for gi, s in list(prv_map[v].items()):
                    del nxt_map[s][gi]
                del nxt_map[v]
                del prv_map[v]
                changed = True

    # Canonical renumbering by BFS from the base.
    number = {base_rep: 0}
    order = deque([base_rep])
    while order:
        v = order.popleft()
        for gi in range(ngen):
            for neighbor in (nxt_map[v].get(gi, NONE), prv_map[v].get(gi, NONE)):
                if neighbor != NONE and neighbor not in number:
                    number[neighbor] = len(number)
                    order.append(neighbor)
    size = len(number)
    nxt = [[NONE] * ngen for _ in range(size)]
    prv = [[NONE] * ngen for _ in range(size)]
    for v, nv in number.items():
        for gi, t in nxt_map[v].items():
            nxt[nv][gi] = number[t]
        for gi, s in prv_map[v].items():
            prv[nv][gi] = number[s]
    return SubgroupGraph(alphabet, nxt, prv)
