"""Todd-Coxeter coset enumeration (HLT strategy with lookahead on table
overflow), yielding certified finite-index results.

A Completed(n) outcome certifies index exactly n: the finished table is a
transitive permutation representation in which every relator acts trivially
and the subgroup generators fix coset 1.  The certificate is re-verified on
every completed run.  Indeterminate means only that the coset limit was
exhausted; it is never evidence of infinite index.

Cosets are numbered in definition order and coincidences are processed
immediately through a union-find, so identical inputs produce bit-identical
tables.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

from .presentations import Presentation
from .words import Word

__all__ = [
    "LimitTooSmall",
    "IncompleteTable",
    "CosetTable",
    "EnumerationResult",
    "enumerate_cosets",
    "order",
    "permutation_rep",
]

UNDEF = -1


class LimitTooSmall(ValueError):
    """max_cosets must be a positive integer."""


class IncompleteTable(ValueError):
    """permutation_rep requires a complete table."""


class CosetTable:
    """Completed (or overflowed) coset table; cosets are 1-based, row
    entries alternate generator and inverse-generator columns."""

    __slots__ = ("alphabet", "rows", "status", "max_cosets")

    def __init__(self, alphabet, rows, status, max_cosets):
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "rows", tuple(tuple(r) for r in rows))
        object.__setattr__(self, "status", status)
        object.__setattr__(self, "max_cosets", max_cosets)

    def __setattr__(self, *a):
        raise AttributeError("CosetTable is immutable")

    @property
    def complete(self) -> bool:
        return self.status == "complete"

    @property
    def index(self) -> int:
        return len(self.rows)

    def __repr__(self):
        return f"CosetTable(status={self.status}, cosets={len(self.rows)})"


class EnumerationResult:
    """Completed(index) or Indeterminate(cosets_used, limit)."""

    __slots__ = ("outcome", "index", "cosets_used", "limit", "table")

    def __init__(self, outcome, index, cosets_used, limit, table):
        object.__setattr__(self, "outcome", outcome)
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "cosets_used", cosets_used)
        object.__setattr__(self, "limit", limit)
        object.__setattr__(self, "table", table)

    def __setattr__(self, *a):
        raise AttributeError("EnumerationResult is immutable")

    @property
    def completed(self) -> bool:
        return self.outcome == "completed"

    def __repr__(self):
        if self.completed:
            return f"Completed({self.index})"
        return f"Indeterminate(cosets_used={self.cosets_used}, limit={self.limit})"


class _TableFull(Exception):
    pass


class _Enumerator:
    def __init__(self, presentation: Presentation, subgroup_gens, max_cosets: int):
        self.presentation = presentation
        alphabet = presentation.alphabet
        self.ncols = 2 * len(alphabet)
        self.relators = [self._cols(w) for w in presentation.relators]
        self.subgroup = [self._cols(w.in_alphabet(alphabet)) for w in subgroup_gens]
        self.max_cosets = max_cosets
        self.table: list[list[int] | None] = [[UNDEF] * self.ncols]
        self.p = [0]
        self.live = 1
        self.deductions: list[tuple[int, int]] = []
        self.edp = self._edp_tables()

    def _edp_tables(self) -> list[list[tuple[int, ...]]]:
        """Per column, the cyclic rotations of every relator (and inverse)
        beginning with that column; scanning them at a new edge propagates
        its consequences immediately."""
        tables: list[list[tuple[int, ...]]] = [[] for _ in range(self.ncols)]
        seen: list[set] = [set() for _ in range(self.ncols)]
        for rel in self.relators:
            inverse = tuple(c ^ 1 for c in reversed(rel))
            for word in (rel, inverse):
                for i, col in enumerate(word):
                    rot = word[i:] + word[:i]
                    if rot not in seen[col]:
                        seen[col].add(rot)
                        tables[col].append(rot)
        return tables

    def _cols(self, w: Word) -> tuple[int, ...]:
        alphabet = self.presentation.alphabet
        out = []
        for g, s in w.letters():
            gi = alphabet.index(g)
            out.append(2 * gi if s > 0 else 2 * gi + 1)
        return tuple(out)

    def find(self, x: int) -> int:
        p = self.p
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def define(self, a: int, col: int) -> int:
        if self.live >= self.max_cosets:
            raise _TableFull
        n = len(self.table)
        self.table.append([UNDEF] * self.ncols)
        self.p.append(n)
        self.live += 1
        self.table[a][col] = n
        self.table[n][col ^ 1] = a
        self.deductions.append((a, col))
        return n

    def coincidence(self, a: int, b: int) -> None:
        stack = [(a, b)]
        find = self.find
        table = self.table
        while stack:
            a, b = stack.pop()
            a, b = find(a), find(b)
            if a == b:
                continue
            if b < a:
                a, b = b, a
            self.p[b] = a
            self.live -= 1
            row_a, row_b = table[a], table[b]
            table[b] = None
            for col in range(self.ncols):
                tb = row_b[col]
                if tb == UNDEF:
                    continue
                tb = find(tb)
                ta = row_a[col]
                if ta == UNDEF:
                    row_a[col] = tb
                    self.deductions.append((a, col))
                    # ensure the reverse edge exists on tb's row
                    row_t = table[tb]
                    rt = row_t[col ^ 1]
                    if rt == UNDEF:
                        row_t[col ^ 1] = a
                        self.deductions.append((tb, col ^ 1))
                    elif find(rt) != a:
                        stack.append((rt, a))
                else:
                    ta = find(ta)
                    if ta != tb:
                        stack.append((ta, tb))

    def set_edge(self, a: int, col: int, b: int) -> None:
        row_a = self.table[a]
        cur = row_a[col]
        if cur != UNDEF:
            cur = self.find(cur)
            if cur != b:
                self.coincidence(cur, b)
            return
        row_a[col] = b
        self.deductions.append((a, col))
        row_b = self.table[self.find(b)]
        cur = row_b[col ^ 1]
        if cur == UNDEF:
            row_b[col ^ 1] = a
            self.deductions.append((b, col ^ 1))
        else:
            cur = self.find(cur)
            if cur != a:
                self.coincidence(cur, a)

    def scan(self, alpha: int, word: tuple[int, ...], fill: bool) -> None:
        """Trace ``word`` as a cycle at alpha, filling gaps when requested
        (the HLT scan-and-fill step)."""
        find = self.find
        table = self.table
        L = len(word)
        f = alpha
        i = 0
        while True:
            while i < L:
                t = table[f][word[i]]
                if t == UNDEF:
                    break
                f = find(t)
                i += 1
            if i == L:
                if f != alpha:
                    self.coincidence(f, alpha)
                return
            b = alpha
            j = L - 1
            while j >= i:
                t = table[b][word[j] ^ 1]
                if t == UNDEF:
                    break
                b = find(t)
                j -= 1
            if j < i:
                if f != b:
                    self.coincidence(f, b)
                return
            if j == i:
                self.set_edge(f, word[i], b)
                return
            if not fill:
                return
            self.define(f, word[i])

    def lookahead(self) -> None:
        """Scan every relator at every live coset without defining."""
        for gamma in range(len(self.table)):
            if self.table[gamma] is None or self.find(gamma) != gamma:
                continue
            for rel in self.relators:
                self.scan(gamma, rel, fill=False)
                if self.find(gamma) != gamma:
                    break

    def propagate(self) -> None:
        """Drain the deduction stack: every new edge is scanned against all
        relator rotations beginning with its label, so consequences (new
        deductions and coincidences) spread immediately."""
        deductions = self.deductions
        table = self.table
        find = self.find
        edp = self.edp
        while deductions:
            a, col = deductions.pop()
            a = find(a)
            if table[a] is None or table[a][col] == UNDEF:
                continue
            for rot in edp[col]:
                self.scan(a, rot, fill=False)
                row = table[a]
                if row is None:
                    break
                if find(a) != a:
                    break

    def run(self) -> None:
        for w in self.subgroup:
            self.scan(0, w, fill=True)
            self.propagate()
        idx = 0
        while idx < len(self.table):
            if self.table[idx] is None or self.find(idx) != idx:
                idx += 1
                continue
            try:
                self._process(idx)
            except _TableFull:
                before = self.live
                self.deductions.clear()
                self.lookahead()
                if self.live >= before or self.live >= self.max_cosets:
                    raise
                self.propagate()
                continue  # retry the same coset after the lookahead freed room
            idx += 1

    def _process(self, alpha: int) -> None:
        for rel in self.relators:
            self.scan(alpha, rel, fill=True)
            self.propagate()
            if self.table[alpha] is None or self.find(alpha) != alpha:
                return
        row = self.table[alpha]
        for col in range(self.ncols):
            if row[col] == UNDEF:
                self.define(alpha, col)
                self.propagate()
                row = self.table[alpha]
                if row is None or self.find(alpha) != alpha:
                    return

    # -- output -----------------------------------------------------------

    def compress(self) -> CosetTable:
        find = self.find
        live = [i for i in range(len(self.table)) if self.table[i] is not None
                and find(i) == i]
        number = {old: new + 1 for new, old in enumerate(live)}
        rows = []
        for old in live:
            rows.append(tuple(number[find(t)] if t != UNDEF else 0
                              for t in self.table[old]))
        return CosetTable(self.presentation.alphabet, rows, "complete", self.max_cosets)


def _validate(table: CosetTable, presentation: Presentation,
              subgroup_gens: Sequence[Word]) -> None:
    """Certificate check: permutation action, trivial relator action,
    transitivity, and subgroup generators fixing coset 1."""
    perms = permutation_rep(table)
    n = table.index
    alphabet = presentation.alphabet

    def act(coset, word):
        for g, s in word.letters():
            gi = alphabet.index(g)
            coset = table.rows[coset - 1][2 * gi if s > 0 else 2 * gi + 1]
        return coset

    for perm in perms.values():
        if sorted(perm) != list(range(1, n + 1)):
            raise AssertionError("coset action is not a permutation")
    for rel in presentation.relators:
        for coset in range(1, n + 1):
            if act(coset, rel) != coset:
                raise AssertionError("relator does not act trivially")
    for w in subgroup_gens:
        if act(1, w.in_alphabet(alphabet)) != 1:
            raise AssertionError("subgroup generator moves coset 1")
    seen = {1}
    frontier = deque([1])
    while frontier:
        c = frontier.popleft()
        for t in table.rows[c - 1]:
            if t not in seen:
                seen.add(t)
                frontier.append(t)
    if len(seen) != n:
        raise AssertionError("coset action is not transitive")


def enumerate_cosets(presentation: Presentation, subgroup_gens: Iterable[Word] = (),
                     max_cosets: int = 100000) -> EnumerationResult:
    """Enumerate cosets of the subgroup generated by ``subgroup_gens``.

    Completed(n) certifies index exactly n.  Indeterminate(used, limit)
    reports an exhausted bound and nothing more.
    """
    if max_cosets < 1:
        raise LimitTooSmall("max_cosets must be >= 1")
    subgroup_gens = tuple(subgroup_gens)
    enum = _Enumerator(presentation, subgroup_gens, max_cosets)
    try:
        enum.run()
    except _TableFull:
        return EnumerationResult("indeterminate", None, enum.live, max_cosets, None)
    table = enum.compress()
    _validate(table, presentation, subgroup_gens)
    return EnumerationResult("completed", table.index, table.index, max_cosets, table)


def order(presentation: Presentation, max_cosets: int = 100000) -> EnumerationResult:
    """Group order via enumeration over the trivial subgroup."""
    return enumerate_cosets(presentation, (), max_cosets)


def permutation_rep(table: CosetTable) -> dict:
    """Per-generator permutations of {1..index} as tuples; generator g maps
    coset i to perm[i-1]."""
    if not table.complete:
        raise IncompleteTable("enumeration did not complete")
    out = {}
    for gi, g in enumerate(table.alphabet.generators):
        out[g.name] = tuple(row[2 * gi] for row in table.rows)
    return out
