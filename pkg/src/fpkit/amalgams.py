"""Normal forms and the word problem in amalgamated free products whose
factors are free groups.

An element is written as ``prefix * c_1 * ... * c_k`` where the prefix lies
in the amalgamated subgroup (stored in left-factor letters) and the c_i are
shortlex-minimal right-coset representatives from strictly alternating
factors, none in the amalgamated subgroup.  A word is trivial iff its form
has an empty syllable list and identity prefix.

Only free-group factors are supported; factor membership in the amalgamated
subgroup is decided by Stallings folding, and conversion across the
identification goes through the folded graph's tree basis.
"""

from __future__ import annotations

from heapq import heappop, heappush
from typing import Iterable, Sequence

from .foldings import SubgroupGraph, fold
from .presentations import Presentation
from .words import Alphabet, Word, commutator, invert, multiply

__all__ = [
    "MixedLetterError",
    "NotFreeBase",
    "TrivialWitnessWord",
    "ExpressionError",
    "AmalgamSpec",
    "NormalForm",
    "build_witness_amalgam",
    "normal_form",
    "is_trivial_word",
]


class MixedLetterError(ValueError):
    """The input word uses a letter belonging to neither factor."""


class NotFreeBase(ValueError):
    """The witness amalgam requires a relator-free base presentation."""


class TrivialWitnessWord(ValueError):
    """The witness word must not be the empty word."""


class ExpressionError(RuntimeError):
    """Failed to express a subgroup element in the given generators."""


def _peel_expression(target: Word, gens: Sequence[Word],
                     visit_limit: int = 50000) -> list[tuple[int, int]]:
    """Write ``target`` as a product of the given generators by shortest-
    first search over one-generator peels.  Verified by the caller."""
    if target.is_identity:
        return []
    maxgen = max(g.letter_length for g in gens)
    cap = target.letter_length + 2 * maxgen + 4
    inverses = [invert(g) for g in gens]
    start_key = target._key()
    seen = {start_key: (None, None, target)}
    heap = [(target.letter_length, 0, target)]
    tick = 0
    visited = 0
    while heap:
        _, _, word = heappop(heap)
        visited += 1
        if visited > visit_limit:
            break
        for i in range(len(gens)):
            for sign, inv in ((1, inverses[i]), (-1, gens[i])):
                nxt = multiply(inv, word)
                if nxt.letter_length > cap:
                    continue
                key = nxt._key()
                if key in seen:
                    continue
                seen[key] = (word._key(), (i, sign), nxt)
                if nxt.is_identity:
                    moves = [(i, sign)]
                    back = word._key()
                    while back != start_key:
                        prev_key, move, _ = seen[back]
                        moves.append(move)
                        back = prev_key
                    moves.reverse()
                    return moves
                tick += 1
                heappush(heap, (nxt.letter_length, tick, nxt))
    raise ExpressionError(f"could not express {target} in the given generators")


def _evaluate(factors: Iterable[tuple[int, int]], gens: Sequence[Word],
              alphabet: Alphabet) -> Word:
    acc = alphabet.identity()
    for i, sign in factors:
        acc = multiply(acc, gens[i] if sign > 0 else invert(gens[i]))
    return acc


class _Factor:
    """One free factor with its amalgamated subgroup and the expression of
    the folded graph's tree basis in the given generating words."""

    def __init__(self, alphabet: Alphabet, gen_words: Sequence[Word]):
        self.alphabet = alphabet
        self.gen_words = tuple(w.in_alphabet(alphabet) for w in gen_words)
        self.graph = fold(alphabet, self.gen_words)
        self.basis_expressions: list[list[tuple[int, int]]] = []
        for b in self.graph.basis():
            expr = _peel_expression(b, self.gen_words)
            if _evaluate(expr, self.gen_words, alphabet) != b:
                raise ExpressionError("peel verification failed")
            self.basis_expressions.append(expr)

    def member_in_given_generators(self, h: Word) -> list[tuple[int, int]]:
        """Expression of a subgroup member in the given generating words."""
        out: list[tuple[int, int]] = []
        for bi, sign in self.graph.express_in_basis(h):
            expr = self.basis_expressions[bi]
            if sign > 0:
                out.extend(expr)
            else:
                out.extend((i, -s) for i, s in reversed(expr))
        return out


class AmalgamSpec:
    """Two free factors glued along isomorphic finitely generated subgroups.

    The identification pairs the i-th left generating word with the i-th
    right generating word; both lists must be free bases of the subgroups
    they generate (rank equals count).
    """

    def __init__(self, left_alphabet: Alphabet, right_alphabet: Alphabet,
                 left_subgroup_gens: Sequence[Word], right_subgroup_gens: Sequence[Word]):
        shared = set(left_alphabet.names()) & set(right_alphabet.names())
        if shared:
            raise MixedLetterError(f"factor alphabets share generators {sorted(shared)}")
        if len(left_subgroup_gens) != len(right_subgroup_gens):
            raise ValueError("identification requires equally many generators")
        self.left = _Factor(left_alphabet, left_subgroup_gens)
        self.right = _Factor(right_alphabet, right_subgroup_gens)
        n = len(left_subgroup_gens)
        if self.left.graph.rank() != n or self.right.graph.rank() != n:
            raise ValueError("subgroup generators are not a free basis "
                             f"(ranks {self.left.graph.rank()}, {self.right.graph.rank()}, "
                             f"count {n})")
        self.word_alphabet = left_alphabet.merge(right_alphabet)

    # -- factor bookkeeping ------------------------------------------------

    @property
    def left_alphabet(self) -> Alphabet:
        return self.left.alphabet

    @property
    def right_alphabet(self) -> Alphabet:
        return self.right.alphabet

    @property
    def left_subgroup(self) -> SubgroupGraph:
        return self.left.graph

    @property
    def right_subgroup(self) -> SubgroupGraph:
        return self.right.graph

    def identification(self) -> list[tuple[Word, Word]]:
        return list(zip(self.left.gen_words, self.right.gen_words))

    def _side_of_generator(self, g) -> int:
        if g.name in self.left.alphabet:
            return 0
        if g.name in self.right.alphabet:
            return 1
        raise MixedLetterError(f"letter {g.name!r} belongs to neither factor")

    def _factor(self, side: int) -> _Factor:
        return self.left if side == 0 else self.right

    def convert(self, h: Word, to_side: int) -> Word:
        """Carry a subgroup element across the identification."""
        from_side = 1 - to_side
        src, dst = self._factor(from_side), self._factor(to_side)
        h = h.in_alphabet(src.alphabet)
        expr = src.member_in_given_generators(h)
        return _evaluate(expr, dst.gen_words, dst.alphabet)

    def _chunks(self, w: Word) -> list[tuple[int, Word]]:
        out: list[tuple[int, Word]] = []
        for g, e in w.syllables:
            side = self._side_of_generator(g)
            piece = self._factor(side).alphabet.gen(g.name, e)
            if out and out[-1][0] == side:
                out[-1] = (side, multiply(out[-1][1], piece))
            else:
                out.append((side, piece))
        return [(side, chunk) for side, chunk in out if not chunk.is_identity]


class NormalForm:
    """prefix in the amalgamated subgroup (left-factor letters) followed by
    strictly alternating canonical coset-representative syllables."""

    __slots__ = ("prefix", "syllables")

    def __init__(self, prefix: Word, syllables: Sequence[Word]):
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "syllables", tuple(syllables))

    def __setattr__(self, *a):
        raise AttributeError("NormalForm is immutable")

    @property
    def is_identity(self) -> bool:
        return not self.syllables and self.prefix.is_identity

    @property
    def syllable_count(self) -> int:
        return len(self.syllables)

    def __eq__(self, other):
        return (isinstance(other, NormalForm) and self.prefix == other.prefix
                and self.syllables == other.syllables)

    def __hash__(self):
        return hash((self.prefix, self.syllables))

    def __repr__(self):
        return f"NormalForm(prefix={self.prefix}, syllables={[str(s) for s in self.syllables]})"

    def reconstruct(self, alphabet: Alphabet) -> Word:
        acc = self.prefix.in_alphabet(alphabet)
        for s in self.syllables:
            acc = multiply(acc, s.in_alphabet(alphabet))
        return acc


def normal_form(spec: AmalgamSpec, w: Word) -> NormalForm:
    """Normal form of ``w``; the identity of the amalgam is the unique word
    whose form has an empty syllable list and identity prefix."""
    chunks = spec._chunks(w)
    prefix = spec.left.alphabet.identity()  # element of the amalgamated subgroup
    syllables: list[tuple[int, Word]] = []
    for side, chunk in reversed(chunks):
        factor = spec._factor(side)
        h_here = prefix.in_alphabet(factor.alphabet) if side == 0 \
            else spec.convert(prefix, to_side=1)
        u = multiply(chunk, h_here)
        if syllables and syllables[0][0] == side:
            u = multiply(u, syllables[0][1])
            rest = syllables[1:]
        else:
            rest = syllables
        if factor.graph.contains(u):
            new_prefix = u if side == 0 else spec.convert(u, to_side=0)
            prefix, syllables = new_prefix, rest
        else:
            rep = factor.graph.coset_representative(u)
            h2 = multiply(u, invert(rep))
            prefix = h2 if side == 0 else spec.convert(h2, to_side=0)
            syllables = [(side, rep)] + rest
    return NormalForm(prefix, [word for _, word in syllables])


def is_trivial_word(spec: AmalgamSpec, w: Word) -> bool:
    return normal_form(spec, w).is_identity


def witness_subgroup_words(base_gens: Sequence, w: Word, a: Word, b: Word,
                           c: Word | None = None):
    """Left-hand sides (with the middle letter ``b``) of the four witness
    relation families; pass c to produce the right-hand sides instead."""
    if c is None:
        lhs = [b]
        lhs.append(invert(a) * b * a)
        lhs.append(invert(a) ** 2 * invert(b) * a * b * a ** 2)
        lhs.append(invert(a) ** 3 * commutator(w, b) * a ** 3)
        for j, g in enumerate(base_gens, start=1):
            lhs.append(invert(a) ** (3 + j) * g * b * a ** (3 + j))
        return lhs
    rhs = [b]
    rhs.append(invert(c) * invert(b) * c * b * c)
    rhs.append(invert(c) ** 2 * invert(b) * c * b * c ** 2)
    rhs.append(invert(c) ** 3 * b * c ** 3)
    for j, _ in enumerate(base_gens, start=1):
        rhs.append(invert(c) ** (3 + j) * b * c ** (3 + j))
    return rhs


def build_witness_amalgam(p: Presentation, w: Word) -> AmalgamSpec:
    """Amalgam decomposition of the witness group over a free base.

    Left factor: the base's generators plus fresh ``a`` and ``b1``; right
    factor: fresh ``b2`` and ``c``.  The amalgamated subgroups are generated
    by ``b1``/``b2`` together with the left/right sides of the four witness
    relation families (with the middle letter written ``b1`` or ``b2``), and
    the identification pairs them in listed order.
    """
    if not p.is_free:
        raise NotFreeBase("witness amalgam supports relator-free bases only")
    w = w.in_alphabet(p.alphabet)
    if w.is_identity:
        raise TrivialWitnessWord("witness word must be nonempty")
    taken = p.alphabet
    a_name = taken.fresh_name("a")
    taken = taken.extend([a_name])
    b1_name = taken.fresh_name("b1")
    taken = taken.extend([b1_name])
    b2_name = taken.fresh_name("b2")
    taken = taken.extend([b2_name])
    c_name = taken.fresh_name("c")
    left_alphabet = p.alphabet.extend([a_name, b1_name])
    right_alphabet = Alphabet([b2_name, c_name])
    a = left_alphabet.gen(a_name)
    b1 = left_alphabet.gen(b1_name)
    b2 = right_alphabet.gen(b2_name)
    c = right_alphabet.gen(c_name)
    base_gens = [left_alphabet.gen(g.name) for g in p.alphabet]
    left_gens = witness_subgroup_words(base_gens, w.in_alphabet(left_alphabet), a, b1)
    right_gens = witness_subgroup_words(base_gens, w, a, b2, c=c)
    return AmalgamSpec(left_alphabet, right_alphabet, left_gens, right_gens)
