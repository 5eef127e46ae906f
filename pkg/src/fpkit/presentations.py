"""Finite group presentations: the text DSL, abelianization and first
homology, Tietze moves, free products, and relator addition.

Grammar (EBNF)::

    presentation := "<" genlist "|" relist ">"
    genlist      := ident ("," ident)* | empty
    relist       := item ("," item)* | empty
    item         := word | word "=" word        (identification sugar)

Files are UTF-8, one presentation per file; a line whose first non-blank
character is ``#`` is a comment.  Relators are stored cyclically reduced
(the conjugator is discarded; normal closures are conjugation-invariant).
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .intlinalg import AbelianInvariants, IntMatrix, abelian_invariants
from .words import (Alphabet, Generator, ParseError, UndeclaredGenerator, Word,
                    _Tokens, _parse_word_body, cyclic_reduce, invert, multiply,
                    substitute, GeneratorMap)

__all__ = [
    "EmptyRelator",
    "NameCollision",
    "InvalidCertificate",
    "GeneratorInUse",
    "Presentation",
    "FreeBase",
    "DiscreteSubgroupInput",
    "AmalgamStep",
    "HNNStep",
    "CentralExtensionStep",
    "SubgroupKind",
    "AddGenerator",
    "RemoveGenerator",
    "AddRelator",
    "RemoveRelator",
    "parse",
    "emit",
    "abelianization_matrix",
    "h1",
    "free_product",
    "quotient_add_relators",
    "apply_tietze",
    "read_presentation_file",
    "write_presentation_file",
]


class EmptyRelator(ValueError):
    """A relator reduced to the identity word."""


class NameCollision(ValueError):
    """Generator names clash and auto-renaming was not requested."""


class InvalidCertificate(ValueError):
    """A Tietze certificate failed its free-group verification."""


class GeneratorInUse(ValueError):
    """RemoveGenerator without a defining relator for the generator."""


# ---------------------------------------------------------------------------
# Construction traces
# ---------------------------------------------------------------------------

class SubgroupKind:
    FREE = "free"
    ABELIAN = "abelian"
    CYCLIC = "cyclic"
    OTHER = "other"


class FreeBase:
    """Leaf: a free group on named generators."""

    __slots__ = ("generators",)

    def __init__(self, generators: Iterable[str]):
        object.__setattr__(self, "generators", tuple(generators))

    def __setattr__(self, *a):
        raise AttributeError("trace steps are immutable")

    def __repr__(self):
        return f"FreeBase({list(self.generators)})"


class DiscreteSubgroupInput:
    """Leaf: an externally supplied presentation accepted as input."""

    __slots__ = ("label",)

    def __init__(self, label: str = "input"):
        object.__setattr__(self, "label", label)

    def __setattr__(self, *a):
        raise AttributeError("trace steps are immutable")

    def __repr__(self):
        return f"DiscreteSubgroupInput({self.label!r})"


class AmalgamStep:
    __slots__ = ("amalgamated_subgroup_kind", "left", "right")

    def __init__(self, amalgamated_subgroup_kind: str, left, right):
        object.__setattr__(self, "amalgamated_subgroup_kind", amalgamated_subgroup_kind)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def __setattr__(self, *a):
        raise AttributeError("trace steps are immutable")

    def __repr__(self):
        return f"AmalgamStep({self.amalgamated_subgroup_kind}, {self.left!r}, {self.right!r})"


class HNNStep:
    __slots__ = ("associated_subgroup_kind", "base", "stable_letter")

    def __init__(self, associated_subgroup_kind: str, base, stable_letter: str = ""):
        object.__setattr__(self, "associated_subgroup_kind", associated_subgroup_kind)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "stable_letter", stable_letter)

    def __setattr__(self, *a):
        raise AttributeError("trace steps are immutable")

    def __repr__(self):
        return f"HNNStep({self.associated_subgroup_kind}, {self.stable_letter!r}, {self.base!r})"


class CentralExtensionStep:
    __slots__ = ("base",)

    def __init__(self, base):
        object.__setattr__(self, "base", base)

    def __setattr__(self, *a):
        raise AttributeError("trace steps are immutable")

    def __repr__(self):
        return f"CentralExtensionStep({self.base!r})"


def trace_steps(trace) -> list:
    """Flatten a trace tree to a post-order step sequence."""
    if trace is None:
        return []
    if isinstance(trace, (FreeBase, DiscreteSubgroupInput)):
        return [trace]
    if isinstance(trace, AmalgamStep):
        return trace_steps(trace.left) + trace_steps(trace.right) + [trace]
    if isinstance(trace, (HNNStep, CentralExtensionStep)):
        return trace_steps(trace.base) + [trace]
    raise TypeError(f"not a trace step: {trace!r}")


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------

def _prepare_relator(alphabet: Alphabet, w: Word) -> Word:
    w = w.in_alphabet(alphabet)
    core, _ = cyclic_reduce(w)
    if core.is_identity:
        raise EmptyRelator(f"relator {w} reduces to the identity")
    return core


class Presentation:
    """Generators plus cyclically reduced relator words, with an optional
    construction trace."""

    __slots__ = ("alphabet", "relators", "trace")

    def __init__(self, generators: Alphabet | Iterable, relators: Iterable[Word] = (),
                 trace=None):
        alphabet = generators if isinstance(generators, Alphabet) else Alphabet(generators)
        rels = tuple(_prepare_relator(alphabet, w) for w in relators)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "relators", rels)
        object.__setattr__(self, "trace", trace)

    def __setattr__(self, *a):
        raise AttributeError("Presentation is immutable")

    @property
    def generators(self) -> tuple[Generator, ...]:
        return self.alphabet.generators

    def generator_count(self) -> int:
        return len(self.alphabet)

    def relator_count(self) -> int:
        return len(self.relators)

    @property
    def is_free(self) -> bool:
        return not self.relators

    def with_trace(self, trace) -> "Presentation":
        p = Presentation.__new__(Presentation)
        object.__setattr__(p, "alphabet", self.alphabet)
        object.__setattr__(p, "relators", self.relators)
        object.__setattr__(p, "trace", trace)
        return p

    def word(self, text: str) -> Word:
        return self.alphabet.word(text)

    def __eq__(self, other):
        """Structural equality; traces are metadata and not compared."""
        return (isinstance(other, Presentation)
                and self.alphabet == other.alphabet
                and tuple(w._key() for w in self.relators)
                == tuple(w._key() for w in other.relators))

    def __hash__(self):
        return hash((self.alphabet, tuple(w._key() for w in self.relators)))

    def __repr__(self):
        return f"Presentation({emit(self)!r})"


def parse(text: str, line_offset: int = 1) -> Presentation:
    """Parse presentation text.  ``lhs = rhs`` items desugar to the relator
    lhs * rhs^-1."""
    toks = _Tokens(text, line_offset)
    toks.expect_sym("<")
    names = []
    while True:
        kind, value, off = toks.peek()
        if kind == "sym" and value == "|":
            toks.next()
            break
        kind, value, off = toks.next()
        if kind != "ident":
            toks.error(f"expected generator name, found {value!r}", off)
        names.append(value)
        kind, value, off = toks.peek()
        if kind == "sym" and value == ",":
            toks.next()
        elif kind == "sym" and value == "|":
            toks.next()
            break
        else:
            toks.error(f"expected ',' or '|', found {value!r}", off)
    try:
        alphabet = Alphabet(names)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    relators = []
    while True:
        kind, value, off = toks.peek()
        if kind == "sym" and value == ">":
            toks.next()
            break
        if kind is None:
            toks.error("unterminated presentation; expected '>'")
        w = _parse_word_body(toks, alphabet)
        kind, value, off = toks.peek()
        if kind == "sym" and value == "=":
            toks.next()
            rhs = _parse_word_body(toks, alphabet)
            w = multiply(w, invert(rhs))
        relators.append(w)
        kind, value, off = toks.peek()
        if kind == "sym" and value == ",":
            toks.next()
        elif kind == "sym" and value == ">":
            toks.next()
            break
        else:
            toks.error(f"expected ',' or '>', found {value!r}", off)
    if not toks.exhausted:
        toks.error(f"trailing input {toks.peek()[1]!r}")
    return Presentation(alphabet, relators)


def emit(p: Presentation) -> str:
    """Canonical text form; ``parse(emit(p))`` is structurally equal to p."""
    gens = ", ".join(p.alphabet.names())
    rels = ", ".join(str(w) for w in p.relators)
    return "< " + (gens + " " if gens else "") + "| " + (rels + " " if rels else "") + ">"


def read_presentation_file(path) -> Presentation:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if not ln.lstrip().startswith("#")]
    return parse("\n".join(lines))


def write_presentation_file(path, p: Presentation) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit(p) + "\n")


# ---------------------------------------------------------------------------
# Abelianization
# ---------------------------------------------------------------------------

def abelianization_matrix(p: Presentation) -> IntMatrix:
    """Entry (i, j) is the exponent sum of generator j in relator i."""
    cols = len(p.alphabet)
    entries = []
    for rel in p.relators:
        sums = [0] * cols
        for g, e in rel.syllables:
            sums[p.alphabet.index(g)] += e
        entries.extend(sums)
    return IntMatrix(len(p.relators), cols, entries)


def h1(p: Presentation) -> AbelianInvariants:
    """First homology (abelianization invariants) of the presented group."""
    return abelian_invariants(abelianization_matrix(p))


# ---------------------------------------------------------------------------
# Products and quotients
# ---------------------------------------------------------------------------

def _free_product_with_maps(p: Presentation, q: Presentation, auto_rename: bool):
    """Free product plus the embedding GeneratorMaps of both factors."""
    merged_names = list(p.alphabet.names())
    rename: dict[str, str] = {}
    for name in q.alphabet.names():
        if name in merged_names or name in rename.values():
            if not auto_rename:
                raise NameCollision(f"generator {name!r} appears in both factors")
            probe = Alphabet(merged_names)
            fresh = probe.fresh_name(name)
            rename[name] = fresh
            merged_names.append(fresh)
        else:
            rename[name] = name
            merged_names.append(name)
    alphabet = Alphabet(merged_names)
    left_map = GeneratorMap(p.alphabet, alphabet,
                            {g: alphabet.gen(g.name) for g in p.alphabet})
    right_map = GeneratorMap(q.alphabet, alphabet,
                             {g: alphabet.gen(rename[g.name]) for g in q.alphabet})
    relators = [w.in_alphabet(alphabet) for w in p.relators]
    relators += [substitute(w, right_map) for w in q.relators]
    trace = AmalgamStep(SubgroupKind.FREE, effective_trace(p), effective_trace(q))
    return Presentation(alphabet, relators, trace=trace), left_map, right_map


def free_product(p: Presentation, q: Presentation, auto_rename: bool = False) -> Presentation:
    """Free product; clashing names raise NameCollision unless auto_rename
    applies the deterministic fresh-name scheme."""
    result, _, _ = _free_product_with_maps(p, q, auto_rename)
    return result


def quotient_add_relators(p: Presentation, ws: Iterable[Word]) -> Presentation:
    """Append relators (cyclically reduced); EmptyRelator when one reduces
    to the identity."""
    new = [_prepare_relator(p.alphabet, w) for w in ws]
    return Presentation(p.alphabet, p.relators + tuple(new), trace=p.trace)


def effective_trace(p: Presentation):
    """A presentation without trace counts as an externally supplied input;
    a free presentation counts as a free base."""
    if p.trace is not None:
        return p.trace
    if p.is_free:
        return FreeBase(p.alphabet.names())
    return DiscreteSubgroupInput(emit(p))


# ---------------------------------------------------------------------------
# Tietze moves
# ---------------------------------------------------------------------------

class AddGenerator:
    def __init__(self, name: str, definition: Word):
        self.name = name
        self.definition = definition


class RemoveGenerator:
    def __init__(self, name: str):
        self.name = name


class AddRelator:
    """certificate: sequence of (relator index, conjugator word, sign)."""

    def __init__(self, consequence: Word, certificate: Sequence[tuple[int, Word, int]]):
        self.consequence = consequence
        self.certificate = tuple(certificate)


class RemoveRelator:
    """certificate indices refer to the relators of the resulting
    presentation (the list without the removed entry)."""

    def __init__(self, index: int, certificate: Sequence[tuple[int, Word, int]]):
        self.index = index
        self.certificate = tuple(certificate)


def _certificate_product(alphabet: Alphabet, relators: Sequence[Word],
                         certificate) -> Word:
    acc = alphabet.identity()
    for idx, conj, sign in certificate:
        if not (0 <= idx < len(relators)) or sign not in (1, -1):
            raise InvalidCertificate(f"bad certificate entry ({idx}, ., {sign})")
        term = relators[idx] if sign == 1 else invert(relators[idx])
        acc = multiply(acc, term.conjugate_by(conj.in_alphabet(alphabet)))
    return acc


def apply_tietze(p: Presentation, move) -> Presentation:
    """Apply a Tietze move; the result presents an isomorphic group, so h1
    is unchanged."""
    if isinstance(move, AddGenerator):
        if move.name in p.alphabet:
            raise NameCollision(f"generator {move.name!r} already declared")
        alphabet = p.alphabet.extend([move.name])
        defn = move.definition.in_alphabet(alphabet)
        g = alphabet.gen(move.name)
        relators = [w.in_alphabet(alphabet) for w in p.relators]
        relators.append(multiply(invert(g), defn))
        return Presentation(alphabet, relators, trace=p.trace)

    if isinstance(move, RemoveGenerator):
        if move.name not in p.alphabet:
            raise UndeclaredGenerator(f"generator {move.name!r} not declared")
        gen = p.alphabet[move.name]
        defining = None
        for i, rel in enumerate(p.relators):
            occurrences = [s for s in rel.syllables if s[0] == gen]
            if len(occurrences) == 1 and abs(occurrences[0][1]) == 1:
                defining = i
                break
        if defining is None:
            raise GeneratorInUse(f"no defining relator for {move.name!r}")
        rel = p.relators[defining]
        pos = next(i for i, (g, _) in enumerate(rel.syllables) if g == gen)
        eps = rel.syllables[pos][1]
        before = Word(p.alphabet, rel.syllables[:pos], _check=False)
        after = Word(p.alphabet, rel.syllables[pos + 1:], _check=False)
        # rel = before * gen^eps * after = 1  =>  gen^eps = before^-1 * after^-1
        image = multiply(invert(before), invert(after))
        if eps == -1:
            image = invert(image)
        remaining = Alphabet([g for g in p.alphabet if g != gen])
        images = {g: remaining.gen(g.name) for g in remaining}
        images[gen] = image.in_alphabet(remaining) if all(
            g != gen for g, _ in image.syllables) else None
        if images[gen] is None:
            raise GeneratorInUse(f"defining relator for {move.name!r} is self-referential")
        fmap = GeneratorMap(p.alphabet, remaining, images)
        new_relators = []
        for i, r in enumerate(p.relators):
            if i == defining:
                continue
            img = substitute(r, fmap)
            core, _ = cyclic_reduce(img)
            if not core.is_identity:
                new_relators.append(core)
        return Presentation(remaining, new_relators, trace=p.trace)

    if isinstance(move, AddRelator):
        consequence = move.consequence.in_alphabet(p.alphabet)
        witness = _certificate_product(p.alphabet, p.relators, move.certificate)
        if witness != consequence:
            raise InvalidCertificate("certificate product does not equal the consequence")
        return quotient_add_relators(p, [consequence])

    if isinstance(move, RemoveRelator):
        if not (0 <= move.index < len(p.relators)):
            raise InvalidCertificate(f"relator index {move.index} out of range")
        remaining = tuple(r for i, r in enumerate(p.relators) if i != move.index)
        witness = _certificate_product(p.alphabet, remaining, move.certificate)
        if witness != p.relators[move.index]:
            raise InvalidCertificate("certificate does not derive the removed relator")
        return Presentation(p.alphabet, remaining, trace=p.trace)

    raise TypeError(f"not a Tietze move: {move!r}")
