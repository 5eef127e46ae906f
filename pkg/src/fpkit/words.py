"""Exact free-group word algebra over named generator alphabets.

Words are stored in syllable form ``(generator, exponent)`` with
arbitrary-precision exponents, always freely reduced.  All values here are
immutable and all operations are pure functions, so everything is safe for
unrestricted concurrent use.

Text syntax (used by the parser and ``str()``): juxtaposition with ``*``
optional, inverses as ``^-1``, powers as ``^<integer>``, parentheses allowed.
Example: ``a^-1*b*a*(c^-1*b^-1*c*b*c)^-1``.  The identity word prints and
parses as ``1``.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "AlphabetMismatch",
    "UnmappedGenerator",
    "UndeclaredGenerator",
    "ParseError",
    "Generator",
    "Alphabet",
    "Word",
    "GeneratorMap",
    "reduce_word",
    "multiply",
    "invert",
    "commutator",
    "substitute",
    "cyclic_reduce",
    "parse_word",
]

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*(?:#[0-9]+)?\Z")


class AlphabetMismatch(ValueError):
    """Operands use a generator outside the other operand's alphabet."""


class UnmappedGenerator(KeyError):
    """A generator map was applied to a word it is not total on."""


class UndeclaredGenerator(ValueError):
    """A word mentions a generator that its alphabet does not declare."""


class ParseError(ValueError):
    """Syntax error in word or presentation text; carries line/column."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class Generator:
    """A named generator.  Comparison and hashing are by name only.

    Names match ``letter (letter|digit|_)*`` with an optional ``#k`` suffix;
    the suffix is reserved for fresh copies made by constructions.
    """

    __slots__ = ("name",)

    def __init__(self, name: str):
        if not _NAME_RE.match(name):
            raise ValueError(f"invalid generator name {name!r}")
        object.__setattr__(self, "name", name)

    def __setattr__(self, *a):
        raise AttributeError("Generator is immutable")

    def __eq__(self, other):
        return isinstance(other, Generator) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return f"Generator({self.name!r})"

    def __str__(self):
        return self.name


def _as_generator(g) -> Generator:
    return g if isinstance(g, Generator) else Generator(g)


class Alphabet:
    """An ordered set of distinct generators.

    Words carry a reference to their alphabet; products across different
    alphabets are rejected unless every used generator of the right operand
    is declared by the left alphabet (a merged alphabet must be requested
    explicitly via :meth:`merge`).
    """

    __slots__ = ("generators", "_index")

    def __init__(self, generators: Iterable[Generator | str] = ()):
        gens = tuple(_as_generator(g) for g in generators)
        index: dict[str, int] = {}
        for i, g in enumerate(gens):
            if g.name in index:
                raise ValueError(f"duplicate generator {g.name!r}")
            index[g.name] = i
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "_index", index)

    def __setattr__(self, *a):
        raise AttributeError("Alphabet is immutable")

    def __iter__(self) -> Iterator[Generator]:
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def __contains__(self, g) -> bool:
        name = g.name if isinstance(g, Generator) else g
        return name in self._index

    def __getitem__(self, name: str) -> Generator:
        if name not in self._index:
            raise UndeclaredGenerator(f"generator {name!r} not in alphabet")
        return self.generators[self._index[name]]

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.names() == other.names()

    def __hash__(self):
        return hash(self.names())

    def __repr__(self):
        return f"Alphabet({', '.join(self.names())})"

    def names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    def index(self, g: Generator | str) -> int:
        name = g.name if isinstance(g, Generator) else g
        if name not in self._index:
            raise UndeclaredGenerator(f"generator {name!r} not in alphabet")
        return self._index[name]

    def merge(self, other: "Alphabet") -> "Alphabet":
        """Union alphabet: self's generators first, then other's new ones."""
        extra = [g for g in other.generators if g.name not in self._index]
        return Alphabet(self.generators + tuple(extra))

    def extend(self, generators: Iterable[Generator | str]) -> "Alphabet":
        return Alphabet(self.generators + tuple(_as_generator(g) for g in generators))

    def fresh_name(self, base: str) -> str:
        """Deterministic collision-checked fresh name: ``base`` if unused,
        otherwise ``root#1``, ``root#2``, ... where root strips any existing
        ``#k`` suffix."""
        if base not in self._index:
            return base
        root = base.split("#", 1)[0]
        k = 1
        while f"{root}#{k}" in self._index:
            k += 1
        return f"{root}#{k}"

    # -- word construction helpers ------------------------------------

    def identity(self) -> "Word":
        return Word(self, ())

    def gen(self, name: str, exponent: int = 1) -> "Word":
        g = self[name]
        if exponent == 0:
            return self.identity()
        return Word(self, ((g, exponent),))

    def word(self, text: str) -> "Word":
        return parse_word(text, self)


def _reduced(syllables: Iterable[tuple[Generator, int]]) -> tuple:
    out: list[tuple[Generator, int]] = []
    for g, e in syllables:
        if e == 0:
            continue
        if out and out[-1][0] == g:
            s = out[-1][1] + e
            if s == 0:
                out.pop()
            else:
                out[-1] = (g, s)
        else:
            out.append((g, e))
    return tuple(out)


class Word:
    """A freely reduced word.  Construct via :func:`reduce_word`,
    :meth:`Alphabet.word`, or the ``*``/``~``/``**`` operators."""

    __slots__ = ("alphabet", "syllables")

    def __init__(self, alphabet: Alphabet, syllables: Sequence[tuple[Generator, int]] = (),
                 _check: bool = True):
        syl = tuple(syllables)
        if _check:
            syl = _reduced(syl)
            for g, _ in syl:
                if g.name not in alphabet._index:
                    raise UndeclaredGenerator(f"generator {g.name!r} not in alphabet")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "syllables", syl)

    def __setattr__(self, *a):
        raise AttributeError("Word is immutable")

    # -- basic protocol -------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, Word) and self.alphabet == other.alphabet
                and self._key() == other._key())

    def __hash__(self):
        return hash(self._key())

    def _key(self):
        return tuple((g.name, e) for g, e in self.syllables)

    def __repr__(self):
        return f"Word({self})"

    def __str__(self):
        if not self.syllables:
            return "1"
        parts = []
        for g, e in self.syllables:
            parts.append(g.name if e == 1 else f"{g.name}^{e}")
        return "*".join(parts)

    @property
    def is_identity(self) -> bool:
        return not self.syllables

    @property
    def letter_length(self) -> int:
        """Total letter count, i.e. the sum of absolute exponents."""
        return sum(abs(e) for _, e in self.syllables)

    @property
    def syllable_count(self) -> int:
        return len(self.syllables)

    def letters(self) -> Iterator[tuple[Generator, int]]:
        """Yield single letters ``(generator, +1 or -1)``."""
        for g, e in self.syllables:
            s = 1 if e > 0 else -1
            for _ in range(abs(e)):
                yield (g, s)

    def exponent_sum(self, g: Generator | str) -> int:
        name = g.name if isinstance(g, Generator) else g
        return sum(e for h, e in self.syllables if h.name == name)

    # -- group operations -----------------------------------------------

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __pow__(self, n: int) -> "Word":
        if n == 0:
            return Word(self.alphabet, (), _check=False)
        base = self if n > 0 else invert(self)
        n = abs(n)
        if len(base.syllables) == 1:
            g, e = base.syllables[0]
            return Word(self.alphabet, ((g, e * n),), _check=False)
        result = Word(self.alphabet, (), _check=False)
        square = base
        while n:
            if n & 1:
                result = multiply(result, square)
            square = multiply(square, square)
            n >>= 1
        return result

    def conjugate_by(self, u: "Word") -> "Word":
        """u * self * u^-1."""
        return multiply(multiply(u, self), invert(u))

    def in_alphabet(self, alphabet: Alphabet) -> "Word":
        """Re-embed into another alphabet declaring all used generators."""
        for g, _ in self.syllables:
            if g.name not in alphabet._index:
                raise AlphabetMismatch(f"generator {g.name!r} not in target alphabet")
        return Word(alphabet, self.syllables, _check=False)


def reduce_word(alphabet: Alphabet, raw: Iterable[tuple[Generator | str, int]]) -> Word:
    """Freely reduce a raw syllable sequence.  Zero exponents are dropped
    silently; the result is the unique reduced form and reduction is
    idempotent."""
    pairs = [(_as_generator(g), e) for g, e in raw]
    for g, _ in pairs:
        if g.name not in alphabet._index:
            raise UndeclaredGenerator(f"generator {g.name!r} not in alphabet")
    return Word(alphabet, _reduced(pairs), _check=False)


def multiply(u: Word, v: Word) -> Word:
    """Freely reduced product u*v.  The result satisfies
    ``letter_length <= u.letter_length + v.letter_length``."""
    if u.alphabet != v.alphabet:
        v = v.in_alphabet(u.alphabet)  # raises AlphabetMismatch when not possible
    out = list(u.syllables)
    for g, e in v.syllables:
        if out and out[-1][0] == g:
            s = out[-1][1] + e
            if s == 0:
                out.pop()
            else:
                out[-1] = (g, s)
        else:
            out.append((g, e))
    return Word(u.alphabet, tuple(out), _check=False)


def invert(w: Word) -> Word:
    return Word(w.alphabet, tuple((g, -e) for g, e in reversed(w.syllables)), _check=False)


def commutator(u: Word, v: Word) -> Word:
    """[u, v] = u^-1 v^-1 u v, freely reduced."""
    return multiply(multiply(invert(u), invert(v)), multiply(u, v))


class GeneratorMap:
    """A map from a source alphabet into words over a target alphabet,
    total on its declared source.  Induces a free-group homomorphism."""

    __slots__ = ("source", "target", "_images")

    def __init__(self, source: Alphabet, target: Alphabet,
                 images: Mapping[Generator | str, Word]):
        imgs: dict[str, Word] = {}
        for g, w in images.items():
            name = g.name if isinstance(g, Generator) else g
            if name not in source._index:
                raise UndeclaredGenerator(f"source generator {name!r} not in source alphabet")
            imgs[name] = w.in_alphabet(target)
        missing = [n for n in source.names() if n not in imgs]
        if missing:
            raise UnmappedGenerator(f"map not total; missing {missing}")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "_images", imgs)

    def __setattr__(self, *a):
        raise AttributeError("GeneratorMap is immutable")

    def __call__(self, g: Generator | str) -> Word:
        name = g.name if isinstance(g, Generator) else g
        if name not in self._images:
            raise UnmappedGenerator(f"generator {name!r} not mapped")
        return self._images[name]

    def items(self):
        return [(self.source[name], w) for name, w in sorted(self._images.items(),
                key=lambda kv: self.source.index(kv[0]))]

    def apply(self, w: Word) -> Word:
        return substitute(w, self)

    def compose(self, inner: "GeneratorMap") -> "GeneratorMap":
        """Pointwise composition (self o inner): first inner, then self."""
        images = {name: substitute(w, self) for name, w in inner._images.items()}
        return GeneratorMap(inner.source, self.target, images)

    @classmethod
    def identity(cls, alphabet: Alphabet) -> "GeneratorMap":
        return cls(alphabet, alphabet, {g: Word(alphabet, ((g, 1),), _check=False)
                                        for g in alphabet})


def substitute(w: Word, f: GeneratorMap) -> Word:
    """Image of ``w`` under the homomorphism induced by ``f``; raises
    UnmappedGenerator when ``w`` uses a generator outside the source."""
    result = f.target.identity()
    for g, e in w.syllables:
        result = multiply(result, f(g) ** e)
    return result


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split ``w = conjugator * core * conjugator^-1`` with the core
    cyclically reduced.  Works at syllable level, so large exponents stay
    compact."""
    syl = list(w.syllables)
    prefix: list[tuple[Generator, int]] = []
    while len(syl) >= 2:
        g0, e0 = syl[0]
        g1, e1 = syl[-1]
        if g0 != g1 or (e0 > 0) == (e1 > 0):
            break
        k = min(abs(e0), abs(e1))
        s = 1 if e0 > 0 else -1
        prefix.append((g0, s * k))
        e0n = e0 - s * k
        e1n = e1 + s * k
        if e0n:
            syl[0] = (g0, e0n)
        else:
            syl.pop(0)
        if e1n:
            syl[-1] = (g1, e1n)
        else:
            syl.pop()
    core = Word(w.alphabet, tuple(syl), _check=False)
    conj = Word(w.alphabet, _reduced(prefix), _check=False)
    return core, conj


# ---------------------------------------------------------------------------
# Word text syntax
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z][A-Za-z0-9_]*(?:#[0-9]+)?)"
    r"|(?P<int>-?[0-9]+)"
    r"|(?P<sym>[*^()|<>,=]))"
)


class _Tokens:
    """Tokenizer shared by the word parser and the presentation DSL."""

    def __init__(self, text: str, line_offset: int = 1):
        self.text = text
        self.pos = 0
        self.line_offset = line_offset
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m:
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                line, col = self.position(pos + (len(text[pos:]) - len(stripped)))
                raise ParseError(f"unexpected character {stripped[0]!r}", line, col)
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def position(self, offset: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, offset) + self.line_offset
        last_nl = self.text.rfind("\n", 0, offset)
        col = offset - last_nl if last_nl >= 0 else offset + 1
        return line, col

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def error(self, message, offset=None):
        if offset is None:
            offset = self.peek()[2]
        line, col = self.position(offset)
        raise ParseError(message, line, col)

    def expect_sym(self, sym):
        kind, value, off = self.next()
        if kind != "sym" or value != sym:
            self.error(f"expected {sym!r}, found {value!r}", off)

    @property
    def exhausted(self):
        return self.i >= len(self.tokens)


def _parse_factor(toks: _Tokens, alphabet: Alphabet) -> Word:
    kind, value, off = toks.next()
    if kind == "ident":
        if value not in alphabet:
            line, col = toks.position(off)
            raise UndeclaredGenerator(
                f"generator {value!r} not declared (line {line}, column {col})")
        base = alphabet.gen(value)
    elif kind == "int" and value == "1":
        base = alphabet.identity()
    elif kind == "sym" and value == "(":
        base = _parse_word_body(toks, alphabet, stop={")"})
        toks.expect_sym(")")
    else:
        toks.error(f"expected generator or '(', found {value!r}", off)
    kind, value, _ = toks.peek()
    if kind == "sym" and value == "^":
        toks.next()
        kind, value, off = toks.next()
        if kind != "int":
            toks.error(f"expected integer exponent, found {value!r}", off)
        base = base ** int(value)
    return base


_WORD_STOPS = {",", "|", ">", ")", "="}


def _parse_word_body(toks: _Tokens, alphabet: Alphabet, stop=frozenset()) -> Word:
    w = _parse_factor(toks, alphabet)
    while True:
        kind, value, _ = toks.peek()
        if kind is None:
            break
        if kind == "sym":
            if value in stop or value in _WORD_STOPS:
                break
            if value == "*":
                toks.next()
                w = multiply(w, _parse_factor(toks, alphabet))
                continue
            if value == "(":
                w = multiply(w, _parse_factor(toks, alphabet))
                continue
            toks.error(f"unexpected {value!r} in word")
        else:
            w = multiply(w, _parse_factor(toks, alphabet))
    return w


def parse_word(text: str, alphabet: Alphabet) -> Word:
    """Parse word text syntax over the given alphabet."""
    toks = _Tokens(text)
    if toks.exhausted:
        raise ParseError("empty word text")
    w = _parse_word_body(toks, alphabet)
    if not toks.exhausted:
        toks.error(f"trailing input {toks.peek()[1]!r}")
    return w
