"""The named group constructions: witness groups over a designated word,
amalgam joins that kill first homology, universal central extensions with
their lambda words, commutator collection, class-P trace audits, and the
Turing-machine-to-group-triviality reduction.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, Sequence

from .amalgams import witness_subgroup_words
from .intlinalg import IntMatrix, smith_normal_form, solve_integer, _snf_with_inverses
from .machines import ModularMachine, TuringMachine, compile_modular
from .presentations import (AmalgamStep, CentralExtensionStep, DiscreteSubgroupInput,
                            FreeBase, HNNStep, Presentation, SubgroupKind,
                            _free_product_with_maps, abelianization_matrix,
                            effective_trace, h1, quotient_add_relators)
from .words import (Alphabet, Generator, GeneratorMap, Word, commutator, invert,
                    multiply, substitute)

__all__ = [
    "EmptyWitnessWord",
    "NotPerfect",
    "NotSubpresentation",
    "AlphabetError",
    "InconsistentData",
    "WitnessOptions",
    "CollectionResult",
    "witness",
    "amalgam_join",
    "kill_h1",
    "lambda_words",
    "universal_central_extension",
    "uce_morphism",
    "push_marked_right",
    "step4_identity",
    "verify_class_P",
    "tm_to_group",
]


class EmptyWitnessWord(ValueError):
    """The witness construction needs a nonempty designated word."""


class NotPerfect(ValueError):
    """The operation requires a presentation with trivial first homology."""


class NotSubpresentation(ValueError):
    """Generators/relators are not literally contained in the superset."""


class AlphabetError(ValueError):
    """A word or generator lives over the wrong alphabet."""


class InconsistentData(ValueError):
    """Supplied factorization data fails its free-group identity."""


class WitnessOptions:
    """torsion_order, when set (an integer >= 2), adds the relator w^order
    for the designated word w (the finite-order variant of the witness)."""

    __slots__ = ("torsion_order",)

    def __init__(self, torsion_order: int | None = None):
        if torsion_order is not None and torsion_order < 2:
            raise ValueError("torsion_order must be >= 2")
        object.__setattr__(self, "torsion_order", torsion_order)

    def __setattr__(self, *a):
        raise AttributeError("WitnessOptions is immutable")


# ---------------------------------------------------------------------------
# Witness groups
# ---------------------------------------------------------------------------

def _witness_with_names(p: Presentation, w: Word, opts: WitnessOptions):
    w = w.in_alphabet(p.alphabet)
    if w.is_identity:
        raise EmptyWitnessWord("witness word must be nonempty")
    taken = p.alphabet
    a_name = taken.fresh_name("a")
    taken = taken.extend([a_name])
    b_name = taken.fresh_name("b")
    taken = taken.extend([b_name])
    c_name = taken.fresh_name("c")
    alphabet = p.alphabet.extend([a_name, b_name, c_name])
    a = alphabet.gen(a_name)
    b = alphabet.gen(b_name)
    c = alphabet.gen(c_name)
    base_gens = [alphabet.gen(g.name) for g in p.alphabet]
    w_here = w.in_alphabet(alphabet)
    lhs = witness_subgroup_words(base_gens, w_here, a, b)
    rhs = witness_subgroup_words(base_gens, w_here, a, b, c=c)
    relators = [r.in_alphabet(alphabet) for r in p.relators]
    relators += [multiply(l, invert(r)) for l, r in zip(lhs[1:], rhs[1:])]
    if opts.torsion_order is not None:
        relators.append(w_here ** opts.torsion_order)
    left = AmalgamStep(SubgroupKind.FREE, effective_trace(p),
                       FreeBase((a_name, b_name)))
    trace = AmalgamStep(SubgroupKind.FREE, left, FreeBase((b_name, c_name)))
    return Presentation(alphabet, relators, trace=trace), a, b, c


def witness(p: Presentation, w: Word, opts: WitnessOptions = WitnessOptions()) -> Presentation:
    """Adjoin fresh generators a, b, c and the four witness relation
    families for the designated word w; the result is perfect, and it is
    trivial exactly when w is trivial in the base group.

    Generator count is gens(p) + 3, relator count rels(p) + 3 + gens(p),
    plus one when a torsion order is requested.
    """
    pres, _, _, _ = _witness_with_names(p, w, opts)
    return pres


def witness_distinguished_generator(p: Presentation, w: Word,
                                    opts: WitnessOptions = WitnessOptions()) -> Generator:
    """The normally generating letter c of witness(p, w, opts)."""
    _, _, _, c = _witness_with_names(p, w, opts)
    return c


# ---------------------------------------------------------------------------
# Amalgam joins and H1 killing
# ---------------------------------------------------------------------------

def amalgam_join(base: Presentation,
                 attachments: Sequence[tuple[Presentation, Word, Generator]]) -> Presentation:
    """Free product of the base with the attached presentations plus the
    identification relators g_j = c_j.

    Each attachment is (witness presentation, word g over the base,
    distinguished generator c of the witness).  Attached copies are renamed
    by the fresh-name scheme; the base's generator names are preserved.
    """
    result = base
    trace = effective_trace(base)
    for wit, g_word, c_gen in attachments:
        try:
            g_word = g_word.in_alphabet(base.alphabet)
        except Exception as exc:
            raise AlphabetError(f"attachment word {g_word} is not over the base") from exc
        if c_gen.name not in wit.alphabet:
            raise AlphabetError(f"generator {c_gen.name!r} is not in the witness")
        product, _, right_map = _free_product_with_maps(result, wit, auto_rename=True)
        c_here = right_map(c_gen)
        ident = multiply(g_word.in_alphabet(product.alphabet), invert(c_here))
        result = quotient_add_relators(product, [ident])
        trace = AmalgamStep(SubgroupKind.CYCLIC, trace, effective_trace(wit))
        result = result.with_trace(trace)
    return result


def kill_h1(p: Presentation) -> Presentation:
    """Kill first homology by amalgamating one witness group per invariant
    factor along cyclic subgroups.

    Generator words for the factors come from the Smith transform of the
    transposed exponent matrix; torsion factors get the finite-order witness
    variant and free factors the torsion-free one.  The result has trivial
    first homology.
    """
    invariants = h1(p)
    if invariants.is_trivial:
        return p
    b = abelianization_matrix(p).transpose()
    dec, u_inv, _ = _snf_with_inverses(b)
    diag = dec.D.diagonal()
    rank = len([d for d in diag if d != 0])
    targets: list[tuple[Word, int | None]] = []
    ngens = len(p.alphabet)
    for i in range(ngens):
        d = diag[i] if i < len(diag) else 0
        if i < rank and d == 1:
            continue
        word = p.alphabet.identity()
        for j, g in enumerate(p.alphabet.generators):
            word = multiply(word, p.alphabet.gen(g.name, u_inv[j, i]))
        torsion = d if (i < rank and d >= 2) else None
        targets.append((word, torsion))
    attachments = []
    for k, (a_word, torsion) in enumerate(targets, start=1):
        v_alpha = Alphabet([f"v{k}"])
        base = Presentation(v_alpha)
        y, _, _, c = _witness_with_names(base, v_alpha.gen(f"v{k}"),
                                         WitnessOptions(torsion_order=torsion))
        attachments.append((y, a_word, c))
    result = amalgam_join(p, attachments)
    if not h1(result).is_trivial:
        raise AssertionError("kill_h1 failed to produce a perfect presentation")
    return result


# ---------------------------------------------------------------------------
# Universal central extensions
# ---------------------------------------------------------------------------

def lambda_words(p: Presentation) -> list[Word]:
    """For each generator f_i, a plain ordered product of relator powers
    whose abelianized image equals that of f_i.

    Exponents are the canonical integer solution of the transposed
    abelianization system, so the output is deterministic.  Raises
    NotPerfect when no solution exists for some generator.
    """
    at = abelianization_matrix(p).transpose()
    out = []
    for i in range(len(p.alphabet)):
        target = [1 if j == i else 0 for j in range(len(p.alphabet))]
        exponents = solve_integer(at, target)
        if exponents is None:
            raise NotPerfect("presentation has nontrivial first homology")
        lam = p.alphabet.identity()
        for j, rel in enumerate(p.relators):
            lam = multiply(lam, rel ** exponents[j])
        out.append(lam)
    return out


def universal_central_extension(p: Presentation,
                                lambda_override: Mapping[str, Word] | None = None) -> Presentation:
    """Presentation of the universal central extension of a perfect group:
    same generators, with relators all commutators [f_i, r_j] plus the
    lambda words.

    Commutators that freely reduce to the identity (f_i and r_j powers of a
    common letter) carry no relation and are dropped.  ``lambda_override``
    lets a caller supply specific lambda words (used when aligning the
    extension of a subpresentation inside a larger one); each override must
    be a product of relators with the abelianization of its generator.
    """
    if not h1(p).is_trivial:
        raise NotPerfect("universal central extension requires a perfect presentation")
    lambdas = lambda_words(p)
    if lambda_override:
        for i, g in enumerate(p.alphabet.generators):
            if g.name in lambda_override:
                cand = lambda_override[g.name].in_alphabet(p.alphabet)
                for h in p.alphabet.generators:
                    want = 1 if h == g else 0
                    if cand.exponent_sum(h) != want:
                        raise InconsistentData(
                            f"override for {g.name!r} has wrong abelianization")
                lambdas[i] = cand
    relators = []
    for g in p.alphabet.generators:
        f_word = p.alphabet.gen(g.name)
        for rel in p.relators:
            cm = commutator(f_word, rel)
            if not cm.is_identity:
                relators.append(cm)
    relators.extend(lambdas)
    trace = CentralExtensionStep(effective_trace(p))
    return Presentation(p.alphabet, relators, trace=trace)


def uce_morphism(psub: Presentation, psuper: Presentation) -> GeneratorMap:
    """Identity-on-names map from the universal central extension of a
    subpresentation into that of a superset presentation.

    Requires psub's generators and relators to appear literally among
    psuper's.  The super extension is aligned by reusing psub's lambda
    words for the shared generators (a product of psub relators is a
    product of psuper relators); every relator of the sub extension is then
    verified to appear verbatim among the aligned super extension's.
    """
    sub_names = set(psub.alphabet.names())
    if not sub_names.issubset(set(psuper.alphabet.names())):
        raise NotSubpresentation("generators are not a subset")
    super_rel_keys = {r._key() for r in psuper.relators}
    for r in psub.relators:
        if r._key() not in super_rel_keys:
            raise NotSubpresentation(f"relator {r} is not a relator of the superset")
    sub_lambdas = lambda_words(psub)
    override = {g.name: lam.in_alphabet(psuper.alphabet)
                for g, lam in zip(psub.alphabet.generators, sub_lambdas)}
    uce_sub = universal_central_extension(psub)
    uce_super = universal_central_extension(psuper, lambda_override=override)
    aligned_keys = {r._key() for r in uce_super.relators}
    for r in uce_sub.relators:
        if r._key() not in aligned_keys:
            raise NotSubpresentation(
                f"extension relator {r} missing from the aligned superset extension")
    return GeneratorMap(uce_sub.alphabet, uce_super.alphabet,
                        {g: uce_super.alphabet.gen(g.name) for g in uce_sub.alphabet})


# ---------------------------------------------------------------------------
# Collection
# ---------------------------------------------------------------------------

class CollectionResult:
    """residual plus the ordered conjugates (conjugator, letter, sign);
    residual * prod(conjugator * letter^sign * conjugator^-1) equals the
    input in the free group."""

    __slots__ = ("residual", "conjugated_relators")

    def __init__(self, residual: Word, conjugated_relators):
        object.__setattr__(self, "residual", residual)
        object.__setattr__(self, "conjugated_relators", tuple(conjugated_relators))

    def __setattr__(self, *a):
        raise AttributeError("CollectionResult is immutable")

    def reconstruct(self) -> Word:
        acc = self.residual
        for conj, letter, sign in self.conjugated_relators:
            piece = conj.alphabet.gen(letter.name, sign).conjugate_by(conj)
            acc = multiply(acc, piece)
        return acc

    def __repr__(self):
        items = [(str(c), g.name, s) for c, g, s in self.conjugated_relators]
        return f"CollectionResult(residual={self.residual}, conjugates={items})"


def push_marked_right(w: Word, marked: Iterable[Generator | str]) -> CollectionResult:
    """Delete the marked letters from ``w`` and account for each deleted
    occurrence by a conjugate: the occurrence with unmarked suffix u
    becomes the conjugate (u^-1, letter, sign).  Signed exponent sums per
    marked letter are preserved, and the reconstruction identity holds
    exactly in the free group."""
    marked_names = {g.name if isinstance(g, Generator) else g for g in marked}
    alphabet = w.alphabet
    suffix = alphabet.identity()
    entries_rev = []
    for g, s in reversed(list(w.letters())):
        if g.name in marked_names:
            entries_rev.append((invert(suffix), g, s))
        else:
            suffix = multiply(alphabet.gen(g.name, s), suffix)
    residual = suffix
    return CollectionResult(residual, tuple(reversed(entries_rev)))


def step4_identity(base_gens: Alphabet | Sequence[Generator],
                   commutator_data: Mapping,
                   f: GeneratorMap) -> dict[str, CollectionResult]:
    """Collection certificates for the words e_j built from commutator
    factorizations x_j = (prod [g,h]) * lambda_j under a map of the shape
    f(x_k) = x_k z_k.

    ``commutator_data`` maps each generator (or name) to a sequence of word
    pairs, or to (pairs, lambda_word) to supply lambda explicitly; a
    supplied lambda is checked against the free-group identity and
    InconsistentData is raised on failure.  Each e_j collects to residual 1
    with a conjugate certificate whose marked exponent sums vanish.
    """
    gens = list(base_gens.generators) if isinstance(base_gens, Alphabet) else list(base_gens)
    source = f.source
    for g in gens:
        image = f(g)
        syl = image.syllables
        ok = bool(syl) and syl[0][0].name == g.name and syl[0][1] >= 1
        if ok:
            tail_start = 1 if syl[0][1] == 1 else None
            if tail_start is None:
                ok = False
            else:
                for h, _ in syl[1:]:
                    if h.name in source:
                        ok = False
                        break
        if not ok:
            raise InconsistentData(f"map image f({g.name}) does not have the shape x*z")
    marked = [g for g in f.target if g.name not in source]
    results: dict[str, CollectionResult] = {}
    for g in gens:
        data = _lookup_data(commutator_data, g)
        if isinstance(data, tuple) and len(data) == 2 and not _is_pair_of_words(data):
            pairs, lam = data
        else:
            pairs, lam = data, None
        x_word = source.gen(g.name)
        c_word = source.identity()
        for u, v in pairs:
            c_word = multiply(c_word, commutator(u.in_alphabet(source),
                                                 v.in_alphabet(source)))
        if lam is None:
            lam = multiply(invert(c_word), x_word)
        else:
            lam = lam.in_alphabet(source)
            if multiply(c_word, lam) != x_word:
                raise InconsistentData(
                    f"x = (prod commutators) * lambda fails for {g.name!r}")
        e_word = multiply(multiply(lam, invert(x_word)),
                          multiply(substitute(x_word, f), invert(substitute(lam, f))))
        res = push_marked_right(e_word, marked)
        if not res.residual.is_identity:
            raise InconsistentData(f"collection residual for {g.name!r} is nontrivial")
        results[g.name] = res
    return results


def _lookup_data(commutator_data: Mapping, g: Generator):
    if g in commutator_data:
        return commutator_data[g]
    if g.name in commutator_data:
        return commutator_data[g.name]
    raise KeyError(f"no commutator data for generator {g.name!r}")


def _is_pair_of_words(data) -> bool:
    return len(data) == 2 and all(isinstance(x, Word) for x in data)


# ---------------------------------------------------------------------------
# Class-P audit
# ---------------------------------------------------------------------------

_AMALGAM_OK = {SubgroupKind.FREE, SubgroupKind.ABELIAN, SubgroupKind.CYCLIC}
_HNN_OK = {SubgroupKind.FREE, SubgroupKind.ABELIAN}


def verify_class_P(trace) -> bool:
    """Structural audit of declared construction steps: every amalgam is
    over a free, abelian, or cyclic subgroup and every stable letter has a
    free or abelian associated subgroup, over free-base or supplied-input
    leaves.  Central extension steps audit their base.  This checks the
    declared tags, not the underlying group theory."""
    if isinstance(trace, Presentation):
        trace = effective_trace(trace)
    if trace is None:
        return False
    if isinstance(trace, (FreeBase, DiscreteSubgroupInput)):
        return True
    if isinstance(trace, AmalgamStep):
        return (trace.amalgamated_subgroup_kind in _AMALGAM_OK
                and verify_class_P(trace.left) and verify_class_P(trace.right))
    if isinstance(trace, HNNStep):
        return (trace.associated_subgroup_kind in _HNN_OK
                and verify_class_P(trace.base))
    if isinstance(trace, CentralExtensionStep):
        return verify_class_P(trace.base)
    return False


# ---------------------------------------------------------------------------
# Turing machine reduction
# ---------------------------------------------------------------------------

def tm_to_group(tm: TuringMachine) -> tuple[Presentation, Callable[[int], Word]]:
    """Finite presentation G(T) and a word builder such that the built word
    for input i is trivial in G(T) exactly when the machine halts on the
    binary encoding of i.

    The presentation does not depend on the input; the word for input i has
    letter length O(log(i + 1)).  Structure: the free base on x, y, t (with
    abbreviation letters X = x^m, Y = y^m) extended by stable letters with
    free associated subgroups: one input-building letter p, one letter per
    modular machine rule transporting configuration conjugates of t, and a
    halting detector k commuting with the rule letters and the halted
    configuration.
    """
    mm = compile_modular(tm)
    m = mm.modulus
    rule_items = mm.sorted_rules()
    names = ["x", "y", "t", "X", "Y", "p", "k"] + [f"r{i}" for i in range(len(rule_items))]
    alphabet = Alphabet(names)
    x = alphabet.gen("x")
    y = alphabet.gen("y")
    t = alphabet.gen("t")
    big_x = alphabet.gen("X")
    big_y = alphabet.gen("Y")
    p_letter = alphabet.gen("p")
    k = alphabet.gen("k")

    relators = [multiply(invert(big_x), x ** m), multiply(invert(big_y), y ** m)]
    relators.append(multiply(multiply(invert(p_letter), y),
                             multiply(p_letter, invert(big_y))))

    def conj(pre: Word, mid: Word) -> Word:
        return mid.conjugate_by(pre)

    trace = FreeBase(("x", "y", "t"))
    trace = HNNStep(SubgroupKind.FREE, trace, "p")
    for idx, ((a, b), (c, side)) in enumerate(rule_items):
        r = alphabet.gen(f"r{idx}")
        c1, c0 = divmod(c, m)
        source = [big_x,
                  conj(x ** a, big_y),
                  conj(multiply(x ** a, y ** b), t)]
        if side == "alpha":
            xc = multiply(big_x ** c1, x ** c0)
            target = [big_x ** m, conj(xc, y), conj(xc, t)]
        else:
            yc = multiply(big_y ** c1, y ** c0)
            target = [x, big_y ** m, conj(yc, t)]
        for a_word, b_word in zip(source, target):
            relators.append(multiply(multiply(invert(r), a_word),
                                     multiply(r, invert(b_word))))
        trace = HNNStep(SubgroupKind.FREE, trace, f"r{idx}")
    tau = conj(x ** mm.halt_marker, t)
    for idx in range(len(rule_items)):
        relators.append(commutator(k, alphabet.gen(f"r{idx}")))
    relators.append(commutator(k, tau))
    trace = HNNStep(SubgroupKind.FREE, trace, "k")
    presentation = Presentation(alphabet, relators, trace=trace)

    input_syms = mm.source.input_symbols()
    if len(input_syms) < 2:
        raise ValueError("machine needs at least two non-blank tape symbols "
                         "for binary input encoding")
    zero_sym, one_sym = input_syms[0], input_syms[1]

    def word_builder(i: int) -> Word:
        if i < 0:
            raise ValueError("input index must be nonnegative")
        cells = [] if i == 0 else [zero_sym if ch == "0" else one_sym
                                   for ch in format(i, "b")]
        digits = [mm.symbol_codes[s] for s in cells]
        acc = alphabet.identity()
        for j in range(len(digits) - 1, -1, -1):
            if not acc.is_identity:
                acc = multiply(multiply(invert(p_letter), acc), p_letter)
            acc = multiply(acc, y ** digits[j])
        g_word = conj(multiply(x ** mm.start_code, acc), t)
        return commutator(g_word, k)

    return presentation, word_builder
