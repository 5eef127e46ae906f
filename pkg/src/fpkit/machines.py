"""Deterministic Turing machines, their simulation, and compilation to
configuration-rewriting systems (tape machines).

Machine file format (line-oriented, UTF-8, "#" starts a comment line)::

    states: s0 s1 halt: hN start: s0
    alphabet: _ 0 1
    s0 0 -> s1 0 R

A tape machine works on configuration words ``lm L q t s R rm``: left
marker, left tape letters, one state letter, the anchor letter ``t``, the
scanned letter, the right tape letters, right marker.  Each rule replaces
one short subword pattern (containing the state letter and ``t``) and
corresponds to one machine step; extra rules materialize blanks at the
markers and, after halting, erase the tape so that the machine halts
exactly when the canonical configuration ``lm qh t rm`` is reached.  On a
genuine configuration at most one rule applies, so runs are deterministic.
"""

from __future__ import annotations

from typing import Mapping, Sequence

__all__ = [
    "TuringMachine",
    "SimulationResult",
    "simulate",
    "parse_machine",
    "machine_to_text",
    "TapeMachine",
    "compile_tape",
    "run_tape",
]

BLANK = "_"


class TuringMachine:
    """Deterministic machine: at most one transition per (state, symbol),
    none out of the halt state."""

    __slots__ = ("states", "start", "halt", "tape_alphabet", "transitions")

    def __init__(self, states: Sequence[str], start: str, halt: str,
                 tape_alphabet: Sequence[str],
                 transitions: Mapping[tuple[str, str], tuple[str, str, str]]):
        states = tuple(states)
        tape_alphabet = tuple(tape_alphabet)
        if len(set(states)) != len(states):
            raise ValueError("duplicate states")
        if len(set(tape_alphabet)) != len(tape_alphabet):
            raise ValueError("duplicate tape symbols")
        if BLANK not in tape_alphabet:
            raise ValueError(f"tape alphabet must contain the blank {BLANK!r}")
        if start not in states or halt not in states:
            raise ValueError("start and halt must be declared states")
        transitions = dict(transitions)
        for (q, s), (q2, s2, move) in transitions.items():
            if q not in states or q2 not in states:
                raise ValueError(f"transition uses undeclared state ({q!r} or {q2!r})")
            if s not in tape_alphabet or s2 not in tape_alphabet:
                raise ValueError(f"transition uses undeclared symbol ({s!r} or {s2!r})")
            if move not in ("L", "R"):
                raise ValueError(f"move must be L or R, got {move!r}")
            if q == halt:
                raise ValueError("no transitions out of the halt state")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "halt", halt)
        object.__setattr__(self, "tape_alphabet", tape_alphabet)
        object.__setattr__(self, "transitions", transitions)

    def __setattr__(self, *a):
        raise AttributeError("TuringMachine is immutable")

    def input_symbols(self) -> tuple[str, ...]:
        return tuple(s for s in self.tape_alphabet if s != BLANK)


class SimulationResult:
    __slots__ = ("halted", "steps", "cycled")

    def __init__(self, halted: bool, steps: int, cycled: bool = False):
        object.__setattr__(self, "halted", halted)
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "cycled", cycled)

    def __setattr__(self, *a):
        raise AttributeError("SimulationResult is immutable")

    def __repr__(self):
        if self.halted:
            return f"Halted({self.steps})"
        return f"Running(steps={self.steps}, cycled={self.cycled})"


def simulate(tm: TuringMachine, input_symbols, max_steps: int) -> SimulationResult:
    """Run the machine on the given input (a string of one-character
    symbols or a sequence of symbol tokens).

    Halted(s) means the halt state was reached after s steps (Halted(0) when
    start = halt).  Running covers everything else, including a stuck
    machine; ``cycled`` is set when a head-relative configuration repeats,
    which proves the machine never halts.
    """
    cells = list(input_symbols)
    for s in cells:
        if s not in tm.tape_alphabet or s == BLANK:
            raise ValueError(f"input symbol {s!r} not a non-blank tape symbol")
    tape = {i: s for i, s in enumerate(cells)}
    head = 0
    state = tm.start
    seen = set()
    for steps in range(max_steps + 1):
        if state == tm.halt:
            return SimulationResult(True, steps)
        config = (state, tuple(sorted((pos - head, sym) for pos, sym in tape.items()
                                      if sym != BLANK)))
        if config in seen:
            return SimulationResult(False, steps, cycled=True)
        seen.add(config)
        if steps == max_steps:
            break
        rule = tm.transitions.get((state, tape.get(head, BLANK)))
        if rule is None:
            return SimulationResult(False, steps, cycled=True)  # stuck forever
        state, written, move = rule
        tape[head] = written
        head += 1 if move == "R" else -1
    return SimulationResult(False, max_steps)


# ---------------------------------------------------------------------------
# Machine file format
# ---------------------------------------------------------------------------

def parse_machine(text: str) -> TuringMachine:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if len(lines) < 2:
        raise ValueError("machine file needs a states line and an alphabet line")
    head = lines[0].split()
    if head[0] != "states:" or "halt:" not in head or "start:" not in head:
        raise ValueError("first line must be 'states: ... halt: H start: S'")
    hi, si = head.index("halt:"), head.index("start:")
    states = head[1:hi]
    halt = head[hi + 1]
    start = head[si + 1]
    if halt not in states:
        states = states + [halt]
    alpha = lines[1].split()
    if alpha[0] != "alphabet:":
        raise ValueError("second line must be 'alphabet: ...'")
    tape_alphabet = alpha[1:]
    transitions = {}
    for ln in lines[2:]:
        parts = ln.split()
        if len(parts) != 6 or parts[2] != "->":
            raise ValueError(f"bad transition line: {ln!r}")
        q, s, _, q2, s2, move = parts
        if (q, s) in transitions:
            raise ValueError(f"duplicate transition for ({q!r}, {s!r})")
        transitions[(q, s)] = (q2, s2, move)
    return TuringMachine(states, start, halt, tape_alphabet, transitions)


def machine_to_text(tm: TuringMachine) -> str:
    lines = ["states: " + " ".join(tm.states)
             + f" halt: {tm.halt} start: {tm.start}",
             "alphabet: " + " ".join(tm.tape_alphabet)]
    for (q, s), (q2, s2, move) in sorted(tm.transitions.items()):
        lines.append(f"{q} {s} -> {q2} {s2} {move}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Tape machines
# ---------------------------------------------------------------------------

class TapeMachine:
    """Configuration-word rewriting system produced by :func:`compile_tape`.

    Letters: symbol letters s0 (blank), s1, ... in tape-alphabet order;
    state letters q0, q1, ... in state order; markers lm, rm; the anchor t.
    Rules are (pattern, replacement) letter tuples; each pattern contains
    the anchor and exactly one state letter.
    """

    __slots__ = ("rules", "symbol_letters", "state_letters", "source")

    def __init__(self, rules, symbol_letters, state_letters, source):
        object.__setattr__(self, "rules", tuple(rules))
        object.__setattr__(self, "symbol_letters", dict(symbol_letters))
        object.__setattr__(self, "state_letters", dict(state_letters))
        object.__setattr__(self, "source", source)

    def __setattr__(self, *a):
        raise AttributeError("TapeMachine is immutable")

    @property
    def letters(self) -> tuple[str, ...]:
        ordered = [self.symbol_letters[s] for s in self.source.tape_alphabet]
        ordered += [self.state_letters[q] for q in self.source.states]
        return tuple(ordered) + ("lm", "rm", "t")

    def initial_config(self, input_symbols) -> tuple[str, ...]:
        cells = []
        for sym in input_symbols:
            if sym not in self.symbol_letters or sym == BLANK:
                raise ValueError(f"input symbol {sym!r} not a non-blank tape symbol")
            cells.append(self.symbol_letters[sym])
        start = self.state_letters[self.source.start]
        return ("lm", start, "t", *cells, "rm")

    def halting_config(self) -> tuple[str, ...]:
        return ("lm", self.state_letters[self.source.halt], "t", "rm")


def compile_tape(tm: TuringMachine) -> TapeMachine:
    """Compile a Turing machine to a tape machine that reaches the
    canonical halting configuration exactly when the machine halts.

    Rule families: one per R-transition; one per L-transition and possible
    preceding letter (plus a left-marker variant that materializes a
    blank); blank materialization at the right marker for every non-halt
    state; and post-halt rules erasing the scanned side, then the left
    side, letter by letter.
    """
    sym = {s: f"s{i}" for i, s in enumerate(tm.tape_alphabet)}
    st = {q: f"q{i}" for i, q in enumerate(tm.states)}
    blank = sym[BLANK]
    symbols = [sym[s] for s in tm.tape_alphabet]
    halt = st[tm.halt]
    rules: list[tuple[tuple[str, ...], tuple[str, ...]]] = []
    for (q, s), (q2, s2, move) in sorted(tm.transitions.items()):
        lq, ls, lq2, ls2 = st[q], sym[s], st[q2], sym[s2]
        if move == "R":
            rules.append(((lq, "t", ls), (ls2, lq2, "t")))
        else:
            for prev in symbols:
                rules.append(((prev, lq, "t", ls), (lq2, "t", prev, ls2)))
            rules.append((("lm", lq, "t", ls), ("lm", lq2, "t", blank, ls2)))
    for q in tm.states:
        if q != tm.halt:
            rules.append(((st[q], "t", "rm"), (st[q], "t", blank, "rm")))
    for s in symbols:
        rules.append(((halt, "t", s), (halt, "t")))
    for s in symbols:
        rules.append(((s, halt, "t", "rm"), (halt, "t", "rm")))
    return TapeMachine(rules, sym, st, tm)


def run_tape(machine: TapeMachine, config: Sequence[str],
             max_steps: int) -> tuple[bool, int, tuple[str, ...]]:
    """Apply rules until the halting configuration, a stuck configuration,
    or the step bound; asserts that at most one rule matches (genuine
    configurations are deterministic)."""
    config = tuple(config)
    target = machine.halting_config()
    for steps in range(max_steps + 1):
        if config == target:
            return True, steps, config
        matches = []
        for pattern, replacement in machine.rules:
            k = len(pattern)
            for pos in range(len(config) - k + 1):
                if config[pos:pos + k] == pattern:
                    matches.append((pos, pattern, replacement))
        if not matches:
            return False, steps, config
        if len(matches) > 1:
            raise AssertionError(f"ambiguous rewriting at {config}")
        if steps == max_steps:
            break
        pos, pattern, replacement = matches[0]
        config = config[:pos] + replacement + config[pos + len(pattern):]
    return False, max_steps, config
