"""Surface syntax for system descriptions, formulas and commands.

A system file looks like::

    system {
      seed 13
      factor 1/2
      maxtime 1000
      timemap tell root -> Norm(1.0, 0.2)
      agent root { store X < 5 }
      process @ root : (tell(W == 5) || ask W > 1 -> tell(DONE)) in 1
    }

Formulas accept both ``==``/``!=`` and the Maude-flavoured ``===``/``=/==``.
``||`` is right-associative and binds loosest; ``in n``/``out n`` are
postfix; ``ask`` and ``mu`` bodies extend over a single postfix term.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import constraints as cs
from .constraints import FragmentError, Formula, to_text, variables
from .engine import KINDS, initial_configuration
from .processes import (NIL, Ask, Command, Exc, In, Ind, Mu, Nil, Out, Par, Tell, Var, Watch,
                        free_vars, lint)
from .space import AgentId
from .stochastic import Chi, Constant, Exp, Gam, Log, Norm, Unif, Weib, render

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<aid>(?:\d+\s*\.\s*)*root\b)
  | (?P<num>-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?(?:/\d+)?)
  | (?P<op>===|=/==|->|\|\||<=|>=|==|!=|[<>{}():,.@])
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
""", re.VERBOSE)

_REL = {"<": "<", "<=": "<=", ">": ">", ">=": ">=", "==": "==", "===": "==", "!=": "!=", "=/==": "!="}
_DISTS = {"Norm": (Norm, 2), "Exp": (Exp, 1), "Unif": (Unif, 2), "Gam": (Gam, 2),
          "Weib": (Weib, 2), "Chi": (Chi, 1), "Log": (Log, 2)}


class SpecError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line, self.col = line, col


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise SpecError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        if "\n" in chunk:
            line += chunk.count("\n")
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return SpecError(msg, tok.line, tok.col)

    def at(self, text) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "name")

    def accept(self, text) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        self.i += 1
        return self.toks[self.i - 1]

    def nat(self) -> int:
        t = self.tok
        if t.kind != "num" or not t.text.isdigit():
            raise self.error(f"expected a natural number, found {t.text!r}")
        self.i += 1
        return int(t.text)

    def rational(self) -> Fraction:
        t = self.tok
        if t.kind != "num":
            raise self.error(f"expected a number, found {t.text!r}")
        self.i += 1
        return Fraction(t.text)

    def real(self) -> float:
        return float(self.rational())

    def aid(self) -> AgentId:
        t = self.tok
        if t.kind != "aid":
            raise self.error(f"expected an agent id, found {t.text!r}")
        self.i += 1
        return AgentId.parse(re.sub(r"\s+", "", t.text))

    def end(self):
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")

    # -- formulas, loosest first
    def formula(self) -> Formula:
        return self._left_assoc("iff", self.implies, cs.Iff)

    def implies(self) -> Formula:
        left = self.disj()
        if self.accept("implies"):
            return cs.Implies(left, self.implies())
        return left

    def _left_assoc(self, word, sub, node):
        left = sub()
        while self.accept(word):
            left = node(left, sub())
        return left

    def disj(self):
        return self._left_assoc("or", self.xor, cs.Or)

    def xor(self):
        return self._left_assoc("xor", self.conj, cs.Xor)

    def conj(self):
        return self._left_assoc("and", self.negation, cs.And)

    def negation(self) -> Formula:
        if self.accept("not"):
            return cs.Not(self.negation())
        return self.atom()

    def term(self):
        t = self.tok
        if t.kind == "num" and re.fullmatch(r"-?\d+", t.text):
            self.i += 1
            return cs.IntConst(int(t.text))
        if t.kind == "name" and t.text not in _KEYWORDS:
            self.i += 1
            return cs.IntVar(t.text)
        raise self.error(f"expected an integer term, found {t.text!r}")

    def atom(self) -> Formula:
        t = self.tok
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if self.accept("true"):
            return cs.TRUE
        if self.accept("false"):
            return cs.FALSE
        nxt = self.peek()
        if nxt.kind == "op" and nxt.text in _REL:
            lhs = self.term()
            op = _REL[self.tok.text]
            self.i += 1
            return cs.IntAtom(lhs, op, self.term())
        if t.kind == "name" and t.text not in _KEYWORDS:
            self.i += 1
            return cs.BoolVar(t.text)
        if t.kind == "num":
            raise self.error(f"integer {t.text} must be compared with something")
        raise self.error(f"expected a formula, found {t.text or 'end of input'!r}")

    # -- commands
    def command(self) -> Command:
        left = self.unary()
        if self.accept("||"):
            return Par(left, self.command())
        return left

    def unary(self) -> Command:
        if self.accept("ask"):
            guard = self.formula()
            self.expect("->")
            return Ask(guard, self.unary())
        if self.accept("mu"):
            n = self.nat()
            self.expect(".")
            return Mu(n, self.unary())
        body = self.primary()
        while self.at("in") or self.at("out"):
            kind = self.tok.text
            self.i += 1
            n = self.nat()
            body = In(body, n) if kind == "in" else Out(body, n)
        return body

    def primary(self) -> Command:
        t = self.tok
        if t.kind == "num" and t.text == "0":
            self.i += 1
            return NIL
        if self.accept("tell"):
            self.expect("(")
            f = self.formula()
            self.expect(")")
            return Tell(f)
        if t.text == "V" and self.peek().text == "(":
            self.i += 2
            n = self.nat()
            self.expect(")")
            return Var(n)
        if t.text in ("exc", "ind") and self.peek().text == "{":
            self.i += 2
            cmds, probs = [], []
            while not self.accept("}"):
                cmds.append(self.command())
                self.expect(":")
                probs.append(self.real())
                self.accept(",")
            try:
                return (Exc if t.text == "exc" else Ind)(tuple(cmds), tuple(probs))
            except ValueError as exc:
                raise SpecError(str(exc), t.line, t.col) from None
        if self.accept("watch"):
            self.expect("(")
            action = self.command()
            self.expect(",")
            target = self.formula()
            self.expect(")")
            return Watch(action, target)
        if self.accept("("):
            c = self.command()
            self.expect(")")
            return c
        raise self.error(f"expected a command, found {t.text or 'end of input'!r}")

    # -- distributions and the system block
    def dist(self):
        t = self.tok
        name = t.text
        if name == "Const":
            self.i += 1
            self.expect("(")
            v = self.rational()
            self.expect(")")
            return Constant(v)
        if name not in _DISTS:
            raise self.error(f"unknown distribution {name!r}")
        self.i += 1
        ctor, arity = _DISTS[name]
        self.expect("(")
        args = [self.real()]
        for _ in range(arity - 1):
            self.expect(",")
            args.append(self.real())
        self.expect(")")
        try:
            return ctor(*args)
        except ValueError as exc:
            raise SpecError(str(exc), t.line, t.col) from None

    def system(self) -> "SystemSpec":
        self.expect("system")
        self.expect("{")
        seed, factor, max_time = 0, Fraction(1), None
        maps: dict = {k: {} for k in KINDS}
        agents, procs = [], []
        while not self.accept("}"):
            t = self.tok
            if self.accept("seed"):
                seed = self.nat()
            elif self.accept("factor"):
                factor = self.rational()
            elif self.accept("maxtime"):
                max_time = self.rational()
            elif self.accept("timemap"):
                kind = self.tok
                if kind.text not in KINDS:
                    raise self.error(f"unknown time map kind {kind.text!r}")
                self.i += 1
                loc = self.aid()
                self.expect("->")
                maps[kind.text][loc] = self.dist()
            elif self.accept("agent"):
                loc = self.aid()
                self.expect("{")
                self.expect("store")
                store = self.formula()
                kids = []
                if self.accept("children"):
                    while self.tok.kind == "num":
                        kids.append(self.nat())
                self.expect("}")
                agents.append((loc, store, frozenset(kids)))
            elif self.accept("process"):
                self.expect("@")
                loc = self.aid()
                self.expect(":")
                cmd = self.command()
                if free_vars(cmd):
                    raise SpecError(f"recursion variable(s) {sorted(free_vars(cmd))} outside any mu",
                                    t.line, t.col)
                procs.append((loc, cmd))
            else:
                raise self.error(f"unknown item {t.text!r}")
        self.end()
        if max_time is None:
            raise SpecError("missing 'maxtime'")
        return SystemSpec(seed, factor, max_time, maps, tuple(agents), tuple(procs))


_KEYWORDS = {"and", "or", "not", "xor", "implies", "iff", "true", "false"}


@dataclass
class SystemSpec:
    seed: int = 0
    factor: Fraction = Fraction(1)
    max_time: Fraction = Fraction(1000)
    time_maps: dict = field(default_factory=lambda: {k: {} for k in KINDS})
    agents: tuple = ()          # (AgentId, Formula, frozenset of child indices)
    processes: tuple = ()       # (AgentId, Command)
    uniform_watch: bool = False

    def __post_init__(self):
        # every kind present, so parsed and hand-built specs compare equal
        unknown = set(self.time_maps) - set(KINDS)
        if unknown:
            raise ValueError(f"unknown time map kinds {sorted(unknown)}")
        self.time_maps = {k: dict(self.time_maps.get(k, {})) for k in KINDS}

    def configuration(self, seed: Optional[int] = None):
        return initial_configuration(self.agents, self.processes,
                                     seed=self.seed if seed is None else seed, factor=self.factor,
                                     max_time=self.max_time, time_maps=self.time_maps,
                                     uniform_watch=self.uniform_watch)

    def check(self) -> list:
        """Lint warnings plus variable type conflicts across all formulas."""
        msgs = []
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            for _, cmd in self.processes:
                lint(cmd)
        msgs.extend(str(w.message) for w in caught)
        formulas = [s for _, s, _ in self.agents] + [f for _, c in self.processes for f in _formulas(c)]
        try:
            variables(cs.conj(*formulas))
        except FragmentError as exc:
            msgs.append(str(exc))
        return msgs


def _formulas(c: Command):
    if isinstance(c, Tell):
        yield c.formula
    elif isinstance(c, Ask):
        yield c.guard
        yield from _formulas(c.body)
    elif isinstance(c, Watch):
        yield c.target
        yield from _formulas(c.action)
    elif isinstance(c, Par):
        yield from _formulas(c.left)
        yield from _formulas(c.right)
    elif isinstance(c, (In, Out, Mu)):
        yield from _formulas(c.body)
    elif isinstance(c, (Exc, Ind)):
        for sub in c.cmds:
            yield from _formulas(sub)


def parse_spec(text: str) -> SystemSpec:
    return _Parser(text).system()


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.end()
    return f


def parse_command(text: str) -> Command:
    p = _Parser(text)
    c = p.command()
    p.end()
    return c


def load_spec(path) -> SystemSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


# --------------------------------------------------------------------------
# rendering

def render_command(c: Command, level: int = 0) -> str:
    """Inverse of :func:`parse_command`; ``level`` 0 = par, 1 = unary, 2 = postfix operand."""
    if isinstance(c, Par):
        text = f"{render_command(c.left, 1)} || {render_command(c.right, 0)}"
        return f"({text})" if level > 0 else text
    if isinstance(c, (Ask, Mu)):
        head = f"ask ({to_text(c.guard)}) -> " if isinstance(c, Ask) else f"mu {c.binder} . "
        text = head + render_command(c.body, 1)
        return f"({text})" if level > 1 else text
    if isinstance(c, (In, Out)):
        word = "in" if isinstance(c, In) else "out"
        return f"{render_command(c.body, 2)} {word} {c.child}"
    if isinstance(c, Nil):
        return "0"
    if isinstance(c, Tell):
        return f"tell({to_text(c.formula)})"
    if isinstance(c, Var):
        return f"V({c.n})"
    if isinstance(c, (Exc, Ind)):
        word = "exc" if isinstance(c, Exc) else "ind"
        items = ", ".join(f"{render_command(x)} : {p!r}" for x, p in zip(c.cmds, c.probs))
        return f"{word}{{ {items} }}"
    if isinstance(c, Watch):
        return f"watch({render_command(c.action)}, {to_text(c.target)})"
    raise TypeError(f"command {c!r} has no surface syntax")


def render_spec(spec: SystemSpec) -> str:
    lines = ["system {", f"  seed {spec.seed}", f"  factor {spec.factor}", f"  maxtime {spec.max_time}"]
    for kind in KINDS:
        for loc, e in sorted(spec.time_maps.get(kind, {}).items(), key=lambda kv: kv[0].sort_key()):
            lines.append(f"  timemap {kind} {loc} -> {render(e)}")
    for loc, store, kids in spec.agents:
        extra = f" children {' '.join(map(str, sorted(kids)))}" if kids else ""
        lines.append(f"  agent {loc} {{ store {to_text(store)}{extra} }}")
    for loc, cmd in spec.processes:
        lines.append(f"  process @ {loc} : {render_command(cmd)}")
    lines.append("}")
    return "\n".join(lines) + "\n"
