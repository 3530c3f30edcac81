"""Quantifier-free Boolean/integer constraints.

Formulas are immutable trees.  Integer terms are restricted to a single
variable or an integer constant, which keeps the built-in decision
procedure complete: negation normal form, a depth-first enumeration of
atom truth assignments, and an exact arithmetic consistency check per
assignment (interval intersection with counted exclusions, or
difference bounds when two variables are compared).
"""

from __future__ import annotations

import enum
import os
import subprocess
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Union


class FragmentError(ValueError):
    """A formula falls outside the supported fragment."""


class SolverError(RuntimeError):
    """The decision procedure could not give a definite answer."""


class Verdict(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


# --------------------------------------------------------------------------
# terms and formulas

@dataclass(frozen=True)
class IntVar:
    name: str

    def __post_init__(self):
        _check_name(self.name)


@dataclass(frozen=True)
class IntConst:
    value: int


IntTerm = Union[IntVar, IntConst]

REL_OPS = ("<", "<=", ">", ">=", "==", "!=")
_NEGATED = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "!=", "!=": "=="}
_MIRRORED = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}


class Formula:
    """Base class; use the concrete node types below."""

    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, repr=False)
class TrueConst(Formula):
    def __repr__(self):
        return "TRUE"


@dataclass(frozen=True, repr=False)
class FalseConst(Formula):
    def __repr__(self):
        return "FALSE"


TRUE = TrueConst()
FALSE = FalseConst()


@dataclass(frozen=True)
class BoolVar(Formula):
    name: str

    def __post_init__(self):
        _check_name(self.name)


@dataclass(frozen=True)
class IntAtom(Formula):
    lhs: IntTerm
    op: str
    rhs: IntTerm

    def __post_init__(self):
        if self.op not in REL_OPS:
            raise FragmentError(f"unknown relation {self.op!r}")
        for t in (self.lhs, self.rhs):
            if not isinstance(t, (IntVar, IntConst)):
                raise FragmentError(f"integer term {t!r} is not a variable or a constant")


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Xor(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


BINARY = (And, Or, Xor, Implies, Iff)


def _check_name(name):
    if not isinstance(name, str) or not name or not (name[0].isalpha() or name[0] == "_") \
            or not all(ch.isalnum() or ch == "_" for ch in name):
        raise FragmentError(f"invalid identifier {name!r}")


def atom(lhs, op: str, rhs) -> IntAtom:
    """Build an integer atom; strings become variables and ints constants."""
    return IntAtom(_term(lhs), op, _term(rhs))


def _term(x) -> IntTerm:
    if isinstance(x, (IntVar, IntConst)):
        return x
    if isinstance(x, bool):
        raise FragmentError("Boolean value used as an integer term")
    if isinstance(x, int):
        return IntConst(x)
    if isinstance(x, str):
        return IntVar(x)
    raise FragmentError(f"cannot interpret {x!r} as an integer term")


def conj(*parts: Formula) -> Formula:
    """Left-nested conjunction of ``parts`` (``TRUE`` when empty)."""
    out: Formula = TRUE
    for p in parts:
        out = p if out == TRUE else And(out, p)
    return out


# --------------------------------------------------------------------------
# measurement, traversal, simplification

def size(f: Formula) -> int:
    """Number of atoms plus connectives; constants and Boolean variables count 1."""
    if isinstance(f, Not):
        return 1 + size(f.arg)
    if isinstance(f, BINARY):
        return 1 + size(f.left) + size(f.right)
    return 1


def variables(f: Formula) -> dict[str, str]:
    """Map each variable name to ``"bool"`` or ``"int"``.

    Raises FragmentError when a name is used with both types.
    """
    out: dict[str, str] = {}
    for node in _walk(f):
        if isinstance(node, BoolVar):
            _declare(out, node.name, "bool", node)
        elif isinstance(node, IntAtom):
            for t in (node.lhs, node.rhs):
                if isinstance(t, IntVar):
                    _declare(out, t.name, "int", node)
    return out


def _declare(table, name, kind, node):
    prev = table.setdefault(name, kind)
    if prev != kind:
        raise FragmentError(f"variable {name!r} used as both bool and int (in {to_text(node)})")


def _walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Not):
            stack.append(node.arg)
        elif isinstance(node, BINARY):
            stack.append(node.right)
            stack.append(node.left)
        elif not isinstance(node, (TrueConst, FalseConst, BoolVar, IntAtom)):
            raise FragmentError(f"unsupported formula node {node!r}")


def simplify(f: Formula) -> Formula:
    """Apply the and/or/not identities with ``true``/``false`` bottom-up."""
    if isinstance(f, Not):
        a = simplify(f.arg)
        if a == TRUE:
            return FALSE
        if a == FALSE:
            return TRUE
        return f if a is f.arg else Not(a)
    if isinstance(f, (And, Or)):
        left, right = simplify(f.left), simplify(f.right)
        return _identity(type(f), left, right)
    if isinstance(f, BINARY):
        left, right = simplify(f.left), simplify(f.right)
        if left is f.left and right is f.right:
            return f
        return type(f)(left, right)
    return f


def _identity(kind, left, right):
    if kind is And:
        if right == TRUE:
            return left
        if left == TRUE:
            return right
        if left == FALSE or right == FALSE:
            return FALSE
        return And(left, right)
    if right == TRUE or left == TRUE:
        return TRUE
    if right == FALSE:
        return left
    if left == FALSE:
        return right
    return Or(left, right)


def conjoin(c: Formula, d: Formula) -> Formula:
    """Store join: ``c and d`` with the Boolean identities applied."""
    return _identity(And, simplify(c), simplify(d))


# --------------------------------------------------------------------------
# rendering

_PREC = {Iff: 1, Implies: 2, Or: 3, Xor: 4, And: 5}
_KEYWORD = {And: "and", Or: "or", Xor: "xor", Implies: "implies", Iff: "iff"}


def _term_text(t: IntTerm) -> str:
    return t.name if isinstance(t, IntVar) else str(t.value)


def to_text(f: Formula, _prec: int = 0) -> str:
    """Render in the infix syntax accepted by :func:`sscc.syntax.parse_formula`."""
    if isinstance(f, TrueConst):
        return "true"
    if isinstance(f, FalseConst):
        return "false"
    if isinstance(f, BoolVar):
        return f.name
    if isinstance(f, IntAtom):
        return f"{_term_text(f.lhs)} {f.op} {_term_text(f.rhs)}"
    if isinstance(f, Not):
        return "not " + to_text(f.arg, 6)
    p = _PREC[type(f)]
    if isinstance(f, Implies):
        # right-associative
        body = f"{to_text(f.left, p + 1)} implies {to_text(f.right, p)}"
    else:
        body = f"{to_text(f.left, p)} {_KEYWORD[type(f)]} {to_text(f.right, p + 1)}"
    return f"({body})" if p < _prec else body


# --------------------------------------------------------------------------
# internal decision procedure

def _nnf(f: Formula, positive: bool = True) -> Formula:
    """Negation normal form over And/Or, with negations folded into literals."""
    if isinstance(f, TrueConst):
        return TRUE if positive else FALSE
    if isinstance(f, FalseConst):
        return FALSE if positive else TRUE
    if isinstance(f, BoolVar):
        return f if positive else Not(f)
    if isinstance(f, IntAtom):
        return f if positive else IntAtom(f.lhs, _NEGATED[f.op], f.rhs)
    if isinstance(f, Not):
        return _nnf(f.arg, not positive)
    a, b = f.left, f.right
    if isinstance(f, And):
        return And(_nnf(a, positive), _nnf(b, positive)) if positive \
            else Or(_nnf(a, False), _nnf(b, False))
    if isinstance(f, Or):
        return Or(_nnf(a, positive), _nnf(b, positive)) if positive \
            else And(_nnf(a, False), _nnf(b, False))
    if isinstance(f, Implies):
        return _nnf(Or(Not(a), b), positive)
    if isinstance(f, Xor):
        same = Or(And(a, b), And(Not(a), Not(b)))
        return _nnf(same, not positive)
    if isinstance(f, Iff):
        same = Or(And(a, b), And(Not(a), Not(b)))
        return _nnf(same, positive)
    raise FragmentError(f"unsupported formula node {f!r}")


def _search(todo: list, bools: dict, atoms: list) -> bool:
    while todo:
        g = todo.pop()
        if isinstance(g, And):
            todo.append(g.right)
            todo.append(g.left)
        elif isinstance(g, Or):
            if not _arith_sat(atoms):
                return False
            for alt in (g.left, g.right):
                if _search(todo + [alt], dict(bools), list(atoms)):
                    return True
            return False
        elif isinstance(g, TrueConst):
            continue
        elif isinstance(g, FalseConst):
            return False
        elif isinstance(g, BoolVar):
            if bools.setdefault(g.name, True) is not True:
                return False
        elif isinstance(g, Not):
            if bools.setdefault(g.arg.name, False) is not False:
                return False
        else:
            atoms.append(g)
    return _arith_sat(atoms)


def _eval_rel(a: int, op: str, b: int) -> bool:
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "==":
        return a == b
    return a != b


def _arith_sat(atoms: list) -> bool:
    var_const = []   # (name, op, value)
    var_var = []     # (x, op, y)
    for at in atoms:
        lhs, op, rhs = at.lhs, at.op, at.rhs
        if isinstance(lhs, IntConst) and isinstance(rhs, IntConst):
            if not _eval_rel(lhs.value, op, rhs.value):
                return False
        elif isinstance(lhs, IntConst):
            var_const.append((rhs.name, _MIRRORED[op], lhs.value))
        elif isinstance(rhs, IntConst):
            var_const.append((lhs.name, op, rhs.value))
        elif lhs.name == rhs.name:
            if op in ("<", ">", "!="):
                return False
        else:
            var_var.append((lhs.name, op, rhs.name))
    if var_var:
        return _difference_sat(var_const, var_var)
    return _interval_sat(var_const)


def _interval_sat(var_const) -> bool:
    lo: dict[str, float] = {}
    hi: dict[str, float] = {}
    excluded: dict[str, set] = {}
    for name, op, c in var_const:
        if op == "!=":
            excluded.setdefault(name, set()).add(c)
            continue
        if op in ("<", "<=", "=="):
            bound = c - 1 if op == "<" else c
            if bound < hi.get(name, float("inf")):
                hi[name] = bound
        if op in (">", ">=", "=="):
            bound = c + 1 if op == ">" else c
            if bound > lo.get(name, float("-inf")):
                lo[name] = bound
    for name in set(lo) | set(hi) | set(excluded):
        a = lo.get(name, float("-inf"))
        b = hi.get(name, float("inf"))
        if a > b:
            return False
        if a == float("-inf") or b == float("inf"):
            continue
        holes = sum(1 for v in excluded.get(name, ()) if a <= v <= b)
        if b - a + 1 <= holes:
            return False
    return True


_ZERO = "\0zero"


def _difference_sat(var_const, var_var) -> bool:
    # x - y <= c encoded as edge (y, x, c); disequalities are split into two strict cases
    edges = []
    splits = []
    for name, op, c in var_const:
        _diff_edges(edges, splits, name, op, _ZERO, c)
    for x, op, y in var_var:
        _diff_edges(edges, splits, x, op, y, 0)
    return _split_diseq(edges, splits, 0)


def _diff_edges(edges, splits, x, op, y, c):
    # constraint: x op (y + c)
    if op == "<=":
        edges.append((y, x, c))
    elif op == "<":
        edges.append((y, x, c - 1))
    elif op == ">=":
        edges.append((x, y, -c))
    elif op == ">":
        edges.append((x, y, -c - 1))
    elif op == "==":
        edges.append((y, x, c))
        edges.append((x, y, -c))
    else:
        splits.append(((y, x, c - 1), (x, y, -c - 1)))


def _split_diseq(edges, splits, i) -> bool:
    if i == len(splits):
        return not _negative_cycle(edges)
    for choice in splits[i]:
        if _split_diseq(edges + [choice], splits, i + 1):
            return True
    return False


def _negative_cycle(edges) -> bool:
    nodes = {n for e in edges for n in e[:2]}
    dist = dict.fromkeys(nodes, 0)
    for _ in range(len(nodes)):
        changed = False
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
        if not changed:
            return False
    return True


@lru_cache(maxsize=65536)
def _internal_sat(f: Formula) -> bool:
    variables(f)
    return _search([_nnf(f)], {}, [])


# --------------------------------------------------------------------------
# external SMT-LIB2 bridge

def _smt_term(t: IntTerm) -> str:
    if isinstance(t, IntVar):
        return t.name
    return str(t.value) if t.value >= 0 else f"(- {-t.value})"


_SMT_OPS = {"<": "<", "<=": "<=", ">": ">", ">=": ">=", "==": "="}


def to_smtlib(f: Formula) -> str:
    """Render ``f`` as an SMT-LIB2 term."""
    if isinstance(f, TrueConst):
        return "true"
    if isinstance(f, FalseConst):
        return "false"
    if isinstance(f, BoolVar):
        return f.name
    if isinstance(f, IntAtom):
        lhs, rhs = _smt_term(f.lhs), _smt_term(f.rhs)
        if f.op == "!=":
            return f"(distinct {lhs} {rhs})"
        return f"({_SMT_OPS[f.op]} {lhs} {rhs})"
    if isinstance(f, Not):
        return f"(not {to_smtlib(f.arg)})"
    head = {And: "and", Or: "or", Xor: "xor", Implies: "=>", Iff: "="}[type(f)]
    return f"({head} {to_smtlib(f.left)} {to_smtlib(f.right)})"


def smtlib_script(f: Formula) -> str:
    """A complete QF_LIA query deciding satisfiability of ``f``."""
    lines = ["(set-logic QF_LIA)"]
    for name, kind in sorted(variables(f).items()):
        lines.append(f"(declare-const {name} {'Bool' if kind == 'bool' else 'Int'})")
    lines.append(f"(assert {to_smtlib(f)})")
    lines.append("(check-sat)")
    lines.append("(exit)")
    return "\n".join(lines) + "\n"


class ExternalSolver:
    """Runs an SMT-LIB2 solver binary, one subprocess per query.

    ``args`` defaults to the stdin-reading flags of z3, cvc4/cvc5 and yices
    based on the executable name.
    """

    def __init__(self, path: str, args: Optional[list] = None, timeout: float = 10.0):
        self.path = path
        self.timeout = timeout
        self.args = list(args) if args is not None else _default_args(path)

    def __repr__(self):
        return f"ExternalSolver({self.path!r}, timeout={self.timeout})"

    def check_sat(self, f: Formula) -> Verdict:
        script = smtlib_script(f)
        try:
            proc = subprocess.run([self.path, *self.args], input=script, capture_output=True,
                                  text=True, timeout=self.timeout)
        except subprocess.TimeoutExpired:
            return Verdict.UNKNOWN
        except OSError as exc:
            raise SolverError(f"cannot launch solver {self.path!r}: {exc}") from exc
        for line in proc.stdout.splitlines():
            word = line.strip()
            if word in ("sat", "unsat", "unknown"):
                return Verdict(word)
            if word.startswith("(error"):
                raise SolverError(f"solver reported {word}")
            if word:
                break
        raise SolverError(f"cannot parse solver output {proc.stdout!r} (stderr {proc.stderr!r})")


def _default_args(path: str) -> list:
    base = os.path.basename(path).lower()
    if base.startswith("z3"):
        return ["-in", "-smt2"]
    if base.startswith("cvc"):
        return ["--lang=smt2"]
    return []


def solve_external(f: Formula, solver: ExternalSolver) -> Verdict:
    return solver.check_sat(f)


# --------------------------------------------------------------------------
# public API

def check_sat(f: Formula, solver: Optional[ExternalSolver] = None) -> Verdict:
    """Satisfiability of ``f``; ``solver`` routes the query to an external binary."""
    if solver is not None:
        variables(f)
        return solver.check_sat(f)
    return Verdict.SAT if _internal_sat(f) else Verdict.UNSAT


def check_unsat(f: Formula, solver: Optional[ExternalSolver] = None) -> bool:
    verdict = check_sat(f, solver)
    if verdict is Verdict.UNKNOWN:
        raise SolverError(f"solver cannot decide {to_text(f)}")
    return verdict is Verdict.UNSAT


def entails(c: Formula, d: Formula, solver: Optional[ExternalSolver] = None) -> bool:
    """True iff every model of ``c`` satisfies ``d``."""
    if d == TRUE:
        return True
    return check_unsat(And(c, Not(d)), solver)


def equivalent(c: Formula, d: Formula, solver: Optional[ExternalSolver] = None) -> bool:
    return entails(c, d, solver) and entails(d, c, solver)


def evaluate(f: Formula, env: dict) -> bool:
    """Truth value of ``f`` under a total assignment ``env``."""
    if isinstance(f, TrueConst):
        return True
    if isinstance(f, FalseConst):
        return False
    if isinstance(f, BoolVar):
        return bool(env[f.name])
    if isinstance(f, IntAtom):
        a = f.lhs.value if isinstance(f.lhs, IntConst) else env[f.lhs.name]
        b = f.rhs.value if isinstance(f.rhs, IntConst) else env[f.rhs.name]
        return _eval_rel(a, f.op, b)
    if isinstance(f, Not):
        return not evaluate(f.arg, env)
    a, b = evaluate(f.left, env), evaluate(f.right, env)
    if isinstance(f, And):
        return a and b
    if isinstance(f, Or):
        return a or b
    if isinstance(f, Xor):
        return a != b
    if isinstance(f, Implies):
        return (not a) or b
    return a == b
