"""SMT-LIB 2 text: s-expression parsing, term emission, model parsing.

Emission is deterministic and uses let-bindings for DAG nodes referenced
more than once, so shared subformulas are written once.  Quantifier bodies
get their own let scope; nothing crosses a binder.
"""

from __future__ import annotations

from fractions import Fraction
from typing import IO, Iterable

from .terms import (
    Atom,
    BoolLit,
    BoolVar,
    Conn,
    EQ,
    Forall,
    LE,
    LT,
    LinExpr,
    Not,
    Term,
)

# ---------------------------------------------------------------------------
# S-expressions


def tokenize(text: str):
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch
            i += 1
        elif ch == "|":
            j = text.index("|", i + 1)
            yield text[i : j + 1]
            i = j + 1
        elif ch == '"':
            j = i + 1
            while j < n:
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        j += 2
                        continue
                    break
                j += 1
            yield text[i : j + 1]
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in ' \t\r\n();"|':
                j += 1
            yield text[i:j]
            i = j


def parse_forms(text: str) -> list:
    """All top-level s-expressions as nested lists of token strings."""
    stack: list[list] = [[]]
    for tok in tokenize(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) < 2:
                raise ValueError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ValueError("unbalanced '('")
    return stack[0]


def read_form(stream: IO[str]) -> str | None:
    """One balanced form from a line-oriented stream; None at end of input.

    Reads whole lines and accumulates until parentheses balance, which is
    enough for the newline-flushed query protocol used here.
    """
    buf = []
    depth = 0
    while True:
        line = stream.readline()
        if line == "":
            return None if not buf else "".join(buf)
        stripped = line.split(";", 1)[0]
        buf.append(line)
        depth += stripped.count("(") - stripped.count(")")
        if depth <= 0 and any(s.strip() for s in buf):
            return "".join(buf)


# ---------------------------------------------------------------------------
# Rationals


def rat_sexpr(q: Fraction) -> str:
    q = Fraction(q)
    if q < 0:
        return f"(- {rat_sexpr(-q)})"
    if q.denominator == 1:
        return str(q.numerator)
    return f"(/ {q.numerator} {q.denominator})"


def node_to_rat(node) -> Fraction:
    if isinstance(node, str):
        if "." in node:
            whole, frac = node.split(".", 1)
            return Fraction(int(whole + frac), 10 ** len(frac))
        return Fraction(int(node))
    if isinstance(node, list) and node:
        if node[0] == "-" and len(node) == 2:
            return -node_to_rat(node[1])
        if node[0] == "/" and len(node) == 3:
            return node_to_rat(node[1]) / node_to_rat(node[2])
    raise ValueError(f"not a rational value: {node!r}")


def node_to_value(node) -> Fraction | bool:
    if node == "true":
        return True
    if node == "false":
        return False
    return node_to_rat(node)


def parse_get_value(text: str) -> dict[str, Fraction | bool]:
    forms = parse_forms(text)
    if not forms or not isinstance(forms[0], list):
        raise ValueError(f"bad get-value response: {text!r}")
    out: dict[str, Fraction | bool] = {}
    for pair in forms[0]:
        if not (isinstance(pair, list) and len(pair) == 2 and isinstance(pair[0], str)):
            raise ValueError(f"bad get-value pair: {pair!r}")
        out[pair[0]] = node_to_value(pair[1])
    return out


# ---------------------------------------------------------------------------
# Emission


def lin_sexpr(e: LinExpr) -> str:
    parts = []
    for v, c in e.coeffs:
        if c == 1:
            parts.append(v)
        else:
            parts.append(f"(* {rat_sexpr(c)} {v})")
    if e.const != 0 or not parts:
        parts.append(rat_sexpr(e.const))
    if len(parts) == 1:
        return parts[0]
    return f"(+ {' '.join(parts)})"


_ATOM_HEAD = {LE: "<=", LT: "<", EQ: "="}


def emit_term(t: Term) -> str:
    """Deterministic s-expression for a term, with let-shared DAG nodes."""
    refs: dict[int, int] = {}
    order: list[Term] = []

    def count(node: Term) -> None:
        key = id(node)
        refs[key] = refs.get(key, 0) + 1
        if refs[key] > 1:
            return
        if isinstance(node, Not):
            count(node.arg)
        elif isinstance(node, Conn):
            for a in node.args:
                count(a)
        if isinstance(node, (Not, Conn, Atom)):
            order.append(node)

    count(t)
    names: dict[int, str] = {}
    defs: list[tuple[str, Term]] = []
    for node in order:
        if refs[id(node)] >= 2 and not isinstance(node, (BoolVar, BoolLit)):
            name = f"?l{len(defs)}"
            names[id(node)] = name
            defs.append((name, node))

    def plain(node: Term, *, top: bool = False) -> str:
        if not top:
            name = names.get(id(node))
            if name is not None:
                return name
        return raw(node)

    def raw(node: Term) -> str:
        if isinstance(node, BoolLit):
            return "true" if node.value else "false"
        if isinstance(node, BoolVar):
            return node.name
        if isinstance(node, Not):
            return f"(not {plain(node.arg)})"
        if isinstance(node, Conn):
            return f"({node.op} {' '.join(plain(a) for a in node.args)})"
        if isinstance(node, Atom):
            return f"({_ATOM_HEAD[node.op]} {lin_sexpr(node.expr)} 0)"
        if isinstance(node, Forall):
            binders = " ".join(f"({n} {s})" for n, s in node.bound)
            return f"(forall ({binders}) {emit_term(node.body)})"
        raise TypeError(f"unknown term {node!r}")

    body = plain(t, top=True)
    # defs are in dependency order: inner nodes were visited before outer ones
    for name, node in reversed(defs):
        body = f"(let (({name} {raw(node)})) {body})"
    return body


def declarations(bools: Iterable[str], reals: Iterable[str]) -> list[str]:
    lines = [f"(declare-const {v} Real)" for v in sorted(reals)]
    lines += [f"(declare-const {v} Bool)" for v in sorted(bools)]
    return lines


def assert_lines(assertions: Iterable[Term]) -> list[str]:
    return [f"(assert {emit_term(a)})" for a in assertions]
