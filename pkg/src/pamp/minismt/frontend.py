"""Command session for the pipe protocol.

Accepts the command subset the rest of the package emits: declare-const,
declare-fun with no arguments, assert, check-sat, get-value, exit, and
silent set-logic / set-info / set-option.  Terms may use let, forall,
chainable comparisons, sort-inferred equality, and distinct.
"""

from __future__ import annotations

import time
from fractions import Fraction

from ..smtlib import parse_forms, rat_sexpr
from ..terms import (
    BOOL,
    REAL,
    BoolVar,
    LinExpr,
    Term,
    mk_and,
    mk_bool,
    mk_eq,
    mk_forall,
    mk_ge,
    mk_gt,
    mk_iff,
    mk_implies,
    mk_le,
    mk_lt,
    mk_not,
    mk_or,
)
from . import quant

EXIT = "EXIT"

_REAL_HEADS = {"+", "-", "*", "/"}
_BOOL_HEADS = {"not", "and", "or", "=>", "<=", "<", ">=", ">", "=", "distinct", "forall"}


class SmtError(Exception):
    pass


def _name(tok: str) -> str:
    if tok.startswith("|") and tok.endswith("|") and len(tok) >= 2:
        return tok[1:-1]
    return tok


def _parse_number(tok: str) -> Fraction | None:
    if not tok or not (tok[0].isdigit() or (tok[0] == "-" and len(tok) > 1)):
        return None
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        return None


Scope = dict[str, tuple[str, "Term | LinExpr"]]


class Session:
    def __init__(self, timeout: float | None = None) -> None:
        self.timeout = timeout
        self.sorts: dict[str, str] = {}
        self.asserts: list[Term] = []
        self.status: str | None = None
        self.model_bools: dict[str, bool] = {}
        self.model_rats: dict[str, Fraction] = {}

    # -- term construction -------------------------------------------------

    def _scope0(self) -> Scope:
        out: Scope = {}
        for n, s in self.sorts.items():
            out[n] = ("real", LinExpr.var(n)) if s == REAL else ("bool", mk_boolvar(n))
        return out

    def _sort_of(self, node, scope: Scope) -> str:
        if isinstance(node, str):
            tok = _name(node)
            if _parse_number(tok) is not None:
                return "real"
            entry = scope.get(tok)
            if entry is not None:
                return entry[0]
            raise SmtError(f"unknown symbol {tok}")
        if not node:
            raise SmtError("empty form")
        head = node[0] if isinstance(node[0], str) else None
        if head in _REAL_HEADS:
            return "real"
        if head in _BOOL_HEADS or head in ("true", "false"):
            return "bool"
        if head == "let":
            inner = self._let_scope(node, scope)
            return self._sort_of(node[2], inner)
        raise SmtError(f"cannot infer sort of {head!r}")

    def _let_scope(self, node, scope: Scope) -> Scope:
        if len(node) != 3 or not isinstance(node[1], list):
            raise SmtError("malformed let")
        inner = dict(scope)
        for binding in node[1]:
            if not (isinstance(binding, list) and len(binding) == 2):
                raise SmtError("malformed let binding")
            bname = _name(binding[0])
            sort = self._sort_of(binding[1], scope)
            if sort == "real":
                inner[bname] = ("real", self._rexpr(binding[1], scope))
            else:
                inner[bname] = ("bool", self._term(binding[1], scope))
        return inner

    def _rexpr(self, node, scope: Scope) -> LinExpr:
        if isinstance(node, str):
            tok = _name(node)
            value = _parse_number(tok)
            if value is not None:
                return LinExpr.const_of(value)
            entry = scope.get(tok)
            if entry is None or entry[0] != "real":
                raise SmtError(f"not a real term: {tok}")
            return entry[1]
        if not node:
            raise SmtError("empty form")
        head = node[0] if isinstance(node[0], str) else None
        args = node[1:]
        if head == "+":
            out = LinExpr.const_of(0)
            for a in args:
                out = out + self._rexpr(a, scope)
            return out
        if head == "-":
            if len(args) == 1:
                return self._rexpr(args[0], scope).scale(Fraction(-1))
            out = self._rexpr(args[0], scope)
            for a in args[1:]:
                out = out - self._rexpr(a, scope)
            return out
        if head == "*":
            exprs = [self._rexpr(a, scope) for a in args]
            out = LinExpr.const_of(1)
            for e in exprs:
                if out.is_const:
                    out = e.scale(out.const)
                elif e.is_const:
                    out = out.scale(e.const)
                else:
                    raise SmtError("nonlinear product")
            return out
        if head == "/":
            num = self._rexpr(args[0], scope)
            for a in args[1:]:
                d = self._rexpr(a, scope)
                if not d.is_const or d.const == 0:
                    raise SmtError("division must be by a nonzero constant")
                num = num.scale(Fraction(1) / d.const)
            return num
        if head == "let":
            return self._rexpr(node[2], self._let_scope(node, scope))
        raise SmtError(f"not a real operator: {head!r}")

    def _term(self, node, scope: Scope) -> Term:
        if isinstance(node, str):
            tok = _name(node)
            if tok == "true":
                return mk_bool(True)
            if tok == "false":
                return mk_bool(False)
            entry = scope.get(tok)
            if entry is None or entry[0] != "bool":
                raise SmtError(f"not a boolean term: {tok}")
            return entry[1]
        if not node:
            raise SmtError("empty form")
        head = node[0] if isinstance(node[0], str) else None
        args = node[1:]
        if head == "not":
            return mk_not(self._term(args[0], scope))
        if head == "and":
            return mk_and(*(self._term(a, scope) for a in args))
        if head == "or":
            return mk_or(*(self._term(a, scope) for a in args))
        if head == "=>":
            out = self._term(args[-1], scope)
            for a in reversed(args[:-1]):
                out = mk_implies(self._term(a, scope), out)
            return out
        if head in ("<=", "<", ">=", ">"):
            mk = {"<=": mk_le, "<": mk_lt, ">=": mk_ge, ">": mk_gt}[head]
            exprs = [self._rexpr(a, scope) for a in args]
            return mk_and(*(mk(a, b) for a, b in zip(exprs, exprs[1:])))
        if head == "=":
            if self._sort_of(args[0], scope) == "real":
                exprs = [self._rexpr(a, scope) for a in args]
                return mk_and(*(mk_eq(a, b) for a, b in zip(exprs, exprs[1:])))
            terms = [self._term(a, scope) for a in args]
            return mk_and(*(mk_iff(a, b) for a, b in zip(terms, terms[1:])))
        if head == "distinct":
            if self._sort_of(args[0], scope) == "real":
                exprs = [self._rexpr(a, scope) for a in args]
                pairs = [
                    mk_not(mk_eq(exprs[i], exprs[j]))
                    for i in range(len(exprs))
                    for j in range(i + 1, len(exprs))
                ]
            else:
                terms = [self._term(a, scope) for a in args]
                pairs = [
                    mk_not(mk_iff(terms[i], terms[j]))
                    for i in range(len(terms))
                    for j in range(i + 1, len(terms))
                ]
            return mk_and(*pairs)
        if head == "forall":
            if len(args) != 2 or not isinstance(args[0], list):
                raise SmtError("malformed forall")
            bound: list[tuple[str, str]] = []
            inner = dict(scope)
            for b in args[0]:
                if not (isinstance(b, list) and len(b) == 2):
                    raise SmtError("malformed forall binding")
                bname, bsort = _name(b[0]), _name(b[1])
                if bsort not in (BOOL, REAL):
                    raise SmtError(f"unsupported sort {bsort}")
                bound.append((bname, bsort))
                if bsort == REAL:
                    inner[bname] = ("real", LinExpr.var(bname))
                else:
                    inner[bname] = ("bool", mk_boolvar(bname))
            return mk_forall(bound, self._term(args[1], inner))
        if head == "let":
            return self._term(node[2], self._let_scope(node, scope))
        raise SmtError(f"not a boolean operator: {head!r}")

    # -- commands ----------------------------------------------------------

    def execute(self, form) -> str | None:
        if not isinstance(form, list) or not form or not isinstance(form[0], str):
            raise SmtError("malformed command")
        cmd = form[0]
        if cmd in ("set-logic", "set-info", "set-option"):
            return None
        if cmd == "declare-const":
            return self._declare(_name(form[1]), _name(form[2]))
        if cmd == "declare-fun":
            if len(form) != 4 or form[2] != []:
                raise SmtError("only constant declarations are supported")
            return self._declare(_name(form[1]), _name(form[3]))
        if cmd == "assert":
            if len(form) != 2:
                raise SmtError("malformed assert")
            self.asserts.append(self._term(form[1], self._scope0()))
            return None
        if cmd == "check-sat":
            deadline = None
            if self.timeout is not None:
                deadline = time.monotonic() + self.timeout
            bools = [n for n, s in self.sorts.items() if s == BOOL]
            reals = [n for n, s in self.sorts.items() if s == REAL]
            try:
                status, mb, mr = quant.solve(self.asserts, bools, reals, deadline)
            except quant.UnsupportedQuantifier as exc:
                raise SmtError(str(exc)) from exc
            self.status = status
            self.model_bools = mb or {}
            self.model_rats = mr or {}
            return status
        if cmd == "get-value":
            if self.status != "sat":
                return '(error "model is only available after sat")'
            if len(form) != 2 or not isinstance(form[1], list):
                raise SmtError("malformed get-value")
            parts = []
            for item in form[1]:
                if not isinstance(item, str):
                    raise SmtError("get-value supports plain symbols only")
                n = _name(item)
                sort = self.sorts.get(n)
                if sort is None:
                    raise SmtError(f"unknown symbol {n}")
                if sort == BOOL:
                    value = "true" if self.model_bools.get(n, False) else "false"
                else:
                    value = rat_sexpr(self.model_rats.get(n, Fraction(0)))
                parts.append(f"({n} {value})")
            return "(" + " ".join(parts) + ")"
        if cmd == "exit":
            return EXIT
        raise SmtError(f"unsupported command {cmd}")

    def _declare(self, name: str, sort: str) -> None:
        if sort not in (BOOL, REAL):
            raise SmtError(f"unsupported sort {sort}")
        old = self.sorts.get(name)
        if old is not None and old != sort:
            raise SmtError(f"{name} redeclared with a different sort")
        self.sorts[name] = sort
        return None


def mk_boolvar(name: str) -> BoolVar:
    return BoolVar(name)


def run(stdin, stdout, timeout: float | None = None) -> int:
    from ..smtlib import read_form

    session = Session(timeout=timeout)
    while True:
        text = read_form(stdin)
        if text is None:
            return 0
        try:
            forms = parse_forms(text)
        except ValueError as exc:
            print(f'(error "{exc}")', file=stdout, flush=True)
            continue
        for form in forms:
            try:
                resp = session.execute(form)
            except SmtError as exc:
                print(f'(error "{exc}")', file=stdout, flush=True)
                continue
            if resp == EXIT:
                return 0
            if resp is not None:
                print(resp, file=stdout, flush=True)
