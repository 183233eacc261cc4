"""Text syntax for terms, formulas, sequents, calculus specs and derivations.

Grammar summary:
  atoms        ``P(t, ...)`` or bare ``P`` (uppercase-initial predicate names)
  equality     ``t = s``      (binds tighter than the connectives)
  falsum       ``bot``
  connectives  ``&`` ``|`` ``->``   right-associative, precedence & > | > ->
  quantifiers  ``forall x. A`` / ``exists x. A``  (scope extends maximally right)
  sequents     ``A1, ..., Am |- B1, ..., Bn``     (either side may be empty)
  comments     ``#`` to end of line

Lowercase-initial identifiers are parameters, bound variables (when a binder
of that name encloses them) or function symbols (when applied).  Identifiers
may not begin with ``_``; that prefix is reserved for generated
eigenparameters.  Derivation files use a parenthesized tree format
``(rule [args] "sequent" child*)`` for which print/parse round-trips exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    And,
    Atom,
    BOT,
    Bottom,
    BoundVar,
    Eq,
    EqSeqError,
    Exists,
    Formula,
    Forall,
    FunApp,
    Imp,
    Or,
    Param,
    Path,
    Sequent,
    Term,
    formula_params,
)


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int


class ParseError(EqSeqError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{message} at line {span.line}, column {span.column}")
        self.message = message
        self.span = span


class ArityConflictError(ParseError):
    pass


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident" | "punct" | "string" | "int"
    text: str
    span: SourceSpan


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens: list[_Token] = []
        self._run()

    def _span(self, start: int, startline: int, startcol: int) -> SourceSpan:
        return SourceSpan(start, self.pos, startline, startcol)

    def _error(self, msg: str) -> ParseError:
        return ParseError(msg, SourceSpan(self.pos, self.pos + 1, self.line, self.col))

    def _advance(self, n: int) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _run(self) -> None:
        text = self.text
        while self.pos < len(text):
            c = text[self.pos]
            if c in " \t\r\n":
                self._advance(1)
                continue
            if c == "#":
                while self.pos < len(text) and text[self.pos] != "\n":
                    self._advance(1)
                continue
            start, sl, sc = self.pos, self.line, self.col
            if c == '"':
                self._advance(1)
                buf = []
                while self.pos < len(text) and text[self.pos] != '"':
                    buf.append(text[self.pos])
                    self._advance(1)
                if self.pos >= len(text):
                    raise self._error("unterminated string")
                self._advance(1)
                self.tokens.append(_Token("string", "".join(buf), self._span(start, sl, sc)))
                continue
            two = text[self.pos : self.pos + 2]
            if two in ("|-", "->"):
                self._advance(2)
                self.tokens.append(_Token("punct", two, self._span(start, sl, sc)))
                continue
            if c in "(),=&|.[];":
                self._advance(1)
                self.tokens.append(_Token("punct", c, self._span(start, sl, sc)))
                continue
            if c.isdigit():
                while self.pos < len(text) and text[self.pos].isdigit():
                    self._advance(1)
                self.tokens.append(_Token("int", text[start : self.pos], self._span(start, sl, sc)))
                continue
            if c.isalpha() or c == "_":
                # a leading underscore marks generated eigenparameters; it is
                # rejected in user-facing input by the reserved-name check
                while self.pos < len(text) and (text[self.pos].isalnum() or text[self.pos] in "_'+"):
                    self._advance(1)
                self.tokens.append(_Token("ident", text[start : self.pos], self._span(start, sl, sc)))
                continue
            raise self._error(f"unexpected character {c!r}")


class _Parser:
    """Recursive-descent parser over the token stream.

    A single parser instance tracks function/predicate arities, so arity
    consistency is enforced across one parse call (e.g. a whole ``.drv`` file).
    """

    def __init__(self, text: str):
        self.text = text
        self.tokens = _Lexer(text).tokens
        self.i = 0
        self.fun_arity: dict[str, int] = {}
        self.pred_arity: dict[str, int] = {}

    # -- token plumbing

    def _eof_span(self) -> SourceSpan:
        if self.tokens:
            last = self.tokens[-1].span
            return SourceSpan(last.end, last.end, last.line, last.column)
        return SourceSpan(0, 0, 1, 1)

    def peek(self) -> _Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self._eof_span())
        self.i += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text or tok.kind not in ("punct", "ident"):
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.span)
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    def done(self) -> bool:
        return self.i >= len(self.tokens)

    def require_done(self) -> None:
        tok = self.peek()
        if tok is not None:
            raise ParseError(f"trailing input {tok.text!r}", tok.span)

    # -- arity bookkeeping

    def _check_fun(self, name: str, arity: int, span: SourceSpan) -> None:
        seen = self.fun_arity.setdefault(name, arity)
        if seen != arity:
            raise ArityConflictError(
                f"arity-conflict: function {name} used with {arity} args, earlier {seen}", span
            )

    def _check_pred(self, name: str, arity: int, span: SourceSpan) -> None:
        seen = self.pred_arity.setdefault(name, arity)
        if seen != arity:
            raise ArityConflictError(
                f"arity-conflict: predicate {name} used with {arity} args, earlier {seen}", span
            )

    # -- terms

    def term(self, bound: frozenset[str]) -> Term:
        tok = self.next()
        if tok.kind != "ident" or not (tok.text[0].islower() or tok.text[0] == "_"):
            raise ParseError(f"expected a term, found {tok.text!r}", tok.span)
        name = tok.text
        if self.at("("):
            self.expect("(")
            args: list[Term] = []
            if not self.at(")"):
                args.append(self.term(bound))
                while self.at(","):
                    self.expect(",")
                    args.append(self.term(bound))
            self.expect(")")
            self._check_fun(name, len(args), tok.span)
            return FunApp(name, tuple(args))
        if name in bound:
            return BoundVar(name)
        return Param(name)

    # -- formulas

    def formula(self, bound: frozenset[str] = frozenset()) -> Formula:
        return self._imp(bound)

    def _imp(self, bound: frozenset[str]) -> Formula:
        left = self._or(bound)
        if self.at("->"):
            self.expect("->")
            return Imp(left, self._imp(bound))
        return left

    def _or(self, bound: frozenset[str]) -> Formula:
        left = self._and(bound)
        if self.at("|"):
            self.expect("|")
            return Or(left, self._or(bound))
        return left

    def _and(self, bound: frozenset[str]) -> Formula:
        left = self._unit(bound)
        if self.at("&"):
            self.expect("&")
            return And(left, self._and(bound))
        return left

    def _unit(self, bound: frozenset[str]) -> Formula:
        tok = self.peek()
        if tok is None:
            raise ParseError("expected a formula", self._eof_span())
        if tok.text == "(":
            self.expect("(")
            f = self.formula(bound)
            self.expect(")")
            return f
        if tok.kind == "ident" and tok.text in ("forall", "exists"):
            self.next()
            var = self.next()
            if var.kind != "ident" or not var.text[0].islower():
                raise ParseError("expected a bound variable name", var.span)
            self.expect(".")
            body = self.formula(bound | {var.text})
            return Forall(var.text, body) if tok.text == "forall" else Exists(var.text, body)
        if tok.kind == "ident" and tok.text == "bot":
            self.next()
            return BOT
        if tok.kind == "ident" and tok.text[0].isupper():
            self.next()
            args: list[Term] = []
            if self.at("("):
                self.expect("(")
                args.append(self.term(bound))
                while self.at(","):
                    self.expect(",")
                    args.append(self.term(bound))
                self.expect(")")
            self._check_pred(tok.text, len(args), tok.span)
            return Atom(tok.text, tuple(args))
        # must be an equality
        lhs = self.term(bound)
        self.expect("=")
        rhs = self.term(bound)
        return Eq(lhs, rhs)

    # -- sequents

    def parse_sequent_body(self) -> Sequent:
        ante: list[Formula] = []
        if not self.at("|-"):
            ante.append(self.formula())
            while self.at(","):
                self.expect(",")
                ante.append(self.formula())
        self.expect("|-")
        succ: list[Formula] = []
        if not self.done() and not self.at(")"):
            tok = self.peek()
            if tok is not None and tok.text not in (")",):
                succ.append(self.formula())
                while self.at(","):
                    self.expect(",")
                    succ.append(self.formula())
        return Sequent(tuple(ante), tuple(succ))


def _rename_binders_apart(f: Formula) -> Formula:
    """Rename quantifier variables that collide with parameter names."""
    params = formula_params(f)

    def fresh(name: str, taken: set[str]) -> str:
        cand = name
        while cand in taken:
            cand += "'"
        return cand

    def walk(g: Formula, renaming: dict[str, str]) -> Formula:
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(walk_term(t, renaming) for t in g.args))
        if isinstance(g, Eq):
            return Eq(walk_term(g.lhs, renaming), walk_term(g.rhs, renaming))
        if isinstance(g, And):
            return And(walk(g.left, renaming), walk(g.right, renaming))
        if isinstance(g, Or):
            return Or(walk(g.left, renaming), walk(g.right, renaming))
        if isinstance(g, Imp):
            return Imp(walk(g.left, renaming), walk(g.right, renaming))
        if isinstance(g, (Forall, Exists)):
            newvar = g.var
            if g.var in params:
                newvar = fresh(g.var, params | set(renaming.values()))
            sub = dict(renaming)
            sub[g.var] = newvar
            body = walk(g.body, sub)
            return Forall(newvar, body) if isinstance(g, Forall) else Exists(newvar, body)
        return g

    def walk_term(t: Term, renaming: dict[str, str]) -> Term:
        if isinstance(t, BoundVar):
            return BoundVar(renaming.get(t.name, t.name))
        if isinstance(t, FunApp):
            return FunApp(t.sym, tuple(walk_term(a, renaming) for a in t.args))
        return t

    return walk(f, {})


def _check_reserved(text: str, p: _Parser) -> None:
    for tok in p.tokens:
        if tok.kind == "ident" and tok.text.startswith("_"):
            raise ParseError(
                f"identifier {tok.text!r} is reserved for generated eigenparameters", tok.span
            )


def parse_term(text: str) -> Term:
    p = _Parser(text)
    _check_reserved(text, p)
    t = p.term(frozenset())
    p.require_done()
    return t


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    _check_reserved(text, p)
    f = p.formula()
    p.require_done()
    return _rename_binders_apart(f)


def parse_sequent(text: str) -> Sequent:
    p = _Parser(text)
    _check_reserved(text, p)
    s = p.parse_sequent_body()
    p.require_done()
    return Sequent(
        tuple(_rename_binders_apart(f) for f in s.ante),
        tuple(_rename_binders_apart(f) for f in s.succ),
    )


# ---------------------------------------------------------------------------
# Printers (canonical form; parse of the output reproduces the value)

_PREC_IMP, _PREC_OR, _PREC_AND, _PREC_UNIT = 0, 1, 2, 3


def print_formula(f: Formula, prec: int = _PREC_IMP) -> str:
    if isinstance(f, (Atom, Eq, Bottom)):
        return str(f)
    if isinstance(f, Imp):
        s = f"{print_formula(f.left, _PREC_OR)} -> {print_formula(f.right, _PREC_IMP)}"
        return f"({s})" if prec > _PREC_IMP else s
    if isinstance(f, Or):
        s = f"{print_formula(f.left, _PREC_AND)} | {print_formula(f.right, _PREC_OR)}"
        return f"({s})" if prec > _PREC_OR else s
    if isinstance(f, And):
        s = f"{print_formula(f.left, _PREC_UNIT)} & {print_formula(f.right, _PREC_AND)}"
        return f"({s})" if prec > _PREC_AND else s
    if isinstance(f, Forall):
        s = f"forall {f.var}. {print_formula(f.body, _PREC_IMP)}"
        return f"({s})" if prec > _PREC_IMP else s
    if isinstance(f, Exists):
        s = f"exists {f.var}. {print_formula(f.body, _PREC_IMP)}"
        return f"({s})" if prec > _PREC_IMP else s
    raise EqSeqError(f"unknown formula node {f!r}")


def print_sequent(s: Sequent) -> str:
    left = ", ".join(print_formula(f) for f in s.ante)
    right = ", ".join(print_formula(f) for f in s.succ)
    if left and right:
        return f"{left} |- {right}"
    if left:
        return f"{left} |-"
    if right:
        return f"|- {right}"
    return "|-"


def print_path(p: Path) -> str:
    return ".".join(str(i) for i in p)


def parse_path(text: str, span: SourceSpan) -> Path:
    try:
        return tuple(int(part) for part in text.split("."))
    except ValueError:
        raise ParseError(f"malformed path {text!r}", span) from None


# ---------------------------------------------------------------------------
# Derivation files: (rule [instance-args] "sequent" child*)

from .calculus import (  # noqa: E402  (parser is imported lazily from calculus)
    LEFT_REPLACEMENT,
    RIGHT_REPLACEMENT,
    RULE_BY_NAME,
    Replacement,
    RuleId,
    RuleInstance,
)
from .checker import Derivation  # noqa: E402

_ONE_PRINCIPAL = {
    RuleId.REFAX,
    RuleId.LBOT,
    RuleId.LAND,
    RuleId.RAND,
    RuleId.LOR,
    RuleId.ROR,
    RuleId.LIMP,
    RuleId.RIMP,
    RuleId.LIMPI,
    RuleId.RIMPI,
    RuleId.LW,
    RuleId.RW,
    RuleId.LC,
    RuleId.RC,
    RuleId.LCEQ,
    RuleId.SYMM,
}
_WITNESS_PRINCIPAL = {RuleId.LFORALL, RuleId.REXISTS}
_EIGEN_PRINCIPAL = {RuleId.RFORALL, RuleId.RFORALLI, RuleId.LEXISTS}
_REPLACEMENT = set(RIGHT_REPLACEMENT) | set(LEFT_REPLACEMENT)


def _csv(indices) -> str:
    return ",".join(str(i) for i in indices)


def _paths_csv(paths) -> str:
    return ",".join(print_path(p) for p in paths)


def format_instance_args(inst: RuleInstance) -> str:
    r = inst.rule
    if r in (RuleId.INIT, RuleId.MINBOT):
        return f"{inst.principal[0]};{inst.principal[1]}"
    if r in _ONE_PRINCIPAL:
        return str(inst.principal[0])
    if r in _WITNESS_PRINCIPAL:
        return f"{inst.principal[0]};{inst.witness}"
    if r in _EIGEN_PRINCIPAL:
        return f"{inst.principal[0]};{inst.eigen}"
    if r is RuleId.REFL:
        return str(inst.witness)
    if r is RuleId.CUT:
        a1, s1 = inst.split or ((), ())
        return f'{_csv(a1)};{_csv(s1)};"{print_formula(inst.cut_formula)}"'
    if r is RuleId.CNG:
        rep = inst.replacement
        a1, s1 = inst.split or ((), ())
        return f'{_csv(a1)};{_csv(s1)};{rep.context_index};{_paths_csv(rep.paths)};"{inst.witness}"'
    if r in _REPLACEMENT:
        rep = inst.replacement
        return f"{rep.eq_index};{rep.context_index};{_paths_csv(rep.paths)}"
    raise EqSeqError(f"no argument syntax for rule {r.value}")


def print_derivation(d: Derivation) -> str:
    return _print_node(d, 0) + "\n"


def _print_node(d: Derivation, depth: int) -> str:
    pad = "  " * depth
    head = f'{pad}({d.inst.rule.value} [{format_instance_args(d.inst)}] "{print_sequent(d.sequent)}"'
    if not d.children:
        return head + ")"
    lines = [head]
    for c in d.children:
        lines.append(_print_node(c, depth + 1))
    return "\n".join(lines) + ")"


class _DerivationParser(_Parser):
    def _sub(self, text: str) -> _Parser:
        sub = _Parser(text)
        sub.fun_arity = self.fun_arity
        sub.pred_arity = self.pred_arity
        return sub

    def _int(self) -> int:
        tok = self.next()
        if tok.kind != "int":
            raise ParseError(f"expected an index, found {tok.text!r}", tok.span)
        return int(tok.text)

    def _index_csv(self) -> tuple[int, ...]:
        parts: list[int] = []
        if self.at(";") or self.at("]"):
            return ()
        parts.append(self._int())
        while self.at(","):
            self.expect(",")
            parts.append(self._int())
        return tuple(parts)

    def _path(self) -> Path:
        parts = [self._int()]
        while self.at("."):
            self.expect(".")
            parts.append(self._int())
        return tuple(parts)

    def _paths_csv(self) -> tuple[Path, ...]:
        if self.at(";") or self.at("]"):
            return ()
        paths = [self._path()]
        while self.at(","):
            self.expect(",")
            paths.append(self._path())
        return tuple(paths)

    def _string(self) -> tuple[str, SourceSpan]:
        tok = self.next()
        if tok.kind != "string":
            raise ParseError(f"expected a quoted string, found {tok.text!r}", tok.span)
        return tok.text, tok.span

    def _name(self) -> str:
        tok = self.next()
        if tok.kind != "ident":
            raise ParseError(f"expected a name, found {tok.text!r}", tok.span)
        return tok.text

    def instance_args(self, rule: RuleId, span: SourceSpan) -> RuleInstance:
        self.expect("[")
        if rule in (RuleId.INIT, RuleId.MINBOT):
            i = self._int()
            self.expect(";")
            j = self._int()
            inst = RuleInstance(rule, (i, j))
        elif rule in _ONE_PRINCIPAL:
            inst = RuleInstance(rule, (self._int(),))
        elif rule in _WITNESS_PRINCIPAL:
            i = self._int()
            self.expect(";")
            inst = RuleInstance(rule, (i,), witness=self.term(frozenset()))
        elif rule in _EIGEN_PRINCIPAL:
            i = self._int()
            self.expect(";")
            inst = RuleInstance(rule, (i,), eigen=self._name())
        elif rule is RuleId.REFL:
            inst = RuleInstance(rule, witness=self.term(frozenset()))
        elif rule is RuleId.CUT:
            a1 = self._index_csv()
            self.expect(";")
            s1 = self._index_csv()
            self.expect(";")
            text, fspan = self._string()
            sub = self._sub(text)
            formula = _rename_binders_apart(sub.formula())
            sub.require_done()
            inst = RuleInstance(rule, cut_formula=formula, split=(a1, s1))
        elif rule is RuleId.CNG:
            a1 = self._index_csv()
            self.expect(";")
            s1 = self._index_csv()
            self.expect(";")
            ctx = self._int()
            self.expect(";")
            paths = self._paths_csv()
            self.expect(";")
            text, _tspan = self._string()
            sub = self._sub(text)
            term = sub.term(frozenset())
            sub.require_done()
            inst = RuleInstance(
                rule, replacement=Replacement(None, ctx, paths), witness=term, split=(a1, s1)
            )
        elif rule in _REPLACEMENT:
            e = self._int()
            self.expect(";")
            ctx = self._int()
            self.expect(";")
            paths = self._paths_csv()
            if not paths:
                raise ParseError("malformed instance args: empty path list", span)
            inst = RuleInstance(rule, replacement=Replacement(e, ctx, paths))
        else:
            raise ParseError(f"no argument syntax for rule {rule.value}", span)
        self.expect("]")
        return inst

    def node(self) -> Derivation:
        self.expect("(")
        tok = self.next()
        if tok.kind != "ident" or tok.text not in RULE_BY_NAME:
            raise ParseError(f"unknown rule id {tok.text!r}", tok.span)
        rule = RULE_BY_NAME[tok.text]
        inst = self.instance_args(rule, tok.span)
        text, sspan = self._string()
        sub = self._sub(text)
        try:
            seq = sub.parse_sequent_body()
            sub.require_done()
        except ParseError as exc:
            raise ParseError(f"in sequent {text!r}: {exc.message}", sspan) from exc
        children: list[Derivation] = []
        while not self.at(")"):
            children.append(self.node())
        self.expect(")")
        return Derivation(seq, inst, tuple(children))


def parse_derivation(text: str) -> Derivation:
    p = _DerivationParser(text)
    d = p.node()
    p.require_done()
    return d
