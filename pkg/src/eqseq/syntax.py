"""First-order terms, formulas and sequents with multiset semantics.

Parameters stand uniformly for constants and free variables; bound
variables are a separate node kind and are only legal under a binder of
the same name.  All values are immutable and hashable, so they can be
shared freely between concurrent workers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from collections import Counter
from functools import cached_property


class EqSeqError(Exception):
    """Base class for all errors raised by this package."""


class SyntaxInvariantError(EqSeqError):
    """A term/formula operation was applied outside its precondition."""


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Param(Term):
    """A constant or free variable (the calculi never distinguish them)."""

    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class BoundVar(Term):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class FunApp(Term):
    sym: str
    args: tuple[Term, ...]

    def __str__(self) -> str:
        if not self.args:
            return f"{self.sym}()"
        return f"{self.sym}({', '.join(str(a) for a in self.args)})"


def term_height(t: Term) -> int:
    """Height of the formation tree; parameters and bound variables are 0."""
    if isinstance(t, FunApp):
        if not t.args:
            return 1
        return 1 + max(term_height(a) for a in t.args)
    return 0


def term_params(t: Term) -> set[str]:
    if isinstance(t, Param):
        return {t.name}
    if isinstance(t, FunApp):
        out: set[str] = set()
        for a in t.args:
            out |= term_params(a)
        return out
    return set()


def term_has_bound(t: Term) -> bool:
    if isinstance(t, BoundVar):
        return True
    if isinstance(t, FunApp):
        return any(term_has_bound(a) for a in t.args)
    return False


def subterms(t: Term) -> set[Term]:
    out = {t}
    if isinstance(t, FunApp):
        for a in t.args:
            out |= subterms(a)
    return out


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: tuple[Term, ...]

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}({', '.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Eq(Formula):
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return f"{self.lhs} = {self.rhs}"


@dataclass(frozen=True)
class Bottom(Formula):
    def __str__(self) -> str:
        return "bot"


BOT = Bottom()


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


def is_atomic(f: Formula) -> bool:
    """Atoms and equalities; the only legal context formulas for replacement."""
    return isinstance(f, (Atom, Eq))


def is_identity(f: Formula) -> bool:
    """``t = t`` with syntactically identical sides."""
    return isinstance(f, Eq) and f.lhs == f.rhs


def formula_params(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        out: set[str] = set()
        for t in f.args:
            out |= term_params(t)
        return out
    if isinstance(f, Eq):
        return term_params(f.lhs) | term_params(f.rhs)
    if isinstance(f, (And, Or, Imp)):
        return formula_params(f.left) | formula_params(f.right)
    if isinstance(f, (Forall, Exists)):
        return formula_params(f.body)
    return set()


def formula_has_function_symbols(f: Formula) -> bool:
    if isinstance(f, Atom):
        return any(isinstance(s, FunApp) for t in f.args for s in subterms(t))
    if isinstance(f, Eq):
        return any(isinstance(s, FunApp) for s in subterms(f.lhs) | subterms(f.rhs))
    if isinstance(f, (And, Or, Imp)):
        return formula_has_function_symbols(f.left) or formula_has_function_symbols(f.right)
    if isinstance(f, (Forall, Exists)):
        return formula_has_function_symbols(f.body)
    return False


# ---------------------------------------------------------------------------
# Substitution


def term_substitute(t: Term, var: str, repl: Term) -> Term:
    if isinstance(t, BoundVar) and t.name == var:
        return repl
    if isinstance(t, FunApp):
        return FunApp(t.sym, tuple(term_substitute(a, var, repl) for a in t.args))
    return t


def substitute(f: Formula, var: str, t: Term) -> Formula:
    """Replace every free occurrence of the bound variable ``var`` in ``f`` by ``t``.

    ``t`` must not itself contain bound variables: witnesses and
    eigenparameters are always closed terms, and bound names are kept
    distinct from parameter names, so capture cannot occur for legal input.
    """
    if term_has_bound(t):
        raise SyntaxInvariantError(f"unbound-var-in-term: {t}")
    return _substitute(f, var, t)


def _substitute(f: Formula, var: str, t: Term) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(term_substitute(a, var, t) for a in f.args))
    if isinstance(f, Eq):
        return Eq(term_substitute(f.lhs, var, t), term_substitute(f.rhs, var, t))
    if isinstance(f, Bottom):
        return f
    if isinstance(f, And):
        return And(_substitute(f.left, var, t), _substitute(f.right, var, t))
    if isinstance(f, Or):
        return Or(_substitute(f.left, var, t), _substitute(f.right, var, t))
    if isinstance(f, Imp):
        return Imp(_substitute(f.left, var, t), _substitute(f.right, var, t))
    if isinstance(f, Forall):
        if f.var == var:
            return f
        return Forall(f.var, _substitute(f.body, var, t))
    if isinstance(f, Exists):
        if f.var == var:
            return f
        return Exists(f.var, _substitute(f.body, var, t))
    raise SyntaxInvariantError(f"unknown formula node {f!r}")


def substitute_param(f: Formula, name: str, t: Term) -> Formula:
    """Replace every occurrence of the parameter ``name`` in ``f`` by ``t``.

    Parameters are free by construction, so no capture check is needed beyond
    the usual requirement that ``t`` contains no bound variables.
    """
    if term_has_bound(t):
        raise SyntaxInvariantError(f"unbound-var-in-term: {t}")

    def rt(s: Term) -> Term:
        if isinstance(s, Param) and s.name == name:
            return t
        if isinstance(s, FunApp):
            return FunApp(s.sym, tuple(rt(x) for x in s.args))
        return s

    if isinstance(f, Atom):
        return Atom(f.pred, tuple(rt(x) for x in f.args))
    if isinstance(f, Eq):
        return Eq(rt(f.lhs), rt(f.rhs))
    if isinstance(f, Bottom):
        return f
    if isinstance(f, And):
        return And(substitute_param(f.left, name, t), substitute_param(f.right, name, t))
    if isinstance(f, Or):
        return Or(substitute_param(f.left, name, t), substitute_param(f.right, name, t))
    if isinstance(f, Imp):
        return Imp(substitute_param(f.left, name, t), substitute_param(f.right, name, t))
    if isinstance(f, Forall):
        return Forall(f.var, substitute_param(f.body, name, t))
    if isinstance(f, Exists):
        return Exists(f.var, substitute_param(f.body, name, t))
    raise SyntaxInvariantError(f"unknown formula node {f!r}")


def rename_param(f: Formula, old: str, new: str) -> Formula:
    """Rename a parameter everywhere in ``f`` (used for eigenparameter refresh)."""

    def rt(t: Term) -> Term:
        if isinstance(t, Param) and t.name == old:
            return Param(new)
        if isinstance(t, FunApp):
            return FunApp(t.sym, tuple(rt(a) for a in t.args))
        return t

    if isinstance(f, Atom):
        return Atom(f.pred, tuple(rt(a) for a in f.args))
    if isinstance(f, Eq):
        return Eq(rt(f.lhs), rt(f.rhs))
    if isinstance(f, Bottom):
        return f
    if isinstance(f, And):
        return And(rename_param(f.left, old, new), rename_param(f.right, old, new))
    if isinstance(f, Or):
        return Or(rename_param(f.left, old, new), rename_param(f.right, old, new))
    if isinstance(f, Imp):
        return Imp(rename_param(f.left, old, new), rename_param(f.right, old, new))
    if isinstance(f, Forall):
        return Forall(f.var, rename_param(f.body, old, new))
    if isinstance(f, Exists):
        return Exists(f.var, rename_param(f.body, old, new))
    raise SyntaxInvariantError(f"unknown formula node {f!r}")


def rename_param_in_term(t: Term, old: str, new: str) -> Term:
    if isinstance(t, Param) and t.name == old:
        return Param(new)
    if isinstance(t, FunApp):
        return FunApp(t.sym, tuple(rename_param_in_term(a, old, new) for a in t.args))
    return t


# ---------------------------------------------------------------------------
# Term occurrences inside atomic formulas

Path = tuple[int, ...]


class NonAtomicFormulaError(SyntaxInvariantError):
    pass


class PathError(SyntaxInvariantError):
    pass


def _top_terms(f: Formula) -> tuple[Term, ...]:
    if isinstance(f, Atom):
        return f.args
    if isinstance(f, Eq):
        return (f.lhs, f.rhs)
    raise NonAtomicFormulaError(f"non-atomic-formula: {f}")


def _term_occurrences(t: Term, target: Term, prefix: Path, acc: list[Path]) -> None:
    if t == target:
        acc.append(prefix)
    if isinstance(t, FunApp):
        for i, a in enumerate(t.args):
            _term_occurrences(a, target, prefix + (i,), acc)


def occurrences(f: Formula, t: Term) -> list[Path]:
    """All paths in the atomic formula ``f`` at which ``t`` occurs as a subterm.

    Paths are reported in left-to-right (preorder) order; occurrences nested
    inside a matching occurrence are reported as well.
    """
    acc: list[Path] = []
    for i, top in enumerate(_top_terms(f)):
        _term_occurrences(top, t, (i,), acc)
    return acc


def term_at(f: Formula, path: Path) -> Term:
    """Resolve a path in an atomic formula to the term occurrence it denotes."""
    tops = _top_terms(f)
    if not path or path[0] >= len(tops):
        raise PathError(f"path {path} does not resolve in {f}")
    t = tops[path[0]]
    for i in path[1:]:
        if not isinstance(t, FunApp) or i >= len(t.args):
            raise PathError(f"path {path} does not resolve in {f}")
        t = t.args[i]
    return t


def _replace_in_term(t: Term, rel: Path, to: Term) -> Term:
    if not rel:
        return to
    if not isinstance(t, FunApp) or rel[0] >= len(t.args):
        raise PathError(f"path component {rel} does not resolve in {t}")
    args = list(t.args)
    args[rel[0]] = _replace_in_term(args[rel[0]], rel[1:], to)
    return FunApp(t.sym, tuple(args))


def paths_overlap(a: Path, b: Path) -> bool:
    n = min(len(a), len(b))
    return a[:n] == b[:n]


def replace_in_term(t: Term, rel: Path, to: Term) -> Term:
    """Replace the subterm of ``t`` at the (term-relative) path by ``to``."""
    return _replace_in_term(t, rel, to)


def replace_at(f: Formula, paths: frozenset[Path] | set[Path], frm: Term, to: Term) -> Formula:
    """Replace the occurrences of ``frm`` at ``paths`` in the atomic ``f`` by ``to``.

    The paths must be nonempty, pairwise non-overlapping (no path a prefix of
    another), and each must resolve to an occurrence of ``frm``.
    """
    if not paths:
        raise PathError("replacement path set must be nonempty")
    ps = sorted(paths)
    for i in range(len(ps)):
        for j in range(i + 1, len(ps)):
            if paths_overlap(ps[i], ps[j]):
                raise PathError(f"overlapping-paths: {ps[i]} / {ps[j]}")
    for p in ps:
        if term_at(f, p) != frm:
            raise PathError(f"path-mismatch: {p} holds {term_at(f, p)}, not {frm}")
    tops = list(_top_terms(f))
    for p in ps:
        tops[p[0]] = _replace_in_term(tops[p[0]], p[1:], to)
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(tops))
    return Eq(tops[0], tops[1])


# ---------------------------------------------------------------------------
# Sequents


def _multiset_key(fs: tuple[Formula, ...]) -> tuple:
    return tuple(sorted(Counter(map(repr, fs)).items()))


@dataclass(frozen=True, eq=False)
class Sequent:
    """A pair of formula multisets; equality ignores order but not multiplicity."""

    ante: tuple[Formula, ...]
    succ: tuple[Formula, ...]

    @cached_property
    def _key(self) -> tuple:
        return (_multiset_key(self.ante), _multiset_key(self.succ))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Sequent):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __str__(self) -> str:
        left = ", ".join(str(f) for f in self.ante)
        right = ", ".join(str(f) for f in self.succ)
        return f"{left} |- {right}".strip()

    def params(self) -> set[str]:
        out: set[str] = set()
        for f in self.ante + self.succ:
            out |= formula_params(f)
        return out

    def all_formulas(self) -> tuple[Formula, ...]:
        return self.ante + self.succ


def sequent(ante, succ) -> Sequent:
    return Sequent(tuple(ante), tuple(succ))


@dataclass(frozen=True)
class Position:
    """One term occurrence inside a sequent, fully addressed."""

    side: str  # "ante" | "succ"
    index: int
    path: Path = field(default=())

    def resolve(self, seq: Sequent) -> Term:
        fs = seq.ante if self.side == "ante" else seq.succ
        return term_at(fs[self.index], self.path)


def remove_at(fs: tuple[Formula, ...], idx: int) -> tuple[Formula, ...]:
    return fs[:idx] + fs[idx + 1 :]


def replace_formula(fs: tuple[Formula, ...], idx: int, *new: Formula) -> tuple[Formula, ...]:
    return fs[:idx] + tuple(new) + fs[idx + 1 :]


def multiset_contains(big: tuple[Formula, ...], small: tuple[Formula, ...]) -> bool:
    cb, cs = Counter(big), Counter(small)
    return all(cb[f] >= n for f, n in cs.items())
