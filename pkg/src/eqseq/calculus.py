"""Rule catalog, calculus specifications, presets and rule-instance expansion.

All rules are implemented backward: ``premisses_of`` maps a conclusion plus a
fully explicit rule instance to the exact premiss multiset(s) of the rule
display.  Orientation convention for the indexed replacement rules, reading
the display downward (premiss to conclusion) with operating equality as
stored, left side first:

  index 1   rewrites left side to right side   (operating written  r=s)
  index 2   rewrites right side to left side   (operating written  s=r)

so that backward (conclusion to premiss) an index-1 instance replaces
occurrences of the right side by the left side, and an index-2 instance
replaces occurrences of the left side by the right side.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

from .syntax import (
    And,
    Atom,
    Bottom,
    Eq,
    EqSeqError,
    Exists,
    Formula,
    Forall,
    Imp,
    Or,
    Param,
    Path,
    PathError,
    Sequent,
    Term,
    is_atomic,
    is_identity,
    occurrences,
    paths_overlap,
    remove_at,
    replace_at,
    replace_formula,
    substitute,
    subterms,
    term_at,
    term_height,
)


class CalculusError(EqSeqError):
    pass


class RuleNotInCalculusError(CalculusError):
    pass


class ShapeMismatchError(CalculusError):
    pass


class FlagViolationError(CalculusError):
    pass


class EigenvariableError(CalculusError):
    pass


class OrientationViolationError(CalculusError):
    pass


class RuleId(str, Enum):
    INIT = "init"
    LBOT = "lbot"
    MINBOT = "minbot"
    LAND = "land"
    RAND = "rand"
    LOR = "lor"
    ROR = "ror"
    LIMP = "limp"
    RIMP = "rimp"
    LIMPI = "limpi"
    RIMPI = "rimpi"
    LFORALL = "lforall"
    RFORALL = "rforall"
    RFORALLI = "rforalli"
    LEXISTS = "lexists"
    REXISTS = "rexists"
    LW = "lw"
    RW = "rw"
    LC = "lc"
    RC = "rc"
    LCEQ = "lceq"
    CUT = "cut"
    REFAX = "refax"
    REFL = "refl"
    EQ1 = "eq1"
    EQ2 = "eq2"
    REP1R = "rep1r"
    REP2R = "rep2r"
    REP1L = "rep1l"
    REP2L = "rep2l"
    REP = "rep"
    REPP = "repp"
    REP1LP = "rep1lp"
    REP2LP = "rep2lp"
    CNG = "cng"
    SYMM = "symm"

    def __str__(self) -> str:
        return self.value


RULE_BY_NAME = {r.value: r for r in RuleId}

LEAF_RULES = frozenset({RuleId.INIT, RuleId.LBOT, RuleId.MINBOT, RuleId.REFAX})

G3C_LOGICAL = frozenset(
    {
        RuleId.LAND,
        RuleId.RAND,
        RuleId.LOR,
        RuleId.ROR,
        RuleId.LIMP,
        RuleId.RIMP,
        RuleId.LFORALL,
        RuleId.RFORALL,
        RuleId.LEXISTS,
        RuleId.REXISTS,
    }
)

G3IM_LOGICAL = frozenset(
    {
        RuleId.LAND,
        RuleId.RAND,
        RuleId.LOR,
        RuleId.ROR,
        RuleId.LIMPI,
        RuleId.RIMPI,
        RuleId.LFORALL,
        RuleId.RFORALLI,
        RuleId.LEXISTS,
        RuleId.REXISTS,
    }
)

LOGICAL_RULES = G3C_LOGICAL | G3IM_LOGICAL

STRUCTURAL_RULES = frozenset({RuleId.LW, RuleId.RW, RuleId.LC, RuleId.RC, RuleId.LCEQ, RuleId.CUT})

# (index, premiss keeps the operating equality)
RIGHT_REPLACEMENT: dict[RuleId, tuple[int, bool]] = {
    RuleId.REP1R: (1, True),
    RuleId.REP2R: (2, True),
    RuleId.EQ1: (1, False),
    RuleId.EQ2: (2, False),
}

# (index, retention) where retention: "strict" replaces the context formula,
# "keep" retains it alongside the rewritten copy, "plus" keeps it only when
# the context formula is an equality.
LEFT_REPLACEMENT: dict[RuleId, tuple[int, str]] = {
    RuleId.REP1L: (1, "strict"),
    RuleId.REP2L: (2, "strict"),
    RuleId.REPP: (1, "keep"),
    RuleId.REP: (2, "keep"),
    RuleId.REP1LP: (1, "plus"),
    RuleId.REP2LP: (2, "plus"),
}

REPLACEMENT_RULES = frozenset(RIGHT_REPLACEMENT) | frozenset(LEFT_REPLACEMENT) | {RuleId.CNG}
EQUALITY_RULES = REPLACEMENT_RULES | {RuleId.REFAX, RuleId.REFL, RuleId.SYMM}


class Flag(str, Enum):
    RIGHT_HAND_ONLY = "eqr"  # equality context formulas rewritten only in their rhs
    CONTEXT_EQ_ONLY = "ctx-eq"  # succedent replacements: context must be an equality
    CONTEXT_NONEQ_ONLY = "ctx-noneq"  # antecedent replacements: context must not be one
    SINGLE_OCCURRENCE = "single"
    ORIENTED = "oriented"

    def __str__(self) -> str:
        return self.value


FLAG_BY_NAME = {f.value: f for f in Flag}


@dataclass(frozen=True)
class Precedence:
    """Antisymmetric term relation used by the orientation flag."""

    kind: str = "none"  # "none" | "height" | "explicit"
    pairs: frozenset[tuple[Term, Term]] = frozenset()

    def __post_init__(self) -> None:
        if self.kind not in ("none", "height", "explicit"):
            raise CalculusError(f"unknown precedence kind {self.kind!r}")
        for (a, b) in self.pairs:
            if a == b or (b, a) in self.pairs:
                raise CalculusError(f"precedence is not antisymmetric at {a} / {b}")

    def lt(self, r: Term, s: Term) -> bool:
        if self.kind == "none":
            return False
        if self.kind == "height":
            return term_height(r) < term_height(s)
        return (r, s) in self.pairs


PREC_NONE = Precedence("none")
PREC_HEIGHT = Precedence("height")


@dataclass(frozen=True)
class CalculusSpec:
    base: str = "none"  # "none" | "m" | "i" | "c"
    rules: frozenset[RuleId] = frozenset()
    flags: frozenset[Flag] = frozenset()
    precedence: Precedence = PREC_NONE

    def __post_init__(self) -> None:
        if self.base not in ("none", "m", "i", "c"):
            raise CalculusError(f"unknown base {self.base!r}")
        if self.base == "none":
            bad = self.rules & LOGICAL_RULES
            if bad:
                raise CalculusError(
                    f"base=none permits no logical rules, got {sorted(r.value for r in bad)}"
                )
        elif self.base == "c":
            bad = self.rules & (G3IM_LOGICAL - G3C_LOGICAL)
            if bad:
                raise CalculusError(f"classical base excludes {sorted(r.value for r in bad)}")
        else:
            bad = self.rules & (G3C_LOGICAL - G3IM_LOGICAL)
            if bad:
                raise CalculusError(f"base={self.base} excludes {sorted(r.value for r in bad)}")
        if Flag.ORIENTED in self.flags and self.precedence.kind == "none":
            raise CalculusError("Oriented flag requires a precedence")

    def effective_rules(self) -> frozenset[RuleId]:
        if self.base == "c":
            return self.rules | G3C_LOGICAL
        if self.base in ("i", "m"):
            return self.rules | G3IM_LOGICAL
        return self.rules

    def allows(self, rule: RuleId) -> bool:
        if rule is RuleId.INIT:
            return True
        if rule is RuleId.LBOT:
            return self.base in ("i", "c")
        if rule is RuleId.MINBOT:
            return self.base == "m"
        return rule in self.effective_rules()

    def with_rules(self, *extra: RuleId, without: tuple[RuleId, ...] = ()) -> "CalculusSpec":
        return CalculusSpec(
            self.base,
            (self.rules | frozenset(extra)) - frozenset(without),
            self.flags,
            self.precedence,
        )

    def describe(self) -> str:
        rules = ",".join(sorted(r.value for r in self.rules))
        flags = ",".join(sorted(f.value for f in self.flags))
        prec = self.precedence.kind
        if self.precedence.kind == "explicit":
            prec = "explicit(%d pairs)" % len(self.precedence.pairs)
        return f"base={self.base} rules={rules or '-'} flags={flags or '-'} prec={prec}"


@dataclass(frozen=True)
class Replacement:
    """Witness data for one replacement inference.

    ``eq_index`` locates the operating equality in the conclusion antecedent
    (absent for CNG, whose operating equality lives in its first premiss);
    ``context_index`` locates the context formula on the rule's side of the
    conclusion; ``paths`` are the positions of the conclusion-side term.
    """

    eq_index: int | None
    context_index: int
    paths: tuple[Path, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "paths", tuple(sorted(set(self.paths))))


@dataclass(frozen=True)
class RuleInstance:
    rule: RuleId
    principal: tuple[int, ...] = ()
    replacement: Replacement | None = None
    witness: Term | None = None
    eigen: str | None = None
    cut_formula: Formula | None = None
    split: tuple[tuple[int, ...], tuple[int, ...]] | None = None

    @property
    def orientation(self) -> str | None:
        """Forward use of the operating equality: left-to-right or right-to-left."""
        if self.rule in RIGHT_REPLACEMENT:
            return "lr" if RIGHT_REPLACEMENT[self.rule][0] == 1 else "rl"
        if self.rule in LEFT_REPLACEMENT:
            return "lr" if LEFT_REPLACEMENT[self.rule][0] == 1 else "rl"
        if self.rule is RuleId.CNG:
            return "lr"
        return None


def leaf(rule: RuleId, *principal: int) -> RuleInstance:
    return RuleInstance(rule, principal)


def repl_inst(rule: RuleId, eq_index: int | None, context_index: int, paths) -> RuleInstance:
    return RuleInstance(rule, replacement=Replacement(eq_index, context_index, tuple(paths)))


# ---------------------------------------------------------------------------
# premisses_of


def _check_index(fs: tuple[Formula, ...], idx: int, what: str) -> Formula:
    if not (0 <= idx < len(fs)):
        raise ShapeMismatchError(f"{what} index {idx} out of range")
    return fs[idx]


def _replacement_terms(rule_index: int, operating: Eq) -> tuple[Term, Term]:
    """(conclusion-side term, premiss-side term) under the backward reading."""
    if rule_index == 1:
        return operating.rhs, operating.lhs
    return operating.lhs, operating.rhs


def _check_orientation(spec: CalculusSpec, rule_index: int, operating: Eq) -> None:
    if Flag.ORIENTED not in spec.flags:
        return
    prec = spec.precedence
    if rule_index == 1:
        # index-1 instances must be shortening: r < s for operating r=s
        if not prec.lt(operating.lhs, operating.rhs):
            raise OrientationViolationError(
                f"orientation-violation: index-1 instance on {operating} is not shortening"
            )
    else:
        # index-2 instances must be nonlengthening: not (s < r) for operating s=r
        if prec.lt(operating.lhs, operating.rhs):
            raise OrientationViolationError(
                f"orientation-violation: index-2 instance on {operating} is lengthening"
            )


def _check_flags_right(spec: CalculusSpec, rule: RuleId, ctx: Formula, paths) -> None:
    if rule in (RuleId.REP1R, RuleId.REP2R):
        if Flag.CONTEXT_EQ_ONLY in spec.flags and not isinstance(ctx, Eq):
            raise FlagViolationError("flag-violation: context formula must be an equality")
        if Flag.RIGHT_HAND_ONLY in spec.flags and isinstance(ctx, Eq):
            if any(p[0] != 1 for p in paths):
                raise FlagViolationError(
                    "flag-violation: equality context may be rewritten only in its right-hand side"
                )
    if Flag.SINGLE_OCCURRENCE in spec.flags and len(paths) != 1:
        raise FlagViolationError("flag-violation: single-occurrence mode")


def _check_flags_left(spec: CalculusSpec, ctx: Formula, paths) -> None:
    if Flag.CONTEXT_NONEQ_ONLY in spec.flags and isinstance(ctx, Eq):
        raise FlagViolationError("flag-violation: context formula must not be an equality")
    if Flag.SINGLE_OCCURRENCE in spec.flags and len(paths) != 1:
        raise FlagViolationError("flag-violation: single-occurrence mode")


def premisses_of(conclusion: Sequent, inst: RuleInstance, spec: CalculusSpec) -> list[Sequent]:
    """The exact premiss multiset(s) of the rule display, computed backward.

    Raises a :class:`CalculusError` subtype when the instance is not a legal
    inference of ``spec`` with this conclusion.
    """
    rule = inst.rule
    if not spec.allows(rule):
        raise RuleNotInCalculusError(f"rule-not-in-calculus: {rule.value}")
    ante, succ = conclusion.ante, conclusion.succ

    # -- leaves
    if rule is RuleId.INIT:
        i, j = _two(inst)
        f = _check_index(ante, i, "antecedent")
        g = _check_index(succ, j, "succedent")
        if f != g or not is_atomic(f):
            raise ShapeMismatchError("initial sequent needs one atomic formula on both sides")
        return []
    if rule is RuleId.REFAX:
        (j,) = _one(inst)
        g = _check_index(succ, j, "succedent")
        if not is_identity(g):
            raise ShapeMismatchError("reflexivity axiom needs an identity in the succedent")
        return []
    if rule is RuleId.LBOT:
        (i,) = _one(inst)
        if not isinstance(_check_index(ante, i, "antecedent"), Bottom):
            raise ShapeMismatchError("lbot needs bot in the antecedent")
        return []
    if rule is RuleId.MINBOT:
        i, j = _two(inst)
        if not isinstance(_check_index(ante, i, "antecedent"), Bottom) or not isinstance(
            _check_index(succ, j, "succedent"), Bottom
        ):
            raise ShapeMismatchError("minimal bot axiom needs bot on both sides")
        return []

    # -- logical rules
    if rule is RuleId.LAND:
        (i,) = _one(inst)
        f = _check_index(ante, i, "antecedent")
        if not isinstance(f, And):
            raise ShapeMismatchError("land principal must be a conjunction")
        return [Sequent(replace_formula(ante, i, f.left, f.right), succ)]
    if rule is RuleId.RAND:
        (j,) = _one(inst)
        f = _check_index(succ, j, "succedent")
        if not isinstance(f, And):
            raise ShapeMismatchError("rand principal must be a conjunction")
        return [
            Sequent(ante, replace_formula(succ, j, f.left)),
            Sequent(ante, replace_formula(succ, j, f.right)),
        ]
    if rule is RuleId.LOR:
        (i,) = _one(inst)
        f = _check_index(ante, i, "antecedent")
        if not isinstance(f, Or):
            raise ShapeMismatchError("lor principal must be a disjunction")
        return [
            Sequent(replace_formula(ante, i, f.left), succ),
            Sequent(replace_formula(ante, i, f.right), succ),
        ]
    if rule is RuleId.ROR:
        (j,) = _one(inst)
        f = _check_index(succ, j, "succedent")
        if not isinstance(f, Or):
            raise ShapeMismatchError("ror principal must be a disjunction")
        return [Sequent(ante, replace_formula(succ, j, f.left, f.right))]
    if rule is RuleId.LIMP:
        (i,) = _one(inst)
        f = _check_index(ante, i, "antecedent")
        if not isinstance(f, Imp):
            raise ShapeMismatchError("limp principal must be an implication")
        return [
            Sequent(remove_at(ante, i), succ + (f.left,)),
            Sequent(replace_formula(ante, i, f.right), succ),
        ]
    if rule is RuleId.LIMPI:
        (i,) = _one(inst)
        f = _check_index(ante, i, "antecedent")
        if not isinstance(f, Imp):
            raise ShapeMismatchError("limpi principal must be an implication")
        return [
            Sequent(ante, succ + (f.left,)),
            Sequent(replace_formula(ante, i, f.right), succ),
        ]
    if rule is RuleId.RIMP:
        (j,) = _one(inst)
        f = _check_index(succ, j, "succedent")
        if not isinstance(f, Imp):
            raise ShapeMismatchError("rimp principal must be an implication")
        return [Sequent(ante + (f.left,), replace_formula(succ, j, f.right))]
    if rule is RuleId.RIMPI:
        (j,) = _one(inst)
        f = _check_index(succ, j, "succedent")
        if not isinstance(f, Imp):
            raise ShapeMismatchError("rimpi principal must be an implication")
        return [Sequent(ante + (f.left,), (f.right,))]
    if rule is RuleId.LFORALL:
        (i,) = _one(inst)
        f = _check_index(ante, i, "antecedent")
        if not isinstance(f, Forall) or inst.witness is None:
            raise ShapeMismatchError("lforall needs a universal principal and a witness term")
        return [Sequent(replace_formula(ante, i, substitute(f.body, f.var, inst.witness), f), succ)]
    if rule is RuleId.REXISTS:
        (j,) = _one(inst)
        f = _check_index(succ, j, "succedent")
        if not isinstance(f, Exists) or inst.witness is None:
            raise ShapeMismatchError("rexists needs an existential principal and a witness term")
        return [Sequent(ante, replace_formula(succ, j, f, substitute(f.body, f.var, inst.witness)))]
    if rule in (RuleId.RFORALL, RuleId.RFORALLI):
        (j,) = _one(inst)
        f = _check_index(succ, j, "succedent")
        if not isinstance(f, Forall) or inst.eigen is None:
            raise ShapeMismatchError("rforall needs a universal principal and an eigenparameter")
        _check_eigen(inst.eigen, conclusion)
        inst_body = substitute(f.body, f.var, Param(inst.eigen))
        if rule is RuleId.RFORALL:
            return [Sequent(ante, replace_formula(succ, j, inst_body))]
        return [Sequent(ante, (inst_body,))]
    if rule is RuleId.LEXISTS:
        (i,) = _one(inst)
        f = _check_index(ante, i, "antecedent")
        if not isinstance(f, Exists) or inst.eigen is None:
            raise ShapeMismatchError("lexists needs an existential principal and an eigenparameter")
        _check_eigen(inst.eigen, conclusion)
        return [Sequent(replace_formula(ante, i, substitute(f.body, f.var, Param(inst.eigen))), succ)]

    # -- structural rules
    if rule is RuleId.LW:
        (i,) = _one(inst)
        _check_index(ante, i, "antecedent")
        return [Sequent(remove_at(ante, i), succ)]
    if rule is RuleId.RW:
        (j,) = _one(inst)
        _check_index(succ, j, "succedent")
        return [Sequent(ante, remove_at(succ, j))]
    if rule in (RuleId.LC, RuleId.LCEQ):
        (i,) = _one(inst)
        f = _check_index(ante, i, "antecedent")
        if rule is RuleId.LCEQ and not isinstance(f, Eq):
            raise ShapeMismatchError("lceq contracts equalities only")
        return [Sequent(replace_formula(ante, i, f, f), succ)]
    if rule is RuleId.RC:
        (j,) = _one(inst)
        f = _check_index(succ, j, "succedent")
        return [Sequent(ante, replace_formula(succ, j, f, f))]
    if rule is RuleId.CUT:
        if inst.cut_formula is None or inst.split is None:
            raise ShapeMismatchError("cut needs a cut formula and a context split")
        a1, s1 = _check_split(conclusion, inst.split)
        left_ante = tuple(ante[k] for k in a1)
        left_succ = tuple(succ[k] for k in s1)
        right_ante = tuple(ante[k] for k in range(len(ante)) if k not in set(a1))
        right_succ = tuple(succ[k] for k in range(len(succ)) if k not in set(s1))
        return [
            Sequent(left_ante, left_succ + (inst.cut_formula,)),
            Sequent((inst.cut_formula,) + right_ante, right_succ),
        ]

    # -- reflexivity / symmetry
    if rule is RuleId.REFL:
        if inst.witness is None:
            raise ShapeMismatchError("refl needs the identity's term")
        return [Sequent((Eq(inst.witness, inst.witness),) + ante, succ)]
    if rule is RuleId.SYMM:
        (i,) = _one(inst)
        f = _check_index(ante, i, "antecedent")
        if not isinstance(f, Eq):
            raise ShapeMismatchError("symm principal must be an equality")
        return [Sequent(replace_formula(ante, i, Eq(f.rhs, f.lhs)), succ)]

    # -- replacement rules
    if rule in RIGHT_REPLACEMENT:
        idx, keeps = RIGHT_REPLACEMENT[rule]
        rep = _the_replacement(inst)
        if rep.eq_index is None:
            raise ShapeMismatchError(f"{rule.value} needs an operating equality index")
        op = _check_index(ante, rep.eq_index, "operating equality")
        if not isinstance(op, Eq):
            raise ShapeMismatchError("operating formula must be an equality")
        ctx = _check_index(succ, rep.context_index, "context formula")
        if not is_atomic(ctx):
            raise ShapeMismatchError("context formula must be atomic")
        concl_term, prem_term = _replacement_terms(idx, op)
        _check_flags_right(spec, rule, ctx, rep.paths)
        _check_orientation(spec, idx, op)
        try:
            input_formula = replace_at(ctx, set(rep.paths), concl_term, prem_term)
        except PathError as exc:
            raise ShapeMismatchError(str(exc)) from exc
        new_ante = ante if keeps else remove_at(ante, rep.eq_index)
        return [Sequent(new_ante, replace_formula(succ, rep.context_index, input_formula))]

    if rule in LEFT_REPLACEMENT:
        idx, retention = LEFT_REPLACEMENT[rule]
        rep = _the_replacement(inst)
        if rep.eq_index is None:
            raise ShapeMismatchError(f"{rule.value} needs an operating equality index")
        op = _check_index(ante, rep.eq_index, "operating equality")
        if not isinstance(op, Eq):
            raise ShapeMismatchError("operating formula must be an equality")
        if rep.context_index == rep.eq_index:
            raise ShapeMismatchError("context formula must be distinct from the operating equality")
        ctx = _check_index(ante, rep.context_index, "context formula")
        if not is_atomic(ctx):
            raise ShapeMismatchError("context formula must be atomic")
        concl_term, prem_term = _replacement_terms(idx, op)
        _check_flags_left(spec, ctx, rep.paths)
        _check_orientation(spec, idx, op)
        try:
            input_formula = replace_at(ctx, set(rep.paths), concl_term, prem_term)
        except PathError as exc:
            raise ShapeMismatchError(str(exc)) from exc
        keep = retention == "keep" or (retention == "plus" and isinstance(ctx, Eq))
        if keep:
            new_ante = ante[: rep.context_index + 1] + (input_formula,) + ante[rep.context_index + 1 :]
        else:
            new_ante = replace_formula(ante, rep.context_index, input_formula)
        return [Sequent(new_ante, succ)]

    if rule is RuleId.CNG:
        rep = _the_replacement(inst)
        if inst.witness is None or inst.split is None:
            raise ShapeMismatchError("cng needs a replaced term and a context split")
        if rep.eq_index is not None:
            raise ShapeMismatchError("cng carries its operating equality in its first premiss")
        ctx = _check_index(succ, rep.context_index, "context formula")
        if not is_atomic(ctx):
            raise ShapeMismatchError("context formula must be atomic")
        a1, s1 = _check_split(conclusion, inst.split)
        if rep.context_index in s1:
            raise ShapeMismatchError("cng context formula cannot be split into the first premiss")
        if not rep.paths:
            raise ShapeMismatchError("cng needs a nonempty path set")
        concl_term = term_at(ctx, rep.paths[0])
        prem_term = inst.witness
        if Flag.SINGLE_OCCURRENCE in spec.flags and len(rep.paths) != 1:
            raise FlagViolationError("flag-violation: single-occurrence mode")
        try:
            input_formula = replace_at(ctx, set(rep.paths), concl_term, prem_term)
        except PathError as exc:
            raise ShapeMismatchError(str(exc)) from exc
        a1set, s1set = set(a1), set(s1)
        left_ante = tuple(ante[k] for k in a1)
        left_succ = tuple(succ[k] for k in s1)
        right_ante = tuple(ante[k] for k in range(len(ante)) if k not in a1set)
        right_succ = tuple(
            input_formula if k == rep.context_index else succ[k]
            for k in range(len(succ))
            if k not in s1set
        )
        return [
            Sequent(left_ante, left_succ + (Eq(prem_term, concl_term),)),
            Sequent(right_ante, right_succ),
        ]

    raise RuleNotInCalculusError(f"rule {rule.value} has no premiss computation")


def _one(inst: RuleInstance) -> tuple[int]:
    if len(inst.principal) != 1:
        raise ShapeMismatchError(f"{inst.rule.value} takes one principal index")
    return inst.principal  # type: ignore[return-value]


def _two(inst: RuleInstance) -> tuple[int, int]:
    if len(inst.principal) != 2:
        raise ShapeMismatchError(f"{inst.rule.value} takes two principal indices")
    return inst.principal  # type: ignore[return-value]


def _the_replacement(inst: RuleInstance) -> Replacement:
    if inst.replacement is None:
        raise ShapeMismatchError(f"{inst.rule.value} needs replacement data")
    return inst.replacement


def _check_split(
    conclusion: Sequent, split: tuple[tuple[int, ...], tuple[int, ...]]
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    a1, s1 = split
    for k in a1:
        _check_index(conclusion.ante, k, "split antecedent")
    for k in s1:
        _check_index(conclusion.succ, k, "split succedent")
    if len(set(a1)) != len(a1) or len(set(s1)) != len(s1):
        raise ShapeMismatchError("split indices must be distinct")
    return tuple(sorted(a1)), tuple(sorted(s1))


def _check_eigen(name: str, conclusion: Sequent) -> None:
    if name in conclusion.params():
        raise EigenvariableError(f"eigenvariable-violation: {name} occurs in the conclusion")


def fresh_eigen(seq: Sequent, taken: set[str] | None = None) -> str:
    used = seq.params() | (taken or set())
    k = 1
    while f"_e{k}" in used:
        k += 1
    return f"_e{k}"


# ---------------------------------------------------------------------------
# Backward move generation


def _nonempty_nonoverlapping_subsets(occ: list[Path]) -> list[tuple[Path, ...]]:
    out: list[tuple[Path, ...]] = []

    def extend(start: int, chosen: list[Path]) -> None:
        if chosen:
            out.append(tuple(chosen))
        for k in range(start, len(occ)):
            if any(paths_overlap(occ[k], c) for c in chosen):
                continue
            chosen.append(occ[k])
            extend(k + 1, chosen)
            chosen.pop()

    extend(0, [])
    return out


def _sorted_universe(universe) -> list[Term]:
    return sorted(universe, key=lambda t: (term_height(t), str(t)))


def _subsets(n: int):
    for r in range(n + 1):
        yield from itertools.combinations(range(n), r)


def applicable_instances(goal: Sequent, spec: CalculusSpec, universe) -> list[RuleInstance]:
    """Every rule instance of ``spec`` whose conclusion matches ``goal``.

    Replacement/witness terms and cut formulas are drawn from ``universe``
    (plus the predicates already present in the goal); eigenparameters are
    generated fresh.  The result is deterministic and complete relative to
    that bound; every returned instance satisfies ``premisses_of``.
    """
    terms = _sorted_universe(universe)
    out: list[RuleInstance] = []

    def try_add(inst: RuleInstance) -> None:
        try:
            premisses_of(goal, inst, spec)
        except CalculusError:
            return
        out.append(inst)

    ante, succ = goal.ante, goal.succ

    for i in range(len(ante)):
        for j in range(len(succ)):
            try_add(leaf(RuleId.INIT, i, j))
            try_add(leaf(RuleId.MINBOT, i, j))
    for j in range(len(succ)):
        try_add(leaf(RuleId.REFAX, j))
    for i in range(len(ante)):
        try_add(leaf(RuleId.LBOT, i))

    one_sided_ante = [
        RuleId.LAND,
        RuleId.LOR,
        RuleId.LIMP,
        RuleId.LIMPI,
        RuleId.LW,
        RuleId.LC,
        RuleId.LCEQ,
        RuleId.SYMM,
    ]
    one_sided_succ = [RuleId.RAND, RuleId.ROR, RuleId.RIMP, RuleId.RIMPI, RuleId.RW, RuleId.RC]
    for rule in one_sided_ante:
        if spec.allows(rule):
            for i in range(len(ante)):
                try_add(RuleInstance(rule, (i,)))
    for rule in one_sided_succ:
        if spec.allows(rule):
            for j in range(len(succ)):
                try_add(RuleInstance(rule, (j,)))

    if spec.allows(RuleId.LFORALL):
        for i in range(len(ante)):
            for t in terms:
                try_add(RuleInstance(RuleId.LFORALL, (i,), witness=t))
    if spec.allows(RuleId.REXISTS):
        for j in range(len(succ)):
            for t in terms:
                try_add(RuleInstance(RuleId.REXISTS, (j,), witness=t))
    eigen = fresh_eigen(goal)
    for rule, n in ((RuleId.RFORALL, len(succ)), (RuleId.RFORALLI, len(succ))):
        if spec.allows(rule):
            for j in range(n):
                try_add(RuleInstance(rule, (j,), eigen=eigen))
    if spec.allows(RuleId.LEXISTS):
        for i in range(len(ante)):
            try_add(RuleInstance(RuleId.LEXISTS, (i,), eigen=eigen))

    if spec.allows(RuleId.REFL):
        for t in terms:
            try_add(RuleInstance(RuleId.REFL, witness=t))

    # replacement rules
    right_rules = [r for r in (RuleId.REP1R, RuleId.REP2R, RuleId.EQ1, RuleId.EQ2) if spec.allows(r)]
    left_rules = [
        r
        for r in (RuleId.REP1L, RuleId.REP2L, RuleId.REP, RuleId.REPP, RuleId.REP1LP, RuleId.REP2LP)
        if spec.allows(r)
    ]
    if right_rules or left_rules:
        for e, op in enumerate(ante):
            if not isinstance(op, Eq):
                continue
            for rule in right_rules:
                idx = RIGHT_REPLACEMENT[rule][0]
                concl_term, _ = _replacement_terms(idx, op)
                for j, ctx in enumerate(succ):
                    if not is_atomic(ctx):
                        continue
                    occ = occurrences(ctx, concl_term)
                    for paths in _nonempty_nonoverlapping_subsets(occ):
                        try_add(repl_inst(rule, e, j, paths))
            for rule in left_rules:
                idx = LEFT_REPLACEMENT[rule][0]
                concl_term, _ = _replacement_terms(idx, op)
                for i, ctx in enumerate(ante):
                    if i == e or not is_atomic(ctx):
                        continue
                    occ = occurrences(ctx, concl_term)
                    for paths in _nonempty_nonoverlapping_subsets(occ):
                        try_add(repl_inst(rule, e, i, paths))

    if spec.allows(RuleId.CNG):
        for j, ctx in enumerate(succ):
            if not is_atomic(ctx):
                continue
            ctx_terms = sorted(
                {t for s in _top_subterms(ctx) for t in subterms(s)},
                key=lambda t: (term_height(t), str(t)),
            )
            for s_term in ctx_terms:
                occ = occurrences(ctx, s_term)
                for paths in _nonempty_nonoverlapping_subsets(occ):
                    for r_term in terms:
                        for a1 in _subsets(len(ante)):
                            for s1 in _subsets(len(succ)):
                                if j in s1:
                                    continue
                                try_add(
                                    RuleInstance(
                                        RuleId.CNG,
                                        replacement=Replacement(None, j, paths),
                                        witness=r_term,
                                        split=(a1, s1),
                                    )
                                )

    if spec.allows(RuleId.CUT):
        preds = sorted(_goal_predicates(goal))
        candidates: list[Formula] = [Eq(u, v) for u in terms for v in terms]
        for pred, arity in preds:
            for args in itertools.product(terms, repeat=arity):
                candidates.append(Atom(pred, tuple(args)))
        for a in candidates:
            for a1 in _subsets(len(ante)):
                for s1 in _subsets(len(succ)):
                    try_add(RuleInstance(RuleId.CUT, cut_formula=a, split=(a1, s1)))

    return out


def _top_subterms(f: Formula) -> tuple[Term, ...]:
    if isinstance(f, Atom):
        return f.args
    if isinstance(f, Eq):
        return (f.lhs, f.rhs)
    return ()


def _goal_predicates(goal: Sequent) -> set[tuple[str, int]]:
    preds: set[tuple[str, int]] = set()

    def walk(f: Formula) -> None:
        if isinstance(f, Atom):
            preds.add((f.pred, len(f.args)))
        elif isinstance(f, (And, Or, Imp)):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, (Forall, Exists)):
            walk(f.body)

    for f in goal.all_formulas():
        walk(f)
    return preds


# ---------------------------------------------------------------------------
# Presets


def _spec(rules: tuple[RuleId, ...], flags: tuple[Flag, ...] = (), base: str = "none",
          precedence: Precedence = PREC_NONE) -> CalculusSpec:
    return CalculusSpec(base, frozenset(rules), frozenset(flags), precedence)


PRESETS: dict[str, CalculusSpec] = {
    # the natural structural-rule-free system and its variants
    "R12r": _spec((RuleId.REFAX, RuleId.REP1R, RuleId.REP2R)),
    "R12r_eqr": _spec((RuleId.REFAX, RuleId.REP1R, RuleId.REP2R), (Flag.RIGHT_HAND_ONLY,)),
    "R12rl": _spec((RuleId.REFAX, RuleId.REP1L, RuleId.REP2L, RuleId.REP1R, RuleId.REP2R)),
    # scope-restricted replacement
    "R_scope": _spec(
        (RuleId.REFAX, RuleId.REP1L, RuleId.REP2L, RuleId.REP1R, RuleId.REP2R),
        (Flag.CONTEXT_EQ_ONLY, Flag.CONTEXT_NONEQ_ONLY),
    ),
    "R_scope_eqr": _spec(
        (RuleId.REFAX, RuleId.REP1L, RuleId.REP2L, RuleId.REP1R, RuleId.REP2R),
        (Flag.CONTEXT_EQ_ONLY, Flag.CONTEXT_NONEQ_ONLY, Flag.RIGHT_HAND_ONLY),
    ),
    # single-orientation systems
    "R1rl": _spec((RuleId.REFAX, RuleId.REP1L, RuleId.REP1R)),
    "R2rl": _spec((RuleId.REFAX, RuleId.REP2L, RuleId.REP2R)),
    "R1rlPlus": _spec((RuleId.REFAX, RuleId.REP1LP, RuleId.REP1R)),
    "R2rlPlus": _spec((RuleId.REFAX, RuleId.REP2LP, RuleId.REP2R)),
    "R12rlPlus": _spec((RuleId.REFAX, RuleId.REP1LP, RuleId.REP2LP, RuleId.REP1R, RuleId.REP2R)),
    "R12prec_rlPlus": _spec(
        (RuleId.REFAX, RuleId.REP1LP, RuleId.REP2LP, RuleId.REP1R, RuleId.REP2R),
        (Flag.ORIENTED,),
        precedence=PREC_HEIGHT,
    ),
    # left-reflexivity systems
    "RefRep": _spec((RuleId.REFL, RuleId.REP)),
    "RefRep2L": _spec((RuleId.REFL, RuleId.REP2L)),
    # counterexample systems
    "S1": _spec((RuleId.REFAX, RuleId.LC, RuleId.REP2LP, RuleId.REP1R)),
    "S2": _spec((RuleId.REFAX, RuleId.LC, RuleId.REP1LP, RuleId.REP2R)),
    "EqCut": _spec((RuleId.REFAX, RuleId.EQ1, RuleId.EQ2, RuleId.CUT)),
    "EqCutFree": _spec((RuleId.REFAX, RuleId.EQ1, RuleId.EQ2)),
    "CngCut": _spec((RuleId.REFAX, RuleId.CNG, RuleId.CUT)),
    "CngOnly": _spec((RuleId.REFAX, RuleId.CNG)),
    "CngLCeq": _spec((RuleId.REFAX, RuleId.CNG, RuleId.LCEQ)),
    # logical bases (equality rules can be added with CalculusSpec.with_rules)
    "G3c": _spec((), base="c"),
    "G3i": _spec((), base="i"),
    "G3m": _spec((), base="m"),
    "G3cR12r": _spec((RuleId.REFAX, RuleId.REP1R, RuleId.REP2R), base="c"),
}


def resolve_preset(name: str) -> CalculusSpec:
    try:
        return PRESETS[name]
    except KeyError:
        raise CalculusError(f"unknown preset {name!r}; see `eqseq presets`") from None


def parse_spec(text: str) -> CalculusSpec:
    """Parse ``base=<none|m|i|c> rules=<csv> flags=<csv> prec=<none|height|@file>``."""
    base, rules, flags, prec = "none", frozenset(), frozenset(), PREC_NONE
    for part in text.split():
        if "=" not in part:
            raise CalculusError(f"malformed spec component {part!r}")
        key, value = part.split("=", 1)
        if key == "base":
            base = value
        elif key == "rules":
            names = [v for v in value.split(",") if v and v != "-"]
            unknown = [v for v in names if v not in RULE_BY_NAME]
            if unknown:
                raise CalculusError(f"unknown rule id(s) {unknown}")
            rules = frozenset(RULE_BY_NAME[v] for v in names)
        elif key == "flags":
            names = [v for v in value.split(",") if v and v != "-"]
            unknown = [v for v in names if v not in FLAG_BY_NAME]
            if unknown:
                raise CalculusError(f"unknown flag(s) {unknown}")
            flags = frozenset(FLAG_BY_NAME[v] for v in names)
        elif key == "prec":
            if value == "none":
                prec = PREC_NONE
            elif value == "height":
                prec = PREC_HEIGHT
            elif value.startswith("@"):
                prec = load_precedence_file(value[1:])
            else:
                raise CalculusError(f"unknown precedence {value!r}")
        else:
            raise CalculusError(f"unknown spec key {key!r}")
    return CalculusSpec(base, rules, flags, prec)


def load_precedence_file(path: str) -> Precedence:
    """Explicit precedence: one ``t1 < t2`` pair per line, ``#`` comments."""
    from .parser import parse_term

    pairs: set[tuple[Term, Term]] = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "<" not in line:
                raise CalculusError(f"malformed precedence line {line!r}")
            left, right = line.split("<", 1)
            pairs.add((parse_term(left.strip()), parse_term(right.strip())))
    return Precedence("explicit", frozenset(pairs))


def resolve_spec(text: str) -> CalculusSpec:
    """A preset name, or a full ``base=... rules=...`` spec string."""
    if "=" in text:
        return parse_spec(text)
    return resolve_preset(text)
