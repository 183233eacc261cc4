"""Bounded backward proof search, forward saturation, and the exact decision
procedure for function-free atomic sequents via congruence chains.

The forward appliers here implement the rules premiss-to-conclusion and are
written independently of :func:`eqseq.calculus.premisses_of`, so saturation
can serve as a brute-force oracle against both the backward search and the
union-find decision procedure.
"""
from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass

from .calculus import (
    CalculusSpec,
    LEFT_REPLACEMENT,
    RIGHT_REPLACEMENT,
    RuleId,
    RuleInstance,
    applicable_instances,
    leaf,
    premisses_of,
    repl_inst,
)
from .checker import Derivation, node
from .syntax import (
    Atom,
    Eq,
    EqSeqError,
    Formula,
    FunApp,
    Param,
    Path,
    Sequent,
    Term,
    formula_has_function_symbols,
    is_atomic,
    is_identity,
    occurrences,
    paths_overlap,
    remove_at,
    replace_at,
    replace_formula,
    subterms,
    term_height,
)


class SearchError(EqSeqError):
    pass


class FunctionSymbolsPresentError(SearchError):
    pass


class NonAtomicGoalError(SearchError):
    pass


class MalformedWitnessError(SearchError):
    pass


# ---------------------------------------------------------------------------
# Limits, outcomes


@dataclass(frozen=True)
class SearchLimits:
    max_depth: int = 6
    term_height: int = 3
    universe: frozenset[Term] | None = None
    node_budget: int = 100_000

    def __post_init__(self) -> None:
        if self.max_depth <= 0 or self.term_height <= 0 or self.node_budget <= 0:
            raise SearchError("all search bounds must be positive")
        if self.universe is not None:
            for t in self.universe:
                if not subterms(t) <= self.universe:
                    raise SearchError(f"universe is not closed under subterms at {t}")


@dataclass(frozen=True)
class Proved:
    derivation: Derivation


@dataclass(frozen=True)
class Exhausted:
    expansions: int
    memo_size: int
    budget_exceeded: bool = False


@dataclass(frozen=True)
class DecidedUnderivable:
    reason: str


SearchOutcome = Proved | Exhausted | DecidedUnderivable


def sequent_terms(goal: Sequent) -> set[Term]:
    """All closed subterm occurrences in the sequent, binders included."""
    base: set[Term] = set()

    def scan_term(t: Term) -> None:
        for s in subterms(t):
            if not term_has_bound(s):
                base.add(s)

    def scan(f: Formula) -> None:
        from .syntax import And, Exists, Forall, Imp, Or

        if isinstance(f, Atom):
            for t in f.args:
                scan_term(t)
        elif isinstance(f, Eq):
            scan_term(f.lhs)
            scan_term(f.rhs)
        elif isinstance(f, (And, Or, Imp)):
            scan(f.left)
            scan(f.right)
        elif isinstance(f, (Forall, Exists)):
            scan(f.body)

    for f in goal.all_formulas():
        scan(f)
    return base


def default_universe(goal: Sequent, height_bound: int) -> frozenset[Term]:
    """Subterms of the goal plus their closure under the goal's function
    symbols, up to the given term height."""
    base = sequent_terms(goal)
    funcs: dict[str, int] = {}
    for t in base:
        if isinstance(t, FunApp):
            funcs[t.sym] = len(t.args)
    base = {t for t in base if term_height(t) <= height_bound}
    grown = True
    while grown:
        grown = False
        for sym, arity in funcs.items():
            for args in itertools.product(sorted(base, key=str), repeat=arity):
                t = FunApp(sym, tuple(args))
                if term_height(t) <= height_bound and t not in base:
                    base.add(t)
                    grown = True
    return frozenset(base)


# ---------------------------------------------------------------------------
# Shape-invariant hooks (registered closure predicates)


@dataclass(frozen=True)
class ShapeHook:
    """A set of sequents closed under backward rule application in the covered
    calculi and containing no axiom, hence consisting of underivable sequents:
    every instance whose conclusion is in the set has some premiss in it."""

    name: str
    covered_rules: frozenset[RuleId]
    matches: "callable"

    def covers(self, spec: CalculusSpec) -> bool:
        return spec.base == "none" and spec.rules <= self.covered_rules


def _two_param_eq_succ(seq: Sequent) -> tuple[str, str] | None:
    if len(seq.succ) != 1 or not isinstance(seq.succ[0], Eq):
        return None
    e = seq.succ[0]
    if not isinstance(e.lhs, Param) or not isinstance(e.rhs, Param) or e.lhs == e.rhs:
        return None
    return e.lhs.name, e.rhs.name


def _shape_s1(seq: Sequent) -> bool:
    # a=c, ..., b=c, ..., c=c, ... |- a=b  with a, b, c distinct parameters
    named = _two_param_eq_succ(seq)
    if named is None:
        return False
    a, b = named
    cands: set[str] = set()
    for f in seq.ante:
        if not isinstance(f, Eq) or not isinstance(f.lhs, Param) or not isinstance(f.rhs, Param):
            return False
        x, y = f.lhs.name, f.rhs.name
        if x == y:
            cands.add(x)
        elif x in (a, b):
            cands.add(y)
        else:
            return False
    if not seq.ante:
        return True
    cands -= {a, b}
    for c in cands:
        allowed = {Eq(Param(a), Param(c)), Eq(Param(b), Param(c)), Eq(Param(c), Param(c))}
        if all(f in allowed for f in seq.ante):
            return True
    return False


def _shape_s2(seq: Sequent) -> bool:
    # c=a, ..., c=b, ..., c=c, ... |- a=b
    named = _two_param_eq_succ(seq)
    if named is None:
        return False
    a, b = named
    cands: set[str] = set()
    for f in seq.ante:
        if not isinstance(f, Eq) or not isinstance(f.lhs, Param) or not isinstance(f.rhs, Param):
            return False
        x, y = f.lhs.name, f.rhs.name
        if x == y:
            cands.add(x)
        elif y in (a, b):
            cands.add(x)
        else:
            return False
    if not seq.ante:
        return True
    cands -= {a, b}
    for c in cands:
        allowed = {Eq(Param(c), Param(a)), Eq(Param(c), Param(b)), Eq(Param(c), Param(c))}
        if all(f in allowed for f in seq.ante):
            return True
    return False


def _shape_identity_pool(seq: Sequent) -> bool:
    # all antecedent formulas are identities, no succedent formula is one
    return all(is_identity(f) for f in seq.ante) and not any(is_identity(f) for f in seq.succ)


S1_HOOK = ShapeHook(
    "s1-shape",
    frozenset({RuleId.REFAX, RuleId.LC, RuleId.LCEQ, RuleId.LW, RuleId.REP2LP, RuleId.REP, RuleId.REP1R}),
    _shape_s1,
)
S2_HOOK = ShapeHook(
    "s2-shape",
    frozenset({RuleId.REFAX, RuleId.LC, RuleId.LCEQ, RuleId.LW, RuleId.REP1LP, RuleId.REPP, RuleId.REP2R}),
    _shape_s2,
)
IDENTITY_HOOK = ShapeHook(
    "identity-antecedent",
    frozenset(
        {
            RuleId.REFAX,
            RuleId.EQ1,
            RuleId.EQ2,
            RuleId.CNG,
            RuleId.CUT,
            RuleId.LC,
            RuleId.LCEQ,
            RuleId.LW,
            RuleId.RW,
            RuleId.RC,
        }
    ),
    _shape_identity_pool,
)

DEFAULT_HOOKS: tuple[ShapeHook, ...] = (S1_HOOK, S2_HOOK, IDENTITY_HOOK)


# ---------------------------------------------------------------------------
# Backward search


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self) -> bool:
        self.used += 1
        return self.used <= self.limit


def prove(
    goal: Sequent,
    spec: CalculusSpec,
    lim: SearchLimits = SearchLimits(),
    hooks: tuple[ShapeHook, ...] = DEFAULT_HOOKS,
) -> SearchOutcome:
    """Depth-bounded backward search.

    ``Proved`` outcomes carry a derivation that the checker validates;
    ``Exhausted`` means no proof exists within the limits (nothing is claimed
    beyond them).  Registered shape hooks let structurally closed goals come
    back ``DecidedUnderivable`` without exhausting the bounds.
    """
    active_hooks = tuple(h for h in hooks if h.covers(spec))
    for h in active_hooks:
        if h.matches(goal):
            return DecidedUnderivable(h.name)
    universe = lim.universe if lim.universe is not None else default_universe(goal, lim.term_height)
    budget = _Budget(lim.node_budget)
    proved: dict[Sequent, Derivation] = {}
    budget_hit = False
    memo_peak = 0

    def search(seq: Sequent, depth: int, failed: dict[Sequent, int]) -> Derivation | None:
        nonlocal budget_hit
        if seq in proved and proved[seq].height <= depth:
            return proved[seq]
        if failed.get(seq, -1) >= depth:
            return None
        if not budget.spend():
            budget_hit = True
            return None
        for h in active_hooks:
            if h.matches(seq):
                failed[seq] = lim.max_depth
                return None
        # eigenparameters introduced above the goal become usable witnesses
        local_universe = universe | sequent_terms(seq)
        for inst in applicable_instances(seq, spec, local_universe):
            premisses = premisses_of(seq, inst, spec)
            if premisses and depth <= 0:
                continue
            children: list[Derivation] = []
            for p in premisses:
                sub = search(p, depth - 1, failed)
                if sub is None:
                    break
                children.append(sub)
            else:
                d = node(seq, inst, *children)
                proved[seq] = d
                return d
            if budget_hit:
                return None
        if failed.get(seq, -1) < depth:
            failed[seq] = depth
        return None

    # iterative deepening: the first success is a minimal-height proof
    for bound in range(lim.max_depth + 1):
        failed: dict[Sequent, int] = {}
        found = search(goal, bound, failed)
        memo_peak = max(memo_peak, len(failed) + len(proved))
        if found is not None:
            return Proved(found)
        if budget_hit:
            break
    return Exhausted(expansions=budget.used, memo_size=memo_peak, budget_exceeded=budget_hit)


# ---------------------------------------------------------------------------
# Forward rule application (independent of premisses_of)


def _forward_right_rewrites(seq: Sequent, rule: RuleId) -> list[Sequent]:
    """Conclusions of one succedent replacement step applied to ``seq``."""
    idx, keeps = RIGHT_REPLACEMENT[rule]
    out: list[Sequent] = []
    for e_i, op in enumerate(seq.ante):
        if not isinstance(op, Eq):
            continue
        frm, to = (op.lhs, op.rhs) if idx == 1 else (op.rhs, op.lhs)  # forward direction
        for j, ctx in enumerate(seq.succ):
            if not is_atomic(ctx):
                continue
            for paths in _path_subsets(ctx, frm):
                new = replace_at(ctx, set(paths), frm, to)
                ante = seq.ante if keeps else remove_at(seq.ante, e_i)
                out.append(Sequent(ante, replace_formula(seq.succ, j, new)))
    return out


def _forward_eq_intro(seq: Sequent, rule: RuleId, atom_pool: list[Formula]) -> list[Sequent]:
    """=1/=2 forward: rewrite one succedent formula and add the (new) operating
    equality in front of the antecedent."""
    idx = 1 if rule is RuleId.EQ1 else 2
    out: list[Sequent] = []
    for e in atom_pool:
        if not isinstance(e, Eq):
            continue
        frm, to = (e.lhs, e.rhs) if idx == 1 else (e.rhs, e.lhs)
        for j, ctx in enumerate(seq.succ):
            if not is_atomic(ctx):
                continue
            for paths in _path_subsets(ctx, frm):
                new = replace_at(ctx, set(paths), frm, to)
                out.append(Sequent((e,) + seq.ante, replace_formula(seq.succ, j, new)))
    return out


def _forward_left_rewrites(seq: Sequent, rule: RuleId) -> list[Sequent]:
    idx, retention = LEFT_REPLACEMENT[rule]
    out: list[Sequent] = []
    for e_i, op in enumerate(seq.ante):
        if not isinstance(op, Eq):
            continue
        frm, to = (op.lhs, op.rhs) if idx == 1 else (op.rhs, op.lhs)
        for i, ctx in enumerate(seq.ante):
            if i == e_i or not is_atomic(ctx):
                continue
            keep = retention == "keep" or (retention == "plus" and isinstance(ctx, Eq))
            if keep:
                # forward: delete the input formula if its rewrite is also present
                for i2, other in enumerate(seq.ante):
                    if i2 in (e_i, i):
                        continue
                    for paths in _path_subsets(other, to):
                        if replace_at(other, set(paths), to, frm) == ctx:
                            out.append(Sequent(remove_at(seq.ante, i2), seq.succ))
            else:
                for paths in _path_subsets(ctx, frm):
                    new = replace_at(ctx, set(paths), frm, to)
                    out.append(Sequent(replace_formula(seq.ante, i, new), seq.succ))
    return out


def _path_subsets(ctx: Formula, frm: Term) -> list[tuple[Path, ...]]:
    occ = occurrences(ctx, frm)
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


def forward_conclusions(
    seq: Sequent, spec: CalculusSpec, atom_pool: list[Formula]
) -> list[Sequent]:
    """All conclusions obtainable from ``seq`` by one forward application of a
    single-premiss rule of the (equality-fragment) calculus."""
    out: list[Sequent] = []
    rules = spec.rules
    if RuleId.REFL in rules:
        for i, f in enumerate(seq.ante):
            if is_identity(f):
                out.append(Sequent(remove_at(seq.ante, i), seq.succ))
    if RuleId.SYMM in rules:
        for i, f in enumerate(seq.ante):
            if isinstance(f, Eq):
                out.append(Sequent(replace_formula(seq.ante, i, Eq(f.rhs, f.lhs)), seq.succ))
    for rule in (RuleId.REP1R, RuleId.REP2R):
        if rule in rules:
            out.extend(_forward_right_rewrites(seq, rule))
    for rule in (RuleId.EQ1, RuleId.EQ2):
        if rule in rules:
            out.extend(_forward_eq_intro(seq, rule, atom_pool))
    for rule in (RuleId.REP1L, RuleId.REP2L, RuleId.REP, RuleId.REPP, RuleId.REP1LP, RuleId.REP2LP):
        if rule in rules:
            out.extend(_forward_left_rewrites(seq, rule))
    if RuleId.LW in rules:
        for f in atom_pool:
            out.append(Sequent((f,) + seq.ante, seq.succ))
    if RuleId.RW in rules:
        for f in atom_pool:
            out.append(Sequent(seq.ante, seq.succ + (f,)))
    for rule in (RuleId.LC, RuleId.LCEQ):
        if rule in rules:
            counts = Counter(seq.ante)
            for f, n in counts.items():
                if n >= 2 and (rule is RuleId.LC or isinstance(f, Eq)):
                    out.append(Sequent(remove_at(seq.ante, seq.ante.index(f)), seq.succ))
    if RuleId.RC in rules:
        counts = Counter(seq.succ)
        for f, n in counts.items():
            if n >= 2:
                out.append(Sequent(seq.ante, remove_at(seq.succ, seq.succ.index(f))))
    return out


def forward_pair_conclusions(p1: Sequent, p2: Sequent, spec: CalculusSpec) -> list[Sequent]:
    """Cut and congruence conclusions with ``p1`` as first premiss."""
    out: list[Sequent] = []
    if RuleId.CUT in spec.rules:
        for j, a in enumerate(p1.succ):
            if a in p2.ante:
                i = p2.ante.index(a)
                out.append(Sequent(p1.ante + remove_at(p2.ante, i), remove_at(p1.succ, j) + p2.succ))
    if RuleId.CNG in spec.rules:
        for j, e in enumerate(p1.succ):
            if not isinstance(e, Eq):
                continue
            for k, ctx in enumerate(p2.succ):
                if not is_atomic(ctx):
                    continue
                for paths in _path_subsets(ctx, e.lhs):
                    new = replace_at(ctx, set(paths), e.lhs, e.rhs)
                    out.append(
                        Sequent(
                            p1.ante + p2.ante,
                            remove_at(p1.succ, j) + replace_formula(p2.succ, k, new),
                        )
                    )
    return out


# ---------------------------------------------------------------------------
# Saturation


@dataclass(frozen=True)
class Signature:
    """Finite pool description for forward saturation.

    With ``fixed_ante`` set, the pool is the family of sequents with exactly
    that antecedent and a single succedent formula drawn from the atom pool
    (adequate for calculi whose rules never touch the antecedent).  Otherwise
    the pool is every sequent over the atom pool within the size caps.
    """

    params: tuple[str, ...]
    funcs: tuple[tuple[str, int], ...] = ()
    preds: tuple[tuple[str, int], ...] = ()
    max_ante: int = 2
    max_succ: int = 1
    fixed_ante: tuple[Formula, ...] | None = None

    @staticmethod
    def from_goal(goal: Sequent, fixed_ante: bool = False, max_ante: int = 2, max_succ: int = 1) -> "Signature":
        params: set[str] = set()
        funcs: dict[str, int] = {}
        preds: dict[str, int] = {}

        def scan_term(t: Term) -> None:
            for s in subterms(t):
                if isinstance(s, Param):
                    params.add(s.name)
                elif isinstance(s, FunApp):
                    funcs[s.sym] = len(s.args)

        for f in goal.all_formulas():
            if isinstance(f, Atom):
                preds[f.pred] = len(f.args)
                for t in f.args:
                    scan_term(t)
            elif isinstance(f, Eq):
                scan_term(f.lhs)
                scan_term(f.rhs)
        return Signature(
            tuple(sorted(params)),
            tuple(sorted(funcs.items())),
            tuple(sorted(preds.items())),
            max_ante=max_ante,
            max_succ=max_succ,
            fixed_ante=goal.ante if fixed_ante else None,
        )

    def universe(self, height_bound: int) -> list[Term]:
        base: set[Term] = {Param(p) for p in self.params}
        grown = True
        while grown:
            grown = False
            for sym, arity in self.funcs:
                for args in itertools.product(sorted(base, key=str), repeat=arity):
                    t = FunApp(sym, tuple(args))
                    if term_height(t) <= height_bound and t not in base:
                        base.add(t)
                        grown = True
        return sorted(base, key=lambda t: (term_height(t), str(t)))

    def atom_pool(self, height_bound: int) -> list[Formula]:
        terms = self.universe(height_bound)
        pool: list[Formula] = [Eq(u, v) for u in terms for v in terms]
        for pred, arity in self.preds:
            for args in itertools.product(terms, repeat=arity):
                pool.append(Atom(pred, tuple(args)))
        return pool


@dataclass(frozen=True)
class SaturationResult:
    derived: frozenset[Sequent]
    fixpoint: bool
    expansions: int
    pool_size: int

    def __contains__(self, seq: Sequent) -> bool:
        return seq in self.derived


def _pool_sequents(sig: Signature, atom_pool: list[Formula]) -> list[Sequent]:
    if sig.fixed_ante is not None:
        return [Sequent(sig.fixed_ante, (c,)) for c in atom_pool]
    out: list[Sequent] = []
    for na in range(sig.max_ante + 1):
        for ante in itertools.combinations_with_replacement(atom_pool, na):
            for ns in range(sig.max_succ + 1):
                for succ in itertools.combinations_with_replacement(atom_pool, ns):
                    out.append(Sequent(tuple(ante), tuple(succ)))
    return out


def _axioms(seq: Sequent, spec: CalculusSpec) -> bool:
    for f in seq.succ:
        if is_atomic(f) and f in seq.ante:
            return True
        if RuleId.REFAX in spec.rules and is_identity(f):
            return True
    return False


def saturate_forward(sig: Signature, spec: CalculusSpec, lim: SearchLimits) -> SaturationResult:
    """Forward closure of the finite pool under the calculus rules.

    Requires ``spec.base == "none"``.  Stops at the fixpoint or when the node
    budget is exhausted (reported via ``fixpoint=False``).
    """
    if spec.base != "none":
        raise SearchError("saturation is defined for the equality fragment (base=none)")
    atom_pool = sig.atom_pool(lim.term_height)
    pool = _pool_sequents(sig, atom_pool)
    in_pool = set(pool)
    derived: set[Sequent] = {s for s in pool if _axioms(s, spec)}
    queue: deque[Sequent] = deque(sorted(derived, key=str))
    expansions = 0
    two_premiss = RuleId.CUT in spec.rules or RuleId.CNG in spec.rules

    def push(c: Sequent) -> None:
        if c in in_pool and c not in derived:
            derived.add(c)
            queue.append(c)

    fixpoint = True
    while queue:
        seq = queue.popleft()
        expansions += 1
        if expansions > lim.node_budget:
            fixpoint = False
            break
        for c in forward_conclusions(seq, spec, atom_pool):
            push(c)
        if two_premiss:
            for other in list(derived):
                for c in forward_pair_conclusions(seq, other, spec):
                    push(c)
                for c in forward_pair_conclusions(other, seq, spec):
                    push(c)
    return SaturationResult(frozenset(derived), fixpoint, expansions, len(pool))


# ---------------------------------------------------------------------------
# Exact decision by finite-state exploration

@dataclass(frozen=True)
class ExactResult:
    decided: bool
    derivable: bool
    states: int


def exact_decide(goal: Sequent, spec: CalculusSpec, lim: SearchLimits) -> ExactResult:
    """Exact derivability on finite backward state spaces.

    Explores the backward-reachable sequents (complete relative to the
    universe bound) and marks derivability as a least fixpoint.  ``decided``
    is False when the budget was hit, in which case nothing is claimed.
    """
    universe = lim.universe if lim.universe is not None else default_universe(goal, lim.term_height)
    seen: dict[Sequent, list[list[Sequent]]] = {}
    frontier = deque([goal])
    states = 0
    while frontier:
        seq = frontier.popleft()
        if seq in seen:
            continue
        states += 1
        if states > lim.node_budget:
            return ExactResult(False, False, states)
        alts: list[list[Sequent]] = []
        for inst in applicable_instances(seq, spec, universe | sequent_terms(seq)):
            premisses = premisses_of(seq, inst, spec)
            alts.append(premisses)
            for p in premisses:
                if p not in seen:
                    frontier.append(p)
        seen[seq] = alts
    marked: set[Sequent] = set()
    changed = True
    while changed:
        changed = False
        for seq, alts in seen.items():
            if seq in marked:
                continue
            for premisses in alts:
                if all(p in marked for p in premisses):
                    marked.add(seq)
                    changed = True
                    break
    return ExactResult(True, goal in marked, states)


# ---------------------------------------------------------------------------
# Function-free decision procedure (congruence chains)


@dataclass(frozen=True)
class Chain:
    """Equalities from the antecedent arrangeable as a path from ``start`` to
    ``end``; each link keeps its stored orientation (``True`` when traversed
    left to right)."""

    start: Term
    end: Term
    links: tuple[tuple[Eq, bool], ...] = ()

    def formulas(self) -> tuple[Eq, ...]:
        return tuple(e for e, _ in self.links)

    def __len__(self) -> int:
        return len(self.links)


@dataclass(frozen=True)
class WitnessPlan:
    """Output of the decision procedure for a derivable goal: the matching
    antecedent atom (absent for equality goals) and one chain per argument."""

    goal: Sequent
    witness_index: int | None
    chains: tuple[Chain, ...]


def _validate_function_free(goal: Sequent) -> None:
    if len(goal.succ) != 1 or not is_atomic(goal.succ[0]):
        raise NonAtomicGoalError("non-atomic-goal: succedent must be a single atom or equality")
    for f in goal.all_formulas():
        if not is_atomic(f):
            raise NonAtomicGoalError(f"non-atomic-goal: {f}")
        if formula_has_function_symbols(f):
            raise FunctionSymbolsPresentError(f"function-symbols-present: {f}")


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict[str, str] = {}

    def find(self, x: str) -> str:
        p = self.parent.setdefault(x, x)
        while p != x:
            self.parent[x] = self.parent.setdefault(p, p)
            x = self.parent[x]
            p = self.parent.setdefault(x, x)
        return x

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def same(self, a: str, b: str) -> bool:
        return self.find(a) == self.find(b)


def _equality_graph(ante: tuple[Formula, ...]) -> dict[str, list[tuple[str, Eq, bool]]]:
    graph: dict[str, list[tuple[str, Eq, bool]]] = {}
    for f in ante:
        if isinstance(f, Eq):
            u, v = f.lhs, f.rhs
            if isinstance(u, Param) and isinstance(v, Param):
                graph.setdefault(u.name, []).append((v.name, f, True))
                graph.setdefault(v.name, []).append((u.name, f, False))
    return graph


def chain_extract(ante, a: Term, b: Term) -> Chain | None:
    """Shortest chain of antecedent equalities connecting ``a`` and ``b``.

    The empty chain connects any term with itself.  Links keep the stored
    orientation.  Returns None when the terms are not connected.
    """
    if not isinstance(a, Param) or not isinstance(b, Param):
        raise FunctionSymbolsPresentError("chain endpoints must be parameters")
    if a == b:
        return Chain(a, b, ())
    graph = _equality_graph(tuple(ante))
    prev: dict[str, tuple[str, Eq, bool]] = {}
    seen = {a.name}
    queue = deque([a.name])
    while queue:
        x = queue.popleft()
        for (y, e, fwd) in graph.get(x, []):
            if y in seen:
                continue
            seen.add(y)
            prev[y] = (x, e, fwd)
            if y == b.name:
                links: list[tuple[Eq, bool]] = []
                cur = y
                while cur != a.name:
                    x0, e0, fwd0 = prev[cur]
                    links.append((e0, fwd0))
                    cur = x0
                return Chain(a, b, tuple(reversed(links)))
            queue.append(y)
    return None


def decide_function_free(goal: Sequent) -> WitnessPlan | DecidedUnderivable:
    """Exact derivability for function-free atomic sequents.

    For an equality goal, derivable iff the endpoints are congruent under the
    antecedent equalities; for a predicate goal, derivable iff some antecedent
    atom with the same predicate matches argumentwise up to congruence.
    """
    _validate_function_free(goal)
    uf = _UnionFind()
    for f in goal.ante:
        if isinstance(f, Eq):
            uf.union(f.lhs.name, f.rhs.name)  # type: ignore[union-attr]
    target = goal.succ[0]
    if isinstance(target, Eq):
        a, b = target.lhs, target.rhs
        if uf.same(a.name, b.name):  # type: ignore[union-attr]
            chain = chain_extract(goal.ante, a, b)
            assert chain is not None
            return WitnessPlan(goal, None, (chain,))
        return DecidedUnderivable("no chain connects the equated terms")
    for i, f in enumerate(goal.ante):
        if isinstance(f, Atom) and f.pred == target.pred and len(f.args) == len(target.args):
            if all(
                uf.same(x.name, y.name)  # type: ignore[union-attr]
                for x, y in zip(f.args, target.args)
            ):
                chains = tuple(
                    chain_extract(goal.ante, x, y) for x, y in zip(f.args, target.args)
                )
                assert all(c is not None for c in chains)
                return WitnessPlan(goal, i, chains)  # type: ignore[arg-type]
    return DecidedUnderivable("no antecedent atom matches argumentwise up to congruence")


def chain_to_derivation(plan: WitnessPlan) -> Derivation:
    """Realize a witness plan as a derivation using only left-to-right
    replacement (index 2) over initial sequents and reflexivity leaves.

    Works backward from the goal: repeatedly pick an antecedent equality
    ``u = v`` and rewrite every other occurrence of ``u`` (succedent first,
    then antecedent formulas) until the goal closes by an initial sequent or
    a reflexivity axiom.  The construction stays inside {RefAx, Rep2L, Rep2R}.
    """
    goal = plan.goal
    _validate_plan(plan)
    steps: list[tuple[Sequent, RuleInstance]] = []
    cur = goal

    def terminal(seq: Sequent) -> RuleInstance | None:
        tgt = seq.succ[0]
        if is_identity(tgt):
            return leaf(RuleId.REFAX, 0)
        for i, f in enumerate(seq.ante):
            if f == tgt:
                return leaf(RuleId.INIT, i, 0)
        return None

    processed: set[int] = set()
    guard = 0
    while terminal(cur) is None:
        guard += 1
        if guard > 10_000:
            raise MalformedWitnessError("malformed-witness: collapse did not terminate")
        step = _collapse_step(cur, processed)
        if step is None:
            raise MalformedWitnessError("malformed-witness: no collapse step applies")
        inst, nxt = step
        steps.append((cur, inst))
        cur = nxt
    d = node(cur, terminal(cur))
    for seq, inst in reversed(steps):
        d = node(seq, inst, d)
    return d


def _collapse_step(cur: Sequent, processed: set[int]) -> tuple[RuleInstance, Sequent] | None:
    from .calculus import PRESETS

    spec = PRESETS["R2rl"]
    for e_i, e in enumerate(cur.ante):
        if e_i in processed or not isinstance(e, Eq) or e.lhs == e.rhs:
            continue
        if not isinstance(e.lhs, Param) or not isinstance(e.rhs, Param):
            continue
        u = e.lhs
        occ = occurrences(cur.succ[0], u)
        if occ:
            inst = repl_inst(RuleId.REP2R, e_i, 0, occ)
            return inst, premisses_of(cur, inst, spec)[0]
        for i, f in enumerate(cur.ante):
            if i == e_i:
                continue
            occ = occurrences(f, u)
            if occ:
                inst = repl_inst(RuleId.REP2L, e_i, i, occ)
                return inst, premisses_of(cur, inst, spec)[0]
        processed.add(e_i)
    return None


def _validate_plan(plan: WitnessPlan) -> None:
    goal = plan.goal
    _validate_function_free(goal)
    target = goal.succ[0]
    if plan.witness_index is None:
        if not isinstance(target, Eq) or len(plan.chains) != 1:
            raise MalformedWitnessError("malformed-witness: equality goal needs exactly one chain")
        chain = plan.chains[0]
        if chain.start != target.lhs or chain.end != target.rhs:
            raise MalformedWitnessError("malformed-witness: chain endpoints do not match the goal")
    else:
        if not isinstance(target, Atom):
            raise MalformedWitnessError("malformed-witness: witness index given for an equality goal")
        if not (0 <= plan.witness_index < len(goal.ante)):
            raise MalformedWitnessError("malformed-witness: witness index out of range")
        w = goal.ante[plan.witness_index]
        if not isinstance(w, Atom) or w.pred != target.pred or len(w.args) != len(target.args):
            raise MalformedWitnessError("malformed-witness: witness atom does not match the goal")
        if len(plan.chains) != len(target.args):
            raise MalformedWitnessError("malformed-witness: one chain per argument required")
        for chain, x, y in zip(plan.chains, w.args, target.args):
            if chain.start != x or chain.end != y:
                raise MalformedWitnessError("malformed-witness: chain endpoints do not match")
    for chain in plan.chains:
        cur = chain.start
        for (e, fwd) in chain.links:
            if e not in goal.ante:
                raise MalformedWitnessError(f"malformed-witness: link {e} not in the antecedent")
            src, dst = (e.lhs, e.rhs) if fwd else (e.rhs, e.lhs)
            if src != cur:
                raise MalformedWitnessError("malformed-witness: chain links do not connect")
            cur = dst
        if cur != chain.end:
            raise MalformedWitnessError("malformed-witness: chain does not reach its endpoint")
