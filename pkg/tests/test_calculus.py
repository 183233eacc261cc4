import itertools

import pytest

from eqseq.calculus import (
    CalculusError,
    CalculusSpec,
    EigenvariableError,
    Flag,
    OrientationViolationError,
    PRESETS,
    PREC_HEIGHT,
    Precedence,
    RuleId,
    RuleInstance,
    Replacement,
    applicable_instances,
    leaf,
    parse_spec,
    premisses_of,
    repl_inst,
    resolve_preset,
    resolve_spec,
)
from eqseq.parser import parse_sequent, parse_term, print_sequent
from eqseq.syntax import Param

R12r = PRESETS["R12r"]
S1 = PRESETS["S1"]


def seq(text):
    return parse_sequent(text)


def terms(*names):
    return [parse_term(n) for n in names]


def test_rep1r_display():
    # conclusion  r=s, G |- D, P(s)  has premiss  r=s, G |- D, P(r)
    concl = seq("r=s, Q(c) |- c=c, P(s)")
    inst = repl_inst(RuleId.REP1R, 0, 1, [(0,)])
    (prem,) = premisses_of(concl, inst, R12r)
    assert prem == seq("r=s, Q(c) |- c=c, P(r)")


def test_rep2r_rewrites_toward_the_left_side():
    concl = seq("b=a |- a=b")
    inst = repl_inst(RuleId.REP2R, 0, 0, [(1,)])
    (prem,) = premisses_of(concl, inst, R12r)
    assert prem == seq("b=a |- a=a")


def test_rep2lplus_retains_equality_contexts():
    concl = seq("s=r, P(s), d=d |- ")
    spec = PRESETS["R2rlPlus"]
    # non-equality context: strict
    inst = repl_inst(RuleId.REP2LP, 0, 1, [(0,)])
    (prem,) = premisses_of(concl, inst, spec)
    assert prem == seq("s=r, P(r), d=d |- ")
    # equality context: the rewritten copy is added, the context kept
    concl2 = seq("s=r, s=c |- ")
    inst2 = repl_inst(RuleId.REP2LP, 0, 1, [(0,)])
    (prem2,) = premisses_of(concl2, inst2, spec)
    assert prem2 == seq("s=r, s=c, r=c |- ")


def test_eq_rules_drop_their_operating_equality():
    concl = seq("a=f(a), a=f(a) |- a=f(f(a))")
    inst = repl_inst(RuleId.EQ1, 0, 0, [(1, 0)])
    (prem,) = premisses_of(concl, inst, PRESETS["EqCutFree"])
    assert prem == seq("a=f(a) |- a=f(a)")


def test_refl_and_refax():
    concl = seq("P(a) |- P(a)")
    inst = RuleInstance(RuleId.REFL, witness=parse_term("t"))
    (prem,) = premisses_of(concl, inst, PRESETS["RefRep"])
    assert prem == seq("t=t, P(a) |- P(a)")
    assert premisses_of(seq("Q(b) |- c=c, t=t"), leaf(RuleId.REFAX, 1), R12r) == []


def test_rule_not_in_calculus():
    with pytest.raises(CalculusError):
        premisses_of(seq("|- t=t"), leaf(RuleId.REFAX, 0), PRESETS["RefRep"])


def test_cut_split():
    concl = seq("a=b, P(c) |- Q(d)")
    inst = RuleInstance(
        RuleId.CUT, cut_formula=parse_formula_cached("P(a)"), split=((0,), ())
    )
    p1, p2 = premisses_of(concl, inst, PRESETS["EqCut"])
    assert p1 == seq("a=b |- P(a)")
    assert p2 == seq("P(a), P(c) |- Q(d)")


def parse_formula_cached(text):
    from eqseq.parser import parse_formula

    return parse_formula(text)


def test_cng_premisses():
    concl = seq("s=r |- r=s")
    inst = RuleInstance(
        RuleId.CNG,
        replacement=Replacement(None, 0, ((0,),)),
        witness=Param("s"),
        split=((0,), ()),
    )
    p1, p2 = premisses_of(concl, inst, PRESETS["CngCut"])
    assert p1 == seq("s=r |- s=r")
    assert p2 == seq("|- s=s")


def test_eigenvariable_condition():
    concl = seq("|- forall x. P(x)")
    spec = PRESETS["G3c"]
    ok = RuleInstance(RuleId.RFORALL, (0,), eigen="_e1")
    (prem,) = premisses_of(concl, ok, spec)
    assert print_sequent(prem) == "|- P(_e1)"
    concl2 = seq("Q(a) |- forall x. P(x)")
    with pytest.raises(EigenvariableError):
        premisses_of(concl2, RuleInstance(RuleId.RFORALL, (0,), eigen="a"), spec)


def test_orientation_flag():
    spec = CalculusSpec(
        "none",
        frozenset({RuleId.REFAX, RuleId.REP1R, RuleId.REP2R}),
        frozenset({Flag.ORIENTED}),
        PREC_HEIGHT,
    )
    # index 1 must be shortening: operating f(a)=a is not
    concl = seq("f(a)=a |- Q(a)")
    with pytest.raises(OrientationViolationError):
        premisses_of(concl, repl_inst(RuleId.REP1R, 0, 0, [(0,)]), spec)
    # index 2 on the same operating equality is nonlengthening
    concl2 = seq("f(a)=a |- Q(f(a))")
    (prem,) = premisses_of(concl2, repl_inst(RuleId.REP2R, 0, 0, [(0,)]), spec)
    assert prem == seq("f(a)=a |- Q(a)")


def test_right_hand_only_flag():
    spec = PRESETS["R12r_eqr"]
    concl = seq("a=b |- f(a)=c")
    with pytest.raises(CalculusError):
        premisses_of(concl, repl_inst(RuleId.REP2R, 0, 0, [(0, 0)]), spec)
    concl2 = seq("a=b |- c=f(a)")
    (prem,) = premisses_of(concl2, repl_inst(RuleId.REP2R, 0, 0, [(1, 0)]), spec)
    assert prem == seq("a=b |- c=f(b)")


def test_context_flags():
    scope = PRESETS["R_scope"]
    with pytest.raises(CalculusError):  # right rule on a non-equality context
        premisses_of(seq("a=b |- P(a)"), repl_inst(RuleId.REP2R, 0, 0, [(0,)]), scope)
    with pytest.raises(CalculusError):  # left rule on an equality context
        premisses_of(seq("a=b, a=c |- "), repl_inst(RuleId.REP2L, 0, 1, [(0,)]), scope)


def test_applicable_instances_spec_examples():
    spec = R12r
    goal = seq("|- t=t")
    insts = applicable_instances(goal, spec, terms("t"))
    assert leaf(RuleId.REFAX, 0) in insts

    goal2 = seq("a=c, b=c |- a=b")
    insts2 = applicable_instances(goal2, spec, terms("a", "b", "c"))
    wanted = repl_inst(RuleId.REP2R, 1, 0, [(1,)])  # premiss a=c, b=c |- a=c
    assert wanted in insts2
    # no instance uses the display the other way around
    assert all(i.rule is not RuleId.REP1R for i in insts2)


def test_s1_shape_closure_on_backward_instances():
    # every backward instance maps the counterexample shape into itself
    goal = seq("a=c, b=c, c=c |- a=b")
    from eqseq.search import _shape_s1

    assert _shape_s1(goal)
    for inst in applicable_instances(goal, S1, terms("a", "b", "c")):
        for prem in premisses_of(goal, inst, S1):
            assert _shape_s1(prem), (inst.rule, print_sequent(prem))


def test_generator_sound_and_complete_small():
    goal = seq("a=b, P(a) |- P(b)")
    spec = PRESETS["R12rl"]
    universe = terms("a", "b")
    insts = applicable_instances(goal, spec, universe)
    for inst in insts:
        premisses_of(goal, inst, spec)  # soundness: must not raise
    # brute-force completeness over replacement instances
    found = set(insts)
    for rule in (RuleId.REP1R, RuleId.REP2R, RuleId.REP1L, RuleId.REP2L):
        for ei, ctx, path0, path1 in itertools.product(range(2), range(2), range(2), range(2)):
            for paths in ([(path0,)], [(path0,), (path1,)]):
                inst = repl_inst(rule, ei, ctx, [tuple(p) for p in paths])
                try:
                    premisses_of(goal, inst, spec)
                except CalculusError:
                    continue
                assert inst in found, inst


def test_flag_monotonicity():
    goal = seq("a=b |- f(a)=f(a)")
    base = CalculusSpec("none", frozenset({RuleId.REFAX, RuleId.REP1R, RuleId.REP2R}))
    flagged = CalculusSpec(
        "none", base.rules, frozenset({Flag.SINGLE_OCCURRENCE, Flag.RIGHT_HAND_ONLY})
    )
    unrestricted = applicable_instances(goal, base, terms("a", "b"))
    restricted = applicable_instances(goal, flagged, terms("a", "b"))
    assert set(restricted) <= set(unrestricted)


def test_preset_table_contains_required_entries():
    for name in [
        "R12r", "R12r_eqr", "R12rl", "R_scope", "R_scope_eqr", "R1rl", "R2rl",
        "R1rlPlus", "R2rlPlus", "R12prec_rlPlus", "RefRep", "RefRep2L",
        "S1", "S2", "EqCut", "CngCut", "CngOnly", "CngLCeq",
    ]:
        assert name in PRESETS, name
    assert PRESETS["S1"].rules == frozenset(
        {RuleId.REFAX, RuleId.LC, RuleId.REP2LP, RuleId.REP1R}
    )


def test_spec_text_format():
    spec = parse_spec("base=none rules=refax,rep1r,rep2r flags=eqr prec=height")
    assert spec.rules == PRESETS["R12r"].rules
    assert Flag.RIGHT_HAND_ONLY in spec.flags
    assert spec.precedence.kind == "height"
    assert resolve_spec("R12r") == PRESETS["R12r"]
    with pytest.raises(CalculusError):
        parse_spec("base=none rules=nonsense")
    with pytest.raises(CalculusError):
        resolve_preset("NoSuchPreset")


def test_base_validation():
    with pytest.raises(CalculusError):
        CalculusSpec("none", frozenset({RuleId.LAND}))
    with pytest.raises(CalculusError):
        CalculusSpec("c", frozenset({RuleId.RIMPI}))
    with pytest.raises(CalculusError):
        Precedence("explicit", frozenset({(Param("a"), Param("b")), (Param("b"), Param("a"))}))
