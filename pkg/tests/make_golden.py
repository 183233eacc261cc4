"""Regenerate the golden derivation corpus under tests/golden/.

Each entry is a display transcribed from the source material, written in the
canonical printer format with a `# check:` header naming its calculus.  Run
from the repository root:  python3 tests/make_golden.py
"""
from __future__ import annotations

import pathlib

from eqseq.calculus import resolve_spec
from eqseq.checker import check
from eqseq.parser import parse_derivation, print_derivation

HERE = pathlib.Path(__file__).parent / "golden"

# name -> (description, check-spec, derivation text)
GOLDEN: dict[str, tuple[str, str, str]] = {
    "symm_case_1_1": (
        "left symmetry from the index-1 right replacement rule, via cut",
        "base=none rules=refax,rep1r,cut",
        """
        (cut [0;;"r = s"] "s = r |- r = s"
          (rep1r [0;0;0] "s = r |- r = s"
            (refax [0] "s = r |- s = s"))
          (init [0;0] "r = s |- r = s"))
        """,
    ),
    "symm_case_1_2": (
        "left symmetry from the index-2 right replacement rule, via cut",
        "base=none rules=refax,rep2r,cut",
        """
        (cut [0;;"r = s"] "s = r |- r = s"
          (rep2r [0;0;1] "s = r |- r = s"
            (refax [0] "s = r |- r = r"))
          (init [0;0] "r = s |- r = s"))
        """,
    ),
    "symm_case_2_1": (
        "left symmetry from the strict index-1 left rule, weakening an identity in",
        "base=none rules=refl,rep1l,lw",
        """
        (refl [r] "s = r |- r = s"
          (rep1l [1;0;1] "r = r, s = r |- r = s"
            (rep1l [0;1;0] "r = s, s = r |- r = s"
              (lw [1] "r = s, r = r |- r = s"
                (init [0;0] "r = s |- r = s")))))
        """,
    ),
    "symm_case_2_2": (
        "left symmetry from the strict index-2 left rule, weakening an identity in",
        "base=none rules=refl,rep2l,lw",
        """
        (refl [s] "s = r |- r = s"
          (rep2l [1;0;0] "s = s, s = r |- r = s"
            (rep2l [0;1;1] "r = s, s = r |- r = s"
              (lw [1] "r = s, s = s |- r = s"
                (init [0;0] "r = s |- r = s")))))
        """,
    ),
    "symm_case_3_1": (
        "left symmetry from the non-strict index-2 left rule",
        "base=none rules=refl,rep,lw",
        """
        (refl [s] "s = r |- r = s"
          (rep [1;0;0] "s = s, s = r |- r = s"
            (lw [2] "r = s, s = s, s = r |- r = s"
              (lw [1] "r = s, s = s |- r = s"
                (init [0;0] "r = s |- r = s")))))
        """,
    ),
    "symm_case_3_2": (
        "left symmetry from the non-strict index-1 left rule",
        "base=none rules=refl,repp,lw",
        """
        (refl [r] "s = r |- r = s"
          (repp [1;0;1] "r = r, s = r |- r = s"
            (lw [2] "r = s, r = r, s = r |- r = s"
              (lw [1] "r = s, r = r |- r = s"
                (init [0;0] "r = s |- r = s")))))
        """,
    ),
    "symm_case_4": (
        "left symmetry from the congruence rule, via cut",
        "base=none rules=refax,cng,cut",
        """
        (cut [0;;"r = s"] "s = r |- r = s"
          (cng [0;;0;0;"s"] "s = r |- r = s"
            (init [0;0] "s = r |- s = r")
            (refax [0] "|- s = s"))
          (init [0;0] "r = s |- r = s"))
        """,
    ),
    "expansion_necessity": (
        "the contracted counterexample sequent becomes one-step derivable once"
        " its operating equality is repeated",
        "base=none rules=refax,eq1,eq2",
        """
        (eq1 [0;0;1.0] "a = f(a), a = f(a) |- a = f(f(a))"
          (init [0;0] "a = f(a) |- a = f(a)"))
        """,
    ),
    "s1_witness": (
        "the two-parameter transitivity witness, derivable with repetition",
        "R12r",
        """
        (rep2r [1;0;1] "a = c, b = c |- a = b"
          (init [0;0] "a = c, b = c |- a = c"))
        """,
    ),
    "ref_from_refax_cut": (
        "the left reflexivity rule simulated by cut against a reflexivity axiom",
        "base=none rules=refax,cut",
        """
        (cut [;;"t = t"] "P(a) |- P(a)"
          (refax [0] "|- t = t")
          (init [1;0] "t = t, P(a) |- P(a)"))
        """,
    ),
    "refax_from_ref": (
        "the reflexivity axiom recovered from the left reflexivity rule",
        "base=none rules=refl",
        """
        (refl [t] "|- t = t"
          (init [0;0] "t = t |- t = t"))
        """,
    ),
    "cng_simulates_rep1r": (
        "index-1 right replacement from congruence plus equality contraction",
        "base=none rules=refax,cng,lceq",
        """
        (lceq [0] "a = b, Q(a) |- Q(b)"
          (cng [0;;0;0;"a"] "a = b, a = b, Q(a) |- Q(b)"
            (init [0;0] "a = b |- a = b")
            (init [1;0] "a = b, Q(a) |- Q(a)")))
        """,
    ),
    "cng_simulates_rep2r": (
        "index-2 right replacement from congruence, symmetry block included",
        "base=none rules=refax,cng,lceq",
        """
        (lceq [0] "b = a, Q(a) |- Q(b)"
          (cng [0;;0;0;"a"] "b = a, b = a, Q(a) |- Q(b)"
            (cng [0;;0;0;"b"] "b = a |- a = b"
              (init [0;0] "b = a |- b = a")
              (refax [0] "|- b = b"))
            (init [1;0] "b = a, Q(a) |- Q(a)")))
        """,
    ),
    "cng_elim_base_case": (
        "congruence against an initial first premiss reduces to weakening plus"
        " one replacement inference",
        "base=none rules=refax,rep1r,lw",
        """
        (rep1r [0;0;0] "a = b, Q(a), c = c |- Q(b)"
          (lw [2] "a = b, Q(a), c = c |- Q(a)"
            (lw [0] "a = b, Q(a) |- Q(a)"
              (init [0;0] "Q(a) |- Q(a)"))))
        """,
    ),
    "cng_elim_inductive_case": (
        "congruence whose cut equality was itself rewritten: weaken, rewrite"
        " back, congruence at smaller height, rewrite forward, contract",
        "base=none rules=refax,rep1r,rep2r,lw,lceq,cng",
        """
        (lceq [1] "f(a) = a, a = b, Q(f(b)), c = c |- Q(b)"
          (rep1r [1;0;0] "f(a) = a, a = b, a = b, Q(f(b)), c = c |- Q(b)"
            (cng [0,1;;0;0;"f(a)"] "f(a) = a, a = b, a = b, Q(f(b)), c = c |- Q(a)"
              (init [0;0] "f(a) = a, a = b |- f(a) = a")
              (rep2r [0;0;0.0] "a = b, Q(f(b)), c = c |- Q(f(a))"
                (lw [0] "a = b, Q(f(b)), c = c |- Q(f(b))"
                  (init [0;0] "Q(f(b)), c = c |- Q(f(b))"))))))
        """,
    ),
    "rightnorm_leaf_replacement": (
        "the replaced initial sequent of the right-hand-side normalization:"
        " a reflexivity axiom plus one desired inference",
        "base=none rules=refax,rep2r flags=eqr",
        """
        (rep2r [0;0;1.0] "a = b |- f(b) = f(a)"
          (refax [0] "a = b |- f(b) = f(b)"))
        """,
    ),
    "rightnorm_init_to_refax": (
        "an initial equality sequent recovered from a reflexivity axiom by one"
        " right-hand-side inference",
        "base=none rules=refax,rep1r flags=eqr",
        """
        (rep1r [0;0;1] "f(a) = b |- f(a) = b"
          (refax [0] "f(a) = b |- f(a) = f(a)"))
        """,
    ),
    "scope_spine": (
        "the scope-restriction spine: succedents rewritten throughout and one"
        " initial antecedent inference on a non-equality context",
        "R_scope",
        """
        (rep2l [0;1;0] "a = b, Q(a), c = a |- Q(b)"
          (init [1;0] "a = b, Q(b), c = a |- Q(b)"))
        """,
    ),
    "chain_lemma_a_n1": (
        "a one-link chain with a flipped link, closed by a reflexivity axiom",
        "R2rl",
        """
        (rep2r [0;0;1] "b = a |- a = b"
          (refax [0] "b = a |- a = a"))
        """,
    ),
    "chain_lemma_b_n1_left": (
        "a one-link chain acting on an antecedent atom",
        "R2rl",
        """
        (rep2l [1;0;0] "Q(a), a = b |- Q(b)"
          (init [0;0] "Q(b), a = b |- Q(b)"))
        """,
    ),
    "chain_lemma_b_n1_right": (
        "a one-link flipped chain acting on the succedent atom",
        "R2rl",
        """
        (rep2r [1;0;0] "Q(a), b = a |- Q(b)"
          (init [0;0] "Q(a), b = a |- Q(a)"))
        """,
    ),
    "rep_elim_case_1_2": (
        "excluded-index elimination, base case against an initial sequent with"
        " the rewritten formula on both sides",
        "R2rlPlus",
        """
        (rep2lp [0;1;0] "a = b, Q(a) |- Q(b)"
          (init [1;0] "a = b, Q(b) |- Q(b)"))
        """,
    ),
    "rep_elim_case_1_3_1": (
        "excluded-index elimination, the conclusion is itself a reflexivity axiom",
        "R2rlPlus",
        """
        (refax [0] "a = b |- b = b")
        """,
    ),
    "rep_elim_case_1_3_2": (
        "excluded-index elimination when the context is the operating equality:"
        " two same-direction inferences over a reflexivity axiom",
        "R2rlPlus",
        """
        (rep2r [0;0;0] "a = f(a) |- a = f(f(a))"
          (rep2r [0;0;0.0] "a = f(a) |- f(a) = f(f(a))"
            (refax [0] "a = f(a) |- f(f(a)) = f(f(a))")))
        """,
    ),
    "rep_elim_case_2_2_1": (
        "excluded-index elimination against a reflexivity leaf, left-side variant",
        "R2rlPlus",
        """
        (rep2r [0;0;1.0] "a = b |- f(b) = f(a)"
          (refax [0] "a = b |- f(b) = f(b)"))
        """,
    ),
    "rep_elim_case_2_2_2": (
        "excluded-index elimination against a reflexivity leaf, right-side variant",
        "R2rlPlus",
        """
        (rep2r [0;0;0.0] "a = b |- f(a) = f(b)"
          (refax [0] "a = b |- f(b) = f(b)"))
        """,
    ),
    "rep_elim_case_3_1": (
        "excluded-index elimination, commuting case: the excluded inference is"
        " moved above the index-2 step acting on another succedent formula",
        "base=none rules=refax,rep1r,rep2lp,rep2r",
        """
        (rep2r [0;0;0] "b = a, c = d, Q(a) |- Q(b), P(d)"
          (rep1r [1;1;0] "b = a, c = d, Q(a) |- Q(a), P(d)"
            (init [2;0] "b = a, c = d, Q(a) |- Q(a), P(c)")))
        """,
    ),
    "rep_elim_case_3_2": (
        "excluded-index elimination, commuting case: both inferences rewrite"
        " the same formula at disjoint positions",
        "base=none rules=refax,rep1r,rep2lp,rep2r",
        """
        (rep2r [1;0;1] "a = b, d = c, R(a, c) |- R(b, d)"
          (rep1r [0;0;0] "a = b, d = c, R(a, c) |- R(b, c)"
            (init [2;0] "a = b, d = c, R(a, c) |- R(a, c)")))
        """,
    ),
    "rep_elim_case_3_3": (
        "excluded-index elimination, overlap case: the inference below wrote the"
        " surrounding subterm; weaken a rewritten operating equality in",
        "base=none rules=refax,rep2lp,rep2r,lw",
        """
        (rep2lp [1;0;0.0] "f(a) = c, a = b, Q(c) |- Q(f(b))"
          (rep2r [3;0;0] "f(a) = c, a = b, Q(c), f(b) = c |- Q(f(b))"
            (lw [3] "f(a) = c, a = b, Q(c), f(b) = c |- Q(c)"
              (init [2;0] "f(a) = c, a = b, Q(c) |- Q(c)"))))
        """,
    ),
    "rep_elim_case_3_4": (
        "excluded-index elimination, overlap case: the excluded inference"
        " replaces a term containing the one below; weaken and recurse",
        "base=none rules=refax,rep1r,rep2lp,lw",
        """
        (rep2lp [0;1;0.0] "a = b, f(a) = c, Q(f(b)) |- Q(c)"
          (rep1r [2;0;0] "a = b, f(a) = c, f(b) = c, Q(f(b)) |- Q(c)"
            (lw [2] "a = b, f(a) = c, f(b) = c, Q(f(b)) |- Q(f(b))"
              (init [2;0] "a = b, f(a) = c, Q(f(b)) |- Q(f(b))"))))
        """,
    ),
    "semishorten_reorient": (
        "a non-shortening index-1 inference re-expressed as a nonlengthening"
        " index-2 one under term-height precedence",
        "base=none rules=refax,rep1lp,rep2lp,rep1r,rep2r flags=oriented prec=height",
        """
        (rep2lp [0;1;0] "f(b) = a, Q(f(b)) |- Q(a)"
          (init [1;0] "f(b) = a, Q(a) |- Q(a)"))
        """,
    ),
}


def main() -> int:
    HERE.mkdir(parents=True, exist_ok=True)
    ok = True
    for name, (desc, spec_text, body) in sorted(GOLDEN.items()):
        spec = resolve_spec(spec_text)
        d = parse_derivation(body)
        rep = check(d, spec)
        if not rep.valid:
            print(f"INVALID {name}: {rep.first_error}")
            ok = False
            continue
        text = f"# {desc}\n# check: {spec_text}\n{print_derivation(d)}"
        (HERE / f"{name}.drv").write_text(text, encoding="utf-8")
        print(f"wrote {name}.drv (height {rep.height})")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
