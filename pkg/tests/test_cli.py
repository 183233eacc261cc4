import json
import re

from eqseq.cli import run
from eqseq.checker import check
from eqseq.parser import parse_derivation
from eqseq.calculus import PRESETS, RuleId


def invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _strip_timing(text):
    return re.sub(r"^time_ms: \d+$", "time_ms: X", text, flags=re.M)


def test_prove_writes_checkable_drv(tmp_path, capsys):
    out_file = tmp_path / "w.drv"
    code, out, _ = invoke(
        capsys, "prove", "a=c, b=c |- a=b", "--preset", "R12r", "--depth", "3", "-o", str(out_file)
    )
    assert code == 0
    assert "result: proved" in out and "height: 1" in out
    d = parse_derivation(out_file.read_text())
    assert check(d, PRESETS["R12r"]).valid


def test_prove_exhaustion_exit_code(capsys):
    code, out, _ = invoke(
        capsys, "prove", "a=f(a) |- a=f(f(a))", "--preset", "EqCutFree",
        "--depth", "8", "--term-height", "4",
    )
    assert code == 1
    assert "result: exhausted" in out


def test_prove_underivable_via_hook(capsys):
    code, out, _ = invoke(capsys, "prove", "a=c, b=c |- a=b", "--preset", "S1")
    assert code == 1
    assert "result: underivable" in out


def test_check_valid_and_invalid(tmp_path, capsys):
    drv = tmp_path / "d.drv"
    drv.write_text('(rep2r [1;0;1] "a = c, b = c |- a = b"\n  (init [0;0] "a = c, b = c |- a = c"))\n')
    code, out, _ = invoke(capsys, "check", str(drv), "--preset", "R12r")
    assert code == 0 and "result: valid" in out
    code, out, _ = invoke(capsys, "check", str(drv), "--preset", "EqCutFree")
    assert code == 1 and "result: invalid" in out


def test_check_spec_string(tmp_path, capsys):
    drv = tmp_path / "d.drv"
    drv.write_text('(refax [0] "|- t = t")\n')
    code, out, _ = invoke(capsys, "check", str(drv), "--spec", "base=none rules=refax")
    assert code == 0


def test_decide_and_witness(tmp_path, capsys):
    out_file = tmp_path / "o.drv"
    code, out, _ = invoke(capsys, "decide", "P(a), a=b |- P(b)", "-o", str(out_file))
    assert code == 0
    d = parse_derivation(out_file.read_text())
    assert check(d, PRESETS["R2rl"]).valid
    code, out, _ = invoke(capsys, "decide", "a=b, c=d |- a=d")
    assert code == 1


def test_transform_command(tmp_path, capsys):
    drv = tmp_path / "symm.drv"
    drv.write_text(
        '(cut [0;;"r = s"] "s = r |- r = s"\n'
        '  (rep1r [0;0;0] "s = r |- r = s"\n'
        '    (refax [0] "s = r |- s = s"))\n'
        '  (init [0;0] "r = s |- r = s"))\n'
    )
    out_file = tmp_path / "cutfree.drv"
    code, out, _ = invoke(capsys, "transform", str(drv), "cut-eliminate", "-o", str(out_file))
    assert code == 0
    d = parse_derivation(out_file.read_text())
    assert check(d, PRESETS["R12r"]).valid
    assert RuleId.CUT not in d.rules_used()


def test_compare_equivalent_presets(tmp_path, capsys):
    corpus = tmp_path / "c.seq"
    corpus.write_text("a=c, b=c |- a=b\nb=a |- a=b\n|- t=t\na=b, c=d |- a=d\n")
    code, out, _ = invoke(capsys, "compare", str(corpus), "R12r", "R12rl", "--depth", "4")
    assert code == 0
    assert "disagree: 0" in out


def test_compare_flags_disagreement(tmp_path, capsys):
    corpus = tmp_path / "c.seq"
    corpus.write_text("a=c, b=c |- a=b\n")
    code, out, _ = invoke(capsys, "compare", str(corpus), "R12r", "S1", "--depth", "3")
    assert code == 1
    assert "disagree: 1" in out and "DISAGREE" in out


def test_presets_listing(capsys):
    code, out, _ = invoke(capsys, "presets")
    assert code == 0
    assert "R12r" in out and "S1" in out


def test_json_mode(capsys):
    code, out, _ = invoke(capsys, "prove", "|- t=t", "--preset", "R12r", "--json")
    assert code == 0
    payload = json.loads(out.splitlines()[-1])
    assert payload["result"] == "proved" and payload["height"] == 0


def test_usage_and_parse_errors_exit_2(tmp_path, capsys):
    code, _, err = invoke(capsys, "prove", "a=b |-")  # no preset
    assert code == 2
    code, _, err = invoke(capsys, "prove", "a=b |- ((", "--preset", "R12r")
    assert code == 2
    code, _, err = invoke(capsys, "check", str(tmp_path / "missing.drv"), "--preset", "R12r")
    assert code == 2


def test_reports_deterministic_modulo_timing(capsys):
    _, out1, _ = invoke(capsys, "prove", "a=c, b=c |- a=b", "--preset", "R12r")
    _, out2, _ = invoke(capsys, "prove", "a=c, b=c |- a=b", "--preset", "R12r")
    assert _strip_timing(out1) == _strip_timing(out2)


def test_config_file_defaults(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "eqseq.toml"
    cfg.write_text('preset = "R12r"\ndepth = 4\n')
    monkeypatch.chdir(tmp_path)
    code, out, _ = invoke(capsys, "prove", "b=a |- a=b")
    assert code == 0
    assert "result: proved" in out


def test_semishorten_with_explicit_precedence_file(tmp_path, capsys):
    prec = tmp_path / "prec.txt"
    prec.write_text("a < b   # a is smaller\nc < b\n")
    drv = tmp_path / "d.drv"
    # index-2 inference with operating a=b: lengthening under a < b
    drv.write_text('(rep2r [0;0;0] "a = b, Q(b) |- Q(a)"\n  (init [1;0] "a = b, Q(b) |- Q(b)"))\n')
    out_file = tmp_path / "out.drv"
    code, out, _ = invoke(
        capsys, "transform", str(drv), "semishorten", "--prec", f"@{prec}", "-o", str(out_file)
    )
    assert code == 0
    d = parse_derivation(out_file.read_text())
    from eqseq.transform import semishorten_target
    from eqseq.calculus import load_precedence_file

    target = semishorten_target(load_precedence_file(str(prec)))
    assert check(d, target).valid


def test_spec_string_with_precedence_file(tmp_path, capsys):
    prec = tmp_path / "prec.txt"
    prec.write_text("a < f(a)\n")
    drv = tmp_path / "d.drv"
    drv.write_text('(refax [0] "|- t = t")\n')
    code, out, _ = invoke(
        capsys, "check", str(drv), "--spec",
        f"base=none rules=refax,rep1r,rep2r flags=oriented prec=@{prec}",
    )
    assert code == 0
