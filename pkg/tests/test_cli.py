import json

import pytest

from fabt.cli import main


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_typecheck(files, capsys):
    code, out, _ = run(["typecheck", files("a.src", "\\x:Unit. x")], capsys)
    assert (code, out) == (0, "Unit -> Unit\n")
    code, out, _ = run(["typecheck", files("b.src", "x2 unit"), "--env", "x2:Unit -> Bool"], capsys)
    assert (code, out) == (0, "Bool\n")


def test_type_and_parse_errors_exit_2(files, capsys):
    code, _, err = run(["typecheck", files("a.src", "if unit then true else false")], capsys)
    assert code == 2 and "Bool" in err
    code, _, err = run(["typecheck", files("b.src", "fst fst")], capsys)
    assert code == 2 and "1:8" in err
    code, _, _ = run(["typecheck", "missing.src"], capsys)
    assert code == 2
    assert main(["no-such-command"]) == 2


def test_scopecheck(files, capsys):
    assert run(["scopecheck", files("a.tgt", "\\x. x")], capsys)[:2] == (0, "ok\n")
    assert run(["scopecheck", files("b.tgt", "y HOLE")], capsys)[0] == 2
    assert run(["scopecheck", files("c.tgt", "x")], capsys)[0] == 2
    assert run(["scopecheck", files("d.tgt", "x"), "--env", "x"], capsys)[0] == 0


def test_run(files, capsys, monkeypatch):
    code, out, _ = run(["run", "--lang", "tgt", "--fuel", "100000", files("p.tgt", "(\\x. x) true")], capsys)
    assert (code, out) == (0, "value true steps=1\n")
    code, out, _ = run(["run", files("w.tgt", "fst true")], capsys)
    assert out == "wrong steps=1\n"
    loop = files("l.tgt", "(\\x. x x) (\\x. x x)")
    assert run(["run", loop, "--fuel", "50"], capsys)[1] == "timeout fuel=50\n"
    monkeypatch.setenv("FABT_DEFAULT_FUEL", "77")
    assert run(["run", loop], capsys)[1] == "timeout fuel=77\n"
    monkeypatch.setenv("FABT_DEFAULT_FUEL", "lots")
    assert run(["run", loop], capsys)[0] == 2


def test_run_source(files, capsys):
    code, out, _ = run(["run", files("a.src", "(\\b:Bool. b) false")], capsys)
    assert out == "value false steps=1\n"
    assert run(["run", files("x.txt", "unit")], capsys)[0] == 2


def test_erase_and_compile(files, capsys):
    src = files("a.src", "\\x:Unit. x")
    assert run(["erase", src], capsys)[1] == "\\x. x\n"
    code, out, _ = run(["compile", "--type", "Unit -> Unit", src], capsys)
    assert code == 0
    assert out == "(\\y1. \\x1. (\\x. x) (y1 ((\\y. y; unit) x1))) (\\x. x)\n"
    assert run(["compile", "--type", "Bool", src], capsys)[0] == 2


def test_compile_modular(files, capsys):
    src = files("m.src", "\\a:Unit. x2 a")
    code, out, _ = run(["compile", "--modular", "--free", "x2:Unit -> Bool", "--type", "Unit -> Bool", src], capsys)
    assert code == 0 and "x2" in out
    assert run(["compile", "--modular", src], capsys)[0] == 2


def test_link(files, capsys):
    a, b = files("a.src", "\\a:Unit. x2 a"), files("b.src", "\\b:Unit. true")
    code, out, _ = run(["link", "--lang", "src", a, b, "--type1", "Unit -> Bool", "--type2", "Unit -> Bool"], capsys)
    assert code == 0 and out.startswith("(fix [Unit ->")
    ta, tb = files("a.tgt", "\\a. x2 a"), files("b.tgt", "\\b. true")
    code, out, _ = run(["link", ta, tb], capsys)
    assert code == 0 and "x2" in out
    linked = files("l.tgt", f"(\\p. (fst p) unit) ({out.strip()})")
    assert run(["run", linked], capsys)[1].startswith("value true")


def test_plug_and_backtranslate(files, capsys):
    ctx = files("c.tgt", "HOLE true")
    term = files("t.tgt", "\\x. x")
    assert run(["plug", ctx, term], capsys)[1] == "(\\x. x) true\n"
    code, out, _ = run(["backtranslate", ctx, "--type", "Unit -> Unit", "--depth", "1"], capsys)
    assert code == 0 and "HOLE" in out
    assert run(["backtranslate", term, "--type", "Unit", "--depth", "1"], capsys)[0] == 2


def test_equiv_writes_report(files, capsys, tmp_path):
    a = files("a.tgt", "(\\y1. \\x1. (\\x. x) (y1 ((\\y. y; unit) x1))) (\\x. x)")
    b = files("b.tgt", "(\\y1. \\x1. (\\x. x) (y1 ((\\y. y; unit) x1))) (\\x. unit)")
    report = tmp_path / "r.txt"
    fig = tmp_path / "r.png"
    argv = ["equiv", a, b, "--seed", "7", "--count", "500", "--exhaustive-size", "4",
            "--samples", "20", "--report", str(report), "--figure", str(fig)]
    code, out, _ = run(argv, capsys)
    assert code == 0
    assert out.startswith("summary total=") and "verdict=agree" in out
    lines = report.read_text().splitlines()
    assert lines[0].startswith("# equiv ")
    assert lines[1] == 'case=0 ctx="HOLE" obs1=terminates:1 obs2=terminates:1 verdict=agree'
    assert lines[-1].startswith("summary ")
    assert fig.stat().st_size > 1000
    first = report.read_text()
    assert run(argv, capsys)[0] == 0
    assert report.read_text() == first


def test_equiv_disagree_exit_1(files, capsys):
    a, b = files("a.tgt", "\\x. x"), files("b.tgt", "\\x. unit")
    code, out, _ = run(["equiv", a, b, "--exhaustive-size", "2", "--samples", "5", "--count", "5"], capsys)
    assert code == 1
    assert "witness ctx=\"HOLE true\"" in out
    assert "cmp=value:true,unit" in out


def test_equiv_json(files, capsys):
    a, b = files("a.tgt", "\\x. x"), files("b.tgt", "\\x. x")
    code, out, _ = run(["equiv", a, b, "--exhaustive-size", "2", "--samples", "5", "--count", "5",
                        "--emit", "json"], capsys)
    data = json.loads(out)
    assert code == 0 and data["verdict"]["tag"] == "agree"
    assert data["summary"]["total"] == len(data["records"])


def test_search(files, capsys):
    t, f = files("t.src", "true"), files("f.src", "false")
    code, out, _ = run(["search", t, f, "--type", "Bool"], capsys)
    assert code == 0 and out.startswith("witness ")
    a, b = files("a.src", "\\x:Unit. x"), files("b.src", "\\x:Unit. unit")
    assert run(["search", a, b, "--type", "Unit -> Unit", "--budget", "200"], capsys)[:2] == (1, "not-found\n")


def test_check_backtrans(files, capsys, tmp_path):
    ctx, term = files("c.tgt", "HOLE true"), files("t.src", "\\x:Unit. x")
    code, out, _ = run(["check-backtrans", ctx, term, "--type", "Unit -> Unit", "--depths", "1,2"], capsys)
    assert code == 0 and "precise=vacuous" in out and "imprecise=pass" in out
    fig = tmp_path / "bt.png"
    code, out, _ = run(["check-backtrans", "--random", "8", "--figure", str(fig)], capsys)
    assert code == 0 and "summary total=8" in out and fig.exists()


def test_check_modularity(files, capsys):
    a, b = files("a.src", "\\a:Unit. x2 a"), files("b.src", "\\b:Unit. true")
    code, out, _ = run(["check-modularity", a, b, "--type1", "Unit -> Bool", "--type2", "Unit -> Bool",
                        "--exhaustive-size", "3", "--samples", "10", "--count", "10"], capsys)
    assert code == 0 and "verdict=agree" in out.splitlines()[-1]


def test_uval(files, capsys):
    assert run(["uval", "type", "--n", "0"], capsys)[1] == "Unit\n"
    code, out, _ = run(["uval", "inject", "--n", "1", "--type", "Bool"], capsys)
    assert out == "\\x:Bool. inr inr inl x\n"
    assert run(["uval", "downgrade", "--n", "0", "--d", "1"], capsys)[0] == 0
    code, _, err = run(["uval", "type", "--n", "9"], capsys)
    assert code == 2 and "too large" in err
    assert run(["uval", "emulate", files("e.tgt", "true"), "--n", "1"], capsys)[0] == 0
    assert run(["uval", "extract", "--n", "1"], capsys)[0] == 2
