import json

import pytest

from lnmodel.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


@pytest.mark.parametrize(
    "argv, code",
    [
        (["fulfill", "--formula", "forall x. !(0 = S(x))", "--segments", "2,5,26"], 0),
        (["fulfill", "--formula", "exists x. !(x = x)", "--segments", "2,5,26"], 1),
        (["fulfill", "--formula", "x = x", "--segments", "2,5,26", "--assign", "x=20"], 3),
        (["fulfill", "--formula", "x = ", "--segments", "2,5,26"], 2),
        (["fulfill", "--formula", "0 = 0", "--segments", "2,4"], 2),
        (["fulfill", "--formula", "0 = 0"], 2),
        (["qcheck", "--segments", "2,5,26"], 0),
        (["qcheck", "--segments", "2,5,26,677"], 0),
        (["qcheck", "--segments", "2,4"], 2),
        (["ph", "--e", "1", "--k", "2", "--r", "2"], 0),
        (["ph", "--e", "2", "--k", "4", "--cap", "1000"], 4),
        (["bcp"], 4),
        (["bcp", "--N", "8", "--k", "5", "--m", "1"], 0),
    ],
)
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_probe_messages(capsys):
    sig = '{"relations": [["P", 1]], "constants": ["c"]}'
    code, out = run(capsys, "probe", "--sig", sig, "--formula", "forall x. x = x", "--n", "3", "--universe", "2")
    assert code == 0 and "no defined-False verdict" in out.out
    code, out = run(capsys, "probe", "--sig", sig, "--formula", "P(c) & !P(c)", "--n", "3", "--universe", "2")
    assert code == 0 and "no fulfilling chain" in out.out
    code, _ = run(capsys, "probe", "--sig", sig, "--formula", "P(c)", "--universe", "9")
    assert code == 4


def test_ph_report(capsys, tmp_path):
    code, out = run(capsys, "ph", "--e", "1", "--k", "2", "--r", "2", "--out", str(tmp_path))
    assert code == 0 and ": 3" in out.out
    report = json.loads((tmp_path / "ph.json").read_text())
    assert report["result"] == {"N": 3}
    assert report["schema"] == 1


def test_ph_cache(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("FULFILLMENT_LAB_CACHE", str(tmp_path / "cache"))
    run(capsys, "ph", "--e", "1", "--k", "3", "--r", "2")
    assert len(list((tmp_path / "cache").iterdir())) == 1
    code, out = run(capsys, "ph", "--e", "1", "--k", "3", "--r", "2")
    assert code == 0 and ": 5" in out.out


def test_collapse_single(capsys, tmp_path):
    chain = tmp_path / "chain.json"
    chain.write_text(
        json.dumps(
            {
                "signature": {"relations": [["P", 1]], "constants": ["c"]},
                "levels": [{"domain": [0], "constants": {"c": 0}, "relations": {"P": [[0]]}}] * 3,
            }
        )
    )
    code, out = run(capsys, "collapse", "--sig", '{"relations": [["P", 1]], "constants": ["c"]}',
                    "--chain", str(chain), "--formula", "exists x. P(x)", "--out", str(tmp_path))
    assert code == 0
    report = json.loads((tmp_path / "collapse.json").read_text())
    assert report["result"]["universes"] == [[0], [0], [0]]
    code, _ = run(capsys, "collapse", "--segments", "2,5", "--formula", "forall x. x = x")
    assert code == 2


def test_enumerate(capsys, tmp_path):
    code, out = run(capsys, "enumerate", "--sig", '{"relations": [["P", 1]], "constants": ["c"]}',
                    "--n", "2", "--universe", "2", "--out", str(tmp_path))
    assert code == 0
    assert json.loads((tmp_path / "enumerate.json").read_text())["result"]["count"] == 20


def reports(tmp_path, argv, tag):
    out = tmp_path / tag
    assert main(argv + ["--out", str(out)]) == 0
    return (out / f"{argv[0]}.json").read_bytes()


def test_reports_are_byte_identical(tmp_path):
    suite = ["collapse", "--suite", "25", "--seed", "3"]
    one = reports(tmp_path, suite + ["--workers", "1"], "a")
    assert reports(tmp_path, suite + ["--workers", "1"], "b") == one
    assert reports(tmp_path, suite + ["--workers", "4"], "c") == one
    q = ["qcheck", "--segments", "2,5,26"]
    assert reports(tmp_path, q, "d") == reports(tmp_path, q, "e")
