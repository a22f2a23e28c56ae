import csv
import json

import jsonschema
import pytest

from divbounds import catalog
from divbounds.cli import main

_INT = {"anyOf": [{"type": "integer"}, {"type": "string", "pattern": "^-?[0-9]+$"}]}
_NG = {
    "type": "object",
    "required": ["n", "gap"],
    "properties": {"n": _INT, "gap": _INT},
    "additionalProperties": False,
}
REPORT_SCHEMA = {
    "type": "object",
    "required": [
        "inequality", "from", "to", "violations", "equality_count", "equality_sample",
        "equality_class_observed", "min_positive_gap", "rows_checked", "checksum",
        "elapsed_ms", "generated_at",
    ],
    "properties": {
        "inequality": {"enum": list(catalog.IDS)},
        "from": _INT,
        "to": _INT,
        "violations": {"type": "array", "items": _NG},
        "equality_count": {"type": "integer", "minimum": 0},
        "equality_sample": {"type": "array", "items": _INT},
        "equality_class_observed": {"enum": ["PRIMES", "PRIME_POWERS", "OTHER"]},
        "equality_class_mismatches": {"type": "array", "items": _INT},
        "min_positive_gap": {"anyOf": [{"type": "null"}, _NG]},
        "rows_checked": {"type": "integer", "minimum": 0},
        "checksum": {"type": "string", "pattern": "^[0-9a-f]{16}$"},
        "elapsed_ms": {"type": "number", "minimum": 0},
        "generated_at": {"type": "string"},
    },
}

VOLATILE = ("elapsed_ms", "generated_at")


def run(capsys, *argv):
    """Exit code and captured output, whether main returns or argparse exits."""
    try:
        code = main([str(a) for a in argv])
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def stable(doc):
    return {k: v for k, v in doc.items() if k not in VOLATILE}


def test_eval_12(capsys):
    code, out, _ = run(capsys, "eval", 12)
    assert code == 0
    assert "phi=4 psi=24 sigma=28 phi*=6 sigma*=20 omega=3" in out
    assert "factorization=2^2 * 3" in out


def test_eval_1(capsys):
    code, out, _ = run(capsys, "eval", 1)
    assert code == 0
    assert "phi=1 psi=1 sigma=1 phi*=1 sigma*=1 omega=0" in out


@pytest.mark.parametrize("arg", ["0", "-5", "12x", "", "1e3"])
def test_eval_rejects_bad_input(capsys, arg):
    assert run(capsys, "eval", arg)[0] == 3


def test_eval_big_prime_with_gap(capsys):
    m = 2**61 - 1
    code, out, _ = run(capsys, "eval", m, "--ineq", "T1")
    assert code == 0
    assert f"phi={m - 1} psi={m + 1} sigma={m + 1}" in out
    line = next(l for l in out.splitlines() if l.startswith("T1 "))
    assert line == f"T1 lhs={3 * m**3 + 3 * m**2 + 9 * m + 1} rhs={3 * m**3 + 3 * m**2 + 9 * m + 1} gap=0"


def test_eval_json(capsys):
    code, out, _ = run(capsys, "eval", 2**89 - 1, "--ineq", "T5", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["probabilistic"] is True
    assert doc["gaps"] == [{"inequality": "T5", "lhs": doc["gaps"][0]["rhs"], "rhs": doc["gaps"][0]["rhs"], "gap": "0"}]
    assert int(doc["psi"]) == 2**89


def test_eval_ineq_below_domain(capsys):
    assert run(capsys, "eval", 1, "--ineq", "T1")[0] == 3


def test_usage_errors(capsys):
    assert run(capsys, "verify", "--ineq", "T1", "--from", 1, "--to", 10)[0] == 3
    assert run(capsys, "verify", "--ineq", "T9", "--from", 2, "--to", 10)[0] == 3
    assert run(capsys, "verify", "--ineq", "T1", "--from", 20, "--to", 10)[0] == 3
    assert run(capsys, "verify", "--ineq", "T1,T2", "--from", 2, "--to", 10, "--csv", "x.csv")[0] == 3
    assert run(capsys, "certify", "--theorem", "T9")[0] == 3
    assert run(capsys, "frobnicate")[0] == 3
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 3


def test_io_error(capsys, tmp_path):
    target = tmp_path / "missing" / "report.json"
    code, _, err = run(capsys, "verify", "--ineq", "T1", "--from", 2, "--to", 100, "--report", target)
    assert code == 4 and "I/O error" in err


def test_verify_all_to_10000(capsys):
    code, out, _ = run(capsys, "verify", "--ineq", "all", "--from", 2, "--to", 10000)
    assert code == 0
    assert len(out.splitlines()) == 12
    assert all(" ok " in l for l in out.splitlines())


def test_report_schema_and_byte_identity(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "verify", "--ineq", "T5", "--from", 999000, "--to", 10**6, "--report", a)[0] == 0
    assert run(capsys, "verify", "--ineq", "T5", "--from", 999000, "--to", 10**6, "--report", b,
               "--threads", 3, "--chunk", 250)[0] == 0
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    jsonschema.validate(da, REPORT_SCHEMA)
    # T5 gaps near a million exceed 64 bits and must be strings
    assert isinstance(da["min_positive_gap"]["gap"], str)
    assert json.dumps(stable(da), sort_keys=True) == json.dumps(stable(db), sort_keys=True)


def test_report_array_for_several(capsys, tmp_path):
    path = tmp_path / "r.json"
    assert run(capsys, "verify", "--ineq", "L1", "--ineq", "S14a", "--from", 1, "--to", 1, "--report", path)[0] == 3
    assert run(capsys, "verify", "--ineq", "S14a,S14b", "--from", 1, "--to", 500, "--report", path)[0] == 0
    docs = json.loads(path.read_text())
    assert [d["inequality"] for d in docs] == ["S14a", "S14b"]
    for d in docs:
        jsonschema.validate(d, REPORT_SCHEMA)


def test_csv_export(capsys, tmp_path):
    path = tmp_path / "t2.csv"
    assert run(capsys, "verify", "--ineq", "T2", "--from", 2, "--to", 777, "--csv", path, "--chunk", 100)[0] == 0
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["n", "phi", "psi", "sigma", "phi_star", "sigma_star", "lhs", "rhs", "gap"]
    assert len(rows) - 1 == 777 - 2 + 1
    assert [int(r[0]) for r in rows[1:]] == list(range(2, 778))
    n12 = rows[12 - 1]
    assert n12[:6] == ["12", "4", "24", "28", "6", "20"]
    assert all(int(r[6]) - int(r[7]) == int(r[8]) >= 0 for r in rows[1:])


def test_journal_resume_matches_fresh_run(capsys, tmp_path):
    j, r1, r2 = tmp_path / "run.jsonl", tmp_path / "1.json", tmp_path / "2.json"
    args = ["verify", "--ineq", "T1", "--from", 2, "--to", 20000, "--chunk", 3000, "--journal", j]
    assert run(capsys, *args, "--report", r1)[0] == 0
    lines = j.read_text().splitlines()
    assert len(lines) == 7
    j.write_text("\n".join(lines[:3]) + "\n")
    assert run(capsys, *args, "--report", r2)[0] == 0
    assert len(j.read_text().splitlines()) == 7
    assert stable(json.loads(r1.read_text())) == stable(json.loads(r2.read_text()))


def test_verify_t1_equality_to_a_million(capsys, tmp_path):
    path = tmp_path / "t1.json"
    code, _, _ = run(capsys, "verify", "--ineq", "T1", "--from", 2, "--to", 10**6, "--report", path)
    assert code == 0
    assert json.loads(path.read_text())["equality_count"] == 78498


def test_extremes(capsys, tmp_path):
    code, out, _ = run(capsys, "extremes", "--ineq", "L2", "--from", 2, "--to", 100, "--top", 1)
    assert code == 0
    assert out.splitlines()[1].split() == ["4", "1"]
    code, out, _ = run(capsys, "extremes", "--ineq", "T1", "--from", 2, "--to", 3, "--top", 5)
    assert code == 0 and len(out.splitlines()) == 1
    path = tmp_path / "x.json"
    code, out, _ = run(capsys, "extremes", "--ineq", "S14a", "--from", 1, "--to", 50, "--top", 3, "--report", path)
    rows = [tuple(map(int, l.split())) for l in out.splitlines()[1:]]
    assert rows == [(4, 9), (9, 136), (8, 153)]
    assert json.loads(path.read_text())["extremes"] == [{"n": n, "gap": g} for n, g in rows]
    assert run(capsys, "extremes", "--ineq", "T1,T2", "--from", 2, "--to", 3)[0] == 3


def test_certify(capsys):
    code, out, _ = run(capsys, "certify")
    lines = out.splitlines()
    assert code == 0
    assert len(lines) == 31 and lines[-1] == "30/30 obligations certified"
    t1c3 = next(l for l in lines if l.startswith("T1-C3"))
    assert "shift=p->p+2" in t1c3 and "raw_negative=1" in t1c3
    code, out, _ = run(capsys, "certify", "--theorem", "T1")
    assert code == 0 and len(out.splitlines()) == 7


def test_certify_inconclusive_exit(capsys, monkeypatch):
    import dataclasses

    from divbounds import polycert
    from divbounds.poly import Poly

    real = polycert.obligations()
    # a false claim p > 3 for p >= 2 cannot be certified
    bad = dataclasses.replace(real[1], expression=Poly.var("p") - 3)
    monkeypatch.setattr(polycert, "obligations", lambda: [bad, *real[2:]])
    monkeypatch.setattr(polycert, "certify_all", lambda theorem=None: [polycert.certify(bad)])
    code, out, _ = run(capsys, "certify")
    assert code == 2 and "INCONCLUSIVE" in out
