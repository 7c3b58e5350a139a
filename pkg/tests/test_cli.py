import json
from fractions import Fraction

import numpy as np

from conftest import random_bounded_table
from f2reg import fileio
from f2reg.cli import main
from f2reg.families import majority, mean_of_signs, pkc_base
from f2reg.spectrum import FunctionTable, wht


def test_table_roundtrip_dyadic():
    t = random_bounded_table(6, 5)
    text = fileio.dump_table(t)
    back = fileio.load_table(text)
    assert back.n == t.n and back.den == t.den
    assert np.array_equal(back.nums, t.nums)
    assert fileio.dump_table(back) == text


def test_table_roundtrip_rational_and_float():
    t = mean_of_signs(6)
    back = fileio.load_table(fileio.dump_table(t))
    assert back.fractions() == t.fractions()
    rng = np.random.default_rng(1)
    tf = FunctionTable.from_floats(5, (rng.random(32) * 2 - 1).tolist())
    back = fileio.load_table(fileio.dump_table(tf))
    assert np.array_equal(back.nums, tf.nums)  # shortest-round-trip decimals


def test_spectrum_dump():
    text = fileio.dump_spectrum(wht(majority(3)))
    lines = text.strip().splitlines()
    assert lines[0] == "n=3 scalar=dyadic"
    assert "100 1/2^1" in lines and "111 -1/2^1" in lines


def test_certificate_roundtrip():
    from f2reg.f2core import AffineSubspace, rref
    from f2reg.restrict import affine_to_certificate

    cert = affine_to_certificate(AffineSubspace(rref(5, [0b10110, 0b01011]), 0b00001),
                                 Fraction(1, 3))
    back = fileio.load_certificate(fileio.dump_certificate(cert))
    assert back == cert


def test_cli_pipeline(tmp_path, capsys):
    maj = tmp_path / "maj3.tbl"
    rc = main(["family", "maj", "--n", "3", "--report", str(tmp_path / "fam.json")])
    out = capsys.readouterr().out
    maj.write_text(out)
    assert rc == 0
    rc = main(["spectrum", str(maj), "--delta", "1/4",
               "--report", str(tmp_path / "spec.json")])
    assert rc == 0
    spec_out = capsys.readouterr().out
    assert "111 -1/2^1" in spec_out
    rep = json.loads((tmp_path / "spec.json").read_text())
    assert rep["degree"] == 3 and rep["regular"] is False
    rc = main(["regularize", str(maj), "--algo", "exact", "--delta", "1/4",
               "--report", str(tmp_path / "reg.json")])
    assert rc == 0
    rep = json.loads((tmp_path / "reg.json").read_text())
    assert rep["codim"] == 2


def test_cli_paritykill_pkc(tmp_path, capsys):
    tbl = tmp_path / "pkc.tbl"
    tbl.write_text(fileio.dump_table(pkc_base()))
    rc = main(["paritykill", str(tbl)])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "2"


def test_cli_greedy_bound(tmp_path, capsys):
    t = random_bounded_table(8, 99)
    tbl = tmp_path / "t.tbl"
    tbl.write_text(fileio.dump_table(t))
    rc = main(["regularize", str(tbl), "--algo", "greedy", "--delta", "1/4",
               "--report", str(tmp_path / "g.json")])
    assert rc == 0
    cert_text = capsys.readouterr().out
    cert = fileio.load_certificate(cert_text)
    assert cert.codim <= 4
    rep = json.loads((tmp_path / "g.json").read_text())
    assert rep["codim"] == cert.codim


def test_cli_verify_and_exit_codes(tmp_path, capsys):
    rc = main(["verify", "degree-one-lb", "--n", "4", "--delta", "1/5",
               "--max-codim", "1", "--report", str(tmp_path / "v.json")])
    assert rc == 0
    rep = json.loads((tmp_path / "v.json").read_text())
    assert rep["holds"] is True
    # cap exceeded -> exit 3
    big = tmp_path / "big.tbl"
    big.write_text(fileio.dump_table(random_bounded_table(8, 4)))
    rc = main(["regularize", str(big), "--algo", "exact", "--delta", "1/4"])
    assert rc == 3
    capsys.readouterr()
    # usage error -> exit 2
    rc = main(["regularize", str(big), "--algo", "degree-d", "--delta", "1/4"])
    assert rc == 2
    capsys.readouterr()


def test_cli_reports_are_byte_identical(tmp_path, capsys):
    tbl = tmp_path / "m.tbl"
    tbl.write_text(fileio.dump_table(majority(3)))
    for name in ("a.json", "b.json"):
        rc = main(["spectrum", str(tbl), "--delta", "1/4",
                   "--report", str(tmp_path / name)])
        assert rc == 0
        capsys.readouterr()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_cli_report_renderer(tmp_path, capsys):
    p = tmp_path / "r.json"
    p.write_text(json.dumps({"claim": "x", "holds": True}))
    rc = main(["report", str(p)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "claim: x" in out and "holds: True" in out
