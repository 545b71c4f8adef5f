import json

import numpy as np
import pytest

import circleflow as cf
from circleflow.cli import main


@pytest.fixture
def files(tmp_path):
    cf.save_family(cf.normal_family(horizon=2.0), tmp_path / "normal.json")
    cf.save_family(cf.zero_family(), tmp_path / "zero.json")
    bad = cf.GeneratingFamily([0, 1], [0, 0],
                              [cf.CircleMeasure.dirac(0.0, -1.0)])
    cf.save_family(bad, tmp_path / "bad.json")
    (tmp_path / "garbage.json").write_text("not json")
    return tmp_path


def test_validate_exit_codes(files, capsys):
    assert main(["validate", str(files / "zero.json")]) == 0
    assert capsys.readouterr().out == ""
    assert main(["validate", str(files / "bad.json")]) == 1
    assert "negative" in capsys.readouterr().out
    assert main(["validate", str(files / "garbage.json")]) == 2


def test_invalid_family_rejected_by_loader(files, capsys):
    assert main(["moments", str(files / "bad.json"), "--law", "classical",
                 "--orders", "1", "--times", "0.5"]) == 1


def test_moments_classical_value(files, capsys):
    rc = main(["moments", str(files / "normal.json"), "--law", "classical",
               "--orders", "1", "--times", "2"])
    out = capsys.readouterr().out.splitlines()
    assert rc == 0
    assert out[0] == "s,t,n,re,im"
    assert out[1] == "0.0,2.0,1,0.36787944117144233,0.0"


def test_map_outputs_circle_image(files, capsys):
    rc = main(["map", str(files / "normal.json"), "--law", "boolean",
               "--time", "1", "--points", "8"])
    out = capsys.readouterr().out.splitlines()
    assert rc == 0
    assert out[0] == "theta,re,im"
    assert len(out) == 9
    first = [float(x) for x in out[1].split(",")]
    assert first[1] == pytest.approx(0.5 * np.exp(-1.5), abs=1e-9)


def test_solve_extract_roundtrip_files(files, capsys, tmp_path):
    chain_path = str(tmp_path / "chain.json")
    back_path = str(tmp_path / "back.json")
    assert main(["solve", str(files / "normal.json"), "--knots", "16",
                 "--order", "16", "-o", chain_path]) == 0
    assert main(["extract", chain_path, "-o", back_path]) == 0
    diag = json.loads(capsys.readouterr().out)
    assert set(diag) == {"min_eigenvalue", "max_adjustment",
                         "clipped_intervals", "residual"}
    back = cf.load_family(back_path)
    assert back.validate() == []
    assert back.sigma_at(2.0).total_mass == pytest.approx(1.0, abs=1e-2)


def test_solve_is_byte_stable(files, tmp_path):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    main(["solve", str(files / "normal.json"), "--knots", "8",
          "--order", "8", "-o", a])
    main(["solve", str(files / "normal.json"), "--knots", "8",
          "--order", "8", "-o", b])
    assert open(a, "rb").read() == open(b, "rb").read()


def test_extract_malformed_chain(files, tmp_path, capsys):
    assert main(["extract", str(files / "garbage.json"),
                 "-o", str(tmp_path / "x.json")]) == 2


def test_subordinate_with_verify(files, tmp_path, capsys):
    out = str(tmp_path / "ring.json")
    rc = main(["subordinate", str(files / "zero.json"), "-o", out, "--verify"])
    assert rc == 0
    blocks = capsys.readouterr().out.split("}\n{")
    report = json.loads("{" + blocks[1]) if len(blocks) > 1 else None
    assert report["sup_discrepancy"] <= 1e-12
    ring = cf.load_family(out)
    assert ring.validate() == []


def test_compare_tolerance_exit(files, capsys):
    assert main(["compare", str(files / "normal.json"),
                 str(files / "normal.json"), "--law", "classical",
                 "--tol", "1e-10"]) == 0
    capsys.readouterr()
    other = str(files / "zero.json")
    assert main(["compare", str(files / "normal.json"), other,
                 "--tol", "1e-6"]) == 1


def test_roundtrip_command(files, capsys):
    rc = main(["roundtrip", str(files / "zero.json"), "--knots", "4",
               "--order", "8"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "round-trip distance: 0.0" in out
