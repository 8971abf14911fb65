import json
from pathlib import Path

import numpy as np
import pytest

from rwscenery.cli import (
    EXIT_CONTRACT,
    EXIT_INCONCLUSIVE,
    EXIT_REGIME,
    EXIT_SINGULAR,
    EXIT_USAGE,
    main,
)
from rwscenery.measures import scenery_measure_from_dict, step_measure_from_dict
from rwscenery.record import CylinderVector, cylinder_vector, empirical_cylinders
from rwscenery.reconstruct import symmetrize

import oracles

GOLDEN = Path(__file__).parent / "golden"
COMBOS = json.loads((GOLDEN / "combos.json").read_text())
PAIRS = [(m, l) for m in COMBOS["mu"] for l in COMBOS["lambda"]]
SYMMETRIC = {"iid55", "iid442"}

MU73 = json.dumps(COMBOS["mu"]["iid73"])


def forward(tmp_path, mu, lam, depth):
    out = tmp_path / "fwd"
    code = main(["forward", "--mu", json.dumps(mu), "--lambda", json.dumps(lam),
                 "--depth", str(depth), "--out", str(out)])
    assert code == 0
    return out / "rho.csv"


def test_order_prints_words(capsys):
    assert main(["order", "--depth", "2"]) == 0
    assert capsys.readouterr().out.split() == ["0", "1", "00", "11", "01", "10"]


def test_forward_alternating_scenery(tmp_path):
    path = forward(tmp_path, COMBOS["mu"]["iid73"], {"kind": "periodic", "word": "01"}, 2)
    rows = dict(line.split(",", 1) for line in path.read_text().splitlines()[1:])
    assert rows["00"] == "2,0.0"


@pytest.mark.parametrize("m, l", PAIRS)
def test_golden_forward_files(tmp_path, m, l):
    golden = GOLDEN / f"forward_{m}_{l}_n4.csv"
    produced = forward(tmp_path, COMBOS["mu"][m], COMBOS["lambda"][l], 4)
    assert produced.read_text() == golden.read_text()
    # the pinned numbers themselves are checked against brute-force enumeration
    mu = step_measure_from_dict(COMBOS["mu"][m])
    lam = scenery_measure_from_dict(COMBOS["lambda"][l])
    pinned = CylinderVector.from_csv(golden.read_text())
    for w in pinned.order:
        assert pinned[w] == pytest.approx(oracles.record_prob(mu, lam, w), abs=1e-14)


@pytest.mark.parametrize("m, l", PAIRS)
def test_forward_reconstruct_round_trip(tmp_path, m, l):
    rho = forward(tmp_path, COMBOS["mu"][m], COMBOS["lambda"][l], 6)
    out = tmp_path / "rec"
    code = main(["reconstruct", "--mu", json.dumps(COMBOS["mu"][m]), "--rho", str(rho), "--out", str(out)])
    assert code == 0
    meta = json.loads((out / "reconstruct.json").read_text())
    assert meta["mode"] == ("symmetric" if m in SYMMETRIC else "asymmetric")
    assert meta["residual"] <= 1e-10
    got = CylinderVector.from_csv((out / "scenery.csv").read_text())
    want = cylinder_vector(scenery_measure_from_dict(COMBOS["lambda"][l]), 6)
    if m in SYMMETRIC:
        want = symmetrize(want)
    assert np.max(np.abs(got.values - want.values)) <= 1e-10


def test_distinguish_chiral_pair(tmp_path):
    assert main(["distinguish", "--mu", MU73, "--x", "001011", "--y", "110100", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "verdict.json").read_text())["relation"] == "distinguishable"


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "forward", "mu": COMBOS["mu"]["iid73"],
                               "scenery": "001", "depth": 5}))
    assert main(["--config", str(cfg), "--depth", "2", "--out", str(tmp_path)]) == 0
    assert len((tmp_path / "rho.csv").read_text().splitlines()) == 1 + 6


def test_matrix_outputs(tmp_path):
    mu = json.dumps(COMBOS["mu"]["iid622"])
    assert main(["matrix", "--mu", mu, "--depth", "3", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "structure.json").read_text())
    assert report["ok"] and report["holding_reference"]
    blocks = json.loads((tmp_path / "blocks.json").read_text())
    assert blocks["size"] == 14
    assert (tmp_path / "matrix.csv").read_text().startswith("row,col,value\n")


def test_simulate_then_estimate(tmp_path):
    args = ["--mu", MU73, "--scenery", "001011", "--length", "2000", "--seed", "3", "--out"]
    assert main(["simulate", *args, str(tmp_path / "a")]) == 0
    record = tmp_path / "a" / "record.txt"
    assert main(["estimate", "--record", str(record), "--depth", "3", "--out", str(tmp_path / "b")]) == 0
    est = CylinderVector.from_csv((tmp_path / "b" / "empirical.csv").read_text())
    colours = record.read_text()
    assert len(colours) == 2001 and colours.endswith("\n")
    assert np.array_equal(est.values, empirical_cylinders(colours.strip(), 3).values)


def test_byte_identical_reruns(tmp_path):
    args = ["--mu", MU73, "--scenery", "001011", "--length", "5000", "--seed", "7", "--depth", "4"]
    for name in ("a", "b"):
        assert main(["estimate", *args, "--threads", "4" if name == "b" else "1", "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a" / "empirical.csv").read_bytes() == (tmp_path / "b" / "empirical.csv").read_bytes()


@pytest.mark.parametrize(
    "argv, code",
    [
        (["forward", "--scenery", "01"], EXIT_USAGE),
        (["forward", "--mu", "{bad", "--scenery", "01"], EXIT_USAGE),
        (["--config", "/nonexistent.json"], EXIT_USAGE),
        (["forward", "--mu", MU73, "--scenery", "01", "--depth", "0"], EXIT_USAGE),
        (["forward", "--mu", '{"kind": "iid", "pR": 0.7, "pL": 0.7}', "--scenery", "01"], EXIT_CONTRACT),
        (["distinguish", "--mu", MU73, "--x", "0011", "--y", "0101", "--depth", "1"], EXIT_INCONCLUSIVE),
        (
            ["distinguish", "--mu", '{"kind": "markov", "transition": {"RR": 0, "RL": 1, "LL": 0, "LR": 1}}',
             "--x", "01", "--y", "001", "--depth", "3"],
            EXIT_REGIME,
        ),
    ],
)
def test_exit_codes(tmp_path, argv, code):
    assert main([*argv, "--out", str(tmp_path)]) == code


def test_singular_exit(tmp_path):
    rho = forward(tmp_path, COMBOS["mu"]["iid55"], COMBOS["lambda"]["p0001"], 3)
    argv = ["reconstruct", "--mu", json.dumps(COMBOS["mu"]["iid55"]), "--rho", str(rho),
            "--mode", "asymmetric", "--out", str(tmp_path)]
    assert main(argv) == EXIT_SINGULAR
