import csv
import json
import math

import numpy as np
import pytest

from conftest import TABLE_SETS
from nhcage import cli, io
from nhcage.params import make_ep2n_params, params_to_dict
from nhcage.spectra import dispersion


def write_config(tmp_path, p, name="cfg.json", **extra):
    d = params_to_dict(p)
    d.update(extra)
    path = tmp_path / name
    path.write_text(json.dumps(d))
    return str(path)


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


@pytest.mark.parametrize("name", list(TABLE_SETS))
def test_classify_table_sets(tmp_path, capsys, name):
    code, report = run(capsys, "classify", "--config", write_config(tmp_path, TABLE_SETS[name]))
    assert code == 0
    assert report["class"] == name
    assert report["flat_band"]["is_cage"]
    assert report["local_range"] == {"EP4": 4, "EP2_second": 4, "EP2_first": 2, "DP2": 2}[name]


def test_classify_nchain(tmp_path, capsys):
    cfg = write_config(tmp_path, make_ep2n_params(3, 2.0, math.pi / 3))
    code, report = run(capsys, "classify", "--config", cfg)
    assert code == 0
    assert report["class"] == "EP2N"
    assert report["minimal_poly"]["degree"] == 6
    assert report["local_range"] == 6


def test_classify_degrees_flag(tmp_path, capsys):
    path = tmp_path / "deg.json"
    path.write_text(json.dumps({"j": 2, "t": 2, "t1": 2, "t2": 2,
                                "theta1": 60, "theta2": -60}))
    code, report = run(capsys, "classify", "--config", path, "--degrees")
    assert code == 0 and report["class"] == "EP4"


def test_malformed_and_unknown_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert run(capsys, "classify", "--config", bad)[0] == 1
    typo = tmp_path / "typo.json"
    typo.write_text(json.dumps({"j": 1, "t": 1, "t1": 1, "t2": 1, "theta1": 0,
                                "theta2": 0, "tehta1": 0}))
    assert run(capsys, "classify", "--config", typo)[0] == 1
    assert run(capsys, "classify", "--config", tmp_path / "missing.json")[0] == 1


def test_classify_inconsistency_exit_code(tmp_path, capsys, monkeypatch):
    from nhcage import spectra
    from nhcage.errors import ConsistencyError

    def boom(p, tol=1e-9):
        raise ConsistencyError("disagree", {"table": spectra.Kind.EP4, "minimal_polynomial": None})

    monkeypatch.setattr(spectra, "classify", boom)
    code, report = run(capsys, "classify", "--config", write_config(tmp_path, TABLE_SETS["EP4"]))
    assert code == 3
    assert report["verdicts"]["table"] == "EP4"


def test_bands_ep4(tmp_path, capsys):
    out = tmp_path / "bands.csv"
    code, _ = run(capsys, "bands", "--config", write_config(tmp_path, TABLE_SETS["EP4"]),
                  "--n-points", 101, "--out", out)
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["k", "E1_re", "E1_im", "E2_re", "E2_im", "E3_re", "E3_im", "E4_re", "E4_im"]
    vals = np.array(rows[1:], dtype=float)
    assert vals.shape == (101, 9)
    assert np.abs(vals[:, 1:]).max() < 1e-10


def test_bands_broken_cage_depends_on_k(tmp_path, capsys):
    out = tmp_path / "bands.csv"
    p = TABLE_SETS["EP4"].with_(j=3.0)
    assert run(capsys, "bands", "--config", write_config(tmp_path, p), "--out", out)[0] == 0
    vals = np.array(read_csv(out)[1:], dtype=float)
    assert np.ptp(vals[:, 1:], axis=0).max() > 0.1


def test_bands_n_points_one(tmp_path, capsys):
    cfg = write_config(tmp_path, TABLE_SETS["EP4"])
    assert run(capsys, "bands", "--config", cfg, "--n-points", 1,
               "--out", tmp_path / "x.csv")[0] == 1


def test_bands_io_failure(tmp_path, capsys):
    cfg = write_config(tmp_path, TABLE_SETS["EP4"])
    code, _ = run(capsys, "bands", "--config", cfg, "--out", tmp_path / "no" / "x.csv")
    assert code == 2
    assert not (tmp_path / "no").exists()


def test_csv_round_trip_precision(tmp_path):
    grid = dispersion(TABLE_SETS["DP2"], [0.1, 1 / 3])
    out = tmp_path / "b.csv"
    io.write_bands_csv(out, grid)
    rows = read_csv(out)
    assert float(rows[2][0]) == 1 / 3
    assert float(rows[1][2]) == grid.bands[0][0].imag


def test_evolve_ep2_first(tmp_path, capsys):
    out = tmp_path / "trace.csv"
    code, report = run(capsys, "evolve", "--config",
                       write_config(tmp_path, TABLE_SETS["EP2_first"]), "--out", out)
    assert code == 0
    assert report["confined"] is True
    assert report["occupied_sites"] == 4
    rows = read_csv(out)
    assert rows[0] == ["time", "chain", "cell", "intensity"]
    assert len(rows) == 1 + 201 * 64 * 2


def test_evolve_dp_exponential(tmp_path, capsys):
    code, report = run(capsys, "evolve", "--config", write_config(tmp_path, TABLE_SETS["DP2"]),
                       "--out", tmp_path / "t.csv")
    assert code == 0
    assert report["confined"] is True
    assert report["growth"]["kind"] == "exponential"


def test_evolve_broken_cage(tmp_path, capsys):
    cfg = write_config(tmp_path, TABLE_SETS["EP2_first"].with_(t=1.0), lattice={"cells": 24})
    code, report = run(capsys, "evolve", "--config", cfg, "--t-max", 2, "--steps", 40,
                       "--out", tmp_path / "t.csv")
    assert code == 0
    assert report["confined"] is False


def test_evolve_bad_site(tmp_path, capsys):
    cfg = write_config(tmp_path, TABLE_SETS["DP2"])
    assert run(capsys, "evolve", "--config", cfg, "--site", "3,1",
               "--out", tmp_path / "t.csv")[0] == 1
    assert run(capsys, "evolve", "--config", cfg, "--site", "x",
               "--out", tmp_path / "t.csv")[0] == 1


def test_evolve_inconclusive(tmp_path, capsys):
    cfg = write_config(tmp_path, TABLE_SETS["EP2_first"], lattice={"cells": 3})
    assert run(capsys, "evolve", "--config", cfg, "--site", "1,1",
               "--out", tmp_path / "t.csv")[0] == 4


def test_bad_lattice_block(tmp_path, capsys):
    cfg = write_config(tmp_path, TABLE_SETS["DP2"], lattice={"cells": 8, "size": 3})
    assert run(capsys, "classify", "--config", cfg)[0] == 1


@pytest.mark.parametrize("name, expected", [
    ("EP4", 0.25), ("DP2", 1.0), ("EP2_first", 0.5), ("EP2_second", 0.5)])
def test_scaling(tmp_path, capsys, name, expected):
    code, report = run(capsys, "scaling", "--config", write_config(tmp_path, TABLE_SETS[name]))
    assert code == 0
    assert report["exponent"] == pytest.approx(expected, abs=0.05)
    assert len(report["responses"]) == 9


def test_scaling_errors(tmp_path, capsys):
    cfg = write_config(tmp_path, TABLE_SETS["EP4"])
    assert run(capsys, "scaling", "--config", cfg, "--delta-min", 1e-3,
               "--delta-max", 1e-4)[0] == 1
    assert run(capsys, "scaling", "--config", cfg, "--delta-min", 1e-40,
               "--delta-max", 1e-39)[0] == 5


def test_phase_diagram(tmp_path, capsys):
    out = tmp_path / "pd.csv"
    code, report = run(capsys, "phase-diagram", "--t1", 2, "--grid-n", 64, "--out", out)
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["theta1", "theta2", "t2", "class", "flagged"]
    assert len(rows) == 1 + 64 * 64
    by_angle = {(round(float(r[0]), 12), round(float(r[1]), 12)): r[3] for r in rows[1:]}
    grid = np.round(-math.pi + 2 * math.pi * np.arange(1, 65) / 64, 12)
    for th2 in grid:
        if min(abs(th2), abs(abs(th2) - round(math.pi, 12))) < 1e-9 or abs(math.cos(th2)) < 1e-9:
            continue
        assert by_angle[(0.0, th2)] == "DP2"
    for th1 in grid:
        if abs(math.sin(th1)) > 1e-9 and abs(math.cos(th1)) > 1e-9:
            assert by_angle[(th1, round(-th1, 12))] == "EP4"
    assert report["counts"]["EP2_second"] > report["counts"]["EP4"]


def test_phase_diagram_grid_too_small(tmp_path, capsys):
    assert run(capsys, "phase-diagram", "--grid-n", 4, "--out", tmp_path / "p.csv")[0] == 1


def test_wilson(tmp_path, capsys):
    p = TABLE_SETS["EP2_second"].with_(j=1.3, eta_a=0.4)
    code, report = run(capsys, "wilson", "--config", write_config(tmp_path, p))
    assert code == 0
    assert report["max_gauge_deviation"] < 1e-10
    assert report["trials"] == 100


def test_wilson_deterministic(tmp_path, capsys):
    cfg = write_config(tmp_path, TABLE_SETS["EP2_second"].with_(j=1.3))
    a = run(capsys, "wilson", "--config", cfg, "--seed", 4)[1]
    b = run(capsys, "wilson", "--config", cfg, "--seed", 4)[1]
    assert a == b


def test_wilson_zero_phases_real(tmp_path, capsys):
    p = TABLE_SETS["EP2_first"].with_(j=1.5)
    report = run(capsys, "wilson", "--config", write_config(tmp_path, p))[1]
    assert report["wilson_loop"]["im"] == 0.0


def test_wilson_errors(tmp_path, capsys):
    cfg = write_config(tmp_path, TABLE_SETS["DP2"])
    assert run(capsys, "wilson", "--config", cfg, "--trials", 0)[0] == 1
    zero = write_config(tmp_path, TABLE_SETS["DP2"].with_(t2=0.0), name="z.json")
    assert run(capsys, "wilson", "--config", zero)[0] == 1


def test_nchain_rejected_for_ladder_commands(tmp_path, capsys):
    cfg = write_config(tmp_path, make_ep2n_params(3, 2.0, 1.0))
    assert run(capsys, "bands", "--config", cfg, "--out", tmp_path / "b.csv")[0] == 1
