from __future__ import annotations

import configparser
import hashlib
import io
import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from shearpks import GridSpec, SpectralField, save_checkpoint
from shearpks.cli import _config_from_ini, main

SPLIT_DEFAULT = 389255.89615038974
SPLIT_ALPHA4 = 194627.94807519487
SHARP_DEFAULT = 78697.89940597635


def _run(capsys, argv):
    code = main(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def _run_json(capsys, argv, expect=0):
    code, out, err = _run(capsys, argv)
    assert code == expect, err
    return json.loads(out)


# --- constants ---

def test_constants_default(capsys):
    payload = _run_json(capsys, ["constants"])
    assert payload["case"] == {"alpha": 1.0, "coupled": False}
    assert payload["mode"] == "split"
    assert payload["threshold"] == pytest.approx(SPLIT_DEFAULT, rel=1e-12)
    assert payload["report"]["threshold_split"] == payload["threshold"]
    assert payload["report"]["threshold_sharp"] < payload["threshold"]
    assert "required_split" not in payload


def test_constants_alpha_scaling(capsys):
    payload = _run_json(capsys, ["constants", "--alpha", "4"])
    assert payload["threshold"] == pytest.approx(SPLIT_ALPHA4, rel=1e-12)
    published = max(389256.0 / math.sqrt(4.0), 239197.0 / 4.0 ** 0.75)
    assert payload["threshold"] <= published
    assert payload["report"]["threshold_published"] == published


def test_constants_sharp_mode(capsys):
    payload = _run_json(capsys, ["constants", "--mode", "sharp"])
    assert payload["threshold"] == pytest.approx(SHARP_DEFAULT, rel=1e-12)


def test_constants_invalid_flat_exponent(capsys):
    code, out, err = _run(capsys, ["constants", "--alpha", "0",
                                   "--low-exp", "0.3"])
    assert code == 2
    assert "error:" in err and "low_exp" in err


def test_constants_published_conflict(capsys):
    code, out, err = _run(capsys, ["constants", "--published-defaults",
                                   "--high-exp", "0.95"])
    assert code == 2
    assert "--published-defaults conflicts with --high-exp" in err


def test_constants_audit_clean(capsys):
    payload = _run_json(capsys, ["constants", "--audit"])
    assert payload["audit"]["checks"] == 44
    assert payload["audit"]["failures"] == 0
    assert len(payload["audit"]["rows"]) == 44
    assert all(r["pass"] for r in payload["audit"]["rows"])


def test_constants_with_norms(capsys):
    payload = _run_json(capsys, ["constants", "--norm-density", "1"])
    size = payload["report"]["size"]
    assert size == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert payload["required_split"] == pytest.approx(
        payload["threshold"] * size ** 9, rel=1e-12)
    assert payload["required_sharp"] < payload["required_split"]
    assert payload["report"]["size_sup"] > 0


def test_constants_rejects_negative_norm(capsys):
    code, out, err = _run(capsys, ["constants", "--norm-mass", "-3"])
    assert code == 2
    assert "mass" in err


def test_constants_out_file(tmp_path, capsys):
    path = str(tmp_path / "report.json")
    code, out, err = _run(capsys, ["constants", "--out", path])
    assert code == 0
    with open(path) as fh:
        assert fh.read() == out


def test_constants_print_defaults(capsys):
    payload = _run_json(capsys, ["constants", "--print-defaults"])
    assert payload["mode"] == "split"
    assert payload["params"]["high_exp"] == 0.9


# --- oracle ---

def test_oracle_default_probe(capsys):
    payload = _run_json(capsys, ["oracle"])
    assert payload["status"] == "completed"
    assert payload["max_rel_error"] < 1e-12
    assert payload["k"] == 1 and payload["xi0"] == 0
    assert payload["samples"] == 501
    assert payload["final_abs"] == pytest.approx(payload["final_expected"],
                                                 rel=1e-12)


def test_oracle_sheared_probe(capsys):
    payload = _run_json(capsys, ["oracle", "--k", "2", "--xi0", "3",
                                 "--t", "2", "--steps", "200",
                                 "-A", "50"])
    assert payload["amplitude"] == 50.0
    assert payload["max_rel_error"] < 1e-11
    assert payload["grid"]["ny"] >= 4 * (3 + 2 * 2)


def test_oracle_rejects_bad_steps(capsys):
    code, out, err = _run(capsys, ["oracle", "--steps", "0"])
    assert code == 2
    assert "--steps must be >= 1" in err


def test_oracle_rejects_unresolvable_band(capsys):
    code, out, err = _run(capsys, ["oracle", "--t", "3000"])
    assert code == 2
    assert "resolvable band" in err


# --- solve ---

def _dicts_close(a, b):
    # printed defaults carry 15 significant digits, so compare floats loosely
    assert set(a) == set(b)
    for key in a:
        if isinstance(a[key], dict):
            _dicts_close(a[key], b[key])
        elif isinstance(a[key], float):
            assert a[key] == pytest.approx(b[key], rel=1e-13), key
        else:
            assert a[key] == b[key], key


def test_solve_print_defaults_round_trips(capsys):
    code, out, err = _run(capsys, ["solve", "--print-defaults"])
    assert code == 0
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.read_file(io.StringIO(out))
    from shearpks import SimConfig
    _dicts_close(_config_from_ini(cp).to_dict(),
                 SimConfig(amplitude=1.0).to_dict())


def _write(path, text):
    with open(path, "w") as fh:
        fh.write(text)
    return str(path)


ZERO_INI = """
[run]
amplitude = 10
dt = 0.01
t_end = 0.05
blowup_tail = 2.0

[grid]
nx = 32
ny = 32
lx = 6.283185307179586
ly = 6.283185307179586
"""


def test_solve_zero_initial(tmp_path, capsys):
    cfg = _write(tmp_path / "run.ini", ZERO_INI)
    payload = _run_json(capsys, ["solve", cfg, "--out",
                                 str(tmp_path / "out")])
    assert payload["status"] == "completed"
    assert payload["mass_initial"] == 0.0
    assert payload["mass_final"] == 0.0
    assert payload["linf_sup"] == 0.0
    for name in ("series.csv", "summary.json", "density.pksc", "config.json"):
        assert os.path.exists(os.path.join(str(tmp_path / "out"), name))


SUPERCRITICAL_INI = """
[run]
amplitude = 0
alpha = 0
rescaled = false
subtract_mean = true
dt = 0.004
t_end = 3.0

[grid]
nx = 64
ny = 64
lx = 12.566370614359172
ly = 12.566370614359172

[initial]
kind = bump
mass = 37.69911184307752

[output]
directory = out
"""


def test_solve_supercritical_exits_blowup(tmp_path, capsys):
    cfg = _write(tmp_path / "run.ini", SUPERCRITICAL_INI)
    code, out, err = _run(capsys, ["solve", cfg])
    assert code == 3
    payload = json.loads(out)
    assert payload["status"] == "blowup"
    assert payload["blowup_time"] is not None
    # [output] directory resolves relative to the config file
    assert os.path.exists(str(tmp_path / "out" / "series.csv"))


def _sha_tree(root):
    out = {}
    for base, _, names in os.walk(root):
        for name in names:
            p = os.path.join(base, name)
            with open(p, "rb") as fh:
                out[os.path.relpath(p, root)] = hashlib.sha256(
                    fh.read()).hexdigest()
    return out


def test_solve_rerun_is_byte_identical(tmp_path, capsys):
    cfg = _write(tmp_path / "run.ini", ZERO_INI.replace(
        "[run]", "[run]\ntrack_modes = 1,0 2,-3"))
    outs = []
    trees = []
    for name in ("a", "b"):
        code, out, err = _run(capsys, ["solve", cfg, "--out",
                                       str(tmp_path / name)])
        assert code == 0
        outs.append(out)
        trees.append(_sha_tree(str(tmp_path / name)))
    assert outs[0] == outs[1]
    assert trees[0] == trees[1]
    assert len(trees[0]) == 4


EXPRESSION_INI = """
[run]
amplitude = 10
dt = 0.01
t_end = 0.05
blowup_tail = 2.0

[grid]
nx = 32
ny = 32
lx = 6.283185307179586
ly = 6.283185307179586

[initial]
kind = expression
formula = 1 + 0.1*cos(x)*cos(2*y)
"""


def test_solve_expression_initial(tmp_path, capsys):
    cfg = _write(tmp_path / "run.ini", EXPRESSION_INI)
    payload = _run_json(capsys, ["solve", cfg, "--out",
                                 str(tmp_path / "out")])
    assert payload["status"] == "completed"
    assert payload["mass_initial"] == pytest.approx(4.0 * math.pi ** 2,
                                                    rel=1e-14)


def test_solve_checkpoint_initial(tmp_path, capsys):
    grid = GridSpec(nx=32, ny=32, lx=2 * math.pi, ly=2 * math.pi)
    f = SpectralField.zeros(grid)
    f.coeffs[0, 0] = 1.0
    f.coeffs[1, 1] = f.coeffs[-1, -1] = 0.05
    save_checkpoint(f, str(tmp_path / "seed.pksc"))
    ini = ZERO_INI + "\n[initial]\nkind = checkpoint\ndensity = seed.pksc\n"
    cfg = _write(tmp_path / "run.ini", ini)
    payload = _run_json(capsys, ["solve", cfg, "--out",
                                 str(tmp_path / "out")])
    assert payload["status"] == "completed"
    assert payload["mass_initial"] == pytest.approx(f.mass, rel=1e-14)


@pytest.mark.parametrize("ini,fragment", [
    ("[grid]\nnx = 32\n", "config needs a [run] section"),
    ("[run]\ndt = 0.01\n", "run.amplitude is required"),
    ("[bogus]\nx = 1\n", "unknown config section 'bogus'"),
    ("[run]\namplitude = 1\nzzz = 3\n", "unknown config key 'zzz'"),
    ("[run]\namplitude = abc\n", "invalid number for run.amplitude"),
    ("[run]\namplitude = 1\ncoupled = maybe\n", "invalid boolean"),
    ("[run]\namplitude = 1\ntrack_modes = 1,2,3\n",
     "track_modes entries are k,xi integer pairs"),
    ("[run]\namplitude = 1\n\n[initial]\nkind = blob\n",
     "unknown initial kind 'blob'"),
    ("[run]\namplitude = 1\n\n[initial]\nkind = bump\n",
     "initial.mass is required"),
    ("[run]\namplitude = 1\n\n[initial]\nkind = bump\nmass = 1\n"
     "center_x = 3\n", "center_x and center_y must be given together"),
    ("[run]\namplitude = 1\n\n[initial]\nkind = expression\n",
     "initial.formula is required"),
    ("[run]\namplitude = 1\n\n[initial]\nkind = expression\n"
     "formula = qq(x)\n", "initial formula failed"),
    ("[run]\namplitude = 1\n\n[initial]\nkind = checkpoint\n",
     "initial.density is required"),
    ("[run]\namplitude = 1\n\n[initial]\nkind = zero\nmass = 1\n",
     "is not valid for initial kind"),
    ("[run]\namplitude = 1\n", "no output directory"),
])
def test_solve_config_errors(tmp_path, capsys, ini, fragment):
    cfg = _write(tmp_path / "bad.ini", ini)
    code, out, err = _run(capsys, ["solve", cfg])
    assert code == 2
    assert fragment in err


def test_solve_missing_config(capsys, tmp_path):
    code, out, err = _run(capsys, ["solve"])
    assert code == 2
    assert "missing config file" in err
    code, out, err = _run(capsys, ["solve", str(tmp_path / "nope.ini")])
    assert code == 2
    assert "config file not found" in err


def test_solve_vorticity_needs_coupled(tmp_path, capsys):
    grid = GridSpec(nx=32, ny=32, lx=2 * math.pi, ly=2 * math.pi)
    save_checkpoint(SpectralField.zeros(grid), str(tmp_path / "n.pksc"))
    save_checkpoint(SpectralField.zeros(grid), str(tmp_path / "w.pksc"))
    ini = ZERO_INI + ("\n[initial]\nkind = checkpoint\ndensity = n.pksc\n"
                      "vorticity = w.pksc\n")
    cfg = _write(tmp_path / "run.ini", ini)
    code, out, err = _run(capsys, ["solve", cfg])
    assert code == 2
    assert "run.coupled is false" in err


# --- norms ---

def test_norms_single_mode_checkpoint(tmp_path, capsys):
    grid = GridSpec(nx=32, ny=32, lx=2 * math.pi, ly=2 * math.pi)
    f = SpectralField.zeros(grid)
    f.coeffs[1, 0] = f.coeffs[-1, 0] = 0.5
    path = str(tmp_path / "mode.pksc")
    save_checkpoint(f, path)
    payload = _run_json(capsys, ["norms", "--checkpoint", path])
    assert payload["mass"] == 0.0
    assert payload["l2"] == pytest.approx(
        math.sqrt(grid.lx * grid.ly * 0.5), rel=1e-12)
    assert payload["phys_max"] == pytest.approx(1.0, rel=1e-12)
    assert payload["anisotropic_norm"]["strict_finite"]
    assert payload["anisotropic_norm"]["value"] == pytest.approx(
        2.0 ** ((0.9 + 0.25) / 2.0) * payload["l2"], rel=1e-12)
    pieces = payload["space_time_pieces"]
    assert set(pieces) == {"sup", "vertical", "fractional", "horizontal",
                           "low_mode"}
    assert pieces["vertical"] == 0.0
    dx13 = payload["space_time_pieces_dx13"]
    assert dx13["sup"] == pytest.approx(pieces["sup"], rel=1e-12)


def test_norms_zero_checkpoint(tmp_path, capsys):
    grid = GridSpec(nx=32, ny=32, lx=2 * math.pi, ly=2 * math.pi)
    path = str(tmp_path / "zero.pksc")
    save_checkpoint(SpectralField.zeros(grid), path)
    payload = _run_json(capsys, ["norms", "--checkpoint", path])
    assert payload["mass"] == 0.0
    assert payload["anisotropic_norm"]["value"] == 0.0
    assert all(v == 0.0 for v in payload["space_time_pieces"].values())


def test_norms_errors(tmp_path, capsys):
    code, out, err = _run(capsys, ["norms"])
    assert code == 2
    assert "missing --checkpoint" in err

    grid = GridSpec(nx=32, ny=32, lx=2 * math.pi, ly=2 * math.pi)
    path = str(tmp_path / "zero.pksc")
    save_checkpoint(SpectralField.zeros(grid), path)
    code, out, err = _run(capsys, ["norms", "--checkpoint", path,
                                   "--amplitude", "0"])
    assert code == 2
    assert "amplitude must be positive" in err
    code, out, err = _run(capsys, ["norms", "--checkpoint", path,
                                   "--alpha", "0", "--low-exp", "0.3"])
    assert code == 2
    assert "low_exp" in err


# --- sweep ---

def _tiny_plan_dict():
    return {
        "base": {
            "amplitude": 1.0, "alpha": 1.0,
            "grid": {"nx": 32, "ny": 64, "lx": 4 * math.pi,
                     "ly": 2 * math.pi},
            "dt": 0.04, "t_end": 20.0, "sample_every": 10,
        },
        "amplitudes": [1.0, 1000.0],
        "horizon": 4.0,
    }


def test_sweep_print_defaults(capsys):
    payload = _run_json(capsys, ["sweep", "--print-defaults"])
    from shearpks import sweep_plan_from_dict
    plan = sweep_plan_from_dict(payload)
    assert plan.amplitudes == (1.0, 10.0, 100.0, 1e3, 1e4)
    assert not plan.base.coupled
    coupled = _run_json(capsys, ["sweep", "--print-defaults", "--coupled"])
    assert coupled["base"]["coupled"] is True


def test_sweep_tiny_run_and_rerun(tmp_path, capsys):
    plan = _write(tmp_path / "plan.json", json.dumps(_tiny_plan_dict()))
    outs = []
    sums = []
    for name in ("a", "b"):
        out_dir = str(tmp_path / name)
        code, out, err = _run(capsys, ["sweep", "--plan", plan,
                                       "--out", out_dir])
        assert code == 0, err
        outs.append(out)
        with open(os.path.join(out_dir, "summary.csv"), "rb") as fh:
            sums.append(fh.read())
    assert outs[0] == outs[1]
    assert sums[0] == sums[1]
    payload = json.loads(outs[0])
    assert payload["a_star"] == 1000.0
    assert payload["monotone_consistent"] is True
    assert [r["status"] for r in payload["rows"]] == ["blowup", "completed"]
    assert os.path.exists(str(tmp_path / "a" / "report.md"))


def test_sweep_errors(tmp_path, capsys):
    code, out, err = _run(capsys, ["sweep"])
    assert code == 2
    assert "sweep needs --plan and --out" in err

    bad = _write(tmp_path / "bad.json", "{nope")
    code, out, err = _run(capsys, ["sweep", "--plan", bad,
                                   "--out", str(tmp_path / "o")])
    assert code == 2
    assert "cannot parse plan" in err

    unknown = _write(tmp_path / "unknown.json",
                     json.dumps(dict(_tiny_plan_dict(), bogus=1)))
    code, out, err = _run(capsys, ["sweep", "--plan", unknown,
                                   "--out", str(tmp_path / "o")])
    assert code == 2
    assert "unknown sweep plan key" in err

    incomplete = _write(tmp_path / "incomplete.json",
                        json.dumps({"amplitudes": [1.0]}))
    code, out, err = _run(capsys, ["sweep", "--plan", incomplete,
                                   "--out", str(tmp_path / "o")])
    assert code == 2
    assert "needs 'base' and 'amplitudes'" in err

    headless = _write(tmp_path / "headless.json",
                      json.dumps({"base": {}, "amplitudes": [1.0]}))
    code, out, err = _run(capsys, ["sweep", "--plan", headless,
                                   "--out", str(tmp_path / "o")])
    assert code == 2
    assert "missing required key" in err

    plan = _write(tmp_path / "plan.json", json.dumps(_tiny_plan_dict()))
    code, out, err = _run(capsys, ["sweep", "--plan", plan,
                                   "--out", str(tmp_path / "o"),
                                   "--jobs", "0"])
    assert code == 2
    assert "--jobs must be >= 1" in err


# --- front matter ---

def test_bare_invocation_is_a_usage_error():
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "shearpks.cli", "constants", "--mode",
         "sharp"], capture_output=True, text=True)
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["threshold"] == pytest.approx(SHARP_DEFAULT, rel=1e-12)
