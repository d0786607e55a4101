import os
import subprocess
import sys

import numpy as np
import pytest

from phi4field import Field, make_grid
from phi4field.cli import main
from phi4field.config import ConfigError, config_hash, parse_config
from phi4field.fieldio import SnapshotError, read_field_snapshot, write_csv, write_field_snapshot


def test_parse_defaults_and_values():
    cfg = parse_config("grid.d = 3\ngrid.n = 16\n")
    assert cfg.d == 3 and cfg.n == 16
    assert cfg["model.epsilon"] == 0.001
    assert cfg["model.p"] == 24
    assert cfg["model.c"] == 1.0
    cfg2 = parse_config("# comment only\n\n")
    assert cfg2.d == 3  # all defaults


def test_parse_rejects_bad_input():
    with pytest.raises(ConfigError, match="power of two"):
        parse_config("grid.n = 12\n")
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("grid.d = 2\nunknown.key = 5\n")
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("grid.n = sixteen\n")
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("just some words\n")
    with pytest.raises(ConfigError):
        parse_config("model.p = 10\n")
    with pytest.raises(ConfigError):
        parse_config("model.formulation = magic\n")


def test_roundtrip_canonical_form():
    cfg = parse_config("grid.d = 2\ngrid.n = 64\ntime.dt = 0.00025\nexperiment.lambdas = 1, 5\n")
    text = cfg.canonical_text()
    cfg2 = parse_config(text)
    assert cfg2.values == cfg.values
    assert cfg2.canonical_text() == text
    assert config_hash(cfg2) == config_hash(cfg)


def test_hash_is_sensitive_and_stable():
    a = parse_config("grid.n = 16\n")
    b = parse_config("grid.n = 32\n")
    assert a.hash() != b.hash()
    assert a.hash() == parse_config("grid.n = 16\n").hash()
    assert len(a.hash()) == 16
    int(a.hash(), 16)  # valid hex


def test_snapshot_roundtrip_bit_identical(tmp_path):
    rng = np.random.default_rng(0)
    for d, n in [(1, 8), (2, 16), (3, 8)]:
        g = make_grid(d, n)
        f = Field.from_values(g, rng.standard_normal(g.shape))
        path = os.path.join(tmp_path, f"f{d}.fld")
        write_field_snapshot(f, path)
        back = read_field_snapshot(path)
        assert back.grid.d == d and back.grid.n == n
        assert np.array_equal(back.values, f.values)


def test_snapshot_size_d1_n8(tmp_path):
    g = make_grid(1, 8)
    path = os.path.join(tmp_path, "tiny.fld")
    write_field_snapshot(Field.constant(g, 1.0), path)
    # 8 magic + 4 + 4 + 8 header + 8 values * 8 bytes
    assert os.path.getsize(path) == 88


def test_snapshot_error_paths(tmp_path):
    g = make_grid(1, 8)
    path = os.path.join(tmp_path, "x.fld")
    write_field_snapshot(Field.constant(g, 2.0), path)
    with open(path, "rb") as fh:
        raw = fh.read()
    bad_magic = os.path.join(tmp_path, "bad.fld")
    with open(bad_magic, "wb") as fh:
        fh.write(b"NOTMAGIC" + raw[8:])
    with pytest.raises(SnapshotError, match="magic"):
        read_field_snapshot(bad_magic)
    trunc = os.path.join(tmp_path, "trunc.fld")
    with open(trunc, "wb") as fh:
        fh.write(raw[:40])
    with pytest.raises(SnapshotError, match="truncated"):
        read_field_snapshot(trunc)


def test_csv_version_header(tmp_path):
    path = os.path.join(tmp_path, "t.csv")
    write_csv(path, ("a", "b"), [(1, 2.5), (3, -0.125)], meta={"seed": 7})
    with open(path) as fh:
        lines = fh.read().splitlines()
    assert lines[0] == "# phi4 csv v1 a,b"
    assert lines[1] == "# meta seed=7"
    assert lines[2] == "1,2.5"
    assert lines[3] == "3,-0.125"


def test_cli_version_and_usage():
    assert main(["version"]) == 0
    assert main([]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["simulate"]) == 2  # missing --config
    assert main(["simulate", "--config", "/nonexistent/path.cfg"]) == 2
    assert main(["harness", "--config", "/nonexistent/path.cfg", "--experiment", "coming_down"]) == 2


def test_cli_gronwall_and_besov(tmp_path):
    out = os.path.join(tmp_path, "gw")
    assert main(["gronwall", "--out", out]) == 0
    with open(os.path.join(out, "gronwall.csv")) as fh:
        head = fh.readline()
    assert head.startswith("# phi4 csv v1 sigma,s,")


def test_cli_simulate_and_harness_exit_codes(tmp_path):
    cfg_path = os.path.join(tmp_path, "run.cfg")
    with open(cfg_path, "w") as fh:
        fh.write(
            "grid.d = 1\ngrid.n = 32\ntime.dt = 1e-3\ntime.horizon = 0.4\n"
            "ensemble.size = 2\nmodel.c2 = 0.0\ntime.snapshot_every = 0.2\n"
        )
    out = os.path.join(tmp_path, "sim")
    assert main(["simulate", "--config", cfg_path, "--out", out]) == 0
    traj = os.path.join(out, "trajectory.csv")
    assert os.path.exists(traj)
    with open(traj) as fh:
        assert fh.readline().startswith("# phi4 csv v1 t,")
    snaps = [f for f in os.listdir(out) if f.endswith(".fld")]
    assert snaps
    # harness: passing experiment exits 0
    h_out = os.path.join(tmp_path, "harness")
    code = main(
        ["harness", "--config", cfg_path, "--experiment", "blowup_control", "--out", h_out]
    )
    assert code == 0
    assert os.path.exists(os.path.join(h_out, "verdict.txt"))
    # unknown experiment name is a usage error
    assert main(["harness", "--config", cfg_path, "--experiment", "nope"]) == 2


def test_cli_diagrams(tmp_path):
    cfg_path = os.path.join(tmp_path, "d.cfg")
    with open(cfg_path, "w") as fh:
        fh.write(
            "grid.d = 1\ngrid.n = 32\ntime.dt = 2e-3\ntime.horizon = 0.3\n"
            "time.burn_in = 0.1\nmodel.c2 = 0.0\n"
        )
    out = os.path.join(tmp_path, "diag")
    assert main(["diagrams", "--config", cfg_path, "--out", out]) == 0
    with open(os.path.join(out, "regularity.csv")) as fh:
        content = fh.read()
    assert "x1" in content and "x22" in content


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "phi4field", "version"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert proc.stdout.strip()
