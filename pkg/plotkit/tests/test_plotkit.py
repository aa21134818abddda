import hashlib
import json
import shutil
import struct
import subprocess

import numpy as np
import pytest

from plotkit import FigureSpec, PlotkitError, render
from plotkit.cli import dispatch

PROBLEM = {"m": 2.0, "p": 1.5, "sigma": 1.0, "N": 1}
ALPHA = 1.5


def png_size(path):
    head = path.read_bytes()[:24]
    w, h = struct.unpack(">II", head[16:24])
    return w, h


def checksum(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


@pytest.fixture
def run_csv(tmp_path):
    """Synthetic (1-t)^{-alpha} run series in the documented format."""
    t = np.linspace(0.0, 0.99, 400)
    sup = (1 - t) ** -ALPHA
    lines = ["t,sup_norm,mass,zeta"]
    for i in range(t.size):
        lines.append(f"{t[i]:.17g},{sup[i]:.17g},1,{1 + t[i]:.17g}")
    csv = tmp_path / "run.csv"
    csv.write_text("\n".join(lines) + "\n")
    side = {"termination": "blowup_detected", "blowup_time_estimate": 1.0,
            "blowup_time_ci": [0.99, 1.01], "problem": PROBLEM,
            "grid": {"r_max": 10.0, "cells": 100}}
    (tmp_path / "run.json").write_text(json.dumps(side))
    return csv


@pytest.fixture
def orbit_csv(tmp_path):
    eta = np.linspace(0, 5, 200)
    Y = -np.expm1(eta) * 1e-3
    Z = np.exp(3 * eta) * 1e-6
    lines = ["eta,Y,Z"] + [f"{a:.17g},{b:.17g},{c:.17g}" for a, b, c in zip(eta, Y, Z)]
    csv = tmp_path / "orbit.csv"
    csv.write_text("\n".join(lines) + "\n")
    (tmp_path / "orbit.json").write_text(json.dumps({"problem": PROBLEM}))
    return csv


@pytest.fixture
def profile_csv(tmp_path):
    xi = np.linspace(0.1, 4.0, 100)
    f = np.clip((xi - 0.1) * (4.0 - xi), 0, None)
    csv = tmp_path / "profile.csv"
    csv.write_text("\n".join(["xi,f"] + [f"{a:.17g},{b:.17g}" for a, b in zip(xi, f)]) + "\n")
    return csv


class TestSpecValidation:
    def test_unknown_kind(self):
        with pytest.raises(PlotkitError):
            FigureSpec(kind="pie", inputs=("x.csv",), output="o.png")

    def test_no_inputs(self):
        with pytest.raises(PlotkitError):
            FigureSpec(kind="profile", inputs=(), output="o.png")

    def test_raster_only(self, profile_csv, tmp_path):
        spec = FigureSpec(kind="profile", inputs=(str(profile_csv),),
                          output=str(tmp_path / "o.svg"))
        with pytest.raises(PlotkitError, match="raster"):
            render(spec)


class TestErrors:
    def test_header_only_is_empty_data(self, tmp_path):
        csv = tmp_path / "empty.csv"
        csv.write_text("t,sup_norm,mass,zeta\n")
        spec = FigureSpec(kind="snapshots", inputs=(str(csv),),
                          output=str(tmp_path / "o.png"))
        with pytest.raises(PlotkitError, match="empty data"):
            render(spec)

    def test_missing_columns(self, profile_csv, tmp_path):
        spec = FigureSpec(kind="snapshots", inputs=(str(profile_csv),),
                          output=str(tmp_path / "o.png"))
        with pytest.raises(PlotkitError, match="missing columns"):
            render(spec)

    def test_missing_file(self, tmp_path):
        spec = FigureSpec(kind="profile", inputs=(str(tmp_path / "nope.csv"),),
                          output=str(tmp_path / "o.png"))
        with pytest.raises(PlotkitError, match="not found"):
            render(spec)

    def test_blowup_fit_needs_sidecar(self, tmp_path, run_csv):
        (run_csv.parent / "run.json").unlink()
        spec = FigureSpec(kind="blowup_fit", inputs=(str(run_csv),),
                          output=str(tmp_path / "o.png"))
        with pytest.raises(PlotkitError, match="sidecar"):
            render(spec)


class TestRender:
    @pytest.mark.parametrize("kind,fixture", [
        ("snapshots", "run_csv"),
        ("blowup_fit", "run_csv"),
        ("support_growth", "run_csv"),
        ("phase_portrait", "orbit_csv"),
        ("profile", "profile_csv"),
    ])
    def test_all_kinds_render(self, kind, fixture, tmp_path, request):
        csv = request.getfixturevalue(fixture)
        out = tmp_path / f"{kind}.png"
        spec = FigureSpec(kind=kind, inputs=(str(csv),), output=str(out))
        render(spec)
        assert out.exists() and out.stat().st_size > 0
        assert png_size(out) == (768, 576)

    def test_inputs_unchanged(self, run_csv, tmp_path):
        side = run_csv.parent / "run.json"
        before = (checksum(run_csv), checksum(side))
        spec = FigureSpec(kind="blowup_fit", inputs=(str(run_csv),),
                          output=str(tmp_path / "o.png"))
        render(spec)
        assert (checksum(run_csv), checksum(side)) == before

    def test_explicit_sidecar_input(self, run_csv, tmp_path):
        side = run_csv.parent / "run.json"
        moved = tmp_path / "elsewhere.json"
        shutil.move(side, moved)
        spec = FigureSpec(kind="blowup_fit", inputs=(str(run_csv), str(moved)),
                          output=str(tmp_path / "o.png"))
        assert render(spec).exists()

    def test_log_axes(self, run_csv, tmp_path):
        out = tmp_path / "log.png"
        spec = FigureSpec(kind="snapshots", inputs=(str(run_csv),),
                          output=str(out), logy=True)
        render(spec)
        assert png_size(out) == (768, 576)


class TestCli:
    def test_usage_error(self):
        assert dispatch(["profile"]) == 2

    def test_error_exit(self, tmp_path):
        assert dispatch(["profile", "--in", str(tmp_path / "x.csv"),
                         "--out", str(tmp_path / "o.png")]) == 1

    def test_success(self, profile_csv, tmp_path):
        rc = dispatch(["profile", "--in", str(profile_csv),
                       "--out", str(tmp_path / "o.png"), "--logy"])
        assert rc == 0 and (tmp_path / "o.png").exists()


@pytest.fixture(scope="module")
def golden(tmp_path_factory):
    """Artifacts produced by the primary CLI in its documented formats."""
    root = tmp_path_factory.mktemp("golden")
    cfg = root / "cfg.json"
    cfg.write_text(json.dumps({
        "problem": {"m": 2, "p": 1.5, "sigma": 1, "N": 1},
        "grid": {"r_max": 8.0, "cells": 240},
        "initial_data": {"kind": "compact_bump", "amplitude": 2.0},
        "t_end": 1.0,
        "output_dir": str(root / "out"),
    }))
    for sub in ("run", "profile", "stationary", "phase"):
        args = ["blowuplab", sub, "--config", str(cfg)]
        if sub in ("stationary", "phase"):
            args += ["--override", "problem.m=3", "--override", "problem.p=2",
                     "--override", "problem.sigma=2", "--override", "problem.N=3"]
        subprocess.run(args, check=True, capture_output=True)
    return root / "out"


@pytest.mark.skipif(shutil.which("blowuplab") is None,
                    reason="primary package CLI not installed")
class TestGoldenArtifacts:
    """Render every kind from artifacts produced by the primary CLI."""

    @pytest.mark.parametrize("kind,stem", [
        ("snapshots", "run"),
        ("blowup_fit", "run"),
        ("support_growth", "run"),
        ("phase_portrait", "orbit"),
        ("profile", "profile"),
    ])
    def test_render_golden(self, golden, tmp_path, kind, stem):
        csv = golden / f"{stem}.csv"
        side = golden / f"{stem}.json"
        before = checksum(csv), (checksum(side) if side.exists() else None)
        out = tmp_path / f"{kind}.png"
        rc = dispatch([kind, "--in", str(csv), "--out", str(out)])
        assert rc == 0 and out.exists()
        after = checksum(csv), (checksum(side) if side.exists() else None)
        assert after == before
