"""
Command Line Tests
"""

import json

import numpy as np
import pytest

from stairkit.cli import main
from stairkit.core.formats import read_depth, read_grid, read_labels, read_rig, write_depth, write_grid, write_rig
from stairkit.core.grid_model import DetectionGrid


@pytest.fixture
def frame_dir(tmp_path):
    out = tmp_path / "frame"
    assert main(["simulate", "--noise", "0", "--quantum", "0", "--out", str(out)]) == 0
    return out


# ============================================================================
# SIMULATE
# ============================================================================

def test_simulate_writes_all_artifacts(frame_dir):
    manifest = json.loads((frame_dir / "manifest.json").read_text())
    assert manifest["truth"] == {"step_width": 0.3, "step_height": 0.15, "direction": "ascending"}
    assert len(read_labels(frame_dir / "labels.txt")) == 8
    assert read_depth(frame_dir / "depth.dpth").shape == (512, 512)
    assert read_rig(frame_dir / "rig.json").gravity[2] > 0.0
    assert read_grid(frame_dir / "grid.json").conf.sum() > 0


def test_simulate_rejects_bad_scene(tmp_path, capsys):
    assert main(["simulate", "--n-steps", "0", "--out", str(tmp_path)]) == 2
    assert "invalid scene" in capsys.readouterr().err


def test_simulate_custom_intrinsics(tmp_path):
    out = tmp_path / "frame"
    assert main(["simulate", "--noise", "0", "--fx", "500", "--cy", "250", "--out", str(out)]) == 0
    rig = read_rig(out / "rig.json")
    assert (rig.fx, rig.fy, rig.cx, rig.cy) == (500.0, 460.0, 256.0, 250.0)
    assert rig.image_dims == (512, 512)


def test_simulate_rejects_nonpositive_focal(tmp_path, capsys):
    assert main(["simulate", "--fx", "0", "--out", str(tmp_path)]) == 2
    assert "invalid scene" in capsys.readouterr().err


def test_simulate_unwritable_output(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    assert main(["simulate", "--out", str(blocker / "frame")]) == 2
    assert "InputError" in capsys.readouterr().err


def test_unwritable_output_file(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    assert main(["plan", "--out", str(blocker / "plan.json")]) == 2
    assert "cannot write" in capsys.readouterr().err


# ============================================================================
# MEASURE
# ============================================================================

def test_measure_simulated_frame(frame_dir, capsys):
    code = main([
        "measure",
        "--grid", str(frame_dir / "grid.json"),
        "--depth", str(frame_dir / "depth.dpth"),
        "--rig", str(frame_dir / "rig.json"),
    ])
    assert code == 0
    result = json.loads(capsys.readouterr().out)
    assert result["direction"] == "ascending"
    assert len(result["steps"]) == 3
    for step in result["steps"]:
        # DPTH1 stores float32 depth
        assert step["width_m"] == pytest.approx(0.30, abs=1e-4)
        assert step["height_m"] == pytest.approx(0.15, abs=1e-4)


def test_measure_steps_option(frame_dir, capsys):
    main([
        "measure", "--steps", "1",
        "--grid", str(frame_dir / "grid.json"),
        "--depth", str(frame_dir / "depth.dpth"),
        "--rig", str(frame_dir / "rig.json"),
    ])
    assert len(json.loads(capsys.readouterr().out)["steps"]) == 1


def test_measure_empty_grid_is_insufficient(tmp_path, rig, capsys):
    write_grid(tmp_path / "grid.json", DetectionGrid.empty())
    write_depth(tmp_path / "depth.dpth", np.full((512, 512), 2.0))
    write_rig(tmp_path / "rig.json", rig)
    code = main([
        "measure",
        "--grid", str(tmp_path / "grid.json"),
        "--depth", str(tmp_path / "depth.dpth"),
        "--rig", str(tmp_path / "rig.json"),
    ])
    assert code == 4
    result = json.loads(capsys.readouterr().out)
    assert result["steps"] == []
    assert result["diagnostics"] == ["no stair lines detected"]


def test_measure_all_holes(frame_dir, capsys):
    write_depth(frame_dir / "holes.dpth", np.zeros((512, 512)))
    code = main([
        "measure",
        "--grid", str(frame_dir / "grid.json"),
        "--depth", str(frame_dir / "holes.dpth"),
        "--rig", str(frame_dir / "rig.json"),
    ])
    assert code == 4
    assert "[depth]" in capsys.readouterr().err


def test_measure_missing_file(tmp_path, capsys):
    code = main(["measure", "--grid", str(tmp_path / "nope.json"), "--depth", "x", "--rig", "y"])
    assert code == 2
    assert "InputError" in capsys.readouterr().err


# ============================================================================
# EVAL
# ============================================================================

def test_eval_ground_truth_against_itself(frame_dir, capsys):
    code = main(["eval", "--pred", str(frame_dir / "grid.json"), "--gt", str(frame_dir / "labels.txt")])
    assert code == 0
    result = json.loads(capsys.readouterr().out)
    assert result["aggregate"]["recall"] == 1.0
    assert result["aggregate"]["iou"] == 1.0
    assert result["conf"] == 0.5


def test_eval_reports_bad_label_file(frame_dir, tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1 2 3\n")
    code = main([
        "eval",
        "--pred", str(frame_dir / "grid.json"), str(frame_dir / "grid.json"),
        "--gt", str(frame_dir / "labels.txt"), str(bad),
    ])
    assert code == 2
    result = json.loads(capsys.readouterr().out)
    assert "metrics" in result["files"][0]
    assert "line 1" in result["files"][1]["error"]
    assert result["aggregate"]["iou"] == 1.0


def test_eval_needs_aligned_files(frame_dir):
    assert main(["eval", "--pred", str(frame_dir / "grid.json"), "--gt", "a.txt", "b.txt"]) == 2


# ============================================================================
# LOSS SCHEDULE / PLAN / CLUSTER / OVERLAY
# ============================================================================

def test_loss_schedule_csv(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    trace.write_text("x_error,y_error\n2,1\n0,4\n")
    assert main(["loss-sched", "--trace", str(trace)]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows == ["epoch,alpha,beta,x_error,y_error", "1,10.5,9.5,2.0,1.0", "2,9.5,10.5,0.0,4.0"]


def test_loss_schedule_rejects_weights_below_floor(tmp_path):
    trace = tmp_path / "trace.csv"
    trace.write_text("1,1\n")
    assert main(["loss-sched", "--trace", str(trace), "--alpha0", "0.1"]) == 2


def test_plan_summaries(capsys):
    assert main(["plan"]) == 0
    plans = json.loads(capsys.readouterr().out)
    assert [p["width_factor"] for p in plans] == [1.0, 0.5, 0.25]
    assert all(p["location_head"] == [32, 16, 8] for p in plans)


def test_plan_bad_input_size():
    assert main(["plan", "--input-size", "500", "512"]) == 2


def test_cluster_simulated_grid(frame_dir, capsys):
    assert main(["cluster", "--grid", str(frame_dir / "grid.json")]) == 0
    lines = json.loads(capsys.readouterr().out)
    assert len(lines) == 8
    assert [line["b"] for line in lines] == sorted(line["b"] for line in lines)


def test_overlay_to_file(frame_dir, tmp_path):
    out = tmp_path / "overlay.svg"
    code = main([
        "overlay",
        "--grid", str(frame_dir / "grid.json"),
        "--labels", str(frame_dir / "labels.txt"),
        "--out", str(out),
    ])
    assert code == 0
    svg = out.read_text()
    assert svg.count("<path") == 16
