import subprocess
import sys

from zeroverse.cli import main
from zeroverse.pipeline import read_png

FAST = ["--resolution", "32", "--views", "1"]


def test_generate_stats_verify_preview(tmp_path, capsys):
    out = tmp_path / "ds"
    assert main(["generate", "--out", str(out), "--count", "3", "--seed", "9", *FAST]) == 0
    assert "generated 3" in capsys.readouterr().out
    assert main(["generate", "--out", str(out), "--count", "3", "--seed", "9", *FAST]) == 0
    assert "skipped 3" in capsys.readouterr().out
    assert main(["stats", "--manifest", str(out)]) == 0
    assert "objects              3" in capsys.readouterr().out
    assert main(["verify", "--out", str(out), "--sample", "2"]) == 0
    assert "2/2 objects reproduced" in capsys.readouterr().out
    png = tmp_path / "p.png"
    assert main(["preview", "--seed", "9", "--index", "1", "--resolution", "64", "--out", str(png)]) == 0
    assert read_png(png).shape == (64, 64, 4)


def test_config_file_and_shards(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"resolution": 32, "views": 1, "p_boolean": 0.0, "p_wireframe": 0.0, "p_none": 1.0}')
    out = tmp_path / "ds"
    for i in range(2):
        assert main(["generate", "--config", str(cfg), "--out", str(out), "--count", "3", "--shard", f"{i}/2"]) == 0
    assert main(["stats", "--manifest", str(out / "manifests" / "shard-0-of-2.jsonl")]) == 0
    text = capsys.readouterr().out
    assert "objects              2" in text


def test_errors_exit_with_status_two(tmp_path, capsys):
    assert main(["generate", "--out", str(tmp_path), "--shard", "3/2", "--count", "1"]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["stats", "--manifest", str(tmp_path / "nothing.jsonl")]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "zeroverse", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for cmd in ("generate", "preview", "stats", "verify"):
        assert cmd in proc.stdout
