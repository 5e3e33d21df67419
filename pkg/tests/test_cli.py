import json

import pytest

from versabo.cli import main
from versabo.models import list_models
from versabo.systems import list_systems


def _write_config(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def _tiny_doc():
    return {
        "cells": [
            {"id": "c1", "system": "clean-d2", "model": "gp", "acq": "ei",
             "N": 2, "M": 10, "budget": 8, "mh_steps": 400},
        ],
        "trials": 1,
        "seed": 3,
    }


class TestCli:
    def test_run_success(self, tmp_path, capsys):
        cfg = _write_config(tmp_path / "cfg.json", _tiny_doc())
        code = main(["run", "--config", cfg, "--out", str(tmp_path / "out"), "--serial"])
        assert code == 0
        assert (tmp_path / "out" / "trace.csv").exists()
        assert (tmp_path / "out" / "summary.csv").exists()

    def test_trials_and_seed_overrides(self, tmp_path):
        cfg = _write_config(tmp_path / "cfg.json", _tiny_doc())
        code = main(["run", "--config", cfg, "--out", str(tmp_path / "out"),
                     "--serial", "--trials", "2", "--seed", "9"])
        assert code == 0
        lines = (tmp_path / "out" / "trace.csv").read_text().splitlines()
        assert len(lines) == 1 + 2 * 2

    def test_missing_config_file(self, tmp_path, capsys):
        code = main(["run", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "out")])
        assert code == 2

    def test_invalid_config(self, tmp_path):
        doc = _tiny_doc()
        doc["cells"][0]["surprise"] = True
        cfg = _write_config(tmp_path / "bad.json", doc)
        code = main(["run", "--config", cfg, "--out", str(tmp_path / "out")])
        assert code == 2

    def test_runtime_error_exit_code(self, tmp_path):
        cfg = _write_config(tmp_path / "cfg.json", _tiny_doc())
        code = main(["run", "--config", cfg, "--out", "/dev/null/impossible"])
        assert code == 3

    def test_combine_rule_flag_rejected_value(self, tmp_path):
        cfg = _write_config(tmp_path / "cfg.json", _tiny_doc())
        with pytest.raises(SystemExit):
            main(["run", "--config", cfg, "--out", str(tmp_path / "o"),
                  "--combine-rule", "whatever"])

    def test_list_models(self, capsys):
        assert main(["list-models"]) == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert out == list_models()

    def test_list_systems(self, capsys):
        assert main(["list-systems"]) == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert out == list_systems()
