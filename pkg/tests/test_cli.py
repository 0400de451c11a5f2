"""Tests for the command-line entry point and its jobs."""

import json

import pytest

from novikov_eta.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from novikov_eta.config import RunConfig
from novikov_eta.jobs import ExtJob, VerifyJob


@pytest.fixture
def common(tmp_path):
    return ["--no-cache", "--output-dir", str(tmp_path / "out")]


def _failures(stderr: str) -> list[dict]:
    return [json.loads(line) for line in stderr.splitlines() if line.startswith("{")]


class TestMain:
    def test_verify_bp_cocycles(self, capsys, common):
        assert main(["verify", "lemma61", *common]) == EXIT_OK
        assert "lemma61: 3/3 cocycles exact" in capsys.readouterr().out

    def test_verify_right_unit(self, capsys, common):
        assert main(["verify", "eta-r", "--max-u", "14", *common]) == EXIT_OK
        assert "eta-r: checked v2, v3" in capsys.readouterr().out

    def test_ext(self, tmp_path, capsys, common):
        argv = ["ext", "--context", "sphere", "--max-u", "4", "--max-s", "1", "--max-t", "1", *common]
        assert main(argv) == EXIT_OK
        report = (tmp_path / "out" / "ext-sphere.txt").read_text(encoding="utf-8")
        assert "h0" in report
        assert "ext:sphere:" in capsys.readouterr().out

    def test_massey(self, capsys, common):
        argv = ["massey", "[ζ1]", "[ζ1^2]", "[ζ1]", "--contains", "[ζ1^2|ζ1^2]"]
        argv += ["--max-u", "8", "--max-s", "2", "--max-t", "0", *common]
        assert main(argv) == EXIT_OK
        assert "indeterminacy dimension 0" in capsys.readouterr().out

    def test_massey_not_defined(self, capsys, common):
        argv = ["massey", "[ζ1]", "[ζ1]", "[ζ1]", "--max-u", "8", "--max-s", "2", "--max-t", "0", *common]
        assert main(argv) == EXIT_FAILED
        (failure,) = _failures(capsys.readouterr().err)
        assert failure["status"] == "fail"
        assert failure["detail"].startswith("NotDefinedError")

    def test_chart(self, tmp_path, common):
        argv = ["chart", "--format", "tsv", "--max-x", "2", "--max-y", "2"]
        argv += ["--max-u", "4", "--max-s", "2", "--max-t", "0", *common]
        assert main(argv) == EXIT_OK
        document = (tmp_path / "out" / "chart-sphere-ext-novikov.tsv").read_text(encoding="utf-8")
        assert document.startswith("stem\ty\tt\tweight")

    def test_chart_past_region(self, capsys, common):
        argv = ["chart", "--format", "tsv", "--max-x", "15", "--max-u", "4", "--max-s", "2", "--max-t", "0", *common]
        assert main(argv) == EXIT_FAILED
        (failure,) = _failures(capsys.readouterr().err)
        assert failure["detail"].startswith("RegionError")

    def test_bad_config(self, tmp_path, capsys, common):
        path = tmp_path / "bad.cfg"
        path.write_text("max_u = lots\n", encoding="utf-8")
        assert main(["verify", "lemma61", "--config", str(path), *common]) == EXIT_USAGE
        (failure,) = _failures(capsys.readouterr().err)
        assert failure["check"] == "config"

    def test_missing_config(self, tmp_path, common):
        assert main(["verify", "lemma61", "--config", str(tmp_path / "absent.cfg"), *common]) == EXIT_USAGE

    def test_unknown_suite(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["verify", "everything"])
        assert excinfo.value.code == 2


class TestJobs:
    def test_results_are_recorded(self, tmp_path):
        job = VerifyJob(RunConfig(use_cache=False, output_dir=tmp_path))
        assert job.run("lemma61")
        assert [r.check for r in job.results] == ["lemma61"]
        assert json.loads(job.results[0].as_json())["status"] == "pass"

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            VerifyJob(RunConfig(use_cache=False)).run("everything")

    def test_ext_writes_one_report_per_context(self, tmp_path):
        config = RunConfig(max_u=4, max_s=1, max_t=1, use_cache=False, output_dir=tmp_path)
        job = ExtJob(config)
        assert job.run(["sphere", "mod2"])
        assert sorted(path.name for path in job.artifacts) == ["ext-mod2.txt", "ext-sphere.txt"]

    def test_store_follows_use_cache(self, tmp_path):
        assert VerifyJob(RunConfig(use_cache=False)).store is None
        job = VerifyJob(RunConfig(cache_dir=tmp_path / "cache"))
        assert job.store is not None
        assert job.store is job.store
