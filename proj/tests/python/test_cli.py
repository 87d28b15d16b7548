import json
import os
import subprocess

import pytest

import negaudit as na

CLI = os.environ.get("NEGAUDIT_CLI")

pytestmark = pytest.mark.skipif(CLI is None, reason="NEGAUDIT_CLI not set")


def run(*args):
    result = subprocess.run([CLI, *args], capture_output=True, text=True)
    assert result.returncode == 0, result.stderr
    return result.stdout


def write_toy_csv(path):
    path.write_text(
        "study_id,image_refs,consolidation,edema,pneumothorax\n"
        "s1,v1;v2,1.0,1.0,0.0\n"
        "s2,v3,0.0,1.0,0.0\n"
    )


def test_pipeline_composition_matches_library_calls(tmp_path):
    csv = tmp_path / "labels.csv"
    write_toy_csv(csv)
    protocol = tmp_path / "protocol.jsonl"
    run("build", "--table", str(csv), "--kind", "report_absence",
        "--out", str(protocol), "--report", str(tmp_path / "build.json"))

    items = na.read_protocol_jsonl(protocol)
    assert len(items) == 3

    preds_path = tmp_path / "preds.jsonl"
    preds = [na.PredictionRecord(item.item_id, 1) for item in items]
    na.write_predictions_jsonl(preds_path, preds)

    verified_path = tmp_path / "verified.jsonl"
    summary_path = tmp_path / "summary.json"
    out = run("verify", "--protocol", str(protocol), "--predictions",
              str(preds_path), "--out", str(verified_path),
              "--summary", str(summary_path))
    assert "coverage 100.00%" in out

    metrics_path = tmp_path / "metrics.json"
    run("score", "--protocol", str(protocol), "--predictions", str(preds_path),
        "--verified", str(verified_path), "--out", str(metrics_path))
    cli_metrics = json.loads(metrics_path.read_text())

    # Library-level single shot must agree with the CLI pipeline.
    verified = na.read_verified_jsonl(verified_path)
    repaired = na.predictions_from_verified(preds, verified)
    lib_report = na.score(items, repaired)
    assert cli_metrics["overall"]["n"] == lib_report.overall.n
    assert cli_metrics["overall"]["correct"] == lib_report.overall.correct
    assert (
        cli_metrics["overall"]["contradictions"]
        == lib_report.overall.contradictions
    )

    summary = json.loads(summary_path.read_text())
    assert summary["coverage_pct"] == 100.0
    assert summary["config_echo"]["lexicon"]["name"] == "extended"

    stats_path = tmp_path / "stats.json"
    run("stats", "--protocol", str(protocol), "--predictions", str(preds_path),
        "--verified", str(verified_path), "--resamples", "200",
        "--out", str(stats_path))
    stats = json.loads(stats_path.read_text())
    assert stats["base_accuracy"]["point"] == 0.0
    assert stats["verified_accuracy"]["point"] == 100.0
    # Three concordant improvements: the sign-flip null can reach the observed
    # delta with probability 1/8, so p sits near 0.125.
    assert 0.0 < stats["permutation_p"] < 0.25

    report_path = tmp_path / "report.md"
    run("report", "--protocol", str(protocol), "--predictions",
        str(preds_path), "--verified", str(verified_path),
        "--out", str(report_path))
    table = report_path.read_text()
    assert "| overall | 3 |" in table
    assert "3 → 0" in table

    # Manifests accompany every output.
    assert (tmp_path / "protocol.jsonl.manifest.json").exists()
    manifest = json.loads(
        (tmp_path / "protocol.jsonl.manifest.json").read_text()
    )
    assert manifest["subcommand"] == "build"


def test_exit_codes(tmp_path):
    csv = tmp_path / "labels.csv"
    write_toy_csv(csv)

    missing = subprocess.run(
        [CLI, "build", "--table", str(tmp_path / "nope.csv"), "--out",
         str(tmp_path / "x.jsonl")],
        capture_output=True, text=True)
    assert missing.returncode == 1

    protocol = tmp_path / "protocol.jsonl"
    run("build", "--table", str(csv), "--kind", "report_absence",
        "--out", str(protocol))
    # Corrupt the protocol: duplicate an item_id.
    lines = protocol.read_text().strip().splitlines()
    protocol.write_text("\n".join(lines + [lines[0]]) + "\n")
    preds = tmp_path / "preds.jsonl"
    preds.write_text('{"item_id":"x","choice_index":0}\n')
    invalid = subprocess.run(
        [CLI, "verify", "--protocol", str(protocol), "--predictions",
         str(preds), "--out", str(tmp_path / "v.jsonl")],
        capture_output=True, text=True)
    assert invalid.returncode == 2


def test_simulate_and_lexicon_dump(tmp_path):
    out = run("simulate", "--n", "200", "--seed", "7", "--check",
              "--out", str(tmp_path / "sim.json"),
              "--out-protocol", str(tmp_path / "sim_protocol.jsonl"),
              "--out-predictions", str(tmp_path / "sim_preds.jsonl"))
    assert "prop1 counterexamples 0" in out
    assert "safe subset ok" in out

    sim = json.loads((tmp_path / "sim.json").read_text())
    assert sim["prop2_failures"] == 0
    assert sim["safe_subset"]["harm_empty"] is True

    # Dumped instances feed the ordinary pipeline unchanged.
    items = na.read_protocol_jsonl(tmp_path / "sim_protocol.jsonl")
    preds = na.read_predictions_jsonl(tmp_path / "sim_preds.jsonl")
    assert na.validate_protocol(items).ok()
    _, summary = na.batch_verify(items, preds, na.VerifierConfig())
    assert summary.n == 200

    dump = run("lexicon", "--name", "original")
    lex = json.loads(dump)
    assert lex["name"] == "original"
    assert lex["option_negation_patterns"][0]["pattern_id"] == "canonical_no"


def test_env_seed_override(tmp_path):
    csv = tmp_path / "labels.csv"
    write_toy_csv(csv)
    protocol = tmp_path / "protocol.jsonl"
    run("build", "--table", str(csv), "--kind", "report_absence",
        "--out", str(protocol))
    items = na.read_protocol_jsonl(protocol)
    preds_path = tmp_path / "preds.jsonl"
    preds = [na.PredictionRecord(item.item_id, 0) for item in items]
    na.write_predictions_jsonl(preds_path, preds)
    verified_path = tmp_path / "verified.jsonl"
    run("verify", "--protocol", str(protocol), "--predictions",
        str(preds_path), "--out", str(verified_path))

    env = dict(os.environ, NEGAUDIT_SEED="777")
    stats_path = tmp_path / "stats.json"
    result = subprocess.run(
        [CLI, "stats", "--protocol", str(protocol), "--predictions",
         str(preds_path), "--verified", str(verified_path),
         "--resamples", "50", "--out", str(stats_path)],
        capture_output=True, text=True, env=env)
    assert result.returncode == 0, result.stderr
    stats = json.loads(stats_path.read_text())
    assert stats["seed"] == 777
