import csv
import json

from minseq.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def report_of(out: str) -> dict:
    return json.loads(out[out.index("{") :])


def test_gen_prefix_counterexample(tmp_path, capsys):
    out = tmp_path / "x.csv"
    code, _, _ = run(capsys, "gen-prefix", "--seq", "x", "--length", "3", "--out", str(out))
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows == [
        ["index", "x", "y"],
        ["1", "0/1", "0/1"],
        ["2", "1/1", "0/1"],
        ["3", "0/1", "1/1"],
    ]


def test_gen_prefix_triples_flatten(tmp_path, capsys):
    out = tmp_path / "b.csv"
    code, _, _ = run(capsys, "gen-prefix", "--seq", "b", "--length", "2", "--out", str(out))
    assert code == 0
    rows = list(csv.reader(out.open()))[1:]
    assert len(rows) == 6  # two triples, three points each
    assert rows[0] == ["1", "1/2", "1/2"]
    assert rows[3] == ["4", "0/1", "0/1"]


def test_gen_prefix_toy_head(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code, _, _ = run(capsys, "gen-prefix", "--seq", "toy:0.5", "--length", "1", "--out", str(out))
    assert code == 0
    assert list(csv.reader(out.open()))[1] == ["1", "1/2"]


def test_check_lemma2_passes(capsys):
    code, out, _ = run(capsys, "check-lemma2", "--length", "3075")
    assert code == 0
    report = report_of(out)
    assert report["pass"] is True
    assert report["results"]["argmin_position"] == 97


def test_check_lemma2_too_short(capsys):
    code, _, err = run(capsys, "check-lemma2", "--length", "5")
    assert code == 2
    assert "length" in err


def test_check_lemma1_small(capsys):
    code, out, _ = run(
        capsys, "check-lemma1", "--length", "4096", "--max-block-len", "8",
        "--max-level", "6",
    )
    assert code == 0
    assert report_of(out)["results"]["violations"] == 0


def test_image_test_bundled(capsys):
    code, out, _ = run(capsys, "image-test", "--spec", "poly-tilted-plane", "--epsilon", "0.25")
    assert code == 0
    report = report_of(out)
    assert report["pass"] is True
    assert report["results"]["triple_level"] == 2


def test_image_test_spec_file(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"kind": "polynomial", "coefficients": [[0.0, 2 / 3], [1 / 3, 0.0]]}))
    code, out, _ = run(capsys, "image-test", "--spec", str(spec), "--epsilon", "0.25")
    assert code == 0


def test_image_test_malformed_spec(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "polynomial", "coefficients": []}')
    code, _, err = run(capsys, "image-test", "--spec", str(bad), "--epsilon", "0.25")
    assert code == 2
    assert "coefficient" in err


def test_image_test_bad_epsilon(capsys):
    code, _, _ = run(capsys, "image-test", "--spec", "coordinate-x", "--epsilon", "-1")
    assert code == 2


def test_toy_pass_and_usage(capsys):
    code, out, _ = run(capsys, "toy", "--c", "0.5", "--epsilon", "0.1", "--search-len", "65536")
    assert code == 0
    assert report_of(out)["results"]["head_value"] == "1/2"
    code, out, _ = run(capsys, "toy", "--c", "0.5", "--epsilon", "2.0", "--search-len", "16")
    assert code == 0
    code, _, err = run(capsys, "toy", "--c", "1.5", "--epsilon", "0.1")
    assert code == 2


def test_detect_round_trip(tmp_path, capsys):
    prefix = tmp_path / "x.csv"
    run(capsys, "gen-prefix", "--seq", "x", "--length", "300", "--out", str(prefix))
    code, out, _ = run(
        capsys, "detect", "--prefix-file", str(prefix),
        "--witness-start", "1", "--witness-len", "3", "--epsilon", "0.125",
    )
    assert code == 0
    report = report_of(out)
    assert report["results"]["verdict"] == "witness-found"
    assert report["results"]["lipschitz_ok"] is True


def test_detect_fake_witness_fails(tmp_path, capsys):
    prefix = tmp_path / "const.csv"
    with prefix.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "x", "y"])
        for j in range(1, 50):
            writer.writerow([j, "1/2", "1/2"])
    code, out, _ = run(
        capsys, "detect", "--prefix-file", str(prefix),
        "--witness-start", "1", "--witness-len", "3", "--epsilon", "0.125",
    )
    assert code == 1
    assert report_of(out)["results"]["verdict"] == "inconclusive"


def test_detect_missing_file(capsys):
    code, _, err = run(
        capsys, "detect", "--prefix-file", "/nonexistent/file.csv",
        "--witness-start", "1", "--witness-len", "3", "--epsilon", "0.125",
    )
    assert code == 2
    assert "not found" in err


def test_gap_stats(tmp_path, capsys):
    out = tmp_path / "gaps.csv"
    code, printed, _ = run(
        capsys, "gap-stats", "--seq", "b", "--block-len", "4",
        "--epsilon", "0", "--length", "4096", "--out", str(out),
    )
    assert code == 0
    report = report_of(printed)
    assert report["results"]["level_bound"] == 16
    assert report["results"]["max_gap"] <= 16
    rows = list(csv.reader(out.open()))[1:]
    assert all(row[2] == "true" for row in rows)


def test_gap_stats_block_too_long(tmp_path, capsys):
    code, _, err = run(
        capsys, "gap-stats", "--seq", "b", "--block-len", "64",
        "--length", "32", "--out", str(tmp_path / "g.csv"),
    )
    assert code == 2


def test_reports_are_deterministic(tmp_path, capsys):
    outs = []
    for i in range(2):
        path = tmp_path / f"report{i}.json"
        code, _, _ = run(
            capsys, "image-test", "--spec", "grid-saddle", "--epsilon", "0.25",
            "--out", str(path),
        )
        assert code == 0
        data = json.loads(path.read_text())
        data.pop("wall_time_s")
        outs.append(json.dumps(data, sort_keys=True))
    assert outs[0] == outs[1]


def test_unknown_sequence(capsys, tmp_path):
    code, _, err = run(
        capsys, "gen-prefix", "--seq", "nope", "--length", "3",
        "--out", str(tmp_path / "n.csv"),
    )
    assert code == 2
    assert "unknown sequence" in err
