import csv
import json

import pytest

from ontic import cli


def run(tmp_path, *args):
    return cli.main([*args, "--out", str(tmp_path)])


def load(path):
    return json.loads(path.read_text())


def strip_time(path):
    body = load(path)
    body.pop("timestamp")
    return body


def test_verify_ks2_reference_run(tmp_path):
    assert run(tmp_path, "verify", "--theory", "ks2", "--sweeps", "200", "--n", "200000", "--seed", "7") == 0
    body = load(tmp_path / "verify_ks2.json")
    assert body["schema"] == 1 and body["pass"] and body["seed"] == 7
    assert body["result"]["born"]["sweeps"] == 200
    assert body["result"]["normalization"]["exceptions"] == 0
    assert (tmp_path / "verify_ks2.csv").exists() and (tmp_path / "verify_ks2_z.png").exists()


def test_verify_negative_control(tmp_path):
    assert run(tmp_path, "verify", "--theory", "broken-uniform", "--sweeps", "5", "--n", "5000", "--seed", "1") == 1
    assert not load(tmp_path / "verify_broken-uniform.json")["pass"]


def test_missing_seed(tmp_path, capsys):
    assert run(tmp_path, "verify", "--theory", "ks2") == 2
    err = capsys.readouterr().err
    assert "usage:" in err and "--seed" in err


@pytest.mark.parametrize(
    "args",
    [
        ("verify", "--theory", "ks2", "--d", "3", "--seed", "1"),
        ("verify", "--theory", "pair", "--n", "0", "--seed", "1"),
        ("nogo", "--check", "ui-family", "--d", "2", "--seed", "1"),
        ("nogo", "--check", "cantor", "--depth", "31", "--seed", "1"),
        ("overlap", "--theory", "net", "--N", "4", "--seed", "1"),
        ("verify", "--theory", "ontic", "--d", "two", "--seed", "1"),
    ],
)
def test_config_errors_exit_2(tmp_path, args):
    assert run(tmp_path, *args) == 2


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 3, "theory": "pair", "sweeps": 2, "n": 2000, "lambdas": 50}))
    out = tmp_path / "a"
    assert cli.main(["verify", "--config", str(cfg), "--out", str(out), "--n", "3000"]) == 0
    body = load(out / "verify_pair.json")
    assert body["config"]["n"] == 3000 and body["config"]["sweeps"] == 2 and body["seed"] == 3
    assert body["result"]["born"]["n"] == 3000


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"seed": 3, "colour": "blue"}))
    assert cli.main(["verify", "--config", str(bad), "--out", str(tmp_path)]) == 2
    bad.write_text("{not json")
    assert cli.main(["verify", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert cli.main(["verify", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 2


def test_parse_dims():
    assert cli.parse_dims("3..8") == [3, 4, 5, 6, 7, 8]
    assert cli.parse_dims("2,4") == [2, 4]
    assert cli.parse_dims(5) == [5]
    with pytest.raises(cli.ConfigError):
        cli.parse_dims("1..3")


def test_nogo_cantor_depth1(tmp_path):
    assert run(tmp_path, "nogo", "--check", "cantor", "--depth", "1", "--seed", "7") == 0
    cert = load(tmp_path / "nogo_cantor.json")["result"]["certificates"][0]
    assert cert["result"]["interval_list"] == [[0.0, 0.375], [0.625, 1.0]]
    with open(tmp_path / "cantor_depth1.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [(float(r["lo"]), float(r["hi"])) for r in rows] == [(0.0, 0.375), (0.625, 1.0)]
    assert (tmp_path / "cantor_depth1.png").exists()


def test_nogo_deficiency_d2(tmp_path):
    assert run(tmp_path, "nogo", "--check", "deficiency", "--d", "2", "--n", "1000000", "--seed", "7") == 0
    cert = load(tmp_path / "nogo_deficiency.json")["result"]["certificates"][0]
    assert cert["result"]["estimate"] <= 1e-4
    assert set(cert) == {"check", "d", "params", "seed", "result", "tolerances", "pass"}


def test_nogo_ui_family(tmp_path):
    assert run(tmp_path, "nogo", "--check", "ui-family", "--d", "3..8", "--seed", "7") == 0
    certs = load(tmp_path / "nogo_ui-family.json")["result"]["certificates"]
    assert [c["d"] for c in certs] == list(range(3, 9))
    assert all(c["result"]["rank"] == c["d"] for c in certs)


def test_overlap_pair_and_ontic(tmp_path):
    assert run(tmp_path, "overlap", "--theory", "pair", "--pairs", "10", "--seed", "7") == 0
    body = load(tmp_path / "overlap_pair.json")
    anchor = [r for r in body["result"]["pairs"] if r["kind"] == "anchor"][0]
    assert abs(anchor["overlap"] - body["result"]["epsilon"]) <= 1e-12
    assert body["result"]["max_orthogonal_overlap"] == 0.0
    assert run(tmp_path, "overlap", "--theory", "ontic", "--pairs", "5", "--seed", "7") == 1
    assert load(tmp_path / "overlap_ontic.json")["result"]["min_covered_overlap"] == 0.0


def test_report_digest_and_determinism(tmp_path):
    args = ("verify", "--theory", "convex", "--sweeps", "3", "--n", "5000", "--lambdas", "100", "--seed", "11")
    assert run(tmp_path / "a", *args) == 0
    assert run(tmp_path / "b", *args) == 0
    a, b = tmp_path / "a" / "verify_convex.json", tmp_path / "b" / "verify_convex.json"
    assert strip_time(a) == strip_time(b)
    body = load(a)
    assert body["digest"] == cli.report_digest(body)
    assert (tmp_path / "a" / "verify_convex.csv").read_bytes() == (tmp_path / "b" / "verify_convex.csv").read_bytes()


def test_worker_count_recorded_but_results_identical(tmp_path):
    base = ("verify", "--theory", "pair", "--sweeps", "2", "--n", "150000", "--lambdas", "50", "--seed", "5")
    assert run(tmp_path / "w1", *base, "--workers", "1") == 0
    assert run(tmp_path / "w3", *base, "--workers", "3") == 0
    one, three = load(tmp_path / "w1" / "verify_pair.json"), load(tmp_path / "w3" / "verify_pair.json")
    assert one["config"]["workers"] == 1 and three["config"]["workers"] == 3
    assert one["result"] == three["result"]


def test_no_plots(tmp_path):
    assert run(tmp_path, "demo", "--seed", "2", "--n", "20000", "--no-plots") == 0
    assert not list(tmp_path.glob("*.png"))
    assert (tmp_path / "ks_profile.csv").exists() and (tmp_path / "deficiency.csv").exists()


def test_demo_with_plots(tmp_path):
    assert run(tmp_path, "demo", "--seed", "2", "--n", "20000") == 0
    names = {p.name for p in tmp_path.glob("*.png")}
    assert {"ks_profile.png", "deficiency.png", "cantor_measures.png"} <= names
    with open(tmp_path / "ks_profile.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert float(rows[0]["density"]) == pytest.approx(1 / 3.141592653589793)
    assert float(rows[-1]["density"]) == 0.0
