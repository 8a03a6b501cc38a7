import json

import pytest

from belyi_cert.cli import extra_samples, main


def test_group_command(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["group", "hs-map-1", "--report", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["verdict"] == "pass"
    assert any(c["id"] == "group.order" for c in data["checks"])
    assert "PASS" in capsys.readouterr().out.upper()


def test_global_flags_before_command(tmp_path):
    out = tmp_path / "r.json"
    assert main(["--report", str(out), "--seed", "4", "polys", "hs-map-2"]) == 0
    assert json.loads(out.read_text())["config"]["seed"] == 4


def test_emit(capsys):
    assert main(["emit", "hs-map-1", "--subst", "2t2p1"]) == 0
    text = capsys.readouterr().out.strip()
    assert text.startswith("-%d*X^100*t^2" % (2 * 3 ** 14))
    assert "X^99" in text


@pytest.mark.parametrize("argv", [
    ["disc", "hs-map-1", "--family", "t", "--samples", "0"],
    ["monodromy", "hs-map-1", "--precision", "20"],
    ["group", "no-such-map"],
    ["--threads", "0", "group", "hs-map-1"],
    ["frobnicate", "hs-map-1"],
    ["dessin", "hs-map-1"],
])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_disc_command(capsys):
    assert main(["disc", "hs-map-1", "--family", "2t2p1", "--samples", "2"]) == 0
    out = capsys.readouterr().out
    assert out.count("agrees") == 2


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text('[pipeline]\nskip = ["disc", "monodromy", "dessin"]\n')
    rep = tmp_path / "r.json"
    assert main(["verify", "hs-map-2", "--config", str(cfg), "--report", str(rep)]) == 0
    data = json.loads(rep.read_text())
    assert {c["id"] for c in data["checks"]} >= {"disc.skipped", "dessin.skipped", "group.order"}
    bad = tmp_path / "bad.toml"
    bad.write_text("precison = 3\n")
    with pytest.raises(SystemExit):
        main(["verify", "hs-map-2", "--config", str(bad)])


def test_failing_dataset_exits_1(tmp_path, ds1):
    from belyi_cert.datainput import parse_dataset

    d = parse_dataset(ds1.to_toml())
    d.expect["order"] = 44_352_000
    path = tmp_path / "m.toml"
    path.write_text(d.to_toml())
    assert main(["group", str(path)]) == 1


def test_extra_samples_deterministic():
    a = extra_samples(6, 3)
    assert a == extra_samples(6, 3)
    assert len(set(a)) == 6 and 0 not in a and 1 not in a
