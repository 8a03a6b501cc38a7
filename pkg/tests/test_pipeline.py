import json
import random
import re

import pytest

from belyi_cert.datainput import load_dataset, parse_dataset
from belyi_cert.pipeline import STAGES, PipelineConfig, run_pipeline
from belyi_cert.report import Check, VerificationReport

FAST = PipelineConfig(skip=("disc", "monodromy", "dessin"))


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        PipelineConfig(skip=("bogus",))
    with pytest.raises(ValueError):
        PipelineConfig(min_samples=0)
    with pytest.raises(ValueError):
        PipelineConfig.from_dict({"precison": 100})
    path = tmp_path / "cfg.toml"
    path.write_text('[pipeline]\nprecision = 256\nskip = ["dessin"]\ndisc_samples_t = ["3", "5"]\n')
    cfg = PipelineConfig.from_toml(path)
    assert cfg.precision == 256 and cfg.skip == ("dessin",) and cfg.disc_samples_t == ("3", "5")
    assert PipelineConfig.from_dict(cfg.to_dict() | {"skip": list(cfg.skip)}) == cfg


def test_check_status_is_validated():
    with pytest.raises(ValueError):
        Check("x", "ref", "maybe", {})
    r = VerificationReport("d", [Check("a", "r", "pass", {}), Check("b", "r", "evidence", {})])
    assert r.verdict == "pass"
    r.extend([Check("c", "r", "evidence-fail", {})])
    assert r.verdict == "fail" and [c.id for c in r.failures()] == ["c"]


@pytest.fixture(scope="module")
def fast_reports():
    return {n: run_pipeline(load_dataset(n), FAST) for n in ("hs-map-1", "hs-map-2")}


def test_fast_pipeline_passes(fast_reports):
    for rep in fast_reports.values():
        assert rep.verdict == "pass", [c.id for c in rep.failures()]
        assert "Aut(HS)" in rep.conclusion
        assert "external fact" in rep.conclusion
        ids = {c.id for c in rep.checks}
        assert {"group.order", "group.odd_permutation", "r.squarefree_split",
                "ramification.W_identity", "riemann_hurwitz.triple"} <= ids
        assert any(c.status == "external" for c in rep.checks)


def test_report_json_is_deterministic(fast_reports):
    rep = fast_reports["hs-map-1"]
    a = rep.to_json(timings=False)
    b = run_pipeline(load_dataset("hs-map-1"), FAST).to_json(timings=False)
    assert a == b
    data = json.loads(a)
    assert data["verdict"] == "pass"
    assert all("seconds" not in c for c in data["checks"])


def test_blocked_stages_on_parse_error(ds1):
    d = parse_dataset(ds1.to_toml())
    d.triple_text["x"] = d.triple_text["x"] + "(1"
    rep = run_pipeline(d, FAST)
    assert rep.verdict == "fail"
    ids = {c.id for c in rep.failures()}
    assert "parse.x" in ids and "group.blocked" in ids


# --- mutations ---------------------------------------------------------------

def mutate_label(d, rng):
    key = rng.choice(sorted(d.triple_text))
    text = d.triple_text[key]
    nums = list(re.finditer(r"\d+", text))
    m = rng.choice(nums)
    old = int(m.group())
    new = old
    while new == old:
        new = rng.randint(1, d.degree)
    d.triple_text[key] = text[:m.start()] + str(new) + text[m.end():]
    return "%s label %d -> %d" % (key, old, new)


def mutate_coefficient(d, rng):
    key = rng.choice(["p", "q"])
    text = d.map_text[key]
    # integers not directly after '^' are coefficients or constants
    nums = [m for m in re.finditer(r"\d+", text) if text[m.start() - 1] != "^"]
    m = rng.choice(nums)
    old = int(m.group())
    new = old + rng.choice([-1, 1]) * rng.randint(1, 3)
    if new <= 0:
        new = old + 1
    d.map_text[key] = text[:m.start()] + str(new) + text[m.end():]
    return "%s coefficient %d -> %d" % (key, old, new)


def mutate_exponent(d, rng):
    key = rng.choice(["p", "q"])
    text = d.map_text[key]
    nums = [m for m in re.finditer(r"\d+", text) if text[m.start() - 1] == "^"]
    m = rng.choice(nums)
    old = int(m.group())
    new = old + 1 if old < 2 or rng.random() < 0.5 else old - 1
    d.map_text[key] = text[:m.start()] + str(new) + text[m.end():]
    return "%s exponent %d -> %d" % (key, old, new)


MUTATORS = (mutate_label, mutate_coefficient, mutate_exponent)


def mutation_cases(count=24, seed=2024):
    rng = random.Random(seed)
    return [(("hs-map-1", "hs-map-2")[i % 2], MUTATORS[i % 3], rng.randrange(10 ** 6))
            for i in range(count)]


def run_mutation(name, mutator, seed):
    d = parse_dataset(load_dataset(name).to_toml())
    what = mutator(d, random.Random(seed))
    rep = run_pipeline(d, FAST)
    return what, rep


@pytest.mark.parametrize("name, mutator, seed", mutation_cases(),
                         ids=lambda v: getattr(v, "__name__", str(v)))
def test_mutation_flips_verdict(name, mutator, seed):
    what, rep = run_mutation(name, mutator, seed)
    assert rep.verdict == "fail", what
    assert rep.failures() and all(c.status in ("fail", "evidence-fail") for c in rep.failures())


def test_stage_list():
    assert STAGES[0] == "validate" and set(FAST.skip) < set(STAGES)
