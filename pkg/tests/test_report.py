import json

import jsonschema
import pytest

from polycert import ProbeConfig, SampleConfig, Tolerance, load_problem, run_certificate
from polycert.report import Report, build_report, format_human, load_schema
from polycert.sampling import estimate_alpha


def _report(problem, config=SampleConfig(count=2000), **kw):
    probe = kw.pop("probe", None)
    out = run_certificate(problem, config, Tolerance(), probe=probe, **kw)
    return build_report(problem, out, config=config, tol=Tolerance(), probe_enabled=probe is not None)


def test_schema_is_valid():
    jsonschema.Draft202012Validator.check_schema(load_schema())


def test_every_corpus_report_validates(corpus_files):
    schema = load_schema()
    for path in corpus_files:
        p = load_problem(path)
        for kw in ({}, {"probe": ProbeConfig(restarts=4)}, {"exhaustive": True}):
            rep = _report(p, SampleConfig(count=2000, delta=0.01, alpha_floor=0.2), **kw)
            jsonschema.validate(json.loads(rep.to_json()), schema)


def test_round_trip(example_problem):
    rep = _report(example_problem, extra_directions=[(1, 1)])
    again = Report.from_json(rep.to_json())
    assert again == rep
    assert again.to_json() == rep.to_json()


def test_verdict_consistency(example_problem):
    rep = _report(example_problem, extra_directions=[(1, 1)])
    assert rep.verdict == "unbounded" and rep.direction is not None
    assert rep.robustness == {"class": "degenerate", "vanishing_indices": [0]}
    assert rep.sample_index == "user"
    rep = _report(example_problem)
    assert rep.verdict == "inconclusive" and rep.direction is None
    assert [r["alpha_floor"] for r in rep.statistics["residual_table"]] == [0.1, 0.05, 0.01, 0.001]


def test_required_samples_and_alpha_estimate(corpus_files):
    p = load_problem([f for f in corpus_files if f.name == "quartic.pop"][0])
    config = SampleConfig(count=4000, delta=0.01)
    out = run_certificate(p, config)
    est = estimate_alpha(p, config)
    rep = build_report(p, out, config=config, tol=Tolerance(), alpha_estimate=est)
    rows = {r["alpha_floor"]: r["N"] for r in rep.statistics["required_samples"]}
    assert rows[0.1] == 44
    assert rep.statistics["alpha_estimate"]["samples"] == 4000
    text = format_human(rep)
    assert "required N" in text and "alpha hat" in text


def test_timing_excluded_on_request(example_problem):
    rep = _report(example_problem)
    assert "timing" in json.loads(rep.to_json())
    assert "timing" not in json.loads(rep.to_json(timing=False))
    assert rep.timing["per_1000_samples_ms"] >= 0


def test_human_format(example_problem):
    text = format_human(_report(example_problem, extra_directions=[(1, 1)]))
    assert "UNBOUNDED" in text and "degenerate" in text and "witness T" in text
