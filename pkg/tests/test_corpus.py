import json

from jointfeas.cli import run
from jointfeas.corpus import corpus_dir, load_cases, run_corpus


def test_bundled_corpus_all_pass():
    results = run_corpus()
    failed = [r for r in results if not r.passed]
    assert not failed, failed


def test_every_case_carries_an_anchor():
    for case in load_cases():
        assert case["anchor"], case["id"]
        assert case["id"], case["_path"]


def test_coverage_of_required_topics():
    ids = {case["id"] for case in load_cases()}
    required = {
        "triple_moment_grid",
        "chsh_grid",
        "counterexample_three_valued",
        "counterexample_rescaled",
        "counterexample_nonzero_means",
        "bell_not_sufficient",
        "bell_not_necessary",
        "bell_quantum_bisector",
        "ghz_default",
        "gaussian_equicorrelation_boundary",
        "gaussian_violation",
        "pushforward_pair_sums",
        "exchangeable_grid",
    }
    assert required <= ids


def test_corpus_drift_detected(tmp_path, capsys):
    # copy a few light cases, edit one expected value, expect FAIL + exit 1
    src = corpus_dir()
    for name in (
        "bell_not_sufficient_inequality.json",
        "bell_not_necessary_inequality.json",
        "chsh_boundary.json",
    ):
        (tmp_path / name).write_text((src / name).read_text(encoding="utf-8"))
    target = tmp_path / "bell_not_sufficient_inequality.json"
    case = json.loads(target.read_text())
    case["expected"]["slack"] = "1/3"
    target.write_text(json.dumps(case))
    code = run(["corpus", "--dir", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 1
    assert "FAIL  bell_not_sufficient_inequality" in out
    assert "expected '1/3'" in out


def test_corpus_json_summary(tmp_path, capsys):
    src = corpus_dir()
    for name in ("chsh_boundary.json", "bell_not_necessary_inequality.json"):
        (tmp_path / name).write_text((src / name).read_text(encoding="utf-8"))
    code = run(["corpus", "--json", "--dir", str(tmp_path)])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["passed"] == payload["total"] == 2
    assert all(c["status"] == "PASS" for c in payload["cases"])


def test_feasible_corpus_problems_yield_factorizing_models():
    """The constructive direction, exhibited: every feasible moment
    problem in the corpus gives a witness whose deterministic model
    factorizes fully and recomposes the witness exactly."""
    from jointfeas import construct_deterministic, decide, verify_factorization
    from jointfeas.files import parse_problem

    exercised = 0
    for case in load_cases():
        if case["kind"] != "decide":
            continue
        parsed = parse_problem(case["problem"])
        result = decide(parsed["problem"])
        if not result.feasible:
            continue
        model = construct_deterministic(result.witness)
        assert verify_factorization(model, "full").ok
        assert verify_factorization(model, 2).ok
        assert model.mixture().mass == result.witness.mass
        exercised += 1
    assert exercised >= 3


def test_corpus_env_override(tmp_path, monkeypatch, capsys):
    src = corpus_dir()
    name = "chsh_boundary.json"
    (tmp_path / name).write_text((src / name).read_text(encoding="utf-8"))
    monkeypatch.setenv("JOINTFEAS_CORPUS", str(tmp_path))
    code = run(["corpus"])
    out = capsys.readouterr().out
    assert code == 0
    assert "1/1 cases passed" in out
