"""Syntax validation rules and golden-corpus agreement."""
from actionsmith.model import parse_workflow
from actionsmith.validator import Diagnostic, is_valid, validate

MINIMAL = "on: push\njobs:\n  build:\n    runs-on: ubuntu-latest\n    steps:\n      - run: make\n"


def diags_for(text: str) -> list[Diagnostic]:
    return validate(parse_workflow(text))


def rules(text: str) -> set[str]:
    return {d.rule for d in diags_for(text)}


def test_minimal_workflow_is_clean():
    assert diags_for(MINIMAL) == []


def test_parse_failure_is_r1():
    result = validate(parse_workflow("- a\n- b\n"))
    assert len(result) == 1
    assert result[0].rule == "R1"
    assert result[0].severity == "error"


def test_missing_on_is_r2():
    assert "R2" in rules("jobs:\n  b:\n    runs-on: x\n    steps: [{run: ls}]\n")


def test_empty_on_is_r2():
    assert "R2" in rules("on:\njobs:\n  b:\n    runs-on: x\n    steps: [{run: ls}]\n")


def test_missing_jobs_is_r3():
    assert "R3" in rules("on: push\n")
    assert "R3" in rules("on: push\njobs: {}\n")


def test_job_without_runs_on_is_r4():
    assert "R4" in rules("on: push\njobs:\n  b:\n    steps: [{run: ls}]\n")


def test_reusable_workflow_job_exempt_from_r4_r5():
    text = "on: push\njobs:\n  call:\n    uses: org/repo/.github/workflows/ci.yml@v1\n"
    assert rules(text) == set()


def test_job_without_steps_is_r5():
    assert "R5" in rules("on: push\njobs:\n  b:\n    runs-on: x\n")
    assert "R5" in rules("on: push\njobs:\n  b:\n    runs-on: x\n    steps: []\n")


def test_step_with_neither_uses_nor_run_is_r6():
    result = diags_for("on: push\njobs:\n  build:\n    runs-on: x\n    steps:\n      - name: Build\n")
    errors = [d for d in result if d.severity == "error"]
    assert len(errors) == 1
    assert errors[0].rule == "R6"
    assert errors[0].path == "jobs/build/steps/0"


def test_step_with_both_uses_and_run_is_r7():
    text = "on: push\njobs:\n  b:\n    runs-on: x\n    steps:\n      - uses: a/b@v1\n        run: make\n"
    assert "R7" in rules(text)


def test_unknown_top_level_key_is_warning_r8():
    result = diags_for("on: push\nmystery: 1\njobs:\n  b:\n    runs-on: x\n    steps: [{run: ls}]\n")
    assert [d.rule for d in result] == ["R8"]
    assert result[0].severity == "warning"


def test_known_top_level_extras_not_flagged():
    text = "on: push\nenv: {A: 1}\npermissions: read-all\nconcurrency: g\njobs:\n  b:\n    runs-on: x\n    steps: [{run: ls}]\n"
    assert rules(text) == set()


def test_unknown_event_is_r9():
    result = diags_for("on: pushh\njobs:\n  b:\n    runs-on: x\n    steps: [{run: ls}]\n")
    assert [d.rule for d in result] == ["R9"]
    assert result[0].severity == "error"
    assert result[0].path == "on/pushh"


def test_known_events_extensible():
    w = parse_workflow("on: custom_event\njobs:\n  b:\n    runs-on: x\n    steps: [{run: ls}]\n")
    assert not is_valid(w)
    assert is_valid(w, known_events=["custom_event"])


def test_bad_uses_reference_is_warning_r10():
    for bad in ("setup-python", "actions/checkout", "just words here"):
        result = diags_for(
            f"on: push\njobs:\n  b:\n    runs-on: x\n    steps:\n      - uses: {bad}\n")
        assert [d.rule for d in result] == ["R10"], bad
        assert result[0].severity == "warning"


def test_good_uses_references_pass_r10():
    for good in ("actions/checkout@v4", "a/b/sub/dir@main", "./.github/actions/local",
                 "docker://alpine:3.19"):
        text = f"on: push\njobs:\n  b:\n    runs-on: x\n    steps:\n      - uses: {good}\n"
        assert rules(text) == set(), good


def test_unknown_job_key_is_warning_r11():
    result = diags_for(
        "on: push\njobs:\n  b:\n    runs-on: x\n    retries: 3\n    steps: [{run: ls}]\n")
    assert [d.rule for d in result] == ["R11"]
    assert result[0].severity == "warning"


def test_matrix_reference_without_definition_is_r12():
    text = ("on: push\njobs:\n  b:\n    runs-on: ${{ matrix.os }}\n"
            "    strategy:\n      matrix:\n        arch: [x64]\n    steps: [{run: ls}]\n")
    result = diags_for(text)
    assert [d.rule for d in result] == ["R12"]
    assert result[0].severity == "error"


def test_matrix_reference_with_definition_passes():
    text = ("on: push\njobs:\n  b:\n    runs-on: ${{ matrix.os }}\n"
            "    strategy:\n      matrix:\n        os: [ubuntu-latest]\n    steps: [{run: ls}]\n")
    assert rules(text) == set()


def test_matrix_include_defines_variables():
    text = ("on: push\njobs:\n  b:\n    runs-on: ${{ matrix.runner }}\n"
            "    strategy:\n      matrix:\n        os: [linux]\n"
            "        include:\n          - os: linux\n            runner: ubuntu-latest\n"
            "    steps: [{run: ls}]\n")
    assert rules(text) == set()


def test_is_valid_ignores_warnings():
    w = parse_workflow("on: push\nmystery: 1\njobs:\n  b:\n    runs-on: x\n    steps: [{run: ls}]\n")
    assert is_valid(w)


def test_is_valid_false_on_parse_failure():
    assert not is_valid(parse_workflow(":::"))


def test_validate_deterministic(corpus_files):
    for path in corpus_files:
        w = parse_workflow(path.read_text())
        assert validate(w) == validate(w)


def test_golden_corpus_agreement(golden_files, golden_labels):
    # 100% valid/invalid verdict agreement with the reference-labeled corpus.
    disagreements = []
    for path in golden_files:
        verdict = "valid" if is_valid(parse_workflow(path.read_text())) else "invalid"
        if verdict != golden_labels[path.name]:
            disagreements.append(path.name)
    assert disagreements == []
    assert len(golden_files) == 40
