import json
from pathlib import Path

import jsonschema
import pytest

from omnilat.classify import classify_group, classify_order
from omnilat.cli import run
from omnilat.engine import SearchBudget, spectrum
from omnilat.groups import group_by_name
from omnilat.latin import LatinSquare, read_square_file, square_hash
from omnilat.reports import (
    SCHEMA_PATH,
    RunManifest,
    cache_dir,
    cache_load,
    cache_store,
    cached_spectrum,
    classification_to_dict,
    render_classification_markdown,
    render_spectrum_strip,
    render_spectrum_svg,
    report_from_dict,
    report_to_dict,
)
from omnilat.constructions import build_l_star


@pytest.fixture(scope="module")
def validator():
    return jsonschema.Draft202012Validator(json.loads(SCHEMA_PATH.read_text()))


def cayley(name) -> LatinSquare:
    g = group_by_name(name)
    return LatinSquare(tuple(tuple(r) for r in g.table))


def assert_valid(validator, doc):
    errors = list(validator.iter_errors(doc))
    assert not errors, errors[0].message if errors else None


# ---------------------------------------------------------------------------
# rendering


def test_strip_examples_from_known_squares():
    assert render_spectrum_strip(spectrum(build_l_star(1, 0))) == "4●5●6●7●8●"
    assert render_spectrum_strip(spectrum(cayley("Z7"))) == "4○5●6○7●"
    assert render_spectrum_strip(spectrum(cayley("Z1"))) == "1●"


def test_strip_legend_and_forbidden_glyph():
    rep = classify_group(group_by_name("Z8"))
    strip = render_spectrum_strip(rep, legend=True)
    line, legend = strip.splitlines()
    assert line == "4×5●6●7●8×"
    assert "forbidden" in legend and "achieved" in legend


def test_strip_timeout_glyph():
    rep = spectrum(cayley("Z12"), SearchBudget(node_limit=1))
    assert "?" in render_spectrum_strip(rep)


def test_svg_is_self_contained():
    rep = spectrum(build_l_star(1, 0))
    svg = render_spectrum_svg(rep)
    assert svg.startswith("<svg") and svg.endswith("</svg>")
    assert svg.count("<rect") == 5
    assert "href" not in svg and "url(" not in svg and "@import" not in svg


def test_markdown_table_shape():
    results = classify_order(6)
    md = render_classification_markdown(results)
    lines = md.splitlines()
    assert lines[0].startswith("| group ")
    assert len(lines) == 2 + len(results)
    assert "near-omniversal (mu=6)" in lines[2]


# ---------------------------------------------------------------------------
# serialisation


def test_report_round_trip_preserves_everything(validator):
    rep = classify_group(group_by_name("D8"))
    manifest = RunManifest(command=("groups", "classify", "--name", "D8"))
    d = report_to_dict(rep, manifest)
    assert_valid(validator, d)
    back = report_from_dict(d)
    assert report_to_dict(back) == report_to_dict(rep)
    assert back.verdict == rep.verdict and back.mu == rep.mu
    assert back.statuses[5].rule == rep.statuses[5].rule


def test_manifest_fields_complete():
    m = RunManifest(
        command=("spectrum", "--group", "Z7"),
        seed=7,
        jobs=2,
        input_hashes={"Z7": "ab" * 32},
    ).as_dict()
    assert set(m) == {
        "command",
        "seed",
        "budget",
        "jobs",
        "artifact_version",
        "input_hashes",
        "started",
        "finished",
    }
    assert m["finished"] >= m["started"]


def test_classification_dict_schema(validator):
    results = classify_order(6)
    d = classification_to_dict(results, RunManifest(command=("x",)))
    assert_valid(validator, d)
    assert d["missing_pairs"] == [["Z6", 6], ["D6", 6]]


def test_report_from_dict_rejects_other_versions():
    from omnilat.reports import ReportFormatError

    with pytest.raises(ReportFormatError):
        report_from_dict({"schema_version": 99, "kind": "spectrum"})


# ---------------------------------------------------------------------------
# cache


def test_cache_dir_honours_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("OMNILAT_CACHE_DIR", str(tmp_path / "elsewhere"))
    assert cache_dir() == tmp_path / "elsewhere"


def test_cache_round_trip_and_budget_classes():
    sq = build_l_star(1, 0)
    d1, hit1 = cached_spectrum(sq, SearchBudget(node_limit=50_000))
    assert not hit1
    _, hit2 = cached_spectrum(sq, SearchBudget(node_limit=10_000))
    assert hit2  # smaller cap satisfied by the stored run
    _, hit3 = cached_spectrum(sq, SearchBudget(node_limit=10**6))
    assert not hit3  # larger cap forces a recompute
    _, hit4 = cached_spectrum(sq, SearchBudget.exhaustive())
    assert not hit4  # an exhaustive verdict is never served from capped runs
    _, hit5 = cached_spectrum(sq, SearchBudget.exhaustive())
    assert hit5  # ... but once stored it is never recomputed
    d6, hit6 = cached_spectrum(sq, SearchBudget(node_limit=3))
    assert hit6 and d6["verdict"] == "omniversal"


def test_cache_wall_clock_budgets_never_stored():
    sq = cayley("Z5")
    _, hit = cached_spectrum(sq, SearchBudget(wall_secs=10.0))
    assert not hit
    assert not list(cache_dir().glob("*.json"))


def test_cache_corrupt_entry_evicted_and_rebuilt():
    sq = cayley("Z5")
    cached_spectrum(sq, SearchBudget.exhaustive())
    entry = next(cache_dir().glob("*.exhaustive.json"))
    entry.write_text("{not json")
    assert cache_load(sq, SearchBudget.exhaustive()) is None
    assert not entry.exists()  # evicted
    _, hit = cached_spectrum(sq, SearchBudget.exhaustive())
    assert not hit


def test_cache_disable_flag_bypasses_storage():
    sq = cayley("Z5")
    _, hit = cached_spectrum(sq, SearchBudget.exhaustive(), use_cache=False)
    assert not hit
    assert not list(cache_dir().glob("*.json"))


def test_cache_store_and_load_are_keyed_by_content():
    a = cayley("Z5")
    b = cayley("Z7")
    cache_store(a, SearchBudget.exhaustive(), report_to_dict(spectrum(a)))
    assert cache_load(b, SearchBudget.exhaustive()) is None
    got = cache_load(a, SearchBudget.exhaustive())
    assert got is not None and got["square_hash"] == square_hash(a)


# ---------------------------------------------------------------------------
# command line


def test_cli_construct_validate_round_trip(tmp_path, capsys):
    out = tmp_path / "m6.sq"
    assert run(["construct", "m-star", "--m", "1", "-o", str(out)]) == 0
    assert run(["square", "validate", str(out)]) == 0
    sq = read_square_file(out)
    assert sq.n == 6
    # stdout emission matches the file bytes exactly
    capsys.readouterr()
    assert run(["construct", "m-star", "--m", "1"]) == 0
    assert capsys.readouterr().out.encode() == out.read_bytes()


def test_cli_spectrum_json_and_svg(tmp_path, validator, capsys):
    j = tmp_path / "rep.json"
    s = tmp_path / "rep.svg"
    rc = run(
        ["spectrum", "--group", "Z7", "--exhaustive", "--json", str(j), "--svg", str(s)]
    )
    assert rc == 0
    captured = capsys.readouterr().out
    assert "4○5●6○7●" in captured
    doc = json.loads(j.read_text())
    assert_valid(validator, doc)
    assert doc["manifest"]["command"][0] == "spectrum"
    assert s.read_text().startswith("<svg")


def test_cli_certify_exit_codes(capsys):
    assert run(["certify", "--group", "D8", "--expect", "near-omniversal", "--mu", "5"]) == 0
    assert run(["certify", "--group", "D8", "--expect", "omniversal"]) == 1
    assert run(["certify", "--group", "D8", "--expect", "near-omniversal", "--mu", "4"]) == 1


def test_cli_undecided_exits_three(capsys):
    rc = run(["spectrum", "--group", "Z12", "--budget-nodes", "5", "--no-cache"])
    assert rc == 3
    rc = run(["certify", "--group", "Z12", "--budget-nodes", "5", "--no-cache",
              "--expect", "other"])
    assert rc == 3


def test_cli_usage_errors_exit_two(capsys):
    assert run(["spectrum", "--group", "NoSuchGroup", "--exhaustive"]) == 2
    assert run(["witness", "l-star", "--m", "1", "--q", "0", "--length", "99"]) == 2
    assert run(["extend", "--group", "Z6", "--rows", "0,banana", "--cols", "0"]) == 2
    # an explicit budget is demanded above the default range
    assert run(["spectrum", "--group", "Z4:Z5"]) == 2
    with pytest.raises(SystemExit) as exc:
        run(["no-such-command"])
    assert exc.value.code == 2


def test_cli_witness_json_validates(tmp_path, validator):
    j = tmp_path / "w.json"
    rc = run(["witness", "l-star", "--m", "1", "--q", "1", "--length", "7",
              "--json", str(j)])
    assert rc == 0
    doc = json.loads(j.read_text())
    assert_valid(validator, doc)
    assert doc["length"] == 7 and len(doc["triples"]) == 7


def test_cli_groups_list_and_export(tmp_path, capsys):
    assert run(["groups", "list", "--order", "8"]) == 0
    out = capsys.readouterr().out
    assert "Q8" in out and "D8" in out
    path = tmp_path / "d8.grp"
    assert run(["groups", "export", "--name", "D8", "-o", str(path)]) == 0
    assert path.exists()


def test_cli_classify_json(tmp_path, validator, capsys):
    j = tmp_path / "c.json"
    rc = run(["groups", "classify", "--name", "Z9", "--exhaustive", "--json", str(j)])
    assert rc == 0
    doc = json.loads(j.read_text())
    assert_valid(validator, doc)
    assert doc["groups"][0]["missing"] == [5, 6, 8]


def test_cli_classify_all_deterministic_across_jobs(tmp_path, capsys):
    base = {}
    for jobs in ("1", "2"):
        j = tmp_path / f"all{jobs}.json"
        rc = run(["groups", "classify-all", "--max-order", "6", "--exhaustive",
                  "--jobs", jobs, "--json", str(j)])
        assert rc == 0
        doc = json.loads(j.read_text())
        doc.pop("manifest")
        base[jobs] = _scrub_timing(doc)
    assert base["1"] == base["2"]


def _scrub_timing(d):
    if isinstance(d, dict):
        return {k: _scrub_timing(v) for k, v in d.items() if k not in ("millis", "elapsed_secs")}
    if isinstance(d, list):
        return [_scrub_timing(v) for v in d]
    return d


def test_cli_conjecture_sweep_jsonl(tmp_path, validator, capsys):
    out = tmp_path / "sweep.jsonl"
    rc = run(["conjecture41", "--trials", "4", "--seed", "3", "--order-max", "12",
              "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 4
    for line in lines:
        assert_valid(validator, json.loads(line))


def test_cli_embed_check_exit_codes(tmp_path, capsys):
    rect = tmp_path / "rect.txt"
    rect.write_text("0 1\n1 0\n")
    assert run(["embed-check", str(rect), "--order", "4"]) == 0
    assert run(["embed-check", str(rect), "--order", "3"]) == 1


def test_cli_species_census(tmp_path, validator, capsys):
    j = tmp_path / "sp.json"
    rc = run(["square", "species", "--order", "4", "--spectra", "--json", str(j)])
    assert rc == 0
    doc = json.loads(j.read_text())
    assert_valid(validator, doc)
    assert doc["species_count"] == 2
    out = capsys.readouterr().out
    assert "2 species" in out


def test_cli_spectrum_cache_hit_message(tmp_path, capsys):
    assert run(["spectrum", "--group", "Z5", "--exhaustive"]) == 0
    capsys.readouterr()
    assert run(["spectrum", "--group", "Z5", "--exhaustive"]) == 0
    assert "served from cache" in capsys.readouterr().err
