"""The command line: exit codes, report shapes, determinism, and the
cover/replay byte contract."""
from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from sortedgroups import cli, csys, fixtures
from sortedgroups.fingroup import is_isomorphic

from conftest import klein_group

FIXDIR = Path(__file__).resolve().parent.parent / "fixtures"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, json.loads(out), out


# --- validate ---------------------------------------------------------------

def test_validate_accepts_a_clean_fixture(capsys):
    code, doc, _ = run(capsys, "validate", FIXDIR / "klein-corrected.json")
    assert code == 0
    assert doc["ok"] is True
    assert doc["subjects"][0]["findings"] == []
    assert doc["subjects"][0]["system_findings"] == []


def test_validate_records_verbatim_findings_without_failing(capsys):
    code, doc, _ = run(capsys, "validate", FIXDIR / "klein-verbatim.json")
    assert code == 0
    assert doc["ok"] is True
    subject = doc["subjects"][0]
    assert subject["verbatim"] is True
    assert len(subject["findings"]) == 3
    assert all("missing at {0}" in f for f in subject["findings"])


def test_validate_fails_the_same_defect_without_the_marker(capsys, tmp_path):
    doc = json.loads((FIXDIR / "klein-verbatim.json").read_text())
    del doc["sorted_groups"]["F"]["verbatim"]
    path = tmp_path / "unmarked.json"
    path.write_text(fixtures.canonical_dumps(doc))
    code, report, _ = run(capsys, "validate", path)
    assert code == 1
    assert report["ok"] is False
    assert len(report["subjects"][0]["findings"]) == 3


def test_validate_rejects_garbage_with_exit_2(capsys, tmp_path):
    path = tmp_path / "garbage.json"
    path.write_text("]]]")
    code, doc, _ = run(capsys, "validate", path)
    assert code == 2
    assert doc["kind"] == "error"


def test_validate_rejects_a_foreign_schema_with_exit_2(capsys, tmp_path):
    path = tmp_path / "foreign.json"
    path.write_text('{"schema": "other/1", "name": "x"}\n')
    code, doc, _ = run(capsys, "validate", path)
    assert code == 2
    assert "unsupported schema" in doc["error"]


# --- sep --------------------------------------------------------------------

def test_sep_true_exits_zero_without_witness(capsys):
    for mode in ("pushforward_only", "exhaustive"):
        code, doc, _ = run(capsys, "sep", FIXDIR / "klein-full.json",
                           "--mode", mode)
        assert code == 0
        assert doc["holds"] is True
        assert doc["witness"] is None


def test_sep_false_exits_one_with_the_least_witness(capsys):
    code, doc, _ = run(capsys, "sep", FIXDIR / "klein-walkthrough.json")
    assert code == 1
    assert doc["holds"] is False
    w = doc["witness"]
    assert w["Pi"] == [0, 1]
    assert w["phi"] == [0, 0, 1, 1]
    assert w["lift"] is None
    assert len(w["B"]["group"]["table"]) == 2


def test_sep_formation_restrictions(capsys):
    # the walkthrough failure lives over abelian 2-group quotients, so the
    # restricted searches still find it
    for formation in ("abelian", "pgroup"):
        code, doc, _ = run(capsys, "sep", FIXDIR / "klein-walkthrough.json",
                           "--formation", formation)
        assert code == 1, formation
    code, doc, _ = run(capsys, "sep", FIXDIR / "s3-full.json",
                       "--formation", "abelian")
    assert code == 0


# --- cover and replay -------------------------------------------------------

def test_cover_writes_the_certificate_it_prints(capsys, tmp_path):
    cert = tmp_path / "walk.cert.json"
    code, doc, out = run(capsys, "cover", FIXDIR / "klein-walkthrough.json",
                         "--emit-cert", cert)
    assert code == 0
    assert cert.read_text() == out
    assert doc["kind"] == "cover_certificate"
    assert [s["kind"] for s in doc["steps"]] == ["data_step", "data_step"]
    assert doc["composite"] == [0, 1, 2, 3]


def test_cover_then_replay_is_byte_identical(capsys, tmp_path):
    cert = tmp_path / "walk.cert.json"
    run(capsys, "cover", FIXDIR / "klein-walkthrough.json",
        "--emit-cert", cert)
    before = cert.read_bytes()
    code, doc, _ = run(capsys, "replay", cert)
    assert code == 0
    assert doc["identical"] is True
    assert cert.read_bytes() == before


def test_replay_honours_the_recorded_tie_break(capsys, tmp_path):
    cert = tmp_path / "rev.cert.json"
    run(capsys, "cover", FIXDIR / "klein-walkthrough.json",
        "--tie-break", "reversed", "--emit-cert", cert)
    code, doc, _ = run(capsys, "replay", cert)
    assert code == 0
    assert doc["identical"] is True


def test_replay_flags_a_tampered_certificate(capsys, tmp_path):
    cert = tmp_path / "tampered.cert.json"
    run(capsys, "cover", FIXDIR / "klein-walkthrough.json",
        "--emit-cert", cert)
    doc = json.loads(cert.read_text())
    doc["composite"] = list(reversed(doc["composite"]))
    cert.write_text(fixtures.canonical_dumps(doc))
    code, report, _ = run(capsys, "replay", cert)
    assert code == 1
    assert report["identical"] is False
    assert report["first_divergence"] > 0


def test_replay_rejects_non_certificates(capsys, tmp_path):
    missing = tmp_path / "absent.json"
    code, doc, _ = run(capsys, "replay", missing)
    assert code == 2
    notjson = tmp_path / "notjson.json"
    notjson.write_text("{{{")
    code, doc, _ = run(capsys, "replay", notjson)
    assert code == 2
    wrongkind = tmp_path / "wrongkind.json"
    wrongkind.write_text('{"schema": "sortedgroups/1", "kind": "other"}\n')
    code, doc, _ = run(capsys, "replay", wrongkind)
    assert code == 2
    assert "not a cover certificate" in doc["error"]


def test_cover_step_cap_exits_three(capsys):
    code, doc, _ = run(capsys, "cover", FIXDIR / "klein-walkthrough.json",
                       "--max-steps", 1)
    assert code == 3
    assert doc["outcome"] == "cap_exceeded"
    assert doc["reason"] == "no cover within 1 steps"


def test_cover_order_cap_exits_three(capsys):
    code, doc, _ = run(capsys, "cover", FIXDIR / "z2xz4-full.json",
                       "--max-order", 8)
    assert code == 3
    assert doc["reason"] == "stage order 16 exceeds the cap 8"


def test_cover_is_deterministic_across_runs(capsys):
    _, _, first = run(capsys, "cover", FIXDIR / "klein-walkthrough.json")
    _, _, second = run(capsys, "cover", FIXDIR / "klein-walkthrough.json")
    assert first == second


# --- system -----------------------------------------------------------------

def test_system_report_counts_the_klein_tower(capsys):
    code, doc, _ = run(capsys, "system", FIXDIR / "klein-full.json")
    assert code == 0
    stats = doc["statistics"]
    assert stats == {"omega_stable": True, "members": 156,
                     "classes": 5, "sorts": 6}


def test_system_depth_one_has_singleton_sorts(capsys):
    code, doc, _ = run(capsys, "system", FIXDIR / "klein-full.json",
                       "--K", 1)
    assert code == 0
    assert doc["system"]["classes"] == ["{0,1,2,3}"]
    stats = doc["statistics"]
    # one class with a one-point fiber: every sort holds exactly one member
    assert stats["members"] == stats["sorts"] == 6


def test_system_report_round_trips_to_an_isomorphic_dual(capsys):
    _, doc, _ = run(capsys, "system", FIXDIR / "klein-full.json")
    S = fixtures.system_from_json(doc["system"])
    assert csys.validate_scs(S).ok
    D = csys.dual_group(S)
    assert is_isomorphic(D.group, klein_group()) is not None


def test_system_cosep_flag_reports_the_blocked_pair(capsys):
    code, doc, _ = run(capsys, "system", FIXDIR / "klein-walkthrough.json",
                       "--check-cosep")
    assert code == 1
    assert doc["cosep"]["holds"] is False
    w = doc["cosep"]["witness"]
    assert w["Pi"]["base"] == w["Phi"]["base"] == "{0,1}"
    assert w["Pi"]["n_star"] == "{0,1}"
    assert w["Phi"]["n_star"] == "{0,3}"


def test_system_cosep_flag_passes_the_corrected_data(capsys):
    code, doc, _ = run(capsys, "system", FIXDIR / "klein-corrected.json",
                       "--check-cosep")
    assert code == 0
    assert doc["cosep"] == {"holds": True, "witness": None}


def test_system_reports_are_byte_identical_across_runs(capsys):
    _, _, first = run(capsys, "system", FIXDIR / "s3-full.json")
    _, _, second = run(capsys, "system", FIXDIR / "s3-full.json")
    assert first == second


# --- wiring -----------------------------------------------------------------

def test_usage_errors_exit_two():
    with pytest.raises(SystemExit) as exc:
        cli.main(["sep"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["unknown-command"])
    assert exc.value.code == 2


def test_console_entry_point_runs_in_a_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "sortedgroups.cli", "sep",
         str(FIXDIR / "klein-full.json")],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["holds"] is True
