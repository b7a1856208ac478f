from __future__ import annotations

import json
import shutil

import pytest
import yaml

from ricaudit.errors import FixtureDrift
from ricaudit.fixtures import fixture_root, load_index, verify_fixtures
from ricaudit.rules import builtin_catalog, evaluate
from ricaudit.manifests import load_directory
from ricaudit.severity import SeverityClass
from ricaudit.vulns import parse_scan_report


def test_pristine_corpus_verifies():
    checks = verify_fixtures()
    assert checks
    assert all(check.ok for check in checks)


def test_deleted_cve_entry_reported_as_drift(tmp_path):
    root = tmp_path / "fixtures"
    shutil.copytree(fixture_root(), root)
    report_path = root / "scan-reports" / "influxdb2.json"
    report = json.loads(report_path.read_text())
    removed = report["entries"].pop(0)
    report_path.write_text(json.dumps(report))

    with pytest.raises(FixtureDrift) as exc:
        verify_fixtures(root)
    assert "influxdb2" in exc.value.cell


def test_edited_manifest_reported_as_drift(tmp_path):
    root = tmp_path / "fixtures"
    shutil.copytree(fixture_root(), root)
    manifest = root / "manifests" / "vulnerable" / "workloads" / "ricplt-e2term.yaml"
    doc = yaml.safe_load(manifest.read_text())
    container = doc["spec"]["template"]["spec"]["containers"][0]
    container["securityContext"] = {"allowPrivilegeEscalation": False}
    manifest.write_text(yaml.safe_dump(doc))

    with pytest.raises(FixtureDrift) as exc:
        verify_fixtures(root)
    assert "ricplt-e2term.misconfigurations" in exc.value.cell


def test_index_lists_every_asset():
    root = fixture_root()
    listed = {entry["path"] for entry in load_index(root)["assets"]}
    actual = {str(p.relative_to(root)) for p in root.rglob("*") if p.is_file()}
    assert listed == actual


def test_index_entries_carry_provenance():
    index = load_index()
    for entry in index["assets"]:
        assert entry["source"] in {"reference-assessment", "constructed"}
        assert entry["reproduces"]


def test_critical_flags_in_scan_reports():
    # Exactly 10 distinct Critical ids carry the RCE flag and 13 carry a
    # fixed version across the whole corpus.
    rce, actionable = set(), set()
    for path in (fixture_root() / "scan-reports").glob("*.json"):
        for record in parse_scan_report(path.read_bytes()).records:
            if record.severity is SeverityClass.CRITICAL:
                if record.remote_code_execution:
                    rce.add(record.cve_id)
                if record.actionable:
                    actionable.add(record.cve_id)
    assert len(rce) == 10
    assert len(actionable) == 13


def test_hardened_variants_fire_no_named_rules():
    load = load_directory(fixture_root() / "manifests" / "hardened")
    findings = evaluate(builtin_catalog(), load.documents)
    named = {"MISC-LIMITS", "MISC-SECRETS-LIST", "MISC-PRIVESC", "MISC-ANON", "MISC-CREDS"}
    assert not [f for f in findings if f.rule_id in named]


def test_recorded_occurrence_sum_and_reported_total_differ():
    totals = load_index()["expected"]["totals"]
    assert totals["vulnerability_occurrences"] == 888
    assert totals["reported_cumulative_total"] == 792
    assert totals["vulnerability_occurrences"] != totals["reported_cumulative_total"]
    assert totals["unique_cves"] not in (
        totals["vulnerability_occurrences"],
        totals["reported_cumulative_total"],
    )
