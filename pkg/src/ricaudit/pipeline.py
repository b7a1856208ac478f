"""Composition helpers shared by the CLI and the fixture verifier.

Each audit workflow (manifest scan, vulnerability ingestion, compliance
scoring, version audit) is a pure function pipeline over the module APIs;
this module wires them into AuditResults without any terminal I/O.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .catalogs import CatalogBundle, load_catalog_file
from .compliance import Framework, FrameworkScore, score_framework
from .manifests import DirectoryLoad, ResourceDocument, load_directory
from .report import AuditResult
from .rules import Finding, Rule, builtin_catalog, evaluate, group_findings_by_app, validate_catalog
from .versions import AdvisoryEntry, VersionAudit, audit_components, bundled_advisories
from .vulns import (
    ScanReport,
    VulnRecord,
    VulnTotals,
    aggregate_by_container,
    occurrence_and_unique_totals,
    parse_scan_report,
)
from .compliance import bundled_frameworks


def default_timestamp() -> str:
    """UTC timestamp for the report; SOURCE_DATE_EPOCH pins it for CI."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        moment = datetime.now(tz=timezone.utc)
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class Catalogs:
    """Builtin catalogs merged with user-supplied data files."""

    rules: list[Rule] = field(default_factory=list)
    frameworks: list[Framework] = field(default_factory=list)
    advisories: list[AdvisoryEntry] = field(default_factory=list)


def load_catalogs(user_paths: Iterable[str | Path] = ()) -> Catalogs:
    """Builtin rules, frameworks, and advisories plus any user data files.

    User entries extend the builtins; a user rule or framework that reuses
    a builtin id replaces it (so e.g. the registry allow-list can be
    overridden without forking the whole catalog). Advisories only extend.
    The merged rule catalog is validated before anything is evaluated.
    """
    rules_by_id = {rule.id: rule for rule in builtin_catalog()}
    frameworks_by_id = {fw.id: fw for fw in bundled_frameworks()}
    advisories = bundled_advisories()
    for path in user_paths:
        bundle: CatalogBundle = load_catalog_file(path)
        for rule in bundle.rules:
            rules_by_id[rule.id] = rule
        for framework in bundle.frameworks:
            frameworks_by_id[framework.id] = framework
        advisories.extend(bundle.advisories)
    catalogs = Catalogs(
        rules=list(rules_by_id.values()),
        frameworks=list(frameworks_by_id.values()),
        advisories=advisories,
    )
    validate_catalog(catalogs.rules, catalogs.frameworks)
    return catalogs


def load_manifest_inputs(
    paths: Sequence[str | Path], namespace: str | None = None
) -> DirectoryLoad:
    """Load every input path (file or tree) into one ordered document list."""
    combined = DirectoryLoad()
    namespaces = [namespace] if namespace else None
    for path in paths:
        load = load_directory(path, namespaces=namespaces)
        combined.documents.extend(load.documents)
        combined.errors.extend(load.errors)
    return combined


def parse_scan_reports(paths: Sequence[str | Path]) -> list[ScanReport]:
    reports = []
    for path in paths:
        reports.append(parse_scan_report(Path(path).read_bytes()))
    return reports


def score_all(
    frameworks: Sequence[Framework],
    findings: Sequence[Finding],
    resources: Sequence[ResourceDocument],
    catalog: Sequence[Rule],
) -> list[FrameworkScore]:
    return [
        score_framework(framework, findings, resources, catalog)[0]
        for framework in frameworks
    ]


def build_result(
    *,
    records: Sequence[VulnRecord] = (),
    findings: Sequence[Finding] = (),
    resources: Sequence[ResourceDocument] = (),
    framework_scores: Sequence[FrameworkScore] = (),
    version_audit: VersionAudit | None = None,
    generated_at: str | None = None,
) -> AuditResult:
    """Assemble one AuditResult from whatever workflows actually ran."""
    misconfig_map = group_findings_by_app(list(findings), list(resources))
    summaries = aggregate_by_container(list(records), misconfig_map)
    totals: VulnTotals = occurrence_and_unique_totals(records)
    return AuditResult(
        summaries=tuple(summaries),
        findings=tuple(findings),
        framework_scores=tuple(framework_scores),
        version_findings=tuple(version_audit.findings) if version_audit else (),
        totals=totals,
        generated_at=generated_at if generated_at is not None else default_timestamp(),
        tool_version=__version__,
    )


def run_manifest_audit(
    resources: Sequence[ResourceDocument], catalogs: Catalogs
) -> list[Finding]:
    return evaluate(catalogs.rules, resources)


def run_version_audit(
    inventory: Sequence[tuple[str, str]], catalogs: Catalogs
) -> VersionAudit:
    return audit_components(inventory, catalogs.advisories)
