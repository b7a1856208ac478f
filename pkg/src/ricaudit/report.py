"""Report rendering: fixed-width table, canonical JSON, exit codes.

The JSON document is the stable CI contract: keys sorted, no insignificant
whitespace, byte-identical across runs for equal inputs. `generated_at` is
the one run-dependent field; `canonical_equal` compares documents with it
masked out so reproducibility checks stay meaningful.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .severity import TABLE_ORDER, SeverityClass
from .versions import VersionFinding, VersionPredicate, AdvisoryEntry, parse_version
from .vulns import ContainerScanSummary, ImageRef, VulnTotals
from .rules import Finding
from .compliance import FrameworkScore

SCHEMA_VERSION = "1"

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_TOOL_ERROR = 2


@dataclass(frozen=True)
class AuditResult:
    """Everything one audit run produced, ready for rendering."""

    summaries: tuple[ContainerScanSummary, ...] = ()
    findings: tuple[Finding, ...] = ()
    framework_scores: tuple[FrameworkScore, ...] = ()
    version_findings: tuple[VersionFinding, ...] = ()
    totals: VulnTotals = VulnTotals(0, 0, 0, 0)
    generated_at: str = ""
    tool_version: str = ""

    def __post_init__(self) -> None:
        histogram_sum = sum(
            count for s in self.summaries for count in s.vuln_histogram.values()
        )
        if histogram_sum != self.totals.occurrences:
            raise ValueError(
                f"totals inconsistent with summaries: histograms sum to {histogram_sum}, "
                f"totals.occurrences is {self.totals.occurrences}"
            )
        ids = [s.framework_id for s in self.framework_scores]
        if len(ids) != len(set(ids)):
            raise ValueError("framework score ids must be unique")

    def critical_occurrences(self) -> int:
        return sum(s.vuln_histogram[SeverityClass.CRITICAL] for s in self.summaries)


def _histogram_payload(histogram: Mapping[SeverityClass, int]) -> dict[str, int]:
    return {cls.name.lower(): int(histogram.get(cls, 0)) for cls in TABLE_ORDER}


def _histogram_from_payload(payload: Mapping[str, int]) -> dict[SeverityClass, int]:
    return {cls: int(payload.get(cls.name.lower(), 0)) for cls in TABLE_ORDER}


def to_payload(result: AuditResult) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": result.tool_version,
        "generated_at": result.generated_at,
        "containers": [
            {
                "container": s.container,
                "image": (
                    {"registry": s.image.registry, "repository": s.image.repository,
                     "tag": s.image.tag}
                    if s.image
                    else None
                ),
                "vulnerabilities": _histogram_payload(s.vuln_histogram),
                "misconfigurations": _histogram_payload(s.misconfig_histogram),
            }
            for s in result.summaries
        ],
        "findings": [
            {
                "rule_id": f.rule_id,
                "resource": f.resource,
                "severity": f.severity.name.lower(),
                "message": f.message,
                "remediation": f.remediation,
            }
            for f in result.findings
        ],
        "framework_scores": [
            {
                "framework_id": s.framework_id,
                "percent": s.percent,
                "evaluated_controls": s.evaluated_controls,
                "not_applicable_controls": s.not_applicable_controls,
            }
            for s in result.framework_scores
        ],
        "version_findings": [
            {
                "component": v.component,
                "installed": str(v.installed),
                "severity": v.severity.name.lower(),
                "cve_count": v.matched_entry.cve_count,
                "cvss_min": v.matched_entry.cvss_min,
                "cvss_max": v.matched_entry.cvss_max,
                "affected": str(v.matched_entry.affected),
                "vulnerability_classes": list(v.matched_entry.vulnerability_classes),
                "recommended_min_version": (
                    str(v.matched_entry.recommended_min_version)
                    if v.matched_entry.recommended_min_version
                    else None
                ),
            }
            for v in result.version_findings
        ],
        "totals": {
            "vulnerability_occurrences": result.totals.occurrences,
            "unique_cves": result.totals.unique_cves,
            "critical_occurrences": result.critical_occurrences(),
            "critical_rce_unique": result.totals.critical_rce,
            "critical_actionable_unique": result.totals.critical_actionable,
        },
    }


def from_payload(payload: Mapping[str, Any]) -> AuditResult:
    """Rebuild an AuditResult from a parsed JSON document."""
    summaries = tuple(
        ContainerScanSummary(
            container=c["container"],
            image=ImageRef(**c["image"]) if c.get("image") else None,
            vuln_histogram=_histogram_from_payload(c["vulnerabilities"]),
            misconfig_histogram=_histogram_from_payload(c["misconfigurations"]),
        )
        for c in payload.get("containers", [])
    )
    findings = tuple(
        Finding(
            rule_id=f["rule_id"],
            resource=f["resource"],
            severity=SeverityClass.from_label(f["severity"]),
            message=f["message"],
            remediation=f["remediation"],
        )
        for f in payload.get("findings", [])
    )
    scores = tuple(
        FrameworkScore(
            framework_id=s["framework_id"],
            percent=s["percent"],
            evaluated_controls=s["evaluated_controls"],
            not_applicable_controls=s["not_applicable_controls"],
        )
        for s in payload.get("framework_scores", [])
    )
    version_findings = tuple(
        VersionFinding(
            component=v["component"],
            installed=parse_version(v["installed"]),
            matched_entry=AdvisoryEntry(
                component=v["component"],
                affected=VersionPredicate.parse(v["affected"]),
                cve_count=v["cve_count"],
                cvss_min=v["cvss_min"],
                cvss_max=v["cvss_max"],
                vulnerability_classes=tuple(v.get("vulnerability_classes", [])),
                recommended_min_version=(
                    parse_version(v["recommended_min_version"])
                    if v.get("recommended_min_version")
                    else None
                ),
            ),
            severity=SeverityClass.from_label(v["severity"]),
        )
        for v in payload.get("version_findings", [])
    )
    totals_raw = payload.get("totals", {})
    totals = VulnTotals(
        occurrences=totals_raw.get("vulnerability_occurrences", 0),
        unique_cves=totals_raw.get("unique_cves", 0),
        critical_rce=totals_raw.get("critical_rce_unique", 0),
        critical_actionable=totals_raw.get("critical_actionable_unique", 0),
    )
    return AuditResult(
        summaries=summaries,
        findings=findings,
        framework_scores=scores,
        version_findings=version_findings,
        totals=totals,
        generated_at=payload.get("generated_at", ""),
        tool_version=payload.get("tool_version", ""),
    )


def render_json(result: AuditResult) -> str:
    """Canonical serialization: sorted keys, compact separators."""
    return json.dumps(
        to_payload(result), sort_keys=True, separators=(",", ":"), ensure_ascii=False
    )


def canonical_equal(a: str, b: str) -> bool:
    """Byte comparison of two rendered documents, ignoring generated_at."""
    pa, pb = json.loads(a), json.loads(b)
    pa["generated_at"] = pb["generated_at"] = ""
    dump = lambda p: json.dumps(p, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return dump(pa) == dump(pb)


# --- text table -----------------------------------------------------------

_SEV_HEADERS = [cls.letter for cls in TABLE_ORDER]


def _format_row(cells: Sequence[str], widths: Sequence[int]) -> str:
    return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"


def render_table(result: AuditResult) -> str:
    """Fixed-width summary table plus totals and score footer lines.

    Numeric cells are exactly the histogram counts; severity columns run
    C, H, M, L, N for both groups.
    """
    headers = ["Container Name", "Registry", "Image Tag"] + _SEV_HEADERS + _SEV_HEADERS
    rows = []
    for s in result.summaries:
        registry = s.image.registry if s.image else "-"
        image_tag = f"{s.image.repository}:{s.image.tag}" if s.image else "-"
        cells = [s.container, registry, image_tag]
        cells += [str(s.vuln_histogram.get(cls, 0)) for cls in TABLE_ORDER]
        cells += [str(s.misconfig_histogram.get(cls, 0)) for cls in TABLE_ORDER]
        rows.append(cells)

    widths = [len(h) for h in headers]
    for row in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]

    info_width = widths[0] + widths[1] + widths[2] + 2 * 3
    vuln_width = sum(widths[3:8]) + 4 * 3
    misc_width = sum(widths[8:13]) + 4 * 3
    group_line = (
        "| "
        + "Generic Infos".ljust(info_width)
        + " | "
        + "Vulnerabilities".ljust(vuln_width)
        + " | "
        + "Misconfigurations".ljust(misc_width)
        + " |"
    )
    separator = "+" + "-" * (len(group_line) - 2) + "+"

    lines = [separator, group_line, separator, _format_row(headers, widths), separator]
    for row in rows:
        lines.append(_format_row(row, widths))
    if rows:
        lines.append(separator)
    else:
        lines.append("| no findings".ljust(len(separator) - 1) + "|")
        lines.append(separator)

    lines.append("")
    lines.append("Totals")
    lines.append(f"  Vulnerability occurrences : {result.totals.occurrences}")
    lines.append(f"  Unique CVEs               : {result.totals.unique_cves}")
    lines.append(f"  Critical occurrences      : {result.critical_occurrences()}")
    lines.append(f"  Critical unique with RCE  : {result.totals.critical_rce}")
    lines.append(f"  Critical unique actionable: {result.totals.critical_actionable}")
    lines.append(f"  Misconfiguration findings : {len(result.findings)}")

    if result.framework_scores:
        lines.append("")
        lines.append("Framework compliance")
        for score in result.framework_scores:
            percent = f"{score.percent}%" if score.percent is not None else "n/a"
            lines.append(
                f"  {score.framework_id:<20} {percent:>4}  "
                f"({score.evaluated_controls} controls evaluated, "
                f"{score.not_applicable_controls} not applicable)"
            )

    if result.version_findings:
        lines.append("")
        lines.append("Outdated components")
        for v in result.version_findings:
            classes = ", ".join(v.matched_entry.vulnerability_classes)
            lines.append(
                f"  {v.component} {v.installed}  [{v.severity.label}]  "
                f"{v.matched_entry.cve_count} CVEs, "
                f"CVSS {v.matched_entry.cvss_min}-{v.matched_entry.cvss_max}"
                + (f"  ({classes})" if classes else "")
            )

    return "\n".join(lines) + "\n"


def render_remediations(result: AuditResult) -> str:
    """Distinct remediation steps for every rule that fired, worst first."""
    seen: dict[str, tuple[SeverityClass, str]] = {}
    for f in result.findings:
        seen.setdefault(f.rule_id, (f.severity, f.remediation))
    if not seen:
        return "No remediations required.\n"
    lines = ["Remediations"]
    ordered = sorted(seen.items(), key=lambda item: (-item[1][0], item[0]))
    for rule_id, (severity, remediation) in ordered:
        count = sum(1 for f in result.findings if f.rule_id == rule_id)
        lines.append(f"  [{severity.label}] {rule_id} ({count} resources): {remediation}")
    return "\n".join(lines) + "\n"


def exit_code(result: AuditResult, fail_on: SeverityClass) -> int:
    """0 if nothing at/above the threshold, 1 otherwise.

    Exit 2 is reserved for tool errors and never returned here.
    """
    for finding in result.findings:
        if finding.severity >= fail_on:
            return EXIT_FINDINGS
    for summary in result.summaries:
        for cls, count in summary.vuln_histogram.items():
            if cls >= fail_on and count > 0:
                return EXIT_FINDINGS
    for version_finding in result.version_findings:
        if version_finding.severity >= fail_on:
            return EXIT_FINDINGS
    return EXIT_CLEAN
