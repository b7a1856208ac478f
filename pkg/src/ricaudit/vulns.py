"""Container-image vulnerability report ingestion and aggregation.

Scan reports use a scanner-neutral schema (one JSON document per
container); each entry is classified into the five severity classes at
parse time. Aggregation merges immutable histograms, so it is associative,
commutative, and safe to parallelize.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, NamedTuple, Sequence

from .errors import SchemaError
from .rules import Finding, severity_histogram
from .severity import SeverityClass, empty_counts


@dataclass(frozen=True)
class ImageRef:
    """A container image coordinate: registry/repository:tag."""

    registry: str
    repository: str
    tag: str

    def render(self) -> str:
        return f"{self.registry}/{self.repository}:{self.tag}"

    @classmethod
    def parse(cls, text: str) -> "ImageRef":
        registry, slash, rest = text.partition("/")
        repository, colon, tag = rest.rpartition(":")
        if not (slash and colon and registry and repository and tag):
            raise ValueError(f"not a registry/repository:tag image ref: {text!r}")
        return cls(registry=registry, repository=repository, tag=tag)


@dataclass(frozen=True)
class VulnRecord:
    """One CVE occurrence in one container image."""

    cve_id: str
    package: str
    installed_version: str
    fixed_version: str | None
    cvss: float | None
    vendor_severity: SeverityClass | None
    severity: SeverityClass
    remote_code_execution: bool
    container: str
    image: ImageRef

    @property
    def actionable(self) -> bool:
        return self.fixed_version is not None


def classify_severity(
    cvss: float | None, vendor: SeverityClass | None = None
) -> SeverityClass:
    """Resolve a severity class from a CVSS score and a vendor rating.

    Vendor severity wins when present (scanners encode distro-specific
    adjustments). Otherwise the standard qualitative buckets apply, with
    score 0 or no score at all landing in Negligible.
    """
    if vendor is not None:
        return vendor
    if cvss is None or cvss == 0.0:
        return SeverityClass.NEGLIGIBLE
    if cvss >= 9.0:
        return SeverityClass.CRITICAL
    if cvss >= 7.0:
        return SeverityClass.HIGH
    if cvss >= 4.0:
        return SeverityClass.MEDIUM
    return SeverityClass.LOW


@dataclass(frozen=True)
class RejectedEntry:
    index: int
    reason: str


@dataclass
class ScanReport:
    """Parsed scan report: accepted records plus individually rejected entries."""

    container: str
    image: ImageRef
    records: list[VulnRecord] = field(default_factory=list)
    rejected: list[RejectedEntry] = field(default_factory=list)


def _entry_str(entry: Mapping[str, Any], key: str, index: int) -> str:
    value = entry.get(key)
    if not isinstance(value, str) or not value:
        raise SchemaError(f"missing or non-string field {key!r}", entry_index=index)
    return value


def parse_scan_report(text: bytes | str) -> ScanReport:
    """Parse one native scan-report document.

    Unknown fields are ignored. Entries whose CVSS score is outside
    [0, 10] are rejected individually and reported; structural problems
    (missing fields, wrong types) raise SchemaError with the entry index.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, Mapping):
        raise SchemaError("report must be a JSON object")

    container = raw.get("container")
    if not isinstance(container, str) or not container:
        raise SchemaError("missing or non-string field 'container'")
    image_raw = raw.get("image")
    if not isinstance(image_raw, Mapping):
        raise SchemaError("missing field 'image'")
    try:
        image = ImageRef(
            registry=str(image_raw["registry"]),
            repository=str(image_raw["repository"]),
            tag=str(image_raw["tag"]),
        )
    except KeyError as exc:
        raise SchemaError(f"image is missing field {exc}") from exc
    entries = raw.get("entries")
    if not isinstance(entries, list):
        raise SchemaError("missing or non-list field 'entries'")

    report = ScanReport(container=container, image=image)
    for index, entry in enumerate(entries):
        if not isinstance(entry, Mapping):
            raise SchemaError("entry must be an object", entry_index=index)
        cve_id = _entry_str(entry, "cve_id", index)
        package = _entry_str(entry, "package", index)
        installed = _entry_str(entry, "installed_version", index)

        fixed = entry.get("fixed_version")
        if fixed is not None and not isinstance(fixed, str):
            raise SchemaError("fixed_version must be a string", entry_index=index)

        cvss = entry.get("cvss")
        if cvss is not None:
            if not isinstance(cvss, (int, float)) or isinstance(cvss, bool):
                raise SchemaError("cvss must be a number", entry_index=index)
            cvss = float(cvss)
            if not 0.0 <= cvss <= 10.0:
                report.rejected.append(
                    RejectedEntry(index, f"cvss {cvss} outside [0.0, 10.0] for {cve_id}")
                )
                continue

        vendor_raw = entry.get("vendor_severity")
        vendor = None
        if vendor_raw is not None:
            try:
                vendor = SeverityClass.from_label(str(vendor_raw))
            except ValueError as exc:
                raise SchemaError(str(exc), entry_index=index) from exc

        rce = entry.get("rce", False)
        if not isinstance(rce, bool):
            raise SchemaError("rce must be a boolean", entry_index=index)

        report.records.append(
            VulnRecord(
                cve_id=cve_id,
                package=package,
                installed_version=installed,
                fixed_version=fixed,
                cvss=cvss,
                vendor_severity=vendor,
                severity=classify_severity(cvss, vendor),
                remote_code_execution=rce,
                container=container,
                image=image,
            )
        )
    return report


@dataclass(frozen=True)
class ContainerScanSummary:
    """One table row: a container with its vulnerability and misconfiguration counts."""

    container: str
    image: ImageRef | None
    vuln_histogram: Mapping[SeverityClass, int]
    misconfig_histogram: Mapping[SeverityClass, int]


def aggregate_by_container(
    records: Sequence[VulnRecord],
    misconfig_findings_by_container: Mapping[str, Sequence[Finding]] | None = None,
) -> list[ContainerScanSummary]:
    """One summary per distinct container, sorted by container name.

    Containers come from the records and from the misconfiguration map, so
    a manifest-only audit still produces rows. Histograms are zero-filled
    over all five classes.
    """
    misconfig = misconfig_findings_by_container or {}
    by_container: dict[str, list[VulnRecord]] = {}
    for record in records:
        by_container.setdefault(record.container, []).append(record)

    summaries = []
    for container in sorted(set(by_container) | set(misconfig)):
        container_records = by_container.get(container, [])
        vuln_counts = empty_counts()
        for record in container_records:
            vuln_counts[record.severity] += 1
        summaries.append(
            ContainerScanSummary(
                container=container,
                image=container_records[0].image if container_records else None,
                vuln_histogram=vuln_counts,
                misconfig_histogram=severity_histogram(misconfig.get(container, [])),
            )
        )
    return summaries


class VulnTotals(NamedTuple):
    occurrences: int
    unique_cves: int
    critical_rce: int
    critical_actionable: int


def occurrence_and_unique_totals(records: Iterable[VulnRecord]) -> VulnTotals:
    """Occurrence and deduplicated totals over a record set.

    Both are always reported because a multi-container sum and a distinct
    CVE count answer different questions; neither substitutes for the
    other. Critical sub-counts are over distinct CVE ids.
    """
    records = list(records)
    unique: set[str] = set()
    critical_rce: set[str] = set()
    critical_actionable: set[str] = set()
    for record in records:
        unique.add(record.cve_id)
        if record.severity is SeverityClass.CRITICAL:
            if record.remote_code_execution:
                critical_rce.add(record.cve_id)
            if record.actionable:
                critical_actionable.add(record.cve_id)
    return VulnTotals(
        occurrences=len(records),
        unique_cves=len(unique),
        critical_rce=len(critical_rce),
        critical_actionable=len(critical_actionable),
    )
