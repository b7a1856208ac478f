"""Security auditing toolkit for Kubernetes-based Near-RT RIC deployments.

Static misconfiguration scanning, container vulnerability aggregation,
framework compliance scoring, and outdated-component auditing, with report
output suitable for CI gates.
"""

__version__ = "0.1.0"

from .severity import SeverityClass, ThreatCategory
from .manifests import (
    DirectoryLoad,
    ResourceDocument,
    SourceLocation,
    load_directory,
    parse_manifest_stream,
    parse_resource_ref,
    resource_ref,
)
from .rules import Finding, Rule, builtin_catalog, evaluate, severity_histogram
from .vulns import (
    ContainerScanSummary,
    ImageRef,
    VulnRecord,
    VulnTotals,
    aggregate_by_container,
    classify_severity,
    occurrence_and_unique_totals,
    parse_scan_report,
)
from .compliance import (
    Control,
    ControlResult,
    Framework,
    FrameworkScore,
    bundled_frameworks,
    control_compliance,
    framework_score,
)
from .versions import (
    AdvisoryEntry,
    Version,
    VersionFinding,
    audit_components,
    bundled_advisories,
    parse_version,
)
from .cluster import ClusterEndpoint, fetch_resources
from .report import AuditResult, exit_code, render_json, render_table

__all__ = [
    "__version__",
    "SeverityClass",
    "ThreatCategory",
    "DirectoryLoad",
    "ResourceDocument",
    "SourceLocation",
    "load_directory",
    "parse_manifest_stream",
    "parse_resource_ref",
    "resource_ref",
    "Finding",
    "Rule",
    "builtin_catalog",
    "evaluate",
    "severity_histogram",
    "ContainerScanSummary",
    "ImageRef",
    "VulnRecord",
    "VulnTotals",
    "aggregate_by_container",
    "classify_severity",
    "occurrence_and_unique_totals",
    "parse_scan_report",
    "Control",
    "ControlResult",
    "Framework",
    "FrameworkScore",
    "bundled_frameworks",
    "control_compliance",
    "framework_score",
    "AdvisoryEntry",
    "Version",
    "VersionFinding",
    "audit_components",
    "bundled_advisories",
    "parse_version",
    "ClusterEndpoint",
    "fetch_resources",
    "AuditResult",
    "exit_code",
    "render_json",
    "render_table",
]
