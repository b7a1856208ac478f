"""Misconfiguration rule catalog and evaluation engine.

Rules are data: each one pairs a declarative check (see `predicates`) with
a fixed severity, a threat category, and references into the compliance
framework catalogs. Evaluation is pure — it never mutates resources and
two evaluations of the same inputs produce identical findings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from .errors import CatalogError
from .manifests import ResourceDocument, resource_ref
from .predicates import Check, EvalContext, compile_check
from .severity import SeverityClass, ThreatCategory, empty_counts

WILDCARD_KIND = "*"


@dataclass(frozen=True)
class Rule:
    id: str
    title: str
    description: str
    severity: SeverityClass
    category: ThreatCategory
    applies_to: frozenset[str]
    check: Mapping[str, Any]
    control_refs: tuple[tuple[str, str], ...]
    remediation: str

    def applies_to_kind(self, kind: str) -> bool:
        return WILDCARD_KIND in self.applies_to or kind in self.applies_to


@dataclass(frozen=True)
class Finding:
    """One rule firing against one resource."""

    rule_id: str
    resource: str
    severity: SeverityClass
    message: str
    remediation: str


def parse_control_ref(ref: str) -> tuple[str, str]:
    """Split "framework-id/control-id" on the first slash."""
    framework_id, _, control_id = ref.partition("/")
    if not framework_id or not control_id:
        raise CatalogError(f"control ref must look like 'framework/control': {ref!r}")
    return framework_id, control_id


def rule_from_mapping(raw: Mapping[str, Any]) -> Rule:
    try:
        applies_to = frozenset(str(k) for k in raw["applies_to"])
        if not applies_to:
            raise CatalogError(f"rule {raw.get('id')!r}: applies_to must be non-empty")
        return Rule(
            id=str(raw["id"]),
            title=str(raw["title"]),
            description=str(raw.get("description", "")),
            severity=SeverityClass.from_label(raw["severity"]),
            category=ThreatCategory(raw["category"]),
            applies_to=applies_to,
            check=raw["check"],
            control_refs=tuple(parse_control_ref(str(r)) for r in raw.get("control_refs", [])),
            remediation=str(raw.get("remediation", "")),
        )
    except KeyError as exc:
        raise CatalogError(f"rule {raw.get('id')!r}: missing field {exc}") from exc
    except ValueError as exc:
        raise CatalogError(f"rule {raw.get('id')!r}: {exc}") from exc


def validate_catalog(catalog: Sequence[Rule], frameworks: Iterable[Any] | None = None) -> None:
    """Check catalog invariants; raises CatalogError before any evaluation.

    With `frameworks` given, also requires every control_ref to resolve
    against a loaded framework.
    """
    seen: set[str] = set()
    for rule in catalog:
        if rule.id in seen:
            raise CatalogError(f"duplicate rule id: {rule.id}")
        seen.add(rule.id)
        if not rule.applies_to:
            raise CatalogError(f"rule {rule.id}: applies_to must be non-empty")
        compile_check(rule.check)
    if frameworks is not None:
        known = {
            (fw.id, control.control_id) for fw in frameworks for control in fw.controls
        }
        for rule in catalog:
            for ref in rule.control_refs:
                if ref not in known:
                    raise CatalogError(
                        f"rule {rule.id}: control ref {ref[0]}/{ref[1]} does not resolve"
                    )


def evaluate(catalog: Sequence[Rule], resources: Sequence[ResourceDocument]) -> list[Finding]:
    """Evaluate every rule against every applicable resource.

    One Finding per (rule, resource) pair whose check fires. Output is
    sorted by severity descending, then rule id, then resource ref, so the
    result is independent of input order.
    """
    validate_catalog(catalog)
    compiled: list[tuple[Rule, Check]] = [(rule, compile_check(rule.check)) for rule in catalog]
    ctx = EvalContext.build(resources)
    findings = [
        Finding(
            rule_id=rule.id,
            resource=resource_ref(doc),
            severity=rule.severity,
            message=rule.title,
            remediation=rule.remediation,
        )
        for rule, check in compiled
        for doc in resources
        if rule.applies_to_kind(doc.kind) and check(doc.body, doc, ctx)
    ]
    findings.sort(key=lambda f: (-f.severity, f.rule_id, f.resource))
    return findings


def severity_histogram(findings: Iterable[Finding]) -> dict[SeverityClass, int]:
    """Zero-filled counts per severity class; sums to the number of findings."""
    counts = empty_counts()
    for finding in findings:
        counts[finding.severity] += 1
    return counts


def group_findings_by_app(
    findings: Sequence[Finding], resources: Sequence[ResourceDocument]
) -> dict[str, list[Finding]]:
    """Group findings by the `app` label of the resource they fired on.

    Resources without an app label (cluster plumbing, RBAC objects, shared
    config) stay out of the per-container grouping; their findings are
    still reported, just not attributed to a container column.
    """
    label_by_ref: dict[str, str] = {}
    for doc in resources:
        app = doc.labels.get("app") or doc.labels.get("app.kubernetes.io/name")
        if app:
            label_by_ref[resource_ref(doc)] = app
    grouped: dict[str, list[Finding]] = {}
    for finding in findings:
        app = label_by_ref.get(finding.resource)
        if app:
            grouped.setdefault(app, []).append(finding)
    return grouped


def builtin_catalog() -> list[Rule]:
    """The built-in rule catalog shipped as package data."""
    from .catalogs import load_builtin_rules

    return load_builtin_rules()
