"""Framework compliance scoring.

A control is evidenced by one or more rules; a resource is applicable to a
control when its kind is covered by any referenced rule, and passes when
none of those rules fired against it. The framework score is the mean of
the applicable control scores, rounded half-up to an integer percent.
Controls without rules or without applicable resources are NotApplicable
and excluded from the mean: scoring what cannot be checked would fabricate
compliance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import IncompleteResults, UnknownRuleId
from .manifests import ResourceDocument, resource_ref
from .rules import Finding, Rule


@dataclass(frozen=True)
class Control:
    framework_id: str
    control_id: str
    title: str
    rule_ids: tuple[str, ...]


@dataclass(frozen=True)
class Framework:
    id: str
    title: str
    controls: tuple[Control, ...]


@dataclass(frozen=True)
class ControlResult:
    control: Control
    applicable_resources: int
    passing_resources: int

    @property
    def not_applicable(self) -> bool:
        return self.applicable_resources == 0 or not self.control.rule_ids

    @property
    def score(self) -> Fraction | None:
        if self.not_applicable:
            return None
        return Fraction(self.passing_resources, self.applicable_resources)


@dataclass(frozen=True)
class FrameworkScore:
    framework_id: str
    percent: int | None
    evaluated_controls: int
    not_applicable_controls: int


def control_compliance(
    control: Control,
    findings: Sequence[Finding],
    resources: Sequence[ResourceDocument],
    catalog: Sequence[Rule],
) -> ControlResult:
    """Score one control against an evaluated resource set.

    Pass semantics are per-resource boolean: a resource with several
    findings from the same control still fails exactly once.
    """
    rules_by_id = {rule.id: rule for rule in catalog}
    referenced = []
    for rule_id in control.rule_ids:
        if rule_id not in rules_by_id:
            raise UnknownRuleId(
                f"control {control.framework_id}/{control.control_id} references "
                f"unknown rule {rule_id!r}"
            )
        referenced.append(rules_by_id[rule_id])
    if not referenced:
        return ControlResult(control=control, applicable_resources=0, passing_resources=0)

    applicable = [
        doc for doc in resources if any(rule.applies_to_kind(doc.kind) for rule in referenced)
    ]
    rule_ids = set(control.rule_ids)
    failing_refs = {f.resource for f in findings if f.rule_id in rule_ids}
    passing = sum(1 for doc in applicable if resource_ref(doc) not in failing_refs)
    return ControlResult(
        control=control,
        applicable_resources=len(applicable),
        passing_resources=passing,
    )


def _percent_half_up(mean: Fraction) -> int:
    # round-half-up of 100*mean: floor((200*num + den) / (2*den))
    scaled = 100 * mean
    return (2 * scaled.numerator + scaled.denominator) // (2 * scaled.denominator)


def framework_score(framework: Framework, results: Sequence[ControlResult]) -> FrameworkScore:
    """Average the applicable control scores into an integer percent.

    `results` must cover every control of the framework exactly once;
    anything else raises IncompleteResults.
    """
    expected = {c.control_id for c in framework.controls}
    seen = [r.control.control_id for r in results]
    if sorted(seen) != sorted(expected):
        missing = expected - set(seen)
        duplicated = {c for c in seen if seen.count(c) > 1}
        extra = set(seen) - expected
        raise IncompleteResults(
            f"framework {framework.id}: results do not cover controls exactly once"
            + (f"; missing {sorted(missing)}" if missing else "")
            + (f"; duplicated {sorted(duplicated)}" if duplicated else "")
            + (f"; unknown {sorted(extra)}" if extra else "")
        )

    scores = [r.score for r in results if r.score is not None]
    not_applicable = len(results) - len(scores)
    if not scores:
        percent = None
    else:
        percent = _percent_half_up(sum(scores, Fraction(0)) / len(scores))
    return FrameworkScore(
        framework_id=framework.id,
        percent=percent,
        evaluated_controls=len(scores),
        not_applicable_controls=not_applicable,
    )


def score_framework(
    framework: Framework,
    findings: Sequence[Finding],
    resources: Sequence[ResourceDocument],
    catalog: Sequence[Rule],
) -> tuple[FrameworkScore, list[ControlResult]]:
    """Convenience: score every control of a framework, then the framework."""
    results = [
        control_compliance(control, findings, resources, catalog)
        for control in framework.controls
    ]
    return framework_score(framework, results), results


def bundled_frameworks() -> list[Framework]:
    """The three framework catalogs shipped as package data."""
    from .catalogs import load_builtin_frameworks

    return load_builtin_frameworks()
