"""Component version audit against an advisory database.

The bundled database pins known-vulnerable platform versions as exact
matches: advisory CVE counts are a snapshot tied to the exact version they
were collected for, and range extrapolation would invent data. User
databases may also use inclusive upper-bound ranges.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Iterable, Sequence

from .errors import MalformedVersion
from .severity import SeverityClass
from .vulns import classify_severity

_VERSION_RE = re.compile(r"^v?(\d+)\.(\d+)(?:\.(\d+))?$")


@total_ordering
@dataclass(frozen=True, eq=False)
class Version:
    """A dotted numeric triple; ordering ignores the original spelling."""

    major: int
    minor: int
    patch: int
    original: str

    @property
    def triple(self) -> tuple[int, int, int]:
        return (self.major, self.minor, self.patch)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Version):
            return NotImplemented
        return self.triple == other.triple

    def __lt__(self, other: "Version") -> bool:
        return self.triple < other.triple

    def __hash__(self) -> int:
        return hash(self.triple)

    def __str__(self) -> str:
        return f"{self.major}.{self.minor}.{self.patch}"


def parse_version(text: str) -> Version:
    """Parse an optionally v-prefixed dotted numeric version.

    A missing patch component defaults to 0. Anything else — pre-release
    tags, build metadata, channel names like "latest" — is rejected rather
    than coerced: silent coercion hides supply-chain drift.
    """
    match = _VERSION_RE.match(text.strip())
    if not match:
        raise MalformedVersion(f"not a numeric version: {text!r}")
    major, minor, patch = match.groups()
    return Version(
        major=int(major),
        minor=int(minor),
        patch=int(patch) if patch is not None else 0,
        original=text,
    )


@dataclass(frozen=True)
class VersionPredicate:
    """Either an exact match ("==") or an inclusive upper bound ("<=")."""

    op: str
    version: Version

    def matches(self, installed: Version) -> bool:
        if self.op == "==":
            return installed == self.version
        return installed <= self.version

    def __str__(self) -> str:
        return f"{self.op} {self.version}"

    @classmethod
    def parse(cls, text: str) -> "VersionPredicate":
        parts = text.strip().split()
        if len(parts) == 1:
            op, raw = "==", parts[0]
        elif len(parts) == 2 and parts[0] in ("==", "<="):
            op, raw = parts
        else:
            raise MalformedVersion(f"not a version predicate: {text!r}")
        return cls(op=op, version=parse_version(raw))


@dataclass(frozen=True)
class AdvisoryEntry:
    component: str
    affected: VersionPredicate
    cve_count: int
    cvss_min: float
    cvss_max: float
    vulnerability_classes: tuple[str, ...]
    recommended_min_version: Version | None = None

    def __post_init__(self) -> None:
        if self.cvss_min > self.cvss_max:
            raise ValueError(f"{self.component}: cvss_min > cvss_max")
        if self.cve_count < 1:
            raise ValueError(f"{self.component}: cve_count must be >= 1")


@dataclass(frozen=True)
class VersionFinding:
    component: str
    installed: Version
    matched_entry: AdvisoryEntry
    severity: SeverityClass


@dataclass(frozen=True)
class InventoryError:
    component: str
    raw_version: str
    error: MalformedVersion


@dataclass
class VersionAudit:
    """Audit outcome: findings plus per-item version parse errors."""

    findings: list[VersionFinding] = field(default_factory=list)
    errors: list[InventoryError] = field(default_factory=list)


def audit_components(
    inventory: Iterable[tuple[str, str]], advisories: Sequence[AdvisoryEntry]
) -> VersionAudit:
    """Match an inventory of (component, version string) pairs against advisories.

    One finding per matching (item, advisory) pair; a malformed version is
    recorded for that item without aborting the rest. Findings are sorted
    by severity descending, then component.
    """
    audit = VersionAudit()
    for component, raw in inventory:
        canonical = component.strip().lower()
        try:
            installed = parse_version(raw)
        except MalformedVersion as exc:
            audit.errors.append(InventoryError(component=canonical, raw_version=raw, error=exc))
            continue
        for entry in advisories:
            if entry.component == canonical and entry.affected.matches(installed):
                audit.findings.append(
                    VersionFinding(
                        component=canonical,
                        installed=installed,
                        matched_entry=entry,
                        severity=classify_severity(entry.cvss_max),
                    )
                )
    audit.findings.sort(key=lambda f: (-f.severity, f.component))
    return audit


def bundled_advisories() -> list[AdvisoryEntry]:
    """The advisory database shipped as package data."""
    from .catalogs import load_builtin_advisories

    return load_builtin_advisories()
