"""Parsing of Kubernetes resource manifests into a uniform document model.

Multi-document YAML and JSON-style manifests are both handled by the YAML
parser (JSON is a YAML subset). `List` objects are flattened into their
items because every downstream consumer operates per object. Unknown kinds
are retained: an auditor must not drop evidence it does not understand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

import yaml

from .errors import IoError, MalformedDocument, MissingKind, MissingName

MANIFEST_EXTENSIONS = {".yaml", ".yml", ".json"}

CLUSTER_SCOPE = "_cluster"


@dataclass(frozen=True)
class SourceLocation:
    """Where a document came from: file (or URL) and position in its stream."""

    file_path: str
    document_index: int


@dataclass(frozen=True)
class ResourceDocument:
    """One parsed Kubernetes object.

    `body` is the full manifest tree (maps/lists/scalars) and is treated as
    immutable after construction; rule evaluation never mutates it.
    """

    api_version: str
    kind: str
    name: str
    namespace: str | None
    labels: Mapping[str, str]
    body: Mapping[str, Any]
    source: SourceLocation


def resource_ref(doc: ResourceDocument) -> str:
    """Canonical "namespace/kind/name"; cluster-scoped uses "_cluster"."""
    return f"{doc.namespace or CLUSTER_SCOPE}/{doc.kind}/{doc.name}"


def parse_resource_ref(ref: str) -> tuple[str | None, str, str]:
    """Split a rendered ref back into (namespace, kind, name)."""
    namespace, kind, name = ref.split("/", 2)
    return (None if namespace == CLUSTER_SCOPE else namespace, kind, name)


def _labels_of(raw: Mapping[str, Any]) -> dict[str, str]:
    labels = (raw.get("metadata") or {}).get("labels") or {}
    if not isinstance(labels, Mapping):
        return {}
    return {str(k): str(v) for k, v in labels.items()}


def document_from_mapping(raw: Any, origin: str, index: int) -> ResourceDocument:
    if not isinstance(raw, Mapping):
        raise MissingKind(origin, index, f"document is not an object (got {type(raw).__name__})")
    kind = raw.get("kind")
    if not isinstance(kind, str) or not kind:
        raise MissingKind(origin, index)
    metadata = raw.get("metadata")
    name = metadata.get("name") if isinstance(metadata, Mapping) else None
    if not isinstance(name, str) or not name:
        raise MissingName(origin, index)
    namespace = metadata.get("namespace") if isinstance(metadata, Mapping) else None
    if not (isinstance(namespace, str) and namespace):
        namespace = None
    api_version = raw.get("apiVersion")
    return ResourceDocument(
        api_version=api_version if isinstance(api_version, str) else "",
        kind=kind,
        name=name,
        namespace=namespace,
        labels=_labels_of(raw),
        body=raw,
        source=SourceLocation(file_path=origin, document_index=index),
    )


def _is_list_object(raw: Any) -> bool:
    return (
        isinstance(raw, Mapping)
        and isinstance(raw.get("kind"), str)
        and raw["kind"].endswith("List")
        and isinstance(raw.get("items"), list)
    )


def _flatten_list(raw: Mapping[str, Any], origin: str, index: int) -> list[ResourceDocument]:
    item_kind = raw["kind"][: -len("List")] or None
    docs = []
    for item in raw["items"]:
        if isinstance(item, Mapping):
            item = dict(item)
            if item_kind and not item.get("kind"):
                item["kind"] = item_kind
            if not item.get("apiVersion") and isinstance(raw.get("apiVersion"), str):
                item["apiVersion"] = raw["apiVersion"]
        docs.append(document_from_mapping(item, origin, index))
    return docs


def parse_manifest_stream(text: bytes | str, origin: str) -> list[ResourceDocument]:
    """Parse a (possibly multi-document) manifest stream.

    Returns one ResourceDocument per non-empty document in stream order;
    empty and comment-only documents are skipped silently. `document_index`
    is the document's position in the stream, counting skipped documents.

    Raises MalformedDocument on syntax errors, MissingKind / MissingName on
    structurally valid documents that are not Kubernetes objects.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocument(origin, 0, f"not valid UTF-8: {exc}") from exc

    documents: list[ResourceDocument] = []
    loader = yaml.safe_load_all(text)
    index = 0
    while True:
        try:
            raw = next(loader)
        except StopIteration:
            break
        except yaml.YAMLError as exc:
            raise MalformedDocument(origin, index, str(exc).replace("\n", " ")) from exc
        if raw is None or raw == {} or raw == "":
            index += 1
            continue
        if _is_list_object(raw):
            documents.extend(_flatten_list(raw, origin, index))
        else:
            documents.append(document_from_mapping(raw, origin, index))
        index += 1
    return documents


@dataclass(frozen=True)
class ParseFailure:
    """A file that failed to parse during a directory load."""

    file_path: str
    error: Exception


@dataclass
class DirectoryLoad:
    """Outcome of load_directory: parsed documents plus recorded failures."""

    documents: list[ResourceDocument] = field(default_factory=list)
    errors: list[ParseFailure] = field(default_factory=list)


def load_directory(
    root: str | Path,
    namespaces: Iterable[str] | None = None,
    kinds: Iterable[str] | None = None,
) -> DirectoryLoad:
    """Recursively load every manifest file under `root`.

    Parse errors are collected per file, not raised, so one malformed file
    never hides the rest of the evidence. Document order is deterministic:
    lexicographic by file path, then document index. Namespace filtering
    keeps only documents whose namespace is in the set (cluster-scoped
    documents are excluded by a namespace filter).
    """
    root = Path(root)
    if not root.exists():
        raise IoError(f"no such path: {root}")
    if root.is_file():
        files = [root]
    else:
        files = sorted(
            (p for p in root.rglob("*") if p.is_file() and p.suffix.lower() in MANIFEST_EXTENSIONS),
            key=lambda p: str(p),
        )
    namespace_set = set(namespaces) if namespaces else None
    kind_set = set(kinds) if kinds else None

    result = DirectoryLoad()
    for path in files:
        try:
            raw = path.read_bytes()
        except OSError as exc:
            result.errors.append(ParseFailure(str(path), IoError(f"cannot read {path}: {exc}")))
            continue
        try:
            docs = parse_manifest_stream(raw, str(path))
        except (MalformedDocument, MissingKind, MissingName) as exc:
            result.errors.append(ParseFailure(str(path), exc))
            continue
        result.documents.extend(docs)

    if namespace_set is not None:
        result.documents = [d for d in result.documents if d.namespace in namespace_set]
    if kind_set is not None:
        result.documents = [d for d in result.documents if d.kind in kind_set]
    result.documents.sort(key=lambda d: (d.source.file_path, d.source.document_index))
    return result
