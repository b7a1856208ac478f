"""Declarative check combinators for misconfiguration rules.

Rules live in data files, so their trigger conditions are expressed as a
small combinator language over the manifest tree rather than as code. A
check is a one-key mapping; combinators compose:

    any_container:
      any_of:
        - path_absent: resources.limits.cpu
        - path_absent: resources.limits.memory

Paths are dot-separated keys; a `*` segment fans out over every mapping
value or list element. Path predicates are existential: they hold if at
least one node matches.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from .errors import CatalogError
from .manifests import ResourceDocument, resource_ref

# Kinds that embed a pod template, and the path to the pod spec inside them.
POD_SPEC_PATHS: dict[str, tuple[str, ...]] = {
    "Pod": ("spec",),
    "Deployment": ("spec", "template", "spec"),
    "StatefulSet": ("spec", "template", "spec"),
    "DaemonSet": ("spec", "template", "spec"),
    "ReplicaSet": ("spec", "template", "spec"),
    "Job": ("spec", "template", "spec"),
    "CronJob": ("spec", "jobTemplate", "spec", "template", "spec"),
}


@dataclass
class EvalContext:
    """Cross-resource facts available to context-sensitive combinators."""

    namespace_kinds: dict[str | None, set[str]] = field(default_factory=dict)
    ref_counts: Counter = field(default_factory=Counter)

    @classmethod
    def build(cls, documents: Sequence[ResourceDocument]) -> "EvalContext":
        ctx = cls()
        for doc in documents:
            ctx.namespace_kinds.setdefault(doc.namespace, set()).add(doc.kind)
            ctx.ref_counts[resource_ref(doc)] += 1
        return ctx


Check = Callable[[Any, ResourceDocument, EvalContext], bool]


def resolve_path(node: Any, path: str) -> list[Any]:
    """All values reachable from `node` along a dotted path.

    A `*` segment expands over mapping values and list elements; a numeric
    segment indexes into lists. Missing keys simply produce no matches.
    """
    current = [node]
    for segment in path.split("."):
        nxt: list[Any] = []
        for value in current:
            if segment == "*":
                if isinstance(value, Mapping):
                    nxt.extend(value.values())
                elif isinstance(value, list):
                    nxt.extend(value)
            elif isinstance(value, Mapping):
                if segment in value:
                    nxt.append(value[segment])
            elif isinstance(value, list) and segment.isdigit():
                idx = int(segment)
                if idx < len(value):
                    nxt.append(value[idx])
        current = nxt
        if not current:
            break
    return current


def shannon_entropy(text: str) -> float:
    """Shannon entropy of a string in bits per character."""
    if not text:
        return 0.0
    counts = Counter(text)
    total = len(text)
    return -sum((n / total) * math.log2(n / total) for n in counts.values())


def pod_spec_of(doc: ResourceDocument) -> Mapping[str, Any] | None:
    path = POD_SPEC_PATHS.get(doc.kind)
    if path is None:
        return None
    node: Any = doc.body
    for segment in path:
        if not isinstance(node, Mapping) or segment not in node:
            return None
        node = node[segment]
    return node if isinstance(node, Mapping) else None


def containers_of(doc: ResourceDocument) -> list[Mapping[str, Any]]:
    spec = pod_spec_of(doc)
    if spec is None:
        return []
    found = []
    for key in ("containers", "initContainers"):
        items = spec.get(key)
        if isinstance(items, list):
            found.extend(c for c in items if isinstance(c, Mapping))
    return found


def image_registry(image: str) -> str:
    """The registry component of a container image string.

    A first path segment containing a dot, a colon, or "localhost" is a
    registry host; otherwise the default public registry is implied.
    """
    head = image.split("/", 1)[0]
    if "/" in image and ("." in head or ":" in head or head == "localhost"):
        return head.lower()
    return "docker.io"


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CatalogError(message)


def _compile_path_value(arg: Any, op: str) -> tuple[str, Any]:
    _require(isinstance(arg, Mapping) and "path" in arg and "value" in arg,
             f"{op} needs a mapping with 'path' and 'value'")
    return str(arg["path"]), arg["value"]


def compile_check(spec: Mapping[str, Any]) -> Check:
    """Compile a check mapping into a callable predicate.

    Raises CatalogError on unknown combinators or malformed arguments, so
    bad catalogs fail before any evaluation starts.
    """
    _require(isinstance(spec, Mapping) and len(spec) == 1,
             f"a check must be a one-key mapping, got {spec!r}")
    op, arg = next(iter(spec.items()))

    if op == "all_of":
        _require(isinstance(arg, list) and arg, "all_of needs a non-empty list")
        subs = [compile_check(s) for s in arg]
        return lambda node, doc, ctx: all(s(node, doc, ctx) for s in subs)
    if op == "any_of":
        _require(isinstance(arg, list) and arg, "any_of needs a non-empty list")
        subs = [compile_check(s) for s in arg]
        return lambda node, doc, ctx: any(s(node, doc, ctx) for s in subs)
    if op == "not":
        sub = compile_check(arg)
        return lambda node, doc, ctx: not sub(node, doc, ctx)

    if op == "kind_is":
        kinds = {arg} if isinstance(arg, str) else set(arg)
        return lambda node, doc, ctx: doc.kind in kinds

    if op == "path_exists":
        path = str(arg)
        return lambda node, doc, ctx: bool(resolve_path(node, path))
    if op == "path_absent":
        path = str(arg)
        return lambda node, doc, ctx: not resolve_path(node, path)
    if op == "path_equals":
        path, value = _compile_path_value(arg, op)
        return lambda node, doc, ctx: any(v == value for v in resolve_path(node, path))
    if op == "path_matches":
        _require(isinstance(arg, Mapping) and "path" in arg and "pattern" in arg,
                 "path_matches needs a mapping with 'path' and 'pattern'")
        path = str(arg["path"])
        regex = re.compile(str(arg["pattern"]))
        return lambda node, doc, ctx: any(
            isinstance(v, str) and regex.search(v) for v in resolve_path(node, path)
        )
    if op == "path_contains":
        path, value = _compile_path_value(arg, op)
        return lambda node, doc, ctx: any(
            isinstance(v, list) and value in v for v in resolve_path(node, path)
        )

    if op == "any_item" or op == "all_items":
        _require(isinstance(arg, Mapping) and "path" in arg and "check" in arg,
                 f"{op} needs a mapping with 'path' and 'check'")
        path = str(arg["path"])
        sub = compile_check(arg["check"])
        if op == "any_item":
            return lambda node, doc, ctx: any(
                sub(item, doc, ctx)
                for items in resolve_path(node, path)
                if isinstance(items, list)
                for item in items
            )
        return lambda node, doc, ctx: all(
            sub(item, doc, ctx)
            for items in resolve_path(node, path)
            if isinstance(items, list)
            for item in items
        )

    if op == "pod_spec":
        sub = compile_check(arg)
        return lambda node, doc, ctx: (
            (spec_node := pod_spec_of(doc)) is not None and sub(spec_node, doc, ctx)
        )
    if op == "any_container":
        sub = compile_check(arg)
        return lambda node, doc, ctx: any(sub(c, doc, ctx) for c in containers_of(doc))
    if op == "all_containers":
        sub = compile_check(arg)
        return lambda node, doc, ctx: all(sub(c, doc, ctx) for c in containers_of(doc))

    if op == "image_registry_not_in":
        _require(isinstance(arg, list) and arg, "image_registry_not_in needs a non-empty list")
        allowed = {str(r).lower() for r in arg}
        def check_registry(node: Any, doc: ResourceDocument, ctx: EvalContext) -> bool:
            image = node.get("image") if isinstance(node, Mapping) else None
            return isinstance(image, str) and image_registry(image) not in allowed
        return check_registry

    if op == "credential_data":
        _require(isinstance(arg, Mapping), "credential_data needs a mapping of parameters")
        patterns = [str(p).lower() for p in arg.get("key_patterns", [])]
        threshold = float(arg.get("entropy_threshold", 4.0))
        min_length = int(arg.get("min_value_length", 16))
        def check_credentials(node: Any, doc: ResourceDocument, ctx: EvalContext) -> bool:
            data = node.get("data") if isinstance(node, Mapping) else None
            if not isinstance(data, Mapping):
                return False
            for key, value in data.items():
                if any(p in str(key).lower() for p in patterns):
                    return True
                if (isinstance(value, str) and len(value) >= min_length
                        and shannon_entropy(value) >= threshold):
                    return True
            return False
        return check_credentials

    if op == "namespace_lacks_kind":
        kind = str(arg)
        return lambda node, doc, ctx: kind not in ctx.namespace_kinds.get(doc.namespace, set())

    if op == "duplicate_ref":
        return lambda node, doc, ctx: ctx.ref_counts[resource_ref(doc)] > 1

    raise CatalogError(f"unknown check combinator: {op!r}")
