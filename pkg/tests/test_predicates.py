from __future__ import annotations

import math

import pytest
import yaml

from ricaudit.errors import CatalogError
from ricaudit.manifests import parse_manifest_stream
from ricaudit.predicates import (
    EvalContext,
    compile_check,
    image_registry,
    resolve_path,
    shannon_entropy,
)


def doc_of(mapping: dict):
    return parse_manifest_stream(yaml.safe_dump(mapping), "test.yaml")[0]


def run(check: dict, mapping: dict, context_docs=None) -> bool:
    doc = doc_of(mapping)
    ctx = EvalContext.build([doc] + [doc_of(m) for m in (context_docs or [])])
    return compile_check(check)(doc.body, doc, ctx)


POD = {
    "apiVersion": "v1",
    "kind": "Pod",
    "metadata": {"name": "p", "namespace": "ns"},
    "spec": {
        "containers": [
            {"name": "main", "image": "docker.io/app:1.0",
             "resources": {"limits": {"cpu": "1"}}},
        ],
        "initContainers": [{"name": "init", "image": "docker.io/init:1.0"}],
    },
}

DEPLOYMENT = {
    "apiVersion": "apps/v1",
    "kind": "Deployment",
    "metadata": {"name": "d", "namespace": "ns"},
    "spec": {
        "template": {
            "spec": {
                "containers": [{"name": "c", "image": "registry.k8s.io/app:2.0"}],
            }
        }
    },
}


class TestResolvePath:
    def test_plain_keys(self):
        assert resolve_path({"a": {"b": 3}}, "a.b") == [3]

    def test_missing_key_no_match(self):
        assert resolve_path({"a": {}}, "a.b") == []

    def test_wildcard_over_list(self):
        node = {"items": [{"x": 1}, {"x": 2}, {}]}
        assert resolve_path(node, "items.*.x") == [1, 2]

    def test_wildcard_over_mapping(self):
        assert sorted(resolve_path({"m": {"a": 1, "b": 2}}, "m.*")) == [1, 2]

    def test_numeric_index(self):
        assert resolve_path({"l": ["a", "b"]}, "l.1") == ["b"]
        assert resolve_path({"l": ["a"]}, "l.5") == []

    def test_null_value_counts_as_present(self):
        assert resolve_path({"a": None}, "a") == [None]


class TestEntropy:
    def test_uniform_string_is_zero(self):
        assert shannon_entropy("aaaaaaaa") == 0.0

    def test_distinct_chars(self):
        # 32 distinct characters: exactly log2(32) bits per character.
        text = "abcdefghijklmnopqrstuvwxyz012345"
        assert math.isclose(shannon_entropy(text), 5.0)

    def test_empty(self):
        assert shannon_entropy("") == 0.0


class TestImageRegistry:
    @pytest.mark.parametrize(
        "image,expected",
        [
            ("nexus3.o-ran-sc.org:10002/ric-plt-e2:6.0.3", "nexus3.o-ran-sc.org:10002"),
            ("Docker.io/influxdb:2.2.0-alpine", "docker.io"),
            ("influxdb:2.2.0-alpine", "docker.io"),
            ("localhost/tool:1", "localhost"),
            ("registry.k8s.io/app@sha256:" + "0" * 64, "registry.k8s.io"),
            ("library/app:1", "docker.io"),
        ],
    )
    def test_registry_extraction(self, image, expected):
        assert image_registry(image) == expected


class TestCombinators:
    def test_unknown_combinator(self):
        with pytest.raises(CatalogError):
            compile_check({"frobnicate": "x"})

    def test_check_must_have_one_key(self):
        with pytest.raises(CatalogError):
            compile_check({"path_exists": "a", "path_absent": "b"})

    def test_malformed_argument(self):
        with pytest.raises(CatalogError):
            compile_check({"path_equals": "not-a-mapping"})

    def test_path_exists_and_absent(self):
        assert run({"path_exists": "spec.containers"}, POD)
        assert run({"path_absent": "spec.nodeName"}, POD)
        assert not run({"path_absent": "spec.containers"}, POD)

    def test_path_equals(self):
        assert run({"path_equals": {"path": "kind", "value": "Pod"}}, POD)
        assert not run({"path_equals": {"path": "kind", "value": "Job"}}, POD)

    def test_path_matches(self):
        assert run({"path_matches": {"path": "spec.containers.*.image", "pattern": "^docker"}}, POD)

    def test_path_contains_list_membership(self):
        role = {
            "kind": "Role",
            "metadata": {"name": "r", "namespace": "ns"},
            "rules": [{"resources": ["secrets"], "verbs": ["get", "list"]}],
        }
        assert run(
            {"any_item": {"path": "rules",
                          "check": {"path_contains": {"path": "verbs", "value": "list"}}}},
            role,
        )
        assert not run(
            {"any_item": {"path": "rules",
                          "check": {"path_contains": {"path": "verbs", "value": "delete"}}}},
            role,
        )

    def test_boolean_combinators(self):
        check = {
            "all_of": [
                {"kind_is": "Pod"},
                {"not": {"path_exists": "spec.hostNetwork"}},
                {"any_of": [{"path_exists": "spec.containers"}, {"path_exists": "nope"}]},
            ]
        }
        assert run(check, POD)

    def test_any_container_covers_init_containers(self):
        assert run(
            {"any_container": {"path_matches": {"path": "image", "pattern": "init"}}}, POD
        )

    def test_any_container_resolves_deployment_template(self):
        assert run({"any_container": {"path_absent": "resources.limits"}}, DEPLOYMENT)

    def test_all_containers(self):
        assert not run(
            {"all_containers": {"path_exists": "resources.limits.cpu"}}, POD
        )

    def test_pod_spec_scope(self):
        assert run({"pod_spec": {"path_exists": "containers"}}, DEPLOYMENT)
        # A kind without a pod template never satisfies pod_spec checks.
        cm = {"kind": "ConfigMap", "metadata": {"name": "c", "namespace": "ns"}, "data": {}}
        assert not run({"pod_spec": {"path_exists": "containers"}}, cm)

    def test_image_registry_not_in(self):
        allowed = {"any_container": {"image_registry_not_in": ["registry.k8s.io"]}}
        assert run(allowed, POD)
        assert not run(allowed, DEPLOYMENT)

    def test_namespace_lacks_kind(self):
        netpol = {
            "kind": "NetworkPolicy",
            "metadata": {"name": "default-deny", "namespace": "ns"},
        }
        check = {"namespace_lacks_kind": "NetworkPolicy"}
        assert run(check, POD)
        assert not run(check, POD, context_docs=[netpol])

    def test_duplicate_ref(self):
        twin = {"kind": "Pod", "metadata": {"name": "p", "namespace": "ns"}}
        assert run({"duplicate_ref": True}, POD, context_docs=[twin])
        assert not run({"duplicate_ref": True}, POD)


class TestCredentialData:
    CHECK = {
        "credential_data": {
            "key_patterns": ["password", "token", "secret", "key"],
            "entropy_threshold": 4.0,
            "min_value_length": 16,
        }
    }

    def cm(self, data: dict) -> dict:
        return {"kind": "ConfigMap", "metadata": {"name": "c", "namespace": "ns"}, "data": data}

    def test_key_pattern_hit(self):
        assert run(self.CHECK, self.cm({"DB_PASSWORD": "changeme"}))
        assert run(self.CHECK, self.cm({"api-token": "x"}))

    def test_high_entropy_value_hit(self):
        assert run(self.CHECK, self.cm({"blob": "abcdefghijklmnopqrstuvwxyz012345"}))

    def test_short_or_low_entropy_values_pass(self):
        assert not run(self.CHECK, self.cm({"region": "eu-central", "log-level": "info"}))
        # Long but single-character value: zero entropy.
        assert not run(self.CHECK, self.cm({"padding": "a" * 64}))

    def test_no_data_section(self):
        assert not run(self.CHECK, {"kind": "ConfigMap", "metadata": {"name": "c"}})
