"""Tests for instance generation and instance files."""

import json

import numpy as np
import pytest

from otcap.errors import InstanceFormatError, InvalidArgumentError
from otcap.services import (
    dump_instance,
    generate_instance,
    load_instance_file,
    parse_instance,
    solve_uniform_fast,
    to_capacity_instance,
    to_measures,
    to_sparsity_instance,
    write_instance_file,
)
from otcap.services.generator import InstanceKind


class TestGenerator:
    def test_same_seed_same_bytes(self):
        first = dump_instance(generate_instance(5, 4, 3, InstanceKind.COMBINED, seed=11))
        second = dump_instance(generate_instance(5, 4, 3, InstanceKind.COMBINED, seed=11))
        assert first == second
        assert first != dump_instance(generate_instance(5, 4, 3, InstanceKind.COMBINED, seed=12))

    def test_masses_match(self):
        doc = generate_instance(6, 3, 1, InstanceKind.CAPACITY, seed=2)
        assert sum(doc.a) == pytest.approx(sum(doc.b), rel=1e-12)
        assert min(doc.a) > 0 and min(doc.b) > 0

    def test_capacity_admits_the_product_witness(self):
        doc = generate_instance(5, 5, 1, InstanceKind.CAPACITY, seed=9)
        a, b = np.array(doc.a), np.array(doc.b)
        witness = np.outer(a, b) / a.sum()
        assert np.all(np.array(doc.capacities) >= witness)

    def test_sparse_shape(self):
        doc = generate_instance(4, 4, kind=InstanceKind.SPARSE, seed=0)
        assert doc.steps == 1
        assert doc.capacities is None
        assert doc.sparsity == [2, 2, 2, 2]
        inst = to_sparsity_instance(doc)
        assert inst.shape == (4, 4)

    def test_combined_has_per_step_budgets(self):
        doc = generate_instance(3, 4, 2, InstanceKind.COMBINED, seed=0, sparsity=3)
        assert doc.sparsity_stack() == [[3, 3, 3], [3, 3, 3]]

    def test_rejects_bad_sizes(self):
        with pytest.raises(InvalidArgumentError):
            generate_instance(0, 3, 1)
        with pytest.raises(InvalidArgumentError):
            generate_instance(3, 3, 1, InstanceKind.SPARSE, sparsity=4)


class TestInstanceFile:
    def test_two_mines(self, two_mines_path):
        doc = load_instance_file(two_mines_path)
        assert (doc.n, doc.m, doc.steps) == (2, 2, 2)
        inst = to_capacity_instance(doc)
        assert inst.is_constant

    def test_shared_matrix_is_broadcast(self):
        doc = parse_instance(json.dumps({"a": [1, 1], "b": [1, 1], "costs": [[0, 1], [1, 0]], "steps": 3}))
        assert len(doc.cost_stack()) == 3

    def test_missing_capacities_mean_no_bound(self):
        doc = parse_instance(json.dumps({"a": [1], "b": [1], "costs": [[2]]}))
        inst = to_capacity_instance(doc)
        assert np.isinf(inst.capacities[0]).all()
        assert solve_uniform_fast(inst).cost == pytest.approx(2.0)

    def test_null_capacity_entry(self):
        doc = parse_instance(json.dumps({
            "a": [1, 1], "b": [1, 1], "costs": [[0, 1], [1, 0]], "capacities": [[None, 0.5], [0.5, None]],
        }))
        capacity = to_capacity_instance(doc).capacities[0]
        assert np.isinf(capacity[0, 0]) and capacity[0, 1] == 0.5

    def test_shape_error_names_field_and_line(self):
        text = '{\n  "a": [1, 1],\n  "b": [1, 1],\n  "costs": [[0, 1]]\n}\n'
        with pytest.raises(InstanceFormatError) as excinfo:
            parse_instance(text)
        assert excinfo.value.field == "costs"
        assert excinfo.value.line == 4
        assert "costs" in str(excinfo.value)

    def test_negative_weight(self):
        text = '{\n  "a": [1, -1],\n  "b": [0, 0],\n  "costs": [[0, 1], [1, 0]]\n}\n'
        with pytest.raises(InstanceFormatError) as excinfo:
            parse_instance(text)
        assert excinfo.value.field == "a"
        assert excinfo.value.line == 2

    def test_unknown_field(self):
        with pytest.raises(InstanceFormatError) as excinfo:
            parse_instance('{"a": [1], "b": [1], "costs": [[1]], "capacity": [[1]]}')
        assert excinfo.value.field == "capacity"

    def test_bad_sparsity(self):
        with pytest.raises(InstanceFormatError) as excinfo:
            parse_instance('{"a": [1], "b": [1], "costs": [[1]], "sparsity": [2]}')
        assert excinfo.value.field == "sparsity"

    def test_invalid_json(self):
        with pytest.raises(InstanceFormatError) as excinfo:
            parse_instance('{\n  "a": [1,\n}')
        assert excinfo.value.line is not None

    def test_sparse_solve_needs_budgets(self):
        doc = parse_instance('{"a": [1], "b": [1], "costs": [[1]]}')
        with pytest.raises(InstanceFormatError):
            to_sparsity_instance(doc)
        assert to_sparsity_instance(doc, sparsity=1).sparsity == (1,)

    def test_points(self):
        doc = parse_instance(json.dumps({
            "a": [0.5, 0.5], "b": [1.0], "costs": [[0], [1]], "points_a": [[0], [1]], "points_b": [[0]],
        }))
        mu, nu = to_measures(doc)
        assert mu.points.shape == (2, 1)
        assert nu.points.shape == (1, 1)

    def test_write_read_solve_round_trip(self, tmp_path):
        doc = generate_instance(4, 4, 3, InstanceKind.CAPACITY, seed=5)
        path = write_instance_file(doc, tmp_path / "nested" / "inst.json")
        reloaded = load_instance_file(path)
        assert reloaded == doc
        assert solve_uniform_fast(to_capacity_instance(reloaded)).cost == solve_uniform_fast(
            to_capacity_instance(doc)
        ).cost

    def test_unreadable_path(self, tmp_path):
        with pytest.raises(InstanceFormatError):
            load_instance_file(tmp_path / "missing.json")
