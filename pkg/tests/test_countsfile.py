"""Tests for the counts-file schema: strict parsing, error codes, round trips."""

import json

import numpy as np
import pytest

from qmvote import CountsFormatError, CountsTable, parse_counts, serialize_counts
from qmvote.countsfile import load_counts, write_counts


def doc(**overrides):
    base = {
        "schema_version": "1",
        "n": 2,
        "shots": 3,
        "counts": {"01": 2, "11": 1},
    }
    base.update(overrides)
    return json.dumps(base)


class TestParseCounts:
    def test_minimal_valid_file(self):
        table = parse_counts(doc())
        assert table.n == 2
        assert table.shots == 3
        assert table["01"] == 2

    def test_accepts_bytes(self):
        assert parse_counts(doc().encode()) == parse_counts(doc())

    def test_sum_mismatch_code(self):
        with pytest.raises(CountsFormatError) as err:
            parse_counts(doc(shots=5))
        assert err.value.code == "SUM_MISMATCH"
        assert "shots" in str(err.value)

    def test_length_mismatch_code(self):
        with pytest.raises(CountsFormatError) as err:
            parse_counts(doc(counts={"011": 3}))
        assert err.value.code == "LENGTH_MISMATCH"

    def test_unknown_field_rejected(self):
        with pytest.raises(CountsFormatError) as err:
            parse_counts(doc(comment="hello"))
        assert err.value.code == "SCHEMA"
        assert "comment" in str(err.value)

    def test_missing_field_rejected(self):
        raw = json.loads(doc())
        del raw["shots"]
        with pytest.raises(CountsFormatError) as err:
            parse_counts(json.dumps(raw))
        assert err.value.code == "SCHEMA"

    def test_wrong_version_rejected(self):
        with pytest.raises(CountsFormatError) as err:
            parse_counts(doc(schema_version="2"))
        assert err.value.code == "SCHEMA"

    def test_bad_documents_rejected(self):
        for bad in ["not json", "[1,2]", doc(n=0), doc(n="2"), doc(shots=True)]:
            with pytest.raises(CountsFormatError):
                parse_counts(bad)

    def test_bad_counts_rejected(self):
        for counts in [{"01": 0}, {"01": -2}, {"01": 1.5}, {"01": True}, {"0b": 1}, {}]:
            with pytest.raises(CountsFormatError):
                parse_counts(doc(counts=counts, shots=1))

    def test_right_bit_order_reverses_keys(self):
        table = parse_counts(doc(counts={"01": 2, "11": 1}), bit_order="right")
        assert table["10"] == 2
        assert table["11"] == 1

    def test_bad_bit_order(self):
        with pytest.raises(CountsFormatError):
            parse_counts(doc(), bit_order="middle")


class TestSerializeCounts:
    def test_canonical_output_sorted(self):
        text = serialize_counts(CountsTable({"11": 1, "01": 2}))
        parsed = json.loads(text)
        assert list(parsed["counts"]) == ["01", "11"]
        assert parsed["schema_version"] == "1"

    def test_roundtrip_identity_random_tables(self):
        rng = np.random.default_rng(20)
        for _ in range(1000):
            n = int(rng.integers(1, 12))
            distinct = int(rng.integers(1, 8))
            entries = {}
            for _ in range(distinct):
                key = "".join(rng.choice(["0", "1"], size=n))
                entries[key] = int(rng.integers(1, 1000))
            table = CountsTable(entries, n=n)
            assert parse_counts(serialize_counts(table)) == table

    def test_file_roundtrip(self, tmp_path):
        table = CountsTable({"010": 4, "111": 1})
        path = tmp_path / "counts.json"
        write_counts(path, table)
        assert load_counts(path) == table
