import json

import pytest

from avegen import (
    AVPair,
    DatasetStats,
    DeriveError,
    PipelineConfig,
    ProductRecord,
    RawTuple,
    derive,
    split,
    stats,
)
from avegen.preprocess import PRESETS, load_pipeline_config, read_raw_tuples
from conftest import make_synthetic_record
import random


# Ten tuples over attributes {a: 5, b: 3, c: 2}. Hand-traced below for both
# filtering profiles; the expected numbers in the tests come from that trace.
FIXTURE = [
    RawTuple("red shirt cotton", "a", "red"),       # survives everywhere
    RawTuple("red shirt cotton", "b", "cotton"),    # survives everywhere
    RawTuple("blue pant wool", "a", "blue"),        # survives everywhere
    RawTuple("blue pant wool", "a", "NULL"),        # null marker -> stage 1
    RawTuple("green hat straw", "a", "yes"),        # literal (mae) / kept (v1)
    RawTuple("green hat straw", "b", "straw"),      # survives everywhere
    RawTuple("black sock nylon", "a", "velvet"),    # not in title (mae) / kept (v1)
    RawTuple("black sock nylon", "b", "nylon"),     # survives everywhere
    RawTuple("white cap mesh", "c", "white"),       # rare attribute
    RawTuple("white cap mesh", "c", "mesh"),        # rare attribute
]

V1_STYLE = PipelineConfig(min_attr_freq=3, null_markers=frozenset({"NULL"}))
MAE_STYLE = PipelineConfig(
    min_attr_freq=3,
    drop_value_literals=frozenset({"yes", "no", "na"}),
    require_value_in_title=True,
)


class TestDeriveFixture:
    def test_v1_style_rules(self):
        result = derive(FIXTURE, V1_STYLE)
        att = result.attrition
        assert att["input"] == 10
        assert att["dropped_value_filtered"] == 1      # the NULL tuple
        assert att["dropped_value_not_in_title"] == 0  # check disabled
        assert att["dropped_attr_frequency"] == 2      # both c tuples
        assert att["tuples_kept"] == 7
        assert att["records"] == 4

        by_title = {r.title: r for r in result.records}
        assert set(by_title) == {
            "red shirt cotton", "blue pant wool", "green hat straw", "black sock nylon",
        }
        assert by_title["red shirt cotton"].pairs == (AVPair("a", "red"), AVPair("b", "cotton"))
        assert by_title["blue pant wool"].pairs == (AVPair("a", "blue"),)
        assert by_title["green hat straw"].pairs == (AVPair("a", "yes"), AVPair("b", "straw"))
        assert by_title["black sock nylon"].pairs == (AVPair("a", "velvet"), AVPair("b", "nylon"))

        surviving_attrs = {p.attribute for r in result.records for p in r.pairs}
        assert surviving_attrs == {"a", "b"}

    def test_mae_style_rules(self):
        result = derive(FIXTURE, MAE_STYLE)
        att = result.attrition
        assert att["input"] == 10
        assert att["dropped_value_filtered"] == 2      # NULL + "yes"
        assert att["dropped_value_not_in_title"] == 1  # velvet
        # "a" falls to freq 2 after cleaning and dies with both "c" tuples
        assert att["dropped_attr_frequency"] == 4
        assert att["tuples_kept"] == 3
        assert att["records"] == 3

        assert [(r.title, r.pairs) for r in result.records] == [
            ("red shirt cotton", (AVPair("b", "cotton"),)),
            ("green hat straw", (AVPair("b", "straw"),)),
            ("black sock nylon", (AVPair("b", "nylon"),)),
        ]

    def test_records_are_in_first_seen_title_order_with_sequential_ids(self):
        result = derive(FIXTURE, V1_STYLE)
        assert [r.id for r in result.records] == ["000000", "000001", "000002", "000003"]
        assert result.records[0].title == "red shirt cotton"

    def test_deterministic(self):
        a = derive(FIXTURE, V1_STYLE)
        b = derive(FIXTURE, V1_STYLE)
        assert a.records == b.records
        assert a.attrition == b.attrition

    def test_duplicate_tuples_dedup_within_record(self):
        raw = [
            RawTuple("red shirt", "a", "red"),
            RawTuple("red shirt", "A", "Red"),
        ]
        result = derive(raw, PipelineConfig())
        [record] = result.records
        assert record.pairs == (AVPair("a", "red"),)
        assert result.attrition["pairs_deduplicated"] == 1

    def test_separator_tuples_dropped(self):
        raw = [
            RawTuple("red shirt", "a|b", "red"),
            RawTuple("red shirt", "a", "red;blue"),
            RawTuple("red shirt", "a", "red"),
        ]
        result = derive(raw, PipelineConfig())
        assert result.attrition["dropped_separator"] == 2
        assert result.records[0].pairs == (AVPair("a", "red"),)

    def test_blank_fields_dropped(self):
        raw = [
            RawTuple("  ", "a", "x"),
            RawTuple("t u", "", "x"),
            RawTuple("t u", "a", "  "),
            RawTuple("t u", "a", "t"),
        ]
        result = derive(raw, PipelineConfig())
        assert result.attrition["dropped_blank"] == 3
        assert len(result.records) == 1

    def test_empty_output_raises_with_attrition(self):
        with pytest.raises(DeriveError) as err:
            derive(FIXTURE, PipelineConfig(min_attr_freq=100))
        assert err.value.attrition["dropped_attr_frequency"] == 9
        assert "records=0" in str(err.value)

    def test_max_attr_freq_drops_frequent(self):
        # post-cleaning frequencies: a=4 (the NULL tuple is gone), b=3, c=2
        config = PipelineConfig(min_attr_freq=1, max_attr_freq=3)
        result = derive(FIXTURE, config)
        surviving = {p.attribute for r in result.records for p in r.pairs}
        assert "a" not in surviving
        assert {"b", "c"} <= surviving


class TestDeriveInvariants:
    @staticmethod
    def random_raw(rng, n=80):
        attrs = [f"attr{i}" for i in range(6)]
        words = [f"w{i}" for i in range(12)]
        raw = []
        for _ in range(n):
            tokens = rng.sample(words, k=4)
            value = rng.choice(tokens) if rng.random() < 0.7 else "absent"
            value = rng.choice([value, "NULL", "yes"]) if rng.random() < 0.2 else value
            raw.append(RawTuple(" ".join(tokens), rng.choice(attrs), value))
        return raw

    def test_output_respects_config(self):
        from avegen import find_value_span, whitespace_tokenize

        rng = random.Random(99)
        for trial in range(20):
            raw = self.random_raw(rng)
            config = PipelineConfig(
                min_attr_freq=rng.randint(1, 6),
                drop_value_literals=frozenset({"yes"}),
                require_value_in_title=bool(rng.random() < 0.5),
            )
            try:
                result = derive(raw, config)
            except DeriveError:
                continue

            # independent re-derivation of the post-cleaning tuple stream
            def survives_cleaning(t):
                if t.value in ("NULL", "yes"):
                    return False
                if config.require_value_in_title:
                    return find_value_span(whitespace_tokenize(t.title), t.value) is not None
                return True

            stream = [t for t in raw if survives_cleaning(t)]
            stream_freq = {}
            for t in stream:
                stream_freq[t.attribute] = stream_freq.get(t.attribute, 0) + 1

            for record in result.records:
                for pair in record.pairs:
                    assert pair.value not in ("NULL", "yes")
                    assert stream_freq[pair.attribute] >= config.min_attr_freq
                    if config.require_value_in_title:
                        tok = whitespace_tokenize(record.title)
                        assert find_value_span(tok, pair.value) is not None


class TestPresets:
    def test_v1_preset_thresholds(self):
        preset = PRESETS["av-data-v1"]
        assert preset.min_attr_freq == 60
        assert preset.null_markers == frozenset({"NULL"})
        assert not preset.require_value_in_title

    def test_mae_preset_thresholds(self):
        preset = PRESETS["av-mae"]
        assert preset.min_attr_freq == 700
        assert preset.drop_value_literals == frozenset({"yes", "no", "na"})
        assert preset.require_value_in_title


class TestPipelineConfig:
    def test_min_freq_validated(self):
        with pytest.raises(ValueError):
            PipelineConfig(min_attr_freq=0)

    def test_max_must_exceed_min(self):
        with pytest.raises(ValueError):
            PipelineConfig(min_attr_freq=5, max_attr_freq=5)

    def test_load_from_json(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({
            "min_attr_freq": 2,
            "drop_value_literals": ["na"],
            "require_value_in_title": True,
        }))
        config = load_pipeline_config(path)
        assert config.min_attr_freq == 2
        assert config.drop_value_literals == frozenset({"na"})

    def test_unknown_config_key_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"min_freq": 2}))
        with pytest.raises(ValueError, match="unknown config fields"):
            load_pipeline_config(path)


class TestSplit:
    @staticmethod
    def records(n):
        rng = random.Random(0)
        return [make_synthetic_record(rng, f"r{i}") for i in range(n)]

    def test_exact_sizes_100(self):
        train, valid, test = split(self.records(100), (0.8, 0.1, 0.1), seed=1)
        assert (len(train), len(valid), len(test)) == (80, 10, 10)

    def test_remainder_goes_to_train_101(self):
        train, valid, test = split(self.records(101), (0.8, 0.1, 0.1), seed=1)
        assert (len(train), len(valid), len(test)) == (81, 10, 10)

    def test_deterministic_membership(self):
        records = self.records(50)
        a = split(records, (0.8, 0.1, 0.1), seed=7)
        b = split(records, (0.8, 0.1, 0.1), seed=7)
        assert all(x == y for x, y in zip(a, b))

    def test_partition(self):
        records = self.records(37)
        train, valid, test = split(records, (0.6, 0.2, 0.2), seed=3)
        ids = [r.id for part in (train, valid, test) for r in part]
        assert sorted(ids) == sorted(r.id for r in records)
        assert len(set(ids)) == len(ids)

    def test_bad_ratios(self):
        records = self.records(10)
        with pytest.raises(ValueError):
            split(records, (0.5, 0.4, 0.2), seed=1)
        with pytest.raises(ValueError):
            split(records, (1.0, -0.1, 0.1), seed=1)

    def test_too_few_records(self):
        with pytest.raises(ValueError):
            split(self.records(2), (0.8, 0.1, 0.1), seed=1)


class TestStats:
    def test_counts(self):
        records = []
        for i, n_pairs in enumerate([1, 1, 2, 3, 1]):
            pairs = tuple(AVPair(f"a{j}", f"v{j}") for j in range(n_pairs))
            records.append(ProductRecord(f"r{i}", "t x", pairs))
        result = stats(records)
        assert result == DatasetStats(n_sentences=5, n_single=3, n_multi=2, n_attributes=3)

    def test_empty(self):
        assert stats([]) == DatasetStats(0, 0, 0, 0)

    def test_derived_fixture_stats(self):
        records = derive(FIXTURE, V1_STYLE).records
        result = stats(records)
        assert result.n_sentences == 4
        assert result.n_single == 1   # blue pant wool
        assert result.n_multi == 3
        assert result.n_attributes == 2

    def test_attribute_count_is_normalized(self):
        records = [
            ProductRecord("a", "t x", (AVPair("Brand", "x"),)),
            ProductRecord("b", "t x", (AVPair("brand", "y"),)),
        ]
        assert stats(records).n_attributes == 1


class TestRawTupleIO:
    def test_jsonl(self, tmp_path):
        path = tmp_path / "raw.jsonl"
        path.write_text(
            json.dumps({"title": "t u", "attribute": "a", "value": "t"}) + "\n\n"
            + json.dumps({"title": "v w", "attribute": "b", "value": "w"}) + "\n"
        )
        tuples = read_raw_tuples(path)
        assert tuples == [RawTuple("t u", "a", "t"), RawTuple("v w", "b", "w")]

    def test_tsv(self, tmp_path):
        path = tmp_path / "raw.tsv"
        path.write_text("t u\ta\tt\nv w\tb\tw\n")
        tuples = read_raw_tuples(path)
        assert tuples == [RawTuple("t u", "a", "t"), RawTuple("v w", "b", "w")]

    def test_tsv_wrong_columns(self, tmp_path):
        path = tmp_path / "raw.tsv"
        path.write_text("only two\tcolumns\n")
        with pytest.raises(ValueError, match="3 tab-separated"):
            read_raw_tuples(path)

    def test_jsonl_missing_field(self, tmp_path):
        path = tmp_path / "raw.jsonl"
        path.write_text(json.dumps({"title": "t", "attribute": "a"}) + "\n")
        with pytest.raises(ValueError, match="missing field"):
            read_raw_tuples(path)
