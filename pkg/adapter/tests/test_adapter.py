import json

import pytest

from ave_adapter import CharVocab, SchemaError, TrainConfig, load_training_pairs, train
from ave_adapter.data import load_generation_inputs
from ave_adapter.generation import generate_file
from conftest import make_corpus, write_encoded_file


class TestCharVocab:
    def test_round_trip(self):
        vocab = CharVocab.from_texts(["abc 12", "xyz"])
        ids = vocab.encode("cab 1z")
        assert vocab.decode(ids) == "cab 1z"

    def test_unknown_chars_dropped_on_decode(self):
        vocab = CharVocab.from_texts(["ab"])
        ids = vocab.encode("aQb")
        assert vocab.decode(ids) == "ab"

    def test_save_load(self, tmp_path):
        vocab = CharVocab.from_texts(["hello world"])
        vocab.save(tmp_path / "v.json")
        assert CharVocab.load(tmp_path / "v.json") == vocab

    def test_truncation(self):
        vocab = CharVocab.from_texts(["abcdef"])
        assert len(vocab.encode("abcdef", max_len=5)) == 5


class TestDataLoading:
    def test_schema_error_names_line(self, tmp_path):
        path = tmp_path / "t.jsonl"
        path.write_text(
            json.dumps({"id": "a", "title": "x", "target": "y"}) + "\n"
            + json.dumps({"id": "b", "title": "x"}) + "\n"
        )
        with pytest.raises(SchemaError, match=r":2:"):
            load_training_pairs(path)

    def test_empty_train_file_rejected(self, tmp_path):
        path = tmp_path / "t.jsonl"
        path.write_text("\n")
        with pytest.raises(SchemaError, match="no training pairs"):
            load_training_pairs(path)

    def test_generation_inputs(self, tmp_path):
        path = tmp_path / "g.jsonl"
        path.write_text(json.dumps({"id": "a", "title": "x y"}) + "\n")
        [item] = load_generation_inputs(path)
        assert (item.id, item.title) == ("a", "x y")


class TestTrainConfig:
    def test_defaults_follow_published_setup(self):
        config = TrainConfig()
        assert config.batch_size == 16
        assert config.learning_rate == pytest.approx(3e-4)
        assert config.selection == "best_valid_loss"

    def test_validation(self):
        with pytest.raises(ValueError):
            TrainConfig(batch_size=0)
        with pytest.raises(ValueError):
            TrainConfig(learning_rate=-1)


class TestTraining:
    def test_loss_decreases_on_toy_corpus(self, tmp_path):
        records = make_corpus(50, seed=1)
        train_file = tmp_path / "train.jsonl"
        valid_file = tmp_path / "valid.jsonl"
        write_encoded_file(train_file, records[:40])
        write_encoded_file(valid_file, records[40:])
        config = TrainConfig(max_epochs=2, seed=11)
        result = train(train_file, valid_file, config, tmp_path / "artifact")
        history = result["history"]
        assert len(history) == 2
        assert history[1]["train_loss"] < history[0]["train_loss"]

    def test_artifact_layout_and_manifest(self, tmp_path, toy_corpus):
        train_file = tmp_path / "train.jsonl"
        write_encoded_file(train_file, toy_corpus)
        config = TrainConfig(max_epochs=1, seed=2)
        train(train_file, train_file, config, tmp_path / "artifact")
        artifact = tmp_path / "artifact"
        for name in ("adapter_config.json", "vocab.json", "metrics.jsonl", "manifest.json"):
            assert (artifact / name).exists(), name
        manifest = json.loads((artifact / "manifest.json").read_text())
        assert manifest["train_config"]["batch_size"] == 16
        assert manifest["train_config"]["model_key"] == "tiny"

    def test_resume_echoes_identical_config(self, tmp_path, toy_corpus):
        train_file = tmp_path / "train.jsonl"
        write_encoded_file(train_file, toy_corpus)
        config = TrainConfig(max_epochs=1, seed=2)
        train(train_file, train_file, config, tmp_path / "first")
        train(train_file, train_file, config, tmp_path / "second",
              resume_from=tmp_path / "first")
        first = json.loads((tmp_path / "first" / "manifest.json").read_text())
        second = json.loads((tmp_path / "second" / "manifest.json").read_text())
        assert second["train_config"] == first["train_config"]
        assert second["resumed_from"] == str(tmp_path / "first")


class TestGeneration:
    def test_line_count_and_schema(self, tmp_path, toy_corpus):
        train_file = tmp_path / "train.jsonl"
        write_encoded_file(train_file, toy_corpus)
        train(train_file, train_file, TrainConfig(max_epochs=1, seed=4), tmp_path / "artifact")

        gen_in = tmp_path / "titles.jsonl"
        gen_in.write_text("".join(
            json.dumps({"id": r.id, "title": r.title}) + "\n" for r in toy_corpus
        ))
        gen_out = tmp_path / "gen.jsonl"
        n = generate_file(tmp_path / "artifact", gen_in, gen_out)
        lines = [json.loads(l) for l in gen_out.read_text().splitlines()]
        assert n == len(lines) == len(toy_corpus)
        assert [l["id"] for l in lines] == [r.id for r in toy_corpus]
        for line in lines:
            assert isinstance(line["generated"], str)

    def test_missing_artifact_rejected(self, tmp_path):
        gen_in = tmp_path / "titles.jsonl"
        gen_in.write_text(json.dumps({"id": "a", "title": "x"}) + "\n")
        with pytest.raises(FileNotFoundError):
            generate_file(tmp_path / "nope", gen_in, tmp_path / "out.jsonl")
