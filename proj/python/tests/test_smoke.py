import json
import math
import os
from pathlib import Path

import pytest

import mimicry

FIXTURES = Path(os.environ.get("MIMICRY_FIXTURE_DIR", Path(__file__).resolve().parents[2] / "tests" / "fixtures"))

SOURCE = """
public class Counter {
  private int count = 0;
  public int bump(int n) {
    if (n < 0) return -1;
    count = count + n;
    return count;
  }
}
"""


def test_tokenize_drops_comments():
    assert mimicry.tokenize("a = b; // done\n/* x */ c++;") == ["a", "=", "b", ";", "c", "++", ";"]


def test_abstract_round_trip():
    unit = mimicry.abstract("position = position + 1;", idioms=set())
    assert unit["tokens"] == ["VAR_1", "=", "VAR_1", "+", "INT_1", ";"]
    assert unit["symbols"] == {"INT": {"INT_1": "1"}, "VAR": {"VAR_1": "position"}}


def test_mutants_change_one_token():
    mutants = mimicry.mutate(SOURCE, "Counter.java", k=3)
    assert mutants
    before = mimicry.tokenize(SOURCE)
    for m in mutants:
        after = mimicry.tokenize(m["patched_source"])
        assert len(after) == len(before)
        assert sum(a != b for a, b in zip(after, before)) == 1
    assert [m["id"] for m in mutants] == [m["id"] for m in mimicry.mutate(SOURCE, "Counter.java", k=3)]


def test_ochiai_and_label():
    assert mimicry.ochiai({"t1"}, {"t1", "t2"}) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert mimicry.label({"t1"}, {"t1"})["label"] == "mimicking"
    assert mimicry.label({"t1", "t3"}, {"t1"})["label"] == "coupled"
    with pytest.raises(mimicry.MimicryError):
        mimicry.label({"t1"}, set())


def test_metrics():
    preds = [True] * 3 + [False] * 97
    truths = [True, True, False] + [True] * 3 + [False] * 94
    report = mimicry.evaluate(preds, truths)
    assert report["mcc"] == pytest.approx(0.4976, abs=1e-3)
    assert mimicry.format_percent(646, 16409, 1) == "3.9%"


def test_embedder_memorises_a_sequence():
    seq = ["if", "(", "VAR_1", "<", "INT_1", ")", "@BinaryOperatorMutator", "return", "VAR_2", ";"]
    model, losses = mimicry.train_embedder([seq] * 32, max_len=16, embed_dim=16, hidden_dim=32, epochs=10)
    assert len(losses) == 10
    assert model.reconstruction_accuracy([seq]) == 1.0
    assert len(model.embed(seq)) == 16
    assert model.grad_check(seq, 1e-5) < 1e-4


def test_forest_and_cross_validation():
    xs = [[i / 10.0, (i * 7 % 5) / 5.0] for i in range(-20, 20)]
    ys = [x[0] > 0 for x in xs]
    forest = mimicry.train_forest(xs, ys, n_trees=15, seed=3)
    assert forest.n_trees == 15
    score, predicted = forest.predict([1.5, 0.0])
    assert predicted and 0.5 < score <= 1.0
    groups = [f"G{i % 10}" for i in range(len(xs))]
    cv = mimicry.cross_validate(xs, ys, groups, folds=5, n_trees=15)
    assert len(cv["folds"]) == 5
    assert all(len(f["groups"]) == 2 for f in cv["folds"])


def test_run_abstract_stage(tmp_path):
    code, errors = mimicry.run_stage("abstract", FIXTURES / "recordcopy" / "config.json", tmp_path)
    assert (code, errors) == (0, [])
    lines = (tmp_path / "abstract.jsonl").read_text().splitlines()
    assert json.loads(lines[0])["file"] == "record.c"
