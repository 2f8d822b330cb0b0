# Copyright 2026 The textguide Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math
import random

import pytest

import textguide as tg


def corpus(n=36, classes=3, length=60, seed=3):
    rng = random.Random(seed)
    rows = []
    for i in range(n):
        c = i % classes
        tokens = [f"w{rng.randrange(120)}" for _ in range(length)]
        for _ in range(3):
            tokens[rng.randrange(20, length)] = f"c{c}k{rng.randrange(5)}"
        rows.append({"id": f"d{i}", "text": " ".join(tokens), "label": f"class{c}"})
    return tg.Corpus(rows)


def test_worked_example():
    tokens = ["a", "b", "c", "alpha", "d", "e", "beta", "f", "g", "h", "i", "j", "k"]
    cfg = tg.TruncationConfig(nta=10, part1=0.2, part2=0.1, tn=1)
    out = tg.text_guide(tokens, tg.sitfl_from_tokens(["alpha", "beta"]), cfg)
    assert out == ["a", "b", "c", "alpha", "d", "e", "beta", "f", "g", "k"]
    assert (cfg.head_budget, cfg.tail_budget, cfg.fill_budget) == (2, 1, 7)


def test_baselines():
    tokens = [f"t{i}" for i in range(50)]
    assert tg.truncate_head(tokens, 10) == tokens[:10]
    assert tg.truncate_tail(tokens, 10) == tokens[-10:]
    assert tg.truncate_head_tail(tokens, 10, 0.2, 0.8) == tokens[:2] + tokens[42:]
    with pytest.raises(tg.TextguideError, match="InvalidSplit"):
        tg.truncate_head_tail(tokens, 10, 0.2, 0.1)


def test_tokenize_roundtrip():
    assert tg.tokenize("Hello,  World! (ok)") == ["hello", "world", "ok"]
    assert tg.detokenize(["a", "b"]) == "a b"


def test_mcc():
    assert tg.mcc([[3, 0], [0, 5]]) == 1.0
    assert tg.mcc([[3, 0], [4, 0]]) == 0.0
    assert tg.confusion(["a", "b"], ["a", "a"], ["a", "b"]) == [[1, 0], [1, 0]]


def test_sitfl_and_apply(tmp_path):
    c = corpus()
    params = tg.BoostParams()
    params.rounds = 10
    s = tg.build_sitfl(c, n=30, params=params, min_df=1)
    assert len(s) > 0
    values = [v for _, v in s.entries]
    assert values == sorted(values, reverse=True)
    assert tg.Sitfl.from_text(s.to_text()) == s
    path = str(tmp_path / "x.sitfl")
    tg.write_sitfl(s, path)
    assert tg.read_sitfl(path) == s

    cfg = tg.TruncationConfig(nta=16)
    out = tg.apply_strategy(c, "text_guide", s, cfg)
    assert len(out) == len(c)
    for before, after in zip(c.rows(), out.rows()):
        assert before["id"] == after["id"]
        assert len(tg.tokenize(after["text"])) == 16

    with pytest.raises(tg.TextguideError, match="MissingSitfl"):
        tg.apply_strategy(c, "text_guide", None, cfg)

    corpus_path = str(tmp_path / "c.csv")
    tg.write_corpus(c, corpus_path, "csv")
    assert tg.load_corpus(corpus_path, "csv") == c


def test_folds_and_features():
    c = corpus()
    folds = tg.stratified_folds(c, k=3, seed=1)
    assert sorted(set(folds)) == [0, 1, 2]
    assert folds == tg.stratified_folds(c, k=3, seed=1)
    feats = tg.select_features(c, 5)
    assert len(feats) == 5
    assert all(mi >= 0 and math.isfinite(mi) for _, mi in feats)


def test_compare_and_sweep():
    c = corpus()
    params = tg.BoostParams()
    params.rounds = 5
    cfg = tg.TruncationConfig(nta=20)
    rows = tg.compare_strategies(c, [("head", cfg), ("text_guide", cfg)], k=3, boost=params,
                                 n_features=40, min_df=1)
    assert [len(m) for _, m in rows] == [3, 3]
    csv = tg.sweep_csv(c, [0.1, 0.2], [0.1], [1], 20, 3, 42, params, 40, 1, 1)
    assert csv.splitlines()[0] == "part1,part2,tn,mean_mcc,fold_mccs"
    assert len(csv.splitlines()) == 3
