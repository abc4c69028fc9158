"""Sentiment model tests: tokenizer, scoring, weight loading."""

import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mxserve.sentiment import (
    SentimentScore,
    SentimentWeights,
    load_weights,
    sentiment_predict,
    tokenize,
)

from oracles import score_oracle, sigmoid_oracle

FIXTURE = SentimentWeights({"good": 2.0, "bad": -2.0}, bias=0.0)


class TestTokenize:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("Good movie!", ["good", "movie"]),
            ("", []),
            ("it's BAD", ["it", "s", "bad"]),
            ("  \t\n ", []),
            ("one2three", ["one2three"]),
            ("a,b;c", ["a", "b", "c"]),
            ("naïve idea", ["na", "ve", "idea"]),
            ("503 errors EVERYWHERE", ["503", "errors", "everywhere"]),
        ],
    )
    def test_examples(self, text, expected):
        assert tokenize(text) == expected

    @given(st.text(max_size=100))
    def test_tokens_are_lowercase_ascii_alphanumeric_runs(self, text):
        for token in tokenize(text):
            assert token
            assert all("a" <= ch <= "z" or "0" <= ch <= "9" for ch in token)


class TestWeights:
    @pytest.mark.parametrize("token", ["", "Upper", "two words", "tab\tin", "GOOD"])
    def test_invalid_tokens_rejected(self, token):
        with pytest.raises(ValueError):
            SentimentWeights({token: 1.0})

    def test_digits_and_hyphens_are_fine(self):
        SentimentWeights({"sci-fi": 1.0, "42": -0.5})


class TestPredict:
    def test_positive_token(self):
        [score] = sentiment_predict(FIXTURE, [["good"]])
        assert score.positive == pytest.approx(0.8807970779778823, abs=1e-12)
        assert score.negative == pytest.approx(0.11920292202211769, abs=1e-12)
        oracle = score_oracle(dict(FIXTURE.vocab), FIXTURE.bias, ["good"])
        assert score.positive == pytest.approx(oracle["positive"], abs=1e-12)

    def test_empty_instance_scores_at_bias(self):
        [score] = sentiment_predict(FIXTURE, [[]])
        assert score.positive == 0.5
        assert score.negative == 0.5

    def test_opposing_tokens_cancel(self):
        [score] = sentiment_predict(FIXTURE, [["good", "bad"]])
        assert score.positive == pytest.approx(0.5, abs=1e-12)

    def test_repeated_tokens_count_with_multiplicity(self):
        [score] = sentiment_predict(FIXTURE, [["good", "good"]])
        assert score.positive == pytest.approx(sigmoid_oracle(4.0), abs=1e-12)

    def test_unknown_tokens_contribute_nothing(self):
        [score] = sentiment_predict(FIXTURE, [["stupendous", "good"]])
        assert score.positive == pytest.approx(sigmoid_oracle(2.0), abs=1e-12)

    def test_bias_shifts_the_score(self):
        weights = SentimentWeights({"good": 2.0}, bias=-2.0)
        [score] = sentiment_predict(weights, [["good"]])
        assert score.positive == 0.5

    def test_batch_order_is_preserved(self):
        scores = sentiment_predict(FIXTURE, [["good"], ["bad"]])
        assert scores[0].positive > 0.5 > scores[1].positive

    @pytest.mark.parametrize("z", [-800.0, 800.0])
    def test_extreme_scores_stay_finite(self, z):
        weights = SentimentWeights({"tok": z})
        [score] = sentiment_predict(weights, [["tok"]])
        assert 0.0 <= score.positive <= 1.0
        assert math.isfinite(score.positive)


@st.composite
def weights_and_instances(draw):
    tokens = draw(
        st.lists(
            st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789", min_size=1, max_size=8),
            min_size=1,
            max_size=8,
            unique=True,
        )
    )
    values = draw(
        st.lists(
            st.floats(min_value=-1e4, max_value=1e4, allow_nan=False),
            min_size=len(tokens),
            max_size=len(tokens),
        )
    )
    bias = draw(st.floats(min_value=-1e4, max_value=1e4, allow_nan=False))
    instance = draw(st.lists(st.sampled_from(tokens), max_size=12))
    return SentimentWeights(dict(zip(tokens, values)), bias=bias), instance


class TestProperties:
    @given(weights_and_instances())
    def test_scores_normalize(self, case):
        weights, instance = case
        [score] = sentiment_predict(weights, [instance])
        assert 0.0 <= score.positive <= 1.0
        assert 0.0 <= score.negative <= 1.0
        assert abs(score.positive + score.negative - 1.0) <= 1e-9

    @given(weights_and_instances(), st.floats(min_value=0.0, max_value=100.0, allow_nan=False))
    def test_appending_positive_token_never_decreases_positive(self, case, boost):
        weights, instance = case
        vocab = dict(weights.vocab)
        vocab["upbeat"] = boost
        weights = SentimentWeights(vocab, bias=weights.bias)
        [before] = sentiment_predict(weights, [instance])
        [after] = sentiment_predict(weights, [instance + ["upbeat"]])
        assert after.positive >= before.positive


class TestScoreInvariants:
    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            SentimentScore(positive=1.2, negative=-0.2)

    def test_non_normalized_rejected(self):
        with pytest.raises(ValueError):
            SentimentScore(positive=0.7, negative=0.7)


class TestLoadWeights:
    def _write(self, tmp_path, payload) -> str:
        path = tmp_path / "weights.json"
        path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
        return path

    def test_loads_fixture_file(self, tmp_path):
        path = self._write(tmp_path, {"vocab": {"good": 2.0, "bad": -2.0}, "bias": 0.0})
        weights = load_weights(path)
        assert weights.vocab == {"good": 2.0, "bad": -2.0}
        assert weights.bias == 0.0

    def test_missing_file_names_the_file(self, tmp_path):
        with pytest.raises(ValueError, match="weights.json"):
            load_weights(tmp_path / "weights.json")

    def test_invalid_json_names_the_file(self, tmp_path):
        path = self._write(tmp_path, "{nope")
        with pytest.raises(ValueError, match="not valid JSON"):
            load_weights(path)

    @pytest.mark.parametrize(
        "payload,field",
        [
            ([1, 2], "JSON object"),
            ({"bias": 0.0}, "vocab"),
            ({"vocab": ["good"], "bias": 0.0}, "vocab"),
            ({"vocab": {"good": "high"}, "bias": 0.0}, "vocab"),
            ({"vocab": {"good": True}, "bias": 0.0}, "vocab"),
            ({"vocab": {}}, "bias"),
            ({"vocab": {}, "bias": "zero"}, "bias"),
            ({"vocab": {"BAD": 1.0}, "bias": 0.0}, "vocab"),
        ],
    )
    def test_malformed_fields_are_named(self, tmp_path, payload, field):
        path = self._write(tmp_path, payload)
        with pytest.raises(ValueError, match=field):
            load_weights(path)
