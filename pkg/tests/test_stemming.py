"""Stemmer behavior pinned against the classic algorithm's published outputs."""

import pytest

from topictree.stemming import get_normalizer, identity, porter_stem, register_normalizer

# full-algorithm outputs (all steps applied), not single-step illustrations
CANONICAL = {
    "caresses": "caress",
    "ponies": "poni",
    "ties": "ti",
    "caress": "caress",
    "cats": "cat",
    "feed": "feed",
    "agreed": "agre",
    "plastered": "plaster",
    "bled": "bled",
    "motoring": "motor",
    "sing": "sing",
    "hopping": "hop",
    "tanned": "tan",
    "falling": "fall",
    "hissing": "hiss",
    "failing": "fail",
    "filing": "file",
    "happy": "happi",
    "sky": "sky",
    "rational": "ration",
    "electrical": "electr",
    "hopefulness": "hope",
    "goodness": "good",
    "allowance": "allow",
    "inference": "infer",
    "adjustable": "adjust",
    "replacement": "replac",
    "adjustment": "adjust",
    "dependent": "depend",
    "adoption": "adopt",
    "communism": "commun",
    "activate": "activ",
    "effective": "effect",
    "roll": "roll",
    "viruses": "virus",
    "virus": "viru",
    "models": "model",
    "model": "model",
    "outbreaks": "outbreak",
    "epidemics": "epidem",
}


@pytest.mark.parametrize("word,expected", sorted(CANONICAL.items()))
def test_canonical_pairs(word, expected):
    assert porter_stem(word) == expected


def test_short_words_untouched():
    for w in ("a", "is", "by", "of"):
        assert porter_stem(w) == w


def test_registry_lookup():
    assert get_normalizer("identity") is identity
    assert get_normalizer("porter") is porter_stem
    with pytest.raises(ValueError, match="unknown normalizer"):
        get_normalizer("lemmatron")


def test_register_plugin():
    register_normalizer("upper", str.upper)
    assert get_normalizer("upper")("abc") == "ABC"
