import math
from types import SimpleNamespace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import LEXICON_PATH
from emoflow.lexicon import (
    EMOJI_BLOCKS,
    SKIN_TONES,
    EmojiSentimentEntry,
    LexiconError,
    SentimentLexicon,
    extract_emojis,
    intensity_factor,
    load_lexicon,
    message_intensities,
    render,
    save_lexicon,
    strip_emojis,
)

LEX = load_lexicon(LEXICON_PATH)
HEADER = "char,codepoint,occurrences,negative,neutral,positive\n"


def scan_oracle(text):
    out = []
    for ch in text:
        cp = ord(ch)
        if SKIN_TONES[0] <= cp <= SKIN_TONES[1]:
            continue
        if any(lo <= cp <= hi for lo, hi in EMOJI_BLOCKS):
            out.append(cp)
    return out


def test_heart_eyes_entry(lexicon):
    e = lexicon.get(0x1F60D)
    assert (e.neg, e.neut, e.pos) == (0.052, 0.219, 0.729)
    assert e.char == "😍"


def test_full_file_statistics(lexicon):
    stats = lexicon.column_stats()
    assert len(lexicon) == 751
    assert stats["positive"]["count"] == 751
    assert abs(stats["positive"]["mean"] - 0.447) <= 0.005
    assert abs(stats["positive"]["max"] - 0.972) <= 0.005
    assert abs(stats["positive"]["min"] - 0.007) <= 0.005
    # the other two columns of the published summary
    assert abs(stats["negative"]["mean"] - 0.164) <= 0.005
    assert abs(stats["neutral"]["max"] - 0.987) <= 0.005


def test_empty_file(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    with pytest.raises(LexiconError, match="empty lexicon"):
        load_lexicon(p)
    p.write_text(HEADER)
    with pytest.raises(LexiconError, match="empty lexicon"):
        load_lexicon(p)


def test_missing_file(tmp_path):
    with pytest.raises(LexiconError, match="not found"):
        load_lexicon(tmp_path / "nope.csv")


@pytest.mark.parametrize("row, message", [
    ("😍,0x1f60d,10,0.1,0.2\n", "expected 6 columns"),
    ("😍,0x1f60d,10,abc,0.2,0.7\n", "could not convert"),
    ("😍,0x1f60d,10,0.5,0.5,0.5\n", "sum"),
    ("😍,0x1f60d,10,-0.1,0.4,0.7\n", r"\[0, 1\]"),
])
def test_malformed_rows_strict_and_lenient(tmp_path, row, message):
    p = tmp_path / "lex.csv"
    p.write_text(HEADER + "😀,0x1f600,5,0.1,0.2,0.7\n" + row, encoding="utf-8")
    with pytest.raises(LexiconError, match=r"lex.csv:3: .*" + message):
        load_lexicon(p)
    lenient = load_lexicon(p, strict=False)
    assert list(lenient.entries) == [0x1F600]


def test_duplicate_codepoint(tmp_path):
    p = tmp_path / "lex.csv"
    p.write_text(HEADER + "😀,0x1f600,5,0.1,0.2,0.7\n😀,0x1F600,5,0.1,0.2,0.7\n", encoding="utf-8")
    with pytest.raises(LexiconError, match="duplicate codepoint 0x1f600"):
        load_lexicon(p)


def test_case_insensitive_columns_and_extra_columns(tmp_path):
    p = tmp_path / "lex.csv"
    p.write_text("Char,CODEPOINT,Occurrences,Negative,Neutral,Positive,Extra\n😀,0x1f600,5,0.1,0.2,0.7,x\n",
                 encoding="utf-8")
    assert load_lexicon(p).get(0x1F600).pos == 0.7


def test_round_trip(tmp_path, lexicon):
    p = tmp_path / "copy.csv"
    save_lexicon(lexicon, p)
    again = load_lexicon(p)
    assert dict(again.entries) == dict(lexicon.entries)
    assert dict(again.occurrences) == dict(lexicon.occurrences)


def test_lexicon_is_read_only(lexicon):
    with pytest.raises(TypeError):
        lexicon.entries[1] = None


def test_intensity_factor_examples():
    assert intensity_factor(EmojiSentimentEntry(0x1F60D, "", 0.052, 0.219, 0.729)) == 1.729
    # these two triples do not sum to ~1, so they cannot be lexicon entries; the factor is defined on any triple
    assert intensity_factor(SimpleNamespace(neg=0.0, neut=0.0, pos=0.0)) == 1.0
    triple = (0.778, 0.1, 0.1)
    assert intensity_factor(SimpleNamespace(neg=triple[0], neut=triple[1], pos=triple[2])) == 1.0 + max(triple) == 1.778


def test_intensity_factor_bounds_on_full_file(lexicon):
    for e in lexicon.entries.values():
        phi = intensity_factor(e)
        assert phi == 1.0 + max((e.neg, e.neut, e.pos))
        assert 1.0 <= phi < 2.0


def test_extract_examples():
    assert extract_emojis("ship it 🚀🚀") == [0x1F680, 0x1F680]
    assert extract_emojis("no emojis here.") == []
    assert extract_emojis("mixed ❤ text 😂") == [0x2764, 0x1F602]


def test_extract_decomposes_sequences():
    # woman technologist with skin tone: woman + tone + ZWJ + laptop
    text = "👩🏽‍💻 and ❤️"
    assert extract_emojis(text) == [0x1F469, 0x1F4BB, 0x2764]
    assert extract_emojis("👋🏻") == [0x1F44B]
    assert strip_emojis("hi 👋!") == "hi !"


@given(st.text(alphabet=st.characters(min_codepoint=0x20, max_codepoint=0x1FAFF), max_size=40))
def test_extract_matches_scan_oracle(text):
    found = extract_emojis(text)
    assert found == scan_oracle(text)
    assert extract_emojis(render(found)) == found


def test_message_intensities(lexicon):
    assert message_intensities("love it 😍", lexicon) == [1.729]
    assert message_intensities("plain", lexicon) == []
    one = SentimentLexicon({0x1F600: EmojiSentimentEntry(0x1F600, "", 0.1, 0.2, 0.7)})
    assert message_intensities("😀 🛸", one) == [1.7]


@given(st.text(alphabet=st.sampled_from(list("ab ") + ["😍", "😂", "🛸", "❤", "👍"]), max_size=30))
def test_intensities_never_longer_than_extraction(text):
    phis = message_intensities(text, LEX)
    assert len(phis) <= len(extract_emojis(text))
    assert all(1.0 <= p < 2.0 for p in phis)


def test_entry_validation():
    with pytest.raises(ValueError):
        EmojiSentimentEntry(1, "", 0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        SentimentLexicon({})
    assert math.isclose(EmojiSentimentEntry(1, "", 0.3, 0.3, 0.39).pos, 0.39)
