import pytest

from stipula.errors import LexError
from stipula.syntax import lex


def kinds(src):
    return [t.kind for t in lex(src)][:-1]


def test_asset_arrow():
    assert kinds("y -o wallet") == ["IDENT", "ASSETARROW", "IDENT"]


def test_event_guard_tokens():
    assert kinds("now + rent_time >> @Using") == [
        "NOW", "PLUS", "IDENT", "EVENTARROW", "AT", "IDENT"]


def test_comma_decimal_rejected():
    with pytest.raises(LexError) as exc:
        lex("0,1")
    assert exc.value.line == 1


def test_spans_track_lines_and_columns():
    toks = lex("a\n  -> b")
    arrow = toks[1]
    assert (arrow.kind, arrow.line, arrow.col) == ("ARROW", 2, 3)


def test_comments_are_skipped():
    assert kinds("x // -> y\n-> z") == ["IDENT", "ARROW", "IDENT"]


@pytest.mark.parametrize("src", ["a $ b", "\"open", "1.2.3"])
def test_garbage(src):
    with pytest.raises(LexError):
        lex(src)


def test_decimal_literal_value():
    tok = lex("12.5")[0]
    assert tok.kind == "NUMBER" and tok.text == "12.5"
