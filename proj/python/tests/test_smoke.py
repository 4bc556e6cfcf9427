import os
import pathlib

import pytest

import glab

FIXTURES = pathlib.Path(os.environ.get("GLAB_FIXTURES", pathlib.Path(__file__).resolve().parents[2] / "fixtures"))


def words(ws):
    return [glab.word(w) for w in ws]


@pytest.fixture(scope="module")
def ex1():
    return glab.load_grammar(str(FIXTURES / "example1.ixg"))


@pytest.fixture(scope="module")
def ex2():
    return glab.load_grammar(str(FIXTURES / "example2.ixg"))


def test_example1_language(ex1):
    assert words(glab.indexed_language_upto(ex1, 9)) == ["abc", "aabbcc", "aaabbbccc"]


def test_example1_membership_witness(ex1):
    r = glab.indexed_membership(ex1, "aabbcc")
    assert r["member"] and r["valid"]
    assert r["witness"]["ε"] == "S"


def test_example1_not_reduced(ex1):
    reduced, offenders = glab.reduced_form_check(ex1)
    assert not reduced
    assert "S' -> A B C" in offenders
    with pytest.raises(glab.GlabError):
        glab.u_transform(ex1)


def test_u_transform_and_back(ex2):
    u = glab.u_transform(ex2)
    report = glab.ugi_check(u)
    assert report["is_ugi"] and report["is_reduced"] and report["has_sink_mapped_root"]
    assert glab.reverse_u(u) == ex2
    assert u == glab.load_grammar(str(FIXTURES / "example2_u.ugr"))


def test_cross_formalism_equiv(ex2):
    v = glab.equiv(ex2, glab.u_transform(ex2), 8)
    assert v["agree"]
    assert not v["left_exhausted"] and not v["right_exhausted"]
    assert words(v["left"]) == ["dd", "dddd", "dddddddd"]


def test_sug_membership(ex2):
    u = glab.u_transform(ex2)
    assert glab.sug_membership(u, "dddd")["member"]
    assert not glab.sug_membership(u, "ddd")["member"]


def test_solve():
    ok = glab.solve([("path", "1", "a", "2", "b"), ("value", "2", "b", "v")])
    assert ok["consistent"] and ok["diagnosis"] is None
    bad = glab.solve([("value", "1", "a", "v"), ("value", "1", "a", "w")])
    assert not bad["consistent"]
    assert "clash" in bad["diagnosis"]


def test_parse_print_round_trip(ex2):
    text = str(ex2)
    assert str(glab.parse_indexed_grammar(text)) == text


def test_parse_error():
    with pytest.raises(glab.GlabError, match="line"):
        glab.parse_indexed_grammar("nonterminals S\nterminals a\nindices\nstart S\nS -> b\n")


def test_cli_exit_codes():
    code, out, _ = glab.run_cli(["member", str(FIXTURES / "example2.ixg"), "ddddd"])
    assert code == 2
    code, out, _ = glab.run_cli(["enum", str(FIXTURES / "example2.ixg"), "--max-len", "4"])
    assert code == 0 and "dddd" in out
