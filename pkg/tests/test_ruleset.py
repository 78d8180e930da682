import pytest
from hypothesis import given, strategies as st

from ca93.ruleset import (
    Rule, RuleParseError, RuleTable, check_coherence, conflicts, format_rule_table, load_rule_table,
    parse_rule_table, rotation_analysis, rotation_class_key, rotations,
)
from oracles import scan_lookup

words = st.text(alphabet="WB", min_size=9, max_size=9)
states = st.sampled_from("WB")


def test_shipped_table_size_and_ids(rules):
    assert len(rules) == 281
    assert sorted(r.id for r in rules) == list(range(1, 282))


def test_parse_examples():
    t = parse_rule_table("17 W WBWWWWBBB B\n1 W WWWWWWWWW W  # quiescence\n")
    assert t[17] == Rule(17, "W", "WBWWWWBBB", "B")
    assert t[1].next == "W"
    assert 17 in t and 99 not in t


@pytest.mark.parametrize("text", [
    "17 W WBWWWW B",
    "17 W WBWWWWBBB",
    "x W WBWWWWBBB B",
    "17 G WBWWWWBBB B",
    "17 W WBWWWWBBX B",
])
def test_parse_errors_carry_line_number(text):
    with pytest.raises(RuleParseError, match="line 2"):
        parse_rule_table("1 W WWWWWWWWW W\n" + text)


def test_duplicate_id_rejected():
    with pytest.raises(RuleParseError):
        parse_rule_table("1 W WWWWWWWWW W\n1 B WWWWWWWWW W\n")


def test_lookup_examples(rules):
    assert rules.lookup("W", "WBWWWWBBB") == "B"
    assert rules.lookup("W", "WWWWWWWWW") == "W"
    assert rules.lookup("B", "BBWBWBBWB") == "W"
    assert rules.match("B", "BBWBWBBWB").id == 116
    assert rules.lookup("W", "BBBBBBBBB") is None


def test_round_trip(rules):
    again = parse_rule_table(format_rule_table(rules))
    assert list(again) == list(rules)


@given(states, words)
def test_lookup_agrees_with_linear_scan(cur, nbhd):
    table = load_rule_table()
    fast, slow = table.match(cur, nbhd), scan_lookup(table, cur, nbhd)
    assert fast == slow


def test_every_shipped_pattern_found(rules):
    for r in rules:
        assert rules.match(r.current, r.nbhd) is r


def test_coherence():
    assert conflicts(load_rule_table()) == []
    toy = RuleTable([Rule(1, "W", "WBWWWWBBB", "B"), Rule(2, "W", "WBWWWWBBB", "W")])
    (c,) = check_coherence(toy)
    assert not c.redundant and {c.first.id, c.second.id} == {1, 2}
    same = RuleTable([Rule(1, "W", "WBWWWWBBB", "B"), Rule(2, "W", "WBWWWWBBB", "B")])
    assert [c.redundant for c in check_coherence(same)] == [True]
    assert conflicts(same) == []


def test_rotation_examples(rules):
    assert rotation_class_key(rules[160]) == rotation_class_key(rules[131])
    assert rules[160].next == rules[131].next
    rep = rotation_analysis(rules)
    assert any({199, 201} <= set(c) for c in rep.incompatible)
    only_one = rotation_analysis(RuleTable([rules[1]]))
    assert only_one.classes == [[1]] and only_one.incompatible == []


@given(states, words, st.integers(0, 8))
def test_rotation_key_is_rotation_invariant(cur, nbhd, k):
    a = Rule(1, cur, nbhd, "W")
    b = Rule(2, cur, rotations(nbhd)[k], "W")
    assert rotation_class_key(a) == rotation_class_key(b)


def test_rotation_report_partitions_table(rules):
    rep = rotation_analysis(rules)
    ids = sorted(i for c in rep.classes for i in c)
    assert ids == sorted(r.id for r in rules)
    assert len(rep.classes) <= rep.collapsed_count <= len(rules)
