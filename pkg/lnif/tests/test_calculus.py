# Copyright (c) 2020-2021, UChicago Argonne, LLC.
# See LICENSE file for details.

from os.path import join

import pytest

from lnif.calculus import (
    T, OFFICIAL, RuleInstance, CutInstance, Derivation, rule, check_node,
    check_derivation, is_valid, apply_backward, build, find_axiom,
    cut_conclusion, derivation_to_dict, derivation_from_dict,
    dump_derivation, load_derivation, rule_counts, derivation_table
)
from lnif.exceptions import (
    SchemaMismatch, EigenvariableViolation, PositionError, NotApplicable,
    CutAlignmentError
)
from lnif.sequent import LEFT, RIGHT, parse_sequent as seq
from lnif.syntax import Param, parse_formula as f

path = join('lnif', 'tests', 'data_for_test')
golden = ['linearity.json', 'quantifier_shift.json', 'forall_elim.json',
          'exists_intro.json', 'identity_implication.json']


def test_official_rules():
    assert len(OFFICIAL) == 16
    assert T.Cut not in OFFICIAL and T.Lift in OFFICIAL


def test_check_node_examples():
    assert check_node(seq("p(#a) |- p(#a)"),
                      RuleInstance(T.Id1, ((0, LEFT, f("p(#a)")),
                                           (0, RIGHT, f("p(#a)")))), [])
    with pytest.raises(EigenvariableViolation):
        check_node(seq("p(#a) |- forall x. p(x)"),
                   rule(T.ForallR1, 0, RIGHT, f("forall x. p(x)"),
                        eigen=Param("a")),
                   [seq("p(#a) |- // |- p(#a)")])
    with pytest.raises(PositionError):
        check_node(seq("|- p -> q // |- r"),
                   rule(T.ImpR1, 0, RIGHT, f("p -> q")),
                   [seq("|- // p |- q // |- r")])


def test_check_node_id2():
    s = seq("p |- // |- p")
    assert check_node(s, RuleInstance(T.Id2, ((0, LEFT, f("p")),
                                              (1, RIGHT, f("p")))), [])
    with pytest.raises(SchemaMismatch):
        check_node(seq("p |- p"), RuleInstance(
            T.Id2, ((0, LEFT, f("p")), (0, RIGHT, f("p")))), [])
    with pytest.raises(SchemaMismatch):
        check_node(seq("|- p // p |-"), RuleInstance(
            T.Id2, ((1, LEFT, f("p")), (0, RIGHT, f("p")))), [])


def test_check_node_wrong_premise():
    with pytest.raises(SchemaMismatch):
        check_node(seq("|- p & q"), rule(T.AndR, 0, RIGHT, f("p & q")),
                   [seq("|- p"), seq("|- p")])


def test_apply_backward_examples():
    assert apply_backward(seq("|- p & q"),
                          rule(T.AndR, 0, RIGHT, f("p & q"))) == \
        [seq("|- p"), seq("|- q")]
    assert apply_backward(seq("s |- r // t |- p -> q"),
                          rule(T.ImpR1, 1, RIGHT, f("p -> q"))) == \
        [seq("s |- r // t |- // p |- q")]
    assert apply_backward(seq("forall x. p(x) |- q"),
                          rule(T.ForallL, 0, LEFT, f("forall x. p(x)"),
                               witness=Param("a"))) == \
        [seq("p(#a), forall x. p(x) |- q")]


def test_apply_backward_more_rules():
    assert apply_backward(seq("|- p -> q // r |-"),
                          rule(T.ImpR2, 0, RIGHT, f("p -> q"))) == \
        [seq("|- // p |- q // r |-"), seq("|- // r |- p -> q")]
    assert apply_backward(seq("p -> q |- r"),
                          rule(T.ImpL, 0, LEFT, f("p -> q"))) == \
        [seq("q |- r"), seq("p -> q |- r, p")]
    assert apply_backward(seq("p -> q |- // |-"),
                          rule(T.Lift, 0, LEFT, f("p -> q"))) == \
        [seq("p -> q |- // p -> q |-")]
    (premise,) = apply_backward(seq("exists x. p(x) |- q(#a0)"),
                                rule(T.ExistsL, 0, LEFT,
                                     f("exists x. p(x)")))
    assert premise == seq("p(#a1) |- q(#a0)")
    assert apply_backward(seq("|- exists x. p(x)"),
                          rule(T.ExistsR, 0, RIGHT, f("exists x. p(x)"),
                               witness=Param("b"), retain=True)) == \
        [seq("|- p(#b), exists x. p(x)")]


def test_apply_backward_errors():
    with pytest.raises(NotApplicable):
        apply_backward(seq("forall x. p(x) |-"),
                       rule(T.ForallL, 0, LEFT, f("forall x. p(x)")))
    with pytest.raises(PositionError):
        apply_backward(seq("|- p -> q"), rule(T.Lift, 0, LEFT, f("p")))
    with pytest.raises(NotApplicable):
        apply_backward(seq("|- p"), RuleInstance(
            T.Cut, cut=CutInstance(f("p"), (1,), (0, 1))))


def test_backward_forward_coherence():
    cases = [
        ("p & q, r |- s", rule(T.AndL, 0, LEFT, f("p & q"))),
        ("p | q |- s // |-", rule(T.OrL, 0, LEFT, f("p | q"))),
        ("|- p | q", rule(T.OrR, 0, RIGHT, f("p | q"))),
        ("|- forall x. p(x) // q |-",
         rule(T.ForallR2, 0, RIGHT, f("forall x. p(x)"))),
        ("r(#a0) |- forall x. p(x)",
         rule(T.ForallR1, 0, RIGHT, f("forall x. p(x)"))),
    ]
    for text, r in cases:
        s = seq(text)
        premises = apply_backward(s, r)
        d = build(s, r, [Derivation(p, RuleInstance(T.Id1)) for p in
                         premises], check=False)
        assert check_node(s, d.rule, premises)


def test_find_axiom():
    assert find_axiom(seq("bot, p |- q")).tag is T.BotL
    assert find_axiom(seq("p |- p")).tag is T.Id1
    assert find_axiom(seq("p |- // |- p")).tag is T.Id2
    assert find_axiom(seq("|- p // p |-")) is None
    assert find_axiom(seq("p -> q |- p -> q")) is None


def test_cut_conclusion():
    cut = CutInstance(f("p"), (0, 1), (0, 2))
    assert cut_conclusion(seq("|- p // |-"), seq("|- // p |- q"), cut) == \
        seq("|- // |- q")
    with pytest.raises(CutAlignmentError):
        cut_conclusion(seq("|- p"), seq("|- // p |- q"), cut)
    with pytest.raises(CutAlignmentError):
        cut_conclusion(seq("|- q // |-"), seq("|- // p |- q"), cut)


@pytest.mark.parametrize('name', golden)
def test_golden_corpus(name):
    d = load_derivation(join(path, name))
    assert check_derivation(d, "official")
    assert check_derivation(d, "with-cut")
    assert check_derivation(d, "extended")
    assert not d.contains_cut()


def test_golden_heights():
    d = load_derivation(join(path, 'linearity.json'))
    assert d.height == 5
    assert d.size == 6
    assert d.conclusion == seq("|- (p -> q) | (q -> p)")
    assert rule_counts(d)[T.Id2] == 2
    for node in d.nodes():
        for premise in node.premises:
            assert premise.height < node.height


def test_bad_eigenvariable_path():
    d = load_derivation(join(path, 'bad_eigen.json'))
    with pytest.raises(EigenvariableViolation) as info:
        check_derivation(d)
    assert info.value.path == ()
    assert not is_valid(d)


def test_error_path_points_to_node():
    good = load_derivation(join(path, 'forall_elim.json'))
    leaf = good.premises[0].premises[0]
    broken = Derivation(leaf.conclusion, RuleInstance(T.Id1, (
        (1, LEFT, f("p(#a)")), (0, RIGHT, f("p(#a)")))))
    middle = Derivation(good.premises[0].conclusion, good.premises[0].rule,
                        [broken])
    d = Derivation(good.conclusion, good.rule, [middle])
    with pytest.raises(PositionError) as info:
        check_derivation(d)
    assert info.value.path == (0, 0)


def test_cut_needs_with_cut_mode():
    d = load_derivation(join(path, 'cut_atom.json'))
    assert d.contains_cut()
    assert check_derivation(d, "with-cut")
    with pytest.raises(SchemaMismatch):
        check_derivation(d, "official")


def test_file_round_trip(tmpdir):
    for name in golden + ['cut_atom.json']:
        d = load_derivation(join(path, name))
        target = str(tmpdir.join(name))
        text = dump_derivation(d, target)
        again = load_derivation(target)
        assert again == d
        assert dump_derivation(again) == text
        assert derivation_from_dict(derivation_to_dict(d)) == d


def test_retain_is_written_only_when_set():
    s = seq("|- exists x. p(x), p(#a)")
    r = rule(T.ExistsR, 0, RIGHT, f("exists x. p(x)"), witness=Param("a"),
             retain=True)
    (premise,) = apply_backward(s, r)
    d = Derivation(s, r, [Derivation(premise, RuleInstance(T.Id1))])
    assert derivation_to_dict(d)["retain"] is True
    plain = load_derivation(join(path, 'exists_intro.json'))
    assert "retain" not in derivation_to_dict(plain)["premises"][0]


def test_malformed_file():
    with pytest.raises(SchemaMismatch):
        load_derivation(text="{not json")
    with pytest.raises(SchemaMismatch):
        load_derivation(text='{"conclusion": "|- p", "rule": "Nope"}')


def test_derivation_table():
    d = load_derivation(join(path, 'quantifier_shift.json'))
    table = derivation_table(d, printing=False)
    assert table.labels == ["rule", "count"]
    assert ["height", d.height] in table.rows
