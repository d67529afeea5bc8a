# Copyright (c) 2020-2021, UChicago Argonne, LLC.
# See LICENSE file for details.

from os.path import join
from random import Random

import pytest

from lnif.calculus import (
    T, CutInstance, RuleInstance, rule, build, check_derivation,
    cut_conclusion, load_derivation
)
from lnif.exceptions import (
    PositionError, ShapeError, NotApplicable, NotWithCutValid
)
from lnif.prover import SCHEMAS, prove_axiom
from lnif.sequent import (
    Component, LEFT, RIGHT, parse_sequent as seq
)
from lnif.syntax import (
    And, Or, Implies, Forall, Exists, Bottom, Param, parse_formula as f,
    rename_param_formula
)
from lnif.transform import (
    derive_identity, identity_at, rename_param, weaken_to, admit_iw,
    admit_ew, admit_lwr, admit_bot_r, drop_formula, strip_retained,
    invert_right, invert_left, admit_contraction_left,
    admit_contraction_right, admit_merge, eliminate_cut, set_check_rewrites
)

path = join('lnif', 'tests', 'data_for_test')
golden = ['linearity.json', 'quantifier_shift.json', 'forall_elim.json',
          'exists_intro.json', 'identity_implication.json']
identities = ["p(#a)", "bot", "p & q", "p | q", "p -> q", "forall x. p(x)",
              "exists x. p(x)", "(p -> q) | (q -> p)",
              "forall x. (p(x) -> exists y. r(x, y))"]


def _corpus():
    derivations = [load_derivation(join(path, name)) for name in golden]
    derivations += [derive_identity(f(text)) for text in identities]
    derivations += [
        prove_axiom("k", "p", "q"),
        prove_axiom("and_intro", "p", "q"),
        prove_axiom("or_elim", "p", "q", "r"),
        prove_axiom("linearity", "p & q", "r"),
        prove_axiom("forall_imp", "forall x. p(x)", "q"),
        prove_axiom("exists_imp", "exists x. p(x)", "q"),
    ]
    return derivations


@pytest.fixture
def corpus():
    return _corpus()


@pytest.mark.parametrize('text', identities)
def test_derive_identity(text):
    a = f(text)
    d = derive_identity(a)
    assert check_derivation(d)
    assert d.conclusion == seq(f"{text} |- {text}")


def test_derive_identity_in_context():
    a = f("(p -> q) | (q -> p)")
    d = derive_identity(a, before=[Component((f("s"),))],
                        antecedent=[f("r")], consequent=[f("bot")],
                        after=[Component((), (f("q"),))])
    assert check_derivation(d)
    assert len(d.conclusion) == 3
    assert d.conclusion[1].count(LEFT, a) == 1
    assert d.conclusion[1].count(RIGHT, a) == 1
    assert d.conclusion[2] == Component((), (f("q"),))


def test_identity_at():
    s = seq("p -> q, r |- p -> q // s |-")
    d = identity_at(s, 0, f("p -> q"))
    assert d.conclusion == s
    assert check_derivation(d)
    with pytest.raises(PositionError):
        identity_at(s, 1, f("p -> q"))


def test_rename_param():
    d = derive_identity(f("p(#a)"))
    renamed = rename_param(d, "a", "b")
    assert renamed.conclusion == seq("p(#b) |- p(#b)")
    assert renamed.height == d.height
    assert rename_param(d, "c", "b") is d


def test_rename_param_moves_eigenvariable_apart():
    d = derive_identity(f("forall x. r(x, #b)"), antecedent=[f("q(#a)")])
    assert d.rule.eigen == Param("a0")
    renamed = rename_param(d, Param("a"), Param("a0"))
    assert renamed.conclusion == \
        seq("q(#a0), forall x. r(x, #b) |- forall x. r(x, #b)")
    assert renamed.height == d.height
    assert check_derivation(renamed)
    assert renamed.rule.eigen != Param("a0")


def test_weakenings_preserve_height(corpus):
    extra_left, extra_right = f("s(#c)"), f("p -> bot")
    for d in corpus:
        for pos in range(len(d.conclusion)):
            w = admit_iw(d, pos, left=[extra_left], right=[extra_right])
            assert w.height == d.height
            assert check_derivation(w)
            assert w.conclusion == d.conclusion.add(
                pos, LEFT, [extra_left]).add(pos, RIGHT, [extra_right])


def test_external_weakening(corpus):
    for d in corpus:
        for pos in range(len(d.conclusion) + 1):
            w = admit_ew(d, pos)
            assert check_derivation(w)
            assert w.conclusion == d.conclusion.insert(pos)
    with pytest.raises(PositionError):
        admit_ew(corpus[0], 3)


def test_weaken_to():
    d = derive_identity(f("p"))
    target = seq("p, q |- p, r")
    assert weaken_to(d, target).conclusion == target


def test_bot_r_is_height_preserving(corpus):
    for d in corpus:
        w = admit_iw(d, 0, right=[Bottom()])
        stripped = admit_bot_r(w, 0)
        assert stripped.conclusion == d.conclusion
        assert stripped.height <= w.height
        assert check_derivation(stripped)


def test_drop_principal_formula():
    d = derive_identity(f("p"))
    with pytest.raises(NotApplicable):
        drop_formula(d, 0, f("p"))


def test_lowering():
    d = admit_ew(load_derivation(join(path, 'linearity.json')), 1)
    a = f("(p -> q) | (q -> p)")
    low = admit_lwr(d, 0, a)
    assert low.conclusion == seq("|- // |- (p -> q) | (q -> p)")
    assert low.height <= d.height
    assert check_derivation(low)
    with pytest.raises(PositionError):
        admit_lwr(d, 1, a)


def test_lowering_corpus(corpus):
    for d in corpus:
        wide = admit_ew(d, len(d.conclusion))
        for pos in range(len(d.conclusion)):
            for a in set(wide.conclusion[pos].consequent):
                low = admit_lwr(wide, pos, a)
                assert check_derivation(low)
                assert low.height <= wide.height


def test_invert_right_and_or():
    d = derive_identity(f("p & q"))
    first, second = invert_right(d, T.AndR, 0)
    assert first.conclusion == seq("p & q |- p")
    assert second.conclusion == seq("p & q |- q")
    d = derive_identity(f("p | q"))
    (both,) = invert_right(d, "OrR", 0)
    assert both.conclusion == seq("p | q |- p, q")
    assert check_derivation(both)


def test_invert_right_implication():
    d = load_derivation(join(path, 'identity_implication.json'))
    (opened,) = invert_right(d, T.ImpR1, 0)
    assert opened.conclusion == seq("p -> q |- // p |- q")
    assert check_derivation(opened)
    wide = admit_ew(d, 1)
    opened, lowered = invert_right(wide, T.ImpR2, 0)
    assert opened.conclusion == seq("p -> q |- // p |- q // |-")
    assert lowered.conclusion == seq("p -> q |- // |- p -> q")


def test_invert_right_quantifiers():
    d = derive_identity(f("forall x. p(x)"))
    (opened,) = invert_right(d, T.ForallR1, 0, eigen=Param("b"))
    assert opened.conclusion == seq("forall x. p(x) |- // |- p(#b)")
    assert check_derivation(opened)
    d = derive_identity(f("exists x. p(x)"))
    (more,) = invert_right(d, T.ExistsR, 0, witness=Param("c"))
    assert more.conclusion == \
        seq("exists x. p(x) |- exists x. p(x), p(#c)")


def test_invert_right_errors():
    d = derive_identity(f("p & q"))
    with pytest.raises(ShapeError):
        invert_right(d, T.AndL, 0)
    with pytest.raises(ShapeError):
        invert_right(d, T.OrR, 0)
    d = admit_ew(load_derivation(join(path, 'identity_implication.json')), 1)
    with pytest.raises(PositionError):
        invert_right(d, T.ImpR1, 0)


def test_invert_left():
    d = derive_identity(f("p & q"))
    split = invert_left(d, f("p & q"), [1])
    assert split.conclusion == seq("p, q |- p & q")
    assert check_derivation(split)
    one, two = invert_left(derive_identity(f("p | q")), f("p | q"), {0: 1})
    assert one.conclusion == seq("p |- p | q")
    assert two.conclusion == seq("q |- p | q")
    right, left = invert_left(derive_identity(f("p -> q")), f("p -> q"), [1])
    assert right.conclusion == seq("q |- p -> q")
    assert left.conclusion == seq("p -> q |- p -> q, p")
    with pytest.raises(PositionError):
        invert_left(d, f("p & q"), [2])
    with pytest.raises(ShapeError):
        invert_left(derive_identity(f("forall x. p(x)")),
                    f("forall x. p(x)"), [1])


def test_invert_left_several_components():
    a = f("p & q")
    d = derive_identity(a, after=[Component((a,), ())])
    split = invert_left(d, a, [1, 1])
    assert split.conclusion == seq("p, q |- p & q // p, q |-")
    assert check_derivation(split)


def test_contraction():
    a = f("(p -> q) | (q -> p)")
    d = admit_iw(derive_identity(a), 0, left=[a], right=[a])
    once = admit_contraction_left(d, 0, a)
    twice = admit_contraction_right(once, 0, a)
    assert twice.conclusion == d.conclusion.remove(0, LEFT, a).remove(
        0, RIGHT, a)
    assert check_derivation(twice)
    with pytest.raises(PositionError):
        admit_contraction_left(twice, 0, a)


def test_contraction_of_principal_copies():
    d = prove_axiom("linearity", "p", "q")
    a = d.conclusion[0].consequent[0]
    doubled = admit_iw(d, 0, right=[a])
    once = admit_contraction_right(doubled, 0, a)
    assert once.conclusion == d.conclusion
    assert check_derivation(once)


def test_merge():
    d = admit_ew(derive_identity(f("p -> q")), 1)
    merged = admit_merge(d, 0)
    assert merged.conclusion == seq("p -> q |- p -> q")
    assert check_derivation(merged)
    low = admit_lwr(d, 0, f("p -> q"))
    merged = admit_merge(low, 0)
    assert merged.conclusion == seq("p -> q |- p -> q")
    assert check_derivation(merged)


def test_strip_retained():
    r = rule(T.ExistsR, 0, RIGHT, f("exists x. p(x)"), witness=Param("a"),
             retain=True)
    leaf = derive_identity(f("p(#a)"))
    premise = weaken_to(leaf, seq("p(#a) |- exists x. p(x), p(#a), p(#a)"))
    d = build(seq("p(#a) |- exists x. p(x), p(#a)"), r, [premise])
    plain = strip_retained(d)
    assert not plain.rule.retain
    assert plain.conclusion == d.conclusion
    assert check_derivation(plain)


def test_eliminate_atomic_cut():
    d = load_derivation(join(path, 'cut_atom.json'))
    result = eliminate_cut(d)
    assert result.conclusion == seq("p |- p")
    assert not result.contains_cut()
    assert check_derivation(result, "official")


def test_eliminate_cut_on_implication():
    a = f("p -> p")
    dpp = build(seq("|- p -> p"), rule(T.ImpR1, 0, RIGHT, a),
                [admit_ew(derive_identity(f("p")), 0)])
    left = admit_ew(dpp, 1)
    (right,) = invert_right(prove_axiom("or_intro_left", a, f("q -> q")),
                            T.ImpR1, 0)
    assert right.conclusion == seq("|- // p -> p |- (p -> p) | (q -> q)")
    cut = CutInstance(a, (0, 1), (0, 2))
    conclusion = cut_conclusion(left.conclusion, right.conclusion, cut)
    d = build(conclusion, RuleInstance(T.Cut, cut=cut), [left, right])
    result = eliminate_cut(d)
    assert result.conclusion == seq("|- // |- (p -> p) | (q -> q)")
    assert not result.contains_cut()
    assert check_derivation(result, "official")


def test_eliminate_cut_rejects_invalid():
    d = load_derivation(join(path, 'bad_eigen.json'))
    with pytest.raises(NotWithCutValid):
        eliminate_cut(d)
    plain = load_derivation(join(path, 'linearity.json'))
    assert eliminate_cut(plain) is plain


def test_check_rewrites():
    set_check_rewrites(True)
    try:
        for d in _corpus()[:5]:
            assert admit_ew(d, 0).conclusion == d.conclusion.insert(0)
    finally:
        set_check_rewrites(False)


propositional = [name for name in SCHEMAS
                 if name not in ("forall_elim", "exists_intro", "forall_imp",
                                 "exists_imp", "quantifier_shift")]
leaves = ["p", "q", "bot", "s(#a)", "s(#b)"]


def _random_text(rng, size, bound=()):
    if size <= 0:
        return rng.choice(leaves + [f"s({x})" for x in bound])
    kind = rng.choice(["&", "|", "->", "&", "|", "->", "forall", "exists"])
    if kind in ("forall", "exists"):
        var = f"x{len(bound)}"
        body = _random_text(rng, size - 1, bound + (var,))
        return f"({kind} {var}. (s({var}) -> {body}))"
    left = rng.randint(0, size - 1)
    return (f"({_random_text(rng, left, bound)} {kind} "
            f"{_random_text(rng, size - 1 - left, bound)})")


def _random_derivations(seed, count):
    """Identities in random contexts and propositional axioms."""
    rng = Random(seed)

    def some(most, size):
        return [f(_random_text(rng, rng.randint(0, size)))
                for _ in range(rng.randint(0, most))]

    found = []
    while len(found) < count:
        if rng.random() < 0.6:
            before = [Component(tuple(some(1, 1)), tuple(some(1, 1)))
                      for _ in range(rng.randint(0, 1))]
            after = [Component(tuple(some(1, 1)), tuple(some(1, 1)))
                     for _ in range(rng.randint(0, 1))]
            d = derive_identity(f(_random_text(rng, rng.randint(1, 4))),
                                before=before, antecedent=some(2, 1),
                                consequent=some(2, 1), after=after)
        else:
            name = rng.choice(propositional)
            texts = [_random_text(rng, rng.randint(0, 2))
                     for _ in range(SCHEMAS[name][1])]
            d = prove_axiom(name, *texts)
        found.append(d)
    return found


def test_random_height_contracts():
    rng = Random(11)
    extra = f("s(#c)")
    for d in _random_derivations(7, 200):
        assert check_derivation(d)
        c = d.conclusion
        pos = rng.randrange(len(c))
        w = admit_iw(d, pos, left=[extra], right=[Bottom()])
        assert w.height == d.height
        assert check_derivation(w)
        stripped = admit_bot_r(w, pos)
        assert stripped.conclusion == c.add(pos, LEFT, [extra])
        assert stripped.height <= w.height
        assert check_derivation(stripped)
        if "a" in d.params:
            renamed = rename_param(d, "a", "c")
            assert renamed.height == d.height
            assert renamed.conclusion == c.map(
                lambda g: rename_param_formula(g, "a", "c"))
            assert check_derivation(renamed)
        wide = admit_ew(d, len(c))
        for g in set(wide.conclusion[pos].consequent):
            low = admit_lwr(wide, pos, g)
            assert low.height <= wide.height
            assert low.conclusion == wide.conclusion.remove(
                pos, RIGHT, g).add(pos + 1, RIGHT, [g])
            assert check_derivation(low)
        for g in set(c[pos].consequent):
            if isinstance(g, (And, Or)):
                tag = T.AndR if isinstance(g, And) else T.OrR
                for part in invert_right(d, tag, pos, g):
                    assert part.height <= d.height
                    assert check_derivation(part)


def test_random_structural_rules():
    rng = Random(17)
    for d in _random_derivations(13, 150):
        c = d.conclusion
        n = len(c)
        pos = rng.randint(0, n)
        wide = admit_ew(d, pos)
        assert wide.conclusion == c.insert(pos)
        assert check_derivation(wide)
        merged = admit_merge(wide, min(pos, n - 1))
        assert merged.conclusion == c
        assert check_derivation(merged)
        i = rng.randrange(n)
        if c[i].antecedent:
            g = rng.choice(c[i].antecedent)
            once = admit_contraction_left(admit_iw(d, i, left=[g]), i, g)
            assert once.conclusion == c
            assert check_derivation(once)
        if c[i].consequent:
            g = rng.choice(c[i].consequent)
            once = admit_contraction_right(admit_iw(d, i, right=[g]), i, g)
            assert once.conclusion == c
            assert check_derivation(once)


def test_random_inversions():
    witness = Param("b")
    for d in _random_derivations(23, 150):
        c = d.conclusion
        last = len(c) - 1
        for i, component in enumerate(c):
            for g in set(component.antecedent):
                if isinstance(g, (And, Or, Implies, Exists, Forall)):
                    result = invert_left(
                        d, g, {i: 1},
                        witness=witness if isinstance(g, Forall) else None)
                    parts = result if isinstance(result, tuple) else [result]
                    for part in parts:
                        assert check_derivation(part)
                    if isinstance(g, And):
                        assert result.conclusion == c.remove(
                            i, LEFT, g).add(i, LEFT, [g.left, g.right])
            for g in set(component.consequent):
                if isinstance(g, And):
                    tag = T.AndR
                elif isinstance(g, Or):
                    tag = T.OrR
                elif isinstance(g, Exists):
                    tag = T.ExistsR
                elif isinstance(g, Implies):
                    tag = T.ImpR1 if i == last else T.ImpR2
                elif isinstance(g, Forall):
                    tag = T.ForallR1 if i == last else T.ForallR2
                else:
                    continue
                for part in invert_right(d, tag, i, g, witness=witness):
                    assert check_derivation(part)
