# Copyright (c) 2020-2021, UChicago Argonne, LLC.
# See LICENSE file for details.

import json
from os.path import join
from random import Random

import pytest

from lnif.calculus import check_derivation
from lnif.config import ProverConfig
from lnif.exceptions import (
    ProofSearchFailure, DepthExceeded, Saturated, ShapeError,
    EigenvariableViolation
)
from lnif.prover import (
    prove, prove_formula, prove_batch, SCHEMAS, axiom_instance, prove_axiom,
    mp_with_cut, simulate_mp, simulate_gen, hilbert_proof, _Search
)
from lnif.semantics import find_countermodel, goedel_valid
from lnif.sequent import (
    Component, Sequent, parse_sequent as seq, renaming_key
)
from lnif.syntax import (
    Atom, Bottom, And, Or, Implies, is_propositional, parse_formula as f,
    print_formula
)

path = join('lnif', 'tests', 'data_for_test')

instances = [
    ("k", ["p", "q -> r"], None),
    ("s", ["p", "q", "r"], None),
    ("and_intro", ["p", "q | r"], None),
    ("and_elim_left", ["p", "q"], None),
    ("and_elim_right", ["p & r", "q"], None),
    ("or_intro_left", ["p", "q"], None),
    ("or_intro_right", ["p", "q & r"], None),
    ("or_elim", ["p", "q", "r"], None),
    ("ex_falso", ["p -> q"], None),
    ("linearity", ["p", "q"], None),
    ("forall_elim", ["forall x. p(x)"], "#a"),
    ("exists_intro", ["exists x. r(x, #b)"], "a"),
    ("forall_imp", ["forall x. p(x)", "q"], None),
    ("exists_imp", ["exists x. p(x)", "q"], None),
    ("quantifier_shift", ["forall x. p(x)", "q"], None),
]
theorems = [
    "(p -> q) | (q -> p)",
    "(forall x. p(x) | q) -> (forall x. p(x)) | q",
    "p & q -> q & p",
    "p | q -> q | p",
    "p -> q -> p",
    "forall x. p(x) -> exists x. p(x)",
]
existential_identities = [
    "((exists x. p(x)) -> exists y. p(y)) -> (exists x. p(x)) -> "
    "exists y. p(y)",
    "(r(#a, #b) -> exists x. r(x, #b)) -> r(#a, #b) -> exists x. r(x, #b)",
]
non_theorems = ["p | ~p", "~~p -> p", "((p -> q) -> p) -> p"]


def _sound(formula):
    if is_propositional(formula):
        return goedel_valid(formula)[0]
    return find_countermodel(formula) is None


def test_schema_table():
    assert len(SCHEMAS) == len(instances) == 15
    assert {name for name, _, _ in instances} == set(SCHEMAS)


@pytest.mark.parametrize('schema, formulas, witness', instances)
def test_prove_axiom(schema, formulas, witness):
    d = prove_axiom(schema, *formulas, witness=witness)
    assert check_derivation(d, "official")
    axiom = axiom_instance(schema, *formulas, witness=witness)
    assert d.conclusion == Sequent([Component((), (axiom,))])
    assert _sound(axiom)


def test_axiom_instances():
    assert axiom_instance("k", "p", "q") == f("p -> q -> p")
    assert axiom_instance("linearity", "p", "q") == \
        f("(p -> q) | (q -> p)")
    assert axiom_instance("forall_elim", "forall x. p(x)", witness="b") == \
        f("(forall x. p(x)) -> p(#b)")
    assert axiom_instance("quantifier_shift", "forall x. p(x)", "q") == \
        f("(forall x. p(x) | q) -> (forall x. p(x)) | q")


def test_schema_errors():
    with pytest.raises(ShapeError):
        prove_axiom("peirce", "p", "q")
    with pytest.raises(ShapeError):
        prove_axiom("k", "p")
    with pytest.raises(ShapeError):
        prove_axiom("forall_elim", "forall x. p(x)")
    with pytest.raises(ShapeError):
        prove_axiom("forall_imp", "p", "q")


@pytest.mark.parametrize('schema, formulas, witness', instances)
def test_search_finds_every_schema(schema, formulas, witness):
    axiom = axiom_instance(schema, *formulas, witness=witness)
    d = prove_formula(axiom)
    assert check_derivation(d, "official")
    assert d.conclusion == Sequent([Component((), (axiom,))])


@pytest.mark.parametrize('text', theorems)
def test_prove_theorems(text):
    d = prove_formula(text)
    assert check_derivation(d, "official")
    assert d.conclusion == seq(f"|- {text}")
    assert _sound(f(text))


def test_prove_sequents():
    d = prove("p(#a) |- exists x. p(x)")
    assert check_derivation(d)
    assert not any(node.rule.retain for node in d.nodes())
    d = prove(seq("forall x. p(x) |- p(#a)"))
    assert d.height == 2


@pytest.mark.parametrize('text', existential_identities)
def test_implication_with_existential_consequent(text):
    for cap in (2, 5):
        d = prove_formula(text, config=ProverConfig(witness_cap=cap))
        assert check_derivation(d, "official")
        assert d.conclusion == seq(f"|- {text}")


def test_loop_failures_are_not_memoized():
    goal = seq("|- p & q -> q & p")
    child = seq("|- // p & q |- q & p")
    search = _Search(ProverConfig())
    with pytest.raises(Saturated) as info:
        search.run(goal, 6, frozenset({renaming_key(child)}))
    assert info.value.loop
    d = search.run(goal, 6, frozenset())
    assert d.conclusion == goal
    assert check_derivation(d)


@pytest.mark.parametrize('text', non_theorems)
def test_non_theorems(text):
    with pytest.raises(ProofSearchFailure) as info:
        prove_formula(text)
    assert info.value.reason in ("depth", "saturated")
    assert not _sound(f(text))


def test_failure_reasons():
    with pytest.raises(Saturated):
        prove_formula("p | ~p")
    with pytest.raises(DepthExceeded):
        prove_formula("~~p -> p")


def test_depth_bound():
    with pytest.raises(DepthExceeded) as info:
        prove_formula("(p -> q) | (q -> p)", depth=3)
    assert info.value.reason == "depth"
    d = prove_formula("(p -> q) | (q -> p)", depth=4)
    assert d.height == 5


def test_witness_cap_warning():
    config = ProverConfig(witness_cap=1)
    with pytest.warns(UserWarning):
        with pytest.raises(ProofSearchFailure):
            prove("forall x. p(x) |- q(#a), q(#b)", config=config)


def test_search_is_deterministic():
    for text in theorems:
        one = prove_formula(text)
        assert prove_formula(text) == one
        assert prove_formula(text, config=ProverConfig(memo=False)) == one
        assert prove_formula(text, config=ProverConfig(parallel=True)) == one


def test_prove_batch():
    texts = ["(p -> q) | (q -> p)", "p | ~p", "p ->"]
    for jobs in (1, 2):
        table = prove_batch(texts, jobs=jobs)
        assert list(table.columns) == ["formula", "status", "height", "size",
                                       "reason"]
        assert list(table.formula) == texts
        assert list(table.status) == ["proved", "failed", "error"]
        assert table.loc[0, "height"] == 5
        assert table.loc[1, "reason"] == "saturated"


def test_modus_ponens():
    d_a = prove_axiom("k", "p", "q")
    d_imp = prove_axiom("s", "p", "q", "p")
    cut = mp_with_cut(d_a, d_imp)
    assert cut.contains_cut()
    assert check_derivation(cut, "with-cut")
    assert cut.conclusion == seq("|- // |- (p -> q) -> p -> p")
    d = simulate_mp(d_a, d_imp)
    assert d.conclusion == seq("|- (p -> q) -> p -> p")
    assert not d.contains_cut()
    assert check_derivation(d, "official")
    with pytest.raises(ShapeError):
        simulate_mp(d_imp, d_a)


def test_generalization():
    d_a = prove_axiom("forall_elim", "forall x. p(x)", witness="a")
    d = simulate_gen(d_a, "#a")
    assert d.conclusion == seq("|- forall y. (forall x. p(x)) -> p(y)")
    assert check_derivation(d, "official")
    d = simulate_gen(d_a, "a", var="z")
    assert d.conclusion == seq("|- forall z. (forall x. p(x)) -> p(z)")


def test_generalization_errors():
    d = prove("|- p(#a) -> p(#a), q(#a)")
    with pytest.raises(EigenvariableViolation):
        simulate_gen(d, "a", formula=f("p(#a) -> p(#a)"))
    with pytest.raises(ShapeError):
        simulate_gen(prove("p(#a) |- p(#a)"), "a")


def test_hilbert_identity():
    steps = [
        {"axiom": "k", "formulas": ["p", "p -> p"]},
        {"axiom": "s", "formulas": ["p", "p -> p", "p"]},
        {"mp": [0, 1]},
        {"axiom": "k", "formulas": ["p", "p"]},
        {"mp": [3, 2]},
    ]
    done = hilbert_proof(steps)
    assert len(done) == 5
    assert done[-1].conclusion == seq("|- p -> p")
    for d in done:
        assert check_derivation(d, "official")


def test_hilbert_file():
    with open(join(path, 'hilbert_mp.json')) as f_in:
        steps = json.load(f_in)
    done = hilbert_proof(steps)
    assert done[-1].conclusion == seq("|- (p -> q) -> p -> p")
    with pytest.raises(ShapeError):
        hilbert_proof([{"rule": "cut"}])


def test_hilbert_generalization():
    steps = [
        {"axiom": "forall_elim", "formulas": ["forall x. p(x)"],
         "witness": "#a"},
        {"gen": 0, "param": "#a", "var": "y"},
    ]
    done = hilbert_proof(steps)
    assert done[1].conclusion == \
        seq("|- forall y. (forall x. p(x)) -> p(y)")


def _propositional(size):
    """Every formula over ``bot, p, q`` with ``size`` connectives."""
    if size == 0:
        yield from (Bottom(), Atom("p"), Atom("q"))
        return
    for left in range(size):
        for a in _propositional(left):
            for b in _propositional(size - 1 - left):
                for connective in (And, Or, Implies):
                    yield connective(a, b)


def test_search_agrees_with_goedel_chain():
    for size in range(4):
        for formula in _propositional(size):
            valid, _ = goedel_valid(formula)
            try:
                prove_formula(formula)
            except ProofSearchFailure:
                proved = False
            else:
                proved = True
            assert proved == valid, print_formula(formula)


def _random_text(rng, size):
    if size <= 0:
        return rng.choice(["p", "q", "r", "bot"])
    left = rng.randint(0, size - 1)
    return (f"({_random_text(rng, left)} {rng.choice(['&', '|', '->'])} "
            f"{_random_text(rng, size - 1 - left)})")


def test_random_modus_ponens():
    rng = Random(5)
    minors = ["k", "s", "and_intro", "and_elim_left", "and_elim_right",
              "or_intro_left", "or_intro_right", "or_elim", "ex_falso",
              "linearity"]
    for _ in range(60):
        name = rng.choice(minors)
        texts = [_random_text(rng, rng.randint(0, 2))
                 for _ in range(SCHEMAS[name][1])]
        d_a = prove_axiom(name, *texts)
        a = axiom_instance(name, *texts)
        major = rng.choice(["k", "or_intro_left", "and_intro"])
        other = f(_random_text(rng, rng.randint(0, 2)))
        b = axiom_instance(major, a, other).right
        d = simulate_mp(d_a, prove_axiom(major, a, other))
        assert d.conclusion == Sequent([Component((), (b,))])
        assert not d.contains_cut()
        assert check_derivation(d, "official")
