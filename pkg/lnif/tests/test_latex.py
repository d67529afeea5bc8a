# Copyright (c) 2020-2021, UChicago Argonne, LLC.
# See LICENSE file for details.

from os.path import join

from lnif.calculus import load_derivation
from lnif.latex import (
    RULE_LABELS, latex_formula, latex_sequent, latex_derivation,
    latex_document
)
from lnif.calculus import T
from lnif.sequent import parse_sequent as seq
from lnif.syntax import parse_formula as f

path = join('lnif', 'tests', 'data_for_test')


def test_latex_formula():
    assert latex_formula(f("(p -> q) | (q -> p)")) == \
        r"(p \supset q) \vee (q \supset p)"
    assert latex_formula(f("p -> q -> r")) == r"p \supset q \supset r"
    assert latex_formula(f("(p -> q) -> r")) == r"(p \supset q) \supset r"
    assert latex_formula(f("p & q | r")) == r"p \wedge q \vee r"
    assert latex_formula(f("~p")) == r"p \supset \bot"


def test_latex_quantifiers_and_parameters():
    assert latex_formula(f("forall x. p(x, #a)")) == \
        r"\forall x\, p(x, \hat{a})"
    assert latex_formula(f("exists y. r(y, #a0)")) == \
        r"\exists y\, r(y, \hat{a_{0}})"
    assert latex_formula(f("(forall x. p(x)) | q")) == \
        r"(\forall x\, p(x)) \vee q"


def test_latex_sequent():
    assert latex_sequent(seq("p |- q // |- r")) == \
        r"p \vdash q \mathbin{/\!\!/} \vdash r"
    assert latex_sequent(seq("|-")) == r"\vdash"


def test_every_rule_has_a_label():
    assert set(RULE_LABELS) == set(T) - {T.Cut}


def test_latex_derivation():
    d = load_derivation(join(path, 'linearity.json'))
    text = latex_derivation(d)
    lines = text.splitlines()
    assert lines[0] == r"\begin{prooftree}"
    assert lines[-1] == r"\end{prooftree}"
    assert text.count(r"\AxiomC{}") == 2
    assert text.count(r"\BinaryInfC") == 1
    assert text.count(r"\UnaryInfC") == 5
    assert r"\RightLabel{$(\vee_r)$}" in text
    assert latex_sequent(d.conclusion) in lines[-2]


def test_latex_cut_label():
    d = load_derivation(join(path, 'cut_atom.json'))
    assert r"\RightLabel{(cut)}" in latex_derivation(d)


def test_latex_document():
    one = load_derivation(join(path, 'linearity.json'))
    two = load_derivation(join(path, 'forall_elim.json'))
    text = latex_document(one, two)
    assert text.startswith(r"\documentclass{article}")
    assert r"\usepackage{bussproofs}" in text
    assert text.count(r"\begin{prooftree}") == 2
    assert text.endswith("\\end{document}\n")
