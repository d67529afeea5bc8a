"""
LaTeX export of derivations as ``bussproofs`` trees.

.. autosummary::
   ~latex_formula
   ~latex_sequent
   ~latex_derivation
   ~latex_document
"""

# Copyright (c) 2020-2021, UChicago Argonne, LLC.
# See LICENSE file for details.

import logging
import re

from .calculus import T
from .syntax import (
    Atom, Bottom, And, Or, Implies, Forall, Exists, Param, QUANTIFIERS
)

logger = logging.getLogger(__name__)

RULE_LABELS = {
    T.Id1: r"\mathrm{id}_1", T.Id2: r"\mathrm{id}_2", T.BotL: r"\bot_l",
    T.AndL: r"\wedge_l", T.AndR: r"\wedge_r",
    T.OrL: r"\vee_l", T.OrR: r"\vee_r",
    T.ImpL: r"\supset_l", T.ImpR1: r"\supset_{r1}", T.ImpR2: r"\supset_{r2}",
    T.Lift: r"\mathrm{lift}",
    T.ForallL: r"\forall_l", T.ForallR1: r"\forall_{r1}",
    T.ForallR2: r"\forall_{r2}",
    T.ExistsL: r"\exists_l", T.ExistsR: r"\exists_r",
    T.Iw: r"\mathrm{iw}", T.IcL: r"\mathrm{ic}_l", T.IcR: r"\mathrm{ic}_r",
    T.Ew: r"\mathrm{ew}", T.Sub: r"\mathrm{sub}", T.Lwr: r"\mathrm{lwr}",
    T.BotR: r"\bot_r", T.Mrg: r"\mathrm{mrg}",
}

_SYMBOLS = {And: r"\wedge", Or: r"\vee", Implies: r"\supset"}
_PRECEDENCE = {Implies: 1, Or: 2, And: 3}
_SEPARATOR = r" \mathbin{/\!\!/} "


def _name(text):
    match = re.fullmatch(r"([A-Za-z]+)(\d+)", text)
    if match:
        return f"{match.group(1)}_{{{match.group(2)}}}"
    if len(text) == 1:
        return text
    return r"\mathit{" + text.replace("_", r"\_") + "}"


def _level(formula):
    if isinstance(formula, QUANTIFIERS):
        return 0
    return _PRECEDENCE.get(type(formula), 4)


def _wrap(formula, parens):
    text = latex_formula(formula)
    return rf"({text})" if parens else text


def latex_formula(formula):
    """Math-mode text of ``formula``; parameters get a hat."""
    if isinstance(formula, Atom):
        if not formula.args:
            return _name(formula.pred)
        args = ", ".join(
            rf"\hat{{{_name(t.name)}}}" if isinstance(t, Param)
            else _name(t.name) for t in formula.args)
        return f"{_name(formula.pred)}({args})"
    if isinstance(formula, Bottom):
        return r"\bot"
    if isinstance(formula, QUANTIFIERS):
        word = r"\forall" if isinstance(formula, Forall) else r"\exists"
        return f"{word} {_name(formula.var)}\\, {latex_formula(formula.body)}"
    level = _PRECEDENCE[type(formula)]
    if isinstance(formula, Implies):
        left = _wrap(formula.left, _level(formula.left) <= level)
        right = latex_formula(formula.right)
    else:
        left = _wrap(formula.left, _level(formula.left) < level)
        right = _wrap(formula.right, _level(formula.right) <= level)
    return f"{left} {_SYMBOLS[type(formula)]} {right}"


def latex_sequent(sequent):
    parts = []
    for component in sequent:
        left = ", ".join(map(latex_formula, component.antecedent))
        right = ", ".join(map(latex_formula, component.consequent))
        parts.append(rf"{left} \vdash {right}".strip())
    return _SEPARATOR.join(parts)


def _label(tag):
    if tag is T.Cut:
        return r"\RightLabel{(cut)}"
    return rf"\RightLabel{{$({RULE_LABELS[tag]})$}}"


def latex_derivation(d):
    """
    ``prooftree`` environment for ``d``.

    Nodes are emitted premises first, as ``bussproofs`` expects.
    Axioms sit under an empty ``\\AxiomC{}``.
    """
    lines = [r"\begin{prooftree}"]
    for node in d.nodes():
        conclusion = f"${latex_sequent(node.conclusion)}$"
        if not node.premises:
            lines.append(r"\AxiomC{}")
        lines.append(_label(node.rule.tag))
        command = {0: "UnaryInfC", 1: "UnaryInfC", 2: "BinaryInfC"}
        lines.append(rf"\{command[len(node.premises)]}{{{conclusion}}}")
    lines.append(r"\end{prooftree}")
    logger.debug("rendered %d nodes", d.size)
    return "\n".join(lines) + "\n"


def latex_document(*derivations):
    """Standalone document holding one tree per derivation."""
    body = "\n".join(map(latex_derivation, derivations))
    return (
        "\\documentclass{article}\n"
        "\\usepackage{amssymb}\n"
        "\\usepackage{bussproofs}\n"
        "\\begin{document}\n"
        f"{body}"
        "\\end{document}\n"
    )
