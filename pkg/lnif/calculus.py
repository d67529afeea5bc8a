"""
The LNIF rules, the derivation checker and derivation files.

Rules are identified by :class:`RuleTag`. The sixteen rules of the
calculus form the *official* mode; ``with-cut`` adds the cut rule and
``extended`` also accepts the admissible structural rules (internal
weakening and contraction, external weakening, substitution, lowering,
right bottom removal, merge).

Principal occurrences are given as :class:`Position` triples
``(component, side, formula)`` in the conclusion, with these exceptions:
``BotR`` names the ``bot`` removed from the premise, ``Ew`` and ``Mrg``
only name a component index.

.. autosummary::
   ~RuleTag
   ~Position
   ~RuleInstance
   ~CutInstance
   ~Derivation
   ~check_node
   ~check_derivation
   ~apply_backward
   ~fill_eigen
   ~find_axiom
   ~cut_conclusion
   ~build
   ~derivation_to_dict
   ~derivation_from_dict
   ~dump_derivation
   ~load_derivation
   ~rule_counts
   ~derivation_table
"""

# Copyright (c) 2020-2021, UChicago Argonne, LLC.
# See LICENSE file for details.

from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import NamedTuple, Optional
import json
import logging

from pyRestTable import Table

from .exceptions import (
    SchemaMismatch, EigenvariableViolation, PositionError, CutAlignmentError,
    NotApplicable, LNIFError
)
from .sequent import (
    Component, Sequent, LEFT, RIGHT, splice, parse_sequent,
    rename_param_sequent
)
from .syntax import (
    Atom, Bottom, And, Or, Implies, Forall, Exists, Param, instantiate,
    print_formula, parse_formula, fresh_param
)

logger = logging.getLogger(__name__)


class RuleTag(Enum):
    Id1 = "Id1"
    Id2 = "Id2"
    BotL = "BotL"
    AndL = "AndL"
    AndR = "AndR"
    OrL = "OrL"
    OrR = "OrR"
    ImpL = "ImpL"
    ImpR1 = "ImpR1"
    ImpR2 = "ImpR2"
    Lift = "Lift"
    ForallL = "ForallL"
    ForallR1 = "ForallR1"
    ForallR2 = "ForallR2"
    ExistsL = "ExistsL"
    ExistsR = "ExistsR"
    Iw = "Iw"
    IcL = "IcL"
    IcR = "IcR"
    Ew = "Ew"
    Sub = "Sub"
    Lwr = "Lwr"
    BotR = "BotR"
    Mrg = "Mrg"
    Cut = "Cut"


T = RuleTag

OFFICIAL = frozenset(list(RuleTag)[:16])
MODES = {
    "official": OFFICIAL,
    "with-cut": OFFICIAL | {T.Cut},
    "extended": frozenset(RuleTag),
}
AXIOMS = frozenset({T.Id1, T.Id2, T.BotL})
EIGEN_RULES = frozenset({T.ForallR1, T.ForallR2, T.ExistsL})
WITNESS_RULES = frozenset({T.ForallL, T.ExistsR})
FORWARD_RULES = frozenset({T.Sub, T.Mrg, T.Cut})

_shapes = {
    T.AndL: (LEFT, And), T.AndR: (RIGHT, And),
    T.OrL: (LEFT, Or), T.OrR: (RIGHT, Or),
    T.ImpL: (LEFT, Implies), T.ImpR1: (RIGHT, Implies),
    T.ImpR2: (RIGHT, Implies), T.ForallL: (LEFT, Forall),
    T.ForallR1: (RIGHT, Forall), T.ForallR2: (RIGHT, Forall),
    T.ExistsL: (LEFT, Exists), T.ExistsR: (RIGHT, Exists),
    T.BotL: (LEFT, Bottom), T.BotR: (RIGHT, Bottom),
}


class Position(NamedTuple):
    index: int
    side: Optional[str] = None
    formula: object = None

    def __str__(self):
        if self.side is None:
            return f"[{self.index}]"
        return f"[{self.index}, {self.side}, {print_formula(self.formula)}]"


@dataclass(frozen=True)
class CutInstance:
    """
    Data of one cut.

    The left premise is ``G // Γ ⊢ Δ, A // H`` with ``len(G) = m`` and
    ``len(H) = n - 1``; the right premise has ``k[i]`` copies of ``A`` in
    the antecedent of component ``m + i``. Both premises and the
    conclusion have ``m + n`` components.
    """

    cut_formula: object
    multiplicities: tuple
    alignment: tuple

    def __post_init__(self):
        object.__setattr__(self, "multiplicities",
                           tuple(self.multiplicities))
        object.__setattr__(self, "alignment", tuple(self.alignment))


@dataclass(frozen=True)
class RuleInstance:
    """One rule application; see the module docstring for positions."""

    tag: RuleTag
    principal: tuple = ()
    eigen: Optional[Param] = None
    witness: Optional[Param] = None
    sub_map: Optional[tuple] = None
    cut: Optional[CutInstance] = None
    retain: bool = False

    def __post_init__(self):
        object.__setattr__(self, "principal", tuple(
            Position(*p) for p in self.principal))

    @property
    def index(self):
        return self.principal[0].index

    @property
    def formula(self):
        return self.principal[0].formula

    @property
    def side(self):
        return self.principal[0].side

    def __str__(self):
        text = self.tag.value
        if self.principal:
            text += " " + ", ".join(map(str, self.principal))
        if self.eigen is not None:
            text += f" eigen {self.eigen}"
        if self.witness is not None:
            text += f" witness {self.witness}"
        return text


def rule(tag, index=None, side=None, formula=None, **kwargs):
    """Shorthand for a rule with at most one principal occurrence."""
    principal = () if index is None else ((index, side, formula),)
    return RuleInstance(tag, principal, **kwargs)


@dataclass(frozen=True)
class Derivation:
    """A node: conclusion, last rule and the premise derivations."""

    conclusion: Sequent
    rule: RuleInstance
    premises: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))

    @cached_property
    def height(self):
        """Number of sequents on the longest branch."""
        return 1 + max((p.height for p in self.premises), default=0)

    @cached_property
    def size(self):
        return sum(1 for _ in self._postorder())

    @cached_property
    def params(self):
        """Parameters anywhere in the tree, eigenvariables included."""
        return self.conclusion.params.union(*(p.params for p in self.premises))

    @property
    def tag(self):
        return self.rule.tag

    def _postorder(self):
        stack = [(self, False)]
        while stack:
            node, done = stack.pop()
            if done:
                yield node
                continue
            stack.append((node, True))
            stack.extend((p, False) for p in reversed(node.premises))

    def nodes(self):
        """Every node, premises before conclusions."""
        return self._postorder()

    @cached_property
    def has_cut(self):
        return self.rule.tag is T.Cut or any(p.has_cut for p in self.premises)

    def contains_cut(self):
        return self.has_cut

    def __str__(self):
        return f"{self.conclusion}   [{self.rule}]"


def _at(sequent, position, tag):
    index, side, formula = position
    sequent.check_index(index)
    if side not in (LEFT, RIGHT):
        raise SchemaMismatch(f"{tag.value}: side must be L or R")
    if tag in _shapes:
        expected_side, kind = _shapes[tag]
        if side != expected_side or not isinstance(formula, kind):
            raise SchemaMismatch(
                f"{tag.value} cannot have {print_formula(formula)} on side "
                f"{side} as principal formula"
            )
    if tag is not T.BotR and formula not in sequent[index].side(side):
        raise PositionError(
            f"{tag.value}: {print_formula(formula)} is not on side {side} "
            f"of component {index}", index
        )
    return index, formula


def _one(rule):
    if len(rule.principal) != 1:
        raise SchemaMismatch(
            f"{rule.tag.value} takes exactly one principal occurrence")
    return rule.principal[0]


def _check_metadata(conclusion, rule):
    tag = rule.tag
    if (rule.eigen is not None) != (tag in EIGEN_RULES):
        raise SchemaMismatch(
            f"{tag.value} needs an eigenvariable" if tag in EIGEN_RULES
            else f"{tag.value} takes no eigenvariable")
    if (rule.witness is not None) != (tag in WITNESS_RULES):
        raise SchemaMismatch(
            f"{tag.value} needs a witness" if tag in WITNESS_RULES
            else f"{tag.value} takes no witness")
    if rule.retain and tag is not T.ExistsR:
        raise SchemaMismatch(f"{tag.value} has no retaining form")
    if (rule.sub_map is not None) != (tag is T.Sub):
        raise SchemaMismatch(f"{tag.value}: substitution given or missing")
    if (rule.cut is not None) != (tag is T.Cut):
        raise SchemaMismatch(f"{tag.value}: cut data given or missing")
    if rule.eigen is not None and rule.eigen.name in conclusion.params:
        raise EigenvariableViolation(rule.eigen.name)


def _premises(conclusion, rule):
    """Premises of a backward-applicable rule; the checker's reference."""
    tag = rule.tag
    _check_metadata(conclusion, rule)
    if tag in FORWARD_RULES:
        raise NotApplicable(f"{tag.value} is not applied backwards")
    last = len(conclusion) - 1

    if tag in (T.Id1, T.Id2):
        if len(rule.principal) != 2:
            raise SchemaMismatch(f"{tag.value} takes two occurrences")
        (i, side_a, p), (j, side_b, q) = rule.principal
        if side_a != LEFT or side_b != RIGHT or p != q \
                or not isinstance(p, Atom):
            raise SchemaMismatch(
                f"{tag.value} needs one atom on the left and the same atom "
                f"on the right")
        _at(conclusion, rule.principal[0], tag)
        _at(conclusion, rule.principal[1], tag)
        if tag is T.Id1 and i != j:
            raise SchemaMismatch("Id1 needs both atoms in one component")
        if tag is T.Id2 and not i < j:
            raise SchemaMismatch(
                "Id2 needs the right atom in a strictly later component")
        return []

    if tag is T.Iw:
        premise = conclusion
        for index, side, formula in rule.principal:
            premise = premise.remove(index, side, formula)
        return [premise]

    if tag is T.Ew:
        index = _one(rule).index
        conclusion.check_index(index)
        if len(conclusion) < 2 or not conclusion[index].is_empty():
            raise SchemaMismatch("Ew needs an empty component to remove")
        return [conclusion.delete(index)]

    i, formula = _at(conclusion, _one(rule), tag)
    if tag in (T.Lift, T.IcL) and rule.side != LEFT or \
            tag in (T.Lwr, T.IcR) and rule.side != RIGHT:
        raise SchemaMismatch(f"{tag.value} acts on the other side")
    rest = conclusion.remove(i, rule.side, formula) \
        if tag is not T.BotR else conclusion

    if tag is T.BotL:
        return []
    if tag is T.BotR:
        return [conclusion.add(i, RIGHT, [Bottom()])]
    if tag is T.IcL or tag is T.IcR:
        return [conclusion.add(i, rule.side, [formula])]
    if tag is T.Lwr:
        if i < 1 or rule.side != RIGHT:
            raise PositionError("Lwr lowers into a component with a "
                                "predecessor, on the right", i)
        return [rest.add(i - 1, RIGHT, [formula])]
    if tag is T.AndL:
        return [rest.add(i, LEFT, [formula.left, formula.right])]
    if tag is T.AndR:
        return [rest.add(i, RIGHT, [formula.left]),
                rest.add(i, RIGHT, [formula.right])]
    if tag is T.OrL:
        return [rest.add(i, LEFT, [formula.left]),
                rest.add(i, LEFT, [formula.right])]
    if tag is T.OrR:
        return [rest.add(i, RIGHT, [formula.left, formula.right])]
    if tag is T.ImpL:
        return [rest.add(i, LEFT, [formula.right]),
                conclusion.add(i, RIGHT, [formula.left])]
    if tag is T.Lift:
        if i == last:
            raise PositionError("Lift needs a following component", i)
        return [conclusion.add(i + 1, LEFT, [formula])]
    if tag is T.ForallL:
        return [conclusion.add(i, LEFT, [instantiate(formula,
                                                     rule.witness)])]
    if tag is T.ExistsL:
        return [rest.add(i, LEFT, [instantiate(formula, rule.eigen)])]
    if tag is T.ExistsR:
        base = conclusion if rule.retain else rest
        return [base.add(i, RIGHT, [instantiate(formula, rule.witness)])]

    if tag in (T.ImpR1, T.ForallR1):
        if i != last:
            raise PositionError(
                f"{tag.value} applies to the last component only", i)
    elif i == last:
        raise PositionError(
            f"{tag.value} needs a component after {i}", i)
    if tag in (T.ImpR1, T.ImpR2):
        new = Component((formula.left,), (formula.right,))
    else:
        new = Component((), (instantiate(formula, rule.eigen),))
    if tag in (T.ImpR1, T.ForallR1):
        return [rest.insert(i + 1, new)]
    return [rest.insert(i + 1, new), rest.add(i + 1, RIGHT, [formula])]


def cut_conclusion(left, right, cut):
    """
    Conclusion of a cut on premise sequents ``left`` and ``right``.

    Raises
    ------
    CutAlignmentError
    """
    m, n = cut.alignment
    k = cut.multiplicities
    if len(k) != n or n < 1 or m < 0 or any(x < 0 for x in k) or sum(k) < 1:
        raise CutAlignmentError(
            f"bad cut data: alignment {cut.alignment}, multiplicities {k}")
    if not len(left) == len(right) == m + n:
        raise CutAlignmentError(
            f"cut premises must both have {m + n} components, found "
            f"{len(left)} and {len(right)}")
    try:
        rest_left = left.remove(m, RIGHT, cut.cut_formula)
        rest_right = right
        for i, times in enumerate(k):
            if times:
                rest_right = rest_right.remove(m + i, LEFT, cut.cut_formula,
                                               times)
    except PositionError as err:
        raise CutAlignmentError(f"cut formula missing: {err}")
    return splice(rest_left, rest_right)


def _check_forward(conclusion, rule, premises):
    tag = rule.tag
    _check_metadata(conclusion, rule)
    if tag is T.Cut:
        if len(premises) != 2:
            raise SchemaMismatch("Cut has two premises")
        expected = cut_conclusion(premises[0], premises[1], rule.cut)
        if expected != conclusion:
            raise SchemaMismatch(
                f"cut yields '{expected}', not '{conclusion}'")
        return
    if len(premises) != 1:
        raise SchemaMismatch(f"{tag.value} has one premise")
    premise = premises[0]
    if tag is T.Sub:
        a, b = rule.sub_map
        expected = rename_param_sequent(premise, a, b)
    else:
        index = _one(rule).index
        premise.check_index(index + 1)
        expected = premise.merge(index)
    if expected != conclusion:
        raise SchemaMismatch(
            f"{tag.value} yields '{expected}', not '{conclusion}'")


def check_node(conclusion, rule, premises, mode="extended"):
    """
    Check one inference.

    Parameters
    ----------
    conclusion : Sequent
    rule : RuleInstance
    premises : list of Sequent
    mode : str
        ``'official'``, ``'with-cut'`` or ``'extended'``.

    Returns
    -------
    ok : bool
        Always True; a failing check raises.

    Raises
    ------
    SchemaMismatch, EigenvariableViolation, PositionError,
    CutAlignmentError
    """
    if rule.tag not in MODES[mode]:
        raise SchemaMismatch(
            f"rule {rule.tag.value} is not allowed in {mode} mode")
    premises = list(premises)
    if rule.tag in FORWARD_RULES:
        _check_forward(conclusion, rule, premises)
        return True
    try:
        expected = _premises(conclusion, rule)
    except NotApplicable as err:
        raise SchemaMismatch(str(err))
    if expected != premises:
        shown = " ;; ".join(map(str, expected)) or "no premises"
        raise SchemaMismatch(
            f"{rule.tag.value} at '{conclusion}' expects {shown}; got "
            f"{' ;; '.join(map(str, premises)) or 'no premises'}")
    return True


def check_derivation(d, mode="official"):
    """
    Check every node of ``d``.

    The error of the first failing node (premises searched depth first,
    left to right) is raised with its ``path`` set to the premise
    indices leading to it.
    """
    stack = [(d, ())]
    while stack:
        node, path = stack.pop()
        try:
            check_node(node.conclusion, node.rule,
                       [p.conclusion for p in node.premises], mode)
        except LNIFError as err:
            if hasattr(err, "at"):
                raise err.at(path)
            raise
        stack.extend((p, path + (i,))
                     for i, p in reversed(list(enumerate(node.premises))))
    return True


def is_valid(d, mode="official"):
    try:
        return check_derivation(d, mode)
    except LNIFError:
        return False


def fill_eigen(sequent, rule, avoid=()):
    """Give ``rule`` a fresh eigenvariable if it needs one and has none."""
    if rule.tag in EIGEN_RULES and rule.eigen is None:
        return replace(rule, eigen=fresh_param(set(sequent.params)
                                               | set(avoid)))
    return rule


def apply_backward(sequent, rule):
    """
    Premises of ``rule`` applied to ``sequent`` read bottom-up.

    A missing eigenvariable is chosen with :func:`fresh_param`.

    Raises
    ------
    PositionError, NotApplicable
    """
    if rule.tag in WITNESS_RULES and rule.witness is None:
        raise NotApplicable(f"{rule.tag.value} needs a witness")
    try:
        return _premises(sequent, fill_eigen(sequent, rule))
    except (SchemaMismatch, EigenvariableViolation) as err:
        raise NotApplicable(str(err))


def build(conclusion, rule, premises=(), check=True):
    """
    New node; checks that the premise derivations fit ``rule``.

    A missing eigenvariable is filled in first.
    """
    rule = fill_eigen(conclusion, rule)
    node = Derivation(conclusion, rule, tuple(premises))
    if check:
        check_node(conclusion, rule, [p.conclusion for p in premises])
    return node


def find_axiom(sequent):
    """
    An axiom rule closing ``sequent``, or None.

    ``BotL`` is preferred, then ``Id1``, then ``Id2``.
    """
    bottom = Bottom()
    for i, component in enumerate(sequent):
        if bottom in component.antecedent:
            return rule(T.BotL, i, LEFT, bottom)
    for i, component in enumerate(sequent):
        for formula in component.antecedent:
            if isinstance(formula, Atom) and formula in component.consequent:
                return RuleInstance(T.Id1, ((i, LEFT, formula),
                                            (i, RIGHT, formula)))
    for i, component in enumerate(sequent):
        for formula in component.antecedent:
            if not isinstance(formula, Atom):
                continue
            for j in range(i + 1, len(sequent)):
                if formula in sequent[j].consequent:
                    return RuleInstance(T.Id2, ((i, LEFT, formula),
                                                (j, RIGHT, formula)))
    return None


def axiom(sequent):
    """One-node derivation of ``sequent`` if it is an axiom, else None."""
    found = find_axiom(sequent)
    return None if found is None else Derivation(sequent, found)


def _param_text(param):
    return None if param is None else str(param)


def _read_param(text):
    return None if text is None else Param(text.lstrip("#"))


def derivation_to_dict(d):
    """JSON-ready nested dictionaries."""
    r = d.rule
    node = {
        "conclusion": str(d.conclusion),
        "rule": r.tag.value,
        "principal": [
            [p.index, p.side,
             None if p.formula is None else print_formula(p.formula)]
            for p in r.principal
        ],
    }
    if r.eigen is not None:
        node["eigen"] = str(r.eigen)
    if r.witness is not None:
        node["witness"] = str(r.witness)
    if r.retain:
        node["retain"] = True
    if r.sub_map is not None:
        node["sub"] = [str(p) for p in r.sub_map]
    if r.cut is not None:
        node["cutFormula"] = print_formula(r.cut.cut_formula)
        node["k"] = list(r.cut.multiplicities)
        node["alignment"] = list(r.cut.alignment)
    node["premises"] = [derivation_to_dict(p) for p in d.premises]
    return node


def derivation_from_dict(node):
    """Inverse of :func:`derivation_to_dict`."""
    try:
        tag = RuleTag(node["rule"])
        principal = tuple(
            (index, side, None if text is None else parse_formula(text))
            for index, side, text in node.get("principal", [])
        )
        cut = None
        if "cutFormula" in node:
            cut = CutInstance(parse_formula(node["cutFormula"]),
                              tuple(node["k"]), tuple(node["alignment"]))
        sub = node.get("sub")
        r = RuleInstance(
            tag, principal,
            eigen=_read_param(node.get("eigen")),
            witness=_read_param(node.get("witness")),
            sub_map=None if sub is None else tuple(map(_read_param, sub)),
            cut=cut,
            retain=bool(node.get("retain", False)),
        )
        conclusion = parse_sequent(node["conclusion"])
    except (KeyError, TypeError, ValueError) as err:
        if isinstance(err, LNIFError):
            raise
        raise SchemaMismatch(f"malformed derivation node: {err}")
    premises = tuple(derivation_from_dict(p)
                     for p in node.get("premises", []))
    return Derivation(conclusion, r, premises)


def dump_derivation(d, path=None):
    """
    Serialize ``d`` as JSON.

    Parameters
    ----------
    d : Derivation
    path : str, optional
        File to write. The text is returned in any case.
    """
    text = json.dumps(derivation_to_dict(d), indent=1,
                      ensure_ascii=False) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    return text


def load_derivation(path=None, text=None):
    """Read a derivation from the file ``path`` or from ``text``."""
    if text is None:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    try:
        node = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaMismatch(f"not a derivation file: {err}")
    return derivation_from_dict(node)


def rule_counts(d):
    """``collections.Counter`` of rule tags used in ``d``."""
    return Counter(node.rule.tag for node in d.nodes())


def derivation_table(d, table_fmt="simple", printing=True):
    """
    Summary table of a derivation.

    Parameters
    ----------
    d : Derivation
    table_fmt : str
        Any format accepted by ``pyRestTable.Table.reST``.
    printing : bool
        Print the table.

    Returns
    -------
    table : pyRestTable.Table
    """
    table = Table()
    table.labels = ["rule", "count"]
    for tag, number in sorted(rule_counts(d).items(),
                              key=lambda item: item[0].value):
        table.rows.append([tag.value, number])
    table.rows.append(["height", d.height])
    table.rows.append(["size", d.size])
    if printing:
        print(table.reST(fmt=table_fmt))
    return table
