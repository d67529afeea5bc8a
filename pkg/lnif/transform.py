"""
Derivation transformations: admissible rules, inversions and cut
elimination.

Every function takes cut-free derivations in the official rules and
returns one, except :func:`eliminate_cut` which also accepts cuts.
Indices are component indices in the conclusion of the input.

.. autosummary::
   ~derive_identity
   ~identity_at
   ~rename_param
   ~admit_iw
   ~admit_ew
   ~admit_lwr
   ~admit_bot_r
   ~drop_formula
   ~strip_retained
   ~invert_left
   ~invert_right
   ~admit_contraction_left
   ~admit_contraction_right
   ~admit_merge
   ~weaken
   ~weaken_to
   ~contract_to
   ~eliminate_cut
   ~set_check_rewrites
"""

# Copyright (c) 2020-2021, UChicago Argonne, LLC.
# See LICENSE file for details.

from dataclasses import replace
from functools import wraps
import logging
import sys
import threading

from .calculus import (
    T, AXIOMS, OFFICIAL, Position, CutInstance, Derivation, RuleInstance,
    rule, build,
    find_axiom, cut_conclusion, check_derivation
)
from .exceptions import (
    LNIFError, NotApplicable, NotWithCutValid, PositionError, SchemaMismatch,
    ShapeError
)
from .sequent import Component, Sequent, LEFT, RIGHT, splice
from .syntax import (
    Atom, Bottom, And, Or, Implies, Forall, Exists, Param, instantiate,
    complexity, fresh_param, print_formula, rename_param_formula, _param_name
)

logger = logging.getLogger(__name__)

_R1 = (T.ImpR1, T.ForallR1)
_R2 = (T.ImpR2, T.ForallR2)
_settings = {"check_rewrites": False}
_depth = threading.local()


def set_check_rewrites(flag):
    """Re-check the whole output of every public transformation."""
    _settings["check_rewrites"] = bool(flag)


def _rewrite(function):
    """Re-check results of outermost calls when asked to."""
    @wraps(function)
    def wrapper(*args, **kwargs):
        _depth.value = getattr(_depth, "value", 0) + 1
        try:
            result = function(*args, **kwargs)
        finally:
            _depth.value -= 1
        if _settings["check_rewrites"] and _depth.value == 0:
            for d in result if isinstance(result, (list, tuple)) else [result]:
                check_derivation(d, "official")
            logger.debug("%s: output re-checked", function.__name__)
        return result
    return wrapper


def _official(d, name):
    if d.rule.tag not in OFFICIAL:
        raise NotApplicable(
            f"{name} works on official rules, found {d.rule.tag.value}")


def _axiom_node(target):
    found = find_axiom(target)
    if found is None:
        raise SchemaMismatch(f"'{target}' was expected to be an axiom")
    return Derivation(target, found)


def _insertion(r, k):
    """Index of the component premise ``k`` of ``r`` inserts, or None."""
    if k == 0 and r.tag in _R1 + _R2:
        return r.index + 1
    return None


def _shift(r, move):
    return replace(r, principal=tuple(
        Position(move(p.index), p.side, p.formula) for p in r.principal))


def _moved(r, index):
    return replace(r, principal=((index, r.side, r.formula),))


def _renamed_eigen(d, avoid):
    """``d`` with its eigenvariable renamed away from ``avoid``."""
    e = d.rule.eigen
    if e is None or e.name not in avoid:
        return d
    new = fresh_param(set(avoid) | d.params)
    premises = [rename_param(p, e, new) for p in d.premises]
    return Derivation(d.conclusion, replace(d.rule, eigen=new), premises)


def _new_component(formula, eigen):
    if isinstance(formula, Implies):
        return Component((formula.left,), (formula.right,))
    return Component((), (instantiate(formula, eigen),))


def _unit(index, length):
    return tuple(int(i == index) for i in range(length))


# --- identity and renaming -------------------------------------------------

@_rewrite
def derive_identity(formula, before=(), antecedent=(), consequent=(),
                    after=()):
    """
    Derivation of ``G // Γ, A ⊢ A, Δ // H``.

    Parameters
    ----------
    formula : formula
        ``A``.
    before, after : sequence of Component
        ``G`` and ``H``.
    antecedent, consequent : sequence of formulas
        ``Γ`` and ``Δ``.
    """
    middle = Component(tuple(antecedent) + (formula,),
                       tuple(consequent) + (formula,))
    sequent = Sequent(tuple(before) + (middle,) + tuple(after))
    return _identity(sequent, len(before), formula)


@_rewrite
def identity_at(sequent, index, formula):
    """Derivation of ``sequent``, which has ``formula`` on both sides of
    component ``index``."""
    component = sequent[sequent.check_index(index)]
    if formula not in component.antecedent or \
            formula not in component.consequent:
        raise PositionError(
            f"{print_formula(formula)} is not on both sides of component "
            f"{index}", index)
    return _identity(sequent, index, formula)


def _identity(s, c, a):
    if isinstance(a, Atom):
        return build(s, RuleInstance(T.Id1, ((c, LEFT, a), (c, RIGHT, a))))
    if isinstance(a, Bottom):
        return build(s, rule(T.BotL, c, LEFT, a))
    if isinstance(a, And):
        s1 = s.remove(c, LEFT, a).add(c, LEFT, [a.left, a.right])
        rest = s1.remove(c, RIGHT, a)
        inner = build(s1, rule(T.AndR, c, RIGHT, a), [
            _identity(rest.add(c, RIGHT, [a.left]), c, a.left),
            _identity(rest.add(c, RIGHT, [a.right]), c, a.right),
        ])
        return build(s, rule(T.AndL, c, LEFT, a), [inner])
    if isinstance(a, Or):
        s1 = s.remove(c, RIGHT, a).add(c, RIGHT, [a.left, a.right])
        rest = s1.remove(c, LEFT, a)
        inner = build(s1, rule(T.OrL, c, LEFT, a), [
            _identity(rest.add(c, LEFT, [a.left]), c, a.left),
            _identity(rest.add(c, LEFT, [a.right]), c, a.right),
        ])
        return build(s, rule(T.OrR, c, RIGHT, a), [inner])
    if isinstance(a, Exists):
        e = fresh_param(s.params)
        inst = instantiate(a, e)
        s1 = s.remove(c, LEFT, a).add(c, LEFT, [inst])
        s2 = s1.remove(c, RIGHT, a).add(c, RIGHT, [inst])
        inner = build(s1, rule(T.ExistsR, c, RIGHT, a, witness=e),
                      [_identity(s2, c, inst)])
        return build(s, rule(T.ExistsL, c, LEFT, a, eigen=e), [inner])

    e = fresh_param(s.params) if isinstance(a, Forall) else None
    base = s.remove(c, RIGHT, a)
    opened = base.insert(c + 1, _new_component(a, e))
    lifted = opened.add(c + 1, LEFT, [a])
    if isinstance(a, Implies):
        top = build(lifted, rule(T.ImpL, c + 1, LEFT, a), [
            _identity(lifted.remove(c + 1, LEFT, a).add(c + 1, LEFT,
                                                        [a.right]),
                      c + 1, a.right),
            _identity(lifted.add(c + 1, RIGHT, [a.left]), c + 1, a.left),
        ])
    else:
        inst = instantiate(a, e)
        top = build(lifted, rule(T.ForallL, c + 1, LEFT, a, witness=e),
                    [_identity(lifted.add(c + 1, LEFT, [inst]), c + 1, inst)])
    left = build(opened, rule(T.Lift, c, LEFT, a), [top])
    one, two = (T.ImpR1, T.ImpR2) if isinstance(a, Implies) \
        else (T.ForallR1, T.ForallR2)
    if c == len(s) - 1:
        return build(s, rule(one, c, RIGHT, a, eigen=e), [left])
    moved = base.add(c + 1, RIGHT, [a])
    chain = build(moved, rule(T.Lift, c, LEFT, a),
                  [_identity(moved.add(c + 1, LEFT, [a]), c + 1, a)])
    return build(s, rule(two, c, RIGHT, a, eigen=e), [left, chain])


@_rewrite
def rename_param(d, a, b):
    """
    Replace parameter ``a`` by ``b`` throughout; height preserving.

    Eigenvariables equal to ``b`` are renamed apart first.
    """
    a, b = _param_name(a), _param_name(b)
    if a == b or a not in d.params:
        return d
    r = d.rule
    if r.eigen is not None and r.eigen.name == a:
        return d
    if r.eigen is not None and r.eigen.name == b:
        d = _renamed_eigen(d, d.params | {a, b})
        r = d.rule
    if r.tag in (T.Sub, T.Mrg):
        raise NotApplicable(f"cannot rename through {r.tag.value}")

    def swap(formula):
        return None if formula is None else \
            rename_param_formula(formula, a, b)

    new_rule = replace(
        r,
        principal=tuple(Position(p.index, p.side, swap(p.formula))
                        for p in r.principal),
        witness=Param(b) if r.witness is not None and r.witness.name == a
        else r.witness,
        cut=None if r.cut is None
        else replace(r.cut, cut_formula=swap(r.cut.cut_formula)),
    )
    premises = [rename_param(p, a, b) for p in d.premises]
    return build(d.conclusion.map(swap), new_rule, premises)


# --- weakening ---------------------------------------------------------------

def weaken(d, extra):
    """
    Add the components of ``extra`` to the conclusion; height preserving.

    Parameters
    ----------
    d : Derivation
    extra : sequence of Component
        One component per component of the conclusion.
    """
    extra = tuple(extra)
    if len(extra) != len(d.conclusion):
        raise PositionError(
            f"weakening needs {len(d.conclusion)} components, got "
            f"{len(extra)}")
    if all(c.is_empty() for c in extra):
        return d
    target = Sequent(tuple(c.union(e) for c, e in zip(d.conclusion, extra)))
    if d.rule.tag in AXIOMS:
        return build(target, d.rule)
    _official(d, "weakening")
    d = _renamed_eigen(d, target.params)
    r = d.rule
    premises = []
    for k, p in enumerate(d.premises):
        more = list(extra)
        ins = _insertion(r, k)
        if ins is not None:
            more.insert(ins, Component())
        premises.append(weaken(p, more))
    return build(target, r, premises)


def weaken_to(d, target):
    """Weaken ``d`` up to ``target``, which must contain its conclusion."""
    extra = []
    for have, want in zip(d.conclusion, target):
        more = want.difference(have)
        if more is None:
            raise SchemaMismatch(f"'{d.conclusion}' is not contained in "
                                 f"'{target}'")
        extra.append(more)
    return weaken(d, extra)


@_rewrite
def admit_iw(d, pos, left=(), right=()):
    """Internal weakening of component ``pos``; height preserving."""
    d.conclusion.check_index(pos)
    extra = [Component() for _ in d.conclusion]
    extra[pos] = Component(tuple(left), tuple(right))
    return weaken(d, extra)


@_rewrite
def admit_ew(d, pos):
    """
    Insert an empty component at ``pos`` (``0 <= pos <= n``).

    Not height preserving: lifts into the new component and second
    premises of the ``2`` rules are rebuilt.
    """
    n = len(d.conclusion)
    if not 0 <= pos <= n:
        raise PositionError(f"cannot insert a component at {pos}", pos)
    target = d.conclusion.insert(pos)
    r = d.rule

    def up(i):
        return i + 1 if i >= pos else i

    if r.tag in AXIOMS:
        return build(target, _shift(r, up))
    _official(d, "external weakening")
    i = r.index
    if r.tag is T.Lift and pos == i + 1:
        a = r.formula
        inner = admit_iw(admit_ew(d.premises[0], i + 1), i + 1, left=[a])
        mid = build(target.add(i + 1, LEFT, [a]), rule(T.Lift, i + 1, LEFT, a),
                    [inner])
        return build(target, r, [mid])
    if r.tag in _R1 and pos == n:
        a = r.formula
        premise = d.premises[0]
        right_end = target.remove(i, RIGHT, a).add(n, RIGHT, [a])
        right = build(right_end, _moved(r, n), [admit_ew(premise, n)])
        two = T.ImpR2 if r.tag is T.ImpR1 else T.ForallR2
        return build(target, replace(r, tag=two),
                     [admit_ew(premise, n + 1), right])
    if r.tag in _R2 and pos == i + 1:
        a = r.formula
        first, second = d.premises
        inner = build(target.remove(i, RIGHT, a).add(i + 1, RIGHT, [a]),
                      _moved(r, i + 1),
                      [admit_ew(first, i + 1), admit_ew(second, i + 1)])
        return build(target, r, [admit_ew(first, i + 2), inner])

    premises = []
    for k, p in enumerate(d.premises):
        ins = _insertion(r, k)
        premises.append(admit_ew(p, pos if ins is None or pos < ins
                                 else pos + 1))
    return build(target, _shift(r, up), premises)


# --- lowering and strengthening ---------------------------------------------

@_rewrite
def admit_lwr(d, pos, formula):
    """
    Move one ``formula`` from the consequent of ``pos`` to ``pos + 1``.

    Height preserving.
    """
    c = d.conclusion
    c.check_index(pos + 1)
    if formula not in c[pos].consequent:
        raise PositionError(
            f"{print_formula(formula)} is not in the consequent of "
            f"component {pos}", pos)
    target = c.remove(pos, RIGHT, formula).add(pos + 1, RIGHT, [formula])
    r = d.rule
    if r.tag in AXIOMS:
        return _axiom_node(target)
    _official(d, "lowering")
    if r.side == RIGHT and r.index == pos and r.formula == formula:
        if r.tag in _R2:
            return d.premises[1]
        if r.tag is T.AndR:
            return build(target, _moved(r, pos + 1), [
                admit_lwr(d.premises[0], pos, formula.left),
                admit_lwr(d.premises[1], pos, formula.right),
            ])
        if r.tag is T.OrR:
            premise = admit_lwr(d.premises[0], pos, formula.left)
            premise = admit_lwr(premise, pos, formula.right)
            return build(target, _moved(r, pos + 1), [premise])
        if r.tag is T.ExistsR:
            premise = admit_lwr(d.premises[0], pos,
                                instantiate(formula, r.witness))
            if r.retain:
                premise = admit_lwr(premise, pos, formula)
            return build(target, _moved(r, pos + 1), [premise])

    premises = []
    for k, p in enumerate(d.premises):
        ins = _insertion(r, k)
        if ins is None or ins > pos + 1:
            premises.append(admit_lwr(p, pos, formula))
        elif ins == pos + 1:
            premises.append(admit_lwr(admit_lwr(p, pos, formula), pos + 1,
                                      formula))
        else:
            premises.append(admit_lwr(p, pos + 1, formula))
    return build(target, r, premises)


def drop_formula(d, pos, formula):
    """
    Remove one ``formula`` from the consequent of ``pos``.

    Height preserving. Raises :class:`NotApplicable` when every copy is
    needed, that is when the formula is principal with one copy left.
    """
    c = d.conclusion
    c.check_index(pos)
    if formula not in c[pos].consequent:
        raise PositionError(
            f"{print_formula(formula)} is not in the consequent of "
            f"component {pos}", pos)
    target = c.remove(pos, RIGHT, formula)
    r = d.rule
    if r.tag in AXIOMS:
        found = find_axiom(target)
        if found is None:
            raise NotApplicable(f"'{target}' is no longer an axiom")
        return Derivation(target, found)
    _official(d, "strengthening")
    if r.side == RIGHT and r.index == pos and r.formula == formula \
            and c.count(pos, RIGHT, formula) == 1:
        raise NotApplicable(
            f"{print_formula(formula)} is principal for {r.tag.value}")
    premises = []
    for k, p in enumerate(d.premises):
        ins = _insertion(r, k)
        premises.append(drop_formula(p, pos if ins is None or pos < ins
                                     else pos + 1, formula))
    return build(target, r, premises)


@_rewrite
def admit_bot_r(d, pos):
    """Remove a ``bot`` from the consequent of ``pos``; height preserving."""
    return drop_formula(d, pos, Bottom())


@_rewrite
def strip_retained(d):
    """Turn retaining ``ExistsR`` steps into plain ones where possible."""
    premises = tuple(strip_retained(p) for p in d.premises)
    r = d.rule
    if r.tag is T.ExistsR and r.retain:
        try:
            premise = drop_formula(premises[0], r.index, r.formula)
        except NotApplicable:
            pass
        else:
            return build(d.conclusion, replace(r, retain=False), [premise])
    if all(p is q for p, q in zip(premises, d.premises)):
        return d
    return Derivation(d.conclusion, r, premises)


# --- right inversion ---------------------------------------------------------

_right_kinds = {
    T.AndR: And, T.OrR: Or, T.ExistsR: Exists, T.ImpR1: Implies,
    T.ImpR2: Implies, T.ForallR1: Forall, T.ForallR2: Forall,
}


@_rewrite
def invert_right(d, tag, pos, formula=None, witness=None, eigen=None):
    """
    Derivations of the premises of right rule ``tag`` at ``pos``.

    Parameters
    ----------
    d : Derivation
    tag : RuleTag or str
    pos : int
    formula : formula, optional
        Needed when ``pos`` holds several candidates.
    witness : Param, optional
        Instance for ``ExistsR``.
    eigen : Param, optional
        Parameter of the new component for the ``Forall`` rules; fresh
        for ``d`` by default.

    Returns
    -------
    premises : list of Derivation
        In the order of the rule's premises.
    """
    tag = T(tag)
    if tag not in _right_kinds:
        raise ShapeError(f"{tag.value} is not a right rule")
    c = d.conclusion
    c.check_index(pos)
    candidates = {f for f in c[pos].consequent
                  if isinstance(f, _right_kinds[tag])}
    if formula is None:
        if len(candidates) != 1:
            raise ShapeError(
                f"give the principal formula: {len(candidates)} candidates "
                f"for {tag.value} in component {pos}")
        formula = candidates.pop()
    elif formula not in candidates:
        raise ShapeError(f"{print_formula(formula)} is not a {tag.value} "
                         f"formula of component {pos}")
    last = len(c) - 1
    if tag in _R1 and pos != last:
        raise PositionError(f"{tag.value} applies to the last component", pos)
    if tag in _R2 and pos == last:
        raise PositionError(f"{tag.value} needs a component after {pos}", pos)

    if tag is T.AndR:
        return [_invert_right_part(d, pos, formula, 0),
                _invert_right_part(d, pos, formula, 1)]
    if tag is T.OrR:
        return [_invert_right_part(d, pos, formula, None)]
    if tag is T.ExistsR:
        if witness is None:
            raise ShapeError("inverting ExistsR needs a witness")
        return [admit_iw(d, pos, right=[instantiate(formula, witness)])]
    if isinstance(formula, Forall) and eigen is None:
        eigen = fresh_param(d.params)
    opened = _open(d, pos, formula, eigen)
    if tag in _R1:
        return [opened]
    return [opened, admit_lwr(d, pos, formula)]


def _invert_right_part(d, pos, formula, which):
    """``AndR`` (which = 0, 1) or ``OrR`` (which = None) inversion."""
    parts = [formula.left, formula.right] if which is None \
        else [(formula.left, formula.right)[which]]
    c = d.conclusion
    target = c.remove(pos, RIGHT, formula).add(pos, RIGHT, parts)
    r = d.rule
    if r.tag in AXIOMS:
        return _axiom_node(target)
    _official(d, "inversion")
    if r.side == RIGHT and r.index == pos and r.formula == formula \
            and r.tag in (T.AndR, T.OrR):
        return d.premises[which or 0]
    premises = []
    for k, p in enumerate(d.premises):
        ins = _insertion(r, k)
        premises.append(_invert_right_part(
            p, pos if ins is None or pos < ins else pos + 1, formula, which))
    return build(target, r, premises)


def _open(d, pos, formula, eigen):
    """
    Replace ``formula`` in the consequent of ``pos`` by a new component
    after ``pos``: ``A ⊢ B`` for ``A -> B``, ``⊢ B[eigen]`` for
    ``forall x B``.
    """
    c = d.conclusion
    target = c.remove(pos, RIGHT, formula).insert(
        pos + 1, _new_component(formula, eigen))
    r = d.rule
    if r.tag in AXIOMS:
        return _axiom_node(target)
    _official(d, "inversion")
    avoid = target.params | ({eigen.name} if eigen is not None else set())

    if r.tag in _R1 + _R2 and r.index == pos:
        if r.formula == formula:
            premise = d.premises[0]
            if r.eigen is not None:
                premise = rename_param(premise, r.eigen, eigen)
            if premise.conclusion != target:
                raise SchemaMismatch(
                    f"inversion reached '{premise.conclusion}' instead of "
                    f"'{target}'")
            return premise
        d = _renamed_eigen(d, avoid)
        r = d.rule
        other = r.formula
        if r.tag in _R1:
            premise = d.premises[0]
            left = _open(admit_lwr(premise, pos, formula), pos + 1, formula,
                         eigen)
            right = build(
                target.remove(pos, RIGHT, other).add(pos + 1, RIGHT, [other]),
                _moved(r, pos + 1), [_open(premise, pos, formula, eigen)])
            two = T.ImpR2 if r.tag is T.ImpR1 else T.ForallR2
            return build(target, replace(r, tag=two), [left, right])
        first, second = d.premises
        left = _open(admit_lwr(first, pos, formula), pos + 1, formula, eigen)
        inner = build(
            target.remove(pos, RIGHT, other).add(pos + 1, RIGHT, [other]),
            _moved(r, pos + 1),
            [_open(first, pos, formula, eigen),
             _open(second, pos, formula, eigen)])
        return build(target, r, [left, inner])

    if r.tag is T.Lift and r.index == pos:
        b = r.formula
        inner = admit_iw(_open(d.premises[0], pos, formula, eigen), pos + 1,
                         left=[b])
        mid = build(target.add(pos + 1, LEFT, [b]),
                    rule(T.Lift, pos + 1, LEFT, b), [inner])
        return build(target, r, [mid])

    d = _renamed_eigen(d, avoid)
    r = d.rule
    premises = []
    for k, p in enumerate(d.premises):
        ins = _insertion(r, k)
        premises.append(_open(p, pos + 1 if ins is not None and ins <= pos
                              else pos, formula, eigen))
    return build(target, _shift(r, lambda i: i + 1 if i > pos else i),
                 premises)


# --- left inversion ----------------------------------------------------------

def _multiplicities(sequent, formula, multiplicities):
    if isinstance(multiplicities, dict):
        ks = {int(i): int(k) for i, k in multiplicities.items() if k}
    else:
        ks = {i: int(k) for i, k in enumerate(multiplicities) if k}
    if not ks:
        raise PositionError("no copies selected for inversion")
    for i, k in ks.items():
        if k < 0 or sequent.count(i, LEFT, formula) < k:
            raise PositionError(
                f"component {i} has fewer than {k} copies of "
                f"{print_formula(formula)} on the left", i)
    return ks


@_rewrite
def invert_left(d, formula, multiplicities, witness=None):
    """
    Invert the left rule of ``formula`` on several copies at once.

    Parameters
    ----------
    d : Derivation
    formula : formula
    multiplicities : dict or sequence
        Number of copies of ``formula`` in each component's antecedent.
    witness : Param, optional
        Instance parameter for ``forall`` (required) and ``exists``
        (fresh by default).

    Returns
    -------
    Derivation for ``and``, ``forall`` and ``exists``; a pair for ``or``
    (left disjunct, right disjunct) and ``->`` (consequent on the left,
    antecedent added on the right).
    """
    ks = _multiplicities(d.conclusion, formula, multiplicities)
    if isinstance(formula, And):
        return _decompose(d, formula, ks, [formula.left, formula.right])
    if isinstance(formula, Or):
        return (_decompose(d, formula, ks, [formula.left]),
                _decompose(d, formula, ks, [formula.right]))
    if isinstance(formula, Implies):
        extra = [Component((), (formula.left,) * ks.get(i, 0))
                 for i in range(len(d.conclusion))]
        return (_decompose(d, formula, ks, [formula.right]),
                weaken(d, extra))
    if isinstance(formula, Forall):
        if witness is None:
            raise ShapeError("inverting ForallL needs a witness")
        inst = instantiate(formula, witness)
        return weaken(d, [Component((inst,) * ks.get(i, 0))
                          for i in range(len(d.conclusion))])
    if isinstance(formula, Exists):
        witness = witness if witness is not None else fresh_param(d.params)
        if not isinstance(witness, Param):
            witness = Param(_param_name(witness))
        return _decompose(d, formula, ks, [instantiate(formula, witness)],
                          witness)
    raise ShapeError(f"{print_formula(formula)} has no left rule to invert")


def _decompose(d, formula, ks, parts, witness=None):
    if not ks:
        return d
    c = d.conclusion
    target = c
    for i, k in ks.items():
        target = target.remove(i, LEFT, formula, k).add(i, LEFT, parts * k)
    r = d.rule
    if r.tag in AXIOMS:
        return _axiom_node(target)
    _official(d, "inversion")
    i = r.index if r.principal else None
    if r.side == LEFT and r.formula == formula and ks.get(i) \
            and c.count(i, LEFT, formula) == ks[i]:
        if r.tag is T.Lift:
            more = dict(ks)
            more[i + 1] = more.get(i + 1, 0) + 1
            node = _decompose(d.premises[0], formula, more, parts, witness)
            current = node.conclusion
            for part in reversed(parts):
                current = current.remove(i + 1, LEFT, part)
                node = build(current, rule(T.Lift, i, LEFT, part), [node])
            return node
        fewer = dict(ks)
        fewer[i] -= 1
        premise = d.premises[0]
        if r.tag is T.OrL and parts == [formula.right]:
            premise = d.premises[1]
        if r.tag is T.ExistsL:
            premise = rename_param(premise, r.eigen, witness)
        return _decompose(premise, formula, {j: k for j, k in fewer.items()
                                             if k}, parts, witness)

    d = _renamed_eigen(d, target.params)
    r = d.rule
    premises = []
    for k, p in enumerate(d.premises):
        ins = _insertion(r, k)
        shifted = {j + 1 if ins is not None and j >= ins else j: v
                   for j, v in ks.items()}
        premises.append(_decompose(p, formula, shifted, parts, witness))
    return build(target, r, premises)


# --- contraction and merge ---------------------------------------------------

def _check_copies(d, pos, side, formula):
    if d.conclusion.count(pos, side, formula) < 2:
        raise PositionError(
            f"contraction needs two copies of {print_formula(formula)} on "
            f"side {side} of component {pos}", pos)


@_rewrite
def admit_contraction_left(d, pos, formula):
    """Remove one of two or more antecedent copies of ``formula``."""
    _check_copies(d, pos, LEFT, formula)
    c = d.conclusion
    target = c.remove(pos, LEFT, formula)
    r = d.rule
    if r.tag in AXIOMS:
        return _axiom_node(target)
    _official(d, "contraction")
    if r.side == LEFT and r.index == pos and r.formula == formula \
            and c.count(pos, LEFT, formula) == 2:
        f = formula
        if r.tag is T.AndL:
            premise = invert_left(d.premises[0], f, {pos: 1})
            premise = admit_contraction_left(premise, pos, f.left)
            premise = admit_contraction_left(premise, pos, f.right)
            return build(target, r, [premise])
        if r.tag is T.OrL:
            first, _ = invert_left(d.premises[0], f, {pos: 1})
            _, second = invert_left(d.premises[1], f, {pos: 1})
            return build(target, r, [
                admit_contraction_left(first, pos, f.left),
                admit_contraction_left(second, pos, f.right),
            ])
        if r.tag is T.ImpL:
            first, _ = invert_left(d.premises[0], f, {pos: 1})
            return build(target, r, [
                admit_contraction_left(first, pos, f.right),
                admit_contraction_left(d.premises[1], pos, f),
            ])
        if r.tag is T.ExistsL:
            premise = invert_left(d.premises[0], f, {pos: 1},
                                  witness=r.eigen)
            premise = admit_contraction_left(premise, pos,
                                             instantiate(f, r.eigen))
            return build(target, r, [premise])
    premises = []
    for k, p in enumerate(d.premises):
        ins = _insertion(r, k)
        premises.append(admit_contraction_left(
            p, pos if ins is None or pos < ins else pos + 1, formula))
    return build(target, r, premises)


def _contract_new(d, index, formula, eigen):
    """Contract the doubled parts of a merged new component."""
    if isinstance(formula, Implies):
        d = admit_contraction_left(d, index, formula.left)
        return admit_contraction_right(d, index, formula.right)
    return admit_contraction_right(d, index, instantiate(formula, eigen))


@_rewrite
def admit_contraction_right(d, pos, formula):
    """Remove one of two or more consequent copies of ``formula``."""
    _check_copies(d, pos, RIGHT, formula)
    c = d.conclusion
    target = c.remove(pos, RIGHT, formula)
    r = d.rule
    if r.tag in AXIOMS:
        return _axiom_node(target)
    _official(d, "contraction")
    if r.side == RIGHT and r.index == pos and r.formula == formula \
            and c.count(pos, RIGHT, formula) == 2:
        f = formula
        if r.tag is T.AndR:
            first = invert_right(d.premises[0], T.AndR, pos, f)[0]
            second = invert_right(d.premises[1], T.AndR, pos, f)[1]
            return build(target, r, [
                admit_contraction_right(first, pos, f.left),
                admit_contraction_right(second, pos, f.right),
            ])
        if r.tag is T.OrR:
            premise = invert_right(d.premises[0], T.OrR, pos, f)[0]
            premise = admit_contraction_right(premise, pos, f.left)
            premise = admit_contraction_right(premise, pos, f.right)
            return build(target, r, [premise])
        if r.tag is T.ExistsR and not r.retain:
            return build(target, replace(r, retain=True), [d.premises[0]])
        if r.tag in _R1 + _R2:
            opened = _open(d.premises[0], pos, f, r.eigen)
            merged = _contract_new(admit_merge(opened, pos + 1), pos + 1, f,
                                   r.eigen)
            if r.tag in _R1:
                return build(target, r, [merged])
            lowered = admit_lwr(d.premises[1], pos, f)
            return build(target, r, [
                merged, admit_contraction_right(lowered, pos + 1, f)])
    premises = []
    for k, p in enumerate(d.premises):
        ins = _insertion(r, k)
        premises.append(admit_contraction_right(
            p, pos if ins is None or pos < ins else pos + 1, formula))
    return build(target, r, premises)


@_rewrite
def admit_merge(d, pos):
    """Fuse components ``pos`` and ``pos + 1``."""
    c = d.conclusion
    target = c.merge(pos)
    r = d.rule
    if r.tag in AXIOMS:
        return _axiom_node(target)
    _official(d, "merge")
    if r.tag in _R2 and r.index == pos:
        return admit_merge(d.premises[1], pos)
    if r.tag is T.Lift and r.index == pos:
        return admit_contraction_left(admit_merge(d.premises[0], pos), pos,
                                      r.formula)
    premises = []
    for k, p in enumerate(d.premises):
        ins = _insertion(r, k)
        premises.append(admit_merge(p, pos + 1 if ins is not None
                                    and ins <= pos else pos))
    return build(target, _shift(r, lambda i: i - 1 if i > pos else i),
                 premises)


def contract_to(d, target):
    """Contract surplus copies in ``d`` down to ``target``."""
    if len(d.conclusion) != len(target):
        raise SchemaMismatch(
            f"cannot contract '{d.conclusion}' to '{target}'")
    for i, (have, want) in enumerate(zip(d.conclusion, target)):
        surplus = have.difference(want)
        if surplus is None:
            raise SchemaMismatch(
                f"cannot contract '{d.conclusion}' to '{target}'")
        for formula in surplus.antecedent:
            d = admit_contraction_left(d, i, formula)
        for formula in surplus.consequent:
            d = admit_contraction_right(d, i, formula)
    return d


# --- cut elimination ---------------------------------------------------------

class _Reduction:
    """State of one :func:`eliminate_cut` run."""

    def __init__(self):
        self.steps = 0

    def run(self, d):
        if not d.has_cut:
            return d
        premises = tuple(self.run(p) for p in d.premises)
        r = d.rule
        if r.tag is not T.Cut:
            return Derivation(d.conclusion, r, premises)
        m, _ = r.cut.alignment
        result = self.cut(premises[0], premises[1], r.cut.cut_formula,
                          r.cut.multiplicities, m, None)
        if result.conclusion != d.conclusion:
            raise SchemaMismatch(
                f"cut reduction reached '{result.conclusion}' instead of "
                f"'{d.conclusion}'")
        return result

    def cut(self, left, right, a, ks, m, parent):
        ks = tuple(ks)
        if not any(ks):
            rest = left.conclusion.remove(m, RIGHT, a)
            return weaken_to(right, splice(rest, right.conclusion))
        target = cut_conclusion(left.conclusion, right.conclusion,
                                CutInstance(a, ks, (m, len(ks))))
        measure = (complexity(a), right.height)
        if parent is not None and not measure < parent:
            raise AssertionError(
                f"cut measure {measure} does not decrease below {parent}")
        self.steps += 1
        logger.debug("reduce cut on %s, measure %s", print_formula(a),
                     measure)

        found = find_axiom(target)
        if found is not None:
            return Derivation(target, found)
        r = right.rule
        j = self.tracked(right, a, ks, m)
        if r.tag in AXIOMS:
            if j is None:
                raise SchemaMismatch(f"'{target}' should be an axiom")
            if r.tag is T.BotL:
                return weaken_to(admit_bot_r(left, m), target)
            base = left
            for step in range(m, r.principal[1].index):
                base = admit_lwr(base, step, a)
            return weaken_to(base, target)
        if j is None:
            return self.commute(left, right, a, ks, m, target, measure)
        return self.principal(left, right, a, ks, m, j, target, measure)

    @staticmethod
    def tracked(right, a, ks, m):
        """Component of a principal cut copy in ``right``, or None."""
        r = right.rule
        if not r.principal:
            return None
        j, side, formula = r.principal[0]
        if side != LEFT or formula != a or not m <= j < m + len(ks):
            return None
        k = ks[j - m]
        if k and right.conclusion.count(j, LEFT, a) == k:
            return j
        return None

    def commute(self, left, right, a, ks, m, target, measure):
        right = _renamed_eigen(right, target.params | left.params)
        r = right.rule
        premises = []
        for k, p in enumerate(right.premises):
            ins = _insertion(r, k)
            if ins is None:
                premises.append(self.cut(left, p, a, ks, m, measure))
            elif ins <= m:
                premises.append(self.cut(admit_ew(left, ins), p, a, ks,
                                         m + 1, measure))
            else:
                more = ks[:ins - m] + (0,) + ks[ins - m:]
                premises.append(self.cut(admit_ew(left, ins), p, a, more, m,
                                         measure))
        return build(target, r, premises)

    def principal(self, left, right, a, ks, m, j, target, measure):
        r = right.rule
        n = len(ks)
        fewer = list(ks)
        fewer[j - m] -= 1
        unit = _unit(j - m, n)

        if r.tag is T.Lift:
            more = list(ks)
            more[j + 1 - m] += 1
            return self.cut(left, right.premises[0], a, more, m, measure)

        if r.tag is T.AndL:
            x = self.cut(left, right.premises[0], a, fewer, m, measure)
            first, second = invert_right(left, T.AndR, m, a)
            y = self.cut(first, x, a.left, unit, m, measure)
            z = self.cut(second, y, a.right, unit, m, measure)
            return contract_to(z, target)

        if r.tag is T.OrL:
            x_left = self.cut(left, right.premises[0], a, fewer, m, measure)
            x_right = self.cut(left, right.premises[1], a, fewer, m, measure)
            (both,) = invert_right(left, T.OrR, m, a)
            y = self.cut(both, x_left, a.left, unit, m, measure)
            z = self.cut(y, x_right, a.right, unit, m, measure)
            return contract_to(z, target)

        if r.tag is T.ImpL:
            x_right = self.cut(left, right.premises[0], a, fewer, m, measure)
            x_left = self.cut(left, right.premises[1], a, ks, m, measure)
            low = left
            for step in range(m, j):
                low = admit_lwr(low, step, a)
            split = admit_merge(_open(low, j, a, None), j)
            local = _unit(0, len(target) - j)
            y = self.cut(x_left, split, a.left, local, j, measure)
            z = self.cut(y, x_right, a.right, local, j, measure)
            return contract_to(z, target)

        if r.tag is T.ForallL:
            t = r.witness
            inst = instantiate(a, t)
            x = self.cut(left, right.premises[0], a, ks, m, measure)
            e = fresh_param(left.params | right.params | {t.name})
            opened = admit_merge(_open(left, m, a, e), m)
            y = self.cut(rename_param(opened, e, t), x, inst, unit, m,
                         measure)
            return contract_to(y, target)

        if r.tag is T.ExistsL:
            premise, e = right.premises[0], r.eigen
            if e.name in left.params:
                new = fresh_param(left.params | right.params)
                premise, e = rename_param(premise, e, new), new
            x = self.cut(left, premise, a, fewer, m, measure)
            threaded = self.thread(left, m, tuple(range(len(target))),
                                   a, x, e, j, target, measure)
            return contract_to(threaded, target)

        raise SchemaMismatch(f"no cut reduction for {r.tag.value}")

    def thread(self, current, mc, layout, a, x, e, j, target, measure):
        """
        Follow the cut formula ``a`` up the left derivation ``current``.

        ``layout`` maps components of ``current`` to components of
        ``target`` (None for components added on the way). The result
        derives ``current`` without ``a`` at ``mc``, joined with
        ``target`` spread over the layout.
        """
        spread = Sequent([target[t] if t is not None else Component()
                          for t in layout])
        goal = splice(current.conclusion.remove(mc, RIGHT, a), spread)
        found = find_axiom(goal)
        if found is not None:
            return Derivation(goal, found)
        r = current.rule
        if r.tag is T.ExistsR and r.index == mc and r.formula == a:
            t = r.witness
            inst = instantiate(a, t)
            if r.retain:
                q = self.thread(current.premises[0], mc, layout, a, x, e, j,
                                target, measure)
            else:
                q = weaken(current.premises[0], list(spread))
            instance = rename_param(x, e, t)
            for index, t_index in enumerate(layout):
                if t_index is None:
                    instance = admit_ew(instance, index)
            jj = layout.index(j)
            y = self.cut(q, instance, inst, _unit(jj - mc, len(layout) - mc),
                         mc, measure)
            return contract_to(y, goal)
        if r.tag in AXIOMS:
            raise SchemaMismatch(f"'{goal}' should be an axiom")
        current = _renamed_eigen(current, goal.params | x.params)
        r = current.rule
        premises = []
        for k, p in enumerate(current.premises):
            ins = _insertion(r, k)
            if ins is None:
                premises.append(self.thread(p, mc, layout, a, x, e, j,
                                            target, measure))
            else:
                premises.append(self.thread(
                    p, mc + 1 if ins <= mc else mc,
                    layout[:ins] + (None,) + layout[ins:], a, x, e, j,
                    target, measure))
        return build(goal, r, premises)


def eliminate_cut(d):
    """
    Cut-free derivation of the same conclusion.

    Cuts are reduced topmost first. Each reduction step is checked to
    lower the pair (cut formula complexity, right premise height).

    Raises
    ------
    NotWithCutValid
        ``d`` is not a valid derivation with cut.
    """
    try:
        check_derivation(d, "with-cut")
    except LNIFError as err:
        raise NotWithCutValid(f"input is not a valid derivation: {err}")
    if not d.has_cut:
        return d
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    reduction = _Reduction()
    result = reduction.run(d)
    logger.info("eliminated cuts in %d reduction steps, height %d -> %d",
                reduction.steps, d.height, result.height)
    if _settings["check_rewrites"]:
        check_derivation(result, "official")
    return result
