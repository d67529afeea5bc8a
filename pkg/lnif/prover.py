"""
Bounded proof search, the Hilbert axioms as derivations and the
simulation of modus ponens and generalization.

.. autosummary::
   ~prove
   ~prove_formula
   ~prove_batch
   ~SCHEMAS
   ~axiom_instance
   ~prove_axiom
   ~mp_with_cut
   ~simulate_mp
   ~simulate_gen
   ~hilbert_proof
"""

# Copyright (c) 2020-2021, UChicago Argonne, LLC.
# See LICENSE file for details.

from concurrent.futures import ThreadPoolExecutor
from warnings import warn
import logging
import threading

import pandas as pd

from .calculus import (
    T, Derivation, CutInstance, RuleInstance, rule, build, apply_backward,
    fill_eigen, find_axiom, cut_conclusion, check_derivation
)
from .config import ProverConfig
from .exceptions import (
    LNIFError, DepthExceeded, Saturated, ProofSearchFailure, ShapeError,
    EigenvariableViolation
)
from .sequent import (
    Component, Sequent, LEFT, RIGHT, parse_sequent, renaming_key
)
from .syntax import (
    Atom, Bottom, And, Or, Implies, Forall, Exists, Param, instantiate,
    fresh_param, formula_params, parse_formula, print_formula,
    abstract_param, unused_variable, _params_in_order, _param_name
)
from .transform import (
    admit_ew, admit_lwr, admit_merge, invert_right, eliminate_cut,
    identity_at, strip_retained
)

logger = logging.getLogger(__name__)


# --- proof search ------------------------------------------------------------

def _witnesses(sequent):
    order = []
    for _, _, formula in sequent.formulas():
        _params_in_order(formula, order)
    return [Param(name) for name in order] or [fresh_param(())]


def _holds(f, side, witnesses):
    """
    Whether ``f`` on the left of ``side`` would add nothing new.

    True when ``f`` is present or was already broken up there: both
    conjuncts, one disjunct, the consequent of an implication or an
    instance of an existential over ``witnesses``.
    """
    if f in side:
        return True
    if isinstance(f, And):
        return _holds(f.left, side, witnesses) \
            and _holds(f.right, side, witnesses)
    if isinstance(f, Or):
        return _holds(f.left, side, witnesses) \
            or _holds(f.right, side, witnesses)
    if isinstance(f, Implies):
        return _holds(f.right, side, witnesses)
    if isinstance(f, Exists):
        return any(_holds(instantiate(f, t), side, witnesses)
                   for t in witnesses)
    return False


class _Search:
    """
    Backward search with one rule per sequent.

    Every rule is invertible here (``ExistsR`` keeps its formula), so the
    first applicable rule in a fixed order is taken and never retracted.
    ``Lift`` steps are free; every other step uses one unit of depth.
    """

    def __init__(self, config):
        self.config = config
        self.memo = {}
        self.lock = threading.Lock()
        self.capped = False
        self.pool = ThreadPoolExecutor() if config.parallel else None

    def close(self):
        if self.pool is not None:
            self.pool.shutdown(wait=True)

    def run(self, sequent, depth, ancestors):
        found = find_axiom(sequent)
        if found is not None:
            return Derivation(sequent, found)
        loop = renaming_key(sequent)
        if loop in ancestors:
            raise Saturated(f"'{sequent}' repeats on its branch", sequent,
                            loop=True)
        key = (sequent, depth)
        if self.config.memo:
            with self.lock:
                known = self.memo.get(key)
            if isinstance(known, ProofSearchFailure):
                raise known
            if known is not None:
                return known
        try:
            result = self.expand(sequent, depth, ancestors | {loop})
        except ProofSearchFailure as err:
            if self.config.memo and not err.loop:
                with self.lock:
                    self.memo.setdefault(key, err)
            raise
        if self.config.memo:
            with self.lock:
                result = self.memo.setdefault(key, result)
        return result

    def expand(self, sequent, depth, ancestors):
        step = self.choose(sequent)
        if step is None:
            raise Saturated(f"no rule makes progress on '{sequent}'",
                            sequent)
        r, cost = step
        if depth < cost:
            raise DepthExceeded(f"depth exhausted at '{sequent}'", sequent)
        r = fill_eigen(sequent, r)
        premises = apply_backward(sequent, r)
        logger.debug("%s  <-  %s", sequent, r)
        remaining = depth - cost
        if self.pool is None or len(premises) < 2:
            children = [self.run(p, remaining, ancestors) for p in premises]
        else:
            children = self.run_parallel(premises, remaining, ancestors)
        return Derivation(sequent, r, children)

    def run_parallel(self, premises, depth, ancestors):
        futures = [self.pool.submit(self.run, p, depth, ancestors)
                   for p in premises[1:]]
        try:
            children = [self.run(premises[0], depth, ancestors)]
        except ProofSearchFailure:
            for future in futures:
                future.cancel()
            raise
        for premise, future in zip(premises[1:], futures):
            if future.cancel():
                children.append(self.run(premise, depth, ancestors))
            else:
                children.append(future.result())
        return children

    def choose(self, s):
        """Next rule for ``s`` and its depth cost, or None."""
        last = len(s) - 1
        for i, component in enumerate(s):
            for f in component.antecedent:
                if isinstance(f, And):
                    return rule(T.AndL, i, LEFT, f), 1
                if isinstance(f, Exists):
                    return rule(T.ExistsL, i, LEFT, f), 1
            for f in component.consequent:
                if isinstance(f, Or):
                    return rule(T.OrR, i, RIGHT, f), 1
        for f in s[last].consequent:
            if isinstance(f, Implies):
                return rule(T.ImpR1, last, RIGHT, f), 1
            if isinstance(f, Forall):
                return rule(T.ForallR1, last, RIGHT, f), 1
        for i in range(last):
            for f in s[i].antecedent:
                if not isinstance(f, (Atom, Bottom)) \
                        and f not in s[i + 1].antecedent:
                    return rule(T.Lift, i, LEFT, f), 0
        for i, component in enumerate(s):
            for f in component.consequent:
                if isinstance(f, And):
                    return rule(T.AndR, i, RIGHT, f), 1
            for f in component.antecedent:
                if isinstance(f, Or):
                    return rule(T.OrL, i, LEFT, f), 1
        for i in range(last):
            for f in s[i].consequent:
                if isinstance(f, Implies):
                    return rule(T.ImpR2, i, RIGHT, f), 1
                if isinstance(f, Forall):
                    return rule(T.ForallR2, i, RIGHT, f), 1
        witnesses = _witnesses(s)
        for i, component in enumerate(s):
            for f in component.antecedent:
                if isinstance(f, Implies) \
                        and f.left not in component.consequent \
                        and not _holds(f.right, component.antecedent,
                                       witnesses):
                    return rule(T.ImpL, i, LEFT, f), 1
        for i, component in enumerate(s):
            for f in component.antecedent:
                if isinstance(f, Forall):
                    step = self.instance(f, witnesses, component.antecedent)
                    if step is not None:
                        return rule(T.ForallL, i, LEFT, f,
                                    witness=step), 1
            for f in component.consequent:
                if isinstance(f, Exists):
                    step = self.instance(f, witnesses, component.consequent)
                    if step is not None:
                        return rule(T.ExistsR, i, RIGHT, f, witness=step,
                                    retain=True), 1
        return None

    def instance(self, f, witnesses, side):
        """First witness whose instance is new, within the cap."""
        present = sum(1 for t in witnesses if instantiate(f, t) in side)
        for t in witnesses:
            if instantiate(f, t) in side:
                continue
            if present >= self.config.witness_cap:
                self.capped = True
                return None
            return t
        return None


def prove(sequent, depth=None, config=None):
    """
    Search for a derivation of ``sequent``.

    Parameters
    ----------
    sequent : Sequent or str
    depth : int, optional
        Overrides ``config.depth``: the number of logical rule
        applications allowed on one branch (``Lift`` is not counted).
    config : ProverConfig, optional

    Returns
    -------
    d : Derivation
        Checked in official mode.

    Raises
    ------
    DepthExceeded, Saturated
    """
    if isinstance(sequent, str):
        sequent = parse_sequent(sequent)
    config = (config or ProverConfig()).update(depth=depth)
    search = _Search(config)
    try:
        d = search.run(sequent, config.depth, frozenset())
    except ProofSearchFailure:
        if search.capped:
            warn(f"witness cap {config.witness_cap} was reached while "
                 f"searching '{sequent}'")
        raise
    finally:
        search.close()
    d = strip_retained(d)
    check_derivation(d, "official")
    logger.info("proved '%s': height %d, %d nodes", sequent, d.height,
                d.size)
    return d


def prove_formula(formula, depth=None, config=None):
    """:func:`prove` for ``⊢ formula``; text is parsed first."""
    if isinstance(formula, str):
        formula = parse_formula(formula)
    return prove(Sequent([Component((), (formula,))]), depth, config)


def _batch_row(text, config):
    row = {"formula": text, "status": "proved", "height": None,
           "size": None, "reason": ""}
    try:
        d = prove_formula(text, config=config)
    except ProofSearchFailure as err:
        row.update(status="failed", reason=err.reason)
    except LNIFError as err:
        row.update(status="error", reason=str(err))
    else:
        row.update(height=d.height, size=d.size)
    return row


def prove_batch(texts, config=None, jobs=1):
    """
    Prove several formulas.

    Parameters
    ----------
    texts : list of str
    config : ProverConfig, optional
    jobs : int
        Worker threads.

    Returns
    -------
    table : pandas.DataFrame
        Columns ``formula, status, height, size, reason`` in input order.
    """
    config = config or ProverConfig()
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        rows = list(pool.map(lambda t: _batch_row(t, config), texts))
    return pd.DataFrame(rows, columns=["formula", "status", "height",
                                       "size", "reason"])


# --- Hilbert axioms ----------------------------------------------------------

def _by(tag, formula, *then, index=None, **kwargs):
    """Tactic: apply a rule at ``index`` (last component by default)."""
    def tactic(s):
        at = len(s) - 1 if index is None else index
        side = LEFT if tag in (T.AndL, T.OrL, T.ImpL, T.ForallL, T.ExistsL,
                               T.Lift) else RIGHT
        r = fill_eigen(s, rule(tag, at, side, formula, **kwargs))
        premises = apply_backward(s, r)
        return build(s, r, [t(p) for t, p in zip(then, premises)])
    return tactic


def _same(formula):
    """Tactic: identity on the last component holding ``formula`` twice."""
    def tactic(s):
        for c in reversed(range(len(s))):
            if formula in s[c].antecedent and formula in s[c].consequent:
                return identity_at(s, c, formula)
        raise ShapeError(f"{print_formula(formula)} is not on both sides "
                         f"of any component of '{s}'")
    return tactic


def _closed(s):
    return Derivation(s, find_axiom(s))


def _lift_all(i, then):
    def tactic(s):
        for f in s[i].antecedent:
            if f not in s[i + 1].antecedent:
                return _by(T.Lift, f, _lift_all(i, then), index=i)(s)
        return then(s)
    return tactic


def _intros(count, then):
    """Open ``count`` nested implications, carrying hypotheses along."""
    if count == 0:
        return then

    def tactic(s):
        last = len(s) - 1
        (f,) = s[last].consequent
        return _by(T.ImpR1, f, _lift_all(last, _intros(count - 1, then)))(s)
    return tactic


def _lift_same(i, formula):
    return _by(T.Lift, formula, _same(formula), index=i)


def _k(a, b):
    return Implies(a, Implies(b, a)), _intros(2, _same(a))


def _s(a, b, c):
    formula = Implies(Implies(a, Implies(b, c)),
                      Implies(Implies(a, b), Implies(a, c)))
    inner = _by(T.ImpL, Implies(b, c), _same(c), _same(b))
    middle = _by(T.ImpL, Implies(a, Implies(b, c)), inner, _same(a))
    return formula, _intros(3, _by(T.ImpL, Implies(a, b), middle, _same(a)))


def _and_intro(a, b):
    return (Implies(a, Implies(b, And(a, b))),
            _intros(2, _by(T.AndR, And(a, b), _same(a), _same(b))))


def _and_elim_left(a, b):
    return (Implies(And(a, b), a),
            _intros(1, _by(T.AndL, And(a, b), _same(a))))


def _and_elim_right(a, b):
    return (Implies(And(a, b), b),
            _intros(1, _by(T.AndL, And(a, b), _same(b))))


def _or_intro_left(a, b):
    return (Implies(a, Or(a, b)),
            _intros(1, _by(T.OrR, Or(a, b), _same(a))))


def _or_intro_right(a, b):
    return (Implies(b, Or(a, b)),
            _intros(1, _by(T.OrR, Or(a, b), _same(b))))


def _or_elim(a, b, c):
    formula = Implies(Implies(a, c),
                      Implies(Implies(b, c), Implies(Or(a, b), c)))
    return formula, _intros(3, _by(
        T.OrL, Or(a, b),
        _by(T.ImpL, Implies(a, c), _same(c), _same(a)),
        _by(T.ImpL, Implies(b, c), _same(c), _same(b))))


def _ex_falso(a):
    return Implies(Bottom(), a), _intros(1, _closed)


def _linearity(a, b):
    ab, ba = Implies(a, b), Implies(b, a)
    return Or(ab, ba), _by(
        T.OrR, Or(ab, ba),
        _by(T.ImpR1, ab,
            _by(T.ImpR2, ba, _lift_same(1, b),
                _by(T.ImpR1, ba, _lift_same(1, a)), index=0),
            index=0),
        index=0)


def _quantified(formula, kind, schema):
    if not isinstance(formula, kind):
        raise ShapeError(f"{schema} needs a {kind.__name__} formula, got "
                         f"{print_formula(formula)}")
    return formula


def _eigen(*formulas):
    return fresh_param(frozenset().union(*map(formula_params, formulas)))


def _forall_elim(q, t):
    q = _quantified(q, Forall, "forall_elim")
    inst = instantiate(q, t)
    return Implies(q, inst), _intros(1, _by(T.ForallL, q, _same(inst),
                                            witness=t))


def _exists_intro(q, t):
    q = _quantified(q, Exists, "exists_intro")
    inst = instantiate(q, t)
    return Implies(inst, q), _intros(1, _by(T.ExistsR, q, _same(inst),
                                            witness=t))


def _forall_imp(q, b):
    q = _quantified(q, Forall, "forall_imp")
    hyp = Forall(q.var, Implies(b, q.body))
    e = _eigen(q, b)
    inst = instantiate(q, e)
    return Implies(hyp, Implies(b, q)), _intros(2, _by(
        T.ForallR1, q,
        _lift_all(2, _by(T.ForallL, hyp,
                         _by(T.ImpL, Implies(b, inst), _same(inst),
                             _same(b)),
                         witness=e)),
        eigen=e))


def _exists_imp(q, b):
    q = _quantified(q, Exists, "exists_imp")
    hyp = Forall(q.var, Implies(q.body, b))
    e = _eigen(q, b)
    inst = instantiate(q, e)
    return Implies(hyp, Implies(q, b)), _intros(2, _by(
        T.ExistsL, q,
        _by(T.ForallL, hyp,
            _by(T.ImpL, Implies(inst, b), _same(b), _same(inst)),
            witness=e),
        eigen=e))


def _quantifier_shift(q, b):
    q = _quantified(q, Forall, "quantifier_shift")
    hyp = Forall(q.var, Or(q.body, b))
    e = _eigen(q, b)
    inst = instantiate(q, e)
    return Implies(hyp, Or(q, b)), _intros(1, _by(
        T.OrR, Or(q, b),
        _by(T.ForallR1, q,
            _by(T.ForallL, hyp,
                _by(T.OrL, Or(inst, b), _lift_same(1, inst), _same(b),
                    index=1),
                index=1, witness=e),
            eigen=e)))


SCHEMAS = {
    "k": (_k, 2, False),
    "s": (_s, 3, False),
    "and_intro": (_and_intro, 2, False),
    "and_elim_left": (_and_elim_left, 2, False),
    "and_elim_right": (_and_elim_right, 2, False),
    "or_intro_left": (_or_intro_left, 2, False),
    "or_intro_right": (_or_intro_right, 2, False),
    "or_elim": (_or_elim, 3, False),
    "ex_falso": (_ex_falso, 1, False),
    "linearity": (_linearity, 2, False),
    "forall_elim": (_forall_elim, 1, True),
    "exists_intro": (_exists_intro, 1, True),
    "forall_imp": (_forall_imp, 2, False),
    "exists_imp": (_exists_imp, 2, False),
    "quantifier_shift": (_quantifier_shift, 2, False),
}
"""Hilbert axiom schemas: builder, number of formulas, takes a witness."""


def _schema(schema, formulas, witness):
    try:
        builder, arity, needs_witness = SCHEMAS[schema]
    except KeyError:
        raise ShapeError(f"unknown axiom schema '{schema}'; known: "
                         f"{', '.join(SCHEMAS)}")
    formulas = [parse_formula(f) if isinstance(f, str) else f
                for f in formulas]
    if len(formulas) != arity:
        raise ShapeError(f"{schema} takes {arity} formulas, got "
                         f"{len(formulas)}")
    args = list(formulas)
    if needs_witness:
        if witness is None:
            raise ShapeError(f"{schema} needs a witness parameter")
        args.append(Param(_param_name(witness)))
    return builder(*args)


def axiom_instance(schema, *formulas, witness=None):
    """
    The formula of one axiom instance.

    Quantifier schemas take the quantified formula first
    (``forall_elim`` and ``exists_intro`` also a witness), then ``B``.
    """
    return _schema(schema, formulas, witness)[0]


def prove_axiom(schema, *formulas, witness=None):
    """
    Derivation of ``⊢ axiom`` built step by step, without search.

    Parameters
    ----------
    schema : str
        A key of :data:`SCHEMAS`.
    formulas : formula or str
    witness : Param or str, optional

    Returns
    -------
    d : Derivation
    """
    formula, tactic = _schema(schema, formulas, witness)
    d = tactic(Sequent([Component((), (formula,))]))
    logger.debug("axiom %s: %s, height %d", schema, print_formula(formula),
                 d.height)
    return d


# --- Hilbert rules -----------------------------------------------------------

def _single(d, what):
    c = d.conclusion
    if len(c) != 1 or c[0].antecedent or len(c[0].consequent) != 1:
        raise ShapeError(f"{what} must end in '|- A', not '{c}'")
    return c[0].consequent[0]


def mp_with_cut(d_a, d_imp):
    """
    Modus ponens as one cut.

    ``⊢ A`` is extended to ``⊢ A // ⊢``, ``⊢ A -> B`` is inverted to
    ``⊢ // A ⊢ B``; the cut yields ``⊢ // ⊢ B``.
    """
    a = _single(d_a, "the minor premise")
    imp = _single(d_imp, "the major premise")
    if not isinstance(imp, Implies) or imp.left != a:
        raise ShapeError(f"{print_formula(imp)} is not an implication "
                         f"from {print_formula(a)}")
    left = admit_ew(d_a, 1)
    (right,) = invert_right(d_imp, T.ImpR1, 0, imp)
    cut = CutInstance(a, (0, 1), (0, 2))
    conclusion = cut_conclusion(left.conclusion, right.conclusion, cut)
    return build(conclusion, RuleInstance(T.Cut, cut=cut), [left, right])


def simulate_mp(d_a, d_imp):
    """
    Cut-free derivation of ``⊢ B`` from ``⊢ A`` and ``⊢ A -> B``.

    Raises
    ------
    ShapeError
    """
    d = admit_merge(eliminate_cut(mp_with_cut(d_a, d_imp)), 0)
    logger.info("modus ponens: %s", d.conclusion)
    return d


def simulate_gen(d_a, param, var=None, formula=None):
    """
    Derivation of ``⊢ forall x A`` from one of ``⊢ A[param/x]``.

    Parameters
    ----------
    d_a : Derivation
        Ends in one component; its consequent holds the instance and
        possibly side formulas, its antecedent is empty.
    param : Param or str
        Abstracted parameter; must not occur in the side formulas.
    var : str, optional
        Bound variable; the first of ``x, y, z`` not bound in the
        instance by default.
    formula : formula, optional
        The instance, needed when there are side formulas.

    Raises
    ------
    ShapeError, EigenvariableViolation
    """
    c = d_a.conclusion
    if len(c) != 1 or c[0].antecedent:
        raise ShapeError(f"generalization needs '|- A', not '{c}'")
    if formula is None:
        formula = _single(d_a, "the generalized derivation")
    name = _param_name(param)
    rest = c[0].remove(RIGHT, formula)
    if name in rest.params:
        raise EigenvariableViolation(name)
    var = var or unused_variable(formula)
    quantified = Forall(var, abstract_param(formula, name, var))
    moved = admit_lwr(admit_ew(d_a, 1), 0, formula)
    conclusion = Sequent([rest.add(consequent=[quantified])])
    return build(conclusion, rule(T.ForallR1, 0, RIGHT, quantified,
                                  eigen=Param(name)), [moved])


def _read(formula):
    return parse_formula(formula) if isinstance(formula, str) else formula


def hilbert_proof(steps):
    """
    Replay a Hilbert proof as derivations.

    Parameters
    ----------
    steps : list of dict
        ``{"axiom": schema, "formulas": [...], "witness": "#a"}``,
        ``{"mp": [i, j]}`` (step ``i`` proves ``A``, step ``j`` proves
        ``A -> B``) or ``{"gen": i, "param": "#a", "var": "x"}``.

    Returns
    -------
    derivations : list of Derivation
        One per step.
    """
    done = []
    for number, step in enumerate(steps):
        if "axiom" in step:
            d = prove_axiom(step["axiom"],
                            *map(_read, step.get("formulas", [])),
                            witness=step.get("witness"))
        elif "mp" in step:
            i, j = step["mp"]
            d = simulate_mp(done[i], done[j])
        elif "gen" in step:
            d = simulate_gen(done[step["gen"]], step["param"],
                             var=step.get("var"))
        else:
            raise ShapeError(f"step {number} is not an axiom, mp or gen: "
                             f"{step}")
        logger.debug("step %d: %s", number, d.conclusion)
        done.append(d)
    return done
