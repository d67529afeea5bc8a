"""
Finite linear Kripke models with constant domains and the Goedel chain
oracle.

Worlds are numbered ``1 .. m`` and ordered by their number. A model file
reads::

    worlds: 2; domain: #a, #b; p@1: (#a); p@2: (#a), (#b); q@2: true

.. autosummary::
   ~KripkeModel
   ~evaluate
   ~globally_true
   ~check_persistence
   ~find_countermodel
   ~count_monotone_valuations
   ~monotone_valuations
   ~goedel_valid
   ~parse_model
   ~format_model
   ~load_model
   ~model_table
"""

# Copyright (c) 2020-2021, UChicago Argonne, LLC.
# See LICENSE file for details.

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
import logging

from lark import Lark, Transformer, v_args, exceptions
import numpy as np
from pyRestTable import Table

from .exceptions import (
    ModelError, NonMonotoneModel, UnknownParameter, NotPropositional,
    FormulaSyntaxError
)
from .syntax import (
    Atom, Bottom, And, Or, Implies, Forall, Exists, Param, instantiate,
    universal_closure, predicates, is_propositional, print_formula
)

logger = logging.getLogger(__name__)


@dataclass
class KripkeModel:
    """
    Linear frame ``1 < 2 < ... < worlds`` with one shared domain.

    Parameters
    ----------
    worlds : int
        Number of worlds, at least 1.
    domain : sequence of str
        Parameter names, without ``#``.
    valuation : dict
        ``(predicate, world) -> set of argument tuples``. A true 0-ary
        atom holds the empty tuple.
    check : bool
        Refuse valuations that shrink along the order.
    """

    worlds: int
    domain: tuple
    valuation: dict = field(default_factory=dict)
    check: bool = True

    def __post_init__(self):
        if self.worlds < 1:
            raise ModelError(f"a model needs at least one world, got "
                             f"{self.worlds}")
        self.domain = tuple(str(d).lstrip("#") for d in self.domain)
        if not self.domain:
            raise ModelError("the domain must not be empty")
        valuation = {}
        for (pred, world), tuples in self.valuation.items():
            if not 1 <= world <= self.worlds:
                raise ModelError(f"world {world} does not exist")
            tuples = frozenset(tuple(str(a).lstrip("#") for a in t)
                               for t in tuples)
            for t in tuples:
                missing = [a for a in t if a not in self.domain]
                if missing:
                    raise UnknownParameter(missing[0])
            if tuples:
                valuation[(pred, world)] = tuples
        self.valuation = valuation
        if self.check and not self.is_monotone():
            raise NonMonotoneModel(
                f"valuation shrinks along the order: {format_model(self)}")

    def true_at(self, pred, world):
        return self.valuation.get((pred, world), frozenset())

    def predicates(self):
        return sorted({pred for pred, _ in self.valuation})

    def is_monotone(self):
        for pred in self.predicates():
            for w in range(1, self.worlds):
                if not self.true_at(pred, w) <= self.true_at(pred, w + 1):
                    return False
        return True


class _Evaluation:
    """Memoized satisfaction on one model."""

    def __init__(self, model):
        self.model = model
        self.memo = {}

    def __call__(self, w, f):
        key = (w, f)
        if key not in self.memo:
            self.memo[key] = self._holds(w, f)
        return self.memo[key]

    def _holds(self, w, f):
        m = self.model
        later = range(w, m.worlds + 1)
        if isinstance(f, Atom):
            args = []
            for t in f.args:
                if not isinstance(t, Param):
                    raise UnknownParameter(str(t))
                if t.name not in m.domain:
                    raise UnknownParameter(t.name)
                args.append(t.name)
            return tuple(args) in m.true_at(f.pred, w)
        if isinstance(f, Bottom):
            return False
        if isinstance(f, And):
            return self(w, f.left) and self(w, f.right)
        if isinstance(f, Or):
            return self(w, f.left) or self(w, f.right)
        if isinstance(f, Implies):
            return all(not self(u, f.left) or self(u, f.right)
                       for u in later)
        if isinstance(f, Forall):
            return all(self(u, instantiate(f, d))
                       for u in later for d in m.domain)
        if isinstance(f, Exists):
            return any(self(w, instantiate(f, d)) for d in m.domain)
        raise TypeError(f"not a formula: {f!r}")


def _world(model, w):
    if not 1 <= w <= model.worlds:
        raise ModelError(f"world {w} does not exist in a model with "
                         f"{model.worlds} worlds")
    return w


def evaluate(model, w, formula):
    """
    ``model, w ⊩ formula``.

    Parameters
    ----------
    model : KripkeModel
    w : int
        World, 1-based.
    formula : formula
        Closed, with every parameter in the domain.

    Raises
    ------
    UnknownParameter
    """
    return _Evaluation(model)(_world(model, w), formula)


def globally_true(model, formula):
    """The universal closure of ``formula`` holds at every world."""
    closed = universal_closure(formula)
    holds = _Evaluation(model)
    return all(holds(w, closed) for w in range(1, model.worlds + 1))


def check_persistence(model, formula):
    """True iff truth of ``formula`` is preserved upward."""
    holds = _Evaluation(model)
    for w in range(1, model.worlds + 1):
        if holds(w, formula):
            if not all(holds(u, formula)
                       for u in range(w + 1, model.worlds + 1)):
                return False
    return True


def _ground_atoms(signature, domain):
    atoms = []
    for pred, arity in sorted(signature):
        for args in product(domain, repeat=arity):
            atoms.append((pred, args))
    return atoms


def count_monotone_valuations(worlds, domain_size, arities):
    """
    Number of monotone valuations on a chain of ``worlds`` worlds.

    Each ground atom becomes true at some world and stays true, or never
    holds: ``(worlds + 1) ** (number of ground atoms)``.
    """
    ground = sum(domain_size ** a for a in arities)
    return (worlds + 1) ** ground


def monotone_valuations(worlds, domain, signature):
    """
    Every monotone valuation, each exactly once.

    Ground atoms are listed by predicate and arguments; each one gets the
    first world where it holds (``worlds + 1`` for never). Valuations come
    in lexicographic order of these choices, never-true first.
    """
    atoms = _ground_atoms(signature, domain)
    choices = range(worlds + 1, 0, -1)
    for firsts in product(choices, repeat=len(atoms)):
        valuation = {}
        for (pred, args), first in zip(atoms, firsts):
            for w in range(first, worlds + 1):
                valuation.setdefault((pred, w), set()).add(args)
        yield valuation


def find_countermodel(formula, max_worlds=3, max_domain=2):
    """
    Smallest model (then world) refuting the closure of ``formula``.

    Parameters
    ----------
    formula : formula
    max_worlds : int
    max_domain : int

    Returns
    -------
    (model, world) or None

    Raises
    ------
    ModelError
        If either bound is below 1.
    """
    if max_worlds < 1 or max_domain < 1:
        raise ModelError(f"bounds must be positive, got {max_worlds} worlds "
                         f"and domain size {max_domain}")
    closed = universal_closure(formula)
    signature = predicates(closed)
    for worlds in range(1, max_worlds + 1):
        for size in range(1, max_domain + 1):
            domain = tuple(f"d{i}" for i in range(1, size + 1))
            tried = 0
            for valuation in monotone_valuations(worlds, domain, signature):
                tried += 1
                model = KripkeModel(worlds, domain, valuation, check=False)
                holds = _Evaluation(model)
                for w in range(1, worlds + 1):
                    if not holds(w, closed):
                        logger.info("countermodel for %s: %s, world %d",
                                    print_formula(formula),
                                    format_model(model), w)
                        return model, w
            logger.debug("%d worlds, domain %d: %d models, none refutes",
                         worlds, size, tried)
    return None


def _atom_names(formula, found):
    if isinstance(formula, Atom):
        if formula.pred not in found:
            found.append(formula.pred)
    elif isinstance(formula, (And, Or, Implies)):
        _atom_names(formula.left, found)
        _atom_names(formula.right, found)
    return found


def _chain_value(formula, env, top):
    if isinstance(formula, Atom):
        return env[formula.pred]
    if isinstance(formula, Bottom):
        return np.zeros((), dtype=int)
    left = _chain_value(formula.left, env, top)
    right = _chain_value(formula.right, env, top)
    if isinstance(formula, And):
        return np.minimum(left, right)
    if isinstance(formula, Or):
        return np.maximum(left, right)
    return np.where(left <= right, top, right)


def goedel_valid(formula):
    """
    Validity on the Goedel chain with ``#atoms + 2`` degrees.

    Degrees are ``0, 1/k, ..., 1`` with ``k = #atoms + 1``; conjunction is
    min, disjunction max, ``a -> b`` is 1 if ``a <= b`` and ``b``
    otherwise.

    Returns
    -------
    valid : bool
    witness : dict or None
        Atom name to :class:`fractions.Fraction` degree for the first
        falsifying assignment.

    Raises
    ------
    NotPropositional
    """
    if not is_propositional(formula):
        raise NotPropositional(
            f"{print_formula(formula)} has quantifiers or predicates with "
            f"arguments")
    names = _atom_names(formula, [])
    top = len(names) + 1
    degrees = np.arange(top + 1)
    grids = np.meshgrid(*([degrees] * len(names)), indexing="ij")
    env = dict(zip(names, grids))
    shape = (top + 1,) * len(names)
    values = np.broadcast_to(_chain_value(formula, env, top), shape)
    bad = np.argwhere(values < top)
    if not len(bad):
        return True, None
    first = bad[0]
    return False, {name: Fraction(int(first[i]), top)
                   for i, name in enumerate(names)}


_grammar = r"""
start: _sep? entry (_sep entry)* _sep?
_sep: _SEP+
entry: "worlds" ":" INT                      -> worlds
     | "domain" ":" PARAM ("," PARAM)*       -> domain
     | NAME "@" INT ":" value                -> fact
value: "true"                                -> true
     | "false"                               -> false
     | tuple ("," tuple)*                    -> tuples
tuple: "(" [PARAM ("," PARAM)*] ")"

PARAM: /#?[A-Za-z_][A-Za-z0-9_]*/
NAME: /[A-Za-z_][A-Za-z0-9_]*/
_SEP: ";" | /\n/
%import common.INT
%ignore /[ \t\r]+/
"""


@v_args(inline=True)
class _ToModel(Transformer):
    def worlds(self, number):
        return "worlds", int(number)

    def domain(self, *names):
        return "domain", [str(n).lstrip("#") for n in names]

    def fact(self, name, world, value):
        return "fact", (str(name), int(world), value)

    def true(self):
        return {()}

    def false(self):
        return set()

    def tuples(self, *tuples):
        return set(tuples)

    def tuple(self, *names):
        return tuple(str(n).lstrip("#") for n in names if n is not None)

    def start(self, *entries):
        return list(entries)


_model_parser = Lark(_grammar, parser="lalr", transformer=_ToModel())


def parse_model(text, check=True):
    """
    Read the model text format.

    Omitted facts are empty; ``worlds`` defaults to the largest world
    mentioned and ``domain`` to the parameters mentioned.

    Raises
    ------
    FormulaSyntaxError, NonMonotoneModel
    """
    try:
        entries = _model_parser.parse(text)
    except exceptions.UnexpectedInput as err:
        raise FormulaSyntaxError(f"bad model text: {err}",
                                 getattr(err, "pos_in_stream", None))
    worlds, domain, valuation = None, None, {}
    for kind, value in entries:
        if kind == "worlds":
            worlds = value
        elif kind == "domain":
            domain = value
        else:
            pred, world, tuples = value
            valuation.setdefault((pred, world), set()).update(tuples)
    if worlds is None:
        worlds = max((w for _, w in valuation), default=1)
    if domain is None:
        domain = sorted({a for tuples in valuation.values()
                         for t in tuples for a in t}) or ["a"]
    return KripkeModel(worlds, domain, valuation, check=check)


def load_model(path, check=True):
    with open(path, encoding="utf-8") as f:
        return parse_model(f.read(), check=check)


def format_model(model):
    """Text form read back by :func:`parse_model`."""
    parts = [f"worlds: {model.worlds}",
             "domain: " + ", ".join(f"#{d}" for d in model.domain)]
    for (pred, world) in sorted(model.valuation):
        tuples = model.valuation[(pred, world)]
        if tuples == {()}:
            parts.append(f"{pred}@{world}: true")
        else:
            shown = ", ".join(
                "(" + ", ".join(f"#{a}" for a in t) + ")"
                for t in sorted(tuples))
            parts.append(f"{pred}@{world}: {shown}")
    return "; ".join(parts)


def model_table(model, table_fmt="simple", printing=True):
    """
    Ground atoms against worlds, ``x`` where the atom holds.

    Parameters
    ----------
    model : KripkeModel
    table_fmt : str
        Any format accepted by ``pyRestTable.Table.reST``.
    printing : bool
        Print the table.

    Returns
    -------
    table : pyRestTable.Table
    """
    table = Table()
    table.labels = ["atom"] + [f"w{w}" for w in range(1, model.worlds + 1)]
    atoms = sorted({(pred, t) for (pred, _), tuples in model.valuation.items()
                    for t in tuples})
    for pred, args in atoms:
        name = pred + ("(" + ", ".join(f"#{a}" for a in args) + ")"
                       if args else "")
        table.rows.append([name] + [
            "x" if args in model.true_at(pred, w) else ""
            for w in range(1, model.worlds + 1)])
    if printing:
        print(table.reST(fmt=table_fmt))
    return table
