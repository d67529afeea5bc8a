"""
Terms, formulas, their concrete syntax and the basic symbolic operations.

Bound variables (:class:`Var`) and parameters (:class:`Param`) are
different types. Parameters print as ``#name``.

.. autosummary::
   ~Var
   ~Param
   ~Atom
   ~Bottom
   ~And
   ~Or
   ~Implies
   ~Forall
   ~Exists
   ~Signature
   ~parse_formula
   ~print_formula
   ~subst_var
   ~instantiate
   ~rename_param_formula
   ~formula_params
   ~free_vars
   ~complexity
   ~universal_closure
   ~fresh_param
   ~is_propositional
"""

# Copyright (c) 2020-2021, UChicago Argonne, LLC.
# See LICENSE file for details.

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import count
import logging

from lark import Lark, Transformer, v_args, exceptions

from .exceptions import (
    FormulaSyntaxError, ArityError, UnboundVariable, CaptureError
)

logger = logging.getLogger(__name__)

# entries kept by each memoized formula helper
CACHE_SIZE = 4096


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Param:
    name: str

    def __str__(self):
        return "#" + self.name


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Bottom:
    def __str__(self):
        return "bot"


@dataclass(frozen=True)
class And:
    left: object
    right: object

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Or:
    left: object
    right: object

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Implies:
    left: object
    right: object

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Forall:
    var: str
    body: object

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Exists:
    var: str
    body: object

    def __str__(self):
        return print_formula(self)


BINARY = (And, Or, Implies)
QUANTIFIERS = (Forall, Exists)


@dataclass(frozen=True)
class Signature:
    """
    Predicate arities.

    Predicates missing from ``arities`` are accepted with any arity, but
    one formula (or one sequent) must use each predicate consistently.
    """

    arities: dict = field(default_factory=dict)

    def check(self, formula, seen=None):
        """Raise :class:`ArityError` on a mismatch; return ``seen``."""
        seen = {} if seen is None else seen
        for pred, arity in _predicates(formula):
            expected = self.arities.get(pred, seen.get(pred))
            if expected is not None and expected != arity:
                raise ArityError(pred, expected, arity)
            seen[pred] = arity
        return seen

    @classmethod
    def from_formulas(cls, *formulas):
        seen = {}
        for formula in formulas:
            cls().check(formula, seen)
        return cls(seen)


_grammar = r"""
    start_formula: formula
    sequent: component ("//" component)*
    component: side "|-" side
    side: (formula ("," formula)*)?

    ?formula: implication
    ?implication: disjunction
        | disjunction "->" implication -> implies
        | quantified
    quantified: "forall" NAME "." formula -> forall
        | "exists" NAME "." formula -> exists
    ?disjunction: conjunction
        | disjunction "|" conjunction -> or_
    ?conjunction: unary
        | conjunction "&" unary -> and_
    ?unary: "~" unary -> neg
        | "bot" -> bottom
        | atom
        | "(" formula ")"
    atom: NAME ("(" term ("," term)* ")")?
    term: NAME -> var
        | PARAM -> param

    PARAM: /#[A-Za-z_][A-Za-z0-9_]*/
    %import common.CNAME -> NAME
    %import common.WS
    %ignore WS
"""


@v_args(inline=True)
class _ToSyntax(Transformer):
    def start_formula(self, formula):
        return formula

    def implies(self, left, right):
        return Implies(left, right)

    def or_(self, left, right):
        return Or(left, right)

    def and_(self, left, right):
        return And(left, right)

    def neg(self, formula):
        return Implies(formula, Bottom())

    def bottom(self):
        return Bottom()

    def forall(self, name, body):
        return Forall(str(name), body)

    def exists(self, name, body):
        return Exists(str(name), body)

    def atom(self, name, *terms):
        return Atom(str(name), tuple(terms))

    def var(self, name):
        return Var(str(name))

    def param(self, token):
        return Param(str(token)[1:])

    def side(self, *formulas):
        return tuple(formulas)

    def component(self, antecedent, consequent):
        return antecedent, consequent

    def sequent(self, *components):
        return tuple(components)


_parser = Lark(_grammar, start=["start_formula", "sequent"],
               parser="lalr", transformer=_ToSyntax())


def parse_text(text, start):
    """
    Run the grammar on ``text`` from the ``start`` symbol.

    Only syntax is checked here; see :func:`parse_formula`.
    """
    try:
        return _parser.parse(text, start=start)
    except exceptions.UnexpectedInput as err:
        position = getattr(err, "pos_in_stream", None)
        raise FormulaSyntaxError(
            f"cannot parse {text!r} at position {position}", position
        )
    except exceptions.LarkError as err:
        raise FormulaSyntaxError(f"cannot parse {text!r}: {err}")


def check_closed(formula):
    """Raise :class:`UnboundVariable` if a variable occurs free."""
    names = free_vars(formula)
    if names:
        raise UnboundVariable(sorted(names)[0])
    return formula


def parse_formula(text, sig=None):
    """
    Parse one closed formula.

    Parameters
    ----------
    text : str
        Grammar: atoms ``p``, ``p(x, #a)``; ``bot``; ``~A`` (read as
        ``A -> bot``); ``&`` binds tighter than ``|`` which binds tighter
        than the right-associative ``->``; ``forall x. A`` and
        ``exists x. A`` extend as far right as possible.
    sig : Signature, optional

    Returns
    -------
    formula : Atom, Bottom, And, Or, Implies, Forall or Exists

    Examples
    --------
    ``parse_formula("(p -> q) | (q -> p)")`` gives
    ``Or(Implies(p, q), Implies(q, p))`` with 0-ary atoms ``p`` and ``q``.
    """
    formula = parse_text(text, "start_formula")
    (sig or Signature()).check(formula)
    return check_closed(formula)


def _term(term):
    return str(term)


_precedence = {Implies: 1, Or: 2, And: 3}


def _level(formula):
    if isinstance(formula, QUANTIFIERS):
        return 0
    return _precedence.get(type(formula), 4)


def _wrap(formula, parens):
    text = print_formula(formula)
    return f"({text})" if parens else text


@lru_cache(maxsize=CACHE_SIZE)
def print_formula(formula):
    """
    Concrete syntax of ``formula``; the inverse of :func:`parse_formula`.
    """
    if isinstance(formula, Atom):
        if not formula.args:
            return formula.pred
        return f"{formula.pred}({', '.join(map(_term, formula.args))})"
    if isinstance(formula, Bottom):
        return "bot"
    if isinstance(formula, QUANTIFIERS):
        word = "forall" if isinstance(formula, Forall) else "exists"
        return f"{word} {formula.var}. {print_formula(formula.body)}"
    level = _precedence[type(formula)]
    symbol = {And: "&", Or: "|", Implies: "->"}[type(formula)]
    if isinstance(formula, Implies):
        left = _wrap(formula.left, _level(formula.left) <= level)
        right = print_formula(formula.right)
    else:
        left = _wrap(formula.left, _level(formula.left) < level)
        right = _wrap(formula.right, _level(formula.right) <= level)
    return f"{left} {symbol} {right}"


def _predicates(formula):
    if isinstance(formula, Atom):
        yield formula.pred, len(formula.args)
    elif isinstance(formula, BINARY):
        yield from _predicates(formula.left)
        yield from _predicates(formula.right)
    elif isinstance(formula, QUANTIFIERS):
        yield from _predicates(formula.body)


def predicates(formula):
    """Set of ``(predicate, arity)`` pairs used in ``formula``."""
    return frozenset(_predicates(formula))


@lru_cache(maxsize=CACHE_SIZE)
def free_vars(formula):
    """Names of variables occurring free in ``formula``."""
    if isinstance(formula, Atom):
        return frozenset(t.name for t in formula.args if isinstance(t, Var))
    if isinstance(formula, BINARY):
        return free_vars(formula.left) | free_vars(formula.right)
    if isinstance(formula, QUANTIFIERS):
        return free_vars(formula.body) - {formula.var}
    return frozenset()


@lru_cache(maxsize=CACHE_SIZE)
def bound_names(formula):
    """Names of variables bound somewhere in ``formula``."""
    if isinstance(formula, BINARY):
        return bound_names(formula.left) | bound_names(formula.right)
    if isinstance(formula, QUANTIFIERS):
        return bound_names(formula.body) | {formula.var}
    return frozenset()


@lru_cache(maxsize=CACHE_SIZE)
def formula_params(formula):
    """Names of the parameters occurring in ``formula``."""
    if isinstance(formula, Atom):
        return frozenset(
            t.name for t in formula.args if isinstance(t, Param)
        )
    if isinstance(formula, BINARY):
        return formula_params(formula.left) | formula_params(formula.right)
    if isinstance(formula, QUANTIFIERS):
        return formula_params(formula.body)
    return frozenset()


def subst_var(formula, x, term):
    """
    Replace the free occurrences of variable ``x`` by ``term``.

    Parameters
    ----------
    formula : formula
    x : str or Var
    term : Param or Var

    Raises
    ------
    CaptureError
        ``term`` is a variable that would be bound by a quantifier of
        ``formula``.
    """
    x = x.name if isinstance(x, Var) else x
    return _subst(formula, x, term)


def _subst(formula, x, term):
    if isinstance(formula, Atom):
        if not any(isinstance(t, Var) and t.name == x for t in formula.args):
            return formula
        return Atom(formula.pred, tuple(
            term if isinstance(t, Var) and t.name == x else t
            for t in formula.args
        ))
    if isinstance(formula, BINARY):
        return type(formula)(_subst(formula.left, x, term),
                             _subst(formula.right, x, term))
    if isinstance(formula, QUANTIFIERS):
        if formula.var == x or x not in free_vars(formula.body):
            return formula
        if isinstance(term, Var) and term.name == formula.var:
            raise CaptureError(
                f"'{term}' is not free for '{x}' in {print_formula(formula)}"
            )
        return type(formula)(formula.var, _subst(formula.body, x, term))
    return formula


def instantiate(formula, param):
    """Body of quantified ``formula`` with its variable set to ``param``."""
    if not isinstance(param, Param):
        param = Param(param)
    return subst_var(formula.body, formula.var, param)


def _param_name(param):
    return param.name if isinstance(param, Param) else str(param).lstrip("#")


def rename_param_formula(formula, a, b):
    """Replace every occurrence of parameter ``a`` by ``b``."""
    a, b = _param_name(a), _param_name(b)
    if a == b or a not in formula_params(formula):
        return formula
    return _replace_term(formula, Param(a), Param(b))


def _replace_term(formula, old, new):
    if isinstance(formula, Atom):
        return Atom(formula.pred,
                    tuple(new if t == old else t for t in formula.args))
    if isinstance(formula, BINARY):
        return type(formula)(_replace_term(formula.left, old, new),
                             _replace_term(formula.right, old, new))
    if isinstance(formula, QUANTIFIERS):
        return type(formula)(formula.var,
                             _replace_term(formula.body, old, new))
    return formula


@lru_cache(maxsize=CACHE_SIZE)
def complexity(formula):
    """Number of connectives and quantifiers; atoms and ``bot`` count 0."""
    if isinstance(formula, BINARY):
        return 1 + complexity(formula.left) + complexity(formula.right)
    if isinstance(formula, QUANTIFIERS):
        return 1 + complexity(formula.body)
    return 0


def _params_in_order(formula, found):
    if isinstance(formula, Atom):
        for t in formula.args:
            if isinstance(t, Param) and t.name not in found:
                found.append(t.name)
    elif isinstance(formula, BINARY):
        _params_in_order(formula.left, found)
        _params_in_order(formula.right, found)
    elif isinstance(formula, QUANTIFIERS):
        _params_in_order(formula.body, found)
    return found


def universal_closure(formula):
    """
    Abstract every parameter into an outer universal quantifier.

    Parameters are taken in order of first occurrence; the new variables
    are ``x0, x1, ...`` skipping names already bound in ``formula``.
    """
    order = _params_in_order(formula, [])
    taken = bound_names(formula)
    names = (f"x{i}" for i in count())
    variables = []
    for param in order:
        name = next(n for n in names if n not in taken)
        variables.append(name)
        formula = _replace_term(formula, Param(param), Var(name))
    for name in reversed(variables):
        formula = Forall(name, formula)
    return formula


def fresh_param(avoid=()):
    """
    Smallest parameter ``#a<i>`` whose name is not in ``avoid``.

    Parameters
    ----------
    avoid : iterable of str or Param
    """
    avoid = {_param_name(p) for p in avoid}
    return next(Param(f"a{i}") for i in count() if f"a{i}" not in avoid)


def is_propositional(formula):
    """True when ``formula`` has no quantifier and only 0-ary atoms."""
    if isinstance(formula, Atom):
        return not formula.args
    if isinstance(formula, BINARY):
        return is_propositional(formula.left) and \
            is_propositional(formula.right)
    return isinstance(formula, Bottom)


def formula_key(formula):
    """Sort key of formulas inside multisets."""
    return print_formula(formula)


def substitute_params(formula, mapping):
    """Rename parameters simultaneously, ``mapping`` from name to name."""
    if not mapping or not formula_params(formula) & mapping.keys():
        return formula
    return _map_params(formula, mapping)


def _map_params(formula, mapping):
    if isinstance(formula, Atom):
        return Atom(formula.pred, tuple(
            Param(mapping.get(t.name, t.name)) if isinstance(t, Param) else t
            for t in formula.args
        ))
    if isinstance(formula, BINARY):
        return type(formula)(_map_params(formula.left, mapping),
                             _map_params(formula.right, mapping))
    if isinstance(formula, QUANTIFIERS):
        return type(formula)(formula.var, _map_params(formula.body, mapping))
    return formula


def abstract_param(formula, param, var):
    """Replace parameter ``param`` by the variable ``var``."""
    var = var.name if isinstance(var, Var) else var
    if var in bound_names(formula):
        raise CaptureError(f"'{var}' is bound in {print_formula(formula)}")
    return _replace_term(formula, Param(_param_name(param)), Var(var))


def unused_variable(formula, candidates=("x", "y", "z")):
    """First variable name not bound anywhere in ``formula``."""
    taken = bound_names(formula)
    for name in candidates:
        if name not in taken:
            return name
    return next(f"x{i}" for i in count() if f"x{i}" not in taken)
