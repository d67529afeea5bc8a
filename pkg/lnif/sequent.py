"""
Linear nested sequents: components, text form, interpretation and splice.

Component indices are 0-based.

.. autosummary::
   ~Component
   ~Sequent
   ~parse_sequent
   ~print_sequent
   ~interpret
   ~splice
   ~is_valid_interp
   ~rename_param_sequent
   ~renaming_key
"""

# Copyright (c) 2020-2021, UChicago Argonne, LLC.
# See LICENSE file for details.

from dataclasses import dataclass
from functools import cached_property, reduce

from .exceptions import PositionError
from .syntax import (
    And, Or, Implies, Bottom, Signature, parse_text, check_closed,
    formula_key, formula_params, rename_param_formula, substitute_params,
    universal_closure, print_formula, _params_in_order
)

LEFT, RIGHT = "L", "R"


def _sorted(formulas):
    return tuple(sorted(formulas, key=formula_key))


@dataclass(frozen=True)
class Component:
    """
    One ``Γ ⊢ Δ`` slot.

    Both sides are multisets, stored as tuples in canonical order so that
    ``==`` is multiset equality.
    """

    antecedent: tuple = ()
    consequent: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "antecedent", _sorted(self.antecedent))
        object.__setattr__(self, "consequent", _sorted(self.consequent))

    def side(self, side):
        return self.antecedent if side == LEFT else self.consequent

    def count(self, side, formula):
        return self.side(side).count(formula)

    def add(self, antecedent=(), consequent=()):
        return Component(self.antecedent + tuple(antecedent),
                         self.consequent + tuple(consequent))

    def add_side(self, side, formulas):
        if side == LEFT:
            return self.add(antecedent=formulas)
        return self.add(consequent=formulas)

    def remove(self, side, formula, times=1):
        """Drop ``times`` occurrences of ``formula`` from ``side``."""
        items = list(self.side(side))
        for _ in range(times):
            if formula not in items:
                raise PositionError(
                    f"{print_formula(formula)} does not occur on side "
                    f"{side} of '{self}'"
                )
            items.remove(formula)
        if side == LEFT:
            return Component(items, self.consequent)
        return Component(self.antecedent, items)

    def union(self, other):
        return self.add(other.antecedent, other.consequent)

    def difference(self, other):
        """Multiset difference, side by side; ``None`` if not contained."""
        result = self
        for side in (LEFT, RIGHT):
            for formula in other.side(side):
                if formula not in result.side(side):
                    return None
                result = result.remove(side, formula)
        return result

    def is_empty(self):
        return not self.antecedent and not self.consequent

    def map(self, function):
        return Component(tuple(map(function, self.antecedent)),
                         tuple(map(function, self.consequent)))

    @cached_property
    def params(self):
        return frozenset().union(
            *map(formula_params, self.antecedent + self.consequent)
        )

    def __str__(self):
        left = ", ".join(map(print_formula, self.antecedent))
        right = ", ".join(map(print_formula, self.consequent))
        return f"{left + ' ' if left else ''}|-{' ' + right if right else ''}"


@dataclass(frozen=True)
class Sequent:
    """Non-empty tuple of components, ``G1 // ... // Gn``."""

    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise PositionError("a sequent has at least one component")

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, index):
        return self.components[index]

    def __str__(self):
        return print_sequent(self)

    def check_index(self, index):
        if not 0 <= index < len(self.components):
            raise PositionError(
                f"component {index} does not exist in a sequent of "
                f"length {len(self.components)}", index
            )
        return index

    def replace(self, index, component):
        self.check_index(index)
        return Sequent(self.components[:index] + (component,)
                       + self.components[index + 1:])

    def insert(self, index, component=None):
        if not 0 <= index <= len(self.components):
            raise PositionError(f"cannot insert a component at {index}",
                                index)
        return Sequent(self.components[:index] + (component or Component(),)
                       + self.components[index:])

    def delete(self, index):
        self.check_index(index)
        return Sequent(self.components[:index]
                       + self.components[index + 1:])

    def add(self, index, side, formulas):
        return self.replace(index, self[self.check_index(index)]
                            .add_side(side, formulas))

    def remove(self, index, side, formula, times=1):
        return self.replace(index, self[self.check_index(index)]
                            .remove(side, formula, times))

    def count(self, index, side, formula):
        return self[self.check_index(index)].count(side, formula)

    def merge(self, index):
        """Fuse components ``index`` and ``index + 1``."""
        self.check_index(index + 1)
        fused = self[index].union(self[index + 1])
        return Sequent(self.components[:index] + (fused,)
                       + self.components[index + 2:])

    def map(self, function):
        return Sequent(tuple(c.map(function) for c in self.components))

    @cached_property
    def params(self):
        return frozenset().union(*(c.params for c in self.components))

    def formulas(self):
        """All ``(index, side, formula)`` occurrences, in canonical order."""
        for index, component in enumerate(self.components):
            for side in (LEFT, RIGHT):
                for formula in component.side(side):
                    yield index, side, formula


def parse_sequent(text, sig=None):
    """
    Parse ``Γ |- Δ // Γ2 |- Δ2 // ...``.

    Sides are comma separated formula lists, possibly empty.

    Returns
    -------
    sequent : Sequent
    """
    raw = parse_text(text, "sequent")
    sig = sig or Signature()
    seen = {}
    components = []
    for antecedent, consequent in raw:
        for formula in antecedent + consequent:
            sig.check(formula, seen)
            check_closed(formula)
        components.append(Component(antecedent, consequent))
    return Sequent(components)


def print_sequent(sequent):
    return " // ".join(map(str, sequent.components))


def _big_and(formulas):
    if not formulas:
        return Implies(Bottom(), Bottom())
    return reduce(And, formulas)


def _big_or(formulas):
    if not formulas:
        return Bottom()
    return reduce(Or, formulas)


def interpret(sequent):
    """
    Formula interpretation of a sequent.

    ``Γ ⊢ Δ`` reads ``⋀Γ ⊃ ⋁Δ`` and ``Γ ⊢ Δ // G`` reads
    ``⋀Γ ⊃ (⋁Δ ∨ ι(G))``. An empty conjunction is ``bot -> bot``, an
    empty disjunction is ``bot``; both fold left in canonical order.
    """
    *head, last = sequent.components
    result = Implies(_big_and(last.antecedent), _big_or(last.consequent))
    for component in reversed(head):
        result = Implies(_big_and(component.antecedent),
                         Or(_big_or(component.consequent), result))
    return result


def splice(first, second):
    """
    Componentwise union; the tail of the longer sequent is kept as is.

    ``len(splice(g, h)) == max(len(g), len(h))``.
    """
    short = min(len(first), len(second))
    fused = tuple(a.union(b) for a, b in zip(first, second))
    longer = first if len(first) >= len(second) else second
    return Sequent(fused + longer.components[short:])


def is_valid_interp(sequent):
    """Universal closure of :func:`interpret`; valid iff the sequent is."""
    return universal_closure(interpret(sequent))


def rename_param_sequent(sequent, a, b):
    return sequent.map(lambda f: rename_param_formula(f, a, b))


def renaming_key(sequent):
    """
    Text of ``sequent`` with parameters renamed by first occurrence.

    Two sequents with the same key differ only by a renaming of
    parameters.
    """
    order = []
    for _, _, formula in sequent.formulas():
        _params_in_order(formula, order)
    mapping = {name: f"_{i}" for i, name in enumerate(order)}
    return print_sequent(sequent.map(
        lambda f: substitute_params(f, mapping)))
