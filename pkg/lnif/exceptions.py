"""
Errors raised by lnif.

Every error is a ``ValueError`` so code written against plain
``ValueError`` keeps working.

.. autosummary::
   ~LNIFError
   ~FormulaSyntaxError
   ~ArityError
   ~UnboundVariable
   ~CaptureError
   ~UnknownParameter
   ~SchemaMismatch
   ~EigenvariableViolation
   ~PositionError
   ~CutAlignmentError
   ~NotApplicable
   ~ShapeError
   ~NotWithCutValid
   ~NotPropositional
   ~ModelError
   ~NonMonotoneModel
   ~ProofSearchFailure
   ~DepthExceeded
   ~Saturated
   ~ConfigError
"""

# Copyright (c) 2020-2021, UChicago Argonne, LLC.
# See LICENSE file for details.


class LNIFError(ValueError):
    """Base class of all lnif errors."""


class FormulaSyntaxError(LNIFError):
    """
    Text does not follow the formula or sequent grammar.

    Parameters
    ----------
    message : str
    position : int, optional
        Character offset of the offending token.
    """

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class ArityError(LNIFError):
    def __init__(self, pred, expected, found):
        super().__init__(
            f"predicate '{pred}' used with {found} arguments, "
            f"expected {expected}"
        )
        self.pred = pred


class UnboundVariable(LNIFError):
    def __init__(self, name):
        super().__init__(f"variable '{name}' is not bound by a quantifier")
        self.name = name


class CaptureError(LNIFError):
    pass


class UnknownParameter(LNIFError):
    def __init__(self, param):
        super().__init__(f"parameter '#{param}' is not in the model domain")
        self.param = param


class _NodeError(LNIFError):
    """Checker error that remembers where in the tree it happened."""

    def __init__(self, message, path=()):
        super().__init__(message)
        self.path = tuple(path)

    def at(self, path):
        self.path = tuple(path)
        return self

    def __str__(self):
        text = super().__str__()
        if self.path:
            text += f" (at premise path {'.'.join(map(str, self.path))})"
        return text


class SchemaMismatch(_NodeError):
    pass


class EigenvariableViolation(_NodeError):
    def __init__(self, param, path=()):
        super().__init__(
            f"eigenvariable '#{param}' occurs in the conclusion", path
        )
        self.param = param


class PositionError(_NodeError):
    def __init__(self, message, index=None, path=()):
        super().__init__(message, path)
        self.index = index


class CutAlignmentError(_NodeError):
    pass


class NotApplicable(LNIFError):
    pass


class ShapeError(LNIFError):
    pass


class NotWithCutValid(LNIFError):
    pass


class NotPropositional(LNIFError):
    pass


class ModelError(LNIFError):
    """A Kripke model whose shape is impossible."""


class NonMonotoneModel(LNIFError):
    pass


class ProofSearchFailure(LNIFError):
    """
    Proof search gave up.

    Attributes
    ----------
    reason : str
        ``'depth'`` or ``'saturated'``.
    sequent : lnif.sequent.Sequent or None
        An open leaf on which the search stopped.
    loop : bool
        The leaf repeats one of its ancestors, so the failure holds only
        on that branch.
    """

    reason = None

    def __init__(self, message, sequent=None, loop=False):
        super().__init__(message)
        self.sequent = sequent
        self.loop = loop


class DepthExceeded(ProofSearchFailure):
    reason = "depth"


class Saturated(ProofSearchFailure):
    reason = "saturated"


class ConfigError(LNIFError):
    pass
