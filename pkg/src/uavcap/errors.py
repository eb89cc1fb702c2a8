"""Exception hierarchy.

``ValueError`` is used for bad arguments (usage errors); everything deriving
from :class:`NumericalError` signals a numerical failure on valid input.
"""


class NumericalError(ArithmeticError):
    """A computation failed on otherwise valid input."""


class QuadratureError(NumericalError):
    pass


class NotPositiveDefiniteError(NumericalError):
    pass


class BracketError(NumericalError):
    pass
