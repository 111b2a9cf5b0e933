"""Exception hierarchy shared by all objper modules."""


class ObjperError(Exception):
    """Base class for every error raised by objper."""


class InputError(ObjperError, ValueError):
    """Invalid user-supplied data or arguments (CLI exit code 2)."""


class NumericalError(ObjperError, ArithmeticError):
    """A numerical procedure failed (CLI exit code 3)."""


class DimensionError(InputError):
    pass


class InvalidPointError(InputError):
    pass


class InvalidCompositionError(InvalidPointError):
    pass


class InvalidAdjacencyError(InputError):
    pass


class DegenerateWeightsError(InputError):
    pass


class InvalidRegularizerError(InputError):
    pass


class ParseError(InputError):
    """Malformed input file. ``row`` is 1-based when known."""

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class ValidationError(InputError):
    """A parsed object violates a named invariant."""

    def __init__(self, message, invariant=None):
        if invariant is not None:
            message = f"{message} [invariant: {invariant}]"
        super().__init__(message)
        self.invariant = invariant


class DegenerateConfigurationError(NumericalError):
    """The weighted extrinsic mean vanishes, so the spherical mean is not unique."""


class ZeroRSSError(NumericalError):
    """log-RSS criterion evaluated at a candidate with zero residual sum of squares."""


class ConvergenceError(NumericalError):
    """Iterative barycenter solver hit its iteration cap.

    Attributes
    ----------
    last_iterate : ndarray
        The final iterate.
    gap : float
        Norm of the Riemannian gradient at ``last_iterate``, an upper-bound
        proxy for the remaining objective gap.
    context : dict
        Where the failure occurred (e.g. ``{"theta": 12, "phase": 3}``).
    """

    def __init__(self, message, last_iterate=None, gap=float("nan"), context=None):
        self.last_iterate = last_iterate
        self.gap = gap
        self.context = dict(context or {})
        if self.context:
            message = f"{message} ({', '.join(f'{k}={v}' for k, v in self.context.items())})"
        super().__init__(message)

    def with_context(self, **context):
        merged = {**self.context, **context}
        base = str(self).split(" (")[0]
        return ConvergenceError(base, self.last_iterate, self.gap, merged)
