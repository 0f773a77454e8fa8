class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ToleranceError(ValueError):
    """Requested accuracy is below what double precision can deliver."""


class PoleError(ZeroDivisionError):
    """Evaluation requested at the pole s = 1."""


class IncompleteScanError(RuntimeError):
    """Zero scan could not reconcile its count; ``partial`` holds what was found."""

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class ResolutionError(ValueError):
    """Sampling step too coarse to unwrap a phase."""
