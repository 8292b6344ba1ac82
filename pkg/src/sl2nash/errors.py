"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """Input violates a documented precondition."""


class QuadratureError(RuntimeError):
    """Quadrature refinements disagree beyond the allowed factor."""


class FlowEscapeError(RuntimeError):
    """A numerically integrated flow left its containment ball."""


class ProviderError(RuntimeError):
    """An iteration provider was called outside its declared domain."""
