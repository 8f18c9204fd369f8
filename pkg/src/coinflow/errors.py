"""Exception hierarchy shared across the package."""


class CoinflowError(Exception):
    """Base class for all errors raised by coinflow."""


class GraphError(CoinflowError):
    """Base class for graph construction errors."""


class InvalidSizeError(GraphError):
    """Vertex count too small for the requested topology."""


class MalformedEdgeError(GraphError):
    """Self-loop, duplicate edge, or endpoint out of range."""


class EmptyEdgeSetError(GraphError):
    """Graph has no edges; the dynamics are undefined."""


class ConnectivityError(GraphError):
    """Graph is not connected."""


class InvalidStateError(CoinflowError):
    """A money configuration violates the model invariants."""


class InvariantBreachError(CoinflowError):
    """A runtime invariant (conservation, bank identity) was violated."""


class CapacityError(CoinflowError):
    """Requested instance exceeds a practicality cap."""


class InsufficientDataError(CoinflowError):
    """Not enough samples or support points for the requested estimate."""


class DegenerateParameterError(CoinflowError):
    """Parameter value outside the formula's domain (e.g. rho = 0)."""


class NoUniqueStationaryError(CoinflowError):
    """Transition matrix is reducible; stationary vector not unique."""
