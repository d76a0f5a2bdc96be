"""Exception types shared across the package."""


class GraphError(ValueError):
    """Invalid graph structure or generator parameters."""


class ParseError(GraphError):
    """Malformed edge-list or JSON input."""


class CircuitError(ValueError):
    """Malformed gate, circuit file, or layout mismatch."""


class CapacityError(RuntimeError):
    """The requested register exceeds the configured qubit budget."""
