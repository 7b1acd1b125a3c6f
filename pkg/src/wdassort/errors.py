"""Exception types shared across the package."""


class WdassortError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(WdassortError, ValueError):
    """Invalid graph input: self-loop, non-positive weight, bad vertex id."""


class FeatureError(WdassortError, ValueError):
    """Feature column or table that does not match the graph."""


class ConfigError(WdassortError, ValueError):
    """Generator or rewiring configuration outside its valid range."""


class DegenerateGraphError(WdassortError, ValueError):
    """The graph has no edges (total weight zero)."""


class DegenerateVarianceError(WdassortError, ValueError):
    """A source or target feature has zero weighted variance."""

    def __init__(self, message, side=None):
        super().__init__(message)
        self.side = side


class InfeasibleTargetError(WdassortError, ValueError):
    """No link distribution with entries in [0, 1] reaches the target assortativity."""


class SolverError(WdassortError, RuntimeError):
    """The quadratic program did not converge although it is feasible."""


class CsvFormatError(WdassortError, ValueError):
    """Malformed CSV input; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
