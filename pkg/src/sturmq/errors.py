"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the CLI reports
verbatim in its error JSON.
"""


class SturmError(Exception):
    code = "error"


class DomainError(SturmError, ValueError):
    code = "domain"


class SamplingError(SturmError, ValueError):
    code = "sampling"


class ShapeError(SturmError, ValueError):
    code = "shape"


class DegenerateInputError(SturmError, ValueError):
    code = "degenerate_input"


class DegenerateOperatorError(SturmError, ValueError):
    code = "degenerate_operator"


class PreconditionError(SturmError, ValueError):
    code = "precondition"


class GeometryError(SturmError, ValueError):
    code = "geometry"


class IntegrationError(SturmError, RuntimeError):
    code = "integration"


class SearchError(SturmError, RuntimeError):
    code = "search"


class ResolutionError(SturmError, RuntimeError):
    code = "resolution"


class ConfigError(SturmError, ValueError):
    code = "config"
