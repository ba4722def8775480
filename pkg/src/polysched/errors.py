"""Exception hierarchy shared across the package."""


class PolyschedError(Exception):
    """Base class for all errors raised by this package."""


# ---- model / serialization ----

class SchemaError(PolyschedError):
    """Input document does not match the expected JSON schema."""


class DimensionMismatch(SchemaError):
    """A row has the wrong width for its declared column layout."""


class BadInitialSchedule(SchemaError):
    """An initial schedule is not in 2k+1 form."""


class IncompleteSchedule(PolyschedError):
    """A schedule does not cover every statement of the program."""


class UnsupportedAccess(PolyschedError):
    """An access subscript is not an affine row."""


# ---- exact math ----

class SingularGram(PolyschedError):
    """The Gram matrix H*H^T is singular (rows linearly dependent)."""


# ---- configuration ----

class ConfigError(PolyschedError):
    """Base class for configuration problems."""


class UnknownCost(ConfigError):
    """A cost-function name is neither built in nor a declared variable."""


class BadGroup(ConfigError):
    """Fusion/distribution groups overlap or reference bad statements."""


class ConflictingPlan(ConfigError):
    """A statement is both fused and distributed at the same dimension."""


class ParseError(ConfigError):
    """A constraint expression does not match the grammar."""


class UnknownSymbol(ParseError):
    """A constraint symbol references a missing statement/iterator/variable."""


class NonAffine(ParseError):
    """A constraint expression is not affine."""


# ---- scheduling ----

class ConfigInfeasible(PolyschedError):
    """Custom constraints or forced fusion left no legal schedule dimension."""


class IllegalDistribution(PolyschedError):
    """A distribution ordering places a dependence target before its source."""


class FullyScheduledStatement(PolyschedError):
    """Progression requested for a statement whose rank already equals its depth."""


class NonRectangularDomain(PolyschedError):
    """Per-iterator trip counts cannot be extracted from the domain."""


# ---- post-processing ----

class NotABand(PolyschedError):
    """A tiling spec refers to a band index that does not exist."""


class BandNotTilable(PolyschedError):
    """The referenced band is too narrow to tile."""


class NotApplicable(PolyschedError):
    """Wavefront skewing preconditions are not met."""


# ---- verification ----

class UnboundedDomain(PolyschedError):
    """A statement domain is unbounded under the given parameter values."""


class BudgetExceeded(PolyschedError):
    """Enumeration would visit more points than the configured budget."""
