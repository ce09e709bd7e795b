"""Domain errors shared by all planeval modules.

Every recoverable failure carries a stable ``code`` so the CLI can emit a
single machine-readable error line and callers can branch without string
matching.
"""


class DomainError(Exception):
    """Base class for recoverable domain errors."""

    code = "DomainError"

    def __init__(self, detail: str = ""):
        super().__init__(detail)
        self.detail = detail

    def __str__(self) -> str:
        return self.detail or self.code


class PointAtInfinity(DomainError):
    """Pixel lies on (or within epsilon of) the horizon line induced by a homography."""

    code = "PointAtInfinity"


class InsufficientPoints(DomainError):
    """Fewer correspondences than the minimum needed for estimation."""

    code = "InsufficientPoints"


class DegenerateConfiguration(DomainError):
    """Point layout makes the estimation problem rank-deficient."""

    code = "DegenerateConfiguration"


class BehindCamera(DomainError):
    """Requested projection of a point with non-positive depth."""

    code = "BehindCamera"


class EmptyRegion(DomainError):
    """A shrunk, clamped box contains no valid raster pixel."""

    code = "EmptyRegion"


class MalformedHeader(DomainError):
    """Raster file header does not parse."""

    code = "MalformedHeader"


class TruncatedData(DomainError):
    """Raster file payload is shorter than the header promises."""

    code = "TruncatedData"


class UnsupportedChannels(DomainError):
    """Raster file is not single-channel."""

    code = "UnsupportedChannels"


class EmptyInput(DomainError):
    """A metric or report was asked for on an empty collection."""

    code = "EmptyInput"


class NonPositiveGroundTruth(DomainError):
    """Ground-truth distances must be strictly positive."""

    code = "NonPositiveGroundTruth"


class LengthMismatch(DomainError):
    """Paired sequences differ in length."""

    code = "LengthMismatch"


class InsufficientData(DomainError):
    """Not enough data points for the requested statistic."""

    code = "InsufficientData"


class ConstantInput(DomainError):
    """Rank correlation is undefined when an input has no variation."""

    code = "ConstantInput"


class EmptyGroup(DomainError):
    """A scaling group contains no samples."""

    code = "EmptyGroup"


class AllCellsInvalid(DomainError):
    """Every grid-search cell failed to produce a metric."""

    code = "AllCellsInvalid"


class InvalidTrace(DomainError):
    """GPS trace violates its ordering contract."""

    code = "InvalidTrace"


class InvalidInput(DomainError):
    """Input file or request is structurally valid JSON but violates a schema contract."""

    code = "InvalidInput"
