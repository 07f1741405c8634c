"""Exception types raised on contract violations across the toolkit."""


class FaceCutError(Exception):
    """Base class for all library errors."""


class FewerThanThreePointsError(FaceCutError):
    """Convex hull needs at least three distinct input points."""


class AllCollinearError(FaceCutError):
    """All input points lie on a single line, no hull exists."""


class DegenerateZeroAreaError(FaceCutError):
    """Polygon area is zero, centroid is undefined."""


class EmptyAfterClampError(FaceCutError):
    """Polygon rasterizes to no pixels inside the image bounds."""


class DegenerateLineError(FaceCutError):
    """Line endpoints coincide after rounding to the pixel grid."""


class EmptyImageError(FaceCutError):
    """Image has zero pixels."""


class DimMismatchError(FaceCutError):
    """Operands do not share the same pixel dimensions."""


class BadWindowError(FaceCutError):
    """Sliding window is even, too small, or larger than the image."""


class EmptyDiffMaskError(FaceCutError):
    """Difference mask has no set pixels, overlap ratio is undefined."""


class LandmarkImageMismatchError(FaceCutError):
    """Landmark coordinates are far outside the image they claim to describe."""


class EmptyInputError(FaceCutError):
    """Operation requires at least one input element."""


class DanglingSourceError(FaceCutError):
    """A fake video references a source video with no cluster assignment."""


class RankDeficientError(FaceCutError):
    """Point cloud has no variance in any direction."""


class TooFewClustersError(FaceCutError):
    """Not enough clusters to populate every split or fold."""


class UnassignedVideoError(FaceCutError):
    """A manifest video is missing from the split plan."""


class NoFramesError(FaceCutError):
    """Video has no frame predictions to aggregate."""


class SingleClassError(FaceCutError):
    """Ranking metric needs both a positive and a negative example."""


class NoPositivesError(FaceCutError):
    """Average precision needs at least one positive example."""
