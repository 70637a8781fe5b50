"""Base enums and errors for the f-convolution toolkit."""

from enum import Enum


class Side(Enum):
    L = "L"
    R = "R"
    T = "T"


class SwapPolicy(Enum):
    AUTO = "auto"
    ON = "on"
    OFF = "off"


class RowPairing(Enum):
    CONSECUTIVE = "consecutive"
    GREEDY = "greedy"


class Method(Enum):
    PARTITION = "partition"
    NAIVE = "naive"
    BOTH = "both"


class PieceKind(Enum):
    CYCLE = "cycle"
    PATH = "path"
    IN_STAR = "in_star"
    OUT_STAR = "out_star"
    SINGLE_EDGE = "single_edge"


class FConvError(Exception):
    """Root of every error raised by the toolkit."""


class DomainError(FConvError, ValueError):
    """Bad argument: wrong arity, unknown label, mismatched domains."""


class DigitRangeError(FConvError, IndexError):
    """A mixed-radix digit or flat index is out of range."""


class CapacityError(DomainError):
    """The guaranteed output bound exceeds the configured integer capacity."""


class InputFormatError(DomainError):
    """Malformed JSON input. The message names the file and the line or field."""


class OracleLimitError(DomainError):
    """The brute-force oracle refuses instances above its pair limit."""


class PartitionError(FConvError):
    """Internal failure while turning graph pieces into cyclic minors."""


class TransformError(FConvError):
    """A number-theoretic transform was asked for a root it does not have."""
