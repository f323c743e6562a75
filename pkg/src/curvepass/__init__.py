"""Curve-trace graphical password scheme and its security-analysis lab."""

from .errors import (
    CellOutOfRange,
    ConsumedNonce,
    CorruptRecord,
    CurvepassError,
    DuplicateImageId,
    DuplicatePassImage,
    DuplicateUser,
    EmptyPolyline,
    ExpiredNonce,
    InvalidRange,
    NoEligibleCells,
    SpaceTooLarge,
    TooFewImages,
    TooFewSamples,
    UndecodableImage,
    UnknownImageId,
    UnknownNonce,
    UnknownUser,
    WrongImageCount,
    WrongPasswordLength,
)
from .images import DegradeParams, ImageCatalog, degrade_image, degrade_pixel, load_catalog, synth_catalog
from .scheme import (
    CellTrace,
    Challenge,
    ChallengeConfig,
    Decision,
    GridSpec,
    Layout,
    Password,
    Polyline,
    Reason,
    generate_challenge,
    generate_layout,
    jitter_trace,
    map_polyline_to_cells,
    max_trace_length,
    select_head_tail,
    shortest_leg,
    synthesize_trace,
    trace_length,
    verify_trace,
)

__version__ = "0.1.0"
