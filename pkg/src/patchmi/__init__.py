"""patchmi: patch-mutual-information motion scoring and adaptive frame selection.

The library scores how much motion each video frame carries relative to
its predecessor by estimating the mutual information between the two
frames' patch populations under a Gaussian surrogate, remaps the scores
into a cumulative motion distribution, and selects a frame budget by
inverse-CDF segmentation. See the CLI (``patchmi --help``) for the file
and report formats.
"""

from .config import SamplerConfig
from .entropy import CovarianceDecomposition, PmiValue, covariance, gaussian_entropy, pmi
from .errors import ConfigError, IngestError, NumericalError, PatchMiError, ZeroVarianceError
from .frame_io import (
    FrameSequence,
    IngestOptions,
    load_container,
    load_directory,
    preprocess,
    write_container,
)
from .metrics import MetricKind, cosine, euclidean, histogram_mi, psnr
from .patches import PatchGrid, PatchMatrix, embed_pair, make_grid
from .scoring import (
    ScoreSeries,
    cumulate,
    invert_normalize,
    pair_similarity,
    score_video,
    shifted_leaky_map,
    shifted_leaky_relu,
)
from .selection import (
    ClipSelection,
    Segmentation,
    SelectionReport,
    dense_clip_select,
    pad_repeat,
    segment,
    select,
    select_frames,
)
from .synth import SceneSpec, render

__version__ = "0.1.0"

__all__ = [
    "SamplerConfig",
    "CovarianceDecomposition",
    "PmiValue",
    "covariance",
    "gaussian_entropy",
    "pmi",
    "ConfigError",
    "IngestError",
    "NumericalError",
    "PatchMiError",
    "ZeroVarianceError",
    "FrameSequence",
    "IngestOptions",
    "load_container",
    "load_directory",
    "preprocess",
    "write_container",
    "MetricKind",
    "cosine",
    "euclidean",
    "histogram_mi",
    "psnr",
    "PatchGrid",
    "PatchMatrix",
    "embed_pair",
    "make_grid",
    "ScoreSeries",
    "cumulate",
    "invert_normalize",
    "pair_similarity",
    "score_video",
    "shifted_leaky_map",
    "shifted_leaky_relu",
    "ClipSelection",
    "Segmentation",
    "SelectionReport",
    "dense_clip_select",
    "pad_repeat",
    "segment",
    "select",
    "select_frames",
    "SceneSpec",
    "render",
    "__version__",
]
