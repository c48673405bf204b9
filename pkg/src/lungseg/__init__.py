"""Lung segmentation toolkit.

Encoder-decoder inference on CPU arrays, connected-component post-processing,
Dice/IoU evaluation, and a batch CLI for reproducible reports.
"""
from .config import DecoderConfig, load_config, save_config
from .dataset import DatasetPairing, pair_dataset
from .decoder import (
    BlockWeights,
    WeightStore,
    decoder_block,
    encoder_stub,
    forward,
    predict_mask,
    random_weights,
)
from .errors import (
    ChannelMismatchError,
    ConfigError,
    ContractViolation,
    ImageReadError,
    InputShapeError,
    LungSegError,
    NumericError,
    UndecodableImageError,
    WeightFormatError,
    WeightHeaderError,
    WeightShapeError,
    WeightTruncationError,
)
from .evaluate import EvalReport, EvalRow, evaluate_directories, write_csv, write_json
from .fixtures import generate_fixtures, make_case
from .images import (
    read_grayscale,
    read_mask,
    render_comparison,
    render_overlay,
    write_grayscale,
    write_mask,
    write_rgb,
)
from .metrics import (
    OverlapCounts,
    PairReport,
    Summary,
    aggregate,
    dice,
    dice_from_counts,
    evaluate_pair,
    iou,
    iou_from_counts,
    overlap_counts,
)
from .nn import (
    BnParams,
    KernelBank,
    argmax_channels,
    batch_norm,
    conv2d,
    relu,
    softmax_channels,
    tensor,
    upsample_nearest,
)
from .postprocess import ComponentStats, keep_largest_k, label_components, post_process
from .weights import load_weights, read_records, save_weights, write_records

__version__ = "0.1.0"

__all__ = [
    "BlockWeights",
    "BnParams",
    "ChannelMismatchError",
    "ComponentStats",
    "ConfigError",
    "ContractViolation",
    "DatasetPairing",
    "DecoderConfig",
    "EvalReport",
    "EvalRow",
    "ImageReadError",
    "InputShapeError",
    "KernelBank",
    "LungSegError",
    "NumericError",
    "OverlapCounts",
    "PairReport",
    "Summary",
    "UndecodableImageError",
    "WeightFormatError",
    "WeightHeaderError",
    "WeightShapeError",
    "WeightStore",
    "WeightTruncationError",
    "aggregate",
    "argmax_channels",
    "batch_norm",
    "conv2d",
    "decoder_block",
    "dice",
    "dice_from_counts",
    "encoder_stub",
    "evaluate_directories",
    "evaluate_pair",
    "forward",
    "generate_fixtures",
    "iou",
    "iou_from_counts",
    "keep_largest_k",
    "label_components",
    "load_config",
    "load_weights",
    "make_case",
    "overlap_counts",
    "pair_dataset",
    "post_process",
    "predict_mask",
    "random_weights",
    "read_grayscale",
    "read_mask",
    "read_records",
    "relu",
    "render_comparison",
    "render_overlay",
    "save_config",
    "save_weights",
    "softmax_channels",
    "tensor",
    "upsample_nearest",
    "write_csv",
    "write_grayscale",
    "write_json",
    "write_mask",
    "write_records",
    "write_rgb",
]
