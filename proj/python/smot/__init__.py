"""Training-free semantic multi-object tracking: geometry, grounding, metrics and pipeline."""

from ._core import (
    BackendError,
    DataError,
    FixtureEmbedder,
    StageError,
    UsageError,
    bleu4,
    canonical_annotation,
    cider,
    eval_caption,
    eval_interactions,
    eval_tracking,
    evaluate,
    extract_contour,
    iou,
    label_space,
    meteor,
    parse_annotation,
    porter_stem,
    retrieve_topk,
    rle_decode,
    rle_encode,
    rouge_l,
    run_fixture,
    thicken_contour,
    tight_box,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
