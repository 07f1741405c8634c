"""Occlusion-style face augmentation and identity-aware dataset tooling
for deepfake detection experiments."""

from .clustering import (
    NOISE,
    DbscanParams,
    FaceEmbedding,
    dbscan,
    pca_2d,
    propagate_to_fakes,
    video_clusters,
)
from .cutout import (
    AugmentOutcome,
    CutoutConfig,
    CutoutRegion,
    FillMode,
    Strategy,
    face_cutout,
    fill_region,
    hull_consecutive,
    hull_quadrant,
    hull_random_subset,
    overlap_ratio,
    rng_for_image,
    sensory_candidates,
)
from .geometry import (
    binary_dilate,
    centroid_quadrants,
    convex_hull,
    draw_line,
    polygon_area,
    polygon_centroid,
    rasterize_polygon,
)
from .metrics import (
    FramePrediction,
    VideoScore,
    aggregate_by_video,
    aggregate_video,
    average_precision,
    log_loss,
    roc_auc,
)
from .pipeline import JobConfig, MaskJob, build_masks, preview, resize_pad, run_augment
from .simmask import difference_mask, ssim_map, to_gray
from .split import (
    DatasetManifest,
    SplitPlan,
    VideoRecord,
    cluster_split,
    kfold_by_cluster,
    leak_audit,
)

__version__ = "0.1.0"
