"""Hybrid neural computer graphics pipeline.

Forms semantic class-id images from simple 3D scenes, converts them to RGB
through a pluggable synthesizer, renders objects of interest with a direct
lighting model, blends the two, and scores the result with semantic
retention and the Fréchet distance over image features.
"""

from ._kernels import active_backend
from .blend import (
    alpha_blend,
    collapse_pyramid,
    copy_paste_composite,
    coverage_to_alpha,
    external_gan_blend,
    gaussian_pyramid,
    laplacian_pyramid,
    poisson_blend,
    pyramid_blend,
)
from .errors import (
    BehindCameraError,
    ConvergenceError,
    CovarianceError,
    HncgError,
    NumericalError,
    ObjParseError,
    PlugDimensionError,
    PlugError,
    PlugOutputError,
    PlugProcessError,
    PlugTimeoutError,
    SceneError,
    ValidationError,
)
from .losses import cgan_value, cycle_consistency_loss, cycle_gan_total_loss, gan_value, gp_gan_loss
from .metrics import (
    FeatureStats,
    external_segment,
    feature_stats,
    fid_between_sets,
    frechet_distance,
    read_features,
    semantic_retention,
    stub_features,
    write_features,
)
from .pipeline import (
    ABLATION_METHODS,
    AblationRow,
    FrameResult,
    PipelineConfig,
    run_ablation,
    run_frame,
    run_sequence,
)
from .plug import PlugConfig
from .raster import (
    Intrinsics,
    SemanticImage,
    colorize_semantic,
    declassify_semantic,
    image_plane_coords,
    project_point,
    rasterize_semantic,
)
from .render import PartialRender, render_full, render_partial, shade_point
from .scene import (
    ClassPalette,
    InterestObject,
    LightSource,
    Material,
    PoseVector,
    RenderSettings,
    SceneDescription,
    SceneObject,
    Texture,
    TriMesh,
    dump_obj,
    load_palette,
    load_scene,
    parse_obj,
)
from .synth import channel_stats, external_synthesize, spade_denorm, stub_synthesize
from .transforms import rotation_matrix, transform_from_camera, transform_to_camera

__version__ = "0.1.0"
