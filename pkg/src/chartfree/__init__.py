"""Reaction-diffusion simulation and coordinate-free operator learning on
flat and curved charts."""

from .geometry import (
    Chart,
    MetricSample,
    embed_sphere,
    geo_stereo_map,
    metric_at,
    warp_derivative,
    warp_forward,
    warp_inverse,
)
from .grid import GridSpec, ScalarField, d1, d2, ghost_index, make_grid
from .features import FEATURE_NAMES, FeatureBatch, build_features, inner_product, laplace_beltrami
from .models import (
    BarkleyParams,
    FhnParams,
    GaussianSpec,
    PksParams,
    barkley_rhs,
    fhn_rhs,
    gaussian_field,
    heat_rhs,
    pks_rhs,
    scenario_grid,
    scenario_ic,
)
from .learn import (
    Dataset,
    Mlp,
    MlpConfig,
    TrainConfig,
    adam_step,
    batch_loss,
    forward,
    init_mlp,
    loss_and_gradient,
    subsample,
    time_targets,
    train,
)
from .engine import (
    LearnedRhs,
    MseRecord,
    ReferenceRhs,
    Trajectory,
    euler_step,
    mse_compare,
    resample,
    rollout,
)

__version__ = "0.1.0"
