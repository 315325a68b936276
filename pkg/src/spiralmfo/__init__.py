"""Moth-flame optimization with spiral-motion variants, applied to training
small tanh classifiers on sonar data."""

from .datasets import Dataset, SplitSpec, augment, load_sonar_csv, split, synth_multiclass
from .mfo import (
    MfoConfig,
    ObjectiveSpec,
    SwarmState,
    flame_count,
    init_swarm,
    optimize,
    plain_mfo_config,
    spiral_update,
    step,
)
from .network import (
    LabeledBatch,
    NetworkSpec,
    classification_rate,
    decode_forward,
    encode,
    loss,
    make_objective,
)
from .pso import PsoConfig, pso_optimize, pso_step
from .records import RunRecord
from .spirals import SpiralKernel, SpiralKind, radial_envelope, trace_spiral
from .stats import RunBatch, ave_std, build_report, ranksum_p

__version__ = "0.1.0"
