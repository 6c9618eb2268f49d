"""Statevector circuit simulation and quantum ML regressors for print surface roughness."""

from .dataset import (
    EncodedDataset,
    FeatureScaler,
    Sample,
    bundled_data_path,
    encode_pattern,
    encode_samples,
    load_csv,
    save_csv,
    split,
)
from .metrics import MetricsReport, explained_variance, mae, mse
from .qforest import Forest, ForestConfig, best_split, build_tree, fit_forest, predict_forest
from .statevector import (
    Gate,
    QuantumState,
    apply_gate,
    bell_state,
    cnot,
    expectation_z,
    h,
    probabilities,
    rx,
    ry,
    rz,
    x,
    zero_state,
)
from .variational import (
    CircuitSpec,
    OutputMap,
    TrainConfig,
    TrainingDivergedError,
    TrainingHistory,
    VariationalModel,
    cost,
    embed_features,
    gradient,
    init_params,
    qnn_forward,
    train,
    vqc_forward,
)

__version__ = "0.1.0"
