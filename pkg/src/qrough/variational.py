"""Parametrized-circuit regressors trained by gradient descent.

Two model families share one parameter layout (layers x qubits x 2 angles)
and one readout (<Z> on qubit 0, mapped affinely onto the training target
range):

* ``qnn``: features enter once as RX/RZ rotation pairs, then each layer
  applies per-qubit RX/RZ rotations followed by a CNOT chain over adjacent
  qubits.
* ``vqc``: a fixed feature map (H on every qubit, per-qubit RZ of the
  feature, one CNOT chain) followed by layers of per-qubit RY/RZ rotations
  plus the CNOT chain.

Gradients use the parameter-shift rule, exact for single-parameter rotation
gates: d<Z>/dtheta = (f(theta + pi/2) - f(theta - pi/2)) / 2. Training
evaluates all shifted circuits for all samples in one vectorized batch;
the per-sample forwards below stay on the plain statevector path and the
test suite pins both routes together.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import FeatureScaler
from .metrics import explained_variance
from .statevector import (
    QuantumState,
    apply_gate,
    cnot,
    expectation_z,
    h,
    rx,
    ry,
    rz,
    zero_state,
)

MODEL_KINDS = ("qnn", "vqc")
INIT_SCALE = 0.1  # initial angles drawn uniformly from [-INIT_SCALE, INIT_SCALE]
PARAMS_PER_QUBIT = 2


class TrainingDivergedError(RuntimeError):
    """Cost became non-finite during optimization."""


@dataclass(frozen=True)
class CircuitSpec:
    """Dimensions and wiring of one model: qubit count, layer count, readout."""

    model_kind: str
    num_qubits: int
    layers: int

    def __post_init__(self):
        if self.model_kind not in MODEL_KINDS:
            raise ValueError(f"model_kind must be one of {MODEL_KINDS}")
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        if self.layers < 1:
            raise ValueError("layers must be >= 1")

    @property
    def param_shape(self) -> tuple[int, int, int]:
        return (self.layers, self.num_qubits, PARAMS_PER_QUBIT)


@dataclass(frozen=True)
class OutputMap:
    """Invertible affine map between <Z> in [-1, 1] and target units (um)."""

    y_min: float
    y_max: float

    def __post_init__(self):
        if not (math.isfinite(self.y_min) and math.isfinite(self.y_max)):
            raise ValueError("output bounds must be finite")
        if self.y_min >= self.y_max:
            raise ValueError("output map needs y_min < y_max")

    @classmethod
    def fit(cls, targets) -> "OutputMap":
        targets = np.asarray(targets, dtype=float)
        return cls(float(targets.min()), float(targets.max()))

    def decode(self, expectation):
        return self.y_min + (np.asarray(expectation) + 1.0) / 2.0 * (self.y_max - self.y_min)

    def encode(self, y):
        return 2.0 * (np.asarray(y) - self.y_min) / (self.y_max - self.y_min) - 1.0

    @property
    def span(self) -> float:
        return self.y_max - self.y_min


@dataclass(frozen=True)
class TrainConfig:
    layers: int = 2
    iterations: int = 100
    learning_rate: float = 0.1
    seed: int = 42

    def __post_init__(self):
        if self.layers < 1:
            raise ValueError("layers must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    cost: float
    train_evs: float


@dataclass
class TrainingHistory:
    records: list[IterationRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)


def init_params(spec: CircuitSpec, seed: int) -> np.ndarray:
    """Random initial angles, uniform over [-0.1, 0.1]."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-INIT_SCALE, INIT_SCALE, size=spec.param_shape)


def _check_shapes(params: np.ndarray, x: np.ndarray, spec: CircuitSpec) -> tuple[np.ndarray, np.ndarray]:
    params = np.asarray(params, dtype=float)
    x = np.asarray(x, dtype=float)
    if params.shape != spec.param_shape:
        raise ValueError(f"expected params of shape {spec.param_shape}, got {params.shape}")
    if x.shape != (spec.num_qubits,):
        raise ValueError(f"expected {spec.num_qubits} features, got shape {x.shape}")
    return params, x


def embed_features(state: QuantumState, x) -> QuantumState:
    """Encode one scaled feature vector as RX/RZ rotation pairs, qubit per feature."""
    x = np.asarray(x, dtype=float)
    if x.shape != (state.num_qubits,):
        raise ValueError(f"expected {state.num_qubits} features, got shape {x.shape}")
    for j, xj in enumerate(x):
        state = apply_gate(state, rx(float(xj), j))
        state = apply_gate(state, rz(float(xj), j))
    return state


def _entangle(state: QuantumState) -> QuantumState:
    for i in range(state.num_qubits - 1):
        state = apply_gate(state, cnot(i, i + 1))
    return state


def qnn_forward(params, x, spec: CircuitSpec) -> float:
    """<Z> on qubit 0 after the QNN circuit for one sample."""
    params, x = _check_shapes(params, x, spec)
    state = embed_features(zero_state(spec.num_qubits), x)
    for layer in params:
        for j, (theta_rx, theta_rz) in enumerate(layer):
            state = apply_gate(state, rx(float(theta_rx), j))
            state = apply_gate(state, rz(float(theta_rz), j))
        state = _entangle(state)
    return expectation_z(state, 0)


def vqc_forward(params, x, spec: CircuitSpec) -> float:
    """<Z> on qubit 0 after the VQC feature map and variational block."""
    params, x = _check_shapes(params, x, spec)
    state = zero_state(spec.num_qubits)
    for j in range(spec.num_qubits):
        state = apply_gate(state, h(j))
    for j, xj in enumerate(x):
        state = apply_gate(state, rz(float(xj), j))
    state = _entangle(state)
    for layer in params:
        for j, (theta_ry, theta_rz) in enumerate(layer):
            state = apply_gate(state, ry(float(theta_ry), j))
            state = apply_gate(state, rz(float(theta_rz), j))
        state = _entangle(state)
    return expectation_z(state, 0)


def forward(params, x, spec: CircuitSpec) -> float:
    return qnn_forward(params, x, spec) if spec.model_kind == "qnn" else vqc_forward(params, x, spec)


# --- vectorized circuit evaluation -----------------------------------------
# States are held as one complex array of shape (2,)*n + (B, N): one axis
# per qubit in front, then B parameter blocks (the unshifted circuit plus
# one block per parameter shift) times N samples. Gate application is then
# plain strided slicing along a qubit axis, and angle arrays of shape
# (B, 1) or (N,) broadcast over the trailing axes. The RX/RZ (or RY/RZ)
# pair every circuit applies per qubit is fused into a single 2x2 update.


def _slot(qubit: int, bit: int, control: int | None = None) -> tuple:
    """Leading-axis index selecting one value of a qubit axis (and a set control)."""
    last = qubit if control is None else max(qubit, control)
    index = [slice(None)] * (last + 1)
    index[qubit] = bit
    if control is not None:
        index[control] = 1
    return tuple(index)


def _apply_2x2(psi, qubit, u00, u01, u10, u11):
    a0 = psi[_slot(qubit, 0)]
    a1 = psi[_slot(qubit, 1)]
    new0 = u00 * a0 + u01 * a1
    new1 = u10 * a0 + u11 * a1
    psi[_slot(qubit, 0)] = new0
    psi[_slot(qubit, 1)] = new1


def _apply_rot_pair(psi, qubit, first_kind: str, theta_first, theta_rz):
    """Fused RX(a)+RZ(b) or RY(a)+RZ(b) on one qubit; angles broadcast over (B, N)."""
    c = np.cos(theta_first / 2.0)
    s = np.sin(theta_first / 2.0)
    p = np.exp(-0.5j * theta_rz)
    pc = np.conj(p)
    if first_kind == "rx":
        _apply_2x2(psi, qubit, c * p, -1j * s * p, -1j * s * pc, c * pc)
    else:  # ry
        _apply_2x2(psi, qubit, c * p, -s * p, s * pc, c * pc)


def _apply_chain(psi, num_qubits):
    for c in range(num_qubits - 1):
        t = c + 1
        flipped = psi[_slot(t, 0, control=c)].copy()
        psi[_slot(t, 0, control=c)] = psi[_slot(t, 1, control=c)]
        psi[_slot(t, 1, control=c)] = flipped


def _feature_state(X: np.ndarray, spec: CircuitSpec) -> np.ndarray:
    """Data-dependent circuit prefix, shape (2,)*n + (1, N); computed once per fit."""
    n = spec.num_qubits
    N = X.shape[0]
    psi = np.zeros((2,) * n + (1, N), dtype=complex)
    psi[(0,) * n] = 1.0
    if spec.model_kind == "qnn":
        for j in range(n):
            _apply_rot_pair(psi, j, "rx", X[:, j], X[:, j])
    else:
        inv = 1.0 / math.sqrt(2.0)
        for j in range(n):
            a0 = psi[_slot(j, 0)]
            a1 = psi[_slot(j, 1)]
            psi[_slot(j, 0)], psi[_slot(j, 1)] = (a0 + a1) * inv, (a0 - a1) * inv
        for j in range(n):
            p = np.exp(-0.5j * X[:, j])
            psi[_slot(j, 0)] = psi[_slot(j, 0)] * p
            psi[_slot(j, 1)] = psi[_slot(j, 1)] * np.conj(p)
        _apply_chain(psi, n)
    return psi


def _run_layers(feature_state: np.ndarray, theta: np.ndarray, spec: CircuitSpec) -> np.ndarray:
    """Apply the parametrized layers to the prefix and read out <Z_0>.

    theta: (B, layers, n, 2). Returns (B, N).
    """
    n = spec.num_qubits
    B = theta.shape[0]
    first_kind = "rx" if spec.model_kind == "qnn" else "ry"
    psi = np.broadcast_to(feature_state, feature_state.shape[:-2] + (B,) + feature_state.shape[-1:]).copy()
    for layer in range(spec.layers):
        for j in range(n):
            _apply_rot_pair(
                psi, j, first_kind,
                theta[:, layer, j, 0, None], theta[:, layer, j, 1, None],
            )
        _apply_chain(psi, n)
    probs = np.abs(psi) ** 2
    # after probs[bit0] the remaining qubit axes sit in front of (B, N)
    marginal_axes = tuple(range(n - 1))
    return probs[0].sum(axis=marginal_axes) - probs[1].sum(axis=marginal_axes)


def _forward_batch(theta: np.ndarray, X: np.ndarray, spec: CircuitSpec) -> np.ndarray:
    """Evaluate <Z_0> for every (parameter block, sample) pair.

    theta: (B, layers, n, 2); X: (N, n) scaled features. Returns (B, N).
    """
    return _run_layers(_feature_state(X, spec), theta, spec)


def _shifted_parameter_blocks(params: np.ndarray) -> np.ndarray:
    """Block 0 is params unshifted; blocks 2k+1 / 2k+2 shift parameter k by +-pi/2."""
    count = params.size
    blocks = np.broadcast_to(params, (2 * count + 1, *params.shape)).copy()
    flat = blocks.reshape(2 * count + 1, count)
    for k in range(count):
        flat[2 * k + 1, k] += math.pi / 2.0
        flat[2 * k + 2, k] -= math.pi / 2.0
    return blocks


def _prepare_training_arrays(params, X, y, spec):
    params = np.asarray(params, dtype=float)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    if params.shape != spec.param_shape:
        raise ValueError(f"expected params of shape {spec.param_shape}, got {params.shape}")
    if X.shape[1] != spec.num_qubits:
        raise ValueError(f"expected {spec.num_qubits} feature columns, got {X.shape[1]}")
    if len(y) != len(X) or len(y) == 0:
        raise ValueError("features and targets must be non-empty and equal length")
    return params, X, y


def cost(params, X, y, spec: CircuitSpec, output_map: OutputMap) -> float:
    """Mean squared error, in um^2, of the decoded circuit outputs against y."""
    params, X, y = _prepare_training_arrays(params, X, y, spec)
    e = _forward_batch(params[None], X, spec)[0]
    residual = output_map.decode(e) - y
    return float(np.mean(residual**2))


def _cost_and_gradient(params, X, y, spec, output_map, feature_state=None):
    if feature_state is None:
        feature_state = _feature_state(X, spec)
    e = _run_layers(feature_state, _shifted_parameter_blocks(params), spec)
    predictions = output_map.decode(e[0])
    residual = predictions - y
    cost_value = float(np.mean(residual**2))
    if not math.isfinite(cost_value):
        return cost_value, None, predictions
    # d<Z>/dtheta_k by the shift rule, then the chain through the affine
    # decode and the squared error.
    de = (e[1::2] - e[2::2]) / 2.0
    grad = (output_map.span / len(y)) * (de @ residual)
    return cost_value, grad.reshape(params.shape), predictions


def gradient(params, X, y, spec: CircuitSpec, output_map: OutputMap) -> np.ndarray:
    """Exact dcost/dtheta for every parameter, same shape as params."""
    params, X, y = _prepare_training_arrays(params, X, y, spec)
    cost_value, grad, _ = _cost_and_gradient(params, X, y, spec, output_map)
    if grad is None:
        raise TrainingDivergedError(f"cost is non-finite ({cost_value}); gradient undefined")
    return grad


@dataclass(frozen=True, eq=False)
class VariationalModel:
    """A trained circuit regressor: parameters plus the fitted feature/output maps."""

    spec: CircuitSpec
    params: np.ndarray
    scaler: FeatureScaler
    output_map: OutputMap
    config: TrainConfig

    def predict(self, features) -> np.ndarray:
        """Surface roughness (um) for raw encoded feature rows."""
        X = self.scaler.transform(features)
        e = np.array([forward(self.params, row, self.spec) for row in X])
        return self.output_map.decode(e)

    def to_dict(self) -> dict:
        return {
            "model_kind": self.spec.model_kind,
            "num_qubits": self.spec.num_qubits,
            "layers": self.spec.layers,
            "params": self.params.tolist(),
            "feature_scaler": self.scaler.to_dict(),
            "output_map": {"y_min": self.output_map.y_min, "y_max": self.output_map.y_max},
            "train_config": {
                "layers": self.config.layers,
                "iterations": self.config.iterations,
                "learning_rate": self.config.learning_rate,
                "seed": self.config.seed,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VariationalModel":
        return cls(
            spec=CircuitSpec(d["model_kind"], d["num_qubits"], d["layers"]),
            params=np.array(d["params"], dtype=float),
            scaler=FeatureScaler.from_dict(d["feature_scaler"]),
            output_map=OutputMap(**d["output_map"]),
            config=TrainConfig(**d["train_config"]),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    @classmethod
    def load(cls, path) -> "VariationalModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def train(model_kind: str, features, targets, config: TrainConfig) -> tuple[VariationalModel, TrainingHistory]:
    """Fit a circuit regressor by vanilla gradient descent.

    The feature scaler and output map are fitted on the given (training)
    rows only. The history records cost and training-set explained variance
    at the parameters of each iteration, before that iteration's update.
    Deterministic for a fixed (seed, data, config).
    """
    features = np.atleast_2d(np.asarray(features, dtype=float))
    targets = np.asarray(targets, dtype=float)
    if len(features) == 0 or len(features) != len(targets):
        raise ValueError("features and targets must be non-empty and equal length")

    spec = CircuitSpec(model_kind, num_qubits=features.shape[1], layers=config.layers)
    scaler = FeatureScaler.fit(features)
    X = scaler.transform(features)
    output_map = OutputMap.fit(targets)
    params = init_params(spec, config.seed)

    feature_state = _feature_state(X, spec)
    history = TrainingHistory()
    for iteration in range(config.iterations):
        cost_value, grad, predictions = _cost_and_gradient(
            params, X, targets, spec, output_map, feature_state
        )
        if not math.isfinite(cost_value):
            raise TrainingDivergedError(
                f"non-finite cost at iteration {iteration}; lower the learning rate"
            )
        history.records.append(
            IterationRecord(iteration, cost_value, explained_variance(targets, predictions))
        )
        params = params - config.learning_rate * grad

    model = VariationalModel(spec, params, scaler, output_map, config)
    return model, history
