"""Binary grammatical-gender classifier: a 2-layer MLP trained from scratch.

The network is sigmoid(W2 . act(W1 x + b1) + b2) with ReLU (or tanh) hidden
activation, trained by mini-batch gradient descent on mean binary
cross-entropy plus an L2 penalty on the weight matrices. Masculine encodes as
1, feminine as 0, and ties at probability 0.5 predict masculine. Everything
is deterministic for a fixed seed and input order: initialization and epoch
shuffling use dedicated seeded generators.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .embed import FeatureVector
from .errors import TrainingError, ValidationError
from .lexicon import Gender

PARAMS_FORMAT_VERSION = 1

ACTIVATIONS = ("relu", "tanh")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 200
    batch_size: int = 32
    hidden_size: int = 64
    seed: int = 0
    l2_penalty: float = 1e-4
    activation: str = "relu"

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be > 0")
        if self.epochs < 0:
            raise ValidationError("epochs must be >= 0")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")
        if self.hidden_size < 1:
            raise ValidationError("hidden_size must be >= 1")
        if self.l2_penalty < 0:
            raise ValidationError("l2_penalty must be >= 0")
        if self.activation not in ACTIVATIONS:
            raise ValidationError(f"unknown activation {self.activation!r}")


@dataclass
class ClassifierParams:
    W1: np.ndarray  # (H, D)
    b1: np.ndarray  # (H,)
    W2: np.ndarray  # (1, H)
    b2: np.ndarray  # (1,)
    hidden_size: int
    seed: int
    activation: str

    @property
    def input_dim(self) -> int:
        return self.W1.shape[1]

    def copy(self) -> "ClassifierParams":
        return ClassifierParams(
            W1=self.W1.copy(),
            b1=self.b1.copy(),
            W2=self.W2.copy(),
            b2=self.b2.copy(),
            hidden_size=self.hidden_size,
            seed=self.seed,
            activation=self.activation,
        )


@dataclass(frozen=True)
class Prediction:
    noun_id: str
    probability_masculine: float
    predicted: Gender


@dataclass(frozen=True)
class TrainResult:
    params: ClassifierParams
    loss_curve: tuple[float, ...] = field(default_factory=tuple)


def init_params(dim: int, config: TrainConfig) -> ClassifierParams:
    """Uniform weights scaled by 1/sqrt(fan_in), zero biases, seeded."""
    if dim < 1:
        raise ValidationError("input dimension must be >= 1")
    rng = np.random.default_rng(config.seed)
    h = config.hidden_size
    bound1 = 1.0 / np.sqrt(dim)
    bound2 = 1.0 / np.sqrt(h)
    return ClassifierParams(
        W1=rng.uniform(-bound1, bound1, size=(h, dim)),
        b1=np.zeros(h),
        W2=rng.uniform(-bound2, bound2, size=(1, h)),
        b2=np.zeros(1),
        hidden_size=h,
        seed=config.seed,
        activation=config.activation,
    )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _hidden(params: ClassifierParams, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    z1 = X @ params.W1.T + params.b1
    if params.activation == "relu":
        return z1, np.maximum(z1, 0.0)
    return z1, np.tanh(z1)


def _logits(params: ClassifierParams, X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    z1, h = _hidden(params, X)
    z2 = h @ params.W2.T + params.b2  # (n, 1)
    return z1, h, z2[:, 0]


def _as_matrix(params: ClassifierParams, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != params.input_dim:
        raise ValidationError(
            f"feature matrix of shape {X.shape} does not match input dim {params.input_dim}"
        )
    return X


def forward(params: ClassifierParams, x: np.ndarray | FeatureVector) -> float:
    """Masculine probability for one feature vector; always in (0, 1)."""
    if isinstance(x, FeatureVector):
        x = x.values
    return float(predict_proba(params, np.asarray(x, dtype=np.float64)[None, :])[0])


def predict_proba(params: ClassifierParams, X: np.ndarray) -> np.ndarray:
    X = _as_matrix(params, X)
    _, _, z = _logits(params, X)
    return _sigmoid(z)


def loss_and_gradients(
    params: ClassifierParams, X: np.ndarray, y: np.ndarray, l2_penalty: float = 0.0
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean BCE (in logits, numerically stable) + 0.5 * l2 * ||W||^2, with backprop.

    Biases are not penalized. Returns (loss, {W1, b1, W2, b2} gradients).
    """
    X = _as_matrix(params, X)
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0]
    z1, h, z = _logits(params, X)

    # mean of: max(z,0) - z*y + log(1 + exp(-|z|))
    bce = float(np.mean(np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))))
    loss = bce + 0.5 * l2_penalty * (float(np.sum(params.W1**2)) + float(np.sum(params.W2**2)))

    dz = (_sigmoid(z) - y) / n  # (n,)
    dW2 = dz[None, :] @ h + l2_penalty * params.W2  # (1, H)
    db2 = np.array([np.sum(dz)])
    dh = dz[:, None] * params.W2  # (n, H)
    if params.activation == "relu":
        dz1 = dh * (z1 > 0)
    else:
        dz1 = dh * (1.0 - np.tanh(z1) ** 2)
    dW1 = dz1.T @ X + l2_penalty * params.W1  # (H, D)
    db1 = dz1.sum(axis=0)
    return loss, {"W1": dW1, "b1": db1, "W2": dW2, "b2": db2}


def train(X: np.ndarray, y: np.ndarray, config: TrainConfig) -> TrainResult:
    """Mini-batch gradient descent; returns final params and per-epoch losses.

    Requires both classes in ``y`` (0 = feminine, 1 = masculine). With
    ``epochs=0`` the freshly initialized parameters come back untouched.
    Epoch shuffling uses its own generator so results are bit-reproducible.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValidationError(f"bad training shapes X={X.shape}, y={y.shape}")
    n = X.shape[0]
    if n < 2:
        raise ValidationError("need at least 2 training examples")
    n_pos = int(np.sum(y == 1.0))
    if n_pos == 0 or n_pos == n:
        raise ValidationError("training set contains a single class; cannot fit")
    if not np.all(np.isfinite(X)):
        raise ValidationError("training features contain non-finite values")

    params = init_params(X.shape[1], config)
    if config.epochs == 0:
        return TrainResult(params=params, loss_curve=())

    shuffle_rng = np.random.default_rng(np.random.SeedSequence([config.seed, 1]))
    losses: list[float] = []
    for epoch in range(config.epochs):
        order = shuffle_rng.permutation(n)
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            _, grads = loss_and_gradients(params, X[batch], y[batch], config.l2_penalty)
            params.W1 -= config.learning_rate * grads["W1"]
            params.b1 -= config.learning_rate * grads["b1"]
            params.W2 -= config.learning_rate * grads["W2"]
            params.b2 -= config.learning_rate * grads["b2"]
        epoch_loss, _ = loss_and_gradients(params, X, y, config.l2_penalty)
        if not np.isfinite(epoch_loss):
            raise TrainingError(
                f"non-finite loss at epoch {epoch} "
                f"(lr={config.learning_rate}, batch={config.batch_size}); "
                "reduce the learning rate or standardize the features"
            )
        losses.append(epoch_loss)
    return TrainResult(params=params, loss_curve=tuple(losses))


def predict_labels(params: ClassifierParams, X: np.ndarray) -> np.ndarray:
    """0/1 labels; ties at probability 0.5 go to masculine (1)."""
    return (predict_proba(params, X) >= 0.5).astype(np.int64)


def predict(params: ClassifierParams, features: Sequence[FeatureVector]) -> list[Prediction]:
    """Order-preserving predictions for a batch of feature vectors."""
    if not features:
        return []
    X = np.stack([f.values for f in features])
    probs = predict_proba(params, X)
    out = []
    for feature, prob in zip(features, probs):
        predicted = Gender.MASCULINE if prob >= 0.5 else Gender.FEMININE
        out.append(
            Prediction(
                noun_id=feature.noun_id,
                probability_masculine=float(prob),
                predicted=predicted,
            )
        )
    return out


def save_params(params: ClassifierParams, path: str | Path, config: TrainConfig | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "version": PARAMS_FORMAT_VERSION,
        "dims": {"input": params.input_dim, "hidden": params.hidden_size},
        "seed": params.seed,
        "activation": params.activation,
        "config": None
        if config is None
        else {
            "learning_rate": config.learning_rate,
            "epochs": config.epochs,
            "batch_size": config.batch_size,
            "hidden_size": config.hidden_size,
            "seed": config.seed,
            "l2_penalty": config.l2_penalty,
            "activation": config.activation,
        },
        "weights": {
            "W1": params.W1.tolist(),
            "b1": params.b1.tolist(),
            "W2": params.W2.tolist(),
            "b2": params.b2.tolist(),
        },
    }
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path


def load_params(path: str | Path) -> ClassifierParams:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if data.get("version") != PARAMS_FORMAT_VERSION:
        raise ValidationError(f"unsupported params version {data.get('version')!r}")
    weights = data["weights"]
    return ClassifierParams(
        W1=np.array(weights["W1"], dtype=np.float64),
        b1=np.array(weights["b1"], dtype=np.float64),
        W2=np.array(weights["W2"], dtype=np.float64),
        b2=np.array(weights["b2"], dtype=np.float64),
        hidden_size=int(data["dims"]["hidden"]),
        seed=int(data["seed"]),
        activation=data["activation"],
    )


def train_config_with_seed(config: TrainConfig, seed: int) -> TrainConfig:
    return replace(config, seed=seed)
