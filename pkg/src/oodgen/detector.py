"""Binary detector: a small fully-connected network, built from scratch.

Architecture is input -> ReLU hidden layers -> one logistic output.
Training minimizes binary cross-entropy computed from logits (never from
clipped probabilities) with the Adam update rule. Everything is plain
numpy with explicitly seeded initialization, shuffling, and splitting,
so a (data, labels, config) triple always trains to the same weights.
gradient_check verifies the analytic gradients against central finite
differences and is part of the shipped test surface.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import TrainingError, ValidationError
from .geometry import RandomStream, as_generator
from .metrics import auroc, f1_score
from .points import as_labels, as_point_set
from .synth import TimeSeriesSet

# Probabilities reported by predict() are clipped into this open
# interval; training losses use logits directly and are not clipped.
_P_EPS = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    hidden: tuple = (64, 32)  # hidden layer widths, in order
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 1e-3
    beta1: float = 0.9  # Adam first-moment decay
    beta2: float = 0.999  # Adam second-moment decay
    epsilon: float = 1e-8  # Adam denominator guard
    train_fraction: float = 0.9  # train share of the train/test split
    seed: int = 0  # controls split, init, and shuffling

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if any(h < 1 for h in self.hidden):
            raise ValidationError(f"hidden widths must be >= 1, got {self.hidden}")
        if self.epochs < 1:
            raise ValidationError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValidationError(f"batch_size must be >= 1, got {self.batch_size}")
        if not np.isfinite(self.learning_rate) or self.learning_rate <= 0:
            raise ValidationError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValidationError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


@dataclass(eq=False)
class DetectorModel:
    """Weights of the network; layer l maps width sizes[l] -> sizes[l+1]."""

    layer_sizes: tuple  # (input, hidden..., 1)
    weights: list = field(repr=False)  # weights[l]: (sizes[l], sizes[l+1])
    biases: list = field(repr=False)  # biases[l]: (sizes[l+1],)

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]


def init_model(input_dim: int, hidden, rng) -> DetectorModel:
    """Glorot-uniform weights, zero biases, in a fixed draw order."""
    if input_dim < 1:
        raise ValidationError(f"input_dim must be >= 1, got {input_dim}")
    gen = as_generator(rng)
    sizes = (int(input_dim),) + tuple(int(h) for h in hidden) + (1,)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(gen.uniform(-limit, limit, (fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return DetectorModel(layer_sizes=sizes, weights=weights, biases=biases)


def _logits(model: DetectorModel, X: np.ndarray):
    # Returns the post-ReLU activation of every layer plus final logits.
    activations = [X]
    a = X
    last = len(model.weights) - 1
    for l, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ W + b
        if l == last:
            return activations, z[:, 0]
        a = np.maximum(z, 0.0)
        activations.append(a)
    raise AssertionError("model has no layers")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def predict(model: DetectorModel, data) -> np.ndarray:
    """Probability of the positive class for one point or a batch.

    A (dim,) input yields a scalar, a (count, dim) input a (count,)
    array; outputs are clipped into the open interval (0, 1) so
    downstream logs are safe.
    """
    arr = np.asarray(data, dtype=float)
    single = arr.ndim == 1
    X = as_point_set(arr[None, :] if single else arr, name="data")
    if X.shape[1] != model.input_dim:
        raise ValidationError(f"data has dim {X.shape[1]}, model expects {model.input_dim}")
    _, z = _logits(model, X)
    p = np.clip(_sigmoid(z), _P_EPS, 1.0 - _P_EPS)
    return float(p[0]) if single else p


def _loss_and_grads(model: DetectorModel, X: np.ndarray, y: np.ndarray):
    """Mean BCE over the batch, plus gradients for every weight and bias.

    The loss is evaluated from logits, max(z, 0) - z y + log(1 + e^-|z|),
    which is exact and overflow-free; the output-layer error signal is
    then simply (sigmoid(z) - y) / batch.
    """
    activations, z = _logits(model, X)
    loss = float(np.mean(np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))))
    m = X.shape[0]
    delta = ((_sigmoid(z) - y) / m)[:, None]
    grads_w = [None] * len(model.weights)
    grads_b = [None] * len(model.biases)
    for l in range(len(model.weights) - 1, -1, -1):
        a = activations[l]
        grads_w[l] = a.T @ delta
        grads_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ model.weights[l].T) * (activations[l] > 0.0)
    return loss, grads_w, grads_b


def train_detector(data, labels, config: TrainConfig = TrainConfig()):
    """Train a detector and score it on a held-out split.

    The rows are shuffled once with the config seed and split
    train_fraction : rest; the model is initialized and minibatch-trained
    on the first part and scored on the second. Returns (model, metrics)
    where metrics holds f1_test, auroc_test, split counts, the held-out
    scores and labels, and the per-epoch mean training loss. A
    non-finite epoch loss aborts with TrainingError naming the epoch.
    """
    X = data.series if isinstance(data, TimeSeriesSet) else as_point_set(data, name="data")
    y = as_labels(labels, count=X.shape[0])
    if len(np.unique(y)) < 2:
        raise ValidationError("training needs both classes present")
    n = X.shape[0]
    gen = RandomStream(int(config.seed)).generator()
    perm = gen.permutation(n)
    split = int(round(n * config.train_fraction))
    if split < 1 or split >= n:
        raise ValidationError(
            f"train_fraction {config.train_fraction} leaves an empty split for {n} rows"
        )
    train_idx, test_idx = perm[:split], perm[split:]
    X_train, y_train = X[train_idx], y[train_idx].astype(float)
    X_test, y_test = X[test_idx], y[test_idx]

    model = init_model(X.shape[1], config.hidden, gen)
    m_w = [np.zeros_like(w) for w in model.weights]
    v_w = [np.zeros_like(w) for w in model.weights]
    m_b = [np.zeros_like(b) for b in model.biases]
    v_b = [np.zeros_like(b) for b in model.biases]
    step = 0
    history = []
    for epoch in range(1, config.epochs + 1):
        order = gen.permutation(split)
        epoch_losses = []
        for lo in range(0, split, config.batch_size):
            batch = order[lo:lo + config.batch_size]
            loss, grads_w, grads_b = _loss_and_grads(model, X_train[batch], y_train[batch])
            epoch_losses.append(loss)
            step += 1
            bc1 = 1.0 - config.beta1 ** step
            bc2 = 1.0 - config.beta2 ** step
            for params, grads, ms, vs in (
                (model.weights, grads_w, m_w, v_w),
                (model.biases, grads_b, m_b, v_b),
            ):
                for p, g, mm, vv in zip(params, grads, ms, vs):
                    mm *= config.beta1
                    mm += (1.0 - config.beta1) * g
                    vv *= config.beta2
                    vv += (1.0 - config.beta2) * (g * g)
                    p -= config.learning_rate * (mm / bc1) / (np.sqrt(vv / bc2) + config.epsilon)
        epoch_loss = float(np.mean(epoch_losses))
        if not np.isfinite(epoch_loss):
            raise TrainingError(f"training loss diverged at epoch {epoch}", epoch=epoch)
        history.append(epoch_loss)

    p_test = predict(model, X_test)
    metrics = {
        "f1_test": f1_score((p_test >= 0.5).astype(int), y_test),
        "auroc_test": auroc(p_test, y_test),
        "loss_history": history,
        "n_train": int(split),
        "n_test": int(n - split),
        "test_scores": p_test,
        "test_labels": y_test,
    }
    return model, metrics


def gradient_check(model: DetectorModel, X, y, step: float = 1e-5,
                   sample_size: int = 200, rng=None) -> float:
    """Worst relative error of the analytic gradient on one batch.

    Compares _loss_and_grads against central finite differences on a
    random subset of parameters (at least min(sample_size, total)).
    The relative error uses max(|analytic|, |numeric|, 1e-8) as the
    denominator; a healthy implementation stays well below 1e-4.
    """
    Xb = as_point_set(X, name="X")
    yb = as_labels(y, count=Xb.shape[0]).astype(float)
    gen = as_generator(rng if rng is not None else RandomStream(0))
    _, grads_w, grads_b = _loss_and_grads(model, Xb, yb)

    flat_params = []  # (array, index) addresses into the live model
    flat_grads = []
    for W, g in zip(model.weights, grads_w):
        for idx in np.ndindex(W.shape):
            flat_params.append((W, idx))
            flat_grads.append(g[idx])
    for b, g in zip(model.biases, grads_b):
        for idx in np.ndindex(b.shape):
            flat_params.append((b, idx))
            flat_grads.append(g[idx])

    total = len(flat_params)
    take = min(int(sample_size), total)
    chosen = gen.choice(total, size=take, replace=False)
    worst = 0.0
    for k in chosen:
        array, idx = flat_params[k]
        saved = array[idx]
        array[idx] = saved + step
        up, _, _ = _loss_and_grads(model, Xb, yb)
        array[idx] = saved - step
        down, _, _ = _loss_and_grads(model, Xb, yb)
        array[idx] = saved
        numeric = (up - down) / (2.0 * step)
        analytic = flat_grads[k]
        denom = max(abs(analytic), abs(numeric), 1e-8)
        worst = max(worst, abs(analytic - numeric) / denom)
    return worst
