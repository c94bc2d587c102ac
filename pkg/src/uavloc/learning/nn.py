"""Layers and the two network architectures.

``CnnModel`` regresses a per-spot target track from a measurement matrix;
``Seq2SeqModel`` forecasts future positions from an observed track.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError, ShapeError, StateError
from .autodiff import Tensor, concat, conv2d, maxpool2d, parameter, relu, sigmoid, tanh


class Module:
    """Anything holding named parameters."""

    def parameters(self) -> dict[str, Tensor]:
        out = {}
        for name, value in vars(self).items():
            if isinstance(value, Tensor) and value.requires_grad:
                out[name] = value
            elif isinstance(value, Module):
                out.update({f"{name}.{k}": v for k, v in value.parameters().items()})
            elif isinstance(value, list):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        out.update({f"{name}.{i}.{k}": v for k, v in item.parameters().items()})
        return out

    def n_parameters(self) -> int:
        return sum(p.data.size for p in self.parameters().values())

    def zero_grad(self) -> None:
        for p in self.parameters().values():
            p.zero_grad()

    def get_weights(self) -> dict[str, np.ndarray]:
        return {k: v.data.copy() for k, v in self.parameters().items()}

    def set_weights(self, weights: dict[str, np.ndarray]) -> None:
        params = self.parameters()
        if set(params) != set(weights):
            raise ShapeError("weight names do not match the architecture")
        for k, p in params.items():
            w = np.asarray(weights[k], dtype=float)
            if w.shape != p.shape:
                raise ShapeError(f"{k}: expected {p.shape}, got {w.shape}")
            p.data = w.copy()


def _uniform(rng, shape, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class Dense(Module):
    def __init__(self, n_in: int, n_out: int, rng: np.random.Generator):
        self.w = parameter(_uniform(rng, (n_in, n_out), n_in, n_out))
        self.b = parameter(np.zeros(n_out))

    def __call__(self, x: Tensor) -> Tensor:
        return x @ self.w + self.b


class Conv2d(Module):
    def __init__(self, c_in: int, c_out: int, kernel: int, rng: np.random.Generator, padding: int = 0):
        fan_in, fan_out = c_in * kernel * kernel, c_out * kernel * kernel
        self.w = parameter(_uniform(rng, (c_out, c_in, kernel, kernel), fan_in, fan_out))
        self.b = parameter(np.zeros(c_out))
        self.padding = padding

    def __call__(self, x: Tensor) -> Tensor:
        return conv2d(x, self.w, self.b, self.padding)


class LSTMCell(Module):
    """Standard LSTM cell with gates ordered input, forget, candidate, output."""

    def __init__(self, n_in: int, hidden: int, rng: np.random.Generator):
        self.hidden = hidden
        self.w = parameter(_uniform(rng, (n_in + hidden, 4 * hidden), n_in + hidden, 4 * hidden))
        b = np.zeros(4 * hidden)
        b[hidden:2 * hidden] = 1.0  # forget-gate bias
        self.b = parameter(b)

    def __call__(self, x: Tensor, state: tuple[Tensor, Tensor]) -> tuple[Tensor, Tensor]:
        h, c = state
        z = concat([x, h], axis=1) @ self.w + self.b
        n = self.hidden
        i = sigmoid(z[:, :n])
        f = sigmoid(z[:, n:2 * n])
        g = tanh(z[:, 2 * n:3 * n])
        o = sigmoid(z[:, 3 * n:])
        c_new = f * c + i * g
        return o * tanh(c_new), c_new

    def zero_state(self, batch: int) -> tuple[Tensor, Tensor]:
        return Tensor(np.zeros((batch, self.hidden))), Tensor(np.zeros((batch, self.hidden)))


@dataclass(frozen=True)
class CnnArchitecture:
    n_spots: int
    n_cols: int  # L + 3
    conv_channels: tuple[int, int] = (8, 16)
    kernel: int = 3
    fc_widths: tuple[int, int] = (256, 128)

    def flat_size(self) -> int:
        # padding k//2 keeps odd kernels size-preserving; each pool halves
        pad = self.kernel // 2
        h, w = self.n_spots, self.n_cols
        for _ in self.conv_channels:
            h = (h + 2 * pad - self.kernel + 1) // 2
            w = (w + 2 * pad - self.kernel + 1) // 2
        if h < 1 or w < 1:
            raise ParameterError("input too small for two pooling stages")
        return self.conv_channels[-1] * h * w


class CnnModel(Module):
    """Two conv+ReLU+max-pool modules followed by three dense layers."""

    def __init__(self, arch: CnnArchitecture, seed: int | None = 0):
        self.arch = arch
        self.seed = seed
        self.scale = 1000.0  # input/label normalization, m
        self.initialized = seed is not None
        rng = np.random.default_rng(0 if seed is None else seed)
        pad = arch.kernel // 2
        c1, c2 = arch.conv_channels
        self.convs = [Conv2d(1, c1, arch.kernel, rng, pad), Conv2d(c1, c2, arch.kernel, rng, pad)]
        w1, w2 = arch.fc_widths
        self.fcs = [Dense(arch.flat_size(), w1, rng), Dense(w1, w2, rng), Dense(w2, 2 * arch.n_spots, rng)]

    def forward(self, x) -> Tensor:
        """``x``: (B, N, L+3) normalized matrices. Returns (B, N, 2)."""
        if not self.initialized:
            raise StateError("model weights are not initialized")
        x = x if isinstance(x, Tensor) else Tensor(x)
        if x.shape[1:] != (self.arch.n_spots, self.arch.n_cols):
            raise ShapeError(f"expected inputs (B, {self.arch.n_spots}, {self.arch.n_cols}), got {x.shape}")
        h = x.reshape(x.shape[0], 1, *x.shape[1:])
        for conv in self.convs:
            h = maxpool2d(relu(conv(h)))
        h = h.reshape(h.shape[0], -1)
        h = relu(self.fcs[0](h))
        h = relu(self.fcs[1](h))
        return self.fcs[2](h).reshape(h.shape[0], self.arch.n_spots, 2)


@dataclass(frozen=True)
class Seq2SeqArchitecture:
    horizon: int
    hidden: int = 64
    n_features: int = 2


class Seq2SeqModel(Module):
    """Encoder LSTM -> repeated context -> decoder LSTM -> dense head.

    The decoder starts from the encoder's final state and receives the final
    encoder output as input at every step.
    """

    def __init__(self, arch: Seq2SeqArchitecture, seed: int | None = 0):
        if arch.horizon < 1:
            raise ParameterError("horizon must be >= 1")
        self.arch = arch
        self.seed = seed
        self.scale = 1000.0
        self.initialized = seed is not None
        rng = np.random.default_rng(0 if seed is None else seed)
        self.encoder = LSTMCell(arch.n_features, arch.hidden, rng)
        self.decoder = LSTMCell(arch.hidden, arch.hidden, rng)
        self.head = Dense(arch.hidden, arch.n_features, rng)

    def forward(self, x) -> Tensor:
        """``x``: (B, T, 2) normalized inputs. Returns (B, horizon, 2)."""
        if not self.initialized:
            raise StateError("model weights are not initialized")
        x = x if isinstance(x, Tensor) else Tensor(x)
        state = self.encoder.zero_state(x.shape[0])
        for t in range(x.shape[1]):
            state = self.encoder(x[:, t, :], state)
        context = state[0]
        outs = []
        for _ in range(self.arch.horizon):
            state = self.decoder(context, state)
            outs.append(self.head(state[0]))
        return concat([o.reshape(o.shape[0], 1, -1) for o in outs], axis=1)
