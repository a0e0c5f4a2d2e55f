"""Actor-critic policy over circuit-representation windows.

The network is a small convolutional trunk shared by a Gaussian actor and a
scalar critic, implemented directly on numpy float64 arrays with hand-written
backpropagation so that training is fully deterministic given a seed and
checkpoints are plain flat weight vectors.

Layout: the observation is a window of k moments of the circuit tensor,
shape [n_qubits, k, 8].  A full-height kernel (all qubits x 3 moments x 8
channels) slides along the moment axis with zero padding, followed by a dense
feature layer; the actor maps features to per-channel means squashed into
(0, p_max) by a scaled logistic, with a learnable state-independent log-sigma
vector, and the critic maps features to a scalar value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from noisimrl.errors import DataError

LOG_2PI = float(np.log(2 * np.pi))


@dataclass(frozen=True)
class PolicySpec:
    """Architecture hyperparameters; fully determines the weight layout."""

    n_qubits: int
    window: int = 3
    conv_filters: int = 16
    feature_dim: int = 64
    hidden_dim: int = 256
    p_max: float = 0.04

    def __post_init__(self):
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError(f"window must be odd and positive, got {self.window}")
        if self.p_max <= 0:
            raise ValueError(f"p_max must be positive, got {self.p_max}")

    @property
    def action_dim(self) -> int:
        return self.n_qubits * 4

    @property
    def obs_shape(self) -> tuple:
        return (self.n_qubits, self.window, 8)

    def shape_table(self) -> dict:
        nq, k = self.n_qubits, self.window
        f, d, h, a = self.conv_filters, self.feature_dim, self.hidden_dim, self.action_dim
        return {
            "conv_w": (f, nq * 3 * 8),
            "conv_b": (f,),
            "feat_w": (k * f, d),
            "feat_b": (d,),
            "actor1_w": (d, h),
            "actor1_b": (h,),
            "actor2_w": (h, a),
            "actor2_b": (a,),
            "critic1_w": (d, h),
            "critic1_b": (h,),
            "critic2_w": (h, 1),
            "critic2_b": (1,),
            "log_std": (a,),
        }

    @property
    def n_params(self) -> int:
        return sum(int(np.prod(s)) for s in self.shape_table().values())


def _relu(x):
    return np.maximum(x, 0.0)


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


class PolicyNetwork:
    """Parameter container with batched forward and backward passes."""

    def __init__(self, spec: PolicySpec, rng: np.random.Generator = None):
        self.spec = spec
        self.params = {}
        table = spec.shape_table()
        for name, shape in table.items():
            self.params[name] = np.zeros(shape)
        if rng is not None:
            self.init_weights(rng)

    def init_weights(self, rng: np.random.Generator, init_std_frac: float = 0.25):
        """Scaled-Gaussian init; the final actor layer stays near zero so the
        initial action mean sits at p_max / 2."""
        for name, w in self.params.items():
            if name.endswith("_w"):
                fan_in = w.shape[0]
                w[:] = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=w.shape)
        self.params["actor2_w"] *= 0.01
        self.params["log_std"][:] = np.log(self.spec.p_max * init_std_frac)

    # -- flat vector round trip -------------------------------------------

    def to_flat(self) -> np.ndarray:
        return np.concatenate([self.params[k].ravel() for k in self._order()])

    def from_flat(self, flat: np.ndarray) -> None:
        flat = np.asarray(flat, dtype=float)
        if flat.shape != (self.spec.n_params,):
            raise DataError(
                f"weight vector has {flat.shape} entries, expected {self.spec.n_params}"
            )
        i = 0
        for name in self._order():
            shape = self.params[name].shape
            size = int(np.prod(shape))
            self.params[name] = flat[i : i + size].reshape(shape).copy()
            i += size

    def _order(self):
        return list(self.spec.shape_table())

    def zero_grads(self) -> dict:
        return {k: np.zeros_like(v) for k, v in self.params.items()}

    # -- forward ------------------------------------------------------------

    def _patches(self, obs: np.ndarray) -> np.ndarray:
        """[B, k, nq*3*8] im2col of the moment axis with zero padding."""
        b, nq, k, c = obs.shape
        padded = np.zeros((b, nq, k + 2, c))
        padded[:, :, 1:-1, :] = obs
        cols = np.stack(
            [padded[:, :, t : t + 3, :].reshape(b, -1) for t in range(k)], axis=1
        )
        return cols

    def forward(self, obs: np.ndarray):
        """Return (mean [B, A], value [B], cache)."""
        obs = np.asarray(obs, dtype=float)
        squeeze = obs.ndim == 3
        if squeeze:
            obs = obs[None]
        if obs.shape[1:] != self.spec.obs_shape:
            raise DataError(
                f"observation shape {obs.shape[1:]} != {self.spec.obs_shape}"
            )
        p = self.params
        cols = self._patches(obs)  # [B, k, nq*3*8]
        conv_z = cols @ p["conv_w"].T + p["conv_b"]  # [B, k, F]
        conv_a = _relu(conv_z)
        flat = conv_a.reshape(obs.shape[0], -1)  # [B, k*F]
        feat_z = flat @ p["feat_w"] + p["feat_b"]
        feat = _relu(feat_z)
        a1_z = feat @ p["actor1_w"] + p["actor1_b"]
        a1 = _relu(a1_z)
        a2 = a1 @ p["actor2_w"] + p["actor2_b"]
        sig = _sigmoid(a2)
        mean = self.spec.p_max * sig
        c1_z = feat @ p["critic1_w"] + p["critic1_b"]
        c1 = _relu(c1_z)
        value = (c1 @ p["critic2_w"] + p["critic2_b"])[:, 0]
        cache = {
            "cols": cols,
            "conv_z": conv_z,
            "conv_a": conv_a,
            "flat": flat,
            "feat_z": feat_z,
            "feat": feat,
            "a1_z": a1_z,
            "a1": a1,
            "sig": sig,
            "c1_z": c1_z,
            "c1": c1,
            "squeeze": squeeze,
        }
        if squeeze:
            return mean[0], float(value[0]), cache
        return mean, value, cache

    # -- backward -----------------------------------------------------------

    def backward(self, cache: dict, dmean: np.ndarray, dvalue: np.ndarray) -> dict:
        """Gradients of sum(dmean * mean + dvalue * value) over the batch."""
        p = self.params
        dmean = np.asarray(dmean, dtype=float)
        dvalue = np.asarray(dvalue, dtype=float)
        if cache["squeeze"]:
            dmean = dmean[None]
            dvalue = np.atleast_1d(dvalue)
        grads = self.zero_grads()

        sig = cache["sig"]
        da2 = dmean * self.spec.p_max * sig * (1.0 - sig)  # [B, A]
        grads["actor2_w"] = cache["a1"].T @ da2
        grads["actor2_b"] = da2.sum(axis=0)
        da1 = (da2 @ p["actor2_w"].T) * (cache["a1_z"] > 0)
        grads["actor1_w"] = cache["feat"].T @ da1
        grads["actor1_b"] = da1.sum(axis=0)
        dfeat = da1 @ p["actor1_w"].T

        dv = dvalue[:, None]  # [B, 1]
        grads["critic2_w"] = cache["c1"].T @ dv
        grads["critic2_b"] = dv.sum(axis=0)
        dc1 = (dv @ p["critic2_w"].T) * (cache["c1_z"] > 0)
        grads["critic1_w"] = cache["feat"].T @ dc1
        grads["critic1_b"] = dc1.sum(axis=0)
        dfeat = dfeat + dc1 @ p["critic1_w"].T

        dfeat_z = dfeat * (cache["feat_z"] > 0)
        grads["feat_w"] = cache["flat"].T @ dfeat_z
        grads["feat_b"] = dfeat_z.sum(axis=0)
        dflat = dfeat_z @ p["feat_w"].T
        dconv_a = dflat.reshape(cache["conv_a"].shape)
        dconv_z = dconv_a * (cache["conv_z"] > 0)  # [B, k, F]
        grads["conv_w"] = np.einsum("bkf,bki->fi", dconv_z, cache["cols"])
        grads["conv_b"] = dconv_z.sum(axis=(0, 1))
        return grads


# -- Gaussian policy helpers --------------------------------------------------


def sample_action(mean, log_std, rng: np.random.Generator):
    """Draw a raw Gaussian action; the clipped copy goes to the environment.

    Returns (raw, clipped) where log-probabilities must be evaluated on `raw`
    so that importance ratios stay consistent across updates.
    """
    std = np.exp(log_std)
    raw = mean + std * rng.standard_normal(mean.shape)
    return raw, np.clip(raw, 0.0, None)


def log_prob(raw, mean, log_std):
    """Diagonal Gaussian log density, summed over action components."""
    z = (raw - mean) / np.exp(log_std)
    return np.sum(-0.5 * z * z - log_std - 0.5 * LOG_2PI, axis=-1)


def log_prob_grads(raw, mean, log_std):
    """d logpi / d mean and d logpi / d log_std, elementwise [..., A]."""
    inv_var = np.exp(-2.0 * log_std)
    diff = raw - mean
    dmean = diff * inv_var
    dlog_std = diff * diff * inv_var - 1.0
    return dmean, dlog_std


def entropy(log_std) -> float:
    """Entropy of the diagonal Gaussian (state independent)."""
    return float(np.sum(log_std + 0.5 * (1.0 + LOG_2PI)))
