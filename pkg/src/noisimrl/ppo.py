"""Proximal policy optimization over the noise-insertion environment.

The trainer collects fixed-size batches of complete episodes, computes
generalized advantage estimates (the terminal reward is propagated backwards
through the discount), and performs several clipped-surrogate epochs per
batch with Adam on the flat weight vector.  Everything is driven by a single
numpy Generator, so runs are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from noisimrl.dm import fidelity, trace_distance
from noisimrl.env import REWARD_ALPHA, REWARD_EPS, NoiseInsertionEnv
from noisimrl.noise import apply_action, simulate
from noisimrl.policy import (
    PolicyNetwork,
    entropy,
    log_prob,
    log_prob_grads,
    sample_action,
)


@dataclass(frozen=True)
class PPOConfig:
    clip_ratio: float = 0.2
    learning_rate: float = 3e-4
    gamma: float = 0.99
    gae_lambda: float = 0.95
    epochs: int = 10
    batch_episodes: int = 16
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    alpha: float = REWARD_ALPHA
    reward_eps: float = REWARD_EPS
    normalize_advantages: bool = True


@dataclass
class EvalStats:
    fidelity_mean: float
    fidelity_std: float
    td_mean: float
    td_std: float


@dataclass
class HistoryEntry:
    episode: int
    train: EvalStats
    test: EvalStats


class Adam:
    """Flat-vector Adam optimizer."""

    def __init__(self, size: int, config: PPOConfig):
        self.config = config
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        c = self.config
        self.t += 1
        self.m = c.adam_beta1 * self.m + (1 - c.adam_beta1) * grad
        self.v = c.adam_beta2 * self.v + (1 - c.adam_beta2) * grad * grad
        m_hat = self.m / (1 - c.adam_beta1**self.t)
        v_hat = self.v / (1 - c.adam_beta2**self.t)
        return params - c.learning_rate * m_hat / (np.sqrt(v_hat) + c.adam_eps)


def compute_gae(rewards, values, gamma: float, lam: float):
    """Per-episode advantages and returns; terminal state bootstraps zero."""
    rewards = np.asarray(rewards, dtype=float)
    values = np.asarray(values, dtype=float)
    n = len(rewards)
    adv = np.zeros(n)
    last = 0.0
    for t in reversed(range(n)):
        next_value = values[t + 1] if t + 1 < n else 0.0
        delta = rewards[t] + gamma * next_value - values[t]
        last = delta + gamma * lam * last
        adv[t] = last
    return adv, adv + values


def ppo_loss_and_grad(net: PolicyNetwork, config: PPOConfig, batch: dict):
    """PPO loss and its flat gradient for one prepared batch.

    The batch must contain obs, raw, logp (at the behavior policy), adv
    (already normalized if desired) and ret.
    """
    c = config
    obs, raw = batch["obs"], batch["raw"]
    logp_old, ret, adv = batch["logp"], batch["ret"], batch["adv"]
    n = len(adv)
    mean, value, cache = net.forward(obs)
    log_std = net.params["log_std"]
    logp = log_prob(raw, mean, log_std)
    ratio = np.exp(logp - logp_old)
    clipped = np.clip(ratio, 1 - c.clip_ratio, 1 + c.clip_ratio)
    surr1 = ratio * adv
    surr2 = clipped * adv
    policy_loss = -float(np.mean(np.minimum(surr1, surr2)))
    value_err = value - ret
    value_loss = float(np.mean(value_err**2))
    ent = entropy(log_std)
    loss = policy_loss + c.value_coef * value_loss - c.entropy_coef * ent

    # gradient only flows through the unclipped branch of the minimum
    mask = (surr1 <= surr2).astype(float)
    dlogp = -(adv * ratio * mask) / n
    g_mean, g_log_std = log_prob_grads(raw, mean, log_std)
    dmean = dlogp[:, None] * g_mean
    dvalue = c.value_coef * 2.0 * value_err / n
    grads = net.backward(cache, dmean, dvalue)
    grads["log_std"] = (dlogp[:, None] * g_log_std).sum(axis=0) - c.entropy_coef
    flat_grad = np.concatenate([grads[k].ravel() for k in net._order()])
    stats = {"policy_loss": policy_loss, "value_loss": value_loss, "entropy": ent}
    return loss, flat_grad, stats


class PPOTrainer:
    def __init__(self, net: PolicyNetwork, config: PPOConfig, rng: np.random.Generator):
        self.net = net
        self.config = config
        self.rng = rng
        self.adam = Adam(net.spec.n_params, config)
        self.episodes_seen = 0

    # -- rollouts -----------------------------------------------------------

    def run_episode(self, circuit, target):
        """Sampled rollout; returns per-step arrays for the update."""
        env = NoiseInsertionEnv(
            circuit, target, k=self.net.spec.window,
            alpha=self.config.alpha, eps=self.config.reward_eps,
        )
        obs = env.reset()
        log_std = self.net.params["log_std"]
        observations, raws, logps, values, rewards = [], [], [], [], []
        done = False
        td = None
        while not done:
            mean, value, _ = self.net.forward(obs)
            raw, clipped = sample_action(mean, log_std, self.rng)
            observations.append(obs)
            raws.append(raw)
            logps.append(log_prob(raw, mean, log_std))
            values.append(value)
            action = clipped.reshape(circuit.n_qubits, 4)
            obs, reward, done, td = env.step(action)
            rewards.append(reward)
        return {
            "obs": np.array(observations),
            "raw": np.array(raws),
            "logp": np.array(logps),
            "value": np.array(values),
            "reward": np.array(rewards),
            "td": td,
        }

    def collect(self, pairs) -> dict:
        """Roll out one batch; `pairs` is the training list of (circuit, dm)."""
        batch = {k: [] for k in ("obs", "raw", "logp", "adv", "ret")}
        tds = []
        for _ in range(self.config.batch_episodes):
            circuit, target = pairs[int(self.rng.integers(len(pairs)))]
            ep = self.run_episode(circuit, target)
            adv, ret = compute_gae(
                ep["reward"], ep["value"], self.config.gamma, self.config.gae_lambda
            )
            batch["obs"].append(ep["obs"])
            batch["raw"].append(ep["raw"])
            batch["logp"].append(ep["logp"])
            batch["adv"].append(adv)
            batch["ret"].append(ret)
            tds.append(ep["td"])
            self.episodes_seen += 1
        out = {k: np.concatenate(v) for k, v in batch.items()}
        out["td_mean"] = float(np.mean(tds))
        return out

    # -- updates ------------------------------------------------------------

    def update(self, batch: dict) -> dict:
        """Run the clipped-surrogate epochs on one collected batch."""
        c = self.config
        obs, raw = batch["obs"], batch["raw"]
        logp_old, ret = batch["logp"], batch["ret"]
        adv = batch["adv"]
        if c.normalize_advantages:
            with np.errstate(invalid="ignore"):
                adv = (adv - adv.mean()) / (adv.std() + 1e-8)
        stats = {}
        prepared = {"obs": obs, "raw": raw, "logp": logp_old, "adv": adv, "ret": ret}
        for _ in range(c.epochs):
            backup = self.net.to_flat()
            loss, flat_grad, step_stats = ppo_loss_and_grad(self.net, c, prepared)
            if not (np.isfinite(loss) and np.all(np.isfinite(flat_grad))):
                self.net.from_flat(backup)
                stats["skipped"] = stats.get("skipped", 0) + 1
                continue
            new_flat = self.adam.step(self.net.to_flat(), flat_grad)
            if not np.all(np.isfinite(new_flat)):
                self.net.from_flat(backup)
                stats["skipped"] = stats.get("skipped", 0) + 1
                continue
            self.net.from_flat(new_flat)
            stats = {"loss": loss, "skipped": stats.get("skipped", 0), **step_stats}
        return stats

    # -- deterministic inference ---------------------------------------------

    def predict_noise(self, circuit):
        return predict_noise(self.net, circuit)

    def evaluate(self, pairs) -> EvalStats:
        return evaluate_policy(self.net, pairs)


def predict_noise(net: PolicyNetwork, circuit):
    """Greedy rollout: insert the mean action at every moment."""
    working = circuit.copy()
    for moment in working.moments:
        moment.noise[:] = 0.0
    from noisimrl.circuits import ENC_DEP, encode_qcr, window as qcr_window

    qcr = encode_qcr(working)
    for t in range(working.depth):
        obs = qcr_window(qcr, t, net.spec.window)
        mean, _, _ = net.forward(obs)
        apply_action(working, t, mean.reshape(working.n_qubits, 4))
        qcr[:, t, ENC_DEP:] = working.moments[t].noise
    return working


def evaluate_policy(net: PolicyNetwork, pairs) -> EvalStats:
    fids, tds = [], []
    for circuit, target in pairs:
        rho = simulate(predict_noise(net, circuit))
        fids.append(fidelity(rho, target))
        tds.append(trace_distance(rho, target))
    return EvalStats(
        fidelity_mean=float(np.mean(fids)),
        fidelity_std=float(np.std(fids)),
        td_mean=float(np.mean(tds)),
        td_std=float(np.std(tds)),
    )


@dataclass
class TrainResult:
    history: list
    best_weights: np.ndarray
    best_test_fidelity: float
    train_pairs: list
    test_pairs: list


def split_dataset(pairs, rng: np.random.Generator, test_fraction: float = 0.2):
    order = rng.permutation(len(pairs))
    n_test = max(1, int(round(len(pairs) * test_fraction)))
    test_idx = set(order[:n_test].tolist())
    train = [p for i, p in enumerate(pairs) if i not in test_idx]
    test = [p for i, p in enumerate(pairs) if i in test_idx]
    return train, test


def train(
    net: PolicyNetwork,
    pairs,
    config: PPOConfig,
    rng: np.random.Generator,
    episodes: int,
    eval_interval: int = 2000,
    log=None,
) -> TrainResult:
    """Full training loop with periodic train/test evaluation.

    The best checkpoint by test fidelity is kept; `log`, if given, is called
    with each :class:`HistoryEntry`.
    """
    train_pairs, test_pairs = split_dataset(pairs, rng)
    trainer = PPOTrainer(net, config, rng)
    history = []
    best_flat = net.to_flat()
    best_fid = -1.0
    next_eval = 0
    while trainer.episodes_seen < episodes:
        if trainer.episodes_seen >= next_eval:
            entry = HistoryEntry(
                episode=trainer.episodes_seen,
                train=trainer.evaluate(train_pairs),
                test=trainer.evaluate(test_pairs),
            )
            history.append(entry)
            if log is not None:
                log(entry)
            if entry.test.fidelity_mean > best_fid:
                best_fid = entry.test.fidelity_mean
                best_flat = net.to_flat()
            next_eval += eval_interval
        batch = trainer.collect(train_pairs)
        trainer.update(batch)
    final = HistoryEntry(
        episode=trainer.episodes_seen,
        train=trainer.evaluate(train_pairs),
        test=trainer.evaluate(test_pairs),
    )
    history.append(final)
    if log is not None:
        log(final)
    if final.test.fidelity_mean > best_fid:
        best_fid = final.test.fidelity_mean
        best_flat = net.to_flat()
    return TrainResult(
        history=history,
        best_weights=best_flat,
        best_test_fidelity=best_fid,
        train_pairs=train_pairs,
        test_pairs=test_pairs,
    )
