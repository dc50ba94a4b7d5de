"""Learning agents for the cache update task.

Implements a discrete multi-agent soft actor-critic in centralized and
decentralized control variants, plus DQN and (entropy-free) actor-critic
baselines. Joint actions are factorized into one categorical block per
EN; actions are sampled with the Gumbel-Max trick, and the
Gumbel-Softmax relaxation carries policy gradients through the critics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import nn
from .env import NetworkConfig, SensingEnv, joint_action_count

LOG_PROB_FLOOR = -1e9

# seed-sequence component keys, so runs are reproducible piecewise
_KEY_Q1, _KEY_Q2, _KEY_POLICY, _KEY_EXPLORE, _KEY_NOISE = 10, 11, 20, 30, 31


class IntractableActionSpaceError(RuntimeError):
    """Enumerated joint action space exceeds the configured cap."""


def component_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *key]))


@dataclass
class TrainingHyper:
    """Optimization knobs; defaults follow the reference configuration."""

    hidden_width: int = 128
    q_lr: float = 0.01
    policy_lr: float = 0.001
    temperature_lr: float | None = None
    lr_power: float = 0.9
    lr_floor: float = 1e-5
    buffer_capacity: int = 5000
    batch_size: int = 100
    tau: float = 0.001
    gamma: float = 0.99
    gs_temperature: float = 1.0
    gs_temperature_final: float | None = None
    target_entropy_scale: float = 0.6
    initial_alpha: float = 0.2
    epsilon_start: float = 1.0
    epsilon_final: float = 0.05
    epsilon_fraction: float = 0.2
    dqn_action_cap: int = 5000

    def hidden_sizes(self) -> list[int]:
        return [self.hidden_width] * 3


# ---------------------------------------------------------------------------
# replay buffer
# ---------------------------------------------------------------------------


@dataclass
class Experience:
    """One transition; `obs` is a feature vector (centralized) or a
    (num_ens, local_dim) stack of per-agent observations (decentralized)."""

    obs: np.ndarray
    action: np.ndarray
    reward: float
    next_obs: np.ndarray


class ReplayBuffer:
    """Fixed-capacity ring; uniform mini-batches without replacement."""

    def __init__(self, capacity: int, rng):
        self.capacity = capacity
        self._items: list[Experience] = []
        self._cursor = 0
        self._rng = rng

    def __len__(self) -> int:
        return len(self._items)

    def add(self, item: Experience) -> None:
        if len(self._items) < self.capacity:
            self._items.append(item)
        else:
            self._items[self._cursor] = item
        self._cursor = (self._cursor + 1) % self.capacity

    def sample(self, n: int) -> list[Experience]:
        idx = self._rng.choice(len(self._items), size=n, replace=False)
        return [self._items[i] for i in idx]

    def snapshot(self) -> list[Experience]:
        return list(self._items)


# ---------------------------------------------------------------------------
# action sampling
# ---------------------------------------------------------------------------


def gumbel_max_sample(probs: np.ndarray, rng, size: int | None = None) -> np.ndarray:
    """Sample one index per categorical block by perturbed argmax.

    `probs` is (num_blocks, block_size) with each row a distribution.
    Returns (num_blocks,) indices, or (size, num_blocks) when `size` is
    given. Zero-probability entries get a large negative log so they are
    never selected against any finite competitor.
    """
    probs = np.asarray(probs, dtype=np.float64)
    logp = np.where(probs > 0.0, np.log(np.where(probs > 0.0, probs, 1.0)), LOG_PROB_FLOOR)
    shape = (probs.shape if size is None else (size, *probs.shape))
    noise = nn.gumbel_noise(shape, rng)
    return np.argmax(logp + noise, axis=-1)


@dataclass(frozen=True)
class RelaxedSample:
    """Gumbel-Softmax draw: simplex rows plus their argmax indices."""

    relaxed: np.ndarray
    hard: np.ndarray
    temperature: float


def _log_softmax_np(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def _softmax_np(x: np.ndarray) -> np.ndarray:
    return np.exp(_log_softmax_np(x))


def gs_sample(logits: np.ndarray, c0: float, rng, noise: np.ndarray | None = None) -> RelaxedSample:
    """Relaxed block sample z = softmax((log mu + g) / c0) per block row.

    As c0 shrinks the rows approach one-hot vectors whose index follows
    the block categorical exactly.
    """
    if c0 <= 0:
        raise ValueError("relaxation temperature must be positive")
    logits = np.asarray(logits, dtype=np.float64)
    logmu = _log_softmax_np(logits)
    if noise is None:
        noise = nn.gumbel_noise(logits.shape, rng)
    z = _softmax_np((logmu + noise) / c0)
    return RelaxedSample(z, np.argmax(z, axis=-1), c0)


def onehot_blocks(actions: np.ndarray, block_size: int) -> np.ndarray:
    """(N, B) block indices -> (N, B*block_size) concatenated one-hots."""
    actions = np.atleast_2d(actions)
    n, b = actions.shape
    out = np.zeros((n, b * block_size))
    cols = np.arange(b)[None, :] * block_size + actions
    out[np.arange(n)[:, None], cols] = 1.0
    return out


# ---------------------------------------------------------------------------
# loss builders
# ---------------------------------------------------------------------------


def _per_block_feats(feats) -> bool:
    # decentralized callers stack per-agent observations into a 3-d
    # (blocks, batch, local_dim) array; a shared net sees 2-d features
    return np.asarray(feats).ndim == 3


def policy_logits_value(nets, feats, num_blocks: int, block_size: int) -> np.ndarray:
    """(N, B, K) block logits; one shared net or one net per block."""
    if not _per_block_feats(feats):
        out = nn.forward(nets[0], feats)
        return out.reshape(-1, num_blocks, block_size)
    return np.stack([nn.forward(net, feats[b]) for b, net in enumerate(nets)], axis=1)


def _policy_logits_graph(nets, feats, num_blocks: int, block_size: int):
    if not _per_block_feats(feats):
        out, leaves = nn.mlp_graph(nets[0], feats)
        return nn.reshape(out, (-1, num_blocks, block_size)), [leaves]
    parts, groups = [], []
    for b, net in enumerate(nets):
        out, leaves = nn.mlp_graph(net, feats[b])
        parts.append(nn.reshape(out, (-1, 1, block_size)))
        groups.append(leaves)
    return nn.concat(parts, axis=1), groups


def _collect_grads(groups):
    return [nn.leaf_grads(leaves) for leaves in groups]


def policy_loss(nets, critics, pol_feats, critic_state, alpha, c0, noise, expectation, num_blocks, block_size):
    """Policy objective, its gradients, and per-row log pi values.

    In "sample" mode one relaxed action per batch row feeds the clipped
    critic pair and gradients flow through the relaxation; `noise` must
    hold the (N, blocks, block_size) Gumbel draw. In "enumerate" mode
    (single block only) the action expectation is taken exactly over the
    block, which is what small diagnostic problems want.
    """
    logits, leaf_groups = _policy_logits_graph(nets, pol_feats, num_blocks, block_size)
    logmu = nn.log_softmax_last(logits)
    if expectation == "sample":
        relaxed = nn.softmax_last(nn.mul(nn.add(logmu, noise), 1.0 / c0))
        logpi = nn.sum_axis(nn.sum_axis(nn.mul(relaxed, logmu), 2), 1)
        zflat = nn.reshape(relaxed, (-1, num_blocks * block_size))
        qin = nn.concat([critic_state, zflat], axis=1)
        qvals = [
            nn.reshape(nn.mlp_graph(qnet, qin, trainable=False)[0], (-1,))
            for qnet in critics
        ]
        qmin = qvals[0] if len(qvals) == 1 else nn.minimum(qvals[0], qvals[1])
        loss = nn.mean_all(nn.sub(nn.mul(logpi, alpha), qmin))
        logpi_values = logpi.value.copy()
    elif expectation == "enumerate":
        if num_blocks != 1:
            raise ValueError("exact action expectation is implemented for one block")
        n = critic_state.shape[0]
        qtable = np.empty((n, block_size))
        for k in range(block_size):
            onehot = np.zeros((n, block_size))
            onehot[:, k] = 1.0
            qin = np.concatenate([critic_state, onehot], axis=1)
            qk = np.stack([nn.forward(qnet, qin)[:, 0] for qnet in critics])
            qtable[:, k] = qk.min(axis=0)
        logmu2 = nn.reshape(logmu, (-1, block_size))
        probs = nn.softmax_last(logmu2)
        inner = nn.mul(probs, nn.sub(nn.mul(logmu2, alpha), qtable))
        loss = nn.mean_all(nn.sum_axis(inner, 1))
        logpi_values = (probs.value * logmu2.value).sum(axis=1)
    else:
        raise ValueError(f"unknown expectation mode {expectation!r}")
    nn.backward(loss)
    return float(loss.value), _collect_grads(leaf_groups), logpi_values


def critic_loss(net: nn.MlpParams, inputs: np.ndarray, targets: np.ndarray):
    """Mean squared error of the scalar critic against fixed targets."""
    out, leaves = nn.mlp_graph(net, inputs)
    pred = nn.reshape(out, (-1,))
    loss = nn.mean_all(nn.square(nn.sub(pred, targets)))
    nn.backward(loss)
    return float(loss.value), nn.leaf_grads(leaves)


def temperature_loss(log_alpha: float, logpi: np.ndarray, target_entropy: float):
    """Temperature objective J and dJ/d(log alpha).

    J(alpha) = mean(-alpha * (log pi + target_entropy)): its descent
    raises alpha while the policy entropy sits below the target and
    lowers it otherwise; the gradient vanishes when -mean(log pi) equals
    the target exactly.
    """
    la = nn.Var(np.asarray(log_alpha, dtype=np.float64))
    alpha = nn.vexp(la)
    loss = nn.mean_all(nn.mul(alpha, -(np.asarray(logpi) + target_entropy)))
    nn.backward(loss)
    return float(loss.value), float(la.grad)


def soft_q_target(
    rewards: np.ndarray,
    next_pol_feats,
    next_critic_state: np.ndarray,
    policy_nets,
    q1_target: nn.MlpParams,
    q2_target: nn.MlpParams,
    alpha: float,
    gamma: float,
    c0: float,
    rng,
    num_blocks: int,
    block_size: int,
) -> np.ndarray:
    """Bootstrapped soft targets y = r + gamma * (min Q^- - alpha log pi).

    Next actions are fresh relaxed samples from the current policy; no
    gradients flow anywhere here.
    """
    logits = policy_logits_value(policy_nets, next_pol_feats, num_blocks, block_size)
    logmu = _log_softmax_np(logits)
    noise = nn.gumbel_noise(logits.shape, rng)
    z = _softmax_np((logmu + noise) / c0)
    logpi = (z * logmu).sum(axis=(1, 2))
    qin = np.concatenate([next_critic_state, z.reshape(len(rewards), -1)], axis=1)
    qmin = np.minimum(nn.forward(q1_target, qin)[:, 0], nn.forward(q2_target, qin)[:, 0])
    return rewards + gamma * (qmin - alpha * logpi)


def update_q(q1, q2, adam1, adam2, rate, inputs, targets):
    """One Adam step on each critic against shared targets."""
    loss1, grads1 = critic_loss(q1, inputs, targets)
    nn.adam_step(q1.arrays(), grads1, adam1, rate)
    loss2, grads2 = critic_loss(q2, inputs, targets)
    nn.adam_step(q2.arrays(), grads2, adam2, rate)
    return loss1, loss2


def update_policy(
    nets,
    adams,
    rate,
    critics,
    pol_feats,
    critic_state,
    alpha,
    c0,
    rng=None,
    noise=None,
    expectation: str = "sample",
    num_blocks: int | None = None,
    block_size: int | None = None,
):
    """One Adam step on the policy nets; returns (loss, log pi values)."""
    if expectation == "sample" and noise is None:
        shape = (critic_state.shape[0], num_blocks, block_size)
        noise = nn.gumbel_noise(shape, rng)
    loss, grads, logpi = policy_loss(
        nets, critics, pol_feats, critic_state, alpha, c0, noise, expectation,
        num_blocks, block_size,
    )
    for net, adam, g in zip(nets, adams, grads):
        nn.adam_step(net.arrays(), g, adam, rate)
    return loss, logpi


def update_temperature(log_alpha: np.ndarray, adam, rate, logpi, target_entropy):
    """One Adam step on log alpha; returns the loss value."""
    loss, grad = temperature_loss(float(log_alpha), logpi, target_entropy)
    nn.adam_step([log_alpha], [np.asarray(grad)], adam, rate)
    return loss


def soft_copy(source: nn.MlpParams, target: nn.MlpParams, tau: float) -> None:
    """target <- tau * source + (1 - tau) * target, elementwise."""
    for s, t in zip(source.arrays(), target.arrays()):
        t *= 1.0 - tau
        t += tau * s


# ---------------------------------------------------------------------------
# agents
# ---------------------------------------------------------------------------


def _nan_metrics() -> dict:
    return {"loss_q": math.nan, "loss_pi": math.nan, "loss_alpha": math.nan}


class MadsacAgent:
    """Discrete soft actor-critic over factorized joint actions.

    Centralized mode drives all blocks from one policy net over the
    global features; decentralized mode keeps one policy net per EN over
    that EN's local observation, while the critics always see everything.
    """

    def __init__(
        self,
        config: NetworkConfig,
        hyper: TrainingHyper,
        total_steps: int,
        seed: int,
        decentralized: bool = False,
    ):
        self.config = config
        self.hyper = hyper
        self.decentralized = decentralized
        self.num_blocks = config.num_ens
        self.block_size = config.sensors_per_en + 1
        global_dim = config.num_sensors * (1 + config.num_ens)
        local_dim = 2 * config.num_sensors
        hid = hyper.hidden_sizes()
        act_dim = self.num_blocks * self.block_size
        if decentralized:
            self.policy_nets = [
                nn.MlpParams.init([local_dim, *hid, self.block_size], component_rng(seed, _KEY_POLICY, b))
                for b in range(config.num_ens)
            ]
            critic_in = config.num_ens * local_dim + act_dim
        else:
            self.policy_nets = [
                nn.MlpParams.init([global_dim, *hid, act_dim], component_rng(seed, _KEY_POLICY, 0))
            ]
            critic_in = global_dim + act_dim
        self.q1 = nn.MlpParams.init([critic_in, *hid, 1], component_rng(seed, _KEY_Q1))
        self.q2 = nn.MlpParams.init([critic_in, *hid, 1], component_rng(seed, _KEY_Q2))
        self.q1_target = self.q1.copy()
        self.q2_target = self.q2.copy()
        self.log_alpha = np.asarray(math.log(hyper.initial_alpha), dtype=np.float64)
        self.target_entropy = (
            hyper.target_entropy_scale * self.num_blocks * math.log(self.block_size)
        )
        self.adam_q1 = nn.AdamState.init(self.q1.arrays())
        self.adam_q2 = nn.AdamState.init(self.q2.arrays())
        self.adam_policy = [nn.AdamState.init(p.arrays()) for p in self.policy_nets]
        self.adam_alpha = nn.AdamState.init([self.log_alpha])
        self.q_schedule = nn.LrSchedule(hyper.q_lr, total_steps, hyper.lr_power, hyper.lr_floor)
        self.policy_schedule = nn.LrSchedule(
            hyper.policy_lr, total_steps, hyper.lr_power, hyper.lr_floor
        )
        alpha_lr = hyper.temperature_lr if hyper.temperature_lr is not None else hyper.policy_lr
        self.alpha_schedule = nn.LrSchedule(alpha_lr, total_steps, hyper.lr_power, hyper.lr_floor)
        self.total_steps = total_steps
        self.explore_rng = component_rng(seed, _KEY_EXPLORE)
        self.noise_rng = component_rng(seed, _KEY_NOISE)
        self.t = 0

    def set_action_rng(self, rng) -> None:
        self.explore_rng = rng

    # -- feature plumbing ---------------------------------------------------

    def observe(self, env: SensingEnv) -> np.ndarray:
        if self.decentralized:
            return np.stack(env.observe_all())
        return env.global_features()

    def _policy_feats(self, obs_batch: np.ndarray):
        if self.decentralized:
            return obs_batch.transpose(1, 0, 2)
        return obs_batch

    def _critic_state(self, obs_batch: np.ndarray) -> np.ndarray:
        if self.decentralized:
            return obs_batch.reshape(obs_batch.shape[0], -1)
        return obs_batch

    @property
    def alpha(self) -> float:
        return float(np.exp(self.log_alpha))

    def gs_temperature(self) -> float:
        c0 = self.hyper.gs_temperature
        final = self.hyper.gs_temperature_final
        if final is None or self.total_steps == 0:
            return c0
        frac = min(self.t / self.total_steps, 1.0)
        return c0 * (final / c0) ** frac

    # -- acting and learning ------------------------------------------------

    def act(self, env: SensingEnv) -> np.ndarray:
        obs = self.observe(env)
        logits = policy_logits_value(
            self.policy_nets, self._policy_feats(obs[None, ...]), self.num_blocks, self.block_size
        )[0]
        return gumbel_max_sample(_softmax_np(logits), self.explore_rng)

    def learn(self, batch: list[Experience]) -> dict:
        obs = np.stack([e.obs for e in batch])
        next_obs = np.stack([e.next_obs for e in batch])
        rewards = np.array([e.reward for e in batch])
        actions = np.stack([e.action for e in batch])
        action_hot = onehot_blocks(actions, self.block_size)
        c0 = self.gs_temperature()

        targets = soft_q_target(
            rewards,
            self._policy_feats(next_obs),
            self._critic_state(next_obs),
            self.policy_nets,
            self.q1_target,
            self.q2_target,
            self.alpha,
            self.hyper.gamma,
            c0,
            self.noise_rng,
            self.num_blocks,
            self.block_size,
        )
        q_in = np.concatenate([self._critic_state(obs), action_hot], axis=1)
        rate_q = self.q_schedule.rate(self.t)
        loss_q1, loss_q2 = update_q(
            self.q1, self.q2, self.adam_q1, self.adam_q2, rate_q, q_in, targets
        )
        loss_pi, logpi = update_policy(
            self.policy_nets,
            self.adam_policy,
            self.policy_schedule.rate(self.t),
            [self.q1, self.q2],
            self._policy_feats(obs),
            self._critic_state(obs),
            self.alpha,
            c0,
            rng=self.noise_rng,
            num_blocks=self.num_blocks,
            block_size=self.block_size,
        )
        loss_alpha = update_temperature(
            self.log_alpha,
            self.adam_alpha,
            self.alpha_schedule.rate(self.t),
            logpi,
            self.target_entropy,
        )
        soft_copy(self.q1, self.q1_target, self.hyper.tau)
        soft_copy(self.q2, self.q2_target, self.hyper.tau)
        return {
            "loss_q": 0.5 * (loss_q1 + loss_q2),
            "loss_pi": loss_pi,
            "loss_alpha": loss_alpha,
        }

    def train_step(self, env: SensingEnv, buffer: ReplayBuffer) -> dict:
        obs = self.observe(env)
        action = self.act(env)
        _, reward, parts = env.step(action)
        buffer.add(Experience(obs, action, reward, self.observe(env)))
        metrics = _nan_metrics()
        if len(buffer) >= self.hyper.batch_size:
            metrics = self.learn(buffer.sample(self.hyper.batch_size))
        self.t += 1
        metrics.update(reward=reward, parts=parts, alpha=self.alpha)
        return metrics

    # -- persistence ---------------------------------------------------------

    def to_checkpoint(self) -> dict:
        return {
            "algorithm": "madsac_dc" if self.decentralized else "madsac_cc",
            "policy": [p.to_dict() for p in self.policy_nets],
            "q1": self.q1.to_dict(),
            "q2": self.q2.to_dict(),
            "q1_target": self.q1_target.to_dict(),
            "q2_target": self.q2_target.to_dict(),
            "log_alpha": float(self.log_alpha),
            "steps": self.t,
        }

    def load_checkpoint(self, data: dict) -> None:
        self.policy_nets = [nn.MlpParams.from_dict(d) for d in data["policy"]]
        self.q1 = nn.MlpParams.from_dict(data["q1"])
        self.q2 = nn.MlpParams.from_dict(data["q2"])
        self.q1_target = nn.MlpParams.from_dict(data["q1_target"])
        self.q2_target = nn.MlpParams.from_dict(data["q2_target"])
        self.log_alpha = np.asarray(data["log_alpha"], dtype=np.float64)
        self.t = int(data["steps"])


class DqnAgent:
    """Q-learning over the enumerated joint action space.

    Only viable while (F+1)^B stays under the action cap; the constructor
    refuses configurations beyond it.
    """

    def __init__(self, config: NetworkConfig, hyper: TrainingHyper, total_steps: int, seed: int):
        self.config = config
        self.hyper = hyper
        self.num_actions = joint_action_count(config)
        if self.num_actions > hyper.dqn_action_cap:
            raise IntractableActionSpaceError(
                f"DQN needs one output per joint action: {self.num_actions} actions "
                f"for {config.num_ens} ENs x {config.sensors_per_en} sensors exceeds "
                f"the cap of {hyper.dqn_action_cap}"
            )
        global_dim = config.num_sensors * (1 + config.num_ens)
        self.qnet = nn.MlpParams.init(
            [global_dim, *hyper.hidden_sizes(), self.num_actions], component_rng(seed, _KEY_Q1)
        )
        self.q_target = self.qnet.copy()
        self.adam = nn.AdamState.init(self.qnet.arrays())
        self.schedule = nn.LrSchedule(hyper.q_lr, total_steps, hyper.lr_power, hyper.lr_floor)
        self.total_steps = total_steps
        self.explore_rng = component_rng(seed, _KEY_EXPLORE)
        self.t = 0

    def set_action_rng(self, rng) -> None:
        self.explore_rng = rng

    def decode_action(self, index: int) -> np.ndarray:
        base = self.config.sensors_per_en + 1
        out = np.empty(self.config.num_ens, dtype=np.int64)
        for b in range(self.config.num_ens):
            out[b] = index % base
            index //= base
        return out

    def encode_action(self, action: np.ndarray) -> int:
        base = self.config.sensors_per_en + 1
        return int(sum(int(a) * base**b for b, a in enumerate(action)))

    def epsilon(self) -> float:
        horizon = max(int(self.hyper.epsilon_fraction * self.total_steps), 1)
        frac = min(self.t / horizon, 1.0)
        return self.hyper.epsilon_start + frac * (
            self.hyper.epsilon_final - self.hyper.epsilon_start
        )

    def act(self, env: SensingEnv, greedy: bool = False) -> np.ndarray:
        if not greedy and self.explore_rng.random() < self.epsilon():
            return self.decode_action(int(self.explore_rng.integers(self.num_actions)))
        values = nn.forward(self.qnet, env.global_features())
        return self.decode_action(int(np.argmax(values)))

    def learn(self, batch: list[Experience]) -> dict:
        obs = np.stack([e.obs for e in batch])
        next_obs = np.stack([e.next_obs for e in batch])
        rewards = np.array([e.reward for e in batch])
        taken = np.zeros((len(batch), self.num_actions))
        for i, e in enumerate(batch):
            taken[i, self.encode_action(e.action)] = 1.0
        targets = rewards + self.hyper.gamma * nn.forward(self.q_target, next_obs).max(axis=1)
        out, leaves = nn.mlp_graph(self.qnet, obs)
        pred = nn.sum_axis(nn.mul(out, taken), 1)
        loss = nn.mean_all(nn.square(nn.sub(pred, targets)))
        nn.backward(loss)
        nn.adam_step(self.qnet.arrays(), nn.leaf_grads(leaves), self.adam, self.schedule.rate(self.t))
        soft_copy(self.qnet, self.q_target, self.hyper.tau)
        return {"loss_q": float(loss.value), "loss_pi": math.nan, "loss_alpha": math.nan}

    def train_step(self, env: SensingEnv, buffer: ReplayBuffer) -> dict:
        obs = env.global_features()
        action = self.act(env)
        _, reward, parts = env.step(action)
        buffer.add(Experience(obs, action, reward, env.global_features()))
        metrics = _nan_metrics()
        if len(buffer) >= self.hyper.batch_size:
            metrics = self.learn(buffer.sample(self.hyper.batch_size))
        self.t += 1
        metrics.update(reward=reward, parts=parts, alpha=math.nan)
        return metrics

    def to_checkpoint(self) -> dict:
        return {
            "algorithm": "dqn",
            "qnet": self.qnet.to_dict(),
            "q_target": self.q_target.to_dict(),
            "steps": self.t,
        }

    def load_checkpoint(self, data: dict) -> None:
        self.qnet = nn.MlpParams.from_dict(data["qnet"])
        self.q_target = nn.MlpParams.from_dict(data["q_target"])
        self.t = int(data["steps"])


class AcAgent:
    """Deterministic-gradient actor-critic baseline, no entropy bonus.

    Shares the factorized action layout and relaxation machinery with the
    soft agents but trains a single critic and explores only through its
    stochastic policy.
    """

    def __init__(self, config: NetworkConfig, hyper: TrainingHyper, total_steps: int, seed: int):
        self.config = config
        self.hyper = hyper
        self.num_blocks = config.num_ens
        self.block_size = config.sensors_per_en + 1
        global_dim = config.num_sensors * (1 + config.num_ens)
        hid = hyper.hidden_sizes()
        act_dim = self.num_blocks * self.block_size
        self.policy = nn.MlpParams.init(
            [global_dim, *hid, act_dim], component_rng(seed, _KEY_POLICY, 0)
        )
        self.q1 = nn.MlpParams.init([global_dim + act_dim, *hid, 1], component_rng(seed, _KEY_Q1))
        self.q_target = self.q1.copy()
        self.adam_q = nn.AdamState.init(self.q1.arrays())
        self.adam_policy = nn.AdamState.init(self.policy.arrays())
        self.q_schedule = nn.LrSchedule(hyper.q_lr, total_steps, hyper.lr_power, hyper.lr_floor)
        self.policy_schedule = nn.LrSchedule(
            hyper.policy_lr, total_steps, hyper.lr_power, hyper.lr_floor
        )
        self.explore_rng = component_rng(seed, _KEY_EXPLORE)
        self.noise_rng = component_rng(seed, _KEY_NOISE)
        self.t = 0

    def set_action_rng(self, rng) -> None:
        self.explore_rng = rng

    def act(self, env: SensingEnv) -> np.ndarray:
        logits = nn.forward(self.policy, env.global_features()).reshape(
            self.num_blocks, self.block_size
        )
        return gumbel_max_sample(_softmax_np(logits), self.explore_rng)

    def learn(self, batch: list[Experience]) -> dict:
        obs = np.stack([e.obs for e in batch])
        next_obs = np.stack([e.next_obs for e in batch])
        rewards = np.array([e.reward for e in batch])
        actions = np.stack([e.action for e in batch])
        c0 = self.hyper.gs_temperature
        targets = soft_q_target(
            rewards,
            next_obs,
            next_obs,
            [self.policy],
            self.q_target,
            self.q_target,
            0.0,
            self.hyper.gamma,
            c0,
            self.noise_rng,
            self.num_blocks,
            self.block_size,
        )
        q_in = np.concatenate([obs, onehot_blocks(actions, self.block_size)], axis=1)
        loss_q, grads = critic_loss(self.q1, q_in, targets)
        nn.adam_step(self.q1.arrays(), grads, self.adam_q, self.q_schedule.rate(self.t))
        loss_pi, _ = update_policy(
            [self.policy],
            [self.adam_policy],
            self.policy_schedule.rate(self.t),
            [self.q1],
            obs,
            obs,
            0.0,
            c0,
            rng=self.noise_rng,
            num_blocks=self.num_blocks,
            block_size=self.block_size,
        )
        soft_copy(self.q1, self.q_target, self.hyper.tau)
        return {"loss_q": loss_q, "loss_pi": loss_pi, "loss_alpha": math.nan}

    def train_step(self, env: SensingEnv, buffer: ReplayBuffer) -> dict:
        obs = env.global_features()
        action = self.act(env)
        _, reward, parts = env.step(action)
        buffer.add(Experience(obs, action, reward, env.global_features()))
        metrics = _nan_metrics()
        if len(buffer) >= self.hyper.batch_size:
            metrics = self.learn(buffer.sample(self.hyper.batch_size))
        self.t += 1
        metrics.update(reward=reward, parts=parts, alpha=math.nan)
        return metrics

    def to_checkpoint(self) -> dict:
        return {
            "algorithm": "ac",
            "policy": self.policy.to_dict(),
            "q1": self.q1.to_dict(),
            "q_target": self.q_target.to_dict(),
            "steps": self.t,
        }

    def load_checkpoint(self, data: dict) -> None:
        self.policy = nn.MlpParams.from_dict(data["policy"])
        self.q1 = nn.MlpParams.from_dict(data["q1"])
        self.q_target = nn.MlpParams.from_dict(data["q_target"])
        self.t = int(data["steps"])


class RandomPolicy:
    """Updates one uniformly chosen content per EN every epoch."""

    def __init__(self, config: NetworkConfig, seed: int):
        self.config = config
        self.rng = component_rng(seed, _KEY_EXPLORE)
        self.t = 0

    def set_action_rng(self, rng) -> None:
        self.rng = rng

    def act(self, env: SensingEnv) -> np.ndarray:
        return self.rng.integers(1, self.config.sensors_per_en + 1, size=self.config.num_ens)

    def train_step(self, env: SensingEnv, buffer: ReplayBuffer) -> dict:
        action = self.act(env)
        _, reward, parts = env.step(action)
        self.t += 1
        metrics = _nan_metrics()
        metrics.update(reward=reward, parts=parts, alpha=math.nan)
        return metrics

    def to_checkpoint(self) -> dict:
        return {"algorithm": "random", "steps": self.t}

    def load_checkpoint(self, data: dict) -> None:
        self.t = int(data["steps"])
