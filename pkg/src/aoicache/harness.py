"""Experiment orchestration: seeded training runs, greedy evaluation,
parameter sweeps, and CSV/JSON emission."""

from __future__ import annotations

import dataclasses
import json
import subprocess
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__, agents, env

ALGORITHMS = ("madsac_cc", "madsac_dc", "dqn", "ac", "random", "age_optimal")

METRICS_HEADER = "epoch,reward,ma_reward,aoi,energy,traffic,alpha,loss_q,loss_pi,loss_alpha"
SWEEP_HEADER = "param,param_value,seed,metric,value"
SWEEP_METRICS = ("weighted_cost", "reward", "aoi", "energy", "traffic")

MOVING_AVERAGE_WINDOW = 5000

# seed-sequence keys for run-level streams (agents use their own)
_KEY_BUFFER = 40
_KEY_TRAIN_TRAJ = 50
_KEY_EVAL_TRAJ = 51
_KEY_EVAL_ACT = 52


class ConfigError(ValueError):
    """Malformed experiment configuration or config file."""


@dataclass(frozen=True)
class ExperimentConfig:
    """A reproducible experiment: scenario + algorithm + training knobs."""

    scenario: env.NetworkConfig = field(default_factory=env.NetworkConfig)
    algorithm: str = "madsac_cc"
    hyper: agents.TrainingHyper = field(default_factory=agents.TrainingHyper)
    train_epochs: int = 20000
    eval_epochs: int = 10000
    seeds: tuple[int, ...] = (1,)
    out_dir: str = "runs"
    record_stride: int = 1

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.train_epochs < 1 or self.eval_epochs < 1:
            raise ConfigError("train_epochs and eval_epochs must be positive")
        if self.record_stride < 1:
            raise ConfigError("record_stride must be positive")


@dataclass
class MetricsRecord:
    epoch: int
    reward: float
    ma_reward: float
    aoi: float
    energy: float
    traffic: float
    alpha: float
    loss_q: float
    loss_pi: float
    loss_alpha: float

    def csv_row(self) -> str:
        vals = [
            self.reward, self.ma_reward, self.aoi, self.energy, self.traffic,
            self.alpha, self.loss_q, self.loss_pi, self.loss_alpha,
        ]
        return f"{self.epoch}," + ",".join(repr(v) for v in vals)


def moving_average(rewards: np.ndarray, epoch: int, window: int = MOVING_AVERAGE_WINDOW) -> float:
    """Mean of the last min(window, epoch) rewards ending at `epoch` (1-based)."""
    lo = max(epoch - window, 0)
    return float(np.mean(rewards[lo:epoch]))


def build_agent(config: ExperimentConfig, seed: int):
    scenario = config.scenario
    if config.algorithm == "age_optimal":
        scenario = replace(scenario, weight_energy=0.0, weight_traffic=0.0)
    if config.algorithm in ("madsac_cc", "age_optimal"):
        return agents.MadsacAgent(scenario, config.hyper, config.train_epochs, seed)
    if config.algorithm == "madsac_dc":
        return agents.MadsacAgent(scenario, config.hyper, config.train_epochs, seed, decentralized=True)
    if config.algorithm == "dqn":
        return agents.DqnAgent(scenario, config.hyper, config.train_epochs, seed)
    if config.algorithm == "ac":
        return agents.AcAgent(scenario, config.hyper, config.train_epochs, seed)
    if config.algorithm == "random":
        return agents.RandomPolicy(scenario, seed)
    raise ConfigError(f"unknown algorithm {config.algorithm!r}")


def _training_env(config: ExperimentConfig, seed: int) -> env.SensingEnv:
    scenario = config.scenario
    if config.algorithm == "age_optimal":
        scenario = replace(scenario, weight_energy=0.0, weight_traffic=0.0)
    traj = int(np.random.SeedSequence([seed, _KEY_TRAIN_TRAJ]).generate_state(1)[0])
    return env.SensingEnv(scenario, scenario_seed=seed, trajectory_seed=traj)


def _evaluation_env(config: ExperimentConfig, seed: int) -> env.SensingEnv:
    # same physical scenario as training (topology, sizes, skews), fresh
    # request randomness; parts are reported unweighted so age_optimal
    # checkpoints stay comparable to everyone else
    traj = int(np.random.SeedSequence([seed, _KEY_EVAL_TRAJ]).generate_state(1)[0])
    return env.SensingEnv(config.scenario, scenario_seed=seed, trajectory_seed=traj)


def run_training(config: ExperimentConfig, seed: int, out_dir: str | Path | None = None):
    """Train one seeded run; returns (records, agent) and writes
    metrics_<algo>_<seed>.csv, checkpoint_<algo>_<seed>.json, and the
    run manifest when out_dir is given."""
    sim = _training_env(config, seed)
    sim.reset()
    agent = build_agent(config, seed)
    buffer = agents.ReplayBuffer(
        config.hyper.buffer_capacity, agents.component_rng(seed, _KEY_BUFFER)
    )
    rewards = np.empty(config.train_epochs)
    records: list[MetricsRecord] = []
    for epoch in range(1, config.train_epochs + 1):
        m = agent.train_step(sim, buffer)
        rewards[epoch - 1] = m["reward"]
        if epoch % config.record_stride == 0:
            parts = m["parts"]
            records.append(
                MetricsRecord(
                    epoch,
                    m["reward"],
                    moving_average(rewards, epoch),
                    parts.aoi,
                    parts.energy,
                    parts.traffic,
                    m["alpha"],
                    m["loss_q"],
                    m["loss_pi"],
                    m["loss_alpha"],
                )
            )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_metrics_csv(out / f"metrics_{config.algorithm}_{seed}.csv", records)
        write_checkpoint(out / f"checkpoint_{config.algorithm}_{seed}.json", agent, config, seed)
        write_manifest(out / f"manifest_{config.algorithm}_{seed}.json", config, seed)
    return records, agent


def run_evaluation(agent_or_checkpoint, config: ExperimentConfig, seed: int) -> dict:
    """Greedy rollout over eval_epochs; returns per-criterion means.

    Stochastic policies execute their own hard samples; DQN uses pure
    argmax; the random baseline redraws uniform updates.
    """
    agent = agent_or_checkpoint
    if isinstance(agent_or_checkpoint, (str, Path, dict)):
        agent = load_checkpoint(agent_or_checkpoint, config, seed)
    # fresh action stream so an agent and its reloaded checkpoint evaluate
    # identically regardless of rng state left over from training
    agent.set_action_rng(agents.component_rng(seed, _KEY_EVAL_ACT))
    sim = _evaluation_env(config, seed)
    sim.reset()
    total = {"reward": 0.0, "aoi": 0.0, "energy": 0.0, "traffic": 0.0, "weighted_cost": 0.0}
    w1, w2 = config.scenario.weight_energy, config.scenario.weight_traffic
    for _ in range(config.eval_epochs):
        if isinstance(agent, agents.DqnAgent):
            action = agent.act(sim, greedy=True)
        else:
            action = agent.act(sim)
        _, _, parts = sim.step(action)
        cost = parts.aoi + w1 * parts.energy + w2 * parts.traffic
        total["reward"] += -cost
        total["weighted_cost"] += cost
        total["aoi"] += parts.aoi
        total["energy"] += parts.energy
        total["traffic"] += parts.traffic
    return {k: v / config.eval_epochs for k, v in total.items()}


SWEEP_PARAMS = {
    "num_ens": ("scenario", "num_ens", int),
    "sensors_per_en": ("scenario", "sensors_per_en", int),
    "omega1": ("scenario", "weight_energy", float),
    "omega2": ("scenario", "weight_traffic", float),
}


def apply_sweep_value(config: ExperimentConfig, param: str, value) -> ExperimentConfig:
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"unknown sweep parameter {param!r}; choose from {sorted(SWEEP_PARAMS)}")
    _, fieldname, cast = SWEEP_PARAMS[param]
    return replace(config, scenario=replace(config.scenario, **{fieldname: cast(value)}))


def run_sweep(
    config: ExperimentConfig,
    param: str,
    values,
    seeds,
    out_dir: str | Path | None = None,
):
    """Train and evaluate per (value, seed); returns tidy rows and failures.

    A failing cell is recorded and the sweep moves on.
    """
    if not values:
        raise ConfigError("sweep needs at least one value")
    rows: list[tuple] = []
    failures: list[dict] = []
    for value in values:
        cell_config = apply_sweep_value(config, param, value)
        for seed in seeds:
            try:
                _, agent = run_training(cell_config, seed)
                means = run_evaluation(agent, cell_config, seed)
            except Exception as exc:  # noqa: BLE001 - cell isolation is the point
                failures.append({"param": param, "value": value, "seed": seed, "error": str(exc)})
                continue
            for metric in SWEEP_METRICS:
                rows.append((param, value, seed, metric, means[metric]))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_sweep_csv(out / f"sweep_{param}.csv", rows)
        if failures:
            (out / f"sweep_{param}_failures.json").write_text(json.dumps(failures, indent=2))
    return rows, failures


def sweep_cell_means(rows, param_value, metric) -> list[float]:
    return [r[4] for r in rows if r[1] == param_value and r[3] == metric]


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def write_metrics_csv(path: str | Path, records: list[MetricsRecord]) -> None:
    lines = [METRICS_HEADER] + [r.csv_row() for r in records]
    Path(path).write_text("\n".join(lines) + "\n")


def write_sweep_csv(path: str | Path, rows) -> None:
    lines = [SWEEP_HEADER] + [
        f"{p},{v!r},{s},{m},{x!r}" for p, v, s, m, x in rows
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def write_checkpoint(path: str | Path, agent, config: ExperimentConfig, seed: int) -> None:
    data = agent.to_checkpoint()
    data["format"] = 1
    data["seed"] = seed
    data["config"] = config_to_flat(config)
    Path(path).write_text(json.dumps(data))


def load_checkpoint(source, config: ExperimentConfig, seed: int):
    if isinstance(source, (str, Path)):
        data = json.loads(Path(source).read_text())
    else:
        data = source
    algorithm = data["algorithm"]
    if algorithm != config.algorithm and not (
        algorithm == "madsac_cc" and config.algorithm == "age_optimal"
    ):
        raise ConfigError(
            f"checkpoint algorithm {algorithm!r} does not match config {config.algorithm!r}"
        )
    agent = build_agent(config, seed)
    try:
        agent.load_checkpoint(data)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"checkpoint incompatible with scenario: {exc}") from exc
    check = getattr(agent, "policy_nets", None)
    if check is not None:
        expected = env.policy_logit_dim(config.scenario)
        got = sum(p.out_dim for p in check)
        if got != expected:
            raise ConfigError(
                f"checkpoint policy emits {got} logits but the scenario needs {expected}"
            )
    return agent


def build_identifier() -> str:
    try:
        rev = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            capture_output=True, text=True, timeout=5, cwd=Path(__file__).parent,
        ).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        rev = ""
    return f"aoicache-{__version__}" + (f"+{rev}" if rev else "")


def write_manifest(path: str | Path, config: ExperimentConfig, seed: int) -> None:
    data = {
        "build": build_identifier(),
        "seed": seed,
        "config": config_to_flat(config),
    }
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# flat dotted-key config format
# ---------------------------------------------------------------------------


def config_to_flat(config: ExperimentConfig) -> dict:
    """Flatten to dotted keys; tuples render as comma-joined strings."""
    flat: dict[str, object] = {}

    def put(prefix, obj):
        for f in dataclasses.fields(obj):
            value = getattr(obj, f.name)
            if dataclasses.is_dataclass(value):
                put(f"{prefix}{f.name}.", value)
            elif isinstance(value, tuple):
                flat[f"{prefix}{f.name}"] = ",".join(str(v) for v in value)
            else:
                flat[f"{prefix}{f.name}"] = value
    put("", config)
    return flat


def _parse_scalar(text: str):
    text = text.strip()
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    if text.lower() in ("none", ""):
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _coerce(value, target):
    """Cast a parsed scalar/string to the type of the dataclass default."""
    if value is None or target is None:
        return value
    if isinstance(target, bool):
        return bool(value)
    if isinstance(target, int) and not isinstance(value, bool):
        return int(value)
    if isinstance(target, float):
        return float(value)
    if isinstance(target, tuple):
        parts = [p for p in str(value).split(",") if p.strip() != ""]
        cast = float if (target and isinstance(target[0], float)) else _parse_scalar
        return tuple(cast(p) for p in parts)
    return value


def apply_overrides(config: ExperimentConfig, overrides: dict[str, object]) -> ExperimentConfig:
    """Apply dotted-key overrides like scenario.num_ens=3 or train_epochs=500."""
    scenario_kw, hyper_kw, top_kw = {}, {}, {}
    for key, raw in overrides.items():
        if key.startswith("scenario."):
            group, name = scenario_kw, key[len("scenario."):]
            current = getattr(config.scenario, name, None)
            known = hasattr(config.scenario, name)
        elif key.startswith("hyper."):
            group, name = hyper_kw, key[len("hyper."):]
            current = getattr(config.hyper, name, None)
            known = hasattr(config.hyper, name)
        else:
            group, name = top_kw, key
            current = getattr(config, name, None)
            known = name in {f.name for f in dataclasses.fields(config)}
        if not known:
            raise ConfigError(f"unknown config key {key!r}")
        group[name] = _coerce(_parse_scalar(str(raw)) if isinstance(raw, str) else raw, current)
    if "seeds" in top_kw and top_kw["seeds"] is not None:
        seeds = top_kw["seeds"]
        top_kw["seeds"] = tuple(int(s) for s in (seeds if isinstance(seeds, tuple) else (seeds,)))
    scenario = replace(config.scenario, **scenario_kw) if scenario_kw else config.scenario
    hyper = replace(config.hyper, **hyper_kw) if hyper_kw else config.hyper
    try:
        return replace(config, scenario=scenario, hyper=hyper, **top_kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config_file(path: str | Path) -> ExperimentConfig:
    """Read the flat key=value format; '#' starts a comment, blanks skipped."""
    overrides: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, value = stripped.split("=", 1)
        overrides[key.strip()] = value.strip()
    return apply_overrides(ExperimentConfig(), overrides)
