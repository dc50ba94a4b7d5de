"""Command-line entry point for training, evaluation, sweeps, and
built-in numerical self-checks."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import agents, harness, nn, validation
from .harness import ConfigError, ExperimentConfig


def _base_config(args) -> ExperimentConfig:
    config = harness.load_config_file(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if getattr(args, "algo", None):
        overrides["algorithm"] = args.algo
    if getattr(args, "epochs", None):
        overrides["train_epochs"] = args.epochs
    if getattr(args, "out", None):
        overrides["out_dir"] = args.out
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    return harness.apply_overrides(config, overrides)


def _seeds(args, config: ExperimentConfig) -> tuple[int, ...]:
    if args.seed is not None:
        return (args.seed,)
    return config.seeds


def cmd_train(args) -> int:
    config = _base_config(args)
    for seed in _seeds(args, config):
        records, _ = harness.run_training(config, seed, config.out_dir)
        final = records[-1]
        print(
            f"trained {config.algorithm} seed {seed}: "
            f"final moving-average reward {final.ma_reward:.4f}"
        )
    return 0


def cmd_eval(args) -> int:
    config = _base_config(args)
    seed = args.seed if args.seed is not None else config.seeds[0]
    means = harness.run_evaluation(Path(args.checkpoint), config, seed)
    for key in ("weighted_cost", "reward", "aoi", "energy", "traffic"):
        print(f"{key}: {means[key]:.6f}")
    return 0


def cmd_sweep(args) -> int:
    config = _base_config(args)
    values = [float(v) if args.param in ("omega1", "omega2") else int(v) for v in args.values]
    rows, failures = harness.run_sweep(config, args.param, values, _seeds(args, config), config.out_dir)
    print(f"sweep {args.param}: {len(rows)} rows, {len(failures)} failed cells")
    for failure in failures:
        print(f"  failed {failure['param']}={failure['value']} seed {failure['seed']}: {failure['error']}")
    return 0 if not failures else 1


def cmd_validate_energy(args) -> int:
    betas = np.logspace(-2, 4, args.grid)
    err_energy = validation.energy_model_grid_error(betas)
    err_tail = validation.tail_integral_grid_error()
    print(f"energy closed form vs quadrature: max relative error {err_energy:.3e}")
    print(f"tail integral vs quadrature:      max relative error {err_tail:.3e}")
    ok = err_energy < 1e-6 and err_tail < 1e-9
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _selftest_sampler(rng) -> float:
    """Worst per-block TV distance of perturbed-argmax samples, 3 policies."""
    worst = 0.0
    for _ in range(3):
        probs = rng.dirichlet(np.ones(7), size=2)
        draws = agents.gumbel_max_sample(probs, rng, size=20000)
        for b in range(2):
            freq = np.bincount(draws[:, b], minlength=7) / draws.shape[0]
            worst = max(worst, 0.5 * float(np.abs(freq - probs[b]).sum()))
    return worst


def _selftest_gradients(rng) -> float:
    """Worst finite-difference error over small critic and policy losses."""
    worst = 0.0
    for _ in range(3):
        net = nn.MlpParams.init([5, 4, 4, 4, 1], rng)
        x = rng.normal(size=(6, 5))
        y = rng.normal(size=6)
        _, grads = agents.critic_loss(net, x, y)
        fd = validation.finite_difference_grad(lambda: agents.critic_loss(net, x, y)[0], net)
        analytic = np.concatenate([g.ravel() for g in grads])
        worst = max(worst, validation.gradcheck_error(analytic, fd))
    for _ in range(3):
        policy = nn.MlpParams.init([4, 4, 4, 4, 6], rng)
        critic = nn.MlpParams.init([4 + 6, 4, 4, 4, 1], rng)
        state = rng.normal(size=(5, 4))
        noise = nn.gumbel_noise((5, 2, 3), rng)

        def loss():
            value, _, _ = agents.policy_loss(
                [policy], [critic], state, state, 0.3, 1.0, noise, "sample", 2, 3
            )
            return value

        _, grads, _ = agents.policy_loss(
            [policy], [critic], state, state, 0.3, 1.0, noise, "sample", 2, 3
        )
        fd = validation.finite_difference_grad(loss, policy)
        analytic = np.concatenate([g.ravel() for g in grads[0]])
        worst = max(worst, validation.gradcheck_error(analytic, fd))
    return worst


def cmd_selftest(args) -> int:
    rng = np.random.default_rng(0)
    tv = _selftest_sampler(rng)
    print(f"sampler fidelity: worst block TV distance {tv:.4f} (limit 0.02)")
    grad_err = _selftest_gradients(rng)
    print(f"gradient check:   worst relative error {grad_err:.2e} (limit 1e-4)")
    ok = tv < 0.02 and grad_err < 1e-4
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aoicache",
        description="Edge cache update experiments: simulate, train, evaluate, sweep.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, checkpoint=False):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--seed", type=int, help="single seed override")
        p.add_argument("--out", help="output directory")
        p.add_argument("--algo", choices=harness.ALGORITHMS, help="algorithm override")
        p.add_argument("--epochs", type=int, help="training epochs override")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="dotted config override, repeatable")
        if checkpoint:
            p.add_argument("checkpoint", help="checkpoint JSON to evaluate")

    train = sub.add_parser("train", help="train one run per seed")
    common(train)
    train.set_defaults(func=cmd_train)

    evaluate = sub.add_parser("eval", help="evaluate a checkpoint greedily")
    common(evaluate, checkpoint=True)
    evaluate.set_defaults(func=cmd_eval)

    sweep = sub.add_parser("sweep", help="train and evaluate across parameter values")
    common(sweep)
    sweep.add_argument("--param", required=True, choices=sorted(harness.SWEEP_PARAMS))
    sweep.add_argument("--values", required=True, nargs="+")
    sweep.set_defaults(func=cmd_sweep)

    vec = sub.add_parser("validate-energy", help="cross-check the energy model by quadrature")
    vec.add_argument("--grid", type=int, default=17, help="number of beta grid points")
    vec.set_defaults(func=cmd_validate_energy)

    selftest = sub.add_parser("selftest", help="run sampler and gradient sanity checks")
    selftest.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, agents.IntractableActionSpaceError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(parser.format_usage(), end="", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
