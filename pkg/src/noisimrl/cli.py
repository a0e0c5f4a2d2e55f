"""Command-line entry point.

Subcommands: gen-dataset, rb, train, eval, apply.  Each reads an experiment
config (JSON) and writes its artifacts - delimited data plus rendered
figures - into the output directory.  Exit codes: 0 success, 2 configuration
error, 3 data error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisimrl",
        description="Learn a quantum noise model with reinforcement learning.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("gen-dataset", "generate the training dataset of circuits and targets"),
        ("rb", "characterize the ground-truth noise with randomized benchmarking"),
        ("train", "train the noise-insertion agent with PPO"),
        ("eval", "benchmark the trained agent against the baselines"),
        ("apply", "apply the learned noise model to a circuit"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--threads", type=int, default=None, help="BLAS thread cap")
        p.add_argument(
            "--profile", choices=("desk", "paper"), default="desk",
            help="workload size (default: desk)",
        )
        p.add_argument("--out", default=".", help="output directory (default: cwd)")
        if name == "apply":
            p.add_argument(
                "--input", required=True,
                help="circuit JSON file, or builtin:qft / builtin:grover",
            )
    return parser


def _set_threads(n):
    if n is None:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = str(n)


def _seed_of(cfg, args) -> int:
    return cfg.seed if args.seed is None else args.seed


def _rb_path(out):
    return os.path.join(out, "rb.json")


def _load_or_run_rb(cfg, out, rng):
    """Reuse an existing RB report when present, otherwise characterize now."""
    import numpy as np

    from noisimrl.noise import PRESETS, apply_ground_truth
    from noisimrl.rb import rb_characterize

    path = _rb_path(out)
    if os.path.exists(path):
        with open(path) as f:
            return float(json.load(f)["p"]), None
    spec = PRESETS[cfg.noise_model]
    result = rb_characterize(
        lambda c: apply_ground_truth(c, spec),
        cfg.n_qubits,
        rng,
        depths=cfg.rb.depths,
        replicates=cfg.rb.replicates,
    )
    return result.fit.p, result


def cmd_gen_dataset(cfg, args) -> None:
    from noisimrl.dataset import generate_dataset, save_dataset
    from noisimrl.noise import PRESETS

    ds = generate_dataset(
        cfg.n_qubits,
        cfg.dataset.count,
        cfg.dataset.depth,
        PRESETS[cfg.noise_model],
        seed=_seed_of(cfg, args),
    )
    path = os.path.join(args.out, cfg.dataset.path)
    save_dataset(ds, path)
    print(f"wrote {len(ds)} circuits to {path}")


def cmd_rb(cfg, args) -> None:
    import numpy as np

    from noisimrl.noise import PRESETS, apply_ground_truth
    from noisimrl.plots import plot_rb_decay
    from noisimrl.rb import rb_characterize

    rng = np.random.default_rng(_seed_of(cfg, args))
    spec = PRESETS[cfg.noise_model]
    result = rb_characterize(
        lambda c: apply_ground_truth(c, spec),
        cfg.n_qubits,
        rng,
        depths=cfg.rb.depths,
        replicates=cfg.rb.replicates,
    )
    record = {
        "n_qubits": cfg.n_qubits,
        "noise_model": cfg.noise_model,
        "seed": _seed_of(cfg, args),
        "a": result.fit.a,
        "p": result.fit.p,
        "b": result.fit.b,
        "depths": list(result.fit.depths),
        "mean_survivals": list(result.fit.mean_survivals),
        "samples": {str(k): v for k, v in result.samples.items()},
    }
    with open(_rb_path(args.out), "w") as f:
        json.dump(record, f, sort_keys=True, indent=2)
        f.write("\n")
    plot_rb_decay(result, os.path.join(args.out, "rb_decay.png"))
    print(f"RB decay p = {result.fit.p:.4f}; wrote rb.json and rb_decay.png")


def _policy_spec(cfg, p_max):
    from noisimrl.policy import PolicySpec

    return PolicySpec(
        n_qubits=cfg.n_qubits,
        window=cfg.policy.window,
        conv_filters=cfg.policy.conv_filters,
        feature_dim=cfg.policy.feature_dim,
        hidden_dim=cfg.policy.hidden_dim,
        p_max=p_max,
    )


def cmd_train(cfg, args) -> None:
    import numpy as np

    from noisimrl.dataset import load_dataset, save_checkpoint
    from noisimrl.plots import plot_training_history
    from noisimrl.policy import PolicyNetwork
    from noisimrl.ppo import PPOConfig, train

    seed = _seed_of(cfg, args)
    rng = np.random.default_rng(seed)
    ds = load_dataset(os.path.join(args.out, cfg.dataset.path))
    rb_p, _ = _load_or_run_rb(cfg, args.out, rng)
    p_max = cfg.policy.p_max if cfg.policy.p_max is not None else 2 * (1 - rb_p)
    net = PolicyNetwork(_policy_spec(cfg, p_max), rng)
    ppo_config = PPOConfig(**cfg.training.ppo)
    episodes = cfg.training.episodes(args.profile)

    def log(entry):
        print(
            f"episode {entry.episode}: "
            f"train fidelity {entry.train.fidelity_mean:.4f} "
            f"(sd {entry.train.fidelity_std:.4f}), "
            f"test fidelity {entry.test.fidelity_mean:.4f} "
            f"(sd {entry.test.fidelity_std:.4f})"
        )

    result = train(
        net, ds.pairs(), ppo_config, rng, episodes,
        eval_interval=cfg.training.eval_interval, log=log,
    )
    net.from_flat(result.best_weights)
    save_checkpoint(
        os.path.join(args.out, "checkpoint.json"),
        net,
        {
            "episodes": episodes,
            "seed": seed,
            "profile": args.profile,
            "noise_model": cfg.noise_model,
            "rb_p": rb_p,
            "best_test_fidelity": result.best_test_fidelity,
        },
    )
    with open(os.path.join(args.out, "history.csv"), "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(
            ["episode", "train_fidelity", "train_fidelity_std", "test_fidelity",
             "test_fidelity_std", "train_td", "train_td_std", "test_td", "test_td_std"]
        )
        for e in result.history:
            writer.writerow(
                [e.episode, e.train.fidelity_mean, e.train.fidelity_std,
                 e.test.fidelity_mean, e.test.fidelity_std,
                 e.train.td_mean, e.train.td_std, e.test.td_mean, e.test.td_std]
            )
    plot_training_history(result.history, os.path.join(args.out, "training_curve.png"))
    print(f"best test fidelity {result.best_test_fidelity:.4f}; wrote checkpoint.json")


def _models(cfg, net, rb_p):
    from noisimrl.evalbench import (
        ground_truth_model, learned_model, mms_model, no_noise_model, rb_baseline,
    )
    from noisimrl.noise import PRESETS

    return [
        learned_model(net),
        rb_baseline(rb_p),
        ground_truth_model(PRESETS[cfg.noise_model]),
        no_noise_model(),
        mms_model(),
    ]


def cmd_eval(cfg, args) -> None:
    import numpy as np

    from noisimrl.dataset import load_checkpoint
    from noisimrl.evalbench import (
        EvalReport, algorithm_case_study, depth_sweep, export_report,
    )
    from noisimrl.generators import random_clifford_circuit
    from noisimrl.noise import PRESETS, apply_ground_truth, simulate
    from noisimrl.plots import (
        plot_case_heatmaps, plot_case_probabilities, plot_depth_sweep,
    )

    seed = _seed_of(cfg, args)
    rng = np.random.default_rng(seed)
    net, meta = load_checkpoint(os.path.join(args.out, "checkpoint.json"))
    rb_p, _ = _load_or_run_rb(cfg, args.out, rng)
    spec = PRESETS[cfg.noise_model]
    models = _models(cfg, net, rb_p)

    cases = []
    for depth in cfg.eval.depths:
        for i in range(cfg.eval.circuits_per_depth):
            c = random_clifford_circuit(cfg.n_qubits, depth, rng)
            cases.append((depth, i, c, simulate(apply_ground_truth(c, spec))))
    rows = depth_sweep(models, cases)

    studies = []
    if cfg.n_qubits == 3:
        from noisimrl.transpile import build_grover_11, build_qft, transpile

        for name, source in (("qft", build_qft(3)), ("grover", build_grover_11())):
            circuit = transpile(source, 3)
            target = simulate(apply_ground_truth(circuit, spec))
            studies.append(algorithm_case_study(name, models, circuit, target))

    report = EvalReport(
        rows=rows,
        case_studies=studies,
        metadata={"seed": seed, "noise_model": cfg.noise_model, "rb_p": rb_p,
                  "checkpoint": meta},
    )
    export_report(
        report,
        os.path.join(args.out, "eval.csv"),
        os.path.join(args.out, "eval.json"),
    )
    plot_depth_sweep(rows, os.path.join(args.out, "depth_sweep.png"))
    for study in studies:
        plot_case_probabilities(
            study, os.path.join(args.out, f"{study.name}_probabilities.png")
        )
        plot_case_heatmaps(study, os.path.join(args.out, f"{study.name}_heatmaps.png"))
    print(f"wrote eval.csv / eval.json and figures for {len(rows)} rows")


def cmd_apply(cfg, args) -> None:
    from noisimrl.circuits import Circuit
    from noisimrl.dataset import (
        circuit_from_dict, circuit_to_dict, dm_to_nested, load_checkpoint,
    )
    from noisimrl.dm import computational_probabilities
    from noisimrl.errors import DataError
    from noisimrl.noise import simulate
    from noisimrl.ppo import predict_noise

    net, _ = load_checkpoint(os.path.join(args.out, "checkpoint.json"))
    if args.input.startswith("builtin:"):
        from noisimrl.transpile import build_grover_11, build_qft, transpile

        name = args.input.split(":", 1)[1]
        if name == "qft":
            circuit = transpile(build_qft(cfg.n_qubits), cfg.n_qubits)
        elif name == "grover":
            circuit = transpile(build_grover_11(), 3)
        else:
            raise DataError(f"unknown builtin circuit {name!r}")
    else:
        try:
            with open(args.input) as f:
                circuit = circuit_from_dict(json.load(f))
        except FileNotFoundError as exc:
            raise DataError(f"circuit file not found: {args.input}") from exc
        except json.JSONDecodeError as exc:
            raise DataError(f"circuit file is not valid JSON: {exc}") from exc
    if circuit.n_qubits != net.spec.n_qubits:
        raise DataError(
            f"circuit has {circuit.n_qubits} qubits but the checkpoint expects "
            f"{net.spec.n_qubits}"
        )
    noisy = predict_noise(net, circuit)
    rho = simulate(noisy)
    record = {
        "circuit": circuit_to_dict(noisy),
        "density_matrix": dm_to_nested(rho),
        "probabilities": [float(p) for p in computational_probabilities(rho)],
    }
    path = os.path.join(args.out, "applied.json")
    with open(path, "w") as f:
        json.dump(record, f, sort_keys=True)
        f.write("\n")
    print(f"wrote {path}")


COMMANDS = {
    "gen-dataset": cmd_gen_dataset,
    "rb": cmd_rb,
    "train": cmd_train,
    "eval": cmd_eval,
    "apply": cmd_apply,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _set_threads(args.threads)

    from noisimrl.config import load_config
    from noisimrl.errors import ConfigError, DataError, NumericalError

    try:
        cfg = load_config(args.config)
        os.makedirs(args.out, exist_ok=True)
        COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
