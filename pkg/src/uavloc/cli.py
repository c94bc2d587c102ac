"""Command-line entry point: ``uavloc <subcommand> [options]``."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

import numpy as np

from .errors import UavLocError
from .harness.config import ESTIMATORS, PREDICTORS, EpisodeConfig, load_config
from .harness.dataset import Dataset, DatasetTemplate, generate_dataset
from .harness.episode import run_episode
from .harness.evaluate import evaluate, medians, scenario_matrix
from .learning.checkpoint import save_model
from .learning.training import DatasetSplit, TrainConfig, train_cnn, train_lstm
from .protocol import run_exchange
from .ranging import RangingConfig, add_awgn, delay_signal, estimate_tof, gen_zc


def _base_config(args) -> EpisodeConfig:
    cfg = load_config(args.config) if args.config else EpisodeConfig()
    changes = {}
    for flag, key in (("seed", "seed"), ("estimator", "estimator"), ("revolutions", "revolutions"),
                      ("predictor", "predictor"), ("cnn_model", "cnn_model"), ("lstm_model", "lstm_model")):
        value = getattr(args, flag, None)
        if value is not None:
            changes[key] = value
    return cfg.replace(**changes) if changes else cfg


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate_dataset(args) -> None:
    template = DatasetTemplate(n_spots=args.n_spots, meas_per_spot=args.meas_per_spot)
    ds = generate_dataset(args.n_samples, template, args.seed or 0)
    path = ds.save(_out(args) / "dataset.npz")
    print(f"wrote {len(ds)} samples to {path}")


def _train_config(args) -> TrainConfig:
    cfg = TrainConfig(seed=args.seed or 0)
    for key in ("lr", "max_epochs", "batch_size", "optimizer", "patience"):
        value = getattr(args, key)
        if value is not None:
            cfg = dataclasses.replace(cfg, **{key: value})
    return cfg


def cmd_train_cnn(args) -> None:
    ds = Dataset.load(args.dataset)
    split = DatasetSplit.random(len(ds), args.seed or 0)
    model = train_cnn(list(zip(ds.phis(), ds.tracks)), split, _train_config(args))
    out = _out(args)
    path = save_model(model, out / "cnn.npz")
    model.curve.to_csv(out / "cnn_curve.csv")
    print(f"wrote {path} ({model.n_parameters()} parameters)")


def cmd_train_lstm(args) -> None:
    ds = Dataset.load(args.dataset)
    split = DatasetSplit.random(len(ds), args.seed or 0)
    model = train_lstm(list(zip(ds.tracks, ds.futures)), split, _train_config(args), hidden=args.hidden)
    out = _out(args)
    path = save_model(model, out / "lstm.npz")
    model.curve.to_csv(out / "lstm_curve.csv")
    print(f"wrote {path} ({model.n_parameters()} parameters)")


def cmd_simulate(args) -> None:
    cfg = _base_config(args)
    log = run_episode(cfg)
    out = _out(args)
    path = log.write_summary(out / "summary.json")
    log.write_controller_trace(out / "controller_trace.csv")
    log.write_tracks(out / "tracks.csv")
    for r in log.records:
        print(f"rev {r.index:3d}  rho {r.params.rho:7.2f}  mean_error {r.error.mean:9.3f}  si {r.error.si:.3f}")
    print(f"wrote {path}")


def cmd_evaluate(args) -> None:
    cfg = _base_config(args)
    rows = evaluate(scenario_matrix(cfg), episodes=args.episodes, seed=cfg.seed, out=_out(args) / "evaluation.csv")
    err, si = medians(rows, "mean_error"), medians(rows, "si")
    for name in err:
        print(f"{name:22s} median error {err[name]:9.3f}  median si {si[name]:.3f}")


def cmd_range_demo(args) -> None:
    rng = np.random.default_rng(args.seed or 0)
    base = RangingConfig()
    seq = gen_zc(base.root_q, base.n_zc)
    path = _out(args) / "range_demo.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["true_delay", "estimated_delay", "K", "snr_db"])
        for k in args.k:
            cfg = dataclasses.replace(base, upsample_k=k)
            for _ in range(args.trials):
                delay = rng.uniform(0.0, 50.0)
                rx = add_awgn(delay_signal(seq.samples, delay), args.snr, rng)
                est = estimate_tof(seq, rx, cfg)
                w.writerow([repr(delay), repr(est.delay_samples), k, repr(float(args.snr))])
    print(f"wrote {path}")


def cmd_protocol_demo(args) -> None:
    ex = run_exchange()
    lines = ex.transcript_lines()
    for line in lines:
        print(line)
    if args.out:
        (_out(args) / "protocol_transcript.txt").write_text("\n".join(lines) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uavloc", description="Single-anchor UAV localization simulator")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_default="out"):
        sp.add_argument("--config", help="INI configuration file")
        sp.add_argument("--seed", type=int, help="master seed")
        sp.add_argument("--out", default=out_default, help="output directory")
        return sp

    def train_opts(sp):
        sp.add_argument("--dataset", required=True, help="dataset .npz from generate-dataset")
        sp.add_argument("--lr", type=float)
        sp.add_argument("--max-epochs", dest="max_epochs", type=int)
        sp.add_argument("--batch-size", dest="batch_size", type=int)
        sp.add_argument("--patience", type=int)
        sp.add_argument("--optimizer", choices=("sgd", "adam"))

    def episode_opts(sp):
        sp.add_argument("--estimator", choices=ESTIMATORS)
        sp.add_argument("--predictor", choices=PREDICTORS)
        sp.add_argument("--revolutions", type=int)
        sp.add_argument("--cnn-model", dest="cnn_model")
        sp.add_argument("--lstm-model", dest="lstm_model")

    sp = common(sub.add_parser("generate-dataset", help="simulate training revolutions"))
    sp.add_argument("--n-samples", dest="n_samples", type=int, default=5000)
    sp.add_argument("--n-spots", dest="n_spots", type=int, default=100)
    sp.add_argument("--meas-per-spot", dest="meas_per_spot", type=int, default=100)
    sp.set_defaults(func=cmd_generate_dataset)

    sp = common(sub.add_parser("train-cnn", help="train the track regressor"))
    train_opts(sp)
    sp.set_defaults(func=cmd_train_cnn)

    sp = common(sub.add_parser("train-lstm", help="train the track forecaster"))
    train_opts(sp)
    sp.add_argument("--hidden", type=int, default=64)
    sp.set_defaults(func=cmd_train_lstm)

    sp = common(sub.add_parser("simulate", help="run one closed-loop episode"))
    episode_opts(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = common(sub.add_parser("evaluate", help="run the scenario sweeps"))
    episode_opts(sp)
    sp.add_argument("--episodes", type=int, default=5)
    sp.set_defaults(func=cmd_evaluate)

    sp = common(sub.add_parser("range-demo", help="ToF estimation trials"))
    sp.add_argument("--snr", type=float, default=20.0)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--k", type=int, nargs="+", default=[1, 2, 4, 8])
    sp.set_defaults(func=cmd_range_demo)

    sp = common(sub.add_parser("protocol-demo", help="print the identity-capture exchange"), out_default=None)
    sp.set_defaults(func=cmd_protocol_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except UavLocError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
