"""Model checkpoints: an ``.npz`` of named parameter blocks plus a text sidecar."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import ConfigurationError
from .nn import CnnArchitecture, CnnModel, Seq2SeqArchitecture, Seq2SeqModel

FORMAT_VERSION = 1


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".meta.txt")


def save_model(model, path) -> Path:
    path = Path(path).with_suffix(".npz")
    path.parent.mkdir(parents=True, exist_ok=True)
    blocks = {f"param/{k}": v for k, v in model.get_weights().items()}
    np.savez(path, format_version=np.array(FORMAT_VERSION), **blocks)
    if isinstance(model, CnnModel):
        a = model.arch
        meta = {
            "architecture": "cnn",
            "n_spots": a.n_spots,
            "n_cols": a.n_cols,
            "conv_channels": ",".join(map(str, a.conv_channels)),
            "kernel": a.kernel,
            "fc_widths": ",".join(map(str, a.fc_widths)),
        }
    elif isinstance(model, Seq2SeqModel):
        meta = {"architecture": "seq2seq", "horizon": model.arch.horizon, "hidden": model.arch.hidden}
    else:
        raise ConfigurationError(f"cannot checkpoint {type(model).__name__}")
    meta.update(format_version=FORMAT_VERSION, scale=repr(float(model.scale)), seed=model.seed)
    with open(_sidecar(path), "w") as fh:
        for k, v in meta.items():
            fh.write(f"{k} = {v}\n")
    return path


def read_metadata(path) -> dict[str, str]:
    meta = {}
    with open(_sidecar(Path(path).with_suffix(".npz"))) as fh:
        for line in fh:
            if "=" in line:
                k, v = line.split("=", 1)
                meta[k.strip()] = v.strip()
    return meta


def load_model(path):
    path = Path(path).with_suffix(".npz")
    if not path.exists() or not _sidecar(path).exists():
        raise ConfigurationError(f"model checkpoint {path} not found")
    meta = read_metadata(path)
    if int(meta.get("format_version", -1)) != FORMAT_VERSION:
        raise ConfigurationError(f"unsupported checkpoint version {meta.get('format_version')}")
    if meta["architecture"] == "cnn":
        arch = CnnArchitecture(
            n_spots=int(meta["n_spots"]),
            n_cols=int(meta["n_cols"]),
            conv_channels=tuple(int(v) for v in meta["conv_channels"].split(",")),
            kernel=int(meta["kernel"]),
            fc_widths=tuple(int(v) for v in meta["fc_widths"].split(",")),
        )
        model = CnnModel(arch, seed=0)
    elif meta["architecture"] == "seq2seq":
        model = Seq2SeqModel(Seq2SeqArchitecture(horizon=int(meta["horizon"]), hidden=int(meta["hidden"])), seed=0)
    else:
        raise ConfigurationError(f"unknown architecture {meta['architecture']!r}")
    with np.load(path) as data:
        model.set_weights({k[len("param/"):]: data[k] for k in data.files if k.startswith("param/")})
    model.scale = float(meta["scale"])
    model.seed = None if meta["seed"] == "None" else int(meta["seed"])
    return model
