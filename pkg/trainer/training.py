"""Fit an MLP to mesh samples and export a spelunk weight file."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import torch

from meshio import Mesh
from sampling import sample_training_points


class TrainingDiverged(Exception):
    """Final training loss is not finite."""


@dataclass
class TrainingConfig:
    mode: str = "sdf"  # or "occupancy"
    activation: str = "relu"  # or "elu"
    hidden_layers: int = 7
    width: int = 32
    epochs: int = 100
    batch: int = 512
    lr: float = 1e-2  # decays x0.1 at epoch 50
    n_samples: int = 20_000
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("sdf", "occupancy"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.activation not in ("relu", "elu"):
            raise ValueError(f"unknown activation {self.activation!r}")


def build_model(config: TrainingConfig) -> torch.nn.Sequential:
    act = {"relu": torch.nn.ReLU, "elu": torch.nn.ELU}[config.activation]
    layers: list[torch.nn.Module] = [torch.nn.Linear(3, config.width), act()]
    for _ in range(config.hidden_layers - 1):
        layers += [torch.nn.Linear(config.width, config.width), act()]
    layers.append(torch.nn.Linear(config.width, 1))
    return torch.nn.Sequential(*layers)


def fit(mesh: Mesh, config: TrainingConfig):
    """Train the MLP; returns (model, final_epoch_loss).

    SDF targets train under an L1 penalty; occupancy trains the logits with
    cross-entropy against outside labels (positive logit = outside, so the
    sign convention matches signed distances). Single-threaded torch keeps
    runs bit-reproducible for a fixed seed.
    """
    torch.manual_seed(config.seed)
    torch.set_num_threads(1)
    points, targets = sample_training_points(
        mesh, config.n_samples, config.seed, mode=config.mode
    )
    x = torch.tensor(points, dtype=torch.float64)
    y = torch.tensor(targets[:, None], dtype=torch.float64)
    loss_fn = (
        torch.nn.L1Loss() if config.mode == "sdf" else torch.nn.BCEWithLogitsLoss()
    )
    model = build_model(config).double()
    opt = torch.optim.Adam(model.parameters(), lr=config.lr)
    sched = torch.optim.lr_scheduler.StepLR(opt, step_size=50, gamma=0.1)
    n = len(x)
    final = math.inf
    for _ in range(config.epochs):
        perm = torch.randperm(n)
        total = 0.0
        for s in range(0, n, config.batch):
            idx = perm[s : s + config.batch]
            opt.zero_grad()
            loss = loss_fn(model(x[idx]), y[idx])
            loss.backward()
            opt.step()
            total += loss.item() * len(idx)
        sched.step()
        final = total / n
    if not math.isfinite(final):
        raise TrainingDiverged(f"final loss {final}")
    return model, final


def export_weights(model, config: TrainingConfig, name: str, path, final_loss):
    """Write the network in the weight-file schema the query engine loads."""
    layers = []
    for mod in model:
        if isinstance(mod, torch.nn.Linear):
            layers.append(
                {
                    "type": "dense",
                    "weights": mod.weight.detach().numpy().tolist(),
                    "bias": mod.bias.detach().numpy().tolist(),
                }
            )
        elif isinstance(mod, torch.nn.ReLU):
            layers.append({"type": "activation", "kind": "relu"})
        elif isinstance(mod, torch.nn.ELU):
            layers.append({"type": "activation", "kind": "elu"})
        else:
            raise ValueError(f"unexpected module {mod!r}")
    doc = {
        "input_dim": 3,
        "output_semantics": "sdf" if config.mode == "sdf" else "occupancy_logit",
        "name": name,
        "layers": layers,
        "metadata": {"final_loss": final_loss, "seed": config.seed},
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f)


def fit_and_export(mesh: Mesh, config: TrainingConfig, out_path, name=None):
    model, final = fit(mesh, config)
    export_weights(model, config, name or f"{config.mode}_{config.activation}",
                   out_path, final)
    return final
