#!/usr/bin/env python3
"""Generate the trained test-fixture networks under tests/fixtures/.

Four small MLPs (7 hidden layers of width 32) are fitted to analytic
implicit shapes, covering ReLU/ELU activations crossed with SDF and
occupancy-logit outputs, then exported to the weight-file schema. Fixtures
are committed; rerunning with the same seeds reproduces them. Requires
torch (a dev-only dependency, not needed by the package itself).

Usage: python scripts/make_fixtures.py [out_dir]
"""

import json
import sys
from pathlib import Path

import numpy as np
import torch

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else (
    Path(__file__).resolve().parent.parent / "tests" / "fixtures"
)

HIDDEN = 7
WIDTH = 32
EPOCHS = 100
BATCH = 512
LR = 1e-2
N_POINTS = 20_000


def sphere_sdf(p):
    return np.linalg.norm(p, axis=1) - 0.55


def rounded_box_sdf(p):
    q = np.abs(p) - 0.42
    outside = np.linalg.norm(np.maximum(q, 0.0), axis=1)
    inside = np.minimum(np.max(q, axis=1), 0.0)
    return outside + inside - 0.08


def torus_sdf(p):
    ring = np.sqrt(p[:, 0] ** 2 + p[:, 2] ** 2) - 0.55
    return np.sqrt(ring**2 + p[:, 1] ** 2) - 0.25


def two_spheres_sdf(p):
    a = np.linalg.norm(p - np.array([0.3, 0.0, 0.0]), axis=1) - 0.4
    b = np.linalg.norm(p + np.array([0.3, 0.1, 0.0]), axis=1) - 0.35
    return np.minimum(a, b)


def sample_points(sdf, n, rng):
    # half near the surface (rejection from a thick band), half uniform
    pts = []
    while sum(len(p) for p in pts) < n // 2:
        cand = rng.uniform(-1.0, 1.0, (n, 3))
        keep = np.abs(sdf(cand)) < 0.15
        pts.append(cand[keep])
    near = np.concatenate(pts)[: n // 2]
    near += rng.normal(0.0, 0.02, near.shape)
    uniform = rng.uniform(-1.1, 1.1, (n - len(near), 3))
    return np.concatenate([near, uniform])


def build_model(activation):
    act = {"relu": torch.nn.ReLU, "elu": torch.nn.ELU}[activation]
    layers = [torch.nn.Linear(3, WIDTH), act()]
    for _ in range(HIDDEN - 1):
        layers += [torch.nn.Linear(WIDTH, WIDTH), act()]
    layers.append(torch.nn.Linear(WIDTH, 1))
    return torch.nn.Sequential(*layers)


def fit(sdf, mode, activation, seed):
    torch.manual_seed(seed)
    torch.set_num_threads(1)
    rng = np.random.default_rng(seed)
    pts = sample_points(sdf, N_POINTS, rng)
    d = sdf(pts)
    x = torch.tensor(pts, dtype=torch.float64)
    model = build_model(activation).double()
    if mode == "sdf":
        y = torch.tensor(d[:, None], dtype=torch.float64)
        loss_fn = torch.nn.L1Loss()
    else:
        # logits positive outside; train against inside/outside labels
        y = torch.tensor((d > 0).astype(np.float64)[:, None])
        loss_fn = torch.nn.BCEWithLogitsLoss()
    opt = torch.optim.Adam(model.parameters(), lr=LR)
    sched = torch.optim.lr_scheduler.StepLR(opt, step_size=50, gamma=0.1)
    n = len(x)
    final = None
    for epoch in range(EPOCHS):
        perm = torch.randperm(n)
        total = 0.0
        for s in range(0, n, BATCH):
            idx = perm[s : s + BATCH]
            opt.zero_grad()
            loss = loss_fn(model(x[idx]), y[idx])
            loss.backward()
            opt.step()
            total += loss.item() * len(idx)
        sched.step()
        final = total / n
    return model, final


def export(model, mode, name, path, final_loss):
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
    doc = {
        "input_dim": 3,
        "output_semantics": "sdf" if mode == "sdf" else "occupancy_logit",
        "name": name,
        "layers": layers,
        "metadata": {"final_loss": final_loss},
    }
    path.write_text(json.dumps(doc))


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    jobs = [
        ("relu_sdf", sphere_sdf, "sdf", "relu", 101),
        ("elu_sdf", rounded_box_sdf, "sdf", "elu", 102),
        ("relu_occ", torus_sdf, "occupancy", "relu", 103),
        ("elu_occ", two_spheres_sdf, "occupancy", "elu", 104),
    ]
    for name, sdf, mode, activation, seed in jobs:
        model, loss = fit(sdf, mode, activation, seed)
        out = OUT / f"{name}.json"
        export(model, mode, name, out, loss)
        print(f"{name}: final loss {loss:.5f} -> {out}")


if __name__ == "__main__":
    main()
