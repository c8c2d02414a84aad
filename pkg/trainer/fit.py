#!/usr/bin/env python3
"""Fit an implicit MLP to a mesh and export a weight file.

Example:
    python fit.py --mesh bunny.obj --mode sdf --activation relu \\
        --out bunny.json --seed 0
"""

import argparse
import sys

from meshio import load_obj
from training import TrainingConfig, fit_and_export


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mesh", required=True, help="watertight OBJ mesh")
    ap.add_argument("--mode", choices=["sdf", "occupancy"], default="sdf")
    ap.add_argument("--activation", choices=["relu", "elu"], default="relu")
    ap.add_argument("--out", required=True, help="output weight file (JSON)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--epochs", type=int, default=100)
    ap.add_argument("--samples", type=int, default=20_000)
    args = ap.parse_args(argv)

    mesh = load_obj(args.mesh)
    config = TrainingConfig(
        mode=args.mode,
        activation=args.activation,
        epochs=args.epochs,
        n_samples=args.samples,
        seed=args.seed,
    )
    loss = fit_and_export(mesh, config, args.out)
    print(f"wrote {args.out} (final loss {loss:.5f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
