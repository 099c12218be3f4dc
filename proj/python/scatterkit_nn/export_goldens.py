"""Write weights plus golden input/output pairs for the C++ inference check.

Exits with status 77 when torch is unavailable so test drivers can skip.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np


def export(out, count, seed, weights=None):
    import torch

    from . import unetw1
    from .formats import write_real1
    from .model import UNet, from_tensors, infer, to_tensors

    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    torch.manual_seed(seed)
    if weights:
        model = from_tensors(unetw1.read(weights))
    else:
        model = UNet().xavier_()
        # nonzero biases so the check covers them too
        with torch.no_grad():
            for name, p in model.named_parameters():
                if name.endswith(".bias"):
                    p.uniform_(-0.05, 0.05)
    model.eval()
    unetw1.write(out / "weights.unetw1", to_tensors(model))
    rng = np.random.default_rng(seed)
    entries = []
    for i in range(count):
        x = rng.random((80, 80))
        y = infer(model, x)
        write_real1(out / f"{i}.input.real1", x.astype(np.float32).astype(np.float64))
        write_real1(out / f"{i}.output.real1", y)
        entries.append({"input": f"{i}.input.real1", "output": f"{i}.output.real1"})
    manifest = {"weights": "weights.unetw1", "count": count, "seed": seed, "pairs": entries}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weights")
    a = p.parse_args()
    try:
        import torch  # noqa: F401
    except ImportError:
        print("torch not available", file=sys.stderr)
        sys.exit(77)
    export(a.out, a.count, a.seed, a.weights)


if __name__ == "__main__":
    main()
