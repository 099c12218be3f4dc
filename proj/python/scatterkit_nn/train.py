"""Train the U-Net on a generated dataset and export UNETW1 weights."""

import argparse
import json

import numpy as np
import torch

from . import unetw1
from .data import load_split
from .model import UNet, to_tensors


def iou(pred, target):
    a = pred > 0.5
    b = target > 0.5
    union = np.logical_or(a, b).sum()
    return 1.0 if union == 0 else np.logical_and(a, b).sum() / union


def train(dataset, out, epochs=20, batch=10, lr=1e-3, seed=0, log=None):
    torch.manual_seed(seed)
    rng = np.random.default_rng(seed)
    (xt, yt), (xv, yv) = load_split(dataset)
    model = UNet().xavier_()
    opt = torch.optim.Adam(model.parameters(), lr=lr)
    xt_t, yt_t = torch.from_numpy(xt)[:, None], torch.from_numpy(yt)[:, None]
    history = []
    for epoch in range(epochs):
        model.train()
        order = rng.permutation(len(xt))
        total = 0.0
        for s in range(0, len(order), batch):
            idx = order[s : s + batch]
            opt.zero_grad()
            loss = ((model(xt_t[idx]) - yt_t[idx]) ** 2).sum()
            loss.backward()
            opt.step()
            total += loss.item()
        model.eval()
        with torch.no_grad():
            pv = model(torch.from_numpy(xv)[:, None])[:, 0].numpy() if len(xv) else np.zeros((0, 80, 80))
        val_loss = float(((pv - yv) ** 2).sum())
        val_iou = float(np.mean([iou(p, t) for p, t in zip(pv, yv)])) if len(xv) else float("nan")
        row = {"epoch": epoch + 1, "train_loss": total, "val_loss": val_loss, "val_iou": val_iou}
        history.append(row)
        if log:
            print(json.dumps(row), file=log, flush=True)
    unetw1.write(out, to_tensors(model))
    return history


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--batch", type=int, default=10)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    import sys

    train(a.dataset, a.out, a.epochs, a.batch, a.lr, a.seed, log=sys.stdout)


if __name__ == "__main__":
    main()
