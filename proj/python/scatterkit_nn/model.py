"""U-Net matching the UNETW1 architecture contract."""

import numpy as np
import torch
from torch import nn

from . import unetw1


class Block(nn.Module):
    def __init__(self, in_ch, out_ch):
        super().__init__()
        self.conv1 = nn.Conv2d(in_ch, out_ch, 3, padding=1)
        self.conv2 = nn.Conv2d(out_ch, out_ch, 3, padding=1)

    def forward(self, x):
        return torch.relu(self.conv2(torch.relu(self.conv1(x))))


class Up(nn.Module):
    def __init__(self, in_ch, out_ch):
        super().__init__()
        self.up = nn.Conv2d(in_ch, out_ch, 3, padding=1)
        self.conv1 = nn.Conv2d(2 * out_ch, out_ch, 3, padding=1)
        self.conv2 = nn.Conv2d(out_ch, out_ch, 3, padding=1)

    def forward(self, x, skip):
        x = torch.relu(self.up(nn.functional.interpolate(x, scale_factor=2, mode="nearest")))
        x = torch.cat([x, skip], dim=1)
        return torch.relu(self.conv2(torch.relu(self.conv1(x))))


class UNet(nn.Module):
    def __init__(self):
        super().__init__()
        self.enc1 = Block(1, 32)
        self.enc2 = Block(32, 64)
        self.enc3 = Block(64, 128)
        self.bottleneck = Block(128, 256)
        self.dec3 = Up(256, 128)
        self.dec2 = Up(128, 64)
        self.dec1 = Up(64, 32)
        self.head = nn.Conv2d(32, 1, 1)

    def forward(self, x):
        e1 = self.enc1(x)
        e2 = self.enc2(nn.functional.max_pool2d(e1, 2))
        e3 = self.enc3(nn.functional.max_pool2d(e2, 2))
        b = self.bottleneck(nn.functional.max_pool2d(e3, 2))
        d3 = self.dec3(b, e3)
        d2 = self.dec2(d3, e2)
        d1 = self.dec1(d2, e1)
        return torch.sigmoid(self.head(d1))

    def xavier_(self):
        for m in self.modules():
            if isinstance(m, nn.Conv2d):
                nn.init.xavier_uniform_(m.weight)
                nn.init.zeros_(m.bias)
        return self


def to_tensors(model):
    state = model.state_dict()
    return [(name, state[name].detach().cpu().numpy().astype(np.float32)) for name, _ in unetw1.ARCHITECTURE]


def from_tensors(tensors):
    unetw1.check_architecture(tensors)
    model = UNet()
    model.load_state_dict({name: torch.from_numpy(arr.copy()) for name, arr in tensors})
    return model


def infer(model, x):
    """float32 forward pass of one 80x80 input; returns an 80x80 float64 array."""
    with torch.no_grad():
        t = torch.from_numpy(np.asarray(x, dtype=np.float32)).reshape(1, 1, *x.shape)
        return model(t)[0, 0].numpy().astype(np.float64)
