"""ResNet-50 classifier with zero-padded identity shortcuts.

Standard 3-4-6-3 bottleneck layout; where the skip connection meets a
channel or stride mismatch, the identity is spatially subsampled and
zero-padded in channels instead of projected, so a zero residual branch
leaves (non-negative) activations unchanged: out = relu(skip + branch).
"""

from __future__ import annotations

import torch
import torch.nn.functional as F
from torch import nn

STAGE_BLOCKS = (3, 4, 6, 3)
BOTTLENECK_WIDTHS = (64, 128, 256, 512)
EXPANSION = 4


class ShortcutShapeError(RuntimeError):
    pass


def pad_shortcut(x: torch.Tensor, out_channels: int, stride: int) -> torch.Tensor:
    """Identity skip adapted by strided subsampling and channel zero-padding."""
    if stride > 1:
        x = x[:, :, ::stride, ::stride]
    c = x.shape[1]
    if c > out_channels:
        raise ShortcutShapeError(
            f"cannot shrink skip from {c} to {out_channels} channels by padding")
    if c < out_channels:
        x = F.pad(x, (0, 0, 0, 0, 0, out_channels - c))
    return x


class BottleneckBlock(nn.Module):
    """1x1 reduce -> 3x3 -> 1x1 expand, batch-normalized, zero-padded skip."""

    def __init__(self, in_channels: int, width: int, stride: int = 1):
        super().__init__()
        out_channels = width * EXPANSION
        self.stride = stride
        self.out_channels = out_channels
        self.conv1 = nn.Conv2d(in_channels, width, 1, bias=False)
        self.bn1 = nn.BatchNorm2d(width)
        self.conv2 = nn.Conv2d(width, width, 3, stride=stride, padding=1,
                               bias=False)
        self.bn2 = nn.BatchNorm2d(width)
        self.conv3 = nn.Conv2d(width, out_channels, 1, bias=False)
        self.bn3 = nn.BatchNorm2d(out_channels)

    def branch(self, x: torch.Tensor) -> torch.Tensor:
        z = F.relu(self.bn1(self.conv1(x)))
        z = F.relu(self.bn2(self.conv2(z)))
        return self.bn3(self.conv3(z))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return F.relu(pad_shortcut(x, self.out_channels, self.stride)
                      + self.branch(x))

    def zero_branch_(self) -> None:
        """Zero every branch parameter and statistic (test hook for the
        residual-identity property)."""
        for m in (self.conv1, self.conv2, self.conv3):
            nn.init.zeros_(m.weight)
        for bn in (self.bn1, self.bn2, self.bn3):
            nn.init.zeros_(bn.weight)
            nn.init.zeros_(bn.bias)
            bn.running_mean.zero_()
            bn.running_var.fill_(1.0)


class ResNet50(nn.Module):
    def __init__(self, num_classes: int = 22):
        super().__init__()
        self.stem = nn.Sequential(
            nn.Conv2d(3, 64, 7, stride=2, padding=3, bias=False),
            nn.BatchNorm2d(64),
            nn.ReLU(inplace=True),
            nn.MaxPool2d(3, stride=2, padding=1),
        )
        blocks = []
        in_channels = 64
        for stage, (count, width) in enumerate(zip(STAGE_BLOCKS,
                                                   BOTTLENECK_WIDTHS)):
            for b in range(count):
                stride = 2 if stage > 0 and b == 0 else 1
                blocks.append(BottleneckBlock(in_channels, width, stride))
                in_channels = width * EXPANSION
        self.blocks = nn.ModuleList(blocks)
        self.fc = nn.Linear(in_channels, num_classes)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """Class probabilities (softmax output), rows summing to 1."""
        return F.softmax(self.logits(x), dim=1)

    def logits(self, x: torch.Tensor) -> torch.Tensor:
        x = self.stem(x)
        for block in self.blocks:
            x = block(x)
        x = x.mean(dim=(2, 3))
        return self.fc(x)
