"""Convolutional autoencoder: four stride-2 stages compress 256x256x3 images
to a 16x16x8 latent volume (2048 values); a mirrored decoder reconstructs the
input, trained on mean squared error."""

from __future__ import annotations

import torch
from torch import nn

LATENT_SHAPE = (8, 16, 16)
LATENT_DIM = 8 * 16 * 16

_ENCODER_CHANNELS = (3, 32, 16, 16, 8)


class StageShapeError(RuntimeError):
    pass


class ConvAutoencoder(nn.Module):
    def __init__(self):
        super().__init__()
        ch = _ENCODER_CHANNELS
        self.encoder = nn.ModuleList([
            nn.Sequential(
                nn.Conv2d(ch[i], ch[i + 1], kernel_size=3, stride=2, padding=1),
                nn.ReLU(inplace=True),
            )
            for i in range(4)
        ])
        decoder = []
        for i in reversed(range(4)):
            layers: list[nn.Module] = [
                nn.ConvTranspose2d(ch[i + 1], ch[i], kernel_size=3, stride=2,
                                   padding=1, output_padding=1),
            ]
            layers.append(nn.ReLU(inplace=True) if i > 0 else nn.Sigmoid())
            decoder.append(nn.Sequential(*layers))
        self.decoder = nn.ModuleList(decoder)

    def encode(self, x: torch.Tensor) -> torch.Tensor:
        expected = 256
        if x.shape[-3:] != (3, 256, 256):
            raise StageShapeError(
                f"encoder input: expected (3, 256, 256), got {tuple(x.shape[-3:])}")
        for i, stage in enumerate(self.encoder):
            x = stage(x)
            expected //= 2
            want = (_ENCODER_CHANNELS[i + 1], expected, expected)
            if x.shape[-3:] != want:
                raise StageShapeError(
                    f"encoder stage {i}: expected {want}, got {tuple(x.shape[-3:])}")
        return x

    def decode(self, z: torch.Tensor) -> torch.Tensor:
        if z.shape[-3:] != LATENT_SHAPE:
            raise StageShapeError(
                f"decoder input: expected {LATENT_SHAPE}, got {tuple(z.shape[-3:])}")
        x = z
        for i, stage in enumerate(self.decoder):
            x = stage(x)
            side = 16 * 2 ** (i + 1)
            want = (_ENCODER_CHANNELS[3 - i], side, side)
            if x.shape[-3:] != want:
                raise StageShapeError(
                    f"decoder stage {i}: expected {want}, got {tuple(x.shape[-3:])}")
        return x

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.decode(self.encode(x))

    def latent_vector(self, x: torch.Tensor) -> torch.Tensor:
        """Flattened (batch, 2048) latent features."""
        return self.encode(x).flatten(start_dim=1)
