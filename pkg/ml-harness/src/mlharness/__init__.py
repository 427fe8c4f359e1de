"""Training harness for radar gait image datasets: convolutional autoencoder
for 2048-d latent features and a ResNet-50 identifier, both consuming the
pipeline's JSON manifest + PNG file interface."""

from .cae import LATENT_DIM, LATENT_SHAPE, ConvAutoencoder, StageShapeError
from .data import (Manifest, ManifestImageDataset, ManifestRecord,
                   load_manifest, read_image)
from .resnet import (BottleneckBlock, ResNet50, ShortcutShapeError,
                     pad_shortcut)
from .train import (evaluation_report_json, export_latents, train_cae,
                    train_identifier)

__version__ = "0.1.0"
