import pytest
import torch
import torch.nn.functional as F

from mlharness.cae import LATENT_DIM, LATENT_SHAPE, ConvAutoencoder, StageShapeError


def test_forward_shapes():
    model = ConvAutoencoder()
    x = torch.rand(2, 3, 256, 256)
    z = model.encode(x)
    assert z.shape == (2, *LATENT_SHAPE)
    assert model.latent_vector(x).shape == (2, LATENT_DIM)
    assert LATENT_DIM == 2048
    out = model(x)
    assert out.shape == x.shape
    assert 0.0 <= out.min() and out.max() <= 1.0


def test_shape_composition_any_batch_size():
    model = ConvAutoencoder()
    for n in (1, 3, 7):
        x = torch.rand(n, 3, 256, 256)
        assert model(x).shape == x.shape


def test_rejects_wrong_input_size():
    model = ConvAutoencoder()
    with pytest.raises(StageShapeError, match="encoder input"):
        model.encode(torch.rand(1, 3, 128, 128))
    with pytest.raises(StageShapeError, match="decoder input"):
        model.decode(torch.rand(1, 8, 8, 8))


def test_memorizes_single_image():
    # a smooth (compressible) image: memorization drives held-in MSE toward 0
    torch.manual_seed(0)
    model = ConvAutoencoder()
    grid = torch.linspace(0, 1, 256)
    yy, xx = torch.meshgrid(grid, grid, indexing="ij")
    img = 0.5 + 0.4 * torch.sin(4 * torch.pi * yy) * torch.cos(2 * torch.pi * xx)
    x = torch.stack([img, 0.5 * img, 1.0 - img])[None]
    optimizer = torch.optim.Adam(model.parameters(), lr=3e-3)
    with torch.no_grad():
        initial = F.mse_loss(model(x), x).item()
    for _ in range(150):
        loss = F.mse_loss(model(x), x)
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
    with torch.no_grad():
        final = F.mse_loss(model(x), x).item()
    assert final < 0.05 * initial
    assert final < 5e-3


def test_identical_inputs_identical_latents():
    model = ConvAutoencoder().eval()
    x = torch.rand(1, 3, 256, 256)
    with torch.no_grad():
        a = model.latent_vector(x)
        b = model.latent_vector(x.clone())
    assert torch.equal(a, b)
