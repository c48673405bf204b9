import pytest

from lungseg import DecoderConfig, random_weights


@pytest.fixture(scope="session")
def tiny_config():
    """Small architecture (2 blocks, downsample 4) for fast end-to-end tests."""
    return DecoderConfig(num_blocks=2, block_channels=(8, 4), upsample_factor=2,
                         encoder_channels=16, encoder_downsample=4)


@pytest.fixture(scope="session")
def tiny_store(tiny_config):
    return random_weights(tiny_config, seed=3)
