import pytest

from lungseg import ConfigError, DecoderConfig, load_config, save_config


def test_defaults_are_valid():
    c = DecoderConfig()
    assert c.num_blocks == 4
    assert c.block_channels == (256, 128, 64, 32)
    assert c.upsample_factor ** c.num_blocks == c.encoder_downsample


def test_upsample_must_undo_downsample():
    with pytest.raises(ConfigError):
        DecoderConfig(upsample_factor=3)


def test_block_channels_length_must_match():
    with pytest.raises(ConfigError):
        DecoderConfig(block_channels=(64, 32))


def test_even_kernel_rejected():
    with pytest.raises(ConfigError):
        DecoderConfig(kernel_size=4)


def test_single_class_rejected():
    with pytest.raises(ConfigError):
        DecoderConfig(num_classes=1)


def test_nonpositive_field_rejected():
    with pytest.raises(ConfigError):
        DecoderConfig(num_blocks=0, block_channels=())


TINY = DecoderConfig(num_blocks=2, block_channels=(8, 4), upsample_factor=2,
                     encoder_channels=16, encoder_downsample=4)


def test_save_load_round_trip(tmp_path):
    p = tmp_path / "net.cfg"
    save_config(TINY, p)
    assert load_config(p) == TINY


def test_partial_file_keeps_defaults(tmp_path):
    p = tmp_path / "net.cfg"
    p.write_text("# comment line\n\nkernel_size = 5\n")
    c = load_config(p)
    assert c.kernel_size == 5
    assert c.num_blocks == 4
    assert c.block_channels == (256, 128, 64, 32)


def test_unknown_key_rejected(tmp_path):
    p = tmp_path / "net.cfg"
    p.write_text("learning_rate = 3\n")
    with pytest.raises(ConfigError, match="unknown"):
        load_config(p)


def test_duplicate_key_rejected(tmp_path):
    p = tmp_path / "net.cfg"
    p.write_text("kernel_size = 3\nkernel_size = 5\n")
    with pytest.raises(ConfigError, match="duplicate"):
        load_config(p)


def test_malformed_line_rejected(tmp_path):
    p = tmp_path / "net.cfg"
    p.write_text("kernel_size: 3\n")
    with pytest.raises(ConfigError):
        load_config(p)


def test_bad_int_rejected(tmp_path):
    p = tmp_path / "net.cfg"
    p.write_text("num_blocks = four\n")
    with pytest.raises(ConfigError, match="num_blocks"):
        load_config(p)


def test_loaded_values_still_validated(tmp_path):
    p = tmp_path / "net.cfg"
    save_config(TINY, p)
    text = p.read_text().replace("upsample_factor = 2", "upsample_factor = 3")
    p.write_text(text)
    with pytest.raises(ConfigError):
        load_config(p)
