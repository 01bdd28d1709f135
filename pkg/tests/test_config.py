import pytest

from cdlfuse.config import FusionConfig, format_config, load_config


def test_defaults_from_empty_source():
    cfg = load_config("")
    assert cfg == FusionConfig(
        patch_dim=64, dict_atoms=128, outer_iters=5, sparsity_T=5,
        rho=10.0, epsilon=1e-4, delta=1e-7, stride=1,
    )


def test_comments_and_blanks_ignored():
    cfg = load_config("# a comment\n\n  patch_dim = 16 \ndict_atoms=16\nsparsity_T=4\n")
    assert cfg.patch_dim == 16
    assert cfg.dict_atoms == 16
    assert cfg.sparsity_T == 4
    # untouched fields keep defaults
    assert cfg.rho == 10.0


def test_unknown_key_rejected_by_name():
    with pytest.raises(ValueError, match="rank"):
        load_config("rank=3")


def test_sparsity_lower_bound_names_key():
    with pytest.raises(ValueError, match="sparsity_T must be >= 1"):
        load_config("sparsity_T=0")


def test_patch_dim_square_names_key():
    with pytest.raises(ValueError, match="patch_dim must be a perfect square"):
        load_config("patch_dim=60")


@pytest.mark.parametrize("line,key", [
    ("rho=0", "rho"),
    ("rho=-1", "rho"),
    ("epsilon=0", "epsilon"),
    ("delta=0.0", "delta"),
    ("stride=0", "stride"),
    ("outer_iters=0", "outer_iters"),
    ("dict_atoms=0", "dict_atoms"),
])
def test_positivity_invariants(line, key):
    with pytest.raises(ValueError, match=key):
        load_config(line)


def test_sparsity_vs_atoms_and_patch():
    with pytest.raises(ValueError, match="sparsity_T"):
        load_config("dict_atoms=4\nsparsity_T=5\npatch_dim=16")
    with pytest.raises(ValueError, match="sparsity_T"):
        load_config("patch_dim=4\nsparsity_T=5")


def test_malformed_value_names_key():
    with pytest.raises(ValueError, match="patch_dim"):
        load_config("patch_dim=eight")
    with pytest.raises(ValueError, match="rho"):
        load_config("rho=ten")
    # ints must be integers
    with pytest.raises(ValueError, match="stride"):
        load_config("stride=1.5")


def test_missing_equals_sign():
    with pytest.raises(ValueError, match="key=value"):
        load_config("just some words")


def test_roundtrip_idempotent():
    cfg = load_config("patch_dim=16\ndict_atoms=32\nrho=3.5\nepsilon=2e-5")
    again = load_config(format_config(cfg))
    assert again == cfg
    assert format_config(again) == format_config(cfg)


def test_float_fields_accept_scientific_notation():
    cfg = load_config("epsilon=1e-3\ndelta=2.5e-9")
    assert cfg.epsilon == 1e-3
    assert cfg.delta == 2.5e-9
