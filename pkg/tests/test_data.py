import gzip
import math
import struct

import numpy as np
import pytest

from _helpers import mnist_paths
from nninfo.data import (
    Variant,
    build_dataset,
    coin_flips,
    encode_idx_images,
    encode_idx_labels,
    load_mnist,
    parse_idx_images,
    parse_idx_labels,
    split_dataset,
    synthetic_dataset,
    RawImageSet,
)
from nninfo.errors import BadMagic, InsufficientData, InvalidArgument, LabelOutOfRange, TruncatedFile
from nninfo.kernel import kernel_matrix
from nninfo.orthant import LN2, estimate_c0


@pytest.fixture(scope="module")
def raw():
    images, labels = mnist_paths()
    if not images.is_file() or not labels.is_file():
        pytest.skip("MNIST IDX files not available")
    return load_mnist(images, labels)


def test_parse_images_header_and_payload():
    payload = bytes(range(256)) * 6 + bytes(32)
    data = struct.pack(">4I", 0x803, 2, 28, 28) + payload
    images = parse_idx_images(data)
    assert images.shape == (2, 28, 28)
    assert images.tobytes() == payload


def test_parse_images_bad_magic():
    with pytest.raises(BadMagic):
        parse_idx_images(struct.pack(">4I", 0x801, 1, 2, 2) + bytes(4))


def test_parse_images_truncated():
    data = struct.pack(">4I", 0x803, 10, 28, 28) + bytes(9 * 784)
    with pytest.raises(TruncatedFile):
        parse_idx_images(data)
    with pytest.raises(TruncatedFile):
        parse_idx_images(b"\x00\x00\x08")


def test_parse_images_trailing_bytes():
    with pytest.raises(InvalidArgument):
        parse_idx_images(struct.pack(">4I", 0x803, 1, 2, 2) + bytes(5))


def test_parse_labels():
    data = struct.pack(">2I", 0x801, 3) + bytes([0, 7, 9])
    np.testing.assert_array_equal(parse_idx_labels(data), [0, 7, 9])


def test_parse_labels_errors():
    with pytest.raises(LabelOutOfRange):
        parse_idx_labels(struct.pack(">2I", 0x801, 2) + bytes([3, 12]))
    with pytest.raises(TruncatedFile):
        parse_idx_labels(struct.pack(">2I", 0x801, 1))
    with pytest.raises(BadMagic):
        parse_idx_labels(struct.pack(">2I", 0x803, 1) + bytes([1]))


def test_encode_round_trip(tmp_path):
    g = np.random.default_rng(0)
    images = g.integers(0, 256, size=(5, 28, 28), dtype=np.uint8)
    labels = np.array([0, 1, 2, 3, 9], dtype=np.uint8)
    (tmp_path / "img").write_bytes(encode_idx_images(images))
    (tmp_path / "lab.gz").write_bytes(gzip.compress(encode_idx_labels(labels)))
    raw = load_mnist(tmp_path / "img", tmp_path / "lab.gz")
    assert (raw.count, raw.rows, raw.cols) == (5, 28, 28)
    np.testing.assert_array_equal(raw.pixels, images.reshape(5, 784))
    np.testing.assert_array_equal(raw.labels, labels)


def test_mnist_fixture(raw):
    assert (raw.rows, raw.cols) == (28, 28)
    assert set(np.unique(raw.labels)) == set(range(10))


def test_decimal_digits_parity(raw):
    ds = build_dataset(raw, "decimal_digits", 300, 0)
    digits = raw.labels[ds.indices]
    np.testing.assert_array_equal(ds.labels, np.where(digits % 2 == 0, -1, 1))
    assert 4 in digits and np.all(ds.labels[digits == 4] == -1)
    assert ds.source_digits <= set(range(10))


def test_binary_digits_only_zero_and_one(raw):
    ds = build_dataset(raw, Variant.BINARY_DIGITS, 500, 1)
    assert ds.source_digits <= {0, 1}
    assert 7 not in raw.labels[ds.indices]
    np.testing.assert_array_equal(ds.labels, np.where(raw.labels[ds.indices] == 0, -1, 1))


def test_random_labels_deterministic(raw):
    a = build_dataset(raw, "random_labels", 200, 42)
    b = build_dataset(raw, "random_labels", 200, 42)
    np.testing.assert_array_equal(a.labels, b.labels)
    c = build_dataset(raw, "random_labels", 200, 43)
    assert not np.array_equal(a.labels, c.labels)


@pytest.mark.parametrize("variant", ["binary_digits", "decimal_digits", "random_labels"])
def test_round_trip_determinism(raw, variant):
    a = build_dataset(raw, variant, 150, 7)
    b = build_dataset(raw, variant, 150, 7)
    assert a.inputs.tobytes() == b.inputs.tobytes()
    assert a.labels.tobytes() == b.labels.tobytes()
    assert a.indices.tobytes() == b.indices.tobytes()
    assert a.variant == b.variant and a.source_digits == b.source_digits


def test_rows_have_norm_28(raw):
    for variant in ("binary_digits", "decimal_digits", "random_labels"):
        ds = build_dataset(raw, variant, 100, 3)
        np.testing.assert_allclose(np.linalg.norm(ds.inputs, axis=1), 28.0, rtol=1e-6)
        assert ds.n == 100 and ds.input_dim == 784


def test_decimal_balance(raw):
    for seed in range(3):
        ds = build_dataset(raw, "decimal_digits", 500, seed)
        assert -0.2 <= ds.labels.mean() <= 0.2


def test_random_label_balance(raw):
    for seed in range(5):
        ds = build_dataset(raw, "random_labels", 400, seed)
        assert abs(int(ds.labels.sum())) <= 4 * math.sqrt(400)


def test_dataset_is_immutable(raw):
    ds = build_dataset(raw, "decimal_digits", 10, 0)
    with pytest.raises(ValueError):
        ds.inputs[0, 0] = 1.0


def test_insufficient_data(raw):
    with pytest.raises(InsufficientData):
        build_dataset(raw, "binary_digits", 1001, 0)


def test_held_out_split_is_disjoint(raw):
    train, test = split_dataset(raw, "decimal_digits", 200, 50, 0)
    assert train.n == 200 and test.n == 50
    assert not set(train.indices) & set(test.indices)
    again = build_dataset(raw, "decimal_digits", 200, 0)
    np.testing.assert_array_equal(train.indices, again.indices)


def test_duplicates_are_redrawn():
    g = np.random.default_rng(0)
    base = g.integers(1, 256, size=(6, 16), dtype=np.uint8)
    pixels = np.concatenate([base, base[:3], base[:3]])  # 12 images, 6 distinct
    raw = RawImageSet(pixels=pixels, labels=np.arange(12, dtype=np.uint8) % 10, rows=4, cols=4)
    ds = build_dataset(raw, "decimal_digits", 6, 1)
    assert len({row.tobytes() for row in pixels[ds.indices]}) == 6
    with pytest.raises(InsufficientData):
        build_dataset(raw, "decimal_digits", 7, 1)


def test_coin_flip_prefix():
    np.testing.assert_array_equal(coin_flips(5, 10), coin_flips(5, 100)[:10])


def test_synthetic_uncorrelated():
    ds = synthetic_dataset(50, 512, 0.0, 0)
    G = ds.inputs @ ds.inputs.T / 512
    off = G[~np.eye(50, dtype=bool)]
    assert abs(off.mean()) <= 0.05
    S = kernel_matrix(ds.inputs, 2)
    assert S[~np.eye(50, dtype=bool)].mean() == pytest.approx(1 / math.pi, abs=0.05)


def test_synthetic_cluster_structure():
    ds = synthetic_dataset(40, 1024, 0.6, 3)
    G = ds.inputs @ ds.inputs.T / 1024
    same = np.equal.outer(ds.labels, ds.labels) & ~np.eye(40, dtype=bool)
    diff = ~np.equal.outer(ds.labels, ds.labels)
    assert G[same].mean() == pytest.approx(0.6, abs=0.05)
    assert G[diff].mean() == pytest.approx(-0.6, abs=0.05)
    assert abs(int(ds.labels.sum())) == 0


def test_synthetic_correlated_has_low_information():
    ds = synthetic_dataset(20, 784, 0.99, 0)
    e = estimate_c0(kernel_matrix(ds.inputs, 2), ds.labels, 10_000, 0)
    assert e.c0_nats < 0.6 * 20 * LN2


@pytest.mark.parametrize("args", [(0, 10, 0.5, 0), (10, 1, 0.5, 0), (10, 10, 1.5, 0), (10, 10, -0.5, 0)])
def test_synthetic_invalid(args):
    with pytest.raises(InvalidArgument):
        synthetic_dataset(*args)
