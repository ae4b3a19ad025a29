"""MNIST IDX parsing and the dataset variants used for the information estimates.

IDX layout (all integers big-endian 32-bit)::

    images: magic 0x00000803 | count | rows | cols | count*rows*cols uint8
    labels: magic 0x00000801 | count | count uint8

Files may be gzip-compressed; that is detected from the first two bytes.
"""

import gzip
import logging
import struct
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from . import rng
from .errors import BadMagic, InsufficientData, InvalidArgument, LabelOutOfRange, TruncatedFile
from .kernel import normalize_inputs

log = logging.getLogger(__name__)

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801


class Variant(str, Enum):
    BINARY_DIGITS = "binary_digits"
    DECIMAL_DIGITS = "decimal_digits"
    RANDOM_LABELS = "random_labels"
    SYNTHETIC = "synthetic"


MNIST_VARIANTS = (Variant.BINARY_DIGITS, Variant.DECIMAL_DIGITS, Variant.RANDOM_LABELS)


@dataclass(frozen=True)
class RawImageSet:
    pixels: np.ndarray  # (count, rows*cols) uint8
    labels: np.ndarray  # (count,) uint8 in 0..9
    rows: int
    cols: int

    @property
    def count(self):
        return self.pixels.shape[0]


@dataclass(frozen=True)
class Dataset:
    inputs: np.ndarray  # (n, d0), every row of norm sqrt(d0)
    labels: np.ndarray  # (n,) int8 in {-1, +1}
    variant: Variant
    seed: int
    source_digits: frozenset = frozenset()
    indices: np.ndarray = None  # positions in the raw image set
    duplicates_skipped: int = 0
    metadata: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.inputs.shape[0]

    @property
    def input_dim(self):
        return self.inputs.shape[1]


def _header(data, magic, words, what):
    need = 4 * (words + 1)
    if len(data) < need:
        raise TruncatedFile(f"{what} file is {len(data)} bytes, shorter than its {need}-byte header")
    got, *fields = struct.unpack(f">{words + 1}I", data[:need])
    if got != magic:
        raise BadMagic(f"expected {what} magic 0x{magic:08x}, found 0x{got:08x}")
    return fields, need


def _payload(data, offset, size, what):
    if len(data) - offset < size:
        raise TruncatedFile(f"{what} file declares {size} payload bytes but holds {len(data) - offset}")
    if len(data) - offset > size:
        raise InvalidArgument(f"{what} file has {len(data) - offset - size} trailing bytes")
    return np.frombuffer(data, dtype=np.uint8, count=size, offset=offset)


def parse_idx_images(data):
    """Parse an IDX image container. Returns a uint8 array ``(count, rows, cols)``."""
    (count, rows, cols), off = _header(data, IMAGE_MAGIC, 3, "image")
    return _payload(data, off, count * rows * cols, "image").reshape(count, rows, cols)


def parse_idx_labels(data):
    """Parse an IDX label container. Returns a uint8 vector with values 0..9."""
    (count,), off = _header(data, LABEL_MAGIC, 1, "label")
    labels = _payload(data, off, count, "label")
    bad = np.flatnonzero(labels > 9)
    if bad.size:
        raise LabelOutOfRange(f"label {int(labels[bad[0]])} at index {int(bad[0])} is not a digit")
    return labels


def read_idx_bytes(path):
    data = Path(path).read_bytes()
    if data[:2] == b"\x1f\x8b":
        data = gzip.decompress(data)
    return data


def load_mnist(image_path, label_path):
    images = parse_idx_images(read_idx_bytes(image_path))
    labels = parse_idx_labels(read_idx_bytes(label_path))
    if len(images) != len(labels):
        raise InvalidArgument(f"{len(images)} images but {len(labels)} labels")
    count, rows, cols = images.shape
    return RawImageSet(pixels=images.reshape(count, rows * cols), labels=labels, rows=rows, cols=cols)


def encode_idx_images(images):
    images = np.asarray(images, dtype=np.uint8)
    count, rows, cols = images.shape
    return struct.pack(">4I", IMAGE_MAGIC, count, rows, cols) + images.tobytes()


def encode_idx_labels(labels):
    labels = np.asarray(labels, dtype=np.uint8)
    return struct.pack(">2I", LABEL_MAGIC, len(labels)) + labels.tobytes()


def coin_flips(seed, count):
    """``count`` fair +/-1 labels; the first k flips do not depend on ``count``."""
    if count == 0:
        return np.zeros(0, dtype=np.int8)
    u = rng.uniform_block(seed, rng.STREAM_LABELS, 0, 1, count)[0]
    return np.where(u < 0.5, -1, 1).astype(np.int8)


def _select(raw, pool, count, seed):
    """Uniform draw without replacement, skipping pixel-identical repeats."""
    order = rng.generator(seed, rng.STREAM_SUBSAMPLE).permutation(pool)
    seen = set()
    chosen = []
    skipped = 0
    for i in order:
        key = raw.pixels[i].tobytes()
        if key in seen:
            skipped += 1
            continue
        seen.add(key)
        chosen.append(int(i))
        if len(chosen) == count:
            break
    if len(chosen) < count:
        raise InsufficientData(f"only {len(chosen)} distinct images available, {count} requested")
    if skipped:
        log.info("skipped %d duplicate images while sampling", skipped)
    return np.array(chosen, dtype=np.int64), skipped


def _freeze(*arrays):
    for a in arrays:
        a.setflags(write=False)


def split_dataset(raw, variant, n, n_test, seed):
    """Draw a training set of ``n`` and a disjoint held-out set of ``n_test``.

    binary_digits keeps digits 0 and 1 only; decimal_digits keeps all digits.
    Both label even digits -1 and odd digits +1. random_labels keeps all digits
    and flips a fair coin per selected image.
    """
    variant = Variant(variant)
    if variant not in MNIST_VARIANTS:
        raise InvalidArgument(f"{variant.value} is not an MNIST variant")
    if n < 1 or n_test < 0:
        raise InvalidArgument(f"need n >= 1 and n_test >= 0, got {n}, {n_test}")
    seed = rng.check_seed(seed)
    if variant is Variant.BINARY_DIGITS:
        pool = np.flatnonzero(raw.labels <= 1)
    else:
        pool = np.arange(raw.count)
    if n + n_test > len(pool):
        raise InsufficientData(f"{n + n_test} examples requested but only {len(pool)} available for {variant.value}")
    idx, skipped = _select(raw, pool, n + n_test, seed)
    digits = raw.labels[idx]
    if variant is Variant.RANDOM_LABELS:
        labels = coin_flips(seed, n + n_test)
    else:
        labels = np.where(digits % 2 == 0, -1, 1).astype(np.int8)
    inputs = normalize_inputs(raw.pixels[idx].astype(np.float64))
    meta = {"sampling": "uniform without replacement", "dedup": "pixel-identical images redrawn"}

    def make(sl):
        x, c, i = inputs[sl].copy(), labels[sl].copy(), idx[sl].copy()
        _freeze(x, c, i)
        return Dataset(
            inputs=x,
            labels=c,
            variant=variant,
            seed=seed,
            source_digits=frozenset(int(d) for d in raw.labels[i]),
            indices=i,
            duplicates_skipped=skipped,
            metadata=dict(meta),
        )

    return make(slice(0, n)), make(slice(n, n + n_test))


def build_dataset(raw, variant, n, seed):
    return split_dataset(raw, variant, n, 0, seed)[0]


def synthetic_dataset(n, d0, intra_class_cos, seed):
    """Two antipodal clusters on the sphere of radius sqrt(d0).

    Within a class the cosine similarity concentrates near ``intra_class_cos``,
    across classes near ``-intra_class_cos`` (concentration improves with d0).
    Labels are balanced and randomly ordered.
    """
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    if d0 < 2:
        raise InvalidArgument(f"d0 must be >= 2, got {d0}")
    q = float(intra_class_cos)
    if not 0.0 <= q <= 1.0:
        # n mutually anti-correlated points cannot exist for n > 2
        raise InvalidArgument(f"intra_class_cos must lie in [0, 1], got {q}")
    seed = rng.check_seed(seed)
    g = rng.generator(seed, rng.STREAM_SYNTHETIC)
    centre = g.standard_normal(d0)
    centre /= np.linalg.norm(centre)
    noise = g.standard_normal((n, d0))
    noise /= np.linalg.norm(noise, axis=1, keepdims=True)
    labels = np.where(np.arange(n) < (n + 1) // 2, 1, -1).astype(np.int8)
    labels = g.permutation(labels)
    raw = labels[:, None] * np.sqrt(q) * centre + np.sqrt(1.0 - q) * noise
    inputs = normalize_inputs(raw)
    _freeze(inputs, labels)
    return Dataset(
        inputs=inputs,
        labels=labels,
        variant=Variant.SYNTHETIC,
        seed=seed,
        metadata={"intra_class_cos": q},
    )
