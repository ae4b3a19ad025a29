"""Convert an MNIST CSV (784 pixel columns then the digit) to gzipped IDX files.

Used to build tests/data from the 5000-image MNIST subset shipped in the
mlxtend wheel (mlxtend/data/data/mnist_5k.csv.gz)::

    python scripts/mnist_csv_to_idx.py mnist_5k.csv.gz tests/data --prefix mnist5k
"""

import argparse
import gzip
from pathlib import Path

import numpy as np

from nninfo.data import encode_idx_images, encode_idx_labels


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("csv")
    p.add_argument("outdir")
    p.add_argument("--prefix", default="mnist")
    args = p.parse_args()

    table = np.loadtxt(args.csv, delimiter=",", dtype=np.int64)
    pixels, digits = table[:, :-1], table[:, -1]
    if pixels.shape[1] != 784 or pixels.min() < 0 or pixels.max() > 255:
        raise SystemExit("expected 784 byte-valued pixel columns")
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    images = pixels.astype(np.uint8).reshape(-1, 28, 28)
    # mtime=0 keeps the archives byte-reproducible
    (out / f"{args.prefix}-images-idx3-ubyte.gz").write_bytes(gzip.compress(encode_idx_images(images), mtime=0))
    (out / f"{args.prefix}-labels-idx1-ubyte.gz").write_bytes(gzip.compress(encode_idx_labels(digits), mtime=0))
    print(f"wrote {len(digits)} images to {out}")


if __name__ == "__main__":
    main()
