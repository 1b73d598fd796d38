#!/usr/bin/env python3
"""Write the 5000-sample MNIST subset shipped inside the mlxtend wheel as IDX files.

Usage: export_mnist_subset.py <mlxtend wheel or mnist_5k.csv.gz> <out dir>

Produces train-{images-idx3,labels-idx1}-ubyte (400 per class) and
t10k-{images-idx3,labels-idx1}-ubyte (100 per class), shuffled with a fixed seed.
"""
import gzip
import io
import struct
import sys
import zipfile
from pathlib import Path

import numpy as np

MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"


def read_csv(src: Path) -> np.ndarray:
    if src.suffix == ".whl":
        blob = zipfile.ZipFile(src).read(MEMBER)
    else:
        blob = src.read_bytes()
    text = gzip.decompress(blob).decode()
    return np.loadtxt(io.StringIO(text), delimiter=",", dtype=np.int64)


def write_idx(out: Path, prefix: str, images: np.ndarray, labels: np.ndarray) -> None:
    n = images.shape[0]
    with open(out / f"{prefix}-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, n, 28, 28))
        f.write(images.astype(np.uint8).tobytes())
    with open(out / f"{prefix}-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x00000801, n))
        f.write(labels.astype(np.uint8).tobytes())


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    data = read_csv(Path(sys.argv[1]))
    out = Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)
    images, labels = data[:, :-1], data[:, -1]
    rng = np.random.default_rng(20230501)
    train_idx, test_idx = [], []
    for c in range(10):
        idx = rng.permutation(np.flatnonzero(labels == c))
        test_idx.extend(idx[:100])
        train_idx.extend(idx[100:])
    train_idx = rng.permutation(np.array(train_idx))
    test_idx = rng.permutation(np.array(test_idx))
    write_idx(out, "train", images[train_idx], labels[train_idx])
    write_idx(out, "t10k", images[test_idx], labels[test_idx])
    print(f"wrote {len(train_idx)} train / {len(test_idx)} test samples to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
