#!/usr/bin/env python3
"""Write a small MNIST subset as IDX files.

The mlxtend wheel ships 5,000 MNIST training digits (500 per class) as a
gzipped CSV. This script pulls that wheel from the package index, shuffles the
rows with a fixed seed and writes a 4,000-image train split and a 1,000-image
test split in the standard big-endian IDX layout.
"""
import argparse
import gzip
import io
import pathlib
import random
import struct
import subprocess
import sys
import tempfile
import zipfile


def write_images(path, rows):
    with open(path, "wb") as out:
        out.write(struct.pack(">IIII", 0x00000803, len(rows), 28, 28))
        for pixels, _ in rows:
            out.write(bytes(pixels))


def write_labels(path, rows):
    with open(path, "wb") as out:
        out.write(struct.pack(">II", 0x00000801, len(rows)))
        out.write(bytes(label for _, label in rows))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="data/mnist-subset")
    parser.add_argument("--seed", type=int, default=20180417)
    parser.add_argument("--test", type=int, default=1000)
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([sys.executable, "-m", "pip", "download", "mlxtend==0.24.0",
                        "--no-deps", "-q", "-d", tmp], check=True)
        wheel = next(pathlib.Path(tmp).glob("mlxtend-*.whl"))
        with zipfile.ZipFile(wheel) as z:
            raw = gzip.decompress(z.read("mlxtend/data/data/mnist_5k.csv.gz"))

    rows = []
    for line in io.StringIO(raw.decode()):
        values = [int(float(v)) for v in line.strip().split(",")]
        rows.append((values[:784], values[784]))
    random.Random(args.seed).shuffle(rows)

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    test, train = rows[:args.test], rows[args.test:]
    write_images(out / "train-images-idx3-ubyte", train)
    write_labels(out / "train-labels-idx1-ubyte", train)
    write_images(out / "test-images-idx3-ubyte", test)
    write_labels(out / "test-labels-idx1-ubyte", test)
    print(f"wrote {len(train)} train / {len(test)} test images to {out}")


if __name__ == "__main__":
    main()
