#!/usr/bin/env python3
"""Convert the 20news-bydate distribution into matrep inputs.

Writes 20ng.txt (one lowercased document per line), 20ng.labels (newsgroup
name per line) and 20ng.split ("train" or "test" per line), then prints the
SHA-256 of each output.

    python3 tools/prepare_20ng.py 20news-bydate.tar.gz out/
"""

import argparse
import hashlib
import re
import tarfile
from pathlib import Path

_SIGNATURE = re.compile(r"^\s*-{2,}\s*$")


def strip_header(text):
    _, blank, body = text.partition("\n\n")
    return body if blank else text


def strip_footer(text):
    lines = text.strip().split("\n")
    for i in range(len(lines) - 1, -1, -1):
        if _SIGNATURE.match(lines[i]):
            return "\n".join(lines[:i])
    return text


def clean(raw):
    text = strip_footer(strip_header(raw))
    return " ".join(text.lower().split())


def read_archive(path):
    docs = []
    with tarfile.open(path) as tar:
        members = sorted((m for m in tar.getmembers() if m.isfile()), key=lambda m: m.name)
        for m in members:
            parts = Path(m.name).parts
            if len(parts) < 3:
                continue
            split_dir, group = parts[-3], parts[-2]
            split = "train" if split_dir.endswith("train") else "test"
            raw = tar.extractfile(m).read().decode("latin-1")
            docs.append((split, group, clean(raw)))
    return docs


def sha256(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("archive", type=Path, help="20news-bydate.tar.gz")
    parser.add_argument("out", type=Path, help="output directory")
    parser.add_argument("--keep-empty", action="store_true", help="keep documents that are empty after cleaning")
    args = parser.parse_args()

    docs = read_archive(args.archive)
    if not args.keep_empty:
        docs = [d for d in docs if d[2]]
    args.out.mkdir(parents=True, exist_ok=True)
    outputs = {
        "20ng.txt": [d[2] for d in docs],
        "20ng.labels": [d[1] for d in docs],
        "20ng.split": [d[0] for d in docs],
    }
    for name, lines in outputs.items():
        (args.out / name).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"documents={len(docs)}")
    for name in outputs:
        print(f"{name}.sha256={sha256(args.out / name)}")


if __name__ == "__main__":
    main()
