#!/usr/bin/env python3
"""Convert the Cornell sentence-polarity review set (review_polarity.tar.gz,
1000 positive and 1000 negative reviews) into movie.txt and movie.labels.

    python3 tools/prepare_movie_reviews.py review_polarity.tar.gz out/
"""

import argparse
import hashlib
import tarfile
from pathlib import Path


def read_archive(path):
    docs = []
    with tarfile.open(path) as tar:
        members = sorted((m for m in tar.getmembers() if m.isfile() and m.name.endswith(".txt")),
                         key=lambda m: m.name)
        for m in members:
            label = Path(m.name).parent.name
            if label not in ("pos", "neg"):
                continue
            text = tar.extractfile(m).read().decode("utf-8", errors="replace")
            docs.append((label, " ".join(text.lower().split())))
    return docs


def main():
    parser = argparse.ArgumentParser(description="Prepare movie review inputs")
    parser.add_argument("archive", type=Path)
    parser.add_argument("out", type=Path)
    args = parser.parse_args()

    docs = read_archive(args.archive)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "movie.txt").write_text("\n".join(d[1] for d in docs) + "\n", encoding="utf-8")
    (args.out / "movie.labels").write_text("\n".join(d[0] for d in docs) + "\n", encoding="utf-8")
    print(f"documents={len(docs)}")
    for name in ("movie.txt", "movie.labels"):
        print(f"{name}.sha256={hashlib.sha256((args.out / name).read_bytes()).hexdigest()}")


if __name__ == "__main__":
    main()
