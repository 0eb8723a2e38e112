"""Fetch two 20 Newsgroups categories and write the classifier's TSV input.

Usage::

    python scripts/fetch_20news.py data/20news_moto_space.tsv

Downloads ``rec.motorcycles`` and ``sci.space`` (train and test subsets,
headers, footers and quotes removed) through scikit-learn and writes
``doc_id<TAB>label<TAB>text`` with label 0 for rec.motorcycles and 1 for
sci.space.  Requires network access and scikit-learn.
"""

import sys

from sklearn.datasets import fetch_20newsgroups

CATEGORIES = ["rec.motorcycles", "sci.space"]


def main(path):
    data = fetch_20newsgroups(subset="all", categories=CATEGORIES,
                              remove=("headers", "footers", "quotes"))
    names = data.target_names
    with open(path, "w") as fh:
        for i, (text, y) in enumerate(zip(data.data, data.target)):
            label = CATEGORIES.index(names[y])
            text = " ".join(text.split())
            fh.write(f"doc{i:05d}\t{label}\t{text}\n")
    print(f"wrote {len(data.data)} documents to {path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/20news_moto_space.tsv")
