"""Document classification with word hypergraphs.

Documents are vertices and selected words are hyperedges; a document is a
member of a word's hyperedge when the word occurs in it, with vertex weight
``tfidf(word, doc) ** alpha``.  Two labelled seed sets are separated by a
minimum hypergraph s-t cut and the remaining documents take the label of
their side.
"""

from __future__ import annotations

import csv
import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import EmptySeeds, EmptyVocabulary, KeyMismatch, ParseError
from .flownet import network_min_st_cut
from .hypergraph import Hypergraph, build_hypergraph
from .reduction import reduce_hypergraph
from .splitting import Family, SplittingSpec

log = logging.getLogger(__name__)

_TOKEN = re.compile(r"[a-z0-9]+")


def stop_words() -> frozenset:
    """The bundled 318-word English stop list."""
    text = resources.files("edvwcut").joinpath("data/stopwords.txt").read_text()
    return frozenset(w for w in text.split() if w)


def tokenize(text: str, stop: Optional[frozenset] = None) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop tokens shorter than 2."""
    toks = [t for t in _TOKEN.findall(text.lower()) if len(t) >= 2]
    if stop:
        toks = [t for t in toks if t not in stop]
    return toks


@dataclass(frozen=True)
class Corpus:
    doc_ids: tuple[str, ...]
    counts: tuple[Mapping[str, int], ...]  # vocabulary words only
    vocabulary: tuple[str, ...]
    labels: Mapping[str, int] = field(default_factory=dict)  # known labels only
    lengths: tuple[int, ...] = ()  # token count per document after stop-word removal

    def __len__(self):
        return len(self.doc_ids)

    def count_matrix(self) -> np.ndarray:
        col = {w: j for j, w in enumerate(self.vocabulary)}
        X = np.zeros((len(self.doc_ids), len(self.vocabulary)))
        for i, cnt in enumerate(self.counts):
            for w, c in cnt.items():
                X[i, col[w]] = c
        return X


@dataclass(frozen=True)
class ExperimentConfig:
    alpha: float = 1.0
    beta: Optional[float] = None
    split_family: Family = Family.PRODUCT
    labeled_fraction: float = 0.3
    folds: int = 5
    seed: int = 0
    tf: str = "raw"

    def __post_init__(self):
        object.__setattr__(self, "split_family", Family(self.split_family))
        if not self.alpha >= 0:
            raise ValueError("alpha must be >= 0")
        if self.beta is not None and not 0 < self.beta <= 1:
            raise ValueError("beta must lie in (0, 1]")
        if not 0 < self.labeled_fraction < 1:
            raise ValueError("labeled_fraction must lie in (0, 1)")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")

    def spec(self, beta: Optional[float] = None) -> SplittingSpec:
        fam = self.split_family
        if fam is Family.PRODUCT:
            return SplittingSpec.product()
        if fam is Family.MINHALF:
            return SplittingSpec.minhalf()
        if fam is Family.THRESHOLDED_MIN:
            return SplittingSpec.thresholded(beta=beta if beta is not None else self.beta)
        if fam is Family.ALL_OR_NOTHING:
            return SplittingSpec.all_or_nothing()
        raise ValueError(f"family {fam.value} is not used by the text pipeline")


# -- corpus ------------------------------------------------------------------

def read_corpus_tsv(path) -> list[tuple[str, Optional[int], str]]:
    """Rows ``doc_id<TAB>label<TAB>text``; label ``?`` means unknown."""
    rows = []
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t", 2)
            if len(parts) != 3:
                raise ParseError(f"line {lineno}: expected three tab-separated fields")
            doc, label, text = parts
            if label == "?":
                rows.append((doc, None, text))
            elif label in ("0", "1"):
                rows.append((doc, int(label), text))
            else:
                raise ParseError(f"line {lineno}: label must be 0, 1 or ?")
    return rows


def write_corpus_tsv(path, docs):
    with open(path, "w", newline="") as fh:
        for doc, label, text in docs:
            text = " ".join(text.split())
            fh.write(f"{doc}\t{'?' if label is None else label}\t{text}\n")


def build_corpus(docs: Iterable, min_df: float = 0.002, max_df: float = 0.03,
                 top_k: int = 200, stop: Optional[frozenset] = None) -> Corpus:
    """Select the vocabulary and drop documents that contain none of it.

    ``docs`` yields ``(doc_id, label, text)`` (label may be None) or
    ``(doc_id, text)``.  Words whose document frequency, as a fraction of
    all documents, lies in ``[min_df, max_df]`` are ranked by total count
    (ties alphabetically) and the ``top_k`` most frequent are kept.
    """
    if not 0 <= min_df < max_df <= 1:
        raise ValueError("need 0 <= min_df < max_df <= 1")
    stop = stop_words() if stop is None else stop
    ids, labels, toks = [], {}, []
    for row in docs:
        if len(row) == 2:
            doc, text = row
            label = None
        else:
            doc, label, text = row
        doc = str(doc)
        ids.append(doc)
        if label is not None:
            labels[doc] = int(label)
        toks.append(Counter(tokenize(text, stop)))
    if len(set(ids)) != len(ids):
        raise ParseError("duplicate document ids")
    n = len(ids)
    if n == 0:
        raise EmptyVocabulary("no documents")
    df: Counter = Counter()
    tf: Counter = Counter()
    for cnt in toks:
        df.update(cnt.keys())
        tf.update(cnt)
    eligible = [w for w in df if min_df <= df[w] / n <= max_df]
    eligible.sort(key=lambda w: (-tf[w], w))
    vocab = set(eligible[:top_k])
    kept_ids, kept_counts, lengths = [], [], []
    for doc, cnt in zip(ids, toks):
        sub = {w: c for w, c in sorted(cnt.items()) if w in vocab}
        if sub:
            kept_ids.append(doc)
            kept_counts.append(sub)
            lengths.append(sum(cnt.values()))
    if not vocab or not kept_ids:
        raise EmptyVocabulary("no word survives the document-frequency filter")
    dropped = n - len(kept_ids)
    if dropped:
        log.info("dropped %d documents without vocabulary words", dropped)
    vocabulary = tuple(w for w in eligible[:top_k])
    return Corpus(tuple(kept_ids), tuple(kept_counts), vocabulary,
                  {d: labels[d] for d in kept_ids if d in labels}, tuple(lengths))


def tfidf_matrix(c: Corpus, tf: str = "raw") -> np.ndarray:
    """Documents x vocabulary tf-idf values.

    ``raw``: raw counts, smoothed idf ``ln((1+N)/(1+df)) + 1`` and per-document
    L2 normalisation.  ``relative``: counts divided by the document's token
    count times the same idf, without normalisation.
    """
    X = c.count_matrix()
    N = X.shape[0]
    df = np.count_nonzero(X, axis=0)
    idf = np.log((1 + N) / (1 + df)) + 1
    if tf == "raw":
        W = X * idf
        norms = np.linalg.norm(W, axis=1, keepdims=True)
        return W / np.where(norms > 0, norms, 1.0)
    if tf == "relative":
        lengths = np.asarray(c.lengths, dtype=float)[:, None]
        return X / lengths * idf
    raise ValueError(f"unknown tf mode {tf!r}")


def tfidf_edvws(c: Corpus, alpha: float, tf: str = "raw") -> Hypergraph:
    """Word hypergraph with ``gamma_e(v) = tfidf(e, v) ** alpha`` and kappa 1."""
    if not alpha >= 0:
        raise ValueError("alpha must be >= 0")
    W = tfidf_matrix(c, tf)
    edges = []
    for j, word in enumerate(c.vocabulary):
        rows = np.flatnonzero(W[:, j] > 0)
        members = [(c.doc_ids[i], float(W[i, j]) ** alpha) for i in rows]
        edges.append((word, 1.0, members))
    return build_hypergraph(c.doc_ids, edges)


# -- classification ------------------------------------------------------------

def classify(H: Hypergraph, spec, labeled_1, labeled_2, labels=(1, 2), network=None,
             mode: str = "exact", epsilon: float = 0.1) -> dict:
    """Label every vertex by its side of the seeded minimum cut.

    Vertices on the source side (with ``labeled_1``) get ``labels[0]``, the
    rest ``labels[1]``.  Keys are vertex names.
    """
    labeled_1, labeled_2 = list(labeled_1), list(labeled_2)
    if not labeled_1 or not labeled_2:
        raise EmptySeeds("both seed sets must be nonempty")
    if network is None:
        network = reduce_hypergraph(H, spec, mode=mode, epsilon=epsilon, strategy="direct")
    cut = network_min_st_cut(H, network, spec, labeled_1, labeled_2)
    return {name: labels[0] if i in cut.S else labels[1] for i, name in enumerate(H.vertices)}


def accuracy(pred: Mapping, truth: Mapping, exclude: Iterable = ()) -> float:
    """Fraction of keys (outside ``exclude``) on which the two maps agree."""
    if set(pred) != set(truth):
        raise KeyMismatch("prediction and ground truth cover different keys")
    skip = set(exclude)
    keys = [k for k in truth if k not in skip]
    if not keys:
        return math.nan
    return sum(pred[k] == truth[k] for k in keys) / len(keys)


def alpha_grid() -> np.ndarray:
    return np.round(np.arange(16) * 0.2, 10)


def beta_grid() -> np.ndarray:
    return np.logspace(-3.5, -1.0 / 3.0, 20)


def sample_labeled(labels: Mapping[str, int], fraction: float, rng) -> list[str]:
    """Stratified sample of the labelled documents, sorted by id."""
    out = []
    for cls in (0, 1):
        docs = sorted(d for d, y in labels.items() if y == cls)
        k = max(1, int(round(fraction * len(docs))))
        if k > len(docs):
            raise EmptySeeds(f"class {cls} has no labelled documents")
        out += [docs[i] for i in rng.choice(len(docs), size=k, replace=False)]
    return sorted(out)


def stratified_folds(pool: Sequence[str], labels: Mapping[str, int], k: int, rng):
    """Split ``pool`` into ``k`` folds with balanced class counts."""
    folds: list[list[str]] = [[] for _ in range(k)]
    for cls in (0, 1):
        docs = [d for d in pool if labels[d] == cls]
        if len(docs) < k:
            raise ValueError(f"class {cls} has {len(docs)} labelled documents, fewer than {k} folds")
        docs = [docs[i] for i in rng.permutation(len(docs))]
        for i, d in enumerate(docs):
            folds[i % k].append(d)
    return [sorted(f) for f in folds]


def _graph(c: Corpus, config: ExperimentConfig, param: str, value: float):
    alpha = value if param == "alpha" else config.alpha
    beta = value if param == "beta" else config.beta
    H = tfidf_edvws(c, alpha, config.tf)
    spec = config.spec(beta)
    return H, spec, reduce_hypergraph(H, spec, strategy="direct")


def _predict(H, spec, G, seeds: Sequence[str], labels: Mapping[str, int]) -> dict:
    src = [d for d in seeds if labels[d] == 0]
    snk = [d for d in seeds if labels[d] == 1]
    return classify(H, spec, src, snk, labels=(0, 1), network=G)


def cross_validate(c: Corpus, config: ExperimentConfig, param_grid, param: str = "alpha",
                   pool: Optional[Sequence[str]] = None):
    """k-fold cross-validation of ``param`` over the labelled pool.

    Returns ``(best_value, table)`` where ``table[value]`` lists the per-fold
    accuracies.  Ties go to the smaller value.
    """
    if param not in ("alpha", "beta"):
        raise ValueError("param must be 'alpha' or 'beta'")
    rng = np.random.default_rng(config.seed)
    if pool is None:
        pool = sample_labeled(c.labels, config.labeled_fraction, rng)
    folds = stratified_folds(pool, c.labels, config.folds, rng)
    table = {}
    for value in sorted(float(v) for v in param_grid):
        H, spec, G = _graph(c, config, param, value)
        accs = []
        for held in folds:
            held_set = set(held)
            train = [d for d in pool if d not in held_set]
            pred = _predict(H, spec, G, train, c.labels)
            accs.append(accuracy({d: pred[d] for d in held}, {d: c.labels[d] for d in held}))
        table[value] = accs
    best = max(table, key=lambda v: (np.mean(table[v]), -v))
    return best, table


@dataclass(frozen=True)
class ExperimentResult:
    best: float
    cv_table: dict
    test_accuracy: float
    pool: tuple[str, ...]


def run_experiment(c: Corpus, config: ExperimentConfig, param_grid=None,
                   param: str = "alpha") -> ExperimentResult:
    """Tune ``param`` by cross-validation, then label the remaining documents."""
    if param_grid is None:
        param_grid = alpha_grid() if param == "alpha" else beta_grid()
    rng = np.random.default_rng(config.seed)
    pool = sample_labeled(c.labels, config.labeled_fraction, rng)
    best, table = cross_validate(c, config, param_grid, param, pool)
    H, spec, G = _graph(c, config, param, best)
    pred = _predict(H, spec, G, pool, c.labels)
    truth = dict(c.labels)
    acc = accuracy({d: pred[d] for d in truth}, truth, exclude=pool)
    return ExperimentResult(best, table, acc, tuple(pool))


def accuracy_curve(c: Corpus, config: ExperimentConfig, param_grid, param: str = "alpha",
                   realizations: int = 10) -> dict:
    """Mean test accuracy per parameter value over random labelled pools."""
    pools = []
    for r in range(realizations):
        rng = np.random.default_rng(config.seed + r)
        pools.append(sample_labeled(c.labels, config.labeled_fraction, rng))
    truth = dict(c.labels)
    out = {}
    for value in sorted(float(v) for v in param_grid):
        H, spec, G = _graph(c, config, param, value)
        accs = []
        for pool in pools:
            pred = _predict(H, spec, G, pool, c.labels)
            accs.append(accuracy({d: pred[d] for d in truth}, truth, exclude=pool))
        out[value] = accs
    return out


def write_results_csv(path_or_file, table: Mapping[float, Sequence[float]], best=None):
    """Rows ``param,fold,accuracy`` and a ``best`` summary row."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["param", "fold", "accuracy"])
        for value, accs in table.items():
            for i, a in enumerate(accs):
                w.writerow([f"{value:.12g}", i, f"{a:.12g}"])
        if best is not None:
            w.writerow([f"{best:.12g}", "mean", f"{float(np.mean(table[best])):.12g}"])
    finally:
        if own:
            fh.close()


# -- synthetic data -------------------------------------------------------------

def synthetic_corpus(n_docs: int = 200, seed: int = 0, words_per_class: int = 120,
                     topics: int = 5, burst: float = 3.0, leak: float = 0.3,
                     background: int = 0, shared_words: int = 100,
                     zipf: float = 0.5) -> list[tuple[str, int, str]]:
    """Two-cluster corpus with planted class vocabularies.

    Every document picks ``topics`` distinct words of its own class and
    repeats each ``1 + Poisson(burst)`` times, adds ``Poisson(leak)`` single
    occurrences of words from the other class, and ``background`` tokens
    from a shared list.  Word popularity follows ``rank ** -zipf``.  Labels
    alternate, so the classes are balanced.
    """
    rng = np.random.default_rng(seed)
    own = [[f"c{k}w{i:03d}" for i in range(words_per_class)] for k in (0, 1)]
    shared = [f"bg{i:03d}" for i in range(shared_words)]
    p_own = np.arange(1, words_per_class + 1) ** -zipf
    p_own /= p_own.sum()
    p_bg = np.arange(1, shared_words + 1) ** -zipf
    p_bg /= p_bg.sum()
    docs = []
    for i in range(n_docs):
        y = i % 2
        words = []
        for w in rng.choice(own[y], size=topics, replace=False, p=p_own):
            words += [w] * (1 + rng.poisson(burst))
        n_leak = min(words_per_class, rng.poisson(leak))
        words += list(rng.choice(own[1 - y], size=n_leak, replace=False, p=p_own))
        if background:
            words += list(rng.choice(shared, size=background, p=p_bg))
        docs.append((f"d{i:04d}", y, " ".join(words)))
    return docs


SYNTHETIC_CORPUS_FILTER = dict(min_df=0.01, max_df=0.15, top_k=200)
