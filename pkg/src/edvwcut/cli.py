"""Command-line interface.

Exit codes: 0 success, 1 a verification property failed, 2 invalid input
(unreadable file, parse error, bad spec or seeds, edge-size limit), 3 a
reduction or solver error.  Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .errors import (
    DomainError,
    DuplicateDeclaration,
    DuplicateMember,
    EdgeTooLarge,
    EdvwError,
    EmptySeeds,
    EmptyVocabulary,
    FamilyError,
    KeyMismatch,
    NonPositiveWeight,
    OverlappingSeeds,
    ParseError,
    UnknownVertex,
)
from .flownet import hypergraph_min_st_cut, max_flow_min_cut
from .hypergraph import build_hypergraph, read_hypergraph
from .network import format_network, parse_network
from .reduction import (
    asym_envelope,
    enumerate_Qa,
    enumerate_Qs,
    gadget_split_values,
    reduce_asymmetric,
    reduce_hypergraph,
    reduce_symmetric,
    sym_envelope,
)
from .splitting import (
    Family,
    generator,
    parse_spec,
    resolve_specs,
    split_table,
    submodularity_violation,
)
from .sparsify import sparsify_continuous, verify_approximation
from . import textpipe

log = logging.getLogger("edvwcut")

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_REDUCTION = 0, 1, 2, 3

INPUT_ERRORS = (ParseError, UnknownVertex, DuplicateDeclaration, DuplicateMember,
                NonPositiveWeight, FamilyError, OverlappingSeeds, EmptySeeds,
                EmptyVocabulary, KeyMismatch, DomainError)


def fmt(x: float) -> str:
    """12 significant digits; ``inf`` for infinity."""
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def _names(text: str) -> list[str]:
    return [t for t in text.split(",") if t]


# -- subcommands -----------------------------------------------------------------

def cmd_reduce(args) -> int:
    H = read_hypergraph(args.input)
    spec = parse_spec(args.split)
    G = reduce_hypergraph(H, spec, mode=args.mode, epsilon=args.epsilon,
                          strategy=args.strategy, sparse_method=args.sparse_method,
                          max_edge_size=args.max_edge_size)
    text = format_network(G)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)
    out = sys.stderr if args.output == "-" else sys.stdout
    print(f"nodes={G.n_nodes}", file=out)
    print(f"arcs={G.n_arcs}", file=out)
    print(f"auxiliary={G.n_aux}", file=out)
    for r in G.strategies:
        print(f"edge {r.edge_id} gadget={r.gadget} terms={r.terms}", file=out)
    return EXIT_OK


def _edge_for_sparsify(args):
    if args.input:
        H = read_hypergraph(args.input)
        if args.edge is None:
            if len(H) != 1:
                raise ParseError("--edge is required when the hypergraph has several hyperedges")
            return H.hyperedges[0]
        try:
            return H.edge(args.edge)
        except KeyError:
            raise ParseError(f"no hyperedge {args.edge!r}") from None
    if args.gammas:
        try:
            gammas = [float(t) for t in args.gammas.split(",")]
        except ValueError:
            raise ParseError(f"bad --gammas {args.gammas!r}") from None
        H = build_hypergraph([f"v{i + 1}" for i in range(len(gammas))],
                             [("e", 1.0, {f"v{i + 1}": g for i, g in enumerate(gammas)})])
        return H.hyperedges[0]
    return None


def cmd_sparsify(args) -> int:
    spec = parse_spec(args.split)
    e = _edge_for_sparsify(args)
    if e is None:
        # pure function mode on [0, total/2] (symmetric) or [0, total]
        if args.total is None:
            raise ParseError("give --input, --gammas or --total")
        total = args.total
        g = lambda x: spec.g(x, total)  # noqa: E731
        slope = lambda x, left=False: spec.slope(x, total, left=left)  # noqa: E731
        if spec.family is Family.CUSTOM and not spec.has_slope:
            raise ParseError("continuous sparsification of a custom g needs an edge (--gammas)")
        env = sparsify_continuous(g, slope, total / 2 if args.half is None else args.half,
                                  args.epsilon)
    else:
        symmetric = spec.is_symmetric(e.total)
        method = args.method
        env = (sym_envelope if symmetric else asym_envelope)(e, spec, args.epsilon, method)
    bps = env.breakpoints() + [env.end]
    print("piece,slope,intercept,breakpoint")
    for i, ((m, d), b) in enumerate(zip(env.pieces, bps), 1):
        print(f"{i},{fmt(m)},{fmt(d)},{fmt(b)}")
    return EXIT_OK


def cmd_mincut(args) -> int:
    with open(args.input) as fh:
        G = parse_network(fh.read())
    cut = max_flow_min_cut(G, args.source, args.sink, args.scale_digits)
    print(f"value={fmt(cut.value)}")
    for v in range(G.n_nodes):
        print(f"{v} {'S' if v in cut.source_side else 'T'}")
    return EXIT_OK


def cmd_hypercut(args) -> int:
    H = read_hypergraph(args.input)
    spec = parse_spec(args.split)
    cut = hypergraph_min_st_cut(H, spec, _names(args.sources), _names(args.sinks),
                                mode=args.mode, epsilon=args.epsilon,
                                max_edge_size=args.max_edge_size)
    print(f"value={fmt(cut.value)}")
    print(f"hypergraph_value={fmt(cut.hypergraph_value)}")
    print("source_side=" + ",".join(cut.names(H)))
    return EXIT_OK


def cmd_classify(args) -> int:
    docs = textpipe.read_corpus_tsv(args.corpus)
    c = textpipe.build_corpus(docs, args.min_df, args.max_df, args.top_k)
    fam = Family(args.split)
    cfg = textpipe.ExperimentConfig(alpha=args.alpha, beta=args.beta, split_family=fam,
                                    labeled_fraction=args.labeled_fraction,
                                    folds=args.folds, seed=args.seed, tf=args.tf)
    if args.grid:
        grid = [float(t) for t in args.grid.split(",")]
    else:
        grid = textpipe.alpha_grid() if args.param == "alpha" else textpipe.beta_grid()
    res = textpipe.run_experiment(c, cfg, grid, args.param)
    if args.output and args.output != "-":
        textpipe.write_results_csv(args.output, res.cv_table, res.best)
    else:
        textpipe.write_results_csv(sys.stdout, res.cv_table, res.best)
    print(f"documents={len(c)} vocabulary={len(c.vocabulary)} labeled={len(res.pool)}",
          file=sys.stderr)
    print(f"best_{args.param}={fmt(res.best)} test_accuracy={fmt(res.test_accuracy)}",
          file=sys.stderr)
    return EXIT_OK


def _verify_edge(e, spec, failures, counts, epsilons=(0.01, 0.1, 0.5)):
    table = split_table(spec, e)
    # submodularity of the splitting function
    counts["submodular"] += 1
    viol = submodularity_violation(e, table)
    if viol is not None:
        S1, S2, v, gap = viol
        failures.append(f"submodular edge={e.id} S={sorted(S1)} T={sorted(S2)} v={v} gap={fmt(gap)}")
        return
    if len(e) < 2:
        return
    # gadget equivalence for families with a single closed-form gadget
    local = _single(e)
    G = reduce_hypergraph(local, spec, strategy="direct")
    if G.strategies[0].gadget in ("clique", "star", "sym", "asym", "lawler"):
        counts["gadget"] += 1
        _compare(e, table, gadget_split_values(G, local.hyperedges[0]), "gadget", failures)
    if spec.family is Family.ALL_OR_NOTHING:
        return
    # exact gadget combination
    counts["exact"] += 1
    comb = (reduce_symmetric if spec.is_symmetric(e.total) else reduce_asymmetric)(e, spec)
    _compare(e, table, gadget_split_values(comb.expand(e), e), "exact", failures)
    # sparsifier sandwich
    g = generator(spec, e)[0]
    sym = spec.is_symmetric(e.total)
    Q = enumerate_Qs(e) if sym else enumerate_Qa(e)
    for eps in epsilons:
        counts["sandwich"] += 1
        env = (sym_envelope if sym else asym_envelope)(e, spec, eps)
        rep = verify_approximation(env, g, Q, eps)
        if not rep.ok:
            failures.append(f"sandwich edge={e.id} eps={eps} x={fmt(rep.worst_x)} "
                            f"ratio={fmt(rep.max_ratio)}")


def _single(e):
    """One-edge hypergraph on the members of e, in member order (same bitmasks)."""
    names = [str(v) for v in e.members]
    return build_hypergraph(names, [(e.id, e.kappa, list(zip(names, e.gamma)))])


def _compare(e, expected, got, label, failures):
    scale = np.maximum(1.0, np.abs(expected))
    bad = np.flatnonzero(np.abs(got - expected) > 1e-9 * scale)
    if bad.size:
        m = int(bad[0])
        failures.append(f"{label} edge={e.id} S={sorted(e.subset_of_mask(m))} "
                        f"expected={fmt(float(expected[m]))} got={fmt(float(got[m]))}")


def cmd_verify(args) -> int:
    H = read_hypergraph(args.input)
    spec = parse_spec(args.split)
    big = [e.id for e in H.hyperedges if len(e) > args.max_edge_size]
    if big:
        print(f"error: hyperedges {big} exceed --max-edge-size {args.max_edge_size}",
              file=sys.stderr)
        return EXIT_INPUT
    failures: list[str] = []
    counts = {"submodular": 0, "gadget": 0, "exact": 0, "sandwich": 0}
    for e, sp in zip(H.hyperedges, resolve_specs(H, spec)):
        try:
            _verify_edge(e, sp, failures, counts)
        except EdvwError as exc:
            failures.append(f"{type(exc).__name__} edge={e.id}: {exc}")
    for k, v in counts.items():
        print(f"{k}={v}")
    print(f"failures={len(failures)}")
    for f in failures:
        print(f, file=sys.stderr)
    return EXIT_FAIL if failures else EXIT_OK


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized steps")
    common.add_argument("--threads", type=int, default=1, help="cap on internal parallelism")

    p = argparse.ArgumentParser(prog="edvwcut", description=__doc__.splitlines()[0],
                                parents=[common])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def split_arg(q, required=True):
        q.add_argument("--split", required=required,
                       help="product | minhalf | thresh:BETA | threshabs:B | wmin:A,B | aon | "
                            "custom:EXPR (x, G); append *kappa to scale by the edge weight")

    r = sub.add_parser("reduce", parents=[common], help="reduce a hypergraph to a flow graph")
    r.add_argument("--input", required=True)
    split_arg(r)
    r.add_argument("--mode", choices=("exact", "sparse"), default="exact")
    r.add_argument("--epsilon", type=float, default=0.1)
    r.add_argument("--strategy", choices=("auto", "combination", "direct"), default="auto")
    r.add_argument("--sparse-method", choices=("auto", "discrete", "continuous"), default="auto")
    r.add_argument("--max-edge-size", type=int, default=20)
    r.add_argument("--output", default="-")
    r.set_defaults(func=cmd_reduce)

    s = sub.add_parser("sparsify", parents=[common], help="piecewise-linear envelope of g")
    split_arg(s)
    s.add_argument("--input")
    s.add_argument("--edge")
    s.add_argument("--gammas", help="comma-separated vertex weights of one hyperedge")
    s.add_argument("--total", type=float, help="gamma_e(e) for the function-only mode")
    s.add_argument("--half", type=float, help="right end of the interval (default total/2)")
    s.add_argument("--epsilon", type=float, default=0.1)
    s.add_argument("--method", choices=("auto", "discrete", "continuous"), default="auto")
    s.set_defaults(func=cmd_sparsify)

    m = sub.add_parser("mincut", parents=[common], help="min s-t cut of a flow graph")
    m.add_argument("--input", required=True)
    m.add_argument("--source", type=int, required=True)
    m.add_argument("--sink", type=int, required=True)
    m.add_argument("--scale-digits", type=int)
    m.set_defaults(func=cmd_mincut)

    h = sub.add_parser("hypercut", parents=[common], help="seeded minimum hypergraph cut")
    h.add_argument("--input", required=True)
    split_arg(h)
    h.add_argument("--sources", required=True, help="comma-separated vertex names")
    h.add_argument("--sinks", required=True, help="comma-separated vertex names")
    h.add_argument("--mode", choices=("exact", "sparse"), default="exact")
    h.add_argument("--epsilon", type=float, default=0.1)
    h.add_argument("--max-edge-size", type=int, default=20)
    h.set_defaults(func=cmd_hypercut)

    c = sub.add_parser("classify", parents=[common], help="document classification experiment")
    c.add_argument("--corpus", required=True, help="TSV doc_id, label (0/1/?), text")
    c.add_argument("--split", choices=("product", "minhalf", "thresh", "aon"), default="product")
    c.add_argument("--alpha", type=float, default=1.0)
    c.add_argument("--beta", type=float, default=0.15)
    c.add_argument("--param", choices=("alpha", "beta"), default="alpha")
    c.add_argument("--grid", help="comma-separated values (default: the standard grid)")
    c.add_argument("--labeled-fraction", type=float, default=0.3)
    c.add_argument("--folds", type=int, default=5)
    c.add_argument("--min-df", type=float, default=0.002)
    c.add_argument("--max-df", type=float, default=0.03)
    c.add_argument("--top-k", type=int, default=200)
    c.add_argument("--tf", choices=("raw", "relative"), default="raw")
    c.add_argument("--output", default="-")
    c.set_defaults(func=cmd_classify)

    v = sub.add_parser("verify", parents=[common], help="run the property oracles")
    v.add_argument("--input", required=True)
    split_arg(v)
    v.add_argument("--max-edge-size", type=int, default=12)
    v.set_defaults(func=cmd_verify)
    return p


def _setup_logging():
    level = os.environ.get("EDVW_LOG", "").lower()
    lvl = {"debug": logging.DEBUG, "info": logging.INFO}.get(level, logging.WARNING)
    logging.basicConfig(level=lvl, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    np.random.seed(args.seed)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EdgeTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REDUCTION
    except (EdvwError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REDUCTION


if __name__ == "__main__":
    sys.exit(main())
