"""Command-line harness: instance I/O, seeded runs, reports and the acceptance sweep."""
import argparse
import csv
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
import hashlib
import io
import json
import os
from pathlib import Path
import sys

import numpy as np

from . import __version__, gen
from .chromatic import (VerificationError, cluster_color_regular_kt_free,
                        cluster_color_regular_triangle_free, dnl_color_triangle_free,
                        homomorphism_quotient, is_proper)
from .cluster import (ClusteringError, HypothesisError, euclidean_clustering, hamming_clustering,
                      regularity_partition, set_system_clustering)
from .core import (Digraph, SetSystem, SimpleGraph, TriGraph, TriHypergraph, TriTournament,
                   disjointness_trigraph, from_json, mask_of)
from .metric import PointCloud, metric_trigraph
from .nets import NetError, NetRequest, sample_net_with_retries
from .tournament import (TransitiveFamily, VoterProfile, dominate_from_fractional_coloring,
                         dominating_set_tri_tournament, enumerated_family, majority_domination,
                         majority_tri_tournament)
from .vc import vc_dimension

EXIT_OK, EXIT_INVALID, EXIT_HYPOTHESIS, EXIT_USAGE = 0, 2, 3, 64


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- io

def _plain(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if hasattr(x, "to_json"):
        return x.to_json()
    raise TypeError(f"cannot serialise {type(x).__name__}")


def dumps(doc):
    return json.dumps(doc, sort_keys=True, indent=2, default=_plain) + "\n"


def sha256(data):
    return hashlib.sha256(data if isinstance(data, bytes) else data.encode()).hexdigest()


def load(path):
    try:
        raw = Path(path).read_bytes()
        doc = json.loads(raw)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    kind = doc.get("type")
    if kind == "PointCloud":
        obj = PointCloud.from_json(doc)
    elif kind == "VoterProfile" or (kind is None and "orders" in doc):
        obj = VoterProfile.from_json(doc)
    elif kind is None and not doc:
        obj = TriHypergraph(0, [])
    else:
        obj = from_json(doc)
    return obj, sha256(raw)


def _instance(args, inputs):
    if getattr(args, "family", None):
        return gen_named_or_family(args.family, _params(args.param))
    if not args.input:
        raise UsageError("need --input or --family")
    obj, h = load(args.input)
    inputs[str(args.input)] = h
    return obj


def _params(items):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k] = json.loads(v)
        except json.JSONDecodeError:
            out[k] = v
    return out


# ---------------------------------------------------------------- generate

FAMILIES = {
    "kneser": lambda p: gen.kneser_graph(p.get("n", 5), p.get("k", 2)),
    "schrijver": lambda p: gen.schrijver_graph(p.get("l", 2), p.get("k", 2)),
    "schrijver_hajnal": lambda p: gen.schrijver_hajnal(p.get("l", 3), p.get("k", 2), p.get("K", 2)),
    "borsuk_hajnal": lambda p: gen.borsuk_hajnal(p.get("d", 2), p.get("eps", 0.1), p.get("nx", 60),
                                                 p.get("ny", 40), p.get("seed", 0)),
    "orourke": lambda p: gen.orourke_regular(p.get("t", 4), p.get("eps", 0.05), p.get("scale", 20),
                                             p.get("seed", 0)),
    "andrasfai": lambda p: gen.andrasfai(p.get("k", 3)),
    "regular_tf": lambda p: gen.regular_triangle_free(p.get("kind", "c5"), p.get("a", 10)),
    "regular_k4": lambda p: gen.regular_k4_free(p.get("kind", "tripartite"), p.get("a", 20),
                                                p.get("seed", 0)),
    "dense_tf": lambda p: gen.dense_tf_graph(p.get("n", 200), p.get("eps", 0.05), p.get("seed", 0)),
    "block_set_system": lambda p: gen.block_set_system(p.get("n", 100), p.get("types", 4),
                                                       seed=p.get("seed", 0)),
}
RANDOM_KINDS = ("tournament", "profile", "set_system", "trigraph", "trihypergraph")


def gen_named_or_family(name, params):
    if name in gen.NAMED:
        return gen.named_graph(name)
    if name in FAMILIES:
        return FAMILIES[name](params)
    if name in RANDOM_KINDS:
        return gen.random_instances(name, params, params.get("seed", 0))
    known = sorted(gen.NAMED) + sorted(FAMILIES) + list(RANDOM_KINDS)
    raise UsageError(f"unknown family {name!r}; known: {', '.join(known)}")


def cmd_generate(args, inputs):
    params = _params(args.param)
    params.setdefault("seed", args.seed)
    obj = gen_named_or_family(args.family, params)
    doc = obj.to_json()
    path = Path(args.out) / f"{args.family}.json"
    path.write_text(dumps(doc))
    result = {"family": args.family, "params": params, "path": str(path),
              "digest": sha256(dumps(doc)), "size": getattr(obj, "ground_size", None)}
    if isinstance(obj, SimpleGraph):
        result["graph_digest"] = gen.digest(obj)
    return EXIT_OK, result


# ---------------------------------------------------------------- analyses

def _hypergraph(obj, args):
    if isinstance(obj, TriHypergraph):
        return obj
    if isinstance(obj, TriGraph):
        return obj
    if isinstance(obj, SetSystem):
        if args.eps is None:
            raise UsageError("a set system needs --eps")
        return disjointness_trigraph(obj, args.eps)
    if isinstance(obj, PointCloud):
        if args.eps is None or args.tau is None:
            raise UsageError("a point cloud needs --tau and --eps")
        return metric_trigraph(obj, args.tau, args.eps)
    raise UsageError(f"cannot form a tri-hypergraph from {type(obj).__name__}")


def cmd_vcdim(args, inputs):
    H = _hypergraph(_instance(args, inputs), args)
    return EXIT_OK, vc_dimension(H, cap=args.cap).to_json()


def cmd_net(args, inputs):
    from .core import trigraph_to_hypergraph
    H = _hypergraph(_instance(args, inputs), args)
    if isinstance(H, TriGraph):
        H = trigraph_to_hypergraph(H)
    req = NetRequest(args.delta, args.p, args.dimension, args.seed)
    try:
        rep = sample_net_with_retries(H, req)
    except NetError as exc:
        return EXIT_INVALID, {"valid": False, "error": str(exc)}
    return EXIT_OK, rep.to_json()


def cmd_cluster(args, inputs):
    obj = _instance(args, inputs)
    try:
        if args.regularity:
            if not isinstance(obj, SetSystem):
                raise UsageError("--regularity needs a set system")
            R = regularity_partition(obj, args.eps, args.eta, args.seed)
            return (EXIT_OK if R.bad_fraction <= R.eta else EXIT_INVALID), R.to_json()
        if isinstance(obj, SetSystem):
            cl = set_system_clustering(obj, args.eps, args.eta, args.seed)
        elif isinstance(obj, PointCloud) and obj.geometry == "hamming":
            if args.c is None:
                raise UsageError("hamming clustering needs --c")
            cl = hamming_clustering(obj, args.c, args.eps, args.eta, args.seed)
        elif isinstance(obj, PointCloud) and obj.geometry == "euclidean":
            cl = euclidean_clustering(obj, args.eps, args.eta, args.seed)
        else:
            raise UsageError(f"cannot cluster {type(obj).__name__}")
    except ClusteringError as exc:
        return EXIT_INVALID, {"valid": False, "error": str(exc), "report": exc.report}
    return EXIT_OK, cl.to_json()


def _graph(args, inputs):
    G = _instance(args, inputs)
    if not isinstance(G, SimpleGraph):
        raise UsageError("expected a graph")
    return G


def cmd_color(args, inputs):
    G = _graph(args, inputs)
    try:
        if args.algo == "dnl":
            r = dnl_color_triangle_free(G, args.eps, args.seed, force=args.force)
        elif args.algo == "regular-tf":
            r = cluster_color_regular_triangle_free(G, args.eps, args.seed, force=args.force)
        else:
            r = cluster_color_regular_kt_free(G, args.t, args.eps, args.seed, force=args.force)
    except (VerificationError, ClusteringError, NetError) as exc:
        return EXIT_INVALID, {"proper": False, "error": str(exc)}
    return (EXIT_OK if r.proper else EXIT_INVALID), r.to_json()


def cmd_quotient(args, inputs):
    G = _graph(args, inputs)
    try:
        parts, Q, rep = homomorphism_quotient(G, args.t, args.eps, args.seed, force=args.force)
    except VerificationError as exc:
        return EXIT_INVALID, {"valid": False, "error": str(exc)}
    return EXIT_OK, {"parts": parts, "quotient": Q.to_json(), "report": rep}


def cmd_dominate(args, inputs):
    obj = _instance(args, inputs)
    if args.mode == "majority":
        if not isinstance(obj, VoterProfile):
            raise UsageError("majority mode needs a voter profile")
        dom = majority_domination(obj, args.eps, args.seed)
    elif isinstance(obj, TriTournament):
        dom = dominating_set_tri_tournament(obj, args.seed)
    elif isinstance(obj, Digraph):
        if not obj.is_tournament():
            raise UsageError("tournament mode needs a tournament")
        if args.cover:
            doc, h = load_raw(args.cover)
            inputs[str(args.cover)] = h
            F = TransitiveFamily(obj, [mask_of(m) for m in doc["members"]])
        else:
            F = enumerated_family(obj, seed=args.seed)
        dom = dominate_from_fractional_coloring(obj, F, args.seed)
    else:
        raise UsageError(f"cannot dominate {type(obj).__name__}")
    return (EXIT_OK if dom.valid else EXIT_INVALID), dom.to_json()


def load_raw(path):
    try:
        raw = Path(path).read_bytes()
        return json.loads(raw), sha256(raw)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def cmd_verify(args, inputs):
    obj = _instance(args, inputs)
    doc, h = load_raw(args.witness)
    inputs[str(args.witness)] = h
    doc = doc.get("result", doc)
    if "colors" in doc:
        ok = isinstance(obj, SimpleGraph) and is_proper(obj, doc["colors"])
        return (EXIT_OK if ok else EXIT_INVALID), {"kind": "coloring", "valid": ok}
    if "vertices" in doc:
        X = mask_of(doc["vertices"])
        if isinstance(obj, VoterProfile):
            if args.eps is None:
                raise UsageError("verifying a majority dominating set needs --eps")
            ok = majority_tri_tournament(obj, args.eps)[1].dominates(X)
        elif isinstance(obj, (Digraph, TriTournament)):
            ok = obj.dominates(X)
        else:
            raise UsageError(f"cannot verify domination on {type(obj).__name__}")
        return (EXIT_OK if ok else EXIT_INVALID), {"kind": "domination", "valid": ok}
    if "parts" in doc and "quotient" in doc:
        from .suite import _check_quotient
        Q = SimpleGraph.from_json(doc["quotient"])
        ok = _check_quotient(obj, doc["parts"], Q, args.t)
        return (EXIT_OK if ok else EXIT_INVALID), {"kind": "quotient", "valid": ok}
    if "parts" in doc:
        from .suite import set_violations
        if not isinstance(obj, SetSystem) or args.eps is None or args.eta is None:
            raise UsageError("clustering verification needs a set system, --eps and --eta")
        bad = set_violations(obj, doc["parts"], args.eps, args.eta)
        return (EXIT_OK if bad == 0 else EXIT_INVALID), {"kind": "clustering", "violations": bad,
                                                          "valid": bad == 0}
    raise UsageError("witness format not recognised")


def _workers():
    cap = os.environ.get("DNLKIT_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError as exc:
            raise UsageError("DNLKIT_THREADS must be an integer") from exc
    return n


SUITES = {"acceptance": list(range(1, 15)), "quick": [2, 5, 7, 11, 14]}


def cmd_sweep(args, inputs):
    from .suite import CSV_COLUMNS, run_criterion
    ids = [int(x) for x in args.criteria.split(",")] if args.criteria else SUITES[args.suite]
    workers = min(_workers(), len(ids))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(run_criterion, ids, [args.seed] * len(ids)))
    else:
        rows = [run_criterion(i, args.seed) for i in ids]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(r.csv())
    path = Path(args.out) / f"sweep-{args.suite}.csv"
    path.write_text(buf.getvalue())
    for r in rows:
        print(r.line(), file=sys.stderr)
    ok = all(r.passed for r in rows)
    return (EXIT_OK if ok else EXIT_INVALID), {"csv": str(path), "csv_digest": sha256(buf.getvalue()),
                                                "rows": [r.to_json() for r in rows],
                                                "passed": sum(r.passed for r in rows),
                                                "total": len(rows)}


# ---------------------------------------------------------------- parser

def build_parser():
    common = Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default="dnlkit-out", help="report directory")
    common.add_argument("--report", help="report path (default OUT/SUBCOMMAND.json)")

    src = Parser(add_help=False)
    src.add_argument("--input", help="instance JSON")
    src.add_argument("--family", help="generate the instance instead of reading it")
    src.add_argument("--param", action="append", help="family parameter key=value")

    p = Parser(prog="dnlkit", description=__doc__)
    p.add_argument("--version", action="version", version=f"dnlkit {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=Parser)

    s = sub.add_parser("vcdim", parents=[common, src], help="VC-dimension of a tri-structure")
    s.add_argument("--eps", type=float)
    s.add_argument("--tau", type=float)
    s.add_argument("--cap", type=int, default=12)

    s = sub.add_parser("net", parents=[common, src], help="sample and validate a delta-net")
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--p", type=float, default=0.1)
    s.add_argument("--dimension", type=int, required=True)
    s.add_argument("--eps", type=float)
    s.add_argument("--tau", type=float)

    s = sub.add_parser("cluster", parents=[common, src], help="clustering or regularity partition")
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--eta", type=float, required=True)
    s.add_argument("--c", type=float)
    s.add_argument("--regularity", action="store_true")

    s = sub.add_parser("color", parents=[common, src], help="colour a dense graph")
    s.add_argument("--algo", choices=["dnl", "regular-tf", "regular-kt"], default="dnl")
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--t", type=int, default=4)
    s.add_argument("--force", action="store_true", help="run even when the hypothesis fails")

    s = sub.add_parser("quotient", parents=[common, src], help="K_t-free homomorphic image")
    s.add_argument("--t", type=int, default=3)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--force", action="store_true")

    s = sub.add_parser("dominate", parents=[common, src], help="dominating sets")
    s.add_argument("--mode", choices=["tournament", "majority"], default="tournament")
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--cover", help="transitive family JSON {members: [[...], ...]}")

    s = sub.add_parser("generate", parents=[common], help="write an instance")
    s.add_argument("--family", required=True)
    s.add_argument("--param", action="append")

    s = sub.add_parser("verify", parents=[common, src], help="recheck a witness against an instance")
    s.add_argument("--witness", required=True)
    s.add_argument("--eps", type=float)
    s.add_argument("--eta", type=float)
    s.add_argument("--t", type=int, default=3)

    s = sub.add_parser("sweep", parents=[common], help="run the acceptance matrix")
    s.add_argument("--suite", choices=sorted(SUITES), default="acceptance")
    s.add_argument("--criteria", help="comma-separated criterion numbers")
    return p


COMMANDS = {"vcdim": cmd_vcdim, "net": cmd_net, "cluster": cmd_cluster, "color": cmd_color,
            "quotient": cmd_quotient, "dominate": cmd_dominate, "generate": cmd_generate,
            "verify": cmd_verify, "sweep": cmd_sweep}

_SKIP = {"command", "out", "report"}


def run(argv=None):
    """Execute one subcommand; returns the exit code."""
    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            raise UsageError("missing subcommand")
        Path(args.out).mkdir(parents=True, exist_ok=True)
        inputs = {}
        try:
            code, result = COMMANDS[args.command](args, inputs)
        except HypothesisError as exc:
            code, result = EXIT_HYPOTHESIS, {"hypothesis": False, "error": str(exc)}
    except UsageError as exc:
        print(f"dnlkit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    params = {k: v for k, v in sorted(vars(args).items()) if k not in _SKIP}
    body = dumps(result)
    manifest = {"tool": "dnlkit", "version": __version__, "subcommand": args.command,
                "seed": args.seed, "parameters": params, "inputs": inputs,
                "result_digest": sha256(body), "exit_code": code}
    path = Path(args.report) if args.report else Path(args.out) / f"{args.command}.json"
    path.write_text(dumps({"manifest": manifest, "result": result}))
    print(json.dumps({"report": str(path), "exit_code": code}))
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
