"""Command-line entry point. Exit status: 0 success, 1 domain failure, 2 usage or input error."""

from __future__ import annotations

import argparse
import sys

from .. import adversary as adv
from .. import builders as bld
from ..connectivity import is_k_connected
from ..graph import SubgraphMask, check_alpha_subgraph, verify_cycle
from ..io import ParseError, read_certificate, read_graph, read_mask, write_certificate, write_graph, write_mask, \
    write_trace
from ..rgg import as_rng, hitting_time, rgg_process, sample_rgg
from .config import ConfigError, load_config, resolve_r
from .experiment import format_summary, run_attack, run_experiment

OK, FAIL, USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE)


def _radius(args) -> float:
    if args.r is not None:
        return args.r
    if args.r_rule is None:
        raise ValueError("give -r or --r-rule")
    return resolve_r(args.r_rule, args.n, args.d)


def _mask(args, g):
    return read_mask(args.mask, base=g) if getattr(args, "mask", None) else SubgraphMask(g)


def cmd_generate(args):
    g = sample_rgg(args.n, args.d, _radius(args), args.metric, seed=args.seed)
    write_graph(g, args.output)
    print(f"wrote {args.output}: n={g.n} d={g.d} r={g.r!r} edges={g.graph.m}")
    return OK


def cmd_process(args):
    tr = rgg_process(args.n, args.d, seed=args.seed, cutoff_r=args.cutoff, metric=args.metric)
    if args.output:
        write_trace(tr, args.output)
    for prop in ("connected", "min-degree"):
        rec = hitting_time(tr, prop)
        print(f"{rec.property} index={rec.index} radius={rec.radius}")
    return OK


def cmd_attack(args):
    g = read_graph(args.graph)
    params = {"eps": args.eps, "budget": args.budget, "order": args.order, "C": args.C, "A": args.A}
    params = {k: v for k, v in params.items() if v is not None}
    rep = run_attack(args.strategy, g, params, as_rng(args.seed))
    sys.stdout.write(rep.to_text())
    if args.output:
        write_mask(rep.mask, args.graph, args.output)
    return OK if rep.found else FAIL


def cmd_build(args):
    g = read_graph(args.graph)
    mask = _mask(args, g)
    through, length = None, g.n
    if args.builder == "cell-hamilton":
        res = bld.cell_hamilton(mask, args.eps, args.delta)
    elif args.builder == "interval-hamilton":
        res = bld.interval_hamilton_1d(mask, args.eps, args.delta)
    elif args.builder == "closure":
        res = bld.closure_hamilton(mask.kept)
    elif args.builder == "square":
        res = bld.square_cycle_hamilton(mask.kept)
    else:
        if args.L is None:
            raise ValueError("long-cycle needs --L")
        v = args.v if args.v is not None else int(as_rng(args.seed).integers(g.n))
        through, length = v, args.L
        tune = bld.ColourTuning(args.blue, args.green)
        res = bld.long_cycle(mask, v, args.L, args.eta, args.eps, args.delta, seed=args.seed, tuning=tune,
                             margin=args.margin)
    if not res:
        print(f"failure: {res}")
        return FAIL
    if not verify_cycle(mask.kept, res, through=through, length=length):
        print("failure: certificate did not verify")
        return FAIL
    if args.output:
        write_certificate(res, args.output)
    print(f"cycle of length {len(res.vertices)} verified")
    return OK


def cmd_verify(args):
    g = read_graph(args.graph)
    mask = _mask(args, g)
    ok = True
    if args.k_connected is not None:
        res = is_k_connected(mask.kept, args.k_connected)
        print(f"{args.k_connected}-connected: {'yes' if res else 'no'}" + (f" (cut {res.cut})" if res.cut else ""))
        ok &= bool(res)
    if args.alpha is not None:
        chk = check_alpha_subgraph(mask, args.alpha)
        print(f"alpha>={args.alpha}: {'yes' if chk.ok else 'no'} (min ratio {chk.min_ratio:.6f})")
        ok &= chk.ok
    if args.cycle:
        cert = read_certificate(args.cycle)
        good = verify_cycle(mask.kept, cert, through=args.through, length=args.length)
        print(f"cycle: {'valid' if good else 'invalid'}")
        ok &= good
    return OK if ok else FAIL


def cmd_certify(args):
    g = read_graph(args.graph)
    res = bld.certify_connectivity(_mask(args, g), args.delta, args.c)
    if not res:
        print(f"no certificate: {res}")
        return FAIL
    print(f"certified {args.c}-connected: auxiliary radius {res.aux_radius!r}, min common {res.min_common}")
    return OK


def cmd_conjecture(args):
    rep = bld.conjecture_check(args.n, args.k, args.mode, seed=args.seed, trials=args.trials)
    print(rep.summary())
    return OK if rep.holds else FAIL


def cmd_experiment(args):
    cfg = load_config(args.config)
    if args.output:
        cfg.output = args.output
    rec = run_experiment(cfg)
    print(f"run {rec.config_hash} -> {rec.directory}")
    sys.stdout.write(format_summary(rec.summary))
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rggres", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def model(sp):
        sp.add_argument("-n", type=int, required=True)
        sp.add_argument("-d", type=int, default=2)
        sp.add_argument("--metric", choices=("cube", "torus"), default="cube")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("generate", help="sample a random geometric graph")
    model(sp)
    sp.add_argument("-r", type=float)
    sp.add_argument("--r-rule", help="const:x, scaled:C or zeta:A")
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("process", help="edge process and hitting times")
    model(sp)
    sp.add_argument("--cutoff", type=float)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_process)

    sp = sub.add_parser("attack", help="run an edge-deletion strategy")
    sp.add_argument("strategy", choices=("strip", "stiebitz", "tripartite", "triangle-killer", "empty-interval",
                                         "annulus", "budget"))
    sp.add_argument("graph")
    sp.add_argument("-o", "--output")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--budget", type=float)
    sp.add_argument("--order", choices=("farthest", "random"))
    sp.add_argument("--C", type=float)
    sp.add_argument("--A", type=float)
    sp.set_defaults(func=cmd_attack)

    sp = sub.add_parser("build", help="construct and verify a cycle certificate")
    sp.add_argument("builder", choices=("cell-hamilton", "interval-hamilton", "closure", "square", "long-cycle"))
    sp.add_argument("graph")
    sp.add_argument("mask", nargs="?")
    sp.add_argument("-o", "--output")
    sp.add_argument("--eps", type=float, default=0.1)
    sp.add_argument("--delta", type=float, default=0.25)
    sp.add_argument("--eta", type=float, default=0.5)
    sp.add_argument("--L", type=int)
    sp.add_argument("--v", type=int)
    sp.add_argument("--margin", type=float)
    sp.add_argument("--blue", type=float)
    sp.add_argument("--green", type=float)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("verify", help="check connectivity, alpha or a cycle certificate")
    sp.add_argument("graph")
    sp.add_argument("mask", nargs="?")
    sp.add_argument("--k-connected", type=int)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--cycle")
    sp.add_argument("--through", type=int)
    sp.add_argument("--length", type=int)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("certify", help="connectivity certificate via a shorter-radius graph")
    sp.add_argument("graph")
    sp.add_argument("mask", nargs="?")
    sp.add_argument("--delta", type=float, default=0.3)
    sp.add_argument("--c", type=int, default=1)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("conjecture", help="search powers of cycles for a non-Hamiltonian subgraph")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--mode", choices=("exhaustive", "edge-minimal", "random"), default="exhaustive")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=1000)
    sp.set_defaults(func=cmd_conjecture)

    sp = sub.add_parser("experiment", help="run a Monte Carlo experiment from a config file")
    sp.add_argument("config")
    sp.add_argument("-o", "--output", help="override the output directory")
    sp.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    raise SystemExit(main())
