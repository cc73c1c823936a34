"""``gnch`` command line.

Exit status: 0 when every verdict passes, 1 when any fails, 2 on a
configuration or runtime error.
"""
import argparse
import sys

from ..errors import GnchError
from .config import parse_config
from .experiments import EXPERIMENTS, run_experiment


def _cmd_run(args):
    cfg = parse_config(args.config)
    out = args.out or cfg["output.dir"]
    res = run_experiment(cfg, out_dir=out, force=args.force, svg=True if args.svg else None)
    for v in res.verdicts:
        print(v.line())
    status = "PASS" if res.passed else "FAIL"
    print(f"{cfg.name}: {status} ({len(res.verdicts)} verdicts, {res.elapsed:.1f} s) -> {out}/{cfg.name}")
    return 0 if res.passed else 1


def _cmd_list(args):
    width = max(len(n) for n in EXPERIMENTS)
    for name in sorted(EXPERIMENTS):
        print(f"{name:<{width}}  {EXPERIMENTS[name].description}")
    return 0


def _cmd_validate(args):
    cfg = parse_config(args.config)
    if args.echo:
        sys.stdout.write(cfg.echo())
    print(f"{args.config}: ok (experiment {cfg.name})")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="gnch", description="Internal-wave model experiments")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run the experiment described by a config file")
    r.add_argument("config")
    r.add_argument("--force", action="store_true", help="run even outside the asymptotic regime")
    r.add_argument("--out", help="output directory (overrides output.dir)")
    r.add_argument("--svg", action="store_true", help="also write SVG plots")
    r.set_defaults(func=_cmd_run)
    ls = sub.add_parser("list-experiments", help="list registered experiments")
    ls.set_defaults(func=_cmd_list)
    v = sub.add_parser("validate", help="parse and check a config file")
    v.add_argument("config")
    v.add_argument("--echo", action="store_true", help="print the fully resolved config")
    v.set_defaults(func=_cmd_validate)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GnchError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
