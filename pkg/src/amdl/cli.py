"""Command-line front end: gen, measure, run, sweep, report."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .complexity import (disagreement_coefficient, star_number,
                         star_number_unqualified, vc_dimension)
from .core import best_nu, load_instance, save_instance
from .families import FamilySpec
from .harness import (PROFILES, RunConfig, records_to_csv, report, run_trials,
                      sweep, sweep_from_csv, sweep_to_csv)


def _parse_knobs(pairs: list[str]) -> dict:
    out = {}
    for p in pairs or []:
        key, _, val = p.partition("=")
        if not _:
            raise SystemExit(f"--knob expects key=value, got {p!r}")
        out[key] = float(val)
    return out


def _cmd_gen(args) -> int:
    params: dict = {}
    for name in ("k", "theta", "i", "j", "m", "n_hyp", "seed", "flipped_index"):
        val = getattr(args, name.replace("-", "_"), None)
        if val is not None:
            params[name] = val
    for name in ("eps", "nu", "nu_prime"):
        val = getattr(args, name, None)
        if val is not None:
            params[name] = val
    if args.case is not None:
        params["case"] = args.case
    if args.realizable:
        params["realizable"] = True
    inst = FamilySpec(args.family, params).generate()
    save_instance(inst, args.out)
    print(f"wrote {args.out} (family={args.family}, m={inst.m}, k={inst.k}, "
          f"|H|={len(inst.hypothesis_class)})")
    return 0


def _cmd_measure(args) -> int:
    inst = load_instance(args.instance)
    cls = inst.hypothesis_class
    h_best, nu = best_nu(inst)
    ref_idx = args.hstar if args.hstar is not None else cls.index_of(h_best)
    ref = cls[ref_idx]
    vc = vc_dimension(cls, cap=args.cap)
    st = star_number(cls, ref)
    st_any = star_number_unqualified(cls)
    lines = [
        f"m={inst.m}", f"k={inst.k}", f"class_size={len(cls)}",
        f"nu={nu!r}",
        f"vc_dimension={vc.value}", f"vc_lower_bound_only={int(vc.lower_bound_only)}",
        f"star_reference_index={ref_idx}",
        f"star_number={st.value}", f"star_lower_bound_only={int(st.lower_bound_only)}",
        # the unqualified value is reported as the max over in-class references
        f"star_number_unqualified={st_any.value}",
        f"star_unqualified_lower_bound_only={int(st_any.lower_bound_only)}",
    ]
    for i, d in enumerate(inst.distributions):
        theta = disagreement_coefficient(d, cls, ref, args.r0)
        lines.append(f"theta_{i}={theta!r}")
    theta_max = max(disagreement_coefficient(d, cls, ref, args.r0)
                    for d in inst.distributions)
    lines.append(f"theta_max={theta_max!r}")
    out = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0


def _cmd_run(args) -> int:
    transcript = f"{args.out}.transcript" if (args.trace and args.out) else None
    cfg = RunConfig(alg=args.alg, eps=args.eps, delta=args.delta,
                    trials=args.trials, base_seed=args.seed,
                    profile=args.profile, knobs=_parse_knobs(args.knob),
                    instance_path=args.instance, trace=args.trace,
                    transcript_path=transcript,
                    timing=args.timing, workers=args.workers)
    records = run_trials(cfg)
    text = records_to_csv(records, timing=args.timing)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_sweep(args) -> int:
    with open(args.config) as fh:
        config = json.load(fh)
    rows = sweep(config)
    text = sweep_to_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_report(args) -> int:
    with open(args.sweep) as fh:
        rows = sweep_from_csv(fh.read())
    outputs = report(rows)
    os.makedirs(args.outdir, exist_ok=True)
    for name, text in outputs.items():
        with open(os.path.join(args.outdir, name), "w") as fh:
            fh.write(text)
    print(f"wrote {', '.join(sorted(outputs))} to {args.outdir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="amdl",
                                 description="active multi-distribution learning lab")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a benchmark instance file")
    g.add_argument("--family", required=True,
                   choices=("prop1", "star-lb", "agnostic-lb", "example1", "random"))
    g.add_argument("--k", type=int)
    g.add_argument("--eps", type=float)
    g.add_argument("--nu", type=float)
    g.add_argument("--theta", type=int)
    g.add_argument("--i", type=int)
    g.add_argument("--j", type=int)
    g.add_argument("--flipped-index", type=int, dest="flipped_index")
    g.add_argument("--nu-prime", type=float, dest="nu_prime")
    g.add_argument("--case", choices=("a", "b"))
    g.add_argument("--m", type=int)
    g.add_argument("--n-hyp", type=int, dest="n_hyp")
    g.add_argument("--seed", type=int)
    g.add_argument("--realizable", action="store_true")
    g.add_argument("--out", required=True)
    g.set_defaults(fn=_cmd_gen)

    m = sub.add_parser("measure", help="exact complexity measures of an instance")
    m.add_argument("--instance", required=True)
    m.add_argument("--hstar", type=int, default=None,
                   help="reference hypothesis index (default: the minimax optimum)")
    m.add_argument("--r0", type=float, default=0.05)
    m.add_argument("--cap", type=int, default=12)
    m.add_argument("--out")
    m.set_defaults(fn=_cmd_measure)

    r = sub.add_parser("run", help="metered trials of one algorithm on one instance")
    r.add_argument("--instance", required=True)
    r.add_argument("--alg", required=True,
                   choices=("active-dd-large", "active-dd-small", "active-dd-auto",
                            "active-df", "passive-hedge", "passive-naive"))
    r.add_argument("--eps", type=float, required=True)
    r.add_argument("--delta", type=float, default=0.1)
    r.add_argument("--trials", type=int, default=1)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--profile", default="desk", choices=sorted(PROFILES))
    r.add_argument("--knob", action="append", metavar="KEY=VALUE")
    r.add_argument("--trace", action="store_true")
    r.add_argument("--timing", action="store_true",
                   help="emit measured wall_ms (breaks byte determinism)")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--out")
    r.set_defaults(fn=_cmd_run)

    s = sub.add_parser("sweep", help="grid of runs from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("report", help="pivot a sweep CSV into plot-data series")
    p.add_argument("--sweep", required=True)
    p.add_argument("--outdir", required=True)
    p.set_defaults(fn=_cmd_report)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
