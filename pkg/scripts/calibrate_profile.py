#!/usr/bin/env python3
"""Measure success margins and runtime of every acceptance suite under a
candidate knob profile; used to pin the `desk` preset."""

import argparse
import time

import numpy as np

import amdl
from amdl.active import active_large_eps, active_small_eps
from amdl.harness import PROFILES
from amdl.hedge import SolverConfig, mdl_hedge_vc
from amdl.oracles import OracleSet, plain_family
from amdl.rpu import active_dist_free


def bench(name, inst, runner, trials, eps):
    nu = float(inst.nu_exact())
    t0 = time.perf_counter()
    ok, errs, labels = 0, [], []
    fails = 0
    for seed in range(trials):
        o = OracleSet(inst, seed)
        out, lab = runner(inst, o, seed)
        if out is None:
            fails += 1
            continue
        wl = amdl.worst_loss(out, inst)
        errs.append(wl)
        labels.append(lab)
        ok += wl <= nu + eps + 1e-12
    dt = (time.perf_counter() - t0) / trials
    margin = (nu + eps) - np.max(errs) if errs else float("nan")
    print(f"{name:24s} ok {ok}/{trials} fails {fails} "
          f"worst_err {np.max(errs) if errs else float('nan'):.4f} "
          f"bound {nu + eps:.4f} margin {margin:+.4f} "
          f"labels {np.mean(labels) if labels else 0:.0f} t/trial {dt:.2f}s")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--profile", default="desk")
    for knob in ("c_t", "c_t1", "c_eta", "c_eps1", "c_n"):
        ap.add_argument(f"--{knob}", type=float, default=None)
    args = ap.parse_args()
    kn = dict(PROFILES[args.profile])
    for knob in ("c_t", "c_t1", "c_eta", "c_eps1", "c_n"):
        v = getattr(args, knob)
        if v is not None:
            kn[knob] = v
    print("knobs:", kn)
    trials = args.trials

    inst = amdl.gen_prop1(4, 0.1)
    d = amdl.vc_dimension(inst.hypothesis_class).value
    cfg = SolverConfig(eps=0.1, delta=0.1, nu=float(inst.nu_exact()), **kn)
    bench("prop1 k=4 alg1", inst,
          lambda i, o, s: (lambda r: (r.output, r.labels_total))(
              active_large_eps(i, o, 0.1, 0.1, cfg, d=d)), trials, 0.1)

    for case in ("a", "b"):
        inst = amdl.gen_example1(0.2, 0.05, case)
        nu = float(inst.nu_exact())
        cfg = SolverConfig(eps=0.05, delta=0.1, nu=nu, **kn)
        bench(f"example1-{case} alg3", inst,
              lambda i, o, s: (lambda r: (r.output, r.labels_total))(
                  active_small_eps(i, o, 0.05, 0.1, nu, cfg, d=1)), trials, 0.05)

    inst = amdl.gen_star_lb(2, 4, 1, 1)
    s_star = amdl.star_number_unqualified(inst.hypothesis_class).value
    cfg = SolverConfig(eps=0.1, delta=0.1, nu=0.0, **kn)
    bench("star-lb alg6", inst,
          lambda i, o, s: (lambda r: (r.output, r.labels_total))(
              active_dist_free(i, o, 0.1, 0.1, s_star, 1, cfg)), trials, 0.1)

    inst = amdl.gen_agnostic_lb(4, 0.4, 0.05)
    nu = float(inst.nu_exact())
    cfg = SolverConfig(eps=0.05, delta=0.1, nu=nu, **kn)
    bench("agnostic alg5", inst,
          lambda i, o, s: (lambda r: (r.hypothesis, o.ledger.label_total))(
              mdl_hedge_vc(i.hypothesis_class, (0, 1), plain_family(o), cfg, i.k, 1)),
          trials, 0.05)
    bench("agnostic alg3", inst,
          lambda i, o, s: (lambda r: (r.output, r.labels_total))(
              active_small_eps(i, o, 0.05, 0.1, nu, cfg, d=1)), trials, 0.05)


if __name__ == "__main__":
    main()
