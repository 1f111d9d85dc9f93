"""Distribution-dependent active learners: the epoch-halving disagreement
algorithm (large target error) and the two-stage agreement-querying algorithm
(small target error), plus the regime dispatcher.

Version-space updates compare exact disagreement masses against the epoch
radius, so the deterministic invariants (nested version spaces, retained
hypotheses within radius) hold bit-for-bit and are asserted every epoch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import (ContractViolation, Hypothesis, MDLInstance,
                   RandomizedHypothesis, disagreement_region)
from .hedge import HedgeResult, SolverConfig, mdl_hedge_vc
from .oracles import (DegenerateAgreementRegion, OracleSet, induced_family,
                      surrogate_family)

REGIME_FACTOR = 100.0


@dataclass(frozen=True)
class EpochSchedule:
    """Halving schedule: n0 epochs, eps_n = 2^-n, delta_n = delta / (2 n^2)."""

    n0: int
    eps_n: tuple[float, ...]
    delta_n: tuple[float, ...]

    @staticmethod
    def for_target(eps: float, delta: float) -> "EpochSchedule":
        if eps >= 1.0:
            return EpochSchedule(0, (), ())
        n0 = max(0, math.ceil(math.log2(1.0 / eps) - 1e-12))
        eps_n = tuple(2.0 ** -n for n in range(1, n0 + 1))
        delta_n = tuple(delta / (2.0 * n * n) for n in range(1, n0 + 1))
        return EpochSchedule(n0, eps_n, delta_n)


@dataclass
class ActiveRunResult:
    """Output hypothesis plus the measured ledger and per-epoch trace."""

    output: Hypothesis | RandomizedHypothesis | None
    output_index: int | None
    labels_per_dist: np.ndarray
    unlabeled_per_dist: np.ndarray
    trace: list = field(default_factory=list)
    failure_mode: str | None = None
    achieved_error: float | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def labels_total(self) -> int:
        return int(self.labels_per_dist.sum())

    @property
    def unlabeled_total(self) -> int:
        return int(self.unlabeled_per_dist.sum())

    @property
    def ok(self) -> bool:
        return self.failure_mode is None and self.output is not None


def _result(oracles: OracleSet, **kw) -> ActiveRunResult:
    return ActiveRunResult(labels_per_dist=oracles.ledger.label_queries.copy(),
                           unlabeled_per_dist=oracles.ledger.unlabeled_draws.copy(),
                           **kw)


def _rho_exact_to_mixture(inst: MDLInstance, h_idx: int,
                          mix: RandomizedHypothesis) -> Fraction:
    """max_i of the support-count-weighted mean disagreement, all exact."""
    out = Fraction(0)
    for i in range(inst.k):
        acc = Fraction(0)
        for idx, cnt in mix.counts:
            acc += cnt * inst.pair_disagreement_exact(h_idx, idx, i)
        out = max(out, Fraction(acc, mix.total))
    return out


def _max_dis_mass(inst: MDLInstance, version_space: Sequence[int]) -> Fraction:
    pts = [int(x) for x in disagreement_region(inst.hypothesis_class, version_space)]
    return max(d.mass_exact(pts) for d in inst.distributions)


def active_large_eps(inst: MDLInstance, oracles: OracleSet, eps: float, delta: float,
                     cfg: SolverConfig, d: int | None = None) -> ActiveRunResult:
    """Epoch-halving disagreement-based active learner.

    Each epoch solves a passive problem over the version-space-imputed
    distributions at target eps_n, then keeps only hypotheses within exact
    max-disagreement 2 eps_n of the returned mixture.  Intended regime: the
    target error dominates the optimal error; outside it the run proceeds but
    is flagged, and an emptied version space is reported as a failure, not a
    crash.
    """
    if not (0 < delta < 1) or eps <= 0:
        raise ContractViolation("eps must be positive and delta in (0,1)")
    cls = inst.hypothesis_class
    k = inst.k
    if d is None:
        from .complexity import vc_dimension
        d = vc_dimension(cls).value
    nu = float(inst.nu_exact())
    warnings = []
    if eps < REGIME_FACTOR * nu:
        warnings.append(f"regime: eps={eps} < {REGIME_FACTOR}*nu={REGIME_FACTOR * nu}")
    sched = EpochSchedule.for_target(eps, delta)
    V = list(cls.full_version_space())
    trace = []
    version_spaces = []
    prev_dis: set[int] | None = None
    for n in range(1, sched.n0 + 1):
        eps_n, delta_n = sched.eps_n[n - 1], sched.delta_n[n - 1]
        labels_before = oracles.ledger.label_total
        fam = induced_family(oracles, V)
        inner = cfg.with_target(eps=eps_n, delta=delta_n, nu=eps_n / REGIME_FACTOR)
        res: HedgeResult = mdl_hedge_vc(cls, V, fam, inner, k, d)
        h_n = res.hypothesis
        bound = Fraction(2) * Fraction(eps_n)
        V_new = [h for h in V if _rho_exact_to_mixture(inst, h, h_n) <= bound]
        assert set(V_new) <= set(V)
        labels_epoch = oracles.ledger.label_total - labels_before
        if not V_new:
            tr_row = (n, eps_n, 0, float("nan"), res.total_draws, labels_epoch)
            trace.append(tr_row)
            out = _result(oracles, output=None, output_index=None, trace=trace,
                          failure_mode="version_space_collapse",
                          metadata={"collapse_epoch": n, "warnings": warnings,
                                    "schedule_n0": sched.n0})
            return out
        dis_now = set(int(x) for x in disagreement_region(cls, V_new))
        if prev_dis is not None:
            assert dis_now <= prev_dis
        prev_dis = dis_now
        for h in V_new:
            assert _rho_exact_to_mixture(inst, h, h_n) <= bound
        V = V_new
        version_spaces.append(tuple(V))
        trace.append((n, eps_n, len(V), float(_max_dis_mass(inst, V)),
                      res.total_draws, labels_epoch))
    out_idx = V[0]
    return _result(oracles, output=cls[out_idx], output_index=out_idx, trace=trace,
                   metadata={"warnings": warnings, "schedule_n0": sched.n0,
                             "version_spaces": version_spaces,
                             "final_version_space": tuple(V)})


def active_small_eps(inst: MDLInstance, oracles: OracleSet, eps: float, delta: float,
                     nu: float, cfg: SolverConfig, d: int | None = None) -> ActiveRunResult:
    """Two-stage learner for the noise-dominated regime.

    Stage one localizes a version space around a coarse hypothesis (target
    excess capped at 1).  Stage two estimates the agreement-region error of
    every survivor from conditional labeled samples, then solves the passive
    problem over the surrogate distributions, querying fresh labels only in
    the disagreement region.
    """
    if nu <= 0:
        raise ContractViolation("the small-eps stage requires a positive supplied nu")
    cls = inst.hypothesis_class
    k = inst.k
    if d is None:
        from .complexity import vc_dimension
        d = vc_dimension(cls).value
    warnings = []
    if eps >= REGIME_FACTOR * nu:
        warnings.append(f"regime: eps={eps} >= {REGIME_FACTOR}*nu={REGIME_FACTOR * nu}")
    delta_p = delta / 6.0
    eps_p = min(REGIME_FACTOR * nu, 1.0)
    if eps_p < 1.0:
        stage1 = active_large_eps(inst, oracles, eps_p, delta_p, cfg, d=d)
        if not stage1.ok:
            stage1.metadata["failed_stage"] = 1
            stage1.metadata.setdefault("warnings", []).extend(warnings)
            return stage1
        h_prime_idx = stage1.output_index
        trace = list(stage1.trace)
    else:
        # excess-error target above 1 is vacuous; stage one degenerates
        h_prime_idx = 0
        trace = []
        warnings.append("stage1 skipped: 100*nu >= 1, V0 = full class")
    bound = Fraction(2) * Fraction(eps_p)
    V0 = [h for h in range(len(cls))
          if max(inst.pair_disagreement_exact(h, h_prime_idx, i)
                 for i in range(k)) <= bound]
    n0 = math.ceil(REGIME_FACTOR * (eps + nu) / eps ** 2 * math.log(k / delta_p))
    samples: list = []
    degenerate = []
    labels_before = oracles.ledger.label_total
    for i in range(k):
        try:
            samples.append(oracles.sample_conditional_agreement(i, V0, n0))
        except DegenerateAgreementRegion:
            # zero agreement mass: the surrogate equals the raw distribution
            samples.append(None)
            degenerate.append(i)
    agreement_labels_cost = oracles.ledger.label_total - labels_before
    fam = surrogate_family(oracles, V0, samples)
    final_cfg = cfg.with_target(eps=eps / 2.0, delta=delta / 6.0, nu=nu)
    res = mdl_hedge_vc(cls, V0, fam, final_cfg, k, d)
    stage2_labels = oracles.ledger.label_total - labels_before
    trace.append(("stage2", eps / 2.0, len(V0), float(_max_dis_mass(inst, V0)),
                  res.total_draws, stage2_labels))
    return _result(
        oracles, output=res.hypothesis, output_index=None, trace=trace,
        metadata={"warnings": warnings, "v0_size": len(V0), "n0_agreement": n0,
                  "agreement_label_cost": agreement_labels_cost,
                  "expected_agreement_cost": k * n0 - len(degenerate) * n0,
                  "degenerate_agreement": degenerate,
                  "stage1_target": eps_p})


def regime_dispatch(inst: MDLInstance, oracles: OracleSet, eps: float, delta: float,
                    cfg: SolverConfig, d: int | None = None) -> ActiveRunResult:
    """Route on eps >= 100 nu with nu computed exactly; records the branch."""
    nu = float(inst.nu_exact())
    if eps >= REGIME_FACTOR * nu:
        out = active_large_eps(inst, oracles, eps, delta, cfg, d=d)
        out.metadata["dispatch"] = "large"
    else:
        out = active_small_eps(inst, oracles, eps, delta, nu, cfg, d=d)
        out.metadata["dispatch"] = "small"
    return out


def write_epoch_trace(result: ActiveRunResult, path: str) -> None:
    """Per-epoch CSV: epoch, eps_n, |V_n|, max DIS mass, passive samples, labels."""
    with open(path, "w") as fh:
        fh.write("epoch,eps_n,version_space,max_dis_mass,passive_samples,labels_this_epoch\n")
        for row in result.trace:
            fh.write(",".join(str(v) for v in row) + "\n")
