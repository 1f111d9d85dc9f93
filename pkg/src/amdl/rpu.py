"""Distribution-free active learning via reliable abstaining classifiers.

A noise-robust single-distribution learner builds many per-batch consistent
version spaces and combines them by a thresholded majority vote; a pruning
loop lifts it to k distributions; an epoch loop halves the abstention mass and
finishes with one passive solve over the abstain-imputed distributions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .core import ContractViolation, HypothesisClass, MDLInstance
from .hedge import SolverConfig, mdl_hedge_vc
from .oracles import OracleSet, SamplerFamily, imputed_family
from .active import ActiveRunResult, _result


class AbstainingClassifier:
    """Total map X -> {-1, +1, 0}; 0 means abstain."""

    __slots__ = ("outputs",)

    def __init__(self, outputs):
        arr = np.asarray(outputs, dtype=np.int8)
        if arr.ndim != 1 or not np.all(np.isin(arr, (-1, 0, 1))):
            raise ContractViolation("outputs must be a vector over {-1, 0, +1}")
        self.outputs = arr

    def __call__(self, x: int) -> int:
        return int(self.outputs[x])

    @property
    def abstain_mask(self) -> np.ndarray:
        return self.outputs == 0

    @staticmethod
    def always_abstain(m: int) -> "AbstainingClassifier":
        return AbstainingClassifier(np.zeros(m, dtype=np.int8))


@dataclass(frozen=True)
class RpuReport:
    """Exact per-distribution reliability-violation and abstention masses."""

    violation_mass: tuple[float, ...]
    abstention_mass: tuple[float, ...]
    labels_used: int


def rpu_report(inst: MDLInstance, f: AbstainingClassifier, hstar_labels: np.ndarray,
               labels_used: int = 0) -> RpuReport:
    viol, abst = [], []
    committed_wrong = [x for x in range(inst.m)
                       if f.outputs[x] != 0 and f.outputs[x] != hstar_labels[x]]
    abstain = [x for x in range(inst.m) if f.outputs[x] == 0]
    for d in inst.distributions:
        viol.append(float(d.mass_exact(committed_wrong)))
        abst.append(float(d.mass_exact(abstain)))
    return RpuReport(tuple(viol), tuple(abst), labels_used)


def batch_size(s_star: int, xi: float, c_n: float = 1.0) -> int:
    """Smallest n with (10 s ln(en/s) + 4 ln 80)/n <= xi/2, scaled by the knob.

    The sizing instantiates the consistent-version-space disagreement-mass
    bound at per-batch confidence 1/40; found by doubling then bisection.  The
    log factor is clamped at 1 since the bound is vacuous below n = s.
    """
    if not 0 < xi <= 1:
        raise ContractViolation("target reliability must lie in (0, 1]")

    def load(n: int) -> float:
        dis = 10.0 * s_star * max(1.0, math.log(math.e * n / s_star)) \
            if s_star > 0 else 0.0
        return (dis + 4.0 * math.log(80.0)) / n

    hi = 1
    while load(hi) > xi / 2.0:
        hi *= 2
    lo = max(1, hi // 2)
    while lo < hi:
        mid = (lo + hi) // 2
        if load(mid) <= xi / 2.0:
            hi = mid
        else:
            lo = mid + 1
    return max(1, math.ceil(c_n * hi))


def threshold_majority(votes_nonzero: np.ndarray, votes_sum: np.ndarray,
                       n_batches: int) -> np.ndarray:
    """Abstain where at most N/5 batch classifiers commit, else the sign of the
    vote sum; an exactly balanced sum abstains (conservative sign convention)."""
    commit = 5 * votes_nonzero > n_batches
    return np.where(commit, np.sign(votes_sum), 0).astype(np.int8)


def robust_rpu_learn(cls: HypothesisClass, draw: Callable[[int], tuple[np.ndarray, np.ndarray]],
                     xi: float, delta: float, s_star: int,
                     cfg: SolverConfig) -> AbstainingClassifier:
    """Noise-tolerant reliable learner for a single distribution.

    Builds N = 60 ceil(ln 1/delta) per-batch consistent version spaces (an
    inconsistent batch is treated as corrupted and votes nothing) and returns
    the thresholded majority of their abstain-or-predict classifiers.
    """
    if not 0 < xi <= 1:
        raise ContractViolation("target reliability must lie in (0, 1]")
    N = 60 * max(1, math.ceil(math.log(1.0 / delta)))
    n = batch_size(s_star, xi, cfg.c_n)
    m = cls.m
    votes_nonzero = np.zeros(m, dtype=np.int64)
    votes_sum = np.zeros(m, dtype=np.int64)
    for _ in range(N):
        xs, ys = draw(n)
        consistent = np.all(cls.labels[:, xs] == ys, axis=1)
        if not consistent.any():
            continue  # corrupted batch: votes nothing
        sub = cls.labels[consistent]
        lo, hi_ = sub.min(axis=0), sub.max(axis=0)
        f_i = np.where(lo == hi_, lo, 0)
        votes_nonzero += f_i != 0
        votes_sum += f_i
    return AbstainingClassifier(threshold_majority(votes_nonzero, votes_sum, N))


@dataclass
class PruneResult:
    classifier: AbstainingClassifier | None
    rounds: int
    failure_mode: str | None
    per_round_abstain: list


def passive_rpu_mdl(cls: HypothesisClass, family: SamplerFamily, oracles: OracleSet,
                    active_set: Sequence[int], xi: float, delta: float, s_star: int,
                    cfg: SolverConfig,
                    abstain_mass: Callable[[int, AbstainingClassifier], Fraction]) -> PruneResult:
    """Collaborative reliable learning by mixture training and pruning.

    Each round trains on the uniform mixture of the surviving distributions at
    reliability xi/2, then prunes every distribution whose exact abstention
    mass is already <= xi.  The returned classifier predicts with the first
    committing round in round order.  Per-round confidence is
    delta / (2 ceil(log2 k) + 2) so the union bound over the round cap holds.
    """
    k = len(active_set)
    if k == 0:
        raise ContractViolation("needs at least one distribution")
    log2k = math.ceil(math.log2(k)) if k > 1 else 0
    cap = 4 * log2k + 4
    delta_call = delta / (2 * log2k + 2)
    remaining = list(active_set)
    learned: list[AbstainingClassifier] = []
    per_round_abstain = []
    while remaining:
        if len(learned) >= cap:
            return PruneResult(None, len(learned), "pruning_stalled", per_round_abstain)

        def draw_mixture(n: int, members=tuple(remaining)) -> tuple[np.ndarray, np.ndarray]:
            picks = oracles.aux_choice_batch(n, len(members))
            xs = np.empty(n, dtype=np.int64)
            ys = np.empty(n, dtype=np.int8)
            for j, i in enumerate(members):
                sel = picks == j
                cnt = int(sel.sum())
                if cnt:
                    xs[sel], ys[sel] = family.draw(i, cnt)
            return xs, ys

        f_r = robust_rpu_learn(cls, draw_mixture, xi / 2.0, delta_call, s_star, cfg)
        learned.append(f_r)
        masses = {i: abstain_mass(i, f_r) for i in remaining}
        per_round_abstain.append({i: float(v) for i, v in masses.items()})
        pruned = [i for i in remaining if masses[i] <= Fraction(xi)]
        remaining = [i for i in remaining if i not in pruned]
    m = cls.m
    out = np.zeros(m, dtype=np.int8)
    for f_r in learned:
        fill = (out == 0) & (f_r.outputs != 0)
        out[fill] = f_r.outputs[fill]
    return PruneResult(AbstainingClassifier(out), len(learned), None, per_round_abstain)


def active_dist_free(inst: MDLInstance, oracles: OracleSet, eps: float, delta: float,
                     s_star: int, d: int, cfg: SolverConfig,
                     final_target_eps_n: bool = False) -> ActiveRunResult:
    """Distribution-free active learner.

    Epochs refine an abstaining classifier whose abstention mass halves every
    round under every distribution, querying labels only where the previous
    classifier abstains; the last epoch converts to a plain classifier with
    one passive solve over the imputed distributions.  The final passive call
    targets the overall eps (the accounting reading); pass
    `final_target_eps_n=True` for the literal schedule value 2^-n0.
    """
    if eps <= 0 or not (0 < delta < 1):
        raise ContractViolation("eps must be positive and delta in (0,1)")
    cls = inst.hypothesis_class
    k = inst.k
    nu = float(inst.nu_exact())
    warnings = []
    if eps < 100.0 * (k + d) * nu:
        warnings.append(f"regime: eps={eps} < 100*(k+d)*nu={100.0 * (k + d) * nu}")
    if s_star > 0:
        n0 = max(1, math.ceil(math.log2((d + k) / (s_star * eps)) - 1e-12))
    else:
        n0 = 1
    f = AbstainingClassifier.always_abstain(inst.m)
    trace = []
    classifiers: list[np.ndarray] = []

    def abstain_mass_of(i: int, g: AbstainingClassifier) -> Fraction:
        return inst.distributions[i].mass_exact(
            [x for x in range(inst.m) if g.outputs[x] == 0])
    for n in range(1, n0 + 1):
        eps_n = 2.0 ** -n
        delta_n = delta / (2.0 * n * n)
        labels_before = oracles.ledger.label_total
        fam = imputed_family(oracles, f.outputs)
        if n < n0:
            # the robust learner's guarantee needs its reliability target to
            # dominate the noise by a star-number factor; warn, don't enforce
            if s_star > 0 and nu > 0 and eps_n < 100.0 * s_star * nu:
                warnings.append(
                    f"rpu regime: epoch {n} target {eps_n} < 100*s*nu="
                    f"{100.0 * s_star * nu}")
            pr = passive_rpu_mdl(cls, fam, oracles, range(k), eps_n, delta_n,
                                 s_star, cfg, abstain_mass_of)
            labels_epoch = oracles.ledger.label_total - labels_before
            if pr.failure_mode is not None:
                trace.append((n, eps_n, float("nan"), pr.rounds, labels_epoch))
                return _result(oracles, output=None, output_index=None, trace=trace,
                               failure_mode=pr.failure_mode,
                               metadata={"failed_epoch": n, "warnings": warnings,
                                         "schedule_n0": n0})
            f = pr.classifier
            classifiers.append(f.outputs.copy())
            abst = max(float(abstain_mass_of(i, f)) for i in range(k))
            trace.append((n, eps_n, abst, pr.rounds, labels_epoch))
        else:
            target = eps_n if final_target_eps_n else eps
            final_cfg = cfg.with_target(eps=target, delta=delta_n, nu=nu)
            labels_final_before = oracles.ledger.label_queries.copy()
            res = mdl_hedge_vc(cls, cls.full_version_space(), fam, final_cfg, k, d)
            labels_epoch = oracles.ledger.label_total - labels_before
            abst = max(float(abstain_mass_of(i, f)) for i in range(k))
            trace.append((n, eps_n, abst, 0, labels_epoch))
            return _result(oracles, output=res.hypothesis, output_index=None,
                           trace=trace,
                           metadata={"warnings": warnings, "schedule_n0": n0,
                                     "final_target": target,
                                     "final_passive_draws": res.total_draws,
                                     "final_draws_per_dist":
                                         (res.reward_draws + res.store_draws).tolist(),
                                     "final_labels_per_dist":
                                         (oracles.ledger.label_queries
                                          - labels_final_before).tolist(),
                                     "final_abstain_per_dist":
                                         [float(abstain_mass_of(i, f)) for i in range(k)],
                                     "final_abstain_mass": abst,
                                     "classifiers": classifiers})
    raise AssertionError("unreachable: schedule always ends in a passive epoch")


def write_df_trace(result: ActiveRunResult, path: str) -> None:
    """Epoch CSV: epoch, eps_n, max abstention mass, pruning rounds, labels."""
    with open(path, "w") as fh:
        fh.write("epoch,eps_n,abstain_mass_max,rounds_used,labels_this_epoch\n")
        for row in result.trace:
            fh.write(",".join(str(v) for v in row) + "\n")
