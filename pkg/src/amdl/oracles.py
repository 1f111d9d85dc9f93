"""Metered sampling access: free unlabeled draws, counted label queries.

Interaction model: per distribution i there is an example oracle (unlabeled
draws, free but counted) and a labeling oracle (the metered resource).  On top
of the raw oracles sit the label-efficient samplers: version-space-imputed,
abstain-imputed, surrogate, and conditional-agreement sampling.

RNG layout (documented split order): SeedSequence(seed).spawn(k + 1); child i
< k is distribution i's stream, child k is the auxiliary stream used only for
mixture-component selection.  All draws pull scalars/blocks from a buffered
uniform source per stream, so identical seed + identical call sequence gives
an identical transcript.  The surrogate sampler's uniform pick from S_i uses
stream i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .core import (ContractViolation, HypothesisClass, LabeledDistribution,
                   MDLInstance, agreement_labels, disagreement_region)


class DegenerateAgreementRegion(RuntimeError):
    """Conditional-agreement sampling was asked for a zero-mass agreement region."""


class _Uniforms:
    """Buffered uniform(0,1) source over one Generator; deterministic blocks."""

    __slots__ = ("rng", "buf", "pos", "block")

    def __init__(self, rng: np.random.Generator, block: int = 4096):
        self.rng = rng
        self.buf = rng.random(block)
        self.pos = 0
        self.block = block

    def take(self, n: int) -> np.ndarray:
        out = np.empty(n)
        got = 0
        while got < n:
            avail = self.buf.size - self.pos
            if avail == 0:
                self.buf = self.rng.random(max(self.block, n - got))
                self.pos = 0
                avail = self.buf.size
            use = min(avail, n - got)
            out[got:got + use] = self.buf[self.pos:self.pos + use]
            self.pos += use
            got += use
        return out


@dataclass
class QueryLedger:
    """Per-run counters of label queries and unlabeled draws, per distribution."""

    k: int
    log_transcript: bool = False
    label_queries: np.ndarray = field(init=False)
    unlabeled_draws: np.ndarray = field(init=False)
    transcript: list = field(init=False)

    def __post_init__(self):
        self.label_queries = np.zeros(self.k, dtype=np.int64)
        self.unlabeled_draws = np.zeros(self.k, dtype=np.int64)
        self.transcript = []

    @property
    def label_total(self) -> int:
        return int(self.label_queries.sum())

    @property
    def unlabeled_total(self) -> int:
        return int(self.unlabeled_draws.sum())

    def snapshot(self) -> dict:
        return {
            "label_queries": self.label_queries.copy(),
            "unlabeled_draws": self.unlabeled_draws.copy(),
        }

    def write_transcript(self, path: str, trial: int = 0) -> None:
        # line-delimited records: trial, i, x, y, cumulative_label_count
        with open(path, "a") as fh:
            for (i, x, y, cum) in self.transcript:
                fh.write(f"{trial},{i},{x},{y},{cum}\n")


class OracleSet:
    """Sampling access to one instance for one run, with a shared ledger."""

    def __init__(self, instance: MDLInstance, seed: int, log_transcript: bool = False):
        self.instance = instance
        self.seed = seed
        k = instance.k
        children = np.random.SeedSequence(seed).spawn(k + 1)
        self._streams = [_Uniforms(np.random.default_rng(c)) for c in children[:k]]
        self._aux = _Uniforms(np.random.default_rng(children[k]))
        self.ledger = QueryLedger(k, log_transcript)
        self._view_cache: dict = {}

    # -- raw oracles --------------------------------------------------------

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.instance.k:
            raise ContractViolation(f"distribution index {i} out of range")

    def draw_unlabeled_batch(self, i: int, n: int) -> np.ndarray:
        self._check_index(i)
        d = self.instance.distributions[i]
        u = self._streams[i].take(n)
        xs = np.searchsorted(d.cdf, u, side="right").astype(np.int64)
        self.ledger.unlabeled_draws[i] += n
        return xs

    def draw_unlabeled(self, i: int) -> int:
        return int(self.draw_unlabeled_batch(i, 1)[0])

    def _labels_for(self, i: int, xs: np.ndarray) -> np.ndarray:
        """The labeling oracle: y = +1 with probability eta_plus[x]."""
        d = self.instance.distributions[i]
        u = self._streams[i].take(xs.size)
        ys = np.where(u < d.eta_f[xs], 1, -1).astype(np.int8)
        self.ledger.label_queries[i] += xs.size
        if self.ledger.log_transcript:
            cum = int(self.ledger.label_queries.sum())
            base = cum - xs.size
            for j, (x, y) in enumerate(zip(xs, ys)):
                self.ledger.transcript.append((i, int(x), int(y), base + j + 1))
        return ys

    def query_label(self, i: int, x: int) -> int:
        self._check_index(i)
        return int(self._labels_for(i, np.array([x]))[0])

    def draw_labeled_batch(self, i: int, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Plain labeled sampling: every pair costs one label query."""
        xs = self.draw_unlabeled_batch(i, n)
        ys = self._labels_for(i, xs)
        return xs, ys

    # -- version-space / classifier views ------------------------------------

    def _vs_view(self, version_space: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
        key = tuple(version_space)
        got = self._view_cache.get(key)
        if got is None:
            cls = self.instance.hypothesis_class
            agr = agreement_labels(cls, key)
            dis_mask = agr == 0
            got = (dis_mask, agr)
            self._view_cache[key] = got
        return got

    # -- label-efficient samplers --------------------------------------------

    def sample_induced_batch(self, i: int, version_space: Sequence[int],
                             n: int) -> tuple[np.ndarray, np.ndarray]:
        """Version-space-imputed sampling: query only inside DIS(V), impute the
        unanimous label outside."""
        dis_mask, agr = self._vs_view(version_space)
        xs = self.draw_unlabeled_batch(i, n)
        ys = agr[xs].astype(np.int8)
        need = dis_mask[xs]
        if need.any():
            ys[need] = self._labels_for(i, xs[need])
        return xs, ys

    def sample_induced(self, i: int, version_space: Sequence[int]) -> tuple[int, int]:
        xs, ys = self.sample_induced_batch(i, version_space, 1)
        return int(xs[0]), int(ys[0])

    def sample_imputed_batch(self, i: int, outputs: np.ndarray,
                             n: int) -> tuple[np.ndarray, np.ndarray]:
        """Abstaining-classifier-imputed sampling: query only where the
        classifier abstains."""
        xs = self.draw_unlabeled_batch(i, n)
        ys = np.asarray(outputs, dtype=np.int8)[xs]
        need = ys == 0
        if need.any():
            ys = ys.copy()
            ys[need] = self._labels_for(i, xs[need])
        return xs, ys

    def sample_imputed(self, i: int, outputs: np.ndarray) -> tuple[int, int]:
        xs, ys = self.sample_imputed_batch(i, outputs, 1)
        return int(xs[0]), int(ys[0])

    def sample_surrogate_batch(self, i: int, version_space: Sequence[int],
                               sample: tuple[np.ndarray, np.ndarray],
                               n: int) -> tuple[np.ndarray, np.ndarray]:
        """Surrogate sampling: fresh labeled draws inside DIS(V0); outside,
        discard the draw and return a uniform element of the pre-labeled S_i."""
        sx, sy = sample
        if sx.size == 0:
            raise ContractViolation("surrogate sampling needs a non-empty pre-labeled sample")
        dis_mask, _ = self._vs_view(version_space)
        xs = self.draw_unlabeled_batch(i, n)
        ys = np.empty(n, dtype=np.int8)
        need = dis_mask[xs]
        if need.any():
            ys[need] = self._labels_for(i, xs[need])
        resample = ~need
        cnt = int(resample.sum())
        if cnt:
            u = self._streams[i].take(cnt)
            idx = np.minimum((u * sx.size).astype(np.int64), sx.size - 1)
            xs[resample] = sx[idx]
            ys[resample] = sy[idx]
        return xs, ys

    def sample_surrogate(self, i: int, version_space: Sequence[int],
                         sample: tuple[np.ndarray, np.ndarray]) -> tuple[int, int]:
        xs, ys = self.sample_surrogate_batch(i, version_space, sample, 1)
        return int(xs[0]), int(ys[0])

    def sample_conditional_agreement(self, i: int, version_space: Sequence[int],
                                     n: int) -> tuple[np.ndarray, np.ndarray]:
        """n iid labeled pairs from D_i conditioned on the agreement region, by
        rejection; costs exactly n label queries, rejections count as unlabeled
        draws only (exactly the geometric number, no overshoot)."""
        self._check_index(i)
        dis_mask, _ = self._vs_view(version_space)
        d = self.instance.distributions[i]
        agr_pts = [x for x in range(d.m) if not dis_mask[x]]
        if d.mass_exact(agr_pts) == 0:
            raise DegenerateAgreementRegion(
                f"distribution {i} puts zero mass on the agreement region")
        stream = self._streams[i]
        out = np.empty(n, dtype=np.int64)
        got = 0
        while got < n:
            if stream.pos == stream.buf.size:
                stream.buf = stream.rng.random(max(stream.block, 2 * (n - got)))
                stream.pos = 0
            block = stream.buf[stream.pos:]
            xs = np.searchsorted(d.cdf, block, side="right").astype(np.int64)
            acc = ~dis_mask[xs]
            cum = np.cumsum(acc)
            need = n - got
            if cum.size and cum[-1] >= need:
                cut = int(np.searchsorted(cum, need)) + 1
                sel = xs[:cut][acc[:cut]]
                out[got:got + need] = sel
                stream.pos += cut
                self.ledger.unlabeled_draws[i] += cut
                got = n
            else:
                cnt = int(cum[-1]) if cum.size else 0
                if cnt:
                    out[got:got + cnt] = xs[acc]
                    got += cnt
                self.ledger.unlabeled_draws[i] += xs.size
                stream.pos = stream.buf.size
        ys = self._labels_for(i, out)
        return out, ys

    def aux_choice_batch(self, n: int, size: int) -> np.ndarray:
        """n uniform picks from range(size) on the auxiliary stream."""
        u = self._aux.take(n)
        return np.minimum((u * size).astype(np.int64), size - 1)


# -- sampler families ---------------------------------------------------------


class SamplerFamily:
    """A per-distribution (x, y) source injected into the solvers.

    `draw(i, n)` returns n pairs; `calls[i]` counts pairs drawn, which lets the
    solvers reconcile their own accounting against the ledger.
    """

    def __init__(self, k: int, draw_fn: Callable[[int, int], tuple[np.ndarray, np.ndarray]],
                 kind: str):
        self.k = k
        self._draw = draw_fn
        self.kind = kind
        self.calls = np.zeros(k, dtype=np.int64)

    def draw(self, i: int, n: int) -> tuple[np.ndarray, np.ndarray]:
        self.calls[i] += n
        return self._draw(i, n)

    @property
    def total_calls(self) -> int:
        return int(self.calls.sum())


def plain_family(oracles: OracleSet) -> SamplerFamily:
    def draw(i, n):
        return oracles.draw_labeled_batch(i, n)
    return SamplerFamily(oracles.instance.k, draw, "plain")


def induced_family(oracles: OracleSet, version_space: Sequence[int]) -> SamplerFamily:
    V = tuple(version_space)
    def draw(i, n):
        return oracles.sample_induced_batch(i, V, n)
    return SamplerFamily(oracles.instance.k, draw, "induced")


def imputed_family(oracles: OracleSet, outputs: np.ndarray) -> SamplerFamily:
    outs = np.asarray(outputs, dtype=np.int8)
    def draw(i, n):
        return oracles.sample_imputed_batch(i, outs, n)
    return SamplerFamily(oracles.instance.k, draw, "imputed")


def surrogate_family(oracles: OracleSet, version_space: Sequence[int],
                     samples: Sequence[tuple[np.ndarray, np.ndarray] | None]) -> SamplerFamily:
    """Surrogate draws per distribution; a None sample means the agreement
    region has zero mass there, in which case the surrogate equals the raw
    distribution and fresh labeled draws are used (flagged by the caller)."""
    V = tuple(version_space)
    def draw(i, n):
        if samples[i] is None:
            return oracles.draw_labeled_batch(i, n)
        return oracles.sample_surrogate_batch(i, V, samples[i], n)
    return SamplerFamily(oracles.instance.k, draw, "surrogate")


# -- closed-form pmfs of the sampled distributions (for verification) ---------


def surrogate_joint_exact(dist: LabeledDistribution, cls: HypothesisClass,
                          version_space: Sequence[int],
                          sample: tuple[np.ndarray, np.ndarray]) -> dict[tuple[int, int], Fraction]:
    """Exact joint pmf of the surrogate distribution given the realized S_i:
    the raw joint restricted to DIS(V0) plus Pr[AGR(V0)] times the empirical
    distribution of S_i."""
    dis = set(int(x) for x in disagreement_region(cls, version_space))
    out: dict[tuple[int, int], Fraction] = {}
    joint = dist.joint_exact()
    for (x, y), p in joint.items():
        if x in dis:
            out[(x, y)] = out.get((x, y), Fraction(0)) + p
    agr_mass = 1 - dist.mass_exact(dis)
    sx, sy = sample
    n = sx.size
    for x, y in zip(sx, sy):
        key = (int(x), int(y))
        out[key] = out.get(key, Fraction(0)) + agr_mass * Fraction(1, n)
    return out
