"""Finite-support domain types and exact error/disagreement metrics.

Everything downstream (samplers, solvers, verifiers) builds on the types here.
Probabilities are carried as exact rationals internally (integer numerators
over a shared per-array denominator), so loss tables, disagreement masses and
coefficient ratios computed from generator-built instances are exact, and
repeated evaluation is bit-identical.  Float views are derived for sampling.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

PMF_TOL = 1e-12
NU_DECLARED_TOL = 1e-9


class ContractViolation(ValueError):
    """An operation was called outside its stated contract."""


Number = Union[int, float, Fraction, str]


def _frac(x: Number) -> Fraction:
    """Exact conversion; floats map to their exact binary value."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def _integerize(values: Sequence[Fraction]) -> tuple[tuple[int, ...], int]:
    """Common-denominator form (numerators, denominator) of a rational vector."""
    den = 1
    for v in values:
        den = den * v.denominator // math.gcd(den, v.denominator)
    nums = tuple(int(v.numerator * (den // v.denominator)) for v in values)
    return nums, den


@dataclass(frozen=True)
class FeatureSpace:
    """Finite feature space; points are the indices 0..size-1."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ContractViolation(f"feature space size must be >= 1, got {self.size}")


class Hypothesis:
    """A total labeling of the feature space into {-1, +1}."""

    __slots__ = ("labels", "_key")

    def __init__(self, labels: Iterable[int]):
        arr = np.asarray(list(labels) if not isinstance(labels, np.ndarray) else labels, dtype=np.int8)
        if arr.ndim != 1 or arr.size == 0:
            raise ContractViolation("hypothesis labels must be a non-empty 1-d vector")
        if not np.all(np.abs(arr) == 1):
            raise ContractViolation("hypothesis labels must be +1/-1")
        object.__setattr__(self, "labels", arr)
        object.__setattr__(self, "_key", arr.tobytes())

    def __call__(self, x: int) -> int:
        return int(self.labels[x])

    def __len__(self) -> int:
        return int(self.labels.size)

    def __eq__(self, other) -> bool:
        return isinstance(other, Hypothesis) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"Hypothesis({self.labels.tolist()})"


class HypothesisClass:
    """Ordered list of distinct hypotheses; the order is the canonical tie-break order."""

    def __init__(self, hypotheses: Sequence[Hypothesis]):
        hyps = list(hypotheses)
        if not hyps:
            raise ContractViolation("hypothesis class must be non-empty")
        m = len(hyps[0])
        seen = set()
        for h in hyps:
            if len(h) != m:
                raise ContractViolation("all hypotheses must share the feature space")
            if h._key in seen:
                raise ContractViolation("duplicate hypothesis label vector")
            seen.add(h._key)
        self.hypotheses: list[Hypothesis] = hyps
        self.labels: np.ndarray = np.stack([h.labels for h in hyps])  # (n, m) int8
        self.m = m

    def __len__(self) -> int:
        return len(self.hypotheses)

    def __getitem__(self, i: int) -> Hypothesis:
        return self.hypotheses[i]

    def index_of(self, h: Hypothesis) -> int:
        for i, g in enumerate(self.hypotheses):
            if g == h:
                return i
        raise KeyError("hypothesis not in class")

    def full_version_space(self) -> tuple[int, ...]:
        return tuple(range(len(self.hypotheses)))


class LabeledDistribution:
    """A finite distribution over X x {-1,+1}, stored factorized.

    `marginal` is the pmf over points, `eta_plus[x]` the probability of label
    +1 at x.  Both are kept as exact rationals; float views for the samplers
    are derived on demand.
    """

    def __init__(self, marginal: Sequence[Number], eta_plus: Sequence[Number]):
        marg = [_frac(v) for v in marginal]
        eta = [_frac(v) for v in eta_plus]
        if len(marg) != len(eta) or not marg:
            raise ContractViolation("marginal and eta_plus must be non-empty and equal length")
        if any(v < 0 for v in marg):
            raise ContractViolation("marginal entries must be non-negative")
        total = sum(marg)
        if abs(float(total) - 1.0) > PMF_TOL:
            raise ContractViolation(f"marginal must sum to 1 within {PMF_TOL}, got {float(total)}")
        if any(v < 0 or v > 1 for v in eta):
            raise ContractViolation("eta_plus entries must lie in [0, 1]")
        self.marginal: tuple[Fraction, ...] = tuple(marg)
        self.eta_plus: tuple[Fraction, ...] = tuple(eta)
        self.m = len(marg)
        self._mnum, self._mden = _integerize(self.marginal)
        self._enum, self._eden = _integerize(self.eta_plus)
        self._marginal_f: np.ndarray | None = None
        self._eta_f: np.ndarray | None = None
        self._cdf: np.ndarray | None = None

    @property
    def marginal_f(self) -> np.ndarray:
        if self._marginal_f is None:
            self._marginal_f = np.array([float(v) for v in self.marginal])
        return self._marginal_f

    @property
    def eta_f(self) -> np.ndarray:
        if self._eta_f is None:
            self._eta_f = np.array([float(v) for v in self.eta_plus])
        return self._eta_f

    @property
    def cdf(self) -> np.ndarray:
        if self._cdf is None:
            c = np.cumsum(self.marginal_f)
            c[-1] = 1.0
            self._cdf = c
        return self._cdf

    def mass_exact(self, points: Iterable[int]) -> Fraction:
        num = sum(self._mnum[x] for x in points)
        return Fraction(num, self._mden)

    def support(self) -> tuple[int, ...]:
        return tuple(x for x in range(self.m) if self._mnum[x] > 0)

    def joint_exact(self) -> dict[tuple[int, int], Fraction]:
        """Joint pmf over (point, label) pairs, labels in {-1,+1}."""
        out: dict[tuple[int, int], Fraction] = {}
        den = self._mden * self._eden
        for x in range(self.m):
            if self._mnum[x] == 0:
                continue
            plus = Fraction(self._mnum[x] * self._enum[x], den)
            minus = Fraction(self._mnum[x] * (self._eden - self._enum[x]), den)
            if plus:
                out[(x, 1)] = plus
            if minus:
                out[(x, -1)] = minus
        return out


class RandomizedHypothesis:
    """A uniform mixture over (a multiset of) class members.

    Losses and disagreements of a randomized hypothesis are arithmetic means
    over its support; repeats carry proportional weight.
    """

    def __init__(self, cls: HypothesisClass, support: Iterable[int]):
        counts: dict[int, int] = {}
        total = 0
        for idx in support:
            idx = int(idx)
            if not 0 <= idx < len(cls):
                raise ContractViolation("support index out of class range")
            counts[idx] = counts.get(idx, 0) + 1
            total += 1
        if total == 0:
            raise ContractViolation("randomized hypothesis support must be non-empty")
        self.cls = cls
        self.counts: tuple[tuple[int, int], ...] = tuple(sorted(counts.items()))
        self.total = total

    @property
    def support_indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.counts)

    def weight_of(self, idx: int) -> Fraction:
        for i, c in self.counts:
            if i == idx:
                return Fraction(c, self.total)
        return Fraction(0)

    def __repr__(self) -> str:
        return f"RandomizedHypothesis(total={self.total}, support={dict(self.counts)})"


HypothesisLike = Union[Hypothesis, RandomizedHypothesis]


def _check_dims(h: Hypothesis, dist: LabeledDistribution) -> None:
    if len(h) != dist.m:
        raise ContractViolation(f"dimension mismatch: hypothesis has {len(h)} points, distribution {dist.m}")


def loss_exact(h: Hypothesis, dist: LabeledDistribution) -> Fraction:
    """Exact 0-1 loss: sum_x marginal[x] * Pr[y != h(x) | x]."""
    _check_dims(h, dist)
    mnum, enum, eden = dist._mnum, dist._enum, dist._eden
    lab = h.labels
    acc = 0
    for x in range(dist.m):
        mx = mnum[x]
        if mx == 0:
            continue
        acc += mx * (enum[x] if lab[x] < 0 else eden - enum[x])
    return Fraction(acc, dist._mden * eden)


def loss(h: Hypothesis, dist: LabeledDistribution) -> float:
    return float(loss_exact(h, dist))


def _as_weighted(h: HypothesisLike) -> list[tuple[Hypothesis, Fraction]]:
    if isinstance(h, Hypothesis):
        return [(h, Fraction(1))]
    return [(h.cls[i], Fraction(c, h.total)) for i, c in h.counts]


def _mean_exact(h: HypothesisLike, fn) -> Fraction:
    return sum((w * fn(g) for g, w in _as_weighted(h)), Fraction(0))


@dataclass
class MDLInstance:
    """k labeled distributions over a shared feature space plus a hypothesis class."""

    feature_space: FeatureSpace
    hypothesis_class: HypothesisClass
    distributions: list[LabeledDistribution]
    declared_nu: float | None = None
    metadata: dict = field(default_factory=dict)
    _pair_dis_cache: dict = field(default_factory=dict, repr=False, init=False)
    _best: tuple[int, Fraction] | None = field(default=None, repr=False, init=False)

    def __post_init__(self):
        m = self.feature_space.size
        if self.hypothesis_class.m != m:
            raise ContractViolation("hypothesis class does not match feature space size")
        if not self.distributions:
            raise ContractViolation("instance must have k >= 1 distributions")
        for d in self.distributions:
            if d.m != m:
                raise ContractViolation("distribution does not match feature space size")
        if self.declared_nu is not None:
            computed = float(self.nu_exact())
            if abs(computed - self.declared_nu) > NU_DECLARED_TOL:
                raise ContractViolation(
                    f"declared nu {self.declared_nu} != computed {computed} (tol {NU_DECLARED_TOL})")

    @property
    def k(self) -> int:
        return len(self.distributions)

    @property
    def m(self) -> int:
        return self.feature_space.size

    def loss_vector_exact(self, h: HypothesisLike) -> list[Fraction]:
        return [_mean_exact(h, lambda g, d=d: loss_exact(g, d)) for d in self.distributions]

    def worst_loss_exact(self, h: HypothesisLike) -> Fraction:
        return max(self.loss_vector_exact(h))

    def _best_pair(self) -> tuple[int, Fraction]:
        if self._best is None:
            best_idx, best_val = 0, None
            for idx, h in enumerate(self.hypothesis_class.hypotheses):
                val = self.worst_loss_exact(h)
                if best_val is None or val < best_val:
                    best_idx, best_val = idx, val
            self._best = (best_idx, best_val)
        return self._best

    def nu_exact(self) -> Fraction:
        return self._best_pair()[1]

    def pair_disagreement_exact(self, ia: int, ib: int, i: int) -> Fraction:
        """Exact rho_i between class members ia, ib (cached)."""
        if ia == ib:
            return Fraction(0)
        key = (min(ia, ib), max(ia, ib), i)
        got = self._pair_dis_cache.get(key)
        if got is None:
            la = self.hypothesis_class.labels[ia]
            lb = self.hypothesis_class.labels[ib]
            pts = np.nonzero(la != lb)[0]
            got = self.distributions[i].mass_exact(int(x) for x in pts)
            self._pair_dis_cache[key] = got
        return got


def worst_loss(h: HypothesisLike, inst: MDLInstance) -> float:
    """Worst error across the k distributions (mean over support for randomized h)."""
    return float(inst.worst_loss_exact(h))


def disagreement_exact(h1: HypothesisLike, h2: HypothesisLike, dist: LabeledDistribution) -> Fraction:
    acc = Fraction(0)
    for a, wa in _as_weighted(h1):
        for b, wb in _as_weighted(h2):
            _check_dims(a, dist)
            _check_dims(b, dist)
            pts = np.nonzero(a.labels != b.labels)[0]
            acc += wa * wb * dist.mass_exact(int(x) for x in pts)
    return acc


def disagreement(h1: HypothesisLike, h2: HypothesisLike, dist: LabeledDistribution) -> float:
    """Pr_{x~D}[h1(x) != h2(x)]; mean over support pairs for randomized arguments."""
    return float(disagreement_exact(h1, h2, dist))


def max_disagreement_exact(h1: HypothesisLike, h2: HypothesisLike, inst: MDLInstance) -> Fraction:
    return max(disagreement_exact(h1, h2, d) for d in inst.distributions)


def max_disagreement(h1: HypothesisLike, h2: HypothesisLike, inst: MDLInstance) -> float:
    return float(max_disagreement_exact(h1, h2, inst))


def disagreement_region(cls: HypothesisClass, version_space: Sequence[int]) -> np.ndarray:
    """Points where some pair in the version space disagrees."""
    V = list(version_space)
    if not V:
        raise ContractViolation("version space must be non-empty")
    sub = cls.labels[V]
    return np.nonzero(sub.min(axis=0) != sub.max(axis=0))[0]


def agreement_labels(cls: HypothesisClass, version_space: Sequence[int]) -> np.ndarray:
    """Unanimous label V(x) on the agreement region, 0 on the disagreement region."""
    V = list(version_space)
    if not V:
        raise ContractViolation("version space must be non-empty")
    sub = cls.labels[V]
    lo, hi = sub.min(axis=0), sub.max(axis=0)
    out = np.where(lo == hi, lo, 0).astype(np.int8)
    return out


def best_nu(inst: MDLInstance) -> tuple[Hypothesis, float]:
    """Exact minimizer of the worst-case loss; ties broken by lowest class index."""
    idx, val = inst._best_pair()
    return inst.hypothesis_class[idx], float(val)


def best_nu_index(inst: MDLInstance) -> int:
    return inst._best_pair()[0]


def mixture_distribution(dists: Sequence[LabeledDistribution],
                         weights: Sequence[Number] | None = None) -> LabeledDistribution:
    """The mixture D_w = sum_i w_i D_i as a factorized labeled distribution."""
    if not dists:
        raise ContractViolation("mixture needs at least one distribution")
    k = len(dists)
    if weights is None:
        w = [Fraction(1, k)] * k
    else:
        w = [_frac(v) for v in weights]
        tot = sum(w)
        if len(w) != k or any(v < 0 for v in w) or abs(float(tot) - 1.0) > PMF_TOL:
            raise ContractViolation("mixture weights must be a probability vector over the distributions")
        w = [v / tot for v in w]
    m = dists[0].m
    marg = [Fraction(0)] * m
    num = [Fraction(0)] * m
    for wi, d in zip(w, dists):
        for x in range(m):
            px = wi * d.marginal[x]
            marg[x] += px
            num[x] += px * d.eta_plus[x]
    eta = [num[x] / marg[x] if marg[x] else Fraction(0) for x in range(m)]
    return LabeledDistribution(marg, eta)


def induced_distribution(dist: LabeledDistribution, cls: HypothesisClass,
                         version_space: Sequence[int]) -> LabeledDistribution:
    """Closed form of the version-space-imputed distribution.

    Keeps the marginal; on the agreement region the label is deterministically
    the unanimous prediction, on the disagreement region the conditional is
    untouched.
    """
    lab = agreement_labels(cls, version_space)
    eta = [dist.eta_plus[x] if lab[x] == 0 else Fraction(1 if lab[x] > 0 else 0)
           for x in range(dist.m)]
    return LabeledDistribution(dist.marginal, eta)


def imputed_distribution(dist: LabeledDistribution, outputs: Sequence[int]) -> LabeledDistribution:
    """Closed form of the abstaining-classifier-imputed distribution.

    `outputs[x]` in {-1,+1,0}; labels are imputed wherever the classifier
    commits, and untouched where it abstains.
    """
    if len(outputs) != dist.m:
        raise ContractViolation("classifier outputs must cover the feature space")
    eta = [dist.eta_plus[x] if outputs[x] == 0 else Fraction(1 if outputs[x] > 0 else 0)
           for x in range(dist.m)]
    return LabeledDistribution(dist.marginal, eta)


# ---------------------------------------------------------------------------
# Canonical instance file format (JSON syntax):
#   {"m": int, "hypotheses": [[+-1,...],...],
#    "distributions": [{"marginal": [...], "eta_plus": [...]}, ...],
#    "nu": optional float, "metadata": optional object}
# ---------------------------------------------------------------------------

def instance_to_dict(inst: MDLInstance) -> dict:
    doc = {
        "m": inst.m,
        "hypotheses": [h.labels.tolist() for h in inst.hypothesis_class.hypotheses],
        "distributions": [
            {"marginal": [float(v) for v in d.marginal],
             "eta_plus": [float(v) for v in d.eta_plus]}
            for d in inst.distributions
        ],
    }
    if inst.declared_nu is not None:
        doc["nu"] = inst.declared_nu
    if inst.metadata:
        doc["metadata"] = inst.metadata
    return doc


def instance_from_dict(doc: dict) -> MDLInstance:
    fs = FeatureSpace(int(doc["m"]))
    cls = HypothesisClass([Hypothesis(v) for v in doc["hypotheses"]])
    dists = [LabeledDistribution(d["marginal"], d["eta_plus"]) for d in doc["distributions"]]
    return MDLInstance(fs, cls, dists,
                       declared_nu=doc.get("nu"),
                       metadata=doc.get("metadata", {}))


def save_instance(inst: MDLInstance, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_dict(inst), fh, indent=1)
        fh.write("\n")


def load_instance(path: str) -> MDLInstance:
    with open(path) as fh:
        return instance_from_dict(json.load(fh))
