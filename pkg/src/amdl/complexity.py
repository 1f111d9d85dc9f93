"""Exact combinatorial/metric complexity measures of an instance.

VC dimension and star number are exhaustive searches capped at desk scale;
the disagreement coefficient is evaluated exactly over the finite candidate
radius set (the ball-mass function is piecewise constant on finite supports,
so the sup over r >= r0 is attained at a candidate radius).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (ContractViolation, Hypothesis, HypothesisClass,
                   LabeledDistribution, MDLInstance, _frac,
                   disagreement_region)

DEFAULT_VC_CAP = 12
DEFAULT_STAR_CAP = 64
_STAR_NODE_BUDGET = 2_000_000


@dataclass(frozen=True)
class ComplexityValue:
    """A computed measure; `lower_bound_only` means the search cap bound, so the
    true value is >= `value`."""

    value: int
    lower_bound_only: bool = False

    def __int__(self) -> int:
        return self.value


def _shattered(labels01: np.ndarray, subset: tuple[int, ...]) -> bool:
    sub = labels01[:, subset]
    codes = sub @ (1 << np.arange(len(subset)))
    return len(np.unique(codes)) == (1 << len(subset))


def vc_dimension(cls: HypothesisClass, cap: int = DEFAULT_VC_CAP) -> ComplexityValue:
    """Largest size of a shattered point subset, exhaustively, up to `cap`.

    Grows shattered sets incrementally (every subset of a shattered set is
    shattered), so the work is bounded by the number of shattered sets rather
    than all subsets.
    """
    if cap < 0:
        raise ContractViolation("cap must be non-negative")
    labels01 = (cls.labels > 0).astype(np.int64)
    m = cls.m
    # no point is shattered unless both labels appear there
    level = [(x,) for x in range(m) if 0 < labels01[:, x].sum() < len(cls)]
    if not level:
        return ComplexityValue(0, lower_bound_only=False)
    size = 1
    while size < cap:
        nxt = []
        seen = set()
        for A in level:
            for x in range(A[-1] + 1, m):
                cand = A + (x,)
                if cand in seen:
                    continue
                seen.add(cand)
                if _shattered(labels01, cand):
                    nxt.append(cand)
        if not nxt:
            return ComplexityValue(size, lower_bound_only=False)
        level = nxt
        size += 1
    return ComplexityValue(cap, lower_bound_only=True)


def _star_feasible(S: tuple[int, ...], diffs: list[frozenset[int]]) -> bool:
    Sset = set(S)
    for x in S:
        ok = False
        for d in diffs:
            if x in d and len(d & Sset) == 1:
                ok = True
                break
        if not ok:
            return False
    return True


def star_number(cls: HypothesisClass, hstar: Hypothesis,
                cap: int = DEFAULT_STAR_CAP) -> ComplexityValue:
    """Largest star set around `hstar`: points each flippable alone by some
    class member that agrees with `hstar` on the rest of the set.

    Exact branch-and-bound (the star property is downward closed); degrades to
    a greedy lower bound with `lower_bound_only=True` if the cap or the node
    budget is hit.
    """
    diffs = []
    for h in cls.hypotheses:
        d = frozenset(int(x) for x in np.nonzero(h.labels != hstar.labels)[0])
        if d:
            diffs.append(d)
    diffs = sorted(set(diffs), key=lambda d: (len(d), sorted(d)))
    points = sorted({x for d in diffs for x in d})
    if not points:
        return ComplexityValue(0)

    best = 0
    nodes = 0
    budget_hit = False

    def extend(S: tuple[int, ...], start: int):
        nonlocal best, nodes, budget_hit
        if budget_hit:
            return
        nodes += 1
        if nodes > _STAR_NODE_BUDGET:
            budget_hit = True
            return
        best = max(best, len(S))
        if len(S) >= cap:
            budget_hit = budget_hit or len(S) == cap  # cap can truncate the search
            return
        cands = [y for y in points[start:] if _star_feasible(S + (y,), diffs)]
        if len(S) + len(cands) <= best:
            return
        for pos, y in enumerate(cands):
            extend(S + (y,), points.index(y) + 1)

    extend((), 0)
    if budget_hit:
        # greedy completion as an explicit lower bound
        S: tuple[int, ...] = ()
        for y in points:
            if len(S) >= cap:
                break
            if _star_feasible(S + (y,), diffs):
                S = S + (y,)
        return ComplexityValue(max(best, len(S)), lower_bound_only=True)
    return ComplexityValue(best, lower_bound_only=False)


def star_number_unqualified(cls: HypothesisClass, cap: int = DEFAULT_STAR_CAP) -> ComplexityValue:
    """Max of the reference-based star number over references in the class.

    The unqualified star number is reported this way and flagged as such; the
    reference-based variant is the primitive.
    """
    best = ComplexityValue(0)
    for h in cls.hypotheses:
        v = star_number(cls, h, cap)
        if v.value > best.value or (v.value == best.value and v.lower_bound_only):
            best = v
    return best


@dataclass(frozen=True)
class DisagreementProfile:
    """Ball-mass profile around a reference hypothesis under one distribution.

    `radii` are the distinct candidate radii (exact), `masses[j]` the mass of
    DIS(B(h*, radii[j])); masses are non-decreasing in the radius.
    """

    radii: tuple[Fraction, ...]
    masses: tuple[Fraction, ...]


def disagreement_profile(dist: LabeledDistribution, cls: HypothesisClass,
                         hstar: Hypothesis) -> DisagreementProfile:
    rhos = []
    for h in cls.hypotheses:
        pts = np.nonzero(h.labels != hstar.labels)[0]
        rhos.append(dist.mass_exact(int(x) for x in pts))
    radii = sorted(set(rhos))
    masses = []
    for r in radii:
        ball = [i for i, rho in enumerate(rhos) if rho <= r]
        pts = disagreement_region(cls, ball) if ball else np.array([], dtype=int)
        masses.append(dist.mass_exact(int(x) for x in pts))
    for a, b in zip(masses, masses[1:]):
        assert a <= b
    return DisagreementProfile(tuple(radii), tuple(masses))


def disagreement_coefficient_exact(dist: LabeledDistribution, cls: HypothesisClass,
                                   hstar: Hypothesis, r0) -> Fraction:
    r0 = _frac(r0)
    if r0 <= 0:
        raise ContractViolation("r0 must be positive")
    prof = disagreement_profile(dist, cls, hstar)

    def mass_at(r: Fraction) -> Fraction:
        out = Fraction(0)
        for rad, mass in zip(prof.radii, prof.masses):
            if rad <= r:
                out = mass
            else:
                break
        return out

    candidates = [r0] + [r for r in prof.radii if r >= r0]
    theta = max(mass_at(r) / r for r in candidates)
    assert theta * r0 <= 1, "disagreement coefficient exceeded its 1/r0 ceiling"
    return theta


def disagreement_coefficient(dist: LabeledDistribution, cls: HypothesisClass,
                             hstar: Hypothesis, r0) -> float:
    """sup_{r >= r0} Pr[DIS(B(h*, r))] / r, evaluated exactly."""
    return float(disagreement_coefficient_exact(dist, cls, hstar, r0))


def theta_max_exact(inst: MDLInstance, hstar: Hypothesis, r0) -> Fraction:
    return max(disagreement_coefficient_exact(d, inst.hypothesis_class, hstar, r0)
               for d in inst.distributions)


def theta_max(inst: MDLInstance, hstar: Hypothesis, r0) -> float:
    return float(theta_max_exact(inst, hstar, r0))
