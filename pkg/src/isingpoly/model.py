"""Exact antiferromagnetic Ising / hard-core model computations.

The model on a graph G assigns every vertex subset I the weight
lambda^|I| * (1-p)^{E(I)}, where E(I) counts edges inside I and
p = 1 - e^{-beta} in (0,1] encodes the inverse temperature; p = 1 is the
hard-core model (subsets with an internal edge weigh zero) and p = 0
removes the interaction entirely. Parameterizing by p keeps every weight,
partition function, and probability an exact Fraction.

This module owns the partition function, the percolation identity routes
(exact edge-subset sweep and seeded Monte Carlo), the measures mu and
mu-hat with their total-variation distance, the capture test behind the
polymer approximation, and the exact sampler for the decorated polymer
measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .graphs import (
    BipartiteGraph,
    BudgetError,
    DEFAULT_EDGE_SWEEP_CAP,
    DEFAULT_SWEEP_CAP,
    as_mask,
    bits,
    closure,
    iter_bits,
    popcount,
    two_linked_components,
)
from .polymers import (
    DEFAULT_RHO,
    enumerate_compatible_configs,
    validate_rho,
)

LOG_PRECISION_BITS = 128
# Monte-Carlo draws are consumed in fixed blocks of this many samples; the
# block layout is part of the reproducibility contract.
MC_CHUNK = 4096


@dataclass(frozen=True)
class ModelParams:
    """Fugacity lambda > 0 and percolation probability p in [0, 1].

    p plays the role of 1 - e^{-beta}: p = 1 is the hard-core model,
    p = 0 turns every subset weight into lambda^|I|.
    """

    lam: Fraction
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lam", Fraction(self.lam))
        object.__setattr__(self, "p", Fraction(self.p))
        if self.lam <= 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not 0 <= self.p <= 1:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    @property
    def alpha(self) -> Fraction:
        """lambda * p, the effective interaction strength."""
        return self.lam * self.p

    @property
    def alpha_tilde(self) -> Fraction:
        """(1 + lambda) / (1 + lambda(1-p)); always at most 1 + lambda."""
        return (1 + self.lam) / (1 + self.lam * (1 - self.p))

    @property
    def q(self) -> Fraction:
        """lambda / (1 + lambda), the free-vertex occupation probability."""
        return self.lam / (1 + self.lam)

    def alpha_bar(self) -> mpmath.mpf:
        """log(alpha_tilde) at 128-bit precision; report-only."""
        with mpmath.workprec(LOG_PRECISION_BITS):
            at = self.alpha_tilde
            return mpmath.log(mpmath.mpf(at.numerator) / at.denominator)

    def beta(self) -> mpmath.mpf:
        """-log(1-p) at 128-bit precision; +inf for the hard-core model."""
        if self.p == 1:
            return mpmath.inf
        with mpmath.workprec(LOG_PRECISION_BITS):
            s = 1 - self.p
            return -mpmath.log(mpmath.mpf(s.numerator) / s.denominator)


def _check_sweep(n: int, cap: int | None) -> None:
    limit = DEFAULT_SWEEP_CAP if cap is None else cap
    if n > limit:
        raise BudgetError(f"subset sweep over {n} vertices exceeds cap {limit}")


def internal_edge_count(g: BipartiteGraph, i_mask: int) -> int:
    """Number of edges of G with both endpoints in the set."""
    total = 0
    for v in iter_bits(i_mask):
        total += popcount(g.adj_mask[v] & i_mask)
    return total // 2


def ising_weight(g: BipartiteGraph, params: ModelParams, i) -> Fraction:
    """lambda^|I| * (1-p)^{E(I)}; zero when p = 1 and I has an internal edge."""
    i = as_mask(i)
    inside = internal_edge_count(g, i)
    surv = 1 - params.p
    w = params.lam ** popcount(i)
    if inside:
        if surv == 0:
            return Fraction(0)
        w *= surv ** inside
    return w


def exact_Z(g: BipartiteGraph, params: ModelParams,
            sweep_cap: int | None = None) -> Fraction:
    """The partition function: the exact sum of ising_weight over all 2^n
    subsets, computed by a boundary dynamic program (states keyed by the
    chosen vertices that still have undecided neighbors) so the sweep stays
    feasible at the budget cap."""
    _check_sweep(g.n, sweep_cap)
    lam = params.lam
    surv = 1 - params.p
    last = [nbrs[-1] for nbrs in g.adj]
    states: dict[int, Fraction] = {0: Fraction(1)}
    for i in range(g.n):
        retain = 0
        for v in range(i + 1):
            if last[v] > i:
                retain |= 1 << v
        bit = 1 << i
        am = g.adj_mask[i]
        nxt: dict[int, Fraction] = {}
        for s, w in states.items():
            key = s & retain
            cur = nxt.get(key)
            nxt[key] = w if cur is None else cur + w
            back = popcount(am & s)
            if back and surv == 0:
                continue
            wi = w * lam
            if back:
                wi *= surv ** back
            key = (s | bit) & retain
            cur = nxt.get(key)
            nxt[key] = wi if cur is None else cur + wi
        states = nxt
    (value,) = states.values()
    return value


def count_independent_sets(g: BipartiteGraph,
                           sweep_cap: int | None = None) -> int:
    """i(G) by branch-and-count on the lowest remaining vertex; independent
    of the partition-function code path."""
    _check_sweep(g.n, sweep_cap)
    adj = g.adj_mask
    memo: dict[int, int] = {0: 1}

    def count(rem: int) -> int:
        cached = memo.get(rem)
        if cached is not None:
            return cached
        low = rem & -rem
        v = low.bit_length() - 1
        value = count(rem & ~low) + count(rem & ~(low | adj[v]))
        memo[rem] = value
        return value

    return count((1 << g.n) - 1)


def _hardcore_polynomial(nbr: list[int], full: int, lam: Fraction) -> Fraction:
    """Sum of lambda^|I| over independent sets of the graph given by the
    per-vertex neighbor masks, restricted to vertices in `full`."""
    memo: dict[int, Fraction] = {0: Fraction(1)}

    def walk(rem: int) -> Fraction:
        cached = memo.get(rem)
        if cached is not None:
            return cached
        low = rem & -rem
        v = low.bit_length() - 1
        value = walk(rem & ~low) + lam * walk(rem & ~(low | nbr[v]))
        memo[rem] = value
        return value

    return walk(full)


def percolation_expectation_exact(g: BipartiteGraph, params: ModelParams,
                                  edge_cap: int | None = None) -> Fraction:
    """E[Z_{G_p}(lambda)]: keep each edge independently with probability p,
    average the hard-core partition function of the surviving subgraph.
    Computed as the honest sum over all 2^|E| subgraphs; exact."""
    edges = list(g.edges())
    m = len(edges)
    limit = DEFAULT_EDGE_SWEEP_CAP if edge_cap is None else edge_cap
    if m > limit:
        raise BudgetError(f"edge sweep over {m} edges exceeds cap {limit}")
    p = params.p
    lam = params.lam
    prob = [p ** k * (1 - p) ** (m - k) for k in range(m + 1)]
    full = (1 << g.n) - 1
    total = Fraction(0)
    for sub in range(1 << m):
        if prob[sub.bit_count()] == 0:
            continue
        nbr = [0] * g.n
        for e in iter_bits(sub):
            u, v = edges[e]
            nbr[u] |= 1 << v
            nbr[v] |= 1 << u
        total += prob[sub.bit_count()] * _hardcore_polynomial(nbr, full, lam)
    return total


def percolation_mc(g: BipartiteGraph, params: ModelParams, samples: int,
                   seed: int, sweep_cap: int | None = None) -> tuple[float, float]:
    """Monte-Carlo estimate of E[Z_{G_p}(lambda)] with its standard error.

    Reproducibility contract: sample k lives in block k // MC_CHUNK; block c
    draws a (block-size x |E|) uniform matrix from a Philox generator seeded
    with SeedSequence(seed, spawn_key=(c,)), and edge j of sample k survives
    iff the matrix entry is below p. Identical (seed, samples) give
    bit-identical results regardless of how blocks are scheduled.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    _check_sweep(g.n, sweep_cap)
    edges = list(g.edges())
    m = len(edges)
    p_float = params.p.numerator / params.p.denominator
    full = (1 << g.n) - 1
    cache: dict[int, float] = {}
    values = np.empty(samples, dtype=np.float64)
    pos = 0
    block = 0
    powers = 1 << np.arange(m, dtype=np.int64)
    while pos < samples:
        rows = min(MC_CHUNK, samples - pos)
        gen = np.random.Generator(np.random.Philox(
            np.random.SeedSequence(entropy=seed, spawn_key=(block,))))
        keep = gen.random((rows, m)) < p_float
        masks = (keep * powers).sum(axis=1)
        for r in range(rows):
            sub = int(masks[r])
            val = cache.get(sub)
            if val is None:
                nbr = [0] * g.n
                for e in iter_bits(sub):
                    u, v = edges[e]
                    nbr[u] |= 1 << v
                    nbr[v] |= 1 << u
                val = float(_hardcore_polynomial(nbr, full, params.lam))
                cache[sub] = val
            values[pos + r] = val
        pos += rows
        block += 1
    mean = float(values.mean())
    if samples == 1:
        return mean, 0.0
    stderr = float(values.std(ddof=1) / math.sqrt(samples))
    return mean, stderr


# -- measures ----------------------------------------------------------------


class MeasureTable:
    """A finite probability table with exact Fraction probabilities.

    Keys are outcomes (subset masks, or (mask, side) pairs); probabilities
    must be nonnegative and sum to exactly 1. The normalization constant
    (the partition function the probabilities were divided by) rides along
    for reporting.
    """

    def __init__(self, probs: dict, normalization: Fraction):
        total = Fraction(0)
        for key, value in probs.items():
            if value < 0:
                raise ValueError(f"negative probability at {key!r}")
            total += value
        if total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")
        self.probs = dict(probs)
        self.normalization = Fraction(normalization)

    def prob(self, key) -> Fraction:
        return self.probs[key]

    def support(self):
        return [k for k, v in self.probs.items() if v > 0]

    def __len__(self):
        return len(self.probs)


def tv_distance(a: MeasureTable, b: MeasureTable) -> Fraction:
    """Total variation distance (1/2) sum |a - b|, exact."""
    if set(a.probs) != set(b.probs):
        raise ValueError("measures live on different outcome spaces")
    return sum((abs(a.probs[k] - b.probs[k]) for k in a.probs),
               Fraction(0)) / 2


def captured_on_side(g: BipartiteGraph, i, side: str, rho=DEFAULT_RHO) -> bool:
    """True iff every maximal 2-linked component of I on the side has a
    closure of size at most rho * |side|, i.e. the side's polymer model can
    represent I's trace there."""
    rho = validate_rho(rho)
    i = as_mask(i)
    cutoff = rho * Fraction(g.n, 2)
    for comp in two_linked_components(g, i & g.side_mask(side)):
        if Fraction(popcount(closure(g, comp, side=side))) > cutoff:
            return False
    return True


def mu_table(g: BipartiteGraph, params: ModelParams,
             sweep_cap: int | None = None) -> MeasureTable:
    """The Ising measure: P(I) = ising_weight(I) / Z over all subsets."""
    _check_sweep(g.n, sweep_cap)
    z = exact_Z(g, params, sweep_cap=sweep_cap)
    probs = {}
    for i_mask in range(1 << g.n):
        probs[i_mask] = ising_weight(g, params, i_mask) / z
    return MeasureTable(probs, z)


def z_hat_sweep(g: BipartiteGraph, params: ModelParams, rho=DEFAULT_RHO,
                sweep_cap: int | None = None) -> Fraction:
    """The polymer-approximation normalizer by direct sweep: each subset
    contributes its weight once per side whose capture test it passes."""
    _check_sweep(g.n, sweep_cap)
    rho = validate_rho(rho)
    total = Fraction(0)
    for i_mask in range(1 << g.n):
        hits = captured_on_side(g, i_mask, "O", rho) + \
            captured_on_side(g, i_mask, "E", rho)
        if hits:
            total += hits * ising_weight(g, params, i_mask)
    return total


def mu_hat_table(g: BipartiteGraph, params: ModelParams, rho=DEFAULT_RHO,
                 sweep_cap: int | None = None) -> MeasureTable:
    """The polymer-approximation measure on subsets: weight counted once per
    capturing side (a set captured on both sides is deliberately counted
    twice, matching the two-sided normalizer)."""
    _check_sweep(g.n, sweep_cap)
    rho = validate_rho(rho)
    weights = {}
    total = Fraction(0)
    for i_mask in range(1 << g.n):
        hits = captured_on_side(g, i_mask, "O", rho) + \
            captured_on_side(g, i_mask, "E", rho)
        w = hits * ising_weight(g, params, i_mask) if hits else Fraction(0)
        weights[i_mask] = w
        total += w
    return MeasureTable({k: w / total for k, w in weights.items()}, total)


def mu_hat_star_table(g: BipartiteGraph, params: ModelParams, rho=DEFAULT_RHO,
                      sweep_cap: int | None = None) -> MeasureTable:
    """The two-sided measure on pairs (I, side): P = [captured] * weight / Z-hat."""
    _check_sweep(g.n, sweep_cap)
    rho = validate_rho(rho)
    weights = {}
    total = Fraction(0)
    for i_mask in range(1 << g.n):
        w = ising_weight(g, params, i_mask)
        for side in ("O", "E"):
            val = w if captured_on_side(g, i_mask, side, rho) else Fraction(0)
            weights[(i_mask, side)] = val
            total += val
    return MeasureTable({k: w / total for k, w in weights.items()}, total)


def nonpolymer_family(g: BipartiteGraph, rho=DEFAULT_RHO,
                      sweep_cap: int | None = None):
    """Subsets captured on neither side, in increasing mask order."""
    _check_sweep(g.n, sweep_cap)
    rho = validate_rho(rho)
    for i_mask in range(1 << g.n):
        if not captured_on_side(g, i_mask, "O", rho) and \
                not captured_on_side(g, i_mask, "E", rho):
            yield i_mask


def minority_side(g: BipartiteGraph, i) -> str:
    """The side holding the smaller half of I; ties resolve to O."""
    i = as_mask(i)
    if popcount(i & g.side_E_mask) < popcount(i & g.side_O_mask):
        return "E"
    return "O"


# -- exact sampler for the decorated polymer measure -------------------------


class MuHatSampler:
    """Seeded sampler for the two-sided polymer measure on pairs (I, side).

    A draw proceeds exactly as the measure is built: pick the defect side
    with probability proportional to its polymer partition function, pick a
    compatible polymer configuration with probability proportional to its
    weight product, decorate each polymer's boundary vertex v independently
    (inclusion odds lambda (1-p)^{deg} against 1), then fill the rest of the
    opposite side outside all boundaries independently with probability
    lambda / (1 + lambda).

    Draw k of seed s consumes a dedicated Philox stream seeded with
    SeedSequence(s, spawn_key=(k,)); random choices consume the stream in a
    fixed documented order (side, configuration, boundaries by polymer then
    vertex index, pool by vertex index), each as one 128-bit word.
    """

    def __init__(self, g: BipartiteGraph, params: ModelParams,
                 rho=DEFAULT_RHO, enum_cap: int | None = None):
        self.g = g
        self.params = params
        self.rho = validate_rho(rho)
        lam = params.lam
        surv = 1 - params.p
        self._sides = ("O", "E")
        self._configs = {}
        self._config_weights = {}
        xi = {}
        for side in self._sides:
            configs = enumerate_compatible_configs(g, side, params, self.rho,
                                                   enum_cap=enum_cap)
            denom = math.lcm(*(w.denominator for _, w in configs))
            weights = [int(w * denom) for _, w in configs]
            self._configs[side] = configs
            self._config_weights[side] = weights
            xi[side] = sum((w for _, w in configs), Fraction(0))
        side_denom = math.lcm(xi["O"].denominator, xi["E"].denominator)
        self._side_weights = [int(xi[s] * side_denom) for s in self._sides]
        self.xi = xi
        # per-boundary-vertex inclusion probabilities, cached per polymer
        self._decoration = {}
        for side in self._sides:
            for config, _ in self._configs[side]:
                for poly in config:
                    if poly.vertices in self._decoration:
                        continue
                    rows = []
                    for v in bits(poly.boundary):
                        deg = popcount(g.adj_mask[v] & poly.vertices)
                        top = lam * surv ** deg
                        rows.append((v, top / (1 + top)))
                    self._decoration[poly.vertices] = rows

    def draw(self, seed: int, k: int = 0) -> tuple[int, str]:
        gen = np.random.Generator(np.random.Philox(
            np.random.SeedSequence(entropy=seed, spawn_key=(k,))))

        def word() -> int:
            lo, hi = gen.integers(0, 1 << 64, size=2, dtype=np.uint64)
            return (int(hi) << 64) | int(lo)

        def pick(weights: list[int]) -> int:
            total = sum(weights)
            target = (word() * total) >> 128
            acc = 0
            for idx, w in enumerate(weights):
                acc += w
                if target < acc:
                    return idx
            return len(weights) - 1

        def bernoulli(r: Fraction) -> bool:
            return word() * r.denominator < r.numerator << 128

        side = self._sides[pick(self._side_weights)]
        config, _ = self._configs[side][pick(self._config_weights[side])]
        i_mask = 0
        covered = 0
        for poly in config:
            i_mask |= poly.vertices
            covered |= poly.boundary
            for v, r in self._decoration[poly.vertices]:
                if bernoulli(r):
                    i_mask |= 1 << v
        pool = self.g.side_mask(self.g.other_side(side)) & ~covered
        q = self.params.q
        for v in iter_bits(pool):
            if bernoulli(q):
                i_mask |= 1 << v
        return i_mask, side


def sample_mu_hat(g: BipartiteGraph, params: ModelParams, rho=DEFAULT_RHO,
                  seed: int = 0) -> tuple[int, str]:
    """One draw (I, side) from the two-sided polymer measure; identical
    seeds give identical draws. Building the sampler dominates the cost;
    use MuHatSampler directly for repeated draws."""
    return MuHatSampler(g, params, rho).draw(seed)
