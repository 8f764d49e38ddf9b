"""Cluster expansion machinery: Ursell functions, cluster enumeration with
multiset multiplicities, exact truncated expansion terms, and the
Kotecky-Preiss convergence condition with its truncation tail bound.

A cluster is an ordered tuple of polymers whose incompatibility graph
(edges between incompatible entries, repeated entries always incompatible)
is connected. Tuples are stored as multisets with an orderings multiplier,
so every sum over ordered tuples stays exact without materializing them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .graphs import BipartiteGraph, BudgetError, is_two_linked, popcount
from .polymers import (
    DEFAULT_RHO,
    Polymer,
    enumerate_polymers,
    polymer_weight,
    validate_rho,
    xi_brute,
)

URSELL_VERTEX_CAP = 8
DEFAULT_CLUSTER_SIZE_CAP = 4
LOG_PRECISION_BITS = 128


def ursell(k: int, edges) -> Fraction:
    """Ursell function of a simple graph on vertices 0..k-1: the alternating
    sum of (-1)^{|E'|} over spanning connected edge subsets, divided by k!.

    Exact; a disconnected graph gives 0. Refuses more than 8 vertices (the
    sweep is exponential in the edge count).
    """
    if k < 1:
        raise ValueError(f"graph needs at least one vertex, got {k}")
    if k > URSELL_VERTEX_CAP:
        raise BudgetError(f"ursell capped at {URSELL_VERTEX_CAP} vertices, got {k}")
    edge_list = []
    seen = set()
    for u, v in edges:
        if not (0 <= u < k and 0 <= v < k) or u == v:
            raise ValueError(f"bad edge ({u}, {v}) for {k} vertices")
        key = (min(u, v), max(u, v))
        if key not in seen:
            seen.add(key)
            edge_list.append(key)
    m = len(edge_list)
    full = (1 << k) - 1
    total = 0
    for sub in range(1 << m):
        nbr = [0] * k
        s = sub
        while s:
            low = s & -s
            s ^= low
            u, v = edge_list[low.bit_length() - 1]
            nbr[u] |= 1 << v
            nbr[v] |= 1 << u
        # spanning connected check from vertex 0
        seen_mask = 1
        frontier = 1
        while frontier:
            nxt = 0
            f = frontier
            while f:
                low = f & -f
                f ^= low
                nxt |= nbr[low.bit_length() - 1]
            frontier = nxt & ~seen_mask
            seen_mask |= frontier
        if seen_mask == full:
            total += -1 if sub.bit_count() % 2 else 1
    return Fraction(total, math.factorial(k))


@dataclass(frozen=True)
class Cluster:
    """A multiset of polymers with connected incompatibility structure.

    entries pairs each distinct polymer with its multiplicity; size is the
    total vertex count (multiplicity-weighted); orderings counts the ordered
    tuples this multiset represents; ursell_value is the Ursell function of
    the expanded incompatibility graph.
    """

    entries: tuple[tuple[Polymer, int], ...]
    size: int
    orderings: int
    ursell_value: Fraction

    def weight(self, g: BipartiteGraph, params) -> Fraction:
        w = Fraction(self.orderings) * self.ursell_value
        for poly, mult in self.entries:
            w *= polymer_weight(g, params, poly.vertices) ** mult
        return w


def _expanded_ursell(g: BipartiteGraph, entries) -> Fraction:
    """Ursell function of the incompatibility graph on the expanded tuple:
    one vertex per polymer copy, edges between incompatible entries, copies
    of the same polymer always incompatible."""
    expanded = []
    for idx, (_, mult) in enumerate(entries):
        expanded.extend([idx] * mult)
    k = len(expanded)
    incompatible_pair = {}
    edges = []
    for i in range(k):
        for j in range(i + 1, k):
            a, b = expanded[i], expanded[j]
            if a == b:
                edges.append((i, j))
                continue
            key = (min(a, b), max(a, b))
            hit = incompatible_pair.get(key)
            if hit is None:
                hit = is_two_linked(
                    g, entries[a][0].vertices | entries[b][0].vertices)
                incompatible_pair[key] = hit
            if hit:
                edges.append((i, j))
    return ursell(k, edges)


def enumerate_clusters(g: BipartiteGraph, side: str, params, rho=DEFAULT_RHO,
                       k_max: int = 2, size_cap: int | None = None):
    """Every cluster of total size at most k_max on the side, as multisets.

    Emission groups clusters by their support polymers in the polymer
    enumeration order. The expanded incompatibility graph of every emitted
    cluster is connected; anything disconnected is silently skipped per the
    definition.
    """
    cap = DEFAULT_CLUSTER_SIZE_CAP if size_cap is None else size_cap
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    if k_max > cap:
        raise BudgetError(f"cluster size {k_max} exceeds cap {cap}")
    rho = validate_rho(rho)
    polys = [p for p in enumerate_polymers(g, side, rho, size_max=k_max)]
    sizes = [popcount(p.vertices) for p in polys]
    out: list[Cluster] = []

    def support_connected(chosen: list[tuple[int, int]]) -> bool:
        # copies of one polymer form a clique, so connectivity reduces to
        # the support graph on distinct polymers
        t = len(chosen)
        if t == 1:
            return True
        nbr = [0] * t
        for i in range(t):
            for j in range(i + 1, t):
                if is_two_linked(g, polys[chosen[i][0]].vertices |
                                 polys[chosen[j][0]].vertices):
                    nbr[i] |= 1 << j
                    nbr[j] |= 1 << i
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            f = frontier
            while f:
                low = f & -f
                f ^= low
                nxt |= nbr[low.bit_length() - 1]
            frontier = nxt & ~seen
            seen |= frontier
        return seen == (1 << t) - 1

    def emit(chosen: list[tuple[int, int]], size: int) -> None:
        if not support_connected(chosen):
            return
        entries = tuple((polys[i], m) for i, m in chosen)
        copies = sum(m for _, m in chosen)
        orderings = math.factorial(copies)
        for _, m in chosen:
            orderings //= math.factorial(m)
        out.append(Cluster(entries=entries, size=size, orderings=orderings,
                           ursell_value=_expanded_ursell(g, entries)))

    def extend(start: int, chosen: list[tuple[int, int]], size: int) -> None:
        if chosen:
            emit(chosen, size)
        for j in range(start, len(polys)):
            mult = 1
            while size + mult * sizes[j] <= k_max:
                extend(j + 1, chosen + [(j, mult)], size + mult * sizes[j])
                mult += 1

    extend(0, [], 0)
    return out


def l_k(g: BipartiteGraph, side: str, params, rho=DEFAULT_RHO, k: int = 1,
        size_cap: int | None = None) -> Fraction:
    """The exact degree-k term of the cluster expansion of log Xi: the sum
    of orderings * ursell * product of polymer weights over all clusters of
    total size exactly k."""
    total = Fraction(0)
    for cluster in enumerate_clusters(g, side, params, rho, k_max=k,
                                      size_cap=size_cap):
        if cluster.size == k:
            total += cluster.weight(g, params)
    return total


# -- Kotecky-Preiss condition -------------------------------------------------


@dataclass
class KPReport:
    """Outcome of the convergence condition: per-polymer left-hand sums and
    margins f(A) - LHS(A); holds iff every margin is nonnegative."""

    holds: bool
    lhs: list[float]
    margins: list[float]

    @property
    def worst_margin(self) -> float:
        return min(self.margins) if self.margins else math.inf


def kp_check(weights, f_values, g_values, incompatible) -> KPReport:
    """Check, for every polymer A in a finite abstract family, that

        sum over A' incompatible with A of |w(A')| e^{f(A') + g(A')} <= f(A).

    The relation is anti-reflexive: the self term always participates.
    `incompatible` is a callable on index pairs (never called with i == j).
    f and g must be nonnegative.
    """
    k = len(weights)
    if len(f_values) != k or len(g_values) != k:
        raise ValueError("weights, f, g must have equal length")
    for name, vals in (("f", f_values), ("g", g_values)):
        for x in vals:
            if x < 0:
                raise ValueError(f"{name} must be nonnegative, got {x}")
    boosted = [abs(float(w)) * math.exp(float(f_values[i]) + float(g_values[i]))
               for i, w in enumerate(weights)]
    lhs = []
    margins = []
    for i in range(k):
        s = boosted[i]
        for j in range(k):
            if j != i and incompatible(i, j):
                s += boosted[j]
        lhs.append(s)
        margins.append(float(f_values[i]) - s)
    return KPReport(holds=all(m >= 0 for m in margins), lhs=lhs, margins=margins)


def kp_check_polymers(g: BipartiteGraph, side: str, params, f_of_size,
                      g_of_size, rho=DEFAULT_RHO,
                      size_max: int | None = None):
    """Instantiate kp_check on the side's full polymer family with size
    functions f and g. Returns (report, polymers)."""
    polys = list(enumerate_polymers(g, side, rho, size_max=size_max))
    weights = [polymer_weight(g, params, p.vertices) for p in polys]
    sizes = [popcount(p.vertices) for p in polys]
    f_values = [f_of_size(s) for s in sizes]
    g_values = [g_of_size(s) for s in sizes]

    def incompatible(i: int, j: int) -> bool:
        return is_two_linked(g, polys[i].vertices | polys[j].vertices)

    return kp_check(weights, f_values, g_values, incompatible), polys


def log_xi_truncation_report(g: BipartiteGraph, side: str, params,
                             rho=DEFAULT_RHO, k_max: int = 2,
                             f_of_size=None, g_of_size=None,
                             size_cap: int | None = None) -> dict:
    """Compare the truncated cluster expansion against exact log Xi.

    Always reports log Xi (128-bit), the exact terms L_1..L_{k_max}, the
    running partial sums, and the residuals |log Xi - partial|. When size
    functions f and g are supplied, the convergence condition is evaluated
    on the full polymer family; if it holds (and g is non-decreasing with
    g(l)/l non-increasing over the reported sizes, which the tail bound
    derivation needs), the residual at each truncation depth k is asserted
    against the tail bound |side| * f(1) * exp(-g(k)).
    """
    rho = validate_rho(rho)
    xi = xi_brute(g, side, params)
    by_size: dict[int, Fraction] = {k: Fraction(0) for k in range(1, k_max + 1)}
    for cluster in enumerate_clusters(g, side, params, rho, k_max=k_max,
                                      size_cap=size_cap):
        by_size[cluster.size] += cluster.weight(g, params)
    with mpmath.workprec(LOG_PRECISION_BITS):
        log_xi = mpmath.log(mpmath.mpf(xi.numerator) / xi.denominator)
        terms = []
        partial = mpmath.mpf(0)
        for k in range(1, k_max + 1):
            lk = by_size[k]
            # the tail bound at depth k covers |log Xi - L_{<k}|
            residual_before = abs(log_xi - partial)
            partial += mpmath.mpf(lk.numerator) / lk.denominator
            terms.append({
                "k": k,
                "L_k": lk,
                "partial": partial,
                "residual_before": residual_before,
                "residual": abs(log_xi - partial),
            })
    report = {"xi": xi, "log_xi": log_xi, "terms": terms, "kp": None,
              "tail_bounds": None}
    if f_of_size is None or g_of_size is None:
        return report
    kp, _ = kp_check_polymers(g, side, params, f_of_size, g_of_size, rho)
    half = g.n // 2
    bounds = [half * float(f_of_size(1)) * math.exp(-float(g_of_size(k)))
              for k in range(1, k_max + 1)]
    report["kp"] = kp
    report["tail_bounds"] = bounds
    gs = [float(g_of_size(k)) for k in range(1, k_max + 2)]
    eps = 1e-12
    monotone = all(gs[i] <= gs[i + 1] + eps for i in range(len(gs) - 1))
    ratio_ok = all(gs[i] / (i + 1) >= gs[i + 1] / (i + 2) - eps
                   for i in range(len(gs) - 1))
    report["tail_shape_ok"] = monotone and ratio_ok
    if kp.holds and monotone and ratio_ok:
        for k, term in enumerate(terms, start=1):
            assert float(term["residual_before"]) <= bounds[k - 1] + 1e-12, (
                f"tail bound violated at k={k}")
    return report


# -- the graph-native size functions ------------------------------------------


@dataclass(frozen=True)
class KPFunctions:
    """Size functions used to verify convergence on d-regular graphs:

        f(l) = l / d^(c5+1)
        g(l) = f(l) + g_tilde(l)

    with g_tilde piecewise in l: a quadratic-corrected linear regime up to
    sqrt(d), a linear regime up to d^c3, and a slow linear regime beyond.
    alpha_tilde is the weight-decay base (1+lambda)/(1+lambda(1-p)).
    """

    d: int
    alpha_tilde: float
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float

    def f(self, ell: int) -> float:
        return ell / self.d ** (self.c5 + 1)

    def g_tilde(self, ell: int) -> float:
        log_at = math.log(self.alpha_tilde)
        log_d = math.log(self.d)
        if ell <= math.sqrt(self.d):
            return (self.d * ell - self.c1 * ell ** 2) * log_at - \
                (self.c5 + 7) * ell * log_d
        if ell <= self.d ** self.c3:
            return self.d * ell / (2 * self.c2) * log_at
        return ell / self.d ** (self.c5 + 1)

    def g(self, ell: int) -> float:
        return self.f(ell) + self.g_tilde(ell)


def lk_tail_shape(n: int, d: int, alpha_tilde: float, c1: float, c5: float,
                  k: int) -> float:
    """The asymptotic bound shape for the expansion tail of depth k:
    n * d^((c5+7)k - c5 - 1) * alpha_tilde^(-kd + c1 k^2)."""
    return n * d ** ((c5 + 7) * k - c5 - 1) * \
        alpha_tilde ** (-k * d + c1 * k * k)


def kp_sum_audit(g: BipartiteGraph, side: str, params, kpf: KPFunctions,
                 rho=DEFAULT_RHO, size_max: int = 3,
                 tail_depth: int = 3) -> dict:
    """Per-vertex audit of the convergence sums: for every v on the side,
    the sum over enumerated polymers containing v of omega(A) e^{f+g},
    against the target d^-(c5+3). A report with margins, never an
    assertion: at desk-scale degree the asymptotic claim has no obligation
    to hold. The expansion-tail bound shapes are evaluated alongside.
    """
    rho = validate_rho(rho)
    polys = list(enumerate_polymers(g, side, rho, size_max=size_max))
    target = g.d ** -(kpf.c5 + 3)
    per_vertex: dict[int, float] = {}
    per_size: dict[int, float] = {}
    for poly in polys:
        s = popcount(poly.vertices)
        term = float(polymer_weight(g, params, poly.vertices)) * \
            math.exp(kpf.f(s) + kpf.g(s))
        per_size[s] = per_size.get(s, 0.0) + term
        v = poly.vertices
        while v:
            low = v & -v
            v ^= low
            idx = low.bit_length() - 1
            per_vertex[idx] = per_vertex.get(idx, 0.0) + term
    worst = max(per_vertex.values()) if per_vertex else 0.0
    return {
        "target": target,
        "worst_vertex_sum": worst,
        "worst_ratio": worst / target if target else math.inf,
        "holds_at_desk_scale": worst <= target,
        "per_size_totals": per_size,
        "size_max": size_max,
        "polymer_count": len(polys),
        "tail_shapes": [lk_tail_shape(g.n, g.d, kpf.alpha_tilde, kpf.c1,
                                      kpf.c5, k)
                        for k in range(1, tail_depth + 1)],
    }
