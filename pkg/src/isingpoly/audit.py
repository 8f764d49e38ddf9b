"""Vertex-isoperimetry checks and numeric audits of the entropy and
container inequalities at desk scale.

Everything here is either an exact statement checked exactly (set expansion
bounds with every symbol instantiated) or an asymptotic statement reported
as a numeric ratio. Asymptotic hypotheses are never asserted; inequalities
are asserted only when their own hypotheses verify at the given parameters.
Log-scale comparisons run at 128-bit precision with a declared relative
slack of 2^-64.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import mpmath

from .graphs import (
    BipartiteGraph,
    BudgetError,
    bits,
    codegree,
    iter_bits,
    max_codegree,
    neighborhood,
    popcount,
)
from .model import ModelParams, exact_Z, ising_weight, nonpolymer_family
from .polymers import DEFAULT_RHO, enumerate_g_ab, polymer_weight

LOG_PRECISION_BITS = 128
SLACK = 2.0 ** -64
DEFAULT_SUBSET_BUDGET = 1 << 20


@dataclass(frozen=True)
class PropertyConstants:
    """Constants for the isoperimetry properties. The full set c1..c5 with
    c5 < 2 and c3 > c5 + 2 drives the five-constant property; the reduced
    codegree-based property needs only c1, c4, c5 with c5 < 2."""

    c1: float
    c4: float
    c5: float
    c2: float | None = None
    c3: float | None = None

    def __post_init__(self):
        for name in ("c1", "c4", "c5"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.c5 >= 2:
            raise ValueError(f"c5 must be < 2, got {self.c5}")
        for name in ("c2", "c3"):
            val = getattr(self, name)
            if val is not None and val <= 0:
                raise ValueError(f"{name} must be positive")

    def require_full(self) -> None:
        if self.c2 is None or self.c3 is None:
            raise ValueError("this check needs c2 and c3")
        if self.c3 <= self.c5 + 2:
            raise ValueError(
                f"need c3 > c5 + 2, got c3={self.c3}, c5={self.c5}")

    @property
    def c_star(self) -> float:
        return min(0.5, 1 - self.c5 / 2)


def _brute_neighborhood_size(g: BipartiteGraph, mask: int) -> int:
    # second route used to re-verify reported violations
    count = 0
    for v in range(g.n):
        if mask >> v & 1:
            continue
        if g.adj_mask[v] & mask:
            count += 1
    return count


def _exhaustive_sets(g: BipartiteGraph, side: str, size_cap: int,
                     budget: int | None):
    cap = DEFAULT_SUBSET_BUDGET if budget is None else budget
    verts = g.side_E if side == "E" else g.side_O
    total = sum(math.comb(len(verts), k) for k in range(1, size_cap + 1))
    if total > cap:
        raise BudgetError(
            f"exhaustive sweep needs {total} subsets, cap is {cap}")
    for k in range(1, size_cap + 1):
        for combo in combinations(verts, k):
            mask = 0
            for v in combo:
                mask |= 1 << v
            yield mask


def _sampled_sets(g: BipartiteGraph, side: str, size_cap: int, samples: int,
                  rng: random.Random):
    """Random 2-linked-ish growth: a uniform side vertex, then repeated
    uniform extension within the 2-ball of the current set, up to a uniform
    target size. Probes the clustered sets the expansion bounds care about."""
    verts = g.side_E if side == "E" else g.side_O
    side_mask = g.side_mask(side)
    for _ in range(samples):
        target = rng.randint(1, size_cap)
        v = rng.choice(verts)
        mask = 1 << v
        while popcount(mask) < target:
            ball = 0
            for u in iter_bits(mask):
                ball |= g.two_ball_mask(u)
            options = bits(ball & side_mask & ~mask)
            if not options:
                break
            mask |= 1 << rng.choice(options)
        yield mask


def _iterate_sets(g, side, size_cap, mode, rng, samples, budget):
    if mode == "exhaustive":
        yield from _exhaustive_sets(g, side, size_cap, budget)
    elif mode == "sampled":
        yield from _sampled_sets(g, side, size_cap, samples, rng)
    else:
        raise ValueError(f"mode must be exhaustive or sampled, got {mode!r}")


def _run_conditions(g: BipartiteGraph, conditions, size_cap, mode, seed,
                    samples, budget) -> dict:
    """conditions: name -> (applies(size), bound(size)). Returns the
    per-condition verdicts with the worst margin witness."""
    rng = random.Random(seed)
    out = {name: {"holds": True, "checked": 0, "worst": None}
           for name in conditions}
    for side in ("E", "O"):
        for mask in _iterate_sets(g, side, size_cap, mode, rng, samples,
                                  budget):
            size = popcount(mask)
            nbr = popcount(neighborhood(g, mask))
            for name, (applies, bound) in conditions.items():
                if not applies(size):
                    continue
                entry = out[name]
                entry["checked"] += 1
                margin = nbr - bound(size)
                violated = margin < 0
                if violated and nbr != _brute_neighborhood_size(g, mask):
                    raise AssertionError("neighborhood routes disagree")
                worst = entry["worst"]
                if worst is None or margin < worst["margin"]:
                    entry["worst"] = {
                        "set": bits(mask),
                        "side": side,
                        "size": size,
                        "neighborhood": nbr,
                        "bound": float(bound(size)),
                        "margin": float(margin),
                    }
                if violated:
                    entry["holds"] = False
    return out


def check_property_i(g: BipartiteGraph, constants: PropertyConstants,
                     size_cap: int = 4, mode: str = "exhaustive",
                     seed: int = 0, samples: int = 200,
                     budget: int | None = None) -> dict:
    """Expansion conditions Ia(1)-(3) on every checked subset of each side,
    plus the two size ratios of Ib (asymptotic, reported not asserted)."""
    constants.require_full()
    c = constants
    d = g.d
    poly_range = d ** c.c3
    large_range = Fraction(3, 8) * g.n
    conditions = {
        "Ia1": (lambda s: True, lambda s: (d - c.c1 * s) * s),
        "Ia2": (lambda s: s <= poly_range, lambda s: d / c.c2 * s),
        "Ia3": (lambda s: s <= large_range,
                lambda s: (1 + c.c4 / d ** c.c5) * s),
    }
    report = {
        "mode": mode,
        "size_cap": size_cap,
        "seed": seed if mode == "sampled" else None,
        "conditions": _run_conditions(g, conditions, size_cap, mode, seed,
                                      samples, budget),
        "Ib": {
            "n_over_d_power": g.n / d ** (c.c5 + 5),
            "log_n_over_d": math.log(g.n) / d,
        },
        "slack": "integer neighborhood counts against float64 bounds",
    }
    report["holds"] = all(v["holds"] for v in report["conditions"].values())
    return report


def check_property_ii(g: BipartiteGraph, constants: PropertyConstants,
                      size_cap: int = 4, mode: str = "exhaustive",
                      seed: int = 0, samples: int = 200,
                      budget: int | None = None) -> dict:
    """Root-d expansion for polynomially small sets, near-half expansion,
    exact maximum codegree, and the n versus d^6 ratio."""
    c = constants
    d = g.d
    sqrt_d = math.sqrt(d)
    small_range = d ** 3 * math.log(g.n)
    large_range = Fraction(3, 8) * g.n
    conditions = {
        "IIa1": (lambda s: s <= small_range, lambda s: sqrt_d * s),
        "IIa2": (lambda s: s <= large_range,
                 lambda s: (1 + c.c4 / d ** c.c5) * s),
    }
    verdicts = _run_conditions(g, conditions, size_cap, mode, seed, samples,
                               budget)
    codeg = max_codegree(g)
    report = {
        "mode": mode,
        "size_cap": size_cap,
        "seed": seed if mode == "sampled" else None,
        "conditions": verdicts,
        "IIb": {"max_codegree": codeg, "bound": c.c1,
                "holds": codeg <= c.c1},
        "IIc": {"n_over_d6": g.n / d ** 6},
    }
    report["holds"] = all(v["holds"] for v in verdicts.values()) and \
        report["IIb"]["holds"]
    return report


def product_metadata(g: BipartiteGraph):
    """(max factor vertex count, factor count) recovered from the builder
    label, or None when the graph was not declared as a product."""
    label = g.label or ""
    if label.startswith("hypercube:"):
        d = int(label.split(":")[1])
        return 2, d
    if not label.startswith("product:"):
        return None
    sizes = []
    for part in label[len("product:"):].split("+"):
        kind, _, arg = part.partition(":")
        if kind == "kss":
            sizes.append(2 * int(arg))
        elif kind == "cycle":
            sizes.append(int(arg))
        elif kind == "hypercube":
            sizes.append(2 ** int(arg))
        else:
            return None
    return max(sizes), len(sizes)


def check_product_iso(g: BipartiteGraph, size_cap: int = 4,
                      s: int | None = None, t: int | None = None,
                      budget: int | None = None) -> dict:
    """Isoperimetry of a Cartesian product with factors of at most s
    vertices: codegree at most s (exact), the reported worst constant c in
    |N(X)| >= t|X|/c, and the near-half expansion factor
    1 + 2 sqrt(2)(1-q)/(s sqrt(t)) at q = 2|X|/n, checked exhaustively."""
    if s is None or t is None:
        meta = product_metadata(g)
        if meta is None:
            raise ValueError(
                "graph is not a declared product; pass s and t explicitly")
        s = s if s is not None else meta[0]
        t = t if t is not None else meta[1]
    codeg = max_codegree(g)
    worst_c = 0.0
    factor_holds = True
    worst_factor = None
    for side in ("E", "O"):
        for mask in _exhaustive_sets(g, side, size_cap, budget):
            size = popcount(mask)
            nbr = popcount(neighborhood(g, mask))
            worst_c = max(worst_c, t * size / nbr)
            q = 2 * size / g.n
            needed = size * (1 + 2 * math.sqrt(2) * (1 - q) /
                             (s * math.sqrt(t)))
            margin = nbr - needed
            if worst_factor is None or margin < worst_factor["margin"]:
                worst_factor = {"set": bits(mask), "side": side,
                                "margin": margin, "bound": needed,
                                "neighborhood": nbr}
            if margin < 0:
                factor_holds = False
    return {
        "s": s,
        "t": t,
        "max_codegree": codeg,
        "codegree_holds": codeg <= s,
        "worst_c": worst_c,
        "near_half_holds": factor_holds,
        "near_half_worst": worst_factor,
        "size_cap": size_cap,
    }


# -- entropy-style partition sums over coordinate families --------------------


@dataclass(frozen=True)
class PsiFamily:
    """A family of distinct subsets of the coordinate set {0..d-1}."""

    d: int
    subsets: tuple

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        normalized = tuple(frozenset(ps) for ps in self.subsets)
        for ps in normalized:
            for x in ps:
                if not 0 <= x < self.d:
                    raise ValueError(f"coordinate {x} outside range(0, {self.d})")
        if len(set(normalized)) != len(normalized):
            raise ValueError("family members must be distinct")
        object.__setattr__(self, "subsets", normalized)

    @property
    def has_empty(self) -> bool:
        return frozenset() in self.subsets

    def sizes(self) -> list[int]:
        return sorted(len(ps) for ps in self.subsets)


def z_psi(family: PsiFamily, params: ModelParams) -> Fraction:
    """Exact sum of lambda^|psi| (1 + lambda (1-p)^|psi|)^d over the family."""
    lam = params.lam
    surv = 1 - params.p
    total = Fraction(0)
    for ps in family.subsets:
        k = len(ps)
        total += lam ** k * (1 + lam * surv ** k) ** family.d
    return total


def ell_psi(family: PsiFamily) -> int:
    """Number of coordinates no member uses."""
    used = set()
    for ps in family.subsets:
        used |= ps
    return family.d - len(used)


def psi_split(family: PsiFamily, s) -> tuple[PsiFamily, PsiFamily]:
    """(members with 1 <= |psi| <= s, members with |psi| > s); the empty
    set belongs to neither part."""
    s = Fraction(s) if not isinstance(s, Fraction) else s
    low = tuple(ps for ps in family.subsets if 1 <= len(ps) <= s)
    high = tuple(ps for ps in family.subsets if len(ps) > s)
    return PsiFamily(family.d, low), PsiFamily(family.d, high)


def _hypotheses_hold(d: int, params: ModelParams, big_c) -> dict:
    """The two instantiated inequalities the split bounds assume:
    lam/(1+lam) >= 64C log d/d + 4 log(lam d^(C+1))/(beta d) and
    alpha_bar >= 4C log d/d + 10 log(2+lam) log(1+lam d)/(beta d)."""
    lam = params.lam
    with mpmath.workprec(LOG_PRECISION_BITS):
        beta = params.beta()
        if beta <= 0:
            return {"holds": False, "first_margin": None,
                    "second_margin": None, "note": "beta must be positive"}
        log_d = mpmath.log(d)
        lam_f = mpmath.mpf(lam.numerator) / lam.denominator
        lhs1 = lam_f / (1 + lam_f)
        rhs1 = 64 * big_c * log_d / d + \
            4 * mpmath.log(lam_f * mpmath.mpf(d) ** (big_c + 1)) / (beta * d)
        lhs2 = params.alpha_bar()
        rhs2 = 4 * big_c * log_d / d + \
            10 * mpmath.log(2 + lam_f) * mpmath.log(1 + lam_f * d) / \
            (beta * d)
        return {
            "holds": bool(lhs1 >= rhs1 and lhs2 >= rhs2),
            "first_margin": float(lhs1 - rhs1),
            "second_margin": float(lhs2 - rhs2),
            "note": None,
        }


def z_psi_split_audit(family: PsiFamily, ell, params: ModelParams,
                      big_c) -> dict:
    """Split the family at s = ((d - ell)/2)(lam/(1+lam)) and compare both
    exact partial sums against their bounds
    (1+lam)^d exp(-alpha_bar ell - C log d) and
    (1+lam)^d exp(-alpha_bar ell + d^-C). Bounds are asserted only when the
    hypothesis inequalities verify at (d, lam, p, C)."""
    if big_c <= 0:
        raise ValueError(f"C must be positive, got {big_c}")
    d = family.d
    ell = Fraction(ell) if not isinstance(ell, Fraction) else ell
    limit = min(Fraction(ell_psi(family)), Fraction(d, 2))
    if not 0 <= ell <= limit:
        raise ValueError(f"need 0 <= ell <= min(ell_psi, d/2) = {limit}, "
                         f"got {ell}")
    lam = params.lam
    s = (d - ell) * Fraction(1, 2) * lam / (1 + lam)
    low, high = psi_split(family, s)
    z_low = z_psi(low, params)
    z_high = z_psi(high, params)
    hyp = _hypotheses_hold(d, params, big_c)
    with mpmath.workprec(LOG_PRECISION_BITS):
        abar = params.alpha_bar()
        ell_f = mpmath.mpf(ell.numerator) / ell.denominator
        base = d * mpmath.log(mpmath.mpf((1 + lam).numerator) /
                              (1 + lam).denominator)
        log_rhs_low = base - abar * ell_f - big_c * mpmath.log(d)
        log_rhs_high = base - abar * ell_f + mpmath.mpf(d) ** (-big_c)
        def logf(x: Fraction):
            if x == 0:
                return mpmath.mpf("-inf")
            return mpmath.log(mpmath.mpf(x.numerator) / x.denominator)
        low_ok = logf(z_low) <= log_rhs_low * (1 + SLACK) + SLACK
        high_ok = logf(z_high) <= log_rhs_high * (1 + SLACK) + SLACK
        report = {
            "s": s,
            "ell": ell,
            "low_sizes": low.sizes(),
            "high_sizes": high.sizes(),
            "split_identity_ok": (not family.has_empty and
                                  z_low + z_high == z_psi(family, params)),
            "hypotheses": hyp,
            "low": {"log_lhs": logf(z_low), "log_rhs": log_rhs_low,
                    "ok": bool(low_ok)},
            "high": {"log_lhs": logf(z_high), "log_rhs": log_rhs_high,
                     "ok": bool(high_ok)},
            "slack": "2^-64 relative",
            "asserted": hyp["holds"],
        }
    if hyp["holds"]:
        assert low_ok, "low split bound violated with hypotheses holding"
        assert high_ok, "high split bound violated with hypotheses holding"
    return report


def z_psi_halfell_audit(family: PsiFamily, params: ModelParams,
                        big_c) -> dict:
    """Audit Z(family) <= (1+lam)^d exp(-(1/2) alpha_bar ell_psi + d^-C),
    the specialization of the split bound at ell = ell_psi / 2. Requires
    the empty set not be a member."""
    if family.has_empty:
        raise ValueError("the half-ell bound requires the empty set not "
                         "be in the family")
    if big_c <= 0:
        raise ValueError(f"C must be positive, got {big_c}")
    d = family.d
    lam = params.lam
    total = z_psi(family, params)
    hyp = _hypotheses_hold(d, params, big_c)
    with mpmath.workprec(LOG_PRECISION_BITS):
        abar = params.alpha_bar()
        base = d * mpmath.log(mpmath.mpf((1 + lam).numerator) /
                              (1 + lam).denominator)
        log_rhs = base - abar * ell_psi(family) / 2 + \
            mpmath.mpf(d) ** (-big_c)
        if total == 0:
            log_lhs = mpmath.mpf("-inf")
        else:
            log_lhs = mpmath.log(mpmath.mpf(total.numerator) /
                                 total.denominator)
        ok = bool(log_lhs <= log_rhs * (1 + SLACK) + SLACK)
        report = {
            "ell_psi": ell_psi(family),
            "hypotheses": hyp,
            "log_lhs": log_lhs,
            "log_rhs": log_rhs,
            "ok": ok,
            "slack": "2^-64 relative",
            "asserted": hyp["holds"],
        }
    if hyp["holds"]:
        assert ok, "half-ell bound violated with hypotheses holding"
    return report


# -- container and nonpolymer sums --------------------------------------------


def container_hypothesis_check(g: BipartiteGraph, side: str, c2,
                               budget: int | None = None) -> dict:
    """The neighborhood-expansion hypothesis of the container bound: every
    X inside a single neighborhood N(y), y off the side, with |X| > d/2
    satisfies |N(X)| >= (d/c2)|X|. Exhaustive over all such X."""
    cap = DEFAULT_SUBSET_BUDGET if budget is None else budget
    opposite = g.side_O if side == "E" else g.side_E
    if len(opposite) * (1 << g.d) > cap:
        raise BudgetError("neighborhood subset sweep over budget")
    holds = True
    worst = None
    checked = 0
    for y in opposite:
        nbrs = g.adj[y]
        for r in range(g.d // 2 + 1, g.d + 1):
            for combo in combinations(nbrs, r):
                mask = 0
                for v in combo:
                    mask |= 1 << v
                checked += 1
                nbr = popcount(neighborhood(g, mask))
                margin = nbr - Fraction(g.d, 1) / Fraction(c2) * r
                if worst is None or margin < worst["margin"]:
                    worst = {"y": y, "set": bits(mask),
                             "margin": float(margin),
                             "neighborhood": nbr}
                if margin < 0:
                    holds = False
    return {"holds": holds, "checked": checked, "worst": worst, "c2": c2}


def container_sum_report(g: BipartiteGraph, side: str, a: int, b: int,
                         params: ModelParams,
                         enum_cap: int | None = None) -> dict:
    """Exact sum of weights over the 2-linked sets with closure size a and
    neighborhood size b, with the implied container constant
    C* = -log(LHS/|D|) log d / ((b-a) alpha^2). No pass or fail: the
    container bound's constant is unspecified."""
    half = g.n // 2
    if b < a:
        return {"a": a, "b": b, "count": 0, "lhs": Fraction(0),
                "d_size": half, "empty": True, "c_star_implied": None}
    members = list(enumerate_g_ab(g, side, a, b, enum_cap))
    lhs = sum((polymer_weight(g, params, m) for m in members), Fraction(0))
    report = {
        "a": a,
        "b": b,
        "count": len(members),
        "lhs": lhs,
        "d_size": half,
        "empty": False,
        "c_star_implied": None,
    }
    alpha = params.alpha
    if b > a and alpha > 0:
        with mpmath.workprec(LOG_PRECISION_BITS):
            if lhs == 0:
                report["c_star_implied"] = mpmath.mpf("+inf")
            else:
                ratio = mpmath.mpf(lhs.numerator) / lhs.denominator / half
                alpha_f = mpmath.mpf(alpha.numerator) / alpha.denominator
                report["c_star_implied"] = -mpmath.log(ratio) * \
                    mpmath.log(g.d) / ((b - a) * alpha_f ** 2)
    return report


def nonpolymer_weight_report(g: BipartiteGraph, params: ModelParams,
                             rho=DEFAULT_RHO,
                             sweep_cap: int | None = None) -> dict:
    """Exact total weight of the configurations captured on neither side,
    its ratio to the full partition function, and the decay exponent
    -log(ratio) d / n."""
    total = Fraction(0)
    count = 0
    for mask in nonpolymer_family(g, rho, sweep_cap):
        total += ising_weight(g, params, mask)
        count += 1
    z = exact_Z(g, params)
    ratio = total / z
    with mpmath.workprec(LOG_PRECISION_BITS):
        if ratio == 0:
            exponent = mpmath.mpf("+inf")
        else:
            exponent = -mpmath.log(mpmath.mpf(ratio.numerator) /
                                   ratio.denominator) * g.d / g.n
    return {"count": count, "total": total, "z": z, "ratio": ratio,
            "exponent": exponent}
