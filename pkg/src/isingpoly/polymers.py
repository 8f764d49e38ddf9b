"""Polymers on one side of a bipartite graph, their exact weights, the
brute-force polymer partition function, and container-style set families.

A polymer on side D is a 2-linked subset A of D whose closure [A] (the
same-side vertices whose whole neighborhood lies inside N(A)) occupies at
most a rho fraction of D. Weights depend on the model parameters through
lambda and the edge-survival factor 1-p; everything here is an exact
Fraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graphs import (
    BipartiteGraph,
    BudgetError,
    DEFAULT_ENUM_CAP,
    as_mask,
    bits,
    closure,
    is_two_linked,
    iter_bits,
    neighborhood,
    popcount,
)
from .rationals import format_rational

DEFAULT_RHO = Fraction(3, 4)


def validate_rho(rho) -> Fraction:
    rho = Fraction(rho)
    if not Fraction(1, 2) < rho < 1:
        raise ValueError(f"rho must lie strictly between 1/2 and 1, got {rho}")
    return rho


@dataclass(frozen=True)
class Polymer:
    """A 2-linked set on one side together with its closure and boundary."""

    side: str
    vertices: int
    closure: int
    boundary: int

    @property
    def size(self) -> int:
        return popcount(self.vertices)

    def vertex_tuple(self) -> tuple[int, ...]:
        return bits(self.vertices)


def make_polymer(g: BipartiteGraph, a, side: str | None = None) -> Polymer:
    """Wrap a 2-linked same-side set as a Polymer (no rho validity check)."""
    a = as_mask(a)
    if a == 0:
        raise ValueError("a polymer must be nonempty")
    if side is None:
        if a & g.side_E_mask and a & g.side_O_mask:
            raise ValueError("polymer vertices straddle both sides")
        side = "E" if a & g.side_E_mask else "O"
    if not is_two_linked(g, a):
        raise ValueError(f"{bits(a)} is not 2-linked")
    cl = closure(g, a, side=side)
    return Polymer(side=side, vertices=a, closure=cl, boundary=neighborhood(g, a))


def polymer_is_valid(g: BipartiteGraph, a, side: str | None = None,
                     rho=DEFAULT_RHO) -> bool:
    """True iff A is 2-linked, on one side, and |[A]| <= rho * |side|."""
    rho = validate_rho(rho)
    a = as_mask(a)
    if a == 0:
        return False
    if side is None:
        if a & g.side_E_mask and a & g.side_O_mask:
            return False
        side = "E" if a & g.side_E_mask else "O"
    elif a & ~g.side_mask(side):
        return False
    if not is_two_linked(g, a):
        return False
    cl = closure(g, a, side=side)
    return Fraction(popcount(cl)) <= rho * Fraction(g.n, 2)


def _two_linked_side_sets(g: BipartiteGraph, side: str, size_max: int,
                          enum_cap: int | None):
    """All 2-linked subsets of a side with at most size_max vertices, in
    lexicographic order of their sorted vertex tuples, each exactly once."""
    cap = DEFAULT_ENUM_CAP if enum_cap is None else enum_cap
    side_mask = g.side_mask(side)
    found: list[int] = []

    def extend(s_mask: int, size: int, excluded: int) -> None:
        found.append(s_mask)
        if len(found) > cap:
            raise BudgetError(f"2-linked enumeration exceeded {cap} sets")
        if size == size_max:
            return
        ext = 0
        for u in iter_bits(s_mask):
            ext |= g.two_ball_mask(u)
        ext &= side_mask & ~s_mask & ~excluded
        banned = excluded
        for u in iter_bits(ext):
            extend(s_mask | (1 << u), size + 1, banned)
            banned |= 1 << u

    below = 0
    for v in iter_bits(side_mask):
        extend(1 << v, 1, below)
        below |= 1 << v
    found.sort(key=bits)
    return found


def enumerate_polymers(g: BipartiteGraph, side: str, rho=DEFAULT_RHO,
                       size_max: int | None = None,
                       enum_cap: int | None = None):
    """Yield every polymer on the side with at most size_max vertices.

    size_max defaults to floor(rho * |side|), which covers all polymers
    since |A| <= |[A]|. Emission follows the lexicographic order of the
    sorted vertex tuples.
    """
    rho = validate_rho(rho)
    half = Fraction(g.n, 2)
    cutoff = rho * half
    if size_max is None:
        size_max = int(cutoff)
    if size_max < 1:
        raise ValueError(f"size_max must be >= 1, got {size_max}")
    for a in _two_linked_side_sets(g, side, size_max, enum_cap):
        cl = closure(g, a, side=side)
        if Fraction(popcount(cl)) <= cutoff:
            yield Polymer(side=side, vertices=a, closure=cl,
                          boundary=neighborhood(g, a))


def _vertices_of(a) -> int:
    if isinstance(a, Polymer):
        return a.vertices
    return as_mask(a)


def polymer_weight(g: BipartiteGraph, params, a) -> Fraction:
    """Exact polymer weight by the per-boundary-vertex product:

        omega(A) = lambda^|A| * prod_{v in N(A)} (1 + lambda (1-p)^{deg_A(v)}) / (1 + lambda)

    where deg_A(v) counts v's neighbors inside A. Agrees with the literal
    sum over decorations B (see polymer_weight_literal).
    """
    a = _vertices_of(a)
    lam = params.lam
    surv = 1 - params.p
    w = lam ** popcount(a)
    one_plus = 1 + lam
    for v in iter_bits(neighborhood(g, a)):
        deg = popcount(g.adj_mask[v] & a)
        w *= (1 + lam * surv ** deg)
        w /= one_plus
    return w


def decorated_weight(g: BipartiteGraph, params, a, b) -> Fraction:
    """Weight of a decorated polymer (A, B) with B inside N(A):

        lambda^(|A|+|B|) * (1-p)^{e(A,B)} / (1+lambda)^{|N(A)|}.
    """
    a = _vertices_of(a)
    b = as_mask(b)
    boundary = neighborhood(g, a)
    if b & ~boundary:
        bad = bits(b & ~boundary)[0]
        raise ValueError(f"decoration vertex {bad} lies outside N(A)")
    lam = params.lam
    surv = 1 - params.p
    cross = sum(popcount(g.adj_mask[v] & a) for v in iter_bits(b))
    w = lam ** (popcount(a) + popcount(b))
    if cross:
        w *= surv ** cross
    return w / (1 + lam) ** popcount(boundary)


def polymer_weight_literal(g: BipartiteGraph, params, a,
                           boundary_cap: int = 20) -> Fraction:
    """Test oracle: the defining sum over every decoration B inside N(A) of
    lambda^(|A|+|B|) (1-p)^{e(A,B)} / (1+lambda)^{|N(A)|}.

    Visits all 2^|N(A)| decorations one by one, tallying them by
    (|B|, e(A,B)) so the Fraction arithmetic happens once per tally bucket
    rather than once per decoration. Never uses the product factorization.
    """
    a = _vertices_of(a)
    boundary = bits(neighborhood(g, a))
    nb = len(boundary)
    if nb > boundary_cap:
        raise BudgetError(
            f"literal weight sweeps 2^{nb} decorations, cap is 2^{boundary_cap}")
    degs = [popcount(g.adj_mask[v] & a) for v in boundary]
    size = [0] * (1 << nb)
    cross = [0] * (1 << nb)
    tally: dict[tuple[int, int], int] = {(0, 0): 1}
    for sub in range(1, 1 << nb):
        low = sub & -sub
        prev = sub ^ low
        k = size[prev] + 1
        c = cross[prev] + degs[low.bit_length() - 1]
        size[sub] = k
        cross[sub] = c
        tally[(k, c)] = tally.get((k, c), 0) + 1
    lam = params.lam
    surv = 1 - params.p
    total = Fraction(0)
    for (k, c), count in tally.items():
        term = count * lam ** k
        if c:
            if surv == 0:
                continue
            term *= surv ** c
        total += term
    return total * lam ** popcount(a) / (1 + lam) ** nb


def weight_bound_check(g: BipartiteGraph, params, a) -> bool:
    """True iff omega(A) <= lambda^|A| * alpha_tilde^(-|N(A)|), exactly.

    alpha_tilde = (1+lambda)/(1+lambda(1-p)), so the right side equals the
    weight a polymer would have if every boundary vertex saw only one
    polymer vertex; extra internal edges only shrink the weight.
    """
    a = _vertices_of(a)
    lam = params.lam
    surv = 1 - params.p
    bound = lam ** popcount(a) * ((1 + lam * surv) / (1 + lam)) ** popcount(
        neighborhood(g, a))
    return polymer_weight(g, params, a) <= bound


def compatible(g: BipartiteGraph, a, b) -> bool:
    """Two same-side polymers are compatible iff their union is not 2-linked.

    Anti-reflexive: a polymer is incompatible with itself (A union A = A is
    2-linked). Raises if the arguments live on different sides.
    """
    if isinstance(a, Polymer) and isinstance(b, Polymer) and a.side != b.side:
        raise ValueError(f"polymers on different sides: {a.side} vs {b.side}")
    am = _vertices_of(a)
    bm = _vertices_of(b)
    for m in (am, bm):
        if m & g.side_E_mask and m & g.side_O_mask:
            raise ValueError("polymer vertices straddle both sides")
    if (am & g.side_E_mask and bm & g.side_O_mask) or (
            am & g.side_O_mask and bm & g.side_E_mask):
        raise ValueError("polymers on different sides")
    return not is_two_linked(g, am | bm)


def xi_brute(g: BipartiteGraph, side: str, params, rho=DEFAULT_RHO,
             enum_cap: int | None = None) -> Fraction:
    """Polymer partition function Xi_D: the sum over all sets of pairwise
    compatible polymers of the product of their weights, including the
    empty configuration (contributing 1)."""
    polys = [p.vertices for p in enumerate_polymers(g, side, rho,
                                                    enum_cap=enum_cap)]
    weights = [polymer_weight(g, params, a) for a in polys]
    k = len(polys)
    # bit i of incomp[j]: polymer i conflicts with polymer j
    incomp = []
    for j in range(k):
        m = 1 << j
        for i in range(k):
            if i != j and is_two_linked(g, polys[i] | polys[j]):
                m |= 1 << i
        incomp.append(m)

    memo: dict[int, Fraction] = {}

    def total(allowed: int) -> Fraction:
        if allowed == 0:
            return Fraction(1)
        cached = memo.get(allowed)
        if cached is not None:
            return cached
        low = allowed & -allowed
        j = low.bit_length() - 1
        value = total(allowed & ~low) + weights[j] * total(allowed & ~incomp[j])
        memo[allowed] = value
        return value

    return total((1 << k) - 1)


def enumerate_compatible_configs(g: BipartiteGraph, side: str, params,
                                 rho=DEFAULT_RHO, enum_cap: int | None = None):
    """All sets of pairwise compatible polymers on the side, with their
    weight products: pairs (tuple of Polymer, Fraction). The empty
    configuration comes first with weight 1. Feeds the exact sampler."""
    polys = list(enumerate_polymers(g, side, rho, enum_cap=enum_cap))
    weights = [polymer_weight(g, params, p.vertices) for p in polys]
    k = len(polys)
    compat = []
    for j in range(k):
        m = 0
        for i in range(j + 1, k):
            if not is_two_linked(g, polys[i].vertices | polys[j].vertices):
                m |= 1 << i
        compat.append(m)
    out: list[tuple[tuple[Polymer, ...], Fraction]] = []

    def extend(chosen: tuple[int, ...], weight: Fraction, allowed: int) -> None:
        out.append((tuple(polys[i] for i in chosen), weight))
        rest = allowed
        while rest:
            low = rest & -rest
            rest ^= low
            j = low.bit_length() - 1
            extend(chosen + (j,), weight * weights[j], allowed & compat[j])

    extend((), Fraction(1), (1 << k) - 1)
    return out


def enumerate_g_ab(g: BipartiteGraph, side: str, a: int, b: int,
                   enum_cap: int | None = None):
    """All 2-linked sets A on the side with |[A]| = a and |N(A)| = b, in
    lexicographic order. No rho cutoff applies here. Empty when b < a."""
    if a < 1:
        raise ValueError(f"closure size a must be >= 1, got {a}")
    if b < a:
        return
    for s in _two_linked_side_sets(g, side, a, enum_cap):
        if popcount(closure(g, s, side=side)) == a and \
                popcount(neighborhood(g, s)) == b:
            yield s


def is_psi_approximation(g: BipartiteGraph, side: str, f, h, a, psi: int) -> bool:
    """Check the container conditions for a pair (F, H) against a set A on
    the side: F inside N(A), H containing [A], every H-vertex nearly fully
    matched into F (at least d - psi neighbors), and every opposite-side
    vertex outside F nearly fully matched outside H.
    """
    if not 1 <= psi <= g.d - 1:
        raise ValueError(f"psi must lie in [1, {g.d - 1}], got {psi}")
    side_m = g.side_mask(side)
    other_m = g.side_mask(g.other_side(side))
    f = as_mask(f)
    h = as_mask(h)
    a = as_mask(a)
    if f & ~other_m:
        raise ValueError("F must lie on the side opposite A")
    if h & ~side_m:
        raise ValueError("H must lie on A's side")
    if a & ~side_m:
        raise ValueError("A must lie on the declared side")
    na = neighborhood(g, a)
    cl = closure(g, a, side=side)
    if f & ~na or cl & ~h:
        return False
    need = g.d - psi
    for u in iter_bits(h):
        if popcount(g.adj_mask[u] & f) < need:
            return False
    for v in iter_bits(other_m & ~f):
        if popcount(g.adj_mask[v] & ~h) < need:
            return False
    return True


def approximation_facts(g: BipartiteGraph, side: str, f, h, a, psi: int) -> dict:
    """The two size inequalities any psi-approximation of A must satisfy,
    reported with both sides evaluated:

        |H| <= |F| + (b - a) * psi / (d - psi)
        |E(H, N(A) \\ F)| <= (b - |F|) * psi

    with a = |[A]| and b = |N(A)|.
    """
    f = as_mask(f)
    h = as_mask(h)
    a = as_mask(a)
    na = neighborhood(g, a)
    cl = closure(g, a, side=side)
    a_size = popcount(cl)
    b_size = popcount(na)
    f_size = popcount(f)
    uncovered = na & ~f
    cross = sum(popcount(g.adj_mask[u] & uncovered) for u in iter_bits(h))
    h_bound = Fraction(f_size) + Fraction((b_size - a_size) * psi, g.d - psi)
    return {
        "h_size": popcount(h),
        "h_bound": h_bound,
        "h_ok": Fraction(popcount(h)) <= h_bound,
        "cross_edges": cross,
        "cross_bound": (b_size - f_size) * psi,
        "cross_ok": cross <= (b_size - f_size) * psi,
    }


def polymer_to_json_dict(g: BipartiteGraph, params, p: Polymer) -> dict:
    return {
        "side": p.side,
        "vertices": list(p.vertex_tuple()),
        "closure_size": popcount(p.closure),
        "boundary_size": popcount(p.boundary),
        "weight": format_rational(polymer_weight(g, params, p.vertices)),
    }
