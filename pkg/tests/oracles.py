"""Independent brute-force oracles used to pin expected values in the tests.

Everything here is written straight from definitions, deliberately ignoring
the optimized implementations in the package: neighborhoods by scanning all
vertices, 2-linkedness by union-find over pairwise distances, partition
functions by full subset sweeps. Slow and obviously correct.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations

from isingpoly.graphs import BipartiteGraph, bits


def brute_neighborhood(g: BipartiteGraph, xs) -> tuple[int, ...]:
    xs = set(xs)
    out = set()
    for v in range(g.n):
        if v in xs:
            continue
        if any(u in xs for u in g.adj[v]):
            out.add(v)
    return tuple(sorted(out))


def brute_closure(g: BipartiteGraph, a, side_vertices) -> tuple[int, ...]:
    na = set(brute_neighborhood(g, a))
    return tuple(sorted(v for v in side_vertices if set(g.adj[v]) <= na))


def brute_is_two_linked(g: BipartiteGraph, a) -> bool:
    a = sorted(set(a))
    if not a:
        raise ValueError("empty set")
    parent = {v: v for v in a}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for u, v in combinations(a, 2):
        du = set(g.adj[u])
        if v in du or du & set(g.adj[v]):
            parent[find(u)] = find(v)
    return len({find(v) for v in a}) == 1


def brute_two_linked_sets(g: BipartiteGraph, v: int, ell_max: int) -> list[tuple[int, ...]]:
    """Every 2-linked set of size <= ell_max containing v, by filtering all
    combinations of vertices. Exponential; keep ell_max tiny."""
    out = []
    rest = [u for u in range(g.n) if u != v]
    for ell in range(1, ell_max + 1):
        for extra in combinations(rest, ell - 1):
            s = (v,) + extra
            if brute_is_two_linked(g, s):
                out.append(tuple(sorted(s)))
    return sorted(out)


def graphs_isomorphic(g1: BipartiteGraph, g2: BipartiteGraph) -> bool:
    """Brute-force isomorphism for graphs with at most 8 vertices."""
    if g1.n != g2.n or g1.d != g2.d:
        return False
    if g1.n > 8:
        raise ValueError("brute-force isomorphism capped at 8 vertices")
    e1 = {frozenset(e) for e in g1.edges()}
    for perm in permutations(range(g2.n)):
        mapped = {frozenset((perm[u], perm[v])) for u, v in g2.edges()}
        if mapped == e1:
            return True
    return False


def brute_ising_Z(g: BipartiteGraph, lam: Fraction, p: Fraction) -> Fraction:
    """Sum over all vertex subsets of lam^|I| * (1-p)^{edges inside I}.

    With p = 1 - e^{-beta} this is the antiferromagnetic Ising partition
    function; at p = 1 only independent sets survive.
    """
    lam = Fraction(lam)
    q = 1 - Fraction(p)
    total = Fraction(0)
    for mask in range(1 << g.n):
        inside = 0
        for u, v in g.edges():
            if (mask >> u) & 1 and (mask >> v) & 1:
                inside += 1
        term = lam ** mask.bit_count()
        if inside:
            if q == 0:
                continue
            term *= q ** inside
        total += term
    return total


def brute_independent_set_count(g: BipartiteGraph) -> int:
    count = 0
    for mask in range(1 << g.n):
        ok = True
        for u, v in g.edges():
            if (mask >> u) & 1 and (mask >> v) & 1:
                ok = False
                break
        if ok:
            count += 1
    return count


def masks_to_tuples(masks) -> list[tuple[int, ...]]:
    return [bits(m) for m in masks]


def brute_two_linked_components(g: BipartiteGraph, xs) -> list[tuple[int, ...]]:
    xs = sorted(set(xs))
    if not xs:
        return []
    parent = {v: v for v in xs}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for u, v in combinations(xs, 2):
        du = set(g.adj[u])
        if v in du or du & set(g.adj[v]):
            parent[find(u)] = find(v)
    groups: dict[int, list[int]] = {}
    for v in xs:
        groups.setdefault(find(v), []).append(v)
    return sorted(tuple(sorted(grp)) for grp in groups.values())


def brute_captured(g: BipartiteGraph, i_verts, side_vertices, rho: Fraction) -> bool:
    """Capture test from the definitions: every maximal 2-linked component of
    the side trace must have closure at most rho * |side|."""
    trace = [v for v in i_verts if v in set(side_vertices)]
    for comp in brute_two_linked_components(g, trace):
        cl = brute_closure(g, comp, side_vertices)
        if Fraction(len(cl)) > rho * len(side_vertices):
            return False
    return True


def brute_ursell(k: int, edges) -> Fraction:
    """Ursell function via the connected-part recursion: with T(S) = 1 iff S
    spans no edge, the signed connected sum W(S) containing a root vertex
    satisfies T(S) = sum over root-containing S' of W(S') T(S - S'). Solve
    for W bottom-up; the Ursell function is W(full) / k!."""
    import math

    edge_masks = set()
    for u, v in edges:
        edge_masks.add((1 << u) | (1 << v))

    def edge_free(s: int) -> bool:
        return not any(em & s == em for em in edge_masks)

    full = (1 << k) - 1
    w: dict[int, int] = {}

    def subsets_containing(s: int, root_bit: int):
        rest = s & ~root_bit
        sub = rest
        while True:
            yield sub | root_bit
            if sub == 0:
                break
            sub = (sub - 1) & rest

    def solve(s: int) -> int:
        if s in w:
            return w[s]
        root_bit = s & -s
        val = 1 if edge_free(s) else 0
        for part in subsets_containing(s, root_bit):
            if part == s:
                continue
            if edge_free(s & ~part):
                val -= solve(part)
        w[s] = val
        return val

    return Fraction(solve(full), math.factorial(k))
