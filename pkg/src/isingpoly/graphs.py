"""Regular bipartite graphs and the vertex-set operations built on them.

Vertices are dense integers 0..n-1. Vertex sets are plain Python ints used
as bitmasks (bit v set means vertex v is in the set); every set-valued
operation accepts either a mask or an iterable of vertices and returns a
mask. Graphs are immutable after construction and safe to share.

The two sides of the bipartition are labelled "E" and "O". For the graph
builders in this module the "E" side is the even-parity side (even popcount
for hypercubes, even coordinate sum for tori and products, the smaller layer
for middle layers), which is the convention the model layer relies on.
"""

from __future__ import annotations

import json
from itertools import combinations
from typing import Iterable, Iterator, Sequence

VertexSet = "int | Iterable[int]"

DEFAULT_VERTEX_CAP = 4096
# Full 2^n subset sweeps are refused above this many vertices.
DEFAULT_SWEEP_CAP = 26
# Exact percolation sums over 2^m edge subsets are refused above this.
DEFAULT_EDGE_SWEEP_CAP = 24
# Streaming enumerations abort after this many emitted sets.
DEFAULT_ENUM_CAP = 1_000_000


class BudgetError(RuntimeError):
    """Raised when a construction or enumeration exceeds its size budget."""


class GraphFormatError(ValueError):
    """Raised when serialized graph data violates a structural invariant."""


def as_mask(x) -> int:
    """Normalize a vertex set (mask or iterable of vertices) to a bitmask."""
    if isinstance(x, int):
        if x < 0:
            raise ValueError("vertex-set mask must be nonnegative")
        return x
    mask = 0
    for v in x:
        mask |= 1 << v
    return mask


def bits(mask: int) -> tuple[int, ...]:
    """Sorted tuple of vertices in a mask."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return mask.bit_count()


class BipartiteGraph:
    """An immutable d-regular bipartite graph on vertices 0..n-1."""

    __slots__ = (
        "n",
        "d",
        "adj",
        "adj_mask",
        "side_E",
        "side_O",
        "side_E_mask",
        "side_O_mask",
        "label",
        "_two_ball",
    )

    def __init__(self, n: int, d: int, side_E: Iterable[int],
                 adjacency: Sequence[Iterable[int]], label: str = ""):
        side_E = tuple(sorted(side_E))
        if n <= 0 or n % 2 != 0:
            raise GraphFormatError(f"vertex count must be positive and even, got {n}")
        if d < 1:
            raise GraphFormatError(f"degree must be >= 1, got {d}")
        if len(adjacency) != n:
            raise GraphFormatError(
                f"adjacency has {len(adjacency)} rows for {n} vertices")
        e_mask = as_mask(side_E)
        if popcount(e_mask) != len(side_E):
            raise GraphFormatError("side E contains a repeated vertex")
        full = (1 << n) - 1
        if e_mask & ~full:
            bad = bits(e_mask & ~full)[0]
            raise GraphFormatError(f"side E vertex {bad} out of range 0..{n - 1}")
        o_mask = full & ~e_mask
        if popcount(e_mask) != n // 2:
            raise GraphFormatError(
                f"sides must be balanced: |E| = {popcount(e_mask)}, n/2 = {n // 2}")
        adj = []
        adj_mask = []
        for v, nbrs in enumerate(adjacency):
            nbrs = tuple(sorted(nbrs))
            m = as_mask(nbrs)
            if popcount(m) != len(nbrs):
                raise GraphFormatError(f"vertex {v} has a duplicate neighbor")
            if len(nbrs) != d:
                raise GraphFormatError(
                    f"vertex {v} has degree {len(nbrs)}, expected {d}")
            if m & ~full:
                raise GraphFormatError(f"vertex {v} has an out-of-range neighbor")
            own_side = e_mask if (e_mask >> v) & 1 else o_mask
            if m & own_side:
                bad = bits(m & own_side)[0]
                raise GraphFormatError(
                    f"edge ({v}, {bad}) joins two vertices on the same side")
            adj.append(nbrs)
            adj_mask.append(m)
        for v in range(n):
            for u in adj[v]:
                if not (adj_mask[u] >> v) & 1:
                    raise GraphFormatError(
                        f"edge ({v}, {u}) is not symmetric: {v} missing from {u}")
        self.n = n
        self.d = d
        self.adj = tuple(adj)
        self.adj_mask = tuple(adj_mask)
        self.side_E = side_E
        self.side_O = bits(o_mask)
        self.side_E_mask = e_mask
        self.side_O_mask = o_mask
        self.label = label
        self._two_ball: list = [None] * n

    # -- basic queries ----------------------------------------------------

    def side_mask(self, side: str) -> int:
        if side == "E":
            return self.side_E_mask
        if side == "O":
            return self.side_O_mask
        raise ValueError(f"side must be 'E' or 'O', got {side!r}")

    def other_side(self, side: str) -> str:
        if side == "E":
            return "O"
        if side == "O":
            return "E"
        raise ValueError(f"side must be 'E' or 'O', got {side!r}")

    def side_of(self, v: int) -> str:
        return "E" if (self.side_E_mask >> v) & 1 else "O"

    def edges(self) -> Iterator[tuple[int, int]]:
        """All edges as (u, v) with u < v, in lexicographic order."""
        for u in range(self.n):
            for v in self.adj[u]:
                if v > u:
                    yield (u, v)

    def edge_count(self) -> int:
        return self.n * self.d // 2

    def two_ball_mask(self, v: int) -> int:
        """Mask of vertices at distance 1 or 2 from v (v itself excluded)."""
        cached = self._two_ball[v]
        if cached is not None:
            return cached
        m = self.adj_mask[v]
        for u in self.adj[v]:
            m |= self.adj_mask[u]
        m &= ~(1 << v)
        self._two_ball[v] = m
        return m

    def __eq__(self, other) -> bool:
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return (self.n == other.n and self.d == other.d
                and self.side_E_mask == other.side_E_mask
                and self.adj == other.adj)

    def __hash__(self):
        return hash((self.n, self.d, self.side_E_mask, self.adj))

    def __repr__(self):
        tag = self.label or "bipartite"
        return f"<BipartiteGraph {tag} n={self.n} d={self.d}>"


# -- builders --------------------------------------------------------------


def _check_vertex_budget(n: int, vertex_cap: int | None) -> None:
    cap = DEFAULT_VERTEX_CAP if vertex_cap is None else vertex_cap
    if n > cap:
        raise BudgetError(f"graph would have {n} vertices, budget is {cap}")


def build_hypercube(d: int, vertex_cap: int | None = None) -> BipartiteGraph:
    """The d-dimensional hypercube: vertices are d-bit strings, edges flip one bit."""
    if d < 1:
        raise ValueError(f"hypercube dimension must be >= 1, got {d}")
    if d > 20:
        raise BudgetError(f"hypercube dimension capped at 20, got {d}")
    n = 1 << d
    _check_vertex_budget(n, vertex_cap)
    adjacency = [sorted(v ^ (1 << k) for k in range(d)) for v in range(n)]
    side_E = [v for v in range(n) if v.bit_count() % 2 == 0]
    return BipartiteGraph(n, d, side_E, adjacency, label=f"hypercube:{d}")


def build_even_torus(m: int, t: int, vertex_cap: int | None = None) -> BipartiteGraph:
    """The torus Z_m^t with m even: +-1 mod m in one coordinate, degree 2t."""
    if m % 2 != 0:
        raise ValueError(f"torus side length must be even for bipartiteness, got {m}")
    if m < 4:
        raise ValueError(f"torus side length must be >= 4, got {m}")
    if t < 1:
        raise ValueError(f"torus dimension must be >= 1, got {t}")
    n = m ** t
    _check_vertex_budget(n, vertex_cap)
    # index = sum of x_i * m^(t-1-i), first coordinate most significant
    weights = [m ** (t - 1 - i) for i in range(t)]
    adjacency = []
    side_E = []
    for v in range(n):
        coords = []
        r = v
        for w in weights:
            coords.append(r // w)
            r %= w
        if sum(coords) % 2 == 0:
            side_E.append(v)
        nbrs = []
        for i, w in enumerate(weights):
            x = coords[i]
            nbrs.append(v + ((x + 1) % m - x) * w)
            nbrs.append(v + ((x - 1) % m - x) * w)
        adjacency.append(sorted(set(nbrs)))
    return BipartiteGraph(n, 2 * t, side_E, adjacency, label=f"torus:{m},{t}")


def build_cycle(m: int, vertex_cap: int | None = None) -> BipartiteGraph:
    """The even cycle C_m (m even, m >= 4)."""
    g = build_even_torus(m, 1, vertex_cap=vertex_cap)
    g.label = f"cycle:{m}"
    return g


def build_complete_bipartite(s: int, vertex_cap: int | None = None) -> BipartiteGraph:
    """K_{s,s}: sides {0..s-1} and {s..2s-1}, every cross pair an edge."""
    if s < 1:
        raise ValueError(f"side size must be >= 1, got {s}")
    _check_vertex_budget(2 * s, vertex_cap)
    top = list(range(s, 2 * s))
    bottom = list(range(s))
    adjacency = [top] * s + [bottom] * s
    return BipartiteGraph(2 * s, s, bottom, adjacency, label=f"kss:{s}")


def build_cartesian_product(factors: Sequence[BipartiteGraph],
                            vertex_cap: int | None = None) -> BipartiteGraph:
    """Cartesian product: vertices are coordinate tuples, one coordinate moves
    along a factor edge per step. Degree is the sum of factor degrees; sides
    split by the parity of the number of odd-side coordinates."""
    if not factors:
        raise ValueError("product needs at least one factor")
    for i, f in enumerate(factors):
        if not _is_connected(f):
            raise ValueError(f"product factor {i} is not connected")
    n = 1
    for f in factors:
        n *= f.n
    _check_vertex_budget(n, vertex_cap)
    sizes = [f.n for f in factors]
    weights = []
    w = 1
    for size in reversed(sizes):
        weights.append(w)
        w *= size
    weights.reverse()  # first coordinate most significant
    d = sum(f.d for f in factors)
    adjacency = []
    side_E = []
    for v in range(n):
        coords = []
        r = v
        for wgt in weights:
            coords.append(r // wgt)
            r %= wgt
        odd_count = sum(1 for f, c in zip(factors, coords)
                        if (f.side_O_mask >> c) & 1)
        if odd_count % 2 == 0:
            side_E.append(v)
        nbrs = []
        for i, f in enumerate(factors):
            base = v - coords[i] * weights[i]
            for u in f.adj[coords[i]]:
                nbrs.append(base + u * weights[i])
        adjacency.append(sorted(nbrs))
    label = "product:" + "+".join(f.label or "?" for f in factors)
    return BipartiteGraph(n, d, side_E, adjacency, label=label)


def build_middle_layer(d: int, vertex_cap: int | None = None) -> BipartiteGraph:
    """The middle two layers of the (2d-1)-dimensional hypercube: subsets of
    a (2d-1)-element ground set with d-1 or d elements, joined by inclusion.
    Side E is the (d-1)-layer. The graph is d-regular on 2*C(2d-1, d-1) vertices."""
    if d < 1:
        raise ValueError(f"middle-layer parameter must be >= 1, got {d}")
    ground = 2 * d - 1
    lower = [m for m in range(1 << ground) if m.bit_count() == d - 1]
    upper = [m for m in range(1 << ground) if m.bit_count() == d]
    lower.sort()
    upper.sort()
    n = len(lower) + len(upper)
    _check_vertex_budget(n, vertex_cap)
    index = {m: i for i, m in enumerate(lower)}
    index.update({m: len(lower) + i for i, m in enumerate(upper)})
    adjacency: list[list[int]] = [[] for _ in range(n)]
    for m in lower:
        i = index[m]
        free = ~m & ((1 << ground) - 1)
        for b in iter_bits(free):
            j = index[m | (1 << b)]
            adjacency[i].append(j)
            adjacency[j].append(i)
    side_E = list(range(len(lower)))
    return BipartiteGraph(n, d, side_E,
                          [sorted(a) for a in adjacency],
                          label=f"midlayer:{d}")


def _is_connected(g: BipartiteGraph) -> bool:
    seen = 1
    frontier = 1
    while frontier:
        nxt = 0
        for v in iter_bits(frontier):
            nxt |= g.adj_mask[v]
        frontier = nxt & ~seen
        seen |= frontier
    return popcount(seen) == g.n


# -- set operations --------------------------------------------------------


def neighborhood(g: BipartiteGraph, x) -> int:
    """External neighborhood N(X): vertices outside X adjacent to some vertex of X."""
    x = as_mask(x)
    m = 0
    for v in iter_bits(x):
        m |= g.adj_mask[v]
    return m & ~x


def closure(g: BipartiteGraph, a, side: str | None = None) -> int:
    """Closure [A] on A's side: all same-side vertices v with N(v) a subset of N(A).

    A must be nonempty and contained in one side; `side` may be given
    explicitly ("E" or "O") or inferred from A's membership.
    """
    a = as_mask(a)
    if a == 0:
        raise ValueError("closure of the empty set is undefined")
    if side is None:
        if a & g.side_E_mask and a & g.side_O_mask:
            raise ValueError("closure argument straddles both sides")
        side = "E" if a & g.side_E_mask else "O"
    side_m = g.side_mask(side)
    if a & ~side_m:
        bad = bits(a & ~side_m)[0]
        raise ValueError(f"vertex {bad} is not on side {side}")
    na = neighborhood(g, a)
    out = 0
    for v in iter_bits(side_m):
        if g.adj_mask[v] & ~na == 0:
            out |= 1 << v
    return out


def is_two_linked(g: BipartiteGraph, a) -> bool:
    """True iff A is connected in the square graph (distance <= 2 adjacency)."""
    a = as_mask(a)
    if a == 0:
        raise ValueError("2-linkedness of the empty set is undefined")
    start = a & -a
    seen = start
    frontier = start
    while frontier:
        nxt = 0
        for v in iter_bits(frontier):
            nxt |= g.two_ball_mask(v)
        frontier = nxt & a & ~seen
        seen |= frontier
    return seen == a


def two_linked_components(g: BipartiteGraph, x) -> list[int]:
    """Maximal 2-linked components of X, as masks, ordered by smallest vertex."""
    x = as_mask(x)
    comps = []
    rest = x
    while rest:
        start = rest & -rest
        seen = start
        frontier = start
        while frontier:
            nxt = 0
            for v in iter_bits(frontier):
                nxt |= g.two_ball_mask(v)
            frontier = nxt & rest & ~seen
            seen |= frontier
        comps.append(seen)
        rest &= ~seen
    return comps


def enumerate_two_linked(g: BipartiteGraph, v: int, ell_max: int,
                         enum_cap: int | None = None) -> Iterator[int]:
    """All 2-linked sets of size <= ell_max containing v, each exactly once.

    Emission order is lexicographic in the sorted vertex tuple. Aborts with
    BudgetError if more than `enum_cap` sets (default 10^6) are produced.
    """
    if ell_max < 1:
        raise ValueError(f"ell_max must be >= 1, got {ell_max}")
    cap = DEFAULT_ENUM_CAP if enum_cap is None else enum_cap
    found: list[int] = []

    def extend(s_mask: int, size: int, excluded: int) -> None:
        found.append(s_mask)
        if len(found) > cap:
            raise BudgetError(
                f"2-linked enumeration exceeded {cap} sets (ell_max={ell_max})")
        if size == ell_max:
            return
        ext = 0
        for u in iter_bits(s_mask):
            ext |= g.two_ball_mask(u)
        ext &= ~s_mask & ~excluded
        banned = excluded
        for u in iter_bits(ext):
            extend(s_mask | (1 << u), size + 1, banned)
            banned |= 1 << u

    extend(1 << v, 1, 0)
    found.sort(key=bits)
    return iter(found)


def codegree(g: BipartiteGraph, u: int, v: int) -> int:
    """Number of common neighbors of two distinct vertices."""
    if u == v:
        raise ValueError("codegree requires two distinct vertices")
    return popcount(g.adj_mask[u] & g.adj_mask[v])


def max_codegree(g: BipartiteGraph) -> int:
    """Maximum codegree over all distinct vertex pairs.

    Cross-side pairs have codegree 0 in a bipartite graph, so only same-side
    pairs are scanned.
    """
    best = 0
    for side in (g.side_E, g.side_O):
        for u, v in combinations(side, 2):
            c = popcount(g.adj_mask[u] & g.adj_mask[v])
            if c > best:
                best = c
    return best


# -- serialization ----------------------------------------------------------


def graph_to_json(g: BipartiteGraph) -> str:
    """Canonical JSON: sorted sides, edges sorted as (u, v) pairs with u < v."""
    payload = {
        "n": g.n,
        "d": g.d,
        "side_O": list(g.side_O),
        "side_E": list(g.side_E),
        "edges": [[u, v] for u, v in g.edges()],
    }
    return json.dumps(payload)


def graph_from_json(text: str) -> BipartiteGraph:
    """Parse and fully validate the JSON graph format.

    Violations are rejected with the offending edge or vertex named.
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON: {exc}") from exc
    for key in ("n", "d", "side_O", "side_E", "edges"):
        if key not in payload:
            raise GraphFormatError(f"missing field {key!r}")
    n = payload["n"]
    d = payload["d"]
    side_O = payload["side_O"]
    side_E = payload["side_E"]
    if not isinstance(n, int) or not isinstance(d, int):
        raise GraphFormatError("n and d must be integers")
    seen = set(side_E)
    for v in side_O:
        if v in seen:
            raise GraphFormatError(f"vertex {v} appears on both sides")
        seen.add(v)
    if seen != set(range(n)):
        missing = sorted(set(range(n)) - seen)
        extra = sorted(seen - set(range(n)))
        what = missing[0] if missing else extra[0]
        raise GraphFormatError(f"sides do not partition 0..{n - 1}: check vertex {what}")
    adjacency: list[list[int]] = [[] for _ in range(n)]
    seen_edges = set()
    for e in payload["edges"]:
        if not (isinstance(e, list) and len(e) == 2):
            raise GraphFormatError(f"malformed edge entry {e!r}")
        u, v = e
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"edge ({u}, {v}) has an out-of-range endpoint")
        key = (min(u, v), max(u, v))
        if key in seen_edges:
            raise GraphFormatError(f"duplicate edge ({u}, {v})")
        seen_edges.add(key)
        adjacency[u].append(v)
        adjacency[v].append(u)
    return BipartiteGraph(n, d, side_E, adjacency)
