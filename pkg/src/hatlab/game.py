"""Hat-guessing games on finite graphs: strategies, verification, search.

An adversary places a color from [q] = {0, ..., q-1} on every vertex of a
graph; the player on each vertex sees only its neighbors' colors and submits
one guess for its own color.  The players win an assignment when at least
one guess is correct, and a strategy *wins* when it wins every assignment
(optionally restricted to an explicit assignment set).

Conventions, fixed across the package:

* Guess tables are dense.  Vertex v with neighbors u_1 < ... < u_k indexes
  its table by sum(c_{u_j} * q**(j-1)) — the smallest neighbor is the least
  significant digit.
* Assignments are tuples (c_0, ..., c_{n-1}) enumerated in lexicographic
  order, so a reported counterexample is the lexicographically least losing
  assignment and reports do not depend on chunking or thread count.
"""

from __future__ import annotations

import itertools
import json
import sys
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InfeasibleError, ParameterError
from .sweep import chunk_ranges, run_chunks

ColorAssignment = tuple[int, ...]

DEFAULT_ASSIGNMENT_BUDGET = 10**9
DEFAULT_SEARCH_BUDGET = 10**6
DEFAULT_STRATEGY_SPACE_BUDGET = 10**8

GRAPH_FAMILIES = ("complete", "complete_bipartite", "book", "windmill", "custom")


# ---------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with a family tag for serialization."""

    family: str
    params: tuple[int, ...]
    n_vertices: int
    adjacency: tuple[tuple[int, ...], ...]  # sorted neighbor tuples

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n_vertices) for v in self.adjacency[u] if u < v]


def _graph_from_edges(family: str, params: tuple[int, ...], n: int,
                      edges: Iterable[tuple[int, int]]) -> Graph:
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ParameterError(f"edge ({u},{v}) out of range for {n} vertices")
        if u == v:
            raise ParameterError(f"loop at vertex {u} not allowed")
        nbrs[u].add(v)
        nbrs[v].add(u)
    return Graph(family, params, n, tuple(tuple(sorted(s)) for s in nbrs))


def build_graph(family: str, *params: int) -> Graph:
    """Construct a graph from a family tag and integer parameters.

    complete:n | complete_bipartite:m,n | book:d,n (K_d spine, n pages each
    adjacent to the whole spine) | windmill:k,n (n copies of K_k glued at
    vertex 0, the axle).
    """
    params = tuple(int(p) for p in params)
    if family == "complete":
        (n,) = _arity(family, params, 1)
        if n < 1:
            raise ParameterError("complete graph needs n >= 1")
        return _graph_from_edges(family, params, n, itertools.combinations(range(n), 2))
    if family == "complete_bipartite":
        m, n = _arity(family, params, 2)
        if m < 1 or n < 1:
            raise ParameterError("complete bipartite graph needs m, n >= 1")
        edges = [(u, m + v) for u in range(m) for v in range(n)]
        return _graph_from_edges(family, params, m + n, edges)
    if family == "book":
        d, n = _arity(family, params, 2)
        if d < 1 or n < 0:
            raise ParameterError("book graph needs d >= 1, n >= 0")
        edges = list(itertools.combinations(range(d), 2))
        edges += [(s, d + p) for p in range(n) for s in range(d)]
        return _graph_from_edges(family, params, d + n, edges)
    if family == "windmill":
        k, n = _arity(family, params, 2)
        if k < 2 or n < 1:
            raise ParameterError("windmill graph needs k >= 2, n >= 1")
        edges = []
        for b in range(n):
            blade = [1 + b * (k - 1) + t for t in range(k - 1)]
            edges += [(0, w) for w in blade]
            edges += list(itertools.combinations(blade, 2))
        return _graph_from_edges(family, params, 1 + n * (k - 1), edges)
    raise ParameterError(f"unknown graph family {family!r}")


def _arity(family: str, params: tuple[int, ...], k: int) -> tuple[int, ...]:
    if len(params) != k:
        raise ParameterError(f"{family} expects {k} parameter(s), got {len(params)}")
    return params


def custom_graph(n: int, edges: Sequence[tuple[int, int]]) -> Graph:
    """Arbitrary graph; params encode (n, u1, v1, u2, v2, ...) for round-trips."""
    edges = sorted({(min(u, v), max(u, v)) for u, v in edges})
    params = (n,) + tuple(itertools.chain.from_iterable(edges))
    return _graph_from_edges("custom", params, n, edges)


def _graph_from_spec(family: str, params: Sequence[int]) -> Graph:
    if family == "custom":
        if not params:
            raise ParameterError("custom graph spec needs at least the vertex count")
        n, rest = params[0], params[1:]
        if len(rest) % 2:
            raise ParameterError("custom graph edge list must have even length")
        return custom_graph(n, list(zip(rest[::2], rest[1::2])))
    return build_graph(family, *params)


# ---------------------------------------------------------------------------
# strategies


@dataclass(eq=False)
class Strategy:
    """Dense per-vertex guess tables for a q-color game."""

    q: int
    tables: tuple[np.ndarray, ...]

    @classmethod
    def from_lists(cls, q: int, tables: Sequence[Sequence[int]]) -> "Strategy":
        dt = np.min_scalar_type(max(q - 1, 1))
        return cls(q, tuple(np.asarray(t, dtype=dt) for t in tables))

    def table_lists(self) -> list[list[int]]:
        return [t.astype(int).tolist() for t in self.tables]


@dataclass(frozen=True)
class VerificationReport:
    wins: bool
    counterexample: ColorAssignment | None
    assignments_checked: int


@dataclass(frozen=True)
class SolvableSet:
    """Assignment set of a complete graph on which some strategy always wins."""

    n: int
    q: int
    members: frozenset[ColorAssignment]

    def __len__(self) -> int:
        return len(self.members)


def _check_strategy_shape(g: Graph, q: int, s: Strategy) -> None:
    if q < 1:
        raise ParameterError("q must be >= 1")
    if s.q != q:
        raise ParameterError(f"strategy was built for q={s.q}, game uses q={q}")
    if len(s.tables) != g.n_vertices:
        raise ParameterError(
            f"strategy has {len(s.tables)} tables for a {g.n_vertices}-vertex graph")
    for v in range(g.n_vertices):
        want = q ** g.degree(v)
        if len(s.tables[v]) != want:
            raise ParameterError(
                f"vertex {v}: table has {len(s.tables[v])} entries, expected {want}")
        if len(s.tables[v]) and int(s.tables[v].max()) >= q:
            raise ParameterError(f"vertex {v}: guess out of color range [{q}]")


def _any_correct(g: Graph, s: Strategy, cols: list[np.ndarray]) -> np.ndarray:
    """Boolean array: does some vertex guess its own color, per assignment."""
    q = s.q
    m = len(cols[0])
    correct = np.zeros(m, dtype=bool)
    for v in range(g.n_vertices):
        idx = np.zeros(m, dtype=np.int64)
        mul = 1
        for u in g.adjacency[v]:
            idx += cols[u] * mul
            mul *= q
        correct |= s.tables[v][idx] == cols[v]
    return correct


def _correct_counts(g: Graph, s: Strategy, cols: list[np.ndarray]) -> np.ndarray:
    q = s.q
    m = len(cols[0])
    counts = np.zeros(m, dtype=np.int64)
    for v in range(g.n_vertices):
        idx = np.zeros(m, dtype=np.int64)
        mul = 1
        for u in g.adjacency[v]:
            idx += cols[u] * mul
            mul *= q
        counts += s.tables[v][idx] == cols[v]
    return counts


def _space_columns(q: int, n: int, lo: int, hi: int) -> list[np.ndarray]:
    """Color columns for assignment indices [lo, hi) in lexicographic order."""
    idx = np.arange(lo, hi, dtype=np.int64)
    return [(idx // q ** (n - 1 - v)) % q for v in range(n)]


def _restriction_matrix(g: Graph, q: int, restriction: Iterable[ColorAssignment]) -> np.ndarray:
    members = sorted(restriction)
    n = g.n_vertices
    for a in members:
        if len(a) != n:
            raise ParameterError(f"assignment {a} has length {len(a)}, expected {n}")
        if any(not (0 <= c < q) for c in a):
            raise ParameterError(f"assignment {a} uses colors outside [{q}]")
    return np.array(members, dtype=np.int64).reshape(len(members), n)


def verify_strategy(
    g: Graph,
    q: int,
    s: Strategy,
    restriction: Iterable[ColorAssignment] | None = None,
    *,
    budget: int = DEFAULT_ASSIGNMENT_BUDGET,
    threads: int | None = None,
) -> VerificationReport:
    """Check a strategy against every adversary assignment.

    Full q**n sweeps beyond `budget` raise InfeasibleError.  On a loss the
    counterexample is the lexicographically least losing assignment and
    assignments_checked is its 1-based position in the scan; on a win it is
    the size of the space (or restriction).
    """
    _check_strategy_shape(g, q, s)
    n = g.n_vertices

    if restriction is not None:
        mat = _restriction_matrix(g, q, restriction)
        if len(mat) == 0:
            return VerificationReport(True, None, 0)
        correct = _any_correct(g, s, [mat[:, v] for v in range(n)])
        losing = np.flatnonzero(~correct)
        if len(losing) == 0:
            return VerificationReport(True, None, len(mat))
        first = int(losing[0])
        return VerificationReport(False, tuple(int(c) for c in mat[first]), first + 1)

    total = q**n
    if total > budget:
        raise InfeasibleError(
            f"{total} assignments exceed budget {budget}", required=total)

    def work(rng: tuple[int, int]) -> int | None:
        lo, hi = rng
        cols = _space_columns(q, n, lo, hi)
        bad = np.flatnonzero(~_any_correct(g, s, cols))
        return lo + int(bad[0]) if len(bad) else None

    for res in run_chunks(work, chunk_ranges(total), threads):
        if res is not None:
            cex = _decode_assignment(res, q, n)
            return VerificationReport(False, cex, res + 1)
    return VerificationReport(True, None, total)


def _decode_assignment(index: int, q: int, n: int) -> ColorAssignment:
    out = []
    for v in range(n):
        out.append(index // q ** (n - 1 - v) % q)
    return tuple(out)


def correct_guess_counts(
    g: Graph,
    q: int,
    s: Strategy,
    restriction: Iterable[ColorAssignment] | None = None,
    *,
    budget: int = 10**7,
) -> np.ndarray:
    """Number of correct guessers per assignment (lexicographic order)."""
    _check_strategy_shape(g, q, s)
    n = g.n_vertices
    if restriction is not None:
        mat = _restriction_matrix(g, q, restriction)
        return _correct_counts(g, s, [mat[:, v] for v in range(n)])
    total = q**n
    if total > budget:
        raise InfeasibleError(f"{total} assignments exceed budget {budget}", required=total)
    return _correct_counts(g, s, _space_columns(q, n, 0, total))


def strategy_guesses(g: Graph, q: int, s: Strategy, assignment: ColorAssignment) -> tuple[int, ...]:
    """Every vertex's guess on one assignment (scalar path, for spot checks)."""
    _check_strategy_shape(g, q, s)
    if len(assignment) != g.n_vertices:
        raise ParameterError("assignment length does not match vertex count")
    out = []
    for v in range(g.n_vertices):
        idx = 0
        mul = 1
        for u in g.adjacency[v]:
            idx += assignment[u] * mul
            mul *= q
        out.append(int(s.tables[v][idx]))
    return tuple(out)


# ---------------------------------------------------------------------------
# sum strategies on complete graphs


def sum_target_strategy(m: int, q: int, targets: Sequence[int]) -> Strategy:
    """On K_m with q colors, vertex i guesses so the total is targets[i] mod q."""
    if m < 1:
        raise ParameterError("need at least one player")
    if len(targets) != m:
        raise ParameterError(f"need {m} targets, got {len(targets)}")
    if any(not (0 <= t < q) for t in targets):
        raise ParameterError("targets must be residues in [q]")
    size = q ** (m - 1)
    idx = np.arange(size, dtype=np.int64)
    digit_sum = np.zeros(size, dtype=np.int64)
    for j in range(m - 1):
        digit_sum += (idx // q**j) % q
    dt = np.min_scalar_type(max(q - 1, 1))
    tables = tuple(((t - digit_sum) % q).astype(dt) for t in targets)
    return Strategy(q, tables)


def complete_sum_strategy(n: int, q: int) -> Strategy:
    """The K_n strategy where player i forces total sum ≡ i (mod n); needs q = n."""
    if q != n:
        raise ParameterError(f"sum strategy needs q = n (got n={n}, q={q})")
    return sum_target_strategy(n, q, list(range(n)))


def solvable_interval_set(n: int, q: int) -> tuple[SolvableSet, Strategy]:
    """Largest-possible solvable set on K_n with q >= n colors: sums in [n]."""
    if not 1 <= n <= q:
        raise ParameterError(f"need 1 <= n <= q (got n={n}, q={q})")
    members = frozenset(
        x for x in itertools.product(range(q), repeat=n) if sum(x) % q < n)
    return SolvableSet(n, q, members), sum_target_strategy(n, q, list(range(n)))


def max_solvable_set_search(
    n: int, q: int, *, budget: int = DEFAULT_STRATEGY_SPACE_BUDGET
) -> int:
    """Exact maximum number of assignments any strategy tuple wins on K_n.

    Brute force over all (q**(q**(n-1)))**n strategy tuples; only practical
    for tiny n, q — anything larger raises InfeasibleError.
    """
    if n < 1 or q < 1:
        raise ParameterError("need n >= 1 and q >= 1")
    table_size = q ** (n - 1)
    space = (q**table_size) ** n
    if space > budget:
        raise InfeasibleError(
            f"{space} strategy tuples exceed budget {budget}", required=space)

    assignments = list(itertools.product(range(q), repeat=n))
    # per assignment and player: (table index, own color)
    keyed = []
    for a in assignments:
        row = []
        for i in range(n):
            idx = 0
            mul = 1
            for u in range(n):
                if u != i:
                    idx += a[u] * mul
                    mul *= q
            row.append((idx, a[i]))
        keyed.append(row)

    best = 0
    all_tables = list(itertools.product(range(q), repeat=table_size))
    for combo in itertools.product(all_tables, repeat=n):
        won = 0
        for row in keyed:
            if any(combo[i][idx] == own for i, (idx, own) in enumerate(row)):
                won += 1
        if won > best:
            best = won
            if best == len(assignments):
                break
    return best


# ---------------------------------------------------------------------------
# exhaustive strategy search


@dataclass(frozen=True)
class SearchOutcome:
    strategy: Strategy | None
    proven_unwinnable: bool
    nodes_explored: int


def search_strategy(g: Graph, q: int, budget: int = DEFAULT_SEARCH_BUDGET) -> SearchOutcome:
    """Backtracking search for a winning strategy.

    Assignments are scanned in lexicographic order; each uncovered assignment
    branches on which vertex is designated to guess it correctly, which pins
    one table cell.  The search is complete: exhausting it proves no winning
    strategy exists.  `budget` bounds explored branch nodes; running out is
    reported as neither found nor proven (strategy=None, proven_unwinnable
    False).
    """
    n = g.n_vertices
    if q < 1:
        raise ParameterError("q must be >= 1")
    total = q**n
    partial: list[list[int]] = [[-1] * (q ** g.degree(v)) for v in range(n)]
    nodes = 0
    tripped = False

    limit = min(total, budget) + 2000
    if sys.getrecursionlimit() < limit:
        sys.setrecursionlimit(limit)

    def advance(a: int) -> bool:
        nonlocal nodes, tripped
        while a < total:
            assn = _decode_assignment(a, q, n)
            open_cells = []
            covered = False
            for v in range(n):
                idx = 0
                mul = 1
                for u in g.adjacency[v]:
                    idx += assn[u] * mul
                    mul *= q
                val = partial[v][idx]
                if val == assn[v]:
                    covered = True
                    break
                if val == -1:
                    open_cells.append((v, idx))
            if covered:
                a += 1
                continue
            for v, idx in open_cells:
                nodes += 1
                if nodes > budget:
                    tripped = True
                    return False
                partial[v][idx] = assn[v]
                if advance(a + 1):
                    return True
                partial[v][idx] = -1
                if tripped:
                    return False
            return False
        return True

    if advance(0):
        tables = [[x if x >= 0 else 0 for x in t] for t in partial]
        strat = Strategy.from_lists(q, tables)
        report = verify_strategy(g, q, strat, budget=max(total, DEFAULT_ASSIGNMENT_BUDGET))
        if not report.wins:  # pragma: no cover - guards the search itself
            raise AssertionError("search produced a losing strategy; this is a bug")
        return SearchOutcome(strat, False, nodes)
    return SearchOutcome(None, not tripped, nodes)


# ---------------------------------------------------------------------------
# lifting along subgraph embeddings


def subgraph_lift(h: Graph, s: Strategy, embedding: Mapping[int, int], g: Graph, q: int) -> Strategy:
    """Lift a winning strategy along an injective, adjacency-preserving map.

    Embedded vertices ignore neighbors outside the image; everyone else
    guesses 0.  The lift wins on g whenever s wins on h, because the image
    players see exactly what they saw on h.
    """
    _check_strategy_shape(h, q, s)
    emb = {int(v): int(embedding[v]) for v in range(h.n_vertices)}
    if len(set(emb.values())) != len(emb):
        raise ParameterError("embedding is not injective")
    for gv in emb.values():
        if not 0 <= gv < g.n_vertices:
            raise ParameterError(f"embedded vertex {gv} outside host graph")
    for u in range(h.n_vertices):
        for v in h.adjacency[u]:
            if emb[v] not in g.adjacency[emb[u]]:
                raise ParameterError(
                    f"embedding does not preserve edge ({u},{v})")

    dt = np.min_scalar_type(max(q - 1, 1))
    tables: list[np.ndarray] = [None] * g.n_vertices  # type: ignore[list-item]
    image = {gv: hv for hv, gv in emb.items()}
    for gv in range(g.n_vertices):
        gn = g.adjacency[gv]
        if gv not in image:
            tables[gv] = np.zeros(q ** len(gn), dtype=dt)
            continue
        hv = image[gv]
        pos_in_gn = {u: t for t, u in enumerate(gn)}
        idx = np.arange(q ** len(gn), dtype=np.int64)
        h_idx = np.zeros(len(idx), dtype=np.int64)
        for r, hu in enumerate(h.adjacency[hv]):
            p = pos_in_gn[emb[hu]]
            h_idx += ((idx // q**p) % q) * q**r
        tables[gv] = s.tables[hv][h_idx].astype(dt)
    return Strategy(q, tuple(tables))


# ---------------------------------------------------------------------------
# vertex-cover upper bound


def minimum_vertex_cover_size(g: Graph) -> int:
    """Exact minimum vertex cover, branch-and-bound on an uncovered edge."""
    if g.n_vertices > 20:
        raise InfeasibleError("exact vertex cover supported for n <= 20 only")
    edges = g.edges

    best = g.n_vertices

    def branch(edges: list[tuple[int, int]], depth: int) -> None:
        nonlocal best
        if depth >= best:
            return
        if not edges:
            best = depth
            return
        u, v = edges[0]
        branch([e for e in edges if u not in e], depth + 1)
        branch([e for e in edges if v not in e], depth + 1)

    branch(edges, 0)
    return best


def vertex_cover_bound(g: Graph) -> int:
    """Upper bound 1 + sum_{i=1}^{tau} i^i on the winning color count."""
    tau = minimum_vertex_cover_size(g)
    return 1 + sum(i**i for i in range(1, tau + 1))


# ---------------------------------------------------------------------------
# file formats


def write_strategy_file(path: str, g: Graph, s: Strategy) -> None:
    payload = {
        "graph": {"family": g.family, "params": list(g.params)},
        "q": s.q,
        "tables": s.table_lists(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def read_strategy_file(path: str) -> tuple[Graph, int, Strategy]:
    with open(path) as fh:
        payload = json.load(fh)
    try:
        family = payload["graph"]["family"]
        params = [int(p) for p in payload["graph"]["params"]]
        q = int(payload["q"])
        tables = payload["tables"]
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"malformed strategy file {path}: {exc}") from exc
    g = _graph_from_spec(family, params)
    s = Strategy.from_lists(q, tables)
    _check_strategy_shape(g, q, s)
    return g, q, s


def write_assignment_set(path: str, q: int, n: int, members: Iterable[ColorAssignment]) -> None:
    payload = {"q": q, "n": n, "members": [list(a) for a in sorted(members)]}
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def read_assignment_set(path: str) -> tuple[int, int, tuple[ColorAssignment, ...]]:
    with open(path) as fh:
        payload = json.load(fh)
    try:
        q, n = int(payload["q"]), int(payload["n"])
        members = tuple(tuple(int(c) for c in a) for a in payload["members"])
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"malformed assignment-set file {path}: {exc}") from exc
    for a in members:
        if len(a) != n or any(not 0 <= c < q for c in a):
            raise ParameterError(f"assignment {a} does not fit q={q}, n={n}")
    return q, n, members
