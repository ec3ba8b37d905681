"""Exact combinatorics of combinatorial cubes in the 4x4x4 grid.

Cells of [4]^3 are numbered x + 4y + 16z and cell sets are 64-bit masks, so
every sweep below is a few integer ops per configuration.  A *cube* here is
a 3x3x3 combinatorial cube: the product of the three 3-element sets avoiding
one forbidden value per axis; its complement is the radius-2 Hamming ball
around the forbidden point.  The *two-intersection* of a family is the set
of cells lying in at least two members (by index, so duplicates count).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InfeasibleError, ParameterError, PartitionConditionError
from .game import Strategy

FULL_MASK = (1 << 64) - 1

Cell = tuple[int, int, int]


def cell_index(x: int, y: int, z: int) -> int:
    if not (0 <= x < 4 and 0 <= y < 4 and 0 <= z < 4):
        raise ParameterError(f"cell ({x},{y},{z}) outside [4]^3")
    return x + 4 * y + 16 * z


def cell_coords(i: int) -> Cell:
    if not 0 <= i < 64:
        raise ParameterError(f"cell index {i} outside 0..63")
    return (i % 4, i // 4 % 4, i // 16)


def grid_cube_masks(q: int, m: int) -> list[int]:
    """Mask of the (q-1)^m cube avoiding each center, for cells of [q]^m.

    Cell (x_1..x_m) has linear index sum(x_t * q**t); entry a of the result
    is the set {x : x_t != a_t for all t}.
    """
    cells = q**m
    if cells > 1 << 14:
        raise InfeasibleError(f"grid with {cells} cells is beyond mask support")
    avoid = [[0] * q for _ in range(m)]
    for c in range(cells):
        for t in range(m):
            xt = c // q**t % q
            for v in range(q):
                if xt != v:
                    avoid[t][v] |= 1 << c
    out = []
    for a in range(cells):
        mask = (1 << cells) - 1
        for t in range(m):
            mask &= avoid[t][a // q**t % q]
        out.append(mask)
    return out


CUBE_MASKS: tuple[int, ...] = tuple(grid_cube_masks(4, 3))
_CUBE_SET = frozenset(CUBE_MASKS)
_CUBE_MINUS_POINT_SET = frozenset(
    c & ~(1 << b) for c in CUBE_MASKS for b in range(64) if c >> b & 1)


def cube_mask(p: Cell) -> int:
    """The 3x3x3 cube avoiding p's coordinates on every axis (27 cells)."""
    return CUBE_MASKS[cell_index(*p)]


def hamming_ball(p: Cell) -> int:
    """Cells within Hamming distance 2 of p: the cube's 37-cell complement."""
    return FULL_MASK & ~cube_mask(p)


def two_intersection(masks: Sequence[int]) -> int:
    """Cells contained in at least two masks of the family (by index)."""
    once = 0
    twice = 0
    for m in masks:
        if not 0 <= m <= FULL_MASK:
            raise ParameterError("masks must be 64-bit cell sets")
        twice |= once & m
        once |= m
    return twice


# closed forms for cube families, used as independent oracles in tests


def cube_pair_overlap(p1: Cell, p2: Cell) -> int:
    """|C(p1) ∩ C(p2)| = 3^(3-d) * 2^d with d the Hamming distance."""
    d = sum(a != b for a, b in zip(p1, p2))
    return 3 ** (3 - d) * 2**d


def cube_triple_overlap(p1: Cell, p2: Cell, p3: Cell) -> int:
    """|C(p1) ∩ C(p2) ∩ C(p3)| = prod_t (4 - x_t), x_t distinct values on axis t."""
    prod = 1
    for t in range(3):
        prod *= 4 - len({p1[t], p2[t], p3[t]})
    return prod


def cube_triple_two_intersection_size(p1: Cell, p2: Cell, p3: Cell) -> int:
    pairs = (cube_pair_overlap(p1, p2) + cube_pair_overlap(p1, p3)
             + cube_pair_overlap(p2, p3))
    return pairs - 2 * cube_triple_overlap(p1, p2, p3)


# ---------------------------------------------------------------------------
# sweeps


def three_cubes_min_two_intersection() -> int:
    """Minimum |two-intersection| over all ordered cube triples (expect 20)."""
    best = 64
    for c1 in CUBE_MASKS:
        for c2 in CUBE_MASKS:
            once = c1 | c2
            twice = c1 & c2
            for c3 in CUBE_MASKS:
                n = (twice | (once & c3)).bit_count()
                if n < best:
                    best = n
    return best


@dataclass(frozen=True)
class FourCubeSweepReport:
    quadruples: int
    above_29: int
    exact_cube: int
    cube_minus_point: int
    violations: tuple[tuple[Cell, Cell, Cell, Cell], ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def four_cubes_two_intersection_sweep() -> FourCubeSweepReport:
    """Sweep all 64^4 cube quadruples: any two-intersection of size <= 29
    must be a full cube or a cube minus one cell."""
    cubes = np.array(CUBE_MASKS, dtype=np.uint64)
    cube_sorted = np.array(sorted(_CUBE_SET), dtype=np.uint64)
    cmp_sorted = np.array(sorted(_CUBE_MINUS_POINT_SET), dtype=np.uint64)

    above = 0
    exact_cube = 0
    minus_point = 0
    violations: list[tuple[Cell, Cell, Cell, Cell]] = []
    for i in range(64):
        ci = CUBE_MASKS[i]
        for j in range(64):
            once2 = np.uint64(ci | CUBE_MASKS[j])
            twice2 = np.uint64(ci & CUBE_MASKS[j])
            once3 = once2 | cubes
            twice3 = twice2 | (once2 & cubes)
            t4 = twice3[:, None] | (once3[:, None] & cubes[None, :])
            pc = np.bitwise_count(t4)
            small = pc <= 29
            above += int(t4.size - np.count_nonzero(small))
            if not small.any():
                continue
            vals = t4[small]
            is_cube = np.isin(vals, cube_sorted)
            is_cmp = np.isin(vals, cmp_sorted)
            exact_cube += int(np.count_nonzero(is_cube))
            minus_point += int(np.count_nonzero(is_cmp))
            bad = ~(is_cube | is_cmp)
            if bad.any():
                for (k, l), is_bad in zip(np.argwhere(small), bad):
                    if is_bad:
                        violations.append((cell_coords(i), cell_coords(j),
                                           cell_coords(int(k)), cell_coords(int(l))))
    return FourCubeSweepReport(64**4, above, exact_cube, minus_point, tuple(violations))


def is_cube_or_cube_minus_point(mask: int) -> bool:
    return mask in _CUBE_SET or mask in _CUBE_MINUS_POINT_SET


# the 4x4 square analogue, cells numbered x + 4y


SQUARE_MASKS: tuple[int, ...] = tuple(grid_cube_masks(4, 2))


def square_two_intersection_minima() -> tuple[int, int, int]:
    """(pair, triple, distinct-quadruple) minima of |two-intersection| for
    3x3 squares in [4]^2; expect (4, 8, 12)."""
    sq = SQUARE_MASKS
    pair_min = min((a & b).bit_count() for a in sq for b in sq)
    triple_min = 16
    for a in sq:
        for b in sq:
            once, twice = a | b, a & b
            for c in sq:
                triple_min = min(triple_min, (twice | (once & c)).bit_count())
    quad_min = 16
    for a, b, c, d in itertools.permutations(sq, 4):
        quad_min = min(quad_min, two_intersection((a, b, c, d)).bit_count())
    return pair_min, triple_min, quad_min


# ---------------------------------------------------------------------------
# prisms


def prism_mask(xs: Iterable[int], ys: Iterable[int], zs: Iterable[int]) -> int:
    """Product-set mask: all cells with x in xs, y in ys, z in zs."""
    mask = 0
    for x in xs:
        for y in ys:
            for z in zs:
                mask |= 1 << cell_index(x, y, z)
    return mask


def all_prisms_233() -> tuple[int, ...]:
    """Every 2x3x3 combinatorial prism: one 2-subset axis, two 3-subset axes.

    3 orientations x C(4,2) x 4 x 4 = 288 prisms.
    """
    twos = list(itertools.combinations(range(4), 2))
    threes = [tuple(v for v in range(4) if v != skip) for skip in range(4)]
    prisms = []
    for orient in range(3):
        sides: list[list[tuple[int, ...]]] = [list(threes), list(threes), list(threes)]
        sides[orient] = list(twos)
        for a in sides[0]:
            for b in sides[1]:
                for c in sides[2]:
                    prisms.append(prism_mask(a, b, c))
    return tuple(prisms)


def prism_cover_impossible() -> bool:
    """No three cubes plus one 2x3x3 prism cover [4]^3 (checks every
    64^3 x 288 combination via the complement masks)."""
    cubes = np.array(CUBE_MASKS, dtype=np.uint64)
    comp_prisms = np.array([FULL_MASK & ~p for p in all_prisms_233()], dtype=np.uint64)
    full = np.uint64(FULL_MASK)
    for c1 in CUBE_MASKS:
        for c2 in CUBE_MASKS:
            u2 = np.uint64(c1 | c2)
            rem3 = ~(u2 | cubes) & full                      # (64,) leftover cells
            hits = (rem3[:, None] & comp_prisms[None, :]) == 0
            if hits.any():
                return False
    return True


# ---------------------------------------------------------------------------
# partitions of [4]^3 and bipartite strategies


@dataclass(frozen=True)
class PartitionTuple:
    """Ordered partition of [4]^3 into four 64-bit parts (one per color)."""

    parts: tuple[int, int, int, int]

    def __post_init__(self) -> None:
        if len(self.parts) != 4:
            raise ParameterError("partition tuple needs exactly 4 parts")
        union = 0
        count = 0
        for p in self.parts:
            if not 0 <= p <= FULL_MASK:
                raise ParameterError("parts must be 64-bit cell sets")
            union |= p
            count += p.bit_count()
        if union != FULL_MASK or count != 64:
            raise ParameterError("parts must partition all 64 cells")


def check_partition_condition(p: PartitionTuple, q: PartitionTuple, r: PartitionTuple) -> bool:
    """Does every union P_i | Q_j | R_k contain a full 3x3x3 cube?"""
    for pi in p.parts:
        for qj in q.parts:
            u2 = pi | qj
            for rk in r.parts:
                hole = FULL_MASK & ~(u2 | rk)
                if not any(c & hole == 0 for c in CUBE_MASKS):
                    return False
    return True


def strategy_from_bipartite_partitions(
    m: int, q: int, partitions: Sequence[Sequence[int]]
) -> Strategy:
    """Build a K_{m,m} strategy from m q-part partitions of the left color grid.

    Right vertex m+j guesses the class of the observed left coloring under
    partitions[j].  For that to be beatable, every choice of one part per
    partition must union to a superset of some (q-1)^m product cube; the
    complement then sits inside the Hamming ball of the cube's center, so
    left vertex t guesses coordinate t of that center.  If every right
    vertex is wrong, the left coloring avoids all chosen parts, lands in the
    ball, and shares a coordinate with the center — some left vertex wins.

    Cell indexing of the left grid: coloring (c_0..c_{m-1}) is cell
    sum(c_t * q**t), matching the guess-table convention.
    """
    if m < 1 or q < 2:
        raise ParameterError("need m >= 1 and q >= 2")
    if len(partitions) != m:
        raise ParameterError(f"need {m} partitions, got {len(partitions)}")
    cells = q**m
    full = (1 << cells) - 1
    for j, parts in enumerate(partitions):
        if len(parts) != q:
            raise ParameterError(f"partition {j} has {len(parts)} parts, expected {q}")
        union = 0
        count = 0
        for p in parts:
            if not 0 <= p <= full:
                raise ParameterError(f"partition {j} has an out-of-grid part")
            union |= p
            count += p.bit_count()
        if union != full or count != cells:
            raise ParameterError(f"partition {j} does not partition the {cells}-cell grid")

    cubes = grid_cube_masks(q, m)

    # one ball center per choice of parts, or a named failure
    centers = []
    for code in range(q**m):
        union = 0
        for j in range(m):
            union |= partitions[j][code // q**j % q]
        hole = full & ~union
        for a in range(cells):
            if cubes[a] & hole == 0:
                centers.append(a)
                break
        else:
            combo = tuple(code // q**j % q for j in range(m))
            raise PartitionConditionError(
                f"parts {combo} union to no product cube", combo)

    dt = np.min_scalar_type(q - 1)
    tables: list[np.ndarray] = []
    for t in range(m):  # left vertices guess the center's t-th coordinate
        tbl = np.array([centers[code] // q**t % q for code in range(q**m)], dtype=dt)
        tables.append(tbl)
    for j in range(m):  # right vertices guess their partition's class
        tbl = np.zeros(cells, dtype=dt)
        for i, p in enumerate(partitions[j]):
            for b in range(cells):
                if p >> b & 1:
                    tbl[b] = i
        tables.append(tbl)
    return Strategy(q, tuple(tables))


def k22_valid_pair_matrix() -> tuple[np.ndarray, np.ndarray]:
    """Internal precomputation for the K_{2,2} search: per-code part masks
    and, for every possible part mask, the Q codes it is compatible with."""
    codes = np.arange(3**9, dtype=np.int64)
    part_masks = np.zeros((3, 3**9), dtype=np.int64)
    for t in range(9):
        digit = (codes // 3 ** (8 - t)) % 3
        for i in range(3):
            part_masks[i] += (digit == i) << t

    squares = grid_cube_masks(3, 2)
    covers = np.zeros(512, dtype=bool)
    for mask in range(512):
        covers[mask] = any(sq & ~mask & 511 == 0 for sq in squares)

    compatible = np.empty((512, 3**9), dtype=bool)
    for pm in range(512):
        acc = covers[pm | part_masks[0]]
        acc = acc & covers[pm | part_masks[1]]
        acc = acc & covers[pm | part_masks[2]]
        compatible[pm] = acc
    return part_masks, compatible


def k22_certificate_search() -> tuple[tuple[int, int, int], tuple[int, int, int]]:
    """Exhaust 3^9 x 3^9 pairs of 3-part partitions of the 3x3 grid.

    Accepts a pair when every P_i | Q_j contains a 2x2 combinatorial square;
    returns the lexicographically first valid pair (codes compare as the
    tuple of per-cell class digits, cell 0 most significant).  The result
    feeds strategy_from_bipartite_partitions(2, 3, ...).
    """
    part_masks, compatible = k22_valid_pair_matrix()
    for code in range(3**9):
        p = tuple(int(part_masks[i][code]) for i in range(3))
        if not (p[0] and p[1] and p[2]):
            continue  # an empty part would need two disjoint squares in 9 cells
        valid = compatible[p[0]] & compatible[p[1]] & compatible[p[2]]
        hits = np.flatnonzero(valid)
        if len(hits):
            qc = int(hits[0])
            return p, tuple(int(part_masks[i][qc]) for i in range(3))
    raise ParameterError("no valid partition pair exists")  # pragma: no cover


def k22_valid_pair_count() -> int:
    """Full tally of valid (P, Q) partition pairs (slow path of the search)."""
    part_masks, compatible = k22_valid_pair_matrix()
    total = 0
    for code in range(3**9):
        p0, p1, p2 = (int(part_masks[i][code]) for i in range(3))
        valid = compatible[p0] & compatible[p1] & compatible[p2]
        total += int(np.count_nonzero(valid))
    return total


# ---------------------------------------------------------------------------
# serialization: 16 hex digits, nibble t holding cells 4t..4t+3


def mask_to_hex(mask: int) -> str:
    if not 0 <= mask <= FULL_MASK:
        raise ParameterError("mask out of 64-bit range")
    return "".join(format(mask >> 4 * t & 0xF, "x") for t in range(16))


def hex_to_mask(s: str) -> int:
    if len(s) != 16:
        raise ParameterError(f"cell-set hex string must have 16 digits, got {len(s)}")
    try:
        return sum(int(c, 16) << 4 * t for t, c in enumerate(s))
    except ValueError as exc:
        raise ParameterError(f"bad hex digit in {s!r}") from exc


def write_partition_file(path: str, p: PartitionTuple) -> None:
    with open(path, "w") as fh:
        json.dump({"parts": [mask_to_hex(x) for x in p.parts]}, fh)
        fh.write("\n")


def read_partition_file(path: str) -> PartitionTuple:
    with open(path) as fh:
        payload = json.load(fh)
    try:
        parts = tuple(hex_to_mask(h) for h in payload["parts"])
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"malformed partition file {path}: {exc}") from exc
    return PartitionTuple(parts)  # type: ignore[arg-type]
