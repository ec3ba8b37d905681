"""Windmill strategies assembled from per-blade solvable sets.

A windmill is n copies of K_k glued at an axle vertex.  The assembly recipe:
give every color i a *product* P_i = complement(S_{i,1}) x ... x
complement(S_{i,n}) over the blades' color tuples, where each S_{i,j} is a
solvable set of K_{k-1} with a known winning strategy.  If the products are
pairwise disjoint, the axle guesses the index of the product class the
observed blade colors fall into (leftovers go to class 0), and each blade
runs the strategy of S_{axle color, blade}.  Whatever the axle's true color
i is, either some blade's colors landed in S_{i,j} (that blade wins) or the
whole tuple is in P_i (the axle wins).

Two certificate families are built here: a parity certificate with q = 2k-2
colors (products indexed by binary digits, factors are the halves of a
parity set) and a residue certificate with q = d^n colors (factors from
sum-avoiding sets over translates of a difference-disjoint family).
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CertificateError, InfeasibleError, ParameterError
from .game import SolvableSet, Strategy, sum_target_strategy

MAX_MEMBER_ENUMERATION = 10**7


# ---------------------------------------------------------------------------
# parity sets


@dataclass(frozen=True)
class ParitySet:
    """Half of [2k-2]^(k-1): tuples whose count of upper-range digits is odd."""

    k: int
    q: int
    members: frozenset[tuple[int, ...]]

    def __len__(self) -> int:
        return len(self.members)


def _parity_guard(k: int) -> int:
    if k < 2:
        raise ParameterError("need k >= 2")
    q = 2 * k - 2
    if q ** (k - 1) > MAX_MEMBER_ENUMERATION:
        raise InfeasibleError(f"{q ** (k - 1)} tuples exceed enumeration support")
    return q


def parity_set(k: int) -> ParitySet:
    """Union of the subcubes C_v over odd-weight v: digit i lies in
    [(k-1)v_i, (k-1)(v_i+1)).  Exactly half of all tuples."""
    q = _parity_guard(k)
    members = frozenset(
        x for x in itertools.product(range(q), repeat=k - 1)
        if sum(c >= k - 1 for c in x) % 2 == 1)
    return ParitySet(k, q, members)


def parity_set_strategy(k: int, side: str) -> tuple[SolvableSet, Strategy]:
    """Winning strategy on K_{k-1} restricted to one parity side.

    side="odd" plays on the parity set itself, side="even" on its
    complement.  Each player recovers the subcube index v from the observed
    digits plus the side's parity, then runs the (k-1)-color sum strategy on
    the within-subcube offsets.
    """
    if side not in ("odd", "even"):
        raise ParameterError(f"side must be 'odd' or 'even', got {side!r}")
    q = _parity_guard(k)
    want = 1 if side == "odd" else 0
    ps = parity_set(k)
    members = ps.members if side == "odd" else frozenset(
        x for x in itertools.product(range(q), repeat=k - 1)) - ps.members

    m = k - 1
    size = q ** (m - 1)
    idx = np.arange(size, dtype=np.int64)
    vsum = np.zeros(size, dtype=np.int64)
    ysum = np.zeros(size, dtype=np.int64)
    for j in range(m - 1):
        digit = (idx // q**j) % q
        vsum += digit // (k - 1)
        ysum += digit % (k - 1)
    dt = np.min_scalar_type(q - 1)
    tables = []
    for i in range(m):
        v_i = (want - vsum) % 2
        y_i = (i - ysum) % (k - 1)
        tables.append((y_i + (k - 1) * v_i).astype(dt))
    return SolvableSet(m, q, members), Strategy(q, tuple(tables))


# ---------------------------------------------------------------------------
# difference-disjoint residue families


@dataclass(frozen=True)
class ResidueSet:
    modulus: int
    members: frozenset[int]

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ParameterError("modulus must be >= 1")
        if any(not 0 <= r < self.modulus for r in self.members):
            raise ParameterError("residues must lie in [modulus]")

    def translate(self, c: int) -> "ResidueSet":
        return ResidueSet(self.modulus,
                          frozenset((r + c) % self.modulus for r in self.members))

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class DifferenceDisjointFamily:
    modulus: int
    sets: tuple[ResidueSet, ...]


def difference_disjoint_family(d: int, n: int) -> DifferenceDisjointFamily:
    """A_i = multiples pattern {x in Z/d^n : base-d digit i-1 of x is 0}.

    Each set has d^(n-1) elements and the translate intersections are
    singletons: the digits pinned by each set are independent.
    """
    if d < 2 or n < 1:
        raise ParameterError("need d >= 2 and n >= 1")
    m = d**n
    if m > 1 << 20:
        raise InfeasibleError(f"modulus {m} exceeds the 2^20 cap")
    sets = []
    for i in range(n):
        members = frozenset(x for x in range(m) if x // d**i % d == 0)
        sets.append(ResidueSet(m, members))
    return DifferenceDisjointFamily(m, tuple(sets))


def _difference_indicator(members: Sequence[int], m: int) -> np.ndarray:
    """Boolean indicator over [m] of the difference set {a - b mod m}."""
    a = np.fromiter(members, dtype=np.int64, count=len(members))
    if len(a) == 0:
        return np.zeros(m, dtype=bool)
    if len(a) * len(a) <= 1 << 24:
        diffs = (a[:, None] - a[None, :]).ravel() % m
        return np.bincount(diffs, minlength=m) > 0
    # large sets: circular autocorrelation of the indicator; counts are
    # integers <= |A|, far above float64 noise, so rounding is exact
    ind = np.zeros(m, dtype=np.float64)
    ind[a] = 1.0
    freq = np.fft.rfft(ind)
    corr = np.fft.irfft(freq * np.conj(freq), m)
    return corr > 0.5


def is_difference_disjoint(sets: Sequence[ResidueSet], m: int) -> bool:
    """True iff no nonzero residue lies in every set's difference set."""
    if not sets:
        raise ParameterError("need at least one residue set")
    acc = np.ones(m, dtype=bool)
    for rs in sets:
        if rs.modulus != m:
            raise ParameterError(f"set has modulus {rs.modulus}, expected {m}")
        acc &= _difference_indicator(sorted(rs.members), m)
        if not acc[1:].any():
            return True
    return not acc[1:].any()


def translate_intersection_max(
    sets: Sequence[ResidueSet], m: int, trials: int, seed: int = 0
) -> int:
    """Max |(A_1+c_1) ∩ ... ∩ (A_n+c_n)| over seeded random translate tuples.

    Cross-validates difference-disjointness (which is equivalent to every
    translate intersection having at most one element).  Residue sets are
    handled as m-bit integers; rotation = translation.
    """
    if not sets:
        raise ParameterError("need at least one residue set")
    full = (1 << m) - 1
    bases = []
    for rs in sets:
        if rs.modulus != m:
            raise ParameterError(f"set has modulus {rs.modulus}, expected {m}")
        bases.append(sum(1 << r for r in rs.members))
    cache: dict[tuple[int, int], int] = {}

    def rot(i: int, c: int) -> int:
        key = (i, c)
        got = cache.get(key)
        if got is None:
            b = bases[i]
            got = ((b << c) | (b >> (m - c))) & full if c else b
            cache[key] = got
        return got

    rng = random.Random(seed)
    worst = 0
    for _ in range(trials):
        x = rot(0, rng.randrange(m))
        for i in range(1, len(bases)):
            x &= rot(i, rng.randrange(m))
            if not x:
                break
        worst = max(worst, x.bit_count())
    return worst


# ---------------------------------------------------------------------------
# sum-avoiding solvable sets


def sum_avoid_set(a: ResidueSet, k: int, q: int) -> tuple[SolvableSet, Strategy]:
    """Tuples of [q]^(k-1) whose total avoids A, with its sum-target strategy.

    Needs q - |A| = k - 1: the k-1 players split the allowed residues among
    themselves (ascending), so whichever residue the true total hits, its
    owner guesses correctly.
    """
    if k < 2:
        raise ParameterError("need k >= 2")
    if a.modulus != q:
        raise ParameterError(f"residue set has modulus {a.modulus}, expected q={q}")
    targets = sorted(set(range(q)) - a.members)
    if len(targets) != k - 1:
        raise ParameterError(
            f"need q - |A| = k - 1 (q={q}, |A|={len(a)}, k={k})")
    if q ** (k - 1) > MAX_MEMBER_ENUMERATION:
        raise InfeasibleError(f"{q ** (k - 1)} tuples exceed enumeration support")
    members = frozenset(
        x for x in itertools.product(range(q), repeat=k - 1)
        if sum(x) % q not in a.members)
    return SolvableSet(k - 1, q, members), sum_target_strategy(k - 1, q, targets)


# ---------------------------------------------------------------------------
# product certificates


@dataclass(frozen=True)
class BladePiece:
    solvable: SolvableSet
    strategy: Strategy


@dataclass(frozen=True)
class ProductCertificate:
    """Blueprint for a windmill strategy: per color, one solvable set with
    strategy per blade; the color's product is the complements' box."""

    k: int
    n: int
    q: int
    products: tuple[tuple[BladePiece, ...], ...]


def validate_certificate(cert: ProductCertificate) -> None:
    if cert.k < 2 or cert.n < 1 or cert.q < 1:
        raise CertificateError("need k >= 2, n >= 1, q >= 1")
    if len(cert.products) != cert.q:
        raise CertificateError(
            f"certificate has {len(cert.products)} products, expected q={cert.q}")
    m = cert.k - 1
    for i, product in enumerate(cert.products):
        if len(product) != cert.n:
            raise CertificateError(f"product {i} has {len(product)} blades, expected {cert.n}")
        for j, piece in enumerate(product):
            s = piece.solvable
            if s.n != m or s.q != cert.q:
                raise CertificateError(
                    f"product {i} blade {j}: solvable set shaped ({s.n},{s.q}), "
                    f"expected ({m},{cert.q})")
            if piece.strategy.q != cert.q or len(piece.strategy.tables) != m:
                raise CertificateError(f"product {i} blade {j}: strategy shape mismatch")
            for t in range(m):
                if len(piece.strategy.tables[t]) != cert.q ** (m - 1):
                    raise CertificateError(
                        f"product {i} blade {j}: table {t} has wrong size")


def product_certificate_parity(k: int, n: int) -> ProductCertificate:
    """q = 2k-2 certificate: product x uses the parity side named by the
    x-th binary pattern on blade i (digit i-1, least significant first).

    Needs 2^n >= q so distinct colors get distinct digit patterns."""
    q = _parity_guard(k)
    if n < 1:
        raise ParameterError("need n >= 1")
    if 2**n < q:
        raise ParameterError(
            f"need 2^n >= 2k-2 so products are disjoint (k={k} needs n >= {(q - 1).bit_length()})")
    odd = parity_set_strategy(k, "odd")
    even = parity_set_strategy(k, "even")
    products = []
    for x in range(q):
        blades = []
        for i in range(n):
            bit = x >> i & 1
            # factor C_bit is the complement of the stored solvable set
            side = even if bit else odd
            blades.append(BladePiece(*side))
        products.append(tuple(blades))
    return ProductCertificate(k, n, q, tuple(products))


def product_certificate_residue(d: int, n: int) -> ProductCertificate:
    """q = d^n certificate with k = d^n - d^(n-1) + 1: product j's blade-i
    factor is the set of tuples whose total lands in A_i + j."""
    family = difference_disjoint_family(d, n)
    q = family.modulus
    k = q - d ** (n - 1) + 1
    products = []
    for j in range(q):
        blades = []
        for i in range(n):
            solvable, strat = sum_avoid_set(family.sets[i].translate(j), k, q)
            blades.append(BladePiece(solvable, strat))
        products.append(tuple(blades))
    return ProductCertificate(k, n, q, tuple(products))


def certificate_disjointness_check(cert: ProductCertificate) -> bool:
    """Products are boxes, so two are disjoint iff some blade's factors are;
    a factor pair is disjoint iff the two solvable sets union to everything."""
    validate_certificate(cert)
    grid_size = cert.q ** (cert.k - 1)
    for p1, p2 in itertools.combinations(cert.products, 2):
        if not any(
            len(p1[j].solvable.members | p2[j].solvable.members) == grid_size
            for j in range(cert.n)
        ):
            return False
    return True


def certificate_blade_check(cert: ProductCertificate) -> bool:
    """Every piece's strategy must win restricted to its solvable set."""
    from .game import build_graph, verify_strategy

    validate_certificate(cert)
    g = build_graph("complete", cert.k - 1)
    for product in cert.products:
        for piece in product:
            report = verify_strategy(g, cert.q, piece.strategy,
                                     restriction=piece.solvable.members)
            if not report.wins:
                return False
    return True


# ---------------------------------------------------------------------------
# assembly and evaluation


def _blade_vertices(k: int, n: int, j: int) -> list[int]:
    return [1 + j * (k - 1) + t for t in range(k - 1)]


def _membership_masks(cert: ProductCertificate) -> list[np.ndarray]:
    """Per blade: uint64 array over blade-color cells, bit i set when the
    cell belongs to S_{i,blade}."""
    if cert.q > 53:
        raise InfeasibleError("membership bitmasks support q <= 53")
    m = cert.k - 1
    q = cert.q
    out = []
    for j in range(cert.n):
        arr = np.zeros(q**m, dtype=np.uint64)
        for i in range(q):
            bit = np.uint64(1 << i)
            for x in cert.products[i][j].solvable.members:
                cell = sum(c * q**t for t, c in enumerate(x))
                arr[cell] |= bit
        out.append(arr)
    return out


def _blade_flat_tables(cert: ProductCertificate) -> list[list[np.ndarray]]:
    """flat[j][t][a0 + q * mate_idx]: blade j vertex t's guess when the axle
    shows a0 — the class dispatch baked into one table."""
    q = cert.q
    out = []
    for j in range(cert.n):
        per_vertex = []
        for t in range(cert.k - 1):
            stacked = np.stack(
                [cert.products[a0][j].strategy.tables[t] for a0 in range(q)], axis=1)
            per_vertex.append(np.ascontiguousarray(stacked).reshape(-1))
        out.append(per_vertex)
    return out


def _classes_from_masks(notin: np.ndarray) -> np.ndarray:
    """notin holds 0 or a single power of two per sample; map to class index
    (log2), with uncovered tuples going to class 0."""
    cls = np.zeros(len(notin), dtype=np.int64)
    nz = notin != 0
    cls[nz] = np.log2(notin[nz].astype(np.float64)).astype(np.int64)
    return cls


def assemble_windmill_strategy(
    cert: ProductCertificate, *, max_axle_table: int = 10**8
) -> Strategy:
    """Materialize the full windmill strategy as dense guess tables.

    The axle's table has q^((k-1)n) entries — anything past max_axle_table
    raises InfeasibleError (use certificate_random_loss_check to sample such
    strategies instead).
    """
    validate_certificate(cert)
    if not certificate_disjointness_check(cert):
        raise CertificateError("products are not pairwise disjoint")
    k, n, q = cert.k, cert.n, cert.q
    m = k - 1
    axle_size = q ** (m * n)
    if axle_size > max_axle_table:
        raise InfeasibleError(
            f"axle table needs {axle_size} entries (> {max_axle_table})",
            required=axle_size)

    memb = _membership_masks(cert)
    dt = np.min_scalar_type(q - 1)
    axle = np.empty(axle_size, dtype=dt)
    full_bits = np.uint64((1 << q) - 1)
    chunk = 1 << 20
    for lo in range(0, axle_size, chunk):
        hi = min(lo + chunk, axle_size)
        idx = np.arange(lo, hi, dtype=np.int64)
        notin = np.full(hi - lo, full_bits, dtype=np.uint64)
        for j in range(n):
            sub = (idx // q ** (m * j)) % q**m
            notin &= ~memb[j][sub]
        axle[lo:hi] = _classes_from_masks(notin).astype(dt)

    tables: list[np.ndarray] = [axle]
    flat = _blade_flat_tables(cert)
    for j in range(n):
        for t in range(m):
            tables.append(flat[j][t].astype(dt))
    return Strategy(q, tuple(tables))


def windmill_guesses(cert: ProductCertificate, assignment: Sequence[int]) -> tuple[int, ...]:
    """Evaluate the certificate's strategy on one assignment without tables."""
    validate_certificate(cert)
    k, n, q = cert.k, cert.n, cert.q
    if len(assignment) != 1 + (k - 1) * n:
        raise ParameterError("assignment length does not match the windmill")
    a0 = assignment[0]
    blades = [tuple(assignment[v] for v in _blade_vertices(k, n, j)) for j in range(n)]
    cls = 0
    for i in range(q):
        if all(blades[j] not in cert.products[i][j].solvable.members for j in range(n)):
            cls = i
            break
    guesses = [cls]
    for j in range(n):
        strat = cert.products[a0][j].strategy
        for t in range(k - 1):
            idx = 0
            mul = 1
            for s in range(k - 1):
                if s != t:
                    idx += blades[j][s] * mul
                    mul *= q
            guesses.append(int(strat.tables[t][idx]))
    return tuple(guesses)


def certificate_random_loss_check(
    cert: ProductCertificate, trials: int, seed: int = 0
) -> int:
    """Count losing assignments among seeded uniform samples (expect 0).

    Samples the full assignment space of the windmill and evaluates the
    certificate's strategy vectorized, without materializing the axle table.
    """
    validate_certificate(cert)
    if not certificate_disjointness_check(cert):
        raise CertificateError("products are not pairwise disjoint")
    k, n, q = cert.k, cert.n, cert.q
    m = k - 1
    n_vertices = 1 + m * n
    rng = np.random.default_rng(seed)
    memb = _membership_masks(cert)
    flat = _blade_flat_tables(cert)

    losses = 0
    chunk = 1 << 18
    remaining = trials
    while remaining > 0:
        t_now = min(chunk, remaining)
        remaining -= t_now
        colors = rng.integers(0, q, size=(t_now, n_vertices), dtype=np.int64)
        notin = np.full(t_now, np.uint64((1 << q) - 1), dtype=np.uint64)
        cells = []
        for j in range(n):
            cell = np.zeros(t_now, dtype=np.int64)
            for t, v in enumerate(_blade_vertices(k, n, j)):
                cell += colors[:, v] * q**t
            cells.append(cell)
            notin &= ~memb[j][cell]
        correct = _classes_from_masks(notin) == colors[:, 0]
        for j in range(n):
            verts = _blade_vertices(k, n, j)
            for t, v in enumerate(verts):
                mate_idx = np.zeros(t_now, dtype=np.int64)
                mul = 1
                for s, u in enumerate(verts):
                    if s != t:
                        mate_idx += colors[:, u] * mul
                        mul *= q
                guess = flat[j][t][colors[:, 0] + q * mate_idx]
                correct |= guess == colors[:, v]
        losses += int(t_now - np.count_nonzero(correct))
    return losses


# ---------------------------------------------------------------------------
# counting inequalities behind the upper bounds


def parity_counting_check(k: int) -> bool:
    """Solvable sets are outnumbered: (k-1) q^(k-2) < q^(k-1) / 2 for every
    q in [2k-1, 4k], in exact integers."""
    if k < 2:
        raise ParameterError("need k >= 2")
    return all(2 * (k - 1) * q ** (k - 2) < q ** (k - 1)
               for q in range(2 * k - 1, 4 * k + 1))


def residue_counting_check(d: int, n: int) -> bool:
    """Key inequality (d^(n-1)+1)^n > (d^n+1)^(n-1) plus the full chain
    (q+1) * ((q-k+2) (q+1)^(k-2))^n > (q+1)^((k-1)n) with q = d^n and
    k = d^n - d^(n-1) + 1; q - k + 2 = d^(n-1) + 1 is the exact complement
    count of a maximal solvable set over q+1 colors."""
    if d < 2 or n < 1:
        raise ParameterError("need d >= 2 and n >= 1")
    q = d**n
    k = q - d ** (n - 1) + 1
    key = (d ** (n - 1) + 1) ** n > (q + 1) ** (n - 1)
    chain = (q + 1) * ((q - k + 2) * (q + 1) ** (k - 2)) ** n > (q + 1) ** ((k - 1) * n)
    return key and chain


def counting_inequality_check(mode: str, **params: int) -> bool:
    if mode == "parity":
        return parity_counting_check(params["k"])
    if mode == "residue":
        return residue_counting_check(params["d"], params["n"])
    raise ParameterError(f"unknown counting mode {mode!r}")


# ---------------------------------------------------------------------------
# file format


def write_certificate_file(path: str, cert: ProductCertificate) -> None:
    validate_certificate(cert)
    payload = {
        "k": cert.k,
        "n": cert.n,
        "q": cert.q,
        "products": [
            [
                {
                    "set": [list(x) for x in sorted(piece.solvable.members)],
                    "strategy": piece.strategy.table_lists(),
                }
                for piece in product
            ]
            for product in cert.products
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def read_certificate_file(path: str) -> ProductCertificate:
    with open(path) as fh:
        payload = json.load(fh)
    try:
        k, n, q = int(payload["k"]), int(payload["n"]), int(payload["q"])
        products = []
        for product in payload["products"]:
            blades = []
            for piece in product:
                members = frozenset(tuple(int(c) for c in x) for x in piece["set"])
                blades.append(BladePiece(
                    SolvableSet(k - 1, q, members),
                    Strategy.from_lists(q, piece["strategy"])))
            products.append(tuple(blades))
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"malformed certificate file {path}: {exc}") from exc
    cert = ProductCertificate(k, n, q, tuple(products))
    validate_certificate(cert)
    return cert
