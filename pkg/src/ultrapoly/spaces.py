"""Finite ultrametric spaces with value-group distances.

Distances are stored as ``GammaValue`` exponents, never floats, so the
strong triangle inequality and every downstream invariant reduce to
integer comparisons.  Raw dissimilarity data enters through the
subdominant closure (maximal ultrametric below the input) followed by
value-group rounding; zero-distance points are merged by the quotient.

The Baire coding assigns each point a digit string whose first
difference position recovers the distance exactly, and the sparse-vector
embedding turns those strings into an exact isometry.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .padic import GAMMA_ZERO, GammaValue, PAdic, RationalLike, check_prime, round_to_gamma


class MatrixShapeError(ValueError):
    """Input matrix is not square or does not match the labels."""


class AsymmetricMatrixError(ValueError):
    """dist[i][j] != dist[j][i] somewhere."""


class NegativeDistanceError(ValueError):
    """A distance entry is negative."""


class NonzeroDiagonalError(ValueError):
    """dist[i][i] != 0 somewhere."""


class NotUltrametricError(ValueError):
    """The strong triangle inequality fails; carries one violating triple."""

    def __init__(self, triple: tuple[int, int, int], labels: Sequence[str]):
        self.triple = triple
        i, j, k = triple
        super().__init__(
            f"ultrametric inequality fails on ({labels[i]}, {labels[j]}, {labels[k]}): "
            f"d({labels[i]},{labels[k]}) > max(d({labels[i]},{labels[j]}), d({labels[j]},{labels[k]}))"
        )


class UnseparatedSpaceError(ValueError):
    """Distinct points at distance zero where separation is required."""


def _as_fraction_matrix(matrix: Sequence[Sequence[RationalLike]]) -> list[list[Fraction]]:
    n = len(matrix)
    rows = [[Fraction(entry) for entry in row] for row in matrix]
    if any(len(row) != n for row in rows):
        raise MatrixShapeError("distance matrix must be square")
    for i in range(n):
        if rows[i][i] != 0:
            raise NonzeroDiagonalError(f"diagonal entry at index {i} is {rows[i][i]}")
        for j in range(i + 1, n):
            if rows[i][j] < 0:
                raise NegativeDistanceError(f"entry ({i},{j}) is negative")
            if rows[i][j] != rows[j][i]:
                raise AsymmetricMatrixError(f"entries ({i},{j}) and ({j},{i}) differ")
    return rows


def validate_ultrametric(
    labels: Sequence[str], matrix: Sequence[Sequence[RationalLike]]
) -> list[tuple[int, int, int]]:
    """All triples (i, j, k) with d(i,k) > max(d(i,j), d(j,k)).

    An empty list means the matrix is an ultrametric.  Malformed input
    (non-square, asymmetric, negative entries, nonzero diagonal) raises
    the matching error instead of being reported as a violation.
    """
    if len(labels) != len(matrix):
        raise MatrixShapeError("labels and matrix size differ")
    rows = _as_fraction_matrix(matrix)
    n = len(rows)
    out = []
    for i in range(n):
        for k in range(i + 1, n):
            for j in range(n):
                if j == i or j == k:
                    continue
                if rows[i][k] > max(rows[i][j], rows[j][k]):
                    out.append((i, j, k))
    return out


def subdominant_closure(
    matrix: Sequence[Sequence[RationalLike]],
) -> list[list[Fraction]]:
    """Maximal ultrametric pointwise below the input (minimax path distance).

    Idempotent, and the identity exactly when the input is already an
    ultrametric.
    """
    rows = _as_fraction_matrix(matrix)
    n = len(rows)
    d = [row[:] for row in rows]
    for mid in range(n):
        for i in range(n):
            dim = d[i][mid]
            row_mid = d[mid]
            row_i = d[i]
            for j in range(n):
                cand = dim if dim > row_mid[j] else row_mid[j]
                if cand < row_i[j]:
                    row_i[j] = cand
    return d


@dataclass(frozen=True)
class UltraSpace:
    """A finite labeled point set with exponent-encoded ultrametric distances.

    The diagonal holds INFINITY entries (metric value 0).  Off-diagonal
    INFINITY entries are permitted until ``quotient_zero`` enforces
    separation.  Immutable; safe to share between threads.
    """

    labels: tuple[str, ...]
    prime: int
    dist: tuple[tuple[GammaValue, ...], ...]

    def __post_init__(self) -> None:
        check_prime(self.prime)
        n = len(self.labels)
        if n == 0:
            raise ValueError("a space needs at least one point")
        if len(set(self.labels)) != n:
            raise ValueError("labels must be unique")
        if len(self.dist) != n or any(len(row) != n for row in self.dist):
            raise MatrixShapeError("distance matrix must be square over the labels")
        for i in range(n):
            if not self.dist[i][i].is_zero:
                raise NonzeroDiagonalError(f"diagonal entry at index {i} is nonzero")
            for j in range(i + 1, n):
                if self.dist[i][j] != self.dist[j][i]:
                    raise AsymmetricMatrixError(f"entries ({i},{j}) and ({j},{i}) differ")
        self._check_strong_triangle()

    def _check_strong_triangle(self) -> None:
        # d is ultrametric iff every closed-ball relation {d <= p^-j} is
        # transitive: checking the union-find closure of each threshold
        # graph against the raw relation costs n^2 per distinct value
        # instead of the naive n^3 triple scan.  One threshold above the
        # largest exponent covers the zero-distance relation, where two
        # zero legs force the third distance to vanish.
        n = self.n_points
        expo = [
            [self.dist[i][j].exponent for j in range(n)] for i in range(n)
        ]
        values = {e for row in expo for e in row if e is not None}
        has_zero_pair = any(
            expo[i][j] is None for i in range(n) for j in range(i + 1, n)
        )
        if values and has_zero_pair:
            values.add(max(values) + 1)
        for j in sorted(values):
            parent = list(range(n))

            def find(a: int) -> int:
                while parent[a] != a:
                    parent[a] = parent[parent[a]]
                    a = parent[a]
                return a

            for a in range(n):
                for b in range(a + 1, n):
                    e = expo[a][b]
                    if e is None or e >= j:
                        ra, rb = find(a), find(b)
                        if ra != rb:
                            parent[rb] = ra
            for a in range(n):
                for b in range(a + 1, n):
                    e = expo[a][b]
                    if e is not None and e < j and find(a) == find(b):
                        raise NotUltrametricError(
                            self._find_violating_triple(), self.labels
                        )

    def _find_violating_triple(self) -> tuple[int, int, int]:
        # slow path, only runs to name a witness once failure is certain
        n = self.n_points
        for i in range(n):
            for k in range(i + 1, n):
                dik = self.dist[i][k]
                for j in range(n):
                    if j == i or j == k:
                        continue
                    if dik > max(self.dist[i][j], self.dist[j][k]):
                        return (i, j, k)
        raise AssertionError("no violating triple despite failed closure check")

    @property
    def n_points(self) -> int:
        return len(self.labels)

    def distance(self, i: int, j: int) -> GammaValue:
        return self.dist[i][j]

    @property
    def is_separated(self) -> bool:
        n = self.n_points
        return all(
            not self.dist[i][j].is_zero for i in range(n) for j in range(i + 1, n)
        )

    def finite_exponents(self) -> list[int]:
        n = self.n_points
        return sorted(
            {
                self.dist[i][j].exponent
                for i in range(n)
                for j in range(i + 1, n)
                if self.dist[i][j].exponent is not None
            }
        )

    def set_distance(self, block_a: Iterable[int], block_b: Iterable[int]) -> GammaValue:
        """min over member pairs; exact for balls, the convention otherwise."""
        block_b = tuple(block_b)
        best: GammaValue | None = None
        for a in block_a:
            for b in block_b:
                d = self.dist[a][b]
                if best is None or d < best:
                    best = d
        if best is None:
            raise ValueError("set distance of an empty block")
        return best

    def diameter(self, block: Iterable[int]) -> GammaValue:
        block = tuple(block)
        best = GAMMA_ZERO
        for x in range(len(block)):
            for y in range(x + 1, len(block)):
                d = self.dist[block[x]][block[y]]
                if d > best:
                    best = d
        return best

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "prime": self.prime,
            "gamma_matrix": [[d.to_json() for d in row] for row in self.dist],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "UltraSpace":
        return cls(
            labels=tuple(obj["labels"]),
            prime=obj["prime"],
            dist=tuple(
                tuple(GammaValue.from_json(e) for e in row)
                for row in obj["gamma_matrix"]
            ),
        )


def round_space(
    labels: Sequence[str], matrix: Sequence[Sequence[RationalLike]], p: int
) -> UltraSpace:
    """Round a rational ultrametric into the value group, entrywise.

    Every entry lands on the largest p^(-e) below it, which keeps the
    strong triangle inequality (the rounding map is monotone) and the
    sandwich rounded <= original <= p * rounded.
    """
    violations = validate_ultrametric(labels, matrix)
    if violations:
        raise NotUltrametricError(violations[0], labels)
    rows = _as_fraction_matrix(matrix)
    dist = tuple(
        tuple(round_to_gamma(entry, p) for entry in row) for row in rows
    )
    return UltraSpace(labels=tuple(labels), prime=p, dist=dist)


def space_from_points(
    points: Sequence[PAdic], labels: Sequence[str] | None = None
) -> UltraSpace:
    """Distance matrix |x_i - x_j|_p over a family of p-adic values."""
    if not points:
        raise ValueError("need at least one point")
    p = points[0].prime
    if any(pt.prime != p for pt in points):
        raise ValueError("all points must share one prime")
    if labels is None:
        labels = [f"x{i}" for i in range(len(points))]
    n = len(points)
    dist = [[GAMMA_ZERO for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = (points[i] - points[j]).norm()
            dist[i][j] = d
            dist[j][i] = d
    return UltraSpace(
        labels=tuple(labels), prime=p, dist=tuple(tuple(row) for row in dist)
    )


def quotient_zero(space: UltraSpace) -> tuple[UltraSpace, dict[str, str]]:
    """Merge zero-distance points; the report maps dropped labels to keepers.

    The result satisfies the separation invariant: off-diagonal entries
    are never INFINITY.
    """
    classes = threshold_classes(space, None)
    reps = [cls[0] for cls in classes]
    report = {
        space.labels[member]: space.labels[cls[0]]
        for cls in classes
        for member in cls[1:]
    }
    dist = tuple(
        tuple(space.dist[a][b] for b in reps) for a in reps
    )
    merged = UltraSpace(
        labels=tuple(space.labels[r] for r in reps), prime=space.prime, dist=dist
    )
    return merged, report


def threshold_classes(space: UltraSpace, j: int | None) -> list[tuple[int, ...]]:
    """Equivalence classes of {d <= p^-j}; j=None means {d = 0}.

    The threshold relation is transitive by the strong triangle
    inequality, so comparing against one representative per class is
    enough.  Classes are sorted by smallest member index.
    """
    n = space.n_points
    classes: list[list[int]] = []
    for i in range(n):
        for cls in classes:
            d = space.dist[cls[0]][i]
            if d.is_zero or (j is not None and d.exponent is not None and d.exponent >= j):
                cls.append(i)
                break
        else:
            classes.append([i])
    return [tuple(cls) for cls in classes]


@dataclass(frozen=True)
class BaireCodes:
    """Digit strings over integer positions start..depth, one per point.

    Position i holds the index of the point's class under {d < p^-i};
    two points at distance p^-k then agree strictly before position k
    and differ at position k.  Class indices per position are assigned
    in order of the lexicographically smallest member label.
    """

    prime: int
    start: int
    depth: int
    labels: tuple[str, ...]
    codes: tuple[tuple[int, ...], ...]

    @property
    def positions(self) -> range:
        return range(self.start, self.depth + 1)

    def first_difference(self, i: int, j: int) -> int | None:
        for offset, pos in enumerate(self.positions):
            if self.codes[i][offset] != self.codes[j][offset]:
                return pos
        return None


def baire_encode(space: UltraSpace) -> BaireCodes:
    """Nested-partition digit coding of a separated space.

    Raises:
        UnseparatedSpaceError: if two distinct points sit at distance 0.
    """
    if not space.is_separated:
        raise UnseparatedSpaceError("baire coding requires a separated space")
    exponents = space.finite_exponents()
    if exponents:
        start = min(1, exponents[0])
        depth = exponents[-1] + 1
    else:
        start, depth = 1, 1
    codes = [[] for _ in space.labels]
    for pos in range(start, depth + 1):
        # class under {d < p^-pos} == {exponent >= pos+1}
        classes = threshold_classes(space, pos + 1)
        ordered = sorted(
            range(len(classes)),
            key=lambda c: min(space.labels[m] for m in classes[c]),
        )
        symbol_of_class = {cls_idx: sym for sym, cls_idx in enumerate(ordered)}
        member_symbol: dict[int, int] = {}
        for cls_idx, cls in enumerate(classes):
            for member in cls:
                member_symbol[member] = symbol_of_class[cls_idx]
        for i in range(space.n_points):
            codes[i].append(member_symbol[i])
    return BaireCodes(
        prime=space.prime,
        start=start,
        depth=depth,
        labels=space.labels,
        codes=tuple(tuple(c) for c in codes),
    )


@dataclass(frozen=True)
class C0Vector:
    """Sparse vector sum of p^i * e_(i,a) over the coded positions.

    Keys are (position, symbol); the coefficient at a key is implicitly
    p^position, whose norm is p^(-position).  The vector norm is the max
    of those, i.e. p^(-smallest present position).
    """

    prime: int
    keys: tuple[tuple[int, int], ...]

    def norm(self) -> GammaValue:
        if not self.keys:
            return GAMMA_ZERO
        return GammaValue(min(level for level, _ in self.keys))

    def distance(self, other: "C0Vector") -> GammaValue:
        """Norm of the difference: coinciding keys cancel exactly."""
        diff = set(self.keys) ^ set(other.keys)
        if not diff:
            return GAMMA_ZERO
        return GammaValue(min(level for level, _ in diff))


def c0_embed(codes: BaireCodes) -> tuple[C0Vector, ...]:
    """One sparse vector per point; pairwise distances equal the source metric."""
    return tuple(
        C0Vector(
            prime=codes.prime,
            keys=tuple((pos, code[offset]) for offset, pos in enumerate(codes.positions)),
        )
        for code in codes.codes
    )
