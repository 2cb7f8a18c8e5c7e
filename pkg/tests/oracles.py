"""Independent brute-force oracles for the test suite.

Everything here recomputes expected values from first principles with
plain integers and fractions; nothing imports the library's own
computation paths, so each check stays a genuine second route.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations


def gamma_floor(r: Fraction, p: int) -> int | None:
    """Exponent e of the largest p^-e <= r by direct enumeration; None for r = 0."""
    if r == 0:
        return None
    if r < 0:
        raise ValueError("negative input")
    # scan a window of exponents guaranteed to bracket r
    e = 0
    while Fraction(p) ** (-e) > r:
        e += 1
    while Fraction(p) ** (-(e - 1)) <= r:
        e -= 1
    return e


def schoolbook_add(
    digits_a: list[int], va: int, digits_b: list[int], vb: int, p: int
) -> tuple[list[int], int] | None:
    """Carry-propagating digit addition on the shared known window.

    Returns (digits, valuation) of the sum or None when every digit in
    the window cancels.  Positions below each operand's valuation are
    exact zeros; positions at or above valuation+len(digits) are unknown,
    so the result window is [min(va, vb), min(va+len a, vb+len b)).
    """
    start = min(va, vb)
    end = min(va + len(digits_a), vb + len(digits_b))
    window = []
    carry = 0
    for pos in range(start, end):
        da = digits_a[pos - va] if va <= pos < va + len(digits_a) else 0
        db = digits_b[pos - vb] if vb <= pos < vb + len(digits_b) else 0
        carry, d = divmod(da + db + carry, p)
        window.append(d)
    while window and window[0] == 0:
        window.pop(0)
        start += 1
    if not window:
        return None
    return window, start


def trial_division_valuation(num: int, den: int, p: int) -> int:
    """v_p(num/den) by trial division on both parts."""
    if num == 0:
        raise ValueError("valuation of zero")
    v = 0
    num = abs(num)
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def minimax_paths(matrix: list[list[Fraction]]) -> list[list[Fraction]]:
    """Minimax path distance by enumerating every simple path (n <= 6)."""
    n = len(matrix)
    out = [[Fraction(0)] * n for _ in range(n)]
    nodes = list(range(n))
    for i in range(n):
        for j in range(i + 1, n):
            best = matrix[i][j]
            middle = [x for x in nodes if x not in (i, j)]
            for r in range(1, len(middle) + 1):
                for combo in permutations(middle, r):
                    path = [i, *combo, j]
                    cost = max(
                        matrix[path[t]][path[t + 1]] for t in range(len(path) - 1)
                    )
                    if cost < best:
                        best = cost
            out[i][j] = out[j][i] = best
    return out


def closure_classes(exponents: list[list[int | None]], j: int) -> list[tuple[int, ...]]:
    """Connected components of the threshold graph {e >= j} via BFS.

    e = None stands for distance zero, which lies below every threshold.
    """
    n = len(exponents)
    seen = [False] * n
    classes = []
    for root in range(n):
        if seen[root]:
            continue
        queue = [root]
        seen[root] = True
        members = []
        while queue:
            x = queue.pop()
            members.append(x)
            for y in range(n):
                if not seen[y]:
                    e = exponents[x][y]
                    if e is None or e >= j:
                        seen[y] = True
                        queue.append(y)
        classes.append(tuple(sorted(members)))
    return sorted(classes, key=lambda cls: cls[0])


def first_difference(code_a: list[int], code_b: list[int], start: int) -> int | None:
    """Position (offset by start) of the first differing entry."""
    for offset, (a, b) in enumerate(zip(code_a, code_b)):
        if a != b:
            return start + offset
    return None


def sparse_vector_distance(
    keys_a: list[tuple[int, int]], keys_b: list[tuple[int, int]], p: int
) -> Fraction:
    """Norm of the difference of two sparse vectors with coefficients p^level.

    Works on explicit fraction coefficients: coinciding keys subtract to
    zero, every surviving entry contributes norm p^-level, and the sup
    norm is their maximum.
    """
    coeffs: dict[tuple[int, int], Fraction] = {}
    for level, symbol in keys_a:
        coeffs[(level, symbol)] = coeffs.get((level, symbol), Fraction(0)) + Fraction(p) ** level
    for level, symbol in keys_b:
        coeffs[(level, symbol)] = coeffs.get((level, symbol), Fraction(0)) - Fraction(p) ** level
    norms = [
        Fraction(p) ** (-level)
        for (level, _), c in coeffs.items()
        if c != 0
    ]
    return max(norms, default=Fraction(0))


def threshold_cliques(
    block_dist: list[list[Fraction]], threshold: Fraction
) -> list[tuple[int, ...]]:
    """Components of the graph {d <= threshold}, verified to be cliques."""
    n = len(block_dist)
    adj = [[block_dist[i][j] <= threshold for j in range(n)] for i in range(n)]
    seen = [False] * n
    out = []
    for root in range(n):
        if seen[root]:
            continue
        queue, members = [root], []
        seen[root] = True
        while queue:
            x = queue.pop()
            members.append(x)
            for y in range(n):
                if not seen[y] and adj[x][y]:
                    seen[y] = True
                    queue.append(y)
        members.sort()
        for a in members:
            for b in members:
                assert adj[a][b] or a == b, "threshold graph is not a disjoint clique union"
        out.append(tuple(members))
    return sorted(out, key=lambda cls: cls[0])


def theta_digits(digits: list[int], p: int, n: int) -> Fraction:
    """sum(digits[i] * p^(-i-1)) over the first n digits."""
    return sum((Fraction(digits[i], p ** (i + 1)) for i in range(n)), Fraction(0))


def residue_blocks(order: int, modulus: int) -> list[tuple[int, ...]]:
    """Residue classes of Z/order modulo `modulus`, sorted by smallest member."""
    classes: dict[int, list[int]] = {}
    for x in range(order):
        classes.setdefault(x % modulus, []).append(x)
    return sorted((tuple(v) for v in classes.values()), key=lambda cls: cls[0])
