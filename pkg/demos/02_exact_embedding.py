"""From raw dissimilarities to an exact sparse-vector isometry.

Pipeline: subdominant closure (the largest ultrametric below the data),
value-group rounding, zero-distance quotient, Baire digit codes, and the
sparse embedding whose pairwise norms reproduce every distance exactly.
"""

from fractions import Fraction

from ultrapoly import (
    baire_encode,
    c0_embed,
    quotient_zero,
    round_space,
    subdominant_closure,
    validate_ultrametric,
)

labels = ["ash", "beech", "cedar", "dogwood", "elm"]
raw = [
    [0, Fraction(1, 10), Fraction(9, 10), Fraction(8, 10), Fraction(9, 10)],
    [Fraction(1, 10), 0, Fraction(7, 10), Fraction(8, 10), Fraction(9, 10)],
    [Fraction(9, 10), Fraction(7, 10), 0, Fraction(2, 10), Fraction(3, 10)],
    [Fraction(8, 10), Fraction(8, 10), Fraction(2, 10), 0, Fraction(3, 10)],
    [Fraction(9, 10), Fraction(9, 10), Fraction(3, 10), Fraction(3, 10), 0],
]

print("== raw data is not ultrametric ==")
violations = validate_ultrametric(labels, raw)
print(f"violating triples: {len(violations)}, first: {violations[0]}")

print()
print("== subdominant closure: minimax path distances ==")
closed = subdominant_closure(raw)
assert validate_ultrametric(labels, closed) == []
for i, row in enumerate(closed):
    print(f"{labels[i]:>8}: " + "  ".join(str(v) for v in row))

print()
print("== rounded into the value group of Q_2 ==")
space = round_space(labels, closed, 2)
space, merges = quotient_zero(space)
print(f"merged points: {merges or 'none'}")
for i, row in enumerate(space.dist):
    print(f"{space.labels[i]:>8}: " + "  ".join(str(g.as_fraction(2)) for g in row))

print()
print("== Baire codes: first difference position = distance exponent ==")
codes = baire_encode(space)
for label, code in zip(codes.labels, codes.codes):
    print(f"{label:>8}: {code}  (positions {codes.start}..{codes.depth})")

print()
print("== sparse embedding is an exact isometry ==")
vectors = c0_embed(codes)
for i in range(space.n_points):
    for j in range(space.n_points):
        assert vectors[i].distance(vectors[j]) == space.dist[i][j]
print("every pairwise norm equals the distance matrix entry: OK")
