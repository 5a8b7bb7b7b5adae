"""Exact sparse linear algebra over Q.

Rows are dicts mapping column index to a nonzero Fraction.  Pivot columns of
a reduced echelon form are intrinsic to the row span, so the incremental
insertion below yields the same pivots as column-major elimination.
"""

from fractions import Fraction


class RowSpace:
    """Incrementally maintained reduced row echelon form."""

    def __init__(self):
        self.pivots = {}  # pivot column -> fully reduced monic row

    @property
    def rank(self):
        return len(self.pivots)

    def reduce(self, row):
        """Return the residual of `row` modulo the current span (row unchanged)."""
        res = dict(row)
        for col in sorted(res):
            if col not in self.pivots:
                continue
            c = res.get(col)
            if not c:
                continue
            for pcol, pval in self.pivots[col].items():
                s = res.get(pcol, Fraction(0)) - c * pval
                if s:
                    res[pcol] = s
                elif pcol in res:
                    del res[pcol]
        return res

    def insert(self, row):
        """Add `row` to the span; return its pivot column or None if dependent."""
        res = self.reduce(row)
        if not res:
            return None
        lead = min(res)
        inv = Fraction(1) / res[lead]
        res = {c: v * inv for c, v in res.items()}
        for prow in self.pivots.values():
            c = prow.get(lead)
            if c:
                for col, val in res.items():
                    s = prow.get(col, Fraction(0)) - c * val
                    if s:
                        prow[col] = s
                    elif col in prow:
                        del prow[col]
        self.pivots[lead] = res
        return lead

    def contains(self, row):
        return not self.reduce(row)


def rank_of(rows):
    space = RowSpace()
    for row in rows:
        space.insert(row)
    return space.rank


def express(vectors, target, ncols):
    """Write `target` as a linear combination of `vectors`, or return None.

    Augmented-column trick: track combination coefficients past `ncols`.
    """
    space = RowSpace()
    for i, v in enumerate(vectors):
        row = dict(v)
        row[ncols + i] = Fraction(1)
        space.insert(row)
    res = space.reduce(dict(target))
    if any(col < ncols and val for col, val in res.items()):
        return None
    coeffs = [Fraction(0)] * len(vectors)
    for col, val in res.items():
        if col >= ncols:
            coeffs[col - ncols] = -val
    return coeffs


def dense_to_sparse(row):
    return {j: Fraction(v) for j, v in enumerate(row) if v}
