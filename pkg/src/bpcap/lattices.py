"""Z_p-lattice linear algebra at finite precision: Smith normal form over
Z/p^M with valuation pivoting, column echelon bases, and triangular solves.

Vectors are lists of ints understood modulo p^prec. Elimination steps only
ever divide by the minimal-valuation pivot of the region being cleared, so
every quotient is exact on representatives; the cumulative pivot valuation
is reported as `loss` and must be subtracted from the usable precision.
"""

from __future__ import annotations

from .errors import NotASublattice, PrecisionExhausted
from .padics import INF, vp_int


def snf_divisors(rows, p: int, prec: int):
    """Elementary-divisor p-valuations of an integer matrix mod p^prec.

    Returns a list of valuations (ascending), one per nonzero divisor found
    at this precision. Entries indistinguishable from 0 contribute nothing.
    """
    m = p ** prec
    A = [[x % m for x in row] for row in rows]
    nr = len(A)
    nc = len(A[0]) if nr else 0
    top = 0
    divisors = []
    while top < min(nr, nc):
        best = None
        for i in range(top, nr):
            for j in range(top, nc):
                v = vp_int(A[i][j], p)
                if v is INF:
                    continue
                if best is None or v < best[0]:
                    best = (v, i, j)
                    if v == 0:
                        break
            if best and best[0] == 0:
                break
        if best is None:
            break
        v, bi, bj = best
        A[top], A[bi] = A[bi], A[top]
        for row in A:
            row[top], row[bj] = row[bj], row[top]
        piv = A[top][top]
        u_inv = pow(piv // p ** v, -1, m)
        A[top] = [x * u_inv % m for x in A[top]]  # pivot now p^v
        for i in range(nr):
            if i == top or A[i][top] == 0:
                continue
            mult = A[i][top] // p ** v  # exact: min-valuation pivot
            A[i] = [(x - mult * y) % m for x, y in zip(A[i], A[top])]
        for j in range(top + 1, nc):
            if A[top][j] == 0:
                continue
            mult = A[top][j] // p ** v
            for i in range(nr):
                A[i][j] = (A[i][j] - mult * A[i][top]) % m
        divisors.append(v)
        top += 1
    return divisors


class ZpBasis:
    """Column-echelon basis of a Z_p-lattice at finite precision."""

    def __init__(self, p, prec, columns, pivot_rows, loss):
        self.p = p
        self.prec = prec
        self.columns = columns        # triangular w.r.t. pivot_rows order
        self.pivot_rows = pivot_rows  # pivot_rows[k] is the pivot of columns[k]
        self.loss = loss              # cumulative pivot valuation

    @property
    def rank(self):
        return len(self.columns)

    def pivot_valuations(self):
        return [vp_int(col[r], self.p) for col, r in
                zip(self.columns, self.pivot_rows)]


def column_echelon(columns, p: int, prec: int) -> ZpBasis:
    """Reduce a generating set of columns to an echelon Z_p-basis.

    Pivots are chosen with minimal valuation (largest p-adic size), which
    bounds the precision damage by the sum of pivot valuations.
    """
    m = p ** prec
    cols = [[x % m for x in c] for c in columns]
    n = len(cols[0]) if cols else 0
    used_rows = []
    basis = []
    loss = 0
    remaining = cols
    while remaining:
        best = None
        for ci, col in enumerate(remaining):
            for r in range(n):
                if r in used_rows:
                    continue
                v = vp_int(col[r], p)
                if v is INF or v >= prec - loss:
                    continue
                if best is None or v < best[0]:
                    best = (v, ci, r)
        if best is None:
            break
        v, ci, r = best
        piv_col = remaining.pop(ci)
        u_inv = pow(piv_col[r] // p ** v, -1, m)
        piv_col = [x * u_inv % m for x in piv_col]  # entry at r is p^v
        for col in remaining + [b for b in basis]:
            if col[r] == 0:
                continue
            if vp_int(col[r], p) < v:
                raise PrecisionExhausted("pivot ordering violated")
            mult = col[r] // p ** v
            for i in range(n):
                col[i] = (col[i] - mult * piv_col[i]) % m
        basis.append(piv_col)
        used_rows.append(r)
        loss += v
    return ZpBasis(p, prec, basis, used_rows, loss)


def solve_in_basis(basis: ZpBasis, vector, noise_prec: int):
    """Write `vector` as a Z_p-combination of basis columns.

    Returns the coefficient list; residual entries with valuation below
    `noise_prec` raise NotASublattice, while coefficient divisions that the
    precision cannot support raise PrecisionExhausted.
    """
    p = basis.p
    m = p ** basis.prec
    vec = [x % m for x in vector]
    coeffs = []
    for col, r in zip(basis.columns, basis.pivot_rows):
        pv = vp_int(col[r], p)
        e = vec[r]
        ve = vp_int(e, p)
        if ve is INF:
            coeffs.append(0)
            continue
        if ve < pv:
            if ve >= noise_prec:
                coeffs.append(0)
                continue
            raise NotASublattice(
                f"entry valuation {ve} below pivot valuation {pv}")
        c = e // p ** pv * pow(col[r] // p ** pv, -1, m) % m
        coeffs.append(c)
        for i in range(len(vec)):
            vec[i] = (vec[i] - c * col[i]) % m
    for x in vec:
        v = vp_int(x, p)
        if v is not INF and v < noise_prec:
            raise NotASublattice(f"residual of valuation {v} outside lattice")
    return coeffs


def lattice_index_valuation(ambient: ZpBasis, sub_columns, noise_prec: int):
    """v_p of the index [ambient : <sub_columns>].

    The sublattice must have the same rank as the ambient basis; its
    coordinates in the ambient basis are SNF'd and the divisor valuations
    summed. Raises NotASublattice / PrecisionExhausted accordingly.
    """
    coords = [solve_in_basis(ambient, col, noise_prec) for col in sub_columns]
    rows = [[coords[j][i] for j in range(len(coords))]
            for i in range(ambient.rank)]
    divisors = snf_divisors(rows, ambient.p, noise_prec)
    if len(divisors) < ambient.rank:
        raise PrecisionExhausted(
            "sublattice rank deficient at working precision (infinite index?)")
    return sum(divisors)
