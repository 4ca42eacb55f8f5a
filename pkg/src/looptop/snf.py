"""Smith normal form over the integers, and exact rank over coefficient rings.

Matrices are lists of rows of Python ints.  Nothing here goes through
floating point or modular shortcuts; desk-scale complexes are small.
"""

from __future__ import annotations

from dataclasses import dataclass

from .rings import Ring

Matrix = list[list[int]]  # rows of Python ints


def identity_matrix(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class SmithForm:
    """``P · A · Q = D`` with ``P``, ``Q`` unimodular and ``D`` diagonal.

    The nonzero diagonal entries ``d_1 | d_2 | ...`` are positive.
    """

    D: Matrix
    P: Matrix
    Q: Matrix
    P_inv: Matrix
    Q_inv: Matrix

    @property
    def diagonal(self) -> list[int]:
        r = min(len(self.D), len(self.D[0]) if self.D else 0)
        return [self.D[i][i] for i in range(r)]

    @property
    def invariant_factors(self) -> list[int]:
        return [d for d in self.diagonal if d != 0]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


def smith_normal_form(a, nrows: int | None = None, ncols: int | None = None) -> SmithForm:
    """Smith normal form of an integer matrix, with both transforms and their inverses."""
    A = [[int(x) for x in row] for row in a]
    m = len(A) if nrows is None else nrows
    n = (len(A[0]) if A else 0) if ncols is None else ncols
    if not A:
        A = [[0] * n for _ in range(m)]
    P, P_inv = identity_matrix(m), identity_matrix(m)
    Q, Q_inv = identity_matrix(n), identity_matrix(n)

    # Row ops act on A and P (left), and inversely on P_inv (right).
    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        P[i], P[j] = P[j], P[i]
        for row in P_inv:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):  # row_dst += c * row_src
        if c == 0:
            return
        A[dst] = [x + c * y for x, y in zip(A[dst], A[src])]
        P[dst] = [x + c * y for x, y in zip(P[dst], P[src])]
        for row in P_inv:
            row[src] -= c * row[dst]

    def neg_row(i):
        A[i] = [-x for x in A[i]]
        P[i] = [-x for x in P[i]]
        for row in P_inv:
            row[i] = -row[i]

    def swap_cols(i, j):
        for M in (A, Q):
            for row in M:
                row[i], row[j] = row[j], row[i]
        Q_inv[i], Q_inv[j] = Q_inv[j], Q_inv[i]

    def add_col(src, dst, c):  # col_dst += c * col_src
        if c == 0:
            return
        for M in (A, Q):
            for row in M:
                row[dst] += c * row[src]
        Q_inv[src] = [x - c * y for x, y in zip(Q_inv[src], Q_inv[dst])]

    def cdiv(a, b):  # nearest-integer quotient keeps remainders centered
        q, r = divmod(a, b)
        return q + 1 if 2 * abs(r) > abs(b) else q

    t = 0
    while t < min(m, n):
        while True:
            # pivot: smallest nonzero magnitude in the remaining block
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return SmithForm(A, P, Q, P_inv, Q_inv)
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = A[t][t]
            for i in range(t + 1, m):
                add_row(t, i, -cdiv(A[i][t], p))
            for j in range(t + 1, n):
                add_col(t, j, -cdiv(A[t][j], p))
            if any(A[i][t] for i in range(t + 1, m)) or any(A[t][j] for j in range(t + 1, n)):
                continue
            # divisibility: pivot must divide the whole remaining block
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            add_row(bad, t, 1)
        if A[t][t] < 0:
            neg_row(t)
        t += 1
    return SmithForm(A, P, Q, P_inv, Q_inv)


def rank(a, ring: Ring) -> int:
    """Rank of a matrix over ``ring`` (for ZZ: rank over Q)."""
    if len(a) == 0 or len(a[0]) == 0:
        return 0
    if ring.characteristic == 0 and not ring.is_field:
        return smith_normal_form(a).rank
    M = [[ring.coerce(x) for x in row] for row in a]
    rows, cols = len(M), len(M[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = ring.inverse(M[r][c])
        M[r] = [ring.coerce(x * inv) for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [ring.coerce(x - f * y) for x, y in zip(M[i], M[r])]
        r += 1
        if r == rows:
            break
    return r
