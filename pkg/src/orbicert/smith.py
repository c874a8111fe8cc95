"""Integer matrix normal forms and lattice utilities.

Everything here is fraction-free: Smith and Hermite forms with recorded
unimodular transforms, saturation, and integer linear solving.  Matrices are
lists of lists of python ints; rows span lattices unless stated otherwise.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DimensionMismatch


def _identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _mat_copy(m):
    return [list(r) for r in m]


def int_mat_mul(a, b):
    if a and b and len(a[0]) != len(b):
        raise DimensionMismatch("integer matrix product shape mismatch")
    bt = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def int_mat_vec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def int_det(mat):
    """Fraction-free determinant (Bareiss)."""
    n = len(mat)
    if n == 0:
        return 1
    if any(len(r) != n for r in mat):
        raise DimensionMismatch("determinant of non-square matrix")
    m = _mat_copy(mat)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            piv = next((r for r in range(k + 1, n) if m[r][k]), None)
            if piv is None:
                return 0
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def smith_normal_form(mat):
    """(U, D, V, Uinv, Vinv) with U @ mat @ V = D diagonal, d_i | d_{i+1}.

    U and V are unimodular; the inverses are tracked alongside so callers
    get saturation bases for free.
    """
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    m = _mat_copy(mat)
    u, uinv = _identity(rows), _identity(rows)
    v, vinv = _identity(cols), _identity(cols)

    def row_swap(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]
        for r in uinv:
            r[i], r[j] = r[j], r[i]

    def col_swap(i, j):
        for r in m:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def row_add(dst, src, c):
        # row dst += c * row src
        m[dst] = [a + c * b for a, b in zip(m[dst], m[src])]
        u[dst] = [a + c * b for a, b in zip(u[dst], u[src])]
        for r in uinv:
            r[src] -= c * r[dst]

    def col_add(dst, src, c):
        # col dst += c * col src
        for r in m:
            r[dst] += c * r[src]
        for r in v:
            r[dst] += c * r[src]
        vinv[src] = [a - c * b for a, b in zip(vinv[src], vinv[dst])]

    def row_negate(i):
        m[i] = [-a for a in m[i]]
        u[i] = [-a for a in u[i]]
        for r in uinv:
            r[i] = -r[i]

    t = 0
    limit = min(rows, cols)
    while t < limit:
        # locate a pivot of minimal absolute value in the working block
        piv = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                a = abs(m[i][j])
                if a and (best is None or a < best):
                    best, piv = a, (i, j)
        if piv is None:
            break
        while True:
            i, j = piv
            if i != t:
                row_swap(t, i)
            if j != t:
                col_swap(t, j)
            if m[t][t] < 0:
                row_negate(t)
            # clear column t
            dirty = False
            for r in range(t + 1, rows):
                if m[r][t]:
                    q = m[r][t] // m[t][t]
                    row_add(r, t, -q)
                    if m[r][t]:
                        dirty = True
            for c in range(t + 1, cols):
                if m[t][c]:
                    q = m[t][c] // m[t][t]
                    col_add(c, t, -q)
                    if m[t][c]:
                        dirty = True
            if dirty:
                piv = None
                best = None
                for i in range(t, rows):
                    for j in range(t, cols):
                        a = abs(m[i][j])
                        if a and (best is None or a < best):
                            best, piv = a, (i, j)
                continue
            # divisibility sweep: fold in any entry the pivot misses
            offender = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if m[i][j] % m[t][t]:
                        offender = (i, j)
                        break
                if offender:
                    break
            if offender is None:
                break
            row_add(t, offender[0], 1)
            piv = (t, t)
        t += 1
    return u, m, v, uinv, vinv


def diagonal_of(d):
    out = []
    for i in range(min(len(d), len(d[0]) if d else 0)):
        if d[i][i] == 0:
            break
        out.append(d[i][i])
    return out


def hermite_row_basis(rows, width=None):
    """Canonical basis of the row lattice: row-style Hermite normal form.

    Positive pivots, entries above each pivot reduced into [0, pivot).
    """
    if width is None:
        width = len(rows[0]) if rows else 0
    m = [list(r) for r in rows if any(r)]
    for r in m:
        if len(r) != width:
            raise DimensionMismatch("ragged lattice generators")
    rank = 0
    for col in range(width):
        while True:
            live = [r for r in range(rank, len(m)) if m[r][col]]
            if not live:
                break
            piv = min(live, key=lambda r: abs(m[r][col]))
            m[rank], m[piv] = m[piv], m[rank]
            if len(live) == 1:
                break
            for r in range(rank + 1, len(m)):
                if m[r][col]:
                    q = m[r][col] // m[rank][col]
                    m[r] = [a - q * b for a, b in zip(m[r], m[rank])]
        if not m[rank:] or not m[rank][col]:
            continue
        if m[rank][col] < 0:
            m[rank] = [-a for a in m[rank]]
        for r in range(rank):
            q = m[r][col] // m[rank][col]
            if q:
                m[r] = [a - q * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return [r for r in m[:rank] if any(r)]


def lattice_saturation(rows, width=None):
    """Basis of (Q-span of rows) ∩ Z^width, as canonical Hermite rows."""
    if width is None:
        width = len(rows[0]) if rows else 0
    gen = [r for r in rows if any(r)]
    if not gen:
        return []
    _, d, _, _, vinv = smith_normal_form(gen)
    rank = len(diagonal_of(d))
    return hermite_row_basis([vinv[i] for i in range(rank)], width)


def left_kernel_saturated(mat):
    """Canonical basis of {u in Z^rows : u @ mat = 0}; always saturated."""
    rows = len(mat)
    if rows == 0:
        return []
    u, d, _, _, _ = smith_normal_form(mat)
    rank = len(diagonal_of(d))
    return hermite_row_basis([u[i] for i in range(rank, rows)], rows)


def integer_solve(mat, target):
    """One integer solution x of mat @ x = target, or None."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    if len(target) != rows:
        raise DimensionMismatch("target length != rows")
    if cols == 0:
        return [] if not any(target) else None
    u, d, v, _, _ = smith_normal_form(mat)
    ub = int_mat_vec(u, list(target))
    diag = diagonal_of(d)
    z = [0] * cols
    for i in range(rows):
        di = d[i][i] if i < min(rows, cols) else 0
        if i < len(diag):
            if ub[i] % di:
                return None
            z[i] = ub[i] // di
        else:
            if ub[i] != 0:
                return None
    return int_mat_vec(v, z)


def rational_rows_to_integer(rows):
    """Scale rational rows to primitive integer rows (per-row scaling)."""
    out = []
    for row in rows:
        fr = [Fraction(x) for x in row]
        if not any(fr):
            continue
        denom = 1
        for x in fr:
            denom = denom * x.denominator // _gcd(denom, x.denominator)
        ints = [int(x * denom) for x in fr]
        g = 0
        for a in ints:
            g = _gcd(g, a)
        out.append([a // g for a in ints])
    return out


def _gcd(a, b):
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a if a else 1
