"""Residue-field arithmetic: GF(q) as F_p[x]/(h), with the solvers the
local-unit machinery needs (Frobenius inverse, semilinear s^p + k*s = a,
flattening of degree-p extensions given by such a polynomial).

Elements are tuples of ints in [0, p), length deg(h).
"""

from __future__ import annotations

from .errors import DomainError, NotInvertible


# -- dense polynomial helpers over F_p (lists, low degree first) -----------

def _ptrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _padd(a, b, p):
    n = max(len(a), len(b))
    return _ptrim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p
                   for i in range(n)])


def _pscale(a, c, p):
    return _ptrim([x * c % p for x in a])


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _ptrim(out)


def _pdivmod(a, b, p):
    a = list(a)
    blead = pow(b[-1], -1, p)
    q = [0] * max(0, len(a) - len(b) + 1)
    while len(a) >= len(b) and _ptrim(a):
        if len(a) < len(b):
            break
        c = a[-1] * blead % p
        d = len(a) - len(b)
        q[d] = c
        for i, y in enumerate(b):
            a[d + i] = (a[d + i] - c * y) % p
        _ptrim(a)
    return _ptrim(q), _ptrim(a)


def _pxgcd(a, b, p):
    r0, r1 = list(a), list(b)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while _ptrim(list(r1)):
        q, r = _pdivmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, _padd(s0, _pscale(_pmul(q, s1, p), p - 1, p), p)
        t0, t1 = t1, _padd(t0, _pscale(_pmul(q, t1, p), p - 1, p), p)
    return r0, s0, t0  # g, s, t with s*a + t*b = g


def gauss_solve_fp(matrix, rhs, p):
    """Solve M x = rhs over F_p (column vectors). Returns x or None."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    A = [list(matrix[i]) + [rhs[i]] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if A[i][c] % p != 0), None)
        if pr is None:
            continue
        A[r], A[pr] = A[pr], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [x * inv % p for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c] % p != 0:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if A[i][cols] % p != 0:
            return None
    x = [0] * cols
    for i, c in enumerate(pivots):
        x[c] = A[i][cols]
    return x


class GFq:
    """The field F_p[x]/(modulus); `modulus` monic irreducible over F_p."""

    def __init__(self, p: int, modulus):
        self.p = p
        self.modulus = [c % p for c in modulus]
        if self.modulus[-1] != 1:
            raise DomainError("residue modulus must be monic")
        self.f = len(self.modulus) - 1
        self.q = p ** self.f
        self.zero = (0,) * self.f
        self.one = tuple([1] + [0] * (self.f - 1)) if self.f else ()

    def make(self, coeffs) -> tuple:
        c = [x % self.p for x in coeffs]
        if len(c) >= self.f + 1:
            _, c = _pdivmod(c, self.modulus, self.p)
        c = c + [0] * (self.f - len(c))
        return tuple(c[:self.f])

    def from_int(self, n: int) -> tuple:
        return self.make([n])

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x % self.p for x in a)

    def mul(self, a, b):
        return self.make(_pmul(list(a), list(b), self.p))

    def inv(self, a):
        if self.is_zero(a):
            raise NotInvertible("zero in residue field")
        g, s, _ = _pxgcd(list(a), self.modulus, self.p)
        if len(g) != 1:
            raise NotInvertible("element shares a factor with the modulus")
        return self.make(_pscale(s, pow(g[0], -1, self.p), self.p))

    def pow(self, a, k: int):
        if k < 0:
            return self.pow(self.inv(a), -k)
        r = self.one
        while k:
            if k & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            k >>= 1
        return r

    def is_zero(self, a) -> bool:
        return all(x == 0 for x in a)

    def eq(self, a, b) -> bool:
        return a == b

    def pth_root(self, a):
        """Inverse of Frobenius: a^(p^(f-1))."""
        return self.pow(a, self.p ** (self.f - 1))

    def elements(self):
        """Iterate over all q elements (desk-scale fields only)."""
        def rec(i, cur):
            if i == self.f:
                yield tuple(cur)
                return
            for c in range(self.p):
                yield from rec(i + 1, cur + [c])
        yield from rec(0, [])

    def fp_basis_vec(self, a):
        """Flatten an element to an F_p column of length f."""
        return list(a)

    def solve_semilinear(self, kappa, a):
        """Solve s^p + kappa*s = a; returns s or None when unsolvable."""
        cols = []
        for i in range(self.f):
            e = self.make([0] * i + [1])
            img = self.add(self.pow(e, self.p), self.mul(kappa, e))
            cols.append(self.fp_basis_vec(img))
        matrix = [[cols[j][i] for j in range(self.f)] for i in range(self.f)]
        sol = gauss_solve_fp(matrix, self.fp_basis_vec(a), self.p)
        if sol is None:
            return None
        return self.make(sol)

    def find_order_element(self, n: int):
        """Some element of exact multiplicative order n (n | q-1), or None."""
        if (self.q - 1) % n != 0:
            return None
        cof = (self.q - 1) // n
        for a in self.elements():
            if self.is_zero(a):
                continue
            z = self.pow(a, cof)
            ok = True
            for d in _prime_divisors(n):
                if self.eq(self.pow(z, n // d), self.one):
                    ok = False
                    break
            if ok:
                return z
        return None


def _prime_divisors(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class GFqHom:
    """Field embedding determined by the image of the domain generator."""

    def __init__(self, dom: GFq, cod: GFq, gen_image):
        self.dom = dom
        self.cod = cod
        self.gen_image = gen_image

    def map(self, a):
        acc = self.cod.zero
        for c in reversed(list(a)):
            acc = self.cod.add(self.cod.mul(acc, self.gen_image),
                               self.cod.from_int(c))
        return acc


def extend_by_semilinear(base: GFq, kappa, abar):
    """Flatten the degree-p extension base[z]/(z^p + kappa z - abar).

    The polynomial must have no root in `base` (checked). Returns
    (ext: GFq, embed: GFqHom base->ext, z_image in ext).
    """
    p = base.p
    if base.solve_semilinear(kappa, abar) is not None:
        raise DomainError("semilinear polynomial has a root; extension is split")
    n = base.f * p

    # algebra A = base[z]/(z^p + kappa z - abar); elements: lists of p base-elts
    def amul(u, v):
        out = [base.zero] * (2 * p - 1)
        for i, x in enumerate(u):
            if base.is_zero(x):
                continue
            for j, y in enumerate(v):
                out[i + j] = base.add(out[i + j], base.mul(x, y))
        # reduce: z^p = abar - kappa z
        for i in range(2 * p - 2, p - 1, -1):
            c = out[i]
            if base.is_zero(c):
                continue
            out[i] = base.zero
            out[i - p] = base.add(out[i - p], base.mul(c, abar))
            out[i - p + 1] = base.sub(out[i - p + 1], base.mul(c, kappa))
        return out[:p]

    def aflat(u):
        vec = []
        for x in u:
            vec.extend(base.fp_basis_vec(x))
        return vec

    xgen = [base.make([0, 1])] + [base.zero] * (p - 1)
    zgen = [base.zero, base.one] + [base.zero] * (p - 2)

    for c in range(p * base.f + 1):
        w = [base.add(zgen[0], base.mul(base.from_int(c), xgen[0])), base.one] \
            + [base.zero] * (p - 2)
        # powers of w; find the linear dependency giving its min poly
        pows = [[base.one] + [base.zero] * (p - 1)]
        for _ in range(n):
            pows.append(amul(pows[-1], w))
        cols = [aflat(u) for u in pows[:n]]
        matrix = [[cols[j][i] for j in range(n)] for i in range(n)]
        rhs = aflat(pows[n])
        sol = gauss_solve_fp(matrix, rhs, p)
        if sol is None:
            continue
        # full rank means min poly degree is n: check the matrix is invertible
        if _fp_rank(matrix, p) < n:
            continue
        hpoly = [(-s) % p for s in sol] + [1]
        ext = GFq(p, hpoly)

        def tocol(vec):
            return gauss_solve_fp(matrix, vec, p)

        base_gen_img = ext.make(tocol(aflat(xgen)))
        z_img = ext.make(tocol(aflat(zgen)))
        return ext, GFqHom(base, ext, base_gen_img), z_img
    raise DomainError("no primitive element found for the residue extension")


def _fp_rank(matrix, p):
    A = [list(r) for r in matrix]
    rows, cols = len(A), len(A[0]) if A else 0
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if A[i][c] % p != 0), None)
        if pr is None:
            continue
        A[r], A[pr] = A[pr], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [x * inv % p for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c] % p:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        r += 1
    return r
