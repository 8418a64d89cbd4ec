"""Finite extensions of Q_p: absolute base fields Q_p[x]/(g) and degree-p
Kummer towers K_v(alpha^(1/p)) on top of them.

Base fields are accepted only when the power order Z_p[theta] is provably
maximal (unramified block, or an Eisenstein / phi-Eisenstein block of
boundary height 1); anything else raises honestly instead of guessing.
Towers carry their own adapted integral data: a uniformizer pi_L with
pi_L^p = pi_K * R for ramified layers, or the integral residue generator Z
for unramified layers, so valuations, residues and exact divisions are
certified rather than heuristic. Tower elements keep their coordinates over
the base in powers of the Kummer root y together with a global denominator
pi_K^dexp, which makes every division exact.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import gfq
from .errors import (DomainError, InvalidOperand, NotAField, NotInvertible,
                     NotMonogenicAtQ, PrecisionExhausted)
from .padics import INF, PAdic, is_prime, vp_int


# ---------------------------------------------------------------------------
# integer polynomial helpers (dense lists, low degree first, coefficients mod m)

def _poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mulmod(a, b, mod):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % mod
    return _poly_trim(out)


def _poly_divmod_monic(a, b, mod):
    a = [x % mod for x in a]
    q = [0] * max(0, len(a) - len(b) + 1)
    while len(_poly_trim(a)) >= len(b):
        c = a[-1]
        d = len(a) - len(b)
        q[d] = c
        for i, y in enumerate(b):
            a[d + i] = (a[d + i] - c * y) % mod
        a.pop()
        _poly_trim(a)
    return q, a


def _exact_int_det(rows):
    """Fraction-free Bareiss determinant of an integer matrix."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _det_expansion(rows, ring):
    """Division-free determinant over a commutative ring (Laplace, tiny n)."""
    n = len(rows)
    add, mul, neg = ring["add"], ring["mul"], ring["neg"]
    if n == 1:
        return rows[0][0]
    acc = None
    for j in range(n):
        a = rows[0][j]
        if ring["is_zero"](a):
            continue
        sub = [[row[k] for k in range(n) if k != j] for row in rows[1:]]
        term = mul(a, _det_expansion(sub, ring))
        if j % 2 == 1:
            term = neg(term)
        acc = term if acc is None else add(acc, term)
    return ring["zero"] if acc is None else acc


def _solve_unit_mod(A, rhs, p, m):
    """Solve A x = rhs mod m with unit pivots (A invertible mod p)."""
    n = len(A)
    M = [list(A[i]) + [rhs[i] % m] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] % p != 0), None)
        if piv is None:
            raise PrecisionExhausted("no unit pivot; matrix singular mod p")
        M[c], M[piv] = M[piv], M[c]
        inv = pow(M[c][c], -1, m)
        M[c] = [x * inv % m for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [(x - f * y) % m for x, y in zip(M[r], M[c])]
    return [M[i][n] for i in range(n)]


def _solve_min_val(cols, vec, p, prec):
    """Solve sum x_c * cols[c] = vec over Z/p^prec with Z_p-integral x.

    Full (global minimal-valuation) pivoting: the pivot of each step is the
    smallest-valuation entry of the active block, so every elimination
    multiplier is an exact integer. The genuine solution must be integral;
    PrecisionExhausted otherwise.
    """
    m = p ** prec
    n = len(vec)
    ncols = len(cols)
    A = [[cols[c][r] % m for c in range(ncols)] + [vec[r] % m]
         for r in range(n)]
    act_rows = set(range(n))
    act_cols = set(range(ncols))
    pivots = []  # in elimination order
    while act_cols:
        best = None
        for r in act_rows:
            for c in act_cols:
                v = vp_int(A[r][c], p)
                if v is INF:
                    continue
                if best is None or v < best[2]:
                    best = (r, c, v)
                    if v == 0:
                        break
            if best is not None and best[2] == 0:
                break
        if best is None:
            raise PrecisionExhausted("singular coordinate system")
        r0, c0, v0 = best
        inv = pow(A[r0][c0] // p ** v0, -1, m)
        A[r0] = [x * inv % m for x in A[r0]]
        for r in act_rows:
            if r == r0 or A[r][c0] == 0:
                continue
            mult = A[r][c0] // p ** v0  # exact: v0 is the global minimum
            A[r] = [(x - mult * y) % m for x, y in zip(A[r], A[r0])]
        act_rows.discard(r0)
        act_cols.discard(c0)
        pivots.append((r0, c0, v0))
    sol = [0] * ncols
    for r0, c0, v0 in reversed(pivots):
        acc = A[r0][ncols]
        for _, c1, _ in pivots:
            if c1 != c0 and A[r0][c1]:
                acc = (acc - A[r0][c1] * sol[c1]) % m
        if acc % p ** v0:
            raise PrecisionExhausted("solution not integral at precision")
        sol[c0] = acc // p ** v0 % m
    return sol


# ---------------------------------------------------------------------------

@dataclass
class MuGroup:
    """p-part of the roots of unity of a local field."""
    parent: object
    k: int            # mu has order p^k
    zeta: object      # primitive p^k-th root (None when k == 0)

    @property
    def order(self):
        return self.parent.p ** self.k


@dataclass
class SplitMarker:
    """The radical is a local p-th power: the place splits completely."""
    base: object
    witness: object   # w with w^p = alpha at reduced precision

    rel_e = 1
    rel_f = 1


class LocalElt:
    """Element of a base local field: integer coordinate vector mod p^prec."""

    __slots__ = ("parent", "coeffs", "prec")

    def __init__(self, parent, coeffs, prec):
        self.parent = parent
        self.prec = prec
        m = parent.p ** prec
        c = [x % m for x in coeffs]
        c += [0] * (parent.degree - len(c))
        self.coeffs = c

    def coeffs_padic(self):
        return tuple(PAdic(self.parent.p, self.prec, c, check_prime=False)
                     for c in self.coeffs)

    def _bin(self, other):
        if isinstance(other, int):
            other = self.parent.embed_int(other, self.prec)
        if not isinstance(other, LocalElt) or other.parent is not self.parent:
            raise InvalidOperand("elements of different local fields")
        return other

    def __add__(self, other):
        o = self._bin(other)
        n = min(self.prec, o.prec)
        return LocalElt(self.parent,
                        [a + b for a, b in zip(self.coeffs, o.coeffs)], n)

    __radd__ = __add__

    def __neg__(self):
        return LocalElt(self.parent, [-a for a in self.coeffs], self.prec)

    def __sub__(self, other):
        o = self._bin(other)
        n = min(self.prec, o.prec)
        return LocalElt(self.parent,
                        [a - b for a, b in zip(self.coeffs, o.coeffs)], n)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._bin(other)
        n = min(self.prec, o.prec)
        m = self.parent.p ** n
        prod = _poly_mulmod(self.coeffs, o.coeffs, m)
        _, rem = _poly_divmod_monic(prod, self.parent.poly, m)
        return LocalElt(self.parent, rem, n)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.parent.invert(self) ** (-k)
        r = self.parent.one(self.prec)
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def __eq__(self, other):
        try:
            o = self._bin(other)
        except InvalidOperand:
            return NotImplemented
        n = min(self.prec, o.prec)
        m = self.parent.p ** n
        return all((a - b) % m == 0 for a, b in zip(self.coeffs, o.coeffs))

    def __hash__(self):
        return hash(("LocalElt", id(self.parent)))

    def __repr__(self):
        return f"LocalElt({self.coeffs}, prec={self.prec})"

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def valuation(self):
        return self.parent.elt_valuation(self)


class LocalField:
    """Absolute extension of Q_p presented as Q_p[x]/(poly)."""

    level = "base"

    def __init__(self, p, prec, poly, e, f, phibar, phi, block_m):
        self.p = p
        self.prec = prec
        self.poly = [c % p ** prec for c in poly]
        self.degree = len(poly) - 1
        self.e = e
        self.f = f
        self.residue_field = gfq.GFq(p, phibar)
        self._phi = phi          # monic integral lift of phibar, None if e == 1
        self._block_m = block_m
        self._w_unit = None
        self._kappa = None
        if e == 1:
            self.uniformizer = self.embed_int(p, prec)
        else:
            self.uniformizer = self.eval_phi(prec)

    # -- element constructors ----------------------------------------------

    def one(self, prec=None):
        return self.embed_int(1, prec)

    def zero(self, prec=None):
        return self.embed_int(0, prec)

    def embed_int(self, n, prec=None):
        return LocalElt(self, [n], prec or self.prec)

    def gen(self, prec=None):
        return LocalElt(self, [0, 1], prec or self.prec)

    def theta_power(self, i, prec=None):
        return self.gen(prec) ** i

    def from_coeffs(self, coeffs, prec=None):
        return LocalElt(self, list(coeffs), prec or self.prec)

    def eval_phi(self, prec=None):
        if self._phi is None:
            return self.embed_int(self.p, prec)
        return LocalElt(self, self._phi, prec or self.prec)

    # -- structural data -----------------------------------------------------

    @property
    def q(self):
        return self.residue_field.q

    def mstar(self):
        """floor(p*e/(p-1)) and whether the bound is an integer."""
        num, den = self.p * self.e, self.p - 1
        return num // den, num % den == 0

    def level_ceiling(self, prec):
        """Largest valuation distinguishable from 0 at element precision."""
        return self.e * prec

    # -- phi-adic expansion, valuation, residue ------------------------------

    def _phi_expansion(self, elt):
        m = self.p ** elt.prec
        if self._block_m == 1:
            return [list(elt.coeffs)]
        blocks = []
        rest = list(elt.coeffs)
        for _ in range(self._block_m):
            rest, low = _poly_divmod_monic(rest, self._phi, m)
            low += [0] * (len(self._phi) - 1 - len(low))
            blocks.append(low)
        return blocks

    def elt_valuation(self, elt):
        """Normalized valuation (v(uniformizer)=1); INF for 0 at precision."""
        blocks = self._phi_expansion(elt)
        best = INF
        for j, blk in enumerate(blocks):
            cont = min((vp_int(c, self.p) for c in blk), default=INF)
            if cont is INF:
                continue
            v = j + self.e * cont
            if v < best:
                best = v
        if best is not INF and best >= self.e * (elt.prec - 0):
            return INF
        return best

    def residue(self, elt):
        blk = self._phi_expansion(elt)[0]
        return self.residue_field.make([c % self.p for c in blk])

    def lift_residue(self, rbar, prec=None):
        return self.from_coeffs(list(rbar), prec or self.prec)

    def residue_basis_lifts(self):
        return [self.theta_power(i) for i in range(self.f)]

    def _w(self):
        """phi(theta)^e / p, a unit (trivial for unramified fields)."""
        if self._w_unit is None:
            if self.e == 1:
                self._w_unit = self.one()
            else:
                pe = self.eval_phi() ** self.e
                if any(c % self.p for c in pe.coeffs):
                    raise PrecisionExhausted("phi^e not divisible by p")
                self._w_unit = LocalElt(self, [c // self.p for c in pe.coeffs],
                                        pe.prec - 1)
        return self._w_unit

    def divide_by_uniformizer_power(self, elt, k):
        """Exact division by pi^k; requires v(elt) >= k."""
        if k == 0:
            return elt
        if self.e == 1:
            pk = self.p ** k
            if any(c % pk for c in elt.coeffs):
                raise DomainError("valuation too small for exact division")
            return LocalElt(self, [c // pk for c in elt.coeffs], elt.prec - k)
        kk = -(-k // self.e)
        t = elt * self.eval_phi() ** (kk * self.e - k) \
            * self.invert(self._w()) ** kk
        pk = self.p ** kk
        if any(c % pk for c in t.coeffs):
            raise DomainError("valuation too small for exact division")
        return LocalElt(self, [c // pk for c in t.coeffs], t.prec - kk)

    def kappa(self):
        """Residue of p / pi^e (the twist of the boundary semilinear map)."""
        if self._kappa is None:
            u = self.divide_by_uniformizer_power(self.embed_int(self.p), self.e)
            self._kappa = self.residue(u)
        return self._kappa

    # -- inversion, norms, Teichmueller --------------------------------------

    def mult_matrix(self, elt):
        cols = []
        cur = elt
        g = self.gen(elt.prec)
        for _ in range(self.degree):
            cols.append(list(cur.coeffs))
            cur = cur * g
        return [[cols[j][i] for j in range(self.degree)]
                for i in range(self.degree)]

    def invert(self, elt):
        if self.elt_valuation(elt) != 0:
            raise NotInvertible("inverse of a non-unit local element")
        n = elt.prec
        A = self.mult_matrix(elt)
        rhs = [1] + [0] * (self.degree - 1)
        x = _solve_unit_mod(A, rhs, self.p, self.p ** n)
        return LocalElt(self, x, n)

    def norm_down(self, elt):
        """Norm to Q_p as a PAdic (determinant of multiplication)."""
        d = _exact_int_det(self.mult_matrix(elt))
        return PAdic(self.p, elt.prec, d, check_prime=False)

    def teichmuller(self, elt):
        if self.elt_valuation(elt) != 0:
            raise NotInvertible("Teichmueller lift needs a unit")
        x = elt
        for _ in range(self.e * self.prec + 4):
            y = x ** self.q
            if y == x:
                break
            x = y
        return x

    def __repr__(self):
        return (f"LocalField(p={self.p}, deg={self.degree}, e={self.e}, "
                f"f={self.f})")


# ---------------------------------------------------------------------------

def make_base_field(p, prec, poly):
    """Analyze a monic integral polynomial and build the local field.

    Accepts unramified blocks and (phi-)Eisenstein blocks of boundary
    height 1 (which certify Z_p[theta] maximal). NotAField for reducible
    input, NotMonogenicAtQ when maximality cannot be certified.
    """
    if not is_prime(p):
        raise InvalidOperand(f"{p} is not prime")
    coeffs = [int(c) for c in poly]
    if len(coeffs) < 2:
        raise NotAField("defining polynomial must have degree >= 1")
    if coeffs[-1] != 1:
        raise NotAField("defining polynomial must be monic")
    if len(coeffs) == 2 and coeffs[0] == 0:
        raise NotAField("degenerate defining polynomial x (zero generator)")
    deg = len(coeffs) - 1
    if deg == 1:
        return LocalField(p, prec, coeffs, 1, 1, [(-coeffs[0]) % p, 1], None, 1)

    from sympy.polys.domains import ZZ
    from sympy.polys.galoistools import gf_factor
    lc, factors = gf_factor([c % p for c in reversed(coeffs)], p, ZZ)
    factors = sorted((tuple(int(x) for x in f), int(m)) for f, m in factors)
    if len(factors) > 1:
        raise NotAField(
            "reducible over Q_p: residue factorization has coprime parts")
    fbar_rev, mpow = factors[0]
    phibar = [c % p for c in reversed(fbar_rev)]
    d = len(phibar) - 1
    if mpow == 1:
        return LocalField(p, prec, coeffs, 1, deg, phibar, None, 1)
    phi = list(phibar)
    modulus = p ** prec
    rest = [c % modulus for c in coeffs]
    heights = []
    for _ in range(mpow):
        rest, low = _poly_divmod_monic(rest, phi, modulus)
        heights.append(min((vp_int(c, p) for c in low), default=INF))
    h0 = heights[0]
    if h0 is INF or h0 < 1:
        raise NotAField("inconsistent residue block")
    if h0 != 1:
        raise NotMonogenicAtQ(
            f"ramified block of boundary height {h0} > 1: the power order "
            "cannot be certified maximal (Eisenstein-type blocks only)")
    return LocalField(p, prec, coeffs, mpow, d, phibar, phi, mpow)


# ---------------------------------------------------------------------------

class TowerElt:
    """Tower element: base coordinates in powers of the Kummer root y,
    divided by pi_base^dexp."""

    __slots__ = ("parent", "coeffs", "dexp")

    def __init__(self, parent, coeffs, dexp=0):
        self.parent = parent
        base = parent.base
        c = list(coeffs)
        c += [base.zero()] * (parent.p - len(c))
        self.coeffs = c[:parent.p]
        self.dexp = dexp

    @property
    def prec(self):
        return min(c.prec for c in self.coeffs)

    def _bin(self, other):
        if isinstance(other, int):
            other = self.parent.embed_int(other)
        if isinstance(other, LocalElt) and other.parent is self.parent.base:
            other = self.parent.embed_base(other)
        if not isinstance(other, TowerElt) or other.parent is not self.parent:
            raise InvalidOperand("elements of different towers")
        return other

    def _aligned(self, other):
        d = max(self.dexp, other.dexp)
        pi = self.parent.base.uniformizer
        a = [c * pi ** (d - self.dexp) for c in self.coeffs] \
            if d > self.dexp else list(self.coeffs)
        b = [c * pi ** (d - other.dexp) for c in other.coeffs] \
            if d > other.dexp else list(other.coeffs)
        return a, b, d

    def __add__(self, other):
        o = self._bin(other)
        a, b, d = self._aligned(o)
        out = TowerElt(self.parent, [x + y for x, y in zip(a, b)], d)
        return out.normalized() if d else out

    __radd__ = __add__

    def __neg__(self):
        return TowerElt(self.parent, [-c for c in self.coeffs], self.dexp)

    def __sub__(self, other):
        o = self._bin(other)
        a, b, d = self._aligned(o)
        out = TowerElt(self.parent, [x - y for x, y in zip(a, b)], d)
        return out.normalized() if d else out

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._bin(other)
        T = self.parent
        n = min(self.prec, o.prec)
        out = [T.base.zero(n) for _ in range(2 * T.p - 1)]
        for i, x in enumerate(self.coeffs):
            if x.is_zero():
                continue
            for j, y in enumerate(o.coeffs):
                out[i + j] = out[i + j] + x * y
        for i in range(2 * T.p - 2, T.p - 1, -1):
            c = out[i]
            if c.is_zero():
                continue
            out[i - T.p] = out[i - T.p] + c * T.radical
        prod = TowerElt(T, out[:T.p], self.dexp + o.dexp)
        # keep the denominator bounded: unchecked growth of dexp at fixed
        # absolute coordinate precision destroys relative precision
        return prod.normalized() if prod.dexp else prod

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.parent.invert(self) ** (-k)
        r = self.parent.one()
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def __eq__(self, other):
        try:
            o = self._bin(other)
        except InvalidOperand:
            return NotImplemented
        a, b, _ = self._aligned(o)
        return all(x == y for x, y in zip(a, b))

    def __hash__(self):
        return hash(("TowerElt", id(self.parent)))

    def __repr__(self):
        return f"TowerElt({self.coeffs}, dexp={self.dexp})"

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def valuation(self):
        return self.parent.elt_valuation(self)

    def normalized(self):
        """Strip common pi_base powers from the denominator."""
        if self.dexp == 0:
            return self
        base = self.parent.base
        t = INF
        for c in self.coeffs:
            v = base.elt_valuation(c)
            if v is not INF and v < t:
                t = v
        if t is INF:
            return TowerElt(self.parent, self.coeffs, 0)
        k = min(self.dexp, int(t))
        if k <= 0:
            return self
        cs = [base.divide_by_uniformizer_power(c, k) for c in self.coeffs]
        return TowerElt(self.parent, cs, self.dexp - k)


class KummerTower:
    """K_v(y)/(y^p - alpha) for a radical alpha that is not a p-th power."""

    level = "tower"

    def __init__(self, base, alpha):
        self.base = base
        self.p = base.p
        self.prec = base.prec
        self.radical = alpha
        self.degree = base.degree * self.p
        # filled by the constructor function
        self.rel_e = None
        self.rel_f = None
        self.e = None
        self.f = None
        self.uniformizer = None
        self.residue_field = None
        self._yhat = None        # adjusted root with analyzed p-th power
        self._R_inv = None       # ramified: (pi_L^p / pi_base)^(-1)
        self._Z = None           # unramified: integral residue generator
        self._embed_res = None
        self._z_img = None
        self._kappa = None
        self._zbasis_cache = None
        self._coord_den_bound = 0  # max pi-denominator of integral coords

    # -- element constructors ----------------------------------------------

    def one(self, prec=None):
        return self.embed_base(self.base.one(prec))

    def zero(self, prec=None):
        return self.embed_base(self.base.zero(prec))

    def embed_base(self, elt):
        return TowerElt(self, [elt])

    def embed_int(self, n, prec=None):
        return self.embed_base(self.base.embed_int(n, prec))

    def gen(self, prec=None):
        b = self.base
        return TowerElt(self, [b.zero(prec), b.one(prec)])

    def y_hat(self):
        """Adjusted root whose p-th power is the analyzed unit radical."""
        return self._yhat

    def project_base(self, elt, noise=4):
        """Coerce a tower element that lies in the base field."""
        elt = elt.normalized()
        b = self.base
        for c in elt.coeffs[1:]:
            v = b.elt_valuation(c)
            if v is not INF and v < b.e * max(1, c.prec - noise):
                raise DomainError("element does not lie in the base field")
        c0 = elt.coeffs[0]
        if elt.dexp:
            c0 = b.divide_by_uniformizer_power(c0, elt.dexp)
        return c0

    # -- structure ------------------------------------------------------------

    @property
    def q(self):
        return self.base.p ** self.f

    def mstar(self):
        num, den = self.p * self.e, self.p - 1
        return num // den, num % den == 0

    def level_ceiling(self, prec):
        """Valuations are measured through the relative norm, so the ceiling
        is rel_e * e_base * prec / p."""
        return self.rel_e * self.base.e * prec // self.p

    def _base_ring(self, prec):
        b = self.base
        return {"zero": b.zero(prec), "one": b.one(prec),
                "add": lambda x, y: x + y, "mul": lambda x, y: x * y,
                "neg": lambda x: -x, "is_zero": lambda x: x.is_zero()}

    def _rel_mult_matrix(self, elt):
        cols = []
        cur = TowerElt(self, elt.coeffs, 0)
        y = self.gen(elt.prec)
        for _ in range(self.p):
            cols.append(list(cur.coeffs))
            cur = cur * y
        return [[cols[j][i] for j in range(self.p)] for i in range(self.p)]

    def relative_norm_raw(self, elt):
        """Norm to the base via the multiplication determinant."""
        det = _det_expansion(self._rel_mult_matrix(elt),
                             self._base_ring(elt.prec))
        if elt.dexp:
            det = self.base.divide_by_uniformizer_power(det,
                                                        elt.dexp * self.p)
        return det

    def elt_valuation(self, elt):
        det = _det_expansion(self._rel_mult_matrix(elt),
                             self._base_ring(elt.prec))
        v = self.base.elt_valuation(det)
        if v is INF:
            return INF
        num = self.rel_e * (v - elt.dexp * self.p)
        if num % self.p != 0:
            raise PrecisionExhausted("norm valuation incompatible with degree")
        return num // self.p

    def divide_by_uniformizer_power(self, elt, k):
        if k == 0:
            return elt
        if self.rel_e == 1:
            return TowerElt(self, elt.coeffs, elt.dexp + k).normalized()
        a, r = divmod(k, self.p)
        out = elt
        if r:
            out = out * self.uniformizer ** (self.p - r)
            a += 1
        out = out * self._R_inv ** a
        return TowerElt(self, out.coeffs, out.dexp + a).normalized()

    def residue(self, elt):
        elt = elt.normalized()
        v = self.elt_valuation(elt)
        if v is INF or v > 0:
            return self.residue_field.zero
        if v < 0:
            raise DomainError("non-integral element has no residue")
        if self.rel_f == 1:
            n = self.relative_norm_raw(elt)
            return self.residue_field.pth_root(self.base.residue(n))
        return self._residue_unram(elt)

    # -- unramified residue machinery ----------------------------------------

    def _flatten(self, elt, frame_dexp):
        pi = self.base.uniformizer
        sc = pi ** (frame_dexp - elt.dexp)
        vec = []
        for c in elt.coeffs:
            cc = c * sc if frame_dexp > elt.dexp else c
            vec.extend(cc.coeffs)
        return vec

    def _z_basis(self):
        if self._zbasis_cache is None:
            elts = []
            Zp = self.one()
            for _ in range(self.p):
                for i in range(self.base.degree):
                    elts.append(Zp * self.embed_base(self.base.theta_power(i)))
                Zp = Zp * self._Z
            self._zbasis_cache = elts
        return self._zbasis_cache

    def _residue_unram(self, elt):
        basis = self._z_basis()
        frame = max([e.dexp for e in basis] + [elt.dexp])
        cols = [self._flatten(e, frame) for e in basis]
        vec = self._flatten(elt, frame)
        prec = min([e.prec for e in basis] + [elt.prec])
        sol = _solve_min_val(cols, vec, self.base.p, prec)
        # sol[j*D + i] = Z_p-coordinate of theta^i Z^j; the Z^j-coefficient is
        # the base element with those coordinates
        L = self.residue_field
        out = L.zero
        D = self.base.degree
        for j in range(self.p):
            cj = self.base.from_coeffs(sol[j * D:(j + 1) * D], self.prec)
            term = self._embed_res.map(self.base.residue(cj))
            out = L.add(out, L.mul(term, L.pow(self._z_img, j)))
        return out

    def lift_residue(self, rbar, prec=None):
        if self.rel_f == 1:
            return self.embed_base(self.base.lift_residue(rbar, prec))
        L = self.residue_field
        p = self.base.p
        cols = []
        for j in range(self.p):
            zj = L.pow(self._z_img, j)
            for i in range(self.base.f):
                bi = self.base.residue_field.make([0] * i + [1])
                cols.append(list(L.mul(self._embed_res.map(bi), zj)))
        matrix = [[cols[c][r] for c in range(len(cols))] for r in range(L.f)]
        sol = gfq.gauss_solve_fp(matrix, list(rbar), p)
        if sol is None:
            raise PrecisionExhausted("residue lift failed")
        out = self.zero(prec)
        Zp = self.one()
        idx = 0
        for j in range(self.p):
            blk = sol[idx:idx + self.base.f]
            idx += self.base.f
            c = self.base.lift_residue(self.base.residue_field.make(blk), prec)
            out = out + self.embed_base(c) * Zp
            Zp = Zp * self._Z
        return out

    def residue_basis_lifts(self):
        if self.rel_f == 1:
            return [self.embed_base(t) for t in self.base.residue_basis_lifts()]
        lifts = []
        for i in range(self.residue_field.f):
            vec = [0] * self.residue_field.f
            vec[i] = 1
            lifts.append(self.lift_residue(self.residue_field.make(vec)))
        return lifts

    def kappa(self):
        if self._kappa is None:
            u = self.divide_by_uniformizer_power(self.embed_int(self.p), self.e)
            self._kappa = self.residue(u)
        return self._kappa

    def invert(self, elt):
        """Unit inverse: solve elt * W = pi^B with W integrally-coordinated.

        B is the tower's coordinate-denominator bound, so W = pi^B elt^(-1)
        has integral y-coordinates and the solve stays in Z_p.
        """
        elt = elt.normalized()
        if self.elt_valuation(elt) != 0:
            raise NotInvertible("inverse of a non-unit tower element")
        n = elt.prec
        D = self.base.degree
        B = self._coord_den_bound
        y = self.gen(n)
        frame = elt.dexp
        basis = [y ** j * self.embed_base(self.base.theta_power(i))
                 for j in range(self.p) for i in range(D)]
        cols = [self._flatten(elt * b, frame) for b in basis]
        rhs = self._flatten(self.embed_base(self.base.uniformizer ** B), frame)
        x = _solve_min_val(cols, rhs, self.base.p, n)
        out = self.zero(n)
        for idx, b in enumerate(basis):
            if x[idx]:
                out = out + b * self.embed_int(x[idx])
        return TowerElt(self, out.coeffs, B).normalized()

    def teichmuller(self, elt):
        if self.elt_valuation(elt) != 0:
            raise NotInvertible("Teichmueller lift needs a unit")
        x = elt
        for _ in range(self.e * self.prec + 4):
            y = x ** self.q
            if y == x:
                break
            x = y
        return x

    def norm_down(self, elt):
        return self.base.norm_down(self.relative_norm_raw(elt))

    def __repr__(self):
        return (f"KummerTower(p={self.p}, base_deg={self.base.degree}, "
                f"rel_e={self.rel_e}, rel_f={self.rel_f})")
