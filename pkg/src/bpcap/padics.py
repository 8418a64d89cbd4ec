"""Fixed-precision arithmetic in Z_p plus the analytic primitives.

A `PAdic` is an integer residue known modulo p^precision. Mixed-precision
operands coerce to the smaller precision; mixed primes are an error. The
analytic operations (Iwasawa logarithm, exponential, Teichmueller lift,
Hensel lifting) document their precision loss by *returning* values at the
reduced precision instead of pretending to full accuracy.

The prime is arbitrary (>= 2) for the ring operations so that valuation
bookkeeping at tame primes, including 2, can reuse this class; the analytic
operations require p > 2, which is all the artifact ever needs.
"""

from __future__ import annotations

import math

from .errors import (DomainError, HenselFailure, InvalidOperand,
                     NotInvertible, PrecisionExhausted)

INF = math.inf


def ilog(p: int, n: int) -> int:
    """floor(log_p(n)) for n >= 1."""
    if n < 1:
        raise ValueError("ilog needs n >= 1")
    k, q = 0, p
    while q <= n:
        q *= p
        k += 1
    return k


def series_loss(p: int, prec: int) -> int:
    """Documented precision loss of log/exp at working precision `prec`."""
    return ilog(p, max(prec, 1)) + 1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def vp_int(n: int, p: int):
    """p-adic valuation of an exact integer (inf for 0)."""
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class PAdic:
    """An element of Z_p known modulo p^prec."""

    __slots__ = ("p", "prec", "value")

    def __init__(self, p: int, prec: int, value: int, check_prime: bool = True):
        if prec < 1:
            raise PrecisionExhausted("precision must be >= 1")
        if check_prime and not is_prime(p):
            raise InvalidOperand(f"{p} is not prime")
        self.p = p
        self.prec = prec
        self.value = value % (p ** prec)

    # -- helpers ---------------------------------------------------------

    def modulus(self) -> int:
        return self.p ** self.prec

    def _coerce(self, other) -> "PAdic":
        if isinstance(other, PAdic):
            if other.p != self.p:
                raise InvalidOperand(f"mixed primes {self.p} and {other.p}")
            return other
        if isinstance(other, int):
            return PAdic(self.p, self.prec, other, check_prime=False)
        raise InvalidOperand(f"cannot combine PAdic with {type(other).__name__}")

    def at_precision(self, prec: int) -> "PAdic":
        """Truncate to a lower precision (never invents digits)."""
        if prec > self.prec:
            raise InvalidOperand("cannot raise precision of a PAdic")
        return PAdic(self.p, prec, self.value, check_prime=False)

    # -- ring structure --------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        n = min(self.prec, o.prec)
        return PAdic(self.p, n, self.value + o.value, check_prime=False)

    __radd__ = __add__

    def __neg__(self):
        return PAdic(self.p, self.prec, -self.value, check_prime=False)

    def __sub__(self, other):
        o = self._coerce(other)
        n = min(self.prec, o.prec)
        return PAdic(self.p, n, self.value - o.value, check_prime=False)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._coerce(other)
        n = min(self.prec, o.prec)
        return PAdic(self.p, n, self.value * o.value, check_prime=False)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.invert() ** (-k)
        return PAdic(self.p, self.prec, pow(self.value, k, self.modulus()),
                     check_prime=False)

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except InvalidOperand:
            return NotImplemented
        n = min(self.prec, o.prec)
        return (self.value - o.value) % self.p ** n == 0

    def __hash__(self):  # equality is congruence at shared precision
        return hash(("PAdic", self.p))

    def __repr__(self):
        return f"PAdic({self.p}^{self.prec}: {self.value})"

    def is_zero(self) -> bool:
        return self.value == 0

    # -- valuation and units ----------------------------------------------

    def valuation(self):
        """Largest v with p^v | value, or math.inf when 0 mod p^prec."""
        return vp_int(self.value, self.p)

    def unit_part(self) -> "PAdic":
        v = self.valuation()
        if v is INF:
            raise NotInvertible("zero at working precision has no unit part")
        return PAdic(self.p, self.prec - v, self.value // self.p ** v,
                     check_prime=False)

    def shift_down(self, k: int) -> "PAdic":
        """Exact division by p^k; requires p^k | value. Loses k digits."""
        if k == 0:
            return self
        if self.value % self.p ** k != 0:
            raise DomainError("value not divisible by p^k")
        if self.prec - k < 1:
            raise PrecisionExhausted("no digits left after shift")
        return PAdic(self.p, self.prec - k, self.value // self.p ** k,
                     check_prime=False)

    def invert(self) -> "PAdic":
        if self.valuation() != 0:
            raise NotInvertible(f"{self!r} is not a unit")
        return PAdic(self.p, self.prec, pow(self.value, -1, self.modulus()),
                     check_prime=False)

    def teichmuller(self) -> "PAdic":
        """The (p-1)-st root of unity congruent to self mod p."""
        if self.valuation() != 0:
            raise NotInvertible("Teichmueller lift needs a unit")
        m = self.modulus()
        x = self.value
        for _ in range(self.prec + 2):
            y = pow(x, self.p, m)
            if y == x:
                break
            x = y
        return PAdic(self.p, self.prec, x, check_prime=False)


def log_principal(u: PAdic) -> PAdic:
    """Iwasawa logarithm of a principal unit u = 1 mod p.

    Terms are accumulated with exact integer arithmetic, so the returned
    precision prec - series_loss(p, prec) is a sound lower bound.
    """
    p, prec = u.p, u.prec
    if p == 2:
        raise DomainError("p = 2 is outside the scope of the analytic layer")
    t = (1 - u).value
    lam = vp_int(t, p)
    loss = series_loss(p, prec)
    if lam is INF:
        return PAdic(p, prec - loss, 0, check_prime=False)
    if lam < 1:
        raise DomainError("log_principal needs u = 1 mod p")
    guard = loss + 2
    big = p ** (prec + guard)
    kmax = (prec + guard + 4) // lam + p + 2
    acc = 0
    powt = 1
    for k in range(1, kmax + 1):
        powt = powt * t % big
        kk, vk = k, 0
        while kk % p == 0:
            kk //= p
            vk += 1
        term = powt // p ** vk  # exact: v_p(powt) >= k*lam >= vk
        acc = (acc + term * pow(kk, -1, big)) % big
    return PAdic(p, prec - loss, -acc, check_prime=False)


def exp_principal(x: PAdic) -> PAdic:
    """Exponential sum x^k / k! for v(x) >= 1 (convergent since p > 2)."""
    p, prec = x.p, x.prec
    if p == 2:
        raise DomainError("p = 2 is outside the scope of the analytic layer")
    vx = x.valuation()
    loss = series_loss(p, prec)
    if vx is INF:
        return PAdic(p, prec - loss, 1, check_prime=False)
    if vx < 1:
        raise DomainError("exp_principal needs valuation >= 1")
    kmax = 2
    while kmax * vx - (kmax - 1) // (p - 1) < prec + 2:
        kmax += 1
    vfact_max = sum(kmax // p ** j for j in range(1, ilog(p, kmax) + 1))
    big = p ** (prec + vfact_max + 2)
    acc = 1
    powx = 1
    fact_unit = 1
    vfact = 0
    xv = x.value
    for k in range(1, kmax + 1):
        powx = powx * xv % big
        kk, vk = k, 0
        while kk % p == 0:
            kk //= p
            vk += 1
        vfact += vk
        fact_unit = fact_unit * kk % big
        # powx is divisible by p^vfact: v(true x^k) >= k*vx >= vfact and the
        # representative error is a multiple of big
        acc = (acc + powx // p ** vfact * pow(fact_unit, -1, big)) % big
    return PAdic(p, prec - loss, acc, check_prime=False)


def poly_eval(coeffs, x: PAdic) -> PAdic:
    """Evaluate a polynomial with int/PAdic coefficients at x (Horner)."""
    acc = PAdic(x.p, x.prec, 0, check_prime=False)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_derivative(coeffs):
    return [i * c for i, c in enumerate(coeffs)][1:]


def hensel_lift(coeffs, x0: PAdic) -> PAdic:
    """Newton-lift a root of the polynomial from the approximation x0.

    Requires v(f(x0)) > 2 v(f'(x0)); returns x* with f(x*) = 0 at precision
    prec - v(f'(x0)) and x* = x0 mod p^(v+1).
    """
    p, prec = x0.p, x0.prec
    fx = poly_eval(coeffs, x0)
    dcoeffs = poly_derivative(coeffs)
    dfx = poly_eval(dcoeffs, x0)
    w = dfx.valuation()
    v0 = fx.valuation()
    if v0 is INF:
        return x0
    if w is INF or v0 <= 2 * w:
        raise HenselFailure(
            f"criterion v(f(x0)) > 2 v(f'(x0)) fails: {v0} <= 2*{w}")
    x = x0
    for _ in range(prec + 2):
        fx = poly_eval(coeffs, x)
        vf = fx.valuation()
        if vf is INF or vf >= prec - w:
            break
        dfx = poly_eval(dcoeffs, x)
        step = fx.value // p ** w * pow(dfx.value // p ** w, -1, x.modulus())
        x = x - step
    return PAdic(p, prec - w, x.value, check_prime=False)
