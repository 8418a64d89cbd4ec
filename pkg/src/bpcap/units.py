"""Principal-unit filtration machinery over base fields and Kummer towers.

The central routine pushes a principal unit up the filtration U^(1) of a
local field by multiplying with p-th powers: below the stabilization bound
p*e/(p-1) a level divisible by p absorbs via a residue p-th root, a level
prime to p is a hard obstruction (the ramified Kummer direction), the
integral boundary level is decided by the semilinear map s -> s^p + kappa*s
(unramified direction when unsolvable), and any unit past the bound is a
p-th power with a constructive witness. Everything the capitulation layer
needs (p-th power tests, mu-groups, tower types, Galois action, norms)
reduces to this walk.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import gfq
from .errors import (DomainError, InvalidOperand, NotInvertible, NotKummer,
                     PrecisionExhausted)
from .localfields import (INF, KummerTower, MuGroup, SplitMarker, TowerElt,
                          make_base_field)


def check_unit_precision(field):
    """Documented sufficiency margin for the p-th power machinery."""
    m = field.mstar()[0] + 1
    need = m + 2 * field.e + 5
    if field.prec < need:
        raise PrecisionExhausted(
            f"working precision {field.prec} < {need} required for the "
            f"unit filtration of a field with e={field.e}")


def unit_level(field, u):
    """Filtration level v(u - 1) of a principal unit."""
    return field.elt_valuation(u - field.one(u.prec))


def level_floor(field, prec, margin=6):
    """A conservative 'indistinguishable from zero' level at this precision."""
    return field.level_ceiling(prec) - field.e * margin


def eq_at_margin(field, a, b, margin=6):
    """Equality up to the documented working-precision margin."""
    v = field.elt_valuation(a - b)
    return v is INF or v >= level_floor(field, min(a.prec, b.prec), margin)


def is_one_at_margin(field, u, margin=6):
    return eq_at_margin(field, u, field.one(u.prec), margin)


@dataclass
class PushOutcome:
    status: str            # "pth_power" | "ramified" | "unramified"
    witness_part: object   # W with u = W^p * reduced
    reduced: object
    stuck_level: object = None
    residual: object = None


def push_principal(field, u):
    """Walk a principal unit up the filtration, deciding (U^(1))^p-membership."""
    check_unit_precision(field)
    p = field.p
    e = field.e
    kfield = field.residue_field
    mfloor, mint = field.mstar()
    witness = field.one()
    cur = u
    for _ in range(e * field.prec + 16):
        lam = unit_level(field, cur)
        if lam is INF or (p - 1) * lam > p * e:
            return PushOutcome("pth_power", witness, cur)
        abar = field.residue(
            field.divide_by_uniformizer_power(cur - field.one(cur.prec), lam))
        if mint and (p - 1) * lam == p * e:
            s = kfield.solve_semilinear(field.kappa(), abar)
            if s is None:
                return PushOutcome("unramified", witness, cur, lam, abar)
            corr = field.one() + field.lift_residue(s) * field.uniformizer ** (e // (p - 1))
        elif lam % p == 0:
            s = kfield.pth_root(abar)
            corr = field.one() + field.lift_residue(s) * field.uniformizer ** (lam // p)
        else:
            return PushOutcome("ramified", witness, cur, lam, abar)
        witness = witness * corr
        nxt = cur * field.invert(corr) ** p
        nlam = unit_level(field, nxt)
        if nlam is not INF and nlam <= lam:
            raise PrecisionExhausted("filtration level failed to increase")
        cur = nxt
    raise PrecisionExhausted("filtration walk did not terminate")


def tail_pth_root(field, r, stop_margin=4):
    """Constructive p-th root of r in U^(lam) with (p-1)*lam > p*e.

    Returns t with t^p = r at level >= e*(prec - stop_margin).
    """
    p, e = field.p, field.e
    kinv = field.residue_field.inv(field.kappa())
    root = field.one()
    stop = level_floor(field, field.prec, stop_margin)
    for _ in range(e * field.prec + 16):
        lam = unit_level(field, r)
        if lam is INF or lam >= stop:
            return root
        if (p - 1) * lam <= p * e:
            raise DomainError("tail root called below the stabilization bound")
        abar = field.residue(
            field.divide_by_uniformizer_power(r - field.one(r.prec), lam))
        s = field.residue_field.mul(abar, kinv)
        t = field.one() + field.lift_residue(s) * field.uniformizer ** (lam - e)
        root = root * t
        r = r * field.invert(t) ** p
        nlam = unit_level(field, r)
        if nlam is not INF and nlam <= lam:
            raise PrecisionExhausted("tail root stalled")
    raise PrecisionExhausted("tail root did not converge")


def principal_part(field, u):
    """Teichmueller factorization u = omega * <u>; returns (omega, <u>)."""
    om = field.teichmuller(u)
    return om, u * field.invert(om)


def is_pth_power(field, u, want_witness=True):
    """Decide u in (F^x)^p; returns (bool, witness_or_None, PushOutcome_or_None).

    Units are split into Teichmueller and principal parts; non-units reduce
    by uniformizer powers and need p | v(u).
    """
    p = field.p
    v = field.elt_valuation(u)
    if v is INF:
        raise DomainError("cannot test zero for p-th power membership")
    if v != 0:
        if v % p != 0:
            return False, None, PushOutcome("ramified", None, u, v, None)
        u0 = field.divide_by_uniformizer_power(u, v)
        ok, w, outcome = is_pth_power(field, u0, want_witness)
        if not ok:
            return False, None, outcome
        if want_witness:
            w = w * field.uniformizer ** (v // p)
        return True, w, None
    om, u1 = principal_part(field, u)
    om_root = om ** pow(p, -1, field.q - 1)
    outcome = push_principal(field, u1)
    if outcome.status != "pth_power":
        return False, None, outcome
    if not want_witness:
        return True, None, None
    t = tail_pth_root(field, outcome.reduced)
    w = om_root * outcome.witness_part * t
    if not _pth_power_check(field, w, u):
        raise PrecisionExhausted("p-th power witness failed verification")
    return True, w, None


def _pth_power_check(field, w, u, margin=6):
    diff = w ** field.p - u
    v = field.elt_valuation(diff)
    return v is INF or v >= level_floor(field, min(w.prec, u.prec), margin)


def zeta_p_of(field):
    """A primitive p-th root of unity, or None.

    Existence criterion: (p-1) | e and -kappa a (p-1)-st power in the
    residue field; the root is lifted constructively and verified.
    """
    p, e = field.p, field.e
    if e % (p - 1) != 0:
        return None
    kf = field.residue_field
    mk = kf.neg(field.kappa())
    if not kf.eq(kf.pow(mk, (kf.q - 1) // (p - 1)), kf.one):
        return None
    z0 = None
    for a in kf.elements():
        if not kf.is_zero(a) and kf.eq(kf.pow(a, p - 1), mk):
            z0 = a
            break
    if z0 is None:
        return None
    c = e // (p - 1)
    x0 = field.one() + field.lift_residue(z0) * field.uniformizer ** c
    r = x0 ** p
    lam = unit_level(field, r)
    if lam is not INF and (p - 1) * lam <= p * e:
        raise PrecisionExhausted("p-th root of unity lift failed")
    t = tail_pth_root(field, r)
    zeta = x0 * field.invert(t)
    if unit_level(field, zeta) is INF:
        raise PrecisionExhausted("trivial lift where zeta_p was certified")
    if not _pth_power_check(field, zeta, field.one()):
        raise PrecisionExhausted("zeta_p candidate fails zeta^p = 1")
    return zeta


def newton_polish_unity(field, x, k):
    """Sharpen an approximate p^k-th root of unity by Newton steps."""
    p = field.p
    ek = field.e * k
    pk_unit = field.invert(
        field.divide_by_uniformizer_power(field.embed_int(p ** k), ek))
    for _ in range(4):
        r = x ** (p ** k) - field.one(x.prec)
        v = field.elt_valuation(r)
        if v is INF or v >= level_floor(field, x.prec, 2):
            break
        if v <= ek:
            raise PrecisionExhausted("root-of-unity polish out of basin")
        step = field.divide_by_uniformizer_power(r, ek) * pk_unit \
            * field.invert(x ** (p ** k - 1))
        x = x - step
    return x


def mu_p_part(field):
    """The p-part mu_{p^k} of the roots of unity, with a generator."""
    check_unit_precision(field)
    zeta = zeta_p_of(field)
    if zeta is None:
        return MuGroup(field, 0, None)
    k = 1
    gen = newton_polish_unity(field, zeta, 1)
    while k <= 12:
        ok, w, _ = is_pth_power(field, gen)
        if not ok:
            break
        if unit_level(field, w) is INF:
            raise PrecisionExhausted("degenerate p-th root in mu chain")
        k += 1
        gen = newton_polish_unity(field, w, k)
    return MuGroup(field, k, gen)


def torsion_exponent(field, u, zeta, order, min_gap=4):
    """The exponent a with u = zeta^a in a cyclic torsion group of `order`.

    Decides by maximal agreement level and requires a decisive separation
    from the runner-up; PrecisionExhausted when ambiguous.
    """
    scored = []
    for a in range(order):
        v = field.elt_valuation(u - zeta ** a)
        scored.append((float("inf") if v is INF else v, a))
    scored.sort(reverse=True)
    best, second = scored[0], scored[1]
    if best[0] == float("inf") or best[0] >= second[0] + min_gap:
        return best[1]
    raise PrecisionExhausted(
        f"torsion exponent ambiguous (levels {best[0]} vs {second[0]})")


# ---------------------------------------------------------------------------
# tower construction

def make_kummer_tower(base, alpha, p=None):
    """Build K_v(alpha^(1/p)) or detect the split case.

    Returns a SplitMarker when alpha is a p-th power in the base, otherwise
    the analyzed KummerTower (ramified or unramified of relative degree p).
    """
    if p is not None and p != base.p:
        raise InvalidOperand("tower prime must match the base field")
    p = base.p
    check_unit_precision(base)
    v = base.elt_valuation(alpha)
    if v is INF:
        raise DomainError("radical must be nonzero")
    t, r = divmod(v, p)

    if r != 0:
        T = KummerTower(base, alpha)
        T.rel_e, T.rel_f = p, 1
        T.e, T.f = base.e * p, base.f
        T.residue_field = base.residue_field
        yhat = TowerElt(T, [base.zero(), base.one()], t)
        T._yhat = yhat
        x = pow(r, -1, p)
        s = (x * r - 1) // p
        piL = yhat ** x
        piL = TowerElt(T, piL.coeffs, piL.dexp + s)
        T._coord_den_bound = (p - 1) * (x * t + s) + 1
        _finalize_ramified(T, piL)
        return T

    alpha_u = base.divide_by_uniformizer_power(alpha, v) if v else alpha
    om, u1 = principal_part(base, alpha_u)
    om_root = om ** pow(p, -1, base.q - 1)
    outcome = push_principal(base, u1)

    if outcome.status == "pth_power":
        tail = tail_pth_root(base, outcome.reduced)
        w = om_root * outcome.witness_part * tail * base.uniformizer ** t
        if not _pth_power_check(base, w, alpha):
            raise PrecisionExhausted("split witness failed verification")
        return SplitMarker(base, w)

    T = KummerTower(base, alpha)
    adj = base.invert(om_root * outcome.witness_part)
    if outcome.status == "ramified":
        lam = outcome.stuck_level
        T.rel_e, T.rel_f = p, 1
        T.e, T.f = base.e * p, base.f
        T.residue_field = base.residue_field
        yhat = TowerElt(T, [base.zero(), adj], t)
        T._yhat = yhat
        got = T.elt_valuation(yhat - T.one())
        if got != lam:
            raise PrecisionExhausted(
                f"root level {got} does not match the stuck level {lam}")
        x = pow(lam, -1, p)
        s = (x * lam - 1) // p
        piL = (yhat - T.one()) ** x
        piL = TowerElt(T, piL.coeffs, piL.dexp + s)
        T._coord_den_bound = (p - 1) * (piL.dexp) + 1
        _finalize_ramified(T, piL)
        return T

    # unramified case: stuck at the boundary with unsolvable residual
    T.rel_e, T.rel_f = 1, p
    T.e, T.f = base.e, base.f * p
    c = base.e // (p - 1)
    yhat = TowerElt(T, [base.zero(), adj], t)
    T._yhat = yhat
    if T.elt_valuation(yhat - T.one()) != c:
        raise PrecisionExhausted("unramified root level mismatch")
    zraw = yhat - T.one()
    Z = TowerElt(T, zraw.coeffs, zraw.dexp + c)
    T._Z = Z
    T._coord_den_bound = (p - 1) * Z.dexp + 1
    ext, embed, z_img = gfq.extend_by_semilinear(
        base.residue_field, base.kappa(), outcome.residual)
    T.residue_field = ext
    T._embed_res = embed
    T._z_img = z_img
    T.uniformizer = T.embed_base(base.uniformizer)
    if T.elt_valuation(T.uniformizer) != 1 or T.elt_valuation(Z) != 0:
        raise PrecisionExhausted("unramified tower data failed checks")
    if not ext.eq(T.residue(Z), z_img):
        raise PrecisionExhausted("residue generator mismatch")
    return T


def _finalize_ramified(T, piL):
    if T.elt_valuation(piL) != 1:
        raise PrecisionExhausted("uniformizer candidate has wrong valuation")
    T.uniformizer = piL
    Rp = piL ** T.p
    R = TowerElt(T, Rp.coeffs, Rp.dexp + 1).normalized()
    if T.elt_valuation(R) != 0:
        raise PrecisionExhausted("pi_L^p / pi is not a unit")
    T._R_inv = T.invert(R)


# ---------------------------------------------------------------------------
# Galois action, norms, W^(1-s)

@dataclass
class GaloisAction:
    """Generator of Gal(L_w/K_v) for a nonsplit Kummer tower: y -> zeta_1 y."""
    tower: object
    zeta1: object      # base element of order p

    def apply(self, elt):
        T = self.tower
        zp = T.base.one(elt.prec)
        out = []
        for c in elt.coeffs:
            out.append(c * zp)
            zp = zp * self.zeta1
        return TowerElt(T, out, elt.dexp)


def galois_generator(tower):
    """The automorphism sending the Kummer root y to zeta_p * y."""
    mu = mu_p_part(tower.base)
    if mu.k == 0:
        raise NotKummer("the base field has no p-th roots of unity")
    zeta1 = mu.zeta ** (tower.base.p ** (mu.k - 1))
    return GaloisAction(tower, zeta1)


def relative_norm(tower, elt):
    """Norm to the base field (multiplication determinant; no zeta_p needed)."""
    return tower.relative_norm_raw(elt)


def galois_norm(tower, elt):
    """prod_i s^i(elt), coerced to the base: cross-check of relative_norm."""
    s = galois_generator(tower)
    acc = elt
    cur = elt
    for _ in range(tower.p - 1):
        cur = s.apply(cur)
        acc = acc * cur
    return tower.project_base(acc)


@dataclass
class WOneMinusS:
    """Description of W^(1-s) = { zeta^(1-s) } for one nonsplit place."""
    order: int
    generator: object          # tower element (None when trivial)
    contains_zeta1: bool


def w_one_minus_s(tower):
    """The group mu(L_w)^(1-s), its order (1 or p), and whether it contains
    the embedded zeta_1."""
    mu_base = mu_p_part(tower.base)
    mu_top = mu_p_part(tower)
    if mu_top.k == 0 or mu_base.k == 0:
        return WOneMinusS(1, None, False)
    s = galois_generator(tower)
    zeta_L = mu_top.zeta
    g = zeta_L * tower.invert(s.apply(zeta_L))
    if is_one_at_margin(tower, g):
        return WOneMinusS(1, None, False)
    if not is_one_at_margin(tower, g ** tower.p):
        raise PrecisionExhausted("zeta^(1-s) has order above p")
    z1 = tower.embed_base(s.zeta1)
    contains = any(eq_at_margin(tower, g ** j, z1)
                   for j in range(1, tower.p))
    return WOneMinusS(tower.p, g, contains)
