"""Exact characteristic polynomials and certified real root isolation.

Matrices here are small non-negative integer matrices, so everything can be
done exactly: characteristic polynomials via the Faddeev-LeVerrier recursion
(which also yields the adjugate of ``x I - A`` as integer matrix
coefficients), root counting via Sturm chains over the rationals, and root
refinement by plain bisection with exact sign evaluation.  A certified root
is carried as an isolating rational interval (or an exact rational) and can
be refined on demand and converted to an outward-rounded enclosure.
"""

from __future__ import annotations

from fractions import Fraction

from . import intervals as ia
from .errors import SpectralError

# Polynomials are coefficient tuples, low degree first: p[k] is the
# coefficient of x**k, integer or Fraction.

_ZERO = (Fraction(0),)


def poly_eval(p, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_degree(p) -> int:
    d = len(p) - 1
    while d > 0 and p[d] == 0:
        d -= 1
    return d


def poly_trim(p):
    return tuple(p[:poly_degree(p) + 1])


def is_zero_poly(p) -> bool:
    return all(c == 0 for c in p)


def poly_derivative(p):
    return tuple(k * p[k] for k in range(1, len(p))) or (0,)


def poly_divmod(a, b):
    """Euclidean division over the rationals."""
    a = [Fraction(c) for c in a]
    b = [Fraction(c) for c in poly_trim(b)]
    if is_zero_poly(b):
        raise ZeroDivisionError("polynomial division by zero")
    db = len(b) - 1
    q = [Fraction(0)] * max(1, len(a) - db)
    while not is_zero_poly(a) and poly_degree(a) >= db:
        da = poly_degree(a)
        c = a[da] / b[db]
        q[da - db] += c
        for i in range(db + 1):
            a[da - db + i] -= c * b[i]
        a[da] = Fraction(0)
    return poly_trim(tuple(q)), poly_trim(tuple(a))


def poly_gcd(a, b):
    """Monic gcd over the rationals."""
    a = poly_trim(tuple(Fraction(c) for c in a))
    b = poly_trim(tuple(Fraction(c) for c in b))
    while not is_zero_poly(b):
        _, r = poly_divmod(a, b)
        a, b = b, r
    if is_zero_poly(a):
        return _ZERO
    lead = a[poly_degree(a)]
    return tuple(c / lead for c in a)


def square_free_part(p):
    p = poly_trim(tuple(Fraction(c) for c in p))
    if poly_degree(p) <= 1:
        return p
    g = poly_gcd(p, poly_derivative(p))
    if poly_degree(g) == 0:
        return p
    q, r = poly_divmod(p, g)
    assert is_zero_poly(r)
    return q


def sturm_chain(p):
    chain = [poly_trim(tuple(Fraction(c) for c in p))]
    if poly_degree(chain[0]) == 0:
        return chain
    chain.append(poly_trim(poly_derivative(chain[0])))
    while True:
        _, r = poly_divmod(chain[-2], chain[-1])
        if is_zero_poly(r):
            break
        chain.append(tuple(-c for c in r))
    return chain


def _sign_variations(chain, x: Fraction) -> int:
    signs = []
    for q in chain:
        v = poly_eval(q, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for i in range(len(signs) - 1) if signs[i] != signs[i + 1])


def count_roots(p, lo: Fraction, hi: Fraction, chain=None) -> int:
    """Number of distinct real roots in the half-open interval (lo, hi]."""
    if lo >= hi:
        return 0
    if chain is None:
        chain = sturm_chain(square_free_part(p))
    return _sign_variations(chain, lo) - _sign_variations(chain, hi)


def cauchy_bound(p) -> Fraction:
    """All real roots lie in [-B, B]."""
    p = poly_trim(p)
    d = poly_degree(p)
    lead = abs(Fraction(p[d]))
    if lead == 0:
        raise SpectralError("zero polynomial")
    return 1 + max((abs(Fraction(c)) / lead for c in p[:d]), default=Fraction(0))


class CertifiedRoot:
    """A single real root of a rational polynomial.

    Carried either exactly (``exact`` is a Fraction) or as an open isolating
    interval ``(lo, hi)`` containing exactly one root of the polynomial, with
    nonzero polynomial values at the endpoints.  ``refine`` bisects with
    exact arithmetic, so enclosures can be tightened indefinitely.
    """

    def __init__(self, poly, lo=None, hi=None, exact=None):
        self.poly = poly_trim(tuple(Fraction(c) for c in poly))
        self.sqfree = square_free_part(self.poly)
        self._chain = sturm_chain(self.sqfree)
        if exact is not None:
            self.exact = Fraction(exact)
            if poly_eval(self.poly, self.exact) != 0:
                raise SpectralError("claimed exact root is not a root")
            self.lo = self.hi = self.exact
            return
        self.exact = None
        self.lo = Fraction(lo)
        self.hi = Fraction(hi)
        if poly_eval(self.poly, self.lo) == 0 or poly_eval(self.poly, self.hi) == 0:
            raise SpectralError("isolating interval endpoints must not be roots")
        if count_roots(self.poly, self.lo, self.hi, self._chain) != 1:
            raise SpectralError("interval does not isolate exactly one root")

    # -- refinement ---------------------------------------------------------

    def refine(self, max_width: Fraction):
        if self.exact is not None:
            return self
        while self.hi - self.lo > max_width:
            mid = (self.lo + self.hi) / 2
            if poly_eval(self.poly, mid) == 0:
                self.exact = mid
                self.lo = self.hi = mid
                return self
            if count_roots(self.poly, self.lo, mid, self._chain) == 1:
                self.hi = mid
            else:
                self.lo = mid
        return self

    def refine_bits(self, bits: int):
        scale = max(abs(self.lo), abs(self.hi), Fraction(1))
        return self.refine(scale / (Fraction(2) ** bits))

    def refine_to_exclude(self, x: Fraction):
        """Shrink until x is outside the open interval (or recognised as the
        root itself, making the root exact)."""
        if self.exact is not None:
            return self
        if self.lo < x < self.hi and poly_eval(self.poly, x) == 0:
            self.exact = x
            self.lo = self.hi = x
            return self
        while self.lo < x < self.hi:
            self.refine((self.hi - self.lo) / 4)
        return self

    # -- conversions ---------------------------------------------------------

    def interval(self, bits=None):
        """Outward interval enclosure at roughly the requested relative width."""
        if bits is None:
            bits = ia.precision_bits() - 16
        self.refine_bits(bits)
        if self.exact is not None:
            return ia.from_fraction(self.exact)
        return ia.from_endpoints(self.lo, self.hi)

    def __float__(self):
        self.refine_bits(60)
        return float((self.lo + self.hi) / 2)

    def as_fraction_pair(self):
        return (self.lo, self.hi)

    # -- exact comparisons ------------------------------------------------------

    def compare(self, other) -> int:
        """Exact three-way comparison (-1, 0, +1) with a Fraction, int, or
        another certified root.  Equality of two irrational roots is decided
        through the gcd of their defining polynomials."""
        if isinstance(other, (int, Fraction)):
            x = Fraction(other)
            if self.exact is not None:
                return (self.exact > x) - (self.exact < x)
            self.refine_to_exclude(x)
            if self.exact is not None:
                return (self.exact > x) - (self.exact < x)
            return 1 if self.lo >= x else -1
        if self.exact is not None:
            return -other.compare(self.exact) if other.exact is None else (
                (self.exact > other.exact) - (self.exact < other.exact))
        if other.exact is not None:
            return -((CertifiedRoot.compare(other, self)))
        for _ in range(4096):
            if self.hi <= other.lo:
                return -1
            if other.hi <= self.lo:
                return 1
            g = poly_gcd(self.sqfree, other.sqfree)
            if poly_degree(g) > 0:
                lo = max(self.lo, other.lo)
                hi = min(self.hi, other.hi)
                if count_roots(g, lo, hi) >= 1:
                    # a common root inside both open isolating intervals is
                    # the root of each of them (endpoints are never roots)
                    return 0
            w = min(self.hi - self.lo, other.hi - other.lo) / 4
            self.refine(w)
            other.refine(w)
        raise SpectralError("root comparison did not converge")

    def __repr__(self):
        if self.exact is not None:
            return f"CertifiedRoot({self.exact})"
        return f"CertifiedRoot(~{float(self):.12g})"


def largest_real_root(p) -> CertifiedRoot:
    """The maximal real root of p, isolated and certified.

    Integer roots are recognised and returned exactly.
    """
    p = poly_trim(tuple(Fraction(c) for c in p))
    chain = sturm_chain(square_free_part(p))
    bound = cauchy_bound(p)
    lo, hi = -bound - 1, bound + 1
    if count_roots(p, lo, hi, chain) == 0:
        raise SpectralError("polynomial has no real root")
    cut = lo
    for _ in range(20000):
        # invariant: the largest root lies in (cut, hi], hi is not a root
        if count_roots(p, cut, hi, chain) == 1 and poly_eval(p, cut) != 0:
            root = CertifiedRoot(p, cut, hi)
            for n in _integer_candidates(cut, hi):
                if poly_eval(p, Fraction(n)) == 0:
                    return CertifiedRoot(p, exact=Fraction(n))
            return root
        mid = (cut + hi) / 2
        if poly_eval(p, mid) == 0:
            if count_roots(p, mid, hi, chain) == 0:
                return CertifiedRoot(p, exact=mid)
            cut = mid
            continue
        if count_roots(p, mid, hi, chain) >= 1:
            cut = mid
        else:
            hi = mid
    raise SpectralError("root isolation did not converge")


def _integer_candidates(lo: Fraction, hi: Fraction, cap: int = 64):
    first = lo.numerator // lo.denominator
    out = []
    n = first
    while n <= hi and len(out) < cap:
        if lo < n < hi:
            out.append(n)
        n += 1
    return out


# -- integer matrices ------------------------------------------------------------


def char_poly_and_adjugate(a):
    """Characteristic polynomial of an integer matrix plus the adjugate of
    ``x I - A`` as polynomial matrix coefficients.

    Returns ``(p, B)`` with ``p`` the monic characteristic polynomial
    (low degree first, integer coefficients) and ``B`` a list of integer
    matrices such that ``adj(x I - A) = sum_k x**k B[k]``.
    """
    n = len(a)
    if n == 0:
        return (1,), []
    coeffs = [Fraction(1)]  # by decreasing degree
    m = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    mats = [m]
    for k in range(1, n + 1):
        am = [[sum(a[i][t] * m[t][j] for t in range(n)) for j in range(n)]
              for i in range(n)]
        c = Fraction(-sum(am[i][i] for i in range(n)), k)
        coeffs.append(c)
        if k < n:
            m = [[am[i][j] + (c if i == j else 0) for j in range(n)]
                 for i in range(n)]
            mats.append(m)
    for c in coeffs:
        if c.denominator != 1:
            raise SpectralError("Faddeev-LeVerrier produced a non-integer coefficient")
    poly = tuple(int(c) for c in reversed(coeffs))
    bmats = [tuple(tuple(int(x) for x in row) for row in mm)
             for mm in reversed(mats)]
    # bmats[k] holds the x**k coefficient of adj(xI - A)
    return poly, bmats


def adjugate_at(bmats, x):
    """Interval evaluation of adj(x I - A) at an interval point x (Horner)."""
    if not bmats:
        return ()
    n = len(bmats[0])
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = ia.zero()
            for bm in reversed(bmats):
                acc = acc * x + ia.exact(bm[i][j])
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def char_poly_at(poly, x):
    """Interval evaluation of an integer polynomial at an interval point."""
    acc = ia.zero()
    for c in reversed(poly):
        acc = acc * x + ia.exact(int(c))
    return acc
