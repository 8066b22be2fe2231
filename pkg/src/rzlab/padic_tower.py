"""Fixed-precision arithmetic in O_F and in O_E = O_F[Pi].

O_F is an Eisenstein extension of degree e of the Galois ring
GR(2^K, f) = (Z/2^K)[x]/(g).  An element is stored flat: coefficient of
pi0^i * x^j sits at index i*f + j.  Every element remembers its absolute
pi0-adic precision; valuations that cannot be resolved are reported as
``ZERO`` (zero to the available precision), never as infinity.

Elements of E with negative valuation are handled by the floating types
``FElt`` (pi0^n * unit of O_F) and ``EElt`` (Pi^n * unit of O_E).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    InputError,
    InvalidEisenstein,
    NotAUnit,
    PrecisionExhausted,
    ReducibleUnramifiedPoly,
)

DEFAULT_PRECISION = 24
KINDS = ("RP", "RU", "UNRAM")


class _ZeroMarker:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "ZERO"

    def __reduce__(self):
        return (_ZeroMarker, ())


ZERO = _ZeroMarker()


def default_precision() -> int:
    raw = os.environ.get("RZLAB_PRECISION")
    if not raw:
        return DEFAULT_PRECISION
    try:
        n = int(raw)
    except ValueError as exc:
        raise InputError(f"RZLAB_PRECISION must be an integer, got {raw!r}") from exc
    if n < 4:
        raise InputError("RZLAB_PRECISION must be at least 4")
    return n


def _v2(n: int) -> int:
    return (n & -n).bit_length() - 1


# ---------------------------------------------------------------------------
# residue field


class ResidueField:
    """F_{2^f} with elements encoded as bit masks of polynomial coefficients."""

    def __init__(self, modulus_bits: int):
        self.modulus = modulus_bits
        self.f = modulus_bits.bit_length() - 1
        self.q = 1 << self.f

    def mul(self, a: int, b: int) -> int:
        r = 0
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a >> self.f & 1:
                a ^= self.modulus
        return r

    def pow(self, a: int, n: int) -> int:
        r = 1
        while n:
            if n & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            n >>= 1
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in the residue field")
        return self.pow(a, self.q - 2)

    def has_root(self, coeffs: Sequence[int]) -> bool:
        """Does sum coeffs[i] X^i vanish somewhere on F_q?"""
        for x in range(self.q):
            acc = 0
            for c in reversed(coeffs):
                acc = self.mul(acc, x) ^ c
            if acc == 0:
                return True
        return False


def _poly_mod2_rem(a: int, b: int) -> int:
    db = b.bit_length() - 1
    while a and a.bit_length() - 1 >= db:
        a ^= b << (a.bit_length() - 1 - db)
    return a


def irreducible_mod2(bits: int) -> bool:
    """Exhaustive trial division over F_2."""
    deg = bits.bit_length() - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for cand in range(1 << d, 1 << (d + 1)):
            if _poly_mod2_rem(bits, cand) == 0:
                return False
    return True


def _coeffs_to_bits(coeffs: Sequence[int]) -> int:
    return sum((c & 1) << i for i, c in enumerate(coeffs))


def smallest_irreducible(f: int) -> tuple[int, ...]:
    for bits in range(1 << f, 1 << (f + 1)):
        if irreducible_mod2(bits):
            return tuple((bits >> i) & 1 for i in range(f + 1))
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# base field


@dataclass(frozen=True)
class FieldDescriptor:
    """Parameters of F | Q_2: inertia degree f, ramification e, precision N.

    ``unram_poly`` is the ascending coefficient list of a monic degree-f
    polynomial irreducible mod 2; ``eisenstein`` is the ascending list of the
    e+1 coefficients (each an f-tuple over the Galois ring) of the minimal
    polynomial of pi0.
    """

    f: int
    e: int
    unram_poly: tuple[int, ...]
    eisenstein: tuple[tuple[int, ...], ...]
    precision: int = DEFAULT_PRECISION
    p: int = 2

    def __post_init__(self):
        if self.f < 1 or self.e < 1:
            raise InputError("f and e must be positive")
        if self.precision < 4:
            raise InputError("precision must be at least 4")
        if len(self.unram_poly) != self.f + 1 or self.unram_poly[-1] != 1:
            raise ReducibleUnramifiedPoly("unramified polynomial must be monic of degree f")
        if not irreducible_mod2(_coeffs_to_bits(self.unram_poly)):
            raise ReducibleUnramifiedPoly(f"{self.unram_poly} is reducible mod 2")
        eis = self.eisenstein
        if len(eis) != self.e + 1 or any(len(c) != self.f for c in eis):
            raise InvalidEisenstein("Eisenstein polynomial must have e+1 coefficients of length f")
        if eis[-1] != (1,) + (0,) * (self.f - 1):
            raise InvalidEisenstein("Eisenstein polynomial must be monic")
        if _gr_v2(eis[0]) != 1:
            raise InvalidEisenstein("constant term must be 2 times a unit")
        for c in eis[1:-1]:
            if _gr_v2(c) < 1:
                raise InvalidEisenstein("middle coefficients must be divisible by 2")

    def __reduce__(self):
        # rebuild from the defining fields; cached constants are recomputed
        return (FieldDescriptor, (self.f, self.e, self.unram_poly, self.eisenstein, self.precision, self.p))

    # -- derived constants ------------------------------------------------
    @property
    def q(self) -> int:
        return 1 << self.f

    @cached_property
    def K(self) -> int:
        # one spare bit so that exact halving keeps N digits
        return -(-self.precision // self.e) + 1

    @cached_property
    def mask(self) -> int:
        return (1 << self.K) - 1

    @cached_property
    def residue_field(self) -> ResidueField:
        return ResidueField(_coeffs_to_bits(self.unram_poly))

    @cached_property
    def _xf(self) -> tuple[int, ...]:
        # x^f = -sum g_i x^i
        return tuple(-c for c in self.unram_poly[:-1])

    @cached_property
    def _pi_e(self) -> list[tuple[int, ...]]:
        # pi0^e = -sum a_i pi0^i, as GR coefficients
        return [tuple(-x for x in c) for c in self.eisenstein[:-1]]

    # -- raw kernels --------------------------------------------------------
    def gr_mul(self, x: Sequence[int], y: Sequence[int]) -> list[int]:
        f, m = self.f, self.mask
        if f == 1:
            return [(x[0] * y[0]) & m]
        if f == 2:
            x0, x1 = x
            y0, y1 = y
            hi = x1 * y1
            g0, g1 = self._xf
            return [(x0 * y0 + hi * g0) & m, (x0 * y1 + x1 * y0 + hi * g1) & m]
        prod = [0] * (2 * f - 1)
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    prod[i + j] += xi * yj
        xf = self._xf
        for d in range(2 * f - 2, f - 1, -1):
            c = prod[d]
            if c:
                for i, g in enumerate(xf):
                    prod[d - f + i] += c * g
        return [v & m for v in prod[:f]]

    def raw_mul(self, x: tuple[int, ...], y: tuple[int, ...]) -> tuple[int, ...]:
        e, f, m = self.e, self.f, self.mask
        if e == 1:
            return tuple(self.gr_mul(x, y))
        blocks = [[0] * f for _ in range(2 * e - 1)]
        for i in range(e):
            xi = x[i * f:(i + 1) * f]
            if not any(xi):
                continue
            for k in range(e):
                yk = y[k * f:(k + 1) * f]
                if not any(yk):
                    continue
                pr = self.gr_mul(xi, yk)
                blk = blocks[i + k]
                for j in range(f):
                    blk[j] += pr[j]
        pe = self._pi_e
        for d in range(2 * e - 2, e - 1, -1):
            c = [v & m for v in blocks[d]]
            if any(c):
                for i, a in enumerate(pe):
                    pr = self.gr_mul(c, a)
                    blk = blocks[d - e + i]
                    for j in range(f):
                        blk[j] += pr[j]
        return tuple(v & m for blk in blocks[:e] for v in blk)

    @cached_property
    def _canon_cache(self) -> dict:
        return {}

    def _canon_masks(self, prec: int) -> tuple[int, ...]:
        masks = self._canon_cache.get(prec)
        if masks is None:
            e, f = self.e, self.f
            out = []
            for i in range(e):
                bits = -(-(prec - i) // e)
                out.extend([(1 << bits) - 1 if bits > 0 else 0] * f)
            masks = self._canon_cache[prec] = tuple(out)
        return masks

    def canon(self, c: Sequence[int], prec: int) -> tuple[int, ...]:
        return tuple(v & mk for v, mk in zip(c, self._canon_masks(prec)))

    def raw_val(self, c: Sequence[int]) -> int | None:
        e, f = self.e, self.f
        best = None
        for idx, v in enumerate(c):
            if v:
                cand = e * ((v & -v).bit_length() - 1) + idx // f
                if best is None or cand < best:
                    best = cand
        return best

    # -- constructors -------------------------------------------------------
    def element(self, value, prec: int | None = None) -> "OFElement":
        """Build an element from an int, an OFElement or an e x f nested list."""
        if isinstance(value, OFElement):
            return value
        N = self.precision if prec is None else min(prec, self.precision)
        if isinstance(value, int):
            raw = [0] * (self.e * self.f)
            raw[0] = value & self.mask
            return OFElement(self, tuple(raw), N)
        rows = list(value)
        if len(rows) > self.e:
            raise InputError("O_F element has more than e rows")
        raw = [0] * (self.e * self.f)
        for i, row in enumerate(rows):
            row = [row] if isinstance(row, int) else list(row)
            if len(row) > self.f:
                raise InputError("O_F element row longer than f")
            for j, v in enumerate(row):
                raw[i * self.f + j] = int(v) & self.mask
        return OFElement(self, tuple(raw), N)

    def zero(self) -> "OFElement":
        return self.element(0)

    def one(self) -> "OFElement":
        return self.element(1)

    @cached_property
    def pi0(self) -> "OFElement":
        if self.e == 1:
            raw = tuple(v & self.mask for v in self._pi_e[0])
            return OFElement(self, raw, self.precision)
        raw = [0] * (self.e * self.f)
        raw[self.f] = 1
        return OFElement(self, tuple(raw), self.precision)

    def pi0_pow(self, k: int) -> "OFElement":
        return self._pi0_pows(k)

    @cached_property
    def _pow_cache(self) -> dict:
        return {0: self.one()}

    def _pi0_pows(self, k: int) -> "OFElement":
        cache = self._pow_cache
        if k not in cache:
            cache[k] = self._pi0_pows(k - 1) * self.pi0
        return cache[k]

    def digit(self, d: int) -> "OFElement":
        """Fixed lift of the residue class encoded by d (0/1 coordinates)."""
        raw = [0] * (self.e * self.f)
        for j in range(self.f):
            raw[j] = (d >> j) & 1
        return OFElement(self, tuple(raw), self.precision)

    @cached_property
    def _div_pi0_factor(self) -> "OFElement":
        # 1/pi0 = -pi0^(e-1) * B^-1 / 2 with 2*B = sum a_i pi0^i
        f = self.f
        raw = []
        for c in self.eisenstein[:-1]:
            raw.extend(v // 2 for v in c)
        B = OFElement(self, tuple(v & self.mask for v in raw), self.precision)
        return -(self.pi0_pow(self.e - 1) * B.inverse())

    def two(self) -> "OFElement":
        return self.element(2)

    def to_json(self) -> dict:
        return {
            "f": self.f,
            "e": self.e,
            "unram_poly": list(self.unram_poly),
            "eisenstein": [list(c) for c in self.eisenstein],
            "precision": self.precision,
        }


def _gr_v2(c: Sequence[int]) -> int:
    vals = [_v2(v) for v in c if v]
    return min(vals) if vals else 10**9


# ---------------------------------------------------------------------------
# O_F elements


class OFElement:
    """Element of O_F known modulo pi0^prec (immutable)."""

    __slots__ = ("F", "c", "prec")

    def __init__(self, F: FieldDescriptor, c: tuple[int, ...], prec: int):
        prec = min(prec, F.precision)
        if prec < 0:
            prec = 0
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "c", F.canon(c, prec))
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, *_):
        raise AttributeError("OFElement is immutable")

    def __reduce__(self):
        return (OFElement, (self.F, self.c, self.prec))

    # -- structure ----------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, OFElement) and self.F == other.F and self.c == other.c and self.prec == other.prec

    def __hash__(self):
        return hash((self.c, self.prec))

    def __repr__(self):
        return f"OFElement({self.to_list()}, prec={self.prec})"

    def to_list(self) -> list[list[int]]:
        f = self.F.f
        return [list(self.c[i * f:(i + 1) * f]) for i in range(self.F.e)]

    def _coerce(self, other) -> "OFElement":
        if isinstance(other, OFElement):
            return other
        if isinstance(other, int):
            return self.F.element(other)
        return NotImplemented

    # -- valuation ------------------------------------------------------------
    def valuation(self):
        v = self.F.raw_val(self.c)
        return ZERO if v is None else v

    def _v(self) -> int:
        v = self.F.raw_val(self.c)
        return self.prec if v is None else v

    def is_zero(self) -> bool:
        return self.F.raw_val(self.c) is None

    def is_unit(self) -> bool:
        return self.valuation() == 0

    def congruent(self, other) -> bool:
        return (self - other).is_zero()

    def residue(self) -> int:
        """Image in the residue field, encoded as a bit mask."""
        if self.prec < 1:
            raise PrecisionExhausted("no digits left to read a residue")
        return sum((self.c[j] & 1) << j for j in range(self.F.f))

    # -- ring operations --------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        m = self.F.mask
        return OFElement(self.F, tuple((a + b) & m for a, b in zip(self.c, other.c)), min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        m = self.F.mask
        return OFElement(self.F, tuple((-a) & m for a in self.c), self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        m = self.F.mask
        return OFElement(self.F, tuple((a - b) & m for a, b in zip(self.c, other.c)), min(self.prec, other.prec))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = min(self.prec + other._v(), other.prec + self._v())
        return OFElement(self.F, self.F.raw_mul(self.c, other.c), prec)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        r = self.F.one()
        base = self
        while n:
            if n & 1:
                r = r * base
            base = base * base
            n >>= 1
        return r

    def inverse(self) -> "OFElement":
        if self.valuation() != 0:
            raise NotAUnit(f"{self!r} is not a unit at its precision")
        F = self.F
        m = F.mask
        y = F.digit(F.residue_field.inv(self.residue())).c
        two = F.two().c
        good = 1
        while good < self.prec:
            good = min(2 * good, self.prec)
            xy = F.raw_mul(self.c, y)
            y = F.canon(F.raw_mul(y, tuple((t - v) & m for t, v in zip(two, xy))), good)
        return OFElement(F, y, self.prec)

    def div_pi0(self, k: int = 1) -> "OFElement":
        """Exact division by pi0^k; the value must be divisible."""
        x = self
        F = self.F
        for _ in range(k):
            v = x.valuation()
            if v is not ZERO and v < 1:
                raise NotAUnit("division by pi0 of an element of valuation 0")
            if x.prec < 1:
                raise PrecisionExhausted("cannot divide by pi0: no digits left")
            Q = F._div_pi0_factor
            raw = F.raw_mul(x.c, Q.c)
            # y = x*Q is known to min(prec + e - 1, e*K); halving drops e digits
            p_y = min(x.prec + F.e - 1, F.e * F.K)
            raw = F.canon(raw, p_y)
            if any(v & 1 for v in raw):
                raise AssertionError("internal: x*Q not divisible by 2")
            x = OFElement(F, tuple(v >> 1 for v in raw), p_y - F.e)
        return x

    def __truediv__(self, other):
        return FElt.from_of(self) / FElt.from_of(self._coerce(other))


# ---------------------------------------------------------------------------
# floating elements of F


class FElt:
    """pi0^n * u with u a unit of O_F, or zero modulo pi0^n (u is None)."""

    __slots__ = ("F", "n", "u")

    def __init__(self, F: FieldDescriptor, n: int, u: OFElement | None):
        self.F, self.n, self.u = F, n, u

    @classmethod
    def from_of(cls, x: OFElement, shift: int = 0) -> "FElt":
        v = x.valuation()
        if v is ZERO:
            return cls(x.F, shift + x.prec, None)
        return cls(x.F, shift + v, x.div_pi0(v) if v else x)

    @classmethod
    def of(cls, F: FieldDescriptor, value, shift: int = 0) -> "FElt":
        if isinstance(value, FElt):
            return value
        return cls.from_of(F.element(value), shift)

    def __reduce__(self):
        return (FElt, (self.F, self.n, self.u))

    def __repr__(self):
        if self.u is None:
            return f"FElt(0 mod pi0^{self.n})"
        return f"FElt(pi0^{self.n} * {self.u.to_list()}, rel={self.u.prec})"

    def is_zero(self) -> bool:
        return self.u is None

    def valuation(self):
        return ZERO if self.u is None else self.n

    @property
    def abs_prec(self) -> int:
        return self.n if self.u is None else self.n + self.u.prec

    def _coerce(self, other) -> "FElt":
        if isinstance(other, FElt):
            return other
        if isinstance(other, (int, OFElement)):
            return FElt.of(self.F, other)
        return NotImplemented

    def __neg__(self):
        return self if self.u is None else FElt(self.F, self.n, -self.u)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.u is None or other.u is None:
            if self.u is None and other.u is None:
                return FElt(self.F, min(self.n, other.n), None)
            z, nz = (self, other) if self.u is None else (other, self)
            if z.n <= nz.n:
                return FElt(self.F, z.n, None)
            return FElt(self.F, nz.n, OFElement(self.F, nz.u.c, min(nz.u.prec, z.n - nz.n)))
        lo, hi = (self, other) if self.n <= other.n else (other, self)
        gap = hi.n - lo.n
        if gap >= lo.u.prec:
            return lo
        s = lo.u + hi.u * self.F.pi0_pow(gap)
        return FElt.from_of(s, lo.n)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.u is None or other.u is None:
            if self.u is None and other.u is None:
                return FElt(self.F, self.n + other.n, None)
            z, nz = (self, other) if self.u is None else (other, self)
            return FElt(self.F, z.n + nz.n, None)
        return FElt(self.F, self.n + other.n, self.u * other.u)

    __rmul__ = __mul__

    def inverse(self) -> "FElt":
        if self.u is None:
            raise PrecisionExhausted("inverting a value that is zero to precision")
        return FElt(self.F, -self.n, self.u.inverse())

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        r = FElt.of(self.F, 1)
        for _ in range(k):
            r = r * self
        return r

    def to_of(self) -> OFElement:
        if self.u is None:
            if self.n < 0:
                raise PrecisionExhausted("integral value not resolved")
            return OFElement(self.F, (0,) * (self.F.e * self.F.f), self.n)
        if self.n < 0:
            raise NotAUnit("element is not integral")
        return self.u * self.F.pi0_pow(self.n)

    def congruent(self, other) -> bool:
        return (self - other).is_zero()


# ---------------------------------------------------------------------------
# the quadratic extension


@dataclass(frozen=True, eq=False)
class ExtDescriptor:
    """E = F[Pi] with Pi^2 + pi0 = 0 (RP) or Pi^2 - t Pi + pi0 = 0 (RU)."""

    F: FieldDescriptor
    kind: str
    t: OFElement | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"extension kind must be one of {KINDS}")
        if self.kind == "RU":
            if self.t is None:
                raise InputError("RU extension needs t")
            vt = self.t.valuation()
            if vt is ZERO or not (1 <= vt <= self.F.e):
                raise InputError(f"RU requires pi0 | t | 2, got v(t) = {vt}")
        elif self.t is not None and self.kind == "RP":
            raise InputError("t is only meaningful for RU")
        if self.kind != "UNRAM":
            Pi = self.Pi
            rel = Pi * Pi + OEElement.of(self, self.F.pi0)
            if self.kind == "RU":
                rel = rel - Pi * OEElement.of(self, self.t)
            if not rel.is_zero():
                raise AssertionError("multiplication table violates the defining relation")

    def __eq__(self, other):
        return (
            isinstance(other, ExtDescriptor)
            and self.F == other.F
            and self.kind == other.kind
            and self.t_list() == other.t_list()
        )

    def __hash__(self):
        return hash((self.F, self.kind, str(self.t_list())))

    def __reduce__(self):
        return (ExtDescriptor, (self.F, self.kind, self.t))

    def t_list(self):
        return None if self.t is None else self.t.to_list()

    @property
    def ramified(self) -> bool:
        return self.kind in ("RP", "RU")

    @cached_property
    def vt(self) -> int | None:
        return None if self.t is None else self.t.valuation()

    @cached_property
    def s(self) -> OFElement:
        """t / pi0 (RU only)."""
        return self.t.div_pi0()

    @cached_property
    def Pi(self) -> "OEElement":
        F = self.F
        return OEElement(self, F.zero(), F.one())

    @cached_property
    def eps(self) -> "OEElement":
        """conj(Pi) / Pi."""
        F = self.F
        if self.kind == "RP":
            return OEElement(self, -F.one(), F.zero())
        st = self.s * self.t
        return OEElement(self, st - F.one(), -self.s)

    @cached_property
    def rho(self) -> "OEElement":
        """Pi^2 / pi0."""
        F = self.F
        if self.kind == "RP":
            return OEElement(self, -F.one(), F.zero())
        return OEElement(self, -F.one(), self.s)

    @cached_property
    def _pow_cache(self) -> dict:
        return {}

    def unit_pow(self, name: str, k: int) -> "OEElement":
        key = (name, k)
        cache = self._pow_cache
        if key not in cache:
            base = getattr(self, name)
            if k == 0:
                cache[key] = OEElement.one(self)
            elif k < 0:
                cache[key] = self.unit_pow(name, -k).inverse()
            else:
                cache[key] = self.unit_pow(name, k - 1) * base
        return cache[key]

    def to_json(self) -> dict:
        d = self.F.to_json()
        d["ext"] = {"kind": self.kind, "t": self.t_list()}
        return d


def _require_ramified(ext: ExtDescriptor):
    if not ext.ramified:
        raise InputError("operation requires a ramified extension (RP or RU)")


class OEElement:
    """a + b*Pi with a, b in O_F."""

    __slots__ = ("ext", "a", "b")

    def __init__(self, ext: ExtDescriptor, a: OFElement, b: OFElement):
        self.ext, self.a, self.b = ext, a, b

    @classmethod
    def of(cls, ext: ExtDescriptor, a, b=0) -> "OEElement":
        F = ext.F
        return cls(ext, F.element(a), F.element(b))

    @classmethod
    def one(cls, ext: ExtDescriptor) -> "OEElement":
        return cls(ext, ext.F.one(), ext.F.zero())

    @classmethod
    def digit(cls, ext: ExtDescriptor, d: int) -> "OEElement":
        return cls(ext, ext.F.digit(d), ext.F.zero())

    def __reduce__(self):
        return (OEElement, (self.ext, self.a, self.b))

    def __repr__(self):
        return f"OEElement({self.a.to_list()} + {self.b.to_list()}*Pi)"

    def _coerce(self, other):
        if isinstance(other, OEElement):
            return other
        if isinstance(other, (int, OFElement)):
            return OEElement(self.ext, self.ext.F.element(other), self.ext.F.zero())
        return NotImplemented

    # -- precision and valuation -------------------------------------------------
    @property
    def pi_prec(self) -> int:
        return min(2 * self.a.prec, 2 * self.b.prec + 1)

    def valuation(self):
        P = self.pi_prec
        cands = []
        va, vb = self.a.valuation(), self.b.valuation()
        if va is not ZERO:
            cands.append(2 * va)
        if vb is not ZERO:
            cands.append(2 * vb + 1)
        v = min(cands) if cands else P
        return v if v < P else ZERO

    def is_zero(self) -> bool:
        return self.valuation() is ZERO

    def residue(self) -> int:
        return self.a.residue()

    # -- ring operations ---------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return OEElement(self.ext, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return OEElement(self.ext, -self.a, -self.b)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return OEElement(self.ext, self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ext = self.ext
        a, b, c, d = self.a, self.b, other.a, other.b
        bd = b * d
        ra = a * c - ext.F.pi0 * bd
        rb = a * d + b * c
        if ext.kind == "RU":
            rb = rb + ext.t * bd
        return OEElement(ext, ra, rb)

    __rmul__ = __mul__

    def conj(self) -> "OEElement":
        if self.ext.kind == "RP":
            return OEElement(self.ext, self.a, -self.b)
        return OEElement(self.ext, self.a + self.ext.t * self.b, -self.b)

    def trace(self) -> OFElement:
        if self.ext.kind == "RP":
            return self.a + self.a
        return self.a + self.a + self.ext.t * self.b

    def norm(self) -> OFElement:
        a, b = self.a, self.b
        r = a * a + self.ext.F.pi0 * (b * b)
        if self.ext.kind == "RU":
            r = r + self.ext.t * (a * b)
        return r

    def inverse(self) -> "OEElement":
        n = self.norm()
        if not n.is_unit():
            raise NotAUnit(f"{self!r} is not a unit of O_E")
        ni = n.inverse()
        c = self.conj()
        return OEElement(self.ext, c.a * ni, c.b * ni)

    def mul_pi(self) -> "OEElement":
        ext = self.ext
        if ext.kind == "RP":
            return OEElement(ext, -(ext.F.pi0 * self.b), self.a)
        return OEElement(ext, -(ext.F.pi0 * self.b), self.a + ext.t * self.b)

    def div_pi(self) -> "OEElement":
        """Exact division by Pi; requires the value to be divisible."""
        ext = self.ext
        a1 = self.a.div_pi0()
        if ext.kind == "RP":
            return OEElement(ext, self.b, -a1)
        return OEElement(ext, ext.t * a1 + self.b, -a1)

    def digits(self, count: int) -> list[int]:
        """First ``count`` Pi-adic digits (residue classes as bit masks)."""
        out = []
        cur = self
        for i in range(count):
            if cur.pi_prec < 1:
                raise PrecisionExhausted(f"only {i} Pi-adic digits available, {count} needed")
            d = cur.residue()
            out.append(d)
            if i + 1 < count:
                if d:
                    cur = cur - OEElement.digit(self.ext, d)
                cur = cur.div_pi()
        return out

    @classmethod
    def from_digits(cls, ext: ExtDescriptor, digits: Iterable[int]) -> "OEElement":
        acc = cls.of(ext, 0)
        power = cls.one(ext)
        for d in digits:
            if d:
                acc = acc + power * cls.digit(ext, d)
            power = power.mul_pi()
        return acc

    def mul_pi_pow(self, k: int) -> "OEElement":
        x = self
        for _ in range(k):
            x = x.mul_pi()
        return x


# ---------------------------------------------------------------------------
# floating elements of E


class EElt:
    """Pi^n * u with u a unit of O_E, or zero modulo Pi^n (u is None)."""

    __slots__ = ("ext", "n", "u")

    def __init__(self, ext: ExtDescriptor, n: int, u: OEElement | None):
        self.ext, self.n, self.u = ext, n, u

    def __reduce__(self):
        return (EElt, (self.ext, self.n, self.u))

    @classmethod
    def from_oe(cls, x: OEElement, shift: int = 0) -> "EElt":
        v = x.valuation()
        if v is ZERO:
            return cls(x.ext, shift + x.pi_prec, None)
        for _ in range(v):
            x = x.div_pi()
        return cls(x.ext, shift + v, x)

    @classmethod
    def of(cls, ext: ExtDescriptor, value, shift: int = 0) -> "EElt":
        """Coerce ints, O_F/O_E elements and F-floats into E."""
        if isinstance(value, EElt):
            return value if shift == 0 else EElt(ext, value.n + shift, value.u)
        if isinstance(value, OEElement):
            return cls.from_oe(value, shift)
        if isinstance(value, FElt):
            # pi0^n = Pi^(2n) * rho^(-n)
            if value.u is None:
                return cls(ext, 2 * value.n + shift, None)
            u = OEElement(ext, value.u, ext.F.zero()) * ext.unit_pow("rho", -value.n)
            return cls(ext, 2 * value.n + shift, u)
        return cls.from_oe(OEElement.of(ext, value), shift)

    @classmethod
    def pi_pow(cls, ext: ExtDescriptor, n: int) -> "EElt":
        return cls(ext, n, OEElement.one(ext))

    @classmethod
    def pibar_pow(cls, ext: ExtDescriptor, n: int) -> "EElt":
        return cls(ext, n, ext.unit_pow("eps", n))

    @classmethod
    def zero(cls, ext: ExtDescriptor) -> "EElt":
        return cls(ext, 2 * ext.F.precision, None)

    def __repr__(self):
        if self.u is None:
            return f"EElt(0 mod Pi^{self.n})"
        return f"EElt(Pi^{self.n} * {self.u!r})"

    def is_zero(self) -> bool:
        return self.u is None

    def valuation(self):
        return ZERO if self.u is None else self.n

    @property
    def abs_prec(self) -> int:
        return self.n if self.u is None else self.n + self.u.pi_prec

    def _coerce(self, other):
        if isinstance(other, EElt):
            return other
        if isinstance(other, (int, OFElement, OEElement, FElt)):
            return EElt.of(self.ext, other)
        return NotImplemented

    def __neg__(self):
        return self if self.u is None else EElt(self.ext, self.n, -self.u)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.u is None or other.u is None:
            if self.u is None and other.u is None:
                return EElt(self.ext, min(self.n, other.n), None)
            z, nz = (self, other) if self.u is None else (other, self)
            if z.n <= nz.n:
                return EElt(self.ext, z.n, None)
            return nz._truncated(z.n)
        lo, hi = (self, other) if self.n <= other.n else (other, self)
        gap = hi.n - lo.n
        if gap >= lo.u.pi_prec:
            return lo
        return EElt.from_oe(lo.u + hi.u.mul_pi_pow(gap), lo.n)

    __radd__ = __add__

    def _truncated(self, abs_prec: int) -> "EElt":
        rel = abs_prec - self.n
        u = self.u
        a = OFElement(u.a.F, u.a.c, min(u.a.prec, -(-rel // 2)))
        b = OFElement(u.b.F, u.b.c, min(u.b.prec, rel // 2))
        return EElt(self.ext, self.n, OEElement(self.ext, a, b))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.u is None or other.u is None:
            if self.u is None and other.u is None:
                return EElt(self.ext, self.n + other.n, None)
            z, nz = (self, other) if self.u is None else (other, self)
            return EElt(self.ext, z.n + nz.n, None)
        return EElt(self.ext, self.n + other.n, self.u * other.u)

    __rmul__ = __mul__

    def inverse(self) -> "EElt":
        if self.u is None:
            raise PrecisionExhausted("inverting a value that is zero to precision")
        return EElt(self.ext, -self.n, self.u.inverse())

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def conj(self) -> "EElt":
        if self.u is None:
            return self
        return EElt(self.ext, self.n, self.u.conj() * self.ext.unit_pow("eps", self.n))

    def _integral_form(self) -> tuple[int, OEElement]:
        """Return (k, w) with self = pi0^(-k) * w and w in O_E."""
        n = self.n
        if n >= 0:
            return 0, self.u.mul_pi_pow(n)
        k = -(n // 2)
        w = self.u.mul_pi_pow(n + 2 * k) * self.ext.unit_pow("rho", -k)
        return k, w

    def trace(self) -> FElt:
        F = self.ext.F
        if self.u is None:
            return FElt(F, self.n // 2, None)
        k, w = self._integral_form()
        return FElt.from_of(w.trace(), -k)

    def norm(self) -> FElt:
        F = self.ext.F
        if self.u is None:
            return FElt(F, self.n, None)
        return FElt.from_of(self.u.norm(), self.n)

    def to_f(self) -> FElt:
        """Read off an element known to lie in F."""
        F = self.ext.F
        if self.u is None:
            return FElt(F, self.n // 2, None)
        k, w = self._integral_form()
        if not w.b.is_zero():
            raise ValueError("element does not lie in F")
        return FElt.from_of(w.a, -k)

    def to_oe(self) -> OEElement:
        if self.u is None:
            F = self.ext.F
            if self.n < 0:
                raise PrecisionExhausted("integral value not resolved")
            z = (0,) * (F.e * F.f)
            return OEElement(self.ext, OFElement(F, z, -(-self.n // 2)), OFElement(F, z, self.n // 2))
        if self.n < 0:
            raise NotAUnit("element is not integral")
        return self.u.mul_pi_pow(self.n)

    def congruent(self, other) -> bool:
        return (self - other).is_zero()


# ---------------------------------------------------------------------------
# constructors and JSON


def _normalize_gr(c, f: int) -> tuple[int, ...]:
    row = [c] if isinstance(c, int) else [int(x) for x in c]
    if len(row) > f:
        raise InputError("Galois ring coefficient longer than f")
    return tuple(row + [0] * (f - len(row)))


def make_field(f: int, e: int, eisenstein=None, precision: int | None = None, unram_poly=None) -> FieldDescriptor:
    """Build F | Q_2.  Defaults: x^e - 2 and the smallest irreducible g."""
    if precision is None:
        precision = default_precision()
    if unram_poly is None:
        unram_poly = smallest_irreducible(f)
    if eisenstein is None:
        eisenstein = [-2] + [0] * (e - 1) + [1]
    if len(eisenstein) != e + 1:
        raise InvalidEisenstein(f"expected {e + 1} Eisenstein coefficients")
    return FieldDescriptor(
        f=f,
        e=e,
        unram_poly=tuple(int(x) for x in unram_poly),
        eisenstein=tuple(_normalize_gr(c, f) for c in eisenstein),
        precision=int(precision),
    )


def make_ext(F: FieldDescriptor, kind: str, t=None, vt: int | None = None) -> ExtDescriptor:
    """RU takes either an explicit t or v(t), in which case t = pi0^v(t)."""
    kind = kind.upper()
    if kind == "RU":
        if t is None:
            t = F.pi0_pow(1 if vt is None else vt)
        else:
            t = F.element(t)
    elif t is not None:
        raise InputError("t is only meaningful for RU")
    return ExtDescriptor(F=F, kind=kind, t=t)


def ext_from_json(obj: dict, precision: int | None = None) -> ExtDescriptor:
    try:
        f, e = int(obj["f"]), int(obj["e"])
        prec = precision if precision is not None else obj.get("precision")
        F = make_field(f, e, obj.get("eisenstein"), prec, obj.get("unram_poly"))
        ext = obj.get("ext", {"kind": "RP"})
        kind = ext.get("kind", "RP")
        t = ext.get("t")
        vt = ext.get("vt")
        return make_ext(F, kind, t=t, vt=vt)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed field description: {exc}") from exc


# ---------------------------------------------------------------------------
# the different and the norm group


def inverse_different_exponent(ext: ExtDescriptor) -> int:
    """d with D^{-1} = Pi^{-d} O_E: v_Pi(2 Pi) for RP and v_Pi(t) for RU."""
    _require_ramified(ext)
    if ext.kind == "RP":
        return (EElt.of(ext, 2) * EElt.pi_pow(ext, 1)).valuation()
    return EElt.of(ext, ext.t).valuation()


def trace_ideal_exponent(ext: ExtDescriptor, m: int) -> int:
    """v_F of Tr(Pi^m O_E)."""
    return (m + inverse_different_exponent(ext)) // 2


def inverse_different_bruteforce(ext: ExtDescriptor, limit: int | None = None) -> int:
    """Largest m with Tr(Pi^{-m} O_E) in O_F, scanning the generators 1 and Pi."""
    _require_ramified(ext)
    limit = limit if limit is not None else 4 * ext.F.e + 4
    last_ok = None
    for m in range(0, limit + 1):
        ok = True
        for shift in (0, 1):
            tr = EElt.pi_pow(ext, shift - m).trace()
            if tr.is_zero():
                if tr.n < 0:
                    raise PrecisionExhausted("trace scan cannot resolve the boundary")
                continue
            if tr.n < 0:
                ok = False
        if not ok:
            return last_ok if last_ok is not None else -1
        last_ok = m
    raise PrecisionExhausted(f"no trace boundary found below {limit}")


def norm_search_depth(ext: ExtDescriptor) -> int:
    """pi0-adic modulus used by the norm search: 2 v(2) + 2."""
    return 2 * ext.F.e + 2


def norm_solution(w: OFElement, ext: ExtDescriptor, modulus: int | None = None) -> OEElement | None:
    """A unit b of O_E with Nm(b) = w mod pi0^modulus, or None.

    Digits of b are fixed one at a time; b mod Pi^D determines Nm(b) modulo
    pi0^min(D, floor((D+d)/2)) where d is the inverse different exponent,
    which is what the pruning uses.
    """
    _require_ramified(ext)
    if not w.is_unit():
        raise NotAUnit("norm_solution expects a unit")
    m = norm_search_depth(ext) if modulus is None else modulus
    if w.prec < m:
        raise PrecisionExhausted("target known to fewer digits than the search modulus")
    d = inverse_different_exponent(ext)

    def determined(D: int) -> int:
        return D if D <= d else (D + d) // 2

    q = ext.F.q
    powers = [OEElement.one(ext)]

    def pi_power(j: int) -> OEElement:
        while len(powers) <= j:
            powers.append(powers[-1].mul_pi())
        return powers[j]

    def ok(b: OEElement, D: int) -> bool:
        need = min(determined(D), m)
        diff = b.norm() - w
        v = diff.valuation()
        return v is ZERO or v >= need

    stack = [(OEElement.digit(ext, d0), 1) for d0 in range(q - 1, 0, -1)]
    while stack:
        b, D = stack.pop()
        if not ok(b, D):
            continue
        if determined(D) >= m:
            return b
        step = pi_power(D)
        for dig in range(q - 1, -1, -1):
            nb = b if dig == 0 else b + step * OEElement.digit(ext, dig)
            stack.append((nb, D + 1))
    return None


def is_norm(x, ext: ExtDescriptor) -> bool:
    """Decide whether x lies in Nm_{E|F}(E^x)."""
    F = ext.F
    if not isinstance(x, FElt):
        x = FElt.from_of(F.element(x))
    if x.is_zero():
        raise PrecisionExhausted("is_norm needs a nonzero value")
    if ext.kind == "UNRAM":
        return x.n % 2 == 0
    # pi0 = Nm(Pi) in both ramified cases, so only the unit part matters
    return norm_solution(x.u, ext) is not None


def sqrt_one_plus(r: OFElement, min_gap: int | None = None) -> OFElement:
    """Square root of a unit r = 1 mod pi0^(2e+1) by Newton iteration."""
    F = r.F
    e = F.e
    from .errors import LiftStall

    dev = (r - 1).valuation()
    if dev is not ZERO and dev <= 2 * e:
        raise LiftStall(f"r - 1 has valuation {dev} <= 2 v(2); Newton does not converge")
    s = F.one()
    for _ in range(2 * F.precision):
        err = s * s - r
        if err.is_zero():
            return s
        corr = FElt.from_of(err) / (FElt.of(F, 2) * FElt.from_of(s))
        if corr.is_zero():
            return s
        if corr.n < 1:
            raise LiftStall("Newton correction is not small")
        s = s - corr.to_of()
    raise LiftStall("square root iteration did not stabilise")
