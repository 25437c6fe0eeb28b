"""Sparse polynomials with integer coefficients in six fixed variables.

The variable set is ``(x_a, y_a, x_b, y_b, x_g, y_g)``, the cosine and sine of
alpha, beta and gamma. Exponent vectors are packed into a single int,
``EXP_BITS`` bits per variable, so a monomial product is one integer addition.
All arithmetic is exact.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import reduce as _fold

VARIABLES = ("x_a", "y_a", "x_b", "y_b", "x_g", "y_g")
NVARS = len(VARIABLES)
EXP_BITS = 12
MAX_EXP = (1 << EXP_BITS) - 1
_MASK = MAX_EXP

CIRCLE_PAIRS = (("x_a", "y_a"), ("x_b", "y_b"), ("x_g", "y_g"))


def var_index(var) -> int:
    if isinstance(var, int):
        if not 0 <= var < NVARS:
            raise ValueError(f"variable index out of range: {var}")
        return var
    try:
        return VARIABLES.index(var)
    except ValueError:
        raise ValueError(f"unknown variable {var!r}; expected one of {VARIABLES}") from None


def pack(exps) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e > MAX_EXP:
            raise OverflowError(f"exponent {e} outside [0, {MAX_EXP}]")
        key |= e << (EXP_BITS * i)
    return key


def unpack(key: int) -> tuple[int, ...]:
    return tuple((key >> (EXP_BITS * i)) & _MASK for i in range(NVARS))


def _unit(i: int, e: int = 1) -> int:
    return e << (EXP_BITS * i)


class IntPoly:
    """Immutable sparse polynomial; ``terms`` maps packed exponents to nonzero ints."""

    __slots__ = ("_terms", "_degs")

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        elif not isinstance(terms, dict):
            terms = dict(terms)
        clean = {}
        for k, c in terms.items():
            if isinstance(k, tuple):
                k = pack(k)
            if c:
                if not isinstance(c, int):
                    raise TypeError(f"coefficient {c!r} is not an integer")
                clean[k] = clean.get(k, 0) + c
        self._terms = {k: c for k, c in clean.items() if c}
        self._degs = None

    @classmethod
    def _raw(cls, terms: dict) -> IntPoly:
        p = cls.__new__(cls)
        p._terms = terms
        p._degs = None
        return p

    @classmethod
    def constant(cls, c: int) -> IntPoly:
        return cls._raw({0: c} if c else {})

    @classmethod
    def var(cls, name, power: int = 1) -> IntPoly:
        return cls._raw({_unit(var_index(name), power): 1})

    @classmethod
    def monomial(cls, coeff: int, exps: dict) -> IntPoly:
        e = [0] * NVARS
        for name, p in exps.items():
            e[var_index(name)] = p
        return cls._raw({pack(e): coeff} if coeff else {})

    # ----- inspection -------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """(exponent tuple, coefficient) pairs in graded-lex order."""
        keyed = [(unpack(k), c) for k, c in self._terms.items()]
        keyed.sort(key=lambda t: (-sum(t[0]), tuple(-e for e in t[0])))
        return keyed

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or set(self._terms) == {0}

    def constant_term(self) -> int:
        return self._terms.get(0, 0)

    def degrees(self) -> tuple[int, ...]:
        """Per-variable degree (0 for the zero polynomial)."""
        if self._degs is None:
            d = [0] * NVARS
            for k in self._terms:
                for i in range(NVARS):
                    e = (k >> (EXP_BITS * i)) & _MASK
                    if e > d[i]:
                        d[i] = e
            self._degs = tuple(d)
        return self._degs

    def degree(self, var) -> int:
        return self.degrees()[var_index(var)]

    def total_degree(self) -> int:
        if not self._terms:
            return 0
        return max(sum(unpack(k)) for k in self._terms)

    def height(self) -> int:
        return max((abs(c) for c in self._terms.values()), default=0)

    def variables(self) -> tuple[str, ...]:
        return tuple(VARIABLES[i] for i, d in enumerate(self.degrees()) if d)

    # ----- arithmetic ---------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly.constant(other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __neg__(self):
        return IntPoly._raw({k: -c for k, c in self._terms.items()})

    def __add__(self, other):
        if isinstance(other, int):
            other = IntPoly.constant(other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        if len(other._terms) > len(self._terms):
            self, other = other, self
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                del out[k]
        return IntPoly._raw(out)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = IntPoly.constant(other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return IntPoly()
            return IntPoly._raw({k: c * other for k, c in self._terms.items()})
        if not isinstance(other, IntPoly):
            return NotImplemented
        if not self._terms or not other._terms:
            return IntPoly()
        da, db = self.degrees(), other.degrees()
        for i in range(NVARS):
            if da[i] + db[i] > MAX_EXP:
                raise OverflowError(f"degree in {VARIABLES[i]} would exceed {MAX_EXP}")
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return IntPoly._raw({k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = IntPoly.constant(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def square(self) -> IntPoly:
        """self * self using the symmetric half of the product."""
        items = list(self._terms.items())
        if not items:
            return IntPoly()
        d = self.degrees()
        if any(2 * x > MAX_EXP for x in d):
            raise OverflowError("degree would overflow")
        out: dict = {}
        get = out.get
        for i, (ka, ca) in enumerate(items):
            out[2 * ka] = get(2 * ka, 0) + ca * ca
            c2 = 2 * ca
            for kb, cb in items[i + 1 :]:
                k = ka + kb
                out[k] = get(k, 0) + c2 * cb
        return IntPoly._raw({k: c for k, c in out.items() if c})

    def exact_div_int(self, d: int) -> IntPoly:
        out = {}
        for k, c in self._terms.items():
            q, rem = divmod(c, d)
            if rem:
                raise ArithmeticError(f"coefficient {c} not divisible by {d}")
            out[k] = q
        return IntPoly._raw(out)

    def content(self) -> int:
        return _fold(math.gcd, (abs(c) for c in self._terms.values()), 0)

    def exact_div(self, divisor: IntPoly) -> IntPoly:
        """Quotient of an exact polynomial division; raises if not exact."""
        if not divisor._terms:
            raise ZeroDivisionError("division by the zero polynomial")
        order = _lex_key
        lead_k = max(divisor._terms, key=order)
        lead_c = divisor._terms[lead_k]
        lead_e = unpack(lead_k)
        rem = dict(self._terms)
        quot: dict = {}
        dterms = list(divisor._terms.items())
        while rem:
            k = max(rem, key=order)
            c = rem[k]
            e = unpack(k)
            if any(x < y for x, y in zip(e, lead_e)) or c % lead_c:
                raise ArithmeticError("polynomial division is not exact")
            qk = k - lead_k
            qc = c // lead_c
            quot[qk] = qc
            for dk, dc in dterms:
                kk = qk + dk
                v = rem.get(kk, 0) - qc * dc
                if v:
                    rem[kk] = v
                else:
                    rem.pop(kk, None)
        return IntPoly._raw(quot)

    # ----- structure in one variable -----------------------------------
    def coeffs_in(self, var) -> list[IntPoly]:
        """Coefficients c_l with self = sum_l c_l * var^l (index l)."""
        i = var_index(var)
        shift = EXP_BITS * i
        deg = self.degree(i)
        parts: list[dict] = [dict() for _ in range(deg + 1)]
        for k, c in self._terms.items():
            e = (k >> shift) & _MASK
            parts[e][k - (e << shift)] = c
        return [IntPoly._raw(p) for p in parts]

    @classmethod
    def from_coeffs_in(cls, var, coeffs) -> IntPoly:
        i = var_index(var)
        out: dict = {}
        for l, p in enumerate(coeffs):
            u = _unit(i, l)
            for k, c in p._terms.items():
                if (k >> (EXP_BITS * i)) & _MASK:
                    raise ValueError("coefficient depends on the collection variable")
                out[k + u] = c
        return cls._raw(out)

    def substitute(self, var, value: IntPoly) -> IntPoly:
        """Replace ``var`` by the polynomial ``value`` (Horner in var)."""
        if isinstance(value, int):
            value = IntPoly.constant(value)
        coeffs = self.coeffs_in(var)
        result = IntPoly()
        for c in reversed(coeffs):
            result = result * value + c
        return result

    def reduce_circle(self, x_var, y_var) -> IntPoly:
        """Normal form modulo y^2 + x^2 - 1: degree in y at most one.

        Values on the circle x = cos t, y = sin t are unchanged.
        """
        xi, yi = var_index(x_var), var_index(y_var)
        if self.degree(yi) < 2:
            return self
        ysh, xsh = EXP_BITS * yi, EXP_BITS * xi
        out: dict = {}
        # y^(2q+e) = (1 - x^2)^q y^e
        binoms: dict = {}
        for k, c in self._terms.items():
            ey = (k >> ysh) & _MASK
            q, e = divmod(ey, 2)
            base = k - (ey << ysh) + (e << ysh)
            if q == 0:
                out[base] = out.get(base, 0) + c
                continue
            row = binoms.get(q)
            if row is None:
                row = binoms[q] = [math.comb(q, j) * (-1) ** j for j in range(q + 1)]
            for j, b in enumerate(row):
                kk = base + ((2 * j) << xsh)
                out[kk] = out.get(kk, 0) + c * b
        return IntPoly._raw({k: c for k, c in out.items() if c})

    def reduce_circles(self, pairs=CIRCLE_PAIRS) -> IntPoly:
        p = self
        for x, y in pairs:
            p = p.reduce_circle(x, y)
        return p

    def integrate(self, var) -> tuple[IntPoly, int]:
        """Exact integral over var in [-1, 1] as (numerator, denominator).

        Uses int_{-1}^{1} t^k dt = 2/(k+1) for even k and 0 for odd k. The
        denominator is the smallest positive integer clearing all fractions
        of the result.
        """
        i = var_index(var)
        shift = EXP_BITS * i
        acc: dict = {}
        for k, c in self._terms.items():
            e = (k >> shift) & _MASK
            if e % 2:
                continue
            kk = k - (e << shift)
            acc[kk] = acc.get(kk, 0) + Fraction(2 * c, e + 1)
        acc = {k: v for k, v in acc.items() if v}
        den = 1
        for v in acc.values():
            den = den * v.denominator // math.gcd(den, v.denominator)
        num = {k: int(v * den) for k, v in acc.items()}
        return IntPoly._raw(num), den

    def derivative(self, var) -> IntPoly:
        i = var_index(var)
        shift = EXP_BITS * i
        out = {}
        for k, c in self._terms.items():
            e = (k >> shift) & _MASK
            if e:
                out[k - (1 << shift)] = c * e
        return IntPoly._raw(out)

    # ----- evaluation --------------------------------------------------
    def evaluate(self, values):
        """Evaluate at a point given as a mapping name -> value or a 6-sequence.

        Values may be ints, Fractions, floats or numpy arrays (broadcast).
        Variables the polynomial does not involve may be omitted.
        """
        if isinstance(values, dict):
            vals = [values.get(v) for v in VARIABLES]
        else:
            vals = list(values)
        degs = self.degrees()
        powers = []
        for i, d in enumerate(degs):
            if d == 0:
                powers.append(None)
                continue
            v = vals[i]
            if v is None:
                raise ValueError(f"missing value for {VARIABLES[i]}")
            pw = [1, v]
            for _ in range(d - 1):
                pw.append(pw[-1] * v)
            powers.append(pw)
        total = 0
        for k, c in self._terms.items():
            term = c
            for i in range(NVARS):
                if powers[i] is not None:
                    e = (k >> (EXP_BITS * i)) & _MASK
                    if e:
                        term = term * powers[i][e]
            total = total + term
        return total

    def evaluate_float(self, values):
        """Float evaluation; converts the (possibly huge) coefficients first."""
        if isinstance(values, dict):
            vals = [values.get(v) for v in VARIABLES]
        else:
            vals = list(values)
        degs = self.degrees()
        powers = []
        for i, d in enumerate(degs):
            if d == 0:
                powers.append(None)
                continue
            v = vals[i]
            pw = [1.0, v]
            for _ in range(d - 1):
                pw.append(pw[-1] * v)
            powers.append(pw)
        total = 0.0
        for k, c in self._terms.items():
            term = float(c)
            for i in range(NVARS):
                if powers[i] is not None:
                    e = (k >> (EXP_BITS * i)) & _MASK
                    if e:
                        term = term * powers[i][e]
            total = total + term
        return total

    # ----- text ----------------------------------------------------------
    def to_text(self) -> str:
        """One ``coeff * x_a^e1 y_a^e2 ...`` line per term, graded-lex order."""
        if not self._terms:
            return "0\n"
        lines = []
        for exps, c in self.items():
            mono = " ".join(f"{VARIABLES[i]}^{e}" for i, e in enumerate(exps) if e)
            lines.append(f"{c} * {mono}" if mono else f"{c}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> IntPoly:
        terms: dict = {}
        for raw in text.strip().splitlines():
            line = raw.strip()
            if not line:
                continue
            if "*" in line:
                cpart, mpart = line.split("*", 1)
            else:
                cpart, mpart = line, ""
            c = int(cpart.strip())
            e = [0] * NVARS
            for tok in mpart.split():
                m = _MONO_RE.fullmatch(tok)
                if not m:
                    raise ValueError(f"bad monomial token {tok!r}")
                e[var_index(m.group(1))] += int(m.group(2))
            k = pack(e)
            terms[k] = terms.get(k, 0) + c
        return cls(terms)

    def __repr__(self):
        if len(self._terms) > 6:
            return f"IntPoly(<{len(self._terms)} terms, degrees={self.degrees()}>)"
        return "IntPoly(" + " + ".join(self.to_text().strip().splitlines()) + ")"


_MONO_RE = re.compile(r"(x_a|y_a|x_b|y_b|x_g|y_g)\^(\d+)")


def _lex_key(k: int):
    return unpack(k)


def circle(x_var, y_var) -> IntPoly:
    """y^2 + x^2 - 1."""
    return IntPoly.var(y_var, 2) + IntPoly.var(x_var, 2) - 1


X_A, Y_A, X_B, Y_B, X_G, Y_G = (IntPoly.var(v) for v in VARIABLES)
