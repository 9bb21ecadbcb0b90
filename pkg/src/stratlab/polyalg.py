"""Exact sparse multivariate polynomial and rational-function arithmetic over Q.

Polynomials are stored as finite maps from exponent vectors to Fraction
coefficients.  All arithmetic is exact; floats never enter stored
coefficients (they appear only when a polynomial is *evaluated* at a float
point).  The monomial order is graded lexicographic throughout and is not
configurable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Sequence, Union

Exponent = tuple  # tuple[int, ...]
Scalar = Union[int, Fraction]

__all__ = [
    "Polynomial",
    "RationalFunction",
    "NormalFormResult",
    "grlex_key",
    "parse_polynomial",
    "parse_rational_function",
    "poly_gcd",
    "jacobian",
    "is_groebner_basis_syntactic",
    "ParseError",
]


def grlex_key(exponents: Exponent):
    """Sort key realizing the graded lexicographic order (total degree first)."""
    return (sum(exponents), exponents)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"coefficient must be int or Fraction, got {type(c).__name__}")


class Polynomial:
    """A sparse multivariate polynomial with exact rational coefficients.

    ``terms`` maps exponent tuples of length ``nvars`` to nonzero Fractions.
    Instances are immutable; all operators return new polynomials.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms=None):
        clean = {}
        if terms:
            for exps, coeff in terms.items():
                if len(exps) != nvars:
                    raise ValueError(
                        f"exponent vector {exps} has length {len(exps)}, expected {nvars}"
                    )
                c = _as_fraction(coeff)
                if c != 0:
                    e = tuple(int(x) for x in exps)
                    if any(x < 0 for x in e):
                        raise ValueError(f"negative exponent in {exps}")
                    clean[e] = clean.get(e, Fraction(0)) + c
            clean = {e: c for e, c in clean.items() if c != 0}
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: _as_fraction(c)})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Polynomial":
        if not 0 <= i < nvars:
            raise ValueError(f"variable index {i} out of range for nvars={nvars}")
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def variables(cls, nvars: int):
        """All coordinate polynomials x_0, ..., x_{nvars-1}."""
        return [cls.variable(nvars, i) for i in range(nvars)]

    # -- predicates ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, i: int) -> int:
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def leading_term(self):
        """(exponent, coefficient) of the grlex-largest term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=grlex_key)
        return e, self.terms[e]

    def leading_coefficient(self) -> Fraction:
        return self.leading_term()[1]

    # -- arithmetic ----------------------------------------------------------

    def _check_compat(self, other: "Polynomial"):
        if self.nvars != other.nvars:
            raise ValueError(f"nvars mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.nvars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_compat(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, Fraction(0)) + c
            if s == 0:
                terms.pop(e, None)
            else:
                terms[e] = s
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.nvars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                return Polynomial.zero(self.nvars)
            return Polynomial(self.nvars, {e: cc * c for e, cc in self.terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_compat(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, Fraction(0)) + c1 * c2
                if s == 0:
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                raise ZeroDivisionError("division by zero constant")
            return self * (Fraction(1) / c)
        if isinstance(other, Polynomial):
            return RationalFunction(self, other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.nvars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        h = object.__getattribute__(self, "_hash")
        if h is None:
            h = hash((self.nvars, frozenset(self.terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    # -- calculus and evaluation ----------------------------------------------

    def diff(self, i: int) -> "Polynomial":
        """Exact partial derivative with respect to variable i."""
        terms = {}
        for e, c in self.terms.items():
            if e[i] > 0:
                e2 = list(e)
                e2[i] -= 1
                terms[tuple(e2)] = c * e[i]
        return Polynomial(self.nvars, terms)

    def eval(self, point: Sequence):
        """Evaluate at a point: exact for int/Fraction entries, float otherwise."""
        if len(point) != self.nvars:
            raise ValueError(f"point has length {len(point)}, expected {self.nvars}")
        exact = all(isinstance(x, (int, Fraction)) for x in point)
        total = Fraction(0) if exact else 0.0
        for e, c in self.terms.items():
            term = c if exact else float(c)
            for x, k in zip(point, e):
                if k:
                    term = term * x**k
            total = total + term
        return total

    def compose(self, substitutions: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute a polynomial for each variable.

        ``substitutions`` must have one entry per variable; all entries share
        one common nvars, which becomes the nvars of the result.
        """
        if len(substitutions) != self.nvars:
            raise ValueError(
                f"compose needs {self.nvars} substitutions, got {len(substitutions)}"
            )
        if not substitutions:
            raise ValueError("compose on a 0-variable polynomial is not supported")
        m = substitutions[0].nvars
        for q in substitutions:
            if q.nvars != m:
                raise ValueError("substitution polynomials must share nvars")
        # cache powers of each substitution
        powers = [{0: Polynomial.constant(m, 1)} for _ in range(self.nvars)]

        def power(i, k):
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * substitutions[i]
            return cache[k]

        total = Polynomial.zero(m)
        for e, c in self.terms.items():
            term = Polynomial.constant(m, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            total = total + term
        return total

    # -- printing --------------------------------------------------------------

    def sorted_terms(self):
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def to_string(self, var_names: Sequence[str] | None = None) -> str:
        """Canonical form: descending grlex, rational coefficients as p/q."""
        if var_names is None:
            var_names = _default_names(self.nvars)
        if len(var_names) != self.nvars:
            raise ValueError("var_names length mismatch")
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for name, k in zip(var_names, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            mono = "*".join(factors)
            a = abs(c)
            if mono:
                body = mono if a == 1 else f"{_frac_str(a)}*{mono}"
            else:
                body = _frac_str(a)
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __repr__(self):
        return f"Polynomial({self.to_string()})"


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _default_names(nvars: int):
    if nvars <= 4:
        return ["x", "y", "z", "w"][:nvars]
    return [f"x{i+1}" for i in range(nvars)]


# -- multivariate division ------------------------------------------------------


def _monomial_divides(a: Exponent, b: Exponent) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _monomial_quotient(b: Exponent, a: Exponent) -> Exponent:
    return tuple(y - x for x, y in zip(a, b))


class NormalFormResult(NamedTuple):
    """Remainder of multivariate division plus a membership certainty flag.

    certainty is one of:
      "certain-member"      zero remainder: p lies in the ideal of the divisors
      "certain-nonmember"   nonzero remainder and the divisors were declared a
                            Groebner basis, so nonmembership is conclusive
      "inconclusive"        nonzero remainder against a non-Groebner divisor
                            list: membership is undecided
    """

    remainder: Polynomial
    certainty: str

    @property
    def is_member(self):
        if self.certainty == "certain-member":
            return True
        if self.certainty == "certain-nonmember":
            return False
        return None


def normal_form(
    p: Polynomial,
    gens: Sequence[Polynomial],
    assume_groebner: bool | None = None,
) -> NormalFormResult:
    """Remainder of p under multivariate division by gens (graded-lex order).

    A zero remainder always certifies ideal membership.  A nonzero remainder
    is conclusive only when gens form a Groebner basis; pass
    ``assume_groebner=True`` to assert that, or leave it None to let the
    syntactic check (single generator, or all-monomial generators) decide.
    """
    if not gens:
        raise ValueError("gens must be nonempty")
    for g in gens:
        if g.nvars != p.nvars:
            raise ValueError("nvars mismatch between p and gens")
        if g.is_zero():
            raise ValueError("zero polynomial cannot be a divisor")
    if assume_groebner is None:
        assume_groebner = is_groebner_basis_syntactic(gens)
    leading = [g.leading_term() for g in gens]
    work = p
    remainder = Polynomial.zero(p.nvars)
    while not work.is_zero():
        e, c = work.leading_term()
        for g, (ge, gc) in zip(gens, leading):
            if _monomial_divides(ge, e):
                q = Polynomial(p.nvars, {_monomial_quotient(e, ge): c / gc})
                work = work - q * g
                break
        else:
            t = Polynomial(p.nvars, {e: c})
            remainder = remainder + t
            work = work - t
    if remainder.is_zero():
        return NormalFormResult(remainder, "certain-member")
    if assume_groebner:
        return NormalFormResult(remainder, "certain-nonmember")
    return NormalFormResult(remainder, "inconclusive")


def is_groebner_basis_syntactic(gens: Sequence[Polynomial]) -> bool:
    """Cheap sufficient conditions: one generator, or all generators monomials.

    Principal ideals and monomial ideals always have their given generators as
    a Groebner basis; anything else is reported False (which only weakens the
    certainty flag, never the remainder).
    """
    gens = [g for g in gens if not g.is_zero()]
    if len(gens) == 1:
        return True
    return all(g.is_monomial() for g in gens)


def divides_exactly(d: Polynomial, p: Polynomial):
    """Return p/d when the division is exact, else None."""
    if d.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if p.is_zero():
        return Polynomial.zero(p.nvars)
    de, dc = d.leading_term()
    quotient = Polynomial.zero(p.nvars)
    work = p
    while not work.is_zero():
        e, c = work.leading_term()
        if not _monomial_divides(de, e):
            return None
        q = Polynomial(p.nvars, {_monomial_quotient(e, de): c / dc})
        quotient = quotient + q
        work = work - q * d
    return quotient


# -- gcd of multivariate polynomials ----------------------------------------------


def _to_univariate(p: Polynomial, v: int):
    """View p as a univariate polynomial in variable v with Polynomial coefficients."""
    coeffs = {}
    for e, c in p.terms.items():
        k = e[v]
        rest = list(e)
        rest[v] = 0
        key = tuple(rest)
        coeffs.setdefault(k, {})[key] = coeffs.get(k, {}).get(key, Fraction(0)) + c
    return {k: Polynomial(p.nvars, t) for k, t in coeffs.items()}


def _from_univariate(coeffs, v: int, nvars: int) -> Polynomial:
    total = Polynomial.zero(nvars)
    xv = Polynomial.variable(nvars, v)
    for k, c in coeffs.items():
        total = total + c * xv**k
    return total


def _content(coeffs) -> Polynomial:
    polys = [c for c in coeffs.values() if not c.is_zero()]
    g = polys[0]
    for p in polys[1:]:
        g = poly_gcd(g, p)
    return g


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Greatest common divisor over Q, normalized to leading coefficient 1.

    Primitive pseudo-remainder sequence, recursing over the variables.  Units
    (nonzero constants) come back as the constant 1.
    """
    if p.nvars != q.nvars:
        raise ValueError("nvars mismatch")
    if p.is_zero() and q.is_zero():
        return Polynomial.zero(p.nvars)
    if p.is_zero():
        return _monic(q)
    if q.is_zero():
        return _monic(p)
    if p.is_constant() or q.is_constant():
        return Polynomial.constant(p.nvars, 1)
    used = [
        v
        for v in range(p.nvars)
        if any(e[v] for e in p.terms) or any(e[v] for e in q.terms)
    ]
    v = used[0]
    a, b = p, q
    if a.degree_in(v) < b.degree_in(v):
        a, b = b, a
    ua, ub = _to_univariate(a, v), _to_univariate(b, v)
    ca, cb = _content(ua), _content(ub)
    c = poly_gcd(ca, cb)
    pa = {k: divides_exactly(ca, coeff) for k, coeff in ua.items()}
    pb = {k: divides_exactly(cb, coeff) for k, coeff in ub.items()}
    g = _gcd_primitive(pa, pb, v, p.nvars)
    return _monic(c * g)


def _gcd_primitive(ua, ub, v: int, nvars: int) -> Polynomial:
    """gcd of two primitive univariate-in-v polynomials (Polynomial coefficients)."""
    while True:
        if not ub:
            result = _from_univariate(ua, v, nvars)
            cont = _content(ua)
            return divides_exactly(cont, result)
        da = max(ua)
        db = max(ub)
        if da < db:
            ua, ub = ub, ua
            continue
        # pseudo-remainder of ua by ub in variable v
        lead_b = ub[db]
        r = {
            k: c * lead_b ** (da - db + 1)
            for k, c in ua.items()
        }
        while r and max(r) >= db:
            dr = max(r)
            lead_r = r[dr]
            if lead_r.is_zero():
                del r[dr]
                continue
            factor = divides_exactly(lead_b, lead_r)
            if factor is None:
                # should not happen: we premultiplied by lead_b^(da-db+1)
                raise ArithmeticError("pseudo-division failed")
            for k, c in ub.items():
                shift = dr - db + k
                r[shift] = r.get(shift, Polynomial.zero(nvars)) - factor * c
            r = {k: c for k, c in r.items() if not c.is_zero()}
        ua = ub
        if r:
            cont = _content(r)
            ub = {k: divides_exactly(cont, c) for k, c in r.items()}
        else:
            ub = {}


def _monic(p: Polynomial) -> Polynomial:
    if p.is_zero():
        return p
    return p * (Fraction(1) / p.leading_coefficient())


# -- rational functions ------------------------------------------------------------


class RationalFunction:
    """A quotient of polynomials, kept reduced with monic denominator.

    The reduced monic-denominator form is canonical: two rational functions
    are equal iff their stored numerators and denominators are equal.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = Polynomial.constant(num.nvars, 1)
        if num.nvars != den.nvars:
            raise ValueError("nvars mismatch")
        if den.is_zero():
            raise ZeroDivisionError("denominator is the zero polynomial")
        if num.is_zero():
            den = Polynomial.constant(num.nvars, 1)
        else:
            g = poly_gcd(num, den)
            if not (g.is_constant() and g.constant_value() == 1):
                num = divides_exactly(g, num)
                den = divides_exactly(g, den)
            lc = den.leading_coefficient()
            if lc != 1:
                inv = Fraction(1) / lc
                num = num * inv
                den = den * inv
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @property
    def nvars(self):
        return self.num.nvars

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "RationalFunction":
        return cls(p)

    @classmethod
    def constant(cls, nvars: int, c) -> "RationalFunction":
        return cls(Polynomial.constant(nvars, c))

    @classmethod
    def zero(cls, nvars: int) -> "RationalFunction":
        return cls(Polynomial.zero(nvars))

    def is_zero(self):
        return self.num.is_zero()

    def is_polynomial(self):
        return self.den.is_constant()

    def as_polynomial(self) -> Polynomial:
        if not self.is_polynomial():
            raise ValueError(f"{self} is not a polynomial")
        return self.num * (Fraction(1) / self.den.constant_value())

    @staticmethod
    def _coerce(value, nvars):
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, Polynomial):
            return RationalFunction(value)
        if isinstance(value, (int, Fraction)):
            return RationalFunction.constant(nvars, value)
        return None

    def __add__(self, other):
        o = self._coerce(other, self.nvars)
        if o is None:
            return NotImplemented
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other, self.nvars)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other, self.nvars)
        if o is None:
            return NotImplemented
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other, self.nvars)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other, self.nvars)
        if o is None:
            return NotImplemented
        return o / self

    def __eq__(self, other):
        o = self._coerce(other, self.nvars) if not isinstance(other, RationalFunction) else other
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def diff(self, i: int) -> "RationalFunction":
        return RationalFunction(
            self.num.diff(i) * self.den - self.num * self.den.diff(i),
            self.den * self.den,
        )

    def eval(self, point):
        d = self.den.eval(point)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at {tuple(point)}")
        return self.num.eval(point) / d

    def compose(self, substitutions) -> "RationalFunction":
        den = self.den.compose(substitutions)
        if den.is_zero():
            raise ZeroDivisionError("denominator vanishes identically after substitution")
        return RationalFunction(self.num.compose(substitutions), den)

    def to_string(self, var_names=None) -> str:
        if self.is_polynomial():
            return self.as_polynomial().to_string(var_names)
        return f"({self.num.to_string(var_names)})/({self.den.to_string(var_names)})"

    def __repr__(self):
        return f"RationalFunction({self.to_string()})"


# -- jacobians ----------------------------------------------------------------------


def jacobian(ps: Sequence[Polynomial]):
    """Matrix of exact partial derivatives; entry (i, j) is d ps[i] / d x_j."""
    if not ps:
        return []
    n = ps[0].nvars
    for p in ps:
        if p.nvars != n:
            raise ValueError("nvars mismatch in jacobian")
    return [[p.diff(j) for j in range(n)] for p in ps]


# -- parsing ----------------------------------------------------------------------


class ParseError(ValueError):
    """Parse failure with 1-based line/column position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens = []
        self._scan()

    def _position(self, pos):
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def _scan(self):
        text = self.text
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch in "+-*/^()":
                self.tokens.append((ch, ch, i))
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                self.tokens.append(("int", text[i:j], i))
                i = j
                continue
            if ch.isalpha() or ch == "_":
                j = i
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.tokens.append(("name", text[i:j], i))
                i = j
                continue
            line, col = self._position(i)
            raise ParseError(f"unexpected character {ch!r}", line, col)
        self.tokens.append(("end", "", len(text)))


class _ExprParser:
    """Recursive descent over + - * / ^ with parentheses.

    Produces a RationalFunction; the polynomial entry point rejects results
    with a non-constant denominator.
    """

    def __init__(self, text: str, var_names: Sequence[str]):
        self.tz = _Tokenizer(text)
        self.idx = 0
        self.var_index = {name: i for i, name in enumerate(var_names)}
        self.nvars = len(var_names)

    def _peek(self):
        return self.tz.tokens[self.idx]

    def _next(self):
        tok = self.tz.tokens[self.idx]
        self.idx += 1
        return tok

    def _error(self, message, tok):
        line, col = self.tz._position(tok[2])
        raise ParseError(message, line, col)

    def parse(self) -> RationalFunction:
        value = self._sum()
        tok = self._peek()
        if tok[0] != "end":
            self._error(f"unexpected token {tok[1]!r}", tok)
        return value

    def _sum(self):
        kind, _, _ = self._peek()
        negate = False
        if kind in "+-":
            negate = self._next()[0] == "-"
        value = self._product()
        if negate:
            value = -value
        while True:
            kind = self._peek()[0]
            if kind == "+":
                self._next()
                value = value + self._product()
            elif kind == "-":
                self._next()
                value = value - self._product()
            else:
                return value

    def _product(self):
        value = self._power()
        while True:
            kind = self._peek()[0]
            if kind == "*":
                self._next()
                value = value * self._power()
            elif kind == "/":
                tok = self._next()
                divisor = self._power()
                if divisor.is_zero():
                    self._error("division by zero", tok)
                value = value / divisor
            else:
                return value

    def _power(self):
        base = self._atom()
        if self._peek()[0] == "^":
            tok = self._next()
            sign = 1
            if self._peek()[0] == "-":
                self._next()
                sign = -1
            etok = self._next()
            if etok[0] != "int":
                self._error("exponent must be an integer", etok)
            n = int(etok[1])
            if sign < 0:
                if base.is_zero():
                    self._error("zero to a negative power", tok)
                return RationalFunction.constant(self.nvars, 1) / self._rf_pow(base, n)
            return self._rf_pow(base, n)
        return base

    @staticmethod
    def _rf_pow(base: RationalFunction, n: int) -> RationalFunction:
        return RationalFunction(base.num**n, base.den**n)

    def _atom(self):
        tok = self._next()
        kind, text, _ = tok
        if kind == "int":
            return RationalFunction.constant(self.nvars, int(text))
        if kind == "name":
            if text not in self.var_index:
                self._error(f"unknown variable {text!r}", tok)
            return RationalFunction(Polynomial.variable(self.nvars, self.var_index[text]))
        if kind == "(":
            value = self._sum()
            closing = self._next()
            if closing[0] != ")":
                self._error("expected ')'", closing)
            return value
        if kind == "-":
            return -self._atom()
        self._error(f"unexpected token {text!r}" if text else "unexpected end of input", tok)


def parse_rational_function(text: str, var_names: Sequence[str]) -> RationalFunction:
    """Parse an expression over + - * / ^ and parentheses into a RationalFunction."""
    return _ExprParser(text, var_names).parse()


def parse_polynomial(text: str, var_names: Sequence[str]) -> Polynomial:
    """Parse a polynomial; division is allowed only by nonzero constants."""
    value = parse_rational_function(text, var_names)
    if not value.is_polynomial():
        raise ParseError(f"expression {text!r} is not a polynomial", 1, 1)
    return value.as_polynomial()
