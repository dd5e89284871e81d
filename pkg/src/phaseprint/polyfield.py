"""Exact bivariate polynomial algebra and planar polynomial vector fields.

Coefficients are `fractions.Fraction` end to end: every classification
decision downstream is a sign test on exact rationals, so the algebra layer
must never round.  Floating point enters only at evaluation boundaries
(trajectory integration, winding numbers, rendering), through a cached dense
coefficient matrix evaluated with Horner's scheme via
``numpy.polynomial.polynomial.polyval2d``.

A polynomial is a sparse map from exponent pairs ``(degree_x, degree_y)`` to
nonzero rational coefficients; the zero polynomial is the empty map and has
total degree -1 by convention.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Union

import numpy as np
from numpy.polynomial.polynomial import polyval2d

from .errors import DegreeCapExceeded, PolynomialParseError

__all__ = [
    "DEGREE_CAP",
    "BivariatePolynomial",
    "PlanarVectorField",
    "JacobianData",
    "X",
    "Y",
    "ONE",
    "ZERO",
    "univariate_x",
    "split_xy",
    "parse_polynomial",
    "parse_field",
]

# All built-in fields have total degree <= 11; the cap guards pathological
# parser input, not the algebra itself.
DEGREE_CAP = 32

RationalLike = Union[int, Fraction]


def _as_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class BivariatePolynomial:
    """Sparse exact polynomial in two variables x and y.

    Instances are immutable; all operators return new polynomials.  No
    stored coefficient is zero (enforced at construction).
    """

    terms: Mapping[tuple[int, int], Fraction]

    def __post_init__(self) -> None:
        clean: dict[tuple[int, int], Fraction] = {}
        for (i, j), coeff in self.terms.items():
            if i < 0 or j < 0:
                raise ValueError("negative exponents are not supported")
            value = _as_fraction(coeff)
            if value != 0:
                clean[(int(i), int(j))] = value
        object.__setattr__(self, "terms", clean)

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero() -> "BivariatePolynomial":
        return BivariatePolynomial({})

    @staticmethod
    def constant(value: RationalLike) -> "BivariatePolynomial":
        return BivariatePolynomial({(0, 0): _as_fraction(value)})

    # -- structure -------------------------------------------------------

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(i + j for i, j in self.terms)

    @property
    def lowest_degree(self) -> int:
        """Smallest total degree among nonzero terms; -1 for zero."""
        if not self.terms:
            return -1
        return min(i + j for i, j in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def homogeneous_part(self, k: int) -> "BivariatePolynomial":
        """The degree-k homogeneous component (possibly zero)."""
        return BivariatePolynomial(
            {(i, j): c for (i, j), c in self.terms.items() if i + j == k}
        )

    def coefficient(self, degree_x: int, degree_y: int) -> Fraction:
        return self.terms.get((degree_x, degree_y), Fraction(0))

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other: "BivariatePolynomial | RationalLike") -> "BivariatePolynomial":
        other = _coerce(other)
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            out[key] = out.get(key, Fraction(0)) + coeff
        return BivariatePolynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "BivariatePolynomial":
        return BivariatePolynomial({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "BivariatePolynomial | RationalLike") -> "BivariatePolynomial":
        return self + (-_coerce(other))

    def __rsub__(self, other: RationalLike) -> "BivariatePolynomial":
        return _coerce(other) - self

    def __mul__(self, other: "BivariatePolynomial | RationalLike") -> "BivariatePolynomial":
        other = _coerce(other)
        out: dict[tuple[int, int], Fraction] = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return BivariatePolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "BivariatePolynomial":
        if exponent < 0:
            raise ValueError("negative powers are not polynomials")
        result = BivariatePolynomial.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = BivariatePolynomial.constant(other)
        if not isinstance(other, BivariatePolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    # -- calculus --------------------------------------------------------

    def partial_x(self) -> "BivariatePolynomial":
        return BivariatePolynomial(
            {(i - 1, j): c * i for (i, j), c in self.terms.items() if i > 0}
        )

    def partial_y(self) -> "BivariatePolynomial":
        return BivariatePolynomial(
            {(i, j - 1): c * j for (i, j), c in self.terms.items() if j > 0}
        )

    def shift(self, a: RationalLike, b: RationalLike) -> "BivariatePolynomial":
        """Exact Taylor shift: the polynomial q with q(x, y) = p(x + a, y + b).

        Degree is preserved; expansion uses binomial coefficients so every
        output coefficient is an exact rational.
        """
        a = _as_fraction(a)
        b = _as_fraction(b)
        out: dict[tuple[int, int], Fraction] = {}
        for (i, j), c in self.terms.items():
            # (x + a)^i (y + b)^j expanded term by term
            for r in range(i + 1):
                ca = c * math.comb(i, r) * a ** (i - r)
                if ca == 0:
                    continue
                for s in range(j + 1):
                    coeff = ca * math.comb(j, s) * b ** (j - s)
                    if coeff == 0:
                        continue
                    key = (r, s)
                    out[key] = out.get(key, Fraction(0)) + coeff
        return BivariatePolynomial(out)

    # -- evaluation ------------------------------------------------------

    def eval_exact(self, x: RationalLike, y: RationalLike) -> Fraction:
        """Evaluate at an exact rational point; returns an exact rational."""
        x = _as_fraction(x)
        y = _as_fraction(y)
        total = Fraction(0)
        for (i, j), c in self.terms.items():
            total += c * x**i * y**j
        return total

    @cached_property
    def _dense(self) -> np.ndarray:
        """Dense float coefficient matrix C with C[i, j] = coeff of x^i y^j."""
        if not self.terms:
            return np.zeros((1, 1))
        nx = max(i for i, _ in self.terms) + 1
        ny = max(j for _, j in self.terms) + 1
        dense = np.zeros((nx, ny))
        for (i, j), c in self.terms.items():
            dense[i, j] = float(c)
        return dense

    @cached_property
    def _rows(self) -> list[list[float]]:
        # plain nested lists beat numpy dispatch by an order of magnitude on
        # scalars, which dominates the trajectory integrator's inner loop
        return self._dense.tolist()

    def __call__(self, x, y):
        """Evaluate in floating point; accepts scalars or numpy arrays."""
        if isinstance(x, (float, int)) and isinstance(y, (float, int)):
            total = 0.0
            for row in reversed(self._rows):
                inner = 0.0
                for c in reversed(row):
                    inner = inner * y + c
                total = total * x + inner
            return total
        return polyval2d(x, y, self._dense)

    # -- text ------------------------------------------------------------

    def to_text(self) -> str:
        """Canonical text form, terms sorted by (total degree, degree_x) desc."""
        if not self.terms:
            return "0"
        keys = sorted(self.terms, key=lambda k: (-(k[0] + k[1]), -k[0]))
        pieces: list[str] = []
        for idx, (i, j) in enumerate(keys):
            coeff = self.terms[(i, j)]
            sign = "-" if coeff < 0 else ("+" if idx > 0 else "")
            body_parts: list[str] = []
            mag = abs(coeff)
            if mag != 1 or (i == 0 and j == 0):
                body_parts.append(str(mag))
            if i > 0:
                body_parts.append("x" if i == 1 else f"x^{i}")
            if j > 0:
                body_parts.append("y" if j == 1 else f"y^{j}")
            pieces.append(sign + "*".join(body_parts))
        return "".join(pieces)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"BivariatePolynomial({self.to_text()!r})"


def _coerce(value: "BivariatePolynomial | RationalLike") -> BivariatePolynomial:
    if isinstance(value, BivariatePolynomial):
        return value
    return BivariatePolynomial.constant(value)


ZERO = BivariatePolynomial.zero()
ONE = BivariatePolynomial.constant(1)
X = BivariatePolynomial({(1, 0): Fraction(1)})
Y = BivariatePolynomial({(0, 1): Fraction(1)})


def univariate_x(coeffs: Iterable[RationalLike]) -> BivariatePolynomial:
    """Build a polynomial in x alone from ascending coefficients c0, c1, ..."""
    return BivariatePolynomial(
        {(i, 0): _as_fraction(c) for i, c in enumerate(coeffs)}
    )


def split_xy(
    poly: BivariatePolynomial,
) -> tuple[BivariatePolynomial, BivariatePolynomial, BivariatePolynomial]:
    """Decompose Q(x, y) = F(x) + y*G(x) + y^2*R(x, y) exactly.

    F collects the y-degree-0 terms, G the y-degree-1 terms, and R the rest
    with its y-degree reduced by two.  Reassembly ``F + Y*G + Y**2*R`` equals
    the input exactly.
    """
    f: dict[tuple[int, int], Fraction] = {}
    g: dict[tuple[int, int], Fraction] = {}
    r: dict[tuple[int, int], Fraction] = {}
    for (i, j), c in poly.terms.items():
        if j == 0:
            f[(i, 0)] = c
        elif j == 1:
            g[(i, 0)] = c
        else:
            r[(i, j - 2)] = c
    return (
        BivariatePolynomial(f),
        BivariatePolynomial(g),
        BivariatePolynomial(r),
    )


# ---------------------------------------------------------------------------
# Vector fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JacobianData:
    """2x2 Jacobian of a field at a point, with its exact invariants.

    ``discriminant`` is tau^2 - 4*delta, the quantity that separates nodes
    from foci in the trace-determinant diagram.
    """

    entries: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]
    tau: Fraction
    delta: Fraction
    discriminant: Fraction

    @staticmethod
    def from_entries(
        a: RationalLike, b: RationalLike, c: RationalLike, d: RationalLike
    ) -> "JacobianData":
        a, b, c, d = (_as_fraction(v) for v in (a, b, c, d))
        tau = a + d
        delta = a * d - b * c
        return JacobianData(
            entries=((a, b), (c, d)),
            tau=tau,
            delta=delta,
            discriminant=tau * tau - 4 * delta,
        )

    def __post_init__(self) -> None:
        (a, b), (c, d) = self.entries
        if self.tau != a + d or self.delta != a * d - b * c:
            raise ValueError("inconsistent Jacobian invariants")
        if self.discriminant != self.tau**2 - 4 * self.delta:
            raise ValueError("inconsistent Jacobian discriminant")

    def is_nilpotent(self) -> bool:
        """Both eigenvalues zero (tau = delta = 0)."""
        return self.tau == 0 and self.delta == 0

    def is_zero(self) -> bool:
        (a, b), (c, d) = self.entries
        return a == b == c == d == 0


@dataclass(frozen=True)
class PlanarVectorField:
    """Planar system (x' , y') = (P(x, y), Q(x, y)) with exact coefficients."""

    p: BivariatePolynomial
    q: BivariatePolynomial

    def __post_init__(self) -> None:
        if self.p.is_zero() and self.q.is_zero():
            raise ValueError("vector field must not be identically zero")

    def evaluate(self, point: tuple[float, float]) -> tuple[float, float]:
        """Floating-point evaluation (P(point), Q(point))."""
        x, y = point
        return float(self.p(x, y)), float(self.q(x, y))

    def evaluate_exact(
        self, point: tuple[RationalLike, RationalLike]
    ) -> tuple[Fraction, Fraction]:
        x, y = point
        return self.p.eval_exact(x, y), self.q.eval_exact(x, y)

    def evaluate_array(self, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized evaluation on numpy arrays (used by the integrator)."""
        return self.p(x, y), self.q(x, y)

    def is_singular_at(self, point: tuple[RationalLike, RationalLike]) -> bool:
        px, qx = self.evaluate_exact(point)
        return px == 0 and qx == 0

    def jacobian_at(
        self, point: tuple[RationalLike, RationalLike]
    ) -> JacobianData:
        """Exact Jacobian of (P, Q) at an exact rational point."""
        x, y = (_as_fraction(v) for v in point)
        return JacobianData.from_entries(
            self.p.partial_x().eval_exact(x, y),
            self.p.partial_y().eval_exact(x, y),
            self.q.partial_x().eval_exact(x, y),
            self.q.partial_y().eval_exact(x, y),
        )

    def recenter(
        self, center: tuple[RationalLike, RationalLike]
    ) -> "PlanarVectorField":
        """Translate coordinates so `center` becomes the origin.

        The returned field g satisfies g(u) = f(u + center) coefficient-wise
        (exact Taylor shift); degrees are preserved.
        """
        a, b = center
        return PlanarVectorField(self.p.shift(a, b), self.q.shift(a, b))

    def negate(self) -> "PlanarVectorField":
        return PlanarVectorField(-self.p, -self.q)

    def to_text(self) -> str:
        return f"{self.p.to_text()} ; {self.q.to_text()}"

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"PlanarVectorField({self.to_text()!r})"


# ---------------------------------------------------------------------------
# Polynomial text grammar
# ---------------------------------------------------------------------------
#
#   expr   := ['+'|'-'] term ( ('+'|'-') term )*
#   term   := factor ( ['*'] factor )*          (adjacency multiplies)
#   factor := atom [ '^' uint ]
#   atom   := rational | 'x' | 'y' | '(' expr ')'
#   rational := uint [ '/' uint ]
#
# Everything is expanded to canonical sparse form on the fly, so input like
# ``-x*(x^2-1)^2`` round-trips through ``to_text`` as ``-x^5+2*x^3-x``.

_TOKEN_RE = re.compile(r"\s*(\d+|[xy()^*/+-])")


def _tokenize(text: str) -> list[str]:
    # Normalize unicode minus signs that show up in copied formulas.
    text = text.replace("−", "-").replace("·", "*")
    tokens: list[str] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            if text[pos:].strip() == "":
                break
            raise PolynomialParseError(
                f"unexpected character {text[pos:].strip()[0]!r} in polynomial text"
            )
        tokens.append(match.group(1))
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        token = self.peek()
        if token is None:
            raise PolynomialParseError("unexpected end of polynomial text")
        self.pos += 1
        return token

    def parse_expr(self) -> BivariatePolynomial:
        sign = Fraction(1)
        while self.peek() in ("+", "-"):
            if self.take() == "-":
                sign = -sign
        result = self.parse_term() * sign
        while self.peek() in ("+", "-"):
            op = self.take()
            term_sign = Fraction(-1) if op == "-" else Fraction(1)
            while self.peek() in ("+", "-"):
                if self.take() == "-":
                    term_sign = -term_sign
            result = result + self.parse_term() * term_sign
        return result

    def parse_term(self) -> BivariatePolynomial:
        result = self.parse_factor()
        while True:
            nxt = self.peek()
            if nxt == "*":
                self.take()
                result = result * self.parse_factor()
            elif nxt == "/":
                self.take()
                divisor = self.parse_factor()
                if divisor.degree > 0:
                    raise PolynomialParseError("can only divide by a constant")
                value = divisor.coefficient(0, 0)
                if value == 0:
                    raise PolynomialParseError("division by zero")
                result = result * (Fraction(1) / value)
            elif nxt is not None and (nxt == "(" or nxt in "xy" or nxt[0].isdigit()):
                result = result * self.parse_factor()
            else:
                return result

    def parse_factor(self) -> BivariatePolynomial:
        base = self.parse_atom()
        if self.peek() == "^":
            self.take()
            token = self.take()
            if not token.isdigit():
                raise PolynomialParseError(f"exponent must be a nonnegative integer, got {token!r}")
            exponent = int(token)
            if base.degree * exponent > DEGREE_CAP:
                raise DegreeCapExceeded(
                    f"total degree would exceed the cap of {DEGREE_CAP}"
                )
            return base**exponent
        return base

    def parse_atom(self) -> BivariatePolynomial:
        token = self.take()
        if token == "x":
            return X
        if token == "y":
            return Y
        if token == "(":
            inner = self.parse_expr()
            if self.take() != ")":
                raise PolynomialParseError("unbalanced parentheses")
            return inner
        if token[0].isdigit():
            return BivariatePolynomial.constant(int(token))
        raise PolynomialParseError(f"unexpected token {token!r}")


def parse_polynomial(text: str) -> BivariatePolynomial:
    """Parse polynomial text into expanded canonical form.

    Raises
    ------
    PolynomialParseError
        On any grammar violation.
    DegreeCapExceeded
        If the expanded total degree would exceed ``DEGREE_CAP``.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise PolynomialParseError("empty polynomial text")
    parser = _Parser(tokens)
    result = parser.parse_expr()
    if parser.peek() is not None:
        raise PolynomialParseError(f"trailing input near {parser.peek()!r}")
    if result.degree > DEGREE_CAP:
        raise DegreeCapExceeded(f"total degree {result.degree} exceeds cap {DEGREE_CAP}")
    return result


def parse_field(text: str) -> PlanarVectorField:
    """Parse ``"P ; Q"`` into a vector field (x' = P, y' = Q)."""
    parts = text.split(";")
    if len(parts) != 2:
        raise PolynomialParseError(
            "field text must be two polynomials separated by ';'"
        )
    return PlanarVectorField(parse_polynomial(parts[0]), parse_polynomial(parts[1]))
