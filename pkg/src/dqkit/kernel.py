"""Exact coefficient arithmetic: rationals, sparse polynomials, truncated t-series.

Everything downstream (forms, multivectors, operators, star products) stores
its coefficients as :class:`Poly`.  All values are immutable by convention and
all operations are pure, so concurrent use needs no coordination.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DimensionMismatchError, IndexRangeError, OrderMismatchError

# Exact rational scalar.  Fraction already maintains the invariants we need:
# gcd(|p|, q) = 1, q > 0, and zero is 0/1.
Rat = Fraction


def _as_rat(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def grlex_key(exponents):
    """Sort key for graded-lexicographic term order (ascending)."""
    return (sum(exponents), exponents)


class Poly:
    """Sparse multivariate polynomial over the rationals.

    ``terms`` maps exponent tuples of length ``dim`` to nonzero Fractions.
    Zero coefficients are never stored, so structural equality of the term
    maps is polynomial equality.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms=None):
        if dim < 0:
            raise ValueError("dim must be non-negative")
        self.dim = dim
        clean = {}
        if terms:
            for exps, coeff in terms.items():
                exps = tuple(exps)
                if len(exps) != dim:
                    raise ValueError(f"exponent vector {exps} has length != dim={dim}")
                if any(e < 0 for e in exps):
                    raise ValueError(f"negative exponent in {exps}")
                coeff = _as_rat(coeff)
                if coeff != 0:
                    clean[exps] = clean.get(exps, Fraction(0)) + coeff
                    if clean[exps] == 0:
                        del clean[exps]
        self.terms = clean

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls, dim: int) -> "Poly":
        return cls(dim)

    @classmethod
    def const(cls, dim: int, value) -> "Poly":
        value = _as_rat(value)
        if value == 0:
            return cls(dim)
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def one(cls, dim: int) -> "Poly":
        return cls.const(dim, 1)

    @classmethod
    def variable(cls, dim: int, index: int) -> "Poly":
        """Coordinate x_index, 1-based."""
        if not 1 <= index <= dim:
            raise ValueError(f"coordinate index {index} out of range 1..{dim}")
        exps = [0] * dim
        exps[index - 1] = 1
        return cls(dim, {tuple(exps): Fraction(1)})

    @classmethod
    def monomial(cls, dim: int, exps, coeff=1) -> "Poly":
        return cls(dim, {tuple(exps): _as_rat(coeff)})

    # ------------------------------------------------------------------
    # queries

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        """The value of a constant polynomial (zero for the zero poly)."""
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * self.dim, Fraction(0))

    def total_degree(self) -> int:
        """Max total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def sorted_terms(self):
        """Terms in descending graded-lex order (canonical emission order)."""
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    # ------------------------------------------------------------------
    # arithmetic

    def _check_dim(self, other: "Poly"):
        if self.dim != other.dim:
            raise DimensionMismatchError(
                f"polynomial dimensions differ: {self.dim} vs {other.dim}"
            )

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.dim, other)
        self._check_dim(other)
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            acc = out.get(exps, Fraction(0)) + coeff
            if acc == 0:
                out.pop(exps, None)
            else:
                out[exps] = acc
        return Poly(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.dim, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _as_rat(other)
            if other == 0:
                return Poly(self.dim)
            return Poly(self.dim, {e: c * other for e, c in self.terms.items()})
        self._check_dim(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                acc = out.get(exps, Fraction(0)) + c1 * c2
                if acc == 0:
                    out.pop(exps, None)
                else:
                    out[exps] = acc
        return Poly(self.dim, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.one(self.dim)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def partial(self, index: int) -> "Poly":
        """Formal partial derivative with respect to x_index (1-based)."""
        if not 1 <= index <= self.dim:
            raise IndexRangeError(f"coordinate index {index} out of range 1..{self.dim}")
        i = index - 1
        out = {}
        for exps, coeff in self.terms.items():
            k = exps[i]
            if k == 0:
                continue
            lowered = exps[:i] + (k - 1,) + exps[i + 1 :]
            out[lowered] = out.get(lowered, Fraction(0)) + coeff * k
        return Poly(self.dim, out)

    def partial_multi(self, orders) -> "Poly":
        """Iterated partial derivative along a multi-index (length dim)."""
        p = self
        for i, k in enumerate(orders, start=1):
            for _ in range(k):
                p = p.partial(i)
                if p.is_zero():
                    return p
        return p

    # ------------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.dim, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return f"Poly({self.dim}, 0)"
        bits = []
        for exps, coeff in self.sorted_terms():
            mono = "*".join(
                f"x{i+1}" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(exps)
                if e > 0
            )
            bits.append(f"{coeff}" + (f"*{mono}" if mono else ""))
        return f"Poly({self.dim}, {' + '.join(bits)})"


class TPoly:
    """Truncated series in the deformation parameter t with Poly coefficients.

    ``coeffs[k]`` is the coefficient of t^k, for 0 <= k <= order.  Products
    discard every t-degree above the truncation order.  The t^0 coefficient is
    the classical reduction ``sigma``.
    """

    __slots__ = ("dim", "order", "coeffs")

    def __init__(self, order: int, coeffs):
        if order < 1:
            raise ValueError("truncation order must be >= 1")
        coeffs = list(coeffs)
        if len(coeffs) != order + 1:
            raise ValueError(f"need {order + 1} coefficients, got {len(coeffs)}")
        dims = {p.dim for p in coeffs}
        if len(dims) != 1:
            raise DimensionMismatchError(f"mixed coefficient dimensions: {sorted(dims)}")
        self.dim = dims.pop()
        self.order = order
        self.coeffs = coeffs

    @classmethod
    def zero(cls, dim: int, order: int) -> "TPoly":
        return cls(order, [Poly.zero(dim) for _ in range(order + 1)])

    @classmethod
    def from_poly(cls, p: Poly, order: int) -> "TPoly":
        coeffs = [Poly.zero(p.dim) for _ in range(order + 1)]
        coeffs[0] = p
        return cls(order, coeffs)

    @property
    def sigma(self) -> Poly:
        """Classical reduction: the t^0 coefficient."""
        return self.coeffs[0]

    def coeff(self, k: int) -> Poly:
        """Coefficient of t^k (zero beyond the truncation order)."""
        if k < 0:
            raise ValueError("negative t-degree")
        if k > self.order:
            return Poly.zero(self.dim)
        return self.coeffs[k]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def _check_compat(self, other: "TPoly"):
        if self.order != other.order:
            raise OrderMismatchError(
                f"truncation orders differ: {self.order} vs {other.order}"
            )
        if self.dim != other.dim:
            raise DimensionMismatchError(
                f"dimensions differ: {self.dim} vs {other.dim}"
            )

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            other = TPoly.from_poly(
                other if isinstance(other, Poly) else Poly.const(self.dim, other),
                self.order,
            )
        self._check_compat(other)
        return TPoly(self.order, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return TPoly(self.order, [-c for c in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            other = TPoly.from_poly(
                other if isinstance(other, Poly) else Poly.const(self.dim, other),
                self.order,
            )
        return self + (-other)

    def __mul__(self, other):
        """Cauchy product; t-degrees above the truncation order are dropped."""
        if isinstance(other, (int, Fraction)):
            return TPoly(self.order, [c * other for c in self.coeffs])
        if isinstance(other, Poly):
            return TPoly(self.order, [c * other for c in self.coeffs])
        self._check_compat(other)
        out = [Poly.zero(self.dim) for _ in range(self.order + 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if i + j > self.order:
                    break
                if b.is_zero():
                    continue
                out[i + j] = out[i + j] + a * b
        return TPoly(self.order, out)

    __rmul__ = __mul__

    def t_shift(self, k: int) -> "TPoly":
        """Multiply by t^k (coefficients past the truncation order drop)."""
        if k < 0:
            raise ValueError("negative t-shift")
        out = [Poly.zero(self.dim) for _ in range(self.order + 1)]
        for i, c in enumerate(self.coeffs):
            if i + k <= self.order:
                out[i + k] = c
        return TPoly(self.order, out)

    def __eq__(self, other):
        if not isinstance(other, TPoly):
            return NotImplemented
        return (
            self.order == other.order
            and self.dim == other.dim
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.order, tuple(self.coeffs)))

    def __repr__(self):
        return f"TPoly(order={self.order}, {self.coeffs!r})"
