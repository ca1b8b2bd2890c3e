"""Exact differential polynomials in the jet variables of psi, phi and
their conjugates, with Gaussian-rational coefficients.

Values are immutable and all operations are pure, so everything here is
safe to share across threads.  Structural equality of canonical forms is
semantic equality: terms are fully combined and kept sorted by graded
degree, then lexicographically on their factor lists.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

SYMBOLS = ("psi", "phi", "psibar", "phibar")
_SYMBOL_INDEX = {s: i for i, s in enumerate(SYMBOLS)}

# Conjugation pairs psi <-> psibar, phi <-> phibar.
CONJUGATE = {"psi": "psibar", "psibar": "psi", "phi": "phibar", "phibar": "phi"}


class DiffPolyError(Exception):
    pass


class NotExact(DiffPolyError):
    """Raised when a polynomial is not a total x-derivative.

    ``remainder`` holds the irreducible part for diagnostics.
    """

    def __init__(self, remainder: "DiffPoly"):
        self.remainder = remainder
        super().__init__(f"not a total x-derivative; remainder: {remainder}")


class MissingJet(DiffPolyError):
    pass


@dataclass(frozen=True)
class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    re: Fraction
    im: Fraction

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __add__(self, other):
        other = _as_gr(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-_as_gr(other))

    def __rsub__(self, other):
        return _as_gr(other) + (-self)

    def __mul__(self, other):
        other = _as_gr(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_gr(other)
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __complex__(self):
        return complex(self.re) + 1j * complex(self.im)

    def __str__(self):
        if self.im == 0:
            return _frac_str(self.re)
        if self.re == 0:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{_frac_str(self.im)}*i"
        sign = "+" if self.im > 0 else "-"
        im = abs(self.im)
        im_s = "i" if im == 1 else f"{_frac_str(im)}*i"
        return f"({_frac_str(self.re)}{sign}{im_s})"

    __repr__ = __str__


def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _as_gr(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    if isinstance(x, complex):
        # Only exact small literals like 1j are expected here.
        return GaussianRational(Fraction(x.real), Fraction(x.imag))
    raise TypeError(f"cannot interpret {x!r} as GaussianRational")


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)
GR_I = GaussianRational(0, 1)


def gr_i_power(k: int) -> GaussianRational:
    """i**k for any integer k (negative allowed)."""
    return (GR_ONE, GR_I, GaussianRational(-1), GaussianRational(0, -1))[k % 4]


@dataclass(frozen=True, order=True)
class JetVariable:
    """A dependent symbol together with its x-derivative order.

    The dataclass ordering (symbol index, order) is the canonicalization
    key used throughout.
    """

    sym_index: int
    order: int

    @property
    def symbol(self) -> str:
        return SYMBOLS[self.sym_index]

    def bump(self) -> "JetVariable":
        return JetVariable(self.sym_index, self.order + 1)

    def __str__(self):
        return self.symbol + ("_" + "x" * self.order if self.order else "")

    __repr__ = __str__


def jet(symbol: str, order: int = 0) -> JetVariable:
    if symbol not in _SYMBOL_INDEX:
        raise ValueError(f"unknown symbol {symbol!r}")
    if order < 0:
        raise ValueError("jet order must be nonnegative")
    return JetVariable(_SYMBOL_INDEX[symbol], order)


# A factor list is a sorted tuple of (JetVariable, exponent) pairs; it is the
# dict key identifying a monomial up to its coefficient.
Factors = tuple


@dataclass(frozen=True)
class Monomial:
    coeff: GaussianRational
    factors: Factors

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.factors)

    @property
    def max_order(self) -> int:
        return max((j.order for j, _ in self.factors), default=-1)

    def sort_key(self):
        return (self.degree, tuple((j, e) for j, e in self.factors))

    def __str__(self):
        return _render_monomial_text(self)

    __repr__ = __str__


def _merge_factors(fa: Factors, fb: Factors) -> Factors:
    d: dict[JetVariable, int] = {}
    for j, e in fa:
        d[j] = d.get(j, 0) + e
    for j, e in fb:
        d[j] = d.get(j, 0) + e
    return tuple(sorted(d.items()))


class DiffPoly:
    """Canonical sum of monomials; supports +, -, * and scalar multiples."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Monomial] = (), _canonical=False):
        if _canonical:
            object.__setattr__(self, "terms", tuple(terms))
            return
        combined: dict[Factors, GaussianRational] = {}
        for m in terms:
            combined[m.factors] = combined.get(m.factors, GR_ZERO) + m.coeff
        out = [Monomial(c, f) for f, c in combined.items() if not c.is_zero()]
        out.sort(key=Monomial.sort_key)
        object.__setattr__(self, "terms", tuple(out))

    def __setattr__(self, name, value):
        raise AttributeError("DiffPoly is immutable")

    @staticmethod
    def zero() -> "DiffPoly":
        return _DP_ZERO

    @staticmethod
    def constant(c) -> "DiffPoly":
        c = _as_gr(c)
        if c.is_zero():
            return _DP_ZERO
        return DiffPoly([Monomial(c, ())], _canonical=True)

    @staticmethod
    def var(symbol: str, order: int = 0, coeff=1) -> "DiffPoly":
        c = _as_gr(coeff)
        if c.is_zero():
            return _DP_ZERO
        return DiffPoly([Monomial(c, ((jet(symbol, order), 1),))], _canonical=True)

    @staticmethod
    def monomial(coeff, factors: Mapping[JetVariable, int]) -> "DiffPoly":
        c = _as_gr(coeff)
        if c.is_zero():
            return _DP_ZERO
        facs = tuple(sorted((j, e) for j, e in factors.items() if e))
        if any(e < 0 for _, e in facs):
            raise ValueError("exponents must be positive")
        return DiffPoly([Monomial(c, facs)], _canonical=True)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((m.degree for m in self.terms), default=-1)

    @property
    def max_order(self) -> int:
        return max((m.max_order for m in self.terms), default=-1)

    def jets(self) -> set[JetVariable]:
        return {j for m in self.terms for j, _ in m.factors}

    def symbols(self) -> set[str]:
        return {j.symbol for j in self.jets()}

    def constant_term(self) -> GaussianRational:
        for m in self.terms:
            if not m.factors:
                return m.coeff
        return GR_ZERO

    # -- ring operations ------------------------------------------------

    def __add__(self, other: "DiffPoly") -> "DiffPoly":
        if not isinstance(other, DiffPoly):
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        return DiffPoly(self.terms + other.terms)

    def __neg__(self) -> "DiffPoly":
        return DiffPoly(
            [Monomial(-m.coeff, m.factors) for m in self.terms], _canonical=True
        )

    def __sub__(self, other: "DiffPoly") -> "DiffPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, complex)):
            return self.scale(other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        out = []
        for a in self.terms:
            for b in other.terms:
                out.append(Monomial(a.coeff * b.coeff, _merge_factors(a.factors, b.factors)))
        return DiffPoly(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, complex)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "DiffPoly":
        c = _as_gr(c)
        if c.is_zero():
            return _DP_ZERO
        return DiffPoly(
            [Monomial(m.coeff * c, m.factors) for m in self.terms], _canonical=True
        )

    def __eq__(self, other):
        return isinstance(other, DiffPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __str__(self):
        return render(self, "text")

    def __repr__(self):
        return f"DiffPoly({render(self, 'text')})"


_DP_ZERO = DiffPoly((), _canonical=True)


def dp_mul(p: DiffPoly, q: DiffPoly) -> DiffPoly:
    return p * q


def dp_dx(p: DiffPoly) -> DiffPoly:
    """Total x-derivative: Leibniz over each monomial, jets bump their order."""
    out = []
    for m in p.terms:
        for i, (j, e) in enumerate(m.factors):
            rest = m.factors[:i] + m.factors[i + 1 :]
            if e == 1:
                new = _merge_factors(rest, ((j.bump(), 1),))
                out.append(Monomial(m.coeff, new))
            else:
                new = _merge_factors(rest, ((j, e - 1), (j.bump(), 1)))
                out.append(Monomial(m.coeff * e, new))
    return DiffPoly(out)


def dp_dx_n(p: DiffPoly, n: int) -> DiffPoly:
    for _ in range(n):
        p = dp_dx(p)
    return p


def partial(p: DiffPoly, j: JetVariable) -> DiffPoly:
    """Formal partial derivative with respect to a single jet variable."""
    out = []
    for m in p.terms:
        for i, (jj, e) in enumerate(m.factors):
            if jj == j:
                rest = m.factors[:i] + m.factors[i + 1 :]
                if e > 1:
                    rest = _merge_factors(rest, ((j, e - 1),))
                out.append(Monomial(m.coeff * e, rest))
                break
    return DiffPoly(out)


def euler_derivative(p: DiffPoly, symbol: str) -> DiffPoly:
    """Variational derivative sum_n (-d/dx)^n d/d(symbol, n) applied to p."""
    out = _DP_ZERO
    max_n = max((j.order for j in p.jets() if j.symbol == symbol), default=-1)
    for n in range(max_n + 1):
        term = dp_dx_n(partial(p, jet(symbol, n)), n)
        out = out + (term if n % 2 == 0 else -term)
    return out


def is_exact(p: DiffPoly) -> bool:
    """Euler-operator exactness test (independent oracle for dp_antidx).

    A total x-derivative has vanishing variational derivative for every
    symbol and no constant term.
    """
    if not p.constant_term().is_zero():
        return False
    return all(euler_derivative(p, s).is_zero() for s in p.symbols())


def dp_antidx(p: DiffPoly) -> DiffPoly:
    """Anti-derivative q with dp_dx(q) == p and no constant term.

    Repeatedly integrates by parts the canonically-first monomial whose
    highest-order jet is the global maximum, appears linearly, and whose
    other factors all have lower order.  Raises NotExact (carrying the
    remainder) when the reduction gets stuck or cycles.
    """
    result = _DP_ZERO
    remainder = p
    seen: set = set()
    while not remainder.is_zero():
        n = remainder.max_order
        if n < 1:
            raise NotExact(remainder)
        if remainder.terms in seen:
            raise NotExact(remainder)
        seen.add(remainder.terms)
        candidate = None
        for m in remainder.terms:
            top = [(j, e) for j, e in m.factors if j.order == n]
            if len(top) == 1 and top[0][1] == 1:
                candidate = m
                break
        if candidate is None:
            raise NotExact(remainder)
        (top_jet, _) = next((j, e) for j, e in candidate.factors if j.order == n)
        lower = JetVariable(top_jet.sym_index, n - 1)
        rest = tuple((j, e) for j, e in candidate.factors if j != top_jet)
        e_lower = next((e for j, e in rest if j == lower), 0)
        # (s,n)*(s,n-1)^e * R  integrates to  (s,n-1)^(e+1) * R / (e+1)
        piece = DiffPoly(
            [
                Monomial(
                    candidate.coeff / GaussianRational(e_lower + 1),
                    _merge_factors(rest, ((lower, 1),)),
                )
            ]
        )
        result = result + piece
        remainder = remainder - dp_dx(piece)
    return result


def dp_reduce(p: DiffPoly) -> DiffPoly:
    """Apply the reduction phi = -psibar (so phi jets become -psibar jets)."""
    bad = p.symbols() & {"psibar", "phibar"}
    if bad:
        raise ValueError(f"dp_reduce expects only psi/phi jets, found {sorted(bad)}")
    out = []
    for m in p.terms:
        coeff = m.coeff
        facs = []
        for j, e in m.factors:
            if j.symbol == "phi":
                if e % 2 == 1:
                    coeff = -coeff
                facs.append((jet("psibar", j.order), e))
            else:
                facs.append((j, e))
        out.append(Monomial(coeff, tuple(sorted(facs))))
    return DiffPoly(out)


def dp_conjugate(p: DiffPoly) -> DiffPoly:
    """Complex conjugate: conjugate coefficients, swap each jet with its bar."""
    out = []
    for m in p.terms:
        facs = tuple(sorted((jet(CONJUGATE[j.symbol], j.order), e) for j, e in m.factors))
        out.append(Monomial(m.coeff.conjugate(), facs))
    return DiffPoly(out)


def dp_eval(p: DiffPoly, jets: Mapping[JetVariable, complex]) -> complex:
    total = 0j
    for m in p.terms:
        v = complex(m.coeff)
        for j, e in m.factors:
            if j not in jets:
                raise MissingJet(f"no value supplied for jet {j}")
            v *= jets[j] ** e
        total += v
    return total


# -- 2x2 matrices over DiffPoly ---------------------------------------------


class MatrixDP:
    """Immutable 2x2 matrix with DiffPoly entries."""

    __slots__ = ("entries",)

    def __init__(self, a11, a12, a21, a22):
        object.__setattr__(
            self, "entries", ((_as_dp(a11), _as_dp(a12)), (_as_dp(a21), _as_dp(a22)))
        )

    def __setattr__(self, name, value):
        raise AttributeError("MatrixDP is immutable")

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    @staticmethod
    def zero() -> "MatrixDP":
        return MatrixDP(_DP_ZERO, _DP_ZERO, _DP_ZERO, _DP_ZERO)

    def __add__(self, other):
        return MatrixDP(
            *(self.entries[i][j] + other.entries[i][j] for i in (0, 1) for j in (0, 1))
        )

    def __sub__(self, other):
        return MatrixDP(
            *(self.entries[i][j] - other.entries[i][j] for i in (0, 1) for j in (0, 1))
        )

    def __neg__(self):
        return MatrixDP(*(-self.entries[i][j] for i in (0, 1) for j in (0, 1)))

    def __matmul__(self, other):
        a, b = self.entries, other.entries
        return MatrixDP(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )

    def scale(self, c) -> "MatrixDP":
        return MatrixDP(*(self.entries[i][j].scale(c) for i in (0, 1) for j in (0, 1)))

    def dx(self) -> "MatrixDP":
        return MatrixDP(*(dp_dx(self.entries[i][j]) for i in (0, 1) for j in (0, 1)))

    def diagonal_part(self) -> "MatrixDP":
        return MatrixDP(self[0, 0], _DP_ZERO, _DP_ZERO, self[1, 1])

    def offdiagonal_part(self) -> "MatrixDP":
        return MatrixDP(_DP_ZERO, self[0, 1], self[1, 0], _DP_ZERO)

    def is_zero(self) -> bool:
        return all(self.entries[i][j].is_zero() for i in (0, 1) for j in (0, 1))

    def __eq__(self, other):
        return isinstance(other, MatrixDP) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        rows = [
            "[" + ", ".join(str(self.entries[i][j]) for j in (0, 1)) + "]"
            for i in (0, 1)
        ]
        return "MatrixDP(" + "; ".join(rows) + ")"


def _as_dp(x) -> DiffPoly:
    if isinstance(x, DiffPoly):
        return x
    if isinstance(x, (int, Fraction, GaussianRational, complex)):
        return DiffPoly.constant(x)
    raise TypeError(f"cannot interpret {x!r} as DiffPoly")


def mat_commutator(a: MatrixDP, b: MatrixDP) -> MatrixDP:
    return (a @ b) - (b @ a)


class LambdaMatrixPoly:
    """Polynomial in the spectral parameter with MatrixDP coefficients.

    ``coeffs`` is indexed highest power first; the leading coefficient is
    nonzero (the zero polynomial has an empty coefficient list).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[MatrixDP]):
        coeffs = list(coeffs)
        while coeffs and coeffs[0].is_zero():
            coeffs.pop(0)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("LambdaMatrixPoly is immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, power: int) -> MatrixDP:
        idx = self.degree - power
        if idx < 0 or power < 0:
            return MatrixDP.zero()
        return self.coeffs[idx]

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = (MatrixDP.zero(),) * (n - len(self.coeffs)) + self.coeffs
        b = (MatrixDP.zero(),) * (n - len(other.coeffs)) + other.coeffs
        return LambdaMatrixPoly(x + y for x, y in zip(a, b))

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = (MatrixDP.zero(),) * (n - len(self.coeffs)) + self.coeffs
        b = (MatrixDP.zero(),) * (n - len(other.coeffs)) + other.coeffs
        return LambdaMatrixPoly(x - y for x, y in zip(a, b))

    def shift_lambda(self, powers: int = 1) -> "LambdaMatrixPoly":
        """Multiply by lambda**powers."""
        if not self.coeffs:
            return self
        return LambdaMatrixPoly(self.coeffs + (MatrixDP.zero(),) * powers)

    def scale(self, c) -> "LambdaMatrixPoly":
        return LambdaMatrixPoly(m.scale(c) for m in self.coeffs)

    def dx(self) -> "LambdaMatrixPoly":
        return LambdaMatrixPoly(m.dx() for m in self.coeffs)

    def commutator(self, other: "LambdaMatrixPoly") -> "LambdaMatrixPoly":
        # Convolution over lambda powers of the matrix commutator.
        if not self.coeffs or not other.coeffs:
            return LambdaMatrixPoly(())
        deg = self.degree + other.degree
        out = [MatrixDP.zero() for _ in range(deg + 1)]
        for pa in range(self.degree + 1):
            for pb in range(other.degree + 1):
                out[deg - (pa + pb)] = out[deg - (pa + pb)] + mat_commutator(
                    self.coeff(pa), other.coeff(pb)
                )
        return LambdaMatrixPoly(out)

    def __eq__(self, other):
        return isinstance(other, LambdaMatrixPoly) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"LambdaMatrixPoly(degree={self.degree})"


# -- rendering ---------------------------------------------------------------


def _render_coeff_text(c: GaussianRational, lead: str) -> str:
    """Coefficient prefix for a monomial with factors; '' or '-' when +-1."""
    if c == GR_ONE:
        return ""
    if c == GaussianRational(-1):
        return "-"
    if c == GR_I:
        return "i*"
    if c == GaussianRational(0, -1):
        return "-i*"
    return str(c) + "*"


def _render_monomial_text(m: Monomial) -> str:
    if not m.factors:
        return str(m.coeff)
    facs = "*".join(
        str(j) + (f"^{e}" if e > 1 else "") for j, e in m.factors
    )
    return _render_coeff_text(m.coeff, facs) + facs


_LATEX_SYMBOL = {
    "psi": r"\psi",
    "phi": r"\phi",
    "psibar": r"\psi^\ast",
    "phibar": r"\phi^\ast",
}


def _latex_frac(f: Fraction) -> str:
    if f.denominator == 1:
        return str(f.numerator)
    sign = "-" if f < 0 else ""
    return sign + r"\frac{%d}{%d}" % (abs(f.numerator), f.denominator)


def _render_coeff_latex(c: GaussianRational) -> str:
    if c == GR_ONE:
        return ""
    if c == GaussianRational(-1):
        return "-"
    if c == GR_I:
        return "i"
    if c == GaussianRational(0, -1):
        return "-i"
    if c.im == 0:
        return _latex_frac(c.re)
    if c.re == 0:
        return _latex_frac(c.im) + "i"
    sign = "+" if c.im > 0 else "-"
    return r"\left(%s%s%si\right)" % (_latex_frac(c.re), sign, _latex_frac(abs(c.im)))


def _render_monomial_latex(m: Monomial) -> str:
    if not m.factors:
        return _render_coeff_latex(m.coeff) or "1"
    parts = []
    for j, e in m.factors:
        base = _LATEX_SYMBOL[j.symbol]
        if j.order:
            sub = "x" * j.order
            if j.symbol.endswith("bar"):
                base = base[: -len(r"^\ast")] + "_{%s}" % sub + r"^\ast"
            else:
                base = base + "_{%s}" % sub
        if e > 1:
            base = base + "^{%d}" % e
        parts.append(base)
    return _render_coeff_latex(m.coeff) + "".join(parts)


def render(p: DiffPoly, format: str = "text") -> str:
    """Deterministic canonical-order rendering; json round-trips losslessly."""
    if format == "json":
        return to_json(p)
    if format not in ("text", "latex"):
        raise ValueError(f"unknown render format {format!r}")
    if p.is_zero():
        return "0"
    rm = _render_monomial_text if format == "text" else _render_monomial_latex
    pieces = [rm(m) for m in p.terms]
    out = pieces[0]
    for s in pieces[1:]:
        if s.startswith("-"):
            out += " - " + s[1:]
        else:
            out += " + " + s
    return out


def to_json(p: DiffPoly) -> str:
    data = [
        {
            "coeff": [
                m.coeff.re.numerator,
                m.coeff.re.denominator,
                m.coeff.im.numerator,
                m.coeff.im.denominator,
            ],
            "factors": [[j.symbol, j.order, e] for j, e in m.factors],
        }
        for m in p.terms
    ]
    return json.dumps(data, separators=(",", ":"))


def from_json(text: str) -> DiffPoly:
    data = json.loads(text)
    terms = []
    for entry in data:
        rn, rd, im_n, im_d = entry["coeff"]
        coeff = GaussianRational(Fraction(rn, rd), Fraction(im_n, im_d))
        facs = {jet(s, o): e for s, o, e in entry["factors"]}
        terms.append(
            Monomial(coeff, tuple(sorted(facs.items())))
        )
    return DiffPoly(terms)
