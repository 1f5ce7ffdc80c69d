"""Model manifolds with exact cohomology rings and characteristic classes.

Every library model has a rational cohomology ring that is a graded tensor
product of truncated polynomial algebras ``Z[x]/(x^(k+1))`` (even ``x``) and
exterior algebras (odd ``x``), so a monomial is an exponent vector bounded by
per-generator maxima.  The fundamental class pairs to 1 with the monomial
where every exponent is at its maximum, written in generator order.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import factorial
from typing import Callable, NamedTuple, Sequence

from . import series
from .errors import (
    IncompleteDataError,
    InternalConsistencyError,
    ShapeError,
    UnsupportedModelError,
)

Monomial = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class ManifoldModel:
    name: str
    dimension: int
    generators: tuple[tuple[str, int], ...]
    max_exponents: tuple[int, ...]
    spin: bool
    orientable: bool = True
    # tangent data as callables so classes can refer back to the finished model
    _pontryagin: Callable[[ManifoldModel], CohClass] | None = field(default=None, repr=False)
    _chern: Callable[[ManifoldModel], CohClass] | None = field(default=None, repr=False)
    _euler: Callable[[ManifoldModel], CohClass] | None = field(default=None, repr=False)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.generators)

    @property
    def generator_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.generators)

    def monomial_degree(self, m: Monomial) -> int:
        return sum(e * d for e, d in zip(m, self.degrees))

    @cached_property
    def basis(self) -> tuple[Monomial, ...]:
        """Monomial basis, lexicographic in exponent vectors."""
        return tuple(itertools.product(*(range(k + 1) for k in self.max_exponents)))

    def basis_in_degree(self, i: int) -> list[Monomial]:
        return [m for m in self.basis if self.monomial_degree(m) == i]

    @property
    def top_monomial(self) -> Monomial:
        return tuple(self.max_exponents)

    @cached_property
    def betti(self) -> tuple[int, ...]:
        counts = [0] * (self.dimension + 1)
        for m in self.basis:
            counts[self.monomial_degree(m)] += 1
        return tuple(counts)

    @property
    def betti_mod2(self) -> tuple[int, ...]:
        # library rings are torsion-free, so mod-2 Betti numbers agree
        return self.betti

    @property
    def is_complex(self) -> bool:
        return self._chern is not None

    # -- classes ---------------------------------------------------------

    def one(self) -> CohClass:
        return CohClass(self, {(0,) * len(self.generators): Fraction(1)})

    def zero(self) -> CohClass:
        return CohClass(self, {})

    def scalar(self, c) -> CohClass:
        return self.one() * c

    def gen(self, name: str) -> CohClass:
        try:
            i = self.generator_names.index(name)
        except ValueError:
            raise ShapeError(f"{self.name} has no generator {name!r}") from None
        m = [0] * len(self.generators)
        m[i] = 1
        return CohClass(self, {tuple(m): Fraction(1)})

    def top_class(self) -> CohClass:
        return CohClass(self, {self.top_monomial: Fraction(1)})

    @cached_property
    def pontryagin(self) -> CohClass:
        return self._pontryagin(self) if self._pontryagin else self.one()

    @cached_property
    def total_chern(self) -> CohClass | None:
        return self._chern(self) if self._chern else None

    @cached_property
    def euler_class(self) -> CohClass:
        return self._euler(self) if self._euler else self.zero()

    def pontryagin_class(self, i: int) -> CohClass:
        return self.pontryagin.part(4 * i)

    def parse_class(self, text: str) -> CohClass:
        return parse_class(self, text)

    def __repr__(self):
        return f"ManifoldModel({self.name})"


@dataclass(frozen=True, eq=False)
class CohClass:
    model: ManifoldModel
    terms: dict[Monomial, Fraction]

    def __post_init__(self):
        clean = {}
        for m, c in self.terms.items():
            c = Fraction(c)
            if c:
                if len(m) != len(self.model.generators):
                    raise ShapeError(f"monomial {m} does not belong to {self.model.name}")
                if any(e > k or e < 0 for e, k in zip(m, self.model.max_exponents)):
                    raise ShapeError(f"monomial {m} is not a basis monomial of {self.model.name}")
                clean[m] = c
        object.__setattr__(self, "terms", clean)

    def _same(self, other: CohClass):
        if other.model is not self.model:
            raise ShapeError(f"classes live on different models ({self.model.name}, {other.model.name})")

    def __add__(self, other):
        if not isinstance(other, CohClass):
            other = self.model.scalar(other)
        self._same(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return CohClass(self.model, out)

    __radd__ = __add__

    def __neg__(self):
        return CohClass(self.model, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, CohClass):
            c = Fraction(other)
            return CohClass(self.model, {m: v * c for m, v in self.terms.items()})
        self._same(other)
        model = self.model
        degs = model.degrees
        out: dict[Monomial, Fraction] = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                prod_m = tuple(i + j for i, j in zip(a, b))
                if any(e > k for e, k in zip(prod_m, model.max_exponents)):
                    continue
                # Koszul sign: each factor of b moves left past later factors of a
                swaps = sum(
                    a[i] * b[j] * degs[i] * degs[j]
                    for i in range(len(a))
                    for j in range(i)
                )
                coeff = x * y * (-1 if swaps % 2 else 1)
                out[prod_m] = out.get(prod_m, 0) + coeff
        return CohClass(model, out)

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        return self * (1 / Fraction(other))

    def __pow__(self, n: int):
        out = self.model.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, CohClass):
            other = self.model.scalar(other)
        return self.model is other.model and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.model), frozenset(self.terms.items())))

    def part(self, degree: int) -> CohClass:
        return CohClass(
            self.model,
            {m: c for m, c in self.terms.items() if self.model.monomial_degree(m) == degree},
        )

    def truncate(self, max_degree: int) -> CohClass:
        return CohClass(
            self.model,
            {m: c for m, c in self.terms.items() if self.model.monomial_degree(m) <= max_degree},
        )

    def constant(self) -> Fraction:
        return self.terms.get((0,) * len(self.model.generators), Fraction(0))

    def is_homogeneous(self, degree: int) -> bool:
        return all(self.model.monomial_degree(m) == degree for m in self.terms)

    def integrate(self) -> Fraction:
        return self.terms.get(self.model.top_monomial, Fraction(0))

    def __str__(self):
        return format_class(self)

    __repr__ = __str__


def format_class(a: CohClass) -> str:
    if not a.terms:
        return "0"
    names = a.model.generator_names
    pieces = []
    for m in sorted(a.terms, key=lambda m: (a.model.monomial_degree(m), m)):
        c = a.terms[m]
        factors = []
        for name, e in zip(names, m):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        mono = "*".join(factors)
        if not mono:
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}"
        pieces.append(("-" if c < 0 else "+", body))
    text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


_TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")
_FACTOR_RE = re.compile(r"^(?:(\d+(?:/\d+)?)|([A-Za-z][A-Za-z0-9_]*'*)(?:\^(\d+))?)$")


def parse_class(model: ManifoldModel, text: str) -> CohClass:
    """Parse expressions like ``3*x^2 - 1/2 e1*e2 + 1``.

    Factors in a term are multiplied left to right, so Koszul signs apply.
    """
    text = text.strip()
    if not text:
        raise ShapeError("empty class expression")
    total = model.zero()
    pos = 0
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ShapeError(f"cannot parse class expression {text!r} at offset {pos}")
        sign = -1 if m.group(1) == "-" else 1
        term = model.scalar(sign)
        for tok in re.split(r"[*\s]+", m.group(2).strip()):
            f = _FACTOR_RE.match(tok)
            if not f:
                raise ShapeError(f"bad factor {tok!r} in {text!r}")
            if f.group(1):
                term = term * Fraction(f.group(1))
            else:
                term = term * (model.gen(f.group(2)) ** int(f.group(3) or 1))
        total = total + term
        pos = m.end()
    return total


# ----------------------------------------------------------------------------
# Model library


def _sphere(n: int) -> ManifoldModel:
    if not 1 <= n <= 8:
        raise UnsupportedModelError(f"S^{n} is outside the library (1 <= n <= 8)")
    return ManifoldModel(
        name=f"S^{n}",
        dimension=n,
        generators=(("y", n),),
        max_exponents=(1,),
        spin=True,
        _euler=lambda M: M.gen("y") * 2 if n % 2 == 0 else M.zero(),
        # S^2 = CP^1 carries a complex structure with c(T) = 1 + 2y
        _chern=(lambda M: 1 + M.gen("y") * 2) if n == 2 else None,
    )


def _projective(n: int) -> ManifoldModel:
    if not 1 <= n <= 3:
        raise UnsupportedModelError(f"CP^{n} is outside the library (1 <= n <= 3)")
    return ManifoldModel(
        name=f"CP^{n}",
        dimension=2 * n,
        generators=(("x", 2),),
        max_exponents=(n,),
        spin=n % 2 == 1,
        _pontryagin=lambda M: (1 + M.gen("x") ** 2) ** (n + 1),
        _chern=lambda M: (1 + M.gen("x")) ** (n + 1),
        _euler=lambda M: M.gen("x") ** n * (n + 1),
    )


def _torus(n: int) -> ManifoldModel:
    if not 1 <= n <= 8:
        raise UnsupportedModelError(f"T^{n} is outside the library (1 <= n <= 8)")
    return ManifoldModel(
        name=f"T^{n}",
        dimension=n,
        generators=tuple((f"e{i + 1}", 1) for i in range(n)),
        max_exponents=(1,) * n,
        spin=True,
        _chern=(lambda M: M.one()) if n % 2 == 0 else None,
    )


def _transport(cls: CohClass, target: ManifoldModel, offset: int) -> CohClass:
    width = len(target.generators)
    out = {}
    for m, c in cls.terms.items():
        full = [0] * width
        full[offset:offset + len(m)] = m
        out[tuple(full)] = c
    return CohClass(target, out)


def product(left: ManifoldModel, right: ManifoldModel) -> ManifoldModel:
    """Graded tensor product; generators of ``right`` are primed on name clashes."""
    names = list(left.generator_names)
    gens = list(left.generators)
    for name, deg in right.generators:
        while name in names:
            name += "'"
        names.append(name)
        gens.append((name, deg))
    k = len(left.generators)

    def lift(get):
        return lambda M: _transport(get(left), M, 0) * _transport(get(right), M, k)

    chern = None
    if left.is_complex and right.is_complex:
        chern = lift(lambda X: X.total_chern)
    return ManifoldModel(
        name=f"{left.name} x {right.name}",
        dimension=left.dimension + right.dimension,
        generators=tuple(gens),
        max_exponents=left.max_exponents + right.max_exponents,
        spin=left.spin and right.spin,
        orientable=left.orientable and right.orientable,
        _pontryagin=lift(lambda X: X.pontryagin),
        _chern=chern,
        _euler=lift(lambda X: X.euler_class),
    )


_FACTOR_NAME = re.compile(r"^(S|CP|T)\^(\d+)$")


LIBRARY_MODELS = (
    *(f"S^{n}" for n in range(1, 9)),
    *(f"CP^{n}" for n in range(1, 4)),
    *(f"T^{n}" for n in range(1, 9)),
    "S^2 x S^2",
    "S^2 x T^2",
    "S^3 x S^3",
    "S^1 x S^3",
    "CP^1 x CP^2",
    "CP^2 x S^4",
    "S^4 x S^4",
    "CP^2 x CP^2",
)


def build_model(descriptor: str) -> ManifoldModel:
    """Build ``S^n``, ``CP^n``, ``T^n`` or a left-associated product ``A x B x ...``."""
    factors = [f for f in re.split(r"\s*[x×*]\s*", descriptor.strip()) if f]
    if not factors:
        raise UnsupportedModelError(f"empty model descriptor {descriptor!r}")
    models = []
    for f in factors:
        m = _FACTOR_NAME.match(f.replace(" ", ""))
        if not m:
            raise UnsupportedModelError(f"unsupported model {f!r}")
        kind, n = m.group(1), int(m.group(2))
        models.append({"S": _sphere, "CP": _projective, "T": _torus}[kind](n))
    out = models[0]
    for nxt in models[1:]:
        out = product(out, nxt)
    return out


# ----------------------------------------------------------------------------
# Operations


def cup_and_integrate(a: CohClass, b: CohClass) -> tuple[CohClass, Fraction]:
    a._same(b)
    p = a * b
    return p, p.integrate()


def _power_sums(elementary: Sequence[CohClass], count: int, model: ManifoldModel) -> list[CohClass]:
    """Newton identities: power sums s_1..s_count of formal roots from e_1, e_2, ..."""
    def e(i):
        return elementary[i - 1] if i <= len(elementary) else model.zero()

    s: list[CohClass] = []
    for k in range(1, count + 1):
        acc = e(k) * ((-1) ** (k - 1) * k)
        for i in range(1, k):
            acc = acc + e(i) * s[k - i - 1] * ((-1) ** (i - 1))
        s.append(acc)
    return s


def _exp(a: CohClass) -> CohClass:
    """exp of a nilpotent class (zero constant term)."""
    if a.constant():
        raise ValueError("exp needs a class without constant term")
    out, term = a.model.one(), a.model.one()
    for k in range(1, a.model.dimension + 1):
        term = term * a / k
        if not term.terms:
            break
        out = out + term
    return out


def multiplicative_class(pontryagin: CohClass, q_series: list) -> CohClass:
    """The multiplicative sequence of a characteristic series in z = x^2.

    Uses log(prod Q(z_j)) = sum a_k * s_k(z), with s_k the Pontryagin power sums.
    """
    model = pontryagin.model
    top = model.dimension // 4
    if top == 0:
        return model.one()
    logq = series.log1(q_series[: top + 1] + [Fraction(0)] * (top + 1 - len(q_series)), top + 1)
    ps = [pontryagin.part(4 * i) for i in range(1, top + 1)]
    sums = _power_sums(ps, top, model)
    exponent = model.zero()
    for k in range(1, top + 1):
        exponent = exponent + sums[k - 1] * logq[k]
    return _exp(exponent)


def a_hat_class(model: ManifoldModel) -> CohClass:
    return multiplicative_class(model.pontryagin, series.a_hat_series(model.dimension // 4 + 1))


def l_class(model: ManifoldModel) -> CohClass:
    return multiplicative_class(model.pontryagin, series.l_series(model.dimension // 4 + 1))


def todd_class(model: ManifoldModel) -> CohClass:
    if not model.is_complex:
        raise IncompleteDataError(f"{model.name} carries no complex tangent data")
    c1 = model.total_chern.part(2)
    return a_hat_class(model) * _exp(c1 / 2)


@dataclass(frozen=True)
class KClassData:
    model: ManifoldModel
    rank: int
    chern: tuple[CohClass | None, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "chern", tuple(self.chern))
        for i, c in enumerate(self.chern, start=1):
            if c is None:
                continue
            c._same(self.model.one())
            if not c.is_homogeneous(2 * i):
                raise ShapeError(f"c_{i} must be homogeneous of degree {2 * i}, got {c}")

    @classmethod
    def trivial(cls, model: ManifoldModel, rank: int) -> KClassData:
        return cls(model, rank, (model.zero(),) * (model.dimension // 2))

    @classmethod
    def from_chern(cls, model: ManifoldModel, rank: int, chern: Sequence[CohClass]) -> KClassData:
        """Pad missing Chern classes above the given ones with zero."""
        chern = list(chern) + [model.zero()] * (model.dimension // 2 - len(chern))
        return cls(model, rank, tuple(chern))

    def c(self, i: int) -> CohClass:
        if 2 * i > self.model.dimension:
            return self.model.zero()
        if i > len(self.chern) or self.chern[i - 1] is None:
            raise IncompleteDataError(f"c_{i} is needed on {self.model.name} but was not supplied")
        return self.chern[i - 1]


def chern_character(k: KClassData) -> CohClass:
    model = k.model
    top = model.dimension // 2
    cs = [k.c(i) for i in range(1, top + 1)]
    sums = _power_sums(cs, top, model)
    ch = model.scalar(k.rank)
    for j in range(1, top + 1):
        ch = ch + sums[j - 1] / factorial(j)
    return ch


def conjugate_character(ch: CohClass) -> CohClass:
    """ch of the conjugate class: parts in degrees 2 mod 4 change sign."""
    model = ch.model
    return CohClass(
        model,
        {m: (-c if model.monomial_degree(m) % 4 == 2 else c) for m, c in ch.terms.items()},
    )


class CharClasses(NamedTuple):
    chern_character: CohClass
    a_hat: CohClass
    l: CohClass


def char_classes(k: KClassData) -> CharClasses:
    return CharClasses(chern_character(k), a_hat_class(k.model), l_class(k.model))


class BettiProfile(NamedTuple):
    euler_characteristic: int
    signature: int | None
    odd_mod2_vanishes: bool


def signature(model: ManifoldModel) -> int | None:
    if not model.orientable or model.dimension % 4:
        return None
    value = l_class(model).integrate()
    if value.denominator != 1:
        raise InternalConsistencyError(f"non-integral L-genus {value} on {model.name}")
    return int(value)


def betti_profile(model: ManifoldModel) -> BettiProfile:
    chi = sum((-1) ** i * b for i, b in enumerate(model.betti))
    odd_ok = all(b == 0 for i, b in enumerate(model.betti_mod2) if i % 2)
    return BettiProfile(chi, signature(model), odd_ok)


def intersection_form(model: ManifoldModel) -> list[list[Fraction]]:
    """Cup-product pairing on the middle-degree basis (dimension divisible by 4)."""
    mid = model.basis_in_degree(model.dimension // 2)
    cls = [CohClass(model, {m: Fraction(1)}) for m in mid]
    return [[(a * b).integrate() for b in cls] for a in cls]
