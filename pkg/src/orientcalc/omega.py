"""The orientation group: a central extension of K^0 by {+1, -1}.

Elements are stored in trivialized coordinates ``(coords, sign)``.  The
reference multiplication is

    [(a, b, c), e] * [(a', b', c'), e']
        = [(a + a', b + b', c + c'),
           (-1)^(sum_{h<i} (chi_hi + chi_hh chi_ii) a'_h a_i) * Xi(gamma) * e e']

where ``gamma`` carries ``2^(p_j - 1)`` in slot j whenever the residues
``b_j + b'_j`` wrap around ``2^p_j``.  The sum runs over all pairs of free
indices ``h < i``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .errors import IncompleteDataError, InconsistencyError, NonConformingError, ShapeError
from .fgab import FgAbGroup, GroupElement, two_torsion
from .index import EulerForm

Product = Callable[["OmegaElement", "OmegaElement"], "OmegaElement"]


def _check_sign(s: int) -> int:
    if s not in (1, -1):
        raise ShapeError(f"sign must be +1 or -1, got {s!r}")
    return s


@dataclass(frozen=True)
class OmegaElement:
    coords: GroupElement
    sign: int = 1

    def __post_init__(self):
        _check_sign(self.sign)

    def flipped(self, eps: int = -1) -> OmegaElement:
        return OmegaElement(self.coords, self.sign * eps)


def _xi_key(k0: FgAbGroup, g) -> tuple[int, ...]:
    if isinstance(g, GroupElement):
        k0.check(g)
        return g.two
    return tuple(g)


def xi_from_generators(k0: FgAbGroup, signs: Sequence[int]) -> dict[tuple[int, ...], int]:
    """The morphism on 2-torsion taking value ``signs[j]`` on the order-2 element of slot j."""
    if len(signs) != len(k0.two_primary):
        raise ShapeError(f"{len(signs)} generator signs for {len(k0.two_primary)} 2-primary factors")
    out = {}
    for g in two_torsion(k0):
        s = 1
        for b, sj in zip(g.two, signs):
            if b:
                s *= _check_sign(sj)
        out[g.two] = s
    return out


def all_xi(k0: FgAbGroup) -> list[dict[tuple[int, ...], int]]:
    """Every morphism from the 2-torsion subgroup to {+1, -1}."""
    return [xi_from_generators(k0, s) for s in itertools.product((1, -1), repeat=len(k0.two_primary))]


class OmegaGroup:
    def __init__(self, k0: FgAbGroup, chi: EulerForm, xi: Mapping | None = None):
        if chi.group != k0:
            raise ShapeError("Euler form belongs to a different group")
        self.k0 = k0
        self.chi = chi
        torsion = two_torsion(k0)
        expected = {g.two for g in torsion}
        if xi is None:
            table = {t: 1 for t in expected}
        else:
            given = {_xi_key(k0, g): _check_sign(s) for g, s in xi.items()}
            stray = set(given) - expected
            if stray:
                raise ShapeError(f"Xi given outside the 2-torsion subgroup: {sorted(stray)}")
            if given.get(k0.zero().two, 1) != 1:
                raise InconsistencyError("Xi(0) must be +1")
            # generator values fix the morphism; other entries are checked against it
            table = xi_from_squares(k0, given)
        for g, h in itertools.product(torsion, repeat=2):
            s = k0.add(g, h).two
            if table[s] != table[g.two] * table[h.two]:
                raise InconsistencyError(f"Xi is not a morphism at {g.two} + {h.two}")
        self._xi = table
        # bilinear exponent coefficients c_hi for h < i, reduced mod 2
        m = chi.matrix
        r = k0.free_rank
        self._coeff = [
            (h, i, (m[h][i] + m[h][h] * m[i][i]) % 2) for h in range(r) for i in range(h + 1, r)
        ]
        self._odd_pairs = [(h, i) for h, i, c in self._coeff if c]
        self._moduli = k0.two_moduli

    def __eq__(self, other):
        return (
            isinstance(other, OmegaGroup)
            and self.k0 == other.k0
            and self.chi == other.chi
            and self._xi == other._xi
        )

    def __hash__(self):
        return hash((self.k0, self.chi, tuple(sorted(self._xi.items()))))

    def __repr__(self):
        return f"OmegaGroup({self.k0.describe()}, chi={self.chi.matrix}, xi={self._xi})"

    @property
    def xi_table(self) -> dict[tuple[int, ...], int]:
        return dict(self._xi)

    def xi(self, gamma: GroupElement) -> int:
        self.k0.check(gamma)
        try:
            return self._xi[gamma.two]
        except KeyError:
            raise ShapeError(f"{gamma} is not 2-torsion") from None

    def element(self, free=(), two=(), odd=(), sign: int = 1) -> OmegaElement:
        return OmegaElement(self.k0.element(free, two, odd), sign)

    def identity(self) -> OmegaElement:
        return OmegaElement(self.k0.zero(), 1)

    def check(self, x: OmegaElement) -> None:
        self.k0.check(x.coords)
        _check_sign(x.sign)

    def elements(self, free_range: range = range(0, 1)) -> Iterable[OmegaElement]:
        for v in self.k0.elements(free_range):
            yield OmegaElement(v, 1)
            yield OmegaElement(v, -1)

    def carry(self, x: GroupElement, y: GroupElement) -> GroupElement:
        two = tuple(
            m // 2 if b + b2 >= m else 0 for b, b2, m in zip(x.two, y.two, self.k0.two_moduli)
        )
        return GroupElement((0,) * self.k0.free_rank, two, (0,) * len(self.k0.odd_orders))

    def cocycle(self, x: GroupElement, y: GroupElement) -> int:
        """Sign picked up by multiplying trivialized coordinates x then y."""
        parity = 0
        if self._odd_pairs:
            a, a2 = x.free, y.free
            for h, i in self._odd_pairs:
                parity ^= a2[h] * a[i] & 1
        s = 1
        if self._moduli:
            s = self._xi[tuple(m // 2 if b + b2 >= m else 0 for b, b2, m in zip(x.two, y.two, self._moduli))]
        return -s if parity else s

    def multiply(self, x: OmegaElement, y: OmegaElement) -> OmegaElement:
        self.check(x)
        self.check(y)
        return OmegaElement(
            self.k0._sum(x.coords, y.coords), self.cocycle(x.coords, y.coords) * x.sign * y.sign
        )

    def inverse(self, x: OmegaElement) -> OmegaElement:
        self.check(x)
        v = self.k0.neg(x.coords)
        return OmegaElement(v, x.sign * self.cocycle(x.coords, v))

    def power(self, x: OmegaElement, n: int) -> OmegaElement:
        base = x if n >= 0 else self.inverse(x)
        out = self.identity()
        for _ in range(abs(n)):
            out = self.multiply(out, base)
        return out


def multiply(g: OmegaGroup, x: OmegaElement, y: OmegaElement) -> OmegaElement:
    return g.multiply(x, y)


def xi_from_squares(
    k0: FgAbGroup, oracle: Mapping | Callable[[GroupElement], int]
) -> dict[tuple[int, ...], int]:
    """Recover Xi from the signs of squares of 2-torsion elements.

    Generator values determine the morphism; every further value the oracle
    supplies is checked against it.
    """
    def ask(g: GroupElement):
        if callable(oracle):
            return oracle(g)
        if g in oracle:
            return oracle[g]
        return oracle.get(g.two)

    signs = []
    for j, m in enumerate(k0.two_moduli):
        g = k0.scale(m // 2, k0.two_generator(j))
        s = ask(g)
        if s is None:
            raise IncompleteDataError(f"no square sign for the order-2 element of factor {j}")
        signs.append(_check_sign(s))
    xi = xi_from_generators(k0, signs)
    for g in two_torsion(k0):
        s = ask(g)
        if s is not None and _check_sign(s) != xi[g.two]:
            raise InconsistencyError(
                f"square sign {s} at {g.two} contradicts the morphism value {xi[g.two]}"
            )
    return xi


# ----------------------------------------------------------------------------
# Trivializations


@dataclass(frozen=True)
class Trivialization:
    """A bijection between an abstract orientation group and coordinates (v, sign).

    ``forward`` sends an abstract element to its coordinates; ``backward`` is
    the inverse.  Both are compatible with projection to K^0.
    """

    group: OmegaGroup
    forward: Callable[[OmegaElement], OmegaElement]
    backward: Callable[[OmegaElement], OmegaElement]
    eta: tuple[int, ...] = ()
    zeta: tuple[int, ...] = ()
    odd_signs: tuple[int, ...] = ()

    def __call__(self, x: OmegaElement) -> OmegaElement:
        return self.forward(x)


@dataclass
class _WordBuilder:
    g: OmegaGroup
    product: Product
    identity: OmegaElement
    lam: list[OmegaElement]
    lam_inv: list[OmegaElement]
    mu: list[OmegaElement]
    nu: list[OmegaElement]
    cache: dict = field(default_factory=dict)

    powers: dict = field(default_factory=dict)

    def power(self, x: OmegaElement, n: int) -> OmegaElement:
        """identity * x * ... * x, memoized so each new exponent costs one product."""
        known = self.powers.setdefault(x, [self.identity])
        while len(known) <= n:
            known.append(self.product(known[-1], x))
        return known[n]

    def word(self, v: GroupElement) -> OmegaElement:
        hit = self.cache.get(v)
        if hit is None:
            out = self.identity
            for i, a in enumerate(v.free):
                out = self.product(out, self.power(self.lam[i] if a >= 0 else self.lam_inv[i], abs(a)))
            for j, b in enumerate(v.two):
                out = self.product(out, self.power(self.mu[j], b))
            for k, c in enumerate(v.odd):
                out = self.product(out, self.power(self.nu[k], c))
            if out.coords != v:
                raise NonConformingError(f"product does not add coordinates: word for {v} landed on {out.coords}")
            hit = self.cache[v] = out
        return hit


def _abstract_identity(g: OmegaGroup, product: Product) -> OmegaElement:
    zero = g.k0.zero()
    idem = [OmegaElement(zero, s) for s in (1, -1) if product(OmegaElement(zero, s), OmegaElement(zero, s)) == OmegaElement(zero, s)]
    if len(idem) != 1:
        raise NonConformingError("product has no unique idempotent over 0")
    return idem[0]


def _abstract_inverse(product: Product, identity: OmegaElement, x: OmegaElement, k0: FgAbGroup) -> OmegaElement:
    v = k0.neg(x.coords)
    for s in (1, -1):
        y = OmegaElement(v, s)
        if product(x, y) == identity:
            return y
    raise NonConformingError(f"no inverse for {x}")


def normal_form(
    g: OmegaGroup,
    eta: Sequence[int] | None = None,
    zeta: Sequence[int] | None = None,
    product: Product | None = None,
) -> Trivialization:
    """Trivialize the group by ordered words in generators.

    ``product`` is the abstract multiplication (defaults to the reference
    law).  Free and 2-primary generators are taken with the given signs in
    the abstract coordinates; odd-order generators get the unique sign whose
    q-th power is the identity.  An element ``eps * word(alpha)`` maps to
    ``(alpha, eps)``.
    """
    k0 = g.k0
    prod = product or g.multiply
    eta = tuple(_check_sign(s) for s in (eta if eta is not None else (1,) * k0.free_rank))
    zeta = tuple(_check_sign(s) for s in (zeta if zeta is not None else (1,) * len(k0.two_primary)))
    if len(eta) != k0.free_rank or len(zeta) != len(k0.two_primary):
        raise ShapeError("one sign per free generator and per 2-primary generator is required")

    e = _abstract_identity(g, prod)
    lam = [OmegaElement(k0.free_generator(i), s) for i, s in enumerate(eta)]
    lam_inv = [_abstract_inverse(prod, e, x, k0) for x in lam]
    mu = [OmegaElement(k0.two_generator(j), s) for j, s in enumerate(zeta)]
    builder = _WordBuilder(g, prod, e, lam, lam_inv, mu, [])
    nu = []
    for k, q in enumerate(k0.odd_orders):
        fits = [s for s in (1, -1) if builder.power(OmegaElement(k0.odd_generator(k), s), q) == e]
        if len(fits) != 1:
            raise NonConformingError(f"{len(fits)} orientations of odd generator {k} have trivial q-th power")
        nu.append(OmegaElement(k0.odd_generator(k), fits[0]))
    builder.nu = nu

    def forward(x: OmegaElement) -> OmegaElement:
        k0.check(x.coords)
        w = builder.word(x.coords)
        return OmegaElement(x.coords, x.sign * w.sign)

    def backward(y: OmegaElement) -> OmegaElement:
        k0.check(y.coords)
        w = builder.word(y.coords)
        return w.flipped(y.sign)

    triv = Trivialization(g, forward, backward, eta, zeta, tuple(n.sign for n in nu))
    _verify_transport(triv, prod, _spanning_sample(k0))
    return triv


def _spanning_sample(k0: FgAbGroup) -> list[GroupElement]:
    """Generators, their negatives and pairwise sums: enough to pin the cocycle's pieces."""
    gens = (
        [k0.free_generator(i) for i in range(k0.free_rank)]
        + [k0.two_generator(j) for j in range(len(k0.two_primary))]
        + [k0.odd_generator(k) for k in range(len(k0.odd_orders))]
    )
    sample = {k0.zero()}
    for x in gens:
        sample.add(x)
        sample.add(k0.neg(x))
        sample.add(k0.scale(2, x))
    for x, y in itertools.combinations(gens, 2):
        sample.add(k0.add(x, y))
    return sorted(sample, key=lambda v: (v.free, v.two, v.odd))


def _verify_transport(triv: Trivialization, product: Product, sample: Sequence[GroupElement]) -> None:
    g = triv.group
    for u, v in itertools.product(sample, repeat=2):
        x = OmegaElement(u, 1)
        y = OmegaElement(v, 1)
        lhs = triv.forward(product(triv.backward(x), triv.backward(y)))
        rhs = g.multiply(x, y)
        if lhs != rhs:
            raise NonConformingError(f"transported product at {u}, {v} gives {lhs}, reference law gives {rhs}")


def transport_matches(triv: Trivialization, product: Product, sample: Iterable[GroupElement]) -> bool:
    try:
        _verify_transport(triv, product, list(sample))
    except NonConformingError:
        return False
    return True


def sign_factor(k0: FgAbGroup, eta: Sequence[int], zeta: Sequence[int], v: GroupElement) -> int:
    """prod eta_i^(a_i) * prod zeta_j^(b_j) with b_j read as its residue in [0, 2^p_j)."""
    s = 1
    for e, a in zip(eta, v.free):
        if e == -1 and a % 2:
            s = -s
    for z, b in zip(zeta, v.two):
        if z == -1 and b % 2:
            s = -s
    return s


def relabel(triv: Trivialization, eta: Sequence[int], zeta: Sequence[int]) -> Trivialization:
    """The trivialization obtained by multiplying signs by prod eta^a prod zeta^b."""
    k0 = triv.group.k0
    eta, zeta = tuple(eta), tuple(zeta)

    def forward(x):
        y = triv.forward(x)
        return y.flipped(sign_factor(k0, eta, zeta, y.coords))

    def backward(y):
        return triv.backward(y.flipped(sign_factor(k0, eta, zeta, y.coords)))

    return Trivialization(triv.group, forward, backward)


def compare_trivializations(
    lam: Trivialization,
    lam2: Trivialization,
    sample: Iterable[GroupElement] | None = None,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The unique (eta, zeta) with lam2 o lam^-1 (v, e) = (v, prod eta^a prod zeta^b e).

    Signs are read off the generators, then the relation is re-checked on
    ``sample`` (by default a spanning set: generators, negatives, doubles
    and pairwise sums).
    """
    if lam.group.k0 != lam2.group.k0:
        raise ShapeError("trivializations of different groups")
    k0 = lam.group.k0

    def through(y: OmegaElement) -> OmegaElement:
        z = lam2.forward(lam.backward(y))
        if z.coords != y.coords:
            raise NonConformingError(f"trivializations disagree on coordinates at {y.coords}")
        return z

    eta = tuple(through(OmegaElement(k0.free_generator(i), 1)).sign for i in range(k0.free_rank))
    zeta = tuple(through(OmegaElement(k0.two_generator(j), 1)).sign for j in range(len(k0.two_primary)))
    for v in _spanning_sample(k0) if sample is None else sample:
        for eps in (1, -1):
            got = through(OmegaElement(v, eps)).sign
            want = sign_factor(k0, eta, zeta, v) * eps
            if got != want:
                raise NonConformingError(f"comparison at {v} is {got}, generator signs predict {want}")
    return eta, zeta


# ----------------------------------------------------------------------------
# Direct-sum sign calculus


SWAP_FLAVORS = ("torsor_lambda", "torsor_phi", "associativity")


def swap_sign(form: EulerForm, alpha: GroupElement, beta: GroupElement, flavor: str) -> int:
    """Sign relating the two orders of a direct sum.

    ``torsor_lambda``: (-1)^(ind_P ind_Q) with ind = chi(x, x).
    ``torsor_phi``: (-1)^(chi(a, b) + chi(a, a) chi(b, b)).
    ``associativity``: always +1.
    """
    aa = form(alpha, alpha)
    bb = form(beta, beta)
    if flavor == "torsor_lambda":
        return (-1) ** ((aa * bb) % 2)
    if flavor == "torsor_phi":
        return (-1) ** ((form(alpha, beta) + aa * bb) % 2)
    if flavor == "associativity":
        return 1
    raise ShapeError(f"unknown flavor {flavor!r}; expected one of {SWAP_FLAVORS}")
