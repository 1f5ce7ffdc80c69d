"""Rule engine deciding orientability of connection moduli spaces.

Every rule is a sufficient condition.  Rules are tried in a fixed priority:

1. an odd-index operator with structure group O(2m) is not orientable;
2. canonical orientations from a complex-linear symbol, an E + E* split,
   the gauge-theory instances, an abelian group or a complex group;
3. plain orientability from vanishing odd mod-2 cohomology for U(m) and
   SU(m), and for SO(3) through U(2);
4. transfers along U(m) -> SU(m+1), SU(m) -> U(m) and U(m) -> Sp(m);
5. otherwise the verdict is unknown.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import ShapeError
from .index import OperatorDescriptor, OperatorKind
from .topology import ManifoldModel, betti_profile


class Family(str, enum.Enum):
    U = "U"
    SU = "SU"
    SO = "SO"
    O = "O"
    SP = "Sp"
    SPIN = "Spin"
    ABELIAN = "abelian"
    COMPLEX = "complex-reductive"
    GENERIC = "generic"


def _lie_dimension(family: Family, m: int) -> int | None:
    return {
        Family.U: m * m,
        Family.SU: m * m - 1,
        Family.SO: m * (m - 1) // 2,
        Family.O: m * (m - 1) // 2,
        Family.SP: m * (2 * m + 1),
        Family.SPIN: m * (m - 1) // 2,
    }.get(family)


@dataclass(frozen=True)
class GroupDescriptor:
    family: Family
    m: int = 0
    connected: bool = True
    simply_connected: bool = False
    dim_g: int = 0
    center: str = ""

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        f, m = self.family, self.m
        if f in (Family.U, Family.SU, Family.SO, Family.O, Family.SP, Family.SPIN) and m < 1:
            raise ShapeError(f"{f.value}(m) needs m >= 1")
        expected = _lie_dimension(f, m)
        if expected is not None and self.dim_g != expected:
            raise ShapeError(f"dim of {self.name} is {expected}, not {self.dim_g}")
        if f is Family.O and self.connected:
            raise ShapeError("O(m) is not connected")
        if f in (Family.SU, Family.SP) and not (self.connected and self.simply_connected):
            raise ShapeError(f"{self.name} is connected and simply connected")
        if f is Family.U and not self.connected:
            raise ShapeError("U(m) is connected")
        if f is Family.U and self.simply_connected:
            raise ShapeError("U(m) is not simply connected")
        if self.simply_connected and not self.connected:
            raise ShapeError("a simply connected group must be connected")

    @classmethod
    def of(cls, family: Family | str, m: int = 0, **flags) -> GroupDescriptor:
        """Descriptor with the standard flags of a classical family."""
        f = Family(family)
        defaults = {
            Family.U: dict(connected=True, simply_connected=False),
            Family.SU: dict(connected=True, simply_connected=True),
            Family.SO: dict(connected=True, simply_connected=m == 1),
            Family.O: dict(connected=False, simply_connected=False),
            Family.SP: dict(connected=True, simply_connected=True),
            Family.SPIN: dict(connected=True, simply_connected=m >= 3),
        }.get(f, {})
        dim = _lie_dimension(f, m)
        params = dict(defaults)
        if dim is not None:
            params["dim_g"] = dim
        params.update(flags)
        return cls(f, m, **params)

    @classmethod
    def parse(cls, text: str, **flags) -> GroupDescriptor:
        t = text.strip()
        hit = re.fullmatch(r"(U|SU|SO|O|Sp|Spin)\s*\(\s*(\d+)\s*\)", t, flags=re.IGNORECASE)
        if hit:
            name = {f.value.lower(): f for f in Family}[hit.group(1).lower()]
            return cls.of(name, int(hit.group(2)), **flags)
        key = t.lower()
        for f in (Family.ABELIAN, Family.COMPLEX, Family.GENERIC):
            if key in (f.value, f.name.lower()):
                return cls(f, **flags)
        if key == "complex":
            return cls(Family.COMPLEX, **flags)
        raise ShapeError(f"unrecognized group {text!r}")

    @property
    def name(self) -> str:
        if self.family in (Family.ABELIAN, Family.COMPLEX, Family.GENERIC):
            return self.family.value
        return f"{self.family.value}({self.m})"

    @property
    def is_abelian(self) -> bool:
        return (
            self.family is Family.ABELIAN
            or (self.family is Family.U and self.m == 1)
            or (self.family in (Family.SO, Family.SPIN) and self.m <= 2)
            or (self.family in (Family.SU, Family.O) and self.m == 1)
        )


class Status(str, enum.Enum):
    CANONICAL = "orientable-with-canonical"
    ORIENTABLE = "orientable"
    NOT_ORIENTABLE = "not-orientable"
    UNKNOWN = "unknown"


class Rule(NamedTuple):
    id: str
    statement: str


# Static rule table; trails refer to these ids only.
RULES: dict[str, Rule] = {
    r.id: r
    for r in (
        Rule("orthogonal-odd-index", "O(2m) with odd real index: a reflection acts by -1 on the orientation torsor at the trivial connection"),
        Rule("complex-symbol", "a complex-linear symbol gives canonical orientations for every group and bundle"),
        Rule("even-forms-4k+2", "d + d* on even forms of an oriented (4k+2)-manifold has a complex structure via the Hodge star"),
        Rule("spinor-complex-structure", "real spinors carry a compatible complex structure in dimensions 1-6 mod 8 (4 mod 8 for the positive Dirac operator)"),
        Rule("dolbeault-complex", "the Dolbeault operator is complex linear"),
        Rule("asd-almost-complex", "an orientation-compatible almost complex structure makes the ASD symbol complex linear"),
        Rule("flat2-oriented", "flat connections on an oriented surface: the deformation operator is a Dolbeault operator"),
        Rule("flat3-two-form", "flat connections on a 3-manifold: a unit 2-form makes the symbol complex linear"),
        Rule("dt-instanton-complex", "the DT-instanton deformation operator is a Dolbeault operator"),
        Rule("haydys-witten-cr", "an almost CR structure makes the Haydys-Witten symbol complex linear"),
        Rule("self-adjoint-split", "an operator of the form E + E* has canonically trivial orientation bundle"),
        Rule("vafa-witten-split", "the Vafa-Witten deformation operator splits as E + E* with E the ASD operator"),
        Rule("asd-spinc", "ASD operator with connected G: a Spin^c structure yields canonical n-orientations"),
        Rule("kapustin-witten-spinc", "Kapustin-Witten operator with connected G: a Spin^c structure yields canonical n-orientations"),
        Rule("haydys-witten-simply-connected", "Haydys-Witten operator with connected, simply connected G: canonical n-orientations"),
        Rule("abelian-group", "abelian G: trivial adjoint bundle, canonical n-orientation independent of choices"),
        Rule("complex-group", "complex Lie group G: the twisted operator is complex linear"),
        Rule("odd-cohomology-unitary", "vanishing odd mod-2 cohomology kills K^1 mod 2, so all U(m) and SU(m) moduli spaces are orientable"),
        Rule("so3-via-u2", "SO(3) bundles lift to U(2) when H^3 has no 2-torsion, inheriting orientability"),
        Rule("unitary-from-special-unitary", "orientations for SU(m+1) bundles induce orientations for U(m) bundles"),
        Rule("special-unitary-from-unitary", "orientations for U(m) bundles induce orientations for SU(m) bundles"),
        Rule("unitary-from-symplectic", "orientations for Sp(m) bundles induce orientations for U(m) bundles (not conversely)"),
    )
}


@dataclass(frozen=True)
class Verdict:
    status: Status
    trail: tuple[tuple[str, str], ...] = ()
    required_choices: tuple[str, ...] = ()

    def __post_init__(self):
        if self.status is not Status.UNKNOWN and not self.trail:
            raise ShapeError("a definite verdict needs at least one rule in its trail")
        for rid, _ in self.trail:
            if rid not in RULES:
                raise ShapeError(f"trail cites unknown rule {rid!r}")

    @property
    def rule_ids(self) -> tuple[str, ...]:
        return tuple(rid for rid, _ in self.trail)


def _cite(*ids: str) -> tuple[tuple[str, str], ...]:
    return tuple((i, RULES[i].statement) for i in ids)


def standard_orientation_deps(dim_g: int, ind_d: int) -> tuple[bool, bool]:
    """(needs an orientation of det D, needs an orientation of g)."""
    return dim_g % 2 == 1, ind_d % 2 == 1


def _standard_choices(group: GroupDescriptor, op: OperatorDescriptor) -> list[str]:
    need_det, need_g = standard_orientation_deps(group.dim_g, op.real_index())
    out = []
    if need_det:
        out.append("orientation of det D")
    if need_g:
        out.append("orientation of g")
    return out


def complex_symbol_rules(op: OperatorDescriptor) -> tuple[str, ...]:
    """Rule ids certifying a complex-linear symbol, or () when none applies."""
    if op.complex_symbol is False:
        return ()
    k, n = op.kind, op.model.dimension
    if k is OperatorKind.DE_RHAM_EVEN_ODD and n % 4 == 2 and op.model.orientable:
        return ("even-forms-4k+2",)
    if k is OperatorKind.DIRAC and n % 8 in (1, 2, 3, 4, 5, 6):
        return ("spinor-complex-structure",)
    if k is OperatorKind.POSITIVE_DIRAC and n % 8 == 4:
        return ("spinor-complex-structure",)
    if k is OperatorKind.DOLBEAULT:
        return ("dolbeault-complex",)
    if k is OperatorKind.ASD4 and (op.model.is_complex or op.complex_symbol):
        return ("asd-almost-complex",)
    if k is OperatorKind.FLAT2 and op.model.orientable:
        return ("flat2-oriented",)
    if k is OperatorKind.FLAT3:
        return ("flat3-two-form",)
    if k is OperatorKind.DT_INSTANTON:
        return ("dt-instanton-complex",)
    if k is OperatorKind.HAYDYS_WITTEN and op.complex_symbol:
        return ("haydys-witten-cr",)
    return ()


def _canonical(op: OperatorDescriptor, group: GroupDescriptor) -> Verdict | None:
    sym = complex_symbol_rules(op)
    if op.complex_symbol and not sym:
        sym = ("complex-symbol",)
    elif sym:
        sym = sym + ("complex-symbol",)
    if sym:
        choices = []
        if op.kind is OperatorKind.FLAT3 and not group.connected:
            choices.append("unit 2-form (the n-orientation depends on it for disconnected G)")
        return Verdict(Status.CANONICAL, _cite(*sym), tuple(choices))
    if op.kind is OperatorKind.VAFA_WITTEN:
        return Verdict(Status.CANONICAL, _cite("vafa-witten-split", "self-adjoint-split"))
    if op.split:
        return Verdict(Status.CANONICAL, _cite("self-adjoint-split"))
    if group.is_abelian:
        return Verdict(Status.CANONICAL, _cite("abelian-group"), tuple(_standard_choices(group, op)))
    if group.family is Family.COMPLEX:
        return Verdict(Status.CANONICAL, _cite("complex-group"))
    spinc_free = group.simply_connected or group.family is Family.U
    if op.kind in (OperatorKind.ASD4, OperatorKind.KAPUSTIN_WITTEN) and group.connected:
        rid = "asd-spinc" if op.kind is OperatorKind.ASD4 else "kapustin-witten-spinc"
        choices = [] if spinc_free else ["Spin^c structure"]
        return Verdict(Status.CANONICAL, _cite(rid), tuple(choices + _standard_choices(group, op)))
    if op.kind is OperatorKind.HAYDYS_WITTEN and group.connected and group.simply_connected:
        return Verdict(
            Status.CANONICAL,
            _cite("haydys-witten-simply-connected"),
            tuple(_standard_choices(group, op)),
        )
    return None


def _orientable(model: ManifoldModel, op: OperatorDescriptor, group: GroupDescriptor, visited) -> Verdict | None:
    if group.family in (Family.U, Family.SU) and betti_profile(model).odd_mod2_vanishes:
        return Verdict(Status.ORIENTABLE, _cite("odd-cohomology-unitary"))
    if group.family is Family.SO and group.m == 3:
        # library models have torsion-free cohomology, so H^3 has no 2-torsion
        via = _evaluate(model, op, GroupDescriptor.of(Family.U, 2), visited)
        if via.status in (Status.ORIENTABLE, Status.CANONICAL):
            return Verdict(Status.ORIENTABLE, via.trail + _cite("so3-via-u2"))
    return None


_REDUCTIONS = {
    # target family: list of (source descriptor builder, rule id)
    Family.U: [
        (lambda m: GroupDescriptor.of(Family.SU, m + 1), "unitary-from-special-unitary"),
        (lambda m: GroupDescriptor.of(Family.SP, m), "unitary-from-symplectic"),
    ],
    Family.SU: [(lambda m: GroupDescriptor.of(Family.U, m), "special-unitary-from-unitary")],
}


def _evaluate(model: ManifoldModel, op: OperatorDescriptor, group: GroupDescriptor, visited: frozenset) -> Verdict:
    if group.family is Family.O and group.m % 2 == 0 and op.real_index() % 2:
        return Verdict(Status.NOT_ORIENTABLE, _cite("orthogonal-odd-index"))
    v = _canonical(op, group)
    if v is not None:
        return v
    v = _orientable(model, op, group, visited | {group.family})
    if v is not None:
        return v
    for build, rid in _REDUCTIONS.get(group.family, ()):
        source = build(group.m)
        if source.family in visited or source.family is group.family:
            continue
        sub = _evaluate(model, op, source, visited | {group.family})
        if sub.status in (Status.ORIENTABLE, Status.CANONICAL):
            return Verdict(sub.status, sub.trail + _cite(rid), sub.required_choices)
    return Verdict(Status.UNKNOWN)


def evaluate(model: ManifoldModel, op: OperatorDescriptor, group: GroupDescriptor) -> Verdict:
    if op.model is not model:
        raise ShapeError("operator lives on a different model")
    return _evaluate(model, op, group, frozenset())
