"""Acceptance suite: one test per criterion, each logging a single pass/fail line."""

import itertools
import json
import os
import random
import subprocess
import sys
import time
from fractions import Fraction
from math import factorial

from acceptance_log import criterion
from builders import GROUPS, coboundary, random_group, twisted_product
from cli_cases import GOLDEN, cases, job_for
from golden_orientability import GOLDEN as ORIENT_GOLDEN
from oracles import (
    cokernel_by_enumeration,
    cyclic_product_histogram,
    det,
    determinantal_invariants,
    omega_product,
    sylvester_inertia,
)

from orientcalc.cli import emit_report, parse_structured, run_config
from orientcalc.fgab import IntMatrix, is_smith_normal_form, snf_decompose, two_torsion
from orientcalc.index import EulerForm, OperatorDescriptor, euler_form, ind_p, twisted_index
from orientcalc.omega import OmegaElement, OmegaGroup, all_xi, compare_trivializations, normal_form, swap_sign
from orientcalc.orientability import GroupDescriptor, evaluate
from orientcalc.skeleton import (
    LIBRARY,
    SimplicialComplex,
    barycentric_subdivision,
    disjoint,
    dual_cell_counts,
    dual_skeleton,
    embed_in_subdivision,
    end_restriction,
    library_complex,
    prism_ends,
    prism_triangulation,
    relative_skeleton,
    restrict_to,
    retracts_onto,
)
from orientcalc.topology import (
    CohClass,
    KClassData,
    LIBRARY_MODELS,
    betti_profile,
    build_model,
    chern_character,
    conjugate_character,
    intersection_form,
    l_class,
    signature,
)


def _symmetric_forms(r):
    cells = [(h, i) for h in range(r) for i in range(h, r)]
    for values in itertools.product(range(-2, 3), repeat=len(cells)):
        m = [[0] * r for _ in range(r)]
        for (h, i), v in zip(cells, values):
            m[h][i] = m[i][h] = v
        yield m


def _bilinear(m, a, b):
    return sum(m[h][i] * a[h] * b[i] for h in range(len(m)) for i in range(len(m)))


def _key(x: OmegaElement):
    return (x.coords.free, x.coords.two, x.coords.odd, x.sign)


def _check_omega_group(k0, chi, xi, D, sums, add, seen):
    g = OmegaGroup(k0, EulerForm.from_rows(chi, k0), xi)
    e = g.identity()
    plus = {v: OmegaElement(v, 1) for v in D}
    prod = {}
    for x in D:
        for y in D:
            p = g.multiply(plus[x], plus[y])
            want = omega_product(
                k0.free_rank, k0.two_moduli, k0.odd_orders, chi, g.xi_table, _key(plus[x]), _key(plus[y])
            )
            assert _key(p) == want, (chi, x, y)
            assert g.multiply(plus[x].flipped(), plus[y]) == p.flipped()
            prod[x, y] = p
    # commutator sign against the bilinear formula, for every pair
    quad = {x: _bilinear(chi, x.free, x.free) for x in D}
    for x in D:
        for y in D:
            want = (-1) ** ((_bilinear(chi, x.free, y.free) + quad[x] * quad[y]) % 2)
            assert prod[y, x].sign == want * prod[x, y].sign
    # square law on the 2-torsion
    for gamma in two_torsion(k0):
        for s in (1, -1):
            assert g.multiply(OmegaElement(gamma, s), OmegaElement(gamma, s)) == OmegaElement(k0.zero(), g.xi(gamma))
    # identity and inverses
    for x in D:
        for s in (1, -1):
            z = OmegaElement(x, s)
            assert g.multiply(e, z) == z == g.multiply(z, e)
            inv = g.inverse(z)
            assert g.multiply(z, inv) == e == g.multiply(inv, z)
    # associativity reduces to the cocycle identity; tables over D x D, (D+D) x D, D x (D+D)
    left = tuple(g.cocycle(s, z) for s in sums for z in D)
    right = tuple(g.cocycle(x, s) for x in D for s in sums)
    table = (tuple(p.sign for p in prod.values()), left, right)
    if table in seen:
        return
    seen.add(table)
    idx = {s: i for i, s in enumerate(sums)}
    nd, ns = len(D), len(sums)
    at = [[idx[add[x, y]] for y in D] for x in D]
    sg = [[prod[x, y].sign for y in D] for x in D]
    for i, j, k in itertools.product(range(nd), repeat=3):
        lhs = sg[i][j] * left[at[i][j] * nd + k]
        rhs = sg[j][k] * right[i * ns + at[j][k]]
        assert lhs == rhs, (chi, D[i], D[j], D[k])
    # a spot check that the cocycle table is the one multiply uses off the box
    for s in sums[:: max(1, len(sums) // 7)]:
        for z in D[:: max(1, nd // 5)]:
            assert g.multiply(OmegaElement(s, 1), plus[z]).sign == left[idx[s] * nd + D.index(z)]


@criterion(1, "Omega group law")
def test_criterion_1_omega_group_law():
    start = time.perf_counter()
    checked = 0
    for name, k0 in GROUPS.items():
        D = list(k0.elements(range(-3, 4)))
        add = {(x, y): k0.add(x, y) for x in D for y in D}
        sums = sorted(set(add.values()), key=lambda v: (v.free, v.two, v.odd))
        seen: set = set()
        for chi in _symmetric_forms(k0.free_rank):
            for xi in all_xi(k0):
                _check_omega_group(k0, chi, xi, D, sums, add, seen)
                checked += 1
    elapsed = time.perf_counter() - start
    assert elapsed < 30, f"took {elapsed:.1f}s"
    return f"{checked} (K^0, chi, Xi) cases over 8 groups"


@criterion(2, "trivialization comparison round-trip")
def test_criterion_2_trivialization_round_trip():
    rng = random.Random(20261018)
    for _ in range(50):
        g = random_group(rng)
        k0 = g.k0
        product = twisted_product(g, coboundary(rng, k0))
        eta1, eta2 = ([rng.choice((1, -1)) for _ in range(k0.free_rank)] for _ in range(2))
        zeta1, zeta2 = ([rng.choice((1, -1)) for _ in range(len(k0.two_primary))] for _ in range(2))
        lam1 = normal_form(g, eta1, zeta1, product)
        lam2 = normal_form(g, eta2, zeta2, product)
        eta = tuple(a * b for a, b in zip(eta1, eta2))
        zeta = tuple(a * b for a, b in zip(zeta1, zeta2))
        assert compare_trivializations(lam1, lam2) == (eta, zeta)
        pool = list(k0.elements(range(-2, 3)))
        for v in rng.sample(pool, min(30, len(pool))):
            for s in (1, -1):
                got = lam2(lam1.backward(OmegaElement(v, s)))
                sign = s
                for e, a in zip(eta, v.free):
                    sign *= e ** (a % 2)
                for z, b in zip(zeta, v.two):
                    sign *= z ** (b % 2)
                assert got == OmegaElement(v, sign)
    return "50 pairs, comparison map re-evaluated pointwise"


@criterion(3, "Smith normal form against brute force")
def test_criterion_3_snf_oracle():
    rng = random.Random(3)
    enumerated = 0
    n_cases = 10_000
    for _ in range(n_cases):
        rows = [[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)]
        A = IntMatrix.from_rows(rows)
        res = snf_decompose(A)
        assert res.U @ A @ res.V == res.snf
        assert abs(det(res.U.to_rows())) == 1
        assert abs(det(res.V.to_rows())) == 1
        assert is_smith_normal_form(res.snf)
        assert [abs(d) for d in res.diagonal if d] == determinantal_invariants(rows)
        d = det(rows)
        if d and abs(d) <= 200:
            order, hist = cokernel_by_enumeration(rows)
            assert res.group.order() == order
            assert cyclic_product_histogram(list(res.group.two_moduli + res.group.odd_orders)) == hist
            enumerated += 1
    return f"{n_cases} matrices, {enumerated} cokernels enumerated"


@criterion(4, "characteristic numbers")
def test_criterion_4_characteristic_numbers():
    start = time.perf_counter()
    for n in range(1, 9):
        assert build_model(f"S^{n}").euler_class.integrate() == 1 + (-1) ** n
        assert build_model(f"T^{n}").euler_class.integrate() == 0
    for n in range(1, 4):
        assert build_model(f"CP^{n}").euler_class.integrate() == n + 1
    M = build_model("CP^2")
    assert l_class(M).integrate() == Fraction(1)
    assert (M.pontryagin_class(1) / 3).integrate() == Fraction(1)
    assert signature(M) == 1
    elapsed = time.perf_counter() - start
    assert elapsed < 1, f"took {elapsed:.2f}s"
    return "S^1..S^8, T^1..T^8, CP^1..CP^3, signature(CP^2) = 1"


@criterion(5, "index sanity")
def test_criterion_5_index_sanity():
    models = [build_model(d) for d in LIBRARY_MODELS]
    for M in models:
        op = OperatorDescriptor("DeRhamEvenOdd", M)
        one = KClassData.trivial(M, 1)
        assert twisted_index(op, one, one) == betti_profile(M).euler_characteristic
    four = [M for M in models if M.dimension == 4 and M.orientable]
    for M in four:
        b = M.betti
        plus, _ = sylvester_inertia(intersection_form(M))
        prof = betti_profile(M)
        want = (prof.euler_characteristic + signature(M)) // 2
        assert want == b[0] - b[1] + plus
        one = KClassData.trivial(M, 1)
        for kind in ("Signature", "ASD4"):
            assert twisted_index(OperatorDescriptor(kind, M), one, one) == want
    S4 = build_model("S^4")
    y = S4.gen("y")
    op = OperatorDescriptor("PositiveDirac", S4)
    one = KClassData.trivial(S4, 1)
    for k in range(-5, 6):
        E = KClassData.from_chern(S4, 2, [S4.zero(), y * k])
        assert twisted_index(op, E, one) == -k
    T4 = build_model("T^4")
    assert twisted_index(OperatorDescriptor("Dirac", T4), KClassData.trivial(T4, 1), KClassData.trivial(T4, 1)) == 0
    return f"{len(models)} de Rham models, {len(four)} four-manifolds"


def _witnesses(rng, M, r):
    """Random sums of line bundles, or instanton-type classes when H^2 = 0."""
    deg2 = [CohClass(M, {m: Fraction(1)}) for m in M.basis_in_degree(2)]
    out = []
    for _ in range(r):
        if not deg2:
            out.append(KClassData.from_chern(M, 2, [M.zero(), M.euler_class * rng.randint(-3, 3) / 2]))
            continue
        total = M.one()
        rank = rng.randint(1, 2)
        for _ in range(rank):
            c1 = M.zero()
            for b in deg2:
                c1 = c1 + b * rng.randint(-2, 2)
            total = total * (1 + c1)
        chern = [total.part(2 * i) for i in range(1, M.dimension // 2 + 1)]
        out.append(KClassData.from_chern(M, rank, chern))
    return out


def _sum_character(witnesses, a):
    total = witnesses[0].model.zero()
    for w, c in zip(witnesses, a):
        total = total + chern_character(w) * c
    return total


@criterion(6, "Euler-form contracts")
def test_criterion_6_euler_form_contracts():
    rng = random.Random(6)
    scenarios = [
        ("CP^2", "Signature"),
        ("CP^2", "DeRhamEvenOdd"),
        ("CP^2", "Dolbeault"),
        ("S^2 x S^2", "Signature"),
        ("S^2 x S^2", "Dirac"),
        ("S^4", "PositiveDirac"),
        ("CP^1", "Dolbeault"),
        ("CP^3", "Dolbeault"),
        ("S^2 x T^2", "ASD4"),
        ("CP^1 x CP^2", "Dolbeault"),
    ]
    forms = 0
    enumerated = 0
    for name, kind in scenarios:
        M = build_model(name)
        op = OperatorDescriptor(kind, M)
        density = op.index_class()
        for r in (1, 2, 3):
            ws = _witnesses(rng, M, r)
            form = euler_form(op, ws)
            forms += 1
            for a in itertools.product(range(-2, 3), repeat=r):
                alpha = form.group.element(list(a))
                for b in itertools.product(range(-1, 2), repeat=r):
                    beta = form.group.element(list(b))
                    assert form(alpha, beta) == form(beta, alpha)
                ch = _sum_character(ws, a)
                direct = (ch * conjugate_character(ch) * density).integrate()
                assert ind_p(form, alpha) == direct
                enumerated += 1
    # the torsor sign from the Euler form against the commutator of the group law
    k_forms = [f for f in _generated_forms(rng)]
    for _ in range(1000):
        form = rng.choice(k_forms)
        k0 = form.group
        g = OmegaGroup(k0, form)
        alpha = k0.element([rng.randint(-4, 4) for _ in range(k0.free_rank)])
        beta = k0.element([rng.randint(-4, 4) for _ in range(k0.free_rank)])
        x, y = OmegaElement(alpha, 1), OmegaElement(beta, 1)
        ratio = g.multiply(y, x).sign * g.multiply(x, y).sign
        assert swap_sign(form, alpha, beta, "torsor_phi") == ratio
        aa, bb = ind_p(form, alpha), ind_p(form, beta)
        assert swap_sign(form, alpha, beta, "torsor_lambda") == (-1) ** (aa * bb % 2)
    return f"{forms} generated forms, {enumerated} classes, 1000 sign pairs"


def _generated_forms(rng):
    out = []
    for name, kind in [("CP^2", "Signature"), ("S^2 x S^2", "Signature"), ("CP^3", "Dolbeault"), ("CP^2", "DeRhamEvenOdd")]:
        M = build_model(name)
        op = OperatorDescriptor(kind, M)
        for r in (2, 3):
            out.append(euler_form(op, _witnesses(rng, M, r)))
    return out


@criterion(7, "skeleton suite")
def test_criterion_7_skeletons():
    start = time.perf_counter()
    pairs = 0
    for name in ("triangle", "octahedron", "icosahedron", "simplex4_boundary", "torus18"):
        assert name in LIBRARY
        k = library_complex(name)
        n = k.dimension
        sd = barycentric_subdivision(k)
        assert len(sd.top_cells()) == sum(factorial(len(s)) for s in k.top_cells())
        assert len(sd.top_cells()) == len(k.top_cells()) * factorial(n + 1)
        for d in range(1, n + 1):
            y = embed_in_subdivision(relative_skeleton(k, n - d), sd)
            c = dual_skeleton(k, d, subdivision=sd)
            assert disjoint(y, c)
            assert retracts_onto(sd, y, c)
            pairs += 1
    ico = library_complex("icosahedron")
    assert dual_cell_counts(dual_skeleton(ico, 2), 2)[1] == 30
    for name in ("triangle", "octahedron", "torus18"):
        k = library_complex(name)
        prism = prism_triangulation(k)
        ends = prism_ends(k)
        n = prism.dimension
        sd = barycentric_subdivision(prism)
        for e in (0, 1):
            assert end_restriction(prism, e) == k
        own = dual_skeleton(k, k.dimension)
        c = dual_skeleton(prism, k.dimension, ends, sd)
        y = embed_in_subdivision(relative_skeleton(prism, n - k.dimension, ends), sd)
        assert disjoint(y, c)
        for e in (0, 1):
            piece = SimplicialComplex.from_simplices(((v, e) for v in s) for s in k.maximal)
            got = restrict_to(c, barycentric_subdivision(piece))
            assert {tuple(tuple(v for v, _ in f) for f in chain) for chain in got} == set(own.faces)
    elapsed = time.perf_counter() - start
    assert elapsed < 10, f"took {elapsed:.1f}s"
    return f"{pairs} (complex, d) splits, icosahedron dual has 30 edges"


@criterion(8, "orientability golden table")
def test_criterion_8_orientability_golden():
    assert len(ORIENT_GOLDEN) >= 12
    for model, op, group, status, trail, choices in ORIENT_GOLDEN:
        M = build_model(model)
        v = evaluate(M, OperatorDescriptor(op, M), GroupDescriptor.parse(group))
        assert (v.status.value, v.rule_ids, v.required_choices) == (status, trail, choices), (model, op, group)
    return f"{len(ORIENT_GOLDEN)} scenarios"


@criterion(9, "CLI determinism")
def test_criterion_9_cli_determinism():
    runs = 0
    for config in cases():
        for fmt, ext in (("text", "txt"), ("structured", "json")):
            outputs = []
            for seed in ("1", "2"):
                env = dict(os.environ, PYTHONHASHSEED=seed)
                r = subprocess.run(
                    [sys.executable, "-m", "orientcalc.cli", job_for(config), "--config", str(config), "--format", fmt],
                    capture_output=True,
                    text=True,
                    env=env,
                )
                outputs.append(f"exit {r.returncode}\n" + r.stdout + r.stderr)
                runs += 1
            assert outputs[0] == outputs[1] == (GOLDEN / f"{config.stem}.{ext}").read_text(), config.name
            if fmt == "structured" and outputs[0].startswith("exit 0\n"):
                body = outputs[0].split("\n", 1)[1]
                report = parse_structured(body)
                assert report == run_config(config, job_for(config))
                assert emit_report(report, "structured") == body
                assert json.loads(body)["job"] == job_for(config)
    return f"{len(cases())} configs, {runs} runs"
