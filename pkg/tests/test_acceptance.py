"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import random
import subprocess
import sys
import time
from pathlib import Path

import pytest

from hasse.finalg import FinAlgebra, FinModule
from hasse.module import (
    HigherModuleDerivation,
    check_module_reconstruction,
    module_from_ordinary,
    module_to_ordinary,
)
from hasse.monadic import (
    EMModule,
    MonadRealization,
    check_higher_derivation_diagram,
    check_module_derivation_diagram,
    nat_trans_family,
)
from hasse.module import make_module_power
from hasse.poly import ONE, X, ZERO, Poly
from hasse.presented import PresentedModule
from hasse.quotients import (
    build_quotient,
    check_compatibility,
    check_thm55,
    classical_quotient_rule,
    extend_derivation,
    verify_uniqueness,
)
from hasse.ring import (
    FinDerivation,
    OrdinaryDerivationSequence,
    PolyDerivation,
    PolyHigherDerivation,
    check_poly_chain,
    check_reconstruction,
    d_dx,
    from_ordinary_sequence,
    make_exp,
    make_inner_higher,
    monomial_pairs,
    to_ordinary_sequence,
    validate_higher_leibniz,
)
from hasse.torsion import GabrielFilterSpec, check_thm48_instance, torsion_submodule

sys.path.insert(0, str(Path(__file__).resolve().parent))
from catalog import build_catalog  # noqa: E402
from strategies import rand_module, rand_poly  # noqa: E402
from test_monadic import _random_family  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
LIMIT = 60.0
RESULTS: list[str] = []
_CATALOG = None


def catalog():
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = build_catalog(60, seed=2024)
    return _CATALOG


def report(n: int, ok: bool, detail: str, elapsed: float) -> bool:
    ok = ok and elapsed < LIMIT
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f}s) {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def corpus(count: int = 100, seed: int = 1):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(0, 6)
        out.append(PolyHigherDerivation(tuple(rand_poly(rng, 5) for _ in range(n))))
    return out


# -- 1 -----------------------------------------------------------------------


def test_criterion_1_conversion():
    t = time.perf_counter()
    pairs = monomial_pairs(60, 8, seed=3)
    bad = []
    for i, d in enumerate(corpus()):
        seq = to_ordinary_sequence(d)
        for k, delta in enumerate(seq.entries, 1):
            if not check_poly_chain(lambda j, a: a if j == 0 else delta(a), 1, pairs).ok:
                bad.append((i, "leibniz", k))
        if check_reconstruction(d, seq) is not None:
            bad.append((i, "reconstruction"))
    assert report(1, not bad, f"100 derivations, order <= 6; failures {bad}", time.perf_counter() - t)


# -- 2 -----------------------------------------------------------------------


def _module_instances(rng: random.Random, ring: PolyHigherDerivation):
    g = rng.randint(1, 3)
    M = PresentedModule.free(g)
    images = [[tuple(rand_poly(rng, 3) for _ in range(g)) for _ in range(g)] for _ in range(ring.order)]
    return HigherModuleDerivation.build(ring, M, images)


def test_criterion_2_round_trips():
    t = time.perf_counter()
    rng = random.Random(2)
    bad = []
    for i, d in enumerate(corpus()):
        if from_ordinary_sequence(to_ordinary_sequence(d)) != d:
            bad.append(("ring", i))
        if d.order <= 4:
            D = _module_instances(rng, d)
            if not module_from_ordinary(module_to_ordinary(D, samples=5), D.module).same_as(D):
                bad.append(("module", i))
    for inst in catalog()[:30]:
        D = inst.D
        seq = module_to_ordinary(D, samples=5)
        if check_module_reconstruction(D, seq) is not None or not module_from_ordinary(seq, D.module).same_as(D):
            bad.append(("catalog", inst.label))
    for _ in range(20):
        w, n = rand_poly(rng, 4), rng.randint(1, 6)
        seq = OrdinaryDerivationSequence((PolyDerivation(w),) + (PolyDerivation(ZERO),) * (n - 1))
        e = make_exp(PolyDerivation(w), n)
        if from_ordinary_sequence(seq) != e or [s.value for s in to_ordinary_sequence(e).entries] != [w] + [ZERO] * (n - 1):
            bad.append(("exp", str(w), n))
    M2 = FinAlgebra.matrix_algebra(2)
    for a in ([0, 1, 0, 0], [1, 2, -1, 0]):
        ad = FinDerivation(M2, M2.left_mult(a) - M2.right_mult(a))
        e = make_exp(ad, 4)
        seq = to_ordinary_sequence(e)
        if from_ordinary_sequence(seq) != e or seq.entries[0].matrix != ad.matrix or any(not s.matrix.is_zero() for s in seq.entries[1:]):
            bad.append(("fin-exp", tuple(a)))
    assert report(2, not bad, f"ring, module, catalog and exp round trips; failures {bad}", time.perf_counter() - t)


# -- 3 -----------------------------------------------------------------------


def test_criterion_3_bridge():
    t = time.perf_counter()
    rng = random.Random(11)
    bad, failing = [], 0
    for i in range(30):
        fam = _random_family(rng)
        leib = validate_higher_leibniz(fam)
        diag = check_higher_derivation_diagram(MonadRealization(fam.algebra), nat_trans_family(fam))
        if leib.ok != diag.ok:
            bad.append((i, "verdict"))
        elif not leib.ok:
            failing += 1
            if (leib.k, leib.pair) != (diag.order, diag.pair):
                bad.append((i, "pair", leib.pair, diag.pair))
    detail = f"30 families, {failing} failing, same verdict and pair; mismatches {bad}"
    assert report(3, not bad, detail, time.perf_counter() - t)


# -- 4 -----------------------------------------------------------------------


def test_criterion_4_inner_and_power():
    t = time.perf_counter()
    M2 = FinAlgebra.matrix_algebra(2)
    T = MonadRealization(M2)
    V = FinModule.column_vectors(2)
    V = FinModule.from_actions(M2, V.actions, "Q^2")
    EM = EMModule.from_fin_module(V)
    bad = []
    for a in ([0, 1, 0, 0], [1, 0, 0, 2]):
        for n in range(5):
            inner = make_inner_higher(M2, a, n)
            if not check_higher_derivation_diagram(T, nat_trans_family(inner)).ok:
                bad.append(("inner", tuple(a), n))
            P = make_module_power(V, a, n)
            if not check_module_derivation_diagram(T, EM, nat_trans_family(P.ring), [P.matrix(k) for k in range(n + 1)]).ok:
                bad.append(("power", tuple(a), n))
    assert report(4, not bad, f"a in (E12, diag(1,2)), n <= 4; failures {bad}", time.perf_counter() - t)


# -- 5 -----------------------------------------------------------------------


def test_criterion_5_torsion():
    t = time.perf_counter()
    F = GabrielFilterSpec(X)
    T = torsion_submodule(PresentedModule.cyclic(X**2 * (X - 1)), F)
    golden = T.torsion_dimension == 2 and [p for p in T.quotient.invariant_factors if not p.is_unit()] == [X - 1]
    rng = random.Random(5)
    bad = []
    for i in range(100):
        M = rand_module(rng, 3, 3, 4)
        f = rng.choice((X, X - 1, X * (X - 1)))
        T = torsion_submodule(M, GabrielFilterSpec(f))
        Q = T.quotient
        idem = not torsion_submodule(Q, GabrielFilterSpec(f)).torsion_generators
        exact = T.certify() and Q.free_rank == M.free_rank and M.torsion_dimension == T.torsion_dimension + Q.torsion_dimension
        if not (idem and exact):
            bad.append(i)
    assert report(5, golden and not bad, f"golden {golden}; 100 random modules, failures {bad}", time.perf_counter() - t)


# -- 6 -----------------------------------------------------------------------


def test_criterion_6_thm48():
    t = time.perf_counter()
    cat = catalog()
    bad, held = [], 0
    for inst in cat:
        rep = check_thm48_instance(inst.module, inst.delta, inst.D, inst.filter, samples=2)
        if not rep.agree:
            bad.append(inst.label)
        held += rep.higher_differential
    detail = f"{len(cat)} instances, conditions agree on all but {len(bad)} ({held} true) {bad}"
    assert report(6, len(cat) >= 50 and not bad, detail, time.perf_counter() - t)


# -- 7 -----------------------------------------------------------------------


def test_criterion_7_lifting():
    t = time.perf_counter()
    R = PresentedModule.free(1)
    F = GabrielFilterSpec(X)
    D = HigherModuleDerivation.identity(make_exp(d_dx(), 5), R)
    E = extend_derivation(D, build_quotient(R, F))
    Q = E.quotient
    golden = E.components(Q.fraction([ONE], 1)) == [Q.fraction([Poly.const((-1) ** k)], k + 1) for k in range(6)]
    rng = random.Random(7)
    bad = []
    for i in range(50):
        m, p = [rand_poly(rng, 4)], rng.randint(0, 5)
        if E.apply(1, Q.fraction(m, p)) != classical_quotient_rule(E, m, p):
            bad.append(i)
    assert report(7, golden and not bad, f"D~_k(1/x) exact for k <= 5: {golden}; quotient rule failures {bad}", time.perf_counter() - t)


# -- 8 -----------------------------------------------------------------------


def test_criterion_8_uniqueness():
    t = time.perf_counter()
    bad = []
    for inst in catalog():
        Q = build_quotient(inst.module, inst.filter)
        E = extend_derivation(inst.D, Q)
        for extra in (1, 2):
            if not verify_uniqueness(E, extend_derivation(inst.D, Q, "lemma", E.gap + extra)).ok:
                bad.append((inst.label, "uniqueness", extra))
        if not check_compatibility(E).ok:
            bad.append((inst.label, "compatibility"))
        rep = check_thm55(inst.module, inst.D, inst.filter)
        if not rep.converse or not rep.forward:
            bad.append((inst.label, "thm55"))
    assert report(8, not bad, f"{len(catalog())} instances; failures {bad}", time.perf_counter() - t)


# -- 9 -----------------------------------------------------------------------

COVERAGE = {
    "conversion": (1, 2),
    "bridge": (3,),
    "inner": (4,),
    "torsion": (5,),
    "thm48": (6,),
    "lifting": (7,),
    "uniqueness": (8,),
    "thm55": (5, 6, 8),
    "negative": (),
}
EXPECTED_EXIT = {"negative": 1}


def test_criterion_9_cli():
    t = time.perf_counter()
    files = sorted((ROOT / "scenarios").glob("*.hsw"))
    bad = []
    for path in files:
        runs = [
            subprocess.run([sys.executable, "-m", "hasse.cli", "run", str(path), "--format", "json"], capture_output=True)
            for _ in range(2)
        ]
        golden = (ROOT / "scenarios" / "golden" / f"{path.stem}.json").read_bytes()
        if runs[0].stdout != runs[1].stdout or runs[0].stdout != golden:
            bad.append((path.stem, "bytes"))
        if {r.returncode for r in runs} != {EXPECTED_EXIT.get(path.stem, 0)}:
            bad.append((path.stem, "exit", runs[0].returncode))
    covered = set()
    for path in files:
        covered.update(COVERAGE.get(path.stem, ()))
    ok = len(files) >= 6 and covered >= set(range(1, 9)) and not bad
    assert report(9, ok, f"{len(files)} scenarios, criteria covered {sorted(covered)}; problems {bad}", time.perf_counter() - t)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
