"""Execute a parsed scenario and assemble a deterministic report."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .errors import HasseError, InvalidArgument
from .finalg import FinAlgebra, FinModule
from .module import (
    FinModuleDerivation,
    HigherModuleDerivation,
    _validate_fin,
    check_module_reconstruction,
    make_module_exp,
    make_module_power,
    module_from_ordinary,
    module_to_ordinary,
    ordinary_module_derivation,
    validate_module_derivation,
)
from .monadic import (
    EMModule,
    MonadRealization,
    NatTrans,
    check_higher_derivation_diagram,
    check_module_derivation_diagram,
    check_monad_laws,
    nat_trans_family,
)
from .poly import Poly
from .presented import PresentedModule
from .qmatrix import QMatrix
from .quotients import (
    PerturbedExtension,
    build_quotient,
    canonical_map,
    check_compatibility,
    check_extension_leibniz,
    check_representative_independence,
    check_thm55,
    extend_derivation,
    spanning_fractions,
    verify_uniqueness,
)
from .ring import (
    FinDerivation,
    FinHigherDerivation,
    OrdinaryDerivationSequence,
    PolyDerivation,
    PolyHigherDerivation,
    check_reconstruction,
    from_ordinary_sequence,
    make_exp,
    make_inner_higher,
    make_rescaled,
    to_ordinary_sequence,
    validate_higher_leibniz,
)
from .scenario import Name, Scenario, Statement
from .torsion import GabrielFilterSpec, IdealSpec, check_thm48_instance, filter_delta_invariant, torsion_submodule

SCHEMA = "hasse-report/1"


# -- value conversion -------------------------------------------------------


def as_poly(v, what: str) -> Poly:
    if isinstance(v, Poly):
        return v
    raise InvalidArgument(f"{what} must be a polynomial")


def as_int(v, what: str) -> int:
    p = as_poly(v, what)
    if not p.is_constant() or p[0].denominator != 1:
        raise InvalidArgument(f"{what} must be an integer")
    return int(p[0])


def as_scalar(v, what: str) -> Fraction:
    p = as_poly(v, what)
    if not p.is_constant():
        raise InvalidArgument(f"{what} must be a rational constant")
    return p[0]


def as_vector(v, what: str) -> tuple:
    if not isinstance(v, tuple):
        raise InvalidArgument(f"{what} must be a list")
    return tuple(as_scalar(a, what) for a in v)


def as_coords(v, what: str, n: Optional[int] = None) -> tuple:
    if not isinstance(v, tuple):
        v = (v,)
    out = tuple(as_poly(a, what) for a in v)
    if n is not None and len(out) != n:
        raise InvalidArgument(f"{what} must have {n} entries")
    return out


def as_matrix(v, what: str) -> QMatrix:
    if not isinstance(v, tuple) or not all(isinstance(r, tuple) for r in v):
        raise InvalidArgument(f"{what} must be a list of rows")
    return QMatrix([as_vector(r, what) for r in v])


def as_bool(v, what: str) -> bool:
    if isinstance(v, Name) and v.ident in ("true", "false"):
        return v.ident == "true"
    raise InvalidArgument(f"{what} must be true or false")


# -- rendering --------------------------------------------------------------


def render(obj):
    """Exact, JSON-friendly rendering."""
    if isinstance(obj, (Poly, Fraction)):
        return str(obj)
    if isinstance(obj, QMatrix):
        return [[str(a) for a in r] for r in obj.rows]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, dict):
        return {str(k): render(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [render(a) for a in obj]
    if hasattr(obj, "coords"):
        return [str(c) for c in obj.coords]
    return str(obj)


# -- declarations -----------------------------------------------------------


@dataclass
class Context:
    seed: int = 0
    objects: dict = field(default_factory=dict)
    failed: dict = field(default_factory=dict)  # name -> HasseError

    def get(self, st: Statement, key: str, kinds: tuple = ()):
        ref = st.get(key)
        if ref is None:
            raise InvalidArgument(f"missing key {key!r}")
        if not isinstance(ref, Name):
            raise InvalidArgument(f"{key} must name a declaration")
        if ref.ident in self.failed:
            raise self.failed[ref.ident]
        obj = self.objects[ref.ident]
        if kinds and not isinstance(obj, kinds):
            raise InvalidArgument(f"{ref.ident} is not a {key}")
        return obj


def _indexed(st: Statement, prefix: str, suffix: str = "") -> dict[int, object]:
    """Entries named prefix<k>suffix, e.g. D2(x)."""
    out = {}
    for k, v in st.entries:
        if k.startswith(prefix) and k.endswith(suffix):
            mid = k[len(prefix): len(k) - len(suffix)] if suffix else k[len(prefix):]
            if mid.isdigit():
                out[int(mid)] = v
    return out


def build_algebra(ctx: Context, st: Statement) -> FinAlgebra:
    preset = st.get("preset")
    if preset is not None:
        if preset == Name("matrix2"):
            return FinAlgebra.matrix_algebra(2)
        if preset == Name("truncated"):
            return FinAlgebra.truncated_poly(as_int(st.get("m", Poly.const(2)), "m"))
        if preset == Name("rationals"):
            return FinAlgebra.rationals()
        raise InvalidArgument(f"unknown algebra preset {preset}")
    table = st.get("table")
    unit = as_vector(st.get("unit"), "unit")
    check = as_bool(st.get("validate", Name("true")), "validate")
    rows = [[as_vector(c, "table") for c in row] for row in table]
    return FinAlgebra.from_table(rows, unit, name=st.name, check=check)


def build_derivation(ctx: Context, st: Statement):
    typ = st.get("type", Name("values")).ident
    alg = ctx.get(st, "algebra", (FinAlgebra,)) if st.get("algebra") is not None else None
    if typ == "exp":
        n = as_int(st.get("order"), "order")
        if alg is None:
            return make_exp(PolyDerivation(as_poly(st.get("delta(x)"), "delta(x)")), n)
        return make_exp(FinDerivation(alg, as_matrix(st.get("delta"), "delta")), n)
    if typ == "values":
        vals = _indexed(st, "D", "(x)")
        n = as_int(st.get("order"), "order") if st.get("order") is not None else max(vals, default=0)
        return PolyHigherDerivation(tuple(as_poly(vals.get(k, Poly()), f"D{k}(x)") for k in range(1, n + 1)))
    if typ == "identity":
        n = as_int(st.get("order", Poly()), "order")
        return PolyHigherDerivation.identity(n) if alg is None else FinHigherDerivation.identity(alg, n)
    if typ == "rescale":
        base = ctx.get(st, "base", (PolyHigherDerivation, FinHigherDerivation))
        return make_rescaled(base, as_int(st.get("stride"), "stride"))
    if typ == "inner":
        return make_inner_higher(alg, as_vector(st.get("a"), "a"), as_int(st.get("order"), "order"))
    if typ == "matrices":
        mats = _indexed(st, "D")
        n = max(mats, default=0)
        zero = QMatrix.zeros(alg.dim)
        return FinHigherDerivation(alg, tuple(as_matrix(mats[k], f"D{k}") if k in mats else zero for k in range(1, n + 1)))
    if typ == "sequence":
        if alg is None:
            ds = _indexed(st, "delta", "(x)")
            seq = OrdinaryDerivationSequence(tuple(PolyDerivation(as_poly(ds[k], "delta")) for k in sorted(ds)))
        else:
            ds = _indexed(st, "delta")
            seq = OrdinaryDerivationSequence(tuple(FinDerivation(alg, as_matrix(ds[k], "delta")) for k in sorted(ds)), alg)
        return from_ordinary_sequence(seq)
    raise InvalidArgument(f"unknown derivation type {typ!r}")


def build_module(ctx: Context, st: Statement) -> PresentedModule:
    g = as_int(st.get("generators"), "generators")
    rels = st.get("relations", ())
    return PresentedModule.from_rows(g, [as_coords(r, "relation", g) for r in rels])


def build_emmodule(ctx: Context, st: Statement) -> FinModule:
    alg = ctx.get(st, "algebra", (FinAlgebra,))
    preset = st.get("preset")
    if preset == Name("regular"):
        return FinModule.regular(alg)
    if preset == Name("column"):
        n = round(alg.dim**0.5)
        col = FinModule.column_vectors(n)
        return FinModule.from_actions(alg, col.actions, f"Q^{n}")
    acts = st.get("actions")
    if acts is None:
        raise InvalidArgument("emmodule needs a preset or actions")
    return FinModule.from_actions(alg, [as_matrix(a, "actions") for a in acts], st.name)


def build_natrans(ctx: Context, st: Statement):
    alg = ctx.get(st, "algebra", (FinAlgebra,))
    m = as_matrix(st.get("matrix"), "matrix")
    if m.shape != (alg.dim, alg.dim):
        raise InvalidArgument("natrans matrix must be dim x dim")
    return (alg, NatTrans(m))


def build_modderiv(ctx: Context, st: Statement):
    typ = st.get("type", Name("images")).ident
    if typ == "power":
        mod = ctx.get(st, "module", (FinModule,))
        return make_module_power(mod, as_vector(st.get("a"), "a"), as_int(st.get("order"), "order"))
    if typ == "matrices":
        ring = ctx.get(st, "ring", (FinHigherDerivation,))
        mod = ctx.get(st, "module", (FinModule,))
        mats = _indexed(st, "D")
        zero = QMatrix.zeros(mod.dim)
        return FinModuleDerivation(ring, mod, tuple(as_matrix(mats[k], f"D{k}") if k in mats else zero for k in range(1, ring.order + 1)))
    if typ == "exp":
        mod = ctx.get(st, "module", (PresentedModule, FinModule))
        n = as_int(st.get("order"), "order")
        if isinstance(mod, FinModule):
            ring1 = FinHigherDerivation(mod.algebra, (as_matrix(st.get("delta"), "delta"),))
            d = FinModuleDerivation(ring1, mod, (as_matrix(st.get("d"), "d"),))
            return make_module_exp(d, n)
        g = mod.generator_count
        imgs = _indexed(st, "d(e", ")")
        d = ordinary_module_derivation(
            PolyDerivation(as_poly(st.get("delta(x)"), "delta(x)")),
            mod,
            [as_coords(imgs.get(j + 1, (Poly(),) * g), "image", g) for j in range(g)],
        )
        return make_module_exp(d, n)
    if typ == "images":
        ring = ctx.get(st, "ring", (PolyHigherDerivation,))
        mod = ctx.get(st, "module", (PresentedModule,))
        g = mod.generator_count
        images = []
        for k in range(1, ring.order + 1):
            row = _indexed(st, f"D{k}(e", ")")
            images.append([as_coords(row.get(j + 1, (Poly(),) * g), f"D{k}(e{j + 1})", g) for j in range(g)])
        return HigherModuleDerivation.build(ring, mod, images, strict=False)
    raise InvalidArgument(f"unknown modderiv type {typ!r}")


def build_filter(ctx: Context, st: Statement) -> GabrielFilterSpec:
    return GabrielFilterSpec(as_poly(st.get("f"), "f"))


BUILDERS: dict[str, Callable] = {
    "algebra": build_algebra,
    "derivation": build_derivation,
    "module": build_module,
    "emmodule": build_emmodule,
    "natrans": build_natrans,
    "modderiv": build_modderiv,
    "filter": build_filter,
}


# -- checks -----------------------------------------------------------------


class Outcome:
    def __init__(self, ok: bool, values: dict, witness: Optional[dict] = None):
        self.ok, self.values, self.witness = ok, values, witness


def _fin_or_poly(d) -> str:
    return "Q[x]" if isinstance(d, PolyHigherDerivation) else d.algebra.name


def check_leibniz(ctx: Context, st: Statement) -> Outcome:
    d = ctx.get(st, "derivation")
    rep = validate_higher_leibniz(d, seed=ctx.seed)
    values = {"carrier": _fin_or_poly(d), "order": d.order, "checked": rep.checked}
    wit = None if rep.ok else {"k": rep.k, "pair": list(rep.pair), "lhs": rep.lhs, "rhs": rep.rhs}
    return Outcome(rep.ok, values, wit)


def _sequence_values(seq) -> list:
    return [e.value if isinstance(e, PolyDerivation) else e.matrix for e in seq.entries]


def check_convert(ctx: Context, st: Statement) -> Outcome:
    d = ctx.get(st, "derivation")
    seq = to_ordinary_sequence(d, seed=ctx.seed)
    bad = check_reconstruction(d, seq)
    values = {"order": d.order, "deltas": _sequence_values(seq), "reconstruction": bad is None}
    ok = bad is None
    wit = None
    exp = st.get("expect")
    if exp is not None:
        want = [as_poly(v, "expect") for v in exp]
        if want != list(_sequence_values(seq)):
            ok, wit = False, {"expected": want}
    if bad is not None:
        wit = {"i": bad[0], "argument": bad[1]}
    return Outcome(ok, values, wit)


def check_roundtrip(ctx: Context, st: Statement) -> Outcome:
    if st.get("modderiv") is not None:
        D = ctx.get(st, "modderiv")
        seq = module_to_ordinary(D, seed=ctx.seed)
        back = module_from_ordinary(seq, getattr(D, "module", None))
        if isinstance(D, FinModuleDerivation):
            same = back.matrices == D.matrices and back.ring == D.ring
        else:
            same = back.same_as(D)
        recon = check_module_reconstruction(D, seq) is None
        return Outcome(same and recon, {"level": "module", "order": D.order, "identity": same, "reconstruction": recon})
    d = ctx.get(st, "derivation")
    seq = to_ordinary_sequence(d, seed=ctx.seed)
    back = from_ordinary_sequence(seq)
    again = to_ordinary_sequence(back, seed=ctx.seed)
    same = back == d and _sequence_values(again) == _sequence_values(seq)
    return Outcome(same, {"level": "ring", "order": d.order, "identity": same})


def check_bridge(ctx: Context, st: Statement) -> Outcome:
    d = ctx.get(st, "derivation", (FinHigherDerivation,))
    leib = validate_higher_leibniz(d)
    diag = check_higher_derivation_diagram(MonadRealization(d.algebra), nat_trans_family(d), carriers=(1,))
    agree = leib.ok == diag.ok and (leib.ok or (leib.k == diag.order and leib.pair == diag.pair))
    values = {"leibniz": leib.ok, "diagram": diag.ok, "agree": agree}
    if not leib.ok:
        values["leibniz_witness"] = {"k": leib.k, "pair": list(leib.pair)}
    if not diag.ok:
        values["diagram_witness"] = {"k": diag.order, "pair": list(diag.pair)}
    return Outcome(agree, values)


def _carriers(st: Statement) -> tuple:
    return tuple(as_int(c, "carriers") for c in st.get("carriers", (Poly.const(1), Poly.const(2), Poly.const(3))))


def _diagram_outcome(rep, extra: Optional[dict] = None) -> Outcome:
    values = {"diagram": rep.diagram, "checked": rep.checked}
    values.update(extra or {})
    wit = None
    if not rep.ok:
        wit = {"order": rep.order, "carrier": rep.carrier, "basis_index": rep.basis_index,
               "pair": list(rep.pair) if rep.pair else None, "left": rep.left, "right": rep.right}
    return Outcome(rep.ok, values, wit)


def check_monad(ctx: Context, st: Statement) -> Outcome:
    alg = ctx.get(st, "algebra", (FinAlgebra,))
    return _diagram_outcome(check_monad_laws(MonadRealization(alg), _carriers(st)))


def check_higher_diagram(ctx: Context, st: Statement) -> Outcome:
    if st.get("derivation") is not None:
        d = ctx.get(st, "derivation", (FinHigherDerivation,))
        alg, fam = d.algebra, nat_trans_family(d)
    else:
        alg = ctx.get(st, "algebra", (FinAlgebra,))
        fam = [NatTrans.identity(alg.dim)]
        for nm in st.get("family", ()):
            a2, nt = ctx.objects[nm.ident]
            if a2 is not alg:
                raise InvalidArgument(f"{nm} lives on a different algebra")
            fam.append(nt)
    return _diagram_outcome(check_higher_derivation_diagram(MonadRealization(alg), fam, _carriers(st)))


def check_module_diagram(ctx: Context, st: Statement) -> Outcome:
    D = ctx.get(st, "modderiv", (FinModuleDerivation,))
    T = MonadRealization(D.module.algebra)
    M = EMModule.from_fin_module(D.module)
    rep = check_module_derivation_diagram(T, M, nat_trans_family(D.ring), [D.matrix(k) for k in range(D.order + 1)])
    lrep = _validate_fin(D)
    extra = {"leibniz": lrep.ok}
    if lrep.discrepancy:
        extra["discrepancy"] = True
    return _diagram_outcome(rep, extra)


def check_module_leibniz(ctx: Context, st: Statement) -> Outcome:
    D = ctx.get(st, "modderiv")
    rep = validate_module_derivation(D, seed=ctx.seed)
    values = {"order": D.order, "checked": rep.checked}
    wit = None
    if not rep.ok:
        wit = {"kind": rep.kind, "k": rep.k, "relation": rep.relation, "pair": rep.pair, "residue": rep.residue}
    return Outcome(rep.ok, values, wit)


def check_torsion(ctx: Context, st: Statement) -> Outcome:
    M = ctx.get(st, "module", (PresentedModule,))
    F = ctx.get(st, "filter", (GabrielFilterSpec,))
    T = torsion_submodule(M, F)
    again = torsion_submodule(T.quotient, F)
    values = {
        "torsion_dimension": T.torsion_dimension,
        "bound": T.bound,
        "torsion_generators": [t.coords for t in T.torsion_generators],
        "quotient_invariants": list(T.quotient.invariant_factors),
        "certified": T.certify(),
        "idempotent": not again.torsion_generators,
    }
    ok = values["certified"] and values["idempotent"]
    mism = {}
    if st.get("expect_dim") is not None and as_int(st.get("expect_dim"), "expect_dim") != T.torsion_dimension:
        mism["expect_dim"] = st.get("expect_dim")
    if st.get("expect_bound") is not None and as_int(st.get("expect_bound"), "expect_bound") != T.bound:
        mism["expect_bound"] = st.get("expect_bound")
    if st.get("expect_quotient") is not None:
        want = [as_poly(p, "expect_quotient") for p in st.get("expect_quotient")]
        if want != list(T.quotient.invariant_factors):
            mism["expect_quotient"] = want
    return Outcome(ok and not mism, values, mism or None)


def check_invariant(ctx: Context, st: Statement) -> Outcome:
    d = ctx.get(st, "derivation", (PolyHigherDerivation,))
    F = ctx.get(st, "filter", (GabrielFilterSpec,))
    I = IdealSpec.principal(as_poly(st.get("ideal"), "ideal"))
    slack = as_int(st.get("slack", Poly.const(4)), "slack")
    J = filter_delta_invariant(F, d, I, slack)
    return Outcome(J is not None, {"ideal": I.gcd, "witness": None if J is None else J.gcd})


def _modderiv_filter(ctx: Context, st: Statement):
    D = ctx.get(st, "modderiv", (HigherModuleDerivation,))
    F = ctx.get(st, "filter", (GabrielFilterSpec,))
    return D, F


def check_thm48(ctx: Context, st: Statement) -> Outcome:
    D, F = _modderiv_filter(ctx, st)
    rep = check_thm48_instance(D.module, D.ring, D, F, seed=ctx.seed)
    values = {name: c.holds for name, c in rep.conditions.items()}
    values["agree"] = rep.agree
    values["higher_differential"] = rep.higher_differential
    values["invariance_witnesses"] = [w for _, w in rep.conditions["i"].witnesses]
    wit = None if rep.agree else {name: c.failure for name, c in rep.conditions.items()}
    return Outcome(rep.agree, values, wit)


def check_quotient(ctx: Context, st: Statement) -> Outcome:
    M = ctx.get(st, "module", (PresentedModule,))
    F = ctx.get(st, "filter", (GabrielFilterSpec,))
    Q = build_quotient(M, F)
    phi = canonical_map(M, Q)
    ker = phi.kernel_generators()
    values = {
        "base_invariants": list(Q.base.invariant_factors),
        "zero_module": Q.is_zero_module(),
        "kernel_generators": [list(v) for v in ker],
        "kernel_is_torsion": phi.kernel_matches_torsion(),
    }
    ok = values["kernel_is_torsion"]
    if st.get("expect_zero") is not None and as_bool(st.get("expect_zero"), "expect_zero") != values["zero_module"]:
        ok = False
    return Outcome(ok, values)


def _extension(ctx: Context, st: Statement, method: str = "fraction", gap=None):
    D, F = _modderiv_filter(ctx, st)
    Q = build_quotient(D.module, F)
    return extend_derivation(D, Q, method, gap), Q


def check_extend(ctx: Context, st: Statement) -> Outcome:
    method = st.get("method", Name("fraction")).ident
    gap = as_int(st.get("gap"), "gap") if st.get("gap") is not None else None
    E, Q = _extension(ctx, st, method, gap)
    values: dict = {"method": method, "gap": E.gap, "witness": None if E.witness is None else E.witness.gcd}
    if st.get("at") is not None:
        q = Q.fraction(as_coords(st.get("at"), "at", Q.base.generator_count), as_int(st.get("exponent", Poly()), "exponent"))
        values["at"] = str(q)
        values["lifts"] = [str(c) for c in E.components(q)]
    compat = check_compatibility(E)
    leib = check_extension_leibniz(E, seed=ctx.seed)
    rep = check_representative_independence(E, seed=ctx.seed)
    values.update(compatibility=compat.ok, leibniz=leib.ok, representative_independence=rep.ok)
    ok = compat.ok and leib.ok and rep.ok
    wit = None
    exp = st.get("expect")
    if exp is not None and "lifts" in values:
        want = [Q.fraction(as_coords(num, "expect", Q.base.generator_count), as_int(e, "expect")) for num, e in exp]
        got = E.components(q)
        bad = [k for k, (a, b) in enumerate(zip(want, got)) if a != b]
        if bad or len(want) != len(got):
            ok, wit = False, {"first_mismatch": bad[0] if bad else len(got)}
    return Outcome(ok, values, wit)


def check_uniqueness(ctx: Context, st: Statement) -> Outcome:
    gap = as_int(st.get("gap", Poly.const(2)), "gap")
    E1, Q = _extension(ctx, st)
    E2, _ = _extension(ctx, st, "lemma", gap)
    if st.get("perturb") is not None and as_bool(st.get("perturb"), "perturb") and E1.order >= 1:
        q = spanning_fractions(Q, 1)[-1]
        E2 = PerturbedExtension(E2, 1, q, Q.fraction(Q.base.gen(0), q.exponent))
    rep = verify_uniqueness(E1, E2)
    values = {"gap": gap, "checked": rep.checked, "equal": rep.ok}
    wit = None if rep.ok else {"component": rep.witness[0], "at": rep.witness[1], **rep.details}
    return Outcome(rep.ok, values, wit)


def check_55(ctx: Context, st: Statement) -> Outcome:
    D, F = _modderiv_filter(ctx, st)
    rep = check_thm55(D.module, D, F)
    values = {
        "higher_differential": rep.higher_differential,
        "extension_exists": rep.extension_exists,
        "forward": rep.forward,
        "converse": rep.converse,
    }
    values.update({k: v for k, v in rep.details.items() if k != "conditions"})
    return Outcome(rep.ok, values)


CHECKERS: dict[str, Callable[[Context, Statement], Outcome]] = {
    "leibniz": check_leibniz,
    "convert": check_convert,
    "roundtrip": check_roundtrip,
    "bridge": check_bridge,
    "monad-laws": check_monad,
    "higher-deriv": check_higher_diagram,
    "module-deriv": check_module_diagram,
    "module-leibniz": check_module_leibniz,
    "torsion": check_torsion,
    "invariant": check_invariant,
    "thm48": check_thm48,
    "quotient": check_quotient,
    "extend": check_extend,
    "uniqueness": check_uniqueness,
    "thm55": check_55,
}


# -- driver -----------------------------------------------------------------


@dataclass
class RunOptions:
    seed: Optional[int] = None
    parallel: bool = False
    fail_fast: bool = False
    timing: bool = False


def _error_record(exc: Exception) -> dict:
    code = getattr(exc, "code", "E000") if isinstance(exc, HasseError) else "E000"
    return {"code": code, "message": str(exc)}


def _run_check(ctx: Context, index: int, st: Statement, timing: bool) -> dict:
    start = time.perf_counter()
    rec: dict = {"index": index, "check": st.name}
    try:
        out = CHECKERS[st.name](ctx, st)
        rec["status"] = "pass" if out.ok else "fail"
        rec["values"] = render(out.values)
        if out.witness is not None:
            rec["witness"] = render(out.witness)
    except HasseError as exc:
        rec["status"] = "error"
        rec["error"] = _error_record(exc)
    except (KeyError, TypeError, AttributeError, IndexError, ValueError) as exc:
        rec["status"] = "error"
        rec["error"] = {"code": "E004", "message": f"invalid scenario value: {exc}"}
    if timing:
        rec["elapsed_ms"] = round((time.perf_counter() - start) * 1000, 3)
    return rec


def run(scenario: Scenario, options: Optional[RunOptions] = None) -> dict:
    opts = options or RunOptions()
    seed = 0
    for st in scenario.statements:
        if st.kind == "seed":
            seed = as_int(st.get("value", Poly()), "seed")
    if opts.seed is not None:
        seed = opts.seed
    ctx = Context(seed)
    declarations = []
    for st in scenario.declarations():
        try:
            ctx.objects[st.name] = BUILDERS[st.kind](ctx, st)
        except HasseError as exc:
            ctx.failed[st.name] = exc
            declarations.append({"name": st.name, "kind": st.kind, "status": "error", "error": _error_record(exc)})
        except (KeyError, TypeError, AttributeError, IndexError, ValueError) as exc:
            err = InvalidArgument(f"invalid scenario value: {exc}")
            err.code = "E004"
            ctx.failed[st.name] = err
            declarations.append({"name": st.name, "kind": st.kind, "status": "error", "error": _error_record(err)})

    checks = scenario.checks()
    if opts.parallel and not opts.fail_fast:
        with ThreadPoolExecutor() as pool:
            records = list(pool.map(lambda p: _run_check(ctx, p[0], p[1], opts.timing), enumerate(checks, 1)))
    else:
        records = []
        for i, st in enumerate(checks, 1):
            rec = _run_check(ctx, i, st, opts.timing)
            records.append(rec)
            if opts.fail_fast and rec["status"] != "pass":
                break
    summary = {
        "total": len(checks),
        "passed": sum(r["status"] == "pass" for r in records),
        "failed": sum(r["status"] == "fail" for r in records),
        "errors": sum(r["status"] == "error" for r in records) + len(declarations),
        "skipped": len(checks) - len(records),
    }
    return {"schema": SCHEMA, "seed": seed, "declaration_errors": declarations, "checks": records, "summary": summary}


def report_ok(report: dict) -> bool:
    s = report["summary"]
    return s["failed"] == 0 and s["errors"] == 0 and s["skipped"] == 0


# -- text output ------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(a) for a in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_fmt(a)}" for k, a in v.items()) + "}"
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def format_text(report: dict, color: bool = False) -> str:
    paint = {
        "pass": "\x1b[32mPASS\x1b[0m" if color else "PASS",
        "fail": "\x1b[31mFAIL\x1b[0m" if color else "FAIL",
        "error": "\x1b[33mERROR\x1b[0m" if color else "ERROR",
    }
    lines = [f"schema {report['schema']}  seed {report['seed']}"]
    for d in report["declaration_errors"]:
        lines.append(f"declaration {d['kind']} {d['name']}: {paint['error']} {d['error']['code']} {d['error']['message']}")
    for r in report["checks"]:
        lines.append(f"[{r['index']}] {r['check']}: {paint[r['status']]}")
        for k, v in r.get("values", {}).items():
            lines.append(f"    {k}: {_fmt(v)}")
        if "witness" in r:
            lines.append(f"    witness: {_fmt(r['witness'])}")
        if "error" in r:
            lines.append(f"    {r['error']['code']}: {r['error']['message']}")
        if "elapsed_ms" in r:
            lines.append(f"    elapsed_ms: {r['elapsed_ms']}")
    s = report["summary"]
    lines.append(
        f"summary: {s['passed']} passed, {s['failed']} failed, {s['errors']} errors, {s['skipped']} skipped of {s['total']}"
    )
    return "\n".join(lines) + "\n"
