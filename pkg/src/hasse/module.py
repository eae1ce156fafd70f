"""Higher derivations on modules, relative to a higher derivation of the ring.

On a presented Q[x]-module a family D is stored by the generator images
D_k(e_j); the chain D_k(a m) = sum_i D_i(a) D_(k-i)(m) extends them, and the
extension is well defined exactly when every relation row is sent into the
relation span. That check is performed when the family is built.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import (
    DimensionMismatch,
    IllDefinedDerivation,
    IndexOutOfRange,
    InvalidArgument,
    LeibnizViolation,
    MismatchedDerivation,
)
from .finalg import FinModule
from .poly import ZERO, X, Poly
from .presented import ModuleElement, PresentedModule
from .qmatrix import QMatrix
from .ring import (
    FinDerivation,
    FinHigherDerivation,
    OrdinaryDerivationSequence,
    PolyDerivation,
    PolyHigherDerivation,
    from_ordinary_sequence,
    make_exp,
    make_inner_higher,
    to_ordinary_sequence,
)

Coords = tuple[Poly, ...]


@dataclass(frozen=True)
class ModuleReport:
    ok: bool
    checked: int = 0
    kind: str = ""
    k: Optional[int] = None
    relation: Optional[int] = None
    pair: object = None
    residue: object = None
    discrepancy: bool = False

    def __bool__(self) -> bool:
        return self.ok


def _add(u: Sequence[Poly], v: Sequence[Poly]) -> Coords:
    return tuple(a + b for a, b in zip(u, v))


def _scale(a: Poly, u: Sequence[Poly]) -> Coords:
    return tuple(a * c for c in u)


def _coords(module: PresentedModule, v) -> Coords:
    if isinstance(v, ModuleElement):
        return v.coords
    c = tuple(Poly.coerce(a) for a in v)
    if len(c) != module.generator_count:
        raise DimensionMismatch(f"element has {len(c)} coordinates, module has {module.generator_count}")
    return c


# -- presented modules ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HigherModuleDerivation:
    ring: PolyHigherDerivation
    module: PresentedModule
    images: tuple[tuple[Coords, ...], ...]
    certificate: ModuleReport = field(default=None, repr=False)

    @classmethod
    def build(cls, ring: PolyHigherDerivation, module: PresentedModule, images, strict: bool = True) -> "HigherModuleDerivation":
        """``images[k-1][j]`` is D_k(e_j). Raises IllDefinedDerivation when
        ``strict`` and the relations are not respected."""
        if len(images) != ring.order:
            raise MismatchedDerivation(f"{len(images)} components given for a ring derivation of order {ring.order}")
        imgs = []
        for row in images:
            if len(row) != module.generator_count:
                raise DimensionMismatch("one image per generator is required")
            imgs.append(tuple(module.canonical(_coords(module, v)) for v in row))
        cert = _well_definedness(ring, module, imgs)
        if strict and not cert.ok:
            raise IllDefinedDerivation(
                f"D_{cert.k} does not respect relation {cert.relation}: residue {_fmt(cert.residue)}", cert
            )
        return cls(ring, module, tuple(imgs), cert)

    @classmethod
    def identity(cls, ring: PolyHigherDerivation, module: PresentedModule) -> "HigherModuleDerivation":
        zero = tuple(ZERO for _ in range(module.generator_count))
        return cls.build(ring, module, [[zero] * module.generator_count for _ in range(ring.order)])

    @property
    def order(self) -> int:
        return self.ring.order

    def image(self, k: int, j: int) -> Coords:
        if k == 0:
            return tuple(Poly.coerce(1 if i == j else 0) for i in range(self.module.generator_count))
        return self.images[k - 1][j]

    def raw(self, k: int, v) -> Coords:
        """D_k on a coordinate vector, without reduction or certificate check."""
        if not 0 <= k <= self.order:
            raise IndexOutOfRange(f"component {k} outside 0..{self.order}")
        coords = _coords(self.module, v)
        out = tuple(ZERO for _ in coords)
        for j, a in enumerate(coords):
            if not a:
                continue
            for i in range(k + 1):
                da = self.ring.apply(i, a)
                if da:
                    out = _add(out, _scale(da, self.image(k - i, j)))
        return out

    def eval(self, k: int, v) -> ModuleElement:
        if self.certificate is None or not self.certificate.ok:
            raise IllDefinedDerivation("derivation failed its well-definedness check", self.certificate)
        return self.module.element(self.module.canonical(self.raw(k, v)))

    def truncate(self, k: int) -> "HigherModuleDerivation":
        return HigherModuleDerivation.build(self.ring.truncate(k), self.module, self.images[:k])

    def same_as(self, other: "HigherModuleDerivation") -> bool:
        """Equal ring part and equal generator images in the module."""
        if self.ring != other.ring or self.module != other.module:
            return False
        return all(
            self.module.contains(tuple(a - b for a, b in zip(u, v)))
            for r1, r2 in zip(self.images, other.images)
            for u, v in zip(r1, r2)
        )

    def __repr__(self) -> str:
        parts = [
            f"D{k}(e{j + 1})={_fmt(self.images[k - 1][j])}"
            for k in range(1, self.order + 1)
            for j in range(self.module.generator_count)
        ]
        return "HigherModuleDerivation(" + ", ".join(parts) + ")"


def _fmt(coords) -> str:
    if coords is None:
        return "None"
    return "(" + ", ".join(str(c) for c in coords) + ")"


def _well_definedness(ring: PolyHigherDerivation, module: PresentedModule, images) -> ModuleReport:
    probe = HigherModuleDerivation(ring, module, tuple(images), None)
    n = 0
    for k in range(1, ring.order + 1):
        for r, row in enumerate(module.relations.rows):
            n += 1
            m = module.membership(probe.raw(k, row))
            if not m.member:
                return ModuleReport(False, n, "well-definedness", k, r, residue=m.residue)
    return ModuleReport(True, n, "well-definedness")


def random_poly(rng: random.Random, max_degree: int = 3, bound: int = 3) -> Poly:
    return Poly([rng.randint(-bound, bound) for _ in range(rng.randint(0, max_degree) + 1)])


def random_element(module: PresentedModule, rng: random.Random, max_degree: int = 3) -> Coords:
    return tuple(random_poly(rng, max_degree) for _ in range(module.generator_count))


def _leibniz_pairs(D: HigherModuleDerivation, samples: int, seed: int):
    g = D.module.generator_count
    top = max(2 * D.module.relations.max_degree(), 2)
    for p in range(top + 1):
        for j in range(g):
            yield (p, j), X**p, D.module.gen(j).coords
    rng = random.Random(seed)
    for s in range(samples):
        yield ("random", s), random_poly(rng), random_element(D.module, rng)


def validate_module_derivation(D, samples: int = 50, seed: int = 0) -> ModuleReport:
    """Well-definedness on every relation row, then the module Leibniz chain
    on pairs (x^p, e_j) and seeded random pairs."""
    if isinstance(D, FinModuleDerivation):
        return _validate_fin(D)
    cert = D.certificate or _well_definedness(D.ring, D.module, D.images)
    if not cert.ok:
        return cert
    n = cert.checked
    for k in range(1, D.order + 1):
        for label, a, m in _leibniz_pairs(D, samples, seed):
            n += 1
            lhs = D.raw(k, _scale(a, m))
            rhs = tuple(ZERO for _ in m)
            for i in range(k + 1):
                rhs = _add(rhs, _scale(D.ring.apply(i, a), D.raw(k - i, m)))
            diff = tuple(u - v for u, v in zip(lhs, rhs))
            res = D.module.membership(diff)
            if not res.member:
                return ModuleReport(False, n, "leibniz", k, pair=label, residue=res.residue)
    return ModuleReport(True, n, "leibniz")


@dataclass(frozen=True)
class OrdinaryModuleDerivationSequence:
    entries: tuple  # order-1 module derivations

    @property
    def order(self) -> int:
        return len(self.entries)

    @property
    def ring_sequence(self) -> OrdinaryDerivationSequence:
        if self.entries and isinstance(self.entries[0], FinModuleDerivation):
            alg = self.entries[0].ring.algebra
            return OrdinaryDerivationSequence(tuple(FinDerivation(alg, e.ring.matrix(1)) for e in self.entries), alg)
        return OrdinaryDerivationSequence(tuple(PolyDerivation(e.ring.value(1)) for e in self.entries))

    def __getitem__(self, k: int):
        if not 1 <= k <= self.order:
            raise IndexOutOfRange(f"d_{k} outside 1..{self.order}")
        return self.entries[k - 1]


def ordinary_module_derivation(delta: PolyDerivation, module: PresentedModule, images, strict: bool = True) -> HigherModuleDerivation:
    """A delta-derivation d on the module, given d(e_j)."""
    return HigherModuleDerivation.build(PolyHigherDerivation((delta.value,)), module, [list(images)], strict)


def module_to_ordinary(D, samples: int = 20, seed: int = 0) -> OrdinaryModuleDerivationSequence:
    """d_(n+1) = (n+1) D_(n+1) - sum_(k=0)^(n-1) d_(k+1) o D_(n-k)."""
    if isinstance(D, FinModuleDerivation):
        return _fin_to_ordinary(D)
    ring_seq = to_ordinary_sequence(D.ring)
    mod = D.module
    ds: list[HigherModuleDerivation] = []
    rng = random.Random(seed)
    probes = [mod.gen(j).coords for j in range(mod.generator_count)]
    probes += [random_element(mod, rng) for _ in range(samples)]

    for n in range(D.order):
        def rec(v, n=n):
            out = tuple(c * (n + 1) for c in D.raw(n + 1, v))
            for k in range(n):
                out = tuple(a - b for a, b in zip(out, ds[k].raw(1, D.raw(n - k, v))))
            return out

        imgs = [rec(mod.gen(j).coords) for j in range(mod.generator_count)]
        d = ordinary_module_derivation(ring_seq[n + 1], mod, imgs)
        for v in probes:
            diff = tuple(a - b for a, b in zip(rec(v), d.raw(1, v)))
            if not mod.contains(diff):
                raise LeibnizViolation(
                    f"d_{n + 1} is not a derivation on the module",
                    ModuleReport(False, kind="leibniz", k=n + 1, pair=_fmt(v), residue=mod.canonical(diff)),
                )
        ds.append(d)
    return OrdinaryModuleDerivationSequence(tuple(ds))


def module_from_ordinary(seq: OrdinaryModuleDerivationSequence, module: Optional[PresentedModule] = None):
    """D_(i+1) = 1/(i+1) * sum_(k=0)^(i) d_(k+1) o D_(i-k)."""
    if seq.entries and isinstance(seq.entries[0], FinModuleDerivation):
        return _fin_from_ordinary(seq)
    if not seq.entries:
        if module is None:
            raise InvalidArgument("an empty sequence needs the module")
        return HigherModuleDerivation.identity(PolyHigherDerivation(()), module)
    mod = seq.entries[0].module
    ring = from_ordinary_sequence(seq.ring_sequence)
    g = mod.generator_count
    levels = [[mod.gen(j).coords for j in range(g)]]
    for i in range(seq.order):
        row = []
        for j in range(g):
            acc = tuple(ZERO for _ in range(g))
            for k in range(i + 1):
                acc = _add(acc, seq.entries[k].raw(1, levels[i - k][j]))
            row.append(tuple(c / (i + 1) for c in acc))
        levels.append(row)
    return HigherModuleDerivation.build(ring, mod, levels[1:])


def check_module_reconstruction(D, seq: OrdinaryModuleDerivationSequence) -> Optional[tuple[int, int]]:
    """(i+1) D_(i+1) = sum_k d_(k+1) o D_(i-k) on every generator; returns the
    first failing (i, generator) or None."""
    if isinstance(D, FinModuleDerivation):
        for i in range(D.order):
            rhs = QMatrix.zeros(D.module.dim)
            for k in range(i + 1):
                rhs = rhs + seq.entries[k].matrix(1) @ D.matrix(i - k)
            if rhs != D.matrix(i + 1).scale(i + 1):
                return i, 0
        return None
    mod = D.module
    for i in range(D.order):
        for j in range(mod.generator_count):
            e = mod.gen(j).coords
            lhs = tuple(c * (i + 1) for c in D.raw(i + 1, e))
            rhs = tuple(ZERO for _ in e)
            for k in range(i + 1):
                rhs = _add(rhs, seq.entries[k].raw(1, D.raw(i - k, e)))
            if not mod.contains(tuple(a - b for a, b in zip(lhs, rhs))):
                return i, j
    return None


# -- finite-dimensional modules over a FinAlgebra ---------------------------


@dataclass(frozen=True, eq=False)
class FinModuleDerivation:
    ring: FinHigherDerivation
    module: FinModule
    matrices: tuple[QMatrix, ...]
    origin: str = ""

    def __post_init__(self):
        if self.ring.algebra is not self.module.algebra:
            raise MismatchedDerivation("ring derivation and module live over different algebras")
        if len(self.matrices) != self.ring.order:
            raise MismatchedDerivation("module and ring orders differ")
        for m in self.matrices:
            if m.shape != (self.module.dim, self.module.dim):
                raise DimensionMismatch("component shape does not match the module")

    @property
    def order(self) -> int:
        return self.ring.order

    def matrix(self, k: int) -> QMatrix:
        if not 0 <= k <= self.order:
            raise IndexOutOfRange(f"component {k} outside 0..{self.order}")
        return QMatrix.identity(self.module.dim) if k == 0 else self.matrices[k - 1]

    def eval(self, k: int, v) -> tuple:
        return self.matrix(k).apply(v)

    def truncate(self, k: int) -> "FinModuleDerivation":
        return FinModuleDerivation(self.ring.truncate(k), self.module, self.matrices[:k], self.origin)


def _validate_fin(D: FinModuleDerivation) -> ModuleReport:
    alg, mod = D.module.algebra, D.module
    n = 0
    for k in range(1, D.order + 1):
        for a in range(alg.dim):
            for u in range(mod.dim):
                n += 1
                ea, eu = alg.basis(a), mod.basis(u)
                lhs = D.matrix(k).apply(mod.act(ea, eu))
                rhs = [Fraction(0)] * mod.dim
                for i in range(k + 1):
                    for c, val in enumerate(mod.act(D.ring.apply(i, ea), D.matrix(k - i).apply(eu))):
                        rhs[c] += val
                if lhs != tuple(rhs):
                    return ModuleReport(
                        False, n, "leibniz", k, pair=(a, u), residue=(lhs, tuple(rhs)),
                        discrepancy=D.origin == "power",
                    )
    return ModuleReport(True, n, "leibniz")


def _fin_to_ordinary(D: FinModuleDerivation) -> OrdinaryModuleDerivationSequence:
    ring_seq = to_ordinary_sequence(D.ring)
    mats: list[QMatrix] = []
    out = []
    for n in range(D.order):
        m = D.matrix(n + 1).scale(n + 1)
        for k in range(n):
            m = m - mats[k] @ D.matrix(n - k)
        d = FinModuleDerivation(FinHigherDerivation(D.ring.algebra, (ring_seq[n + 1].matrix,)), D.module, (m,))
        rep = _validate_fin(d)
        if not rep.ok:
            raise LeibnizViolation(f"d_{n + 1} is not a derivation on the module", rep)
        mats.append(m)
        out.append(d)
    return OrdinaryModuleDerivationSequence(tuple(out))


def _fin_from_ordinary(seq: OrdinaryModuleDerivationSequence) -> FinModuleDerivation:
    for k, d in enumerate(seq.entries, 1):
        rep = _validate_fin(d)
        if not rep.ok:
            raise LeibnizViolation(f"d_{k} is not a derivation on the module", rep)
    mod = seq.entries[0].module
    ring = from_ordinary_sequence(seq.ring_sequence)
    mats = [QMatrix.identity(mod.dim)]
    for i in range(seq.order):
        s = QMatrix.zeros(mod.dim)
        for k in range(i + 1):
            s = s + seq.entries[k].matrix(1) @ mats[i - k]
        mats.append(s.scale(Fraction(1, i + 1)))
    return FinModuleDerivation(ring, mod, tuple(mats[1:]))


# -- constructions ----------------------------------------------------------


def make_module_exp(d, n: int):
    """D_k = d^k / k! relative to exp of the underlying ring derivation."""
    if n < 0:
        raise InvalidArgument("order must be non-negative")
    rep = validate_module_derivation(d)
    if not rep.ok:
        raise LeibnizViolation("seed map is not a module derivation", rep)
    if isinstance(d, FinModuleDerivation):
        ring = make_exp(FinDerivation(d.ring.algebra, d.ring.matrix(1)), n)
        mats, cur = [], QMatrix.identity(d.module.dim)
        for k in range(1, n + 1):
            cur = (d.matrix(1) @ cur).scale(Fraction(1, k))
            mats.append(cur)
        return FinModuleDerivation(ring, d.module, tuple(mats), "exp")
    ring = make_exp(PolyDerivation(d.ring.value(1)), n)
    mod = d.module
    cur = [mod.gen(j).coords for j in range(mod.generator_count)]
    levels = []
    for k in range(1, n + 1):
        cur = [tuple(c / k for c in d.raw(1, v)) for v in cur]
        levels.append(cur)
    return HigherModuleDerivation.build(ring, mod, levels)


def make_module_power(module: FinModule, a: Sequence, n: int) -> FinModuleDerivation:
    """D_k = (action of a)^k, relative to the inner higher derivation by a."""
    ring = make_inner_higher(module.algebra, a, n)
    act = module.action(a)
    mats, cur = [], QMatrix.identity(module.dim)
    for _ in range(n):
        cur = act @ cur
        mats.append(cur)
    return FinModuleDerivation(ring, module, tuple(mats), "power")


def fin_module_derivation(ring: FinHigherDerivation, module: FinModule, matrices: Sequence[QMatrix]) -> FinModuleDerivation:
    return FinModuleDerivation(ring, module, tuple(matrices))


ModuleDerivation = Union[HigherModuleDerivation, FinModuleDerivation]
