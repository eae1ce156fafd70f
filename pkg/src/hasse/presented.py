"""Finitely presented Q[x]-modules ``Q[x]^g / rowspan(relations)``."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

from .errors import DimensionMismatch
from .poly import ONE, ZERO, Poly, PolyLike, lcm, gcd
from .polymatrix import PolyMatrix, SmithForm, snf, solve_with_form


@dataclass(frozen=True, eq=False)
class PresentedModule:
    generator_count: int
    relations: PolyMatrix

    def __post_init__(self):
        if self.relations.ncols != self.generator_count:
            raise DimensionMismatch(
                f"relations have {self.relations.ncols} columns for {self.generator_count} generators"
            )

    @classmethod
    def from_rows(cls, generator_count: int, rows: Sequence[Sequence[PolyLike]]) -> "PresentedModule":
        return cls(generator_count, PolyMatrix(rows, ncols=generator_count))

    @classmethod
    def free(cls, rank: int) -> "PresentedModule":
        return cls(rank, PolyMatrix.zeros(0, rank))

    @classmethod
    def cyclic(cls, annihilator: PolyLike) -> "PresentedModule":
        return cls.from_rows(1, [[annihilator]])

    @cached_property
    def smith(self) -> SmithForm:
        return snf(self.relations)

    @cached_property
    def invariant_factors(self) -> tuple[Poly, ...]:
        """Nonunit invariant factors, zeros included for free summands."""
        diag = list(self.smith.diagonal) + [ZERO] * (self.generator_count - len(self.smith.diagonal))
        return tuple(d for d in diag if not d.is_unit())

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.invariant_factors if d.is_zero())

    @property
    def torsion_dimension(self) -> int:
        """Q-dimension of the torsion part."""
        return sum(d.degree for d in self.invariant_factors if d)

    # -- elements -----------------------------------------------------------

    def element(self, coords: Sequence[PolyLike]) -> "ModuleElement":
        return ModuleElement(self, tuple(Poly.coerce(c) for c in coords))

    def gen(self, j: int) -> "ModuleElement":
        return self.element([ONE if i == j else ZERO for i in range(self.generator_count)])

    def gens(self) -> list["ModuleElement"]:
        return [self.gen(j) for j in range(self.generator_count)]

    def zero(self) -> "ModuleElement":
        return self.element([ZERO] * self.generator_count)

    def _coords(self, v) -> tuple[Poly, ...]:
        coords = v.coords if isinstance(v, ModuleElement) else tuple(Poly.coerce(c) for c in v)
        if len(coords) != self.generator_count:
            raise DimensionMismatch(f"element has {len(coords)} coordinates, module has {self.generator_count}")
        return coords

    def smith_coords(self, v) -> tuple[Poly, ...]:
        """Coordinates in the cyclic decomposition given by the Smith form."""
        return self.smith.V.vecmul(self._coords(v))

    def canonical(self, v) -> tuple[Poly, ...]:
        """Canonical coset representative: reduce Smith coordinates mod d_i."""
        w = list(self.smith_coords(v))
        diag = self.smith.diagonal
        for i in range(len(diag)):
            if diag[i]:
                w[i] = w[i] % diag[i]
        return self.smith.V_inv.vecmul(w)

    def membership(self, v) -> "Membership":
        coords = self._coords(v)
        u = solve_with_form(self.smith, coords)
        if u is not None:
            return Membership(True, witness=u)
        return Membership(False, residue=self.canonical(coords))

    def contains(self, v) -> bool:
        """True iff ``v`` is zero in the module (lies in the relation span)."""
        return self.membership(v).member

    def annihilator(self, v) -> Poly:
        """Monic generator of ann(v); zero if v generates a free submodule."""
        w = self.smith_coords(v)
        diag = list(self.smith.diagonal) + [ZERO] * (self.generator_count - len(self.smith.diagonal))
        ann = ONE
        for wi, d in zip(w, diag):
            if d.is_zero():
                if wi:
                    return ZERO
                continue
            wi = wi % d
            if wi:
                ann = lcm(ann, d.exact_div(gcd(d, wi)))
        return ann

    def __eq__(self, other) -> bool:
        if not isinstance(other, PresentedModule):
            return NotImplemented
        return self.generator_count == other.generator_count and self.relations == other.relations

    def __hash__(self) -> int:
        return hash((self.generator_count, self.relations))

    def __repr__(self) -> str:
        return f"PresentedModule({self.generator_count}, {self.relations!r})"


@dataclass(frozen=True)
class Membership:
    member: bool
    witness: Optional[tuple[Poly, ...]] = None
    residue: Optional[tuple[Poly, ...]] = None

    def __bool__(self) -> bool:
        return self.member


def membership(module: PresentedModule, v) -> Membership:
    return module.membership(v)


@dataclass(frozen=True, eq=False)
class ModuleElement:
    parent: PresentedModule
    coords: tuple[Poly, ...] = field()

    def __post_init__(self):
        if len(self.coords) != self.parent.generator_count:
            raise DimensionMismatch("coordinate count does not match the parent module")

    def _other(self, other: "ModuleElement") -> tuple[Poly, ...]:
        if not isinstance(other, ModuleElement):
            raise TypeError("expected a ModuleElement")
        if other.parent is not self.parent and other.parent != self.parent:
            raise DimensionMismatch("elements of different modules")
        return other.coords

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        return ModuleElement(self.parent, tuple(a + b for a, b in zip(self.coords, self._other(other))))

    def __sub__(self, other: "ModuleElement") -> "ModuleElement":
        return ModuleElement(self.parent, tuple(a - b for a, b in zip(self.coords, self._other(other))))

    def __neg__(self) -> "ModuleElement":
        return ModuleElement(self.parent, tuple(-a for a in self.coords))

    def __rmul__(self, a: PolyLike) -> "ModuleElement":
        a = Poly.coerce(a)
        return ModuleElement(self.parent, tuple(a * c for c in self.coords))

    def __mul__(self, a: PolyLike) -> "ModuleElement":
        return self.__rmul__(a)

    def canonical(self) -> "ModuleElement":
        return ModuleElement(self.parent, self.parent.canonical(self.coords))

    def is_zero(self) -> bool:
        return self.parent.contains(self.coords)

    def in_module(self, other: PresentedModule) -> "ModuleElement":
        """Reinterpret the coordinates in another presentation on the same generators."""
        if other.generator_count != self.parent.generator_count:
            raise DimensionMismatch("generator counts differ")
        return ModuleElement(other, self.coords)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self) -> int:
        return hash(self.parent.canonical(self.coords))

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"

    def __repr__(self) -> str:
        return f"ModuleElement{self}"
