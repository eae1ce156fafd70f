"""The monad T = A (x) - on finite-dimensional Q-vector spaces.

A carrier M is identified with Q^m. T^j M has the basis e_(a1) (x) ... (x)
e_(aj) (x) u, indexed with the algebra factors major, so every component is
a Kronecker product. A natural transformation T -> T is stored by its
component at Q (a d x d matrix) and acts on M as ``phi (x) I_m``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DimensionMismatch, InvalidArgument
from .finalg import FinAlgebra, FinModule
from .qmatrix import QMatrix
from .ring import FinHigherDerivation


@dataclass(frozen=True)
class DiagramReport:
    ok: bool
    diagram: str
    checked: int = 0
    order: Optional[int] = None
    carrier: Optional[int] = None
    basis_index: Optional[int] = None
    pair: Optional[tuple[int, int]] = None
    left: object = None
    right: object = None

    def __bool__(self) -> bool:
        return self.ok


def compare_paths(
    diagram: str,
    left: QMatrix,
    right: QMatrix,
    *,
    order: Optional[int] = None,
    carrier: Optional[int] = None,
    pair_of=None,
) -> DiagramReport:
    """Compare two composites column by column (one column per basis vector)."""
    if left.shape != right.shape:
        raise DimensionMismatch(f"{diagram}: paths have shapes {left.shape} and {right.shape}")
    for j in range(left.ncols):
        lc, rc = left.column(j), right.column(j)
        if lc != rc:
            return DiagramReport(False, diagram, j + 1, order, carrier, j, pair_of(j) if pair_of else None, lc, rc)
    return DiagramReport(True, diagram, left.ncols, order, carrier)


@dataclass(frozen=True, eq=False)
class NatTrans:
    component: QMatrix

    def at(self, m: int) -> QMatrix:
        return self.component.kron(QMatrix.identity(m))

    @classmethod
    def identity(cls, d: int) -> "NatTrans":
        return cls(QMatrix.identity(d))


@dataclass(frozen=True, eq=False)
class MonadRealization:
    algebra: FinAlgebra

    @property
    def d(self) -> int:
        return self.algebra.dim

    def T_dim(self, m: int, power: int = 1) -> int:
        return self.d**power * m

    def theta(self, m: int) -> QMatrix:
        """theta_M : T T M -> T M."""
        return self.algebra.multiplication.kron(QMatrix.identity(m))

    def zeta(self, m: int) -> QMatrix:
        """zeta_M : M -> T M, u |-> 1 (x) u."""
        return QMatrix.from_columns([self.algebra.unit]).kron(QMatrix.identity(m))

    def T(self, phi: QMatrix) -> QMatrix:
        return QMatrix.identity(self.d).kron(phi)

    def mu(self, a: Sequence, m: int) -> QMatrix:
        """Component at M of the transformation 1 -> T chosen by a: u |-> a (x) u."""
        return QMatrix.from_columns([tuple(Fraction(v) for v in a)]).kron(QMatrix.identity(m))

    def horizontal(self, alpha: NatTrans, beta: NatTrans, m: int) -> QMatrix:
        """(alpha * beta)_M = alpha_(TM) o T(beta_M)."""
        return alpha.at(self.T_dim(m)) @ self.T(beta.at(m))

    def free_module(self, m: int) -> "EMModule":
        return EMModule(self.algebra, self.T_dim(m), self.theta(m))


def check_monad_laws(T: MonadRealization, carriers: Sequence[int] = (1, 2, 3)) -> DiagramReport:
    total = 0
    for m in carriers:
        tm = T.T_dim(m)
        rep = compare_paths("associativity", T.theta(m) @ T.theta(tm), T.theta(m) @ T.T(T.theta(m)), carrier=m)
        total += rep.checked
        if not rep.ok:
            return _with_total(rep, total)
        ident = QMatrix.identity(tm)
        for name, path in (("left unit", T.theta(m) @ T.T(T.zeta(m))), ("right unit", T.theta(m) @ T.zeta(tm))):
            rep = compare_paths(name, path, ident, carrier=m)
            total += rep.checked
            if not rep.ok:
                return _with_total(rep, total)
    return DiagramReport(True, "monad-laws", total)


def _with_total(rep: DiagramReport, total: int) -> DiagramReport:
    return DiagramReport(rep.ok, rep.diagram, total, rep.order, rep.carrier, rep.basis_index, rep.pair, rep.left, rep.right)


def nat_trans_family(delta: FinHigherDerivation) -> list[NatTrans]:
    """Components D_0 .. D_n as transformations T -> T."""
    return [NatTrans(delta.matrix(k)) for k in range(delta.order + 1)]


def _require_identity(first: NatTrans | QMatrix, d: int, what: str):
    mat = first.component if isinstance(first, NatTrans) else first
    if mat != QMatrix.identity(d):
        raise InvalidArgument(f"{what}_0 must be the identity")


def check_higher_derivation_diagram(
    T: MonadRealization, deltas: Sequence[NatTrans], carriers: Sequence[int] = (1, 2, 3)
) -> DiagramReport:
    """theta_M o sum_k (D_k * D_(i-k))_M = (D_i)_M o theta_M for each i.

    Orders are swept outermost, then carriers, then basis vectors of T T M, so
    on carrier 1 the first failure names the basis pair (a, b) in the same
    order as the ring-level Leibniz sweep.
    """
    d = T.d
    _require_identity(deltas[0], d, "Delta")
    total = 0
    for i in range(1, len(deltas)):
        for m in carriers:
            acc = QMatrix.zeros(T.T_dim(m), T.T_dim(m, 2))
            for k in range(i + 1):
                acc = acc + T.theta(m) @ T.horizontal(deltas[k], deltas[i - k], m)
            rhs = deltas[i].at(m) @ T.theta(m)
            rep = compare_paths(
                "higher-deriv", acc, rhs, order=i, carrier=m,
                pair_of=lambda j, m=m: divmod(j // m, d),
            )
            total += rep.checked
            if not rep.ok:
                return _with_total(rep, total)
    return DiagramReport(True, "higher-deriv", total)


@dataclass(frozen=True, eq=False)
class EMModule:
    algebra: FinAlgebra
    dim: int
    action: QMatrix  # f_M : A (x) M -> M

    @classmethod
    def from_fin_module(cls, module: FinModule) -> "EMModule":
        d, m = module.algebra.dim, module.dim
        cols = [module.actions[a].column(u) for a in range(d) for u in range(m)]
        return cls(module.algebra, m, QMatrix.from_columns(cols))

    def check_axioms(self) -> DiagramReport:
        T = MonadRealization(self.algebra)
        m = self.dim
        rep = compare_paths("module associativity", self.action @ T.theta(m), self.action @ T.T(self.action), carrier=m)
        if not rep.ok:
            return rep
        return compare_paths("module unit", self.action @ T.zeta(m), QMatrix.identity(m), carrier=m)


def check_module_derivation_diagram(
    T: MonadRealization,
    M: EMModule,
    deltas: Sequence[NatTrans],
    Ds: Sequence[QMatrix],
) -> DiagramReport:
    """D_i o f_M = f_M o sum_k T D_k o (D_(i-k))_M on A (x) M."""
    d, m = T.d, M.dim
    if M.action.shape != (m, d * m):
        raise DimensionMismatch("module action has the wrong shape")
    if len(Ds) != len(deltas):
        raise DimensionMismatch("module and ring families have different lengths")
    _require_identity(deltas[0], d, "Delta")
    _require_identity(Ds[0], m, "D")
    total = 0
    for i in range(1, len(Ds)):
        acc = QMatrix.zeros(m, d * m)
        for k in range(i + 1):
            acc = acc + M.action @ T.T(Ds[k]) @ deltas[i - k].at(m)
        rep = compare_paths("module-deriv", Ds[i] @ M.action, acc, order=i, carrier=m, pair_of=lambda j: divmod(j, m))
        total += rep.checked
        if not rep.ok:
            return _with_total(rep, total)
    return DiagramReport(True, "module-deriv", total)


def inner_expanded(T: MonadRealization, a: Sequence, n: int, m: int) -> QMatrix:
    """theta^(n-2)_M o (mu^(n-1) * delta)_M with delta = theta o (mu_T - T mu),
    built literally from the monad structure maps."""
    delta = T.theta(m) @ (T.mu(a, T.T_dim(m)) - T.T(T.mu(a, m)))
    if n == 0:
        return QMatrix.identity(T.T_dim(m))
    if n == 1:
        return delta
    # (mu^(n-1) * delta)_M = mu^(n-1) at TM after delta_M
    path = delta
    for j in range(n - 1):
        path = T.mu(a, T.T_dim(m, j + 1)) @ path
    # theta_M o theta_(TM) o ... o theta_(T^(n-2) M)
    for j in range(n - 2, -1, -1):
        path = T.theta(T.d**j * m) @ path
    return path


def inner_compact(T: MonadRealization, a: Sequence, n: int, m: int) -> QMatrix:
    """D_n = theta o mu_T o D_(n-1), starting from delta."""
    cur = T.theta(m) @ (T.mu(a, T.T_dim(m)) - T.T(T.mu(a, m)))
    if n == 0:
        return QMatrix.identity(T.T_dim(m))
    for _ in range(n - 1):
        cur = T.theta(m) @ T.mu(a, T.T_dim(m)) @ cur
    return cur


# -- free-forgetful adjunction ----------------------------------------------


def adjunction_restrict(T: MonadRealization, g: QMatrix, m: int) -> QMatrix:
    """EM_T(TM, N) -> Hom(M, N): g |-> g o zeta_M."""
    return g @ T.zeta(m)


def adjunction_extend(T: MonadRealization, N: EMModule, h: QMatrix) -> QMatrix:
    """Hom(M, N) -> EM_T(TM, N): h |-> f_N o T h."""
    return N.action @ T.T(h)


def is_module_map(T: MonadRealization, g: QMatrix, m: int, N: EMModule) -> bool:
    """g : (TM, theta_M) -> (N, f_N) respects the actions."""
    return g @ T.theta(m) == N.action @ T.T(g)


def check_adjunction(T: MonadRealization, N: EMModule, m: int, samples: int = 10, seed: int = 0) -> bool:
    rng = random.Random(seed)
    for _ in range(samples):
        h = QMatrix([[rng.randint(-3, 3) for _ in range(m)] for _ in range(N.dim)])
        g = adjunction_extend(T, N, h)
        if not is_module_map(T, g, m, N) or adjunction_restrict(T, g, m) != h:
            return False
        h2 = QMatrix([[rng.randint(-3, 3) for _ in range(m)] for _ in range(N.dim)])
        g2 = adjunction_extend(T, N, h2)
        if adjunction_extend(T, N, adjunction_restrict(T, g2, m)) != g2:
            return False
    return True


def corrupted(algebra: FinAlgebra, i: int, j: int, k: int, delta) -> FinAlgebra:
    """Copy of ``algebra`` with one structure constant shifted, unchecked."""
    table = [[list(v) for v in row] for row in algebra.table]
    table[i][j][k] += Fraction(delta)
    return FinAlgebra.from_table(table, algebra.unit, name=f"{algebra.name}*", check=False)

