"""SL(2)^d model variations: elliptic family, Sym^n, tensors, duals, Tate twists."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .hodge import HodgeStructure, PolarizedLattice, hodge_gram, is_polarization
from .linalg import (
    DECREASING,
    Filtration,
    Grading,
    Matrix,
    Subspace,
    exp_nilpotent,
    inverse,
    nullspace,
    solve,
)
from .nilpotent import weight_filtration
from .orbits import NilpotentOrbit, evaluate_orbit
from .report import Report
from .scalars import GAUSSIAN, RATIONAL, I, join_fields

LOWER = Matrix([[0, 0], [1, 0]])
GRADE = Matrix([[1, 0], [0, -1]])
RAISE = Matrix([[0, 1], [0, 0]])


class SL2Error(ValueError):
    pass


@dataclass
class SL2Rep:
    """d commuting sl(2)-triples on Q^n with a polarized base filtration ``Fsharp = Phi(i,...,i)``."""

    lowers: list
    grades: list
    raises: list
    Q: Matrix
    weight: int
    Fsharp: Filtration
    name: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return len(self.lowers)

    @property
    def n(self) -> int:
        return self.Q.nrows

    @property
    def lattice(self) -> PolarizedLattice:
        return PolarizedLattice(self.Q, self.weight)

    def validate(self) -> Report:
        rep = Report("sl2_rep")
        ok = True
        for j in range(self.d):
            h, Y, X = self.lowers[j], self.grades[j], self.raises[j]
            ok &= X.commutator(h) == Y and Y.commutator(X) == X.scale(2) and Y.commutator(h) == h.scale(-2)
        rep.add("triple_relations", ok)
        cross = True
        for a, b in itertools.permutations(range(self.d), 2):
            for A in (self.lowers[a], self.grades[a], self.raises[a]):
                for B in (self.lowers[b], self.grades[b], self.raises[b]):
                    if not A.commutator(B).is_zero():
                        cross = False
        rep.add("factors_commute", cross)
        rep.add("Y_integral_diagonalizable", all(_eigen_pieces(Y) is not None for Y in self.grades))
        Q = self.Q
        inv = all((A.T @ Q + Q @ A).is_zero() for A in self.lowers + self.grades + self.raises)
        rep.add("preserves_Q", inv)
        pol = is_polarization(HodgeStructure(self.lattice, self.Fsharp))
        rep.add("Fsharp_polarized", pol.passed, failures=[c.name for c in pol.failures()])
        return rep

    def limiting_filtration(self) -> Filtration:
        """``exp(-i sum h_j) Fsharp``."""
        X = Matrix.zeros(self.n, self.n, GAUSSIAN)
        for h in self.lowers:
            X = X + h.promote(GAUSSIAN).scale(-I)
        return self.Fsharp.promote(GAUSSIAN).apply(exp_nilpotent(X))

    def to_orbit(self) -> NilpotentOrbit:
        return NilpotentOrbit(list(self.lowers), self.limiting_filtration(), self.lattice, self.name)

    def y_grading(self) -> Grading:
        return y_grading(self)


def _eigen_pieces(Y: Matrix):
    """``{eigenvalue: eigenspace}`` if Y is diagonalizable with integer spectrum, else None."""
    n = Y.nrows
    pieces = {}
    total = 0
    for lam in range(-n, n + 1):
        K = nullspace(Y - Matrix.identity(n, Y.field).scale(lam))
        if K:
            pieces[lam] = Subspace(K, n, Y.field)
            total += len(K)
    return pieces if total == n else None


def y_grading(rep: SL2Rep) -> Grading:
    """Joint eigenspaces of the Y_j, keyed by the eigenvalue tuple."""
    per = [_eigen_pieces(Y) for Y in rep.grades]
    if any(p is None for p in per):
        raise SL2Error("Y_j not diagonalizable over Z")
    n = rep.n
    pieces = {}
    for key in itertools.product(*[sorted(p) for p in per]):
        S = Subspace.full(n, RATIONAL)
        for p, k in zip(per, key):
            S = S & p[k]
            if S.is_zero():
                break
        if not S.is_zero():
            pieces[key] = S
    return Grading(pieces, rep.d, n, RATIONAL)


def diagonal_weight_filtrations(rep: SL2Rep) -> list:
    """``W^j = W(h_1 + ... + h_j)`` (centred at 0)."""
    out = []
    acc = Matrix.zeros(rep.n, rep.n)
    for h in rep.lowers:
        acc = acc + h
        out.append(weight_filtration(acc))
    return out


def _hodge_filtration(steps: dict, n: int) -> Filtration:
    return Filtration(steps, DECREASING, n, GAUSSIAN)


# -- constructions -------------------------------------------------------------


def elliptic_variation() -> SL2Rep:
    """``z -> span(1, z)`` on Q^2 with ``Q = [[0,1],[-1,0]]``."""
    F = _hodge_filtration(
        {0: Subspace.full(2, GAUSSIAN), 1: Subspace([(1, I)], 2, GAUSSIAN), 2: Subspace.zero(2, GAUSSIAN)}, 2
    )
    return SL2Rep([LOWER], [GRADE], [RAISE], Matrix([[0, 1], [-1, 0]]), 1, F, "elliptic")


def tate(k: int) -> HodgeStructure:
    """Rank one, type (k, k), ``Q = (1)``."""
    F = _hodge_filtration({k: Subspace.full(1, GAUSSIAN), k + 1: Subspace.zero(1, GAUSSIAN)}, 1)
    return HodgeStructure(PolarizedLattice(Matrix([[1]]), 2 * k), F)


def trivial_rep(d: int = 1, weight: int = 0) -> SL2Rep:
    if weight % 2:
        raise SL2Error("a rank-one structure has even weight")
    k = weight // 2
    F = _hodge_filtration({k: Subspace.full(1, GAUSSIAN), k + 1: Subspace.zero(1, GAUSSIAN)}, 1)
    Z = Matrix.zeros(1, 1)
    return SL2Rep([Z] * d, [Z] * d, [Z] * d, Matrix([[1]]), weight, F, f"trivial(d={d})")


def tensor_filtration(F1: Filtration, F2: Filtration) -> Filtration:
    """``(F1 ⊗ F2)^p = sum_{a+b=p} F1^a ⊗ F2^b``."""
    f = join_fields(F1.field, F2.field, GAUSSIAN)
    F1, F2 = F1.promote(f), F2.promote(f)
    n = F1.n * F2.n
    steps = {}
    for p in range(F1.lo + F2.lo - 1, F1.hi + F2.hi + 2):
        vecs = []
        for a in range(F1.lo - 1, F1.hi + 2):
            A, B = F1[a], F2[p - a]
            for u in A.basis:
                for v in B.basis:
                    vecs.append(tuple(x * y for x in u for y in v))
        steps[p] = Subspace(vecs, n, f) if vecs else Subspace.zero(n, f)
    return Filtration(steps, DECREASING, n, f)


def tensor(r1: SL2Rep, r2: SL2Rep, mode: str = "external") -> SL2Rep:
    """Tensor product.  ``external``: d = d1 + d2; ``diagonal``: d1 = d2, triples add."""
    I1 = Matrix.identity(r1.n)
    I2 = Matrix.identity(r2.n)
    if mode == "external":
        ops = [
            [A.kron(I2) for A in L1] + [I1.kron(B) for B in L2]
            for L1, L2 in ((r1.lowers, r2.lowers), (r1.grades, r2.grades), (r1.raises, r2.raises))
        ]
    elif mode == "diagonal":
        if r1.d != r2.d:
            raise SL2Error("diagonal tensor product needs equal d")
        ops = [
            [A.kron(I2) + I1.kron(B) for A, B in zip(L1, L2)]
            for L1, L2 in ((r1.lowers, r2.lowers), (r1.grades, r2.grades), (r1.raises, r2.raises))
        ]
    else:
        raise SL2Error(f"unknown tensor mode {mode!r}")
    F = tensor_filtration(r1.Fsharp, r2.Fsharp)
    return SL2Rep(ops[0], ops[1], ops[2], r1.Q.kron(r2.Q), r1.weight + r2.weight, F,
                  f"({r1.name} {'x' if mode == 'external' else '*'} {r2.name})")


def twist(rep: SL2Rep, H: HodgeStructure) -> SL2Rep:
    """``rep ⊗ H`` with sl(2) acting trivially on H."""
    Ih = Matrix.identity(H.n)
    F = tensor_filtration(rep.Fsharp, H.F)
    return SL2Rep(
        [A.kron(Ih) for A in rep.lowers],
        [A.kron(Ih) for A in rep.grades],
        [A.kron(Ih) for A in rep.raises],
        rep.Q.kron(H.lattice.Q),
        rep.weight + H.weight,
        F,
        f"{rep.name}(tw{H.weight})",
    )


def dual(rep: SL2Rep) -> SL2Rep:
    """Contragredient: ``-A^T``, ``Q^v = c Q^{-T}`` (c > 0 clears denominators), ``(F^v)^p = ann(F^{1-p})``."""
    F = rep.Fsharp
    n = rep.n
    steps = {}
    for p in range(-F.hi - 1, -F.lo + 3):
        steps[p] = F[1 - p].annihilator()
    Fd = Filtration(steps, DECREASING, n, F.field)
    Qd = inverse(rep.Q).T
    # clear denominators with a positive scalar so the dual lattice stays integral
    den = 1
    for row in Qd.rows:
        for x in row:
            den = math.lcm(den, Fraction(x).denominator)
    Qd = Qd.scale(den)
    return SL2Rep(
        [-A.T for A in rep.lowers],
        [-A.T for A in rep.grades],
        [-A.T for A in rep.raises],
        Qd,
        -rep.weight,
        Fd,
        f"{rep.name}^v",
    )


def _sym_basis(m: int, k: int):
    """Orbit-sum basis of Sym^k inside (Q^m)^{⊗k}: one column per multiset."""
    cols = []
    keys = list(itertools.combinations_with_replacement(range(m), k))
    size = m ** k
    for ms in keys:
        v = [0] * size
        for word in set(itertools.permutations(ms)):
            idx = 0
            for x in word:
                idx = idx * m + x
            v[idx] += 1
        cols.append(v)
    return keys, cols


def _restrict(A: Matrix, S: Matrix) -> Matrix:
    """Matrix of A on the column span of S (assumed invariant), in that basis."""
    AS = A @ S
    cols = []
    for c in AS.columns():
        x = solve(S, c)
        if x is None:
            raise SL2Error("subspace not invariant")
        cols.append(x)
    return Matrix.from_columns(cols, A.field)


def sym_power(rep: SL2Rep, k: int) -> SL2Rep:
    """Sym^k with the orbit-sum basis (unnormalised symmetrisation)."""
    if k < 1:
        raise SL2Error("Sym^k needs k >= 1")
    if k == 1:
        return rep
    m = rep.n
    _, cols = _sym_basis(m, k)
    S = Matrix.from_columns(cols, RATIONAL)
    big = rep
    for _ in range(k - 1):
        big = tensor(big, rep, "diagonal")
    lowers = [_restrict(A, S) for A in big.lowers]
    grades = [_restrict(A, S) for A in big.grades]
    raises = [_restrict(A, S) for A in big.raises]
    Q = S.T @ big.Q @ S
    Fb = big.Fsharp
    img = Subspace(cols, m ** k, GAUSSIAN)
    Sg = S.promote(GAUSSIAN)
    steps = {}
    dim = len(cols)
    for p in range(Fb.lo - 1, Fb.hi + 2):
        vecs = [solve(Sg, v) for v in (Fb[p] & img).basis]
        steps[p] = Subspace(vecs, dim, GAUSSIAN) if vecs else Subspace.zero(dim, GAUSSIAN)
    F = Filtration(steps, DECREASING, dim, GAUSSIAN)
    return SL2Rep(lowers, grades, raises, Q, rep.weight * k, F, f"Sym{k}({rep.name})")


def end_elliptic() -> SL2Rep:
    r = tensor(elliptic_variation(), dual(elliptic_variation()), "diagonal")
    r.name = "End(elliptic)"
    return r


def two_variable_tensor() -> SL2Rep:
    """elliptic ⊠ elliptic twisted by Tate(-1): weight 0, rank 4, d = 2."""
    r = twist(tensor(elliptic_variation(), elliptic_variation(), "external"), tate(-1))
    r.name = "elliptic x elliptic (-1)"
    return r


def two_variable_sym() -> SL2Rep:
    """elliptic ⊠ Sym^2(elliptic): weight 3, rank 6, d = 2."""
    r = tensor(elliptic_variation(), sym_power(elliptic_variation(), 2), "external")
    r.name = "elliptic x Sym2(elliptic)"
    return r


def standard_suite() -> dict:
    e = elliptic_variation()
    suite = {"elliptic": e}
    for k in (2, 3, 4):
        suite[f"sym{k}"] = sym_power(e, k)
    suite["end_elliptic"] = end_elliptic()
    suite["tensor_2var"] = two_variable_tensor()
    suite["tensor_2var_sym"] = two_variable_sym()
    return suite


def random_rep(seed: int, max_rank: int = 12) -> SL2Rep:
    """Random Sym / tensor / dual / twist combination of elliptic blocks (d = 1)."""
    rng = random.Random(seed)
    e = elliptic_variation()
    blocks = [e, sym_power(e, 2), sym_power(e, 3)]
    while True:
        a = rng.choice(blocks)
        op = rng.choice(["sym", "tensor", "end", "dual", "twist"])
        if op == "sym":
            r = sym_power(e, rng.randint(1, 4))
        elif op == "tensor":
            b = rng.choice(blocks)
            r = tensor(a, b, "diagonal")
        elif op == "end":
            r = tensor(a, dual(a), "diagonal")
        elif op == "dual":
            r = dual(a)
        else:
            r = a
        if rng.random() < 0.6:
            k = -(r.weight // 2) if r.weight % 2 == 0 else rng.randint(-2, 2)
            r = twist(r, tate(k))
        if r.n <= max_rank:
            r.name = f"random[{seed}]:{r.name}"
            return r


# -- evaluation and checks -----------------------------------------------------


def sl2_orbit_eval(rep: SL2Rep, z) -> Filtration:
    """``exp(sum z_j h_j) F_lim``."""
    return evaluate_orbit(rep.to_orbit(), z)


def y_rescaling(rep: SL2Rep, y) -> Matrix:
    """``exp(-sum log(y_j) Y_j / 2)``, i.e. ``prod y_j^(-l_j/2)`` on the Y-piece l.

    Exact when every y_j is the square of a rational.
    """
    from .orbits import rescaling_operator

    inv = tuple(1.0 / t if isinstance(t, float) else 1 / Fraction(t) for t in y)
    return rescaling_operator(y_grading(rep), inv)


def hodge_norm_sq(rep_or_orbit, z, a) -> float:
    """Hodge norm squared of a at ``Phi(z)`` (float)."""
    orbit = rep_or_orbit.to_orbit() if isinstance(rep_or_orbit, SL2Rep) else rep_or_orbit
    F = evaluate_orbit(orbit, tuple(complex(x) for x in z))
    G = hodge_gram(HodgeStructure(orbit.lattice, F)).to_numpy()
    x = np.array([complex(v) for v in a])
    return float((x @ G @ x.conj()).real)


def norm_asymptotics_check(rep: SL2Rep, vectors, tau_grid, grading: Grading | None = None) -> dict:
    """Compare ``||a||^2`` at ``Phi(i tau)`` with ``sum tau^l |a^l|^2`` along a grid.

    ``|.|`` is the Hodge norm at ``Fsharp`` restricted to each piece of the
    grading (default: the Y grading).  Returns min/max ratio and the band
    constant ``c = max(max ratio, 1/min ratio)`` for each prefix of the grid.
    """
    A = y_grading(rep) if grading is None else grading
    orbit = rep.to_orbit()
    Hs = HodgeStructure(rep.lattice, rep.Fsharp)
    Gs = hodge_gram(Hs).to_numpy()
    prev = None
    for tau in tau_grid:
        tau = tuple(float(t) for t in tau)
        if any(t <= 0 for t in tau):
            raise SL2Error("tau must be positive")
        if prev is not None and any(t < p for t, p in zip(tau, prev)):
            raise SL2Error("grid must deepen monotonically")
        for a_, b_ in zip(tau, tau[1:]):
            if a_ < b_:
                raise SL2Error("grid not in the regime tau_1 >= tau_2 >= ...")
        prev = tau
    rows = []
    for tau in tau_grid:
        tau = tuple(float(t) for t in tau)
        z = tuple(1j * t for t in tau)
        F = evaluate_orbit(orbit, z)
        G = hodge_gram(HodgeStructure(orbit.lattice, F)).to_numpy()
        for idx, a in enumerate(vectors):
            x = np.array([complex(v) for v in a])
            lhs = float((x @ G @ x.conj()).real)
            rhs = 0.0
            for l, comp in A.components(a).items():
                c = np.array([complex(v) for v in comp])
                w = float(np.prod([t ** lj for t, lj in zip(tau, l)]))
                rhs += w * float((c @ Gs @ c.conj()).real)
            rows.append({"tau": list(tau), "vector": idx, "lhs": lhs, "rhs": rhs, "ratio": lhs / rhs})
    ratios = [r["ratio"] for r in rows]
    band = max(max(ratios), 1 / min(ratios))
    return {"rows": rows, "min_ratio": min(ratios), "max_ratio": max(ratios), "c": band}


def invariance_check(rep: SL2Rep) -> Report:
    """``A_R ∩ (∩_j W^j_0) ∩ F^0`` inside the joint kernel of all triples.

    W^j are the weight filtrations of the diagonal lowerings ``h_1 + ... + h_j``.
    For weight 2k the structure is Tate-twisted to weight 0 (F^k is used); odd
    weights have no weight-0 twist and the intersection is 0.
    """
    rep_ = Report("invariance")
    n = rep.n
    if rep.weight % 2:
        inter = Subspace.zero(n, RATIONAL)
    else:
        k = rep.weight // 2
        S = rep.Fsharp[k].promote(GAUSSIAN)
        for W in diagonal_weight_filtrations(rep):
            S = S & W[0].promote(GAUSSIAN)
        inter = S.real_points()
    ops = rep.lowers + rep.grades + rep.raises
    stacked = Matrix([row for A in ops for row in A.rows], RATIONAL) if ops else Matrix.zeros(0, n)
    inv = Subspace(nullspace(stacked), n, RATIONAL) if ops else Subspace.full(n)
    rep_.results["intersection"] = [list(map(str, b)) for b in inter.basis]
    rep_.results["invariants"] = [list(map(str, b)) for b in inv.basis]
    rep_.add("containment", inter <= inv, dim_intersection=inter.dim, dim_invariants=inv.dim)
    return rep_
