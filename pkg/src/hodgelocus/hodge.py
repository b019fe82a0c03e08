"""Polarized pure Hodge structures, mixed Hodge structures and the Deligne bigrading."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    DECREASING,
    INCREASING,
    Filtration,
    Grading,
    LinAlgError,
    Matrix,
    Subspace,
    det,
    inverse,
    leading_minors,
    vconj,
)
from .report import Report
from .scalars import COMPLEX, GAUSSIAN, RATIONAL, i_power, join_fields


class HodgeError(ValueError):
    pass


class PurityError(HodgeError):
    def __init__(self, p, detail):
        self.p = p
        self.detail = detail
        super().__init__(f"purity fails at p={p}: {detail}")


@dataclass(frozen=True)
class PolarizedLattice:
    """Lattice Z^rank with bilinear form ``Q(u, v) = u^T Q v`` of weight ``weight``.

    Construction does not validate; see :meth:`problems` and :func:`is_polarization`.
    """

    Q: Matrix
    weight: int

    @property
    def rank(self) -> int:
        return self.Q.nrows

    def problems(self) -> list:
        out = []
        Q = self.Q
        if Q.nrows != Q.ncols:
            return ["Q is not square"]
        if not Q.is_integral():
            out.append("Q has non-integral entries")
        sign = -1 if self.weight % 2 else 1
        if Q.T != Q.scale(sign):
            out.append(f"Q is not {'anti' if sign < 0 else ''}symmetric as required by weight {self.weight}")
        if Q.field != COMPLEX and not det(Q):
            out.append("Q is degenerate")
        return out

    def validate(self) -> "PolarizedLattice":
        p = self.problems()
        if p:
            raise HodgeError(p[0])
        return self

    def form(self, u, v):
        """Bilinear (not sesquilinear) ``Q(u, v)``."""
        Q = self.Q
        f = join_fields(Q.field, *(_field(x) for x in (u, v)))
        Qf = Q.promote(f)
        return _bilinear(Qf, u, v)


def _field(vecx):
    from .scalars import field_of

    return join_fields(*(field_of(x) for x in vecx)) if vecx else RATIONAL


def _bilinear(Q: Matrix, u, v):
    Qv = Q.apply(v)
    acc = 0 * Qv[0] if Qv else 0
    for a, b in zip(u, Qv):
        if a:
            acc = acc + a * b
    return acc


def _hodge_field(field: str) -> str:
    return GAUSSIAN if field == RATIONAL else field


class HodgeStructure:
    """A decreasing filtration F on ``lattice ⊗ C`` of weight ``lattice.weight``."""

    def __init__(self, lattice: PolarizedLattice, F: Filtration):
        if F.direction != DECREASING:
            raise HodgeError("Hodge filtration must be decreasing")
        if F.n != lattice.rank:
            raise HodgeError("filtration and lattice have different ranks")
        self.lattice = lattice
        self.F = F.promote(_hodge_field(F.field))
        self.field = self.F.field
        self._decomp = None

    @property
    def weight(self) -> int:
        return self.lattice.weight

    @property
    def n(self) -> int:
        return self.lattice.rank

    @property
    def Q(self) -> Matrix:
        return self.lattice.Q.promote(self.field)

    def decomposition(self) -> Grading:
        if self._decomp is None:
            self._decomp = hodge_decomposition(self.F, self.weight)
        return self._decomp


def purity_defects(F: Filtration, w: int) -> list:
    """``[(p, dim F^p, dim conj F^{w+1-p}, dim of their intersection)]`` where purity fails."""
    n = F.n
    Fc = F.conjugate()
    out = []
    for p in range(min(F.lo, w + 1 - F.hi) - 1, max(F.hi, w + 1 - F.lo) + 2):
        A, B = F[p], Fc[w + 1 - p]
        inter = (A & B).dim
        if inter or A.dim + B.dim != n:
            out.append((p, A.dim, B.dim, inter))
    return out


def is_pure(F: Filtration, w: int) -> bool:
    return not purity_defects(F.promote(_hodge_field(F.field)), w)


def hodge_decomposition(F: Filtration, w: int) -> Grading:
    """``V^{p,q} = F^p ∩ conj F^q`` for ``p + q = w``; keys are ``(p, q)``."""
    F = F.promote(_hodge_field(F.field))
    bad = purity_defects(F, w)
    if bad:
        p, a, b, c = bad[0]
        raise PurityError(p, {"dim_F^p": a, "dim_conj_F^(w+1-p)": b, "dim_intersection": c})
    Fc = F.conjugate()
    pieces = {}
    for p in range(min(F.lo, w - F.hi) - 1, max(F.hi, w - F.lo) + 2):
        S = F[p] & Fc[w - p]
        if not S.is_zero():
            pieces[(p, w - p)] = S
    return Grading(pieces, 2, F.n, F.field)


def weil_operator(H: HodgeStructure) -> Matrix:
    """``C = sum i^{p-q} pi_{p,q}``."""
    return H.decomposition().operator(lambda k: i_power(k[0] - k[1]))


def hodge_gram(H: HodgeStructure) -> Matrix:
    """Gram matrix ``G`` with ``h(u, v) = u^T G conj(v)``, i.e. ``C^T Q``."""
    C = weil_operator(H)
    return C.T @ H.Q


def hodge_form(H: HodgeStructure, u, v):
    """``h(u, v) = Q(Cu, conj v)``."""
    C = weil_operator(H)
    Cu = C.apply(u)
    return _bilinear(H.Q, Cu, _conjv(v, H.field))


def _conjv(v, field):
    from .scalars import promote

    return vconj(tuple(promote(x, field) for x in v))


def _is_positive_hermitian(G: Matrix, tol=None) -> tuple:
    """Returns ``(hermitian, positive, witness)``."""
    if G.field == COMPLEX:
        A = G.to_numpy()
        scale = max(1.0, float(np.abs(A).max()))
        t = (DEFAULT_TOL if tol is None else tol) * scale
        herm = bool(np.abs(A - A.conj().T).max() <= t)
        ev = np.linalg.eigvalsh((A + A.conj().T) / 2)
        return herm, bool(ev.min() > t), {"min_eigenvalue": float(ev.min())}
    herm = G == G.H
    if not herm:
        return False, False, {}
    minors = leading_minors(G)
    for k, m in enumerate(minors, 1):
        re = m.real if hasattr(m, "real") else m
        if (hasattr(m, "is_real") and not m.is_real()) or not re > 0:
            return True, False, {"failing_minor": k, "value": str(m)}
    return True, True, {}


def is_polarization(H: HodgeStructure, require_integral: bool = True, tol=None) -> Report:
    rep = Report("is_polarization")
    lat = H.lattice
    Q = lat.Q
    if require_integral:
        rep.add("integral", Q.is_integral())
    sign = -1 if H.weight % 2 else 1
    rep.add("symmetry", Q.T == Q.scale(sign), expected="antisymmetric" if sign < 0 else "symmetric")
    if Q.field == COMPLEX:
        nondeg = abs(np.linalg.det(Q.to_numpy())) > (DEFAULT_TOL if tol is None else tol)
    else:
        nondeg = bool(det(Q))
    rep.add("nondegenerate", nondeg)
    bad = purity_defects(H.F, H.weight)
    if not rep.add("purity", not bad, defects=[list(b) for b in bad]):
        return rep
    G = hodge_gram(H)
    dec = H.decomposition()
    keys = dec.indices()
    orth = True
    witness = None
    for a in keys:
        for b in keys:
            if a >= b:
                continue
            for u in dec[a].basis:
                for v in dec[b].basis:
                    x = _bilinear(G, u, vconj(v))
                    if (abs(x) > (DEFAULT_TOL if tol is None else tol)) if G.field == COMPLEX else bool(x):
                        orth = False
                        witness = {"pieces": [list(a), list(b)]}
    rep.add("orthogonal_pieces", orth, **(witness or {}))
    herm, pos, wit = _is_positive_hermitian(G, tol)
    rep.add("hermitian", herm)
    rep.add("positive", pos, **wit)
    return rep


# -- mixed Hodge structures ----------------------------------------------------


@dataclass
class MixedHodgeStructure:
    W: Filtration
    F: Filtration

    def __post_init__(self):
        if self.W.direction != INCREASING or self.F.direction != DECREASING:
            raise HodgeError("MHS needs increasing W and decreasing F")
        f = _hodge_field(join_fields(self.W.field, self.F.field))
        self.W = self.W.promote(f)
        self.F = self.F.promote(f)

    @property
    def field(self):
        return self.F.field

    def weights(self) -> list:
        return sorted(self.W.graded_dims())


def _common(W: Filtration, F: Filtration):
    f = _hodge_field(join_fields(W.field, F.field))
    return W.promote(f), F.promote(f)


def graded_hodge_dims(W: Filtration, F: Filtration, k: int) -> dict:
    """``{p: dim F^p Gr^W_k}``."""
    W, F = _common(W, F)
    out = {}
    for p in range(F.lo - 1, F.hi + 2):
        out[p] = ((F[p] & W[k]) + W[k - 1]).dim - W[k - 1].dim
    return out


def is_mhs(W: Filtration, F: Filtration) -> Report:
    """Checks that F induces a pure Hodge structure of weight k on every ``Gr^W_k``.

    Done without forming quotients: for each p the images of ``F^p ∩ W_k`` and
    ``conj F^{k+1-p} ∩ W_k`` in ``W_k / W_{k-1}`` must be complementary.
    """
    rep = Report("is_mhs")
    if W.direction != INCREASING or F.direction != DECREASING:
        rep.add("directions", False)
        return rep
    if not W.is_rational():
        rep.add("W_rational", False)
        return rep
    W, F = _common(W, F)
    Fc = F.conjugate()
    per_k = {}
    for k in sorted(W.graded_dims()):
        Wk, Wk1 = W[k], W[k - 1]
        ok = True
        bad = None
        for p in range(min(F.lo, k + 1 - F.hi) - 1, max(F.hi, k + 1 - F.lo) + 2):
            A = (F[p] & Wk) + Wk1
            B = (Fc[k + 1 - p] & Wk) + Wk1
            if (A + B) != Wk or (A & B) != Wk1:
                ok = False
                bad = {"p": p, "dim_Gr": Wk.dim - Wk1.dim, "dim_F": A.dim - Wk1.dim, "dim_conjF": B.dim - Wk1.dim}
                break
        fd = graded_hodge_dims(W, F, k)
        h = {f"{p},{k - p}": fd[p] - fd.get(p + 1, 0) for p in sorted(fd) if fd[p] - fd.get(p + 1, 0)}
        per_k[k] = {"pure": ok, "hodge_numbers": h}
        rep.add(f"Gr_{k}_pure", ok, **(bad or {}))
    rep.results["graded"] = per_k
    return rep


def deligne_bigrading(W: Filtration, F: Filtration) -> Grading:
    """``I^{p,q} = F^p ∩ W_{p+q} ∩ (conj F^q ∩ W_{p+q} + sum_{j>=1} conj F^{q-j} ∩ W_{p+q-j-1})``.

    Keys are ``(p, q)``.  Both splitting identities are verified before returning.
    """
    W, F = _common(W, F)
    Fc = F.conjugate()
    n = W.n
    weights = sorted(W.graded_dims())
    spread = (weights[-1] - weights[0] + 2) if weights else 1
    pieces = {}
    for k in weights:
        for p in range(min(F.lo, k - F.hi) - 1, max(F.hi, k - F.lo) + 2):
            q = k - p
            left = F[p] & W[k]
            if left.is_zero():
                continue
            right = Fc[q] & W[k]
            for j in range(1, spread + 1):
                right = right + (Fc[q - j] & W[k - j - 1])
            S = left & right
            if not S.is_zero():
                pieces[(p, q)] = S
    try:
        I = Grading(pieces, 2, n, W.field)
    except LinAlgError as e:
        raise HodgeError(f"bigrading does not split V ({e}); input is not a mixed Hodge structure") from None
    bad = bigrading_splitting_defects(I, W, F)
    if bad:
        raise HodgeError(f"bigrading fails to split: {bad[0]}")
    return I


def bigrading_splitting_defects(I: Grading, W: Filtration, F: Filtration) -> list:
    W, F = _common(W, F)
    n = W.n
    out = []
    keys = I.indices()
    for l in range(W.lo - 1, W.hi + 2):
        S = Subspace.zero(n, I.field)
        for (p, q) in keys:
            if p + q <= l:
                S = S + I[(p, q)]
        if S != W[l]:
            out.append(("W", l))
    for p0 in range(F.lo - 1, F.hi + 2):
        S = Subspace.zero(n, I.field)
        for (p, q) in keys:
            if p >= p0:
                S = S + I[(p, q)]
        if S != F[p0]:
            out.append(("F", p0))
    return out


def bigrading_component(I: Grading, X: Matrix, shift) -> Matrix:
    """Component of an endomorphism X of bidegree ``shift = (a, b)`` (or ``a`` for the p-degree only).

    ``X_{a,b} = sum pi_{p+a,q+b} X pi_{p,q}``.  With an int ``shift`` the q-shift is summed over.
    """
    X = X.promote(join_fields(X.field, I.field))
    keys = I.indices()
    proj = {k: I.projector(k).promote(X.field) for k in keys}
    out = Matrix.zeros(X.nrows, X.ncols, X.field)
    for k in keys:
        for k2 in keys:
            if isinstance(shift, int):
                if k2[0] - k[0] != shift:
                    continue
            elif (k2[0] - k[0], k2[1] - k[1]) != tuple(shift):
                continue
            out = out + proj[k2] @ X @ proj[k]
    return out


def p_degrees(I: Grading, X: Matrix) -> dict:
    """``{a: X_a}`` decomposition of X by p-degree (nonzero parts only)."""
    ps = sorted({k[0] for k in I.indices()})
    out = {}
    for a in range(ps[0] - ps[-1], ps[-1] - ps[0] + 1):
        C = bigrading_component(I, X, a)
        if not C.is_zero():
            out[a] = C
    return out


def intersection_dims(W: Filtration, F: Filtration) -> dict:
    """``{(w, p): dim W_w ∩ F^p}`` over the joint index range."""
    W, F = _common(W, F)
    return {
        (w, p): (W[w] & F[p]).dim for w in range(W.lo - 1, W.hi + 2) for p in range(F.lo - 1, F.hi + 2)
    }


def _bifiltration_basis(W: Filtration, F: Filtration, ws, ps):
    """Basis adapted to both W and F, listed stratum by stratum.

    For each ``(w, p)`` take a greedy complement of
    ``W_{w-1} ∩ F^p + W_w ∩ F^{p+1}`` inside ``W_w ∩ F^p``.
    """
    cols = []
    for w in ws:
        for p in ps:
            big = W[w] & F[p]
            small = (W[w - 1] & F[p]) + (W[w] & F[p + 1])
            cols.append(big.complement_basis(small))
    return cols


def align_mhs(W: Filtration, F: Filtration, F2: Filtration) -> Matrix:
    """Invertible g with ``gW = W`` and ``gF = F2``; identity when ``F2 = F``.

    g sends the adapted basis of (W, F) to the adapted basis of (W, F2), vector
    by vector in echelon order.
    """
    f = _hodge_field(join_fields(W.field, F.field, F2.field))
    W, F, F2 = W.promote(f), F.promote(f), F2.promote(f)
    ws = range(min(W.lo, 0) - 1, W.hi + 2)
    lo = min(F.lo, F2.lo) - 1
    hi = max(F.hi, F2.hi) + 1
    ps = range(lo, hi + 1)
    mism = [
        (w, p)
        for w in ws
        for p in ps
        if (W[w] & F[p]).dim != (W[w] & F2[p]).dim
    ]
    if mism:
        w, p = mism[0]
        raise HodgeError(
            f"dimension pattern differs at (w={w}, p={p}): {(W[w] & F[p]).dim} vs {(W[w] & F2[p]).dim}"
        )
    B1 = [v for c in _bifiltration_basis(W, F, ws, ps) for v in c]
    B2 = [v for c in _bifiltration_basis(W, F2, ws, ps) for v in c]
    if len(B1) != W.n or len(B2) != W.n:
        raise HodgeError("adapted bases do not span V")
    M1 = Matrix.from_columns(B1, f)
    M2 = Matrix.from_columns(B2, f)
    g = M2 @ inverse(M1)
    return g


def angle_sine(v, S: Subspace, metric: Matrix | None = None) -> float:
    """Sine of the angle between v and S for ``<u, w> = u^T G conj(w)``.

    ``metric=None`` means the Euclidean metric.
    """
    x = np.array([complex(a) for a in v], dtype=complex)
    n = len(x)
    if not np.any(x):
        raise HodgeError("angle_sine of the zero vector")
    G = np.eye(n, dtype=complex) if metric is None else (metric.to_numpy() if isinstance(metric, Matrix) else np.asarray(metric, dtype=complex))
    L = _metric_factor(G)
    y = L.conj().T @ x
    if S.is_zero():
        return 1.0
    B = np.array([[complex(a) for a in b] for b in S.basis], dtype=complex).T
    Qb, _ = np.linalg.qr(L.conj().T @ B)
    r = y - Qb @ (Qb.conj().T @ y)
    s = float(np.linalg.norm(r) / np.linalg.norm(y))
    return min(1.0, s)


def _metric_factor(G) -> np.ndarray:
    """L with ``conj(G) = L L^H`` so that ``<u, w> = (L^H w)^H (L^H u)``."""
    A = np.asarray(G, dtype=complex).conj()
    A = (A + A.conj().T) / 2
    try:
        return np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        raise HodgeError("metric is not positive definite") from None


def subspace_sine(S1: Subspace, S2: Subspace, metric=None) -> float:
    """Sine of the largest principal angle between equal-dimensional subspaces."""
    if S1.dim != S2.dim:
        raise HodgeError("principal angles need subspaces of equal dimension")
    if S1.dim == 0:
        return 0.0
    n = S1.n
    G = np.eye(n, dtype=complex) if metric is None else (metric.to_numpy() if isinstance(metric, Matrix) else np.asarray(metric, dtype=complex))
    L = _metric_factor(G)
    B1 = L.conj().T @ np.array([[complex(a) for a in b] for b in S1.basis], dtype=complex).T
    B2 = L.conj().T @ np.array([[complex(a) for a in b] for b in S2.basis], dtype=complex).T
    Q1, _ = np.linalg.qr(B1)
    Q2, _ = np.linalg.qr(B2)
    R = Q2 - Q1 @ (Q1.conj().T @ Q2)
    return float(min(1.0, np.linalg.norm(R, 2)))


def perturbation_sine(P, D, metric=None) -> float:
    """Largest principal-angle sine between span(P) and span(P + D).

    ``P`` and ``D`` are numpy column matrices; the component of ``P + D``
    orthogonal to span(P) is computed from ``D`` alone, so tiny perturbations
    are resolved without cancellation.
    """
    P = np.asarray(P, dtype=complex)
    D = np.asarray(D, dtype=complex)
    n = P.shape[0]
    G = np.eye(n, dtype=complex) if metric is None else (metric.to_numpy() if isinstance(metric, Matrix) else np.asarray(metric, dtype=complex))
    L = _metric_factor(G)
    Pt = L.conj().T @ P
    Dt = L.conj().T @ D
    Q1, _ = np.linalg.qr(Pt)
    _, R2 = np.linalg.qr(Pt + Dt)
    perp = Dt - Q1 @ (Q1.conj().T @ Dt)
    M = perp @ np.linalg.inv(R2)
    return float(min(1.0, np.linalg.norm(M, 2)))
