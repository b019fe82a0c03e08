"""Monodromy weight filtrations, relative weight filtrations and splitting gradings."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .linalg import (
    INCREASING,
    Filtration,
    Grading,
    LinAlgError,
    Matrix,
    Subspace,
    is_nilpotent,
    nilpotency_index,
    solve,
    unipotent_sqrt,
    vsub,
)
from .scalars import join_fields, promote


class WeightFiltrationError(ValueError):
    pass


class NonexistentError(WeightFiltrationError):
    """The requested relative weight filtration does not exist."""


class DistributivityError(ValueError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"filtrations do not generate a distributive lattice; witness {witness}")


def _wf_between(N: Matrix, T: Subspace, B: Subspace) -> dict:
    """W(N) on the quotient T/B, lifted to subspaces between B and T.

    Returns ``{index: Subspace}`` on ``[-k-1, k]`` with ``N^{k+1} T ⊂ B``.
    """
    k = 0
    P = N
    while not (T.image(P) <= B):
        P = P @ N
        k += 1
        if k > N.nrows + 1:
            raise WeightFiltrationError("map is not nilpotent on the quotient")
    out = {}
    while True:
        out[k] = T
        out[-k - 1] = B
        if k <= 0:
            break
        Nk = N ** k
        T, B = T & B.preimage(Nk), T.image(Nk) + B
        k -= 1
    # a step can repeat in the loop (when k hits -k); fill order is monotone
    return dict(sorted(out.items()))


def _check_wf(N: Matrix, W: Filtration, center: int = 0, T: Subspace | None = None, B: Subspace | None = None):
    """Problems with W as the weight filtration of N on T/B centred at ``center``."""
    n = N.nrows
    T = Subspace.full(n, W.field) if T is None else T
    B = Subspace.zero(n, W.field) if B is None else B
    probs = []
    for l in range(W.lo, W.hi + 1):
        if not (W[l].image(N) <= W[l - 2]):
            probs.append(f"N W_{l} not inside W_{l - 2}")
    lo, hi = W.lo - 1, W.hi + 1
    for l in range(1, max(hi - center, center - lo) + 1):
        top, top1 = W[center + l], W[center + l - 1]
        bot, bot1 = W[center - l], W[center - l - 1]
        dt = top.dim - top1.dim
        db = bot.dim - bot1.dim
        if dt != db:
            probs.append(f"dim Gr_{center + l} = {dt} but dim Gr_{center - l} = {db}")
            continue
        if dt == 0:
            continue
        Nl = N ** l
        if (top & bot1.preimage(Nl)) != top1:
            probs.append(f"N^{l} not injective on Gr_{center + l}")
    if W[W.lo] != B or W[W.hi] != T:
        probs.append("filtration does not run from B to T")
    return probs


def weight_filtration(N: Matrix) -> Filtration:
    """W(N): increasing, centred at 0, ``N W_l ⊂ W_{l-2}``, ``N^l: Gr_l ≅ Gr_{-l}``.

    Steps are listed on ``[-k-1, k]`` where ``N^{k+1} = 0``.
    """
    if N.nrows != N.ncols:
        raise WeightFiltrationError("N must be square")
    if not is_nilpotent(N):
        raise WeightFiltrationError("N is not nilpotent")
    n = N.nrows
    steps = _wf_between(N, Subspace.full(n, N.field), Subspace.zero(n, N.field))
    W = Filtration(steps, INCREASING, n, N.field)
    probs = _check_wf(N, W)
    if probs:
        raise WeightFiltrationError("internal check failed: " + "; ".join(probs))
    return W


def check_weight_filtration(N: Matrix, W: Filtration, center: int = 0) -> list:
    """Empty list iff W is the weight filtration of N (shifted to ``center``)."""
    return _check_wf(N.promote(W.field) if N.field != W.field else N, W, center,
                     Subspace.full(N.nrows, W.field), Subspace.zero(N.nrows, W.field))


def _common_field(Ns):
    return join_fields(*(N.field for N in Ns))


def cone_weight_filtration(Ns, seed: int = 0, samples: int = 3) -> Filtration:
    """W(C) for the open cone spanned by commuting nilpotent ``Ns``.

    Computed at ``sum N_j`` and compared against ``samples`` random positive
    rational combinations.
    """
    Ns = list(Ns)
    if not Ns:
        raise WeightFiltrationError("empty cone")
    f = _common_field(Ns)
    Ns = [N.promote(f) for N in Ns]
    for a, b in itertools.combinations(range(len(Ns)), 2):
        if not Ns[a].commutator(Ns[b]).is_zero():
            raise WeightFiltrationError(f"generators {a} and {b} do not commute")
    total = Ns[0]
    for N in Ns[1:]:
        total = total + N
    W = weight_filtration(total)
    rng = random.Random(seed)
    for _ in range(samples if len(Ns) > 1 else 0):
        lam = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in Ns]
        M = Ns[0].scale(lam[0])
        for c, N in zip(lam[1:], Ns[1:]):
            M = M + N.scale(c)
        if weight_filtration(M) != W:
            raise WeightFiltrationError(f"weight filtration depends on the cone point {[str(x) for x in lam]}")
    return W


def _adapted_lifts(N: Matrix, Wb: Subspace, U: Subspace, b: int):
    """Lifted W(N on Wb/U)[-b] plus an adapted basis ``[(vector, degree)]``."""
    raw = _wf_between(N, Wb, U)
    steps = {k + b: S for k, S in raw.items()}
    lo, hi = min(steps), max(steps)
    basis = []
    prev = U
    for l in range(lo, hi + 1):
        S = steps[l]
        for v in S.complement_basis(prev):
            basis.append((v, l))
        prev = S
    return steps, basis


def relative_weight_filtration(N: Matrix, W: Filtration) -> Filtration:
    """Relative weight filtration M of N with respect to W.

    Built one jump of W at a time.  On ``W_b`` the new filtration is
    ``M'_l + span(g_i + x_i : deg g_i <= l)`` with ``g_i`` adapted to
    ``W(N on Gr_b)[-b]`` and corrections ``x_i ∈ W_{b-1}`` found by solving the
    linear system ``N(g_i + x_i) ≡ sum a_ij (g_j + x_j)  mod M'_{deg g_i - 2}``.
    Raises :class:`NonexistentError` when that system has no solution.
    """
    f = join_fields(N.field, W.field)
    N, W = N.promote(f), W.promote(f)
    n = N.nrows
    for l in range(W.lo, W.hi + 1):
        if not (W[l].image(N) <= W[l]):
            raise WeightFiltrationError(f"N does not preserve W_{l}")
    if not is_nilpotent(N):
        raise WeightFiltrationError("N is not nilpotent")
    jumps = sorted(W.graded_dims())
    M: dict = {}
    U = Subspace.zero(n, f)

    def Mget(l):
        if not M:
            return Subspace.zero(n, f)
        if l < min(M):
            return Subspace.zero(n, f)
        if l > max(M):
            return U
        return M[l]

    for b in jumps:
        Wb = W[b]
        steps, basis = _adapted_lifts(N, Wb, U, b)
        if U.is_zero():
            M = dict(steps)
            U = Wb
            continue
        # coefficients a_ij and remainders w_i
        A = {}
        rem = []
        Ub = list(U.basis)
        for i, (g, l) in enumerate(basis):
            lower = [j for j, (_, lj) in enumerate(basis) if lj <= l - 2]
            cols = [basis[j][0] for j in lower] + Ub
            Ng = N.apply(g)
            if cols:
                sol = solve(Matrix.from_columns(cols, f), Ng)
                if sol is None:
                    raise WeightFiltrationError("induced map does not lower the graded filtration")
            else:
                sol = ()
            A[i] = {j: sol[t] for t, j in enumerate(lower) if sol[t]}
            w = Ng
            for j, c in A[i].items():
                w = vsub(w, tuple(c * x for x in basis[j][0]))
            rem.append(w)
        # unknowns c[i][t]: x_i = sum_t c[i][t] u_t
        m = len(basis)
        du = len(Ub)
        NU = [N.apply(u) for u in Ub]
        rows, rhs = [], []
        zero = promote(0, f)
        for i, (g, l) in enumerate(basis):
            ann = Mget(l - 2).annihilator()
            for a in ann.basis:
                row = [zero] * (m * du)
                aN = [sum((ai * x for ai, x in zip(a, nu)), zero) for nu in NU]
                au = [sum((ai * x for ai, x in zip(a, u)), zero) for u in Ub]
                for t in range(du):
                    row[i * du + t] += aN[t]
                for j, c in A[i].items():
                    for t in range(du):
                        row[j * du + t] -= c * au[t]
                rows.append(row)
                rhs.append(-sum((ai * x for ai, x in zip(a, rem[i])), zero))
        if rows:
            sol = solve(Matrix(rows, f), rhs)
            if sol is None:
                raise NonexistentError(f"no relative weight filtration: lifting fails at W_{b}")
        else:
            sol = [zero] * (m * du)
        lifts = []
        for i, (g, l) in enumerate(basis):
            x = list(g)
            for t in range(du):
                c = sol[i * du + t]
                if c:
                    x = [p + c * q for p, q in zip(x, Ub[t])]
            lifts.append((tuple(x), l))
        lo = min(min(M), min(steps))
        hi = max(max(M), max(steps))
        newM = {}
        for l in range(lo, hi + 1):
            vecs = [v for v, lv in lifts if lv <= l]
            newM[l] = Mget(l) + Subspace(vecs, n, f) if vecs else Mget(l)
        M = newM
        U = Wb
    out = Filtration(M, INCREASING, n, f)
    probs = check_relative(N, W, out)
    if probs:
        raise NonexistentError("relative weight filtration does not exist: " + probs[0])
    return out


def check_relative(N: Matrix, W: Filtration, M: Filtration) -> list:
    """Problems with M as the relative weight filtration of N with respect to W."""
    probs = []
    for l in range(M.lo, M.hi + 1):
        if not (M[l].image(N) <= M[l - 2]):
            probs.append(f"N M_{l} not inside M_{l - 2}")
    for k in sorted(W.graded_dims()):
        raw = _wf_between(N, W[k], W[k - 1])
        ind = {l: (M[l] & W[k]) + W[k - 1] for l in range(M.lo - 1, M.hi + 2)}
        lo = min(min(raw) + k, M.lo) - 1
        hi = max(max(raw) + k, M.hi) + 1
        for l in range(lo, hi + 1):
            want = raw.get(l - k, W[k - 1] if l - k < min(raw) else W[k])
            got = ind.get(l, W[k - 1] if l < M.lo else W[k])
            if want != got:
                probs.append(f"induced filtration on Gr^W_{k} differs at index {l}")
                break
    return probs


# -- splitting gradings --------------------------------------------------------


def _distributivity_witness(Ws):
    steps = []
    for j, W in enumerate(Ws):
        for l in range(W.lo, W.hi + 1):
            S = W[l]
            if not S.is_zero() and not S.is_full():
                steps.append((j, l, S))
    for (a, x), (b, y), (c, z) in itertools.permutations(
        [((j, l), S) for j, l, S in steps], 3
    ):
        if len({a[0], b[0], c[0]}) < 3:
            continue
        lhs = ((x + y) & z).dim
        rhs = (x & z).dim + (y & z).dim - (x & y & z).dim
        if lhs != rhs:
            return {"X": list(a), "Y": list(b), "Z": list(c), "lhs": lhs, "rhs": rhs}
    return None


def splitting_grading(Ws) -> Grading:
    """Rational Z^d grading A with ``W^j_w = ⊕_{l_1+...+l_j <= w} A^l`` for all j.

    Works in partial-sum coordinates ``m_j = l_1 + ... + l_j``:
    ``X_m = ∩_j W^j_{m_j}`` and ``A^l`` is a greedy complement of
    ``sum_j X_{m - e_j}`` in ``X_m``.
    """
    Ws = list(Ws)
    if not Ws:
        raise ValueError("no filtrations")
    f = join_fields(*(W.field for W in Ws))
    Ws = [W.promote(f) for W in Ws]
    n = Ws[0].n
    if len(Ws) >= 3:
        wit = _distributivity_witness(Ws)
        if wit:
            raise DistributivityError(wit)
    ranges = [range(W.lo, W.hi + 2) for W in Ws]
    cache = {}

    def X(m):
        if m not in cache:
            S = Subspace.full(n, f)
            for W, mj in zip(Ws, m):
                S = S & W[mj]
            cache[m] = S
        return cache[m]

    pieces = {}
    for m in itertools.product(*ranges):
        Xm = X(m)
        if Xm.is_zero():
            continue
        below = Subspace.zero(n, f)
        for j in range(len(m)):
            mm = m[:j] + (m[j] - 1,) + m[j + 1:]
            below = below + X(mm)
        comp = Xm.complement_basis(below)
        if comp:
            l = tuple(m[j] - (m[j - 1] if j else 0) for j in range(len(m)))
            pieces[l] = Subspace(comp, n, f)
    try:
        A = Grading(pieces, len(Ws), n, f)
    except LinAlgError as e:
        raise DistributivityError({"reason": str(e)}) from None
    bad = splitting_defects(A, Ws)
    if bad:
        raise DistributivityError({"splitting_fails": bad[0]})
    return A


def splitting_defects(A: Grading, Ws) -> list:
    out = []
    for j, W in enumerate(Ws):
        for w in range(W.lo - 1, W.hi + 2):
            S = Subspace.zero(A.n, A.field)
            for l in A.indices():
                if sum(l[: j + 1]) <= w:
                    S = S + A[l]
            if S != W[w].promote(A.field):
                out.append((j, w))
    return out


def q_adjoint(X: Matrix, Q: Matrix) -> Matrix:
    """``X*`` with ``Q(X* u, v) = Q(u, X v)`` for ``Q(u, v) = u^T Q v``."""
    from .linalg import inverse

    return (Q @ X @ inverse(Q)).T


def _lowers(g: Matrix, A: Grading) -> bool:
    """(g - 1) A^l ⊂ ⊕ A^m over m != l with all partial sums of m <= those of l."""
    n = A.n
    D = g - Matrix.identity(n, g.field)
    for l, S in A.pieces.items():
        for v in S.basis:
            for m in A.components(D.apply(v)):
                if m == l:
                    return False
                if any(sum(m[: j + 1]) > sum(l[: j + 1]) for j in range(len(l))):
                    return False
    return True


def polarization_compatible_grading(A: Grading, Q: Matrix, return_g: bool = False):
    """``g^{1/2} A`` where ``A' = g A`` is the grading transported through Q.

    ``A'^l = {v : Q(v, A^m) = 0 for m != -l}``; projectors of A' are the
    Q-adjoints of those of A with index negated.
    """
    f = join_fields(A.field, Q.field)
    A = A.promote(f)
    Q = Q.promote(f)
    n = A.n
    g = Matrix.zeros(n, n, f)
    for l in A.indices():
        neg = tuple(-x for x in l)
        if neg not in A.pieces:
            raise ValueError(f"grading has no piece opposite to {l}; Q cannot pair it")
        Pd = q_adjoint(A.projector(neg), Q)
        g = g + Pd @ A.projector(l)
    if not _lowers(g, A):
        raise ValueError("comparison map is not lowering; A does not split the filtrations")
    h = unipotent_sqrt(g)
    B = A.apply(h)
    bad = orthogonality_defects(B, Q)
    if bad:
        raise ValueError(f"result not compatible with Q at {bad[0]}")
    return (B, g) if return_g else B


def orthogonality_defects(A: Grading, Q: Matrix) -> list:
    """Pairs (l, m) with l + m != 0 and Q(A^l, A^m) != 0."""
    Q = Q.promote(A.field)
    out = []
    for l in A.indices():
        for m in A.indices():
            if all(a + b == 0 for a, b in zip(l, m)):
                continue
            for u in A[l].basis:
                Qu = Q.T.apply(u)
                if any(sum(x * y for x, y in zip(Qu, v)) for v in A[m].basis):
                    out.append((l, m))
                    break
    return out


def position(u, A: Grading) -> tuple:
    """Lexicographically largest l with a nonzero A^l-component of u."""
    comps = A.components(u)
    if not comps:
        raise ValueError("position of the zero vector")
    return max(comps)


__all__ = [
    "DistributivityError",
    "NonexistentError",
    "WeightFiltrationError",
    "check_relative",
    "check_weight_filtration",
    "cone_weight_filtration",
    "nilpotency_index",
    "orthogonality_defects",
    "polarization_compatible_grading",
    "position",
    "q_adjoint",
    "relative_weight_filtration",
    "splitting_defects",
    "splitting_grading",
    "weight_filtration",
]
