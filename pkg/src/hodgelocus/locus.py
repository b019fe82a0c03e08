"""Hodge loci of integral classes: equations, exact solving, enumeration, nearby points."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .hodge import HodgeStructure, angle_sine, hodge_gram
from .linalg import (
    Matrix,
    Subspace,
    exp_nilpotent,
    inverse,
    leading_minors,
    lcm_denominator,
    nullspace,
    rref,
)
from .orbits import (
    NilpotentOrbit,
    VariationSample,
    evaluate_orbit,
    evaluate_variation,
    gamma_minus1,
    limiting_bigrading,
    limiting_mhs,
    limiting_weight,
)
from .report import Report
from .scalars import COMPLEX, GAUSSIAN, RATIONAL, GaussianRational, field_of, join_fields, promote

SNAP_TOL = 1e-9
# exp(-alpha y) drops below what a double-precision angle can resolve once
# alpha y > ~23; near-class thresholds are floored here
NEAR_FLOOR = 1e-10


class LocusError(ValueError):
    pass


def _as_orbit(obj):
    if isinstance(obj, VariationSample):
        return obj.orbit, obj
    return obj, None


def _q(Q: Matrix, u, v):
    Qv = Q.apply(v)
    return sum((a * b for a, b in zip(u, Qv)), Fraction(0))


# -- equations -----------------------------------------------------------------


@dataclass
class LocusSystem:
    """Equations ``sum_j nu_j^(a) z_j + gamma^(a)(s) = 0``, one per coordinate a of V.

    ``linear[a]`` is the rational vector ``(nu_1^(a), ..., nu_r^(a))`` and
    ``series[a]`` maps a multi-degree to the coefficient of ``s^degree``.
    """

    v: tuple
    linear: list
    series: list
    r: int

    def is_trivial(self) -> bool:
        return not any(any(row) for row in self.linear) and not any(self.series)

    def degrees(self) -> list:
        return sorted({d for row in self.series for d in row})

    def reduced(self) -> list:
        """Independent equations as ``(nu, {degree: coeff})`` pairs (echelon form)."""
        degs = self.degrees()
        f = join_fields(
            RATIONAL, *(field_of(c) for row in self.series for c in row.values())
        )
        rows = []
        for nu, ser in zip(self.linear, self.series):
            rows.append([promote(x, f) for x in nu] + [promote(ser.get(d, 0), f) for d in degs])
        red, _ = rref(rows, f) if rows else ((), ())
        return [(tuple(row[: self.r]), {d: c for d, c in zip(degs, row[self.r:]) if c}) for row in red]

    def solution_space(self) -> Subspace:
        """Solutions in z when the series part vanishes (rational subspace of Q^r)."""
        if any(self.series):
            raise LocusError("series part present; the locus is not linear")
        M = Matrix(self.linear, RATIONAL) if self.linear else Matrix.zeros(0, self.r)
        return Subspace(nullspace(M), self.r, RATIONAL) if self.r else Subspace.zero(0)


def _in_v00(orbit: NilpotentOrbit, v, I=None) -> bool:
    if I is None:
        I = limiting_bigrading(orbit)
    return I[(0, 0)].contains(v)


def locus_equations(obj, v) -> LocusSystem:
    """Locus of v near the degeneration: ``(sum z_j N_j + Gamma_{-1}(s)) v = 0``.

    v must lie in the (0, 0) piece of the limiting Deligne bigrading.
    """
    orbit, sample = _as_orbit(obj)
    v = tuple(Fraction(x) for x in v)
    I = limiting_bigrading(orbit)
    if not _in_v00(orbit, v, I):
        raise LocusError("class is not of type (0,0) for the limiting bigrading; re-centre first")
    Nv = [N.apply(v) for N in orbit.Ns]
    n = orbit.n
    linear = [tuple(Nv[j][a] for j in range(orbit.r)) for a in range(n)]
    series = [dict() for _ in range(n)]
    if sample is not None:
        for deg, G in gamma_minus1(sample, I).items():
            Gv = G.apply(v)
            for a in range(n):
                c = Gv[a]
                if c:
                    if isinstance(c, GaussianRational) and c.is_real():
                        c = c.real
                    series[a][deg] = c
    return LocusSystem(v, linear, series, orbit.r)


@dataclass
class LinearLocus:
    """``{z in C^r : z in span_C(basis)}`` with a rational basis."""

    basis: list
    r: int

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, z) -> bool:
        f = join_fields(GAUSSIAN, *(field_of(x) for x in z))
        S = Subspace(self.basis, self.r, f) if self.basis else Subspace.zero(self.r, f)
        return S.contains(z)

    def is_translation_invariant(self, m) -> bool:
        return self.contains(tuple(Fraction(x) for x in m))

    def sample_point(self):
        """A point with positive-imaginary coordinates where possible."""
        z = [GaussianRational(0)] * self.r
        for k, b in enumerate(self.basis):
            c = GaussianRational(Fraction(1, k + 2), 1)
            z = [a + c * x for a, x in zip(z, b)]
        return tuple(z)


def _coefficient_matrix(orbit: NilpotentOrbit, v) -> Matrix:
    cols = [N.apply(v) for N in orbit.Ns]
    return Matrix.from_columns(cols, RATIONAL) if cols else Matrix.zeros(orbit.n, 0)


def orbit_locus_solve(orbit: NilpotentOrbit, v, verify: bool = True) -> LinearLocus:
    """``{z : sum z_j N_j v = 0}``, checked by exact membership at a sample point."""
    v = tuple(Fraction(x) for x in v)
    M = _coefficient_matrix(orbit, v)
    basis = nullspace(M) if orbit.r else []
    L = LinearLocus([tuple(b) for b in Subspace(basis, orbit.r, RATIONAL).basis] if basis else [], orbit.r)
    if verify:
        W = limiting_weight(orbit)
        if not W[0].contains(v):
            raise LocusError("class is not in W_0 of the limiting weight filtration")
        z = L.sample_point()
        F = evaluate_orbit(orbit, z)
        if not F[0].contains(v):
            raise LocusError("class is not in F^0 along its solution set; it is not centred")
    return L


def monodromy_fixes(orbit: NilpotentOrbit, v, m, detail: bool = False):
    """Whether ``sum m_i N_i v = 0``; with ``detail`` also compares ``exp(sum m_i N_i) v = v``."""
    v = tuple(Fraction(x) for x in v)
    n = orbit.n
    X = Matrix.zeros(n, n)
    for mi, N in zip(m, orbit.Ns):
        X = X + N.scale(mi)
    lin = not any(X.apply(v))
    if not detail:
        return lin
    grp = exp_nilpotent(X).apply(v) == v
    return lin, grp


# -- lattices and enumeration --------------------------------------------------


def integer_kernel(rows, n: int) -> list:
    """Z-basis of ``{x in Z^n : A x = 0}`` for an integer matrix A (list of rows)."""
    A = [list(map(int, r)) for r in rows]
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]  # columns of U are U[.][j]
    r = 0
    for row in range(len(A)):
        if r >= n:
            break
        while True:
            nz = [j for j in range(r, n) if A[row][j]]
            if not nz:
                break
            piv = min(nz, key=lambda j: abs(A[row][j]))
            _swap_cols(A, U, r, piv)
            done = True
            for j in range(r + 1, n):
                if A[row][j]:
                    q = A[row][j] // A[row][r]
                    _sub_col(A, U, j, r, q)
                    if A[row][j]:
                        done = False
            if done:
                r += 1
                break
    return [tuple(U[i][j] for i in range(n)) for j in range(r, n)]


def _swap_cols(A, U, a, b):
    if a == b:
        return
    for M in (A, U):
        for row in M:
            row[a], row[b] = row[b], row[a]


def _sub_col(A, U, j, r, q):
    for M in (A, U):
        for row in M:
            row[j] -= q * row[r]


def lattice_basis(S: Subspace) -> list:
    """Z-basis of ``S ∩ Z^n`` for a rational subspace S."""
    S = S.rational() if S.field != RATIONAL else S
    if S.is_zero():
        return []
    ann = S.annihilator()
    rows = []
    for a in ann.basis:
        d = lcm_denominator(a)
        rows.append([int(x * d) for x in a])
    return integer_kernel(rows, S.n) if rows else [tuple(int(i == j) for j in range(S.n)) for i in range(S.n)]


def _ldl(G):
    """``q(x) = sum_i d_i (x_i + sum_{j>i} u_ij x_j)^2`` for a positive definite Gram (exact)."""
    k = len(G)
    A = [[Fraction(x) for x in row] for row in G]
    d = [Fraction(0)] * k
    u = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        d[i] = A[i][i]
        if d[i] <= 0:
            raise LocusError("form is not positive definite on the class lattice")
        for j in range(i + 1, k):
            u[i][j] = A[i][j] / d[i]
        for a in range(i + 1, k):
            for b in range(i + 1, k):
                A[a][b] -= d[i] * u[i][a] * u[i][b]
    return d, u


def fincke_pohst(G, K) -> list:
    """All integer x with ``x^T G x <= K`` (exact Gram, exact comparison)."""
    k = len(G)
    if k == 0:
        return [()]
    K = Fraction(K)
    d, u = _ldl(G)
    out = []
    x = [0] * k

    def rec(i, budget):
        if i < 0:
            out.append(tuple(x))
            return
        c = -sum((u[i][j] * x[j] for j in range(i + 1, k)), Fraction(0))
        rad = math.sqrt(float(budget / d[i])) if budget > 0 else 0.0
        lo = math.floor(float(c) - rad) - 1
        hi = math.ceil(float(c) + rad) + 1
        for xi in range(lo, hi + 1):
            t = xi - c
            used = d[i] * t * t
            if used <= budget:
                x[i] = xi
                rec(i - 1, budget - used)
        x[i] = 0

    rec(k - 1, K)
    return out


@dataclass
class HodgeClassHit:
    v: tuple
    z: tuple
    q_norm: Fraction
    in_W0: bool | None = None
    witness: tuple | None = None
    witness_verified: bool | None = None
    residual: float | None = None
    notes: list = field(default_factory=list)

    def key(self):
        return (self.q_norm, self.v)

    def to_dict(self) -> dict:
        from .scalars import format_scalar

        return {
            "v": list(self.v),
            "z": [format_scalar(x) for x in self.z],
            "q_norm": str(self.q_norm),
            "in_W0": self.in_W0,
            "witness": None if self.witness is None else [format_scalar(x) for x in self.witness],
            "witness_verified": self.witness_verified,
            "residual": self.residual,
            "notes": self.notes,
        }


def _phi(obj, z, s=None):
    orbit, sample = _as_orbit(obj)
    if sample is None or not sample.gamma:
        return evaluate_orbit(orbit, z)
    if s is None:
        raise LocusError("exact enumeration on a variation with Gamma needs exact s")
    return evaluate_variation(sample, z, s)


def class_space(obj, z, s=None) -> Subspace:
    """``V_Q ∩ Phi^0(z) ∩ conj Phi^0(z)`` as a rational subspace."""
    F = _phi(obj, z, s)
    return F[0].real_points()


def enumerate_classes(obj, z, K, include_zero: bool = True, verdicts: bool = True, s=None) -> list:
    """Integral v of type (0,0) at z with ``Q(v, v) <= K``, sorted by (Q(v,v), v)."""
    orbit, _ = _as_orbit(obj)
    if orbit.weight != 0:
        raise LocusError("enumeration needs weight 0; Tate-twist first")
    z = tuple(z)
    if any(field_of(x) == COMPLEX for x in z):
        raise LocusError("enumeration needs an exact point")
    U = class_space(obj, z, s)
    B = lattice_basis(U)
    Q = orbit.Q
    G = [[_q(Q, a, b) for b in B] for a in B]
    if B:
        minors = leading_minors(Matrix(G, RATIONAL))
        if any(m <= 0 for m in minors):
            raise LocusError("Q is not positive definite on the class lattice")
    hits = []
    for x in fincke_pohst(G, K):
        v = tuple(sum(xi * b[c] for xi, b in zip(x, B)) for c in range(orbit.n)) if B else (0,) * orbit.n
        if not include_zero and not any(v):
            continue
        qn = _q(Q, v, v)
        hits.append(HodgeClassHit(tuple(int(a) for a in v), z, qn))
    hits.sort(key=lambda h: h.key())
    if verdicts:
        W = limiting_weight(orbit)
        for h in hits:
            h.in_W0 = W[0].contains(h.v)
            _attach_witness(orbit, h, h.z)
    return hits


def brute_force_classes(obj, z, K, s=None) -> list:
    """Box search over the ambient lattice; an independent check of :func:`enumerate_classes`."""
    orbit, _ = _as_orbit(obj)
    F = _phi(obj, z, s)
    U = F[0].real_points()
    n = orbit.n
    Q = orbit.Q
    if U.is_zero():
        return [(0,) * n]
    Bm = Matrix(U.basis, RATIONAL)
    G = Bm @ Q @ Bm.T
    M = Bm.T @ inverse(G) @ Bm
    bound = max(M[i, i] for i in range(n))
    R = math.isqrt(math.ceil(K * bound)) + 1
    out = []
    F0 = F[0]
    for v in itertools.product(range(-R, R + 1), repeat=n):
        if _q(Q, v, v) > K:
            continue
        if F0.contains(v) and U.contains(v):
            out.append(v)
    out.sort(key=lambda v: (_q(Q, v, v), v))
    return out


# -- nearby points -------------------------------------------------------------


def _kernel_projector(M: Matrix) -> Matrix:
    r = M.ncols
    K = nullspace(M)
    if not K:
        return Matrix.zeros(r, r)
    Km = Matrix.from_columns(K, RATIONAL)
    return Km @ inverse(Km.T @ Km) @ Km.T


def project_nearby(orbit: NilpotentOrbit, v, z) -> tuple:
    """Nearest z' to z (Euclidean in C^r) with ``sum z'_j N_j v = 0``."""
    orbit, _ = _as_orbit(orbit)
    v = tuple(Fraction(x) for x in v)
    z = tuple(z)
    if len(z) != orbit.r:
        raise LocusError("wrong number of coordinates")
    P = _kernel_projector(_coefficient_matrix(orbit, v))
    if all(field_of(x) != COMPLEX for x in z):
        return P.promote(GAUSSIAN).apply([promote(x, GAUSSIAN) for x in z])
    Pn = P.to_numpy()
    return tuple(complex(x) for x in Pn @ np.array([complex(x) for x in z]))


def nearby_decay(obj, v, points) -> dict:
    """Fit ``log|z' - z| ~ log A - slope * 2 pi inf(y)`` over hit points of a genuine variation."""
    orbit, _ = _as_orbit(obj)
    xs, ys, dists = [], [], []
    for z in points:
        zp = project_nearby(orbit, v, tuple(complex(x) for x in z))
        d = float(np.linalg.norm(np.array(zp) - np.array([complex(x) for x in z])))
        dists.append(d)
        xs.append(-2 * math.pi * min(complex(x).imag for x in z))
        ys.append(math.log(d) if d > 0 else -math.inf)
    out = {"grid": [[str(complex(x)) for x in z] for z in points], "distances": dists}
    if any(d == 0 for d in dists):
        out.update(slope=None, A=0.0 if all(d == 0 for d in dists) else None, residual=None)
        return out
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = float(np.max(np.abs(np.polyval([slope, intercept], xs) - ys)))
    out.update(slope=float(slope), A=float(math.exp(intercept)), residual=resid)
    return out


def snap(x, tol: float = SNAP_TOL):
    """Gaussian rational within ``tol`` of a complex float, or None."""
    if field_of(x) != COMPLEX:
        return promote(x, GAUSSIAN)
    x = complex(x)
    parts = []
    for t in (x.real, x.imag):
        f = Fraction(t).limit_denominator(1000)
        if abs(float(f) - t) > tol * max(1.0, abs(t)):
            return None
        parts.append(f)
    return GaussianRational(*parts)


def _attach_witness(orbit, hit: HodgeClassHit, z):
    zp = project_nearby(orbit, hit.v, z)
    exact = [snap(x) for x in zp]
    if all(e is not None for e in exact):
        F = evaluate_orbit(orbit, tuple(exact))
        hit.witness = tuple(exact)
        hit.witness_verified = F[0].contains(hit.v)
        hit.residual = 0.0 if hit.witness_verified else None
    else:
        F = evaluate_orbit(orbit, tuple(complex(x) for x in zp))
        hit.witness = tuple(zp)
        hit.witness_verified = False
        hit.residual = angle_sine(hit.v, F[0])


def near_class_test(v, z, alpha, H: HodgeStructure, p: int | None = None) -> bool:
    """``angle_sine(v, F^p(z), Hodge metric) <= max(exp(-alpha sup y), NEAR_FLOOR)``.

    p defaults to ``(w+1)//2``.
    """
    if p is None:
        p = (H.weight + 1) // 2
    G = hodge_gram(H)
    s = angle_sine(v, H.F[p], G)
    sup_y = max(complex(x).imag for x in z)
    return s <= max(math.exp(-alpha * sup_y), NEAR_FLOOR)


def _float_fincke_pohst(G: np.ndarray, bound: float) -> list:
    """Integer x with ``x^T G x <= bound`` for a real positive definite G (float)."""
    k = G.shape[0]
    L = np.linalg.cholesky(G)  # G = L L^T
    R = L.T  # q(x) = |R x|^2, R upper triangular
    out = []
    x = np.zeros(k, dtype=np.int64)

    def rec(i, budget):
        if i < 0:
            out.append(tuple(int(a) for a in x))
            return
        c = -sum(R[i, j] * x[j] for j in range(i + 1, k)) / R[i, i]
        rad = math.sqrt(max(budget, 0.0)) / abs(R[i, i])
        for xi in range(math.ceil(c - rad - 1e-9), math.floor(c + rad + 1e-9) + 1):
            t = R[i, i] * (xi - c)
            used = t * t
            if used <= budget + 1e-9:
                x[i] = xi
                rec(i - 1, budget - used)
        x[i] = 0

    rec(k - 1, float(bound))
    return out


def near_classes(sample, z, K, alpha, margin: float = 1.0) -> list:
    """Integral v with ``Q(v,v) <= K`` that are near F^0 at a float point z.

    Candidates come from a Hodge-norm ball ``h(v, v) <= K + margin``.
    """
    orbit, _ = _as_orbit(sample)
    z = tuple(complex(x) for x in z)
    F = evaluate_variation(sample, z) if isinstance(sample, VariationSample) else evaluate_orbit(orbit, z)
    H = HodgeStructure(orbit.lattice, F)
    G = hodge_gram(H).to_numpy()
    Gr = ((G + G.conj().T) / 2).real
    sup_y = max(x.imag for x in z)
    thresh = max(math.exp(-alpha * sup_y), NEAR_FLOOR)
    out = []
    L = _metric_chol(G)
    F0 = F[0]
    Bq, _ = np.linalg.qr(L.conj().T @ np.array([[complex(a) for a in b] for b in F0.basis], dtype=complex).T)
    for v in _float_fincke_pohst(Gr, K + margin):
        if not any(v):
            continue
        qn = _q(orbit.Q, v, v)
        if qn > K:
            continue
        y = L.conj().T @ np.array(v, dtype=complex)
        r = y - Bq @ (Bq.conj().T @ y)
        s = float(np.linalg.norm(r) / np.linalg.norm(y))
        if s <= thresh:
            out.append(HodgeClassHit(v, z, qn, residual=s))
    out.sort(key=lambda h: h.key())
    return out


def _metric_chol(G):
    A = np.asarray(G, dtype=complex).conj()
    A = (A + A.conj().T) / 2
    return np.linalg.cholesky(A)


# -- verification harness ------------------------------------------------------


def ray(z0, theta, ns):
    """Exact points ``z0 + i n theta``."""
    out = []
    for n in ns:
        out.append(tuple(promote(a, GAUSSIAN) + GaussianRational(0, Fraction(n) * Fraction(t)) for a, t in zip(z0, theta)))
    return out


def verify_thm25(obj, z_sequence, K, alpha=1.0, labels=None) -> Report:
    """Finiteness / W_0 / limiting-witness checks along a sequence of points going to the cusp."""
    orbit, sample = _as_orbit(obj)
    rep = Report("verify25")
    v_orbit = orbit.validate()
    if not rep.add("orbit_valid", v_orbit.passed, failures=[c.name for c in v_orbit.failures()]):
        return rep
    _, lim = limiting_mhs(orbit)
    if not rep.add("limiting_polarized", lim.passed, failures=[c.name for c in lim.failures()]):
        return rep
    if orbit.weight != 0:
        rep.add("weight_zero", False, weight=orbit.weight)
        return rep
    labels = list(labels) if labels is not None else list(range(1, len(z_sequence) + 1))
    W = limiting_weight(orbit)
    per_point = []
    sets = []
    exact_mode = (sample is None or not sample.gamma) and all(
        field_of(x) != COMPLEX for z in z_sequence for x in z
    )
    for z in z_sequence:
        if exact_mode:
            hits = enumerate_classes(orbit, z, K, include_zero=False, verdicts=False)
        else:
            hits = near_classes(obj, z, K, alpha)
        sets.append(frozenset(h.v for h in hits))
        per_point.append(hits)
    # stabilisation: first index after which the hit set never changes
    stable_idx = len(sets) - 1
    while stable_idx > 0 and sets[stable_idx - 1] == sets[-1]:
        stable_idx -= 1
    persistent = sorted(sets[-1], key=lambda v: (_q(orbit.Q, v, v), v)) if sets else []
    transient = sorted(set().union(*sets) - sets[-1], key=lambda v: (_q(orbit.Q, v, v), v)) if sets else []
    rep.results["mode"] = "exact" if exact_mode else "near-class"
    rep.results["hit_counts"] = {str(l): len(s) for l, s in zip(labels, sets)}
    rep.results["stabilized_at"] = labels[stable_idx] if sets else None
    rep.results["persistent"] = [list(v) for v in persistent]
    rep.results["non_asymptotic"] = [list(v) for v in transient]
    rep.add("finite_union", True, union_size=len(set().union(*sets)) if sets else 0)
    w0 = {v: W[0].contains(v) for v in persistent}
    rep.add("persistent_in_W0", all(w0.values()), failures=[list(v) for v, ok in w0.items() if not ok])
    deepest = z_sequence[-1] if z_sequence else None
    wit = []
    all_ok = True
    for v in persistent:
        h = HodgeClassHit(v, deepest, _q(orbit.Q, v, v), in_W0=w0[v])
        _attach_witness(orbit, h, deepest)
        wit.append(h.to_dict())
        all_ok &= bool(h.witness_verified)
    rep.results["witnesses"] = wit
    rep.add("witness_verified", all_ok)
    return rep
