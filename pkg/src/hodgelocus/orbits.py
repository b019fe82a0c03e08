"""Nilpotent orbits, truncated variations, limiting mixed Hodge structures, asymptotics."""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .hodge import (
    HodgeError,
    HodgeStructure,
    MixedHodgeStructure,
    PolarizedLattice,
    deligne_bigrading,
    hodge_gram,
    is_mhs,
    is_polarization,
    p_degrees,
    perturbation_sine,
    subspace_sine,
)
from .linalg import (
    DECREASING,
    Filtration,
    Grading,
    Matrix,
    Subspace,
    exp_nilpotent,
    is_nilpotent,
    solve,
)
from .nilpotent import cone_weight_filtration
from .report import Report
from .scalars import COMPLEX, GAUSSIAN, RATIONAL, field_of, join_fields, promote

TAIL_BOUND = 1e-12


class OrbitError(ValueError):
    pass


class TruncationError(ArithmeticError):
    """Series tail too large (or distances underflow) for the requested accuracy."""

    def __init__(self, msg, bound=None):
        self.bound = bound
        super().__init__(msg)


def _zfield(z) -> str:
    return join_fields(*(field_of(x) for x in z)) if z else RATIONAL


def _lincomb(Ns, coeffs, f):
    n = Ns[0].nrows
    X = Matrix.zeros(n, n, f)
    for c, N in zip(coeffs, Ns):
        if c:
            X = X + N.promote(f).scale(promote(c, f))
    return X


@dataclass
class NilpotentOrbit:
    """``z -> exp(sum z_j N_j) F`` with integral commuting nilpotent ``N_j``."""

    Ns: list
    F: Filtration
    lattice: PolarizedLattice
    name: str = ""

    @property
    def r(self) -> int:
        return len(self.Ns)

    @property
    def weight(self) -> int:
        return self.lattice.weight

    @property
    def n(self) -> int:
        return self.lattice.rank

    @property
    def Q(self) -> Matrix:
        return self.lattice.Q

    def N_total(self) -> Matrix:
        return _lincomb(self.Ns, [1] * self.r, join_fields(*(N.field for N in self.Ns)))

    def validate(self) -> Report:
        rep = Report("orbit")
        probs = self.lattice.problems()
        rep.add("lattice", not probs, problems=probs)
        Ns = self.Ns
        rep.add("integral_N", all(N.is_integral() for N in Ns))
        rep.add("nilpotent", all(is_nilpotent(N) for N in Ns))
        rep.add(
            "commuting",
            all(Ns[a].commutator(Ns[b]).is_zero() for a, b in itertools.combinations(range(len(Ns)), 2)),
        )
        Q = self.Q
        rep.add("infinitesimal_isometry", all((N.T @ Q + Q @ N).is_zero() for N in Ns))
        F = self.F
        ok = True
        for N in Ns:
            Nf = N.promote(F.field)
            for p in range(F.lo, F.hi + 1):
                if not (F[p].image(Nf) <= F[p - 1]):
                    ok = False
        rep.add("transversality", ok)
        return rep


def evaluate_orbit(orbit: NilpotentOrbit, z) -> Filtration:
    """``exp(sum z_j N_j) F``; exact for Gaussian-rational z."""
    z = tuple(z)
    if len(z) != orbit.r:
        raise OrbitError(f"expected {orbit.r} coordinates, got {len(z)}")
    f = join_fields(_zfield(z), orbit.F.field, GAUSSIAN)
    X = _lincomb(orbit.Ns, z, f)
    return orbit.F.promote(f).apply(exp_nilpotent(X))


def hodge_structure_at(orbit, z) -> HodgeStructure:
    return HodgeStructure(orbit.lattice, evaluate_orbit(orbit, z))


def is_polarized_orbit(orbit: NilpotentOrbit, y_threshold=0, samples=()) -> Report:
    rep = Report("is_polarized_orbit")
    passing = []
    for z in samples:
        ys = [complex(x).imag for x in z]
        if min(ys) < float(y_threshold):
            continue
        H = hodge_structure_at(orbit, z)
        r = is_polarization(H)
        rep.add(f"z={[str(x) for x in z]}", r.passed, failures=[c.name for c in r.failures()], min_y=min(ys))
        if r.passed:
            passing.append(min(ys))
    all_ok = rep.passed
    rep.results["smallest_passing_y"] = min(passing) if (passing and all_ok) else None
    return rep


# -- limiting mixed Hodge structure --------------------------------------------


def limiting_weight(orbit: NilpotentOrbit, seed: int = 0) -> Filtration:
    """``W(C)[-w]`` for the monodromy cone."""
    W = cone_weight_filtration([N for N in orbit.Ns], seed=seed)
    return W.shift(-orbit.weight)


def primitive_structures(orbit: NilpotentOrbit, W: Filtration | None = None) -> list:
    """For each l >= 0 with ``Gr_{w+l} != 0``: (l, HodgeStructure on the primitive part).

    The primitive part is ``{x in W_{w+l} : N^{l+1} x in W_{w-l-3}}`` modulo
    ``W_{w+l-1}``, with the form ``Q(x, N^l y)`` and the induced filtration.
    """
    w = orbit.weight
    if W is None:
        W = limiting_weight(orbit)
    Nt = orbit.N_total()
    F = orbit.F
    fF = join_fields(F.field, GAUSSIAN)
    out = []
    for k, d in sorted(W.graded_dims().items()):
        l = k - w
        if l < 0:
            continue
        Nl1 = Nt ** (l + 1)
        P = W[k] & W[w - l - 3].preimage(Nl1)
        low = W[k - 1]
        comp = P.complement_basis(low)
        if not comp:
            continue
        r = len(comp)
        Nl = Nt ** l
        Q = orbit.Q
        Ql = Matrix([[_q(Q, comp[a], Nl.apply(comp[b])) for b in range(r)] for a in range(r)], RATIONAL)
        cols = comp + list(low.basis)
        Mc = Matrix.from_columns(cols, fF)
        steps = {}
        Pf = P.promote(fF)
        for p in range(F.lo, F.hi + 2):
            S = F[p].promote(fF) & Pf
            vecs = []
            for v in S.basis:
                c = solve(Mc, v)
                vecs.append(tuple(c[:r]))
            steps[p] = Subspace(vecs, r, fF) if vecs else Subspace.zero(r, fF)
        Fl = Filtration(steps, DECREASING, r, fF)
        H = HodgeStructure(PolarizedLattice(Ql, k), Fl)
        out.append((l, H))
    return out


def _q(Q: Matrix, u, v):
    Qv = Q.apply(v)
    return sum((a * b for a, b in zip(u, Qv)), Fraction(0))


def limiting_mhs(orbit: NilpotentOrbit, seed: int = 0):
    """Returns ``(MixedHodgeStructure(W(C)[-w], F), report)``."""
    W = limiting_weight(orbit, seed)
    rep = Report("limiting_mhs")
    m = is_mhs(W, orbit.F)
    rep.extend(m, "mhs:")
    rep.results["graded"] = {str(k): v for k, v in m.results.get("graded", {}).items()}
    prim = {}
    if m.passed:
        for l, H in primitive_structures(orbit, W):
            r = is_polarization(H, require_integral=False)
            rep.add(f"primitive_l={l}", r.passed, dim=H.n, failures=[c.name for c in r.failures()])
            prim[l] = H.n
    rep.results["primitive_dims"] = prim
    return MixedHodgeStructure(W, orbit.F), rep


def limiting_bigrading(orbit: NilpotentOrbit) -> Grading:
    mhs, rep = limiting_mhs(orbit)
    if not rep.passed:
        raise OrbitError("limiting data is not a polarized mixed Hodge structure")
    return deligne_bigrading(mhs.W, mhs.F)


def in_g_minus1_minus1(orbit: NilpotentOrbit, I: Grading | None = None) -> bool:
    """Whether every N_j has bidegree (-1, -1) for the limiting bigrading."""
    from .hodge import bigrading_component

    if I is None:
        I = limiting_bigrading(orbit)
    for N in orbit.Ns:
        Np = N.promote(I.field)
        if bigrading_component(I, Np, (-1, -1)) != Np:
            return False
    return True


# -- variations ----------------------------------------------------------------


@dataclass
class VariationSample:
    """``Phi(z) = exp(sum z_j N_j) exp(Gamma(s)) F`` with ``s_j = exp(2 pi i z_j)``.

    ``gamma`` maps a multi-degree (tuple of nonnegative ints, not all zero) to a
    coefficient matrix.  ``truncated=False`` means Gamma is exactly this
    polynomial; otherwise it is a truncation and evaluation checks the tail.
    """

    orbit: NilpotentOrbit
    gamma: dict = field(default_factory=dict)
    truncated: bool = False
    name: str = ""

    def validate(self, I: Grading | None = None) -> Report:
        rep = Report("variation")
        for deg in self.gamma:
            if len(deg) != self.orbit.r or any(d < 0 for d in deg):
                rep.add("degrees", False, degree=list(deg))
                return rep
        rep.add("gamma_vanishes_at_0", all(any(d) for d in self.gamma))
        if I is None:
            try:
                I = limiting_bigrading(self.orbit)
            except (OrbitError, HodgeError) as e:
                rep.add("limiting_bigrading", False, error=str(e))
                return rep
        bad = []
        for deg, X in self.gamma.items():
            parts = p_degrees(I, X.promote(I.field))
            if any(a >= 0 for a in parts):
                bad.append(list(deg))
        rep.add("gamma_in_lowering_algebra", not bad, offending=bad)
        return rep

    def degree(self) -> int:
        return max((sum(d) for d in self.gamma), default=0)

    def gamma_at(self, s) -> Matrix:
        n = self.orbit.n
        f = join_fields(_zfield(s), *(X.field for X in self.gamma.values())) if self.gamma else _zfield(s)
        out = Matrix.zeros(n, n, f)
        for deg, X in self.gamma.items():
            c = promote(1, f)
            for sj, dj in zip(s, deg):
                c = c * promote(sj, f) ** dj
            if c:
                out = out + X.promote(f).scale(c)
        return out

    def tail_bound(self, s) -> float:
        """Geometric bound on the neglected tail of a truncated series."""
        if not self.truncated or not self.gamma:
            return 0.0
        rho = max(abs(complex(x)) for x in s)
        D = self.degree()
        R = 0.0
        for deg, X in self.gamma.items():
            k = sum(deg)
            nrm = float(np.linalg.norm(X.to_numpy(), 2))
            if nrm:
                R = max(R, nrm ** (1.0 / k))
        q = R * rho
        if q >= 1:
            return math.inf
        return q ** (D + 1) / (1 - q)


def s_of(z) -> tuple:
    return tuple(cmath.exp(2j * math.pi * complex(x)) for x in z)


def evaluate_variation(sample: VariationSample, z, s=None) -> Filtration:
    """Phi(z).  Float by default; pass an exact ``s`` together with exact ``z`` for exact work."""
    z = tuple(z)
    if s is None:
        z = tuple(complex(x) for x in z)
        s = s_of(z)
    tb = sample.tail_bound(s)
    if tb > TAIL_BOUND:
        raise TruncationError(f"series tail bound {tb:.3g} exceeds {TAIL_BOUND:g} at |s|={max(abs(complex(x)) for x in s):.3g}", tb)
    G = sample.gamma_at(s)
    f = join_fields(_zfield(z), G.field, sample.orbit.F.field, GAUSSIAN)
    X = _lincomb(sample.orbit.Ns, z, f)
    E = exp_nilpotent(X) @ exp_nilpotent(G.promote(f))
    return sample.orbit.F.promote(f).apply(E)


def gamma_minus1(sample: VariationSample, I: Grading | None = None) -> dict:
    """``Gamma_{-1}``: the p-degree -1 part of each coefficient, ``{degree: Matrix}``."""
    if I is None:
        I = limiting_bigrading(sample.orbit)
    out = {}
    for deg, X in sample.gamma.items():
        parts = p_degrees(I, X.promote(I.field))
        if -1 in parts:
            out[deg] = parts[-1]
    return out


# -- distances and asymptotics -------------------------------------------------


def filtration_distance(F1: Filtration, F2: Filtration, metric=None) -> float:
    """Largest principal angle (radians) between ``F1^p`` and ``F2^p`` over all p."""
    if F1.n != F2.n or F1.direction != F2.direction:
        raise OrbitError("flag type mismatch")
    worst = 0.0
    for p in range(min(F1.lo, F2.lo), max(F1.hi, F2.hi) + 1):
        A, B = F1[p].promote(COMPLEX), F2[p].promote(COMPLEX)
        if A.dim != B.dim:
            raise OrbitError(f"flag type mismatch at index {p}: {A.dim} vs {B.dim}")
        worst = max(worst, math.asin(subspace_sine(A, B, metric)))
    return worst


def _expm_nil_np(X: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    out = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        term = term @ X / k
        out = out + term
    return out


def _expm_minus_one_np(X: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    out = np.zeros((n, n), dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        term = term @ X / k
        out = out + term
    return out


def hodge_metric_at(orbit: NilpotentOrbit, z) -> np.ndarray:
    """Float Gram matrix of the Hodge form of ``Phi_un(z)``."""
    z = tuple(complex(x) for x in z)
    F = evaluate_orbit(orbit, z)
    H = HodgeStructure(orbit.lattice, F)
    return hodge_gram(H).to_numpy()


def variation_distance(sample: VariationSample, z, metric=None) -> float:
    """Distance between Phi(z) and Phi_un(z), resolved below float epsilon.

    For each p with basis B of F^p: ``P = exp(zN) B`` spans ``Phi_un^p`` and
    ``P + D`` with ``D = exp(zN)(exp(Gamma) - 1) B`` spans ``Phi^p``.
    """
    z = tuple(complex(x) for x in z)
    s = s_of(z)
    tb = sample.tail_bound(s)
    if tb > TAIL_BOUND:
        raise TruncationError(f"series tail bound {tb:.3g} exceeds {TAIL_BOUND:g}", tb)
    orbit = sample.orbit
    X = sum(zj * N.to_numpy() for zj, N in zip(z, orbit.Ns))
    E = _expm_nil_np(X)
    G = sample.gamma_at(s).to_numpy() if sample.gamma else np.zeros((orbit.n, orbit.n), dtype=complex)
    EG = _expm_minus_one_np(G)
    if metric is None:
        metric = hodge_metric_at(orbit, z)
    F = orbit.F
    worst = 0.0
    for p in range(F.lo, F.hi + 1):
        S = F[p]
        if S.is_zero() or S.is_full():
            continue
        B = np.array([[complex(a) for a in b] for b in S.basis], dtype=complex).T
        P = E @ B
        D = E @ (EG @ B)
        worst = max(worst, math.asin(perturbation_sine(P, D, metric)))
    return worst


def decay_check(sample: VariationSample, z0, direction, t_grid) -> dict:
    """Fit ``log d(t) ≈ a + slope * (-2 pi inf y(t))`` along ``z0 + i t direction``."""
    direction = [float(x) for x in direction]
    if any(x <= 0 for x in direction):
        raise OrbitError("ray direction must be strictly positive")
    z0 = [complex(x) for x in z0]
    xs, ds, rows = [], [], []
    for t in t_grid:
        z = [a + 1j * t * d for a, d in zip(z0, direction)]
        infy = min(x.imag for x in z)
        d = variation_distance(sample, z)
        rows.append({"t": float(t), "inf_y": infy, "distance": d})
        xs.append(-2 * math.pi * infy)
        ds.append(d)
    out = {"grid": rows}
    if all(d == 0 for d in ds):
        out.update(exact_match=True, slope=None, intercept=None, residual=0.0)
        return out
    if any(d <= 0 or not math.isfinite(d) for d in ds) or min(ds) < 1e-290:
        raise TruncationError("distances underflow on this grid")
    ys = [math.log(d) for d in ds]
    A = np.vstack([np.ones(len(xs)), np.array(xs)]).T
    coef, res, *_ = np.linalg.lstsq(A, np.array(ys), rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - np.array(ys)) ** 2)))
    out.update(exact_match=False, slope=float(coef[1]), intercept=float(coef[0]), residual=resid)
    return out


def rescaling_factor(l, tau):
    """``prod tau_j^(l_j/2)``; exact when every factor is rational."""
    out = Fraction(1)
    exact = True
    for lj, tj in zip(l, tau):
        if tj <= 0:
            raise OrbitError("rescaling parameters must be positive")
        if isinstance(tj, (int, Fraction)):
            t = Fraction(tj)
            r = _rational_sqrt(t)
            if r is not None:
                out *= r ** lj
                continue
        exact = False
        break
    if exact:
        return out
    val = 1.0
    for lj, tj in zip(l, tau):
        val *= float(tj) ** (lj / 2)
    return val


def _rational_sqrt(t: Fraction):
    a, b = t.numerator, t.denominator
    ra, rb = math.isqrt(a), math.isqrt(b)
    if ra * ra == a and rb * rb == b:
        return Fraction(ra, rb)
    return None


def rescaling_operator(A: Grading, tau) -> Matrix:
    tau = tuple(tau)
    if any(t <= 0 for t in tau):
        raise OrbitError("rescaling parameters must be positive")
    factors = {l: rescaling_factor(l, tau) for l in A.indices()}
    if any(isinstance(v, float) for v in factors.values()):
        return A.promote(COMPLEX).operator({l: complex(v) for l, v in factors.items()})
    return A.operator(factors)


def apply_rescaling(A: Grading, tau, x):
    """``e_A(tau)`` applied to a vector or a filtration."""
    E = rescaling_operator(A, tau)
    if isinstance(x, Filtration):
        return x.apply(E)
    return E.apply([promote(a, E.field) for a in x])
