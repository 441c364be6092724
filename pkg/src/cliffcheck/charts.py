"""Coordinate patches: coframe, Levi-Civita connection, curvature.

Each catalog space is defined by a closed-form orthonormal coframe on a
coordinate box; everything else (frame vectors, connection 1-forms,
Christoffel symbols, curvature) is derived symbolically once and
lambdified, so all chart data carries exact first and second partials.

Catalog conventions: the flat spaces are Euclidean / Lorentzian; the round
spheres carry the negative-definite frame metric g = -sum e^a (x) e^a.
That choice keeps the Levi-Civita connection of the round metric (the two
metrics differ by an overall sign, which drops out of the connection)
while making the frame 1-forms square to -1, which is what admits real
Killing numbers +/-1/2 under the e^a e^b + e^b e^a = 2 g^{ab} convention
used throughout.  The conventional positive scalar curvature of the round
metric is kept alongside as `scalar_standard`; the working scalar is its
negative on those charts.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy as sp

from .algebra import Multivector, Signature, euclidean, lorentzian, negative_definite

CATALOG_NAMES = ("euclidean2", "euclidean3", "minkowski4", "sphere2", "sphere3")


@dataclass
class ChartFrame:
    """Numeric chart data at one point."""

    E: np.ndarray        # e^a_mu            (a, mu)
    dE: np.ndarray       # d_nu e^a_mu       (nu, a, mu)
    Finv: np.ndarray     # X_a = Finv[mu,a] d_mu   (mu, a)
    dFinv: np.ndarray    # (nu, mu, a)
    omega: np.ndarray    # omega^a_b(X_c)    (c, a, b)
    domega: np.ndarray   # (mu, c, a, b)
    gamma: np.ndarray    # Gamma^rho_{mu nu} (rho, mu, nu)
    g: np.ndarray        # g_{mu nu}
    ginv: np.ndarray
    curvature: np.ndarray  # R^a_b(X_c, X_d)  (a, b, c, d)
    ricci: np.ndarray      # Ric_{ab} frame components
    scalar: float
    sigma: np.ndarray    # spin/rotation generator per direction (c, 2^n)
    dsigma: np.ndarray   # (mu, c, 2^n)


@dataclass
class CurvatureData:
    """Curvature report at a point: 2-forms, Ricci, both scalar conventions."""

    R_ab: list            # list of lists of Multivector (lowered 2-forms R_ab)
    ricci: np.ndarray
    scalar: float
    scalar_standard: float


class ChartedSpace:
    def __init__(self, name: str, coords: tuple[str, ...], sig: Signature,
                 coframe: sp.Matrix, domain: tuple[tuple[float, float], ...],
                 extras: dict | None = None):
        self.name = name
        self.coords = coords
        self.sig = sig
        self.n = sig.n
        self.domain = domain
        self.symbols = sp.symbols(coords, real=True)
        if self.n == 1:
            self.symbols = (self.symbols,)
        self.extras = extras or {}
        self._frame_cache: dict[tuple, ChartFrame] = {}
        self._build(coframe)

    # -- symbolic construction ------------------------------------------

    def _build(self, E: sp.Matrix):
        n = self.n
        xs = self.symbols
        diag = self.sig.diag

        Finv = sp.simplify(E.inv())
        g = sp.Matrix(n, n, lambda m, v: sum(
            diag[a] * E[a, m] * E[a, v] for a in range(n)))
        ginv = sp.Matrix(n, n, lambda m, v: sum(
            diag[a] * Finv[m, a] * Finv[v, a] for a in range(n)))

        dg = [[[sp.diff(g[m, v], xs[r]) for v in range(n)] for m in range(n)]
              for r in range(n)]
        gamma = [[[sp.expand(sp.Rational(1, 2) * sum(
            ginv[r, s] * (dg[m][s][v] + dg[v][s][m] - dg[s][m][v])
            for s in range(n))) for v in range(n)] for m in range(n)]
            for r in range(n)]

        # omega^a_b(X_c) = e^a( nabla_{X_c} X_b )
        omega = [[[sp.trigsimp(sp.expand(sum(
            E[a, r] * (sum(Finv[m, c] * sp.diff(Finv[r, b], xs[m])
                           for m in range(n))
                       + sum(Finv[m, c] * gamma[r][m][v] * Finv[v, b]
                             for m in range(n) for v in range(n)))
            for r in range(n))))
            for b in range(n)] for a in range(n)] for c in range(n)]

        # curvature 2-forms R^a_b = d omega^a_b + omega^a_c ^ omega^c_b,
        # evaluated on frame pairs (X_c, X_d)
        w_coord = [[[sum(omega[c][a][b] * E[c, m] for c in range(n))
                     for m in range(n)] for b in range(n)] for a in range(n)]
        # the (m, v) summand is already the antisymmetric component array of
        # the 2-form, so plain contraction with two frame vectors evaluates it
        curv = [[[[sp.expand(
            sum(Finv[m, c] * Finv[v, d] * (
                sp.diff(w_coord[a][b][v], xs[m]) - sp.diff(w_coord[a][b][m], xs[v])
                + sum(w_coord[a][e][m] * w_coord[e][b][v]
                      - w_coord[a][e][v] * w_coord[e][b][m] for e in range(n)))
                for m in range(n) for v in range(n)))
            for d in range(n)] for c in range(n)] for b in range(n)] for a in range(n)]

        ricci = [[sp.simplify(sum(curv[c][b][c][a] for c in range(n)))
                  for b in range(n)] for a in range(n)]
        scalar = sp.simplify(sum(
            diag[a] * ricci[a][a] for a in range(n)))

        flat = [sp.S(e) for row in E.tolist() for e in row]
        flat += [sp.diff(e, x) for x in xs for row in E.tolist() for e in row]
        flat += [sp.S(e) for row in Finv.tolist() for e in row]
        flat += [sp.diff(e, x) for x in xs for row in Finv.tolist() for e in row]
        om_flat = [omega[c][a][b] for c in range(n) for a in range(n)
                   for b in range(n)]
        flat += om_flat
        flat += [sp.diff(e, x) for x in xs for e in om_flat]
        flat += [gamma[r][m][v] for r in range(n) for m in range(n)
                 for v in range(n)]
        flat += [g[m, v] for m in range(n) for v in range(n)]
        flat += [ginv[m, v] for m in range(n) for v in range(n)]
        flat += [curv[a][b][c][d] for a in range(n) for b in range(n)
                 for c in range(n) for d in range(n)]
        flat += [ricci[a][b] for a in range(n) for b in range(n)]
        flat += [scalar]
        self._chart_fn = sp.lambdify(xs, flat, modules="numpy", cse=True)

        sign = -1 if all(d == -1 for d in diag) else 1
        self.scalar_standard_expr = sp.simplify(sign * scalar)

    # -- numeric access ---------------------------------------------------

    def frame(self, x) -> ChartFrame:
        x = tuple(float(v) for v in x)
        hit = self._frame_cache.get(x)
        if hit is not None:
            return hit
        self._in_domain(x)
        n = self.n
        raw = np.asarray(self._chart_fn(*x), dtype=complex)
        vals = list(raw.real)  # chart data is real; stray 0j from sympy dropped
        pos = 0

        def take(shape):
            nonlocal pos
            size = int(np.prod(shape))
            out = np.array(vals[pos:pos + size]).reshape(shape)
            pos += size
            return out

        E = take((n, n))
        dE = take((n, n, n))
        Finv = take((n, n))
        dFinv = take((n, n, n))
        omega = take((n, n, n))
        domega = take((n, n, n, n))
        gamma = take((n, n, n))
        g = take((n, n))
        ginv = take((n, n))
        curv = take((n, n, n, n))
        ricci = take((n, n))
        scalar = float(take((1,))[0])

        diag = self.sig.diag
        dim = self.sig.dim
        sigma = np.zeros((n, dim), dtype=complex)
        dsigma = np.zeros((n, n, dim), dtype=complex)
        for c in range(n):
            for a in range(n):
                for b in range(a + 1, n):
                    blade = (1 << a) | (1 << b)
                    sigma[c, blade] += 0.5 * diag[a] * omega[c, a, b]
                    for mu in range(n):
                        dsigma[mu, c, blade] += 0.5 * diag[a] * domega[mu, c, a, b]

        fr = ChartFrame(E, dE, Finv, dFinv, omega, domega, gamma, g, ginv,
                        curv, ricci, scalar, sigma, dsigma)
        if len(self._frame_cache) > 8192:
            self._frame_cache.clear()
        self._frame_cache[x] = fr
        return fr

    def _in_domain(self, x):
        for v, (lo, hi) in zip(x, self.domain):
            if not lo <= v <= hi:
                raise ValueError(
                    f"point {x} outside the {self.name} chart domain")

    def sample_points(self, rng, count: int) -> list[tuple]:
        lo = np.array([d[0] for d in self.domain])
        hi = np.array([d[1] for d in self.domain])
        pts = rng.uniform(lo, hi, size=(count, self.n))
        return [tuple(float(v) for v in p) for p in pts]

    @property
    def scalar_standard(self) -> float:
        return float(self.scalar_standard_expr.subs(
            dict(zip(self.symbols, [float(np.mean(d)) for d in self.domain]))))

    def curvature_data(self, x) -> CurvatureData:
        fr = self.frame(x)
        n, diag = self.n, self.sig.diag
        R_ab = []
        for a in range(n):
            row = []
            for b in range(n):
                coeffs = np.zeros(self.sig.dim, dtype=complex)
                for c in range(n):
                    for d in range(c + 1, n):
                        # lowered 2-form R_ab evaluated pairwise; the blade
                        # coefficient of e^{cd} in no-factorial convention
                        coeffs[(1 << c) | (1 << d)] = diag[a] * fr.curvature[a, b, c, d]
                row.append(Multivector(self.sig, coeffs))
            R_ab.append(row)
        scalar_std = float(self.scalar_standard_expr.subs(
            dict(zip(self.symbols, x))))
        return CurvatureData(R_ab, fr.ricci.copy(), fr.scalar, scalar_std)


# -- catalog ------------------------------------------------------------


def _flat(name, n, sig) -> ChartedSpace:
    coords = tuple(f"x{i}" for i in range(n))
    E = sp.eye(n)
    domain = tuple((-2.0, 2.0) for _ in range(n))
    return ChartedSpace(name, coords, sig, E, domain)


def _sphere2() -> ChartedSpace:
    th, ph = sp.symbols("theta phi", real=True)
    E = sp.Matrix([[1, 0], [0, sp.sin(th)]])
    return ChartedSpace(
        "sphere2", ("theta", "phi"), negative_definite(2), E,
        ((0.2, float(sp.pi) - 0.2), (0.1, 2 * float(sp.pi) - 0.1)))


def _sphere3() -> ChartedSpace:
    th, ph, ch = sp.symbols("theta phi chi", real=True)
    s1, s2, s3 = [sp.Matrix([[0, 1], [1, 0]]),
                  sp.Matrix([[0, -sp.I], [sp.I, 0]]),
                  sp.Matrix([[1, 0], [0, -1]])]
    U = ((sp.cos(ph / 2) * sp.eye(2) - sp.I * sp.sin(ph / 2) * s3)
         * (sp.cos(th / 2) * sp.eye(2) - sp.I * sp.sin(th / 2) * s2)
         * (sp.cos(ch / 2) * sp.eye(2) - sp.I * sp.sin(ch / 2) * s3))
    xs = (th, ph, ch)
    # left-invariant 1-forms from the Maurer-Cartan form U^{-1} dU
    sig_forms = sp.zeros(3, 3)  # sig_forms[k, mu]
    Uinv = U.H  # unitary
    for mu, x in enumerate(xs):
        M = sp.trigsimp(sp.expand(Uinv * sp.diff(U, x)))
        for k, pauli in enumerate((s1, s2, s3)):
            sig_forms[k, mu] = sp.simplify(sp.I * sp.trace(pauli * M))
    E = sp.trigsimp(sig_forms / 2)  # unit-radius coframe e^k = sigma^k / 2
    space = ChartedSpace(
        "sphere3", ("theta", "phi", "chi"), negative_definite(3), E,
        ((0.2, float(sp.pi) - 0.2), (0.1, 2 * float(sp.pi) - 0.1),
         (0.1, 4 * float(sp.pi) - 0.1)))
    space.extras["su2_element"] = U
    return space


@lru_cache(maxsize=None)
def get_space(name: str) -> ChartedSpace:
    if name == "euclidean2":
        return _flat(name, 2, euclidean(2))
    if name == "euclidean3":
        return _flat(name, 3, euclidean(3))
    if name == "minkowski4":
        return _flat(name, 4, lorentzian(4))
    if name == "sphere2":
        return _sphere2()
    if name == "sphere3":
        return _sphere3()
    raise ValueError(
        f"unknown space {name!r}; catalog: {', '.join(CATALOG_NAMES)}")
