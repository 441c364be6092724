"""Spinors as columns of a fixed irreducible Clifford representation.

Gamma matrices come from the tensor-product (Brauer-Weyl) recursion over
Pauli blocks, giving 2^(n//2)-dimensional representations for any
signature: the Euclidean generators are built first and every timelike
direction is multiplied by i, so gamma^a gamma^b + gamma^b gamma^a =
2 g^{ab} holds exactly.

The spinor adjoint is psi-bar = psi^dagger A with A the (Hermitian-
normalized) product of the timelike gammas, identity when there are none.
Whether the induced involution on Clifford forms is the main
anti-automorphism xi or its eta-twist is detected at construction and
recorded; the Hodge dual of a spinor is only defined in the xi case.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import algebra as al
from .algebra import Multivector, Signature
from .calculus import (EPS, covariant_derivative, covd_field, vnorm)
from .jets import (DUAL_SPINOR, FORM, SPINOR, ConstantJetField, DerivedJetField,
                   Jet, JetField, MappedJetField, SumJetField)

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _kron_chain(mats):
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def _euclidean_gammas(n: int) -> list[np.ndarray]:
    m = n // 2
    eye = np.eye(2, dtype=complex)
    gammas = []
    for k in range(1, m + 1):
        pre = [_PAULI[2]] * (k - 1)
        post = [eye] * (m - k)
        gammas.append(_kron_chain(pre + [_PAULI[0]] + post))
        gammas.append(_kron_chain(pre + [_PAULI[1]] + post))
    if n % 2 == 1:
        gammas.append(_kron_chain([_PAULI[2]] * m))
    return gammas[:n]


class CliffordRep:
    """Irreducible matrix representation of the Clifford algebra of sig."""

    def __init__(self, sig: Signature):
        self.sig = sig
        self.dim = 2 ** (sig.n // 2)
        base = _euclidean_gammas(sig.n)
        self.gammas = [g if d == 1 else 1j * g for g, d in zip(base, sig.diag)]
        for a, ga in enumerate(self.gammas):
            for b, gb in enumerate(self.gammas):
                anti = ga @ gb + gb @ ga
                want = 2.0 * sig.diag[a] * (a == b)
                if not np.allclose(anti, want * np.eye(self.dim), atol=1e-13):
                    raise AssertionError("gamma anticommutation failed")

        # blade matrices Gamma_B, ascending factor order
        self.blades = np.empty((sig.dim, self.dim, self.dim), dtype=complex)
        for b in range(sig.dim):
            m = np.eye(self.dim, dtype=complex)
            for a in range(sig.n):
                if b >> a & 1:
                    m = m @ self.gammas[a]
            self.blades[b] = m
        tabs = al._tables(sig.diag)
        self.blade_square = tabs["blade_square"].astype(float)

        self.A, self.adjoint_sign = self._build_adjoint()
        self.adjoint_involution = "xi" if self.adjoint_sign == 1 else "xieta"
        self.Ainv = np.linalg.inv(self.A)

        # rank-one reconstruction weight: the odd-dimensional rep is not
        # faithful (z acts as a scalar), every matrix is reached twice
        self.kappa = 1.0 if sig.n % 2 == 0 else 0.5

        zmat = self.blades[sig.volume_blade]
        self.volume_matrix = zmat
        self.volume_square = sig.volume_square()
        self.reversal_matrix = zmat if self.volume_square == 1 else 1j * zmat

    def _build_adjoint(self):
        A = np.eye(self.dim, dtype=complex)
        for a, d in enumerate(self.sig.diag):
            if d == -1:
                A = A @ self.gammas[a]
        if not np.allclose(A.conj().T, A, atol=1e-13):
            A = 1j * A
        if not np.allclose(A.conj().T, A, atol=1e-13):
            raise AssertionError("adjoint matrix could not be normalized Hermitian")
        signs = set()
        Ainv = np.linalg.inv(A)
        for g in self.gammas:
            cand = Ainv @ g.conj().T @ A
            if np.allclose(cand, g, atol=1e-12):
                signs.add(1)
            elif np.allclose(cand, -g, atol=1e-12):
                signs.add(-1)
            else:
                raise AssertionError("adjoint involution is not diagonal on gammas")
        if len(signs) != 1:
            raise AssertionError("mixed adjoint signs for this signature")
        return A, signs.pop()

    def matrix(self, coeffs: np.ndarray) -> np.ndarray:
        """Representation matrix of a multivector coefficient vector."""
        return np.tensordot(np.asarray(coeffs, dtype=complex), self.blades,
                            axes=(0, 0))

    def decompose(self, M: np.ndarray) -> np.ndarray:
        """Blade coefficients of a dim x dim operator (trace pairing)."""
        out = np.einsum("bji,ij->b", self.blades, M)
        return self.kappa * out / (self.blade_square * self.dim)

    def adjoint_image(self, coeffs: np.ndarray) -> np.ndarray:
        """Multivector image Phi^J with (Phi.psi)-bar = psi-bar . Phi^J."""
        kind = "xi" if self.adjoint_sign == 1 else "etaxi"
        return al.involute_arrays(self.sig, coeffs, kind)


@lru_cache(maxsize=16)
def get_rep(diag: tuple[int, ...]) -> CliffordRep:
    return CliffordRep(Signature(diag))


# -- basic actions ----------------------------------------------------------


def clifford_act(u: Multivector, s: np.ndarray, rep: CliffordRep) -> np.ndarray:
    if u.sig != rep.sig:
        raise ValueError("signature mismatch between form and representation")
    s = np.asarray(s, dtype=complex)
    if s.shape != (rep.dim,):
        raise ValueError("spinor dimension mismatch")
    return rep.matrix(u.coeffs) @ s


def adjoint_spinor(s: np.ndarray, rep: CliffordRep) -> np.ndarray:
    """Row vector psi-bar = psi^dagger A."""
    return np.asarray(s, dtype=complex).conj() @ rep.A


def spinor_covderiv(psi: JetField, a: int, x) -> np.ndarray:
    return covariant_derivative(psi, a, x)


def dirac_field(psi: JetField) -> JetField:
    """D-slash psi = e^a . nabla_{X_a} psi as a derived field."""
    rep = psi.rep
    covs = [covd_field(psi, a) for a in range(psi.space.n)]
    mats = [rep.gammas[a] for a in range(psi.space.n)]
    return SumJetField([MappedJetField(c, lambda v, m=m: m @ v)
                        for c, m in zip(covs, mats)])


def dirac(psi: JetField, x) -> np.ndarray:
    return dirac_field(psi).value(x)


def killing_residual(psi: JetField, lam: complex, x) -> float:
    """max_a |nabla_a psi - lam e_a . psi| / (|psi| + eps)."""
    rep, sig = psi.rep, psi.space.sig
    v = psi.value(x)
    scale = vnorm(v) + EPS
    worst = 0.0
    for a in range(sig.n):
        lhs = covariant_derivative(psi, a, x)
        rhs = lam * sig.diag[a] * (rep.gammas[a] @ v)
        worst = max(worst, vnorm(lhs - rhs) / scale)
    return worst


def killing_reversal(psi: JetField, supplied: JetField | None = None) -> JetField:
    """The Killing-reversed field.

    In even dimension the reversal is the left action of the volume form,
    taken as z when z^2 = 1 and iz when z^2 = -1 so that the map is an
    involution.  In odd dimension a reversed field must be supplied; it is
    passed through unchanged (verification is the caller's job).
    """
    if psi.space.n % 2 == 0:
        R = psi.rep.reversal_matrix
        return MappedJetField(psi, lambda v: R @ v)
    if supplied is None:
        raise ValueError("odd dimension: supply the reversed field explicitly")
    return supplied


def build_twistors(psi: JetField, psi_rev: JetField, lam: complex,
                   check_points=(), tol: float = 1e-6):
    """Twistor pair (psi + psi^rev, psi - psi^rev) from a Killing pair."""
    for x in check_points:
        if killing_residual(psi, lam, x) > tol:
            raise ValueError("first input fails the Killing residual")
        if killing_residual(psi_rev, -lam, x) > tol:
            raise ValueError("second input fails the Killing residual")
    plus = SumJetField([psi, psi_rev], [1.0, 1.0])
    minus = SumJetField([psi, psi_rev], [1.0, -1.0])
    return plus, minus


def twistor_residual(Psi: JetField, x) -> float:
    """max_a |nabla_a Psi - (1/n) e_a . D-slash Psi| (normalized)."""
    rep, sig = Psi.rep, Psi.space.sig
    n = sig.n
    dps = dirac(Psi, x)
    scale = vnorm(Psi.value(x)) + vnorm(dps) + EPS
    worst = 0.0
    for a in range(n):
        lhs = covariant_derivative(Psi, a, x)
        rhs = sig.diag[a] * (rep.gammas[a] @ dps) / n
        worst = max(worst, vnorm(lhs - rhs) / scale)
    return worst


def helicity_project(obj, sign: int, rep: CliffordRep):
    """Helicity projector (1 +/- z)/2 or (1 +/- iz)/2 per the z^2 sign."""
    if rep.sig.n % 2 != 0:
        raise ValueError("helicity projectors need even dimension")
    s = 1 if sign > 0 else -1
    if isinstance(obj, Multivector):
        z = Multivector.volume(rep.sig)
        factor = z if rep.volume_square == 1 else 1j * z
        return 0.5 * (obj + s * (factor * obj))
    P = 0.5 * (np.eye(rep.dim) + s * rep.reversal_matrix)
    return P @ np.asarray(obj, dtype=complex)


# -- adjoint-side fields ----------------------------------------------------


def bar_field(psi: JetField) -> JetField:
    """The dual-spinor field psi-bar (row components)."""
    A = psi.rep.A
    return MappedJetField(psi, lambda v: v.conj() @ A, geometry=DUAL_SPINOR)


def dual_covderiv(row: JetField, a: int, x) -> np.ndarray:
    return covariant_derivative(row, a, x)


def spinor_hodge(psi: JetField) -> JetField:
    """Hodge dual of a spinor: the dual-spinor field psi-bar . z.

    Defined only when the adjoint involution of the spinor inner product
    is the main anti-automorphism xi.
    """
    rep = psi.rep
    if rep.adjoint_involution != "xi":
        raise ValueError(
            "spinor Hodge dual undefined: the adjoint involution of this "
            f"representation is {rep.adjoint_involution}, not xi")
    Z = rep.volume_matrix
    A = rep.A
    return MappedJetField(psi, lambda v: (v.conj() @ A) @ Z,
                          geometry=DUAL_SPINOR)


def dual_killing_residual(row: JetField, lam: complex, x) -> float:
    """Dual-side Killing relation: nabla_a r = lam r . *(e_a)."""
    rep, sig = row.rep, row.space.sig
    v = row.value(x)
    scale = vnorm(v) + EPS
    worst = 0.0
    for a in range(sig.n):
        lhs = covariant_derivative(row, a, x)
        ea = np.zeros(sig.dim, dtype=complex)
        ea[1 << a] = sig.diag[a]
        rhs = lam * (v @ rep.matrix(al.hodge_arrays(sig, ea)))
        worst = max(worst, vnorm(lhs - rhs) / scale)
    return worst


# -- bilinears --------------------------------------------------------------


class BilinearField(JetField):
    """Multivector-valued field psi phi-bar, blade coefficients by trace
    reconstruction of the rank-one operator."""

    def __init__(self, psi: JetField, phi: JetField):
        if psi.rep is not phi.rep or psi.space is not phi.space:
            raise ValueError("bilinear needs matching representation and space")
        super().__init__(psi.space, FORM, psi.space.sig.dim,
                         min(psi.order, phi.order), "derived", rep=None)
        self._psi, self._phi = psi, phi
        self._rep = psi.rep

    def _evaluate(self, x):
        rep, A = self._rep, self._rep.A
        jp, jq = self._psi.jet(x), self._phi.jet(x)
        bar = lambda v: v.conj() @ A
        op = np.outer
        dec = rep.decompose
        val = dec(op(jp.value, bar(jq.value)))
        first = second = None
        nc = len(self.space.symbols)
        if self.order >= 1:
            first = np.stack([
                dec(op(jp.first[m], bar(jq.value)) + op(jp.value, bar(jq.first[m])))
                for m in range(nc)])
        if self.order >= 2:
            second = np.empty((nc, nc, self.width), dtype=complex)
            for m in range(nc):
                for v2 in range(nc):
                    M = (op(jp.second[m, v2], bar(jq.value))
                         + op(jp.first[m], bar(jq.first[v2]))
                         + op(jp.first[v2], bar(jq.first[m]))
                         + op(jp.value, bar(jq.second[m, v2])))
                    second[m, v2] = dec(M)
        return Jet(val, first, second)


def bilinear(psi: JetField, phi: JetField) -> BilinearField:
    return BilinearField(psi, phi)


# -- first-order pieces shared with the Yano operators ----------------------


class CliffordProductField(JetField):
    """rep(w(x)) . s(x) for a form field w and spinor field s."""

    def __init__(self, w: JetField, s: JetField, scale: complex = 1.0):
        super().__init__(s.space, SPINOR, s.width, min(w.order, s.order),
                         "derived", rep=s.rep)
        self._w, self._s, self._scale = w, s, scale

    def _evaluate(self, x):
        rep = self.rep
        jw, js = self._w.jet(x), self._s.jet(x)
        c = self._scale
        val = c * rep.matrix(jw.value) @ js.value
        first = second = None
        nc = len(self.space.symbols)
        if self.order >= 1:
            first = np.stack([
                c * (rep.matrix(jw.first[m]) @ js.value
                     + rep.matrix(jw.value) @ js.first[m]) for m in range(nc)])
        if self.order >= 2:
            second = np.empty((nc, nc, self.width), dtype=complex)
            for m in range(nc):
                for v in range(nc):
                    second[m, v] = c * (
                        rep.matrix(jw.second[m, v]) @ js.value
                        + rep.matrix(jw.first[m]) @ js.first[v]
                        + rep.matrix(jw.first[v]) @ js.first[m]
                        + rep.matrix(jw.value) @ js.second[m, v])
        return Jet(val, first, second)


class ScalarTimesField(JetField):
    """Pointwise scalar-field multiple of another field."""

    def __init__(self, s: JetField, f: JetField):
        super().__init__(f.space, f.geometry, f.width, min(s.order, f.order),
                         "derived", rep=f.rep)
        self._s, self._f = s, f

    def _evaluate(self, x):
        js, jf = self._s.jet(x), self._f.jet(x)
        c = js.value[0]
        val = c * jf.value
        first = second = None
        nc = len(self.space.symbols)
        if self.order >= 1:
            first = np.stack([js.first[m][0] * jf.value + c * jf.first[m]
                              for m in range(nc)])
        if self.order >= 2:
            second = np.empty((nc, nc, self.width), dtype=complex)
            for m in range(nc):
                for v in range(nc):
                    second[m, v] = (js.second[m, v][0] * jf.value
                                    + js.first[m][0] * jf.first[v]
                                    + js.first[v][0] * jf.first[m]
                                    + c * jf.second[m, v])
        return Jet(val, first, second)


def lie_derivative_field(psi: JetField, K: JetField) -> JetField:
    """Spinorial Lie derivative along the Killing 1-form's dual vector:
    L_K psi = nabla_K psi + 1/4 (dK) . psi."""
    from .calculus import exterior_derivative_field

    sig = psi.space.sig
    parts = []
    for a in range(sig.n):
        Ka = MappedJetField(
            K, lambda v, a=a: np.array([sig.diag[a] * v[1 << a]]),
            geometry="scalars", width=1)
        parts.append(ScalarTimesField(Ka, covd_field(psi, a)))
    dK = exterior_derivative_field(K)
    parts.append(CliffordProductField(dK, psi, scale=0.25))
    return SumJetField(parts)


# -- geometric identities ---------------------------------------------------


def lichnerowicz_residual(psi: JetField, x) -> float:
    """|D^2 psi - (nabla^2 psi - R/4 psi)| with nabla^2 the Hessian trace."""
    from .calculus import hessian_trace

    frame = psi.space.frame(x)
    d2 = dirac(dirac_field(psi), x)
    box = hessian_trace(psi, x)
    rhs = box - 0.25 * frame.scalar * psi.value(x)
    return vnorm(d2 - rhs) / (vnorm(d2) + vnorm(rhs) + EPS)


# -- transport oracle -------------------------------------------------------


def killing_transport(space, rep: CliffordRep, lam: complex,
                      psi0: np.ndarray, path: list[tuple], steps: int = 400):
    """Integrate nabla_xdot psi = lam (xdot-dual) . psi along straight
    coordinate segments with fixed-step RK4; returns the transported value.

    Independent oracle for catalog Killing spinors: integrability is
    guaranteed by the curvature constraint, so the endpoint value must
    match the closed-form field wherever it was seeded consistently.
    """
    psi = np.asarray(psi0, dtype=complex)

    def rhs(x, v, direction):
        fr = space.frame(tuple(x))
        coeff = np.zeros(space.sig.dim, dtype=complex)
        smat = np.zeros((rep.dim, rep.dim), dtype=complex)
        for a in range(space.n):
            ea_dot = float(np.dot(fr.E[a], direction))
            coeff[1 << a] = space.sig.diag[a] * ea_dot
            smat = smat + ea_dot * rep.matrix(fr.sigma[a])
        return (lam * rep.matrix(coeff) - smat) @ v

    for x0, x1 in zip(path[:-1], path[1:]):
        x0 = np.asarray(x0, float)
        x1 = np.asarray(x1, float)
        direction = x1 - x0
        h = 1.0 / steps
        for k in range(steps):
            t = k * h
            xa = x0 + t * direction
            k1 = rhs(xa, psi, direction)
            k2 = rhs(x0 + (t + h / 2) * direction, psi + h / 2 * k1, direction)
            k3 = rhs(x0 + (t + h / 2) * direction, psi + h / 2 * k2, direction)
            k4 = rhs(x0 + (t + h) * direction, psi + h * k3, direction)
            psi = psi + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return psi
