"""Derivative operators on jet fields over a charted space.

The covariant derivative acts through the frame decomposition
nabla_{X_a} = X_a + (rotation generator action), where the generator in
direction a is sigma_a = 1/4 omega_{bc}(X_a) e^{bc}.  On Clifford-form
fields the generator acts by the Clifford commutator, on spinor columns by
left multiplication in the representation and on dual-spinor rows by right
multiplication with a minus sign.  Everything downstream (d, d^dagger,
Dirac, Hessians, first-order Yano operators) is composition of these
evaluations; derived fields keep one fewer derivative order than their
operand.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from . import algebra as al
from .algebra import Multivector
from .jets import DerivedJetField, FORM, SPINOR, DUAL_SPINOR, SCALARS, JetField

EPS = 1e-30


def _sigma_action(field: JetField, frame, c: int, vec: np.ndarray,
                  dmu: int | None = None) -> np.ndarray:
    """Action of the direction-c rotation generator (or its mu-partial)."""
    sig = field.space.sig
    s = frame.sigma[c] if dmu is None else frame.dsigma[dmu, c]
    if field.geometry == FORM:
        return al.mul_arrays(sig, s, vec) - al.mul_arrays(sig, vec, s)
    if field.geometry == SPINOR:
        return field.rep.matrix(s) @ vec
    if field.geometry == DUAL_SPINOR:
        return -(vec @ field.rep.matrix(s))
    if field.geometry == SCALARS:
        return np.zeros_like(vec)
    raise ValueError(f"unknown geometry {field.geometry!r}")


def covariant_derivative(F: JetField, a: int, x) -> np.ndarray:
    """Value of nabla_{X_a} F at x (coefficient vector)."""
    frame = F.space.frame(x)
    j = F.jet(x)
    if j.first is None:
        raise ValueError("field carries no first partials")
    val = np.tensordot(frame.Finv[:, a], j.first, axes=(0, 0))
    return val + _sigma_action(F, frame, a, j.value)


def covd_field(F: JetField, a: int) -> DerivedJetField:
    """nabla_{X_a} F as a field (one derivative order fewer)."""
    space = F.space
    nc = len(space.symbols)

    def value(x):
        return covariant_derivative(F, a, x)

    def first(x):
        frame = space.frame(x)
        j = F.jet(x)
        if j.second is None:
            raise ValueError("field carries no second partials")
        out = np.empty((nc, F.width), dtype=complex)
        for mu in range(nc):
            t = np.tensordot(frame.dFinv[mu, :, a], j.first, axes=(0, 0))
            t = t + np.tensordot(frame.Finv[:, a], j.second[mu], axes=(0, 0))
            t = t + _sigma_action(F, frame, a, j.value, dmu=mu)
            t = t + _sigma_action(F, frame, a, j.first[mu])
            out[mu] = t
        return out

    fld = DerivedJetField(space, F.geometry, F.width, value,
                          first if F.order >= 2 else None, rep=F.rep)
    fld.order = F.order - 1
    return fld


def _linear_map_field(F: JetField, fn, geometry=None) -> DerivedJetField:
    """Apply a constant linear map to a field's jets."""
    geometry = geometry or F.geometry

    def value(x):
        return fn(F.jet(x).value)

    def first(x):
        j = F.jet(x)
        return np.stack([fn(j.first[mu]) for mu in range(j.first.shape[0])])

    fld = DerivedJetField(F.space, geometry, F.width, value,
                          first if F.order >= 1 else None, rep=F.rep)
    fld.order = F.order
    return fld


def _combine(Fs, coeff_ops, geometry, width, space, rep=None, order=None):
    """Sum of constant-coefficient operators applied to derived fields."""

    def value(x):
        out = np.zeros(width, dtype=complex)
        for F, op in zip(Fs, coeff_ops):
            out += op(F.jet(x).value)
        return out

    def first(x):
        nc = len(space.symbols)
        out = np.zeros((nc, width), dtype=complex)
        for F, op in zip(Fs, coeff_ops):
            j = F.jet(x)
            for mu in range(nc):
                out[mu] += op(j.first[mu])
        return out

    omin = min(F.order for F in Fs) if order is None else order
    fld = DerivedJetField(space, geometry, width, value,
                          first if omin >= 1 else None, rep=rep)
    fld.order = omin
    return fld


def exterior_derivative_field(F: JetField) -> DerivedJetField:
    """d F = e^a wedge nabla_{X_a} F (Clifford-form fields)."""
    sig = F.space.sig
    covs = [covd_field(F, a) for a in range(sig.n)]
    ops = [lambda v, a=a: al.wedge_axis_arrays(sig, a, v) for a in range(sig.n)]
    return _combine(covs, ops, FORM, F.width, F.space)


def coderivative_field(F: JetField) -> DerivedJetField:
    """d^dagger F = -i_{X^a} nabla_{X_a} F."""
    sig = F.space.sig
    covs = [covd_field(F, a) for a in range(sig.n)]
    ops = [lambda v, a=a: -sig.diag[a] * al.contract_axis_arrays(sig, a, v)
           for a in range(sig.n)]
    return _combine(covs, ops, FORM, F.width, F.space)


def exterior_derivative(F: JetField, x) -> np.ndarray:
    return exterior_derivative_field(F).value(x)


def coderivative(F: JetField, x) -> np.ndarray:
    return coderivative_field(F).value(x)


def hodge_de_rham_field(F: JetField) -> DerivedJetField:
    """The d-slash operator d - d^dagger."""
    sig = F.space.sig
    covs = [covd_field(F, a) for a in range(sig.n)]

    def op(a):
        def run(v):
            return (al.wedge_axis_arrays(sig, a, v)
                    + sig.diag[a] * al.contract_axis_arrays(sig, a, v))
        return run

    return _combine(covs, [op(a) for a in range(sig.n)], FORM, F.width, F.space)


def nabla_dagger_field(F: JetField, a: int) -> DerivedJetField:
    """*^{-1} nabla_{X_a} (*(eta F)) as a field."""
    sig = F.space.sig
    G = _linear_map_field(
        F, lambda v: al.hodge_arrays(sig, al.involute_arrays(sig, v, "eta")))
    H = covd_field(G, a)
    return _linear_map_field(H, lambda v: al.hodge_arrays(sig, v, inverse=True))


def nabla_dagger(F: JetField, a: int, x) -> np.ndarray:
    return nabla_dagger_field(F, a).value(x)


def hessian(F: JetField, a: int, b: int, x) -> np.ndarray:
    """nabla^2(X_a, X_b) F = nabla_a nabla_b F - nabla_{nabla_a X_b} F."""
    frame = F.space.frame(x)
    out = covariant_derivative(covd_field(F, b), a, x)
    for c in range(F.space.n):
        w = frame.omega[a, c, b]
        if w != 0.0:
            out = out - w * covariant_derivative(F, c, x)
    return out


def hessian_trace(F: JetField, x) -> np.ndarray:
    sig = F.space.sig
    out = np.zeros(F.width, dtype=complex)
    for a in range(sig.n):
        out += sig.diag[a] * hessian(F, a, a, x)
    return out


def curvature_operator(F: JetField, a: int, b: int, x) -> np.ndarray:
    """R(X_a, X_b) F from the antisymmetrized Hessian."""
    return hessian(F, a, b, x) - hessian(F, b, a, x)


def curvature_action(F: JetField, a: int, b: int, x) -> np.ndarray:
    """Algebraic action of the curvature 2-forms: 1/4 R_{cd}(X_a,X_b) e^{cd}."""
    frame = F.space.frame(x)
    sig = F.space.sig
    rho = np.zeros(sig.dim, dtype=complex)
    for c in range(sig.n):
        for d in range(c + 1, sig.n):
            rho[(1 << c) | (1 << d)] = 0.5 * sig.diag[c] * frame.curvature[c, d, a, b]
    v = F.jet(x).value
    if F.geometry == FORM:
        return al.mul_arrays(sig, rho, v) - al.mul_arrays(sig, v, rho)
    if F.geometry == SPINOR:
        return F.rep.matrix(rho) @ v
    if F.geometry == DUAL_SPINOR:
        return -(v @ F.rep.matrix(rho))
    raise ValueError("curvature action undefined for this geometry")


def laplace_beltrami(F: JetField, x) -> np.ndarray:
    """d-slash squared: (d - d^dagger)^2 F."""
    return hodge_de_rham_field(hodge_de_rham_field(F)).value(x)


# -- alternation / cyclic identities --------------------------------------


def _nabla_eval(F: JetField, tup, x):
    """(nabla_{X_{t0}} Omega)(X_{t1}, ..., X_{tp}) in the p!-normalized sense."""
    mv = Multivector(F.space.sig, covariant_derivative(F, tup[0], x))
    return al.evaluate_form(mv, tuple(tup[1:]))


def alt_residual(F: JetField, x, grade: int, tuples=None) -> float:
    """Max deviation of (1 - Alt) nabla omega over argument tuples."""
    n = F.space.n
    p = grade
    if tuples is None:
        tuples = list(itertools.product(range(n), repeat=p + 1))
    worst = 0.0
    scale = 0.0
    vals = {t: _nabla_eval(F, t, x) for t in set(tuples)}
    for t in tuples:
        g = vals[t]
        scale = max(scale, abs(g))
        alt = 0.0
        for perm in itertools.permutations(range(p + 1)):
            sign = _perm_sign(perm)
            tt = tuple(t[i] for i in perm)
            alt += sign * vals.get(tt, _nabla_eval(F, tt, x))
        alt /= math.factorial(p + 1)
        worst = max(worst, abs(g - alt))
    return worst / (scale + EPS)


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def cyclic_d_identity(F: JetField, vectors: tuple[int, ...], x):
    """Both sides of the cyclic expansion of (e^a wedge nabla_{X_a} Omega).

    lhs: the (p+1)-form e^a wedge nabla_a Omega evaluated on the vectors;
    rhs: 1/(p+1) sum_k (-1)^{kp} of the covariant-differential evaluations
    with the argument tuple cyclically rotated (derivative slot first).
    """
    p = len(vectors) - 1
    mv = Multivector(F.space.sig, exterior_derivative(F, x))
    lhs = al.evaluate_form(mv, tuple(vectors))
    rhs = 0.0
    t = list(vectors)
    for k in range(p + 1):
        rot = tuple(np.roll(t, k))
        rhs += (-1) ** (k * p) * _nabla_eval(F, rot, x)
    rhs /= (p + 1)
    return lhs, rhs


# -- residual helpers ------------------------------------------------------


def vnorm(v: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(v, dtype=complex)))


def rel_residual(lhs: np.ndarray, rhs: np.ndarray) -> float:
    return vnorm(lhs - rhs) / (vnorm(lhs) + vnorm(rhs) + EPS)
