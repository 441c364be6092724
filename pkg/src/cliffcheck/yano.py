"""Killing-Yano machinery: residual checkers, the CKY constructor,
first-order symmetry operators and their graded commutation probes.

Residuals are two-route wherever the defining equation has an equivalent
covariant-differential form: route 1 is the pointwise frame equation,
route 2 the tuple-evaluated (nabla - d) or its Hodge-conjugated version.
First-order operators are evaluated by composing jet fields, never by
symbolic manipulation, so D-slash/operator compositions reuse the same
machinery.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dfield

import numpy as np

from . import algebra as al
from .algebra import Multivector
from .calculus import (EPS, coderivative_field, covariant_derivative,
                       covd_field, exterior_derivative_field, vnorm)
from .jets import FORM, JetField, MappedJetField, SumJetField
from .spinors import CliffordProductField, bar_field, dirac, dirac_field


def grade_component(F: JetField, p: int) -> JetField:
    sig = F.space.sig
    return MappedJetField(F, lambda v: al.grade_project_arrays(sig, v, p))


def present_grades(F: JetField, points, floor: float = 1e-10) -> list[int]:
    """Grades carried by the field, judged over sample points."""
    sig = F.space.sig
    tabs = al._tables(sig.diag)
    mass = np.zeros(sig.n + 1)
    total = 0.0
    for x in points:
        v = np.abs(F.value(x))
        total = max(total, float(v.max(initial=0.0)))
        for p in range(sig.n + 1):
            mass[p] = max(mass[p], float(v[tabs["grades"] == p].max(initial=0.0)))
    return [p for p in range(sig.n + 1) if mass[p] > floor * max(total, 1.0)]


def _single_grade(F: JetField, x) -> int:
    grades = Multivector(F.space.sig, F.value(x)).grades_present(1e-12)
    if len(grades) != 1:
        raise ValueError("inhomogeneous form: split by grade first")
    return grades.pop()


# -- residual checkers -------------------------------------------------------


def ky_residual_routes(w: JetField, x, grade: int | None = None):
    """Both routes of the Killing-Yano check at x."""
    sig = w.space.sig
    p = _single_grade(w, x) if grade is None else grade
    covs = [covariant_derivative(w, a, x) for a in range(sig.n)]
    dw = exterior_derivative_field(w).value(x)
    scale = sum(vnorm(c) for c in covs) + vnorm(w.value(x)) + EPS

    r1 = 0.0
    for a in range(sig.n):
        rhs = al.contract_axis_arrays(sig, a, dw) / (p + 1)
        r1 = max(r1, vnorm(covs[a] - rhs))

    r2 = 0.0
    dmv = Multivector(sig, dw)
    for tup in itertools.product(range(sig.n), repeat=p + 1):
        lhs = al.evaluate_form(Multivector(sig, covs[tup[0]]), tup[1:])
        rhs = al.evaluate_form(dmv, tup)
        r2 = max(r2, abs(lhs - rhs))
    return r1 / scale, r2 / scale


def ky_residual(w: JetField, x, grade: int | None = None) -> float:
    return max(ky_residual_routes(w, x, grade))


def ccky_residual_routes(w: JetField, x, grade: int | None = None):
    sig = w.space.sig
    p = _single_grade(w, x) if grade is None else grade
    covs = [covariant_derivative(w, a, x) for a in range(sig.n)]
    cdw = coderivative_field(w).value(x)
    scale = sum(vnorm(c) for c in covs) + vnorm(w.value(x)) + EPS

    r1 = 0.0
    for a in range(sig.n):
        rhs = -sig.diag[a] * al.wedge_axis_arrays(sig, a, cdw) / (sig.n - p + 1)
        r1 = max(r1, vnorm(covs[a] - rhs))

    # route 2: (nabla^dagger - d^dagger) w = 0, i.e. the (nabla - d) tuple
    # check applied to the Hodge-conjugated field *(eta w)
    chi = MappedJetField(w, lambda v: al.hodge_arrays(
        sig, al.involute_arrays(sig, v, "eta")))
    q = sig.n - p
    dchi = Multivector(sig, exterior_derivative_field(chi).value(x))
    r2 = 0.0
    for tup in itertools.product(range(sig.n), repeat=q + 1):
        cov = Multivector(sig, covariant_derivative(chi, tup[0], x))
        lhs = al.evaluate_form(cov, tup[1:])
        rhs = al.evaluate_form(dchi, tup)
        r2 = max(r2, abs(lhs - rhs))
    return r1 / scale, r2 / scale


def ccky_residual(w: JetField, x, grade: int | None = None) -> float:
    return max(ccky_residual_routes(w, x, grade))


def cky_residual(w: JetField, x, grade: int | None = None) -> float:
    """Conformal Killing-Yano residual (interpolating equation)."""
    sig = w.space.sig
    p = _single_grade(w, x) if grade is None else grade
    dw = exterior_derivative_field(w).value(x)
    cdw = coderivative_field(w).value(x)
    scale = vnorm(w.value(x)) + EPS
    worst = 0.0
    for a in range(sig.n):
        lhs = covariant_derivative(w, a, x)
        rhs = (al.contract_axis_arrays(sig, a, dw) / (p + 1)
               - sig.diag[a] * al.wedge_axis_arrays(sig, a, cdw) / (sig.n - p + 1))
        scale = max(scale, vnorm(lhs) + vnorm(rhs))
        worst = max(worst, vnorm(lhs - rhs))
    return worst / (scale + EPS)


_RESIDUALS = {"KY": ky_residual, "CCKY": ccky_residual, "CKY": cky_residual}


@dataclass
class YanoForm:
    """A verified form field with its claimed kind."""

    field: JetField
    claimed_kind: str        # KY | CCKY | CKY | parallel | none
    grade: int
    name: str = ""
    grade_mask: frozenset = dfield(default_factory=frozenset)

    def verify(self, points, tol: float = 1e-7) -> "YanoForm":
        if self.claimed_kind == "parallel":
            for x in points:
                mx = max(vnorm(covariant_derivative(self.field, a, x))
                         for a in range(self.field.space.n))
                if mx > tol * (vnorm(self.field.value(x)) + EPS):
                    raise ValueError(f"{self.name or 'form'} is not parallel")
            return self
        if self.claimed_kind in _RESIDUALS:
            check = _RESIDUALS[self.claimed_kind]
            for x in points:
                r = check(self.field, x, self.grade)
                if r > tol:
                    raise ValueError(
                        f"{self.name or 'form'} fails the {self.claimed_kind} "
                        f"residual at {x}: {r:.3e}")
        return self


def hodge_dual_form(w: YanoForm) -> YanoForm:
    """The Hodge dual: KY <-> CCKY, parallel stays parallel."""
    sig = w.field.space.sig
    dual_field = MappedJetField(w.field, lambda v: al.hodge_arrays(sig, v))
    kind = {"KY": "CCKY", "CCKY": "KY"}.get(w.claimed_kind, w.claimed_kind)
    return YanoForm(dual_field, kind, sig.n - w.grade, name=f"*{w.name}")


def build_cky(ky: YanoForm, ccky: YanoForm, points=(), tol: float = 1e-7) -> YanoForm:
    """rho = omega + omega-hat, the trivial CKY constructor."""
    if ky.grade != ccky.grade:
        raise ValueError("KY and CCKY summands must have equal grade")
    if ky.claimed_kind not in ("KY", "parallel"):
        raise ValueError("first argument must be a KY (or parallel) form")
    if ccky.claimed_kind not in ("CCKY", "parallel"):
        raise ValueError("second argument must be a CCKY (or parallel) form")
    ky.verify(points, tol)
    ccky.verify(points, tol)
    out = SumJetField([ky.field, ccky.field])
    return YanoForm(out, "CKY", ky.grade, name=f"{ky.name}+{ccky.name}")


def build_selfdual_cky(sigma: YanoForm, base_point) -> tuple[JetField, complex]:
    """Self-dual / anti-self-dual inhomogeneous CKY from a unit Yano form.

    Returns the field and its Hodge eigenvalue: alpha + *alpha with
    eigenvalue +1 when **=+1, i alpha + *alpha with eigenvalue i when
    **=-1.  Normalization is the pointwise g-norm at the chart base point.
    """
    sig = sigma.field.space.sig
    p = sigma.grade
    tabs = al._tables(sig.diag)
    v0 = sigma.field.value(base_point)
    q = float(np.sum(np.abs(v0) ** 2 * tabs["blade_square"]))
    if abs(q) < EPS:
        raise ValueError("cannot normalize a null Yano form at the base point")
    unit = MappedJetField(sigma.field, lambda v: v / math.sqrt(abs(q)))
    square = (-1) ** (p * (sig.n - p)) * sig.epsilon
    star = MappedJetField(unit, lambda v: al.hodge_arrays(sig, v))
    if square == 1:
        return SumJetField([unit, star]), 1.0
    return SumJetField([unit, star], [1j, 1.0]), 1j


# -- first-order operators ---------------------------------------------------


@dataclass
class FirstOrderOp:
    """L (KY), L-hat (CCKY) or L_rho (CKY) with precomputed d/d-dagger fields."""

    kind: str            # L | Lhat | Lrho
    form: YanoForm
    dform: JetField
    cdform: JetField
    grades: tuple[int, ...]

    _KIND_NEEDS = {"L": ("KY", "parallel"), "Lhat": ("CCKY", "parallel"),
                   "Lrho": ("KY", "CCKY", "CKY", "parallel")}

    @classmethod
    def make(cls, kind: str, form: YanoForm, points=(), tol: float = 1e-7):
        if form.claimed_kind not in cls._KIND_NEEDS[kind]:
            raise ValueError(
                f"{kind} needs one of {cls._KIND_NEEDS[kind]}, "
                f"got {form.claimed_kind}")
        form.verify(points, tol)
        grades = tuple(sorted(form.grade_mask)) or (form.grade,)
        return cls(kind, form, exterior_derivative_field(form.field),
                   coderivative_field(form.field), grades)

    def applied(self, psi: JetField) -> JetField:
        """The operator as a derived spinor field (grade-split evaluation)."""
        sig = psi.space.sig
        parts = []
        for p in self.grades:
            wp = grade_component(self.form.field, p)
            for a in range(sig.n):
                wa = MappedJetField(
                    wp, lambda v, a=a: sig.diag[a] * al.contract_axis_arrays(
                        sig, a, v))
                parts.append(CliffordProductField(wa, covd_field(psi, a)))
            if self.kind in ("L", "Lrho"):
                dw = grade_component(self.dform, p + 1)
                parts.append(CliffordProductField(
                    dw, psi, scale=p / (2 * (p + 1))))
            if self.kind in ("Lhat", "Lrho"):
                cdw = grade_component(self.cdform, p - 1)
                parts.append(CliffordProductField(
                    cdw, psi, scale=-(sig.n - p) / (2 * (sig.n - p + 1))))
        return SumJetField(parts)


def apply_L(op: FirstOrderOp, psi: JetField, x) -> np.ndarray:
    if op.kind != "L":
        raise ValueError("operator is not an L (KY) operator")
    return op.applied(psi).value(x)


def apply_Lhat(op: FirstOrderOp, psi: JetField, x) -> np.ndarray:
    if op.kind != "Lhat":
        raise ValueError("operator is not an L-hat (CCKY) operator")
    return op.applied(psi).value(x)


def apply_Lrho(op: FirstOrderOp, psi: JetField, x) -> np.ndarray:
    if op.kind != "Lrho":
        raise ValueError("operator is not an L_rho (CKY) operator")
    return op.applied(psi).value(x)


def commutation_probe(op: FirstOrderOp, psi: JetField, x):
    """Normalized Clifford commutator and anti-commutator residuals of the
    operator with the Dirac operator on psi."""
    t1 = dirac(op.applied(psi), x)
    t2 = op.applied(dirac_field(psi)).value(x)
    scale = vnorm(t1) + vnorm(t2) + EPS
    return vnorm(t1 - t2) / scale, vnorm(t1 + t2) / scale


# -- adjoint (star) identities ----------------------------------------------


def star_op_identities(form: YanoForm, psi: JetField, x):
    """Residual pair for the Hodge-conjugated first-order operators.

    For a KY form omega (grade p):
        *(L_omega psi) = (-1)^{p-1} [ (e^a ^ *omega) nabla_a
                                      + p/(2(p+1)) d-dagger *omega ] psi-bar-side
    and for a CCKY form (grade p):
        *(L-hat psi)   = (-1)^{p-1} [ (e^a ^ *omega-hat) nabla_a
                                      + (n-p)/(2(n-p+1)) d *omega-hat ] psi-bar-side
    evaluated in the dual-spinor (row) realization, where the coefficient
    forms act from the right through the representation.  The grade
    prefactor reduces to +1 for odd p, and to the (-1)^{n-p+1} form on
    even-dimensional spaces.
    """
    if form.claimed_kind == "KY":
        ky_form, ccky_form = form, hodge_dual_form(form)
    elif form.claimed_kind == "CCKY":
        ky_form, ccky_form = hodge_dual_form(form), form
    else:  # parallel forms are simultaneously KY and CCKY
        ky_form = ccky_form = form

    res1 = star_op_identities_single(ky_form, psi, x, "L")
    res2 = star_op_identities_single(ccky_form, psi, x, "Lhat")
    return res1, res2


def star_op_identities_single(form: YanoForm, psi: JetField, x, op_kind: str):
    rep = psi.rep
    if rep.adjoint_involution != "xi":
        raise ValueError("star identities need a xi-compatible spinor adjoint")
    sig = psi.space.sig
    Z = rep.volume_matrix
    rowbar = bar_field(psi)
    p = form.grade
    pre = (-1) ** (p - 1)
    star_form = MappedJetField(form.field, lambda v: al.hodge_arrays(sig, v))

    if op_kind == "L":
        op = FirstOrderOp.make("L", form)
        c = p / (2 * (p + 1))
        tail = coderivative_field(star_form).value(x)
    else:
        op = FirstOrderOp.make("Lhat", form)
        c = (sig.n - p) / (2 * (sig.n - p + 1))
        tail = exterior_derivative_field(star_form).value(x)

    lhs = (op.applied(psi).value(x).conj() @ rep.A) @ Z
    sw = star_form.value(x)
    rhs = np.zeros(rep.dim, dtype=complex)
    for a in range(sig.n):
        coeff = al.wedge_axis_arrays(sig, a, sw)
        rhs = rhs + covariant_derivative(rowbar, a, x) @ rep.matrix(coeff)
    rhs = rhs + c * (rowbar.value(x) @ rep.matrix(tail))
    rhs = pre * rhs
    return vnorm(lhs - rhs) / (vnorm(lhs) + vnorm(rhs) + EPS)
