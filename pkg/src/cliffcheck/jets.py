"""Point-indexed fields carrying first and second coordinate partials.

Every field evaluates to a Jet: a coefficient vector (multivector blades,
spinor components or dual-spinor components) together with its first and,
when available, second partials with respect to the chart coordinates.
Second-order operator compositions consume one derivative order per
application, so a 2-jet field supports e.g. Dirac-of-first-order-operator
evaluations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

# geometry tags: how the connection acts on the value
FORM = "form"
SPINOR = "spinor"
DUAL_SPINOR = "dual-spinor"
SCALARS = "scalars"  # plain component array, no connection action


@dataclass(frozen=True)
class Jet:
    value: np.ndarray                 # (k,)
    first: np.ndarray | None = None   # (nc, k)
    second: np.ndarray | None = None  # (nc, nc, k)

    @property
    def order(self) -> int:
        if self.second is not None:
            return 2
        if self.first is not None:
            return 1
        return 0


class JetField:
    """Base field: evaluator Point -> Jet.

    kind is one of closed-form, polynomial, finite-difference, derived;
    it is carried into reports as provenance.
    """

    def __init__(self, space, geometry: str, width: int, order: int, kind: str,
                 rep=None):
        self.space = space
        self.geometry = geometry
        self.width = width
        self.order = order
        self.kind = kind
        self.rep = rep
        self._cache: dict[tuple, Jet] = {}

    def _evaluate(self, x: tuple) -> Jet:  # pragma: no cover - abstract
        raise NotImplementedError

    def jet(self, x) -> Jet:
        x = tuple(float(v) for v in x)
        hit = self._cache.get(x)
        if hit is None:
            if len(self._cache) > 8192:
                self._cache.clear()
            hit = self._evaluate(x)
            self._cache[x] = hit
        return hit

    def value(self, x) -> np.ndarray:
        return self.jet(x).value


class SympyJetField(JetField):
    """Closed-form field: sympy component expressions, exact lambdified jets."""

    def __init__(self, space, geometry, exprs, order=2, rep=None, kind="closed-form"):
        exprs = [sp.sympify(e) for e in exprs]
        super().__init__(space, geometry, len(exprs), order, kind, rep=rep)
        coords = space.symbols
        nc = len(coords)
        vec = sp.Matrix(exprs)
        self._f = sp.lambdify(coords, vec, modules="numpy")
        if order >= 1:
            jac = [[sp.diff(e, c) for e in exprs] for c in coords]
            self._j = sp.lambdify(coords, jac, modules="numpy")
        if order >= 2:
            hess = [[[sp.diff(e, c1, c2) for e in exprs] for c2 in coords]
                    for c1 in coords]
            self._h = sp.lambdify(coords, hess, modules="numpy")
        self._nc = nc

    def _evaluate(self, x):
        val = np.asarray(self._f(*x), dtype=complex).reshape(self.width)
        first = second = None
        if self.order >= 1:
            first = np.asarray(self._j(*x), dtype=complex).reshape(self._nc, self.width)
        if self.order >= 2:
            second = np.asarray(self._h(*x), dtype=complex).reshape(
                self._nc, self._nc, self.width)
        return Jet(val, first, second)


class PolynomialJetField(JetField):
    """Coordinate-polynomial field with exact analytic jets.

    Coefficients live in a dict {exponent tuple: (k,) vector}.
    """

    def __init__(self, space, geometry, terms: dict[tuple, np.ndarray], width,
                 rep=None):
        super().__init__(space, geometry, width, 2, "polynomial", rep=rep)
        self.terms = {tuple(int(e) for e in k): np.asarray(v, dtype=complex)
                      for k, v in terms.items()}
        self._nc = len(space.symbols)

    def _mono(self, expo, x):
        out = 1.0
        for e, xv in zip(expo, x):
            out *= xv ** e
        return out

    def _devalue(self, expo, x, mu):
        if expo[mu] == 0:
            return 0.0
        e2 = list(expo)
        e2[mu] -= 1
        return expo[mu] * self._mono(tuple(e2), x)

    def _d2value(self, expo, x, mu, nu):
        if expo[mu] == 0:
            return 0.0
        e2 = list(expo)
        e2[mu] -= 1
        if e2[nu] == 0:
            return 0.0
        e3 = list(e2)
        e3[nu] -= 1
        return expo[mu] * e2[nu] * self._mono(tuple(e3), x)

    def _evaluate(self, x):
        nc, k = self._nc, self.width
        val = np.zeros(k, dtype=complex)
        first = np.zeros((nc, k), dtype=complex)
        second = np.zeros((nc, nc, k), dtype=complex)
        for expo, vec in self.terms.items():
            val += self._mono(expo, x) * vec
            for mu in range(nc):
                d1 = self._devalue(expo, x, mu)
                if d1 != 0.0:
                    first[mu] += d1 * vec
                for nu in range(nc):
                    d2 = self._d2value(expo, x, mu, nu)
                    if d2 != 0.0:
                        second[mu, nu] += d2 * vec
        return Jet(val, first, second)


class ConstantJetField(JetField):
    def __init__(self, space, geometry, vector, rep=None):
        vector = np.asarray(vector, dtype=complex)
        super().__init__(space, geometry, vector.shape[0], 2, "closed-form", rep=rep)
        self._vec = vector
        self._nc = len(space.symbols)

    def _evaluate(self, x):
        k, nc = self.width, self._nc
        return Jet(self._vec.copy(),
                   np.zeros((nc, k), dtype=complex),
                   np.zeros((nc, nc, k), dtype=complex))


class CallableJetField(JetField):
    """Analytic field given by explicit jet callables (value/first/second)."""

    def __init__(self, space, geometry, width, value_fn, first_fn=None,
                 second_fn=None, rep=None, kind="closed-form"):
        order = 0 + (first_fn is not None) + (second_fn is not None)
        super().__init__(space, geometry, width, order, kind, rep=rep)
        self._fns = (value_fn, first_fn, second_fn)

    def _evaluate(self, x):
        v, f, s = self._fns
        return Jet(np.asarray(v(x), dtype=complex),
                   None if f is None else np.asarray(f(x), dtype=complex),
                   None if s is None else np.asarray(s(x), dtype=complex))


class DerivedJetField(CallableJetField):
    """Operator-composition field; order tracks remaining derivatives."""

    def __init__(self, space, geometry, width, value_fn, first_fn=None, rep=None):
        super().__init__(space, geometry, width, value_fn, first_fn,
                         None, rep=rep, kind="derived")


class MappedJetField(JetField):
    """Pointwise constant (anti)linear map of another field's jets."""

    def __init__(self, F: JetField, fn, geometry=None, width=None, rep=None):
        super().__init__(F.space, geometry or F.geometry,
                         width or F.width, F.order, F.kind,
                         rep=rep if rep is not None else F.rep)
        self._F = F
        self._fn = fn

    def _evaluate(self, x):
        j = self._F.jet(x)
        fn = self._fn
        first = second = None
        if j.first is not None:
            first = np.stack([fn(row) for row in j.first])
        if j.second is not None:
            nc = j.second.shape[0]
            second = np.stack([np.stack([fn(j.second[m, v]) for v in range(nc)])
                               for m in range(nc)])
        return Jet(fn(j.value), first, second)


class SumJetField(JetField):
    """Linear combination of fields of the same geometry and width."""

    def __init__(self, parts, coeffs=None):
        lead = parts[0]
        coeffs = [1.0] * len(parts) if coeffs is None else list(coeffs)
        order = min(p.order for p in parts)
        kind = lead.kind if all(p.kind == lead.kind for p in parts) else "derived"
        super().__init__(lead.space, lead.geometry, lead.width, order, kind,
                         rep=lead.rep)
        self._parts = list(zip(parts, coeffs))

    def _evaluate(self, x):
        jets = [(c, f.jet(x)) for f, c in self._parts]
        val = sum(c * j.value for c, j in jets)
        first = second = None
        if self.order >= 1:
            first = sum(c * j.first for c, j in jets)
        if self.order >= 2:
            second = sum(c * j.second for c, j in jets)
        return Jet(val, first, second)


class FiniteDifferenceJetField(JetField):
    """Central-difference fallback around a value-only evaluator.

    One Richardson level on the first partials; plain central stencil for
    the second. Tolerance contract degrades to 1e-5 and the kind flag is
    carried into reports.
    """

    def __init__(self, space, geometry, width, value_fn, step=1e-5, rep=None):
        super().__init__(space, geometry, width, 2, "finite-difference", rep=rep)
        self.step = float(step)
        self._fn = value_fn
        self._nc = len(space.symbols)

    def _shift(self, x, mu, d):
        y = list(x)
        y[mu] += d
        return tuple(y)

    def _evaluate(self, x):
        h = self.step
        f = lambda p: np.asarray(self._fn(p), dtype=complex)
        val = f(x)
        nc, k = self._nc, self.width
        first = np.zeros((nc, k), dtype=complex)
        for mu in range(nc):
            d1 = (f(self._shift(x, mu, h)) - f(self._shift(x, mu, -h))) / (2 * h)
            d2 = (f(self._shift(x, mu, h / 2)) - f(self._shift(x, mu, -h / 2))) / h
            first[mu] = (4 * d2 - d1) / 3  # one Richardson extrapolation level
        second = np.zeros((nc, nc, k), dtype=complex)
        for mu in range(nc):
            second[mu, mu] = (f(self._shift(x, mu, h)) - 2 * val
                              + f(self._shift(x, mu, -h))) / h**2
            for nu in range(mu + 1, nc):
                pp = f(self._shift(self._shift(x, mu, h), nu, h))
                pm = f(self._shift(self._shift(x, mu, h), nu, -h))
                mp = f(self._shift(self._shift(x, mu, -h), nu, h))
                mm = f(self._shift(self._shift(x, mu, -h), nu, -h))
                second[mu, nu] = second[nu, mu] = (pp - pm - mp + mm) / (4 * h**2)
        return Jet(val, first, second)


def mixed_partial_asymmetry(field: JetField, x) -> float:
    """Max |d_mu d_nu - d_nu d_mu| of the jet, for the symmetry invariant."""
    j = field.jet(x)
    if j.second is None:
        raise ValueError("field does not carry second partials")
    return float(np.max(np.abs(j.second - np.swapaxes(j.second, 0, 1))))


def random_polynomial_field(space, geometry, width, rng, max_degree=2,
                            rep=None, scale=1.0) -> PolynomialJetField:
    """Seeded random coordinate-polynomial field with exact jets."""
    if max_degree > 4:
        raise ValueError("max_degree <= 4")
    nc = len(space.symbols)
    terms = {}
    for expo in itertools.product(range(max_degree + 1), repeat=nc):
        if sum(expo) > max_degree:
            continue
        coef = rng.standard_normal(width) + 1j * rng.standard_normal(width)
        terms[expo] = scale * coef
    return PolynomialJetField(space, geometry, terms, width, rep=rep)
