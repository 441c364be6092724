"""Dense multivector algebra over an orthonormal frame of arbitrary signature.

Conventions used throughout the package:

* frame 1-forms e^a are orthonormal, e^a e^b + e^b e^a = 2 g^{ab} with
  g^{ab} = diag(sig) = +/-1,
* blades are bitmasks (bit a set <=> the blade contains e^a), stored in
  canonical ascending order,
* the Hodge map is *u = u^xi z with z = e^1...e^n the volume form, so that
  ** = (-1)^{p(n-p)} eps(g) on grade p,
* eta is the main automorphism ((-1)^p per grade), xi the main
  anti-automorphism ((-1)^{p(p-1)/2}).

Coefficients are complex by default; any Python ring element (e.g.
fractions.Fraction) works through the object-dtype path, which is the
exact-rational test mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_DIMENSION = 12


@dataclass(frozen=True)
class Signature:
    """Quadratic-space signature: diag(g) in the orthonormal frame."""

    diag: tuple[int, ...]

    def __post_init__(self):
        if not self.diag:
            raise ValueError("signature needs at least one dimension")
        if len(self.diag) > MAX_DIMENSION:
            raise ValueError(f"dense storage limited to n <= {MAX_DIMENSION}")
        if any(d not in (-1, 1) for d in self.diag):
            raise ValueError("signature entries must be +1 or -1")

    @property
    def n(self) -> int:
        return len(self.diag)

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def epsilon(self) -> int:
        """det(g)/|det(g)| for the frame metric."""
        e = 1
        for d in self.diag:
            e *= d
        return e

    @property
    def volume_blade(self) -> int:
        return self.dim - 1

    def volume_square(self) -> int:
        """Scalar value of z^2, the closed form (-1)^{n(n-1)/2} eps(g)."""
        return (-1) ** (self.n * (self.n - 1) // 2) * self.epsilon


def euclidean(n: int) -> Signature:
    return Signature((1,) * n)


def lorentzian(n: int) -> Signature:
    return Signature((-1,) + (1,) * (n - 1))


def negative_definite(n: int) -> Signature:
    return Signature((-1,) * n)


def grade_of(blade: int) -> int:
    return bin(blade).count("1")


@lru_cache(maxsize=32)
def _tables(diag: tuple[int, ...]):
    """Precomputed sign/index tables for one signature."""
    sig = Signature(diag)
    n, dim = sig.n, sig.dim
    idx = np.arange(dim)
    grades = np.array([grade_of(b) for b in range(dim)], dtype=np.int8)
    pc = grades.astype(np.int64)  # popcount lookup by mask

    a = idx[:, None]
    b = idx[None, :]
    swaps = np.zeros((dim, dim), dtype=np.int64)
    for k in range(1, n):
        swaps += pc[(a >> k) & b]
    reorder = np.where(swaps % 2 == 0, 1, -1).astype(np.int8)

    metric_prod = np.ones(dim, dtype=np.int8)
    for mask in range(1, dim):
        low = mask & -mask
        metric_prod[mask] = metric_prod[mask ^ low] * diag[low.bit_length() - 1]

    signs = (reorder * metric_prod[a & b]).astype(np.int8)
    wsigns = np.where((a & b) == 0, reorder, 0).astype(np.int8)
    xors = (a ^ b).astype(np.int64)
    ors = (a | b).astype(np.int64)

    # i_{X_a} / e^a-insertion parity: bits of the blade below a
    below = np.zeros((n, dim), dtype=np.int8)
    for ax in range(n):
        below[ax] = np.where(pc[idx & ((1 << ax) - 1)] % 2 == 0, 1, -1)

    return {
        "sig": sig,
        "grades": grades,
        "signs": signs,
        "wsigns": wsigns,
        "xors": xors,
        "ors": ors,
        "below": below,
        "blade_square": np.diagonal(signs).copy(),
    }


def blade_mul(a: int, b: int, sig: Signature) -> tuple[int, int]:
    """Clifford product of two basis blades: (sign, result blade)."""
    dim = sig.dim
    if not (0 <= a < dim and 0 <= b < dim):
        raise ValueError("blade index out of range for signature")
    t = _tables(sig.diag)
    return int(t["signs"][a, b]), a ^ b


def _is_exact(x: np.ndarray) -> bool:
    return x.dtype == object


def _zero_like(sig: Signature, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty(sig.dim, dtype=object)
        out[:] = 0
        return out
    return np.zeros(sig.dim, dtype=complex)


def mul_arrays(sig: Signature, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    t = _tables(sig.diag)
    exact = _is_exact(x) or _is_exact(y)
    out = _zero_like(sig, exact)
    if exact:
        for i in np.nonzero(x)[0]:
            xi = x[i]
            for j in np.nonzero(y)[0]:
                out[i ^ j] += int(t["signs"][i, j]) * xi * y[j]
        return out
    prod = np.multiply.outer(x, y) * t["signs"]
    np.add.at(out, t["xors"], prod)
    return out


def wedge_arrays(sig: Signature, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    t = _tables(sig.diag)
    exact = _is_exact(x) or _is_exact(y)
    out = _zero_like(sig, exact)
    if exact:
        for i in np.nonzero(x)[0]:
            for j in np.nonzero(y)[0]:
                s = int(t["wsigns"][i, j])
                if s:
                    out[i | j] += s * x[i] * y[j]
        return out
    prod = np.multiply.outer(x, y) * t["wsigns"]
    np.add.at(out, t["ors"], prod)
    return out


def contract_axis_arrays(sig: Signature, a: int, x: np.ndarray) -> np.ndarray:
    """i_{X_a} x for the frame vector X_a (no metric factor)."""
    t = _tables(sig.diag)
    bit = 1 << a
    out = _zero_like(sig, _is_exact(x))
    src = np.nonzero(np.arange(sig.dim) & bit)[0]
    out[src ^ bit] = t["below"][a][src] * x[src]
    return out


def wedge_axis_arrays(sig: Signature, a: int, x: np.ndarray) -> np.ndarray:
    """e^a wedge x."""
    t = _tables(sig.diag)
    bit = 1 << a
    out = _zero_like(sig, _is_exact(x))
    src = np.nonzero((np.arange(sig.dim) & bit) == 0)[0]
    out[src ^ bit] = t["below"][a][src] * x[src]
    return out


def grade_project_arrays(sig: Signature, x: np.ndarray, p: int) -> np.ndarray:
    t = _tables(sig.diag)
    out = x.copy()
    out[t["grades"] != p] = 0
    return out


_INVOLUTION_SIGNS = {
    "eta": lambda p: (-1) ** p,
    "xi": lambda p: (-1) ** (p * (p - 1) // 2),
    "etaxi": lambda p: (-1) ** (p * (p + 1) // 2),
}


def involute_arrays(sig: Signature, x: np.ndarray, kind: str) -> np.ndarray:
    try:
        fn = _INVOLUTION_SIGNS[kind]
    except KeyError:
        raise ValueError(f"unknown involution {kind!r}") from None
    t = _tables(sig.diag)
    signs = np.array([fn(int(p)) for p in t["grades"]], dtype=np.int8)
    return x * signs


def hodge_arrays(sig: Signature, x: np.ndarray, inverse: bool = False) -> np.ndarray:
    """*x = x^xi z, or the inverse map."""
    t = _tables(sig.diag)
    y = involute_arrays(sig, x, "xi")
    if inverse:
        # *^{-1} on grade p equals (-1)^{p(n-p)} eps(g) *
        grades = t["grades"].astype(int)
        pre = np.array(
            [(-1) ** (p * (sig.n - p)) * sig.epsilon for p in grades], dtype=np.int8
        )
        y = y * pre
    zcol = t["signs"][:, sig.volume_blade]
    out = _zero_like(sig, _is_exact(x))
    out[np.arange(sig.dim) ^ sig.volume_blade] = y * zcol
    return out


@dataclass(frozen=True)
class Multivector:
    """Inhomogeneous Clifford form: coefficients over 2^n orthonormal blades."""

    sig: Signature
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        if c.shape != (self.sig.dim,):
            raise ValueError("coefficient array must have length 2^n")
        if c.dtype != object and c.dtype != complex:
            c = c.astype(complex)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, sig: Signature) -> "Multivector":
        return cls(sig, np.zeros(sig.dim, dtype=complex))

    @classmethod
    def scalar(cls, sig: Signature, value) -> "Multivector":
        c = np.zeros(sig.dim, dtype=complex)
        c[0] = value
        return cls(sig, c)

    @classmethod
    def blade(cls, sig: Signature, blade: int, value=1.0) -> "Multivector":
        c = np.zeros(sig.dim, dtype=complex)
        c[blade] = value
        return cls(sig, c)

    @classmethod
    def basis_form(cls, sig: Signature, a: int) -> "Multivector":
        """The frame 1-form e^a."""
        return cls.blade(sig, 1 << a)

    @classmethod
    def volume(cls, sig: Signature) -> "Multivector":
        return cls.blade(sig, sig.volume_blade)

    def _like(self, coeffs: np.ndarray) -> "Multivector":
        return Multivector(self.sig, coeffs)

    def _check(self, other: "Multivector"):
        if self.sig != other.sig:
            raise ValueError("signature mismatch")

    def __add__(self, other: "Multivector") -> "Multivector":
        self._check(other)
        return self._like(self.coeffs + other.coeffs)

    def __sub__(self, other: "Multivector") -> "Multivector":
        self._check(other)
        return self._like(self.coeffs - other.coeffs)

    def __neg__(self) -> "Multivector":
        return self._like(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Multivector):
            self._check(other)
            return self._like(mul_arrays(self.sig, self.coeffs, other.coeffs))
        return self._like(self.coeffs * other)

    def __rmul__(self, scalar) -> "Multivector":
        return self._like(scalar * self.coeffs)

    def __xor__(self, other: "Multivector") -> "Multivector":
        self._check(other)
        return self._like(wedge_arrays(self.sig, self.coeffs, other.coeffs))

    def grade(self, p: int) -> "Multivector":
        if not 0 <= p <= self.sig.n:
            raise ValueError("grade out of range")
        return self._like(grade_project_arrays(self.sig, self.coeffs, p))

    def grades_present(self, tol: float = 0.0) -> set[int]:
        t = _tables(self.sig.diag)
        live = np.nonzero(np.abs(np.asarray(self.coeffs, dtype=complex)) > tol)[0]
        return {int(t["grades"][i]) for i in live}

    def eta(self) -> "Multivector":
        return self._like(involute_arrays(self.sig, self.coeffs, "eta"))

    def xi(self) -> "Multivector":
        return self._like(involute_arrays(self.sig, self.coeffs, "xi"))

    def hodge(self, inverse: bool = False) -> "Multivector":
        return self._like(hodge_arrays(self.sig, self.coeffs, inverse))

    def scalar_part(self):
        return self.coeffs[0]

    def norm(self) -> float:
        return float(np.linalg.norm(np.asarray(self.coeffs, dtype=complex)))

    def __repr__(self):
        terms = []
        for b in np.nonzero(self.coeffs)[0]:
            name = "1" if b == 0 else "e" + "".join(
                str(i + 1) for i in range(self.sig.n) if b >> i & 1
            )
            terms.append(f"({self.coeffs[b]})*{name}")
        return " + ".join(terms) if terms else "0"


# --- spec-level operation names -------------------------------------------


def clifford_mul(u: Multivector, v: Multivector) -> Multivector:
    return u * v


def wedge(u: Multivector, v: Multivector) -> Multivector:
    return u ^ v


def contract(which, u: Multivector) -> Multivector:
    """Interior derivative i_X u.

    `which` is either a frame index a (contraction with the frame vector
    X_a) or a 1-form Multivector alpha (contraction with its g-dual
    vector, i.e. i_{alpha^sharp}).
    """
    sig = u.sig
    if isinstance(which, Multivector):
        if which.sig != sig:
            raise ValueError("signature mismatch")
        out = _zero_like(sig, _is_exact(u.coeffs))
        for a in range(sig.n):
            ca = which.coeffs[1 << a]
            if ca != 0:
                out = out + sig.diag[a] * ca * contract_axis_arrays(sig, a, u.coeffs)
        return Multivector(sig, out)
    return Multivector(sig, contract_axis_arrays(sig, int(which), u.coeffs))


def grade_project(u: Multivector, p: int) -> Multivector:
    return u.grade(p)


def hodge(u: Multivector, inverse: bool = False) -> Multivector:
    return u.hodge(inverse)


def involute(u: Multivector, kind: str) -> Multivector:
    return Multivector(u.sig, involute_arrays(u.sig, u.coeffs, kind))


def contract_adjoint(a: int, u: Multivector) -> Multivector:
    """i_{X_a}^dagger u = *^{-1} i_{X_a} (*(eta u)); equals e_a wedge u."""
    sig = u.sig
    w = hodge_arrays(sig, involute_arrays(sig, u.coeffs, "eta"))
    w = contract_axis_arrays(sig, a, w)
    return Multivector(sig, hodge_arrays(sig, w, inverse=True))


def lower_form(sig: Signature, a: int) -> Multivector:
    """e_a, the g-dual of the frame vector X_a."""
    return Multivector.blade(sig, 1 << a, sig.diag[a])


def evaluate_form(u: Multivector, vectors: tuple[int, ...]):
    """Evaluate a homogeneous p-form on frame vectors, with the 1/p!
    normalization under which (i_X phi)(Y...) = p phi(X, Y...).

    The first vector is contracted first.
    """
    import math

    p = len(vectors)
    x = u.coeffs
    for a in vectors:
        x = contract_axis_arrays(u.sig, a, x)
    return x[0] / math.factorial(p)


def contract_all(u: Multivector, vectors: tuple[int, ...]):
    """Full contraction i_{V_k}...i_{V_1} u down to the scalar part
    (standard antisymmetric-components normalization)."""
    x = u.coeffs
    for a in vectors:
        x = contract_axis_arrays(u.sig, a, x)
    return x[0]
