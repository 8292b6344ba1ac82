"""Pointwise antisymmetric tensors on R^m and differentiable field handles.

Components are stored on strictly increasing index tuples, ordered
lexicographically over the coordinate basis.  On sl2(C) = R^6 the basis order
is (x1, x2, x3, y1, y2, y3).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError
from .numerics import central_diff

COVARIANT = "covariant"
CONTRAVARIANT = "contravariant"

_TUPLES: dict[tuple[int, int], list[tuple[int, ...]]] = {}
_POSITIONS: dict[tuple[int, int], dict[tuple[int, ...], int]] = {}


def basis_tuples(dim: int, degree: int) -> list[tuple[int, ...]]:
    key = (dim, degree)
    if key not in _TUPLES:
        _TUPLES[key] = list(itertools.combinations(range(dim), degree))
        _POSITIONS[key] = {t: i for i, t in enumerate(_TUPLES[key])}
    return _TUPLES[key]


def tuple_position(dim: int, degree: int, idx: tuple[int, ...]) -> int:
    basis_tuples(dim, degree)
    return _POSITIONS[(dim, degree)][idx]


def sort_sign(indices: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting ``indices``; 0 if an index repeats."""
    idx = list(indices)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return 0, tuple(idx)
    return sign, tuple(idx)


@dataclass(frozen=True)
class PointTensor:
    """Antisymmetric tensor of one variance at a single point."""

    degree: int
    variance: str
    components: np.ndarray
    dim: int = 6

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=float)
        expected = len(basis_tuples(self.dim, self.degree))
        if comps.shape != (expected,):
            raise DomainError(f"expected {expected} components, got {comps.shape}")
        object.__setattr__(self, "components", comps)

    @staticmethod
    def zero(degree: int, variance: str, dim: int = 6) -> "PointTensor":
        return PointTensor(degree, variance, np.zeros(len(basis_tuples(dim, degree))), dim)

    @staticmethod
    def from_dict(degree: int, variance: str, entries: dict[tuple[int, ...], float],
                  dim: int = 6) -> "PointTensor":
        comps = np.zeros(len(basis_tuples(dim, degree)))
        for idx, val in entries.items():
            sign, sorted_idx = sort_sign(tuple(idx))
            if sign == 0:
                continue
            comps[tuple_position(dim, degree, sorted_idx)] += sign * val
        return PointTensor(degree, variance, comps, dim)

    @staticmethod
    def vector(values: np.ndarray, dim: int = 6) -> "PointTensor":
        return PointTensor(1, CONTRAVARIANT, np.asarray(values, dtype=float), dim)

    @staticmethod
    def covector(values: np.ndarray, dim: int = 6) -> "PointTensor":
        return PointTensor(1, COVARIANT, np.asarray(values, dtype=float), dim)

    @staticmethod
    def scalar(value: float, variance: str = COVARIANT, dim: int = 6) -> "PointTensor":
        return PointTensor(0, variance, np.array([float(value)]), dim)

    def __add__(self, other: "PointTensor") -> "PointTensor":
        self._check_like(other)
        return PointTensor(self.degree, self.variance, self.components + other.components, self.dim)

    def __sub__(self, other: "PointTensor") -> "PointTensor":
        self._check_like(other)
        return PointTensor(self.degree, self.variance, self.components - other.components, self.dim)

    def __mul__(self, scalar: float) -> "PointTensor":
        return PointTensor(self.degree, self.variance, self.components * float(scalar), self.dim)

    __rmul__ = __mul__

    def __neg__(self) -> "PointTensor":
        return self * (-1.0)

    def _check_like(self, other: "PointTensor") -> None:
        if (self.degree, self.variance, self.dim) != (other.degree, other.variance, other.dim):
            raise DomainError("tensors have mismatched degree/variance/dimension")

    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def component(self, idx: tuple[int, ...]) -> float:
        sign, sorted_idx = sort_sign(tuple(idx))
        if sign == 0:
            return 0.0
        return sign * float(self.components[tuple_position(self.dim, self.degree, sorted_idx)])

    def as_matrix(self) -> np.ndarray:
        """Full antisymmetric matrix of a degree-2 tensor."""
        if self.degree != 2:
            raise DomainError("as_matrix is defined for degree 2")
        m = np.zeros((self.dim, self.dim))
        for pos, (i, j) in enumerate(basis_tuples(self.dim, 2)):
            m[i, j] = self.components[pos]
            m[j, i] = -self.components[pos]
        return m

    @staticmethod
    def from_matrix(m: np.ndarray, variance: str) -> "PointTensor":
        dim = m.shape[0]
        anti = 0.5 * (m - m.T)
        comps = np.array([anti[i, j] for i, j in basis_tuples(dim, 2)])
        return PointTensor(2, variance, comps, dim)


def wedge(a: PointTensor, b: PointTensor) -> PointTensor:
    """Graded-commutative exterior product of tensors of equal variance."""
    if a.variance != b.variance or a.dim != b.dim:
        raise DomainError("wedge requires matching variance and dimension")
    degree = a.degree + b.degree
    if degree > a.dim:
        raise DomainError(f"wedge degree {degree} exceeds dimension {a.dim}")
    comps = np.zeros(len(basis_tuples(a.dim, degree)))
    tuples_a = basis_tuples(a.dim, a.degree)
    tuples_b = basis_tuples(a.dim, b.degree)
    for ia, ta in enumerate(tuples_a):
        ca = a.components[ia]
        if ca == 0.0:
            continue
        for ib, tb in enumerate(tuples_b):
            cb = b.components[ib]
            if cb == 0.0:
                continue
            sign, merged = sort_sign(ta + tb)
            if sign == 0:
                continue
            comps[tuple_position(a.dim, degree, merged)] += sign * ca * cb
    return PointTensor(degree, a.variance, comps, a.dim)


def interior(v: PointTensor, form: PointTensor) -> PointTensor:
    """Contraction of a form (or multivector) with a degree-1 tensor of the
    opposite variance in the first slot."""
    if v.degree != 1 or v.variance == form.variance:
        raise DomainError("interior product needs a degree-1 tensor of opposite variance")
    if form.degree == 0:
        raise DomainError("cannot contract a degree-0 tensor")
    degree = form.degree - 1
    comps = np.zeros(len(basis_tuples(form.dim, degree)))
    for pos, idx in enumerate(basis_tuples(form.dim, form.degree)):
        c = form.components[pos]
        if c == 0.0:
            continue
        for slot, k in enumerate(idx):
            rest = idx[:slot] + idx[slot + 1:]
            comps[tuple_position(form.dim, degree, rest)] += ((-1) ** slot) * v.components[k] * c
    return PointTensor(degree, form.variance, comps, form.dim)


def pairing(form: PointTensor, multivector: PointTensor) -> float:
    """Full contraction of a p-form with a p-multivector."""
    if form.degree != multivector.degree or form.variance == multivector.variance:
        raise DomainError("pairing needs equal degrees and opposite variances")
    return float(np.dot(form.components, multivector.components))


def sharp(bivector: PointTensor, covector: PointTensor) -> PointTensor:
    """pi^sharp(xi) = pi(xi, .) for a contravariant degree-2 tensor."""
    m = bivector.as_matrix()
    return PointTensor.vector(covector.components @ m, bivector.dim)


def flat(two_form: PointTensor, vector: PointTensor) -> PointTensor:
    """omega^flat(X) = omega(X, .) for a covariant degree-2 tensor."""
    m = two_form.as_matrix()
    return PointTensor.covector(vector.components @ m, two_form.dim)


def flat_on_bivector(two_form: PointTensor, bivector: PointTensor) -> PointTensor:
    """Second exterior power of omega^flat applied to a bivector:
    (i_X w) wedge (i_Y w) on decomposables, i.e. (w^T pi w) as a 2-form."""
    w = two_form.as_matrix()
    p = bivector.as_matrix()
    return PointTensor.from_matrix(w.T @ p @ w, COVARIANT)


@dataclass(frozen=True)
class FieldHandle:
    """A tensor field evaluated by callback, with a configurable FD backend.

    ``evaluator`` must be deterministic.  ``jacobian``, when supplied, returns
    the matrix d(components)/d(coordinates) at a point and is preferred over
    finite differences.
    """

    degree: int
    variance: str
    evaluator: Callable[[np.ndarray], PointTensor]
    dim: int = 6
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    fd_step: Callable[[np.ndarray], float] = field(
        default=lambda x: 1e-4 * (1.0 + float(np.linalg.norm(x))))

    def __call__(self, x: np.ndarray) -> PointTensor:
        return self.evaluator(np.asarray(x, dtype=float))

    def component_jacobian(self, x: np.ndarray) -> np.ndarray:
        """d(components)/dx, shape (n_components, dim)."""
        x = np.asarray(x, dtype=float)
        if self.jacobian is not None:
            return np.asarray(self.jacobian(x), dtype=float)
        h = self.fd_step(x)
        cols = []
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = 1.0
            cols.append(central_diff(lambda y: self.evaluator(y).components, x, e, h))
        return np.stack(cols, axis=-1)


def scalar_field(func: Callable[[np.ndarray], float], dim: int = 6,
                 grad: Callable[[np.ndarray], np.ndarray] | None = None) -> FieldHandle:
    jac = None
    if grad is not None:
        jac = lambda x: np.asarray(grad(x), dtype=float).reshape(1, dim)
    return FieldHandle(0, COVARIANT, lambda x: PointTensor.scalar(func(x), dim=dim),
                       dim=dim, jacobian=jac)


def exterior_derivative(form: FieldHandle, point: np.ndarray) -> PointTensor:
    """d(form) at a point: (d a)_{i0..ip} = sum_j (-1)^j d_{i_j} a_{i0..^j..ip}."""
    if form.variance != COVARIANT:
        raise DomainError("exterior derivative acts on covariant fields")
    point = np.asarray(point, dtype=float)
    jac = form.component_jacobian(point)
    degree = form.degree + 1
    comps = np.zeros(len(basis_tuples(form.dim, degree)))
    for pos, idx in enumerate(basis_tuples(form.dim, degree)):
        total = 0.0
        for j, k in enumerate(idx):
            rest = idx[:j] + idx[j + 1:]
            total += ((-1) ** j) * jac[tuple_position(form.dim, form.degree, rest), k]
        comps[pos] = total
    return PointTensor(degree, COVARIANT, comps, form.dim)


def pullback_form_linear(form_value: PointTensor, linear_map: np.ndarray) -> PointTensor:
    """Pull back a covariant tensor value along a linear map L: (L^* a)(v..) = a(Lv..)."""
    if form_value.variance != COVARIANT:
        raise DomainError("pullback_form_linear acts on covariant tensors")
    dim_in = linear_map.shape[1]
    if form_value.degree == 0:
        return PointTensor(0, COVARIANT, form_value.components.copy(), dim_in)
    comps = np.zeros(len(basis_tuples(dim_in, form_value.degree)))
    for pos, idx in enumerate(basis_tuples(dim_in, form_value.degree)):
        vecs = [linear_map[:, k] for k in idx]
        comps[pos] = evaluate_form(form_value, vecs)
    return PointTensor(form_value.degree, COVARIANT, comps, dim_in)


def pushforward_multivector_linear(mv: PointTensor, linear_map: np.ndarray) -> PointTensor:
    """Push a contravariant tensor value through a linear map on each leg."""
    if mv.variance != CONTRAVARIANT:
        raise DomainError("pushforward acts on contravariant tensors")
    dim_out = linear_map.shape[0]
    if mv.degree == 0:
        return PointTensor(0, CONTRAVARIANT, mv.components.copy(), dim_out)
    comps = np.zeros(len(basis_tuples(dim_out, mv.degree)))
    for pos, idx in enumerate(basis_tuples(mv.dim, mv.degree)):
        c = mv.components[pos]
        if c == 0.0:
            continue
        cols = [linear_map[:, k] for k in idx]
        _accumulate_wedge(comps, cols, c, dim_out, mv.degree)
    return PointTensor(mv.degree, CONTRAVARIANT, comps, dim_out)


def _accumulate_wedge(comps: np.ndarray, cols: list[np.ndarray], coeff: float,
                      dim: int, degree: int) -> None:
    for pos, idx in enumerate(basis_tuples(dim, degree)):
        det = np.linalg.det(np.array([[col[i] for col in cols] for i in idx]))
        comps[pos] += coeff * det


def evaluate_form(form_value: PointTensor, vectors: list[np.ndarray]) -> float:
    """Evaluate a p-form value on p vectors."""
    if len(vectors) != form_value.degree:
        raise DomainError("wrong number of vectors")
    if form_value.degree == 0:
        return float(form_value.components[0])
    total = 0.0
    for pos, idx in enumerate(basis_tuples(form_value.dim, form_value.degree)):
        c = form_value.components[pos]
        if c == 0.0:
            continue
        mat = np.array([[vec[i] for vec in vectors] for i in idx])
        total += c * np.linalg.det(mat)
    return total
