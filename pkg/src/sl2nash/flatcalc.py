"""Weighted flat-function calculus on grids over the plane (and interval).

A :class:`GridField` samples a function on a uniform square grid covering the
closed disk of a given radius; nodes outside the disk are masked for norms but
still carry values so that finite-difference stencils stay centered.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import ndimage

from .errors import DomainError

# 4th-order first-derivative stencils; rows = offset patterns
_CENTRAL_1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0  # offsets -2..2
_FORWARD_1 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0  # offsets 0..4


def _derivative_1d(values: np.ndarray, axis: int, spacing: float) -> np.ndarray:
    """4th-order first derivative along an axis, one-sided at the edges."""
    v = np.moveaxis(values, axis, 0)
    n = v.shape[0]
    if n < 5:
        raise DomainError("grid too coarse for 4th-order stencils")
    out = np.empty_like(v, dtype=float if not np.iscomplexobj(v) else complex)
    core = sum(c * v[2 + k: n - 2 + k if n - 2 + k != 0 else None]
               for k, c in zip(range(-2, 3), _CENTRAL_1))
    out[2:n - 2] = core
    for row in (0, 1):
        out[row] = sum(c * v[row + k] for k, c in enumerate(_FORWARD_1))
    for row in (n - 2, n - 1):
        out[row] = -sum(c * v[row - k] for k, c in enumerate(_FORWARD_1))
    return np.moveaxis(out, 0, axis) / spacing


@dataclass
class GridField:
    """Sampled scalar field on [-radius, radius]^dim with the disk as domain."""

    radius: float
    values: np.ndarray
    dim: int = 2

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim != self.dim:
            raise DomainError("values array rank must equal dim")
        if self.resolution < 16:
            raise DomainError("resolution must be at least 16")

    @property
    def resolution(self) -> int:
        return self.values.shape[0]

    @property
    def spacing(self) -> float:
        return 2.0 * self.radius / (self.resolution - 1)

    def axes(self) -> list[np.ndarray]:
        return [np.linspace(-self.radius, self.radius, self.resolution)] * self.dim

    def meshgrid(self) -> list[np.ndarray]:
        return np.meshgrid(*self.axes(), indexing="ij")

    def radii(self) -> np.ndarray:
        grids = self.meshgrid()
        return np.sqrt(sum(g * g for g in grids))

    def disk_mask(self, floor: float | None = None) -> np.ndarray:
        """Nodes inside the disk and outside the grid floor (2 spacings)."""
        r = self.radii()
        eps = 2.0 * self.spacing if floor is None else floor
        return (r <= self.radius + 1e-12) & (r >= eps)

    @staticmethod
    def sample(func: Callable, radius: float, resolution: int, dim: int = 2) -> "GridField":
        axes = [np.linspace(-radius, radius, resolution)] * dim
        grids = np.meshgrid(*axes, indexing="ij")
        return GridField(radius, np.asarray(func(*grids)), dim)

    def like(self, values: np.ndarray) -> "GridField":
        return GridField(self.radius, values, self.dim)

    def interpolator(self, order: int = 3):
        """B-spline interpolant: callable on (N, dim) query points, zero beyond
        the grid.  The spline prefilter is computed once per call site.

        Mirror boundary handling keeps the prefilter untainted by the
        outside-is-zero convention (which would bias the outermost cells);
        out-of-domain queries are zeroed explicitly instead.
        """
        if np.iscomplexobj(self.values):
            coeffs = (ndimage.spline_filter(self.values.real, order=order, mode="mirror"),
                      ndimage.spline_filter(self.values.imag, order=order, mode="mirror"))
        else:
            coeffs = (ndimage.spline_filter(self.values, order=order, mode="mirror"),)
        radius, h = self.radius, self.spacing

        def evaluate(points: np.ndarray) -> np.ndarray:
            pts = np.atleast_2d(np.asarray(points, dtype=float))
            inside = np.all(np.abs(pts) <= radius + 1e-12, axis=1)
            idx = ((pts + radius) / h).T
            parts = [ndimage.map_coordinates(c, idx, order=order, mode="mirror",
                                             prefilter=False) for c in coeffs]
            out = parts[0] if len(parts) == 1 else parts[0] + 1j * parts[1]
            return np.where(inside, out, 0.0)

        return evaluate

    def derivative(self, orders: tuple[int, ...]) -> np.ndarray:
        """Mixed partial derivative array D^a(values) for a multi-index."""
        if len(orders) != self.dim:
            raise DomainError("multi-index length must equal dim")
        out = self.values.astype(complex if np.iscomplexobj(self.values) else float)
        for axis, order in enumerate(orders):
            for _ in range(order):
                out = _derivative_1d(out, axis, self.spacing)
        return out

    def to_csv(self) -> str:
        """Serialize: header (r, resolution), rows (ix, iy, value)."""
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["r", "resolution"])
        writer.writerow([repr(self.radius), self.resolution])
        writer.writerow(["ix", "iy", "value"] if self.dim == 2 else ["ix", "value"])
        it = np.ndindex(*self.values.shape)
        for idx in it:
            writer.writerow([*idx, repr(complex(self.values[idx]))
                             if np.iscomplexobj(self.values) else repr(float(self.values[idx]))])
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str) -> "GridField":
        rows = list(csv.reader(io.StringIO(text)))
        radius = float(rows[1][0])
        resolution = int(rows[1][1])
        header = rows[2]
        dim = len(header) - 1
        values = np.zeros((resolution,) * dim, dtype=complex)
        for row in rows[3:]:
            idx = tuple(int(c) for c in row[:-1])
            values[idx] = complex(row[-1])
        if np.allclose(values.imag, 0.0):
            values = values.real
        return GridField(radius, values, dim)


def _multi_indices(dim: int, max_order: int) -> list[tuple[int, ...]]:
    if dim == 1:
        return [(k,) for k in range(max_order + 1)]
    out = []
    for total in range(max_order + 1):
        for i in range(total + 1):
            out.append((total - i, i))
    return out


def flat_norm(f: GridField, n: int, k: int, floor: float | None = None) -> float:
    """Weighted sup norm: max over the disk of |x|^(-k) |D^a f|, |a| <= n.

    Nodes inside the grid floor are excluded; a flat function's weighted sup
    is attained away from the origin, while FD noise dominates inside.
    """
    if n > 3:
        raise DomainError("derivative order limited to 3 at grid scale")
    mask = f.disk_mask(floor)
    if k > 0:
        origin = f.radii() < 0.5 * f.spacing
        if np.abs(np.where(origin, f.values, 0.0)).max() > 1e-8 * (1.0 + np.abs(f.values).max()):
            raise DomainError("field is not flat at the origin; weighted norm diverges")
    weight = np.where(mask, f.radii(), np.inf) ** (-k) if k > 0 else np.where(mask, 1.0, 0.0)
    if k > 0:
        weight = np.where(mask, weight, 0.0)
    best = 0.0
    for a in _multi_indices(f.dim, n):
        deriv = np.abs(f.derivative(a))
        best = max(best, float(np.max(weight * deriv)))
    return best


def alt_norm(f: GridField, n: int, k: int, floor: float | None = None) -> float:
    """The equivalent norm: sup |D^a(|x|^(-k) f)| over the disk.

    The weighted array is zeroed inside the grid floor before differencing;
    for flat inputs the true values there are below the noise floor.
    """
    if k == 0:
        return flat_norm(f, n, 0, floor)
    r = f.radii()
    eps = 2.0 * f.spacing if floor is None else floor
    weighted = np.where(r >= eps, f.values / np.where(r >= eps, r, 1.0) ** k, 0.0)
    g = f.like(weighted)
    mask = f.disk_mask(4.0 * f.spacing if floor is None else 2 * floor)
    best = 0.0
    for a in _multi_indices(f.dim, n):
        deriv = np.abs(g.derivative(a))
        best = max(best, float(np.max(np.where(mask, deriv, 0.0))))
    return best


def schwartz_norm(f: GridField, n: int, k: int) -> float:
    """sup over the grid of |x|^k |D^a f|, |a| <= n (decay-side norm)."""
    r = f.radii()
    weight = (1e-300 + r) ** k if k > 0 else np.ones_like(r)
    best = 0.0
    for a in _multi_indices(f.dim, n):
        best = max(best, float(np.max(weight * np.abs(f.derivative(a)))))
    return best


def interpolation_probe(samples: list[GridField], kind: str, n: int = 2,
                        l1: int = 1, l2: int = 1, k: int = 0,
                        j1: int = 1, j2: int = 1) -> float:
    """Sup over a family of the ratio LHS/RHS in the interpolation inequalities.

    kind 'standard'/'t': ||f||_{n,k} <= C ||f||_{n-l1,k}^(l2/(l1+l2)) ||f||_{n+l2,k}^(l1/(l1+l2))
    kind 's':            ||f||_{n,k} <= C ||f||_{n,k-j1}^(j2/(j1+j2)) ||f||_{n,k+j2}^(j1/(j1+j2))
    """
    worst = 0.0
    for f in samples:
        if kind in ("standard", "t"):
            lhs = flat_norm(f, n, k)
            lo = flat_norm(f, n - l1, k)
            hi = flat_norm(f, n + l2, k)
            rhs = lo ** (l2 / (l1 + l2)) * hi ** (l1 / (l1 + l2))
        elif kind == "s":
            lhs = flat_norm(f, n, k)
            lo = flat_norm(f, n, k - j1)
            hi = flat_norm(f, n, k + j2)
            rhs = lo ** (j2 / (j1 + j2)) * hi ** (j1 / (j1 + j2))
        else:
            raise DomainError("kind must be standard, t or s")
        if rhs == 0.0:
            continue
        worst = max(worst, lhs / rhs)
    return worst


def _plane_coords(f: GridField) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    x, y = f.meshgrid()
    return x, y, np.hypot(x, y)


def in_module_m(g1: GridField, g2: GridField, tol: float) -> bool:
    """Membership in the pair module with relation y*g1 = -(|z| + x)*g2."""
    x, y, r = _plane_coords(g1)
    resid = np.abs(y * g1.values + (r + x) * g2.values)
    scale = max(float(np.abs(g1.values).max()), float(np.abs(g2.values).max()), 1e-300)
    return float(resid.max()) <= tol * scale


def in_module_k(g1: GridField, g2: GridField, tol: float) -> bool:
    """Membership in the complementary module with relation y*g1 = (|z| - x)*g2."""
    x, y, r = _plane_coords(g1)
    resid = np.abs(y * g1.values - (r - x) * g2.values)
    scale = max(float(np.abs(g1.values).max()), float(np.abs(g2.values).max()), 1e-300)
    return float(resid.max()) <= tol * scale


def _guarded_inverse_radius(f: GridField) -> np.ndarray:
    _, _, r = _plane_coords(f)
    eps = 2.0 * f.spacing
    return np.where(r >= eps, 1.0 / np.where(r >= eps, r, 1.0), 0.0)


def project_m(g1: GridField, g2: GridField) -> tuple[GridField, GridField]:
    """Projection onto the first module; masked inside the grid floor."""
    x, y, r = _plane_coords(g1)
    inv = _guarded_inverse_radius(g1)
    p1 = 0.5 * inv * ((r + x) * g1.values - y * g2.values)
    p2 = 0.5 * inv * (-y * g1.values + (r - x) * g2.values)
    return g1.like(p1), g1.like(p2)


def project_k(g1: GridField, g2: GridField) -> tuple[GridField, GridField]:
    """Projection onto the complementary module; masked inside the grid floor."""
    x, y, r = _plane_coords(g1)
    inv = _guarded_inverse_radius(g1)
    p1 = 0.5 * inv * ((r - x) * g1.values + y * g2.values)
    p2 = 0.5 * inv * (y * g1.values + (r + x) * g2.values)
    return g1.like(p1), g1.like(p2)


def parity_decompose(g: GridField) -> tuple[GridField, GridField, GridField, GridField]:
    """Split g = g0 + x*gx + y*gy + xy*gxy with all parts even in x and y.

    Requires odd resolution (origin on a node) so the reflections act by index
    permutation; divisions are masked inside one grid floor of the axes.
    """
    if g.resolution % 2 == 0:
        raise DomainError("parity decomposition needs odd resolution")
    v = g.values
    sig = v[::-1, ::-1]     # (x,y) -> (-x,-y)
    tau = v[:, ::-1]        # (x,y) -> (x,-y)
    sigtau = v[::-1, :]     # (x,y) -> (-x,y)
    g0 = 0.25 * (v + sig + tau + sigtau)
    x_gx = 0.25 * (v + tau - sig - sigtau)
    y_gy = 0.25 * (v - tau - sig + sigtau)
    xy_gxy = 0.25 * (v - tau + sig - sigtau)
    x, y, _ = _plane_coords(g)
    eps = g.spacing * 0.5
    # masked nodes (on the axes) are reported as NaN
    div_x = np.where(np.abs(x) > eps, x, np.nan)
    div_y = np.where(np.abs(y) > eps, y, np.nan)
    with np.errstate(invalid="ignore"):
        return (g.like(g0), g.like(x_gx / div_x), g.like(y_gy / div_y),
                g.like(xy_gxy / (div_x * div_y)))


def parity_recompose(parts: tuple[GridField, GridField, GridField, GridField]) -> GridField:
    g0, gx, gy, gxy = parts
    x, y, _ = _plane_coords(g0)
    with np.errstate(invalid="ignore"):
        total = (g0.values + np.nan_to_num(x * gx.values)
                 + np.nan_to_num(y * gy.values) + np.nan_to_num(x * y * gxy.values))
    return g0.like(total)


def sq_pullback(g: GridField, resolution: int | None = None) -> GridField:
    """Pull back along lambda -> lambda^2: h(lam) = g(lam^2) on the sqrt-radius disk."""
    res = resolution or g.resolution
    interp = g.interpolator()
    out_r = float(np.sqrt(g.radius))
    ax = np.linspace(-out_r, out_r, res)
    l1, l2 = np.meshgrid(ax, ax, indexing="ij")
    z = (l1 + 1j * l2) ** 2
    # clip square-corner queries into the source square: keeps the sampled
    # field smooth off the disk, which downstream spline stages rely on
    pts = np.stack([np.clip(z.real.ravel(), -g.radius, g.radius),
                    np.clip(z.imag.ravel(), -g.radius, g.radius)], axis=-1)
    vals = interp(pts).reshape(res, res)
    return GridField(out_r, vals)


def sq_descend(h: GridField, tol: float = 1e-10, resolution: int | None = None) -> GridField:
    """Invert the square pullback for sign-invariant input: g(z) = h(sqrt(z))."""
    if h.resolution % 2 == 0:
        raise DomainError("descend needs odd resolution for the symmetry check")
    flip = h.values[::-1, ::-1]
    scale = max(float(np.abs(h.values).max()), 1e-300)
    if float(np.abs(h.values - flip).max()) > tol * scale:
        raise DomainError("input is not invariant under lambda -> -lambda")
    res = resolution or h.resolution
    interp = h.interpolator()
    out_r = float(h.radius ** 2)
    ax = np.linspace(-out_r, out_r, res)
    x, y = np.meshgrid(ax, ax, indexing="ij")
    z = x + 1j * y
    lam = np.sqrt(z)  # principal branch; the branch is irrelevant by invariance
    pts = np.stack([np.clip(lam.real.ravel(), -h.radius, h.radius),
                    np.clip(lam.imag.ravel(), -h.radius, h.radius)], axis=-1)
    vals = interp(pts).reshape(res, res)
    return GridField(out_r, vals)


def y_fields(which: int, z: complex) -> np.ndarray:
    """The singular vector fields on C: Y1 = (-y, |z|+x), Y2 = (|z|-x, -y)."""
    if abs(z) < 1e-15:
        raise DomainError("Y fields are singular at the origin")
    x, y = z.real, z.imag
    r = np.hypot(x, y)
    if which == 1:
        return np.array([-y, r + x])
    if which == 2:
        return np.array([r - x, -y])
    raise DomainError("which must be 1 or 2")


def w_fields(which: int, z: complex) -> np.ndarray:
    """The half-inverse fields on C: 2|l|^2 W1 = (l1, -l2), 2|l|^2 W2 = (l2, l1)."""
    if abs(z) < 1e-15:
        raise DomainError("W fields are singular at the origin")
    l1, l2 = z.real, z.imag
    denom = 2.0 * (l1 * l1 + l2 * l2)
    if which == 1:
        return np.array([l1, -l2]) / denom
    if which == 2:
        return np.array([l2, l1]) / denom
    raise DomainError("which must be 1 or 2")
