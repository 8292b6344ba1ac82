"""Exponent probes for the smoothing operators.

Each probe runs one operator family over the dyadic parameter grid
{1, 2, 4, ..., 64}, measures the relevant norms, and reports a fitted
log-log slope to compare against the operator's stated exponent.  Probe
families are built so the estimates are sharp along the sweep:

* pure-smoothing probes use self-similar wave packets (width ~ 1/frequency)
  so every parameter doubling sees the same relative spectral geometry;
* the flat-side chain probes push the packet ladder through the inversion,
  placing packet j at inverted radius y_j with weights tuned so the measured
  flat norm isolates the exponent;
* the cutoff probes use pure powers of |x|, for which the cutoff residual is
  exactly scale-free;
* bandwidth-hungry probes run on one-dimensional grids (the estimates are
  dimension-independent) at a node budget below the two-dimensional grids.

Reports are plain dicts ready for JSON serialization.
"""

from __future__ import annotations

import numpy as np

from . import flatcalc as fc
from . import smoothing as sm
from .numerics import fit_slope

PARAM_GRID = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)

# (frequency, inverted radius, width): dyadic ladder used by the chain probes
_CHAIN_LADDER = ((1.0, 8.0, 1.8), (2.0, 4.8, 1.0), (4.0, 3.4, 0.6), (8.0, 2.7, 0.33),
                 (16.0, 2.25, 0.18), (32.0, 1.95, 0.1), (64.0, 1.75, 0.06),
                 (128.0, 1.6, 0.045), (256.0, 1.5, 0.04))


def _report(operator: str, indices: dict, grid, norms, expected: float) -> dict:
    norms = np.asarray(norms, dtype=float)
    grid = np.asarray(grid, dtype=float)
    positive = norms > 0
    slope = fit_slope(np.log(grid[positive]), np.log(norms[positive]))
    constant = float(np.max(norms[positive] / grid[positive] ** expected))
    return {
        "operator": operator,
        "indices": indices,
        "parameter_grid": grid.tolist(),
        "measured_norms": norms.tolist(),
        "fitted_slope": float(slope),
        "fitted_constant": constant,
        "expected_slope": float(expected),
    }


def _packet_field_1d(radius: float = 14.0, resolution: int = 8193) -> fc.GridField:
    """Self-similar dyadic packets, widest at the center, on a line."""
    spec = [(2.0 ** j, c) for j, c in zip(range(9),
            [0.0, 3.2, -3.2, 6.4, -6.4, 9.2, -9.2, 11.6, -11.6])]
    x = np.linspace(-radius, radius, resolution)
    out = np.zeros_like(x)
    for k, c in spec:
        sig = max(min(2.2 / k, 2.2), 0.04)
        out += (1.0 / k) * np.exp(-((x - c) ** 2) / (2 * sig ** 2)) * np.cos(k * (x - c))
    return fc.GridField(radius, out, dim=1)


def probe_schwartz_growth() -> dict:
    """Growth of the frequency cutoff: ||S_t f||_{2,0} <= C t ||f||_{1,0}."""
    f = _packet_field_1d()
    norms = [fc.schwartz_norm(sm.smooth_schwartz(f, t), 2, 0) for t in PARAM_GRID]
    return _report("schwartz_growth", {"n": 1, "l": 1, "k": 0}, PARAM_GRID, norms, 1.0)


def probe_schwartz_approx() -> dict:
    """Identity approximation: ||(id - S_t) f||_{0,0} <= C t^-1 ||f||_{1,0}."""
    f = _packet_field_1d()
    norms = [fc.schwartz_norm(
        fc.GridField(f.radius, f.values - sm.smooth_schwartz(f, t).values, dim=1), 0, 0)
        for t in PARAM_GRID]
    return _report("schwartz_approx", {"n": 0, "l": 1, "k": 0}, PARAM_GRID, norms, -1.0)


def _chain_ladder_field(resolution: int, mode: str) -> fc.GridField:
    x = np.linspace(-1.0, 1.0, resolution)
    ax = np.abs(x)
    y = np.where(ax > 1e-12, 1.0 / np.maximum(ax, 1e-12), 1e12)
    out = np.zeros_like(x)
    for k, yc, sig in _CHAIN_LADDER:
        w = 1.0 / yc ** 2 if mode == "growth" else 1.0 / (k * yc ** 2)
        out += w * np.exp(-((y - yc) ** 2) / (2 * sig ** 2)) * np.cos(k * (y - yc))
    return fc.GridField(1.0, out, dim=1)


_CHAIN_KW = dict(schwartz_radius=16.0, schwartz_resolution=8193)


def probe_flat_growth() -> dict:
    """Flat-side derivative smoothing: ||S_{t,r} f||_{1,0} <= C t ||f||_{0,2}."""
    f = _chain_ladder_field(4097, "growth")
    norms = [fc.flat_norm(sm.smooth_flat(f, t, **_CHAIN_KW), 1, 0) for t in PARAM_GRID]
    return _report("flat_growth", {"n": 0, "l": 1, "k": 0}, PARAM_GRID, norms, 1.0)


def probe_flat_approx() -> dict:
    """Flat-side approximation: ||(S_{t,r} - id) f||_{0,2} <= C t^-1 ||f||_{1,0}."""
    f = _chain_ladder_field(4097, "approx")
    norms = []
    for t in PARAM_GRID:
        out = sm.smooth_flat(f, t, **_CHAIN_KW)
        norms.append(fc.flat_norm(fc.GridField(1.0, out.values - f.values, dim=1), 0, 2))
    return _report("flat_approx", {"n": 0, "l": 1, "k": 0}, PARAM_GRID, norms, -1.0)


def probe_weight_growth(resolution: int = 257) -> dict:
    """Cutoff growth: ||T_s f||_{0,2} <= C s^2 ||f||_{0,0} on the constant field.

    The cutoff of a pure power is exactly scale-free, so every positive point
    sits on the power law; the s = 1 cutoff is identically zero on the unit
    ball and is reported as an exact zero outside the fit.
    """
    f = fc.GridField(1.0, np.ones((resolution, resolution)))
    norms = [fc.flat_norm(sm.cutoff_t(f, s), 0, 2) for s in PARAM_GRID]
    return _report("weight_growth", {"n": 0, "k": 0, "j": 2}, PARAM_GRID, norms, 2.0)


def probe_weight_approx(resolution: int = 257) -> dict:
    """Cutoff approximation: ||(T_s - id) f||_{0,0} <= C s^-2 ||f||_{0,2}."""
    ax = np.linspace(-1.0, 1.0, resolution)
    gx, gy = np.meshgrid(ax, ax, indexing="ij")
    f = fc.GridField(1.0, gx * gx + gy * gy)
    norms = [fc.flat_norm(fc.GridField(1.0, sm.cutoff_t(f, s).values - f.values), 0, 0)
             for s in PARAM_GRID]
    return _report("weight_approx", {"n": 0, "k": 0, "j": 2}, PARAM_GRID, norms, -2.0)


def probe_combined_growth() -> dict:
    """Combined operator, derivative side at fixed cutoff strength s = 16."""
    f = _chain_ladder_field(4097, "growth")
    norms = [fc.flat_norm(sm.smooth_combined(f, t, 16.0, **_CHAIN_KW), 1, 0)
             for t in PARAM_GRID]
    return _report("combined_growth_t", {"n": 0, "l": 1, "k": 0, "j": 0, "s": 16},
                   PARAM_GRID, norms, 1.0)


def probe_combined_approx() -> dict:
    """Combined operator, cutoff side at fixed smoothing strength t = 64."""
    x = np.linspace(-1.0, 1.0, 8193)
    clip = sm._smoothstep((np.abs(x) - 0.005) / 0.015)
    taper = sm._smoothstep((1.2 - np.abs(x)) / 0.4)
    f = fc.GridField(1.0, np.abs(x) * clip * taper, dim=1)
    base = sm.smooth_flat(f, 64.0, schwartz_radius=96.0, schwartz_resolution=12289)
    norms = []
    for s in PARAM_GRID:
        out = sm.cutoff_t(fc.GridField(1.0, base.values, dim=1), s)
        norms.append(fc.flat_norm(fc.GridField(1.0, out.values - f.values, dim=1), 0, 0))
    return _report("combined_approx_s", {"n": 0, "l": 0, "k": 0, "j": 1, "t": 64},
                   PARAM_GRID, norms, -1.0)


EXPONENT_PROBES = (
    probe_schwartz_growth,
    probe_schwartz_approx,
    probe_flat_growth,
    probe_flat_approx,
    probe_weight_growth,
    probe_weight_approx,
    probe_combined_growth,
    probe_combined_approx,
)


def run_exponent_probes() -> list[dict]:
    return [probe() for probe in EXPONENT_PROBES]


def inversion_trade_probe(resolutions=(513, 1025), k: int = 1) -> dict:
    """Fitted constant of ||rho* f||_{1,k} <= C ||f||_{1,k+2} across grids.

    Stability of the constant under grid refinement is the assertion; the
    constant itself is existential.
    """
    constants = []
    for res in resolutions:
        worst = 0.0
        for c in (1.0, 0.5, 0.25):
            g = fc.GridField.sample(lambda px, py: np.exp(-c * (px * px + py * py)), 8.0, res)
            flat = sm.invert(g, 1.0, res)
            num = fc.flat_norm(flat, 1, k)
            den = fc.schwartz_norm(g, 1, k + 2)
            worst = max(worst, num / den)
        constants.append(worst)
    spread = max(constants) / min(constants) - 1.0
    return {"operator": "inversion_norm_trade", "indices": {"n": 1, "k": k},
            "resolutions": list(resolutions), "fitted_constants": constants,
            "relative_spread": float(spread)}
