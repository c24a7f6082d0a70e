"""Equispaced interpolation grids and the P2M/M2M/L2L/L2P operators.

The 1D rule uses L nodes at l/(L-1), l = 0..L-1, on the reference interval
[0, 1]; 3D grids are tensor products flattened in C order, i.e. flat index
(i0*L + i1)*L + i2 addresses the node (x[i0], x[i1], x[i2]).

In the high-frequency regime the Lagrange basis is modulated by complex
exponentials tied to a unit direction; the modulation enters the operators
as diagonal factors around the real tensorized interpolation matrices.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = [
    "nodes_1d",
    "lagrange_basis",
    "eval_matrix_1d",
    "grid_points",
    "cell_grid",
    "basis_matrix",
    "plane_wave",
    "p2m",
    "l2p",
    "m2m_factors",
    "l2l_factors",
    "kron_apply",
    "apply_strategy",
    "reset_flops",
    "flop_count",
]

STRATEGIES = ("t", "t+s", "t+s+r")

# multiply-add counter for the tensorized applies (test instrumentation)
_FLOPS = 0


def reset_flops():
    global _FLOPS
    _FLOPS = 0


def flop_count() -> int:
    return _FLOPS


@lru_cache(maxsize=None)
def nodes_1d(order: int) -> np.ndarray:
    """The L equispaced nodes of [0, 1], endpoints included."""
    if order < 2:
        raise ValueError("interpolation order must be >= 2")
    return np.linspace(0.0, 1.0, order)


def lagrange_basis(order: int, k: int, x) -> np.ndarray | float:
    """1D Lagrange cardinal polynomial k on the equispaced nodes, at x."""
    if not 0 <= k < order:
        raise ValueError("basis index out of range")
    nodes = nodes_1d(order)
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    for j in range(order):
        if j != k:
            out = out * (x - nodes[j]) / (nodes[k] - nodes[j])
    return float(out) if out.ndim == 0 else out


def eval_matrix_1d(order: int, x: np.ndarray) -> np.ndarray:
    """(len(x), L) matrix of S_k(x_j) values."""
    x = np.asarray(x, dtype=float)
    out = np.empty((x.shape[0], order))
    for k in range(order):
        out[:, k] = lagrange_basis(order, k, x)
    return out


@lru_cache(maxsize=None)
def grid_points(order: int) -> np.ndarray:
    """(L^3, 3) reference-grid coordinates in flat C order."""
    n = nodes_1d(order)
    g = np.stack(np.meshgrid(n, n, n, indexing="ij"), axis=-1)
    return g.reshape(-1, 3)


def cell_grid(frame, order: int) -> np.ndarray:
    """Physical interpolation grid of a cell: alpha + beta * reference grid."""
    return frame.alpha + frame.beta * grid_points(order)


def basis_matrix(order: int, unit_points: np.ndarray) -> np.ndarray:
    """(n, L^3) tensor-product basis values at points in [0,1]^3 coords."""
    pts = np.atleast_2d(unit_points)
    ex = eval_matrix_1d(order, pts[:, 0])
    ey = eval_matrix_1d(order, pts[:, 1])
    ez = eval_matrix_1d(order, pts[:, 2])
    out = np.einsum("na,nb,nc->nabc", ex, ey, ez, optimize=True)
    return out.reshape(pts.shape[0], order**3)


def plane_wave(points: np.ndarray, kappa: float, direction: np.ndarray) -> np.ndarray:
    """exp(i*kappa*<x, u>) at each point."""
    return np.exp(1j * kappa * (np.atleast_2d(points) @ np.asarray(direction, dtype=float)))


def p2m(frame, order, positions, charges, kappa=0.0, direction=None) -> np.ndarray:
    """Nodal multipole expansion of a leaf's particles.

    With a direction the basis is modulated, so the particle charges pick up
    the phase exp(-i*kappa*<y, u>) and the grid coefficients the phase
    exp(+i*kappa*<y_r, u>).
    """
    unit = (np.atleast_2d(positions) - frame.alpha) / frame.beta
    b = basis_matrix(order, unit)
    q = np.asarray(charges, dtype=complex)
    if direction is not None:
        q = q * np.conj(plane_wave(positions, kappa, direction))
    coeffs = b.T @ q
    if direction is not None:
        coeffs = coeffs * plane_wave(cell_grid(frame, order), kappa, direction)
    return coeffs


def l2p(frame, order, positions, local, kappa=0.0, direction=None) -> np.ndarray:
    """Potential increments at particles from a nodal local expansion."""
    unit = (np.atleast_2d(positions) - frame.alpha) / frame.beta
    b = basis_matrix(order, unit)
    coeffs = np.asarray(local, dtype=complex)
    if direction is not None:
        coeffs = coeffs * np.conj(plane_wave(cell_grid(frame, order), kappa, direction))
    vals = b @ coeffs
    if direction is not None:
        vals = vals * plane_wave(positions, kappa, direction).ravel()
    return vals


@lru_cache(maxsize=None)
def m2m_factors(order: int, octant: tuple) -> tuple:
    """Per-axis L x L factors A[l, r] = S_l((octant_p + x_r) / 2).

    The M2M matrix for this son octant is their Kronecker product; column
    sums are 1 by partition of unity, so total charge is conserved.
    """
    x = nodes_1d(order)
    return tuple(eval_matrix_1d(order, (o + x) / 2.0).T.copy() for o in octant)


@lru_cache(maxsize=None)
def l2l_factors(order: int, octant: tuple) -> tuple:
    """Transposed factors: L2L is the transpose of M2M."""
    return tuple(a.T.copy() for a in m2m_factors(order, octant))


def kron_apply(factors, x: np.ndarray) -> np.ndarray:
    """Apply the Kronecker product of three L x L factors to stacked vectors.

    ``x`` has shape (L^3, m); each column is transformed with d successive
    mode products of cost L^(d+1), instead of the L^(2d) dense apply.
    """
    global _FLOPS
    f0, f1, f2 = factors
    order = f0.shape[0]
    m = x.shape[1]
    t = x.reshape(order, order, order, m)
    t = np.tensordot(f0, t, axes=(1, 0))
    t = np.tensordot(f1, t, axes=(1, 1)).transpose(1, 0, 2, 3)
    t = np.tensordot(f2, t, axes=(1, 2)).transpose(1, 2, 0, 3)
    cmplx = np.iscomplexobj(x)
    _FLOPS += 3 * 2 * order**4 * m * (2 if cmplx else 1)
    return np.ascontiguousarray(t.reshape(order**3, m))


def apply_strategy(strategy: str, factors, x: np.ndarray) -> np.ndarray:
    """Tensorized apply with the chosen stacking policy.

    t      : one column at a time;
    t+s    : all columns stacked into one multi-column product;
    t+s+r  : stacked with real/imaginary parts deinterleaved so the real
             factor matrices multiply a real array.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    x = np.asarray(x)
    if x.ndim != 2:
        raise ValueError("expected stacked columns of shape (L^3, m)")
    if strategy == "t":
        cols = [kron_apply(factors, x[:, j : j + 1]) for j in range(x.shape[1])]
        return np.hstack(cols) if cols else x.copy()
    if strategy == "t+s":
        return kron_apply(factors, x)
    # t+s+r
    n, m = x.shape
    real = np.empty((n, 2 * m))
    real[:, 0::2] = x.real
    real[:, 1::2] = x.imag
    y = kron_apply(factors, real)
    return y[:, 0::2] + 1j * y[:, 1::2]
