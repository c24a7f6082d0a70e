"""Helmholtz kernel, direct summation oracle and error norms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "HelmholtzKernel",
    "ErrorReport",
    "direct_sum",
    "relative_errors",
]

# Default distance below which an interaction is suppressed to zero.  The FMM
# driver rescales this by the root box side so the policy is box-relative.
DEFAULT_SINGULARITY_TOL = 1e-12


@dataclass(frozen=True)
class HelmholtzKernel:
    """G(x, y) = exp(i*kappa*|x-y|) / (4*pi*|x-y|), with kappa >= 0.

    Coincident (or numerically coincident) points contribute zero instead of
    raising: the near-singular factor is replaced by 0 and the computation
    continues.
    """

    kappa: float
    singularity_tol: float = DEFAULT_SINGULARITY_TOL

    def __post_init__(self):
        if not np.isfinite(self.kappa) or self.kappa < 0:
            raise ValueError("kappa must be finite and >= 0")

    def of_distance(self, r) -> np.ndarray:
        """Evaluate the kernel on an array of distances."""
        r = np.asarray(r, dtype=float)
        safe = r >= self.singularity_tol
        rs = np.where(safe, r, 1.0)
        vals = np.exp(1j * self.kappa * rs) / (4.0 * np.pi * rs)
        return np.where(safe, vals, 0.0)

    def __call__(self, x, y) -> complex | np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r = np.linalg.norm(x - y, axis=-1)
        out = self.of_distance(r)
        return complex(out) if out.ndim == 0 else out

    def matrix(self, targets: np.ndarray, sources: np.ndarray) -> np.ndarray:
        """Dense kernel matrix G(targets[i], sources[j])."""
        diff = targets[:, None, :] - sources[None, :, :]
        return self.of_distance(np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)))


def direct_sum(
    kernel: HelmholtzKernel,
    targets: np.ndarray,
    sources: np.ndarray,
    charges: np.ndarray,
    block: int = 512,
) -> np.ndarray:
    """O(N*M) reference evaluation of the potentials, blocked over targets."""
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    sources = np.atleast_2d(np.asarray(sources, dtype=float))
    charges = np.asarray(charges, dtype=complex)
    if sources.shape[0] != charges.shape[0]:
        raise ValueError("sources and charges length mismatch")
    out = np.zeros(targets.shape[0], dtype=complex)
    for lo in range(0, targets.shape[0], block):
        hi = min(lo + block, targets.shape[0])
        out[lo:hi] = kernel.matrix(targets[lo:hi], sources) @ charges
    return out


@dataclass(frozen=True)
class ErrorReport:
    rel_linf: float
    rel_l1: float
    rel_l2: float


def relative_errors(reference: np.ndarray, approx: np.ndarray) -> ErrorReport:
    """Relative max, l1 and l2 norms of ``approx - reference``."""
    ref = np.asarray(reference)
    app = np.asarray(approx)
    if ref.shape != app.shape:
        raise ValueError("shape mismatch")
    if not np.any(ref):
        raise ValueError("reference vector is identically zero")
    diff = app - ref
    return ErrorReport(
        rel_linf=float(np.max(np.abs(diff)) / np.max(np.abs(ref))),
        rel_l1=float(np.sum(np.abs(diff)) / np.sum(np.abs(ref))),
        rel_l2=float(np.linalg.norm(diff) / np.linalg.norm(ref)),
    )
