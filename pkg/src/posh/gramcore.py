"""Gram matrices of point configurations and their determinant machinery.

A polynomial R is in the positivity class P_k iff every k-point Gram matrix
G[i,j] = R(z_i, conj(z_j)) is positive semidefinite.  This module assembles
those matrices, tests PSD-ness by eigenvalues (never by leading principal
minors alone), and cross-checks the Gram determinant against its exterior-
algebra expansion over the components of a holomorphic representation.
"""
from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    CombinatorialBudgetExceeded,
    DimensionMismatch,
    NotHermitian,
    NumericalResidueWarning,
    ShapeMismatch,
)
from .hermpoly import HermitianPoly, HolomorphicRep, monomials

# Boundary members of the built-in families sit exactly at zero; the PSD
# verdict must not flip on roundoff.
PSD_TOL = 1e-9
HERMITICITY_REL_TOL = 1e-8
SUBSET_CAP = 10 ** 6


@dataclass(frozen=True)
class PointConfig:
    """Ordered tuple of k points in C^n, optionally with a coefficient vector.

    The coefficient vector is the `a` of the defining quadratic form
    sum R(z_i, conj(z_j)) a_i conj(a_j).
    """

    points: tuple
    coeff_vector: Optional[tuple] = None

    def __post_init__(self):
        if len(self.points) < 1:
            raise DimensionMismatch("a point configuration needs at least one point")
        dims = {len(p) for p in self.points}
        if len(dims) != 1:
            raise DimensionMismatch(f"points of mixed dimensions {sorted(dims)}")
        if self.coeff_vector is not None and len(self.coeff_vector) != len(self.points):
            raise DimensionMismatch(
                f"coefficient vector of length {len(self.coeff_vector)} for "
                f"{len(self.points)} points"
            )

    @property
    def k(self) -> int:
        return len(self.points)

    @property
    def n(self) -> int:
        return len(self.points[0])

    def as_array(self) -> np.ndarray:
        return np.array(self.points, dtype=complex)

    @classmethod
    def from_array(cls, arr, coeff_vector=None) -> "PointConfig":
        pts = tuple(tuple(complex(x) for x in row) for row in np.atleast_2d(arr))
        cv = None if coeff_vector is None else tuple(complex(x) for x in coeff_vector)
        return cls(pts, cv)


@dataclass(frozen=True, eq=False)
class GramReport:
    """Gram matrix of a configuration plus its spectral summary."""

    matrix: np.ndarray        # (k, k) complex, exactly Hermitian
    eigenvalues: np.ndarray   # ascending
    min_eigenvalue: float
    determinant: float
    psd: bool

    def to_json(self) -> str:
        k = self.matrix.shape[0]
        flat = [[z.real, z.imag] for z in self.matrix.reshape(-1)]
        return json.dumps(
            {
                "k": k,
                "matrix": flat,
                "eigenvalues": [float(e) for e in self.eigenvalues],
                "min_eigenvalue": self.min_eigenvalue,
                "determinant": self.determinant,
                "psd": self.psd,
            }
        )


def gram_batch(poly: HermitianPoly, configs) -> np.ndarray:
    """Gram matrices for a batch of configurations, shape (..., k, n) -> (..., k, k)."""
    Z = np.asarray(configs, dtype=complex)
    if Z.shape[-1] != poly.n:
        raise DimensionMismatch(
            f"points of dimension {Z.shape[-1]} for polynomial on C^{poly.n}"
        )
    k = Z.shape[-2]
    if len(poly.basis) == 0:
        return np.zeros(Z.shape[:-2] + (k, k), dtype=complex)
    phi = monomials(Z, poly.exponents)
    return phi @ poly.coefficient_matrix @ phi.conj().swapaxes(-1, -2)


def gram_matrix(poly: HermitianPoly, cfg: PointConfig, tol: float = PSD_TOL) -> GramReport:
    """Gram report with eigenvalues from a Hermitian solver.

    The determinant is the product of eigenvalues, hence exactly real.
    """
    g = gram_batch(poly, cfg.as_array())
    g = 0.5 * (g + g.conj().T)  # exact Hermitian symmetry for the report
    eigs = np.linalg.eigvalsh(g)
    scale = max(1.0, float(np.max(np.abs(g))))
    det = float(np.prod(eigs)) if len(eigs) else 1.0
    return GramReport(
        matrix=g,
        eigenvalues=eigs,
        min_eigenvalue=float(eigs[0]),
        determinant=det,
        psd=bool(eigs[0] >= -tol * scale),
    )


def is_psd(matrix, tol: float = PSD_TOL) -> bool:
    """Eigenvalue-based PSD test.

    Leading principal minors are not sufficient (diag(1, 0, -1) has leading
    minors 1, 0, 0 but a negative eigenvalue), so the test is spectral.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 0.0)
    if float(np.max(np.abs(a - a.conj().T))) > HERMITICITY_REL_TOL * scale:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    eigs = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    return bool(eigs[0] >= -tol * scale)


def hermitian_form(poly: HermitianPoly, cfg: PointConfig) -> float:
    """Quadratic form sum R(z_i, conj(z_j)) a_i conj(a_j) for the config's a."""
    if cfg.coeff_vector is None:
        raise ValueError("configuration carries no coefficient vector")
    g = gram_batch(poly, cfg.as_array())
    a = np.array(cfg.coeff_vector, dtype=complex)
    val = complex(np.einsum("i,ij,j->", a, g, a.conj()))
    return val.real


def _real_det(raw: complex, where: str) -> float:
    scale = max(1.0, abs(raw))
    if abs(raw.imag) > 1e-9 * scale:
        warnings.warn(
            f"{where}: determinant has imaginary residue {raw.imag:.3e} "
            f"(scale {scale:.3e})",
            NumericalResidueWarning,
            stacklevel=3,
        )
    return float(raw.real)


def delta_k_direct(poly: HermitianPoly, cfg: PointConfig) -> float:
    """det(R(z_i, conj(z_j))) as a real number.

    An imaginary residue above 1e-9 * scale raises NumericalResidueWarning
    instead of being silently dropped.
    """
    g = gram_batch(poly, cfg.as_array())
    g = 0.5 * (g + g.conj().T)
    return _real_det(complex(np.linalg.det(g)), "delta_k_direct")


def delta_k_expansion(
    rep: HolomorphicRep, cfg: PointConfig, subset_cap: int = SUBSET_CAP
):
    """Signed sum over column subsets of the component-value matrices.

    Enumerates all unordered k-subsets S of the p+q component functions
    (repeated columns only add zero determinants and column order only flips
    sign, so distinct unordered subsets suffice).  With m = #(columns from g),
    returns

        value = sum_m (-1)^m ||Delta_{k,m}||^2,
        parts = [(m, ||Delta_{k,m}||^2), ...]

    where ||Delta_{k,m}||^2 sums |det|^2 of the k x k matrices h_j(z_i) over
    the subsets with exactly m columns from g.  Equals the Gram determinant
    of the reconstructed polynomial.
    """
    k = cfg.k
    total = rep.p + rep.q
    if k > total:
        return 0.0, []
    n_subsets = math.comb(total, k)
    if n_subsets > subset_cap:
        raise CombinatorialBudgetExceeded(
            f"C({total},{k}) = {n_subsets} subsets exceeds cap {subset_cap}"
        )
    values = rep.component_values(cfg.as_array())  # (k, p+q)
    idx = np.array(list(itertools.combinations(range(total), k)), dtype=int)
    mats = np.moveaxis(values[:, idx], 1, 0)  # (n_subsets, k, k)
    dets = np.linalg.det(mats)
    m_counts = np.sum(idx >= rep.p, axis=1)
    parts = []
    value = 0.0
    for m in range(k + 1):
        mask = m_counts == m
        if not np.any(mask):
            continue
        s = float(np.sum(np.abs(dets[mask]) ** 2))
        parts.append((m, s))
        value += (-1) ** m * s
    return value, parts


def _scalar_g_matrices(rep: HolomorphicRep, cfg: PointConfig):
    if rep.q != 1:
        raise ShapeMismatch(f"expected exactly one g component, got {rep.q}")
    if rep.p != cfg.k:
        raise ShapeMismatch(
            f"expected p = k, got p={rep.p} components and k={cfg.k} points"
        )
    values = rep.component_values(cfg.as_array())
    return values[:, : rep.p], values[:, rep.p]


def delta_k_scalar_g(rep: HolomorphicRep, cfg: PointConfig):
    """Scalar-g specialization |det A|^2 - sum_j |det B_j|^2.

    A[i,j] = f_j(z_i); B_j is A with column j replaced by the g values.
    Returns (value, det A, [det B_j]).
    """
    a, g = _scalar_g_matrices(rep, cfg)
    det_a = complex(np.linalg.det(a))
    det_bs = []
    for j in range(rep.p):
        b = a.copy()
        b[:, j] = g
        det_bs.append(complex(np.linalg.det(b)))
    value = abs(det_a) ** 2 - sum(abs(d) ** 2 for d in det_bs)
    return float(value), det_a, det_bs


def cramer_coefficients(
    rep: HolomorphicRep, cfg: PointConfig, tol: float = 1e-9
) -> Optional[list]:
    """Candidate coefficients c_j = det B_j / det A of g over the f basis.

    Returns None when A is numerically singular relative to its Hadamard
    bound.  When g is a fixed linear combination of the f_j the same vector
    comes back at every nonsingular configuration.
    """
    a, g = _scalar_g_matrices(rep, cfg)
    det_a = complex(np.linalg.det(a))
    hadamard = float(np.prod(np.linalg.norm(a, axis=1)))
    if abs(det_a) <= tol * max(1.0, hadamard):
        return None
    coeffs = []
    for j in range(rep.p):
        b = a.copy()
        b[:, j] = g
        coeffs.append(complex(np.linalg.det(b)) / det_a)
    return coeffs


def p2_wedge_check(rep: HolomorphicRep, z, w, tol: float = PSD_TOL):
    """Two-point positivity comparison in wedge form.

    lhs = ||f(z) (x) g(w) - f(w) (x) g(z)||^2 + |<f(z),f(w)>|^2 + |<g(z),g(w)>|^2
    rhs = ||f(z)||^2 ||f(w)||^2 + ||g(z)||^2 ||g(w)||^2

    rhs - lhs equals the 2-point Gram determinant of the represented
    polynomial, so `holds` tracks the sign of Delta_2.
    """
    vals = rep.component_values(np.array([z, w], dtype=complex))
    fz, fw = vals[0, : rep.p], vals[1, : rep.p]
    gz, gw = vals[0, rep.p :], vals[1, rep.p :]
    wedge = np.outer(fz, gw) - np.outer(fw, gz)
    inner_f = np.sum(fz * fw.conj())
    inner_g = np.sum(gz * gw.conj())
    lhs = float(np.sum(np.abs(wedge) ** 2) + abs(inner_f) ** 2 + abs(inner_g) ** 2)
    rhs = float(
        np.sum(np.abs(fz) ** 2) * np.sum(np.abs(fw) ** 2)
        + np.sum(np.abs(gz) ** 2) * np.sum(np.abs(gw) ** 2)
    )
    scale = max(1.0, lhs, rhs)
    return lhs, rhs, bool(lhs <= rhs + tol * scale)
