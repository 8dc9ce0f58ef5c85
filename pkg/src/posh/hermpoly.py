"""Hermitian symmetric polynomials on C^n.

A Hermitian symmetric polynomial is stored as a sparse map

    (alpha, beta)  ->  c[alpha, beta]          R(z, wbar) = sum c[a,b] z^a conj(w)^b

over pairs of multi-indices, with the symmetry c[a,b] == conj(c[b,a]).
The coefficient matrix over the occurring multi-indices (ordered graded-
lexicographically) is Hermitian; its inertia and eigendecomposition drive
everything else in the package: the signature (N+, N-, N0) and the
holomorphic representation R = ||f||^2 - ||g||^2.

Conventions:

* Multi-indices are plain tuples of nonnegative ints of length n.
* The basis order is graded lexicographic (total degree first, then tuple
  order); this fixes matrix layouts and makes decompositions reproducible.
* Explicit zero coefficients supplied at construction are retained, so a
  family member sitting exactly on a positivity boundary keeps its basis
  entry (and hence reports a zero eigenvalue instead of dropping it).
  Sums and scalings preserve the key set; products skip zero factors.
* Hermitian symmetry is validated, never silently repaired.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    CombinatorialBudgetExceeded,
    DimensionMismatch,
    NonHermitianInput,
    PolyFormatError,
)

MultiIndex = tuple  # tuple[int, ...] of length n

HERMITIAN_ABS_TOL = 1e-12
ZERO_EIG_REL_TOL = 1e-10
PRODUCT_TERM_CAP = 10 ** 6


def grlex_key(idx: MultiIndex):
    """Sort key for graded lexicographic order."""
    return (sum(idx), idx)


def _check_index(idx, n) -> MultiIndex:
    out = tuple(int(e) for e in idx)
    if len(out) != n:
        raise DimensionMismatch(f"multi-index {out} has length {len(out)}, expected {n}")
    if any(e < 0 for e in out):
        raise ValueError(f"multi-index {out} has a negative exponent")
    return out


@dataclass(frozen=True)
class HermitianPoly:
    """Sparse Hermitian symmetric polynomial on C^n.

    ``terms`` maps (alpha, beta) -> complex coefficient.  Instances are
    treated as immutable; do not mutate ``terms`` after construction.
    """

    n: int
    terms: dict

    def __post_init__(self):
        for a, b in self.terms:
            if len(a) != self.n or len(b) != self.n:
                raise DimensionMismatch(
                    f"term ({a}, {b}) does not match dimension n={self.n}"
                )

    @cached_property
    def basis(self) -> tuple:
        """Occurring multi-indices in graded lexicographic order."""
        idx = {a for a, _ in self.terms} | {b for _, b in self.terms}
        return tuple(sorted(idx, key=grlex_key))

    @cached_property
    def exponents(self) -> np.ndarray:
        """Basis as an integer array of shape (D, n)."""
        arr = np.array(self.basis, dtype=np.int64).reshape(len(self.basis), self.n)
        arr.setflags(write=False)
        return arr

    @cached_property
    def coefficient_matrix(self) -> np.ndarray:
        """Hermitian D x D matrix of coefficients over ``basis``."""
        pos = {idx: i for i, idx in enumerate(self.basis)}
        c = np.zeros((len(self.basis),) * 2, dtype=complex)
        for (a, b), coeff in self.terms.items():
            c[pos[a], pos[b]] = coeff
        c.setflags(write=False)
        return c

    @property
    def num_terms(self) -> int:
        return len(self.terms)


def from_terms(n: int, terms: Iterable) -> HermitianPoly:
    """Build a polynomial from (alpha, beta, coefficient) triples.

    Duplicate (alpha, beta) keys are merged by summation.  Raises
    NonHermitianInput if the merged data is not Hermitian symmetric within
    absolute tolerance 1e-12 (missing conjugate partners count as zero).
    """
    merged: dict = {}
    for a, b, c in terms:
        key = (_check_index(a, n), _check_index(b, n))
        merged[key] = merged.get(key, 0j) + complex(c)
    _validate_hermitian(merged)
    return HermitianPoly(n, merged)


def _validate_hermitian(term_map: dict) -> None:
    for (a, b), c in term_map.items():
        mate = term_map.get((b, a), 0j)
        if abs(c - mate.conjugate()) > HERMITIAN_ABS_TOL:
            raise NonHermitianInput(
                f"c[{a},{b}]={c} is not the conjugate of c[{b},{a}]={mate}"
            )


def monomials(points, exponents: np.ndarray) -> np.ndarray:
    """Evaluate z^e for each exponent row e.

    ``points`` has shape (..., n); result has shape (..., D).  Powers are
    built by cumulative products so large batches stay cheap.
    """
    pts = np.asarray(points, dtype=complex)
    D, n = exponents.shape
    out = np.ones(pts.shape[:-1] + (D,), dtype=complex)
    if D == 0:
        return out
    for d in range(n):
        col = exponents[:, d]
        emax = int(col.max())
        if emax == 0:
            continue
        pw = np.empty(pts.shape[:-1] + (emax + 1,), dtype=complex)
        pw[..., 0] = 1.0
        for e in range(1, emax + 1):
            pw[..., e] = pw[..., e - 1] * pts[..., d]
        out = out * pw[..., col]
    return out


def evaluate(poly: HermitianPoly, z, w) -> complex:
    """R(z, wbar) = sum c[a,b] z^a conj(w)^b."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if z.shape != (poly.n,) or w.shape != (poly.n,):
        raise DimensionMismatch(
            f"points of shape {z.shape}/{w.shape} for polynomial on C^{poly.n}"
        )
    if not poly.terms:
        return 0j
    phi_z = monomials(z, poly.exponents)
    phi_w = monomials(w, poly.exponents)
    return complex(phi_z @ poly.coefficient_matrix @ phi_w.conj())


def evaluate_diag(poly: HermitianPoly, z) -> float:
    """R(z, zbar); real by Hermitian symmetry."""
    return evaluate(poly, z, z).real


def add(a: HermitianPoly, b: HermitianPoly) -> HermitianPoly:
    if a.n != b.n:
        raise DimensionMismatch(f"cannot add polynomials on C^{a.n} and C^{b.n}")
    out = dict(a.terms)
    for key, c in b.terms.items():
        out[key] = out.get(key, 0j) + c
    return HermitianPoly(a.n, out)


def scale(a: HermitianPoly, t: float) -> HermitianPoly:
    """Scale by a real number (complex scaling would break Hermitian symmetry)."""
    t = float(t)
    return HermitianPoly(a.n, {key: t * c for key, c in a.terms.items()})


def multiply(a: HermitianPoly, b: HermitianPoly) -> HermitianPoly:
    """Coefficient convolution; exponents add pairwise in both slots."""
    if a.n != b.n:
        raise DimensionMismatch(f"cannot multiply polynomials on C^{a.n} and C^{b.n}")
    out: dict = {}
    for (a1, b1), c1 in a.terms.items():
        if c1 == 0:
            continue
        for (a2, b2), c2 in b.terms.items():
            if c2 == 0:
                continue
            key = (
                tuple(x + y for x, y in zip(a1, a2)),
                tuple(x + y for x, y in zip(b1, b2)),
            )
            out[key] = out.get(key, 0j) + c1 * c2
    return HermitianPoly(a.n, out)


def signature(poly: HermitianPoly, rel_tol: float = ZERO_EIG_REL_TOL):
    """Eigenvalue counts (N_plus, N_minus, N_zero) of the coefficient matrix.

    An eigenvalue e counts as zero iff |e| <= rel_tol * max|eigenvalue|.
    """
    if len(poly.basis) == 0:
        return (0, 0, 0)
    eigs = np.linalg.eigvalsh(poly.coefficient_matrix)
    top = float(np.max(np.abs(eigs)))
    thr = rel_tol * top
    n_plus = int(np.sum(eigs > thr))
    n_minus = int(np.sum(eigs < -thr))
    return (n_plus, n_minus, len(eigs) - n_plus - n_minus)


@dataclass(frozen=True)
class HolomorphicRep:
    """Holomorphic representation R = ||f||^2 - ||g||^2.

    Components are sparse holomorphic polynomials (MultiIndex -> complex).
    ``f_components`` come first in the stacked component order used by the
    Gram determinant expansions.
    """

    n: int
    f_components: tuple
    g_components: tuple

    @property
    def p(self) -> int:
        return len(self.f_components)

    @property
    def q(self) -> int:
        return len(self.g_components)

    @cached_property
    def _stacked(self):
        comps = list(self.f_components) + list(self.g_components)
        idx = sorted({a for comp in comps for a in comp}, key=grlex_key)
        pos = {a: i for i, a in enumerate(idx)}
        exps = np.array(idx, dtype=np.int64).reshape(len(idx), self.n)
        weights = np.zeros((len(comps), len(idx)), dtype=complex)
        for j, comp in enumerate(comps):
            for a, c in comp.items():
                weights[j, pos[a]] = c
        exps.setflags(write=False)
        weights.setflags(write=False)
        return exps, weights

    def component_values(self, points) -> np.ndarray:
        """Evaluate [f_1..f_p, g_1..g_q] at points of shape (..., n) -> (..., p+q)."""
        pts = np.asarray(points, dtype=complex)
        if pts.shape[-1] != self.n:
            raise DimensionMismatch(
                f"points of dimension {pts.shape[-1]} for representation on C^{self.n}"
            )
        exps, weights = self._stacked
        if weights.shape[0] == 0:
            return np.zeros(pts.shape[:-1] + (0,), dtype=complex)
        return monomials(pts, exps) @ weights.T

    def to_poly(self) -> HermitianPoly:
        """Expand sum f_j conj(f_j) - sum g_j conj(g_j) into a term map."""
        out: dict = {}
        for sign, comps in ((1.0, self.f_components), (-1.0, self.g_components)):
            for comp in comps:
                for a, ca in comp.items():
                    for b, cb in comp.items():
                        key = (a, b)
                        out[key] = out.get(key, 0j) + sign * ca * cb.conjugate()
        return HermitianPoly(self.n, out)


def holomorphic_rep(poly: HermitianPoly, rel_tol: float = ZERO_EIG_REL_TOL) -> HolomorphicRep:
    """Split R into f (positive spectrum) and g (negative spectrum) components.

    Eigendecomposes the coefficient matrix and turns each eigenvalue mu with
    |mu| above rel_tol * spectral radius into the component
    sqrt(|mu|) * (eigenvector-weighted monomial combination).
    """
    if len(poly.basis) == 0:
        return HolomorphicRep(poly.n, (), ())
    eigs, vecs = np.linalg.eigh(poly.coefficient_matrix)
    thr = rel_tol * float(np.max(np.abs(eigs))) if len(eigs) else 0.0
    f_comps = []
    g_comps = []
    # eigh returns ascending order; take f largest-first, g most-negative-first
    for j in range(len(eigs) - 1, -1, -1):
        if eigs[j] > thr:
            f_comps.append(_component(poly.basis, math.sqrt(eigs[j]), vecs[:, j]))
    for j in range(len(eigs)):
        if eigs[j] < -thr:
            g_comps.append(_component(poly.basis, math.sqrt(-eigs[j]), vecs[:, j]))
    return HolomorphicRep(poly.n, tuple(f_comps), tuple(g_comps))


def _component(basis, weight, vec) -> dict:
    return {a: weight * v for a, v in zip(basis, vec) if v != 0}


def is_bihomogeneous(poly: HermitianPoly) -> Optional[int]:
    """Common degree m if every term has |alpha| = |beta| = m, else None.

    The polynomial with no terms is bihomogeneous of degree 0 by convention.
    """
    if not poly.terms:
        return 0
    degrees = {(sum(a), sum(b)) for a, b in poly.terms}
    if len(degrees) == 1:
        da, db = next(iter(degrees))
        if da == db:
            return da
    return None


def dangelo_family(m: int, lam: float) -> HermitianPoly:
    """<z,w>^(2m) - lam * (z1 z2 conj(w1) conj(w2))^m on C^2.

    Exact binomial construction; the middle coefficient C(2m, m) - lam is
    kept even when it is exactly zero so the boundary member reports a zero
    eigenvalue.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    terms = {}
    for j in range(2 * m + 1):
        c = float(math.comb(2 * m, j))
        if j == m:
            c -= float(lam)
        key = ((j, 2 * m - j), (j, 2 * m - j))
        terms[key] = complex(c)
    return HermitianPoly(2, terms)


def example1_family(c: float) -> HermitianPoly:
    """z1^2 conj(w1)^2 + (c-2) z1 z2 conj(w1 w2) + z2^2 conj(w2)^2 on C^2."""
    return HermitianPoly(
        2,
        {
            ((2, 0), (2, 0)): 1 + 0j,
            ((1, 1), (1, 1)): complex(float(c) - 2.0),
            ((0, 2), (0, 2)): 1 + 0j,
        },
    )


def power_positivity(
    poly: HermitianPoly,
    d: int,
    rel_tol: float = ZERO_EIG_REL_TOL,
    term_cap: int = PRODUCT_TERM_CAP,
) -> bool:
    """Whether the coefficient matrix of R^d is positive semidefinite.

    Tests the fixed-exponent power condition only.  Raises
    CombinatorialBudgetExceeded if an intermediate power could exceed
    ``term_cap`` terms.
    """
    if d < 1:
        raise ValueError("d must be a positive integer")
    acc = poly
    for _ in range(d - 1):
        if acc.num_terms * poly.num_terms > term_cap:
            raise CombinatorialBudgetExceeded(
                f"R^{d} could have more than {term_cap} terms"
            )
        acc = multiply(acc, poly)
    return signature(acc, rel_tol)[1] == 0


# ---------------------------------------------------------------------------
# JSON interchange
#
# Schema: {"n": 2, "terms": [{"a": [2,0], "b": [2,0], "c": [1.0, 0.0]}, ...]}
# with complex coefficients as [re, im] decimal floats.  The reader rejects
# NaN/Inf and validates Hermitian symmetry.
# ---------------------------------------------------------------------------


def poly_to_json(poly: HermitianPoly) -> str:
    entries = []
    for (a, b) in sorted(poly.terms, key=lambda key: (grlex_key(key[0]), grlex_key(key[1]))):
        c = poly.terms[(a, b)]
        entries.append({"a": list(a), "b": list(b), "c": [c.real, c.imag]})
    return json.dumps({"n": poly.n, "terms": entries})


def _reject_constant(name: str):
    raise PolyFormatError(f"non-finite constant {name!r} in polynomial JSON")


def poly_from_json(text: str) -> HermitianPoly:
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except PolyFormatError:
        raise
    except json.JSONDecodeError as exc:
        raise PolyFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or "n" not in data or "terms" not in data:
        raise PolyFormatError("polynomial JSON must have 'n' and 'terms' keys")
    n = data["n"]
    if not isinstance(n, int) or n < 1:
        raise PolyFormatError(f"bad dimension n={n!r}")
    triples = []
    if not isinstance(data["terms"], list):
        raise PolyFormatError("'terms' must be a list")
    for entry in data["terms"]:
        if not isinstance(entry, dict) or set(entry) - {"a", "b", "c"}:
            raise PolyFormatError(f"bad term entry {entry!r}")
        try:
            a = tuple(int(e) for e in entry["a"])
            b = tuple(int(e) for e in entry["b"])
            re, im = (float(x) for x in entry["c"])
        except (KeyError, TypeError, ValueError) as exc:
            raise PolyFormatError(f"bad term entry {entry!r}") from exc
        if not (math.isfinite(re) and math.isfinite(im)):
            raise PolyFormatError(f"non-finite coefficient in {entry!r}")
        triples.append((a, b, complex(re, im)))
    try:
        return from_terms(n, triples)
    except NonHermitianInput:
        raise
    except (DimensionMismatch, ValueError) as exc:
        raise PolyFormatError(str(exc)) from exc
