"""Numerical membership tests for the positivity classes P_k.

The verdicts are asymmetric by design: a Violated outcome carries a point
configuration whose Gram matrix has a certified negative eigenvalue (a
proof, re-checkable independently of the search), while NoViolationFound
only reports that a given search budget failed to find one.

Membership at level k is decided through the inductive cascade over
j = 1..k: R is in P_k iff it is in P_(k-1) and every k-point Gram
determinant is nonnegative, so the first level with a negative certified
minimum eigenvalue settles the question.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import DimensionMismatch
from .gramcore import PSD_TOL, GramReport, PointConfig, gram_batch, gram_matrix
from .hermpoly import HermitianPoly, is_bihomogeneous
from .search import DEFAULT_BUDGET, SearchBudget, coordinate_polish, minimize_configs


class WitnessKind(str, Enum):
    STOCHASTIC = "Stochastic"
    ROOTS_OF_UNITY = "RootsOfUnity"
    ORTHOGONAL_PAIR = "OrthogonalPair"
    PROP5_POINTS = "Prop5Points"
    USER_SUPPLIED = "UserSupplied"


@dataclass(frozen=True)
class Witness:
    """A configuration certifying non-membership: min Gram eigenvalue < 0."""

    cfg: PointConfig
    min_eigenvalue: float
    determinant: float
    kind: WitnessKind

    def to_json(self) -> str:
        data = {
            "k": self.cfg.k,
            "points": [[[z.real, z.imag] for z in p] for p in self.cfg.points],
            "min_eig": self.min_eigenvalue,
            "determinant": self.determinant,
            "kind": self.kind.value,
        }
        if self.cfg.coeff_vector is not None:
            data["a"] = [[a.real, a.imag] for a in self.cfg.coeff_vector]
        return json.dumps(data)


def witness_from_json(text: str) -> Witness:
    data = json.loads(text)
    pts = tuple(tuple(complex(re, im) for re, im in p) for p in data["points"])
    cv = None
    if "a" in data:
        cv = tuple(complex(re, im) for re, im in data["a"])
    return Witness(
        cfg=PointConfig(pts, cv),
        min_eigenvalue=float(data["min_eig"]),
        determinant=float(data.get("determinant", 0.0)),
        kind=WitnessKind(data["kind"]),
    )


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of a P_k membership search.

    ``witness is not None`` means Violated; otherwise NoViolationFound with
    the budget bookkeeping (restarts per level, best minimum eigenvalue seen,
    seed).  NoViolationFound is evidence, not a membership proof.
    """

    k: int
    witness: Optional[Witness]
    restarts: int
    best_min_eigenvalue: float
    seed: int

    @property
    def violated(self) -> bool:
        return self.witness is not None

    def to_json(self) -> str:
        if self.violated:
            return json.dumps(
                {
                    "k": self.k,
                    "outcome": "Violated",
                    "witness": json.loads(self.witness.to_json()),
                }
            )
        return json.dumps(
            {
                "k": self.k,
                "outcome": "NoViolationFound",
                "restarts": self.restarts,
                "best_min_eigenvalue": self.best_min_eigenvalue,
                "seed": self.seed,
            }
        )


def min_gram_eig_batch(poly: HermitianPoly, configs: np.ndarray) -> np.ndarray:
    """Minimum Gram eigenvalue per configuration; closed forms for k <= 2."""
    g = gram_batch(poly, configs)
    k = g.shape[-1]
    if k == 1:
        return g[..., 0, 0].real
    if k == 2:
        a = g[..., 0, 0].real
        d = g[..., 1, 1].real
        off = g[..., 0, 1]
        half = 0.5 * (a + d)
        return half - np.sqrt((0.5 * (a - d)) ** 2 + np.abs(off) ** 2)
    return np.linalg.eigvalsh(g)[..., 0]


def verify_witness(poly: HermitianPoly, cfg: PointConfig):
    """Recompute the Gram report from scratch; (min eigenvalue, determinant).

    This is the independent certificate check: it shares nothing with the
    search path beyond the polynomial itself.
    """
    report = gram_matrix(poly, cfg)
    return report.min_eigenvalue, report.determinant


def _certified(report: GramReport, tol: float = PSD_TOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(report.matrix))))
    return report.min_eigenvalue < -tol * scale


def test_membership(
    poly: HermitianPoly,
    k: int,
    budget: SearchBudget = DEFAULT_BUDGET,
    seed: int = 0,
) -> MembershipVerdict:
    """Search for a violating configuration at levels j = 1..k.

    Each level runs ``budget.restarts`` independent restarts of adaptive
    random-walk descent on the minimum Gram eigenvalue (points normalized to
    the unit sphere for bihomogeneous inputs, sampled in a ball of
    ``budget.radius`` otherwise), then polishes the best configuration with
    deterministic coordinate descent.  The first certified negative minimum
    eigenvalue yields Violated.  Identical (poly, k, budget, seed) yield
    identical verdicts; the level-j search does not depend on k, so a
    violation found at level j is found again by any test at k' >= j.
    """
    if k < 1:
        raise ValueError("class index k must be >= 1")
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    sphere = is_bihomogeneous(poly) is not None
    best = math.inf

    def objective(configs):
        return min_gram_eig_batch(poly, configs)

    def certify(config_arr) -> bool:
        return _certified(gram_matrix(poly, PointConfig.from_array(config_arr)))

    for j in range(1, k + 1):
        val, config = minimize_configs(
            objective,
            j,
            poly.n,
            budget=budget,
            seed_key=(seed, j),
            sphere=sphere,
            certify=certify,
        )
        val, config = coordinate_polish(
            objective,
            config,
            sweeps=budget.polish_sweeps,
            sphere=sphere,
            radius=budget.radius,
        )
        cfg = PointConfig.from_array(config)
        report = gram_matrix(poly, cfg)
        if _certified(report):
            witness = Witness(
                cfg=cfg,
                min_eigenvalue=report.min_eigenvalue,
                determinant=report.determinant,
                kind=WitnessKind.STOCHASTIC,
            )
            return MembershipVerdict(
                k=k,
                witness=witness,
                restarts=budget.restarts,
                best_min_eigenvalue=report.min_eigenvalue,
                seed=seed,
            )
        best = min(best, report.min_eigenvalue)
    return MembershipVerdict(
        k=k, witness=None, restarts=budget.restarts, best_min_eigenvalue=best, seed=seed
    )


def refine_witness(
    poly: HermitianPoly, k: int, cfg: PointConfig, steps: int
) -> PointConfig:
    """Deterministic local descent on the minimum Gram eigenvalue.

    Coordinate-wise complex perturbations with a shrinking step,
    re-normalizing to the sphere for bihomogeneous inputs.  Never increases
    the minimum eigenvalue; zero steps returns the input unchanged.
    """
    if cfg.k != k:
        raise DimensionMismatch(f"configuration has {cfg.k} points, expected {k}")
    if steps == 0:
        return cfg
    sphere = is_bihomogeneous(poly) is not None

    def objective(configs):
        return min_gram_eig_batch(poly, configs)

    _, refined = coordinate_polish(
        objective,
        cfg.as_array(),
        sweeps=steps,
        sphere=sphere,
        radius=DEFAULT_BUDGET.radius,
    )
    return PointConfig.from_array(refined, cfg.coeff_vector)


def roots_of_unity_witness(m: int) -> PointConfig:
    """m+1 points (w_i, 1/w_i) with w_i^2 walking the (m+1)-st roots of unity.

    With |w_i| = 1, every monomial component z1^(2m-j) z2^j with j != m sums
    to zero over the configuration while (z1 z2)^m sums to m+1, which is what
    makes these points kill the norm side of the perturbed families.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    pts = []
    for i in range(m + 1):
        w = complex(np.exp(1j * math.pi * i / (m + 1)))  # w^2 = exp(2*pi*i*i/(m+1))
        pts.append((w, w.conjugate()))  # 1/w = conj(w) on the unit circle
    return PointConfig(tuple(pts))


def orthogonal_pair_witness() -> PointConfig:
    """The two-point configuration ((1,1), (1,-1))."""
    return PointConfig(((1 + 0j, 1 + 0j), (1 + 0j, -1 + 0j)))


def prop5_points(m: int) -> PointConfig:
    """The m points (1, eta^(k-1)) with eta a primitive m-th root of unity."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    pts = tuple(
        (1 + 0j, complex(np.exp(2j * math.pi * j / m))) for j in range(m)
    )
    return PointConfig(pts)
