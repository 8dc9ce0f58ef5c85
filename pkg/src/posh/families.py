"""One-parameter families R_lambda = P - lambda*Q and their thresholds.

For each class index k the family has a cutoff lambda*(k) = sup of the
lambdas whose member stays in P_k.  Thresholds are estimated by bisection
on the membership search and carry an asymmetric bracket: the upper end is
certified (a verified witness exists there), the lower end is evidential
(the search found nothing).  The P_infinity cutoff needs no search at all:
it is the largest lambda keeping the coefficient matrix PSD, located by
eigenvalue bisection.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import (
    BadBracket,
    DegenerateFamily,
    DimensionMismatch,
    InconclusiveIndex,
    UnboundedThreshold,
)
from .gramcore import PSD_TOL, PointConfig, gram_matrix
from .hermpoly import (
    HermitianPoly,
    HolomorphicRep,
    add,
    dangelo_family,
    example1_family,
    grlex_key,
    scale,
)
from .search import DEFAULT_BUDGET, SearchBudget, coordinate_polish, minimize_configs
from .witness import (
    MembershipVerdict,
    Witness,
    WitnessKind,
    refine_witness,
    test_membership,
    verify_witness,
)

DEFAULT_BISECTION_TOL = 1e-3  # finer than every gap between adjacent cutoffs at m <= 3
PINF_TOL = 1e-10


@dataclass(frozen=True)
class FamilySpec:
    """Family member(lambda) = base - lambda * perturbation."""

    base: HermitianPoly
    perturbation: HermitianPoly
    description: str = ""

    def __post_init__(self):
        if self.base.n != self.perturbation.n:
            raise DimensionMismatch("base and perturbation live on different C^n")


def member(fam: FamilySpec, lam: float) -> HermitianPoly:
    return add(fam.base, scale(fam.perturbation, -float(lam)))


def _middle_monomial(m: int) -> HermitianPoly:
    key = ((m, m), (m, m))
    return HermitianPoly(2, {key: 1 + 0j})


def dangelo_family_spec(m: int) -> FamilySpec:
    """<z,w>^(2m) - lambda*(z1 z2 conj(w1 w2))^m as a FamilySpec."""
    return FamilySpec(
        base=dangelo_family(m, 0.0),
        perturbation=_middle_monomial(m),
        description=f"dangelo m={m}",
    )


def example1_family_spec() -> FamilySpec:
    """The c-indexed example as a lambda family via lambda = 2 - c.

    member(lambda) equals example1_family(2 - lambda), so thresholds in c are
    recovered as c = 2 - lambda.
    """
    return FamilySpec(
        base=example1_family(2.0),
        perturbation=_middle_monomial(1),
        description="example1 (lambda = 2 - c)",
    )


def example1_lambda_to_c(lam: float) -> float:
    return 2.0 - lam


def dangelo_split_rep(m: int) -> HolomorphicRep:
    """The representation with ||f||^2 = ||z||^(4m) - C(2m,m)|z1 z2|^(2m), g = (z1 z2)^m.

    f holds every degree-2m monomial except the middle one, weighted by the
    square roots of the binomial coefficients.
    """
    f_comps = []
    for j in range(2 * m + 1):
        if j == m:
            continue
        f_comps.append({(j, 2 * m - j): complex(math.sqrt(math.comb(2 * m, j)))})
    g_comps = ({(m, m): 1 + 0j},)
    return HolomorphicRep(2, tuple(f_comps), g_comps)


@dataclass(frozen=True)
class ThresholdResult:
    """Bracketed estimate of lambda*(k) for one family.

    upper is certified by the attached witness; lower only records the
    largest probe where the search found nothing, so the true threshold
    satisfies lambda* <= upper.
    """

    k: int
    lower: float
    upper: float
    witness_at_upper: Witness
    bisection_tol: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "k": self.k,
                "lower": self.lower,
                "upper": self.upper,
                "tol": self.bisection_tol,
                "witness": json.loads(self.witness_at_upper.to_json()),
            }
        )


def _recertify(poly: HermitianPoly, cfg: PointConfig, kind: WitnessKind) -> Optional[Witness]:
    report = gram_matrix(poly, cfg)
    scale = max(1.0, float(np.max(np.abs(report.matrix))))
    if report.min_eigenvalue < -PSD_TOL * scale:
        return Witness(cfg, report.min_eigenvalue, report.determinant, kind)
    return None


def _carried_witness(
    poly: HermitianPoly, witness: Witness, budget: SearchBudget
) -> Optional[Witness]:
    """Re-certify a witness from a nearby family member, refining if needed."""
    direct = _recertify(poly, witness.cfg, witness.kind)
    if direct is not None:
        return direct
    refined = refine_witness(poly, witness.cfg.k, witness.cfg, steps=budget.polish_sweeps)
    return _recertify(poly, refined, WitnessKind.STOCHASTIC)


def threshold(
    fam: FamilySpec,
    k: int,
    bracket: Tuple[float, float],
    tol: float = DEFAULT_BISECTION_TOL,
    budget: SearchBudget = DEFAULT_BUDGET,
    seed: int = 0,
) -> ThresholdResult:
    """Bisection for lambda*(k) inside the given bracket.

    Requires member(lo) to pass the membership search and member(hi) to be
    certified violated; raises BadBracket otherwise.  At each probe a
    Violated verdict moves the upper end down (certified), NoViolationFound
    moves the lower end up (evidential).  A witness carried from the current
    upper end is re-verified (and locally refined) before paying for a fresh
    stochastic search, which keeps probes just above the threshold reliable.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise BadBracket(f"empty bracket ({lo}, {hi})")
    v_lo = test_membership(member(fam, lo), k, budget, seed)
    if v_lo.violated:
        raise BadBracket(f"member({lo}) already violated at level {k}")
    v_hi = test_membership(member(fam, hi), k, budget, seed)
    if not v_hi.violated:
        raise BadBracket(f"no violation certified for member({hi}) at level {k}")
    witness = v_hi.witness
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        poly = member(fam, mid)
        carried = _carried_witness(poly, witness, budget)
        if carried is not None:
            hi, witness = mid, carried
            continue
        verdict = test_membership(poly, k, budget, seed)
        if verdict.violated:
            hi, witness = mid, verdict.witness
        else:
            lo = mid
    return ThresholdResult(
        k=k, lower=lo, upper=hi, witness_at_upper=witness, bisection_tol=tol
    )


def _aligned_matrices(fam: FamilySpec):
    basis = sorted(
        {a for a, _ in fam.base.terms}
        | {b for _, b in fam.base.terms}
        | {a for a, _ in fam.perturbation.terms}
        | {b for _, b in fam.perturbation.terms},
        key=grlex_key,
    )
    pos = {idx: i for i, idx in enumerate(basis)}
    d = len(basis)
    cp = np.zeros((d, d), dtype=complex)
    cq = np.zeros((d, d), dtype=complex)
    for (a, b), c in fam.base.terms.items():
        cp[pos[a], pos[b]] = c
    for (a, b), c in fam.perturbation.terms.items():
        cq[pos[a], pos[b]] = c
    return cp, cq


def pinf_threshold(fam: FamilySpec, tol: float = PINF_TOL) -> float:
    """Largest lambda with a PSD coefficient matrix, by eigenvalue bisection.

    Exact in the sense that no point search is involved.  Raises
    UnboundedThreshold when the perturbation matrix is negative semidefinite
    (subtracting it can only help).
    """
    cp, cq = _aligned_matrices(fam)
    if cq.size == 0:
        raise UnboundedThreshold("zero perturbation")
    scale_q = max(1.0, float(np.max(np.abs(cq))))
    if float(np.max(np.linalg.eigvalsh(cq))) <= 1e-12 * scale_q:
        raise UnboundedThreshold("perturbation matrix is negative semidefinite")

    def psd_at(lam: float) -> bool:
        mat = cp - lam * cq
        scale = max(1.0, float(np.max(np.abs(mat))))
        return bool(np.linalg.eigvalsh(mat)[0] >= -1e-12 * scale)

    lo = 0.0
    if not psd_at(lo):
        probe = -1.0
        while not psd_at(probe):
            probe *= 2.0
            if probe < -2.0 ** 40:
                raise DegenerateFamily("no PSD member found on the real line")
        lo = probe
    hi = lo + 1.0
    while psd_at(hi):
        hi = lo + 2.0 * (hi - lo)
        if hi - lo > 2.0 ** 40:
            raise UnboundedThreshold("PSD members persist for arbitrarily large lambda")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if psd_at(mid):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class SigmaEval:
    """Componentwise sums of f and g over a configuration."""

    f_sums: tuple
    g_sums: tuple

    @property
    def f_norm_sq(self) -> float:
        return float(sum(abs(v) ** 2 for v in self.f_sums))

    @property
    def g_norm_sq(self) -> float:
        return float(sum(abs(v) ** 2 for v in self.g_sums))


def sigma_eval(rep: HolomorphicRep, cfg: PointConfig) -> SigmaEval:
    """(Sigma^N f)(z_1..z_N) = sum_i f(z_i), and the same for g."""
    values = rep.component_values(cfg.as_array())
    sums = values.sum(axis=0)
    return SigmaEval(
        f_sums=tuple(complex(v) for v in sums[: rep.p]),
        g_sums=tuple(complex(v) for v in sums[rep.p :]),
    )


def sigma_ratio_infimum(
    rep: HolomorphicRep,
    k: int,
    budget: SearchBudget = DEFAULT_BUDGET,
    seed: int = 0,
    denom_floor: float = 1e-12,
):
    """Numerical infimum of ||Sigma^k f||^2 / ||Sigma^k g||^2 on the sphere.

    Configurations whose denominator falls below ``denom_floor`` are skipped
    (numerator and denominator can vanish together; the infimum of interest
    happens away from that variety).  Returns (estimate, argmin config).
    """
    if rep.q == 0:
        raise DegenerateFamily("representation has no g components")

    def objective(configs):
        values = rep.component_values(configs)  # (B, k, p+q)
        sums = values.sum(axis=-2)
        num = np.sum(np.abs(sums[..., : rep.p]) ** 2, axis=-1)
        den = np.sum(np.abs(sums[..., rep.p :]) ** 2, axis=-1)
        return np.where(den < denom_floor, np.inf, num / np.maximum(den, denom_floor))

    val, config = minimize_configs(
        objective, k, rep.n, budget=budget, seed_key=(seed, 0), sphere=True
    )
    val, config = coordinate_polish(
        objective, config, sweeps=budget.polish_sweeps, sphere=True, radius=budget.radius
    )
    if not np.isfinite(val):
        raise DegenerateFamily("denominator vanished on every sampled configuration")
    return float(val), PointConfig.from_array(config)


def stability_index_estimate(
    fam: FamilySpec,
    k_max: int,
    lambda_grid: Optional[Sequence[float]] = None,
    budget: SearchBudget = DEFAULT_BUDGET,
    seed: int = 0,
    tol: float = DEFAULT_BISECTION_TOL,
):
    """Smallest k whose threshold matches the P_infinity cutoff, plus the table.

    Computes threshold(k) for k = 1..k_max over a shared bracket (derived
    from the bisection outputs themselves unless ``lambda_grid`` supplies an
    explicit (lo, hi) pair) and compares against pinf_threshold.  Raises
    InconclusiveIndex (carrying the table) when k_max is too small.
    """
    pinf = pinf_threshold(fam)
    if lambda_grid is not None:
        lo, hi = float(min(lambda_grid)), float(max(lambda_grid))
    else:
        lo = pinf
        hi = pinf + 1.0
        for _ in range(40):
            if test_membership(member(fam, hi), 1, budget, seed).violated:
                break
            hi = pinf + 2.0 * (hi - pinf)
        else:
            raise DegenerateFamily("no level-1 violation found above the PSD cutoff")
    table = {}
    hi_k = hi
    for k in range(1, k_max + 1):
        result = threshold(fam, k, (lo, hi_k), tol, budget, seed)
        table[k] = result
        # thresholds shrink with k; tightening the bracket keeps probes cheap
        hi_k = result.upper + max(0.25, 10.0 * tol)
    match_tol = max(3.0 * tol, 1e-6)
    for k in range(1, k_max + 1):
        if table[k].upper <= pinf + match_tol:
            return k, table
    raise InconclusiveIndex(
        f"threshold({k_max}) is still {table[k_max].upper - pinf:.3g} above the "
        f"P_infinity cutoff {pinf:.6g}",
        table=table,
    )


def stability_table_json(
    family_name: str,
    m: Optional[int],
    table,
    pinf: float,
    index: Optional[int],
) -> str:
    """Serialize a stability run: per-k brackets, PSD cutoff, index."""
    return json.dumps(
        {
            "family": family_name,
            "m": m,
            "thresholds": {
                str(k): [res.lower, res.upper] for k, res in sorted(table.items())
            },
            "pinf": pinf,
            "index": index,
        }
    )
