"""Threshold (theta, N) for the linearized-operator lower bound, and its verifier.

When the equation sum 1/gfrak_i = n/psi holds, the subsolution satisfies
eps <= c_i <= 1/eps and sum 1/c_i <= n/psi, and the trace W = sum gfrak_i is at
least N, the linearized operator applied to the subsolution obeys

    sum_i (1/gfrak_i)^2 c_i >= (n + theta) / psi.

The construction: the largest gfrak_i is at least W/n >= psi_max/delta, so the
remaining reciprocals carry at least (n - delta)/psi. Cauchy-Schwarz against
sum_{i>=2} 1/c_i <= n/psi - eps then gives the bound once
(n - delta)^2 (1 + eps psi/n) >= n (n + theta), which is tightest at psi_min.
"""

import logging
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy.optimize import brentq

from jeq.errors import HypothesisViolation, InfeasibleThreshold

logger = logging.getLogger(__name__)

EQUATION_RTOL = 1e-9
DELTA_SHRINK = 1e-6


class ConeThreshold(BaseModel):
    """Constants returned by lemma_threshold."""
    n: int = Field(ge=2)
    theta: float = Field(gt=0)
    bigN: float
    delta: float = Field(gt=0)
    epsilon: float = Field(gt=0, le=1)
    psi_min: float = Field(gt=0)
    psi_max: float = Field(gt=0)

    @model_validator(mode="after")
    def _check_invariants(self) -> "ConeThreshold":
        if self.theta > self.epsilon * self.psi_min:
            raise ValueError("theta must not exceed epsilon * psi_min")
        if self.bigN < self.n:
            raise ValueError("bigN must be >= n")
        if self.psi_min > self.psi_max:
            raise ValueError("psi_min must not exceed psi_max")
        return self


class LemmaCertificate(BaseModel):
    """Outcome of a randomized search for counterexamples."""
    theta: float
    bigN: float
    samples: int
    worst_margin: Optional[float] = None
    violations: int = 0
    corner_margin: Optional[float] = None


def lemma_threshold(epsilon: float, psi_min: float, psi_max: float, n: int) -> ConeThreshold:
    """
    Builds (theta, N) for the given subsolution bound and psi range.

    theta is fixed at epsilon * psi_min / 2; delta in (0, n) is the root of
    (n - delta)^2 (1 + epsilon psi_min / n) - n (n + theta), shrunk slightly
    so the inequality is strict, and N = max(n, n psi_max / delta).

    Args:
        epsilon: Subsolution bound, 0 < epsilon <= 1.
        psi_min: Lower bound of psi.
        psi_max: Upper bound of psi.
        n: Complex dimension.

    Returns:
        A validated ConeThreshold.

    Raises:
        InfeasibleThreshold: If the inputs are inconsistent or no delta exists.
    """
    if not (0 < epsilon <= 1) or not (0 < psi_min <= psi_max) or n < 2:
        raise InfeasibleThreshold(
            f"need 0 < epsilon <= 1, 0 < psi_min <= psi_max and n >= 2; "
            f"got epsilon={epsilon}, psi=[{psi_min}, {psi_max}], n={n}"
        )
    theta = 0.5 * epsilon * psi_min
    slack = 1.0 + epsilon * psi_min / n

    def excess(delta: float) -> float:
        return (n - delta) ** 2 * slack - n * (n + theta)

    if excess(0.0) <= 0:
        raise InfeasibleThreshold(f"no admissible delta for epsilon={epsilon}, psi_min={psi_min}")
    root = brentq(excess, 0.0, float(n), xtol=1e-15)
    delta = root * (1.0 - DELTA_SHRINK)
    if delta <= 0 or excess(delta) < 0:
        raise InfeasibleThreshold(f"delta bracketing collapsed (root {root:.3e})")

    bigN = max(float(n), n * psi_max / delta)
    logger.debug("lemma threshold: theta=%.6g delta=%.6g N=%.6g", theta, delta, bigN)
    return ConeThreshold(
        n=n, theta=theta, bigN=bigN, delta=delta,
        epsilon=epsilon, psi_min=psi_min, psi_max=psi_max,
    )


def linearized_trace(gfrak_diag, chi_plus_usub_diag):
    """Returns sum_i (1/gfrak_i)^2 c_i along the last axis."""
    r = 1.0 / np.asarray(gfrak_diag, dtype=float)
    return np.sum(r * r * np.asarray(chi_plus_usub_diag, dtype=float), axis=-1)


def check_hypotheses(gfrak_diag, chi_plus_usub_diag, psi: float, thr: ConeThreshold) -> None:
    """
    Raises HypothesisViolation unless the inputs meet every assumption of the bound.
    """
    gfrak = np.asarray(gfrak_diag, dtype=float)
    c = np.asarray(chi_plus_usub_diag, dtype=float)
    n = thr.n
    if gfrak.shape != (n,) or c.shape != (n,):
        raise HypothesisViolation(f"expected {n}-vectors, got {gfrak.shape} and {c.shape}")
    if np.any(gfrak <= 0):
        raise HypothesisViolation("gfrak entries must be positive")
    if not (thr.psi_min <= psi <= thr.psi_max):
        raise HypothesisViolation(f"psi={psi} outside [{thr.psi_min}, {thr.psi_max}]")
    if abs(np.sum(1.0 / gfrak) - n / psi) > EQUATION_RTOL * (n / psi):
        raise HypothesisViolation("equation sum 1/gfrak_i = n/psi does not hold")
    eps = thr.epsilon
    if np.any(c < eps) or np.any(c > 1.0 / eps):
        raise HypothesisViolation(f"subsolution entries leave [{eps}, {1.0 / eps}]")
    if np.sum(1.0 / c) > n / psi:
        raise HypothesisViolation("subsolution inequality sum 1/c_i <= n/psi fails")
    if np.sum(gfrak) < thr.bigN:
        raise HypothesisViolation(f"trace {np.sum(gfrak):.6g} below threshold N={thr.bigN:.6g}")


def lemma_verify(gfrak_diag, chi_plus_usub_diag, psi: float, thr: ConeThreshold) -> bool:
    """
    Checks sum (1/gfrak_i)^2 c_i >= (n + theta)/psi at one diagonal configuration.

    Raises:
        HypothesisViolation: If the configuration does not meet the hypotheses.
    """
    check_hypotheses(gfrak_diag, chi_plus_usub_diag, psi, thr)
    return bool(linearized_trace(gfrak_diag, chi_plus_usub_diag) >= (thr.n + thr.theta) / psi)


def sample_admissible(thr: ConeThreshold, count: int, rng: np.random.Generator):
    """
    Draws diagonal configurations satisfying the hypotheses of lemma_verify.

    Subsolution entries are log-uniform in [eps, 1/eps]; psi is uniform on the
    part of [psi_min, psi_max] where the subsolution inequality holds; the
    largest gfrak entry is log-uniform above N/n and the remaining reciprocals
    split n/psi - 1/gfrak_1 by Dirichlet weights. Draws with trace below N are
    rejected.

    Returns:
        Tuple (gfrak, c, psi) of arrays with shapes (m, n), (m, n), (m,), m <= count.
    """
    n, eps = thr.n, thr.epsilon
    if eps < 1.0:
        c = np.clip(np.exp(rng.uniform(np.log(eps), -np.log(eps), size=(count, n))), eps, 1.0 / eps)
    else:
        # eps = 1 pins every subsolution entry to 1
        c = np.ones((count, n))
    psi_hi = np.minimum(thr.psi_max, n / np.sum(1.0 / c, axis=1))
    keep = psi_hi >= thr.psi_min
    c, psi_hi = c[keep], psi_hi[keep]
    m = len(c)
    psi = thr.psi_min + (psi_hi - thr.psi_min) * rng.uniform(size=m)

    g1 = np.exp(rng.uniform(np.log(thr.bigN / n), np.log(thr.bigN * 1e4), size=m))
    r1 = 1.0 / g1
    rest = n / psi - r1
    alpha = rng.uniform(0.2, 5.0, size=m)
    # Dirichlet weights with a per-draw concentration, via normalized gammas
    gammas = rng.gamma(np.broadcast_to(alpha[:, None], (m, n - 1)))
    weights = gammas / np.maximum(np.sum(gammas, axis=1, keepdims=True), 1e-300)
    r_rest = np.maximum(rest[:, None] * weights, 1e-300)
    gfrak = np.concatenate([g1[:, None], 1.0 / r_rest], axis=1)

    keep = (rest > 0) & (np.sum(gfrak, axis=1) >= thr.bigN) & np.all(np.isfinite(gfrak), axis=1)
    return gfrak[keep], c[keep], psi[keep]


def lemma_corner_margin(thr: ConeThreshold, points: int = 200) -> Optional[float]:
    """
    Worst margin over the tight family gfrak = (W - (n-1)t, t, ..., t), c = eps.

    t is fixed by the equation, W ranges over [N, 100 N] and psi over the part of
    [psi_min, psi_max] where c = eps is a subsolution (psi <= eps).

    Returns:
        The minimum of sum (1/gfrak_i)^2 eps - (n + theta)/psi, or None when the
        family is empty for this psi range.
    """
    n, eps = thr.n, thr.epsilon
    psi_top = min(thr.psi_max, eps)
    if psi_top < thr.psi_min:
        return None
    worst = np.inf
    for psi in np.linspace(thr.psi_min, psi_top, 5):
        for W in np.geomspace(max(thr.bigN, n * psi), 100.0 * thr.bigN, points):
            def equation(t: float) -> float:
                return 1.0 / (W - (n - 1) * t) + (n - 1) / t - n / psi
            t_hi = W / n
            t = t_hi if equation(t_hi) >= 0 else brentq(equation, t_hi * 1e-15, t_hi, xtol=1e-300, rtol=1e-14)
            gfrak = np.array([W - (n - 1) * t] + [t] * (n - 1))
            value = linearized_trace(gfrak, np.full(n, eps)) - (n + thr.theta) / psi
            worst = min(worst, float(value))
    return worst


def lemma_batch_verify(thr: ConeThreshold, samples: int, seed: int = 0, chunk: int = 20000) -> LemmaCertificate:
    """
    Randomized counterexample search for the bound certified by thr.

    Args:
        thr: Threshold from lemma_threshold.
        samples: Number of admissible configurations to test.
        seed: Seed for numpy's default generator.
        chunk: Draws per sampling round.

    Returns:
        A LemmaCertificate with the worst margin and the violation count. When no
        configuration can meet the hypotheses (psi_min > 1/eps) the bound is
        vacuous and the certificate carries samples=0 and no margin.

    Raises:
        InfeasibleThreshold: If the sampler cannot produce admissible draws.
    """
    if thr.psi_min > 1.0 / thr.epsilon:
        logger.info("lemma search: no admissible configuration for psi_min=%g, eps=%g", thr.psi_min, thr.epsilon)
        return LemmaCertificate(theta=thr.theta, bigN=thr.bigN, samples=0)

    rng = np.random.default_rng(seed)
    worst = np.inf
    violations = 0
    tested = 0
    rounds = 0
    while tested < samples:
        rounds += 1
        if rounds > 1000:
            raise InfeasibleThreshold(f"only {tested} admissible samples after {rounds - 1} rounds")
        gfrak, c, psi = sample_admissible(thr, chunk, rng)
        take = min(len(psi), samples - tested)
        gfrak, c, psi = gfrak[:take], c[:take], psi[:take]
        margin = linearized_trace(gfrak, c) - (thr.n + thr.theta) / psi
        if take:
            worst = min(worst, float(np.min(margin)))
            violations += int(np.sum(margin < 0))
        tested += take

    corner = lemma_corner_margin(thr)
    if corner is not None and corner < 0:
        violations += 1
    logger.info("lemma search: %d samples, worst margin %.6g, %d violations", tested, worst, violations)
    return LemmaCertificate(
        theta=thr.theta, bigN=thr.bigN, samples=tested,
        worst_margin=worst if tested else None, violations=violations, corner_margin=corner,
    )
