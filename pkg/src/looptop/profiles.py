"""Radial Hamiltonian profiles ``h(r) = μ ∫_1^r β`` and their action bounds.

β is a polynomial smoothstep ``S`` rescaled to ``[1, 1+δ]``: ``β = 0`` for
``r ≤ 1``, ``β = 1`` for ``r ≥ 1+δ``.  All polynomial coefficients are
exact rationals; evaluation is in double precision.

For a 1-periodic orbit on the level ``r`` the Hamiltonian action is
``A(r) = r h'(r) - h(r)`` and the symplectic action is ``h'(r)``; the gap
``A - h'`` must lie in ``[0, μδ]``, which with ``δ ≤ ε/μ`` gives
``A - ε ≤ h' ≤ A``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

GAP_TOL = 1e-12


class ProfileError(ValueError):
    pass


def smoothstep(order: int = 5) -> list[Fraction]:
    """Coefficients (ascending powers of t) of the smoothstep of odd degree ``order``.

    It is the unique polynomial of that degree with ``S(0) = 0``, ``S(1) = 1``
    and the first ``(order-1)/2`` derivatives vanishing at both ends.
    """
    if order < 5 or order % 2 == 0:
        raise ProfileError(f"smoothstep order must be odd and >= 5, got {order}")
    N = (order - 1) // 2
    coeffs = [Fraction(0)] * (order + 1)
    for k in range(N + 1):
        coeffs[N + 1 + k] = Fraction((-1) ** k * comb(N + k, k) * comb(2 * N + 1, N - k))
    return coeffs


def poly_derivative(p: list[Fraction]) -> list[Fraction]:
    return [j * c for j, c in enumerate(p)][1:] or [Fraction(0)]


def poly_antiderivative(p: list[Fraction]) -> list[Fraction]:
    return [Fraction(0)] + [c / (j + 1) for j, c in enumerate(p)]


def poly_eval(p: list, t):
    acc = 0 * t
    for c in reversed(p):
        acc = acc * t + c
    return acc


@dataclass(frozen=True)
class ProfileParams:
    mu: float
    eps: float
    delta: float
    order: int = 5
    r_max: float = 3.0

    def __post_init__(self):
        if not (self.mu > 0 and self.eps > 0 and self.delta > 0):
            raise ProfileError("mu, eps and delta must be positive")
        # relative slack so that e.g. (mu, eps, delta) = (3, 0.3, 0.1) is admissible
        if self.delta * self.mu > self.eps * (1 + 1e-12):
            raise ProfileError(f"delta = {self.delta} exceeds eps/mu = {self.eps / self.mu}")
        if self.r_max <= 0:
            raise ProfileError("r_max must be positive")
        smoothstep(self.order)


@dataclass
class Profile:
    """Piecewise closed forms: 0 on ``[0,1]``, polynomial in ``t = (r-1)/δ`` on ``[1,1+δ]``, linear after."""

    params: ProfileParams
    S: list[Fraction] = field(repr=False)
    dS: list[Fraction] = field(repr=False)
    intS: list[Fraction] = field(repr=False)

    @property
    def plateau(self) -> Fraction:
        """``∫_0^1 S``, so that ``h(1+δ) = μ δ · plateau``."""
        return poly_eval(self.intS, Fraction(1))

    def _split(self, r):
        r = np.asarray(r, dtype=float)
        p = self.params
        t = np.clip((r - 1.0) / p.delta, 0.0, 1.0)
        return r, t, (r > 1.0) & (r < 1.0 + p.delta), r >= 1.0 + p.delta

    def beta(self, r):
        _, t, mid, high = self._split(r)
        fS = [float(c) for c in self.S]
        return np.where(high, 1.0, np.where(mid, poly_eval(fS, t), 0.0))

    def h(self, r):
        p = self.params
        r, t, mid, high = self._split(r)
        fI = [float(c) for c in self.intS]
        inside = p.mu * p.delta * poly_eval(fI, t)
        after = p.mu * p.delta * float(self.plateau) + p.mu * (r - 1.0 - p.delta)
        return np.where(high, after, np.where(mid, inside, 0.0))

    def dh(self, r):
        return self.params.mu * self.beta(r)

    def d2h(self, r):
        p = self.params
        _, t, mid, _ = self._split(r)
        fd = [float(c) for c in self.dS]
        return np.where(mid, p.mu / p.delta * poly_eval(fd, t), 0.0)

    def h_exact(self, r: Fraction) -> Fraction:
        """Exact value at a rational ``r``; float parameters are read as their shortest decimal."""
        p = self.params
        mu, delta, r = _exact(p.mu), _exact(p.delta), _exact(r)
        if r <= 1:
            return Fraction(0)
        if r >= 1 + delta:
            return mu * delta * self.plateau + mu * (r - 1 - delta)
        return mu * delta * poly_eval(self.intS, (r - 1) / delta)

    def gap(self, r):
        """``r h' - h - h'``."""
        r = np.asarray(r, dtype=float)
        return r * self.dh(r) - self.h(r) - self.dh(r)


def _exact(x) -> Fraction:
    return Fraction(repr(x)) if isinstance(x, float) else Fraction(x)


def build_profile(p: ProfileParams) -> Profile:
    S = smoothstep(p.order)
    return Profile(p, S, poly_derivative(S), poly_antiderivative(S))


def orbit_actions(pr: Profile, r: float) -> tuple[float, float]:
    """(Hamiltonian action ``r h' - h``, symplectic action ``h'``) on the level ``r``."""
    if r < 0:
        raise ProfileError("r must be nonnegative")
    dh = float(pr.dh(r))
    return float(r * dh - pr.h(r)), dh


@dataclass
class BoundsReport:
    params: ProfileParams
    samples: int
    max_gap: float
    min_gap: float
    bound: float
    gap_violations: list[tuple[float, float]]
    min_d2h_inside: float
    d2h_violations: list[float]

    @property
    def ok(self) -> bool:
        return not self.gap_violations and not self.d2h_violations

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        p = self.params
        return (f"{status} max_gap = {self.max_gap:.12g} ≤ μδ = {self.bound:.12g}"
                f" (min_gap = {self.min_gap:.3g}, min h'' on (1,1+δ) = {self.min_d2h_inside:.3g},"
                f" μ={p.mu}, ε={p.eps}, δ={p.delta}, samples={self.samples})")


def sample_grid(p: ProfileParams, samples: int) -> np.ndarray:
    return np.linspace(0.0, p.r_max, samples)


def verify_bounds(pr: Profile, grid: int = 10_000, tol: float = GAP_TOL) -> BoundsReport:
    """Check ``0 ≤ r h' - h - h' ≤ μδ`` on a uniform grid of ``[0, r_max]`` and ``h'' > 0`` inside ``(1, 1+δ)``.

    The lower bound is allowed ``tol`` of rounding slack as well.
    """
    if grid < 2:
        raise ProfileError("grid needs at least 2 samples")
    p = pr.params
    r = sample_grid(p, grid)
    g = pr.gap(r)
    bound = p.mu * p.delta
    bad = [(float(x), float(y)) for x, y in zip(r, g) if y < -tol or y > bound + tol]
    inside = np.linspace(1.0, 1.0 + p.delta, max(grid // 10, 3))[1:-1]
    inside = np.concatenate([inside, r[(r > 1.0) & (r < 1.0 + p.delta)]])
    d2 = pr.d2h(inside)
    return BoundsReport(p, grid, float(g.max()), float(g.min()), bound, bad,
                        float(d2.min()) if d2.size else float("nan"),
                        [float(x) for x, y in zip(inside, d2) if not y > 0])


def profile_csv(pr: Profile, samples: int) -> str:
    """CSV with columns ``r, h, dh, A, gap``."""
    r = sample_grid(pr.params, samples)
    h, dh = pr.h(r), pr.dh(r)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "h", "dh", "A", "gap"])
    for row in zip(r, h, dh, r * dh - h, r * dh - h - dh):
        w.writerow([f"{x:.12g}" for x in row])
    return buf.getvalue()
