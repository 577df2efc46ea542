"""Marchenko-Pastur density/CDF, anisotropic Stieltjes fixed point, and
Kolmogorov distance between an empirical spectrum and the law.

The density is

    f(x) = sqrt((hi - x)(x - lo)) / (2 pi lam sigma2 x)   on (lo, hi),

with edges lo = sigma2 (1 - sqrt(lam))^2, hi = sigma2 (1 + sqrt(lam))^2,
plus a point mass of 1 - 1/lam at the origin when lam > 1 (carried by the
CDF only). The anisotropic law is defined implicitly through its Stieltjes
transform s(z), the solution of

    s = sum_t H({t}) / (t (1 - lam - lam z s) - z),   Im z > 0,

solved here by damped fixed-point iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad


class StieltjesConvergenceError(RuntimeError):
    """Fixed-point iteration failed; carries the last residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class MpLaw:
    """Marchenko-Pastur law with aspect ratio ``lam`` and variance scale ``sigma2``."""

    lam: float
    sigma2: float = 1.0

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError("aspect ratio must be a positive finite real")
        if not (self.sigma2 > 0 and math.isfinite(self.sigma2)):
            raise ValueError("variance scale must be a positive finite real")

    @property
    def lower_edge(self) -> float:
        return self.sigma2 * (1.0 - math.sqrt(self.lam)) ** 2

    @property
    def upper_edge(self) -> float:
        return self.sigma2 * (1.0 + math.sqrt(self.lam)) ** 2

    @property
    def atom0(self) -> float:
        """Mass at the origin, present only when lam > 1."""
        return max(0.0, 1.0 - 1.0 / self.lam)


@dataclass(frozen=True)
class SpectralMixture:
    """Finite atomic spectral distribution H: list of (location, weight) pairs."""

    atoms: tuple = field(default=((1.0, 1.0),))

    def __post_init__(self):
        atoms = tuple((float(t), float(w)) for t, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValueError("mixture needs at least one atom")
        if any(t < 0 for t, _ in atoms):
            raise ValueError("atom locations must be nonnegative")
        if any(w <= 0 for _, w in atoms):
            raise ValueError("atom weights must be positive")
        if abs(sum(w for _, w in atoms) - 1.0) > 1e-12:
            raise ValueError("atom weights must sum to 1")

    @classmethod
    def point(cls, t: float) -> "SpectralMixture":
        return cls(((t, 1.0),))


def mp_density(x, law: MpLaw):
    """Density of the continuous part of the law (the atom at 0 excluded).

    Accepts scalars or arrays; zero outside (lower_edge, upper_edge).
    """
    x = np.asarray(x, dtype=np.float64)
    lo, hi = law.lower_edge, law.upper_edge
    inside = (x > lo) & (x < hi) & (x > 0)
    out = np.zeros_like(x)
    xs = x[inside]
    out[inside] = np.sqrt((hi - xs) * (xs - lo)) / (
        2.0 * np.pi * law.lam * law.sigma2 * xs
    )
    return float(out) if out.ndim == 0 else out


def _cdf_continuous(x: float, law: MpLaw) -> float:
    # Substitution t = lo + (hi - lo) sin^2(theta) absorbs the square-root
    # endpoint singularities; the transformed integrand is smooth.
    lo, hi = law.lower_edge, law.upper_edge
    if x <= lo:
        return 0.0
    span = hi - lo
    upper = min(x, hi)
    theta_max = math.asin(math.sqrt(min(max((upper - lo) / span, 0.0), 1.0)))

    c = span * span / (np.pi * law.lam * law.sigma2)

    def integrand(theta):
        s, co = math.sin(theta), math.cos(theta)
        t = lo + span * s * s
        return c * (s * co) ** 2 / t

    val, _ = quad(integrand, 0.0, theta_max, epsabs=1e-10, limit=200)
    return val


def mp_cdf(x: float, law: MpLaw) -> float:
    """CDF of the law at x, including the atom at the origin when lam > 1."""
    x = float(x)
    if x < 0:
        return 0.0
    total = law.atom0 + _cdf_continuous(x, law)
    return min(total, 1.0)


def _fixed_point_map(s: complex, z: complex, lam: float, H: SpectralMixture) -> complex:
    acc = 0.0 + 0.0j
    base = 1.0 - lam - lam * z * s
    for t, w in H.atoms:
        acc += w / (t * base - z)
    return acc


def stieltjes_anisotropic(
    z: complex,
    lam: float,
    H: SpectralMixture,
    *,
    tol: float = 1e-10,
    max_iter: int = 200_000,
    s0: complex | None = None,
) -> complex:
    """Solve the self-consistent equation for the Stieltjes transform at z.

    Damped iteration s <- (1-a) s + a G(s) starting from s0 = -1/z with
    a = 0.5; the damping is halved whenever the residual fails to shrink.
    If the direct iteration stalls (the map turns nearly neutral close to
    a spectral edge), the solve is retried by continuation in the imaginary
    part: converge high in the upper half plane, then descend to Im z with
    warm starts. Raises StieltjesConvergenceError (carrying the last
    residual) if that fails too.
    """
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("need Im z > 0")
    s, res, ok = _iterate(z, lam, H, tol, max_iter, s0)
    if ok:
        return s
    im = z.imag
    level = max(1.0, 10.0 * im)
    warm: complex | None = None
    while True:
        zz = complex(z.real, max(level, im))
        warm, res, ok = _iterate(zz, lam, H, tol, max_iter, warm)
        if not ok:
            raise StieltjesConvergenceError(
                f"fixed point did not converge at z={zz} (last residual {res:.3e})",
                res,
            )
        if level <= im:
            return warm
        level /= 10.0


def _iterate(
    z: complex,
    lam: float,
    H: SpectralMixture,
    tol: float,
    max_iter: int,
    s0: complex | None,
) -> tuple[complex, float, bool]:
    s = s0 if s0 is not None else -1.0 / z
    alpha = 0.5
    prev_res = math.inf
    res = math.inf
    iters = 0
    while iters < max_iter:
        g = _fixed_point_map(s, z, lam, H)
        res = abs(g - s)
        iters += 1
        if res <= tol and s.imag > 0:
            return s, res, True
        if res > prev_res and alpha > 1.0 / 1024.0:
            alpha /= 2.0  # oscillating: bisect the damping, keep the iterate
        prev_res = res
        s1 = (1.0 - alpha) * s + alpha * g
        g1 = _fixed_point_map(s1, z, lam, H)
        s2 = (1.0 - alpha) * s1 + alpha * g1
        iters += 1
        # Aitken delta-squared extrapolation of the damped sequence; the
        # plain iteration contracts arbitrarily slowly near the spectral
        # edges, while the extrapolated step is exact on a linear map.
        denom = s2 - 2.0 * s1 + s
        if denom != 0:
            cand = s - (s1 - s) ** 2 / denom
            if cand.imag > 0 and abs(
                _fixed_point_map(cand, z, lam, H) - cand
            ) < abs(g1 - s1):
                s = cand
                continue
        s = s2
    return s, res, False


def density_from_stieltjes(
    x, lam: float, H: SpectralMixture, eta: float = 1e-6
) -> float | np.ndarray:
    """Stieltjes inversion: (1/pi) Im s(x + i eta).

    Array inputs are evaluated with warm starts along the grid, which keeps
    the iteration count low near the spectral edges.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.empty_like(xs)
    s_prev: complex | None = None
    for i, xi in enumerate(xs):
        s = stieltjes_anisotropic(complex(xi, eta), lam, H, s0=s_prev)
        out[i] = s.imag / np.pi
        s_prev = s
    return float(out[0]) if np.ndim(x) == 0 else out


def ks_distance(eigenvalues, law: MpLaw) -> float:
    """Kolmogorov distance between the ESD of the eigenvalues and the law.

    Exact for a step CDF vs a monotone CDF: the supremum is attained at a
    jump point, approached from one side or the other.
    """
    e = np.sort(np.asarray(eigenvalues, dtype=np.float64))
    p = e.size
    if p == 0:
        raise ValueError("empty spectrum")
    d = 0.0
    for i, x in enumerate(e):
        F = mp_cdf(x, law)
        d = max(d, abs((i + 1) / p - F), abs(i / p - F))
    return d
