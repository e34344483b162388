"""Characteristic cubics of the linearized electron-Maxwell system.

Every Fourier mode of the linearized system splits into a longitudinal
block (density, temperature, parallel velocity, parallel electric field)
and a transverse block (perpendicular velocity, electric and magnetic
fields).  Each block reduces to a third-order scalar ODE whose time
exponents are the roots of a cubic in one of two families:

    longitudinal:  X^3 + 2 X^2 + (2 + (5/3) k^2) X + 1 + k^2
    transverse:    X^3 +   X^2 + (1 + k^2) X + k^2

with k = |wavevector| >= 0.  For k > 0 each cubic has one real root and a
conjugate complex pair.  This module evaluates the cubics, solves for the
root triple (sigma, beta +/- i*omega), and provides the leading-order
small-k / large-k approximations used to sanity-check the exact solver.

The real roots live on known brackets: sigma in (-1, -3/5) for the
longitudinal family (strictly increasing in k) and sigma in (-1, 0) for
the transverse family (strictly decreasing in k).  The conjugate pair is
recovered from the real root in closed form:

    longitudinal:  beta = -1 - sigma/2,
                   omega = sqrt(3 sigma^2 + 4 sigma + 4 + (20/3) k^2) / 2
    transverse:    beta = -(1 + sigma)/2,
                   omega = sqrt(3 sigma^2 + 2 sigma + 3 + 4 k^2) / 2

which avoids the cancellation incurred by deflating the cubic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LONGITUDINAL = "longitudinal"
TRANSVERSE = "transverse"

_FAMILY_ALIASES = {
    "longitudinal": LONGITUDINAL,
    "long": LONGITUDINAL,
    "transverse": TRANSVERSE,
    "trans": TRANSVERSE,
}

#: roots of X^2 + X + 1, the k = 0 factorization limit of both families
_OMEGA0 = np.sqrt(3.0) / 2.0

_BISECT_TOL = 1e-14
_NEWTON_POLISH_STEPS = 2


def canonical_family(family: str) -> str:
    """Map a family name or alias to its canonical form."""
    try:
        return _FAMILY_ALIASES[family.lower()]
    except KeyError:
        raise ValueError(f"unknown cubic family {family!r}; "
                         f"expected one of {sorted(_FAMILY_ALIASES)}") from None


@dataclass(frozen=True)
class SpectralRoots:
    """Root triple (sigma, beta +/- i*omega) of one characteristic cubic."""

    family: str
    kmag: float
    sigma: float
    beta: float
    omega: float

    def residual(self) -> float:
        """|cubic(sigma)| of the real root, the solver's a-posteriori error."""
        return abs(characteristic_value(self.family, self.sigma, self.kmag))

    def complex_roots(self):
        """All three roots as complex numbers (sigma, beta+i*omega, beta-i*omega)."""
        pair = complex(self.beta, self.omega)
        return (complex(self.sigma), pair, pair.conjugate())


def characteristic_value(family, x, kmag):
    """Evaluate the characteristic cubic of the given family at x.

    Vectorized over `x` and `kmag` (numpy broadcasting).
    """
    family = canonical_family(family)
    x = np.asarray(x)
    k2 = np.square(np.asarray(kmag, dtype=float))
    if family == LONGITUDINAL:
        return x**3 + 2.0 * x**2 + (2.0 + (5.0 / 3.0) * k2) * x + 1.0 + k2
    return x**3 + x**2 + (1.0 + k2) * x + k2


def characteristic_derivative(family, x, kmag):
    """d/dx of the characteristic cubic; positive on the root brackets."""
    family = canonical_family(family)
    x = np.asarray(x)
    k2 = np.square(np.asarray(kmag, dtype=float))
    if family == LONGITUDINAL:
        return 3.0 * x**2 + 4.0 * x + 2.0 + (5.0 / 3.0) * k2
    return 3.0 * x**2 + 2.0 * x + 1.0 + k2


def _pair_from_sigma(family, sigma, kmag):
    """Conjugate-pair (beta, omega) from the real root, in closed form."""
    k2 = np.square(np.asarray(kmag, dtype=float))
    if family == LONGITUDINAL:
        beta = -1.0 - sigma / 2.0
        omega = 0.5 * np.sqrt(3.0 * sigma**2 + 4.0 * sigma + 4.0 + (20.0 / 3.0) * k2)
    else:
        beta = -0.5 * (1.0 + sigma)
        omega = 0.5 * np.sqrt(3.0 * sigma**2 + 2.0 * sigma + 3.0 + 4.0 * k2)
    return beta, omega


def real_root_grid(family, kmags):
    """Real characteristic root for an array of |k| values.

    Vectorized bisection on the sign-change bracket followed by two Newton
    polish steps; entries with kmag == 0 get the factored limit (-1 for the
    longitudinal family, 0 for the transverse one).
    """
    family = canonical_family(family)
    kmags = np.asarray(kmags, dtype=float)
    if np.any(kmags < 0):
        raise ValueError("kmag must be nonnegative")
    lo = np.full(kmags.shape, -1.0)
    hi = np.full(kmags.shape, -0.6 if family == LONGITUDINAL else 0.0)
    # ~47 halvings shrink the unit bracket below 1e-14
    n_iter = int(np.ceil(np.log2(0.4 / _BISECT_TOL))) + 2
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        up = characteristic_value(family, mid, kmags) > 0.0
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    sigma = 0.5 * (lo + hi)
    for _ in range(_NEWTON_POLISH_STEPS):
        sigma = sigma - (characteristic_value(family, sigma, kmags)
                         / characteristic_derivative(family, sigma, kmags))
    limit = -1.0 if family == LONGITUDINAL else 0.0
    return np.where(kmags == 0.0, limit, sigma)


def _roots(family, kmag):
    family = canonical_family(family)
    kmag = float(kmag)
    if kmag < 0:
        raise ValueError("kmag must be nonnegative")
    if kmag == 0.0:
        # both cubics factor through X^2 + X + 1 at k = 0
        sigma = -1.0 if family == LONGITUDINAL else 0.0
        return SpectralRoots(family, kmag, sigma, -0.5, _OMEGA0)
    sigma = float(real_root_grid(family, np.array([kmag]))[0])
    beta, omega = _pair_from_sigma(family, sigma, kmag)
    return SpectralRoots(family, kmag, sigma, float(beta), float(omega))


def longitudinal_roots(kmag) -> SpectralRoots:
    """Root triple of the longitudinal cubic; kmag = 0 returns the limit roots."""
    return _roots(LONGITUDINAL, kmag)


def transverse_roots(kmag) -> SpectralRoots:
    """Root triple of the transverse cubic; kmag = 0 returns the limit roots."""
    return _roots(TRANSVERSE, kmag)


def roots_grid(family, kmags):
    """(sigma, beta, omega) arrays for an array of |k| values."""
    family = canonical_family(family)
    kmags = np.asarray(kmags, dtype=float)
    sigma = real_root_grid(family, kmags)
    beta, omega = _pair_from_sigma(family, sigma, kmags)
    if np.any(kmags == 0.0):
        at0 = kmags == 0.0
        beta = np.where(at0, -0.5, beta)
        omega = np.where(at0, _OMEGA0, omega)
    return sigma, beta, omega


def asymptotic_roots(family, kmag, regime) -> SpectralRoots:
    """Leading-order root approximations in the small-k or large-k regime.

    Used to seed and sanity-check the exact solver; `regime` must match the
    magnitude of kmag ("small" requires kmag <= 1, "large" requires
    kmag >= 1).
    """
    family = canonical_family(family)
    kmag = float(kmag)
    regime = regime.lower()
    if regime not in ("small", "large"):
        raise ValueError("regime must be 'small' or 'large'")
    if regime == "small" and kmag > 1.0:
        raise ValueError(f"small-k asymptotics requested at kmag={kmag} > 1")
    if regime == "large" and kmag < 1.0:
        raise ValueError(f"large-k asymptotics requested at kmag={kmag} < 1")

    if family == LONGITUDINAL:
        if regime == "small":
            return SpectralRoots(family, kmag, -1.0, -0.5, _OMEGA0)
        # sigma -> -3/5; omega grows like sqrt(5/3) |k|
        sigma = -0.6
        beta = -0.7
        omega = np.sqrt(5.0 / 3.0) * kmag
        return SpectralRoots(family, kmag, sigma, beta, float(omega))
    if regime == "small":
        return SpectralRoots(family, kmag, 0.0, -0.5, _OMEGA0)
    # transverse large-k: sigma -> -1, beta -> 0-, omega ~ |k|
    return SpectralRoots(family, kmag, -1.0, 0.0, float(kmag))
