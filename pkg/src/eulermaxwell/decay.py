"""Whole-space norms of linear solutions by radial Fourier quadrature.

Isotropic Gaussian initial data turns every L^2 norm of the evolving
linear solution into a one-dimensional radial integral: the propagator
depends on the wavevector only through |k| and the parallel/perpendicular
projections, so the angular integrals are constants computed analytically
once (4*pi for scalar channels, projector traces for transverse vector
channels).  Pointwise (sup-norm) values come from the radial inversion

    f(r) = (2 pi^2 r)^{-1} \int_0^inf k sin(kr) fhat(k) dk

for scalar fields, extended with the j1/j2 spherical-Bessel transforms
for the longitudinal (k^ a(k)) and transverse ((I - k^ k^T) p b(k) and
i k^ x p c(k)) vector structures.

Norm series are fitted with power-law (slope of log value against
log(1+t)) or exponential (slope against t) models; the long-time
power-law window defaults to [50, 500] because the exp(-t/2) longitudinal
transients must die out before the algebraic tail driven by the slow
transverse branch (exp(-|k|^2 t) near k = 0) becomes visible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import spherical_jn

from .modes import (interpolation_matrix, longitudinal_system_matrix,
                    transverse_system_matrix)
from .spectrum import roots_grid

_TWO_PI_CUBED = (2.0 * np.pi) ** 3

SCALAR_COMPONENTS = ("rho", "theta")
VECTOR_COMPONENTS = ("u", "E", "B")
PROFILE_COMPONENTS = ("rho", "u_long", "u_trans", "theta",
                      "E_long", "E_trans", "B_trans")


@dataclass
class RadialProfile:
    """Isotropic Gaussian k-space profile of one initial-data channel.

    `component` picks the channel; transverse channels carry a (shared)
    polarization direction.  An E_long profile is specified through its
    density equivalent: the compatibility constraint slaves the parallel
    electric field to the density, so an E_long amplitude a adds a*f(k)
    to the density channel.
    """

    component: str
    amplitude: float
    width: float
    polarization: np.ndarray = None

    def __post_init__(self):
        if self.component not in PROFILE_COMPONENTS:
            raise ValueError(f"unknown profile component {self.component!r}")
        if self.width <= 0:
            raise ValueError("width must be positive")
        if self.component.endswith("_trans"):
            p = np.ones(3) if self.polarization is None else \
                np.asarray(self.polarization, dtype=float)
            n = np.linalg.norm(p)
            if n == 0:
                raise ValueError("polarization must be a nonzero vector")
            self.polarization = p / n
        else:
            self.polarization = None


def hat_profile(p: RadialProfile, kmag) -> np.ndarray:
    """Gaussian k-space amplitude a * exp(-k^2 / (2 width^2))."""
    kmag = np.asarray(kmag, dtype=float)
    if np.any(kmag < 0):
        raise ValueError("kmag must be nonnegative")
    return p.amplitude * np.exp(-kmag ** 2 / (2.0 * p.width ** 2))


@dataclass
class NormSeries:
    component: str
    kind: str                    # "L2" or "Linf"
    m: int                       # gradient order (L2 only)
    times: np.ndarray
    values: np.ndarray
    quadrature_error: float = 0.0
    metadata: dict = field(default_factory=dict)


@dataclass
class DecayFit:
    model: str                   # "power" or "exponential"
    slope: float
    intercept: float
    rms_residual: float
    window: tuple


def radial_quadrature(width: float, nodes_per_panel: int = 20,
                      panel_ratio: float = 2.0 ** (1.0 / 3.0),
                      kmin_scale: float = 2.0 ** -9,
                      osc_panel: float = 0.05):
    """Composite Gauss-Legendre nodes on [0, 20*width], graded toward k=0.

    The long-time tail of the norms is controlled by the small-k band
    exp(-|k|^2 t), so panels accumulate geometrically at the origin.  On
    [width, 8*width] the kernels oscillate with O(1) frequency gradient in
    k at moderate times, so that band gets uniform panels of absolute
    width `osc_panel` (resolving phases up to a few hundred time units);
    beyond 8*width the Gaussian data leaves no amplitude and coarse
    geometric panels close the interval.
    """
    kmax = 20.0 * width
    fine_hi = 8.0 * width
    edges = [0.0]
    e = width * kmin_scale
    while e < width:
        edges.append(e)
        e *= panel_ratio
    e = width
    while e < fine_hi:
        edges.append(e)
        e += osc_panel
    while e < kmax:
        edges.append(e)
        e *= 1.5
    edges.append(kmax)
    x, wts = leggauss(nodes_per_panel)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        h = 0.5 * (b - a)
        nodes.append(a + h * (x + 1.0))
        weights.append(h * wts)
    return np.concatenate(nodes), np.concatenate(weights)


class _ModeKernels:
    """Batched closed-form propagator kernels on a radial node set.

    Longitudinal: complex 3x3 matrices G(t,k) acting on [rho0, v0, th0].
    Transverse: real 3x3 matrices G_eps(t,k) for the two circular
    polarizations eps = +-1, acting on [gu, gE, gB].
    The spectral projectors P1, P2, P3 with

        G(t) = e^{sigma t} P1 + e^{beta t} (cos(omega t) P2 + sin(omega t) P3)

    are precomputed once per node set by solving the same interpolation
    system as the per-mode propagator, applied to (I, L, L^2).
    """

    def __init__(self, kmags):
        self.kmags = np.asarray(kmags, dtype=float)
        n = len(self.kmags)

        self.lsig, self.lbeta, self.lomega = roots_grid("long", self.kmags)
        self.tsig, self.tbeta, self.tomega = roots_grid("trans", self.kmags)

        self.long_P = self._projectors(
            [longitudinal_system_matrix(k) for k in self.kmags],
            self.lsig, self.lbeta, self.lomega)
        self.trans_P = {
            eps: self._projectors(
                [transverse_system_matrix(k, eps) for k in self.kmags],
                self.tsig, self.tbeta, self.tomega)
            for eps in (+1, -1)
        }

    @staticmethod
    def _projectors(Ls, sig, beta, omega):
        n = len(Ls)
        L = np.stack(Ls)
        A = np.empty((n, 3, 3))
        A[:, 0, 0] = 1.0
        A[:, 0, 1] = 1.0
        A[:, 0, 2] = 0.0
        A[:, 1, 0] = sig
        A[:, 1, 1] = beta
        A[:, 1, 2] = omega
        A[:, 2, 0] = sig ** 2
        A[:, 2, 1] = beta ** 2 - omega ** 2
        A[:, 2, 2] = 2.0 * beta * omega
        rhs = np.empty((n, 3, 9), dtype=L.dtype)
        eye = np.broadcast_to(np.eye(3, dtype=L.dtype), (n, 3, 3))
        rhs[:, 0, :] = eye.reshape(n, 9)
        rhs[:, 1, :] = L.reshape(n, 9)
        rhs[:, 2, :] = np.matmul(L, L).reshape(n, 9)
        P = np.linalg.solve(A, rhs)
        return [P[:, j, :].reshape(n, 3, 3) for j in range(3)]

    @staticmethod
    def _combine(P, sig, beta, omega, t):
        es = np.exp(sig * t)[:, None, None]
        eb = np.exp(beta * t)[:, None, None]
        wt = omega * t
        return (es * P[0] + eb * (np.cos(wt)[:, None, None] * P[1]
                                  + np.sin(wt)[:, None, None] * P[2]))

    def longitudinal(self, t: float) -> np.ndarray:
        return self._combine(self.long_P, self.lsig, self.lbeta,
                             self.lomega, t)

    def transverse(self, t: float, eps: int) -> np.ndarray:
        return self._combine(self.trans_P[eps], self.tsig, self.tbeta,
                             self.tomega, t)


class LinearSolutionSpectrum:
    """Radial spectral amplitudes of the evolving linear solution.

    Collects the initial-channel hats from a profile list, requires all
    transverse profiles to share one polarization direction (so the
    angular reduction stays exact), and evaluates the per-node amplitudes
    at any time through the batched closed-form kernels.
    """

    def __init__(self, profiles, kmags):
        self.kmags = np.asarray(kmags, dtype=float)
        if np.any(self.kmags <= 0):
            raise ValueError("quadrature nodes must be strictly positive")
        n = len(self.kmags)
        self.rho0 = np.zeros(n)
        self.v0 = np.zeros(n)
        self.th0 = np.zeros(n)
        self.gu = np.zeros(n)
        self.gE = np.zeros(n)
        self.gB = np.zeros(n)
        self.polarization = None
        for p in profiles:
            h = hat_profile(p, self.kmags)
            if p.component == "rho":
                self.rho0 += h
            elif p.component == "E_long":
                self.rho0 += h          # density equivalent (compatibility)
            elif p.component == "theta":
                self.th0 += h
            elif p.component == "u_long":
                self.v0 += h
            else:
                if self.polarization is None:
                    self.polarization = p.polarization
                elif not np.allclose(self.polarization, p.polarization,
                                     atol=1e-12):
                    raise ValueError(
                        "all transverse profiles must share one polarization "
                        "direction (the angular reduction is exact only then)")
                if p.component == "u_trans":
                    self.gu += h
                elif p.component == "E_trans":
                    self.gE += h
                else:
                    self.gB += h
        self.kernels = _ModeKernels(self.kmags)

    def longitudinal_at(self, t: float):
        """(rho, v, theta, e_par) complex radial amplitudes at time t."""
        G = self.kernels.longitudinal(t)
        data = np.stack([self.rho0, self.v0, self.th0], axis=1)
        y = np.einsum("nij,nj->ni", G, data.astype(complex))
        rho_t, v_t, th_t = y[:, 0], y[:, 1], y[:, 2]
        return rho_t, v_t, th_t, 1j * rho_t / self.kmags

    def transverse_at(self, t: float):
        """Identity/curl kernel pairs (alpha_i, beta_i) for M1, M2, M3.

        The evolved transverse fields are M_i = alpha_i (I - k^ k^T) p
        + beta_i (i k^ x p) with real radial alpha, beta; they are the
        half-sum and half-difference of the two circular channels.
        """
        g = np.stack([self.gu, self.gE, self.gB], axis=1)
        mp = np.einsum("nij,nj->ni", self.kernels.transverse(t, +1), g)
        mm = np.einsum("nij,nj->ni", self.kernels.transverse(t, -1), g)
        alpha = 0.5 * (mp + mm)
        beta = 0.5 * (mp - mm)
        return alpha, beta, mp, mm


def _component_l2_integrand(spec: LinearSolutionSpectrum, component: str,
                            t: float) -> np.ndarray:
    """Angular-integrated |component-hat|^2 on the radial nodes (no k^2)."""
    need_long = component in ("rho", "theta", "u", "E", "u_long", "E_long")
    if need_long:
        rho_t, v_t, th_t, e_t = spec.longitudinal_at(t)
    if component in ("u", "E", "B", "u_trans", "E_trans", "B_trans"):
        _, _, mp, mm = spec.transverse_at(t)
        trans_sq = {"u": 0, "E": 1, "B": 2,
                    "u_trans": 0, "E_trans": 1, "B_trans": 2}[component]
        trans = (np.pi * 4.0 / 3.0) * (np.abs(mp[:, trans_sq]) ** 2
                                       + np.abs(mm[:, trans_sq]) ** 2)
    if component == "rho":
        return 4.0 * np.pi * np.abs(rho_t) ** 2
    if component == "theta":
        return 4.0 * np.pi * np.abs(th_t) ** 2
    if component == "u_long":
        return 4.0 * np.pi * np.abs(v_t) ** 2
    if component == "E_long":
        return 4.0 * np.pi * np.abs(e_t) ** 2
    if component in ("u_trans", "E_trans", "B_trans", "B"):
        return trans
    if component == "u":
        return 4.0 * np.pi * np.abs(v_t) ** 2 + trans
    if component == "E":
        return 4.0 * np.pi * np.abs(e_t) ** 2 + trans
    raise ValueError(f"unknown component {component!r}")


def l2_norm_series(profiles, component: str, m: int, times,
                   nodes_per_panel: int = 20) -> NormSeries:
    """L^2 norm of the m-th gradient of one component over time.

    Computed by the Plancherel identity reduced to a radial integral; the
    quadrature error is estimated by doubling the nodes per panel and
    reported as the largest relative change over the series.
    """
    if m < 0:
        raise ValueError("gradient order m must be nonnegative")
    times = np.asarray(times, dtype=float)
    width = max(p.width for p in profiles)

    def series(npanel):
        kmags, wts = radial_quadrature(width, nodes_per_panel=npanel)
        spec = LinearSolutionSpectrum(profiles, kmags)
        wk = wts * kmags ** (2 * m + 2) / _TWO_PI_CUBED
        vals = np.empty_like(times)
        for i, t in enumerate(times):
            vals[i] = np.dot(wk, _component_l2_integrand(spec, component, t))
        return np.sqrt(np.maximum(vals, 0.0))

    coarse = series(nodes_per_panel)
    fine = series(2 * nodes_per_panel)
    scale = np.maximum(np.abs(fine), np.max(np.abs(fine)) * 1e-300 + 1e-300)
    err = float(np.max(np.abs(fine - coarse) / scale))
    return NormSeries(component, "L2", m, times, fine, quadrature_error=err,
                      metadata={"nodes_per_panel": nodes_per_panel})


def _bessel_matrices(r_grid, kmags):
    kr = np.outer(r_grid, kmags)
    j0 = spherical_jn(0, kr)
    j1 = spherical_jn(1, kr)
    j2 = spherical_jn(2, kr)
    return j0, j1, j2


def _sup_vector_field(a0, a1, a2, a3, n_mu: int = 65):
    """sup over orientation and radius of |a0 x^ + a1 p + a2 (x^.p) x^ + a3 (x^ x p)|.

    All radial kernel arrays share the r-grid; the orientation scan runs
    over the angle between x^ and the polarization p (the only angular
    degree of freedom left by isotropy).
    """
    mu = np.linspace(-1.0, 1.0, n_mu)
    root = np.sqrt(np.maximum(0.0, 1.0 - mu ** 2))
    # x^ = (0,0,1), p = (root, 0, mu), x^ x p = (0, root, 0)
    vx = a1[:, None] * root[None, :]
    vy = a3[:, None] * root[None, :]
    vz = a0[:, None] + a1[:, None] * mu[None, :] + a2[:, None] * mu[None, :]
    mag = np.sqrt(np.abs(vx) ** 2 + np.abs(vy) ** 2 + np.abs(vz) ** 2)
    return float(mag.max())


def _component_sup(spec, component, t, j0w, j1w, j2w):
    """Sup-norm of one component at time t from precomputed transforms.

    jNw are the spherical-Bessel quadrature matrices already carrying the
    k^2-weighted nodes, so jNw @ hat = 4pi^{-free} radial transform values.
    """
    pref = 4.0 * np.pi / _TWO_PI_CUBED
    if component in ("rho", "theta"):
        rho_t, v_t, th_t, e_t = spec.longitudinal_at(t)
        hat = rho_t if component == "rho" else th_t
        return float(np.max(np.abs(pref * (j0w @ hat))))

    rho_t, v_t, th_t, e_t = spec.longitudinal_at(t)
    alpha, beta, _, _ = spec.transverse_at(t)
    long_hat = {"u": v_t, "E": e_t, "B": np.zeros_like(v_t)}[component]
    idx = {"u": 0, "E": 1, "B": 2}[component]
    a = alpha[:, idx]
    b = beta[:, idx]
    # longitudinal part: i x^ * (j1 transform); transverse parts as in the
    # module docstring (S0/S2 split for (I - k^k^T) p, j1 for i k^ x p)
    a0 = pref * 1j * (j1w @ long_hat)
    S0 = pref * (j0w @ a)
    S2 = pref * ((j0w @ a) / 3.0 - 2.0 / 3.0 * (j2w @ a))
    a1 = 0.5 * (S0 + S2)
    a2 = -0.5 * (3.0 * S2 - S0)
    a3 = -pref * (j1w @ b)
    return _sup_vector_field(a0, a1, a2, a3)


def linf_norm_series(profiles, component: str, times,
                     nodes_per_panel: int = 20, n_r: int = 160) -> NormSeries:
    """Approximate sup-norm series by radial Fourier inversion.

    The radius grid is logarithmic (plus r = 0) and scaled to cover both
    the initial profile width and the diffusive spreading sqrt(t_max); the
    reported stability figure is the largest relative change of the sup
    under doubling the radius grid.
    """
    times = np.asarray(times, dtype=float)
    width = max(p.width for p in profiles)
    kmags, wts = radial_quadrature(width, nodes_per_panel=nodes_per_panel)
    spec = LinearSolutionSpectrum(profiles, kmags)
    r_max = 10.0 * (np.sqrt(1.0 + times.max()) + 1.0 / width)

    def series(nr):
        r_grid = np.concatenate(([0.0], np.geomspace(1e-3 / width, r_max, nr)))
        j0, j1, j2 = _bessel_matrices(r_grid, kmags)
        wk = wts * kmags ** 2
        j0w, j1w, j2w = j0 * wk, j1 * wk, j2 * wk
        return np.array([_component_sup(spec, component, t, j0w, j1w, j2w)
                         for t in times])

    coarse = series(n_r)
    fine = series(2 * n_r)
    scale = np.maximum(np.abs(fine), np.max(np.abs(fine)) * 1e-300 + 1e-300)
    err = float(np.max(np.abs(fine - coarse) / scale))
    return NormSeries(component, "Linf", 0, times, fine,
                      quadrature_error=err, metadata={"n_r": n_r,
                                                      "r_max": r_max})


def fit_decay(series: NormSeries, window, model: str) -> DecayFit:
    """Least-squares decay fit of a norm series on a time window.

    Power-law: log(value) against log(1+t); exponential: log(value)
    against t.  Requires at least 10 strictly positive samples inside the
    window.
    """
    if model not in ("power", "exponential"):
        raise ValueError("model must be 'power' or 'exponential'")
    t_lo, t_hi = window
    sel = (series.times >= t_lo) & (series.times <= t_hi)
    if np.count_nonzero(sel) < 10:
        raise ValueError(f"window {window} contains fewer than 10 samples")
    t = series.times[sel]
    v = series.values[sel]
    if np.any(v <= 0):
        raise ValueError("nonpositive values in fit window")
    x = np.log1p(t) if model == "power" else t
    y = np.log(v)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return DecayFit(model, float(slope), float(intercept), rms,
                    (float(t_lo), float(t_hi)))


def default_profiles(width: float = 0.5, amplitude: float = 1.0,
                     polarization=(1.0, 0.0, 0.0)):
    """All-channel Gaussian data with one shared transverse polarization."""
    pol = np.asarray(polarization, dtype=float)
    return [
        RadialProfile("rho", amplitude, width),
        RadialProfile("theta", amplitude, width),
        RadialProfile("u_long", amplitude, width),
        RadialProfile("u_trans", amplitude, width, pol),
        RadialProfile("E_trans", amplitude, width, pol),
        RadialProfile("B_trans", amplitude, width, pol),
    ]
