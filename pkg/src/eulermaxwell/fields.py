"""Periodic spectral grid, field states, and constraint projection.

The solver state lives in Fourier space as a stacked array of the eleven
real fields [rho, u(3), theta, E(3), B(3)] on an N^3 periodic box of side
L, transformed with `numpy.fft.rfftn` (reality is therefore structural).
The stacking order matches the single-mode state vector, so the per-mode
linear theory applies slot-by-slot.

The divergence constraints div E = -rho and div B = 0 are enforced
spectrally: the longitudinal part of E-hat is replaced by the value the
density dictates and B-hat is projected onto divergence-free fields.  The
k = 0 cell has no electric-longitudinal direction, so compatibility
forces the mean of rho to vanish there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

RHO = 0
U = slice(1, 4)
THETA = 4
E = slice(5, 8)
B = slice(8, 11)


class SpectralGrid:
    """Wavenumbers, dealiasing mask, and transform helpers for one box."""

    def __init__(self, n: int, box_length: float = 2.0 * np.pi,
                 dealias_fraction: float = 2.0 / 3.0):
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError("grid size must be a power of two, at least 16")
        self.n = n
        self.box_length = float(box_length)
        self.shape = (n, n, n)
        self.spec_shape = (n, n, n // 2 + 1)

        scale = 2.0 * np.pi / self.box_length
        full = np.fft.fftfreq(n, d=1.0 / n) * scale        # 0..N/2-1, -N/2..-1
        half = np.arange(n // 2 + 1) * scale
        self.kx = full[:, None, None]
        self.ky = full[None, :, None]
        self.kz = half[None, None, :]
        self.kvec = np.stack([np.broadcast_to(c, self.spec_shape)
                              for c in (self.kx, self.ky, self.kz)])
        self.k2 = np.sum(self.kvec ** 2, axis=0)
        self.kmag = np.sqrt(self.k2)

        cut = dealias_fraction * (n // 2) * scale
        self.dealias_mask = np.all(np.abs(self.kvec) <= cut + 1e-12, axis=0)

        # rfft plane multiplicity for Parseval sums (kz interior planes twice)
        w = np.full(self.spec_shape, 2.0)
        w[..., 0] = 1.0
        if n % 2 == 0:
            w[..., -1] = 1.0
        self.rfft_weight = w

        with np.errstate(divide="ignore", invalid="ignore"):
            self.khat = np.where(self.kmag > 0, self.kvec / self.kmag, 0.0)

    def forward(self, f):
        return np.fft.rfftn(f)

    def backward(self, fhat):
        return np.fft.irfftn(fhat, s=self.shape)

    def dealias(self, fhat):
        return fhat * self.dealias_mask

    def inner(self, fhat, ghat) -> float:
        """L^2 inner product of two real fields from their rfft arrays."""
        s = np.sum(self.rfft_weight * (fhat * np.conj(ghat)).real)
        return float(s * self.box_length ** 3 / self.n ** 6)

    def norm_sq(self, fhat, multiplier=None) -> float:
        """integral of |f|^2, optionally with a Fourier multiplier in k."""
        dens = self.rfft_weight * np.abs(fhat) ** 2
        if multiplier is not None:
            dens = dens * multiplier
        return float(np.sum(dens) * self.box_length ** 3 / self.n ** 6)


@dataclass
class FieldState:
    """Spectral snapshot of the eleven fields plus simulation time."""

    grid: SpectralGrid
    spec: np.ndarray            # (11,) + grid.spec_shape, complex
    time: float = 0.0

    @classmethod
    def zero(cls, grid: SpectralGrid) -> "FieldState":
        return cls(grid, np.zeros((11,) + grid.spec_shape, dtype=complex))

    @classmethod
    def from_physical(cls, grid: SpectralGrid, rho, u, theta, E_f, B_f,
                      time: float = 0.0) -> "FieldState":
        spec = np.empty((11,) + grid.spec_shape, dtype=complex)
        spec[RHO] = grid.forward(rho)
        for i in range(3):
            spec[1 + i] = grid.forward(u[i])
            spec[5 + i] = grid.forward(E_f[i])
            spec[8 + i] = grid.forward(B_f[i])
        spec[THETA] = grid.forward(theta)
        return cls(grid, spec, time)

    def copy(self) -> "FieldState":
        return FieldState(self.grid, self.spec.copy(), self.time)

    def physical(self, idx) -> np.ndarray:
        return self.grid.backward(self.spec[idx])

    def physical_fields(self):
        g = self.grid
        rho = g.backward(self.spec[RHO])
        theta = g.backward(self.spec[THETA])
        u = np.stack([g.backward(self.spec[1 + i]) for i in range(3)])
        E_f = np.stack([g.backward(self.spec[5 + i]) for i in range(3)])
        B_f = np.stack([g.backward(self.spec[8 + i]) for i in range(3)])
        return rho, u, theta, E_f, B_f

    def l2_norm(self) -> float:
        """Combined L^2 norm of all eleven fields."""
        g = self.grid
        return float(np.sqrt(sum(g.norm_sq(self.spec[i]) for i in range(11))))

    def constraint_residuals(self):
        """max |div E + rho| and max |div B| on the grid."""
        g = self.grid
        div_e = np.einsum("i...,i...->...", 1j * g.kvec, self.spec[E])
        div_b = np.einsum("i...,i...->...", 1j * g.kvec, self.spec[B])
        gauss = np.max(np.abs(g.backward(div_e + self.spec[RHO])))
        mag = np.max(np.abs(g.backward(div_b)))
        return float(gauss), float(mag)

    def positivity_margins(self):
        """min over the grid of 1 + rho and 1 + theta."""
        rho = self.physical(RHO)
        theta = self.physical(THETA)
        return float(1.0 + rho.min()), float(1.0 + theta.min())


def enforce_compatibility(state: FieldState) -> FieldState:
    """Project onto div E = -rho, div B = 0 (idempotent, spectral).

    The longitudinal part of E-hat is replaced by i rho-hat k / |k|^2; the
    mean of rho is zeroed (no mean electric field can balance it on a
    torus) and B-hat loses its parallel-to-k part.
    """
    g = state.grid
    out = state.copy()
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_k2 = np.where(g.k2 > 0, 1.0 / np.where(g.k2 > 0, g.k2, 1.0), 0.0)
    out.spec[RHO].flat[0] = 0.0

    e = out.spec[E]
    k_dot_e = np.einsum("i...,i...->...", g.kvec, e)
    target = 1j * out.spec[RHO]          # k . E must equal i rho
    e += g.kvec * ((target - k_dot_e) * inv_k2)[None, ...]

    b = out.spec[B]
    k_dot_b = np.einsum("i...,i...->...", g.kvec, b)
    b -= g.kvec * (k_dot_b * inv_k2)[None, ...]
    return out


def random_state(grid: SpectralGrid, delta: float, seed: int,
                 support_fraction: float = 1.0 / 6.0) -> FieldState:
    """Smooth random initial data of amplitude delta, compatibility-projected.

    Gaussian white noise is filtered to wavenumber indices |n| <= N *
    support_fraction with a smooth taper, projected onto the constraints,
    and rescaled so the largest pointwise field amplitude equals delta.
    """
    rng = np.random.default_rng(seed)
    n = grid.n
    scale = 2.0 * np.pi / grid.box_length
    n_index = grid.kmag / scale                   # index-space radius
    cut = n * support_fraction
    taper = np.exp(-((n_index / cut) ** 6)) * (n_index <= cut + 0.5)

    state = FieldState.zero(grid)
    for i in range(11):
        noise = rng.standard_normal(grid.shape)
        state.spec[i] = grid.forward(noise) * taper
    state = enforce_compatibility(state)

    peak = max(np.max(np.abs(state.physical(i))) for i in range(11))
    if peak == 0:
        raise ValueError("degenerate random state")
    state.spec *= delta / peak
    return state
