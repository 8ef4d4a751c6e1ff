"""RF-dressed adiabatic potential of a quadrupole trap.

An atom in a hyperfine sub-level m_F, held in a quadrupole field and driven
by an rf field near the local Larmor frequency, experiences the adiabatic
potential (rotating-wave approximation)

    V(r) = m_F * hbar * sqrt(delta(r)^2 + |Omega(r)|^2)  [+ m*g*y]

where delta = omega - omega_0(r) is the local detuning of the dressing
frequency from the Larmor frequency

    omega_0(r) = g_F * mu_B * B_q * sqrt(x^2 + y^2 + 4 z^2) / hbar

and |Omega| is the position-dependent Rabi coupling between adjacent Zeeman
sub-levels. For the rf field (B_x cos wt, B_y cos(wt-alpha), B_z cos(wt-beta))
the coupling is

    |Omega|^2 = (g_F mu_B / 2 hbar)^2 * [
          (4z^2/R^2) (B_x^2 x^2 + B_y^2 y^2)/rho^2
        + (B_x^2 y^2 + B_y^2 x^2)/rho^2
        + B_z^2 rho^2/R^2
        - 2 B_x B_y x y cos(alpha)/R^2
        + 4 B_x B_y z sin(alpha)/R
        + 4 B_y B_z y z cos(alpha-beta)/R^2
        + 2 B_y B_z x sin(alpha-beta)/R
        + 4 B_z B_x z x cos(beta)/R^2
        + 2 B_z B_x y sin(beta)/R ]

with rho^2 = x^2 + y^2 and R^2 = x^2 + y^2 + 4 z^2. This equals the
coordinate-free RWA expression

    |Omega|^2 = (g_F mu_B / 2 hbar)^2 * (|B~|^2 - |n.B~|^2 - i n.(B~ x B~*))

for the complex rf amplitude B~ = (B_x, B_y e^{i alpha}, B_z e^{i beta}) and
local field direction n; the bracketed form above is what is implemented.

The rho^2 denominators give direction-dependent limits on the z-axis. Points
within ``AXIS_EPS`` of the axis are assigned the analytic azimuthal average
(sin^2, cos^2 -> 1/2; odd terms -> 0):

    |Omega|^2_axis = (g_F mu_B / 2 hbar)^2 *
                     [B_x^2 + B_y^2 + 2 B_x B_y sin(alpha) sgn(z)]

with sgn(0) = 0 at the exact origin (the two one-sided z -> 0 limits are
averaged). The squared magnitude is clamped at zero; rounding can leave it
infinitesimally negative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import G_ACCEL, HBAR, MU_B
from .fields import TrapConfig

#: distance from the z-axis below which the azimuth-averaged limit is used [m]
AXIS_EPS = 1e-12

#: finite-difference steps below this are rejected as underflow [m]
MIN_FD_STEP = 1e-9


def coupling_prefactor(cfg: TrapConfig) -> float:
    """g_F * mu_B / (2 hbar): Rabi rad/s per tesla of resonant rf amplitude."""
    return cfg.atom.g_F * MU_B / (2.0 * HBAR)


def larmor_frequency(r, cfg: TrapConfig):
    """Local Larmor frequency omega_0 [rad/s]; zero at the trap centre."""
    r = np.asarray(r, dtype=float)
    x, y, z = r[..., 0], r[..., 1], r[..., 2]
    rad = np.sqrt(x * x + y * y + 4.0 * z * z)
    return cfg.atom.g_F * MU_B * cfg.quad.gradient * rad / HBAR


def detuning(r, cfg: TrapConfig):
    """delta = omega - omega_0(r): positive inside the resonance shell."""
    return cfg.rf.omega - larmor_frequency(r, cfg)


def rabi_squared(r, cfg: TrapConfig, clamp: bool = True):
    """Squared Rabi coupling |Omega|^2 [(rad/s)^2] at position(s) ``r``.

    Vectorised over leading axes of ``r`` (shape (..., 3)). With ``clamp``
    (default) the result is floored at zero; ``clamp=False`` exposes the raw
    bracket value for diagnostics of rounding excursions.
    """
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 1
    r = np.atleast_2d(r)
    x, y, z = r[..., 0], r[..., 1], r[..., 2]
    bx, by, bz = cfg.rf.b_x, cfg.rf.b_y, cfg.rf.b_z
    ca, sa = np.cos(cfg.rf.alpha), np.sin(cfg.rf.alpha)
    cab = np.cos(cfg.rf.alpha - cfg.rf.beta)
    sab = np.sin(cfg.rf.alpha - cfg.rf.beta)
    cb, sb = np.cos(cfg.rf.beta), np.sin(cfg.rf.beta)

    rho2 = x * x + y * y
    r2 = rho2 + 4.0 * z * z
    on_axis = rho2 <= AXIS_EPS * AXIS_EPS

    # guarded denominators; masked entries are overwritten below
    rho2_s = np.where(on_axis, 1.0, rho2)
    r2_s = np.where(r2 == 0.0, 1.0, r2)
    rad_s = np.sqrt(r2_s)

    t = (4.0 * z * z / r2_s) * (bx * bx * x * x + by * by * y * y) / rho2_s
    t += (bx * bx * y * y + by * by * x * x) / rho2_s
    t += bz * bz * rho2 / r2_s
    t += -2.0 * bx * by * x * y * ca / r2_s
    t += 4.0 * bx * by * z * sa / rad_s
    t += 4.0 * by * bz * y * z * cab / r2_s
    t += 2.0 * by * bz * x * sab / rad_s
    t += 4.0 * bz * bx * z * x * cb / r2_s
    t += 2.0 * bz * bx * y * sb / rad_s

    if np.any(on_axis):
        axis_val = bx * bx + by * by + 2.0 * bx * by * sa * np.sign(z)
        t = np.where(on_axis, axis_val, t)

    pref = coupling_prefactor(cfg)
    out = (pref * pref) * t
    if clamp:
        out = np.maximum(out, 0.0)
    return float(out[0]) if scalar else out


def rabi_frequency(r, cfg: TrapConfig):
    """|Omega| [rad/s], the square root of the clamped coupling."""
    return np.sqrt(rabi_squared(r, cfg))


def dressed_potential(r, cfg: TrapConfig):
    """Adiabatic potential V [J] at position(s) ``r`` of shape (..., 3)."""
    r = np.asarray(r, dtype=float)
    delta = detuning(r, cfg)
    om2 = rabi_squared(r, cfg)
    v = cfg.atom.m_F * HBAR * np.sqrt(delta * delta + om2)
    if cfg.gravity_on:
        v = v + cfg.atom.mass * G_ACCEL * r[..., 1]
    return v


@dataclass(frozen=True)
class PotentialSample:
    """One evaluation of the dressed potential and its ingredients."""

    position: tuple
    larmor: float
    detuning: float
    rabi: float
    potential: float


def sample_point(r, cfg: TrapConfig) -> PotentialSample:
    """Evaluate V and its ingredients at a single position."""
    r = np.asarray(r, dtype=float)
    w0 = float(larmor_frequency(r, cfg))
    return PotentialSample(
        position=tuple(float(c) for c in r),
        larmor=w0,
        detuning=cfg.rf.omega - w0,
        rabi=float(rabi_frequency(r, cfg)),
        potential=float(dressed_potential(r, cfg)),
    )


def _check_fd_point(r, h: float):
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    if h < MIN_FD_STEP:
        raise ValueError(f"finite-difference step underflow: h={h} < {MIN_FD_STEP}")
    rho = float(np.hypot(r[0], r[1]))
    if rho < 2.0 * h:
        raise ValueError(
            "point too close to the z-axis exclusion tube for finite differences"
        )


def potential_gradient(r, cfg: TrapConfig, h: float = 1e-7):
    """Central-difference gradient of V [J/m], O(h^2) accurate.

    Requires the point to sit at least 2h from the z-axis so that no stencil
    point crosses the on-axis limit.
    """
    r = np.asarray(r, dtype=float)
    _check_fd_point(r, h)
    steps = h * np.eye(3)
    plus = dressed_potential(r + steps, cfg)
    minus = dressed_potential(r - steps, cfg)
    return (plus - minus) / (2.0 * h)


def potential_hessian(r, cfg: TrapConfig, h: float = 1e-7):
    """Central-difference Hessian of V [J/m^2], symmetrised as (H+H^T)/2."""
    r = np.asarray(r, dtype=float)
    _check_fd_point(r, h)
    eye = np.eye(3)
    v0 = float(dressed_potential(r, cfg))
    hess = np.empty((3, 3))
    for i in range(3):
        ei = h * eye[i]
        hess[i, i] = (
            float(dressed_potential(r + 2 * ei, cfg))
            - 2.0 * v0
            + float(dressed_potential(r - 2 * ei, cfg))
        ) / (4.0 * h * h)
        for j in range(i + 1, 3):
            ej = h * eye[j]
            val = (
                float(dressed_potential(r + ei + ej, cfg))
                - float(dressed_potential(r + ei - ej, cfg))
                - float(dressed_potential(r - ei + ej, cfg))
                + float(dressed_potential(r - ei - ej, cfg))
            ) / (4.0 * h * h)
            hess[i, j] = hess[j, i] = val
    return 0.5 * (hess + hess.T)
