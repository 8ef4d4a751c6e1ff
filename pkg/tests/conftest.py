import numpy as np
import pytest

from ringtrap import (
    QuadrupoleConfig,
    RB87,
    RfConfig,
    TrapConfig,
    column_density,
    resonance_radius,
    thermal_density,
)

OMEGA_15MHZ = 2 * np.pi * 1.5e6
B07 = 0.7e-4  # 0.7 G in tesla
B02 = 0.2e-4  # 0.2 G in tesla
PIXEL = 2.5e-6


def make_trap(b_x=0.0, b_y=0.0, b_z=0.0, alpha=0.0, beta=0.0,
              omega=OMEGA_15MHZ, gradient=1.0, gravity=False, atom=RB87):
    return TrapConfig(
        atom=atom,
        quad=QuadrupoleConfig(gradient=gradient),
        rf=RfConfig(b_x=b_x, b_y=b_y, b_z=b_z, alpha=alpha, beta=beta, omega=omega),
        gravity_on=gravity,
    )


@pytest.fixture
def fig2a():
    """Linear polarization along x: double-well regime."""
    return make_trap(b_x=B07)


@pytest.fixture
def fig2b():
    """Circular polarization in the xy plane: symmetric-ring regime."""
    return make_trap(b_x=B07, b_y=B07, alpha=-np.pi / 2)


@pytest.fixture
def fig2c():
    """Linear x plus axial z component, beta=0: asymmetric-ring regime."""
    return make_trap(b_x=B07, b_z=B02, beta=0.0)


def imaging_region(cfg, pixel=PIXEL, half_xy_factor=1.8, half_z_factor=0.1, nz=33):
    """Default synthetic-imaging box: ring plane slab, square pixels."""
    r0 = resonance_radius(cfg)
    n_half = int(np.ceil(half_xy_factor * r0 / pixel))
    ext = n_half * pixel
    region = ((-ext, ext), (-ext, ext), (-half_z_factor * r0, half_z_factor * r0))
    return region, (2 * n_half + 1, 2 * n_half + 1, nz)


def synth_image(cfg, temperature=20e-6, atoms=1e5, pixel=PIXEL):
    region, dims = imaging_region(cfg, pixel=pixel)
    dens = thermal_density(cfg, temperature, region, dims, atom_number=atoms)
    return column_density(dens, axis="z")
