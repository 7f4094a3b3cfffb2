import numpy as np
import pytest

from dlab.grid import SpectralGrid


@pytest.fixture(scope="session")
def grid8():
    return SpectralGrid(m=8, L=16.0)


@pytest.fixture(scope="session")
def grid16():
    return SpectralGrid(m=16, L=16.0)


def make_random_field(grid, seed, domain="physical", band_limit=None):
    from dlab.grid import random_field

    return random_field(grid, seed, domain=domain, band_limit=band_limit)


def direct_dft(field):
    """O(m^2d) matrix DFT oracle, independent of the FFT path."""
    g = field.grid
    m = g.m
    phase = np.exp(-1j * np.outer(g.xi1d, g.x1d))  # (xi, x)
    vals = field.values
    for ax in range(g.d):
        vals = np.tensordot(phase, vals, axes=([1], [ax]))
        vals = np.moveaxis(vals, 0, ax)
    return vals * g.dx**g.d
