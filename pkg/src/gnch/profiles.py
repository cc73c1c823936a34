"""Initial-data profiles and random smooth test fields."""
import numpy as np

from .grid import Field, State

PROFILES = ("gaussian", "sech2", "cosine-mode")


def profile(grid, kind, amplitude, width=1.0, center=None, mode=1, zero_mean=True):
    x = grid.x
    if center is None:
        center = grid.length / 2
    if kind == "gaussian":
        z = amplitude * np.exp(-((x - center) / width) ** 2)
    elif kind == "sech2":
        z = amplitude / np.cosh((x - center) / width) ** 2
    elif kind == "cosine-mode":
        z = amplitude * np.cos(2 * np.pi * mode * (x - center) / grid.length)
    else:
        raise ValueError(f"unknown profile {kind!r}; expected one of {PROFILES}")
    if zero_mean:
        z = z - z.mean()
    return Field(grid, z)


def right_biased_state(zeta: Field, p) -> State:
    """``v = (gamma+delta) zeta``: the purely right-going split of the decoupled model."""
    return State(zeta, (p.gamma + p.delta) * zeta)


def random_smooth(grid, rng, modes=6, amplitude=1.0, decay=1.0):
    """Random trigonometric polynomial with at most ``modes`` modes and sup-norm ``amplitude``."""
    ah = np.zeros(grid.n // 2 + 1, dtype=complex)
    j = np.arange(1, modes + 1)
    ah[1:modes + 1] = (rng.standard_normal(modes) + 1j * rng.standard_normal(modes)) * np.exp(-decay * (j - 1) / modes)
    ah[0] = rng.standard_normal()
    a = grid.ifft(ah)
    return Field(grid, amplitude * a / np.max(np.abs(a)))
