#!/usr/bin/env python3
"""Dirichlet energy of the dilated Hopf fibration over a lambda ladder,
next to the closed form 64 pi^2 lam / (1 + lam)^2, plus the small-energy
ball data built from it."""

import numpy as np

from nematiclab.hopf import ball_energy_parts, dirichlet_energy_s3, resolution_warning

MESH = 64
BALL_MESH = 32


def main():
    print(f"{'lambda':>8} {'E_sphere':>12} {'closed form':>12} "
          f"{'E_ball':>12} {'warn':>5}")
    for lam in (1.0, 2.0, 4.0, 8.0, 16.0):
        e_sphere = dirichlet_energy_s3(lam, MESH)
        exact = 64.0 * np.pi**2 * lam / (1.0 + lam) ** 2
        e_vel, e_dir = ball_energy_parts(lam, BALL_MESH)
        warn = "yes" if resolution_warning(lam, MESH) else ""
        print(
            f"{lam:8.1f} {e_sphere:12.4f} {exact:12.4f} "
            f"{e_vel + e_dir:12.4f} {warn:>5}"
        )


if __name__ == "__main__":
    main()
