#!/usr/bin/env python3
"""The maximum-principle counterexample: from w0 = -2x, phi0 = 0 the angle
climbs to phi = t everywhere, so max phi leaves [0, max phi0] immediately."""

from nematiclab.poiseuille import counterexample_run


def main():
    report, _ = counterexample_run(L=5.0, n=500, t_end=1.0)
    for key, value in report.as_dict().items():
        print(f"{key:>28}: {value}")


if __name__ == "__main__":
    main()
