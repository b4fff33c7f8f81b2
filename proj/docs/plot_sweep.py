#!/usr/bin/env python3
"""Plot a sweep CSV produced by the dicke CLI.

Usage: plot_sweep.py sweep.csv [out.png]

Left panel: order parameters and incoherent populations vs y/y_crit.
Right panel: diffusion rates (log scale).
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__)
        return 1
    path = sys.argv[1]
    out = sys.argv[2] if len(sys.argv) > 2 else path.rsplit(".", 1)[0] + ".png"

    data = np.genfromtxt(path, delimiter=",", names=True)
    x = data["y_over_ycrit"]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))

    ax1.plot(x, data["alpha0_sq"], "r--", lw=2, label=r"$\alpha_0^2$")
    ax1.plot(x, data["beta0_sq"], "b-", lw=2, label=r"$\beta_0^2$")
    ax1.plot(x, data["n_photon_incoh"], "r--", lw=0.8, label=r"$\langle a^\dagger a\rangle$")
    ax1.plot(x, data["n_atom_incoh"], "b-", lw=0.8, label=r"$\langle b^\dagger b\rangle$")
    ax1.set_xlabel(r"$y/y_{\rm crit}$")
    ax1.set_ylim(0, 1.0)
    ax1.legend(loc="upper left")
    ax1.set_title("order parameters and incoherent populations")

    ax2.semilogy(x, data["rate_modes"], "k--", label="normal modes")
    ax2.semilogy(x, data["rate_populations"], "k-", label="populations (coarse-grained)")
    ax2.semilogy(x, data["rate_adiabatic"], "k-.", label="adiabatic elimination")
    ax2.set_xlabel(r"$y/y_{\rm crit}$")
    ax2.set_ylabel(r"rate $[\omega_R]$")
    ax2.legend(loc="upper left")
    ax2.set_title("ground-state depletion rates")

    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
