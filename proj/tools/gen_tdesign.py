#!/usr/bin/env python3
"""Generate spherical t-design point files used as test fixtures.

Solves sum_k Y_lm(x_k) = 0 for 1 <= l <= t by nonlinear least squares,
starting from a spiral point set, and writes one "x y z" line per node.
"""
import argparse
import sys

import numpy as np
from scipy.optimize import least_squares
from scipy.special import sph_harm_y


def harmonics(t, theta, phi):
    rows = []
    for ell in range(1, t + 1):
        for m in range(-ell, ell + 1):
            y = sph_harm_y(ell, abs(m), theta, phi)
            if m > 0:
                rows.append(np.sqrt(2) * y.real)
            elif m < 0:
                rows.append(np.sqrt(2) * y.imag)
            else:
                rows.append(y.real)
    return np.array(rows)


def residual(params, t):
    n = params.size // 2
    return harmonics(t, params[:n], params[n:]).sum(axis=1)


def spiral(n):
    k = np.arange(n) + 0.5
    theta = np.arccos(1 - 2 * k / n)
    phi = np.pi * (1 + 5 ** 0.5) * k
    return theta, np.mod(phi, 2 * np.pi)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--degree", type=int, required=True)
    parser.add_argument("--points", type=int, required=True)
    parser.add_argument("--out", required=True)
    args = parser.parse_args()

    theta, phi = spiral(args.points)
    sol = least_squares(residual, np.concatenate([theta, phi]), args=(args.degree,),
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
    worst = np.abs(sol.fun).max()
    print(f"degree {args.degree}, {args.points} points, worst residual {worst:.3e}",
          file=sys.stderr)
    if worst > 1e-11:
        sys.exit("did not converge")
    n = args.points
    th, ph = sol.x[:n], sol.x[n:]
    pts = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=1)
    np.savetxt(args.out, pts, fmt="%.17e")


if __name__ == "__main__":
    main()
