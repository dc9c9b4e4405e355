#!/usr/bin/env python3
"""Compute antipodally symmetric spherical t-designs on S^2.

Point counts follow the symmetric-design sizing N = 2*ceil(n^2 + 1.5n + 1.5)
with t = 2n + 1 (t = 1, 3, 5 use the pair, octahedron and icosahedron).
The free half of the set is solved with Levenberg-Marquardt on the even-degree
spherical harmonic moment equations, starting from a generalized spiral.

Output format: one point per line, "x y z" in %.16e.

    python3 tools/make_designs.py --out data/designs 7 9 11 ... 57
"""
import argparse
import hashlib
import math
import os
import sys
import time

import numpy as np
from scipy.special import sph_harm_y_all


def design_size(t):
    if t == 1:
        return 2
    if t == 3:
        return 6
    if t == 5:
        return 12
    if t == 7:
        return 32
    n = (t - 1) // 2
    return 2 * math.ceil(n * n + 1.5 * n + 1.5)


def fixed_design(t):
    if t == 1:
        return np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
    if t == 3:
        e = np.eye(3)
        return np.vstack([e, -e])
    if t == 5:
        g = (1.0 + math.sqrt(5.0)) / 2.0
        pts = []
        for a in (1.0, -1.0):
            for b in (g, -g):
                pts += [(0.0, a, b), (a, b, 0.0), (b, 0.0, a)]
        p = np.array(pts)
        return p / np.linalg.norm(p, axis=1, keepdims=True)
    raise ValueError(t)


def spiral_half(m):
    n = 2 * m
    h = -1.0 + (2.0 * np.arange(1, n + 1) - 1.0) / n
    theta = np.arccos(h)
    phi = np.zeros(n)
    for i in range(1, n):
        phi[i] = (phi[i - 1] + 3.6 / math.sqrt(n * (1.0 - h[i] ** 2))) % (2 * math.pi)
    keep = h > 0
    return theta[keep], phi[keep]


def repel(theta, phi, iters=300, chunk=1024):
    """Riesz s=1 repulsion of the symmetric set, moving only the free half."""
    st = np.sin(theta)
    x = np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=1)
    m = x.shape[0]
    step = 0.5 / math.sqrt(m)
    for _ in range(iters):
        full = np.vstack([x, -x])
        g = np.zeros_like(x)
        for s in range(0, m, chunk):
            d = x[s:s + chunk, None, :] - full[None, :, :]
            r2 = np.einsum("ijk,ijk->ij", d, d)
            r2[r2 < 1e-30] = np.inf
            g[s:s + chunk] = np.einsum("ij,ijk->ik", r2 ** -1.5, d)
        g -= np.einsum("ij,ij->i", g, x)[:, None] * x
        gn = np.linalg.norm(g, axis=1).max()
        x = x + step * g / gn
        x /= np.linalg.norm(x, axis=1, keepdims=True)
    # keep the free half in the upper hemisphere
    x[x[:, 2] < 0] *= -1
    theta = np.arccos(np.clip(x[:, 2], -1, 1))
    phi = np.arctan2(x[:, 1], x[:, 0])
    return theta, phi


def moments(theta, phi, lmax, jac, chunk=256):
    """Real even-degree (l >= 2) harmonic sums and optionally their Jacobian."""
    degrees = list(range(2, lmax + 1, 2))
    rows = sum(2 * l + 1 for l in degrees)
    m = theta.size
    res = np.zeros(rows)
    J = np.zeros((rows, 2 * m)) if jac else None
    for s in range(0, m, chunk):
        th = theta[s:s + chunk]
        ph = phi[s:s + chunk]
        if jac:
            y, dy = sph_harm_y_all(lmax, lmax, th, ph, diff_n=1)
        else:
            y = sph_harm_y_all(lmax, lmax, th, ph)
        r = 0
        for l in degrees:
            # orders 0..l stored at index m, negative orders at -m
            blocks = [y[l, 0].real] + [y[l, k].real for k in range(1, l + 1)] + \
                     [y[l, k].imag for k in range(1, l + 1)]
            for b in blocks:
                res[r] += b.sum()
                r += 1
            if jac:
                dt = [dy[l, 0, :, 0].real] + [dy[l, k, :, 0].real for k in range(1, l + 1)] + \
                     [dy[l, k, :, 0].imag for k in range(1, l + 1)]
                dp = [dy[l, 0, :, 1].real] + [dy[l, k, :, 1].real for k in range(1, l + 1)] + \
                     [dy[l, k, :, 1].imag for k in range(1, l + 1)]
                r0 = r - (2 * l + 1)
                for q in range(2 * l + 1):
                    J[r0 + q, s:s + th.size] = dt[q]
                    J[r0 + q, m + s:m + s + th.size] = dp[q]
        del y
    return res, J


def solve(t, n_total, seed, max_iter=400, log=sys.stderr):
    half = n_total // 2
    theta, phi = spiral_half(half)
    if seed:
        rng = np.random.default_rng(seed)
        theta = theta + rng.normal(0.0, 0.3 / math.sqrt(half), half)
        phi = phi + rng.normal(0.0, 0.3 / math.sqrt(half), half)
    theta, phi = repel(theta, phi)
    lmax = t - 1
    # rows of degree l scaled by 1/sqrt(l(l+1)) to balance the Jacobian
    w = np.concatenate([np.full(2 * l + 1, 1.0 / math.sqrt(l * (l + 1)))
                        for l in range(2, lmax + 1, 2)])
    mu, nu = 1e-2, 2.0
    history = []
    for it in range(max_iter):
        res, J = moments(theta, phi, lmax, True)
        raw = math.sqrt(res @ res)
        res *= w
        J *= w[:, None]
        f = res @ res
        if it % 10 == 0:
            print(f"t={t} it={it} |r|={raw:.3e} mu={mu:.1e}", file=log, flush=True)
        if raw < 1e-12:
            break
        history.append(raw)
        if len(history) > 60 and raw > 0.98 * history[-60]:
            raise RuntimeError(f"t={t}: stalled, |r|={raw:.3e}")
        JJ = J @ J.T
        JJ[np.diag_indices_from(JJ)] += mu * np.mean(np.diag(JJ))
        y = np.linalg.solve(JJ, res)
        del JJ
        step = -(J.T @ y)
        pred = f - np.sum((res + J @ step) ** 2)
        del J
        r2, _ = moments(theta + step[:half], phi + step[half:], lmax, False)
        r2 *= w
        rho = (f - r2 @ r2) / max(pred, 1e-300)
        if rho > 0:
            theta = theta + step[:half]
            phi = phi + step[half:]
            mu *= max(1.0 / 3.0, 1.0 - (2.0 * rho - 1.0) ** 3)
            nu = 2.0
        else:
            mu *= nu
            nu *= 2.0
            if mu > 1e12:
                raise RuntimeError(f"t={t}: stalled, |r|={raw:.3e}")
    else:
        raise RuntimeError(f"t={t}: no convergence, |r|={raw:.3e}")
    st = np.sin(theta)
    pts = np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=1)
    return np.vstack([pts, -pts])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", required=True)
    ap.add_argument("degrees", nargs="+", type=int)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for t in args.degrees:
        if t % 2 == 0:
            raise SystemExit("only odd degrees")
        t0 = time.time()
        if t <= 5:
            pts = fixed_design(t)
        else:
            pts = None
            n_total = design_size(t)
            while pts is None:
                for seed in range(4):
                    try:
                        pts = solve(t, n_total, seed)
                        break
                    except RuntimeError as e:
                        print(e, file=sys.stderr, flush=True)
                else:
                    n_total += 2
        path = os.path.join(args.out, f"ss{t:03d}.{pts.shape[0]:05d}")
        with open(path, "w") as fh:
            for p in pts:
                fh.write(f"{p[0]:.16e} {p[1]:.16e} {p[2]:.16e}\n")
        digest = hashlib.sha256(open(path, "rb").read()).hexdigest()
        print(f"{path} N={pts.shape[0]} {time.time() - t0:.1f}s sha256={digest}", flush=True)


if __name__ == "__main__":
    main()
