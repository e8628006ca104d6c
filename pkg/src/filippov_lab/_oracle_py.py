"""Pure-numpy grid scan + Newton for bilinear roots. Fallback for ``_kernels``."""

from __future__ import annotations

import numpy as np


def scan_roots(coef: np.ndarray, n: int, tol: float, max_iter: int) -> tuple[np.ndarray, int]:
    """Newton-refined roots from every sign-change cell of an n x n grid on [-1, 1]^2.

    ``coef`` has rows a0..a3 and columns (beta, gamma). Returns the converged
    points (unsorted, not deduplicated) and the number of cells whose Newton
    iteration failed.
    """
    a0, a1, a2, a3 = (np.asarray(r, float) for r in coef)
    h = 2.0 / (n - 1)
    g = -1.0 + np.arange(n) * h
    g[-1] = 1.0
    P, F = np.meshgrid(g, g, indexing="ij")
    vals = a0[:, None, None] + a1[:, None, None] * P + a2[:, None, None] * F + a3[:, None, None] * P * F

    def changes(v):
        c = np.stack([v[:-1, :-1], v[1:, :-1], v[:-1, 1:], v[1:, 1:]])
        return (c.min(axis=0) <= 0) & (c.max(axis=0) >= 0)

    cells = np.argwhere(changes(vals[0]) & changes(vals[1]))
    out = []
    failed = 0
    for i, j in cells:
        psi, phi = g[i] + 0.5 * h, g[j] + 0.5 * h
        ok = False
        for _ in range(max_iter):
            f0 = a0[0] + a1[0] * psi + a2[0] * phi + a3[0] * psi * phi
            f1 = a0[1] + a1[1] * psi + a2[1] * phi + a3[1] * psi * phi
            if max(abs(f0), abs(f1)) <= tol:
                ok = True
                break
            j00 = a1[0] + a3[0] * phi
            j01 = a2[0] + a3[0] * psi
            j10 = a1[1] + a3[1] * phi
            j11 = a2[1] + a3[1] * psi
            det = j00 * j11 - j01 * j10
            if det == 0.0:
                break
            psi -= (j11 * f0 - j01 * f1) / det
            phi -= (-j10 * f0 + j00 * f1) / det
            if not (abs(psi) < 4.0 and abs(phi) < 4.0):
                break
        if ok:
            out.append((psi, phi))
        else:
            failed += 1
    return np.array(out, dtype=float).reshape(-1, 2), failed
