"""Shared systems and the random corner corpus used across the test suite."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from filippov_lab.canopy import QuadClass, canopy_invariants, quad_shape
from filippov_lab.pws_model import FieldTriple, PolynomialScalar, PwsSystem, QuadCorners

ROOT = Path(__file__).resolve().parent.parent
SYSTEMS = ROOT / "systems"

S_SYM = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
S_POS = [(1.0, 1.0), (2.0, 1.0), (2.0, 2.0), (1.0, 2.0)]
S_TWO = [(1.25, 2.0), (-0.75, 0.0), (1.25, -2.0), (-0.75, 0.0)]
S_TWO_PRIME = [(1.25, 2.0), (-0.75, 0.1), (1.25, -2.0), (-0.75, -0.1)]


def corners(xt, alpha=(1, 1, 1, 1), x=0.0) -> QuadCorners:
    return QuadCorners.from_xt(xt, alpha, x)


def f_shift(alpha=(1.0, 1.0, 1.0, 1.0)) -> PwsSystem:
    """S_two with every beta shifted by x."""
    P = PolynomialScalar
    fs = tuple(
        FieldTriple(P((a,)), P((b, 1.0)), P((g,)))
        for a, (b, g) in zip(alpha, S_TWO)
    )
    return PwsSystem(fs, (-0.3, 0.5), "F_shift")


def edge_family() -> PwsSystem:
    P = PolynomialScalar
    fs = (
        FieldTriple.const(1, 2, 2),
        FieldTriple.const(1, -2, 2),
        FieldTriple(P((1,)), P((1,)), P((1, 1))),
        FieldTriple(P((1,)), P((-1,)), P((-1, 1))),
    )
    return PwsSystem(fs, (-0.5, 0.5), "edge_family")


def seg_distance(o, a, b) -> float:
    ab = b - a
    t = np.clip(np.dot(o - a, ab) / np.dot(ab, ab), 0.0, 1.0)
    return float(np.linalg.norm(a + t * ab - o))


def admissible(X: np.ndarray, margin: float = 1e-3) -> bool:
    """Corpus filter: clear of degenerate shapes, edges and the parabolic line."""
    q = QuadCorners.from_xt(X)
    if np.min(np.abs(quad_shape(q).delta)) <= margin:
        return False
    o = np.zeros(2)
    if min(seg_distance(o, X[i], X[(i + 1) % 4]) for i in range(4)) <= margin:
        return False
    return abs(canopy_invariants(q).Delta) > margin


def stratum(q: QuadCorners) -> str:
    sh = quad_shape(q)
    if sh.cls is QuadClass.CROSSED:
        return f"crossed-{sh.chi1_role.value}"
    if sh.cls is QuadClass.CONCAVE:
        return f"concave-tip{sh.tip}"
    return sh.cls.value


@dataclass
class Corpus:
    items: list[QuadCorners]
    strata: Counter


def make_corpus(n: int = 10_000, min_per_stratum: int = 500, seed: int = 20240601) -> Corpus:
    """Uniform corners in [-2, 2]^8, filtered, topped up until every class and tip has enough members."""
    rng = np.random.default_rng(seed)
    items: list[QuadCorners] = []
    counts: Counter = Counter()
    needed = {"convex", "crossed-edge", "crossed-diagonal"} | {f"concave-tip{k}" for k in (1, 2, 3, 4)}
    while len(items) < n or any(counts[s] < min_per_stratum for s in needed):
        X = rng.uniform(-2.0, 2.0, (4, 2))
        if not admissible(X):
            continue
        q = QuadCorners.from_xt(X)
        s = stratum(q)
        if len(items) >= n and counts[s] >= min_per_stratum:
            continue
        items.append(q)
        counts[s] += 1
    return Corpus(items, counts)


def from_bilinear(a0, a1, a2, a3=(0.0, 0.0)) -> np.ndarray:
    """Corners of the canopy map a0 + a1 psi + a2 phi + a3 psi phi."""
    a0, a1, a2, a3 = (np.asarray(v, float) for v in (a0, a1, a2, a3))
    return np.array([a0 + a1 + a2 + a3, a0 - a1 + a2 - a3, a0 - a1 - a2 + a3, a0 + a1 - a2 - a3])


# affine canopy with DF~ = [[1, 2], [-2, -1]] and its zero at (psi, phi) = (0.5, -0.3):
# det DF~ = 3 > 0, s1 = 2 > 0, s2 = -2 < 0
S_MIXED_ROOT = (0.5, -0.3)
S_MIXED = from_bilinear((0.1, 0.7), (1.0, -2.0), (2.0, -1.0))
