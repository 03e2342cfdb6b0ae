"""Gauss-Legendre machinery at extended precision.

Nodes are seeded from the double-precision rule and polished by Newton
iteration on the Legendre recurrence, which converges to full working
precision in a handful of steps.  Rules are cached per (order, bits).
"""

from __future__ import annotations

import threading

import numpy as np
import gmpy2
from gmpy2 import mpfr

from .precision import context

_rule_cache: dict[tuple[int, int], tuple[list, list]] = {}
_rule_lock = threading.Lock()


def _legendre_pair(n: int, x: mpfr):
    """(P_n(x), P_n'(x)) by upward recurrence."""
    p0, p1 = mpfr(1), x
    for j in range(1, n):
        p0, p1 = p1, ((2 * j + 1) * x * p1 - j * p0) / (j + 1)
    dp = n * (x * p1 - p0) / (x * x - 1)
    return p1, dp


def leggauss_mpfr(n: int, bits: int):
    """Gauss-Legendre nodes and weights on [-1, 1] at ``bits`` precision."""
    key = (n, bits)
    cached = _rule_cache.get(key)
    if cached is not None:
        return cached
    with _rule_lock:
        cached = _rule_cache.get(key)
        if cached is not None:
            return cached
        seeds, _ = np.polynomial.legendre.leggauss(n)
        with context(bits + 32):
            nodes, weights = [], []
            steps = max(4, (bits + 32).bit_length())
            for s in seeds:
                x = mpfr(s)
                for _ in range(steps):
                    p, dp = _legendre_pair(n, x)
                    x = x - p / dp
                p, dp = _legendre_pair(n, x)
                nodes.append(x)
                weights.append(2 / ((1 - x * x) * dp * dp))
        _rule_cache[key] = (nodes, weights)
        return nodes, weights


def panel_nodes(edges, order: int, bits: int):
    """Composite Gauss-Legendre nodes/weights over consecutive panels."""
    base_x, base_w = leggauss_mpfr(order, bits)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if not b > a:
            continue
        half = (b - a) / 2
        mid = (a + b) / 2
        for x, w in zip(base_x, base_w):
            nodes.append(mid + half * x)
            weights.append(half * w)
    return nodes, weights


def graded_edges_toward(point, start, levels: int):
    """Panel edges on [min, max] accumulating geometrically toward ``point``."""
    edges = [start]
    for i in range(1, levels):
        edges.append(point + (start - point) / mpfr(2) ** i)
    edges.append(point)
    return edges
