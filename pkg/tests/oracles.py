"""Independent numerical oracles used by the tests.

Everything here works from the coordinate frame matrix alone (finite
differences), so it shares no code path with the hard-coded connections
and curvatures in the catalogue.
"""
from __future__ import annotations

import itertools

import numpy as np


def directional(fun, x, vec, h=1e-5):
    """Central difference of ``fun`` at ``x`` along coordinate vector ``vec``."""
    x = np.asarray(x, dtype=float)
    return (fun(x + h * vec) - fun(x - h * vec)) / (2 * h)


def frame_brackets(metric, x, h=1e-5):
    """``c[m, k, l]`` with ``[e_k, e_l] = c^m_kl e_m``, from the frame matrix."""
    E = metric.frame(x)
    n = metric.dim
    dE = [directional(metric.frame, x, E[:, k], h) for k in range(n)]  # e_k(E)
    c = np.zeros((n, n, n))
    Einv = np.linalg.inv(E)
    for k, l in itertools.product(range(n), repeat=2):
        br = dE[k][:, l] - dE[l][:, k]
        c[:, k, l] = Einv @ br
    return c


def koszul_connection(c, eta):
    """Levi-Civita ``gamma[i, j, k] = omega^i_j(e_k)`` from structure functions."""
    eta = np.asarray(eta, dtype=float)
    n = eta.size
    cl = eta[:, None, None] * c
    G = np.zeros((n, n, n))
    for i, j, k in itertools.product(range(n), repeat=3):
        G[i, j, k] = 0.5 * (cl[i, k, j] - cl[k, j, i] + cl[j, i, k])
    return G / eta[:, None, None]


def ricci_fd(metric, x, h=1e-4):
    """Frame Ricci tensor from ``metric.gamma`` differentiated along the frame."""
    n = metric.dim
    E = metric.frame(x)
    G = metric.gamma(x)
    dG = [directional(metric.gamma, x, E[:, k], h) for k in range(n)]
    c = np.einsum("mlk->mkl", G) - G  # torsion free: c^m_kl = G^m_lk - G^m_kl
    R = np.zeros((n, n, n, n))
    for i, j, k, l in itertools.product(range(n), repeat=4):
        R[i, j, k, l] = (dG[k][i, j, l] - dG[l][i, j, k]
                         + sum(G[m, j, l] * G[i, m, k] - G[m, j, k] * G[i, m, l]
                               - c[m, k, l] * G[i, j, m] for m in range(n)))
    return np.einsum("kjkl->jl", R)
