"""Independent reference computations used by the tests."""

import itertools
import math

import numpy as np
from scipy import optimize


def unit_vectors_c3(a, b, f1, f2):
    """Unit vectors in C^3 (global phase removed) from four real angles."""
    return np.stack(
        [
            np.cos(a) + 0j,
            np.sin(a) * np.cos(b) * np.exp(1j * f1),
            np.sin(a) * np.sin(b) * np.exp(1j * f2),
        ],
        axis=-1,
    )


def cluster_power_full_space(h1, h2, g1, g2, noise, w):
    """p1 + p2 with K2/K3 tight; inf where K1 fails or a gain vanishes."""
    a1 = np.abs(w @ h1.conj()) ** 2
    a2 = np.abs(w @ h2.conj()) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        total = (1 + g2) * g1 * noise / a1 + g2 * noise / a2
    return np.where((a1 >= a2) & (a1 > 0) & (a2 > 0), total, np.inf)


def brute_force_beam_c3(h1, h2, g1, g2, noise, points=20, polish=8):
    """Coarse grid over the C^3 unit sphere followed by local polishing.

    Returns the smallest cluster power found.
    """
    a = np.linspace(0, np.pi / 2, points)
    b = np.linspace(0, np.pi / 2, points)
    f = np.linspace(0, 2 * np.pi, 2 * points, endpoint=False)
    A, B, F1, F2 = np.meshgrid(a, b, f, f, indexing="ij")
    params = np.stack([A.ravel(), B.ravel(), F1.ravel(), F2.ravel()], axis=1)
    values = cluster_power_full_space(h1, h2, g1, g2, noise, unit_vectors_c3(*params.T))
    best = float(values.min())

    h1c, h2c = [complex(z) for z in h1.conj()], [complex(z) for z in h2.conj()]

    def obj(x):
        a, b, f1, f2 = x
        w = (math.cos(a), math.sin(a) * math.cos(b) * complex(math.cos(f1), math.sin(f1)),
             math.sin(a) * math.sin(b) * complex(math.cos(f2), math.sin(f2)))
        a1 = abs(sum(u * v for u, v in zip(w, h1c))) ** 2
        a2 = abs(sum(u * v for u, v in zip(w, h2c))) ** 2
        if not (a1 >= a2 and a1 > 0 and a2 > 0):
            return 1e300
        return (1 + g2) * g1 * noise / a1 + g2 * noise / a2

    for i in np.argsort(values)[:polish]:
        if not math.isfinite(values[i]):
            break
        res = optimize.minimize(obj, params[i], method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000, "maxfev": 20000})
        best = min(best, float(res.fun))
    return best


def enumerate_ra_throughput(K, p, levels, subcarriers, model):
    """Exact expected decoded packets per slot by enumerating every user's choice.

    Each user is silent (prob 1 - p) or occupies one of the ``levels *
    subcarriers`` cells uniformly. Level 0 is the highest power.
    """
    cells = levels * subcarriers
    choices = [None] + list(range(cells))
    probs = [1 - p] + [p / cells] * cells
    total = 0.0
    for outcome in itertools.product(range(len(choices)), repeat=K):
        prob = math.prod(probs[c] for c in outcome)
        if prob == 0:
            continue
        counts = [0] * cells
        for c in outcome:
            if c:
                counts[choices[c]] += 1
        total += prob * _decoded(counts, levels, subcarriers, model)
    return total


def _decoded(counts, levels, subcarriers, model):
    n = 0
    for s in range(subcarriers):
        for lvl in range(levels):
            c = counts[s * levels + lvl]
            if model == "sic_blocking" and c >= 2:
                break
            if c == 1:
                n += 1
    return n


def binomial_two_level(K, p):
    """Independent-subchannel throughput for B=1, L=2 by conditioning on the transmitter count."""
    total = 0.0
    for n in range(K + 1):
        pn = math.comb(K, n) * p**n * (1 - p) ** (K - n)
        inner = sum(math.comb(n, j) * 0.5**n * ((j == 1) + (n - j == 1)) for j in range(n + 1))
        total += pn * inner
    return total


def brute_force_min_total(gains, targets, center, half_width, step=1e-3):
    """Smallest total over a power grid around ``center`` meeting all rate targets."""
    axes = [np.arange(max(c - half_width, 0.0), c + half_width + step / 2, step) for c in center]
    mesh = np.meshgrid(*axes, indexing="ij")
    p = [m.ravel() for m in mesh]
    feasible = np.ones_like(p[0], dtype=bool)
    before = np.zeros_like(p[0])
    for a, r, pk in zip(gains, targets, p):
        feasible &= np.log2(1 + a * pk / (a * before + 1)) >= r
        before = before + pk
    if not feasible.any():
        return math.inf
    return float(before[feasible].min())
