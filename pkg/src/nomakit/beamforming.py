"""
Per-cluster NOMA beamforming with zero-forcing between clusters.

A cluster is a strong user 1 and a weak user 2 served by one beam ``w``.
With effective gains ``a_i = |h_i^H w|^2`` the QoS constraints are

    (K1)  a1 >= a2                          user 1 can run SIC on user 2
    (K2)  a1 * p1 >= G1 * noise             user 1 SINR after SIC
    (K3)  a2 * p2 >= (a2 * p1 + noise) * G2 user 2 SINR, user 1 as interference

For a fixed beam, the cheapest powers make K2 and K3 tight, which leaves
the beam search objective

    p1 + p2 = (1 + G2) * G1 * noise / a1 + G2 * noise / a2.

Only the components of ``w`` inside ``span{h1, h2}`` change the objective,
so the beam is searched as ``cos(t) u1 + sin(t) exp(j f) u2`` over an
orthonormal basis ``{u1, u2}`` of that span.

OMA baseline
------------
The two users of a cluster take orthogonal halves of the resource. To
match the NOMA rates ``log2(1 + G_i)`` in half the time, each needs SINR
``(1 + G_i)**2 - 1``; each is served with its own projected matched
filter and the reported power is the average over the two halves. This
baseline is a modeling choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize

from .channel import FadingSpec, as_complex_vector, draw_channels
from .errors import InfeasibleError

__all__ = [
    "Cluster",
    "Beam",
    "ClusterSolution",
    "Fig3Row",
    "db_to_linear",
    "effective_gain",
    "sinr_weak",
    "sinr_strong",
    "constraints_satisfied",
    "constraint_slacks",
    "powers_for_beam",
    "beam_power",
    "optimize_beam",
    "null_space_basis",
    "zf_multicluster",
    "oma_power",
    "fig3_experiment",
]

# Rounding slack allowed on K1 when a beam found on the K1 boundary is
# mapped back to L dimensions.
K1_RTOL = 1e-12


def db_to_linear(db):
    """``10 ** (db / 10)``."""
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0) if np.ndim(db) else 10.0 ** (float(db) / 10.0)


def effective_gain(h, w) -> float:
    """``|h^H w|^2``."""
    return float(abs(np.vdot(h, w)) ** 2)


@dataclass(frozen=True, eq=False)
class Cluster:
    """Strong/weak user pair sharing a beam.

    ``g1`` and ``g2`` are linear SINR targets. Zero targets are accepted
    for degenerate test cases.
    """

    h1: np.ndarray
    h2: np.ndarray
    g1: float
    g2: float
    noise: float = 1.0

    def __post_init__(self):
        h1 = as_complex_vector(self.h1)
        h2 = as_complex_vector(self.h2)
        if h1.shape != h2.shape:
            raise ValueError("h1 and h2 must have the same length")
        if not np.any(h1) or not np.any(h2):
            raise ValueError("cluster channels must be nonzero")
        if self.g1 < 0 or self.g2 < 0:
            raise ValueError("SINR targets must be nonnegative")
        if not self.noise > 0:
            raise ValueError("noise power must be positive")
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "h2", h2)
        object.__setattr__(self, "g1", float(self.g1))
        object.__setattr__(self, "g2", float(self.g2))
        object.__setattr__(self, "noise", float(self.noise))

    @property
    def antennas(self) -> int:
        return self.h1.size


@dataclass(frozen=True, eq=False)
class Beam:
    """Unit-norm beamforming vector."""

    w: np.ndarray

    def __post_init__(self):
        w = as_complex_vector(self.w)
        if abs(np.linalg.norm(w) - 1.0) > 1e-12:
            raise ValueError(f"beam must have unit norm, got {np.linalg.norm(w)!r}")
        object.__setattr__(self, "w", w)

    @classmethod
    def from_vector(cls, v) -> "Beam":
        v = as_complex_vector(v)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("cannot normalize a zero vector")
        return cls(v / norm)


@dataclass(frozen=True, eq=False)
class ClusterSolution:
    beam: Beam
    p1: float
    p2: float
    total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total", self.p1 + self.p2)


def _gains(cluster: Cluster, beam: Beam) -> tuple[float, float]:
    if beam.w.size != cluster.antennas:
        raise ValueError(f"beam has {beam.w.size} entries, cluster has {cluster.antennas} antennas")
    return effective_gain(cluster.h1, beam.w), effective_gain(cluster.h2, beam.w)


def sinr_weak(cluster: Cluster, beam: Beam, p1: float, p2: float) -> float:
    """SINR of user 2, which treats the signal to user 1 as noise."""
    _, a2 = _gains(cluster, beam)
    return a2 * p2 / (a2 * p1 + cluster.noise)


def sinr_strong(cluster: Cluster, beam: Beam, p1: float) -> float:
    """SINR of user 1 after removing the signal to user 2."""
    a1, _ = _gains(cluster, beam)
    return a1 * p1 / cluster.noise


def constraint_slacks(cluster: Cluster, beam: Beam, p1: float, p2: float) -> tuple[float, float, float]:
    """Relative slack of K1, K2, K3; each is ``lhs / rhs - 1``.

    A nonnegative slack means the constraint holds. A zero right-hand side
    gives ``inf`` slack when the left-hand side is positive, else 0.
    """

    def ratio(lhs, rhs):
        if rhs == 0:
            return math.inf if lhs > 0 else 0.0
        return lhs / rhs - 1.0

    a1, a2 = _gains(cluster, beam)
    return (
        ratio(a1, a2),
        ratio(a1 * p1, cluster.g1 * cluster.noise),
        ratio(a2 * p2, (a2 * p1 + cluster.noise) * cluster.g2),
    )


def constraints_satisfied(cluster: Cluster, beam: Beam, p1: float, p2: float, rtol: float = 0.0) -> bool:
    """True iff K1-K3 hold, each allowed to miss by ``rtol`` relative."""
    if p1 < 0 or p2 < 0:
        raise ValueError("powers must be nonnegative")
    a1, a2 = _gains(cluster, beam)
    g1, g2, s2 = cluster.g1, cluster.g2, cluster.noise
    return (
        a1 >= a2 * (1.0 - rtol)
        and a1 * p1 >= g1 * s2 * (1.0 - rtol)
        and a2 * p2 >= (a2 * p1 + s2) * g2 * (1.0 - rtol)
    )


def powers_for_beam(cluster: Cluster, beam: Beam) -> ClusterSolution:
    """Smallest powers meeting K2 and K3 for a fixed beam.

    Raises
    ------
    InfeasibleError
        If K1 fails or either effective gain is zero.
    """
    a1, a2 = _gains(cluster, beam)
    if a1 <= 0 or a2 <= 0:
        raise InfeasibleError("beam has zero effective gain toward a cluster user")
    if a1 < a2 * (1.0 - K1_RTOL):
        raise InfeasibleError("beam violates the SIC ordering |h1^H w|^2 >= |h2^H w|^2")
    p1 = cluster.g1 * cluster.noise / a1
    p2 = cluster.g2 * (p1 + cluster.noise / a2)
    return ClusterSolution(beam, p1, p2)


def beam_power(a1, a2, g1: float, g2: float, noise: float):
    """Cluster power ``p1 + p2`` as a function of the effective gains (vectorized)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        total = (1.0 + g2) * g1 * noise / a1
        if g2 > 0:
            total = total + g2 * noise / a2
    return total


class _PlaneSearch:
    """Cluster power over unit beams ``w = cos(t) u1 + sin(t) exp(jf) u2``.

    ``u1`` is the projected strong-user direction, so ``a1 = n1^2 cos(t)^2``
    does not depend on ``f``. The phase ``f`` only moves ``a2`` within
    ``[(|x| c - |y| s)^2, (|x| c + |y| s)^2]`` (``c, s`` the cosine and sine
    of ``t``). Since the power decreases in ``a2``, the best phase pushes
    ``a2`` as high as K1 allows, leaving a one-dimensional search in ``t``.
    """

    def __init__(self, c1: np.ndarray, c2: np.ndarray, g1: float, g2: float, noise: float):
        self.n1 = float(np.linalg.norm(c1))
        self.u1 = c1 / self.n1
        self.x = complex(np.vdot(c2, self.u1))
        resid = c2 - self.u1 * np.vdot(self.u1, c2)
        nr = np.linalg.norm(resid)
        if nr > 1e-12 * np.linalg.norm(c2):
            self.u2 = resid / nr
            self.y = complex(np.vdot(c2, self.u2))
        else:
            self.u2 = None
            self.y = 0j
        self.g1, self.g2, self.noise = g1, g2, noise

    def gains(self, t):
        """``(a1, a2)`` at angle ``t`` with the best phase; ``a2`` is NaN if K1 cannot hold."""
        c, s = np.cos(t), np.sin(t)
        ax, ay = abs(self.x), abs(self.y)
        a1 = (self.n1 * c) ** 2
        cap = a1
        lo = (ax * c - ay * s) ** 2
        hi = (ax * c + ay * s) ** 2
        a2 = np.where(lo <= cap, np.minimum(hi, cap), np.nan)
        return a1, a2

    def objective(self, t):
        a1, a2 = self.gains(t)
        ok = (a1 > 0) & np.isfinite(a2)
        if self.g2 > 0:
            ok &= np.nan_to_num(a2) > 0
        with np.errstate(invalid="ignore"):
            total = beam_power(a1, a2, self.g1, self.g2, self.noise)
        return np.where(ok, total, np.inf)

    def vector(self, t: float) -> np.ndarray:
        if self.u2 is None:
            return self.u1.copy()
        c, s = np.cos(t), np.sin(t)
        _, a2 = self.gains(t)
        ax, ay = abs(self.x), abs(self.y)
        # c2^H w = x c + y s e^{jf}; choose f so that its magnitude squared is a2.
        if ax * ay * c * s > 0:
            cosd = (float(a2) - (ax * c) ** 2 - (ay * s) ** 2) / (2 * ax * ay * c * s)
            delta = float(np.arccos(np.clip(cosd, -1.0, 1.0)))
        else:
            delta = 0.0
        f = np.angle(self.x) - np.angle(self.y) + delta
        return c * self.u1 + s * np.exp(1j * f) * self.u2


def _refine(search: _PlaneSearch, ts: np.ndarray, values: np.ndarray, i: int) -> float:
    """Bounded Brent refinement in the grid cell pair around ``ts[i]``."""
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, ts.size - 1)]

    def obj(t):
        val = float(search.objective(t))
        return val if np.isfinite(val) else 1e300

    res = optimize.minimize_scalar(obj, bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
    return float(res.x) if res.fun < values[i] else float(ts[i])


def optimize_beam(cluster: Cluster, effective_subspace=None, grid: int = 4096) -> ClusterSolution:
    """Minimum-power beam for a cluster, subject to K1.

    Parameters
    ----------
    cluster : Cluster
    effective_subspace : array_like, optional
        ``L x d`` matrix with orthonormal columns; the beam is restricted
        to their span (used for zero-forcing).
    grid : int
        Number of angles on ``[0, pi/2)`` scanned before refinement.

    Raises
    ------
    InfeasibleError
        If no beam in the subspace satisfies K1 with positive gains.
    """
    if effective_subspace is None:
        q = None
        c1, c2 = cluster.h1, cluster.h2
    else:
        q = np.asarray(effective_subspace, dtype=complex)
        if q.ndim != 2 or q.shape[0] != cluster.antennas or q.shape[1] < 1:
            raise ValueError("effective_subspace must be an L x d basis with d >= 1")
        c1, c2 = q.conj().T @ cluster.h1, q.conj().T @ cluster.h2
    scale = max(np.linalg.norm(cluster.h1), np.linalg.norm(cluster.h2))
    if np.linalg.norm(c1) <= 1e-12 * scale:
        raise InfeasibleError("strong user's channel vanishes in the beam subspace")

    search = _PlaneSearch(c1, c2, cluster.g1, cluster.g2, cluster.noise)
    if search.u2 is None:
        t = 0.0
        if not np.isfinite(search.objective(t)):
            raise InfeasibleError("no beam in the subspace satisfies K1 with nonzero gains")
    else:
        ts = np.linspace(0.0, np.pi / 2, grid, endpoint=False)
        values = search.objective(ts)
        i = int(np.argmin(values))
        if not np.isfinite(values[i]):
            raise InfeasibleError("no beam in the subspace satisfies K1 with nonzero gains")
        t = _refine(search, ts, values, i)

    w = search.vector(t)
    if q is not None:
        w = q @ w
    return powers_for_beam(cluster, Beam.from_vector(w))


def null_space_basis(vectors, antennas: int) -> np.ndarray:
    """Orthonormal basis (``L x d``) of the complement of ``span(vectors)``."""
    if len(vectors) == 0:
        return np.eye(antennas, dtype=complex)
    h = np.stack([as_complex_vector(v) for v in vectors])
    return linalg.null_space(h.conj())


def zf_multicluster(clusters, grid: int = 4096) -> list[ClusterSolution]:
    """Beam each cluster inside the null space of every other cluster's users.

    Both users of every other cluster are nulled, so no inter-cluster
    interference remains and each cluster's K1-K3 hold exactly as in the
    single-cluster problem.

    Raises
    ------
    InfeasibleError
        Naming the (0-based) cluster whose null space is empty or whose
        projected channels cannot satisfy K1.
    """
    clusters = list(clusters)
    if not clusters:
        raise ValueError("at least one cluster is required")
    antennas = clusters[0].antennas
    if any(c.antennas != antennas for c in clusters):
        raise ValueError("all clusters must have the same antenna count")
    if len(clusters) == 1:
        return [optimize_beam(clusters[0], grid=grid)]
    out = []
    for idx, cluster in enumerate(clusters):
        others = [h for j, c in enumerate(clusters) if j != idx for h in (c.h1, c.h2)]
        basis = null_space_basis(others, antennas)
        if basis.shape[1] == 0:
            raise InfeasibleError(
                f"cluster {idx}: {antennas} antennas cannot null {len(others)} other-cluster channels"
            )
        try:
            out.append(optimize_beam(cluster, basis, grid=grid))
        except InfeasibleError as exc:
            raise InfeasibleError(f"cluster {idx}: {exc}") from exc
    return out


def oma_power(cluster: Cluster, effective_subspace=None) -> float:
    """Time-averaged OMA power for the same per-user rates (see module notes)."""
    if effective_subspace is None:
        c1, c2 = cluster.h1, cluster.h2
    else:
        q = np.asarray(effective_subspace, dtype=complex)
        c1, c2 = q.conj().T @ cluster.h1, q.conj().T @ cluster.h2
    a1 = float(np.vdot(c1, c1).real)
    a2 = float(np.vdot(c2, c2).real)
    if a1 <= 0 or a2 <= 0:
        raise InfeasibleError("a user's channel vanishes in the beam subspace")
    snr1 = (1.0 + cluster.g1) ** 2 - 1.0
    snr2 = (1.0 + cluster.g2) ** 2 - 1.0
    return 0.5 * cluster.noise * (snr1 / a1 + snr2 / a2)


@dataclass(frozen=True)
class Fig3Row:
    antennas: int
    noma_mean_power: float
    oma_mean_power: float
    infeasible_rate: float
    feasible_trials: int


def _fig3_trial(spec: FadingSpec, trial: int, g1: float, g2: float, clusters: int, noise: float, grid: int):
    h = draw_channels(spec, trial)
    cl = [Cluster(h[2 * c], h[2 * c + 1], g1, g2, noise) for c in range(clusters)]
    sols = zf_multicluster(cl, grid=grid)
    oma = 0.0
    for idx, c in enumerate(cl):
        others = [v for j, o in enumerate(cl) if j != idx for v in (o.h1, o.h2)] if clusters > 1 else []
        oma += oma_power(c, null_space_basis(others, spec.antenna_count))
    return cl, sols, oma


def fig3_experiment(
    antenna_counts,
    trials: int,
    spec: FadingSpec,
    g1: float,
    g2: float,
    clusters: int = 3,
    noise: float = 1.0,
    grid: int = 4096,
    on_solution=None,
) -> list[Fig3Row]:
    """Mean total transmit power of NOMA and OMA versus antenna count.

    Users are taken from ``spec.user_distances`` in (strong, weak) pairs,
    so it must list ``2 * clusters`` distances. The channels for trial
    ``t`` are drawn with ``trial=t`` for every antenna count, so larger
    arrays extend the same realizations. Trials where any cluster is
    infeasible are excluded from both means and counted in
    ``infeasible_rate``.

    Raises
    ------
    InfeasibleError
        If some ``L < 2 * (clusters - 1) + 1``, where the zero-forcing null
        space is empty for every realization.

    ``on_solution(L, trial, clusters, solutions)`` is called for every
    feasible trial, in trial order.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if spec.users != 2 * clusters:
        raise ValueError(f"spec lists {spec.users} users; {clusters} clusters need {2 * clusters}")
    g1, g2 = float(g1), float(g2)
    antenna_counts = [int(a) for a in antenna_counts]
    nulled = 2 * (clusters - 1)
    for antennas in antenna_counts:
        if antennas < nulled + 1:
            raise InfeasibleError(
                f"L={antennas} antennas cannot null {nulled} other-cluster channels; need L >= {nulled + 1}"
            )
    rows = []
    for antennas in antenna_counts:
        s = spec.with_antennas(antennas)
        noma, oma = [], []
        for t in range(trials):
            try:
                cl, sols, oma_total = _fig3_trial(s, t, g1, g2, clusters, noise, grid)
            except InfeasibleError:
                continue
            noma.append(math.fsum(sol.total for sol in sols))
            oma.append(oma_total)
            if on_solution is not None:
                on_solution(antennas, t, cl, sols)
        n = len(noma)
        rows.append(
            Fig3Row(
                antennas,
                math.fsum(noma) / n if n else math.nan,
                math.fsum(oma) / n if n else math.nan,
                (trials - n) / trials,
                n,
            )
        )
    return rows
