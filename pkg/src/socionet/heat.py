"""Heat content of graph domains and heat content asymptotics (HCA).

A graph is split into one domain per connected component: the lowest-degree
nodes form the Dirichlet boundary (heat pinned to zero), the rest the
interior. The heat content q(s) = 1' exp(-s L) 1 uses the symmetric
normalised interior operator L = I - D^-1/2 A D^-1/2, with D the degree of
each interior node counted in the full component so heat leaks through
boundary neighbours.

Two evaluation routes are provided: a dense eigendecomposition (the oracle,
fine up to a few hundred interior nodes) and a lazy random walk that only
needs sparse mat-vecs. HCA coefficients are read off a sampled curve by
projecting onto an orthonormal polynomial basis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .graph import Graph

LAPLACIANS = ("dirichlet", "interior")
BASES = ("orthonormal", "monomial")


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    vectors: np.ndarray
    inverse: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.eigenvalues) @ self.inverse

    def reconstruction_error(self, operator: np.ndarray) -> float:
        return float(np.linalg.norm(self.reconstruct() - operator, 2))


@dataclass(frozen=True, eq=False)
class GraphDomain:
    """Interior/boundary split of one connected component.

    ``indptr``/``indices`` hold interior-to-interior adjacency over interior
    positions; ``domain_degree[i]`` counts every neighbour of interior node
    ``i`` in the component, boundary included.
    """

    interior: np.ndarray
    boundary: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    domain_degree: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(self.interior) == 0:
            raise ValueError("a domain needs a nonempty interior")
        if np.intersect1d(self.interior, self.boundary).size:
            raise ValueError("interior and boundary overlap")

    @property
    def size(self) -> int:
        return len(self.interior)

    @property
    def interior_degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def walk_operator(self, laplacian: str = "dirichlet"):
        """CSR adjacency and degree vector defining M = D^-1 A."""
        if laplacian == "dirichlet":
            return self.indptr, self.indices, self.domain_degree.astype(np.float64)
        if laplacian != "interior":
            raise ValueError(f"laplacian must be one of {LAPLACIANS}")
        # interior-only degrees; a node with no interior neighbour keeps its heat (self loop)
        deg = self.interior_degree
        lonely = deg == 0
        if not lonely.any():
            return self.indptr, self.indices, deg.astype(np.float64)
        n = self.size
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.where(lonely, 1, deg), out=indptr[1:])
        indices = np.empty(indptr[-1], dtype=np.int64)
        for i in range(n):
            if lonely[i]:
                indices[indptr[i]] = i
            else:
                indices[indptr[i] : indptr[i + 1]] = self.indices[self.indptr[i] : self.indptr[i + 1]]
        return indptr, indices, np.where(lonely, 1, deg).astype(np.float64)

    def operator(self, laplacian: str = "dirichlet") -> np.ndarray:
        """Dense symmetric normalised interior operator."""
        indptr, indices, deg = self.walk_operator(laplacian)
        n = self.size
        adj = np.zeros((n, n))
        rows = np.repeat(np.arange(n), np.diff(indptr))
        adj[rows, indices] = 1.0
        scale = 1.0 / np.sqrt(deg)
        return np.eye(n) - scale[:, None] * adj * scale[None, :]

    def spectral(self, laplacian: str = "dirichlet") -> SpectralDecomposition:
        key = ("spectral", laplacian)
        if key not in self._cache:
            values, vectors = np.linalg.eigh(self.operator(laplacian))
            self._cache[key] = SpectralDecomposition(values, vectors, vectors.T.copy())
        return self._cache[key]


def _boundary_size(n: int, fraction: float) -> int:
    return max(1, int(math.floor(fraction * n + 0.5)))


def make_domains(g: Graph, boundary_fraction: float = 0.02) -> list[GraphDomain]:
    """One domain per component; boundary = lowest-degree nodes (ties by id).

    Components too small to keep an interior are skipped.
    """
    if not 0.0 < boundary_fraction < 1.0:
        raise ValueError("boundary_fraction must lie in (0, 1)")
    if g.num_nodes == 0:
        return []
    labels = g.component_labels()
    deg = g.degrees()
    domains = []
    for c in range(int(labels.max()) + 1):
        members = np.flatnonzero(labels == c)  # positions, ascending id
        nb = _boundary_size(len(members), boundary_fraction)
        if nb >= len(members):
            continue
        order = members[np.lexsort((members, deg[members]))]
        boundary, interior = np.sort(order[:nb]), np.sort(order[nb:])
        local = np.full(g.num_nodes, -1, dtype=np.int64)
        local[interior] = np.arange(len(interior))
        indptr = [0]
        indices = []
        for p in interior:
            nbrs = local[g.indices[g.indptr[p] : g.indptr[p + 1]]]
            nbrs = np.sort(nbrs[nbrs >= 0])
            indices.extend(nbrs.tolist())
            indptr.append(len(indices))
        domains.append(
            GraphDomain(
                interior=g.node_ids[interior],
                boundary=g.node_ids[boundary],
                indptr=np.array(indptr, dtype=np.int64),
                indices=np.array(indices, dtype=np.int64),
                domain_degree=deg[interior].astype(np.int64),
            )
        )
    return domains


# ---------------------------------------------------------------------------
# heat content, exact and via lazy random walk
# ---------------------------------------------------------------------------

def exact_heat_curve(d: GraphDomain, s, laplacian: str = "dirichlet") -> np.ndarray:
    s = np.atleast_1d(np.asarray(s, dtype=np.float64))
    if np.any(s < 0):
        raise ValueError("diffusion time must be nonnegative")
    sd = d.spectral(laplacian)
    ones = np.ones(d.size)
    weights = (ones @ sd.vectors) * (sd.inverse @ ones)
    out = np.exp(-np.outer(s, sd.eigenvalues)) @ weights
    out[s == 0] = d.size  # heat is 1 on every interior node at s = 0
    return out


def exact_heat_content(d: GraphDomain, s: float, laplacian: str = "dirichlet") -> float:
    """Sum of the entries of exp(-s L) on the domain interior."""
    return float(exact_heat_curve(d, s, laplacian)[0])


@dataclass(frozen=True)
class HeatWalkConfig:
    """Lazy-walk step count ``k``; each evaluation point uses delta = s / k."""

    steps: int = 2000

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be a positive integer")

    @classmethod
    def for_range(cls, s_max: float, max_delta: float = 0.05, min_steps: int = 2000) -> "HeatWalkConfig":
        return cls(max(min_steps, math.ceil(s_max / max_delta)))

    def deltas(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=np.float64))
        if np.any(s < 0):
            raise ValueError("diffusion time must be nonnegative")
        deltas = s / self.steps
        if np.any(deltas > 1.0):
            raise ValueError(f"transition probability s/k = {deltas.max():.3g} exceeds 1; raise steps")
        return deltas


def approx_heat_curve(d: GraphDomain, s, cfg: HeatWalkConfig = HeatWalkConfig(),
                      laplacian: str = "dirichlet", flip: bool = False) -> np.ndarray:
    deltas = cfg.deltas(s)
    indptr, indices, deg = d.walk_operator(laplacian)
    return kernels.lazy_walk(indptr, indices, deg, deltas, cfg.steps, flip)


def approx_heat_content(d: GraphDomain, s: float, cfg: HeatWalkConfig = HeatWalkConfig(),
                        laplacian: str = "dirichlet", flip: bool = False) -> float:
    """sum_{v,w} (M_L)^k(v, w) sqrt(d_v / d_w).

    ``flip`` reads the walk in the transposed (column) convention, which puts
    the ratio the other way round: sum_{v,w} (M_L^T)^k(v, w) sqrt(d_w / d_v).
    """
    return float(approx_heat_curve(d, s, cfg, laplacian, flip)[0])


@dataclass(frozen=True)
class HeatCurveSamples:
    s: np.ndarray
    values: np.ndarray
    interior_count: int

    @property
    def s_max(self) -> float:
        return float(self.s[-1])

    @property
    def m(self) -> int:
        return len(self.s)


def heat_content_curve(g: Graph, s_max: float = 5.0, m: int = 101,
                       cfg: HeatWalkConfig | None = None, mode: str = "walk",
                       boundary_fraction: float = 0.02,
                       laplacian: str = "dirichlet") -> HeatCurveSamples:
    """Summed per-component heat content on a uniform grid, normalised by interior size."""
    if m < 3 or m % 2 == 0:
        raise ValueError("sample count must be odd and at least 3")
    if s_max <= 0:
        raise ValueError("s_max must be positive")
    if mode not in ("exact", "walk"):
        raise ValueError("mode must be 'exact' or 'walk'")
    domains = make_domains(g, boundary_fraction)
    if not domains:
        raise ValueError("no interior: graph has no component large enough for a domain")
    grid = np.linspace(0.0, s_max, m)
    if cfg is None:
        cfg = HeatWalkConfig.for_range(s_max)
    total = np.zeros(m)
    for d in domains:
        if mode == "exact":
            total += exact_heat_curve(d, grid, laplacian)
        else:
            total += approx_heat_curve(d, grid, cfg, laplacian)
    count = sum(d.size for d in domains)
    return HeatCurveSamples(grid, total / count, count)


# ---------------------------------------------------------------------------
# heat content asymptotics
# ---------------------------------------------------------------------------

def simpson_weights(m: int, s_max: float) -> np.ndarray:
    """Composite Simpson weights on ``m`` (odd) uniform points over [0, s_max]."""
    if m < 3 or m % 2 == 0:
        raise ValueError("Simpson's rule needs an odd number of points >= 3")
    h = s_max / (m - 1)
    w = np.full(m, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * h / 3.0


@lru_cache(maxsize=32)
def orthonormal_basis(s_max: float, m: int, n_coeffs: int) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal polynomial basis on the sample grid.

    Returns ``(coef, values)``. Row ``n`` of ``coef`` holds the coefficients
    (of s^0 .. s^{N-1}) of the degree-``n`` polynomial produced by Gram-Schmidt
    over 1, s, s^2, ... under the Simpson-weighted L2 inner product;
    ``values[:, n]`` is that polynomial on the grid.
    """
    grid = np.linspace(0.0, s_max, m)
    w = simpson_weights(m, s_max)
    x = grid / s_max  # orthogonalise in a unit-interval variable for conditioning
    vander = x[:, None] ** np.arange(n_coeffs)[None, :]
    coef = np.eye(n_coeffs)
    vals = vander.copy()
    for n in range(n_coeffs):
        for _ in range(2):  # re-orthogonalise once
            for j in range(n):
                proj = np.sum(w * vals[:, n] * vals[:, j])
                vals[:, n] -= proj * vals[:, j]
                coef[n] -= proj * coef[j]
        norm = math.sqrt(np.sum(w * vals[:, n] ** 2))
        vals[:, n] /= norm
        coef[n] /= norm
    # x^j = s^j / s_max^j
    coef = coef / (s_max ** np.arange(n_coeffs))[None, :]
    coef.setflags(write=False)
    vals.setflags(write=False)
    return coef, vals


@dataclass(frozen=True)
class HcaCoefficients:
    values: np.ndarray
    basis: str

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValueError(f"basis must be one of {BASES}")

    @property
    def N(self) -> int:
        return len(self.values)


def hca_estimate(samples: HeatCurveSamples, n_coeffs: int = 20, basis: str = "orthonormal") -> HcaCoefficients:
    """Project a sampled curve onto the first ``n_coeffs`` orthonormal polynomials.

    ``basis="orthonormal"`` returns the projection coefficients;
    ``basis="monomial"`` expands them into coefficients of s^0 .. s^{N-1}.
    """
    if n_coeffs < 1:
        raise ValueError("need at least one coefficient")
    if samples.m < 2 * n_coeffs + 1:
        raise ValueError(f"{samples.m} samples cannot resolve {n_coeffs} coefficients (need >= {2 * n_coeffs + 1})")
    if basis not in BASES:
        raise ValueError(f"basis must be one of {BASES}")
    coef, polys = orthonormal_basis(samples.s_max, samples.m, n_coeffs)
    w = simpson_weights(samples.m, samples.s_max)
    ortho = (w * samples.values) @ polys
    if basis == "orthonormal":
        return HcaCoefficients(ortho, basis)
    return HcaCoefficients(coef.T @ ortho, basis)


def hca_polynomial(h: HcaCoefficients, s) -> np.ndarray:
    """Evaluate the reconstructed curve from monomial coefficients."""
    if h.basis != "monomial":
        raise ValueError("evaluation needs monomial coefficients")
    return np.polynomial.polynomial.polyval(np.asarray(s, dtype=np.float64), h.values)


def d_hca(a: HcaCoefficients, b: HcaCoefficients) -> float:
    """Euclidean distance between two HCA coefficient vectors."""
    if a.basis != b.basis:
        raise ValueError(f"basis mismatch: {a.basis} vs {b.basis}")
    if a.N != b.N:
        raise ValueError(f"coefficient count mismatch: {a.N} vs {b.N}")
    return float(np.sqrt(np.sum((np.asarray(a.values) - np.asarray(b.values)) ** 2)))


def graph_hca(g: Graph, n_coeffs: int = 20, basis: str = "orthonormal", s_max: float = 5.0,
              m: int = 101, mode: str = "walk", cfg: HeatWalkConfig | None = None,
              boundary_fraction: float = 0.02, laplacian: str = "dirichlet") -> HcaCoefficients:
    samples = heat_content_curve(g, s_max, m, cfg, mode, boundary_fraction, laplacian)
    return hca_estimate(samples, n_coeffs, basis)
