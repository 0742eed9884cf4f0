"""Domain shapes, metrics, and grids.

Everything downstream reduces to two geometric quantities: the inradius R
(largest distance from an interior point to the boundary) and the metric
diameter diam_d(U).  This module provides exact per-shape boundary distances
and projections, metrics equivalent to the Euclidean one, and the lattice
grids carrying interior / boundary / exterior-buffer node classes.

Boundary nodes are placed exactly ON the boundary (projections of lattice
points plus shape corners) so that measures supported on the boundary have
exact supports.  They carry the nominal cell weight h^n like every node, but
volume quadrature in the discretization module runs over interior and
exterior nodes only; boundary nodes serve geometry, sup-type seminorms and
transport.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "MetricSpec",
    "DomainShape",
    "Interval",
    "Rectangle",
    "Disk",
    "Polygon",
    "LShape",
    "make_shape",
    "DomainGrid",
    "build_grid",
    "distance_to_boundary",
    "inradius",
    "diameter",
    "InradiusResult",
    "DiameterResult",
]

INTERIOR, EXTERIOR, BOUNDARY = 0, 1, 2


# ---------------------------------------------------------------------------
# metrics

@dataclass(frozen=True)
class MetricSpec:
    """A distance on R^n equivalent to the Euclidean one.

    kind: 'euclidean', 'weighted_euclidean' (d = sqrt(z^T A z) for SPD A),
    or 'q_norm' (d = |z|_q, q >= 1).  equiv_lo/equiv_hi are the constants in
    equiv_lo*|x-y| <= d(x,y) <= equiv_hi*|x-y|; they are derived from the
    parameters at construction.

    Symmetry d(x,y) = d(y,x) is bitwise: every kind evaluates a function of
    z = x - y that is invariant under exact IEEE negation of z.
    """

    kind: str
    dim: int
    weight_matrix: Optional[np.ndarray] = None
    q: Optional[float] = None
    equiv_lo: float = field(default=1.0)
    equiv_hi: float = field(default=1.0)

    @staticmethod
    def euclidean(dim: int) -> "MetricSpec":
        return MetricSpec("euclidean", dim)

    @staticmethod
    def weighted(weight_matrix) -> "MetricSpec":
        A = np.asarray(weight_matrix, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("weight_matrix must be square")
        if not np.allclose(A, A.T, rtol=0, atol=1e-14 * max(1.0, float(np.abs(A).max()))):
            raise ValueError("weight_matrix must be symmetric")
        evals = np.linalg.eigvalsh(A)
        if evals[0] <= 0:
            raise ValueError("weight_matrix must be positive definite")
        return MetricSpec(
            "weighted_euclidean",
            A.shape[0],
            weight_matrix=A,
            equiv_lo=math.sqrt(float(evals[0])),
            equiv_hi=math.sqrt(float(evals[-1])),
        )

    @staticmethod
    def qnorm(q: float, dim: int) -> "MetricSpec":
        if q < 1:
            raise ValueError("q must be >= 1")
        # |z|_q vs |z|_2 on R^dim: for q <= 2, |z|_2 <= |z|_q <= n^(1/q-1/2)|z|_2;
        # for q >= 2 the inequalities reverse.
        c = dim ** (1.0 / q - 0.5)
        lo, hi = (1.0, c) if q <= 2 else (c, 1.0)
        return MetricSpec("q_norm", dim, q=float(q), equiv_lo=lo, equiv_hi=hi)

    # -- evaluation --------------------------------------------------------

    def _dz(self, z: np.ndarray) -> np.ndarray:
        if self.kind == "euclidean":
            return np.sqrt(np.sum(z * z, axis=-1))
        if self.kind == "weighted_euclidean":
            Az = z @ self.weight_matrix
            return np.sqrt(np.sum(z * Az, axis=-1))
        if self.kind == "q_norm":
            q = self.q
            if q == 1:
                return np.sum(np.abs(z), axis=-1)
            if math.isinf(q):
                return np.max(np.abs(z), axis=-1)
            return np.sum(np.abs(z) ** q, axis=-1) ** (1.0 / q)
        raise ValueError(f"unknown metric kind {self.kind!r}")

    def eval(self, x, y) -> float:
        """d(x, y) for single points."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        return float(self._dz(x - y))

    def pairwise(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """Matrix of d(X[i], Y[j])."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        return self._dz(X[:, None, :] - Y[None, :, :])

    def unit_ball_ratio(self) -> float:
        """max of d(z, 0) over Euclidean unit vectors z (used for disk diameters)."""
        return self.equiv_hi


def metric_eval(m: MetricSpec, x, y) -> float:
    return m.eval(x, y)


# ---------------------------------------------------------------------------
# shapes

class DomainShape:
    """Bounded domain with nonempty interior in R^n, n in {1, 2}.

    Subclasses provide exact (closed-form) boundary distance and projection;
    nothing in the package ever measures the boundary by sampling it.
    """

    kind: str
    dim: int

    def contains(self, P: np.ndarray) -> np.ndarray:
        """Strict membership in the open set."""
        raise NotImplementedError

    def boundary_distance(self, P: np.ndarray) -> np.ndarray:
        """Unsigned Euclidean distance to the boundary, valid inside and outside."""
        raise NotImplementedError

    def boundary_project(self, P: np.ndarray) -> np.ndarray:
        """A nearest boundary point for each input point (lex-smallest on ties)."""
        raise NotImplementedError

    @property
    def vertices(self) -> np.ndarray:
        """Corner points of the boundary (empty for the disk)."""
        raise NotImplementedError

    @property
    def area(self) -> float:
        raise NotImplementedError

    @property
    def bbox(self) -> tuple:
        """(lower corner, upper corner) as arrays."""
        raise NotImplementedError

    @property
    def inradius_exact(self) -> Optional[float]:
        """Closed-form inradius, or None when the shape admits none."""
        return None

    def diameter_exact(self, m: MetricSpec) -> float:
        """Exact diam_d of the closure under metric m.

        For polygonal shapes the maximum of a norm distance over the closure
        is attained at a pair of vertices; for the disk it is 2r times the
        largest metric norm of a Euclidean unit vector.
        """
        V = self.vertices
        D = m.pairwise(V, V)
        return float(D.max())


def _as_points(P, dim):
    P = np.asarray(P, dtype=float)
    if P.ndim == 1:
        P = P.reshape(-1, dim) if dim > 1 or P.size != 1 else P.reshape(1, 1)
    return P


class Interval(DomainShape):
    kind = "interval"
    dim = 1

    def __init__(self, a: float, b: float):
        if not b > a:
            raise ValueError("interval requires a < b")
        self.a, self.b = float(a), float(b)

    def contains(self, P):
        P = _as_points(P, 1)
        x = P[:, 0]
        return (x > self.a) & (x < self.b)

    def boundary_distance(self, P):
        P = _as_points(P, 1)
        x = P[:, 0]
        return np.minimum(np.abs(x - self.a), np.abs(x - self.b))

    def boundary_project(self, P):
        P = _as_points(P, 1)
        x = P[:, 0]
        # ties go to the left endpoint (lex-smallest)
        left = np.abs(x - self.a) <= np.abs(x - self.b)
        return np.where(left, self.a, self.b).reshape(-1, 1)

    @property
    def vertices(self):
        return np.array([[self.a], [self.b]])

    @property
    def area(self):
        return self.b - self.a

    @property
    def bbox(self):
        return np.array([self.a]), np.array([self.b])

    @property
    def inradius_exact(self):
        return 0.5 * (self.b - self.a)


class Rectangle(DomainShape):
    kind = "rectangle"
    dim = 2

    def __init__(self, x0, y0, x1, y1):
        if not (x1 > x0 and y1 > y0):
            raise ValueError("rectangle requires x0 < x1 and y0 < y1")
        self.x0, self.y0, self.x1, self.y1 = map(float, (x0, y0, x1, y1))

    def contains(self, P):
        P = _as_points(P, 2)
        return (P[:, 0] > self.x0) & (P[:, 0] < self.x1) & (P[:, 1] > self.y0) & (P[:, 1] < self.y1)

    def boundary_distance(self, P):
        P = _as_points(P, 2)
        x, y = P[:, 0], P[:, 1]
        inside = (x >= self.x0) & (x <= self.x1) & (y >= self.y0) & (y <= self.y1)
        d_in = np.minimum.reduce([x - self.x0, self.x1 - x, y - self.y0, self.y1 - y])
        dx = np.maximum(np.maximum(self.x0 - x, 0.0), np.maximum(x - self.x1, 0.0))
        dy = np.maximum(np.maximum(self.y0 - y, 0.0), np.maximum(y - self.y1, 0.0))
        d_out = np.hypot(dx, dy)
        return np.where(inside, np.abs(d_in), d_out)

    def boundary_project(self, P):
        return _polygon_project(P, self._segments())

    def _segments(self):
        V = self.vertices
        return np.stack([V, np.roll(V, -1, axis=0)], axis=1)

    @property
    def vertices(self):
        return np.array(
            [[self.x0, self.y0], [self.x1, self.y0], [self.x1, self.y1], [self.x0, self.y1]]
        )

    @property
    def area(self):
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    @property
    def bbox(self):
        return np.array([self.x0, self.y0]), np.array([self.x1, self.y1])

    @property
    def inradius_exact(self):
        return 0.5 * min(self.x1 - self.x0, self.y1 - self.y0)


class Disk(DomainShape):
    kind = "disk"
    dim = 2

    def __init__(self, cx, cy, r):
        if not r > 0:
            raise ValueError("disk requires r > 0")
        self.cx, self.cy, self.r = float(cx), float(cy), float(r)

    def contains(self, P):
        P = _as_points(P, 2)
        return np.hypot(P[:, 0] - self.cx, P[:, 1] - self.cy) < self.r

    def boundary_distance(self, P):
        P = _as_points(P, 2)
        return np.abs(np.hypot(P[:, 0] - self.cx, P[:, 1] - self.cy) - self.r)

    def boundary_project(self, P):
        P = _as_points(P, 2)
        z = P - np.array([self.cx, self.cy])
        nz = np.hypot(z[:, 0], z[:, 1])
        out = np.empty_like(P)
        deg = nz == 0.0
        safe = np.where(deg, 1.0, nz)
        out[:] = np.array([self.cx, self.cy]) + self.r * z / safe[:, None]
        # the center projects everywhere; pick a fixed representative
        out[deg] = np.array([self.cx + self.r, self.cy])
        return out

    @property
    def vertices(self):
        return np.empty((0, 2))

    @property
    def area(self):
        return math.pi * self.r**2

    @property
    def bbox(self):
        c = np.array([self.cx, self.cy])
        return c - self.r, c + self.r

    @property
    def inradius_exact(self):
        return self.r

    def diameter_exact(self, m: MetricSpec) -> float:
        return 2.0 * self.r * m.unit_ball_ratio()


def _polygon_project(P, segments):
    """Nearest point on a union of segments; lex-smallest on distance ties."""
    P = _as_points(P, 2)
    A = segments[:, 0]  # (k, 2)
    B = segments[:, 1]
    AB = B - A
    L2 = np.sum(AB * AB, axis=1)
    # t of the orthogonal projection, clamped to the segment
    AP = P[:, None, :] - A[None, :, :]  # (p, k, 2)
    t = np.clip(np.sum(AP * AB[None, :, :], axis=2) / L2[None, :], 0.0, 1.0)
    proj = A[None, :, :] + t[:, :, None] * AB[None, :, :]  # (p, k, 2)
    d = np.hypot(P[:, None, 0] - proj[:, :, 0], P[:, None, 1] - proj[:, :, 1])
    dmin = d.min(axis=1)
    out = np.empty_like(P)
    for i in range(P.shape[0]):
        cand = proj[i, d[i] == dmin[i]]
        j = np.lexsort((cand[:, 1], cand[:, 0]))[0]
        out[i] = cand[j]
    return out


def _segment_distance(P, segments):
    P = _as_points(P, 2)
    A, B = segments[:, 0], segments[:, 1]
    AB = B - A
    L2 = np.sum(AB * AB, axis=1)
    AP = P[:, None, :] - A[None, :, :]
    t = np.clip(np.sum(AP * AB[None, :, :], axis=2) / L2[None, :], 0.0, 1.0)
    proj = A[None, :, :] + t[:, :, None] * AB[None, :, :]
    d = np.hypot(P[:, None, 0] - proj[:, :, 0], P[:, None, 1] - proj[:, :, 1])
    return d.min(axis=1)


class Polygon(DomainShape):
    kind = "polygon"
    dim = 2

    def __init__(self, vertices):
        V = np.asarray(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 2 or V.shape[0] < 3:
            raise ValueError("polygon needs >= 3 planar vertices")
        if len(np.unique(V, axis=0)) != len(V):
            raise ValueError("polygon has repeated vertices")
        self._V = V
        if self._signed_area() == 0.0:
            raise ValueError("polygon is degenerate")
        if not self._is_simple():
            raise ValueError("polygon must be simple")

    def _signed_area(self):
        V = self._V
        x, y = V[:, 0], V[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def _is_simple(self):
        # O(k^2) proper-intersection test between non-adjacent edges
        S = self._segments()
        k = len(S)
        for i in range(k):
            for j in range(i + 2, k):
                if i == 0 and j == k - 1:
                    continue
                if _segments_cross(S[i], S[j]):
                    return False
        return True

    def _segments(self):
        V = self._V
        return np.stack([V, np.roll(V, -1, axis=0)], axis=1)

    def contains(self, P):
        P = _as_points(P, 2)
        on_b = self.boundary_distance(P) == 0.0
        V = self._V
        x, y = P[:, 0], P[:, 1]
        inside = np.zeros(len(P), dtype=bool)
        # even-odd ray casting; robust here because exact-boundary points were
        # already peeled off via the exact distance
        k = len(V)
        j = k - 1
        for i in range(k):
            xi, yi = V[i]
            xj, yj = V[j]
            straddles = (yi > y) != (yj > y)
            den = yj - yi if yj != yi else 1.0  # horizontal edges never straddle
            crosses = straddles & (x < (xj - xi) * (y - yi) / den + xi)
            inside ^= crosses
            j = i
        return inside & ~on_b

    def boundary_distance(self, P):
        return _segment_distance(P, self._segments())

    def boundary_project(self, P):
        return _polygon_project(P, self._segments())

    @property
    def vertices(self):
        return self._V.copy()

    @property
    def area(self):
        return abs(self._signed_area())

    @property
    def bbox(self):
        return self._V.min(axis=0), self._V.max(axis=0)


def _segments_cross(s1, s2):
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if v == 0 else (1 if v > 0 else -1)

    a, b = s1
    c, d = s2
    return (
        orient(a, b, c) != orient(a, b, d)
        and orient(c, d, a) != orient(c, d, b)
        and orient(a, b, c) != 0
        and orient(a, b, d) != 0
    )


class LShape(Polygon):
    """[x0, x0+a] x [y0, y0+a] with the open top-right quadrant removed.

    The inscribed ball sits on the diagonal, touching the two outer edges and
    the reentrant corner: radius a*(2 - sqrt(2))/2.
    """

    kind = "l_shape"

    def __init__(self, x0=0.0, y0=0.0, size=2.0):
        a = float(size)
        if a <= 0:
            raise ValueError("l_shape requires size > 0")
        x0, y0 = float(x0), float(y0)
        self.x0, self.y0, self.size = x0, y0, a
        super().__init__(
            [
                [x0, y0],
                [x0 + a, y0],
                [x0 + a, y0 + a / 2],
                [x0 + a / 2, y0 + a / 2],
                [x0 + a / 2, y0 + a],
                [x0, y0 + a],
            ]
        )

    @property
    def inradius_exact(self):
        return self.size * (2.0 - math.sqrt(2.0)) / 2.0


def make_shape(kind: str, **params) -> DomainShape:
    kinds = {
        "interval": Interval,
        "rectangle": Rectangle,
        "disk": Disk,
        "l_shape": LShape,
        "polygon": Polygon,
    }
    if kind not in kinds:
        raise ValueError(f"unknown shape kind {kind!r}")
    return kinds[kind](**params)


# ---------------------------------------------------------------------------
# grids

@dataclass(eq=False)
class DomainGrid:
    """Lattice discretization with interior / exterior-buffer / boundary nodes.

    nodes are ordered [interior, exterior, boundary], lexicographically
    within each class; every node carries weight h^dim.  The exterior buffer
    truncates the complement at Euclidean distance buffer_width from the
    boundary, and buffer_width is required to be at least diam_d(U).
    """

    shape: DomainShape
    h: float
    metric: MetricSpec
    buffer_width: float
    nodes: np.ndarray
    node_class: np.ndarray
    weight: np.ndarray
    n_interior: int
    n_exterior: int
    n_boundary: int

    @property
    def dim(self) -> int:
        return self.shape.dim

    @property
    def n_volume(self) -> int:
        """Interior plus exterior nodes: the volume-quadrature node count."""
        return self.n_interior + self.n_exterior

    @property
    def interior_nodes(self) -> np.ndarray:
        return self.nodes[: self.n_interior]

    @property
    def exterior_nodes(self) -> np.ndarray:
        return self.nodes[self.n_interior : self.n_volume]

    @property
    def boundary_nodes(self) -> np.ndarray:
        return self.nodes[self.n_volume :]

    @property
    def closure_nodes(self) -> np.ndarray:
        """Interior and boundary nodes (the discrete closure of U)."""
        return np.concatenate([self.interior_nodes, self.boundary_nodes], axis=0)


def _lex_sorted(P: np.ndarray) -> np.ndarray:
    if len(P) == 0:
        return P
    keys = tuple(P[:, k] for k in range(P.shape[1] - 1, -1, -1))
    return P[np.lexsort(keys)]


def build_grid(
    shape: DomainShape,
    h: float,
    metric: Optional[MetricSpec] = None,
    buffer_width: Optional[float] = None,
) -> DomainGrid:
    """Build the lattice grid at spacing h.

    The lattice is anchored at the lower bbox corner of the shape and extends
    buffer_width beyond the bbox; exterior nodes farther than buffer_width
    from the boundary are dropped.  Boundary nodes are the exact projections
    onto the boundary of all lattice points within h of it (from both sides),
    together with the shape's corner points, deduplicated and sorted.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    metric = metric if metric is not None else MetricSpec.euclidean(shape.dim)
    if metric.dim != shape.dim:
        raise ValueError("metric dimension does not match shape")
    diam = shape.diameter_exact(metric)
    W = diam if buffer_width is None else float(buffer_width)
    if W < diam * (1.0 - 1e-12):
        raise ValueError(f"buffer_width {W} is below diam_d(U) = {diam}")

    lo, hi = shape.bbox
    axes = []
    for k in range(shape.dim):
        i0 = math.floor(-(W + h) / h)
        i1 = math.ceil((hi[k] - lo[k] + W + h) / h)
        axes.append(lo[k] + h * np.arange(i0, i1 + 1))
    if shape.dim == 1:
        P = axes[0].reshape(-1, 1)
    else:
        gx, gy = np.meshgrid(axes[0], axes[1], indexing="ij")
        P = np.column_stack([gx.ravel(), gy.ravel()])

    dist = shape.boundary_distance(P)
    inside = shape.contains(P)
    on_b = dist == 0.0
    interior = _lex_sorted(P[inside & ~on_b])
    exterior = _lex_sorted(P[~inside & ~on_b & (dist <= W)])

    near = P[dist <= h]
    bpts = shape.boundary_project(near) if len(near) else np.empty((0, shape.dim))
    if len(shape.vertices):
        bpts = np.concatenate([bpts, shape.vertices], axis=0)
    bpts = np.unique(bpts, axis=0) if len(bpts) else bpts
    boundary = _lex_sorted(bpts)

    if len(interior) == 0:
        raise ValueError("grid has no interior nodes; decrease h")

    nodes = np.concatenate([interior, exterior, boundary], axis=0)
    node_class = np.concatenate(
        [
            np.full(len(interior), INTERIOR, dtype=np.int8),
            np.full(len(exterior), EXTERIOR, dtype=np.int8),
            np.full(len(boundary), BOUNDARY, dtype=np.int8),
        ]
    )
    weight = np.full(len(nodes), float(h) ** shape.dim)
    return DomainGrid(
        shape=shape,
        h=float(h),
        metric=metric,
        buffer_width=W,
        nodes=nodes,
        node_class=node_class,
        weight=weight,
        n_interior=len(interior),
        n_exterior=len(exterior),
        n_boundary=len(boundary),
    )


# ---------------------------------------------------------------------------
# the two geometric reductions

def distance_to_boundary(grid: DomainGrid, x) -> float:
    """Exact Euclidean distance from an interior node to the boundary."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    I = grid.interior_nodes
    if not np.any(np.all(I == x[None, :], axis=1)):
        raise ValueError(f"{x} is not an interior node")
    return float(grid.shape.boundary_distance(x.reshape(1, -1))[0])


@dataclass(frozen=True)
class InradiusResult:
    R: float
    incenter: np.ndarray
    R_exact: Optional[float]

    def __iter__(self):  # allow R, center = inradius(g)
        yield self.R
        yield self.incenter


@dataclass(frozen=True)
class DiameterResult:
    D: float
    pair: tuple

    def __iter__(self):
        yield self.D
        yield self.pair


def inradius(grid: DomainGrid) -> InradiusResult:
    """max over interior nodes of the exact distance to the boundary.

    Ties go to the lexicographically smallest node (interior nodes are stored
    lex-sorted, so the first argmax is that node).
    """
    if grid.n_interior == 0:
        raise ValueError("grid has no interior nodes")
    d = grid.shape.boundary_distance(grid.interior_nodes)
    i = int(np.argmax(d))
    return InradiusResult(float(d[i]), grid.interior_nodes[i].copy(), grid.shape.inradius_exact)


def diameter(grid: DomainGrid, m: Optional[MetricSpec] = None) -> DiameterResult:
    """max of d over node pairs of the closure of U.

    All supported metric kinds are norms, so the maximum over the closure is
    attained on boundary nodes and the scan is restricted to them.  Ties are
    broken by the lexicographically smallest (sorted) pair.
    """
    m = m if m is not None else grid.metric
    B = grid.boundary_nodes if grid.n_boundary >= 2 else grid.closure_nodes
    D = m.pairwise(B, B)
    np.fill_diagonal(D, -np.inf)
    dmax = float(D.max())
    # first row-major argmax over the sorted node list = lex-smallest pair
    i, j = np.unravel_index(int(np.argmax(D)), D.shape)
    if j < i:
        i, j = j, i
    return DiameterResult(dmax, (B[i].copy(), B[j].copy()))
