"""Compact sub-Riemannian model spaces.

Two concrete models are provided:

* the polarized Heisenberg group quotiented by its integer lattice, with
  group law (x,y,z)*(x',y',z') = (x+x', y+y', z+z'+x*y').  The adapted
  frame X1 = d/dx, X2 = d/dy + x d/dz, X3 = d/dz is declared orthonormal,
  which fixes the metric.  Functions on the quotient satisfy the twisted
  identifications f(x+1,y,z+y) = f(x,y,z), f(x,y+1,z) = f(x,y,z),
  f(x,y,z+1) = f(x,y,z).
* a degenerate flat 3-torus with H = span{d/dx, d/dy}, which is not
  bracket generating; it exists only as a negative test case.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .errors import DomainError, NotBracketGeneratingError, UnsupportedModelError

X, Y, Z = sp.symbols("x y z", real=True)
COORDS = (X, Y, Z)

# fixed sample points for pointwise span checks (include lattice corners
# and generic interior points so polynomial coefficients are exercised)
_SPAN_SAMPLE_POINTS = (
    (0.0, 0.0, 0.0),
    (0.5, 0.5, 0.5),
    (0.3, 0.7, 0.1),
    (0.9, 0.2, 0.6),
    (1.0 / 3.0, 2.0 / 3.0, 0.25),
)


@dataclass(frozen=True)
class Grid:
    """Uniform lattice over one fundamental domain, node order z-fastest."""

    nx: int
    ny: int
    nz: int

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 1:
            raise DomainError("grid dimensions must be positive")
        if self.nz % self.ny != 0:
            raise DomainError(
                f"grid.ny={self.ny} must divide grid.nz={self.nz} so the twisted "
                "x-wraparound z-shift lands on grid nodes"
            )

    @property
    def shape(self):
        return (self.nx, self.ny, self.nz)

    @property
    def node_count(self):
        return self.nx * self.ny * self.nz

    @property
    def spacings(self):
        return (1.0 / self.nx, 1.0 / self.ny, 1.0 / self.nz)

    @property
    def h_min(self):
        return min(self.spacings)

    @property
    def h_max(self):
        return max(self.spacings)

    def index(self, i, j, k):
        return (i * self.ny + j) * self.nz + k

    def node_coordinates(self):
        """Coordinate arrays (x, y, z), each of length node_count."""
        ii, jj, kk = np.meshgrid(
            np.arange(self.nx), np.arange(self.ny), np.arange(self.nz), indexing="ij"
        )
        return (
            (ii / self.nx).ravel(),
            (jj / self.ny).ravel(),
            (kk / self.nz).ravel(),
        )


@dataclass(frozen=True)
class GroupModel:
    """A compact model space described by its adapted frame and lattice.

    Frame fields are stored as coordinate-coefficient tuples of sympy
    expressions in (x, y, z); the frame is declared g-orthonormal.
    ``twisted_x_wrap`` records whether crossing the x-face of the
    fundamental domain shifts z by y (the Heisenberg identification).
    """

    name: str
    horizontal_frames: tuple
    vertical_frames: tuple
    mean_curvature_zeta: tuple = (sp.Integer(0), sp.Integer(0), sp.Integer(0))
    twisted_x_wrap: bool = True
    volume_density: float = 1.0

    @property
    def m(self):
        return len(self.horizontal_frames)

    @property
    def d(self):
        return len(self.vertical_frames)

    @property
    def dim(self):
        return self.m + self.d

    @property
    def frames(self):
        return tuple(self.horizontal_frames) + tuple(self.vertical_frames)

    def lattice_compose(self, g1, g2):
        """Group law restricted to the integer lattice."""
        a1, b1, c1 = g1
        a2, b2, c2 = g2
        if self.twisted_x_wrap:
            return (a1 + a2, b1 + b2, c1 + c2 + a1 * b2)
        return (a1 + a2, b1 + b2, c1 + c2)

    def lattice_action(self, gamma, point):
        """Left action of a lattice element on a point of the cover."""
        a, b, c = gamma
        x, y, z = point
        if self.twisted_x_wrap:
            return (a + x, b + y, c + z + a * y)
        return (a + x, b + y, c + z)

    def frame_coefficients(self, grid):
        """Frame coefficient values at all grid nodes, shape (dim, 3, N)."""
        x, y, z = grid.node_coordinates()
        out = np.zeros((self.dim, 3, grid.node_count))
        for a, frame in enumerate(self.frames):
            for c, expr in enumerate(frame):
                fn = sp.lambdify(COORDS, expr, "numpy")
                out[a, c] = np.broadcast_to(np.asarray(fn(x, y, z), dtype=float), x.shape)
        return out

    def max_horizontal_coefficient(self, grid):
        coeffs = self.frame_coefficients(grid)
        return float(np.abs(coeffs[: self.m]).max())

    def zeta_in_horizontal_span(self, points=_SPAN_SAMPLE_POINTS, tol=1e-10):
        """Check that zeta(p) lies in span{horizontal frames at p}."""
        for p in points:
            zeta = _eval_field(self.mean_curvature_zeta, p)
            basis = np.array([_eval_field(f, p) for f in self.horizontal_frames]).T
            coef, residual, _, _ = np.linalg.lstsq(basis, zeta, rcond=None)
            if np.linalg.norm(basis @ coef - zeta) > tol:
                return False
        return True


def _eval_field(frame, point):
    subs = dict(zip(COORDS, point))
    return np.array([float(sp.sympify(c).subs(subs)) for c in frame])


def _lie_bracket(a_coeffs, b_coeffs):
    """Coordinate coefficients of [A, B] for vector fields A, B."""
    out = []
    for c in range(3):
        term = sp.Integer(0)
        for e in range(3):
            term += a_coeffs[e] * sp.diff(b_coeffs[c], COORDS[e])
            term -= b_coeffs[e] * sp.diff(a_coeffs[c], COORDS[e])
        out.append(sp.expand(term))
    return tuple(out)


def frame_bracket_table(model: GroupModel) -> dict:
    """Exact symbolic expansion of all frame brackets in the full frame.

    Returns {(i, j): coefficients}, where coefficients[A] is the sympy
    expression <[e_i, e_j], e_A>.  Requires polynomial frame coefficients.
    """
    for frame in model.frames:
        for c in frame:
            if not sp.sympify(c).is_polynomial(*COORDS):
                raise UnsupportedModelError(
                    f"frame coefficient {c} is not polynomial in the coordinates"
                )
    frame_matrix = sp.Matrix([[sp.sympify(c) for c in f] for f in model.frames])
    table = {}
    n = model.dim
    for i in range(n):
        for j in range(n):
            bracket = _lie_bracket(model.frames[i], model.frames[j])
            sol = frame_matrix.T.LUsolve(sp.Matrix(bracket))
            table[(i, j)] = tuple(sp.expand(e) for e in sol)
    return table


def verify_bracket_generating(model: GroupModel, max_depth=6,
                              points=_SPAN_SAMPLE_POINTS) -> int:
    """Smallest r with H^(r) = TM at every sample point.

    Raises NotBracketGeneratingError when iterated brackets stagnate or
    max_depth is exceeded while the span is still deficient.
    """
    dim = model.dim

    def ranks(fields):
        out = []
        for p in points:
            mat = np.array([_eval_field(f, p) for f in fields])
            out.append(int(np.linalg.matrix_rank(mat, tol=1e-10)))
        return out

    level = [tuple(sp.sympify(c) for c in f) for f in model.horizontal_frames]
    fields = list(level)
    for depth in range(1, max_depth + 1):
        r = ranks(fields)
        if all(v == dim for v in r):
            return depth
        new = []
        for h in model.horizontal_frames:
            for f in level:
                b = _lie_bracket(h, f)
                if any(e != 0 for e in b):
                    new.append(b)
        if not new:
            raise NotBracketGeneratingError(
                f"iterated brackets stagnate at rank {max(r)} < {dim}",
                max_depth=depth, ranks=r,
            )
        level = new
        fields.extend(new)
    raise NotBracketGeneratingError(
        f"span still deficient at depth {max_depth}", max_depth=max_depth, ranks=ranks(fields)
    )


def eta_at(model: GroupModel, v, point) -> float:
    """Sum over 1 <= i <= j <= m of <[e_i, e_j](point), v>^2.

    ``v`` holds the components of a unit vertical vector in the vertical
    frame (the frame is orthonormal, so this is the g-norm).
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (model.d,):
        raise DomainError(f"v must have {model.d} vertical components")
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise DomainError("v must be a unit vertical vector (|v| = 1 within 1e-12)")
    table = frame_bracket_table(model)
    subs = dict(zip(COORDS, point))
    total = 0.0
    for i in range(model.m):
        for j in range(i, model.m):
            coeffs = table[(i, j)]
            pairing = 0.0
            for alpha in range(model.d):
                pairing += float(sp.sympify(coeffs[model.m + alpha]).subs(subs)) * v[alpha]
            total += pairing ** 2
    return total


def vertical_sphere_samples(d, count):
    """Deterministic sample set on the unit sphere of the vertical fibre."""
    if d == 1:
        return [np.array([1.0]), np.array([-1.0])]
    rng = np.random.default_rng(20240517)
    samples = []
    while len(samples) < count:
        v = rng.normal(size=d)
        n = np.linalg.norm(v)
        if n > 1e-8:
            samples.append(v / n)
    return samples


def eta_min(model: GroupModel, grid: Grid, sphere_samples=2) -> float:
    """Minimum of eta over grid nodes and sampled unit vertical vectors."""
    if model.d < 1:
        raise DomainError("model has no vertical distribution")
    table = frame_bracket_table(model)
    x, y, z = grid.node_coordinates()
    # vertical coefficient arrays of each horizontal bracket at all nodes
    pair_coeffs = []
    for i in range(model.m):
        for j in range(i, model.m):
            coeffs = table[(i, j)][model.m:]
            fns = [sp.lambdify(COORDS, c, "numpy") for c in coeffs]
            vals = np.stack(
                [np.broadcast_to(np.asarray(f(x, y, z), dtype=float), x.shape) for f in fns]
            )
            pair_coeffs.append(vals)  # shape (d, N)
    best = np.inf
    for v in vertical_sphere_samples(model.d, sphere_samples):
        eta = np.zeros(grid.node_count)
        for vals in pair_coeffs:
            eta += (v @ vals) ** 2
        best = min(best, float(eta.min()))
    return best


def heisenberg_model() -> GroupModel:
    zero, one = sp.Integer(0), sp.Integer(1)
    return GroupModel(
        name="heisenberg",
        horizontal_frames=((one, zero, zero), (zero, one, X)),
        vertical_frames=((zero, zero, one),),
        twisted_x_wrap=True,
    )


def torus_degenerate_model() -> GroupModel:
    """Flat 3-torus with H = span{d/dx, d/dy}; not bracket generating."""
    zero, one = sp.Integer(0), sp.Integer(1)
    return GroupModel(
        name="torus-degenerate",
        horizontal_frames=((one, zero, zero), (zero, one, zero)),
        vertical_frames=((zero, zero, one),),
        twisted_x_wrap=False,
    )


_MODELS = {
    "heisenberg": heisenberg_model,
    "torus-degenerate": torus_degenerate_model,
}


def get_model(name: str) -> GroupModel:
    try:
        return _MODELS[name]()
    except KeyError:
        raise UnsupportedModelError(
            f"unknown model {name!r}; available: {sorted(_MODELS)}"
        ) from None
