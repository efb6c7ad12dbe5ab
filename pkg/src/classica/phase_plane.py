"""Planar autonomous systems ``x' = F(x, y)``, ``y' = G(x, y)``.

Critical points, Jacobian linearization, the five-way classification of a
linear system by the roots of ``m**2 - (a1 + b2) m + (a1 b2 - a2 b1) = 0``,
RK4 paths and phase-portrait bundles.  Volterra's prey-predator model is
the main worked instance; its conserved quantity
``H = d x - c ln x + b y - a ln y`` gives an exact yardstick for path
accuracy.
"""

from __future__ import annotations

import cmath
import csv
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .integrators import NonFiniteStateError
from .series import BivariatePolynomial, as_scalar, is_exact, scalar_to_json

BLOW_UP = 1e12
DEDUP_TOL = 1e-8


class DegenerateSystemError(ValueError):
    """The linear system has ``a1 b2 - a2 b1 = 0`` (within tolerance)."""


class NotCriticalError(ValueError):
    """``linearize`` was asked to expand about a point where ``(F, G) != 0``."""


class Kind(enum.Enum):
    NODE_DISTINCT = "NodeDistinct"
    SADDLE = "Saddle"
    SPIRAL = "Spiral"
    NODE_EQUAL = "NodeEqual"
    CENTER = "Center"


@dataclass(frozen=True)
class LinearSystemCoeffs:
    """``x' = a1 x + b1 y``, ``y' = a2 x + b2 y``."""

    a1: object
    b1: object
    a2: object
    b2: object

    def __post_init__(self):
        for name in ("a1", "b1", "a2", "b2"):
            object.__setattr__(self, name, as_scalar(getattr(self, name)))

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.as_tuple())

    def as_tuple(self) -> tuple:
        return (self.a1, self.b1, self.a2, self.b2)

    @property
    def trace(self):
        return self.a1 + self.b2

    @property
    def det(self):
        return self.a1 * self.b2 - self.a2 * self.b1


@dataclass(frozen=True)
class AutonomousSystem2D:
    F: BivariatePolynomial
    G: BivariatePolynomial

    @classmethod
    def linear(cls, c: LinearSystemCoeffs) -> "AutonomousSystem2D":
        return cls(BivariatePolynomial({(1, 0): c.a1, (0, 1): c.b1}),
                   BivariatePolynomial({(1, 0): c.a2, (0, 1): c.b2}))

    @classmethod
    def from_json(cls, data) -> "AutonomousSystem2D":
        return cls(BivariatePolynomial.from_json(data["F"]), BivariatePolynomial.from_json(data["G"]))

    def to_json(self) -> dict:
        return {"F": self.F.to_json(), "G": self.G.to_json()}

    @property
    def exact(self) -> bool:
        return self.F.exact and self.G.exact

    def __call__(self, x, y):
        return self.F(x, y), self.G(x, y)

    def float_field(self):
        """Fast float evaluator ``(x, y) -> ndarray([F, G])``."""
        f_terms = [(i, j, float(c)) for i, j, c in self.F]
        g_terms = [(i, j, float(c)) for i, j, c in self.G]

        def field(x, y):
            fx = sum(c * x**i * y**j for i, j, c in f_terms)
            gy = sum(c * x**i * y**j for i, j, c in g_terms)
            return np.array([fx, gy])

        return field


@dataclass(frozen=True)
class CriticalPointReport:
    location: tuple
    m1: complex
    m2: complex
    kind: Kind
    margin: float
    caveat: bool = False  # linearization inconclusive (center / equal roots of a nonlinear field)

    def to_json(self) -> dict:
        return {
            "location": [scalar_to_json(v) for v in self.location],
            "m1": [self.m1.real, self.m1.imag],
            "m2": [self.m2.real, self.m2.imag],
            "kind": self.kind.value,
            "margin": float(self.margin),
            "caveat": self.caveat,
        }


def classify_linear(c: LinearSystemCoeffs, tol: float = 1e-9, location=(0, 0)) -> CriticalPointReport:
    """Classify the origin of a linear system.

    With rational coefficients every comparison is exact.  Otherwise the
    tolerance is scaled by the largest coefficient magnitude, so positively
    rescaling the field never changes the class.
    """
    tr, det = c.trace, c.det
    if c.exact:
        eps = Fraction(0)
    else:
        scale = max(abs(float(v)) for v in c.as_tuple()) or 1.0
        eps = tol * scale
        tr, det = float(tr), float(det)
    disc = tr * tr - 4 * det
    if abs(det) <= eps * eps if not c.exact else det == 0:
        raise DegenerateSystemError(f"a1*b2 - a2*b1 = {det} is (numerically) zero")
    sq = cmath.sqrt(float(disc))
    m1, m2 = (float(tr) + sq) / 2, (float(tr) - sq) / 2
    e2 = eps * eps
    if disc > e2:
        kind = Kind.NODE_DISTINCT if det > 0 else Kind.SADDLE
        margin = min(abs(disc), abs(det))
    elif disc >= -e2:
        kind = Kind.NODE_EQUAL
        margin = min(abs(disc), abs(det))
    else:
        kind = Kind.SPIRAL if abs(tr) > eps else Kind.CENTER
        margin = min(abs(disc), abs(tr), abs(det))
    return CriticalPointReport(tuple(location), complex(m1), complex(m2), kind, float(margin))


# -- critical points -----------------------------------------------------------

def _affine_parts(p: BivariatePolynomial):
    """``(k, cx, cy)`` with ``p = k + cx x + cy y``, or None if p is not affine."""
    if p.degree > 1:
        return None
    t = p.terms
    return t.get((0, 0), 0), t.get((1, 0), 0), t.get((0, 1), 0)


def _divide_out(p: BivariatePolynomial, var: str):
    """``p / x`` (or ``p / y``) if every term carries that factor, else None."""
    if var == "x":
        if any(i == 0 for i, _ in p.terms):
            return None
        return BivariatePolynomial({(i - 1, j): c for (i, j), c in p.terms.items()})
    if any(j == 0 for _, j in p.terms):
        return None
    return BivariatePolynomial({(i, j - 1): c for (i, j), c in p.terms.items()})


def _solve_affine_pair(p, q):
    """Common zeros of two affine functions (empty if parallel or identical lines)."""
    k1, a1, b1 = p
    k2, a2, b2 = q
    det = a1 * b2 - a2 * b1
    if det == 0:
        return []
    return [((-k1 * b2 + k2 * b1) / det, (-a1 * k2 + a2 * k1) / det)]


def _solve_affine_on_line(p, fixed: str, value):
    """Zeros of affine ``p`` restricted to ``x = value`` or ``y = value``."""
    k, cx, cy = p
    if fixed == "x":
        rest, coef = k + cx * value, cy
        return [] if coef == 0 else [(value, -rest / coef)]
    rest, coef = k + cy * value, cx
    return [] if coef == 0 else [(-rest / coef, value)]


def _closed_form_points(sys: AutonomousSystem2D):
    fa, ga = _affine_parts(sys.F), _affine_parts(sys.G)
    if fa is not None and ga is not None:
        pts = _solve_affine_pair(fa, ga)
        return pts if pts else None
    p, q = _divide_out(sys.F, "x"), _divide_out(sys.G, "y")
    if p is None or q is None:
        return None
    pa, qa = _affine_parts(p), _affine_parts(q)
    if pa is None or qa is None:
        return None
    zero = 0 * sys.F.terms[next(iter(sys.F.terms))]
    pts = [(zero, zero)]                      # x = 0 and y = 0
    pts += _solve_affine_on_line(qa, "x", zero)  # x = 0 and q = 0
    pts += _solve_affine_on_line(pa, "y", zero)  # p = 0 and y = 0
    pts += _solve_affine_pair(pa, qa)            # p = 0 and q = 0
    return pts


def _dedup(points):
    out = []
    for pt in points:
        if all(math.hypot(float(pt[0]) - float(q[0]), float(pt[1]) - float(q[1])) > DEDUP_TOL
               for q in out):
            out.append(pt)
    return out


def _in_box(pt, box) -> bool:
    x0, x1, y0, y1 = box
    return x0 <= pt[0] <= x1 and y0 <= pt[1] <= y1


def _newton_points(sys: AutonomousSystem2D, box, seeds_per_axis: int = 9, tol: float = 1e-12):
    fx, fy = sys.F.partial_x(), sys.F.partial_y()
    gx, gy = sys.G.partial_x(), sys.G.partial_y()
    f = sys.float_field()
    x0, x1, y0, y1 = (float(v) for v in box)
    found = []
    for sx in np.linspace(x0, x1, seeds_per_axis):
        for sy in np.linspace(y0, y1, seeds_per_axis):
            z = np.array([sx, sy])
            r = f(*z)
            for _ in range(100):
                nr = float(np.hypot(*r))
                if nr <= tol:
                    break
                jac = np.array([[float(fx(*z)), float(fy(*z))], [float(gx(*z)), float(gy(*z))]])
                try:
                    dz = np.linalg.solve(jac, -r)
                except np.linalg.LinAlgError:
                    break
                lam = 1.0
                while lam > 1e-6:
                    cand = z + lam * dz
                    rc = f(*cand)
                    if np.all(np.isfinite(rc)) and float(np.hypot(*rc)) < nr:
                        break
                    lam /= 2
                else:
                    break
                z, r = cand, rc
            if float(np.hypot(*r)) <= tol * 1e4:
                found.append((float(z[0]), float(z[1])))
    return found


def find_critical_points(sys: AutonomousSystem2D, box: Sequence, tol: float = 1e-8) -> list[tuple]:
    """Zeros of ``(F, G)`` inside ``box = (x0, x1, y0, y1)``, sorted by ``(x, y)``.

    Affine fields and fields of the form ``x p``, ``y q`` with affine ``p``,
    ``q`` are solved in closed form (exactly for rational coefficients).
    Anything else goes through damped Newton iteration from a grid of seeds.
    """
    pts = _closed_form_points(sys)
    if pts is None:
        pts = [p for p in _newton_points(sys, box)
               if max(abs(float(v)) for v in sys(*p)) <= tol]
    pts = [p for p in pts if _in_box(p, box)]
    return sorted(_dedup(pts), key=lambda p: (float(p[0]), float(p[1])))


def linearize(sys: AutonomousSystem2D, point: tuple, tol: float = 1e-8) -> LinearSystemCoeffs:
    """Jacobian of ``(F, G)`` at a critical point, from exact polynomial partials."""
    x, y = point
    fval, gval = sys(x, y)
    if abs(fval) > tol or abs(gval) > tol:
        raise NotCriticalError(f"({x}, {y}) is not a critical point: F={fval}, G={gval}")
    return LinearSystemCoeffs(sys.F.partial_x()(x, y), sys.F.partial_y()(x, y),
                              sys.G.partial_x()(x, y), sys.G.partial_y()(x, y))


def classify_point(sys: AutonomousSystem2D, point: tuple, tol: float = 1e-9) -> CriticalPointReport:
    """Class of the linearization, flagged when the field is nonlinear and the
    linear class (center, equal roots) is not decisive."""
    rep = classify_linear(linearize(sys, point), tol, location=point)
    nonlinear = sys.F.degree > 1 or sys.G.degree > 1
    if nonlinear and rep.kind in (Kind.CENTER, Kind.NODE_EQUAL):
        rep = CriticalPointReport(rep.location, rep.m1, rep.m2, rep.kind, rep.margin, True)
    return rep


# -- paths -----------------------------------------------------------------------

class Path(NamedTuple):
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    blew_up: bool


def integrate_path(sys: AutonomousSystem2D, start: tuple, dt: float, t_end: float,
                   backward: bool = False) -> Path:
    """RK4 path from ``start`` over ``[0, t_end]`` (or ``[0, -t_end]`` backward).

    Stops early, with ``blew_up`` set, once the state norm exceeds 1e12.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    field = sys.float_field()
    n = int(round(t_end / dt))
    h = (t_end / n if n else dt) * (-1.0 if backward else 1.0)
    z = np.array([float(start[0]), float(start[1])])
    out = np.empty((n + 1, 2))
    out[0] = z
    blew_up = False
    last = n
    for k in range(n):
        k1 = field(*z)
        k2 = field(*(z + h / 2 * k1))
        k3 = field(*(z + h / 2 * k2))
        k4 = field(*(z + h * k3))
        z = z + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(z)):
            if np.any(np.isinf(z)):
                blew_up, last = True, k
                break
            raise NonFiniteStateError(f"non-finite state at t={(k + 1) * h!r}")
        out[k + 1] = z
        if float(np.hypot(*z)) > BLOW_UP:
            blew_up, last = True, k + 1
            break
    ts = h * np.arange(last + 1)
    return Path(ts, out[: last + 1, 0].copy(), out[: last + 1, 1].copy(), blew_up)


def volterra_system(a=1, b=1, c=1, d=1) -> AutonomousSystem2D:
    """Prey-predator field ``x' = a x - b x y``, ``y' = -c y + d x y``."""
    return AutonomousSystem2D(BivariatePolynomial({(1, 0): a, (1, 1): -b}),
                              BivariatePolynomial({(0, 1): -c, (1, 1): d}))


def volterra_H(params: Sequence, x, y):
    a, b, c, d = (float(v) for v in params)
    return d * x - c * np.log(x) + b * y - a * np.log(y)


def volterra_invariant(params: Sequence, path: Path) -> float:
    """Largest ``|H - H(start)|`` along the path."""
    if np.any(path.x <= 0) or np.any(path.y <= 0):
        raise ValueError("path leaves the open first quadrant")
    h = volterra_H(params, path.x, path.y)
    return float(np.max(np.abs(h - h[0])))


# -- portraits -----------------------------------------------------------------

class PortraitPath(NamedTuple):
    seed_id: int
    direction: str  # "forward" or "backward"
    path: Path


@dataclass(frozen=True)
class PortraitBundle:
    reports: tuple
    paths: tuple

    def to_csv(self, filename) -> None:
        with open(filename, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["seed_id", "direction", "t", "x", "y"])
            for pp in self.paths:
                for t, x, y in zip(pp.path.t, pp.path.x, pp.path.y):
                    w.writerow([pp.seed_id, pp.direction, format(t, ".17g"),
                                format(x, ".17g"), format(y, ".17g")])

    def reports_json(self) -> list:
        return [r.to_json() for r in self.reports]


def seed_grid(box: Sequence, n: int) -> list[tuple[float, float]]:
    """``n x n`` seeds on the closed box, row-major in ``x`` then ``y``."""
    if n <= 0:
        return []
    x0, x1, y0, y1 = (float(v) for v in box)
    xs = np.linspace(x0, x1, n) if n > 1 else np.array([(x0 + x1) / 2])
    ys = np.linspace(y0, y1, n) if n > 1 else np.array([(y0 + y1) / 2])
    return [(float(x), float(y)) for x in xs for y in ys]


def phase_portrait(sys: AutonomousSystem2D, box: Sequence, seeds: int, dt: float, t_end: float,
                   search_box: Sequence | None = None, tol: float = 1e-9) -> PortraitBundle:
    """Critical-point reports plus forward and backward paths from a seed grid.

    Critical points are searched in ``search_box``, which defaults to the
    seed box widened by its own size on every side.
    """
    if search_box is None:
        x0, x1, y0, y1 = (float(v) for v in box)
        wx, wy = max(x1 - x0, 1.0), max(y1 - y0, 1.0)
        search_box = (x0 - wx, x1 + wx, y0 - wy, y1 + wy)
    reports = []
    for pt in find_critical_points(sys, search_box):
        try:
            reports.append(classify_point(sys, pt, tol))
        except DegenerateSystemError:
            continue
    paths = []
    for k, s in enumerate(seed_grid(box, seeds)):
        paths.append(PortraitPath(k, "forward", integrate_path(sys, s, dt, t_end)))
        paths.append(PortraitPath(k, "backward", integrate_path(sys, s, dt, t_end, backward=True)))
    return PortraitBundle(tuple(reports), tuple(paths))
