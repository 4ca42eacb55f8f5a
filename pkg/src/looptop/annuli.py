"""Conformal geometry of annuli in the Riemann sphere.

A circle (or line, i.e. a circle through ∞) is the zero set of a
Hermitian form ``A|z|^2 + B z̄ + B̄ z + C``; the Möbius map ``M`` acts on
the coefficient matrix by ``H ↦ M^{-*} H M^{-1}``.  Two disjoint circles
span a coaxial pencil whose two point-circles (the limit points) are
found as roots of the real quadratic ``det(H1 - t H2) = 0``; sending them
to ``0`` and ``∞`` makes the circles concentric, and the modulus is
``log(r_out / r_in) / 2π``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

INF = complex(math.inf, 0.0)
TANGENCY_TOL = 1e-7


class DegenerateAnnulusError(ValueError):
    """Boundary circles intersect, touch, or are not separated enough."""


def is_infinite(z: complex) -> bool:
    return math.isinf(z.real) or math.isinf(z.imag)


@dataclass(frozen=True)
class Circle:
    """Either a finite circle (``center``, ``radius``) or a line (``point``, unit ``direction``)."""

    center: complex = 0j
    radius: float = 1.0
    is_line: bool = False
    point: complex = 0j
    direction: complex = 1 + 0j

    def __post_init__(self):
        if self.is_line:
            d = complex(self.direction)
            if abs(d) == 0:
                raise ValueError("line direction must be nonzero")
            d = d / abs(d)
            # canonical: direction in the half-plane Re > 0 (or pointing up)
            if d.real < 0 or (d.real == 0 and d.imag < 0):
                d = -d
            object.__setattr__(self, "direction", d)
            object.__setattr__(self, "point", complex(self.point))
        else:
            if not self.radius > 0:
                raise ValueError(f"radius must be positive, got {self.radius}")
            object.__setattr__(self, "center", complex(self.center))
            object.__setattr__(self, "radius", float(self.radius))

    @classmethod
    def line(cls, point: complex, direction: complex) -> "Circle":
        return cls(is_line=True, point=point, direction=direction)

    def hermitian(self) -> np.ndarray:
        if self.is_line:
            n = 1j * self.direction
            return np.array([[0, n / 2], [np.conj(n) / 2, -(np.conj(n) * self.point).real]], dtype=complex)
        c = self.center
        return np.array([[1, -c], [-np.conj(c), abs(c) ** 2 - self.radius ** 2]], dtype=complex)

    @classmethod
    def from_hermitian(cls, H: np.ndarray, rel_tol: float = 1e-14) -> "Circle":
        A, B, C = H[0, 0].real, H[0, 1], H[1, 1].real
        scale = abs(A) + abs(B) + abs(C)
        if abs(A) <= rel_tol * scale:
            if abs(B) == 0:
                raise ValueError("degenerate Hermitian form")
            n = 2 * B
            point = -C * n / (2 * abs(B) ** 2) if abs(B) else 0j
            return cls.line(point, n / 1j)
        c = -B / A
        r2 = abs(c) ** 2 - C / A
        if r2 <= 0:
            raise ValueError("Hermitian form has no real points")
        return cls(c, math.sqrt(r2))

    def sample(self, k: int = 8) -> list[complex]:
        if self.is_line:
            return [self.point + t * self.direction for t in np.linspace(-1, 1, k)]
        return [self.center + self.radius * cmath.exp(2j * math.pi * j / k) for j in range(k)]

    def residual(self, z: complex) -> float:
        """Distance-like residual of ``z`` from the circle."""
        if self.is_line:
            return abs(((z - self.point) * self.direction.conjugate()).imag)
        return abs(abs(z - self.center) - self.radius)

    def close_to(self, other: "Circle", tol: float) -> bool:
        if self.is_line != other.is_line:
            return False
        if self.is_line:
            return abs(self.direction - other.direction) < tol and other.residual(self.point) < tol
        return abs(self.center - other.center) < tol and abs(self.radius - other.radius) < tol


@dataclass(frozen=True)
class MoebiusMap:
    """``z ↦ (a z + b) / (c z + d)``, stored with ``ad - bc = 1``."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        det = complex(self.a) * complex(self.d) - complex(self.b) * complex(self.c)
        size = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        if size == 0 or abs(det) <= 1e-14 * size ** 2:
            raise ValueError("Möbius map is singular (ad - bc = 0)")
        s = cmath.sqrt(det)
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)) / s)

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def from_matrix(cls, m) -> "MoebiusMap":
        return cls(m[0][0], m[0][1], m[1][0], m[1][1])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def __call__(self, z: complex) -> complex:
        if is_infinite(z):
            return INF if self.c == 0 else self.a / self.c
        den = self.c * z + self.d
        if den == 0:
            return INF
        return (self.a * z + self.b) / den

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return MoebiusMap.from_matrix(self.matrix @ other.matrix)

    def condition_number(self) -> float:
        return float(np.linalg.cond(self.matrix))

    def derivative(self, z: complex) -> complex:
        return 1 / (self.c * z + self.d) ** 2

    def as_dict(self) -> dict:
        return {k: [getattr(self, k).real, getattr(self, k).imag] for k in "abcd"}


def apply_moebius(phi: MoebiusMap, x):
    """Image of a point or a :class:`Circle` (lines come back in line form)."""
    if isinstance(x, Circle):
        if not x.is_line:
            # closed form (ad - bc = 1); stays accurate for tiny image circles
            a, b, c, d = phi.a, phi.b, phi.c, phi.d
            z0, r = x.center, x.radius
            den = abs(c * z0 + d) ** 2 - abs(c) ** 2 * r ** 2
            if abs(den) > 1e-12 * (abs(c * z0 + d) ** 2 + abs(c) ** 2 * r ** 2):
                center = ((a * z0 + b) * (c * z0 + d).conjugate() - a * c.conjugate() * r ** 2) / den
                return Circle(center, r / abs(den))
        Minv = phi.inverse().matrix
        H = Minv.conj().T @ x.hermitian() @ Minv
        H = (H + H.conj().T) / 2
        return Circle.from_hermitian(H / np.abs(H).max())
    return phi(complex(x))


def circle_through(z1: complex, z2: complex, z3: complex, tol: float = 1e-12) -> Circle:
    """The circle (or line) through three distinct points; ``INF`` is allowed."""
    pts = [complex(z) for z in (z1, z2, z3)]
    finite = [z for z in pts if not is_infinite(z)]
    if len(finite) == 2:
        return Circle.line(finite[0], finite[1] - finite[0])
    a, b, c = finite
    cross = ((b - a).conjugate() * (c - a)).imag
    scale = max(abs(b - a), abs(c - a)) ** 2
    if abs(cross) <= tol * scale:
        return Circle.line(a, (b - a) if abs(b - a) else (c - a))
    # circumcenter
    d = 2 * cross
    ba, ca = b - a, c - a
    center = a - 1j * (abs(ba) ** 2 * ca - abs(ca) ** 2 * ba) / d
    return Circle(center, abs(center - a))


# -- annuli

@dataclass(frozen=True)
class Annulus:
    """Region between two disjoint circles of the Riemann sphere.

    ``outer`` bounds the disc ``D`` and ``inner`` the disc ``D'`` with
    ``closure(D') ⊂ D``.  For two nested planar circles ``D`` is the
    inside of ``outer``; for two separated circles ``D`` is the outside
    of ``outer`` (a disc through ∞ on the sphere).
    """

    outer: Circle
    inner: Circle

    def __post_init__(self):
        separation(self.outer, self.inner)

    @property
    def nested(self) -> bool:
        return _relation(self.outer, self.inner)[0] == "nested"


def _relation(c1: Circle, c2: Circle) -> tuple[str, float, float]:
    """(kind, signed gap, length scale) for a pair of circles."""
    if c1.is_line and c2.is_line:
        return "tangent", 0.0, 1.0
    if c1.is_line or c2.is_line:
        line, circ = (c1, c2) if c1.is_line else (c2, c1)
        dist = line.residual(circ.center)
        return "separated", dist - circ.radius, circ.radius
    d = abs(c1.center - c2.center)
    big = max(c1.radius, c2.radius)
    nested_gap = abs(c1.radius - c2.radius) - d
    separated_gap = d - c1.radius - c2.radius
    # at most one of the two gaps is positive; both negative means the circles cross
    if nested_gap >= separated_gap:
        return "nested", nested_gap, big
    return "separated", separated_gap, big


def separation(c1: Circle, c2: Circle, tol: float = TANGENCY_TOL) -> float:
    """Boundary gap of two disjoint circles; raises if they meet or (almost) touch."""
    kind, gap, scale = _relation(c1, c2)
    if kind == "tangent" or abs(gap) < tol * scale:
        raise DegenerateAnnulusError("boundary circles are tangent/degenerate")
    if gap < 0:
        raise DegenerateAnnulusError("boundary circles intersect; they do not bound an annulus")
    return gap


def limit_points(c1: Circle, c2: Circle) -> tuple[complex, complex]:
    """The two point-circles of the coaxial pencil spanned by ``c1`` and ``c2``."""
    H1, H2 = c1.hermitian(), c2.hermitian()
    H1, H2 = H1 / np.abs(H1).max(), H2 / np.abs(H2).max()
    A1, B1, C1 = H1[0, 0].real, H1[0, 1], H1[1, 1].real
    A2, B2, C2 = H2[0, 0].real, H2[0, 1], H2[1, 1].real
    # det(H1 - t H2) = a t^2 + b t + c
    a = A2 * C2 - abs(B2) ** 2
    b = -(A1 * C2 + A2 * C1) + 2 * (B1 * np.conj(B2)).real
    c = A1 * C1 - abs(B1) ** 2
    disc = b * b - 4 * a * c
    if disc <= 0:
        raise DegenerateAnnulusError("pencil limit points coincide (tangent circles)")
    q = -(b + math.copysign(math.sqrt(disc), b)) / 2
    roots = (q / a, c / q)
    return tuple(_point_of(H1 - t * H2) for t in roots)


def _point_of(H: np.ndarray) -> complex:
    # rank one: H ∝ [[1, -p], [-p̄, |p|^2]], or [[0, 0], [0, 1]] for p = ∞
    A, B, C = H[0, 0].real, H[0, 1], H[1, 1].real
    if abs(A) >= abs(C):
        return -B / A
    if abs(B) <= 1e-300 * abs(C):
        return INF
    return complex(-C / np.conj(B))


def _to_zero_infinity(p: complex, q: complex) -> MoebiusMap:
    if is_infinite(q):
        return MoebiusMap(1, -p, 0, 1)
    if is_infinite(p):
        return MoebiusMap(0, 1, 1, -q)
    # rows of (z - p) / (z - q) scaled to entries of size <= 1, so a far-away
    # limit point (nearly concentric circles) does not overflow
    sp, sq = max(1.0, abs(p)), max(1.0, abs(q))
    return MoebiusMap(1 / sp, -p / sp, 1 / sq, -q / sq)


def _mean_modulus(phi: MoebiusMap, circle: Circle) -> float:
    vals = [abs(phi(z)) for z in circle.sample(8)]
    return float(np.exp(np.mean(np.log(vals))))


def normalize(A: Annulus) -> tuple[MoebiusMap, float]:
    """Möbius map onto ``{1 ≤ |z| ≤ e^{2πR}}`` (inner → |z| = 1) and the modulus ``R``."""
    p, q = limit_points(A.outer, A.inner)
    phi = _to_zero_infinity(p, q)
    r_in, r_out = _mean_modulus(phi, A.inner), _mean_modulus(phi, A.outer)
    if r_in > r_out:
        phi = MoebiusMap(0, 1, 1, 0) @ phi
        r_in, r_out = 1 / r_in, 1 / r_out
    s = math.sqrt(r_in)
    phi = MoebiusMap(1 / s, 0, 0, s) @ phi
    return phi, math.log(r_out / r_in) / (2 * math.pi)


def modulus(A: Annulus) -> float:
    return normalize(A)[1]


def standard_annulus(R: float) -> Annulus:
    return Annulus(Circle(0, math.exp(2 * math.pi * R)), Circle(0, 1.0))


# -- foliations

@dataclass
class Foliations:
    radial: list[np.ndarray]
    circular: list[np.ndarray]
    phi: MoebiusMap
    R: float
    n_radial: int
    n_circular: int

    def crossings(self) -> list[tuple[int, int, complex]]:
        """(radial index, circular index, point on the standard annulus)."""
        rho = math.exp(2 * math.pi * self.R)
        return [(i, j, _circle_radius(rho, j, self.n_circular) * cmath.exp(2j * math.pi * i / self.n_radial))
                for i in range(self.n_radial) for j in range(self.n_circular)]


def _circle_radius(rho: float, j: int, n: int) -> float:
    return rho ** (j / (n - 1)) if n > 1 else 1.0


def canonical_foliations(A: Annulus, n_radial: int = 12, n_circular: int = 6, samples: int = 96) -> Foliations:
    """Push the radial segments and concentric circles of the standard annulus through ``φ^{-1}``.

    The circular family includes both boundary circles.  Points mapped to
    ∞ are stored as NaN, which breaks the polyline there.
    """
    if n_radial < 1 or n_circular < 2:
        raise ValueError("need n_radial >= 1 and n_circular >= 2")
    phi, R = normalize(A)
    inv = phi.inverse()
    rho = math.exp(2 * math.pi * R)

    def push(zs):
        out = np.array([inv(z) for z in zs], dtype=complex)
        out[~np.isfinite(out)] = complex(math.nan, math.nan)
        return out

    radial = []
    for i in range(n_radial):
        u = cmath.exp(2j * math.pi * i / n_radial)
        radial.append(push([u * math.exp(s) for s in np.linspace(0, math.log(rho), samples)]))
    circular = []
    for j in range(n_circular):
        r = _circle_radius(rho, j, n_circular)
        circular.append(push([r * cmath.exp(1j * t) for t in np.linspace(0, 2 * math.pi, samples + 1)]))
    return Foliations(radial, circular, phi, R, n_radial, n_circular)


def orthogonality_residuals(F: Foliations, h: float = 1e-5) -> np.ndarray:
    """``|cos angle|`` between the pushed-forward leaves at every crossing, by central differences."""
    inv = F.phi.inverse()
    out = []
    for _, _, z in F.crossings():
        u = z / abs(z)
        step = h * abs(z)
        t_rad = inv(z + step * u) - inv(z - step * u)
        t_circ = inv(z + step * 1j * u) - inv(z - step * 1j * u)
        out.append(abs((t_rad * t_circ.conjugate()).real) / (abs(t_rad) * abs(t_circ)))
    return np.array(out)


# -- SVG

def foliation_svg(F: Foliations, width: int = 480, height: int = 480, margin: int = 16) -> str:
    """Standalone SVG: stroke-only polylines in two classes, styles inline."""
    pts = np.concatenate([*F.radial, *F.circular])
    pts = pts[np.isfinite(pts)]
    xmin, xmax, ymin, ymax = pts.real.min(), pts.real.max(), pts.imag.min(), pts.imag.max()
    span = max(xmax - xmin, ymax - ymin) or 1.0
    s = min(width, height) - 2 * margin
    scale = s / span

    def xy(z):
        return margin + (z.real - xmin) * scale, height - margin - (z.imag - ymin) * scale

    def path(zs):
        parts, pen = [], False
        for z in zs:
            if not np.isfinite(z):
                pen = False
                continue
            x, y = xy(z)
            parts.append(f"{'L' if pen else 'M'}{x:.3f} {y:.3f}")
            pen = True
        return " ".join(parts)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        "<style>.radial{fill:none;stroke:#b03a2e;stroke-width:1}"
        ".circular{fill:none;stroke:#1f4e79;stroke-width:1}</style>",
    ]
    for zs in F.radial:
        lines.append(f'<path class="radial" d="{path(zs)}"/>')
    for zs in F.circular:
        lines.append(f'<path class="circular" d="{path(zs)}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def parse_circle(text: str) -> Circle:
    """``"cx,cy,r"`` for a circle or ``"line:px,py,dx,dy"`` for a line."""
    text = text.strip()
    try:
        if text.startswith("line:"):
            px, py, dx, dy = (float(v) for v in text[5:].split(","))
            return Circle.line(complex(px, py), complex(dx, dy))
        cx, cy, r = (float(v) for v in text.split(","))
    except ValueError:
        raise ValueError(f"cannot parse circle {text!r}; expected cx,cy,r") from None
    return Circle(complex(cx, cy), r)
