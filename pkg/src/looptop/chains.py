"""Finite free chain complexes: homology, reduced quotients, verifiers, filtrations.

Boundary matrices are numpy arrays of dtype ``object`` holding exact ring
elements (Python ints, Fractions or F_p residues).  ``∂_k : C_k → C_{k-1}``
is stored with rows indexed by the generators of ``C_{k-1}``.

Sign conventions used by the verifiers:

* chain map of degree ``d``:   ``∂ F = (-1)^d F ∂``
* homotopy ``H`` of degree ``d+1`` between ``F`` and ``G``:  ``∂H + H∂ = F - G``
* commutator of ``Γ`` of degree ``g``:  ``[∂, Γ] = ∂Γ - (-1)^g Γ∂``
* tensor differential:  ``∂(x⊗y) = ∂x⊗y + (-1)^|x| x⊗∂y``
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .identities import IdentityReport, Violation
from .rings import ZZ, Ring, ring_from_name
from .snf import rank, smith_normal_form


class ChainComplexError(ValueError):
    pass


class FiltrationError(ValueError):
    pass


class NotUnitError(ValueError):
    pass


def _coerce_matrix(m, rows: int, cols: int, ring: Ring) -> np.ndarray:
    arr = np.zeros((rows, cols), dtype=object)
    if m is None:
        return _reduce(arr, ring)
    m = [list(r) for r in m]
    if rows == 0 or cols == 0:
        if any(len(r) for r in m) or (len(m) not in (0, rows)):
            raise ChainComplexError(f"expected a {rows}x{cols} matrix")
        return _reduce(arr, ring)
    if len(m) != rows or any(len(r) != cols for r in m):
        got = f"{len(m)}x{len(m[0]) if m else 0}"
        raise ChainComplexError(f"expected a {rows}x{cols} matrix, got {got}")
    for i, row in enumerate(m):
        for j, x in enumerate(row):
            arr[i, j] = ring.coerce(x)
    return arr


def _reduce(arr: np.ndarray, ring: Ring) -> np.ndarray:
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = ring.coerce(x)
    return out


def _mul(a: np.ndarray, b: np.ndarray, ring: Ring) -> np.ndarray:
    return _reduce(a.dot(b) if a.size and b.size else np.zeros((a.shape[0], b.shape[1]), dtype=object), ring)


class ChainComplex:
    """Finite free complex; ``∂∘∂ = 0`` is checked at construction."""

    def __init__(self, generators: Mapping[int, Sequence[str]], boundaries: Mapping[int, object] | None = None,
                 ring: Ring = ZZ):
        self.ring = ring
        self.generators = {int(k): tuple(v) for k, v in sorted(generators.items())}
        names = [g for gs in self.generators.values() for g in gs]
        if len(set(names)) != len(names):
            raise ChainComplexError("generator names must be unique")
        self._where = {g: (k, i) for k, gs in self.generators.items() for i, g in enumerate(gs)}
        boundaries = dict(boundaries or {})
        for k in boundaries:
            if int(k) not in self.generators and int(k) - 1 not in self.generators:
                raise ChainComplexError(f"boundary in degree {k} has no generators on either side")
        self._d: dict[int, np.ndarray] = {}
        for k in self.generators:
            m = boundaries.get(k)
            arr = _coerce_matrix(m, self.dim(k - 1), self.dim(k), ring)
            if arr.size and any(x != 0 for x in arr.flat):
                if not self.dim(k - 1):
                    raise ChainComplexError(f"nonzero boundary out of degree {k} into an empty degree")
            self._d[k] = arr
        for k in self.generators:
            sq = _mul(self.boundary(k - 1), self.boundary(k), ring)
            if any(x != 0 for x in sq.flat):
                raise ChainComplexError(f"∂∘∂ != 0 from degree {k}")

    # -- structure
    @property
    def degrees(self) -> list[int]:
        return list(self.generators)

    def dim(self, k: int) -> int:
        return len(self.generators.get(k, ()))

    def boundary(self, k: int) -> np.ndarray:
        """Matrix of ``∂_k : C_k → C_{k-1}``."""
        if k in self._d:
            return self._d[k].copy()
        return np.zeros((self.dim(k - 1), self.dim(k)), dtype=object)

    def locate(self, name: str) -> tuple[int, int]:
        try:
            return self._where[name]
        except KeyError:
            raise KeyError(f"no generator named {name!r}") from None

    @property
    def size(self) -> int:
        return len(self._where)

    def change_ring(self, ring: Ring) -> "ChainComplex":
        if ring == self.ring:
            return self
        return ChainComplex(self.generators, {k: m.tolist() for k, m in self._d.items()}, ring)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return (self.ring == other.ring and self.generators == other.generators
                and all((self.boundary(k) == other.boundary(k)).all() for k in self.generators))

    def __repr__(self) -> str:
        dims = ", ".join(f"{k}:{self.dim(k)}" for k in self.generators)
        return f"ChainComplex({{{dims}}}, ring={self.ring})"

    # -- serialization
    def to_dict(self, filtration: Mapping[str, float] | None = None) -> dict:
        def gen(name):
            d = {"name": name}
            if filtration is not None:
                d["filtration"] = filtration[name]
            return d

        return {
            "ring": self.ring.name,
            "degrees": [{"degree": k, "generators": [gen(g) for g in gs]} for k, gs in self.generators.items()],
            "boundaries": [
                {"degree": k, "matrix": [[_json_entry(x) for x in row] for row in self._d[k].tolist()]}
                for k in self.generators if self._d[k].size and any(x != 0 for x in self._d[k].flat)
            ],
        }


def _json_entry(x):
    if isinstance(x, int):
        return x
    return x.numerator if x.denominator == 1 else str(x)


def complex_from_dict(data: Mapping, ring: Ring | None = None) -> tuple[ChainComplex, dict[str, float] | None]:
    """Parse the JSON complex format; returns the complex and filtration values if every generator has one."""
    try:
        if ring is None:
            ring = ring_from_name(data.get("ring", "Z"))
        gens, filt = {}, {}
        for entry in data["degrees"]:
            k = int(entry["degree"])
            if k in gens:
                raise ChainComplexError(f"degree {k} listed twice")
            gens[k] = []
            for g in entry["generators"]:
                name = g["name"] if isinstance(g, Mapping) else str(g)
                gens[k].append(name)
                if isinstance(g, Mapping) and g.get("filtration") is not None:
                    filt[name] = float(g["filtration"])
        bounds = {}
        for b in data.get("boundaries", []):
            k = int(b["degree"])
            if k in bounds:
                raise ChainComplexError(f"boundary of degree {k} listed twice")
            bounds[k] = b["matrix"]
    except (KeyError, TypeError) as exc:
        raise ChainComplexError(f"malformed complex: {exc!r}") from None
    C = ChainComplex(gens, bounds, ring)
    if filt and len(filt) != C.size:
        raise ChainComplexError("filtration given for some generators but not all")
    return C, (filt or None)


def load_complex(path: str, ring: Ring | None = None):
    with open(path) as fh:
        return complex_from_dict(json.load(fh), ring)


# -- homology

@dataclass(frozen=True)
class HomologyGroup:
    """``R^rank ⊕ ⨁ Z/t`` over the integers; ``torsion`` is empty over a field."""

    rank: int
    torsion: tuple[int, ...] = ()
    ring: str = "Z"

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = []
        if self.rank:
            parts.append(self.ring if self.rank == 1 else f"{self.ring}^{self.rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " ⊕ ".join(parts) if parts else "0"

    def as_dict(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}


def _as_int_rows(m: np.ndarray) -> list[list[int]]:
    return [[int(x) for x in row] for row in m.tolist()]


def homology(C: ChainComplex, ring: Ring | None = None) -> dict[int, HomologyGroup]:
    """Homology in every degree that carries generators."""
    ring = ring or C.ring
    C = C.change_ring(ring)
    out = {}
    integral = ring.characteristic == 0 and not ring.is_field
    for k in C.degrees:
        d_out, d_in = C.boundary(k), C.boundary(k + 1)
        if integral:
            r_out = smith_normal_form(_as_int_rows(d_out), *d_out.shape).rank
            snf_in = smith_normal_form(_as_int_rows(d_in), *d_in.shape)
            torsion = tuple(t for t in snf_in.invariant_factors if t > 1)
            out[k] = HomologyGroup(C.dim(k) - r_out - snf_in.rank, torsion, ring.name)
        else:
            out[k] = HomologyGroup(C.dim(k) - rank(d_out.tolist(), ring) - rank(d_in.tolist(), ring), (), ring.name)
    return out


def format_homology(h: Mapping[int, HomologyGroup]) -> str:
    return "\n".join(f"H_{k} = {g}" for k, g in sorted(h.items()))


# -- reduced complex

@dataclass(frozen=True)
class DistinguishedPoint:
    """The basepoint generator ``q0`` and the Euler characteristic ``χ``."""

    name: str
    euler_characteristic: int


def _check_point(C: ChainComplex, dp: DistinguishedPoint) -> tuple[int, int]:
    k, i = C.locate(dp.name)
    if any(x != 0 for x in C.boundary(k)[:, i]):
        raise ChainComplexError(f"{dp.name} is not a cycle")
    return k, i


def reduced_complex(C: ChainComplex, dp: DistinguishedPoint) -> ChainComplex:
    """A free model of ``C / R·χq0``.

    If ``χ`` vanishes in the ring the complex is returned unchanged; if it
    is a unit, ``q0`` is dropped.  Otherwise (integers, ``|χ| > 1``) the
    quotient has torsion and is modeled by the mapping cone of
    ``R → C, 1 ↦ χq0``: one extra generator in degree ``|q0| + 1`` with
    boundary ``χq0``.  Since ``R·χq0`` is free, the cone is
    quasi-isomorphic to the quotient.
    """
    k0, i0 = _check_point(C, dp)
    chi = C.ring.coerce(dp.euler_characteristic)
    if chi == 0:
        return C
    gens = {k: list(v) for k, v in C.generators.items()}
    bounds = {k: C.boundary(k) for k in C.degrees}
    if C.ring.is_unit(chi):
        gens[k0].pop(i0)
        bounds[k0] = np.delete(bounds[k0], i0, axis=1)
        if k0 + 1 in bounds:
            bounds[k0 + 1] = np.delete(bounds[k0 + 1], i0, axis=0)
        return ChainComplex(gens, {k: m.tolist() for k, m in bounds.items()}, C.ring)
    cone = f"cone({dp.name})"
    gens.setdefault(k0 + 1, []).append(cone)
    col = np.zeros((C.dim(k0), 1), dtype=object)
    col[i0, 0] = chi
    bounds[k0 + 1] = np.hstack([C.boundary(k0 + 1), col])
    if k0 + 2 in bounds:
        bounds[k0 + 2] = np.vstack([bounds[k0 + 2], np.zeros((1, C.dim(k0 + 2)), dtype=object)])
    return ChainComplex(gens, {k: m.tolist() for k, m in bounds.items()}, C.ring)


def _injectivity(C: ChainComplex, k0: int, i0: int, chi) -> bool:
    """Whether ``χ·H0(pt) → H(C)`` is injective, i.e. ``χ[q0]`` has infinite order (or χ = 0)."""
    if chi == 0:
        return True
    ring = C.ring if C.ring.is_field else ring_from_name("Q")
    B = C.boundary(k0 + 1)
    e = np.zeros((C.dim(k0), 1), dtype=object)
    e[i0, 0] = 1
    return rank(np.hstack([B, e]).tolist(), ring) > rank(B.tolist(), ring)


@dataclass
class ReducedComparison:
    hypothesis_holds: bool
    equal: bool | None
    reduced: dict[int, HomologyGroup]
    quotient: dict[int, HomologyGroup]
    note: str = ""

    @property
    def ok(self) -> bool:
        return bool(self.hypothesis_holds and self.equal)

    def as_dict(self) -> dict:
        return {
            "hypothesis_holds": self.hypothesis_holds,
            "equal": self.equal,
            "reduced": {str(k): g.as_dict() for k, g in sorted(self.reduced.items())},
            "quotient": {str(k): g.as_dict() for k, g in sorted(self.quotient.items())},
            "note": self.note,
        }


def quotient_homology(C: ChainComplex, dp: DistinguishedPoint) -> dict[int, HomologyGroup]:
    """``H(C) / χ·[q0]`` computed directly from cycles and boundaries.

    In the degree of ``q0`` this presents ``Z / (B + R·χq0)`` over a kernel
    basis; the other degrees are ``H(C)``.
    """
    k0, i0 = _check_point(C, dp)
    ring = C.ring
    chi = ring.coerce(dp.euler_characteristic)
    out = homology(C)
    B = C.boundary(k0 + 1)
    extra = np.zeros((C.dim(k0), 1), dtype=object)
    extra[i0, 0] = chi
    rel = np.hstack([B, extra])
    if ring.is_field:
        zdim = C.dim(k0) - rank(C.boundary(k0).tolist(), ring)
        out[k0] = HomologyGroup(zdim - rank(rel.tolist(), ring), (), ring.name)
        return out
    d = C.boundary(k0)
    n = C.dim(k0)
    if d.shape[0]:
        snf = smith_normal_form(_as_int_rows(d), *d.shape)
        r, Qinv = snf.rank, np.array(snf.Q_inv, dtype=object)
    else:
        r, Qinv = 0, np.array([[int(i == j) for j in range(n)] for i in range(n)], dtype=object)
    coords = Qinv.dot(rel)[r:, :] if n else np.zeros((0, rel.shape[1]), dtype=object)
    kdim = n - r
    pres = smith_normal_form(_as_int_rows(coords), kdim, rel.shape[1])
    torsion = tuple(t for t in pres.invariant_factors if t > 1)
    out[k0] = HomologyGroup(kdim - pres.rank, torsion, ring.name)
    return out


def compare_reduced(C: ChainComplex, dp: DistinguishedPoint) -> ReducedComparison:
    """Compare ``H(reduced_complex)`` with the quotient ``H(C)/χ·im(H(pt))``."""
    k0, i0 = _check_point(C, dp)
    chi = C.ring.coerce(dp.euler_characteristic)
    reduced = homology(reduced_complex(C, dp))
    # the cone may add an (empty-homology) degree; only compare degrees of C
    quotient = quotient_homology(C, dp)
    hyp = _injectivity(C, k0, i0, chi)
    red = {k: reduced.get(k, HomologyGroup(0, (), C.ring.name)) for k in quotient}
    extra_degrees = {k: g for k, g in reduced.items() if k not in quotient and not g.is_zero}
    if not hyp:
        return ReducedComparison(False, None, reduced, quotient,
                                 f"χ·[{dp.name}] has finite order in H_{k0}; injectivity hypothesis fails")
    equal = red == quotient and not extra_degrees
    return ReducedComparison(True, equal, reduced, quotient)


# -- maps and verifiers

@dataclass
class ChainMapData:
    """Per-source-degree matrices ``F_k : C_k → D_{k+degree}`` (missing = zero)."""

    degree: int
    matrices: dict[int, object] = field(default_factory=dict)

    def matrix(self, k: int, source: ChainComplex, target: ChainComplex) -> np.ndarray:
        rows, cols = target.dim(k + self.degree), source.dim(k)
        return _coerce_matrix(self.matrices.get(k), rows, cols, source.ring)

    def check_shapes(self, source: ChainComplex, target: ChainComplex) -> None:
        for k in self.matrices:
            self.matrix(k, source, target)

    def to_dict(self) -> dict:
        return {"degree": self.degree,
                "maps": [{"degree": k, "matrix": [[_json_entry(x) for x in row] for row in np.asarray(m, dtype=object).tolist()]}
                         for k, m in sorted(self.matrices.items())]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "ChainMapData":
        try:
            return cls(int(data.get("degree", 0)), {int(e["degree"]): e["matrix"] for e in data.get("maps", [])})
        except (KeyError, TypeError) as exc:
            raise ChainComplexError(f"malformed map: {exc!r}") from None


HomotopyData = ChainMapData


def _compare(report: IdentityReport, k: int, lhs: np.ndarray, rhs: np.ndarray) -> None:
    for (i, j), x in np.ndenumerate(lhs):
        report.checked_pairs += 1
        if x != rhs[i, j]:
            report.violations.append(Violation(f"degree {k} entry [{i},{j}]", x, rhs[i, j]))


def verify_chain_map(F: ChainMapData, source: ChainComplex, target: ChainComplex) -> IdentityReport:
    """``∂_target F = (-1)^deg F · F ∂_source``, entrywise."""
    F.check_shapes(source, target)
    ring, d = source.ring, F.degree
    report = IdentityReport("chain-map", [str(k) for k in source.degrees])
    sign = -1 if d % 2 else 1
    for k in source.degrees:
        lhs = _mul(target.boundary(k + d), F.matrix(k, source, target), ring)
        rhs = _reduce(sign * _mul(F.matrix(k - 1, source, target), source.boundary(k), ring), ring)
        _compare(report, k, lhs, rhs)
    return report


def verify_homotopy(F: ChainMapData, G: ChainMapData, H: ChainMapData,
                    source: ChainComplex, target: ChainComplex) -> IdentityReport:
    """``∂H + H∂ = F - G``, entrywise."""
    if F.degree != G.degree or H.degree != F.degree + 1:
        raise ChainComplexError("homotopy needs deg F = deg G and deg H = deg F + 1")
    for M in (F, G, H):
        M.check_shapes(source, target)
    ring, d = source.ring, F.degree
    report = IdentityReport("homotopy", [str(k) for k in source.degrees])
    for k in source.degrees:
        lhs = _mul(target.boundary(k + d + 1), H.matrix(k, source, target), ring) \
            + _mul(H.matrix(k - 1, source, target), source.boundary(k), ring)
        rhs = F.matrix(k, source, target) - G.matrix(k, source, target)
        _compare(report, k, _reduce(lhs, ring), _reduce(rhs, ring))
    return report


def commutator(gamma: ChainMapData, source: ChainComplex, target: ChainComplex) -> ChainMapData:
    """``[∂, Γ] = ∂Γ - (-1)^deg Γ · Γ∂`` as a map of degree ``deg Γ - 1``."""
    ring, g = source.ring, gamma.degree
    sign = -1 if g % 2 else 1
    mats = {}
    for k in source.degrees:
        m = _mul(target.boundary(k + g), gamma.matrix(k, source, target), ring) \
            - sign * _mul(gamma.matrix(k - 1, source, target), source.boundary(k), ring)
        mats[k] = _reduce(m, ring)
    return ChainMapData(g - 1, mats)


def verify_commutator_relation(gamma: ChainMapData, rhs_terms: Iterable, source: ChainComplex,
                               target: ChainComplex | None = None) -> IdentityReport:
    """Check ``[∂, Γ] = Σ rhs`` where each rhs term is a map or a ``(coefficient, map)`` pair."""
    target = target or source
    gamma.check_shapes(source, target)
    ring = source.ring
    terms = [t if isinstance(t, tuple) else (1, t) for t in rhs_terms]
    for _, t in terms:
        if t.degree != gamma.degree - 1:
            raise ChainComplexError(f"rhs term of degree {t.degree}, expected {gamma.degree - 1}")
        t.check_shapes(source, target)
    lhs = commutator(gamma, source, target)
    report = IdentityReport("commutator", [str(k) for k in source.degrees])
    for k in source.degrees:
        rows, cols = target.dim(k + gamma.degree - 1), source.dim(k)
        total = np.zeros((rows, cols), dtype=object)
        for c, t in terms:
            total = total + ring.coerce(c) * t.matrix(k, source, target)
        _compare(report, k, lhs.matrix(k, source, target), _reduce(total, ring))
    return report


def tensor_complex(C: ChainComplex, D: ChainComplex, sep: str = "⊗") -> ChainComplex:
    """``C ⊗ D`` with ``∂(x⊗y) = ∂x⊗y + (-1)^|x| x⊗∂y``."""
    if C.ring != D.ring:
        raise ChainComplexError("tensor factors over different rings")
    ring = C.ring
    gens: dict[int, list[str]] = {}
    index: dict[tuple[str, str], tuple[int, int]] = {}
    pieces: dict[int, list[tuple[int, int, int, int]]] = {}
    for p in C.degrees:
        for q in D.degrees:
            for i, x in enumerate(C.generators[p]):
                for j, y in enumerate(D.generators[q]):
                    k = p + q
                    gens.setdefault(k, [])
                    index[x, y] = (k, len(gens[k]))
                    gens[k].append(f"{x}{sep}{y}")
                    pieces.setdefault(k, []).append((p, q, i, j))
    bounds = {}
    for k, items in pieces.items():
        m = np.zeros((len(gens.get(k - 1, [])), len(items)), dtype=object)
        for col, (p, q, i, j) in enumerate(items):
            x, y = C.generators[p][i], D.generators[q][j]
            dx = C.boundary(p)[:, i]
            for r, c in enumerate(dx):
                if c != 0:
                    m[index[C.generators[p - 1][r], y][1], col] += c
            dy = D.boundary(q)[:, j]
            sign = -1 if p % 2 else 1
            for r, c in enumerate(dy):
                if c != 0:
                    m[index[x, D.generators[q - 1][r]][1], col] += sign * c
        bounds[k] = m.tolist()
    return ChainComplex(gens, bounds, ring)


# -- filtrations

class FilteredChainComplex:
    """A complex with a real filtration value per generator.

    By default the differential must strictly lower the filtration;
    ``strict=False`` relaxes this to ``≤``.
    """

    def __init__(self, complex: ChainComplex, filtration: Mapping[str, float], strict: bool = True):
        self.complex = complex
        self.filtration = {g: float(v) for g, v in filtration.items()}
        self.strict = strict
        missing = [g for gs in complex.generators.values() for g in gs if g not in self.filtration]
        if missing:
            raise FiltrationError(f"no filtration value for {missing}")
        for k in complex.degrees:
            d = complex.boundary(k)
            for (i, j), x in np.ndenumerate(d):
                if x == 0:
                    continue
                src, tgt = complex.generators[k][j], complex.generators[k - 1][i]
                fs, ft = self.filtration[src], self.filtration[tgt]
                if ft > fs or (strict and ft == fs):
                    rel = "<" if strict else "<="
                    raise FiltrationError(f"∂{src} hits {tgt} but {ft} {rel} {fs} fails")

    def value(self, name: str) -> float:
        return self.filtration[name]

    def to_dict(self) -> dict:
        return self.complex.to_dict(self.filtration)

    @classmethod
    def from_dict(cls, data: Mapping, ring: Ring | None = None, strict: bool = True) -> "FilteredChainComplex":
        C, filt = complex_from_dict(data, ring)
        if filt is None:
            raise FiltrationError("complex has no filtration values")
        return cls(C, filt, strict)


def check_filtration_preserving(F: ChainMapData, source: FilteredChainComplex, target: FilteredChainComplex) -> bool:
    """True iff every nonzero entry maps a generator to targets of filtration ≤ its own."""
    S, T = source.complex, target.complex
    F.check_shapes(S, T)
    for k in S.degrees:
        m = F.matrix(k, S, T)
        for (i, j), x in np.ndenumerate(m):
            if x != 0 and target.value(T.generators[k + F.degree][i]) > source.value(S.generators[k][j]):
                return False
    return True


def _sorted_order(names: Sequence[str], filtered: FilteredChainComplex) -> list[int]:
    return sorted(range(len(names)), key=lambda i: (filtered.value(names[i]), i))


def invert_upper_triangular(F: ChainMapData, source: FilteredChainComplex,
                            target: FilteredChainComplex) -> ChainMapData:
    """Exact inverse of a filtration-preserving degree-0 map by back-substitution.

    In each degree, generators of source and target are sorted by
    filtration value and paired in that order; the map must be upper
    triangular in these bases with unit diagonal.
    """
    if F.degree != 0:
        raise FiltrationError("only degree-0 maps can be inverted")
    S, T = source.complex, target.complex
    ring = S.ring
    if not check_filtration_preserving(F, source, target):
        raise FiltrationError("map does not preserve the filtrations")
    inverse = {}
    for k in sorted(set(S.degrees) | set(T.degrees)):
        sn, tn = S.generators.get(k, ()), T.generators.get(k, ())
        if len(sn) != len(tn):
            raise FiltrationError(f"degree {k}: {len(sn)} source vs {len(tn)} target generators")
        so, to = _sorted_order(sn, source), _sorted_order(tn, target)
        for a, b in zip(so, to):
            if source.value(sn[a]) != target.value(tn[b]):
                raise FiltrationError(f"degree {k}: cannot pair {sn[a]} with {tn[b]} (filtration values differ)")
        m = F.matrix(k, S, T)
        n = len(sn)
        U = [[m[to[i], so[j]] for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i):
                if U[i][j] != 0:
                    raise FiltrationError(f"degree {k}: not upper triangular at sorted position ({i},{j})")
            if not ring.is_unit(U[i][i]):
                raise NotUnitError(f"degree {k}: diagonal entry {U[i][i]} is not a unit")
        X = _back_substitute(U, ring)
        out = np.zeros((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                out[so[i], to[j]] = X[i][j]
        inverse[k] = out
    return ChainMapData(0, inverse)


def _back_substitute(U: list[list], ring: Ring) -> list[list]:
    """Inverse of an upper triangular matrix with unit diagonal."""
    n = len(U)
    inv_diag = [ring.inverse(U[i][i]) for i in range(n)]
    X = [[ring.zero] * n for _ in range(n)]
    for j in range(n):
        X[j][j] = inv_diag[j]
        for i in range(j - 1, -1, -1):
            s = sum((U[i][t] * X[t][j] for t in range(i + 1, j + 1)), ring.zero)
            X[i][j] = ring.coerce(-s * inv_diag[i])
    return X


def compose_maps(G: ChainMapData, F: ChainMapData, a: ChainComplex, b: ChainComplex,
                 c: ChainComplex) -> ChainMapData:
    """``G ∘ F`` for ``F : a → b`` and ``G : b → c``."""
    mats = {k: _mul(G.matrix(k + F.degree, b, c), F.matrix(k, a, b), a.ring) for k in a.degrees}
    return ChainMapData(F.degree + G.degree, mats)


def is_identity(F: ChainMapData, C: ChainComplex) -> bool:
    if F.degree != 0:
        return False
    return all((F.matrix(k, C, C) == np.eye(C.dim(k), dtype=int)).all() for k in C.degrees)


def filtration_window_homology(C: FilteredChainComplex, a: float, b: float,
                               ring: Ring | None = None) -> dict[int, HomologyGroup]:
    """Homology of ``C^{≤b} / C^{≤a}``, spanned by generators with value in ``(a, b]``."""
    if not a < b:
        raise FiltrationError(f"need a < b, got a={a}, b={b}")
    hit = [g for g, v in C.filtration.items() if v in (a, b)]
    if hit:
        raise FiltrationError(f"window end collides with the filtration value of {hit}")
    X = C.complex
    keep = {k: [i for i, g in enumerate(gs) if a < C.value(g) <= b] for k, gs in X.generators.items()}
    gens = {k: [X.generators[k][i] for i in idx] for k, idx in keep.items()}
    bounds = {}
    for k in X.degrees:
        if k - 1 in keep:
            bounds[k] = X.boundary(k)[np.ix_(keep[k - 1], keep[k])].tolist()
    return homology(ChainComplex(gens, bounds, X.ring), ring)


# -- random models

def random_unimodular(n: int, rng: random.Random, steps: int | None = None, bound: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """A random ``n×n`` integer matrix of determinant ±1 together with its inverse."""
    U = np.array([[int(i == j) for j in range(n)] for i in range(n)], dtype=object)
    V = U.copy()
    for _ in range(steps if steps is not None else 3 * n):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-bound, bound)
        U[i, :] = U[i, :] + c * U[j, :]      # U <- E U
        V[:, j] = V[:, j] - c * V[:, i]      # V <- V E^{-1}
        if rng.random() < 0.2:
            U[i, :] = -U[i, :]
            V[:, i] = -V[:, i]
    return U, V


def random_complex(rng: random.Random, max_generators: int = 10, degrees: Sequence[int] = (0, 1, 2),
                   max_coeff: int = 3) -> tuple[ChainComplex, str]:
    """Random integral complex with a marked cycle in the lowest degree.

    Built as a direct sum of elementary pieces (a free generator, or a
    pair ``x → m·y``) and then conjugated by random unimodular bases.
    The marked generator ``q0`` is the first basis element of the lowest
    degree, hence a cycle; whether ``[q0]`` has infinite order is random.
    """
    lo = min(degrees)
    total = rng.randint(1, max_generators)
    dims = {k: 0 for k in degrees}
    pairs: list[tuple[int, int, int, int]] = []  # (degree of x, index of x, index of y, m)
    dims[lo] = 1
    used = 1
    while used < total:
        if used + 2 <= total and rng.random() < 0.6 and len(degrees) > 1:
            k = rng.choice([d for d in degrees if d - 1 in dims])
            m = rng.choice([x for x in range(-max_coeff, max_coeff + 1) if x])
            pairs.append((k, dims[k], dims[k - 1], m))
            dims[k] += 1
            dims[k - 1] += 1
            used += 2
        else:
            dims[rng.choice(list(degrees))] += 1
            used += 1
    bounds = {k: np.zeros((dims.get(k - 1, 0), dims[k]), dtype=object) for k in degrees}
    for k, xi, yi, m in pairs:
        bounds[k][yi, xi] = m
    bases = {k: random_unimodular(dims[k], rng) for k in degrees}
    for k in degrees:
        if k - 1 in dims and bounds[k].size:
            U_lo, _ = bases[k - 1]
            _, V_k = bases[k]
            bounds[k] = U_lo.dot(bounds[k]).dot(V_k)
    gens = {k: [f"g{k}_{i}" for i in range(dims[k])] for k in degrees}
    gens[lo][0] = "q0"  # every lowest-degree chain is a cycle
    C = ChainComplex(gens, {k: m.tolist() for k, m in bounds.items() if k - 1 in dims}, ZZ)
    return C, "q0"
