"""Z/2 local systems on the free loop space, modeled by monodromy functionals.

On each component ``c`` of the loop space a system is described by two
Z/2 vectors: ``a(c)`` pairs with the class of the base loop ``ev0∘u`` in
``H1(M; Z/2)`` and ``b(c)`` pairs with the torus class ``[u × S^1]`` in
``H2(M; Z/2)``.  Together with an integer degree this covers the trivial
system and every system built here: σ, μ, õ, o, η and the transgressions
``τ_c``.

In this model the two formulations of compatibility with products
(pullback under concatenation vs. pullback under cutting) reduce to the
same predicate, see :func:`is_compatible`.  The class is sufficient, not
a characterization of all compatible systems.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product as cartesian
from operator import and_, xor
from typing import Hashable, Mapping, Sequence

Vec = tuple[int, ...]
_BITS = frozenset((0, 1))


class LocalSystemError(ValueError):
    pass


def _vec(v: Sequence[int], length: int, what: str) -> Vec:
    if not (isinstance(v, tuple) and _BITS.issuperset(v)):
        v = tuple(int(x) % 2 for x in v)
    if len(v) != length:
        raise LocalSystemError(f"{what} has length {len(v)}, expected {length}")
    return v


def vadd(u: Vec, v: Vec) -> Vec:
    return tuple(map(xor, u, v))


def vscale(s: int, v: Vec) -> Vec:
    return tuple((s * x) % 2 for x in v)


def dot(u: Vec, v: Vec) -> int:
    return sum(map(and_, u, v)) & 1


@dataclass(frozen=True)
class ManifoldDescriptor:
    n: int
    g1: int
    g2: int
    w1: Vec = ()
    w2: Vec = ()

    def __post_init__(self):
        if self.g1 < 0 or self.g2 < 0:
            raise LocalSystemError("g1, g2 must be nonnegative")
        w1 = self.w1 if self.w1 else (0,) * self.g1
        w2 = self.w2 if self.w2 else (0,) * self.g2
        object.__setattr__(self, "w1", _vec(w1, self.g1, "w1"))
        object.__setattr__(self, "w2", _vec(w2, self.g2, "w2"))

    @property
    def orientable(self) -> bool:
        return not any(self.w1)

    def as_dict(self) -> dict:
        return {"n": self.n, "g1": self.g1, "g2": self.g2, "w1": list(self.w1), "w2": list(self.w2)}


@dataclass(frozen=True)
class ComponentModel:
    """Finite monoid of loop-space components with an additive orientation bit ``w``.

    ``table[(c1, c2)]`` is the component of the concatenation ``c1 ⊙ c2``.
    """

    elements: tuple
    table: Mapping = field(hash=False)
    identity: Hashable
    w: Mapping = field(hash=False)

    def __post_init__(self):
        els = tuple(self.elements)
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "table", dict(self.table))
        object.__setattr__(self, "w", {c: int(v) % 2 for c, v in dict(self.w).items()})
        if len(set(els)) != len(els):
            raise LocalSystemError("duplicate component")
        for c1, c2 in cartesian(els, repeat=2):
            if self.table.get((c1, c2)) not in els:
                raise LocalSystemError(f"operation table undefined or not closed at ({c1}, {c2})")
        if self.identity not in els:
            raise LocalSystemError("identity is not a component")
        for c in els:
            if self.op(self.identity, c) != c or self.op(c, self.identity) != c:
                raise LocalSystemError(f"{self.identity} is not a two-sided identity at {c}")
            if c not in self.w:
                raise LocalSystemError(f"no orientation bit for component {c}")
        for a, b, c in cartesian(els, repeat=3):
            if self.op(self.op(a, b), c) != self.op(a, self.op(b, c)):
                raise LocalSystemError(f"operation not associative at ({a}, {b}, {c})")
        for c1, c2 in cartesian(els, repeat=2):
            if self.w[self.op(c1, c2)] != (self.w[c1] + self.w[c2]) % 2:
                raise LocalSystemError(f"orientation bit not additive at ({c1}, {c2})")

    def op(self, c1, c2):
        return self.table[c1, c2]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ComponentModel):
            return NotImplemented
        return (self.elements == other.elements and self.table == other.table
                and self.identity == other.identity and self.w == other.w)

    def __hash__(self):
        return hash((self.elements, self.identity))

    def as_dict(self) -> dict:
        return {
            "elements": list(self.elements),
            "table": [[self.op(a, b) for b in self.elements] for a in self.elements],
            "identity": self.identity,
            "w": [self.w[c] for c in self.elements],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ComponentModel":
        try:
            els = tuple(data["elements"])
            table = {(a, b): data["table"][i][j] for i, a in enumerate(els) for j, b in enumerate(els)}
            w = dict(zip(els, data["w"]))
            return cls(els, table, data["identity"], w)
        except (KeyError, IndexError, TypeError) as exc:
            raise LocalSystemError(f"malformed component model: {exc!r}") from None


def orientation_components() -> ComponentModel:
    """The default model ``(Z/2, +)`` with ``w = id``."""
    els = (0, 1)
    return ComponentModel(els, {(a, b): (a + b) % 2 for a in els for b in els}, 0, {0: 0, 1: 1})


@dataclass(frozen=True)
class MonodromyInput:
    component: Hashable
    base_loop: Vec
    torus_class: Vec


@dataclass(frozen=True)
class LocalSystemSpec:
    descriptor: ManifoldDescriptor
    components: ComponentModel
    degree: int
    coefficients: tuple  # ((component, a, b), ...) in component order

    def __post_init__(self):
        M, cm = self.descriptor, self.components
        given = {}
        for entry in self.coefficients:
            c, a, b = entry
            if c not in cm.elements:
                raise LocalSystemError(f"unknown component {c!r}")
            if c in given:
                raise LocalSystemError(f"component {c!r} listed twice")
            given[c] = (_vec(a, M.g1, "a"), _vec(b, M.g2, "b"))
        missing = [c for c in cm.elements if c not in given]
        if missing:
            raise LocalSystemError(f"coefficients missing for components {missing}")
        object.__setattr__(self, "coefficients", tuple((c, *given[c]) for c in cm.elements))
        object.__setattr__(self, "degree", int(self.degree))
        object.__setattr__(self, "_rows", {row[0]: row for row in self.coefficients})

    @classmethod
    def _trusted(cls, M: ManifoldDescriptor, cm: ComponentModel, degree: int, coefficients: tuple) -> "LocalSystemSpec":
        """Skip validation; ``coefficients`` must already be normalized and in component order."""
        self = object.__new__(cls)
        for k, v in (("descriptor", M), ("components", cm), ("degree", degree), ("coefficients", coefficients)):
            object.__setattr__(self, k, v)
        object.__setattr__(self, "_rows", {row[0]: row for row in coefficients})
        return self

    @classmethod
    def build(cls, M: ManifoldDescriptor, cm: ComponentModel, degree: int, a, b) -> "LocalSystemSpec":
        """``a``, ``b``: callables of the component."""
        return cls(M, cm, degree, tuple((c, a(c), b(c)) for c in cm.elements))

    def a(self, c) -> Vec:
        return self._row(c)[1]

    def b(self, c) -> Vec:
        return self._row(c)[2]

    def _row(self, c):
        try:
            return self._rows[c]
        except KeyError:
            raise LocalSystemError(f"unknown component {c!r}") from None

    def as_dict(self) -> dict:
        return {
            "descriptor": self.descriptor.as_dict(),
            "components": self.components.as_dict(),
            "degree": self.degree,
            "coefficients": [{"component": c, "a": list(a), "b": list(b)} for c, a, b in self.coefficients],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: Mapping) -> "LocalSystemSpec":
        try:
            M = descriptor_from_dict(data["descriptor"])
            cm = ComponentModel.from_dict(data["components"]) if "components" in data else orientation_components()
            coeffs = tuple((e["component"], e["a"], e["b"]) for e in data["coefficients"])
            return cls(M, cm, int(data["degree"]), coeffs)
        except (KeyError, TypeError) as exc:
            raise LocalSystemError(f"malformed local system: {exc!r}") from None


def descriptor_from_dict(d: Mapping) -> ManifoldDescriptor:
    try:
        return ManifoldDescriptor(int(d["n"]), int(d["g1"]), int(d["g2"]), tuple(d.get("w1", ())), tuple(d.get("w2", ())))
    except (KeyError, TypeError) as exc:
        raise LocalSystemError(f"malformed descriptor: {exc!r}") from None


def trivial(M: ManifoldDescriptor, cm: ComponentModel | None = None, degree: int = 0) -> LocalSystemSpec:
    cm = cm or orientation_components()
    return LocalSystemSpec.build(M, cm, degree, lambda c: (0,) * M.g1, lambda c: (0,) * M.g2)


def _same_base(nu1: LocalSystemSpec, nu2: LocalSystemSpec) -> None:
    if nu1.descriptor != nu2.descriptor:
        raise LocalSystemError("local systems live over different manifold descriptors")
    if nu1.components != nu2.components:
        raise LocalSystemError("local systems use different component models")


def tensor(nu1: LocalSystemSpec, nu2: LocalSystemSpec) -> LocalSystemSpec:
    """Degrees add, monodromy coefficients add mod 2."""
    _same_base(nu1, nu2)
    # coefficients of both are stored in component order
    coeffs = tuple((c, vadd(a1, a2), vadd(b1, b2))
                   for (c, a1, b1), (_, a2, b2) in zip(nu1.coefficients, nu2.coefficients))
    return LocalSystemSpec._trusted(nu1.descriptor, nu1.components, nu1.degree + nu2.degree, coeffs)


def dual(nu: LocalSystemSpec) -> LocalSystemSpec:
    """Same monodromy (Z/2 is its own inverse), opposite degree."""
    return LocalSystemSpec(nu.descriptor, nu.components, -nu.degree, nu.coefficients)


def underline(nu: LocalSystemSpec) -> LocalSystemSpec:
    return LocalSystemSpec(nu.descriptor, nu.components, 0, nu.coefficients)


def make_tau(M: ManifoldDescriptor, c: Sequence[int], cm: ComponentModel | None = None) -> LocalSystemSpec:
    """Transgression of a class ``c ∈ H^2(M; Z/2)``: ``b = c`` everywhere."""
    cm = cm or orientation_components()
    c = _vec(c, M.g2, "c")
    return LocalSystemSpec.build(M, cm, 0, lambda _: (0,) * M.g1, lambda _: c)


def make_sigma(M: ManifoldDescriptor, cm: ComponentModel | None = None) -> LocalSystemSpec:
    """σ = τ_{w2}."""
    return make_tau(M, M.w2, cm)


def make_mu(M: ManifoldDescriptor, cm: ComponentModel | None = None) -> LocalSystemSpec:
    """Pullback of the inverse orientation system along ``ev0``: degree ``-n``, ``a = w1``."""
    cm = cm or orientation_components()
    return LocalSystemSpec.build(M, cm, -M.n, lambda _: M.w1, lambda _: (0,) * M.g2)


def make_o(M: ManifoldDescriptor, cm: ComponentModel | None = None) -> LocalSystemSpec:
    """Pullback of the orientation system along ``ev0``: degree ``n``, ``a = w1``."""
    return dual(make_mu(M, cm))


def make_otilde(M: ManifoldDescriptor, cm: ComponentModel | None = None) -> LocalSystemSpec:
    """The shift system: degree 0, ``a(c) = w(c)·w1``."""
    cm = cm or orientation_components()
    return LocalSystemSpec.build(M, cm, 0, lambda c: vscale(cm.w[c], M.w1), lambda _: (0,) * M.g2)


def make_eta(M: ManifoldDescriptor, cm: ComponentModel | None = None) -> LocalSystemSpec:
    """η = σ ⊗ μ ⊗ õ."""
    return tensor(make_sigma(M, cm), tensor(make_mu(M, cm), make_otilde(M, cm)))


BUILDERS = {"sigma": make_sigma, "mu": make_mu, "o": make_o, "otilde": make_otilde, "eta": make_eta,
            "trivial": trivial}


def monodromy(nu: LocalSystemSpec, x: MonodromyInput) -> int:
    """``a(c)·base_loop + b(c)·torus_class`` mod 2."""
    M = nu.descriptor
    base = _vec(x.base_loop, M.g1, "base_loop")
    torus = _vec(x.torus_class, M.g2, "torus_class")
    _, a, b = nu._row(x.component)
    return dot(a, base) ^ dot(b, torus)


@dataclass(frozen=True)
class Compatibility:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def is_compatible(nu: LocalSystemSpec, cm: ComponentModel | None = None) -> Compatibility:
    """Compatibility with products, as a decidable predicate on the model.

    Checked in order: degree 0; ``b`` constant over components; ``a``
    additive under concatenation; ``a`` trivial on the identity
    component (restriction to constant loops is trivial).
    """
    cm = cm or nu.components
    if cm != nu.components:
        raise LocalSystemError("component model differs from the system's own")
    if nu.degree != 0:
        return Compatibility(False, f"degree {nu.degree} != 0")
    b0 = nu.b(cm.elements[0])
    for c in cm.elements:
        if nu.b(c) != b0:
            return Compatibility(False, f"torus coefficient b not constant (differs on component {c!r})")
    for c1, c2 in cartesian(cm.elements, repeat=2):
        if nu.a(cm.op(c1, c2)) != vadd(nu.a(c1), nu.a(c2)):
            return Compatibility(False, f"a not additive under concatenation at ({c1!r}, {c2!r})")
    if any(nu.a(cm.identity)):
        return Compatibility(False, "restriction to constant loops is nontrivial")
    return Compatibility(True, "compatible with products")


def classify(nu: LocalSystemSpec) -> dict:
    """Canonical (monodromy table, degree) description."""
    return {
        "degree": nu.degree,
        "monodromy": [{"component": c, "a": list(a), "b": list(b)} for c, a, b in nu.coefficients],
    }


def classify_key(nu: LocalSystemSpec) -> tuple:
    return (nu.degree, nu.coefficients)
