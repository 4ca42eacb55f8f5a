"""Graded vectors, tensor words, degree-carrying operators and Koszul signs.

A basis element of an ``r``-fold tensor power is a *word*: a tuple of
``r`` :class:`Symbol` objects.  A :class:`GradedVector` is a finite linear
combination of words of a common length with exact coefficients.

Koszul signs are governed by a :class:`SignConvention`.  The standard one
(``side="right"``) is

    (f ⊗ g)(x ⊗ y) = (-1)^(deg g · |x|) f(x) ⊗ g(y)

and the mirrored one (``side="left"``) charges the sign to the left
operator passing the right input, ``(-1)^(deg f · |y|)``.  ``side="none"``
suppresses Koszul signs altogether (ungraded calculus).  A convention may
also evaluate signs in a regrading ``|s| + degree_shift``; an operator of
arity ``k -> l`` then has sign-degree ``deg + degree_shift · (l - k)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping

from .rings import QQ, Ring

Word = tuple["Symbol", ...]


class OperatorDomainError(KeyError):
    """An operator was applied to a basis word outside its declared range."""


class ArityError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Symbol:
    """Graded basis symbol; ``degree`` is the (shifted) degree ``|s|``."""

    degree: int
    name: str

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"Symbol({self.name!r}, {self.degree})"


def koszul_sign(p: int, q: int) -> int:
    return -1 if (p * q) % 2 else 1


@dataclass(frozen=True)
class SignConvention:
    side: str = "right"
    degree_shift: int = 0

    def __post_init__(self):
        if self.side not in ("right", "left", "none"):
            raise ValueError(f"side must be 'right', 'left' or 'none', not {self.side!r}")

    def word_degree(self, word: Word) -> int:
        return sum(s.degree + self.degree_shift for s in word)

    def operator_degree(self, op: "TensorOperator") -> int:
        return op.degree + self.degree_shift * (op.arity_out - op.arity_in)

    @property
    def label(self) -> str:
        return self.side if not self.degree_shift else f"{self.side}+shift{self.degree_shift}"


STANDARD = SignConvention()


def word_degree(word: Word) -> int:
    return sum(s.degree for s in word)


def format_word(word: Word) -> str:
    return "⊗".join(str(s) for s in word) if word else "∅"


class GradedVector:
    """Immutable finite linear combination of equal-length words."""

    __slots__ = ("_terms", "ring", "arity")

    def __init__(self, terms: Mapping[Word, object] | Iterable[tuple[Word, object]] = (), ring: Ring = QQ):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Word, object] = {}
        for word, c in items:
            word = tuple(word)
            acc[word] = ring.coerce(acc.get(word, 0) + ring.coerce(c))
        self._terms = {w: c for w, c in acc.items() if c != 0}
        self.ring = ring
        arities = {len(w) for w in self._terms}
        if len(arities) > 1:
            raise ArityError(f"mixed tensor arities {sorted(arities)} in one vector")
        self.arity = arities.pop() if arities else None

    @classmethod
    def basis(cls, *symbols: Symbol, ring: Ring = QQ) -> "GradedVector":
        return cls({tuple(symbols): 1}, ring)

    @classmethod
    def zero(cls, ring: Ring = QQ) -> "GradedVector":
        return cls({}, ring)

    # -- container protocol
    def __iter__(self) -> Iterator[Word]:
        return iter(sorted(self._terms))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __getitem__(self, word: Word):
        return self._terms.get(tuple(word), self.ring.zero)

    def items(self) -> list[tuple[Word, object]]:
        return sorted(self._terms.items())

    def words(self) -> list[Word]:
        return sorted(self._terms)

    @property
    def homogeneous_degree(self) -> int | None:
        degs = {word_degree(w) for w in self._terms}
        return degs.pop() if len(degs) == 1 else None

    # -- linear structure
    def _check(self, other: "GradedVector") -> None:
        if not isinstance(other, GradedVector):
            raise TypeError(f"expected GradedVector, got {type(other).__name__}")
        if other.ring != self.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
        if self and other and self.arity != other.arity:
            raise ArityError(f"cannot add arity {self.arity} and {other.arity}")

    def __add__(self, other: "GradedVector") -> "GradedVector":
        self._check(other)
        return GradedVector(list(self._terms.items()) + list(other._terms.items()), self.ring)

    def __neg__(self) -> "GradedVector":
        return GradedVector({w: -c for w, c in self._terms.items()}, self.ring)

    def __sub__(self, other: "GradedVector") -> "GradedVector":
        return self + (-other)

    def __mul__(self, scalar) -> "GradedVector":
        if isinstance(scalar, GradedVector):
            return NotImplemented
        s = self.ring.coerce(scalar)
        return GradedVector({w: s * c for w, c in self._terms.items()}, self.ring)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedVector):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __hash__(self):
        return hash((self.ring, frozenset(self._terms.items())))

    def tensor(self, other: "GradedVector") -> "GradedVector":
        if other.ring != self.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
        return GradedVector(
            [(w1 + w2, c1 * c2) for w1, c1 in self._terms.items() for w2, c2 in other._terms.items()],
            self.ring,
        )

    def change_ring(self, ring: Ring) -> "GradedVector":
        if ring == self.ring:
            return self
        return GradedVector(self._terms, ring)

    def map_coefficients(self, fn: Callable[[Word, object], object]) -> "GradedVector":
        return GradedVector({w: fn(w, c) for w, c in self._terms.items()}, self.ring)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for word, c in self.items():
            body = format_word(word)
            if self.ring.characteristic:
                coeff = "" if c == 1 else f"{c}·"
                parts.append(("+", coeff + body))
            elif c == 1:
                parts.append(("+", body))
            elif c == -1:
                parts.append(("-", body))
            elif c < 0:
                parts.append(("-", f"{-c}·{body}"))
            else:
                parts.append(("+", f"{c}·{body}"))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"GradedVector({self}, ring={self.ring})"


@dataclass(frozen=True)
class TensorOperator:
    """Linear map of fixed degree between tensor powers, given on basis words.

    ``action`` maps a word of length ``arity_in`` to a vector of arity
    ``arity_out``.  ``domain``, when given, is the finite set of words the
    operator is declared on; anything outside raises
    :class:`OperatorDomainError`.
    """

    arity_in: int
    arity_out: int
    degree: int
    action: Callable[[Word], GradedVector] = field(repr=False)
    name: str = "f"
    domain: frozenset | None = field(default=None, repr=False)

    @classmethod
    def from_table(cls, table: Mapping[Word, GradedVector], arity_in: int, arity_out: int, degree: int,
                   name: str = "f", ring: Ring = QQ) -> "TensorOperator":
        table = {tuple(k): v for k, v in table.items()}
        for word, out in table.items():
            if len(word) != arity_in:
                raise ArityError(f"{name}: input {format_word(word)} has arity {len(word)} != {arity_in}")
            _check_output(name, word, out, arity_out, degree)

        def action(word: Word) -> GradedVector:
            return table[word]

        return cls(arity_in, arity_out, degree, action, name, frozenset(table))

    def on_word(self, word: Word) -> GradedVector:
        word = tuple(word)
        if len(word) != self.arity_in:
            raise ArityError(f"{self.name}: expected arity {self.arity_in}, got {len(word)}")
        if self.domain is not None and word not in self.domain:
            raise OperatorDomainError(f"{self.name} undefined on {format_word(word)}")
        out = self.action(word)
        _check_output(self.name, word, out, self.arity_out, self.degree)
        return out

    def __call__(self, v: GradedVector) -> GradedVector:
        terms = []
        for word, c in v.items():
            out = self.on_word(word).change_ring(v.ring)
            terms.extend((w, c * d) for w, d in out.items())
        return GradedVector(terms, v.ring)


def _check_output(name: str, word: Word, out: GradedVector, arity_out: int, degree: int) -> None:
    target = word_degree(word) + degree
    for w in out.words():
        if len(w) != arity_out:
            raise ArityError(f"{name}({format_word(word)}) has output arity {len(w)} != {arity_out}")
        if word_degree(w) != target:
            raise ValueError(
                f"{name}({format_word(word)}) term {format_word(w)} has degree {word_degree(w)}, expected {target}"
            )


def identity(arity: int = 1, ring: Ring = QQ) -> TensorOperator:
    def action(word: Word) -> GradedVector:
        return GradedVector({word: 1}, ring)

    return TensorOperator(arity, arity, 0, action, "id" if arity == 1 else f"id{arity}")


def apply_tensor(f: TensorOperator, g: TensorOperator, v: GradedVector,
                 convention: SignConvention = STANDARD) -> GradedVector:
    """Evaluate ``(f ⊗ g)(v)`` under the given Koszul convention."""
    if v and v.arity != f.arity_in + g.arity_in:
        raise ArityError(f"{f.name}⊗{g.name} expects arity {f.arity_in + g.arity_in}, got {v.arity}")
    terms = []
    for word, c in v.items():
        x, y = word[: f.arity_in], word[f.arity_in:]
        if convention.side == "right":
            sign = koszul_sign(convention.operator_degree(g), convention.word_degree(x))
        elif convention.side == "left":
            sign = koszul_sign(convention.operator_degree(f), convention.word_degree(y))
        else:
            sign = 1
        fx = f.on_word(x).change_ring(v.ring)
        gy = g.on_word(y).change_ring(v.ring)
        terms.extend((w1 + w2, sign * c * c1 * c2) for w1, c1 in fx.items() for w2, c2 in gy.items())
    return GradedVector(terms, v.ring)


def tensor_operator(f: TensorOperator, g: TensorOperator, convention: SignConvention = STANDARD) -> TensorOperator:
    """The operator ``f ⊗ g`` as a :class:`TensorOperator`."""

    def action(word: Word) -> GradedVector:
        return apply_tensor(f, g, GradedVector({word: 1}, QQ), convention)

    return TensorOperator(f.arity_in + g.arity_in, f.arity_out + g.arity_out, f.degree + g.degree,
                          action, f"({f.name}⊗{g.name})")


def twist(v: GradedVector, convention: SignConvention = STANDARD) -> GradedVector:
    """``x ⊗ y ↦ (-1)^(|x||y|) y ⊗ x`` on 2-tensors."""
    if v and v.arity != 2:
        raise ArityError(f"twist needs 2-tensors, got arity {v.arity}")

    def sign(x: Symbol, y: Symbol) -> int:
        if convention.side == "none":
            return 1
        return koszul_sign(convention.word_degree((x,)), convention.word_degree((y,)))

    return GradedVector([((y, x), sign(x, y) * c) for (x, y), c in v.items()], v.ring)


def compose(f: TensorOperator, g: TensorOperator) -> TensorOperator:
    """``f ∘ g``."""
    if g.arity_out != f.arity_in:
        raise ArityError(f"cannot compose {f.name} (arity in {f.arity_in}) after {g.name} (arity out {g.arity_out})")

    def action(word: Word) -> GradedVector:
        return f(g.on_word(word))

    return TensorOperator(g.arity_in, f.arity_out, f.degree + g.degree, action,
                          f"{f.name}∘{g.name}", g.domain)
