"""Extensional checks of product/coproduct identities on finite windows.

Every checker evaluates both sides of an identity on each input of a
window and collects mismatches in an :class:`IdentityReport`.  Operators
that are undefined on a required word raise rather than being skipped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Callable, Iterable, Sequence

from .graded import (
    STANDARD,
    GradedVector,
    SignConvention,
    Symbol,
    TensorOperator,
    apply_tensor,
    format_word,
    identity,
    twist,
)
from .rings import QQ, Ring

SignRule = Callable[[Symbol, Symbol], int]


@dataclass(frozen=True)
class Violation:
    input: str
    lhs: GradedVector
    rhs: GradedVector

    def as_dict(self) -> dict:
        return {"input": self.input, "lhs": str(self.lhs), "rhs": str(self.rhs)}


@dataclass
class IdentityReport:
    identity: str
    window: list[str]
    checked_pairs: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "identity": self.identity,
            "window": self.window,
            "checked_pairs": self.checked_pairs,
            "violations": [v.as_dict() for v in self.violations],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, ensure_ascii=False)

    def to_table(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        lines = [f"{self.identity}: {status} ({self.checked_pairs} checked, {len(self.violations)} violations)"]
        width = max((len(v.input) for v in self.violations), default=0)
        for v in self.violations:
            lines.append(f"  {v.input:<{width}}  lhs = {v.lhs}")
            lines.append(f"  {'':<{width}}  rhs = {v.rhs}")
        return "\n".join(lines)


@dataclass(frozen=True)
class AlgebraStructure:
    product: TensorOperator
    unit: Symbol

    def __post_init__(self):
        if (self.product.arity_in, self.product.arity_out) != (2, 1):
            raise ValueError("a product must have arity 2 -> 1")


@dataclass(frozen=True)
class CoalgebraStructure:
    coproduct: TensorOperator
    n: int

    def __post_init__(self):
        if (self.coproduct.arity_in, self.coproduct.arity_out) != (1, 2):
            raise ValueError("a coproduct must have arity 1 -> 2")
        if self.coproduct.degree != 1 - 2 * self.n:
            raise ValueError(f"coproduct degree {self.coproduct.degree} != 1 - 2n = {1 - 2 * self.n}")


def epsilon_rule(n: int) -> SignRule:
    """Coassociativity correction ``(-1)^((n-1)(j-n))`` on the ``ij``-component.

    ``j - n`` is the geometric degree of the right tensor factor, i.e.
    ``|right| + n`` in shifted grading.  Trivial whenever ``n`` is odd.
    """

    def rule(left: Symbol, right: Symbol) -> int:
        return -1 if ((n - 1) * (right.degree + n)) % 2 else 1

    return rule


def signed_coproduct(lam: TensorOperator, sign_rule: SignRule | None) -> TensorOperator:
    if sign_rule is None:
        return lam

    def action(word):
        return lam.on_word(word).map_coefficients(lambda w, c: sign_rule(w[0], w[1]) * c)

    return TensorOperator(1, 2, lam.degree, action, f"ε{lam.name}", lam.domain)


def _pairs(window: Iterable) -> list[tuple[Symbol, Symbol]]:
    window = list(window)
    if all(isinstance(s, Symbol) for s in window):
        return list(cartesian(window, repeat=2))
    return [tuple(p) for p in window]


def sullivan_rhs(mu: TensorOperator, lam: TensorOperator, a: Symbol, b: Symbol,
                 ring: Ring = QQ, convention: SignConvention = STANDARD) -> GradedVector:
    """``(1⊗μ)(λ⊗1)(a⊗b) + (μ⊗1)(1⊗λ)(a⊗b)``."""
    one = identity(1, ring)
    v = GradedVector.basis(a, b, ring=ring)
    first = apply_tensor(one, mu, apply_tensor(lam, one, v, convention), convention)
    second = apply_tensor(mu, one, apply_tensor(one, lam, v, convention), convention)
    return first + second


def check_sullivan(mu: TensorOperator, lam: TensorOperator, window: Iterable, ring: Ring = QQ,
                   convention: SignConvention = STANDARD) -> IdentityReport:
    """Check ``λμ = (1⊗μ)(λ⊗1) + (μ⊗1)(1⊗λ)`` on every pair of the window.

    ``window`` is either a sequence of symbols (all ordered pairs are
    checked) or a sequence of explicit ``(a, b)`` pairs.
    """
    pairs = _pairs(window)
    report = IdentityReport("sullivan", [f"{a}⊗{b}" for a, b in pairs])
    for a, b in pairs:
        lhs = lam(mu(GradedVector.basis(a, b, ring=ring)))
        rhs = sullivan_rhs(mu, lam, a, b, ring, convention)
        report.checked_pairs += 1
        if lhs != rhs:
            report.violations.append(Violation(f"{a}⊗{b}", lhs, rhs))
    return report


def check_coassociativity(lam: TensorOperator, window: Sequence[Symbol], sign_rule: SignRule | None = None,
                          ring: Ring = QQ, convention: SignConvention = STANDARD) -> IdentityReport:
    """Compare ``(λ⊗1)λ`` with ``(1⊗λ)λ`` after applying ``sign_rule`` to λ."""
    lam_e = signed_coproduct(lam, sign_rule)
    one = identity(1, ring)
    report = IdentityReport("coassociativity", [str(a) for a in window])
    for a in window:
        out = lam_e(GradedVector.basis(a, ring=ring))
        lhs = apply_tensor(lam_e, one, out, convention)
        rhs = apply_tensor(one, lam_e, out, convention)
        report.checked_pairs += 1
        if lhs != rhs:
            report.violations.append(Violation(str(a), lhs, rhs))
    return report


def check_cocommutativity(lam: TensorOperator, window: Sequence[Symbol], ring: Ring = QQ,
                          convention: SignConvention = STANDARD) -> IdentityReport:
    """Compare ``τ∘λ`` with ``λ``; the twist sign uses the convention's grading."""
    report = IdentityReport("cocommutativity", [str(a) for a in window])
    for a in window:
        out = lam(GradedVector.basis(a, ring=ring))
        swapped = twist(out, convention)
        report.checked_pairs += 1
        if swapped != out:
            report.violations.append(Violation(str(a), swapped, out))
    return report


def check_assoc_comm_unit(mu: TensorOperator, unit: Symbol, window: Sequence[Symbol], ring: Ring = QQ,
                          convention: SignConvention = STANDARD) -> IdentityReport:
    """Associativity on triples, graded commutativity on pairs, unit laws on singletons."""
    one = identity(1, ring)
    report = IdentityReport("assoc-comm-unit", [str(a) for a in window])

    for a, b, c in cartesian(window, repeat=3):
        v = GradedVector.basis(a, b, c, ring=ring)
        lhs = mu(apply_tensor(mu, one, v, convention))
        rhs = mu(apply_tensor(one, mu, v, convention))
        report.checked_pairs += 1
        if lhs != rhs:
            report.violations.append(Violation(f"assoc {a}⊗{b}⊗{c}", lhs, rhs))

    for a, b in cartesian(window, repeat=2):
        v = GradedVector.basis(a, b, ring=ring)
        lhs, rhs = mu(twist(v, convention)), mu(v)
        report.checked_pairs += 1
        if lhs != rhs:
            report.violations.append(Violation(f"comm {a}⊗{b}", lhs, rhs))

    for a in window:
        x = GradedVector.basis(a, ring=ring)
        for label, word in (("left unit", (unit, a)), ("right unit", (a, unit))):
            got = mu(GradedVector({word: 1}, ring))
            report.checked_pairs += 1
            if got != x:
                report.violations.append(Violation(f"{label} {format_word(word)}", got, x))
    return report
