"""The exterior-algebra model Λ(A, U) of the loop homology of an odd sphere.

Shifted degrees are ``|A| = -n`` and ``|U| = n - 1``; the basis is
``U^k`` and ``AU^k`` for ``0 <= k <= K``.  The loop product is the
exterior-algebra multiplication and the coproduct has degree ``1 - 2n``
(``-5`` for the 3-sphere).

Two routes to the coproduct are provided: the closed form, and the
recursion that starts from ``λ(1) = λ(A) = 0``, ``λ(U) = A⊗1 + 1⊗A`` and
propagates through Sullivan's relation ``λ(a•b) = (1⊗μ)(λa⊗b) +
(μ⊗1)(a⊗λb)``.  Which Koszul convention makes the recursion reproduce the
closed form over Q is settled by :func:`sweep_conventions`; the winner is
:data:`PINNED_CONVENTION`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .graded import GradedVector, SignConvention, Symbol, TensorOperator
from .identities import (
    check_coassociativity,
    check_cocommutativity,
    check_sullivan,
    epsilon_rule,
    signed_coproduct,
    sullivan_rhs,
)
from .rings import QQ, Ring


class TruncationError(ValueError):
    """A power of U beyond the model's truncation was requested."""


@dataclass(frozen=True)
class RecursionConvention:
    """Koszul side (right, left or none) for the recursion, with or without the ε component sign."""

    side: str
    epsilon: bool = False

    @property
    def id(self) -> str:
        return self.side + ("+eps" if self.epsilon else "")

    @property
    def signs(self) -> SignConvention:
        return SignConvention(self.side)


CONVENTIONS = {
    c.id: c
    for c in (
        RecursionConvention("right"),
        RecursionConvention("left"),
        RecursionConvention("none"),
        RecursionConvention("right", True),
        RecursionConvention("left", True),
        RecursionConvention("none", True),
    )
}

# Chosen by sweep_conventions() over Q: the recursion reproduces the closed
# form under "left" and "none" (ε is trivial for odd n), but only "none"
# also satisfies Sullivan's relation on every ordered pair.
PINNED_CONVENTION = "none"


class SphereLoopHomology:
    """Truncated model of ``H_{*+n}(ΛS^n)`` for odd ``n``.

    Parameters
    ----------
    n : odd dimension, default 3.  ``n > 3`` needs ``experimental=True``
        because the seed value of λ(U) is only established for the 3-sphere.
    K : largest power of U in the basis.
    ring : coefficient ring.
    """

    def __init__(self, n: int = 3, K: int = 64, ring: Ring = QQ, experimental: bool = False):
        if n < 3 or n % 2 == 0:
            raise ValueError(f"n must be an odd integer >= 3, got {n}")
        if n != 3 and not experimental:
            raise ValueError("odd spheres other than S^3 require experimental=True")
        if K < 1:
            raise ValueError("truncation K must be at least 1")
        self.n, self.K, self.ring = n, K, ring
        self.euler_characteristic = 0
        self._symbols: dict[tuple[bool, int], Symbol] = {}
        self._index: dict[Symbol, tuple[bool, int]] = {}
        for k in range(K + 1):
            for has_a in (False, True):
                sym = Symbol(self._degree(has_a, k), self._name(has_a, k))
                self._symbols[has_a, k] = sym
                self._index[sym] = (has_a, k)
        self._memo: dict[str, dict[Symbol, GradedVector]] = {}

    def __repr__(self) -> str:
        return f"SphereLoopHomology(n={self.n}, K={self.K}, ring={self.ring})"

    # -- basis
    def _degree(self, has_a: bool, k: int) -> int:
        return k * (self.n - 1) - (self.n if has_a else 0)

    @staticmethod
    def _name(has_a: bool, k: int) -> str:
        head = "A" if has_a else ""
        if k == 0:
            return head or "1"
        return head + ("U" if k == 1 else f"U^{k}")

    def symbol(self, has_a: bool, k: int) -> Symbol:
        if not 0 <= k <= self.K:
            raise TruncationError(f"U^{k} exceeds truncation K={self.K}")
        return self._symbols[has_a, k]

    def U(self, k: int = 1) -> Symbol:
        return self.symbol(False, k)

    def AU(self, k: int = 0) -> Symbol:
        return self.symbol(True, k)

    @property
    def unit(self) -> Symbol:
        return self.U(0)

    @property
    def A(self) -> Symbol:
        return self.AU(0)

    def parse(self, name: str) -> Symbol:
        name = name.strip()
        for sym in self._index:
            if sym.name == name:
                return sym
        raise KeyError(f"{name!r} is not a basis symbol of {self!r}")

    def decompose(self, sym: Symbol) -> tuple[bool, int]:
        try:
            return self._index[sym]
        except KeyError:
            raise KeyError(f"{sym!r} is not a basis symbol of {self!r}") from None

    def exponent(self, sym: Symbol) -> int:
        return self.decompose(sym)[1]

    @property
    def basis(self) -> list[Symbol]:
        return self.window(self.K)

    def window(self, kmax: int) -> list[Symbol]:
        """Basis monomials with U-exponent at most ``kmax``."""
        if kmax > self.K:
            raise TruncationError(f"window {kmax} exceeds truncation K={self.K}")
        return [self._symbols[a, k] for k in range(kmax + 1) for a in (False, True)]

    def pair_window(self, total: int) -> list[tuple[Symbol, Symbol]]:
        """Ordered basis pairs whose exponents sum to at most ``total``."""
        syms = self.window(total)
        return [(a, b) for a in syms for b in syms if self.exponent(a) + self.exponent(b) <= total]

    def _vec(self, terms) -> GradedVector:
        return GradedVector(terms, self.ring)

    # -- product
    def product(self, b1: Symbol, b2: Symbol) -> GradedVector:
        a1, k1 = self.decompose(b1)
        a2, k2 = self.decompose(b2)
        if a1 and a2:
            return self._vec({})
        # U has even degree, so A commutes past U-powers without sign.
        return self._vec({(self.symbol(a1 or a2, k1 + k2),): 1})

    def product_operator(self) -> TensorOperator:
        return TensorOperator(2, 1, 0, lambda w: self.product(*w), "μ")

    # -- coproduct, closed form
    def coproduct_closed(self, b: Symbol) -> GradedVector:
        has_a, k = self.decompose(b)
        terms = []
        for i in range(k):
            j = k - 1 - i
            if has_a:
                terms.append(((self.AU(i), self.AU(j)), 1))
            else:
                terms.append(((self.AU(i), self.U(j)), 1))
                terms.append(((self.U(i), self.AU(j)), 1))
        return self._vec(terms)

    # -- coproduct, via Sullivan's relation
    def seed(self, b: Symbol) -> GradedVector | None:
        has_a, k = self.decompose(b)
        if k == 0:
            return self._vec({})
        if (has_a, k) == (False, 1):
            return self._vec({(self.A, self.unit): 1, (self.unit, self.A): 1})
        return None

    def coproduct_recursive(self, b: Symbol, convention: str = PINNED_CONVENTION) -> GradedVector:
        """λ(b) derived from the seed values through Sullivan's relation.

        ``λ(U^k)`` is expanded as ``λ(U•U^(k-1))`` and ``λ(AU^k)`` as
        ``λ(A•U^k)``.  With ``+eps`` conventions the relation is imposed on
        the ε-corrected coproduct and the correction is undone at the end.
        """
        conv = CONVENTIONS[convention]
        eps = epsilon_rule(self.n) if conv.epsilon else None
        memo = self._memo.setdefault(conv.id, {})
        _, k = self.decompose(b)
        mu = self.product_operator()
        lam = TensorOperator(1, 2, 1 - 2 * self.n, lambda w: memo[w[0]], "λ")
        lam = signed_coproduct(lam, eps)
        for kk in range(k + 1):
            for aa in (False, True):
                sym = self.symbol(aa, kk)
                if sym in memo:
                    continue
                seeded = self.seed(sym)
                if seeded is not None:
                    memo[sym] = seeded
                    continue
                if aa:
                    left, right = self.A, self.U(kk)
                else:
                    left, right = self.U(1), self.U(kk - 1)
                corrected = sullivan_rhs(mu, lam, left, right, self.ring, conv.signs)
                memo[sym] = signed_coproduct(
                    TensorOperator(1, 2, 1 - 2 * self.n, lambda w, v=corrected: v, "λ"), eps
                ).on_word((sym,))
        return memo[b]

    def coproduct_operator(self, mode: str = "closed", convention: str = PINNED_CONVENTION) -> TensorOperator:
        if mode == "closed":
            return TensorOperator(1, 2, 1 - 2 * self.n, lambda w: self.coproduct_closed(w[0]), "λ")
        if mode == "recursive":
            return TensorOperator(1, 2, 1 - 2 * self.n,
                                  lambda w: self.coproduct_recursive(w[0], convention), "λ")
        raise ValueError(f"unknown coproduct mode {mode!r}")

    # -- tables
    def coproduct_table(self, kmax: int, mode: str = "closed",
                        convention: str = PINNED_CONVENTION) -> list[tuple[Symbol, GradedVector]]:
        lam = self.coproduct_operator(mode, convention)
        return [(b, lam.on_word((b,))) for b in self.window(kmax)]

    def compare(self, kmax: int, convention: str = PINNED_CONVENTION) -> list[tuple[Symbol, GradedVector, GradedVector]]:
        """Monomials where recursion and closed form disagree."""
        return [
            (b, rec, self.coproduct_closed(b))
            for b, rec in self.coproduct_table(kmax, "recursive", convention)
            if rec != self.coproduct_closed(b)
        ]


def table_as_json(rows: list[tuple[Symbol, GradedVector]]) -> str:
    data = [
        {
            "input": str(b),
            "terms": [{"left": str(w[0]), "right": str(w[1]), "coeff": _json_scalar(c)} for w, c in v.items()],
        }
        for b, v in rows
    ]
    return json.dumps(data, indent=2, ensure_ascii=False)


def table_as_text(rows: list[tuple[Symbol, GradedVector]]) -> str:
    width = max((len(str(b)) for b, _ in rows), default=0)
    return "\n".join(f"λ({b})".ljust(width + 3) + f" = {v}" for b, v in rows)


def _json_scalar(c):
    if isinstance(c, int):
        return c
    return c.numerator if c.denominator == 1 else str(c)


def sweep_conventions(kmax: int = 10, ring: Ring = QQ, n: int = 3) -> dict[str, dict]:
    """Run recursion-vs-closed-form and Sullivan checks under every convention."""
    model = SphereLoopHomology(n=n, K=max(2 * kmax, 1), ring=ring, experimental=n != 3)
    closed = model.coproduct_operator("closed")
    mu = model.product_operator()
    out = {}
    for cid, conv in CONVENTIONS.items():
        mismatches = model.compare(kmax, cid)
        sign_only = all(rec == closed_v or rec == -closed_v for _, rec, closed_v in mismatches)
        sullivan = check_sullivan(mu, closed, model.pair_window(kmax), ring, conv.signs)
        out[cid] = {
            "recursion_matches_closed": not mismatches,
            "mismatched_inputs": [str(b) for b, _, _ in mismatches],
            "mismatches_are_global_signs": sign_only,
            "sullivan_violations": len(sullivan.violations),
            "sullivan_checked": sullivan.checked_pairs,
        }
    return out


def structure_diagnostics(kmax: int = 10, ring: Ring = QQ) -> dict[str, dict]:
    """Coassociativity and cocommutativity of the closed form in several gradings."""
    model = SphereLoopHomology(K=max(kmax, 1), ring=ring)
    lam = model.coproduct_operator("closed")
    window = model.window(kmax)
    out = {}
    for side in ("right", "left", "none"):
        for shift in (0, 2 * model.n - 1):
            signs = SignConvention(side, shift)
            for eps in (False, True):
                rule = epsilon_rule(model.n) if eps else None
                coassoc = check_coassociativity(lam, window, rule, ring, signs)
                out[f"coassoc {signs.label}{'+eps' if eps else ''}"] = {
                    "violations": len(coassoc.violations), "checked": coassoc.checked_pairs}
    for signs in (SignConvention("right"), SignConvention("right", 2 * model.n - 1), SignConvention("none")):
        cocomm = check_cocommutativity(lam, window, ring, signs)
        out[f"cocomm {signs.label}"] = {"violations": len(cocomm.violations), "checked": cocomm.checked_pairs}
    return out
