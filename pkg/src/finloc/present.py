"""Presented sup-lattices: least closure-operator quotients of a free
sup-lattice on generators, plus tensor products built from presentations.

A relation (S, T) asserts that the joins of the two generator subsets
coincide in the quotient.  The least closure operator collapsing every
relation is computed by worklist saturation of the two implication rules
S => T and T => S; equality of presented elements is equality of closures,
so nothing needs to be materialized to decide it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import DomainMismatch, RelationViolated, SizeBound
from .lattice import FiniteSupLattice, SupMorphism, is_frame

DEFAULT_CARRIER_CAP = 65536


@dataclass(frozen=True)
class JoinPresentation:
    gens: tuple
    relations: tuple  # of (frozenset, frozenset) pairs of generator subsets

    def __post_init__(self):
        gset = set(self.gens)
        if len(gset) != len(self.gens):
            raise DomainMismatch("duplicate generators")
        for s, t in self.relations:
            if not (set(s) <= gset and set(t) <= gset):
                raise DomainMismatch(f"relation ({set(s)!r}, {set(t)!r}) "
                                     "mentions unknown generators")


class PElement:
    """An element of a presented sup-lattice: a set of generators up to closure."""

    __slots__ = ("quotient", "raw", "_closure")

    def __init__(self, quotient: "PresentedSupLattice", raw: frozenset):
        self.quotient = quotient
        self.raw = frozenset(raw)
        self._closure = None

    @property
    def closure(self) -> frozenset:
        if self._closure is None:
            self._closure = self.quotient.closure(self.raw)
        return self._closure

    def join(self, other: "PElement") -> "PElement":
        return PElement(self.quotient, self.raw | other.raw)

    def leq(self, other: "PElement") -> bool:
        return self.raw <= other.closure or self.closure <= other.closure

    def __eq__(self, other):
        if not isinstance(other, PElement) or other.quotient is not self.quotient:
            return NotImplemented
        if self.raw == other.raw:
            return True
        return self.closure == other.closure

    def __hash__(self):
        return hash(self.closure)

    def __repr__(self):
        return f"<PElement {sorted(map(repr, self.raw))}>"


class PresentedSupLattice:
    """Quotient of the free sup-lattice on `gens` by join relations."""

    def __init__(self, presentation: JoinPresentation,
                 carrier_cap: int = DEFAULT_CARRIER_CAP):
        self.presentation = presentation
        self.gens = presentation.gens
        self.carrier_cap = carrier_cap
        self._gi = {g: i for i, g in enumerate(self.gens)}
        rules = []
        for s, t in presentation.relations:
            s = frozenset(self._gi[g] for g in s)
            t = frozenset(self._gi[g] for g in t)
            rules.append((s, t - s))
            rules.append((t, s - t))
        self._rules = [(tuple(p), tuple(c)) for p, c in rules if c or not p]
        self._by_gen = [[] for _ in self.gens]
        self._free = []  # rules with empty premise always fire
        for r, (prem, _) in enumerate(self._rules):
            if not prem:
                self._free.append(r)
            for g in prem:
                self._by_gen[g].append(r)
        self._premlen = [len(p) for p, _ in self._rules]
        self._lattice = None
        self._locale = None

    # -- closure ---------------------------------------------------------

    def closure(self, raw) -> frozenset:
        seen = {self._gi[g] for g in raw}
        counts = list(self._premlen)
        stack = list(self._free)
        for g in seen:
            for r in self._by_gen[g]:
                counts[r] -= 1
                if counts[r] == 0:
                    stack.append(r)
        while stack:
            r = stack.pop()
            for g in self._rules[r][1]:
                if g not in seen:
                    seen.add(g)
                    for r2 in self._by_gen[g]:
                        counts[r2] -= 1
                        if counts[r2] == 0:
                            stack.append(r2)
        return frozenset(self.gens[i] for i in seen)

    # -- elements ----------------------------------------------------------

    def element(self, gens_subset) -> PElement:
        sub = frozenset(gens_subset)
        for g in sub:
            if g not in self._gi:
                raise DomainMismatch(f"{g!r} is not a generator")
        return PElement(self, sub)

    def gen_class(self, g) -> PElement:
        return self.element((g,))

    @property
    def bottom(self) -> PElement:
        return self.element(())

    @property
    def top(self) -> PElement:
        return self.element(self.gens)

    def join_all(self, elements) -> PElement:
        raw = frozenset().union(*(e.raw for e in elements)) if elements else frozenset()
        return PElement(self, raw)

    # -- materialization ---------------------------------------------------

    def lattice(self) -> FiniteSupLattice:
        """All closed sets, ordered by inclusion (join-saturation from atoms)."""
        if self._lattice is not None:
            return self._lattice
        seen = {self.closure(())}
        for g in self.gens:
            seen.add(self.closure((g,)))
        work = list(seen)
        while work:
            a = work.pop()
            for b in list(seen):
                u = a | b
                if u in seen:
                    continue
                c = u if self._is_closed(u) else self.closure(u)
                if c not in seen:
                    seen.add(c)
                    work.append(c)
                    if len(seen) > self.carrier_cap:
                        raise SizeBound(
                            f"materialized carrier exceeds cap {self.carrier_cap}")
        self._lattice = FiniteSupLattice.from_order(
            tuple(sorted(seen, key=lambda s: (len(s), sorted(map(repr, s))))),
            lambda a, b: a <= b,
        )
        return self._lattice

    def locale(self):
        """The materialized carrier as a finite locale (it must be a frame)."""
        if self._locale is None:
            from .lattice import FiniteLocale

            self._locale = FiniteLocale.from_lattice(self.lattice())
        return self._locale

    def _is_closed(self, sub: frozenset) -> bool:
        idx = {self._gi[g] for g in sub}
        for prem, conc in self._rules:
            if all(p in idx for p in prem) and not all(c in idx for c in conc):
                return False
        return True

    def class_of(self, element: PElement) -> frozenset:
        return element.closure

    def __repr__(self):
        return (f"<PresentedSupLattice {len(self.gens)} gens, "
                f"{len(self.presentation.relations)} relations>")


def quotient(p: JoinPresentation,
             carrier_cap: int = DEFAULT_CARRIER_CAP) -> PresentedSupLattice:
    return PresentedSupLattice(p, carrier_cap)


def induced_morphism(q: PresentedSupLattice, assign: dict,
                     M: FiniteSupLattice) -> SupMorphism:
    """The unique sup-morphism from the quotient extending a relation-respecting
    generator assignment; raises RelationViolated with the failing relation."""
    for g in q.gens:
        if g not in assign:
            raise DomainMismatch(f"assignment undefined on generator {g!r}")
    for s, t in q.presentation.relations:
        lhs = M.join_all(assign[g] for g in s)
        rhs = M.join_all(assign[g] for g in t)
        if lhs != rhs:
            raise RelationViolated(
                f"assignment sends relation sides to {lhs!r} != {rhs!r}",
                witness=(s, t),
            )
    lat = q.lattice()
    table = {c: M.join_all(assign[g] for g in c) for c in lat.elements}
    return SupMorphism(lat, M, table)


def induced_value(q: PresentedSupLattice, assign: dict, M: FiniteSupLattice,
                  x: PElement):
    """Value of the induced morphism on one element, without materializing."""
    return M.join_all(assign[g] for g in x.raw)


# -- presentations of existing lattices -------------------------------------


@dataclass(frozen=True)
class ModulePresentation:
    """A generating set for a lattice together with a presentation of it."""

    lattice: FiniteSupLattice
    gens: tuple
    value: dict
    relations: tuple

    def decompose(self, element) -> frozenset:
        """Generators whose join is `element` (the ones lying below it)."""
        L = self.lattice
        out = frozenset(g for g in self.gens if L.leq(self.value[g], element))
        assert L.join_all(self.value[g] for g in out) == element
        return out


def lattice_presentation(M: FiniteSupLattice, tag=None) -> ModulePresentation:
    """Present M by join-irreducibles when distributive, else by all elements.

    Generator labels are (tag, element) pairs when a tag is given, so that
    presentations of different factors can share a tensor without clashing.
    """
    distributive, _ = is_frame(M)
    if distributive:
        gens_e = M.join_irreducibles()
        rels = []
        for j in gens_e:
            for k in gens_e:
                if j != k and M.leq(j, k):
                    rels.append((frozenset({_lab(tag, j), _lab(tag, k)}),
                                 frozenset({_lab(tag, k)})))
    else:
        gens_e = tuple(e for e in M.elements)
        rels = [(frozenset({_lab(tag, M.bottom)}), frozenset())]
        for a, b in itertools.combinations_with_replacement(gens_e, 2):
            j = M.join(a, b)
            if j != a and j != b:
                rels.append((frozenset({_lab(tag, j)}),
                             frozenset({_lab(tag, a), _lab(tag, b)})))
            elif j == a and b != a:
                rels.append((frozenset({_lab(tag, a), _lab(tag, b)}),
                             frozenset({_lab(tag, a)})))
    gens = tuple(_lab(tag, e) for e in gens_e)
    value = {_lab(tag, e): e for e in gens_e}
    return ModulePresentation(M, gens, value, tuple(rels))


def _lab(tag, e):
    return e if tag is None else (tag, e)


# -- tensor products ---------------------------------------------------------


class TensorLattice(PresentedSupLattice):
    """M (x) N presented on pairs of generators, with the universal bimorphism."""

    def __init__(self, pm: ModulePresentation, pn: ModulePresentation,
                 relations, carrier_cap: int = DEFAULT_CARRIER_CAP):
        self.left = pm
        self.right = pn
        gens = tuple((g, h) for g in pm.gens for h in pn.gens)
        super().__init__(JoinPresentation(gens, tuple(relations)), carrier_cap)

    def pair(self, m, n) -> PElement:
        """The image of (m, n) under the universal bimorphism."""
        return self.element(
            (g, h)
            for g in self.left.decompose(m)
            for h in self.right.decompose(n)
        )


def _tensor_relations(pm: ModulePresentation, pn: ModulePresentation):
    rels = []
    for s, t in pm.relations:
        for h in pn.gens:
            rels.append((frozenset((g, h) for g in s),
                         frozenset((g, h) for g in t)))
    for s, t in pn.relations:
        for g in pm.gens:
            rels.append((frozenset((g, h) for h in s),
                         frozenset((g, h) for h in t)))
    return rels


def tensor(M: FiniteSupLattice, N: FiniteSupLattice,
           pm: ModulePresentation | None = None,
           pn: ModulePresentation | None = None,
           carrier_cap: int = DEFAULT_CARRIER_CAP) -> TensorLattice:
    """The sup-lattice tensor product M (x) N.

    With the default all-element presentations this is exactly the quotient of
    the free lattice on M x N by bilinearity of binary and empty joins.
    """
    if pm is None:
        pm = lattice_presentation(M, tag="L")
    if pn is None:
        pn = lattice_presentation(N, tag="R")
    return TensorLattice(pm, pn, _tensor_relations(pm, pn), carrier_cap)


def tensor_over(B, Mmod, Nmod, carrier_cap: int = DEFAULT_CARRIER_CAP,
                b_gens=None) -> TensorLattice:
    """M (x)_B N: the tensor with (b.m, n) identified with (m, b.n).

    Mmod / Nmod provide .lattice, .act(b, m) and .presentation; the right
    action on M is its left action (B commutative).
    """
    pm = Mmod.presentation
    pn = Nmod.presentation
    rels = _tensor_relations(pm, pn)
    if b_gens is None:
        b_gens = B.elements
    for b in b_gens:
        for g in pm.gens:
            bg = Mmod.act(b, pm.value[g])
            for h in pn.gens:
                bh = Nmod.act(b, pn.value[h])
                rels.append((
                    frozenset((g2, h) for g2 in pm.decompose(bg)),
                    frozenset((g, h2) for h2 in pn.decompose(bh)),
                ))
    return TensorLattice(pm, pn, rels, carrier_cap)
