"""Standard small lattices and groupoids used by tests, the CLI selftest,
and the acceptance suite."""

from __future__ import annotations

import functools

from .lattice import FiniteLocale, FiniteSupLattice, build_locale, build_suplattice, power_locale, two


@functools.lru_cache(maxsize=None)
def TWO() -> FiniteLocale:
    return two()


@functools.lru_cache(maxsize=None)
def chain(n: int) -> FiniteLocale:
    """The n-element chain 0 < 1 < ... < n-1 (chains are frames)."""
    return build_locale(range(n), [(i, i + 1) for i in range(n - 1)])


@functools.lru_cache(maxsize=None)
def CH3() -> FiniteLocale:
    return chain(3)


@functools.lru_cache(maxsize=None)
def P2() -> FiniteLocale:
    """The four-element Boolean lattice: the powerset of {1, 2}."""
    return power_locale((1, 2))


@functools.lru_cache(maxsize=None)
def M3() -> FiniteSupLattice:
    """Bottom, three incomparable atoms x, y, z, top: modular, not distributive."""
    return build_suplattice(
        ("bot", "x", "y", "z", "top"),
        [("bot", "x"), ("bot", "y"), ("bot", "z"),
         ("x", "top"), ("y", "top"), ("z", "top")],
    )


def standard_locales() -> dict:
    return {"TWO": TWO(), "CH3": CH3(), "P2": P2()}


# -- groupoid fixtures -----------------------------------------------------
# Imported lazily to keep module load order simple.


@functools.lru_cache(maxsize=None)
def trivial_group():
    from .galois import FiniteGroupoid

    return FiniteGroupoid(
        objects=("*",),
        arrows=("e",),
        source={"e": "*"},
        target={"e": "*"},
        unit={"*": "e"},
        compose={("e", "e"): "e"},
        inverse={"e": "e"},
    )


@functools.lru_cache(maxsize=None)
def z_mod(n: int):
    """The cyclic group Z/n as a one-object groupoid."""
    from .galois import FiniteGroupoid

    arrows = tuple(f"g{k}" for k in range(n))
    return FiniteGroupoid(
        objects=("*",),
        arrows=arrows,
        source={a: "*" for a in arrows},
        target={a: "*" for a in arrows},
        unit={"*": "g0"},
        compose={(f"g{i}", f"g{j}"): f"g{(i + j) % n}"
                 for i in range(n) for j in range(n)},
        inverse={f"g{k}": f"g{(-k) % n}" for k in range(n)},
    )


@functools.lru_cache(maxsize=None)
def codiscrete(n: int = 2):
    """The codiscrete groupoid on n objects: one arrow between each ordered pair."""
    from .galois import FiniteGroupoid

    objects = tuple(range(n))
    arrows = tuple((a, b) for a in objects for b in objects)  # arrow a -> b
    return FiniteGroupoid(
        objects=objects,
        arrows=arrows,
        source={(a, b): a for (a, b) in arrows},
        target={(a, b): b for (a, b) in arrows},
        unit={o: (o, o) for o in objects},
        compose={(((b, c)), ((a, b2))): (a, c)
                 for (b, c) in arrows for (a, b2) in arrows if b2 == b},
        inverse={(a, b): (b, a) for (a, b) in arrows},
    )


@functools.lru_cache(maxsize=None)
def identities_only(n: int = 2):
    """The discrete groupoid on n objects (identity arrows only)."""
    from .galois import FiniteGroupoid

    objects = tuple(range(n))
    arrows = tuple(("id", o) for o in objects)
    return FiniteGroupoid(
        objects=objects,
        arrows=arrows,
        source={("id", o): o for o in objects},
        target={("id", o): o for o in objects},
        unit={o: ("id", o) for o in objects},
        compose={(("id", o), ("id", o)): ("id", o) for o in objects},
        inverse={("id", o): ("id", o) for o in objects},
    )


def fixture_groupoids() -> dict:
    return {
        "trivial": trivial_group(),
        "Z2": z_mod(2),
        "Z3": z_mod(3),
        "codiscrete2": codiscrete(2),
        "discrete2": identities_only(2),
    }
