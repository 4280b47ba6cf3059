"""Molecular graph types and the conservation arithmetic built on them.

A molecule is an immutable graph of atoms and bonds. Hydrogen counts for
bare organic-subset atoms are implied by a fixed valence convention so
that atom-count vectors are deterministic:

* valence table B:3, C:4, N:3, O:2, F/Cl/Br/I:1, P:{3,5}, S:{2,4,6};
  the smallest tabulated valence >= the atom's bond-order sum applies;
* an aromatic bond counts 1 toward the bond-order sum, and aromatic
  carbon receives a +1 adjustment (so a benzene carbon carries one
  hydrogen without any Kekule assignment);
* bracket atoms carry exactly their written hydrogens, never implied
  ones, and a nonzero formal charge suspends the valence check.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field


class ValenceError(ValueError):
    """An uncharged atom exceeds its maximum tabulated valence."""


VALENCES: dict[str, tuple[int, ...]] = {
    "B": (3,),
    "C": (4,),
    "N": (3,),
    "O": (2,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "F": (1,),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
}

ORGANIC_SUBSET = frozenset(VALENCES)
AROMATIC_ELEMENTS = frozenset({"B", "C", "N", "O", "P", "S"})


@dataclass(frozen=True)
class Atom:
    """One atom: element symbol, formal charge, written hydrogens, flags.

    ``explicit_h`` is ``None`` for bare atoms (hydrogens implied by the
    valence convention) and an exact count for bracket atoms.
    """

    element: str
    charge: int = 0
    explicit_h: int | None = None
    aromatic: bool = False
    isotope: int | None = None


@dataclass(frozen=True)
class Bond:
    """Undirected bond between two atom indices; order is 1, 1.5, 2 or 3."""

    i: int
    j: int
    order: float = 1.0


def _valence_units(order: float) -> int:
    # Aromatic bonds count 1 toward the valence sum by convention.
    return 1 if order == 1.5 else int(order)


@dataclass(frozen=True)
class Molecule:
    """Immutable molecular graph with per-atom implied hydrogen counts.

    Construction validates the graph (index bounds, no self-bonds, no
    duplicate bonds, bond orders from {1, 1.5, 2, 3}) and computes
    implied hydrogens, raising :class:`ValenceError` where an uncharged
    atom is over-bonded.
    """

    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    source_text: str = ""
    implicit_h: tuple[int, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        n = len(self.atoms)
        if n == 0:
            raise ValueError("a molecule needs at least one atom")
        seen = set()
        sums = [0] * n
        for bond in self.bonds:
            if not (0 <= bond.i < n and 0 <= bond.j < n):
                raise ValueError(f"bond {bond} references a missing atom")
            if bond.i == bond.j:
                raise ValueError(f"bond {bond} joins an atom to itself")
            if bond.order not in (1, 1.5, 2, 3):
                raise ValueError(f"unsupported bond order {bond.order!r}")
            key = (min(bond.i, bond.j), max(bond.i, bond.j))
            if key in seen:
                raise ValueError(f"duplicate bond between atoms {key}")
            seen.add(key)
            sums[bond.i] += _valence_units(bond.order)
            sums[bond.j] += _valence_units(bond.order)
        implicit = []
        for idx, atom in enumerate(self.atoms):
            implicit.append(_implied_hydrogens(atom, sums[idx]))
        object.__setattr__(self, "implicit_h", tuple(implicit))

    @property
    def num_atoms(self) -> int:
        return len(self.atoms)

    def neighbors(self) -> list[list[tuple[int, float]]]:
        """Adjacency as (neighbor index, bond order) lists."""
        adj: list[list[tuple[int, float]]] = [[] for _ in self.atoms]
        for bond in self.bonds:
            adj[bond.i].append((bond.j, bond.order))
            adj[bond.j].append((bond.i, bond.order))
        return adj

    def total_hydrogens(self, idx: int) -> int:
        atom = self.atoms[idx]
        return (atom.explicit_h or 0) + self.implicit_h[idx]


def _implied_hydrogens(atom: Atom, bond_sum: int) -> int:
    if atom.aromatic and atom.element == "C":
        bond_sum += 1
    if atom.explicit_h is not None:
        # Bracket atom: hydrogens are exactly as written.
        _check_valence(atom, bond_sum + atom.explicit_h)
        return 0
    table = VALENCES.get(atom.element)
    if table is None:
        return 0
    fitting = [v for v in table if v >= bond_sum]
    if not fitting:
        if atom.charge != 0:
            return 0
        raise ValenceError(
            f"{atom.element} with bond-order sum {bond_sum} exceeds "
            f"maximum valence {max(table)} and carries no charge"
        )
    return fitting[0] - bond_sum


def _check_valence(atom: Atom, occupied: int) -> None:
    table = VALENCES.get(atom.element)
    if table is None or atom.charge != 0:
        return
    if occupied > max(table):
        raise ValenceError(
            f"{atom.element} with {occupied} bonds/hydrogens exceeds "
            f"maximum valence {max(table)} and carries no charge"
        )


class ElementCounts(Mapping):
    """Per-element atom tallies with element-wise +/- arithmetic.

    Zero entries are dropped, so the empty mapping is both the additive
    identity and the unique representation of a balanced difference.
    Values may be negative in signed differences.
    """

    __slots__ = ("_items",)

    def __init__(self, counts: Mapping[str, int] | None = None):
        items = {}
        for element, value in (counts or {}).items():
            value = int(value)
            if value != 0:
                items[element] = value
        self._items = dict(sorted(items.items()))

    def __getitem__(self, element: str) -> int:
        return self._items.get(element, 0)

    def __iter__(self):
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __add__(self, other: "ElementCounts") -> "ElementCounts":
        merged = dict(self._items)
        for element, value in other._items.items():
            merged[element] = merged.get(element, 0) + value
        return ElementCounts(merged)

    def __sub__(self, other: "ElementCounts") -> "ElementCounts":
        return self + (-other)

    def __neg__(self) -> "ElementCounts":
        return ElementCounts({element: -value for element, value in self._items.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, ElementCounts):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self._items == {k: v for k, v in other.items() if v != 0}
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self._items.items()))

    def __repr__(self) -> str:
        return f"ElementCounts({self._items!r})"

    @property
    def is_zero(self) -> bool:
        return not self._items

    def as_dict(self) -> dict[str, int]:
        return dict(self._items)


ZERO_COUNTS = ElementCounts()


def atom_count_vector(mol: Molecule) -> ElementCounts:
    """Count every atom by element, hydrogens (explicit plus implied) under H."""
    counts: dict[str, int] = {}
    hydrogens = 0
    for idx, atom in enumerate(mol.atoms):
        counts[atom.element] = counts.get(atom.element, 0) + 1
        hydrogens += mol.total_hydrogens(idx)
    if hydrogens:
        counts["H"] = counts.get("H", 0) + hydrogens
    return ElementCounts(counts)


def formal_charge_sum(mol: Molecule) -> int:
    return sum(atom.charge for atom in mol.atoms)


def conservation_residual(
    reactants: list[Molecule], products: list[Molecule]
) -> tuple[ElementCounts, int]:
    """Signed element and charge difference between the two sides.

    Returns ``(sum(a(r)) - sum(a(p)), sum(q(r)) - sum(q(p)))``; a zero
    residual means the reaction is balanced. Real diagrams routinely
    violate balance, so callers treat this as a soft signal.
    """
    if not reactants or not products:
        raise ValueError("both reactant and product lists must be non-empty")
    element = ZERO_COUNTS
    for mol in reactants:
        element = element + atom_count_vector(mol)
    for mol in products:
        element = element - atom_count_vector(mol)
    charge = sum(formal_charge_sum(m) for m in reactants) - sum(
        formal_charge_sum(m) for m in products
    )
    return element, charge
