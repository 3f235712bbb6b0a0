"""FDI tooth codes and the canonical 28-slot indexing.

Slots run along each arch: upper jaw left molar to right molar
(27..21, 11..17) occupies slots 0..13, lower jaw (37..31, 41..47) slots
14..27. The within-jaw ordinal is therefore the intra-arch coordinate used
for localization distance; sites in different jaws are infinitely far apart.
Third molars (position 8) are excluded.
"""

from __future__ import annotations

from dataclasses import dataclass

UPPER_ARCH = (27, 26, 25, 24, 23, 22, 21, 11, 12, 13, 14, 15, 16, 17)
LOWER_ARCH = (37, 36, 35, 34, 33, 32, 31, 41, 42, 43, 44, 45, 46, 47)
_SLOT_ORDER = UPPER_ARCH + LOWER_ARCH
_CODE_TO_SLOT = {code: i for i, code in enumerate(_SLOT_ORDER)}

N_SITES = 28
TEETH_PER_JAW = 14


@dataclass(frozen=True, order=True)
class FdiSite:
    code: int

    def __post_init__(self):
        if self.code not in _CODE_TO_SLOT:
            raise ValueError(f"invalid FDI code {self.code}")

    @property
    def quadrant(self) -> int:
        return self.code // 10

    @property
    def position(self) -> int:
        return self.code % 10

    @property
    def jaw(self) -> str:
        return "upper" if self.quadrant in (1, 2) else "lower"

    @property
    def slot_index(self) -> int:
        return _CODE_TO_SLOT[self.code]

    @property
    def arch_ordinal(self) -> int:
        """Position along the jaw's arch, 0..13."""
        return self.slot_index % TEETH_PER_JAW

    @classmethod
    def from_slot(cls, slot: int) -> "FdiSite":
        if not 0 <= slot < N_SITES:
            raise ValueError(f"slot index {slot} out of range")
        return cls(_SLOT_ORDER[slot])


ALL_SITES = tuple(FdiSite(code) for code in _SLOT_ORDER)
UPPER_SITES = ALL_SITES[:TEETH_PER_JAW]
LOWER_SITES = ALL_SITES[TEETH_PER_JAW:]


def arch_distance(a: FdiSite, b: FdiSite) -> float:
    """Ordinal distance along the arch; inf across jaws."""
    if a.jaw != b.jaw:
        return float("inf")
    return float(abs(a.arch_ordinal - b.arch_ordinal))


def jaw_sites(jaw: str) -> tuple[FdiSite, ...]:
    return UPPER_SITES if jaw == "upper" else LOWER_SITES
