"""Implant-system parameter model.

Thirteen systems, each with its own admissible window per parameter:
diameter centers spread over 3.5-6.5 mm (window +-0.5), height centers over
4-12 mm (+-1.5), transgingival centers over 1-5 mm (+-0.75). Within a window
the value carries a deterministic site/geometry signal plus small noise, so
the (site, system, local geometry) -> parameters mapping is learnable and
system conditioning is genuinely informative.
"""

from __future__ import annotations

import numpy as np

from .arch import TOOTH_WIDTH_MM
from .fdi import FdiSite

N_SYSTEMS = 13

DIAMETER_WINDOW = 0.5
HEIGHT_WINDOW = 1.5
TRANSGINGIVAL_WINDOW = 0.75

# geometry coupling weights
SADDLE_GAIN = 0.6          # transgingival per mm of saddle depth
CROWN_GAIN = 0.5           # height per mm of neighbor crown reference
WIDTH_GAIN = 0.12          # diameter per mm of mesiodistal width
NOISE_STD = 0.06


def system_table() -> np.ndarray:
    """(13, 3) centers: transgingival, diameter, height. Distinct per system
    and decorrelated across parameters (different index permutations)."""
    c = np.arange(N_SYSTEMS)
    transgingival = 1.0 + 4.0 * ((c * 3) % 13) / 12.0
    diameter = 3.5 + 3.0 * c / 12.0
    height = 4.0 + 8.0 * ((c * 5) % 13) / 12.0
    return np.stack([transgingival, diameter, height], axis=1)


_TABLE = system_table()


def synthesize_params(site: FdiSite, system_id: int, seed: int,
                      saddle_depth_mm: float | None = None,
                      crown_ref_mm: float | None = None) -> tuple[float, float, float]:
    """Draw (transgingival, diameter, height) in mm for one implant site.

    Geometry arguments come from the arch generator; when omitted they fall
    back to deterministic site-derived stand-ins so the mapping stays
    learnable either way.
    """
    if not 0 <= system_id < N_SYSTEMS:
        raise ValueError(f"system id {system_id} out of range")
    if saddle_depth_mm is None:
        saddle_depth_mm = 1.0 + 0.03 * site.arch_ordinal
    if crown_ref_mm is None:
        crown_ref_mm = 6.5
    rng = np.random.default_rng((seed, site.slot_index, system_id))
    tg_c, dia_c, h_c = _TABLE[system_id]
    width = TOOTH_WIDTH_MM[site.jaw][site.position]

    tg = tg_c + SADDLE_GAIN * (saddle_depth_mm - 1.1) + rng.normal(0, NOISE_STD)
    dia = dia_c + WIDTH_GAIN * (width - 7.5) + rng.normal(0, NOISE_STD)
    h = h_c + CROWN_GAIN * (crown_ref_mm - 6.5) + rng.normal(0, NOISE_STD)

    tg = float(np.clip(tg, tg_c - TRANSGINGIVAL_WINDOW, tg_c + TRANSGINGIVAL_WINDOW))
    dia = float(np.clip(dia, dia_c - DIAMETER_WINDOW, dia_c + DIAMETER_WINDOW))
    h = float(np.clip(h, h_c - HEIGHT_WINDOW, h_c + HEIGHT_WINDOW))
    return tg, dia, h
