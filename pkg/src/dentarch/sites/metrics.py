"""Localization metrics over predicted site sets.

Case-level: exact set match (partial or over-prediction counts as wrong) and
count match. Site-level Acc@k: greedy nearest assignment of ground-truth
sites to unused predicted sites by intra-arch ordinal distance (ties broken
on lower ordinals); a ground-truth site scores at k if its match lies within
k positions, unmatched sites fail at every k. Cross-jaw distance is infinite.
"""

from __future__ import annotations

from ..errors import LengthMismatch
from ..synth.fdi import FdiSite, arch_distance


def _greedy_match(gt: list[FdiSite], pred: list[FdiSite]) -> dict[FdiSite, float]:
    pairs = []
    for g in gt:
        for p in pred:
            d = arch_distance(g, p)
            if d != float("inf"):
                pairs.append((d, g.slot_index, p.slot_index, g, p))
    pairs.sort(key=lambda t: t[:3])
    used_gt: set[int] = set()
    used_pred: set[int] = set()
    match: dict[FdiSite, float] = {}
    for d, gi, pi, g, p in pairs:
        if gi in used_gt or pi in used_pred:
            continue
        used_gt.add(gi)
        used_pred.add(pi)
        match[g] = d
    return match


def site_metrics(predicted: list, ground_truth: list) -> dict[str, float]:
    """predicted/ground_truth: aligned lists of FdiSite collections per case."""
    if len(predicted) != len(ground_truth):
        raise LengthMismatch(
            f"{len(predicted)} predictions vs {len(ground_truth)} cases")
    n_cases = len(ground_truth)
    exact = count_ok = 0
    hits = {1: 0, 2: 0, 3: 0}
    total_sites = 0
    for pred, gt in zip(predicted, ground_truth):
        pred_set = {s.code for s in pred}
        gt_set = {s.code for s in gt}
        exact += pred_set == gt_set
        count_ok += len(pred_set) == len(gt_set)
        gt_sites = sorted((FdiSite(c) for c in gt_set), key=lambda s: s.slot_index)
        pred_sites = sorted((FdiSite(c) for c in pred_set),
                            key=lambda s: s.slot_index)
        match = _greedy_match(gt_sites, pred_sites)
        total_sites += len(gt_sites)
        for site in gt_sites:
            d = match.get(site)
            if d is None:
                continue
            for k in (1, 2, 3):
                hits[k] += d <= k
    def frac(a, b):
        return a / b if b else 0.0
    return {
        "a_isl": frac(exact, n_cases),
        "a_isc": frac(count_ok, n_cases),
        "acc1": frac(hits[1], total_sites),
        "acc2": frac(hits[2], total_sites),
        "acc3": frac(hits[3], total_sites),
    }
