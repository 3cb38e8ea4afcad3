"""Solution scoring: pattern matching, sidelobe level, directivity, dynamic range."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .array_model import (
    ArrayGeometry,
    ElementPatternSet,
    RadiationOperator,
    build_radiation_operator,
    evaluate_pattern,
    uniform_u_grid,
)
from .clustering import ClusteredLayout, clustered_excitations, clustering_factor

if TYPE_CHECKING:
    from .reference import ReferencePattern

__all__ = [
    "MetricsReport",
    "pattern_matching_index",
    "dynamic_range_ratio",
    "sidelobe_level",
    "peak_directivity",
    "full_report",
]

REPORT_FIELDS = ("xi", "chi", "drr_db", "sll_db", "dmax_db", "q")


@dataclass(frozen=True)
class MetricsReport:
    """The scoring indexes of one synthesized solution.

    xi is the normalized squared pattern mismatch (dimensionless), chi the
    clusters-per-element ratio, and the remaining fields are in dB.
    """

    xi: float
    chi: float
    drr_db: float
    sll_db: float
    dmax_db: float
    q: int

    def __post_init__(self):
        if self.xi < 0:
            raise ValueError("xi must be non-negative")
        if not 0.0 < self.chi <= 1.0:
            raise ValueError("chi must lie in (0, 1]")

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in REPORT_FIELDS}


def pattern_matching_index(f, f_ref) -> float:
    """Normalized squared mismatch ||f - f_ref||^2 / ||f_ref||^2."""
    f = np.asarray(f, dtype=complex)
    f_ref = np.asarray(f_ref, dtype=complex)
    if f.shape != f_ref.shape:
        raise ValueError("patterns must have equal length")
    ref_energy = np.real(np.vdot(f_ref, f_ref))
    if ref_energy == 0:
        raise ValueError("reference pattern is identically zero")
    diff = f - f_ref
    return float(np.real(np.vdot(diff, diff)) / ref_energy)


def dynamic_range_ratio(w) -> float:
    """max |w_n| / min |w_n|; undefined (error) when any weight is zero."""
    mag = np.abs(np.asarray(w, dtype=complex))
    if mag.size == 0:
        raise ValueError("empty excitation vector")
    lo = mag.min()
    if lo == 0:
        raise ValueError("zero-magnitude excitation: dynamic range ratio undefined")
    return float(mag.max() / lo)


def sidelobe_level(f) -> float:
    """Highest lobe outside the null-to-null mainlobe, in dB below the peak.

    Walks outward from the pattern peak to the first local minima, then takes
    the largest magnitude beyond them. The caller must supply a grid dense
    enough to resolve the lobes. Raises if the pattern is monotone away from
    the peak (no sidelobe exists).
    """
    mag = np.abs(np.asarray(f, dtype=complex))
    m = mag.size
    if m < 3:
        raise ValueError("pattern too short to contain sidelobes")
    peak_idx = int(np.argmax(mag))
    peak = mag[peak_idx]
    if peak == 0:
        raise ValueError("pattern is identically zero")

    candidates = []
    i = peak_idx
    while i + 1 < m and mag[i + 1] <= mag[i]:  # <= absorbs sampled plateaus
        i += 1
    if i + 1 < m:  # descent ended in a rise: i is the first null to the right
        candidates.append(mag[i:].max())
    i = peak_idx
    while i - 1 >= 0 and mag[i - 1] <= mag[i]:
        i -= 1
    if i - 1 >= 0:
        candidates.append(mag[: i + 1].max())
    if not candidates:
        raise ValueError("no sidelobe found: pattern is monotone around its peak")
    return float(20.0 * np.log10(max(candidates) / peak))


def peak_directivity(w, geom: ArrayGeometry, elems: ElementPatternSet,
                     n_quad: int = 4096) -> float:
    """Peak directivity in dB of the rotationally-symmetric linear-array pattern.

    Integrates |f|^2 sin(polar angle) over the sphere by trapezoidal
    quadrature on ``n_quad`` polar samples; the azimuth integral is 2 pi by
    symmetry.
    """
    w = np.asarray(w, dtype=complex)
    if w.shape != (geom.n_elements,):
        raise ValueError("excitation length must match the geometry")
    if not np.any(w):
        raise ValueError("zero excitation radiates no pattern")
    big_theta = np.linspace(0.0, np.pi, n_quad)
    u = np.cos(big_theta)  # sin(theta from broadside) = cos(polar angle)
    theta_deg = np.degrees(np.arcsin(np.clip(u, -1.0, 1.0)))
    responses = elems.evaluate(theta_deg)
    f = (responses * np.exp(2j * np.pi * np.outer(u, geom.positions))) @ w
    power = np.abs(f) ** 2
    total = np.trapezoid(power * np.sin(big_theta), big_theta)
    if total == 0 or power.max() == 0:
        raise ValueError("pattern is identically zero")
    return float(10.0 * np.log10(2.0 * power.max() / total))


def full_report(
    w_hat,
    layout: ClusteredLayout,
    H: RadiationOperator,
    f_ref: "ReferencePattern",
    geom: ArrayGeometry,
    elems: ElementPatternSet,
    dense_factor: int = 10,
    quad_points: int = 4096,
) -> MetricsReport:
    """Score the clustered solution that ``layout`` describes.

    The matching index compares the clustered excitations' pattern against
    the reference on a grid ``dense_factor`` times finer than the constraint
    one whenever the reference's source excitations are known; otherwise both
    are compared on the constraint grid. Sidelobe level is always measured on
    the dense grid.
    """
    if dense_factor < 1:
        raise ValueError("dense_factor must be >= 1")
    w_c = clustered_excitations(layout)
    dense_grid = uniform_u_grid(dense_factor * f_ref.n_directions)
    H_dense = build_radiation_operator(geom, elems, dense_grid)
    f_dense = evaluate_pattern(H_dense, w_c)

    if f_ref.source_excitations is not None:
        xi = pattern_matching_index(f_dense, evaluate_pattern(H_dense, f_ref.source_excitations))
    else:
        xi = pattern_matching_index(evaluate_pattern(H, w_c), f_ref.samples)

    drr = dynamic_range_ratio(w_c)
    return MetricsReport(
        xi=xi,
        chi=clustering_factor(layout),
        drr_db=float(20.0 * np.log10(drr)),
        sll_db=sidelobe_level(f_dense),
        dmax_db=peak_directivity(w_c, geom, elems, n_quad=quad_points),
        q=layout.q,
    )
