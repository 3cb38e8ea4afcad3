"""Reference tapers and patterns: Dolph-Chebyshev, Taylor, flat-top, and CSV I/O.

All generated references are peak-normalized so that max |f(theta_m)| = 1 over
the sample grid; matching indexes and sidelobe levels are relative quantities,
so the absolute scale is arbitrary.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import windows

from .array_model import (
    DirectionGrid,
    ElementPatternSet,
    RadiationOperator,
    build_radiation_operator,
    evaluate_pattern,
    uniform_geometry,
    uniform_u_grid,
)

__all__ = [
    "ReferencePattern",
    "dolph_excitations",
    "taylor_excitations",
    "flattop_reference",
    "reference_from_excitations",
    "load_reference",
    "save_reference",
]


@dataclass(frozen=True)
class ReferencePattern:
    """Target far-field samples on a direction grid.

    ``source_excitations`` is populated when the reference was generated from
    a known taper, which lets the metrics evaluate the reference on denser
    grids than the constraint one.
    """

    samples: np.ndarray
    grid: DirectionGrid
    source_excitations: np.ndarray | None = None
    label: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim != 1 or samples.size != len(self.grid):
            raise ValueError("reference sample count must match the direction grid")
        if not np.any(samples):
            raise ValueError("reference pattern is identically zero")
        samples = samples.copy()
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if self.source_excitations is not None:
            src = np.asarray(self.source_excitations, dtype=complex).copy()
            src.setflags(write=False)
            object.__setattr__(self, "source_excitations", src)

    @property
    def n_directions(self) -> int:
        return self.samples.size


def dolph_excitations(n_elements: int, sll_db: float) -> np.ndarray:
    """Dolph-Chebyshev taper with equiripple sidelobes at ``sll_db`` (negative dB)."""
    if n_elements < 2:
        raise ValueError("n_elements must be >= 2")
    if sll_db >= 0:
        raise ValueError("sll_db must be negative (sidelobes below the mainlobe)")
    with warnings.catch_warnings():
        # chebwin warns about spectral-analysis use below 45 dB attenuation
        warnings.simplefilter("ignore", UserWarning)
        w = windows.chebwin(n_elements, at=-sll_db)
    return w / w.max()


def taylor_excitations(n_elements: int, sll_db: float, nbar: int | None = None) -> np.ndarray:
    """Taylor n-bar taper; near-in sidelobes approximate ``sll_db``.

    When ``nbar`` is omitted, uses 6 for designs at -45 dB or below and 4
    otherwise.
    """
    if n_elements < 2:
        raise ValueError("n_elements must be >= 2")
    if sll_db >= 0:
        raise ValueError("sll_db must be negative")
    if nbar is None:
        nbar = 6 if sll_db <= -45.0 else 4
    if nbar < 1:
        raise ValueError("nbar must be >= 1")
    w = windows.taylor(n_elements, nbar=nbar, sll=-sll_db, norm=True)
    return w / w.max()


def reference_from_excitations(
    w,
    H: RadiationOperator,
    grid: DirectionGrid,
    label: str = "",
) -> ReferencePattern:
    """Sample the pattern of a known taper on ``grid`` and peak-normalize it."""
    if len(grid) != H.n_directions:
        raise ValueError("grid length must match the radiation operator")
    w = np.asarray(w, dtype=complex)
    samples = evaluate_pattern(H, w)
    peak = np.abs(samples).max()
    if peak == 0:
        raise ValueError("taper radiates a zero pattern on this grid")
    return ReferencePattern(samples / peak, grid, source_excitations=w / peak, label=label)


def _woodward_beams(n_elements: int, spacing: float):
    """Orthogonal beam-steering directions u_s = s / (N d) inside visible space."""
    step = 1.0 / (n_elements * spacing)
    s_hi = int(np.floor(n_elements * spacing + 1e-9))
    s = np.arange(-s_hi, s_hi + 1)
    u = s * step
    # u = -1 and u = +1 alias to the same steering vector when the array
    # factor period equals the visible range (half-wavelength spacing)
    if u.size >= 2 and (u[-1] - u[0]) >= 1.0 / spacing - 1e-12:
        u = u[:-1]
    return u


def flattop_reference(
    grid: DirectionGrid,
    beam_halfwidth_deg: float,
    sll_db: float,
    n_elements: int,
    spacing: float = 0.5,
) -> ReferencePattern:
    """Flat-top reference built by Woodward-Lawson beam superposition.

    A uniform ``n_elements`` array (``spacing`` wavelengths, isotropic
    elements) is excited by a superposition of orthogonal beams: unit
    amplitude inside |theta| <= halfwidth, zero outside, and a single
    transition beam per side whose amplitude is picked from a coarse scan to
    land the realized sidelobe level closest to ``sll_db``. In-band ripple of
    about +/-0.5 dB is the design goal of the construction.
    """
    if not 0.0 < beam_halfwidth_deg < 90.0:
        raise ValueError("beam halfwidth must lie strictly between 0 and 90 degrees")
    if sll_db >= 0:
        raise ValueError("sll_db must be negative")
    geom = uniform_geometry(n_elements, spacing)
    elems = ElementPatternSet.isotropic(n_elements)

    u_beams = _woodward_beams(n_elements, spacing)
    u_half = np.sin(np.radians(beam_halfwidth_deg))
    in_band = np.abs(u_beams) <= u_half
    if np.count_nonzero(in_band) < 2:
        raise ValueError(
            f"flat region |theta| <= {beam_halfwidth_deg} deg is narrower than the "
            f"beam spacing of an N={n_elements} array; widen it or increase N"
        )
    pos_out = np.flatnonzero(~in_band & (u_beams > 0))
    neg_out = np.flatnonzero(~in_band & (u_beams < 0))
    if pos_out.size < 2 or neg_out.size < 2:
        raise ValueError(
            f"sidelobe region |theta| > {beam_halfwidth_deg} deg leaves fewer than two "
            f"beams per side for an N={n_elements} array; narrow the flat region"
        )
    trans = (neg_out[np.argmax(u_beams[neg_out])], pos_out[np.argmin(u_beams[pos_out])])

    # dense scan used only to pick the transition amplitude; sidelobes are
    # measured beyond the transition beams, where the mask wants them
    dense_grid = uniform_u_grid(max(4096, 16 * n_elements))
    dense = build_radiation_operator(geom, elems, dense_grid)
    step = u_beams[1] - u_beams[0]
    u_stop = np.abs(u_beams[list(trans)]).max() + 0.5 * step
    out_mask = np.abs(dense_grid.u) >= u_stop
    steer = np.exp(-2j * np.pi * np.outer(geom.positions, u_beams)) / n_elements

    def realized_sll(t: float):
        b = in_band.astype(float)
        b[list(trans)] = t
        w = steer @ b
        mag = np.abs(evaluate_pattern(dense, w))
        return w, 20.0 * np.log10(mag[out_mask].max() / mag.max())

    best_w, best_err = None, np.inf
    for t in np.linspace(0.0, 0.95, 20):
        w, sll = realized_sll(t)
        err = abs(sll - sll_db)
        if err < best_err:
            best_w, best_err = w, err

    H = build_radiation_operator(geom, elems, grid)
    ref = reference_from_excitations(best_w, H, grid, label="flattop")
    return ref


def load_reference(path) -> ReferencePattern:
    """Read a reference from CSV with header ``theta_deg, re, im``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: line 1: empty reference file") from None
        if len(header) != 3:
            raise ValueError(f"{path}: line 1: expected header theta_deg, re, im")
        theta, values = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"{path}: line {lineno}: expected 3 fields")
            try:
                t, re, im = (float(v) for v in row)
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric field") from None
            theta.append(t)
            values.append(complex(re, im))
    if not values:
        raise ValueError(f"{path}: no data rows")
    grid = DirectionGrid(np.asarray(theta))
    return ReferencePattern(np.asarray(values), grid, label=str(path))


def save_reference(ref: ReferencePattern, path) -> None:
    """Write a reference as CSV; floats keep full round-trip precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["theta_deg", "re", "im"])
        for theta, value in zip(ref.grid.angles_deg, ref.samples):
            writer.writerow([repr(float(theta)), repr(float(value.real)),
                             repr(float(value.imag))])
