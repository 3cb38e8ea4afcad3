"""Linear-array geometry, element patterns, and the pattern-space radiation operator.

Positions are stored normalized to the wavelength (z/lambda), so the
wavelength itself never appears as a runtime quantity.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ArrayGeometry",
    "ElementPatternSet",
    "DirectionGrid",
    "RadiationOperator",
    "uniform_geometry",
    "uniform_u_grid",
    "uniform_theta_grid",
    "build_radiation_operator",
    "evaluate_pattern",
    "discrete_gradient",
    "gradient_adjoint",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ArrayGeometry:
    """Element z-coordinates of a linear array, in wavelengths, strictly increasing."""

    positions: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 1 or pos.size < 2:
            raise ValueError("array geometry needs at least 2 element positions")
        if not np.all(np.isfinite(pos)):
            raise ValueError("element positions must be finite")
        if not np.all(np.diff(pos) > 0):
            raise ValueError("element positions must be strictly increasing")
        object.__setattr__(self, "positions", _readonly(pos))

    @property
    def n_elements(self) -> int:
        return self.positions.size


def uniform_geometry(n_elements: int, spacing: float = 0.5) -> ArrayGeometry:
    """Centered uniform line array with the given spacing (in wavelengths)."""
    if n_elements < 2:
        raise ValueError("n_elements must be >= 2")
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    pos = (np.arange(n_elements) - (n_elements - 1) / 2.0) * spacing
    return ArrayGeometry(pos)


@dataclass(frozen=True)
class ElementPatternSet:
    """Per-element radiation patterns, either ideal isotropic or tabulated in theta.

    Tabulated patterns are sampled on a shared strictly-increasing grid of
    angles covering [-90, +90] degrees and are interpolated linearly in
    between; one table row per element.
    """

    kind: str
    n_elements: int
    theta_deg: np.ndarray | None = None
    tables: np.ndarray | None = None

    def __post_init__(self):
        if self.n_elements < 1:
            raise ValueError("n_elements must be positive")
        if self.kind == "isotropic":
            if self.theta_deg is not None or self.tables is not None:
                raise ValueError("isotropic pattern set takes no tables")
            return
        if self.kind != "tabulated":
            raise ValueError(f"unknown element-pattern kind {self.kind!r}")
        theta = np.asarray(self.theta_deg, dtype=float)
        tables = np.asarray(self.tables)
        if theta.ndim != 1 or theta.size < 2:
            raise ValueError("pattern table needs at least 2 angle samples")
        if not np.all(np.diff(theta) > 0):
            raise ValueError("pattern table angles must be strictly increasing")
        if theta[0] > -90.0 or theta[-1] < 90.0:
            raise ValueError("pattern tables must cover [-90, +90] degrees")
        if tables.shape != (self.n_elements, theta.size):
            raise ValueError(
                f"expected one table per element, shape ({self.n_elements}, {theta.size}),"
                f" got {tables.shape}"
            )
        if not np.all(np.isfinite(tables)):
            raise ValueError("pattern tables must be finite")
        object.__setattr__(self, "theta_deg", _readonly(theta))
        object.__setattr__(self, "tables", _readonly(tables.astype(complex)))

    @classmethod
    def isotropic(cls, n_elements: int) -> "ElementPatternSet":
        return cls(kind="isotropic", n_elements=n_elements)

    @classmethod
    def tabulated(cls, theta_deg, tables) -> "ElementPatternSet":
        tables = np.asarray(tables)
        return cls(kind="tabulated", n_elements=tables.shape[0],
                   theta_deg=theta_deg, tables=tables)

    @classmethod
    def from_csv(cls, path) -> "ElementPatternSet":
        """Load tables from CSV with header ``theta_deg, re_1, im_1, ..., re_N, im_N``."""
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValueError(f"{path}: line 1: empty element-pattern file") from None
            ncols = len(header)
            if ncols < 3 or (ncols - 1) % 2 != 0:
                raise ValueError(
                    f"{path}: line 1: expected columns theta_deg, re_1, im_1, ..., "
                    f"got {ncols} columns"
                )
            n_elem = (ncols - 1) // 2
            theta, rows = [], []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != ncols:
                    raise ValueError(f"{path}: line {lineno}: expected {ncols} fields")
                try:
                    values = [float(v) for v in row]
                except ValueError:
                    raise ValueError(f"{path}: line {lineno}: non-numeric field") from None
                theta.append(values[0])
                rows.append(values[1:])
        if not rows:
            raise ValueError(f"{path}: no data rows")
        data = np.asarray(rows)
        tables = (data[:, 0::2] + 1j * data[:, 1::2]).T
        return cls.tabulated(np.asarray(theta), tables)

    def evaluate(self, theta_deg) -> np.ndarray:
        """Element responses at the given angles; returns an (n_angles, n_elements) array."""
        theta = np.atleast_1d(np.asarray(theta_deg, dtype=float))
        if self.kind == "isotropic":
            return np.ones((theta.size, self.n_elements))
        lo, hi = self.theta_deg[0], self.theta_deg[-1]
        if theta.min() < lo or theta.max() > hi:
            raise ValueError(
                f"direction {theta.min():+.3f}/{theta.max():+.3f} deg outside "
                f"element-pattern table range [{lo}, {hi}]"
            )
        out = np.empty((theta.size, self.n_elements), dtype=complex)
        for n in range(self.n_elements):
            out[:, n] = np.interp(theta, self.theta_deg, self.tables[n])
        return out


@dataclass(frozen=True)
class DirectionGrid:
    """Far-field sample directions theta_m in degrees, strictly increasing in [-90, +90]."""

    angles_deg: np.ndarray

    def __post_init__(self):
        ang = np.asarray(self.angles_deg, dtype=float)
        if ang.ndim != 1 or ang.size < 1:
            raise ValueError("direction grid must be a non-empty vector")
        if ang[0] < -90.0 or ang[-1] > 90.0:
            raise ValueError("direction angles must lie in [-90, +90] degrees")
        if not np.all(np.diff(ang) > 0):
            raise ValueError("direction angles must be strictly increasing")
        object.__setattr__(self, "angles_deg", _readonly(ang))

    @property
    def n_directions(self) -> int:
        return self.angles_deg.size

    def __len__(self) -> int:
        return self.angles_deg.size

    @property
    def u(self) -> np.ndarray:
        """sin(theta) for every sample direction."""
        return np.sin(np.radians(self.angles_deg))


def uniform_u_grid(m: int) -> DirectionGrid:
    """Grid uniform in u = sin(theta) over [-1, 1]; matches array-factor periodicity."""
    if m < 2:
        raise ValueError("need at least 2 directions")
    u = np.linspace(-1.0, 1.0, m)
    return DirectionGrid(np.degrees(np.arcsin(u)))


def uniform_theta_grid(m: int) -> DirectionGrid:
    if m < 2:
        raise ValueError("need at least 2 directions")
    return DirectionGrid(np.linspace(-90.0, 90.0, m))


@dataclass(frozen=True)
class RadiationOperator:
    """Dense complex matrix mapping element excitations to far-field samples."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2:
            raise ValueError("radiation operator must be a 2-D matrix")
        if not np.all(np.isfinite(mat)):
            raise ValueError("radiation operator entries must be finite")
        object.__setattr__(self, "matrix", _readonly(mat))

    @property
    def n_directions(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_elements(self) -> int:
        return self.matrix.shape[1]


def build_radiation_operator(
    geom: ArrayGeometry,
    elems: ElementPatternSet,
    grid: DirectionGrid,
) -> RadiationOperator:
    """Assemble the operator with entries e_n(theta_m) * exp(j 2 pi z_n sin(theta_m)).

    Requires at least as many directions as elements so the pattern-matching
    constraint is not trivially underdetermined.
    """
    if elems.n_elements != geom.n_elements:
        raise ValueError(
            f"element-pattern count {elems.n_elements} != geometry size {geom.n_elements}"
        )
    if len(grid) < geom.n_elements:
        raise ValueError(
            f"need at least as many directions ({len(grid)}) as elements ({geom.n_elements})"
        )
    phase = np.exp(2j * np.pi * np.outer(grid.u, geom.positions))
    return RadiationOperator(elems.evaluate(grid.angles_deg) * phase)


def evaluate_pattern(H: RadiationOperator, w) -> np.ndarray:
    """Far-field samples H @ w for an excitation vector w."""
    w = np.asarray(w, dtype=complex)
    if w.shape != (H.n_elements,):
        raise ValueError(f"excitation length {w.shape} does not match operator N={H.n_elements}")
    return H.matrix @ w


def discrete_gradient(w) -> np.ndarray:
    """First differences w_{n+1} - w_n, zero-padded in the last entry.

    The padding keeps the output the same length as w so it type-matches the
    auxiliary and multiplier vectors; a zero entry never contributes to the
    l1 norm.
    """
    w = np.asarray(w, dtype=complex)
    if w.ndim != 1 or w.size < 2:
        raise ValueError("need a vector of length >= 2")
    out = np.zeros_like(w)
    out[:-1] = w[1:] - w[:-1]
    return out


def gradient_adjoint(v) -> np.ndarray:
    """Adjoint of :func:`discrete_gradient` under the standard complex inner product."""
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size < 2:
        raise ValueError("need a vector of length >= 2")
    out = np.empty_like(v)
    out[0] = -v[0]
    out[1:-1] = v[:-2] - v[1:-1]
    out[-1] = v[-2]
    return out
