"""Run configuration: JSON documents describing one synthesis problem end to end.

A run is its config: every command is deterministic given the config file.
Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .array_model import (
    ArrayGeometry,
    DirectionGrid,
    ElementPatternSet,
    RadiationOperator,
    build_radiation_operator,
    uniform_geometry,
    uniform_theta_grid,
    uniform_u_grid,
)
from .reference import (
    ReferencePattern,
    dolph_excitations,
    flattop_reference,
    load_reference,
    reference_from_excitations,
    taylor_excitations,
)
from .solver import SolverConfig
from .sweep import SweepPlan

__all__ = ["ConfigError", "DataFileError", "Problem", "load_config", "build_problem"]


class ConfigError(Exception):
    """Invalid or inconsistent run configuration."""


class DataFileError(Exception):
    """A referenced data file exists but its content failed to parse."""


DEFAULTS = {
    "geometry": {"spacing": 0.5},
    "elements": {"kind": "isotropic"},
    "grid": {"kind": "uniform-u"},  # m defaults to 2 * n_elements
    "tau": 0.05,
    "dense_factor": 10,
    "quad_points": 4096,
}


@dataclass(frozen=True)
class Problem:
    """Everything a command needs, resolved from one config document."""

    geom: ArrayGeometry
    elems: ElementPatternSet
    grid: DirectionGrid
    H: RadiationOperator
    f_ref: ReferencePattern
    solver: SolverConfig
    tau: float
    dense_factor: int
    quad_points: int
    plan: Optional[SweepPlan] = None


def load_config(path) -> dict:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return cfg


def _section(cfg: dict, name: str, allowed: set, defaults: dict | None = None) -> dict:
    section = dict(defaults or {})
    given = cfg.get(name, {})
    if not isinstance(given, dict):
        raise ConfigError(f"config section {name!r} must be an object")
    unknown = set(given) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {sorted(unknown)}")
    section.update(given)
    return section


def _resolve(base_dir, path) -> str:
    path = os.path.expanduser(str(path))
    if not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    return path


def _build_geometry(cfg: dict) -> ArrayGeometry:
    sec = _section(cfg, "geometry", {"n_elements", "spacing", "positions"},
                   DEFAULTS["geometry"])
    if "positions" in sec:
        if "n_elements" in sec:
            raise ConfigError("geometry: give either positions or n_elements, not both")
        try:
            return ArrayGeometry(np.asarray(sec["positions"], dtype=float))
        except ValueError as exc:
            raise ConfigError(f"geometry: {exc}") from None
    if "n_elements" not in sec:
        raise ConfigError("geometry: n_elements (or explicit positions) is required")
    try:
        return uniform_geometry(int(sec["n_elements"]), float(sec["spacing"]))
    except ValueError as exc:
        raise ConfigError(f"geometry: {exc}") from None


def _build_elements(cfg: dict, n: int, base_dir) -> ElementPatternSet:
    sec = _section(cfg, "elements", {"kind", "path"}, DEFAULTS["elements"])
    kind = sec.get("kind")
    if kind == "isotropic":
        return ElementPatternSet.isotropic(n)
    if kind != "tabulated":
        raise ConfigError(f"elements: unknown kind {kind!r}")
    if "path" not in sec:
        raise ConfigError("elements: tabulated patterns need a path")
    path = _resolve(base_dir, sec["path"])
    if not os.path.exists(path):
        raise ConfigError(f"element-pattern file not found: {path}")
    try:
        elems = ElementPatternSet.from_csv(path)
    except ValueError as exc:
        raise DataFileError(str(exc)) from None
    if elems.n_elements != n:
        raise ConfigError(
            f"element-pattern file holds {elems.n_elements} elements, geometry has {n}"
        )
    return elems


def _build_grid(cfg: dict, n: int) -> DirectionGrid:
    sec = _section(cfg, "grid", {"m", "kind", "angles"}, DEFAULTS["grid"])
    try:
        if "angles" in sec:
            return DirectionGrid(np.asarray(sec["angles"], dtype=float))
        m = int(sec.get("m") or 2 * n)
        kind = sec.get("kind")
        if kind == "uniform-u":
            return uniform_u_grid(m)
        if kind == "uniform-theta":
            return uniform_theta_grid(m)
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from None
    raise ConfigError(f"grid: unknown kind {sec.get('kind')!r}")


def _build_reference(cfg: dict, geom: ArrayGeometry, elems: ElementPatternSet,
                     grid: DirectionGrid, H: RadiationOperator, base_dir) -> ReferencePattern:
    sec = _section(cfg, "reference",
                   {"generator", "path", "sll_db", "nbar", "halfwidth_deg"})
    if "path" in sec:
        if "generator" in sec:
            raise ConfigError("reference: give either a generator or a path, not both")
        path = _resolve(base_dir, sec["path"])
        if not os.path.exists(path):
            raise ConfigError(f"reference file not found: {path}")
        try:
            ref = load_reference(path)
        except ValueError as exc:
            raise DataFileError(str(exc)) from None
        if ref.n_directions != len(grid) or not np.allclose(
            ref.grid.angles_deg, grid.angles_deg, atol=1e-9
        ):
            raise ConfigError(
                "reference: file grid does not match the configured direction grid"
            )
        return ref

    gen = sec.get("generator")
    if gen is None:
        raise ConfigError("reference: generator or path is required")
    try:
        if gen == "dolph":
            w = dolph_excitations(geom.n_elements, float(sec["sll_db"]))
            return reference_from_excitations(w, H, grid, label="dolph")
        if gen == "taylor":
            nbar = sec.get("nbar")
            w = taylor_excitations(geom.n_elements, float(sec["sll_db"]),
                                   None if nbar is None else int(nbar))
            return reference_from_excitations(w, H, grid, label="taylor")
        if gen == "flattop":
            spacing = np.diff(geom.positions)
            if not np.allclose(spacing, spacing[0], atol=1e-12):
                raise ConfigError("reference: flattop needs a uniform geometry")
            ref = flattop_reference(grid, float(sec["halfwidth_deg"]),
                                    float(sec["sll_db"]), geom.n_elements,
                                    spacing=float(spacing[0]))
            if elems.kind != "isotropic":
                # the flat-top target is an ideal-element construction; its
                # excitations do not reproduce it through tabulated elements
                ref = ReferencePattern(ref.samples, ref.grid, None, ref.label)
            return ref
    except KeyError as exc:
        raise ConfigError(f"reference: missing parameter {exc.args[0]!r} for {gen}") from None
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"reference: {exc}") from None
    raise ConfigError(f"reference: unknown generator {gen!r}")


def _build_solver(cfg: dict) -> SolverConfig:
    fields = {"beta", "gamma", "nu", "delta", "max_iter", "backtrack_shrink",
              "backtrack_max"}
    sec = _section(cfg, "solver", fields)
    kwargs = {}
    for key in fields & set(sec):
        kwargs[key] = int(sec[key]) if key in ("max_iter", "backtrack_max") else float(sec[key])
    try:
        return SolverConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"solver: {exc}") from None


def _build_plan(cfg: dict, solver: SolverConfig, tau: float) -> Optional[SweepPlan]:
    if "sweep" not in cfg:
        return None
    sec = _section(cfg, "sweep", {"gamma_values", "beta_values", "tau_values"})
    if "gamma_values" not in sec:
        raise ConfigError("sweep: gamma_values is required")
    try:
        return SweepPlan(
            gamma_values=tuple(sec["gamma_values"]),
            beta_values=tuple(sec.get("beta_values", ())),
            tau_values=tuple(sec.get("tau_values", (tau,))),
            fixed=solver,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"sweep: {exc}") from None


def build_problem(cfg: dict, base_dir=".") -> Problem:
    known = {"geometry", "elements", "grid", "reference", "solver", "tau",
             "dense_factor", "quad_points", "sweep"}
    unknown = set(cfg) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    geom = _build_geometry(cfg)
    elems = _build_elements(cfg, geom.n_elements, base_dir)
    grid = _build_grid(cfg, geom.n_elements)
    try:
        H = build_radiation_operator(geom, elems, grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    f_ref = _build_reference(cfg, geom, elems, grid, H, base_dir)

    solver = _build_solver(cfg)
    tau = float(cfg.get("tau", DEFAULTS["tau"]))
    if not 0.0 < tau < 1.0:
        raise ConfigError("tau must lie strictly between 0 and 1")
    dense_factor = int(cfg.get("dense_factor", DEFAULTS["dense_factor"]))
    quad_points = int(cfg.get("quad_points", DEFAULTS["quad_points"]))
    if dense_factor < 1 or quad_points < 16:
        raise ConfigError("dense_factor must be >= 1 and quad_points >= 16")
    plan = _build_plan(cfg, solver, tau)
    return Problem(geom=geom, elems=elems, grid=grid, H=H, f_ref=f_ref,
                   solver=solver, tau=tau, dense_factor=dense_factor,
                   quad_points=quad_points, plan=plan)
