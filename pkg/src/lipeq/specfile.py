"""YAML spec files describing an IFS and, optionally, a hand-built partition.

::

    name: five-map-a           # optional, used in reports and figure titles
    dim: 1
    lambda: 1/6
    maps:                      # one entry per map; 2D entries are [x, y]
      - "0"
      - "l*(1-l)"
    custom_partition:          # optional
      pieces:
        - base: [4]
          minus: [[4, 2]]
      edges:
        - {from: 4, via: [4], to: [1, 3, 4, 5, 6]}
    analysis:                  # optional defaults for CLI flags
      depth: 4
      tol: 1.0e-12
      seed: 0
      cap: 10000000
      pairs: 500
      sample_depth: 5
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .algebra import ExprSyntaxError, as_rational
from .gds import PieceSpec
from .ifs_model import HomogeneousIFS

ANALYSIS_KEYS = {"depth", "tol", "seed", "cap", "pairs", "sample_depth", "box_depth"}


class SpecError(ValueError):
    pass


@dataclass
class SpecFile:
    name: str
    dim: int
    lam: str
    maps: list
    pieces: list[PieceSpec] | None = None
    edges: list[tuple[int, int, tuple[int, ...]]] | None = None
    analysis: dict = field(default_factory=dict)

    @property
    def custom(self) -> bool:
        return self.pieces is not None

    def ifs(self) -> HomogeneousIFS:
        return HomogeneousIFS.from_exprs(self.lam, self.maps)


def _word(x, what) -> tuple[int, ...]:
    if isinstance(x, int):
        return (x,)
    if not isinstance(x, list) or not all(isinstance(i, int) for i in x):
        raise SpecError(f"{what} must be a list of map indices, got {x!r}")
    return tuple(x)


def parse_spec(data, name: str = "spec") -> SpecFile:
    if not isinstance(data, dict):
        raise SpecError("spec must be a mapping")
    missing = {"lambda", "maps"} - data.keys()
    if missing:
        raise SpecError(f"missing keys: {sorted(missing)}")
    dim = data.get("dim", 1)
    if dim not in (1, 2):
        raise SpecError(f"dim must be 1 or 2, got {dim!r}")
    maps = data["maps"]
    if not isinstance(maps, list) or len(maps) < 2:
        raise SpecError("maps must list at least two translations")
    rows = []
    for i, t in enumerate(maps, start=1):
        t = t if isinstance(t, list) else [t]
        if len(t) != dim:
            raise SpecError(f"map {i} has {len(t)} coordinates, expected {dim}")
        rows.append([str(x) for x in t])
    lam = str(data["lambda"])
    try:
        as_rational(lam)
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"lambda must be an exact rational like 1/6: {exc}") from None

    spec = SpecFile(str(data.get("name", name)), dim, lam, rows)
    analysis = data.get("analysis") or {}
    unknown = set(analysis) - ANALYSIS_KEYS
    if unknown:
        raise SpecError(f"unknown analysis keys: {sorted(unknown)}")
    spec.analysis = dict(analysis)

    custom = data.get("custom_partition")
    if custom is not None:
        pieces = []
        for p in custom.get("pieces", []):
            pieces.append(PieceSpec(_word(p.get("base", []), "base"),
                                    tuple(_word(u, "minus") for u in p.get("minus", []))))
        edges = []
        for e in custom.get("edges", []):
            src, via, to = e.get("from"), _word(e.get("via"), "via"), e.get("to")
            targets = to if isinstance(to, list) else [to]
            edges += [(int(src), int(t), via) for t in targets]
        if not pieces or not edges:
            raise SpecError("custom_partition needs pieces and edges")
        spec.pieces, spec.edges = pieces, edges
    return spec


def load_spec(path) -> SpecFile:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise SpecError(f"{path}: invalid YAML: {exc}") from None
    spec = parse_spec(data, name=path.stem)
    try:
        spec.ifs()
    except ExprSyntaxError:
        raise
    except ValueError as exc:
        raise SpecError(f"{path}: {exc}") from None
    return spec
