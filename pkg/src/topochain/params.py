"""Circuit parameterization and config-file ingestion.

CircuitParams is the single source of truth every matrix in the package is
assembled from.  Time dependence is e^{-i*omega*t} throughout; a decaying
natural mode therefore has its decay rate equal to |Im omega|, and the
dissipative poles sit at omega = i/(R*C) on the positive imaginary axis.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .errors import InvalidParams, MissingKey, UnknownKey


class Boundary(enum.Enum):
    PERIODIC = "periodic"
    OPEN = "open"


# |eta| below this is treated as an exact pole hit; the poles are isolated
# algebraic points so only exact-hit protection is needed.
ETA_FLOOR = 1e-14
OMEGA_FLOOR = 1e-14


@dataclass(frozen=True)
class CircuitParams:
    """Element values of the alternating RC ladder over grounded inductors.

    r1, c1 form the intracell series pair, r2, c2 the intercell pair; every
    node carries one grounded inductor l.  Units are SI (ohm, farad, henry).
    """

    r1: float
    r2: float
    c1: float
    c2: float
    l: float
    n_cells: int = 2
    boundary: Boundary = Boundary.OPEN

    def __post_init__(self) -> None:
        if self.r1 < 0 or self.r2 < 0:
            raise InvalidParams(f"resistances must be >= 0, got r1={self.r1}, r2={self.r2}")
        for name in ("c1", "c2", "l"):
            if getattr(self, name) <= 0:
                raise InvalidParams(f"{name} must be > 0, got {getattr(self, name)}")
        if int(self.n_cells) != self.n_cells or self.n_cells < 2:
            raise InvalidParams(f"n_cells must be an integer >= 2, got {self.n_cells}")
        if not isinstance(self.boundary, Boundary):
            raise InvalidParams(f"boundary must be a Boundary, got {self.boundary!r}")

    @property
    def hermitian(self) -> bool:
        return self.r1 == 0.0 and self.r2 == 0.0

    def pole_frequencies(self) -> tuple[complex, complex]:
        """The two dissipation poles i/(R1 C1), i/(R2 C2); inf for R=0."""
        p1 = 1j / (self.r1 * self.c1) if self.r1 > 0 else complex("inf")
        p2 = 1j / (self.r2 * self.c2) if self.r2 > 0 else complex("inf")
        return p1, p2

    def replace(self, **kw: Any) -> "CircuitParams":
        data = {
            "r1": self.r1, "r2": self.r2, "c1": self.c1, "c2": self.c2,
            "l": self.l, "n_cells": self.n_cells, "boundary": self.boundary,
        }
        data.update(kw)
        return CircuitParams(**data)

    def to_dict(self) -> dict[str, Any]:
        return {
            "r1": self.r1, "r2": self.r2, "c1": self.c1, "c2": self.c2,
            "l": self.l, "n_cells": self.n_cells,
            "boundary": self.boundary.value,
        }


_CIRCUIT_KEYS = {"r1", "r2", "c1", "c2", "l", "n_cells", "boundary"}
_REQUIRED_KEYS = {"r1", "r2", "c1", "c2", "l"}


def circuit_from_mapping(section: Mapping[str, Any], prefix: str = "circuit") -> CircuitParams:
    """Build CircuitParams from a config section, naming offending keys."""
    unknown = set(section) - _CIRCUIT_KEYS
    if unknown:
        raise UnknownKey(f"{prefix}.{sorted(unknown)[0]}")
    missing = _REQUIRED_KEYS - set(section)
    if missing:
        raise MissingKey(f"{prefix}.{sorted(missing)[0]}")
    kw: dict[str, Any] = {}
    for key in _REQUIRED_KEYS:
        value = section[key]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise InvalidParams(f"{prefix}.{key}: expected a number, got {value!r}")
        kw[key] = float(value)
    if "n_cells" in section:
        n = section["n_cells"]
        if isinstance(n, bool) or not isinstance(n, int):
            raise InvalidParams(f"{prefix}.n_cells: expected an integer, got {n!r}")
        kw["n_cells"] = n
    if "boundary" in section:
        b = section["boundary"]
        try:
            kw["boundary"] = Boundary(str(b).lower())
        except ValueError:
            raise InvalidParams(
                f"{prefix}.boundary: expected 'periodic' or 'open', got {b!r}"
            ) from None
    return CircuitParams(**kw)


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a JSON config file; the 'circuit' section is validated here."""
    p = Path(path)
    try:
        raw = json.loads(p.read_text())
    except FileNotFoundError:
        raise MissingKey(f"config file not found: {p}") from None
    except json.JSONDecodeError as exc:
        raise InvalidParams(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise InvalidParams("config root must be a JSON object")
    if "circuit" not in raw:
        raise MissingKey("circuit")
    if not isinstance(raw["circuit"], dict):
        raise InvalidParams("circuit: expected an object")
    # validate eagerly so the CLI fails before any computation starts
    circuit_from_mapping(raw["circuit"])
    return raw
