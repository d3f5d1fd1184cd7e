"""Result container shared by all bound computations."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np


class BoundKind(str, Enum):
    LHV = "LHV"
    NS = "NS"
    ML = "ML"
    SEESAW = "SEESAW"


@dataclass
class BoundReport:
    kind: BoundKind
    value: float
    certificate: Any
    tolerance: float = 0.0
    diagnostics: dict = field(default_factory=dict)
    exact: Any = None  # Fraction for LHV

    def to_dict(self, certificate_ref: str | None = None) -> dict:
        d = {
            "kind": self.kind.value,
            "value": self.value,
            "tolerance": self.tolerance,
            "certificate_ref": certificate_ref,
            "diagnostics": _jsonable(self.diagnostics),
        }
        if self.exact is not None:
            d["exact"] = str(self.exact)
        return d

    def write(self, path, sidecar: bool = True) -> Path:
        """Write the JSON report and, optionally, the certificate next to it."""
        path = Path(path)
        ref = None
        if sidecar and self.certificate is not None:
            ref = path.with_suffix(".cert.json").name
            (path.parent / ref).write_text(json.dumps(certificate_to_json(self.certificate)))
        path.write_text(json.dumps(self.to_dict(ref), indent=2))
        return path


def certificate_to_json(cert) -> dict:
    from ..game import Box, DeterministicStrategy
    from ..quantum import QuantumStrategy

    if isinstance(cert, tuple) and len(cert) == 2 and isinstance(cert[0], DeterministicStrategy):
        return {"type": "deterministic", "alice": list(cert[0].outcomes), "bob": list(cert[1].outcomes)}
    if isinstance(cert, Box):
        return {"type": "box", **cert.to_dict()}
    if isinstance(cert, QuantumStrategy):
        return {"type": "quantum", **cert.to_dict()}
    if isinstance(cert, np.ndarray):
        return {"type": "moment_matrix", "dims": list(cert.shape), "data": cert.ravel().tolist()}
    return {"type": type(cert).__name__, "repr": repr(cert)}


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, Enum):
        return v.value
    return v
