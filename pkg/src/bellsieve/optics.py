"""Optical elements and the circuit engine.

The beam splitter is 50-50 and symmetric: transmission amplitude 1/sqrt(2),
reflection i/sqrt(2).  A reflection flips the transverse y-coordinate, so a
photon with odd y-parity acquires an extra sign on reflection; the
`reflect_flips_y` flag turns that parity sign on/off per element.

Polarizing beam splitters act in a rotated linear basis {theta, theta+90}:
the theta component transmits (in1 -> out_t, in2 -> out_r), the orthogonal
component reflects (in1 -> out_r, in2 -> out_t) with amplitude factor
i * sigma(parity).  Wave plates are standard retarders about their fast axis.
Delays only record their offset on the state (distinguishability is applied
statistically by the analysis layer).

Circuits are ordered element lists over a registry of named paths, applied
left to right; every element conserves the photon-pair norm.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .twophoton import (
    H,
    ODD,
    PhotonMode,
    TwoPhotonState,
    V,
    apply_mode_map,
    normalize_angle,
    rebase_path,
)

SQRT2 = math.sqrt(2.0)


class CircuitSchemaError(ValueError):
    """Raised for malformed circuit documents."""


@dataclass(frozen=True)
class BeamSplitter:
    in1: str
    in2: str
    out1: str
    out2: str
    reflect_flips_y: bool = True


@dataclass(frozen=True)
class PolarizingBS:
    in1: str
    out_t: str
    out_r: str
    in2: Optional[str] = None
    basis_angle: float = 0.0
    reflect_flips_y: bool = True

    def __post_init__(self) -> None:
        a = float(self.basis_angle)
        if not 0.0 <= a < 180.0:
            raise ValueError("basis_angle must lie in [0, 180)")


@dataclass(frozen=True)
class WavePlate:
    path: str
    kind: str  # "half" | "quarter"
    fast_axis: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("half", "quarter"):
            raise ValueError("wave plate kind must be 'half' or 'quarter'")


@dataclass(frozen=True)
class Delay:
    path: str
    delta: float  # meters


@dataclass(frozen=True)
class Mirror:
    path: str
    flips_y: bool = True


Element = Union[BeamSplitter, PolarizingBS, WavePlate, Delay, Mirror]


def _element_paths(el: Element) -> Tuple[str, ...]:
    if isinstance(el, BeamSplitter):
        return (el.in1, el.in2, el.out1, el.out2)
    if isinstance(el, PolarizingBS):
        return tuple(p for p in (el.in1, el.in2, el.out_t, el.out_r) if p is not None)
    return (el.path,)


@dataclass(frozen=True)
class Circuit:
    paths: Tuple[str, ...]
    elements: Tuple[Element, ...]
    inputs: Tuple[str, ...] = ()
    name: str = ""
    version: int = 1
    layout: Optional[dict] = None  # optional bundled detector layout document

    def __post_init__(self) -> None:
        registry = set(self.paths)
        if len(registry) != len(self.paths):
            raise ValueError("duplicate path labels in registry")
        for el in self.elements:
            for p in _element_paths(el):
                if p not in registry:
                    raise ValueError(f"element references unregistered path {p!r}")
        for p in self.inputs:
            if p not in registry:
                raise ValueError(f"input path {p!r} not registered")


def _sigma(parity: str, flips: bool) -> float:
    return -1.0 if (flips and parity == ODD) else 1.0


def _modes_on(state: TwoPhotonState, paths: Sequence[str]) -> List[PhotonMode]:
    seen = {}
    for m1, m2 in state.terms:
        for m in (m1, m2):
            if m.path in paths:
                seen[m] = None
    return list(seen)


def _check_outputs_free(state: TwoPhotonState, ins: Sequence[str], outs: Sequence[str]) -> None:
    populated = state.paths()
    blocked = (set(outs) & populated) - set(ins)
    if blocked:
        raise ValueError(f"output paths already populated: {sorted(blocked)}")


def apply_beam_splitter(state: TwoPhotonState, bs: BeamSplitter) -> TwoPhotonState:
    """50-50 symmetric splitter lifted to the pair state.

    a(in1) -> [a(out1) + i sigma(parity) a(out2)]/sqrt(2) and the mirrored rule
    for in2; polarization-independent, so both inputs are first rewritten in
    the common h/v basis.
    """
    _check_outputs_free(state, (bs.in1, bs.in2), (bs.out1, bs.out2))
    state = rebase_path(state, bs.in1, H)
    state = rebase_path(state, bs.in2, H)
    mapping = {}
    for m in _modes_on(state, (bs.in1, bs.in2)):
        s = _sigma(m.parity, bs.reflect_flips_y)
        if m.path == bs.in1:
            straight, cross = bs.out1, bs.out2
        else:
            straight, cross = bs.out2, bs.out1
        mapping[m] = (
            (m.with_path(straight), 1.0 / SQRT2),
            (m.with_path(cross), 1j * s / SQRT2),
        )
    return apply_mode_map(state, mapping)


def apply_pbs(state: TwoPhotonState, pbs: PolarizingBS) -> TwoPhotonState:
    """Polarizing splitter in the rotated basis {theta, theta+90}."""
    ins = tuple(p for p in (pbs.in1, pbs.in2) if p is not None)
    _check_outputs_free(state, ins, (pbs.out_t, pbs.out_r))
    theta = normalize_angle(pbs.basis_angle)
    phi = normalize_angle(theta + 90.0)
    for p in ins:
        state = rebase_path(state, p, theta)
    mapping = {}
    for m in _modes_on(state, ins):
        refl = 1j * _sigma(m.parity, pbs.reflect_flips_y)
        first = m.path == pbs.in1
        if m.pol == theta:
            mapping[m] = ((m.with_path(pbs.out_t if first else pbs.out_r), 1.0),)
        elif m.pol == phi:
            mapping[m] = ((m.with_path(pbs.out_r if first else pbs.out_t), refl),)
        else:  # pragma: no cover - rebase guarantees one of the two labels
            raise AssertionError("mode not in PBS basis after rebase")
    return apply_mode_map(state, mapping)


def waveplate_jones(kind: str, fast_axis: float) -> np.ndarray:
    """Jones matrix of a retarder about `fast_axis` (degrees) in the h/v basis.

    Retardance pi for a half-wave plate, pi/2 for a quarter-wave plate; the
    slow axis is delayed: J = R(phi) diag(1, e^{-i delta}) R(-phi).
    """
    delta = math.pi if kind == "half" else math.pi / 2.0
    phi = math.radians(fast_axis)
    c, s = math.cos(phi), math.sin(phi)
    rot = np.array([[c, -s], [s, c]])
    return rot @ np.diag([1.0, np.exp(-1j * delta)]) @ rot.T


def apply_waveplate(state: TwoPhotonState, wp: WavePlate) -> TwoPhotonState:
    state = rebase_path(state, wp.path, H)
    jones = waveplate_jones(wp.kind, wp.fast_axis)
    mapping = {}
    for m in _modes_on(state, (wp.path,)):
        col = 0 if m.pol == H else 1
        mapping[m] = (
            (m.with_pol(H), jones[0, col]),
            (m.with_pol(V), jones[1, col]),
        )
    return apply_mode_map(state, mapping)


def apply_delay(state: TwoPhotonState, delay: Delay) -> TwoPhotonState:
    """Record the optical delay; amplitudes are untouched."""
    delays = dict(state.delays)
    delays[delay.path] = delays.get(delay.path, 0.0) + delay.delta
    return TwoPhotonState(dict(state.terms), delays)


def apply_mirror(state: TwoPhotonState, mirror: Mirror) -> TwoPhotonState:
    if not mirror.flips_y:
        return state
    mapping = {}
    for m in _modes_on(state, (mirror.path,)):
        if m.parity == ODD:
            mapping[m] = ((m, -1.0),)
    return apply_mode_map(state, mapping) if mapping else state


def apply_element(state: TwoPhotonState, el: Element) -> TwoPhotonState:
    if isinstance(el, BeamSplitter):
        return apply_beam_splitter(state, el)
    if isinstance(el, PolarizingBS):
        return apply_pbs(state, el)
    if isinstance(el, WavePlate):
        return apply_waveplate(state, el)
    if isinstance(el, Delay):
        return apply_delay(state, el)
    if isinstance(el, Mirror):
        return apply_mirror(state, el)
    raise TypeError(f"unknown element {el!r}")


def run_circuit(circuit: Circuit, state: TwoPhotonState) -> TwoPhotonState:
    """Apply the circuit's elements left to right and renormalize exactly.

    A norm drift beyond 1e-9 indicates a broken element map and raises.
    """
    unknown = state.paths() - set(circuit.paths)
    if unknown:
        raise ValueError(f"state occupies unregistered paths: {sorted(unknown)}")
    out = state
    for el in circuit.elements:
        out = apply_element(out, el)
    norm = math.sqrt(out.norm_sq())
    if abs(norm - 1.0) > 1e-9:
        raise RuntimeError(f"internal error: circuit norm drifted to {norm!r}")
    terms = {k: a / norm for k, a in out.terms.items()}
    return TwoPhotonState(terms, dict(out.delays))


# ---------------------------------------------------------------------------
# JSON schema: {"paths": [...], "elements": [{"type": ..., ...}, ...]}


def element_to_json(el: Element) -> dict:
    if isinstance(el, BeamSplitter):
        return {"type": "beam_splitter", "in1": el.in1, "in2": el.in2,
                "out1": el.out1, "out2": el.out2, "reflect_flips_y": el.reflect_flips_y}
    if isinstance(el, PolarizingBS):
        return {"type": "polarizing_bs", "in1": el.in1, "in2": el.in2,
                "out_t": el.out_t, "out_r": el.out_r,
                "basis_angle": el.basis_angle, "reflect_flips_y": el.reflect_flips_y}
    if isinstance(el, WavePlate):
        return {"type": "wave_plate", "path": el.path, "kind": el.kind,
                "fast_axis": el.fast_axis}
    if isinstance(el, Delay):
        return {"type": "delay", "path": el.path, "delta": el.delta}
    if isinstance(el, Mirror):
        return {"type": "mirror", "path": el.path, "flips_y": el.flips_y}
    raise TypeError(f"unknown element {el!r}")


def _require(doc: dict, key: str, el_type: str):
    if key not in doc:
        raise CircuitSchemaError(f"{el_type} element missing field {key!r}")
    return doc[key]


def element_from_json(doc: dict) -> Element:
    if not isinstance(doc, dict) or "type" not in doc:
        raise CircuitSchemaError("element must be an object with a 'type' field")
    t = doc["type"]
    try:
        if t == "beam_splitter":
            return BeamSplitter(
                in1=_require(doc, "in1", t), in2=_require(doc, "in2", t),
                out1=_require(doc, "out1", t), out2=_require(doc, "out2", t),
                reflect_flips_y=bool(doc.get("reflect_flips_y", True)))
        if t == "polarizing_bs":
            return PolarizingBS(
                in1=_require(doc, "in1", t), in2=doc.get("in2"),
                out_t=_require(doc, "out_t", t), out_r=_require(doc, "out_r", t),
                basis_angle=float(doc.get("basis_angle", 0.0)),
                reflect_flips_y=bool(doc.get("reflect_flips_y", True)))
        if t == "wave_plate":
            return WavePlate(path=_require(doc, "path", t), kind=_require(doc, "kind", t),
                             fast_axis=float(doc.get("fast_axis", 0.0)))
        if t == "delay":
            return Delay(path=_require(doc, "path", t), delta=float(_require(doc, "delta", t)))
        if t == "mirror":
            return Mirror(path=_require(doc, "path", t), flips_y=bool(doc.get("flips_y", True)))
    except (ValueError, TypeError) as exc:
        raise CircuitSchemaError(f"bad {t} element: {exc}") from exc
    raise CircuitSchemaError(f"unknown element type {t!r}")


def circuit_to_json(circuit: Circuit) -> dict:
    doc = {
        "version": circuit.version,
        "name": circuit.name,
        "paths": list(circuit.paths),
        "inputs": list(circuit.inputs),
        "elements": [element_to_json(el) for el in circuit.elements],
    }
    if circuit.layout is not None:
        doc["layout"] = circuit.layout
    return doc


def circuit_from_json(doc: dict) -> Circuit:
    if not isinstance(doc, dict):
        raise CircuitSchemaError("circuit document must be a JSON object")
    for key in ("paths", "elements"):
        if key not in doc:
            raise CircuitSchemaError(f"circuit document missing {key!r}")
    if not isinstance(doc["paths"], list) or not all(isinstance(p, str) for p in doc["paths"]):
        raise CircuitSchemaError("'paths' must be a list of strings")
    if not isinstance(doc["elements"], list):
        raise CircuitSchemaError("'elements' must be a list")
    elements = tuple(element_from_json(e) for e in doc["elements"])
    try:
        return Circuit(
            paths=tuple(doc["paths"]),
            elements=elements,
            inputs=tuple(doc.get("inputs", ())),
            name=str(doc.get("name", "")),
            version=int(doc.get("version", 1)),
            layout=doc.get("layout"),
        )
    except ValueError as exc:
        raise CircuitSchemaError(str(exc)) from exc


def load_circuit(path: str) -> Circuit:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CircuitSchemaError(f"invalid JSON in {path}: {exc}") from exc
    return circuit_from_json(doc)


def save_circuit(circuit: Circuit, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(circuit_to_json(circuit), fh, indent=2, sort_keys=True)
        fh.write("\n")
