"""Command-line interface.

Subcommands:
  bsa    signature table + discrimination report for a Bell-state analyzer
  hom    two-photon interference scan over a relative-delay grid (CSV)
  field  coincidence-amplitude magnitude map over (x1, y1), r2 fixed (CSV)

Bundled golden circuits ("incomplete_bsa", "complete_bsa") are resolved from
the package fixtures; the BELLSIEVE_FIXTURES environment variable overrides
the fixture directory.  Exit codes: 0 success, 2 invalid configuration,
3 circuit schema error.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from importlib import resources
from typing import List, Optional, Sequence, Tuple

from . import analysis, hgmodes, twophoton
from .analysis import OverlapModel, layout_from_json
from .hgmodes import DetectorPoint, PumpProfile, coincidence_amplitude
from .optics import Circuit, CircuitSchemaError, load_circuit
from .twophoton import BELL_KINDS


class ConfigError(ValueError):
    pass


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def fixtures_dir() -> str:
    env = os.environ.get("BELLSIEVE_FIXTURES")
    if env:
        return env
    return str(resources.files("bellsieve") / "fixtures")


def resolve_circuit(spec: str) -> Circuit:
    candidates = [spec]
    base = spec if spec.endswith(".json") else spec + ".json"
    candidates.append(os.path.join(fixtures_dir(), base))
    for cand in candidates:
        if os.path.exists(cand):
            return load_circuit(cand)
    raise ConfigError(f"circuit {spec!r} not found (searched {candidates})")


_HG_RE = re.compile(r"^hg[\s:(]*(\d+)\s*[,:]?\s*(\d+)\)?$", re.IGNORECASE)


def parse_pump(spec: str, waist: float, wavelength: float) -> PumpProfile:
    s = spec.strip().lower()
    if s in ("gauss", "gaussian", "hg00"):
        return hgmodes.hg_pump(0, 0, waist, wavelength)
    if s == "hg01":
        return hgmodes.hg_pump(0, 1, waist, wavelength)
    m = _HG_RE.match(s)
    if m:
        return hgmodes.hg_pump(int(m.group(1)), int(m.group(2)), waist, wavelength)
    raise ConfigError(f"cannot parse pump {spec!r} (expected gauss, hg01 or hg(m,n))")


def parse_state_kind(spec: str) -> Tuple[str, bool]:
    """Returns (bell kind, hyper flag)."""
    s = spec.strip().lower()
    hyper = s.startswith("hyper-")
    if hyper:
        s = s[len("hyper-"):]
    if s not in BELL_KINDS:
        raise ConfigError(f"unknown state {spec!r} (expected psi+|psi-|phi+|phi- or hyper-...)")
    return s, hyper


def parse_delays(spec: str) -> List[float]:
    """Delay grid 'from:to:step' in micrometers, inclusive endpoints."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError("delays must be from:to:step (micrometers)")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad delay grid {spec!r}: {exc}") from exc
    if step <= 0 or hi < lo:
        raise ConfigError("delay grid needs step > 0 and to >= from")
    out = []
    k = 0
    while True:
        v = lo + k * step
        if v > hi + 1e-9 * max(abs(hi), 1.0):
            break
        out.append(v)
        k += 1
    if not out:
        raise ConfigError("delay grid is empty")
    return out


def parse_grid(spec: str) -> Tuple[float, float, int]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError("grid must be min:max:npoints (meters)")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        n = int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad grid {spec!r}: {exc}") from exc
    if n < 2 or hi <= lo:
        raise ConfigError("grid needs npoints >= 2 and max > min")
    return lo, hi, n


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_bsa(args: argparse.Namespace) -> int:
    circuit = resolve_circuit(args.circuit)
    pump = parse_pump(args.pump, args.waist, args.pump_wavelength)
    if circuit.layout is None:
        raise ConfigError(f"circuit {circuit.name!r} bundles no detector layout")
    layout = layout_from_json(circuit.layout)

    if args.all_bell or args.all_hyper:
        hyper = bool(args.all_hyper)
        inputs = analysis.prepare_inputs(circuit, pump, hyper=hyper)
    elif args.state:
        kind, hyper = parse_state_kind(args.state)
        if hyper:
            state = twophoton.hyper_state(kind, circuit.inputs)
        else:
            if len(circuit.inputs) != 2:
                raise ConfigError("plain Bell input needs a two-input circuit")
            state = twophoton.bell_state(kind, circuit.inputs[0], circuit.inputs[1])
        inputs = [(args.state, twophoton.attach_pump_parity(state, pump))]
    else:
        raise ConfigError("choose --all-bell, --all-hyper or --state")

    table = analysis.signature_table(
        circuit, inputs, layout, pump_parity=pump.joint_parity, overlap=args.overlap
    )
    report = analysis.classify(table)
    success = analysis.success_probability(
        circuit, layout, pump, overlap=args.overlap, policy=args.policy
    ) if len(inputs) == 4 else None

    if args.format == "csv":
        lines = ["state,event,probability"]
        for label in sorted(table.entries):
            for ev, p in sorted(table.entries[label].items()):
                lines.append(f"{label},{'|'.join(ev)},{_fmt(p)}")
        _emit("\n".join(lines) + "\n", args.out)
        return 0

    doc = {
        "circuit": circuit.name or args.circuit,
        "pump": {
            "m": pump.mode.m,
            "n": pump.mode.n,
            "waist_m": pump.mode.waist,
            "wavelength_m": pump.mode.wavelength,
            "joint_parity": pump.joint_parity,
        },
        "signature_table": table.to_json(),
        "report": {
            "classes": [list(c) for c in report.classes],
            "bits": report.bits,
            "coincidence_basis_only": analysis.coincidence_basis_only(table),
        },
    }
    if success is not None:
        doc["report"]["success"] = success.to_json()
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def cmd_hom(args: argparse.Namespace) -> int:
    pump = parse_pump(args.pump, args.waist, args.pump_wavelength)
    kind, hyper = parse_state_kind(args.state)
    if hyper:
        raise ConfigError("hom scans take plain Bell states")
    deltas_um = parse_delays(args.delays)
    sigma_l = args.sigma_l * 1e-6 if args.sigma_l else analysis.DEFAULT_SIGMA_L
    model = OverlapModel(sigma_l=sigma_l)
    curve = analysis.hom_scan(kind, pump, [d * 1e-6 for d in deltas_um], model)
    header = (
        f"# pump=hg{pump.mode.m}{pump.mode.n} state={args.state} "
        f"sigma_l_um={_fmt(sigma_l * 1e6)}\n"
    )
    lines = [header + "delta_um,p_coinc"]
    for d_um, (_, p) in zip(deltas_um, curve):
        lines.append(f"{_fmt(d_um)},{_fmt(p)}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_field(args: argparse.Namespace) -> int:
    pump = parse_pump(args.pump, args.waist, args.pump_wavelength)
    kind, hyper = parse_state_kind(args.state)
    if hyper:
        raise ConfigError("field maps take plain Bell states")
    if args.z <= 0:
        raise ConfigError("detection plane z must be positive")
    lo, hi, n = parse_grid(args.grid)
    step = (hi - lo) / (n - 1)
    r2 = DetectorPoint(args.x2, args.y2, args.z)
    header = (
        f"# pump=hg{pump.mode.m}{pump.mode.n} state={args.state} "
        f"z_m={_fmt(args.z)} K_per_m={_fmt(pump.wave_number)} "
        f"x2_m={_fmt(args.x2)} y2_m={_fmt(args.y2)}\n"
    )
    lines = [header + "x1_m,y1_m,re,im,abs2"]
    for iy in range(n):
        y1 = lo + iy * step
        for ix in range(n):
            x1 = lo + ix * step
            amp, _ = coincidence_amplitude(kind, pump, DetectorPoint(x1, y1, args.z), r2)
            lines.append(
                f"{_fmt(x1)},{_fmt(y1)},{_fmt(amp.real)},{_fmt(amp.imag)},{_fmt(abs(amp) ** 2)}"
            )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellsieve",
        description="Two-photon Bell-state analysis with pump-parity-controlled interference",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_pump_opts(p: argparse.ArgumentParser) -> None:
        p.add_argument("--pump", default="gauss",
                       help="pump profile: gauss | hg01 | hg(m,n) (default gauss)")
        p.add_argument("--waist", type=float, default=hgmodes.DEFAULT_WAIST,
                       help="pump waist in meters (default 1e-3)")
        p.add_argument("--pump-wavelength", type=float, default=hgmodes.PUMP_WAVELENGTH,
                       help="pump wavelength in meters (default 351.1e-9)")

    p_bsa = sub.add_parser("bsa", help="signature table + discrimination report")
    p_bsa.add_argument("--circuit", required=True,
                       help="circuit file path or bundled name (incomplete_bsa, complete_bsa)")
    add_pump_opts(p_bsa)
    group = p_bsa.add_mutually_exclusive_group()
    group.add_argument("--all-bell", action="store_true", help="all four Bell inputs")
    group.add_argument("--all-hyper", action="store_true",
                       help="all four hyperentangled inputs")
    group.add_argument("--state", help="single input state (psi+|psi-|phi+|phi-|hyper-...)")
    p_bsa.add_argument("--overlap", type=float, default=1.0,
                       help="photon overlap o in [0,1] (default 1: ideal)")
    p_bsa.add_argument("--policy", choices=("strict", "renormalize"), default="strict",
                       help="scoring of events outside all signatures")
    p_bsa.add_argument("--out", help="output path (default stdout)")
    p_bsa.add_argument("--format", choices=("json", "csv"), default="json")
    p_bsa.set_defaults(func=cmd_bsa)

    p_hom = sub.add_parser("hom", help="HOM interference scan (CSV)")
    add_pump_opts(p_hom)
    p_hom.add_argument("--state", required=True, help="psi+|psi-|phi+|phi-")
    p_hom.add_argument("--delays", required=True, help="delay grid from:to:step in micrometers")
    p_hom.add_argument("--sigma-l", type=float, default=None,
                       help="coherence length in micrometers (default from the 1 nm filter)")
    p_hom.add_argument("--out", help="output path (default stdout)")
    p_hom.add_argument("--format", choices=("csv",), default="csv")
    p_hom.set_defaults(func=cmd_hom)

    p_field = sub.add_parser("field", help="coincidence-amplitude map over (x1, y1)")
    add_pump_opts(p_field)
    p_field.add_argument("--state", required=True, help="psi+|psi-|phi+|phi-")
    p_field.add_argument("--z", type=float, default=0.5, help="detection plane in meters")
    p_field.add_argument("--grid", default="-0.003:0.003:41",
                         help="transverse grid min:max:npoints in meters")
    p_field.add_argument("--x2", type=float, default=0.0, help="fixed x2 (meters)")
    p_field.add_argument("--y2", type=float, default=0.0, help="fixed y2 (meters)")
    p_field.add_argument("--out", help="output path (default stdout)")
    p_field.add_argument("--format", choices=("csv",), default="csv")
    p_field.set_defaults(func=cmd_field)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CircuitSchemaError as exc:
        print(f"circuit schema error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
