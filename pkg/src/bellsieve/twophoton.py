"""Two-photon state algebra over labelled bosonic modes.

A single-photon mode is labelled by (path, polarization angle, transverse
y-parity, temporal tag).  A two-photon state is a complex amplitude map over
*unordered* pairs of modes, stored once per pair under a canonical mode
ordering, so bosonic exchange symmetry is structural rather than a runtime
invariant.  Amplitudes are taken in the normalized pair basis: for distinct
modes i != j the basis vector is a_i^dag a_j^dag |0>, and for i == j it is
(a_i^dag)^2 |0> / sqrt(2), so the norm is just sum |amplitude|^2.

Polarization is a linear-polarization angle in degrees, reduced to [0, 180).
All modes sharing a path must be expressible in one orthogonal basis
{theta, theta+90}; `rebase_path` converts between bases exactly.

The transverse degree of freedom is tracked per photon as an even/odd
y-parity label.  The joint (product) parity equals the pump beam's y-parity;
a y-reflection acts on a photon as (-1)^parity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

SQRT2 = math.sqrt(2.0)

# polarization angle constants (degrees)
H = 0.0
V = 90.0
DIAG = 45.0
ANTIDIAG = 135.0

EVEN = "even"
ODD = "odd"

PRUNE_TOL = 1e-12
NORM_TOL = 1e-9

BELL_KINDS = ("psi+", "psi-", "phi+", "phi-")
# BellKind is one of the strings above
BellKind = str


def normalize_angle(angle: float) -> float:
    """Reduce a polarization angle to [0, 180) degrees, rounded for stable keys."""
    a = float(angle) % 180.0
    a = round(a, 9)
    if a >= 180.0 or a == -0.0:
        a = a % 180.0
    return a


@dataclass(frozen=True)
class PhotonMode:
    """Label of a single-photon mode."""

    path: str
    pol: float = H
    parity: str = EVEN
    temporal: int = 0

    def __post_init__(self) -> None:
        if self.parity not in (EVEN, ODD):
            raise ValueError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        object.__setattr__(self, "pol", normalize_angle(self.pol))

    @property
    def sort_key(self) -> Tuple[str, float, int, int]:
        return (self.path, self.pol, 0 if self.parity == EVEN else 1, self.temporal)

    def with_path(self, path: str) -> "PhotonMode":
        return replace(self, path=path)

    def with_pol(self, pol: float) -> "PhotonMode":
        return replace(self, pol=pol)

    def with_parity(self, parity: str) -> "PhotonMode":
        return replace(self, parity=parity)


PairKey = Tuple[PhotonMode, PhotonMode]
# single-photon linear map: mode -> sequence of (image mode, coefficient)
ModeMap = Mapping[PhotonMode, Sequence[Tuple[PhotonMode, complex]]]


def pair_key(m1: PhotonMode, m2: PhotonMode) -> PairKey:
    """Canonically ordered unordered-pair key."""
    return (m1, m2) if m1.sort_key <= m2.sort_key else (m2, m1)


@dataclass(frozen=True)
class TwoPhotonState:
    """Normalized amplitude map over unordered photon-mode pairs.

    `delays` carries accumulated optical delays per path (plumbing written by
    delay elements and read by the HOM-scan analysis; it does not affect
    amplitudes).
    """

    terms: Dict[PairKey, complex]
    delays: Dict[str, float] = field(default_factory=dict)

    def norm_sq(self) -> float:
        return sum(abs(a) ** 2 for a in self.terms.values())

    def paths(self) -> set:
        out = set()
        for m1, m2 in self.terms:
            out.add(m1.path)
            out.add(m2.path)
        return out

    def items(self):
        return self.terms.items()

    def amplitude(self, m1: PhotonMode, m2: PhotonMode) -> complex:
        return self.terms.get(pair_key(m1, m2), 0j)


def _pruned(terms: Dict[PairKey, complex]) -> Dict[PairKey, complex]:
    return {k: a for k, a in terms.items() if abs(a) > PRUNE_TOL}


def make_state(
    terms: Mapping[Tuple[PhotonMode, PhotonMode], complex],
    delays: Optional[Mapping[str, float]] = None,
) -> TwoPhotonState:
    """Build a state from (possibly unordered-keyed) terms; enforce normalization."""
    acc: Dict[PairKey, complex] = {}
    for (m1, m2), a in terms.items():
        k = pair_key(m1, m2)
        acc[k] = acc.get(k, 0j) + complex(a)
    acc = _pruned(acc)
    n = math.sqrt(sum(abs(a) ** 2 for a in acc.values()))
    if abs(n - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalized: |amplitude|^2 sums to {n**2:.3e}")
    acc = {k: a / n for k, a in acc.items()}
    return TwoPhotonState(acc, dict(delays or {}))


def apply_mode_map(state: TwoPhotonState, mapping: ModeMap) -> TwoPhotonState:
    """Lift a single-photon linear map to the two-photon state.

    Modes absent from the mapping are left untouched.  Works in the
    creation-operator monomial picture so that two-photons-in-one-mode terms
    keep their bosonic weights; the result is pruned but not renormalized
    (unitary maps preserve the norm analytically).
    """
    out: Dict[PairKey, complex] = {}
    for (m1, m2), amp in state.terms.items():
        a = amp / SQRT2 if m1 == m2 else amp
        img1 = mapping.get(m1, ((m1, 1.0),))
        img2 = mapping.get(m2, ((m2, 1.0),))
        for k1, c1 in img1:
            for k2, c2 in img2:
                key = pair_key(k1, k2)
                out[key] = out.get(key, 0j) + a * c1 * c2
    res: Dict[PairKey, complex] = {}
    for (k1, k2), a in out.items():
        val = a * SQRT2 if k1 == k2 else a
        if abs(val) > PRUNE_TOL:
            res[(k1, k2)] = val
    return TwoPhotonState(res, dict(state.delays))


# ---------------------------------------------------------------------------
# constructors


def bell_state(
    kind: BellKind,
    p1: str,
    p2: str,
    temporal: Tuple[int, int] = (0, 0),
) -> TwoPhotonState:
    """Polarization Bell state across two spatial paths.

    psi+- = (h1 v2 +- v1 h2)/sqrt(2), phi+- = (h1 h2 +- v1 v2)/sqrt(2).
    Parity labels default to even; `temporal` tags the photons in p1, p2.
    """
    if kind not in BELL_KINDS:
        raise ValueError(f"unknown Bell kind {kind!r}")
    if p1 == p2:
        raise ValueError("Bell states are defined across two distinct spatial paths")
    t1, t2 = temporal
    sign = 1.0 if kind.endswith("+") else -1.0
    amp = 1.0 / SQRT2
    if kind.startswith("psi"):
        pairs = [
            ((PhotonMode(p1, H, temporal=t1), PhotonMode(p2, V, temporal=t2)), amp),
            ((PhotonMode(p1, V, temporal=t1), PhotonMode(p2, H, temporal=t2)), sign * amp),
        ]
    else:
        pairs = [
            ((PhotonMode(p1, H, temporal=t1), PhotonMode(p2, H, temporal=t2)), amp),
            ((PhotonMode(p1, V, temporal=t1), PhotonMode(p2, V, temporal=t2)), sign * amp),
        ]
    return make_state(dict(pairs))


def hyper_state(
    kind: BellKind,
    paths: Sequence[str],
    temporal: Tuple[int, int] = (0, 0),
) -> TwoPhotonState:
    """Path-hyperentangled Bell state over four paths (a, b, c, d).

    psi+- = {(a_h b_v +- a_v b_h) + (c_h d_v +- c_v d_h)}/2 and likewise for
    phi+- with equal polarizations; photon one occupies a or c, photon two
    b or d.
    """
    if kind not in BELL_KINDS:
        raise ValueError(f"unknown Bell kind {kind!r}")
    a, b, c, d = paths
    if len({a, b, c, d}) != 4:
        raise ValueError("hyperentangled states require four distinct paths")
    t1, t2 = temporal
    sign = 1.0 if kind.endswith("+") else -1.0
    if kind.startswith("psi"):
        pols = [(H, V, 1.0), (V, H, sign)]
    else:
        pols = [(H, H, 1.0), (V, V, sign)]
    terms = {}
    for first, second in ((a, b), (c, d)):
        for q1, q2, s in pols:
            key = (PhotonMode(first, q1, temporal=t1), PhotonMode(second, q2, temporal=t2))
            terms[key] = s * 0.5
    return make_state(terms)


def attach_pump_parity(state: TwoPhotonState, pump) -> TwoPhotonState:
    """Attach the pump beam's joint transverse parity to a polarization state.

    An even pump leaves every photon in the even sector; an odd pump splits
    each term into the symmetric superposition [(even,odd)+(odd,even)]/sqrt(2).
    `pump` may be a PumpProfile or a bare +-1 joint parity.
    """
    joint = getattr(pump, "joint_parity", pump)
    if joint not in (+1, -1):
        raise ValueError(f"joint parity must be +1 or -1, got {joint!r}")
    for m1, m2 in state.terms:
        if m1.parity != EVEN or m2.parity != EVEN:
            raise ValueError("pump parity already attached (odd labels present)")
    if joint == +1:
        return state
    out: Dict[PairKey, complex] = {}
    for (m1, m2), amp in state.terms.items():
        a = amp / SQRT2 if m1 == m2 else amp
        for pa, pb in ((EVEN, ODD), (ODD, EVEN)):
            k = pair_key(m1.with_parity(pa), m2.with_parity(pb))
            out[k] = out.get(k, 0j) + a / SQRT2
    res: Dict[PairKey, complex] = {}
    for (k1, k2), a in out.items():
        val = a * SQRT2 if k1 == k2 else a
        if abs(val) > PRUNE_TOL:
            res[(k1, k2)] = val
    return TwoPhotonState(res, dict(state.delays))


# ---------------------------------------------------------------------------
# inner products and comparisons


def inner_product(s1: TwoPhotonState, s2: TwoPhotonState) -> complex:
    """Hermitian inner product <s1|s2> over the unordered-pair basis."""
    if len(s1.terms) > len(s2.terms):
        s1, s2 = s2, s1
        conj = True
    else:
        conj = False
    acc = 0j
    for k, a in s1.terms.items():
        b = s2.terms.get(k)
        if b is not None:
            acc += a.conjugate() * b
    return acc.conjugate() if conj else acc


def overlap(s1: TwoPhotonState, s2: TwoPhotonState) -> float:
    return abs(inner_product(s1, s2))


def equal_up_to_global_phase(s1: TwoPhotonState, s2: TwoPhotonState, tol: float = 1e-9) -> bool:
    """State equality modulo one global phase: |<s1|s2>| = 1 within tol."""
    n1, n2 = s1.norm_sq(), s2.norm_sq()
    if n1 < PRUNE_TOL or n2 < PRUNE_TOL:
        return n1 < PRUNE_TOL and n2 < PRUNE_TOL
    return abs(overlap(s1, s2) / math.sqrt(n1 * n2) - 1.0) <= tol


def apply_y_reflection(state: TwoPhotonState) -> TwoPhotonState:
    """Simultaneous y-reflection of both photons: amplitude times (-1)^(#odd)."""
    terms = {}
    for (m1, m2), a in state.terms.items():
        s = (-1.0 if m1.parity == ODD else 1.0) * (-1.0 if m2.parity == ODD else 1.0)
        terms[(m1, m2)] = s * a
    return TwoPhotonState(terms, dict(state.delays))


def joint_parities(state: TwoPhotonState) -> set:
    """Set of per-term joint parities (+1/-1) present in the state."""
    out = set()
    for m1, m2 in state.terms:
        out.add((-1 if m1.parity == ODD else 1) * (-1 if m2.parity == ODD else 1))
    return out


# ---------------------------------------------------------------------------
# polarization basis changes


def _cosd(angle: float) -> float:
    c = math.cos(math.radians(angle))
    return 0.0 if abs(c) < 1e-15 else c


def rebase_path(state: TwoPhotonState, path: str, basis_angle: float) -> TwoPhotonState:
    """Rewrite all modes on `path` in the orthogonal basis {theta, theta+90}.

    Exact linear-polarization decomposition e(alpha) = cos(alpha-theta) e(theta)
    + cos(alpha-phi) e(phi); a no-op for modes already in the target basis.
    """
    theta = normalize_angle(basis_angle)
    phi = normalize_angle(theta + 90.0)
    mapping: Dict[PhotonMode, Sequence[Tuple[PhotonMode, complex]]] = {}
    for m1, m2 in state.terms:
        for m in (m1, m2):
            if m.path != path or m in mapping or m.pol in (theta, phi):
                continue
            mapping[m] = (
                (m.with_pol(theta), _cosd(m.pol - theta)),
                (m.with_pol(phi), _cosd(m.pol - phi)),
            )
    if not mapping:
        return state
    return apply_mode_map(state, mapping)


def rebase_all(state: TwoPhotonState, basis_angle: float = 0.0) -> TwoPhotonState:
    out = state
    for p in sorted(state.paths()):
        out = rebase_path(out, p, basis_angle)
    return out


def pol_pair_probs(state: TwoPhotonState) -> Dict[Tuple[Tuple[str, float], Tuple[str, float]], float]:
    """Probabilities per (path, pol) monomial, parity and temporal tags traced out."""
    out: Dict[Tuple[Tuple[str, float], Tuple[str, float]], float] = {}
    for (m1, m2), a in state.terms.items():
        r1, r2 = (m1.path, m1.pol), (m2.path, m2.pol)
        k = (r1, r2) if r1 <= r2 else (r2, r1)
        out[k] = out.get(k, 0.0) + abs(a) ** 2
    return out


# ---------------------------------------------------------------------------
# serialization


def mode_to_json(m: PhotonMode) -> dict:
    return {"path": m.path, "pol": m.pol, "parity": m.parity, "temporal": m.temporal}


def mode_from_json(d: dict) -> PhotonMode:
    return PhotonMode(
        path=str(d["path"]),
        pol=float(d.get("pol", H)),
        parity=str(d.get("parity", EVEN)),
        temporal=int(d.get("temporal", 0)),
    )


def state_to_json(state: TwoPhotonState) -> dict:
    """JSON form: {"terms": [{"modes": [m1, m2], "re": .., "im": ..}], "delays": {..}}."""
    terms = []
    for (m1, m2), a in sorted(state.terms.items(), key=lambda kv: (kv[0][0].sort_key, kv[0][1].sort_key)):
        terms.append({"modes": [mode_to_json(m1), mode_to_json(m2)], "re": a.real, "im": a.imag})
    doc = {"terms": terms}
    if state.delays:
        doc["delays"] = {k: state.delays[k] for k in sorted(state.delays)}
    return doc


def state_from_json(doc: dict) -> TwoPhotonState:
    terms: Dict[PairKey, complex] = {}
    for t in doc["terms"]:
        m1, m2 = (mode_from_json(x) for x in t["modes"])
        terms[pair_key(m1, m2)] = complex(float(t["re"]), float(t.get("im", 0.0)))
    return make_state(terms, doc.get("delays"))
