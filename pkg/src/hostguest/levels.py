"""Electronic-vibrational level bookkeeping and transition taxonomy.

Kets address a manifold (S0, S1, T1, higher Sj/Tj), a triplet sublevel where
applicable, sparse vibron and phonon occupation maps, and a list of nuclear
spin projections. This module knows nothing about energies; it only encodes
which transitions are optical, microwave, or forbidden, and where emission
starts from.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping

from .errors import EmptyPopulation

SUBLEVELS = ("x", "y", "z")


@dataclass(frozen=True, order=True)
class Manifold:
    """An electronic manifold: spin kind ('S' or 'T') and index."""

    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in ("S", "T"):
            raise ValueError(f"manifold kind must be 'S' or 'T', got {self.kind!r}")
        if self.index < 0 or int(self.index) != self.index:
            raise ValueError(f"manifold index must be a non-negative integer")
        if self.kind == "T" and self.index < 1:
            raise ValueError("triplet manifolds start at T1")

    @property
    def is_triplet(self) -> bool:
        return self.kind == "T"

    @property
    def is_ground(self) -> bool:
        return self.kind == "S" and self.index == 0

    @property
    def excitation_order(self) -> tuple[int, int]:
        # Tj sits below Sj of the same index (exchange splitting); used only
        # to pick the lowest excited manifold, never to assign energies.
        return (self.index, 0 if self.is_triplet else 1)

    def __str__(self) -> str:
        return f"{self.kind}{self.index}"


S0 = Manifold("S", 0)
S1 = Manifold("S", 1)
T1 = Manifold("T", 1)


def _normalize_occupation(occ) -> tuple[tuple[int, int], ...]:
    """Canonicalize an occupation map; zero entries are dropped."""
    if occ is None:
        return ()
    if isinstance(occ, Mapping):
        items = occ.items()
    elif all(isinstance(x, int) for x in occ):
        # Dense list form: position is the mode index.
        items = enumerate(occ)
    else:
        items = occ
    out = {}
    for mode, n in items:
        mode = int(mode)
        n = int(n)
        if mode < 0:
            raise ValueError(f"mode index must be non-negative, got {mode}")
        if n < 0:
            raise ValueError(f"occupation must be non-negative, got {n}")
        if mode in out:
            raise ValueError(f"duplicate mode index {mode}")
        if n > 0:
            out[mode] = n
    return tuple(sorted(out.items()))


def _normalize_nuclei(nuclei) -> tuple[tuple[Fraction, Fraction], ...]:
    out = []
    for spin, projection in nuclei or ():
        i = Fraction(spin)
        m = Fraction(projection)
        if i < 0 or i.denominator not in (1, 2):
            raise ValueError(f"nuclear spin must be a non-negative half-integer, got {i}")
        if m.denominator not in (1, 2) or abs(m) > i:
            raise ValueError(f"projection {m} invalid for nuclear spin {i}")
        if (i - m).denominator != 1:
            raise ValueError(f"projection {m} must differ from {i} by an integer")
        out.append((i, m))
    return tuple(out)


@dataclass(frozen=True)
class LevelKet:
    """One basis ket |manifold(sublevel); vibrons, phonons; nuclei>.

    Occupation maps are sparse; a mode absent from the map has occupation
    zero, and two kets differing only by explicit zeros compare equal
    because construction canonicalizes the maps.
    """

    manifold: Manifold
    sublevel: str | None = None
    vibrons: tuple[tuple[int, int], ...] = field(default=())
    phonons: tuple[tuple[int, int], ...] = field(default=())
    nuclei: tuple[tuple[Fraction, Fraction], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "vibrons", _normalize_occupation(self.vibrons))
        object.__setattr__(self, "phonons", _normalize_occupation(self.phonons))
        object.__setattr__(self, "nuclei", _normalize_nuclei(self.nuclei))
        if self.manifold.is_triplet:
            if self.sublevel not in SUBLEVELS:
                raise ValueError(
                    f"triplet ket needs a sublevel from {SUBLEVELS}, got {self.sublevel!r}"
                )
        elif self.sublevel is not None:
            raise ValueError("singlet kets carry no sublevel")

    @property
    def total_quanta(self) -> int:
        return sum(n for _, n in self.vibrons) + sum(n for _, n in self.phonons)

    @property
    def vibrationless(self) -> bool:
        return not self.vibrons and not self.phonons

    def zero_occupation(self) -> "LevelKet":
        """The same electronic and nuclear state with all quanta removed."""
        return replace(self, vibrons=(), phonons=())

    def __str__(self) -> str:
        return format_ket(self)


class TransitionClass(enum.Enum):
    ZPL = "zpl"
    VIBRONIC_EMISSION = "vibronic_emission"
    PHONON_WING = "phonon_wing"
    ISC = "isc"
    PHOSPHORESCENCE = "phosphorescence"
    MICROWAVE_SPIN = "microwave_spin"
    VIBRATIONAL_RELAXATION = "vibrational_relaxation"
    FORBIDDEN = "forbidden"


# Classes that contribute to detected fluorescence.
RADIATIVE_CLASSES = frozenset(
    {
        TransitionClass.ZPL,
        TransitionClass.VIBRONIC_EMISSION,
        TransitionClass.PHONON_WING,
        TransitionClass.PHOSPHORESCENCE,
    }
)


def classify_transition(
    source: LevelKet, target: LevelKet, *, radiative: bool = False
) -> TransitionClass:
    """Classify the transition source -> target. Total: every pair maps to
    exactly one class, and a ket never transitions to itself.

    Singlet-triplet crossings are intersystem crossing; with radiative=True
    the special pair T1(0,0) -> S0(0,0) is reported as phosphorescence
    instead. Optical emission classes require the source to be the relaxed
    |S1; 0, 0> ket and the nuclear labels to be spectators.
    """
    if source == target:
        return TransitionClass.FORBIDDEN
    a, b = source.manifold, target.manifold

    if a.kind != b.kind:
        if (
            radiative
            and a == T1
            and b == S0
            and source.vibrationless
            and target.vibrationless
        ):
            return TransitionClass.PHOSPHORESCENCE
        return TransitionClass.ISC

    if a != b:
        if (
            a == S1
            and b == S0
            and source.vibrationless
            and source.nuclei == target.nuclei
        ):
            if target.vibrationless:
                return TransitionClass.ZPL
            if not target.phonons:
                return TransitionClass.VIBRONIC_EMISSION
            return TransitionClass.PHONON_WING
        return TransitionClass.FORBIDDEN

    # Same manifold.
    if source.nuclei != target.nuclei:
        return TransitionClass.FORBIDDEN
    if (
        a.is_triplet
        and source.sublevel != target.sublevel
        and source.vibrons == target.vibrons
        and source.phonons == target.phonons
    ):
        return TransitionClass.MICROWAVE_SPIN
    if (
        source.sublevel == target.sublevel
        and target.total_quanta < source.total_quanta
    ):
        return TransitionClass.VIBRATIONAL_RELAXATION
    return TransitionClass.FORBIDDEN


def kasha_emitting_state(populations: Mapping[LevelKet, float]) -> LevelKet:
    """The ket emission proceeds from, given excited-state populations.

    Relaxation funnels population to the vibrationless ket of the lowest
    excited manifold that holds any population; for triplets the most
    populated sublevel wins (ties break deterministically on the literal).
    The populations must be normalized to 1 within 1e-9.
    """
    total = sum(populations.values())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"populations must sum to 1 within 1e-9, got {total!r}")
    excited = {
        ket: p for ket, p in populations.items() if not ket.manifold.is_ground and p > 0.0
    }
    if not excited:
        raise EmptyPopulation("no excited-state population to emit from")
    lowest = min((k.manifold for k in excited), key=lambda m: m.excitation_order)
    candidates = [(p, format_ket(k), k) for k, p in excited.items() if k.manifold == lowest]
    candidates.sort(key=lambda t: (-t[0], t[1]))
    return candidates[0][2].zero_occupation()


# --- ket literal syntax ----------------------------------------------------
#
# Canonical form:  S1;v=[0,1];p=[];n=[(1/2,+1/2)]
# Triplets name the sublevel after a comma:  T1,x;v=[];p=[];n=[]
# Occupation lists are dense (position = mode index); nuclear entries are
# (spin, signed projection) as exact fractions. format/parse round-trip
# bit-exactly in both directions.

_MANIFOLD_RE = re.compile(r"^([ST])(\d+)(?:,([xyz]))?$")
_NUCLEUS_RE = re.compile(r"^\((\d+(?:/2)?),([+-]?\d+(?:/2)?)\)$")


def _dense(occ: tuple[tuple[int, int], ...]) -> str:
    if not occ:
        return "[]"
    top = max(mode for mode, _ in occ)
    lookup = dict(occ)
    return "[" + ",".join(str(lookup.get(i, 0)) for i in range(top + 1)) + "]"


def _signed(m: Fraction) -> str:
    return ("+" if m >= 0 else "-") + str(abs(m))


def format_ket(ket: LevelKet) -> str:
    head = str(ket.manifold)
    if ket.sublevel is not None:
        head += f",{ket.sublevel}"
    nuclei = ",".join(f"({i},{_signed(m)})" for i, m in ket.nuclei)
    return f"{head};v={_dense(ket.vibrons)};p={_dense(ket.phonons)};n=[{nuclei}]"


def _parse_occupation(text: str, label: str) -> tuple[int, ...]:
    if not (text.startswith(f"{label}=[") and text.endswith("]")):
        raise ValueError(f"malformed occupation field {text!r}")
    body = text[len(label) + 2 : -1]
    if not body:
        return ()
    try:
        return tuple(int(tok) for tok in body.split(","))
    except ValueError:
        raise ValueError(f"non-integer occupation in {text!r}") from None


def _split_nuclei(body: str) -> list[str]:
    # Entries are parenthesized; split on commas between groups only.
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur:
        parts.append("".join(cur))
    return parts


def parse_ket(text: str) -> LevelKet:
    """Parse the literal syntax emitted by :func:`format_ket`."""
    fields = text.split(";")
    if len(fields) != 4:
        raise ValueError(f"ket literal needs 4 ;-separated fields, got {text!r}")
    head, v_field, p_field, n_field = fields
    m = _MANIFOLD_RE.match(head)
    if not m:
        raise ValueError(f"malformed manifold field {head!r}")
    kind, index, sublevel = m.group(1), int(m.group(2)), m.group(3)
    if not (n_field.startswith("n=[") and n_field.endswith("]")):
        raise ValueError(f"malformed nuclear field {n_field!r}")
    nuclei = []
    body = n_field[3:-1]
    if body:
        for entry in _split_nuclei(body):
            nm = _NUCLEUS_RE.match(entry)
            if not nm:
                raise ValueError(f"malformed nuclear entry {entry!r}")
            nuclei.append((Fraction(nm.group(1)), Fraction(nm.group(2))))
    return LevelKet(
        manifold=Manifold(kind, index),
        sublevel=sublevel,
        vibrons=_parse_occupation(v_field, "v"),
        phonons=_parse_occupation(p_field, "p"),
        nuclei=tuple(nuclei),
    )
