"""Sparse complex-amplitude states over labelled product bases.

A :class:`StateSpace` is an ordered list of subsystems, each with a finite
alphabet of opaque string labels.  A product ket is a tuple holding one label
per subsystem, in subsystem order.  A :class:`StateVector` maps product kets to
complex amplitudes and never stores amplitudes below :data:`PRUNE_TOL`.

The same machinery covers polarisation kets (``x``, ``y``, ``R``, ``L``),
occupation numbers (``0``, ``1``) and atomic levels; labels carry no meaning.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import InvalidLabel, SpaceMismatch, ZeroNorm

PRUNE_TOL = 1e-12
EQ_TOL = 1e-10

ProductKet = tuple  # tuple[str, ...], one label per subsystem


@dataclass(frozen=True)
class StateSpace:
    subsystems: tuple[str, ...]
    alphabets: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        subs = tuple(self.subsystems)
        alphs = tuple(tuple(a) for a in self.alphabets)
        object.__setattr__(self, "subsystems", subs)
        object.__setattr__(self, "alphabets", alphs)
        if len(subs) != len(alphs):
            raise ValueError("one alphabet per subsystem required")
        if len(set(subs)) != len(subs):
            raise ValueError(f"duplicate subsystem ids in {subs}")
        for sub, alph in zip(subs, alphs):
            if not alph:
                raise ValueError(f"subsystem {sub!r} has an empty alphabet")
            if len(set(alph)) != len(alph):
                raise ValueError(f"duplicate labels in alphabet of {sub!r}")

    @classmethod
    def of(cls, **alphabets: Sequence[str]) -> "StateSpace":
        return cls(tuple(alphabets), tuple(tuple(a) for a in alphabets.values()))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, Sequence[str]]]) -> "StateSpace":
        pairs = list(pairs)
        return cls(tuple(p[0] for p in pairs), tuple(tuple(p[1]) for p in pairs))

    def __len__(self):
        return len(self.subsystems)

    def index(self, subsystem: str) -> int:
        try:
            return self.subsystems.index(subsystem)
        except ValueError:
            raise InvalidLabel(f"unknown subsystem {subsystem!r}") from None

    def alphabet(self, subsystem: str) -> tuple[str, ...]:
        return self.alphabets[self.index(subsystem)]

    def label_index(self, subsystem: str, label: str) -> int:
        alph = self.alphabet(subsystem)
        try:
            return alph.index(label)
        except ValueError:
            raise InvalidLabel(
                f"label {label!r} not in alphabet {alph} of {subsystem!r}"
            ) from None

    def ket(self, assignment: Mapping[str, str]) -> ProductKet:
        """Turn a total ``subsystem -> label`` map into a product ket."""
        extra = set(assignment) - set(self.subsystems)
        if extra:
            raise InvalidLabel(f"unknown subsystem(s) {sorted(extra)}")
        missing = [s for s in self.subsystems if s not in assignment]
        if missing:
            raise InvalidLabel(f"assignment missing subsystem(s) {missing}")
        for sub in self.subsystems:
            self.label_index(sub, assignment[sub])
        return tuple(assignment[s] for s in self.subsystems)

    def assignment(self, ket: ProductKet) -> dict[str, str]:
        return dict(zip(self.subsystems, ket))

    def sort_key(self, ket: ProductKet) -> tuple[int, ...]:
        return tuple(a.index(lab) for a, lab in zip(self.alphabets, ket))

    def basis(self) -> list[ProductKet]:
        """Every product ket of the space, in canonical order."""
        return list(itertools.product(*self.alphabets))

    def dim(self) -> int:
        return math.prod(len(a) for a in self.alphabets)

    def with_alphabet(self, subsystem: str, alphabet: Sequence[str]) -> "StateSpace":
        i = self.index(subsystem)
        alphs = list(self.alphabets)
        alphs[i] = tuple(alphabet)
        return StateSpace(self.subsystems, tuple(alphs))

    def rename(self, subsystem: str, new_name: str) -> "StateSpace":
        i = self.index(subsystem)
        subs = list(self.subsystems)
        subs[i] = new_name
        return StateSpace(tuple(subs), self.alphabets)

    def without(self, subsystem: str) -> "StateSpace":
        i = self.index(subsystem)
        return StateSpace(
            self.subsystems[:i] + self.subsystems[i + 1 :],
            self.alphabets[:i] + self.alphabets[i + 1 :],
        )


@dataclass(frozen=True, eq=False)
class StateVector:
    space: StateSpace
    terms: Mapping[ProductKet, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for ket, amp in self.terms.items():
            ket = tuple(ket)
            amp = complex(amp)
            if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                raise ValueError(f"non-finite amplitude {amp} for {ket}")
            if len(ket) != len(self.space):
                raise InvalidLabel(f"ket {ket} does not match space {self.space}")
            if abs(amp) >= PRUNE_TOL:
                clean[ket] = amp
        for ket in clean:
            for alph, lab, sub in zip(self.space.alphabets, ket, self.space.subsystems):
                if lab not in alph:
                    raise InvalidLabel(f"label {lab!r} not in alphabet of {sub!r}")
        ordered = dict(sorted(clean.items(), key=lambda kv: self.space.sort_key(kv[0])))
        object.__setattr__(self, "terms", MappingProxyType(ordered))

    # -- small conveniences -------------------------------------------------

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def amplitude(self, ket: ProductKet | Mapping[str, str]) -> complex:
        if isinstance(ket, Mapping):
            ket = self.space.ket(ket)
        return self.terms.get(tuple(ket), 0j)

    def __getitem__(self, ket):
        return self.amplitude(ket)

    def __add__(self, other: "StateVector") -> "StateVector":
        return superpose([1, 1], [self, other])

    def __sub__(self, other: "StateVector") -> "StateVector":
        return superpose([1, -1], [self, other])

    def __neg__(self) -> "StateVector":
        return self.scale(-1)

    def __mul__(self, c) -> "StateVector":
        return self.scale(c)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "StateVector":
        return self.scale(1 / complex(c))

    def scale(self, c) -> "StateVector":
        c = complex(c)
        return StateVector(self.space, {k: c * a for k, a in self.terms.items()})

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.terms.values()))

    def __repr__(self):
        return f"StateVector({render(self)})"


def empty(space: StateSpace) -> StateVector:
    return StateVector(space, {})


def build_term(space: StateSpace, assignment: Mapping[str, str], amp=1.0) -> StateVector:
    """Single product term ``amp * |assignment>``; empty if ``|amp| < PRUNE_TOL``."""
    return StateVector(space, {space.ket(assignment): complex(amp)})


def single(subsystem: str, alphabet: Sequence[str], amps: Mapping[str, complex]) -> StateVector:
    """One-subsystem state ``sum_l amps[l] |l>``."""
    space = StateSpace((subsystem,), (tuple(alphabet),))
    terms = {}
    for lab, amp in amps.items():
        terms[space.ket({subsystem: lab})] = amp
    return StateVector(space, terms)


def _check_same(a: StateVector, b: StateVector):
    if a.space != b.space:
        raise SpaceMismatch(f"{a.space} != {b.space}")


def superpose(coeffs: Sequence, states: Sequence[StateVector]) -> StateVector:
    if len(coeffs) != len(states):
        raise ValueError("coeffs and states differ in length")
    if not states:
        raise ValueError("superpose needs at least one state")
    space = states[0].space
    acc: dict[ProductKet, complex] = {}
    for c, s in zip(coeffs, states):
        if s.space != space:
            raise SpaceMismatch(f"{s.space} != {space}")
        c = complex(c)
        for ket, amp in s.terms.items():
            acc[ket] = acc.get(ket, 0j) + c * amp
    return StateVector(space, acc)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Product state over the concatenated space (``a``'s subsystems first)."""
    overlap = set(a.space.subsystems) & set(b.space.subsystems)
    if overlap:
        raise SpaceMismatch(f"overlapping subsystems {sorted(overlap)}")
    space = StateSpace(
        a.space.subsystems + b.space.subsystems, a.space.alphabets + b.space.alphabets
    )
    terms = {
        ka + kb: aa * ab for ka, aa in a.terms.items() for kb, ab in b.terms.items()
    }
    return StateVector(space, terms)


def tensor_all(states: Iterable[StateVector]) -> StateVector:
    states = list(states)
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def inner(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    _check_same(a, b)
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    total = 0j
    for ket in small.terms:
        if ket in large.terms:
            total += a.terms[ket].conjugate() * b.terms[ket]
    return total


def normalize(s: StateVector) -> StateVector:
    n = s.norm()
    if n <= PRUNE_TOL:
        raise ZeroNorm("cannot normalise a zero state")
    return s.scale(1 / n)


def max_abs_diff(a: StateVector, b: StateVector) -> float:
    _check_same(a, b)
    kets = set(a.terms) | set(b.terms)
    return max((abs(a.amplitude(k) - b.amplitude(k)) for k in kets), default=0.0)


def approx_eq(a: StateVector, b: StateVector, mode: str = "strict", tol: float = EQ_TOL) -> bool:
    """Termwise comparison.

    ``mode="phase"`` first rotates ``b`` by the unit phase that best aligns it
    with ``a`` (the phase of ``<b|a>``); ``"strict"`` compares as-is.
    """
    _check_same(a, b)
    if mode == "phase":
        overlap = inner(b, a)
        if abs(overlap) > 0:
            b = b.scale(cmath.exp(1j * cmath.phase(overlap)))
    elif mode != "strict":
        raise ValueError(f"unknown comparison mode {mode!r}")
    return max_abs_diff(a, b) <= tol


def relabel(
    s: StateVector, subsystem: str, mapping: Mapping[str, str], new_name: str | None = None
) -> StateVector:
    """Bijectively rename the labels (and optionally the id) of one subsystem."""
    space = s.space
    i = space.index(subsystem)
    old = space.alphabets[i]
    if set(mapping) != set(old):
        raise InvalidLabel(f"mapping keys {sorted(mapping)} must equal alphabet {old}")
    new_alph = tuple(mapping[lab] for lab in old)
    if len(set(new_alph)) != len(new_alph):
        raise InvalidLabel("relabelling must be injective")
    new_space = space.with_alphabet(subsystem, new_alph)
    if new_name is not None:
        new_space = new_space.rename(subsystem, new_name)
    terms = {k[:i] + (mapping[k[i]],) + k[i + 1 :]: a for k, a in s.terms.items()}
    return StateVector(new_space, terms)


def to_dense(s: StateVector):
    """Amplitudes as a numpy array of shape ``(len(alphabet_1), ...)``."""
    import numpy as np

    shape = tuple(len(a) for a in s.space.alphabets)
    arr = np.zeros(shape, dtype=complex)
    for ket, amp in s.terms.items():
        arr[s.space.sort_key(ket)] = amp
    return arr


def from_dense(space: StateSpace, arr) -> StateVector:
    terms = {}
    for ket in space.basis():
        terms[ket] = complex(arr[space.sort_key(ket)])
    return StateVector(space, terms)


# -- canonical text rendering ------------------------------------------------


def fmt_real(x: float) -> str:
    """12 significant digits, never negative zero."""
    x = float(x) + 0.0
    return format(x, ".12g")


def clean_part(x: float) -> float:
    """Zero out a real or imaginary part below PRUNE_TOL (rounding residue)."""
    return 0.0 if abs(x) < PRUNE_TOL else float(x)


def fmt_amp(z: complex) -> str:
    re = fmt_real(clean_part(z.real))
    im = fmt_real(clean_part(z.imag))
    sign = "" if im.startswith("-") else "+"
    return f"{re}{sign}{im}i"


def render_ket(space: StateSpace, ket: ProductKet) -> str:
    return "|" + ", ".join(f"{s}:{lab}" for s, lab in zip(space.subsystems, ket)) + ">"


def parse_ket(space: StateSpace, text: str) -> ProductKet:
    body = text.strip()
    if not (body.startswith("|") and body.endswith(">")):
        raise InvalidLabel(f"malformed ket {text!r}")
    assignment = {}
    for part in body[1:-1].split(", "):
        sub, _, lab = part.partition(":")
        assignment[sub] = lab
    return space.ket(assignment)


def render(s: StateVector) -> str:
    if not s.terms:
        return "0"
    return " + ".join(f"({fmt_amp(a)}){render_ket(s.space, k)}" for k, a in s.terms.items())


def text_table(columns: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Left-aligned plain-text table with a dashed rule under the header."""
    widths = [len(c) for c in columns]
    for row in rows:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines)
