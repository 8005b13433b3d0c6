"""Single-subsystem unitaries acting inside multi-particle states."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AlphabetMismatch, NotUnitary
from .fockstate import EQ_TOL, StateSpace, StateVector

SQRT1_2 = 1 / math.sqrt(2)


@dataclass(frozen=True, eq=False)
class LocalUnitary:
    """Matrix with rows indexed by ``target`` labels and columns by ``source``."""

    source: tuple[str, ...]
    target: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        if len(self.source) != len(self.target) or m.shape != (len(self.target), len(self.source)):
            raise NotUnitary(
                f"matrix shape {m.shape} does not fit {len(self.target)}x{len(self.source)}"
            )
        if not np.all(np.isfinite(m)):
            raise NotUnitary("non-finite matrix entry")
        err = np.max(np.abs(m.conj().T @ m - np.eye(len(self.source))))
        if err > EQ_TOL:
            raise NotUnitary(f"U^dagger U deviates from identity by {err:.3g}")

    def image(self, label: str) -> dict[str, complex]:
        j = self.source.index(label)
        return {t: complex(self.matrix[i, j]) for i, t in enumerate(self.target)}

    def inverse(self) -> "LocalUnitary":
        return LocalUnitary(self.target, self.source, self.matrix.conj().T)

    def then(self, other: "LocalUnitary") -> "LocalUnitary":
        """Composition: apply ``self`` first, then ``other``."""
        if other.source != self.target:
            raise AlphabetMismatch(f"{other.source} != {self.target}")
        return LocalUnitary(self.source, other.target, other.matrix @ self.matrix)


def apply_local(s: StateVector, target: str, u: LocalUnitary) -> StateVector:
    space = s.space
    i = space.index(target)
    if space.alphabets[i] != u.source:
        raise AlphabetMismatch(
            f"subsystem {target!r} has alphabet {space.alphabets[i]}, map expects {u.source}"
        )
    images = {lab: u.image(lab) for lab in u.source}
    terms: dict[tuple, complex] = {}
    for ket, amp in s.terms.items():
        for lab, c in images[ket[i]].items():
            new = ket[:i] + (lab,) + ket[i + 1 :]
            terms[new] = terms.get(new, 0j) + amp * c
    return StateVector(space.with_alphabet(target, u.target), terms)


def apply_each(s: StateVector, maps: dict[str, LocalUnitary]) -> StateVector:
    for sub, u in maps.items():
        s = apply_local(s, sub, u)
    return s


def identity_map(alphabet: Sequence[str]) -> LocalUnitary:
    return LocalUnitary(alphabet, alphabet, np.eye(len(alphabet)))


def relabel_map(source: Sequence[str], target: Sequence[str]) -> LocalUnitary:
    """Pure relabelling ``source[k] -> target[k]``."""
    return LocalUnitary(source, target, np.eye(len(source)))


def pbs_map(ports: Sequence[str] = ("port-x", "port-y"), pol: Sequence[str] = ("x", "y")) -> LocalUnitary:
    """Polarising beam splitter as an analyser: routes each polarisation to its port."""
    return relabel_map(pol, ports)


def circular_linear_map(direction: str = "circular->linear") -> LocalUnitary:
    """R -> (x + iy)/sqrt2, L -> (x - iy)/sqrt2, or the inverse."""
    m = SQRT1_2 * np.array([[1, 1], [1j, -1j]])
    c2l = LocalUnitary(("R", "L"), ("x", "y"), m)
    if direction == "circular->linear":
        return c2l
    if direction == "linear->circular":
        return c2l.inverse()
    raise ValueError(f"unknown direction {direction!r}")


def primed(alphabet: Sequence[str]) -> tuple[str, ...]:
    return tuple(lab + "'" for lab in alphabet)


def rotation_map(alpha, beta, source: Sequence[str] = ("x", "y"), target: Sequence[str] | None = None) -> LocalUnitary:
    """x -> alpha x' + beta y',  y -> -beta x' + alpha y'.

    Complex coefficients are accepted when the literal map is still unitary
    (``conj(alpha) * beta`` real); otherwise :class:`NotUnitary` is raised.
    """
    alpha, beta = complex(alpha), complex(beta)
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > EQ_TOL:
        raise NotUnitary(f"|alpha|^2 + |beta|^2 = {abs(alpha)**2 + abs(beta)**2:.12g} != 1")
    if len(source) != 2:
        raise AlphabetMismatch("rotation acts on a two-label alphabet")
    target = primed(source) if target is None else tuple(target)
    return LocalUnitary(source, target, np.array([[alpha, -beta], [beta, alpha]]))


def angle_rotation(theta: float, source: Sequence[str] = ("x", "y"), target=None) -> LocalUnitary:
    return rotation_map(math.cos(theta), math.sin(theta), source, target)


def beam_splitter_map(
    outputs: Sequence[str] = ("t", "r"), inputs: Sequence[str] = ("a", "b")
) -> LocalUnitary:
    """Balanced splitter with phase i on reflection.

    A photon entering port ``inputs[0]`` leaves as (|t> + i|r>)/sqrt2; the
    second input port gets the complementary column.
    """
    m = SQRT1_2 * np.array([[1, 1j], [1j, 1]])
    return LocalUnitary(inputs, outputs, m)


def port_to_occupation(
    s: StateVector, subsystem: str, modes: Sequence[str], ports: Sequence[str] | None = None
) -> StateVector:
    """Rewrite a one-photon "which port" subsystem as occupation-number modes.

    Port label ``ports[k]`` becomes occupation 1 in ``modes[k]`` and 0 in every
    other mode.  The new mode subsystems replace ``subsystem`` in place.
    """
    space = s.space
    i = space.index(subsystem)
    ports = space.alphabets[i] if ports is None else tuple(ports)
    if set(ports) != set(space.alphabets[i]) or len(ports) != len(modes):
        raise AlphabetMismatch(f"ports {ports} do not cover {space.alphabets[i]}")
    occ = {p: tuple("1" if k == j else "0" for k in range(len(modes))) for j, p in enumerate(ports)}
    new_space = StateSpace(
        space.subsystems[:i] + tuple(modes) + space.subsystems[i + 1 :],
        space.alphabets[:i] + (("0", "1"),) * len(modes) + space.alphabets[i + 1 :],
    )
    terms = {k[:i] + occ[k[i]] + k[i + 1 :]: a for k, a in s.terms.items()}
    return StateVector(new_space, terms)


def photon_at(subsystem: str, port: str = "a", inputs: Sequence[str] = ("a", "b")) -> StateVector:
    """One photon sitting in input ``port`` of a splitter."""
    space = StateSpace((subsystem,), (tuple(inputs),))
    return StateVector(space, {(port,): 1})

