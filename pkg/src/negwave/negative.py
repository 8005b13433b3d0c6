"""Indep/Negative decomposition of entangled states.

An entangled unit state ``psi`` is written as

    beta * psi = alpha * indep - negative

with ``indep`` a full product state.  The Negative is always *computed* from
the other three quantities.  Product kets that carry weight in ``alpha*indep``
but none in ``beta*psi`` are exactly the joint outcomes the Negative erases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Collection

import numpy as np

from .errors import BadScale, InvalidLabel, NotFactorizable, SpaceMismatch, ZeroNorm
from .fockstate import (
    EQ_TOL,
    PRUNE_TOL,
    ProductKet,
    StateSpace,
    StateVector,
    fmt_real,
    render_ket,
    superpose,
    text_table,
    to_dense,
)

RANK_TOL = 1e-8

SURVIVES = "survives"
ERASED = "erased"
ABSENT = "absent"


@dataclass(frozen=True)
class FactorizationWitness:
    partition: tuple[tuple[str, ...], tuple[str, ...]]
    singular_values: tuple[float, ...]
    rank: int


def schmidt_witness(s: StateVector, part: Collection[str]) -> FactorizationWitness:
    """Singular values of the amplitude matrix across the cut ``part | rest``."""
    space = s.space
    part = set(part)
    unknown = part - set(space.subsystems)
    if unknown:
        raise InvalidLabel(f"unknown subsystem(s) {sorted(unknown)}")
    left = [i for i, sub in enumerate(space.subsystems) if sub in part]
    right = [i for i, sub in enumerate(space.subsystems) if sub not in part]
    if not left or not right:
        raise ValueError("partition must be a nonempty proper subset of the subsystems")
    if not s.terms:
        raise ZeroNorm("factorizability of the zero state is undefined")
    arr = to_dense(s).transpose(left + right)
    rows = math.prod(len(space.alphabets[i]) for i in left)
    mat = arr.reshape(rows, -1)
    sv = np.linalg.svd(mat, compute_uv=False)
    rank = int(np.sum(sv > RANK_TOL * sv[0]))
    return FactorizationWitness(
        (tuple(space.subsystems[i] for i in left), tuple(space.subsystems[i] for i in right)),
        tuple(float(x) for x in sv),
        rank,
    )


def is_factorizable(
    s: StateVector, partition: Collection[str] | None = None
) -> tuple[bool, FactorizationWitness]:
    """Rank-1 test across one cut, or across every single-subsystem cut.

    With ``partition=None`` the state must be a full product: each subsystem is
    cut from the rest in turn and the first failing witness is returned.
    """
    if partition is not None:
        w = schmidt_witness(s, partition)
        return w.rank == 1, w
    if not s.terms:
        raise ZeroNorm("factorizability of the zero state is undefined")
    subs = s.space.subsystems
    if len(subs) == 1:
        return True, FactorizationWitness((subs, ()), (s.norm(),), 1)
    w = None
    for sub in subs:
        w = schmidt_witness(s, [sub])
        if w.rank != 1:
            return False, w
    return True, w


@dataclass(frozen=True, eq=False)
class Decomposition:
    psi: StateVector
    indep: StateVector
    negative: StateVector
    alpha: complex
    beta: complex

    @property
    def space(self) -> StateSpace:
        return self.psi.space

    def scaled_indep(self) -> StateVector:
        return self.indep.scale(self.alpha)

    def scaled_psi(self) -> StateVector:
        return self.psi.scale(self.beta)

    def residual(self) -> StateVector:
        """``beta*psi - (alpha*indep - negative)``; empty for a computed Negative."""
        return superpose(
            [self.beta, -self.alpha, 1], [self.psi, self.indep, self.negative]
        )


def decompose(psi: StateVector, indep: StateVector, alpha, beta) -> Decomposition:
    alpha, beta = complex(alpha), complex(beta)
    if abs(beta) <= PRUNE_TOL:
        raise BadScale("beta must be nonzero")
    n = psi.norm()
    if n <= PRUNE_TOL:
        raise ZeroNorm("psi is the zero state")
    if abs(n - 1) > EQ_TOL:
        raise ValueError(f"psi must have unit norm, got {n:.12g}")
    if indep.space != psi.space:
        raise SpaceMismatch(f"{indep.space} != {psi.space}")
    if not indep.terms:
        raise NotFactorizable("indep is the zero state")
    ok, w = is_factorizable(indep)
    if not ok:
        raise NotFactorizable(
            f"indep has Schmidt rank {w.rank} across {w.partition}: {w.singular_values}"
        )
    negative = superpose([alpha, -beta], [indep, psi])
    return Decomposition(psi, indep, negative, alpha, beta)


def reconstruct(d: Decomposition) -> StateVector:
    return superpose([d.alpha / d.beta, -1 / d.beta], [d.indep, d.negative])


@dataclass(frozen=True)
class CancellationRow:
    ket: ProductKet
    indep: complex
    negative: complex
    psi: complex
    status: str


@dataclass(frozen=True)
class CancellationReport:
    space: StateSpace
    rows: tuple[CancellationRow, ...]

    columns = (
        "ket",
        "indep_re",
        "indep_im",
        "negative_re",
        "negative_im",
        "psi_re",
        "psi_im",
        "status",
    )

    def with_status(self, status: str) -> list[ProductKet]:
        return [r.ket for r in self.rows if r.status == status]

    def erased(self) -> list[ProductKet]:
        return self.with_status(ERASED)

    def survivors(self) -> list[ProductKet]:
        return self.with_status(SURVIVES)

    def records(self) -> list[dict]:
        out = []
        for r in self.rows:
            out.append(
                {
                    "ket": render_ket(self.space, r.ket),
                    "indep_re": r.indep.real,
                    "indep_im": r.indep.imag,
                    "negative_re": r.negative.real,
                    "negative_im": r.negative.imag,
                    "psi_re": r.psi.real,
                    "psi_im": r.psi.imag,
                    "status": r.status,
                }
            )
        return out

    def text(self) -> str:
        cells = [
            [v if isinstance(v, str) else fmt_real(v) for v in rec.values()]
            for rec in self.records()
        ]
        return text_table(self.columns, cells)


def classify(indep_amp: complex, psi_amp: complex) -> str:
    if abs(psi_amp) > EQ_TOL:
        return SURVIVES
    if abs(indep_amp) > EQ_TOL:
        return ERASED
    return ABSENT


def cancellation_report(d: Decomposition) -> CancellationReport:
    """Row per ket present in ``alpha*indep``, ``negative`` or ``beta*psi``."""
    si, sp, neg = d.scaled_indep(), d.scaled_psi(), d.negative
    kets = set(si.terms) | set(sp.terms) | set(neg.terms)
    rows = []
    for ket in sorted(kets, key=d.space.sort_key):
        a_i, a_p = si.amplitude(ket), sp.amplitude(ket)
        rows.append(CancellationRow(ket, a_i, neg.amplitude(ket), a_p, classify(a_i, a_p)))
    return CancellationReport(d.space, tuple(rows))


def conditional_erasure(
    d: Decomposition, fixed: str, label: str
) -> list[tuple[dict[str, str], str]]:
    """Partner outcomes compatible with ``fixed == label``, erased or surviving."""
    space = d.space
    i = space.index(fixed)
    space.label_index(fixed, label)
    out = []
    for row in cancellation_report(d).rows:
        if row.ket[i] != label or row.status == ABSENT:
            continue
        partner = {s: lab for s, lab in zip(space.subsystems, row.ket) if s != fixed}
        out.append((partner, row.status))
    return out
