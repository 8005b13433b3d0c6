"""Experiment builders and Born-rule statistics.

Builders return a :class:`Scenario`: the physical state, its Indep/Negative
decomposition and the parameters used.  Statistics assume ideal projective
detection in the product basis, optionally after a per-subsystem rotation by
an angle ``theta`` (``alpha = cos theta``, ``beta = sin theta``).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .errors import ConditionImpossible, InvalidScenario, ZeroNorm
from .fockstate import (
    EQ_TOL,
    PRUNE_TOL,
    ProductKet,
    StateSpace,
    StateVector,
    build_term,
    normalize,
    relabel,
    render_ket,
    single,
    superpose,
    tensor,
)
from .negative import Decomposition, decompose
from .transforms import (
    angle_rotation,
    apply_local,
    beam_splitter_map,
    circular_linear_map,
    photon_at,
    port_to_occupation,
)

SQRT2 = math.sqrt(2)
GENERATOR = "numpy.random.PCG64"

P1, P2 = "photon-1", "photon-2"
SIGNAL, IDLER = "signal", "idler"
MODE_T, MODE_R = "mode-t", "mode-r"
ATOM_A, ATOM_B, ATOM_B2 = "atom-A", "atom-B", "atom-B'"

Setting = Union[float, str]  # angle in radians or "computational"


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    params: Mapping[str, object]
    psi: StateVector
    decomposition: Decomposition
    paper_literal: bool = False

    @property
    def residual(self) -> StateVector:
        return self.decomposition.residual()


# -- builders ----------------------------------------------------------------


def sps_cascade_circular() -> StateVector:
    """(|R>_1|L>_2 + |L>_1|R>_2)/sqrt2."""
    space = StateSpace((P1, P2), (("R", "L"), ("R", "L")))
    return superpose(
        [1 / SQRT2, 1 / SQRT2],
        [build_term(space, {P1: "R", P2: "L"}), build_term(space, {P1: "L", P2: "R"})],
    )


def sps_indep(sign: int = 1) -> StateVector:
    """1/2 (|x> + s|y>)_1 (|x> + s|y>)_2 with ``s = sign``."""
    return tensor(
        single(P1, ("x", "y"), {"x": 0.5, "y": 0.5 * sign}),
        single(P2, ("x", "y"), {"x": 1, "y": sign}),
    )


def build_sps_cascade() -> Scenario:
    c2l = circular_linear_map("circular->linear")
    psi = apply_local(apply_local(sps_cascade_circular(), P1, c2l), P2, c2l)
    d = decompose(psi, sps_indep(), 2, SQRT2)
    return Scenario("sps-cascade", {}, psi, d)


def build_rotated_pbs(theta: float) -> Scenario:
    base = build_sps_cascade().decomposition
    u = angle_rotation(theta)

    def rot(s: StateVector) -> StateVector:
        return apply_local(apply_local(s, P1, u), P2, u)

    # Rotating all three parts keeps beta*psi = alpha*indep - negative by linearity.
    d = Decomposition(rot(base.psi), rot(base.indep), rot(base.negative), base.alpha, base.beta)
    return Scenario("rotated-pbs", {"theta": float(theta)}, d.psi, d)


def build_hardy() -> Scenario:
    bs = beam_splitter_map(outputs=("v", "u"))
    # two balanced splitters give the overall 1/2
    indep = tensor(
        apply_local(photon_at(SIGNAL), SIGNAL, bs), apply_local(photon_at(IDLER), IDLER, bs)
    )
    negative = build_term(indep.space, {SIGNAL: "u", IDLER: "u"}, -0.5)
    psi = normalize(indep - negative)
    d = decompose(psi, indep, 1, math.sqrt(3) / 2)
    return Scenario("hardy", {}, psi, d)


def single_photon_indep(space: StateSpace) -> StateVector:
    """1/2 e^{i pi/4} |1>_i (|0> + e^{i pi/4}|1>)_r (|0> + e^{-i pi/4}|1>)_t."""
    w = cmath.exp(1j * math.pi / 4)
    state = tensor(
        tensor(
            single(IDLER, ("0", "1"), {"1": 0.5 * w}),
            single(MODE_R, ("0", "1"), {"0": 1, "1": w}),
        ),
        single(MODE_T, ("0", "1"), {"0": 1, "1": w.conjugate()}),
    )
    assert state.space == space
    return state


def single_photon_literal_negative(space: StateSpace) -> StateVector:
    """The printed form e^{i pi/4}|1>_i (|0>_r|0>_t + i|1>_r|1>_t)."""
    w = cmath.exp(1j * math.pi / 4)
    return superpose(
        [w, 1j * w],
        [
            build_term(space, {IDLER: "1", MODE_R: "0", MODE_T: "0"}),
            build_term(space, {IDLER: "1", MODE_R: "1", MODE_T: "1"}),
        ],
    )


def build_single_photon_bs(paper_literal: bool = False) -> Scenario:
    signal = apply_local(photon_at("signal-port"), "signal-port", beam_splitter_map(("t", "r")))
    modes = port_to_occupation(signal, "signal-port", (MODE_R, MODE_T), ports=("r", "t"))
    psi = tensor(single(IDLER, ("0", "1"), {"1": 1}), modes)
    indep = single_photon_indep(psi.space)
    d = decompose(psi, indep, 2, SQRT2)
    if paper_literal:
        d = Decomposition(psi, indep, single_photon_literal_negative(psi.space), d.alpha, d.beta)
    return Scenario("single-photon-bs", {"paper_literal": paper_literal}, psi, d, paper_literal)


ATOM_LABELS = {
    IDLER: (ATOM_A, {"0": "A0", "1": "A*"}),
    MODE_R: (ATOM_B2, {"0": "B'0", "1": "B'*"}),
    MODE_T: (ATOM_B, {"0": "B0", "1": "B*"}),
}


def to_atoms(s: StateVector) -> StateVector:
    for sub, (atom, mapping) in ATOM_LABELS.items():
        s = relabel(s, sub, mapping, new_name=atom)
    return s


def detector_map(s: Scenario) -> Scenario:
    """Absorption picture: photon occupations become excited detector atoms."""
    if s.name != "single-photon-bs":
        raise InvalidScenario(f"detector_map needs single-photon-bs, got {s.name!r}")
    d = s.decomposition
    nd = Decomposition(to_atoms(d.psi), to_atoms(d.indep), to_atoms(d.negative), d.alpha, d.beta)
    return Scenario("detector-atoms", dict(s.params), nd.psi, nd, s.paper_literal)


def build_detector_atoms(paper_literal: bool = False) -> Scenario:
    return detector_map(build_single_photon_bs(paper_literal))


SCENARIOS = {
    "sps-cascade": (build_sps_cascade, ()),
    "rotated-pbs": (build_rotated_pbs, ("theta",)),
    "hardy": (build_hardy, ()),
    "single-photon-bs": (build_single_photon_bs, ("paper_literal",)),
    "detector-atoms": (build_detector_atoms, ("paper_literal",)),
}


def build_scenario(name: str, **params) -> Scenario:
    """Build by name, ignoring parameters the scenario does not take."""
    try:
        builder, keys = SCENARIOS[name]
    except KeyError:
        raise InvalidScenario(f"unknown scenario {name!r}") from None
    kwargs = {k: params[k] for k in keys if params.get(k) is not None}
    if name == "rotated-pbs" and "theta" not in kwargs:
        raise InvalidScenario("rotated-pbs requires theta")
    return builder(**kwargs)


# -- measurement statistics --------------------------------------------------


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    space: StateSpace
    probs: Mapping[ProductKet, float] = field(default_factory=dict)

    def prob(self, outcome: ProductKet | Mapping[str, str]) -> float:
        if isinstance(outcome, Mapping):
            outcome = self.space.ket(outcome)
        return self.probs.get(tuple(outcome), 0.0)

    def __getitem__(self, outcome):
        return self.prob(outcome)

    def total(self) -> float:
        return sum(self.probs.values())

    def records(self) -> list[dict]:
        """Nonzero entries only."""
        return [
            {"outcome": render_ket(self.space, k), "probability": p}
            for k, p in self.probs.items()
            if p > PRUNE_TOL**2
        ]


def measured(psi: StateVector, settings: Mapping[str, Setting] | None = None) -> StateVector:
    """Rotate each subsystem with an angle setting into its measurement basis."""
    for sub, setting in (settings or {}).items():
        if setting == "computational" or setting is None:
            psi.space.index(sub)
            continue
        theta = float(setting)
        psi = apply_local(psi, sub, angle_rotation(theta, psi.space.alphabet(sub)))
    return psi


def _born(s: StateVector) -> OutcomeDistribution:
    n2 = s.norm() ** 2
    if n2 <= PRUNE_TOL**2:
        raise ZeroNorm("no outcome has nonzero probability")
    probs = {k: abs(s.amplitude(k)) ** 2 / n2 for k in s.space.basis()}
    return OutcomeDistribution(s.space, probs)


def outcome_distribution(psi: StateVector, settings: Mapping[str, Setting] | None = None) -> OutcomeDistribution:
    return _born(measured(psi, settings))


def conditional_distribution(
    psi: StateVector, given: tuple[str, str], settings: Mapping[str, Setting] | None = None
) -> OutcomeDistribution:
    """Distribution of the remaining subsystems after observing ``given``."""
    s = measured(psi, settings)
    sub, label = given
    i = s.space.index(sub)
    s.space.label_index(sub, label)
    if s.norm() <= PRUNE_TOL:
        raise ZeroNorm("psi is the zero state")
    kept = {k[:i] + k[i + 1 :]: a for k, a in s.terms.items() if k[i] == label}
    p_given = sum(abs(a) ** 2 for a in kept.values()) / s.norm() ** 2
    if p_given <= EQ_TOL:
        raise ConditionImpossible(f"P({sub}={label}) = {p_given:.3g}")
    return _born(StateVector(s.space.without(sub), kept))


def _two_arms(psi: StateVector) -> tuple[str, str]:
    if len(psi.space) != 2 or any(len(a) != 2 for a in psi.space.alphabets):
        raise InvalidScenario("correlations need two subsystems with two outcomes each")
    return psi.space.subsystems


def correlation(psi: StateVector, theta1: float, theta2: float) -> float:
    """E = P(same port) - P(different port) with analysers at theta1, theta2."""
    a, b = _two_arms(psi)
    dist = outcome_distribution(psi, {a: theta1, b: theta2})
    e = 0.0
    for ket, p in dist.probs.items():
        i = dist.space.label_index(a, ket[0])
        j = dist.space.label_index(b, ket[1])
        e += p if i == j else -p
    return e


def chsh_value(psi: StateVector, a: float, a2: float, b: float, b2: float) -> float:
    return (
        correlation(psi, a, b)
        - correlation(psi, a, b2)
        + correlation(psi, a2, b)
        + correlation(psi, a2, b2)
    )


@dataclass(frozen=True, eq=False)
class SampleResult:
    space: StateSpace
    counts: Mapping[ProductKet, int]
    n: int
    seed: int
    generator: str = GENERATOR

    def count(self, outcome: ProductKet | Mapping[str, str]) -> int:
        if isinstance(outcome, Mapping):
            outcome = self.space.ket(outcome)
        return self.counts.get(tuple(outcome), 0)

    def records(self) -> list[dict]:
        return [
            {"outcome": render_ket(self.space, k), "count": c}
            for k, c in self.counts.items()
            if c > 0
        ]


def sample(
    psi: StateVector, settings: Mapping[str, Setting] | None, n: int, seed: int
) -> SampleResult:
    """Inverse-CDF draws over the canonically ordered outcomes.

    Outcomes with zero probability can never be drawn: the CDF is pinned to 1
    from the last outcome with positive weight onward.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    dist = outcome_distribution(psi, settings)
    outcomes = list(dist.probs)  # canonical order
    p = np.array([dist.probs[k] for k in outcomes])
    p[p <= PRUNE_TOL**2] = 0.0
    cdf = np.cumsum(p / p.sum())
    last = int(np.flatnonzero(p)[-1])
    cdf[last:] = 1.0
    rng = np.random.Generator(np.random.PCG64(seed))
    idx = np.searchsorted(cdf, rng.random(n), side="right")
    hits = np.bincount(idx, minlength=len(outcomes))
    counts = {k: int(c) for k, c in zip(outcomes, hits)}
    return SampleResult(dist.space, counts, n, seed)
