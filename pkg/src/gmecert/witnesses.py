"""Mermin-type witnesses, the Q quantity, CHSH, Svetlichny and GME certification.

Family indexing: ``M[alpha, beta, gamma]`` is M+ when alpha^beta^gamma == 0 and
M- otherwise. The eight members are the eight inequivalent Mermin polynomials
(each with local bound 2); ``mermin_family(p, 0, 0, 0)`` is the four-correlator
expression <x0y0z1> + <x0y1z0> + <x1y0z0> - <x1y1z1>.
"""
from dataclasses import dataclass, field
import enum
import itertools
import math

import numpy as np

from . import linalg
from .behavior import (
    BITS,
    NS_TOL,
    PARTIES,
    BipartiteBehavior,
    SignalingError,
    correlators,
    is_marginal_maximally_mixed,
    marginal_profile,
    pair_marginal,
    require_no_signaling,
    single_marginal_expectation,
)
from .quantum import BRANCHES, DensityMatrix, MeasurementSettings, born_behavior, expectation

TSIRELSON = 2 * math.sqrt(2)
LOCAL_BOUND = 2.0
SVETLICHNY_BOUND = 4.0

DEFAULT_TOL_MERMIN = 1e-3
DEFAULT_TOL_MARGINAL = 1e-6

FAMILY_INDEX = tuple(itertools.product(BITS, repeat=3))

# (outer, middle, inner) roles: which family index bit each nesting level of Q1
# compares. Q1 itself is (alpha, beta, gamma) = (0, 1, 2).
DEFAULT_Q_PERMUTATIONS = tuple(itertools.permutations(range(3)))

ASSUMPTION_DIM2 = "at least one local Hilbert space dimension = 2"
ASSUMPTION_PROJECTIVE = "behavior is quantum (Born rule on some state)"

INTERPRETATIONS = (
    "family selector reads (a^b^c)+1 as (a^b^c)^1: M+ for even parity, M- for odd",
    "certification uses the Mermin value maximized over the 8 relabeling-equivalent "
    "family members; the literal four-correlator expression is reported as 'mermin'",
    "Q is the minimum over the configured permutations of Q1's nesting roles",
)


def _e(p_or_e):
    if isinstance(p_or_e, np.ndarray) and p_or_e.shape == (2, 2, 2):
        return p_or_e
    return correlators(p_or_e)


def mermin_plus(e, alpha, beta, gamma):
    s = alpha ^ beta ^ gamma
    return (
        (-1) ** gamma * e[0, 0, 1]
        + (-1) ** beta * e[0, 1, 0]
        + (-1) ** alpha * e[1, 0, 0]
        + (-1) ** (s ^ 1) * e[1, 1, 1]
    )


def mermin_minus(e, alpha, beta, gamma):
    return (
        (-1) ** (alpha ^ beta ^ 1) * e[1, 1, 0]
        + (-1) ** (alpha ^ gamma ^ 1) * e[1, 0, 1]
        + (-1) ** (beta ^ gamma ^ 1) * e[0, 1, 1]
        + e[0, 0, 0]
    )


def mermin_family(p, alpha, beta, gamma):
    """Signed value of family member (alpha, beta, gamma)."""
    e = _e(p)
    if alpha ^ beta ^ gamma:
        return float(mermin_minus(e, alpha, beta, gamma))
    return float(mermin_plus(e, alpha, beta, gamma))


def mermin_family_values(p):
    e = _e(p)
    return {idx: mermin_family(e, *idx) for idx in FAMILY_INDEX}


def mermin_value(p):
    """|<x0y0z1> + <x0y1z0> + <x1y0z0> - <x1y1z1>|; local bound 2."""
    return abs(mermin_family(p, 0, 0, 0))


def mermin_max(p):
    """Largest |M_abc| over the family, with the member that attains it."""
    vals = mermin_family_values(p)
    best = max(FAMILY_INDEX, key=lambda idx: abs(vals[idx]))
    return abs(vals[best]), best


def mermin_operator_form(p):
    """<x0y1z1> + <x1y0z1> + <x1y1z0> - <x0y0z0>, the polynomial that splits as
    x0 (CHSH - CHSH')/2 + x1 (CHSH + CHSH')/2. Equals -M[1, 1, 1]."""
    e = _e(p)
    return float(e[0, 1, 1] + e[1, 0, 1] + e[1, 1, 0] - e[0, 0, 0])


def _q_term(vals, roles):
    outer, middle, inner = roles

    def m(bo, bm, bi):
        idx = [0, 0, 0]
        idx[outer], idx[middle], idx[inner] = bo, bm, bi
        return vals[tuple(idx)]

    def inner_pair(bo, bm):
        return abs(m(bo, bm, 0) - m(bo, bm, 1))

    def middle_pair(bo):
        return abs(inner_pair(bo, 0) - inner_pair(bo, 1))

    return abs(middle_pair(0) - middle_pair(1))


def q_from_family(vals, permutations=DEFAULT_Q_PERMUTATIONS):
    return min(_q_term(vals, roles) for roles in permutations)


def q_value(p, permutations=DEFAULT_Q_PERMUTATIONS):
    """Q = min over nesting-role permutations of
    |||M000-M001| - |M010-M011|| - ||M100-M101| - |M110-M111|||."""
    return q_from_family(mermin_family_values(p), permutations)


def svetlichny_value(p):
    """|M+_000 + M-_000|; two-way-local bound 4."""
    e = _e(p)
    return float(abs(mermin_plus(e, 0, 0, 0) + mermin_minus(e, 0, 0, 0)))


def chsh_value(p2, primed=False, tol=NS_TOL):
    """<y1z1> + <y1z0> + <y0z1> - <y0z0>; ``primed`` swaps settings 0 and 1 on both sides."""
    if not isinstance(p2, BipartiteBehavior):
        raise TypeError("chsh_value needs a BipartiteBehavior")
    ok, dev = p2.is_no_signaling(tol)
    if not ok:
        raise SignalingError("CHSH correlators of a signaling pair", dev)
    e = np.array([[p2.correlator(s, t) for t in BITS] for s in BITS])
    if primed:
        e = e[::-1, ::-1]
    return float(e[1, 1] + e[1, 0] + e[0, 1] - e[0, 0])


def chsh_variants(p2):
    """All eight CHSH symmetries: the minus sign at (s, t), with either overall sign."""
    e = np.array([[p2.correlator(s, t) for t in BITS] for s in BITS])
    out = []
    for s, t in itertools.product(BITS, repeat=2):
        signs = np.ones((2, 2))
        signs[s, t] = -1
        val = float(np.sum(signs * e))
        out.extend([val, -val])
    return out


def mermin_decomposition_check(rho, settings, branch="A|BC"):
    """|<M> - (<s0> U + <s1> V)/2| for a state that is a product across ``branch``.

    ``<M>`` is the operator-form Mermin polynomial evaluated on the full Born
    behavior; ``s0, s1`` are the singled-out party's observables evaluated on its
    reduced state, and U = <CHSH> - <CHSH'>, V = <CHSH> + <CHSH'> on the reduced
    state of the remaining pair. The caller asserts the product structure.
    """
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    k = "ABC".index(branch[0])
    rest = [i for i in range(3) if i != k]
    full = born_behavior(rho, settings)
    lhs = mermin_operator_form(full)

    rho_single = linalg.partial_trace(rho.m, [k])
    rho_pair = DensityMatrix(linalg.partial_trace(rho.m, rest))
    single = [expectation(rho_single, settings[k][s]) for s in BITS]

    # Born behavior of the pair: pad the singled-out party with a dummy measurement
    pair_obs = [settings[i] for i in rest]
    pair_settings = MeasurementSettings((pair_obs[0], pair_obs[1], settings[k]))
    padded = DensityMatrix(linalg.kron(rho_pair.m, np.eye(2) / 2))
    pair_box = pair_marginal(born_behavior(padded, pair_settings), "AB")
    chsh = chsh_value(pair_box)
    chsh_p = chsh_value(pair_box, primed=True)
    u, v = chsh - chsh_p, chsh + chsh_p
    return abs(lhs - 0.5 * (single[0] * u + single[1] * v))


class Verdict(str, enum.Enum):
    GME_CERTIFIED = "GME_certified"
    NOT_CERTIFIED = "not_certified"


class Mode(str, enum.Enum):
    DEVICE_INDEPENDENT = "device_independent"
    SEMI_DEVICE_INDEPENDENT = "semi_device_independent"
    ABOVE_THRESHOLD = "above_threshold"


@dataclass(frozen=True)
class Certificate:
    verdict: Verdict
    mode: Mode | None
    evidence: dict
    assumptions: tuple = ()

    def __post_init__(self):
        if self.verdict is Verdict.GME_CERTIFIED and not self.evidence:
            raise ValueError("a GME certificate must carry evidence")

    @property
    def certified(self):
        return self.verdict is Verdict.GME_CERTIFIED

    def to_json(self):
        return {
            "verdict": self.verdict.value,
            "mode": None if self.mode is None else self.mode.value,
            "evidence": self.evidence,
            "assumptions": list(self.assumptions),
        }


def certify(p, tol_mermin=DEFAULT_TOL_MERMIN, tol_marginal=DEFAULT_TOL_MARGINAL, ns_tol=NS_TOL):
    """Apply, in order: Mermin above 2*sqrt(2); Mermin at 2*sqrt(2) with two
    non-random marginals and Q > 0 (device independent); the same with Q = 0,
    valid only under a qubit assumption on one party (semi device independent).
    """
    ns_dev = require_no_signaling(p, ns_tol, "certification")
    m_best, member = mermin_max(p)
    q = q_value(p)
    single = {
        PARTIES[k]: [single_marginal_expectation(p, k, s, ns_tol) for s in BITS]
        for k in range(3)
    }
    non_random = [
        name for k, name in enumerate(PARTIES)
        if not is_marginal_maximally_mixed(p, k, tol_marginal, ns_tol)
    ]
    evidence = {
        "mermin_max": m_best,
        "mermin_member": "".join(map(str, member)),
        "mermin_literal": mermin_value(p),
        "threshold": TSIRELSON,
        "mermin_gap": m_best - TSIRELSON,
        "tol_mermin": tol_mermin,
        "single_expectations": single,
        "non_random_parties": non_random,
        "tol_marginal": tol_marginal,
        "q_value": q,
        "ns_deviation": ns_dev,
    }
    if m_best > TSIRELSON + tol_mermin:
        return Certificate(Verdict.GME_CERTIFIED, Mode.ABOVE_THRESHOLD, evidence,
                           (ASSUMPTION_PROJECTIVE,))
    at_threshold = abs(m_best - TSIRELSON) <= tol_mermin
    if at_threshold and len(non_random) >= 2:
        if q > tol_marginal:
            return Certificate(Verdict.GME_CERTIFIED, Mode.DEVICE_INDEPENDENT, evidence,
                               (ASSUMPTION_PROJECTIVE,))
        return Certificate(Verdict.GME_CERTIFIED, Mode.SEMI_DEVICE_INDEPENDENT, evidence,
                           (ASSUMPTION_PROJECTIVE, ASSUMPTION_DIM2))
    return Certificate(Verdict.NOT_CERTIFIED, None, evidence, (ASSUMPTION_PROJECTIVE,))


@dataclass(frozen=True)
class WitnessReport:
    mermin: float
    mermin_family: dict
    mermin_max: float
    mermin_max_member: tuple
    q_value: float
    svetlichny: float
    marginal_profile: object
    verdicts: dict
    certificate: Certificate
    assumptions: tuple = ()
    interpretations: tuple = field(default=INTERPRETATIONS)

    def to_json(self):
        return {
            "mermin": self.mermin,
            "mermin_family": {"".join(map(str, k)): v for k, v in self.mermin_family.items()},
            "mermin_max": self.mermin_max,
            "mermin_max_member": "".join(map(str, self.mermin_max_member)),
            "q_value": self.q_value,
            "svetlichny": self.svetlichny,
            "marginal_profile": self.marginal_profile.to_json(),
            "verdicts": dict(self.verdicts),
            "certificate": self.certificate.to_json(),
            "assumptions": list(self.assumptions),
            "interpretations": list(self.interpretations),
        }


def witness_report(p, tol_mermin=DEFAULT_TOL_MERMIN, tol_marginal=DEFAULT_TOL_MARGINAL,
                   ns_tol=NS_TOL):
    cert = certify(p, tol_mermin, tol_marginal, ns_tol)
    family = mermin_family_values(p)
    best, member = mermin_max(p)
    mode = cert.mode
    verdicts = {
        "above_threshold_GME": cert.certified and mode is Mode.ABOVE_THRESHOLD,
        "semi_DI_GME": cert.certified,
        "DI_GME": cert.certified and mode in (Mode.DEVICE_INDEPENDENT, Mode.ABOVE_THRESHOLD),
    }
    return WitnessReport(
        mermin=abs(family[0, 0, 0]),
        mermin_family=family,
        mermin_max=best,
        mermin_max_member=member,
        q_value=q_value(p),
        svetlichny=svetlichny_value(p),
        marginal_profile=marginal_profile(p, ns_tol),
        verdicts=verdicts,
        certificate=cert,
        assumptions=cert.assumptions,
    )
