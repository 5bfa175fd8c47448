"""Tripartite behaviors P(abc|xyz) for two inputs and two outputs per party.

Storage order is fixed: the flat 64-vector runs x-major, then y, z, a, b, c,
so ``p.flat[32*x + 16*y + 8*z + 4*a + 2*b + c] == P(abc|xyz)``. Outcome bit 0
stands for eigenvalue +1 and bit 1 for eigenvalue -1.
"""
from dataclasses import dataclass, field
import itertools
import json

import numpy as np

ENTRY_TOL = 1e-12
NORM_TOL = 1e-10
NS_TOL = 1e-10
MIXED_TOL = 1e-6

PARTIES = ("A", "B", "C")
PAIRS = ("AB", "AC", "BC")
BITS = (0, 1)


class BehaviorError(ValueError):
    """Malformed or unnormalized probability table."""


class SignalingError(ValueError):
    """A quantity that needs no-signaling was asked of a signaling table."""

    def __init__(self, message, deviation):
        super().__init__(f"{message} (worst no-signaling deviation {deviation:.3e})")
        self.deviation = deviation


def party_index(party):
    if isinstance(party, int):
        if party not in (0, 1, 2):
            raise ValueError(f"party index must be 0, 1 or 2, got {party}")
        return party
    try:
        return PARTIES.index(str(party).upper())
    except ValueError:
        raise ValueError(f"unknown party {party!r}") from None


def _check_table(p, n_parties):
    p = np.asarray(p, dtype=float)
    if p.size != 4 ** n_parties:
        raise BehaviorError(f"expected {4 ** n_parties} probabilities, got {p.size}")
    p = p.reshape((2,) * (2 * n_parties))
    if not np.all(np.isfinite(p)):
        raise BehaviorError("probabilities must be finite")
    lo, hi = float(p.min()), float(p.max())
    if lo < -ENTRY_TOL or hi > 1 + ENTRY_TOL:
        raise BehaviorError(f"probabilities outside [0, 1] (min {lo:.3e}, max {hi:.3e})")
    sums = p.reshape(2 ** n_parties, 2 ** n_parties).sum(axis=1)
    worst = float(np.max(np.abs(sums - 1.0)))
    if worst > NORM_TOL:
        raise BehaviorError(f"table not normalized for some input (max |sum - 1| = {worst:.3e})")
    p = p.copy()
    p.flags.writeable = False
    return p


@dataclass(frozen=True, eq=False)
class Behavior:
    """P(abc|xyz) as an immutable array of shape (2, 2, 2, 2, 2, 2) indexed [x, y, z, a, b, c]."""

    p: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "p", _check_table(self.p, 3))

    @classmethod
    def from_function(cls, fn, meta=None):
        """Build from ``fn(a, b, c, x, y, z) -> probability``."""
        p = np.zeros((2,) * 6)
        for x, y, z, a, b, c in itertools.product(BITS, repeat=6):
            p[x, y, z, a, b, c] = fn(a, b, c, x, y, z)
        return cls(p, meta or {})

    @property
    def flat(self):
        return self.p.reshape(64)

    def prob(self, a, b, c, x, y, z):
        return float(self.p[x, y, z, a, b, c])

    def mix(self, other, weight):
        """``weight * self + (1 - weight) * other``."""
        return Behavior(weight * self.p + (1 - weight) * other.p)

    def to_json(self, meta=None):
        return {
            "inputs": 2,
            "outputs": 2,
            "parties": 3,
            "p": [float(v) for v in self.flat],
            "meta": dict(self.meta if meta is None else meta),
        }

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, (str, bytes)):
            obj = json.loads(obj)
        if not isinstance(obj, dict):
            raise BehaviorError("behavior JSON must be an object")
        for key, want in (("inputs", 2), ("outputs", 2), ("parties", 3)):
            if obj.get(key) != want:
                raise BehaviorError(f"field {key!r} must be {want}, got {obj.get(key)!r}")
        if "p" not in obj or not isinstance(obj["p"], list):
            raise BehaviorError("field 'p' must be a list of 64 numbers")
        try:
            p = np.array(obj["p"], dtype=float)
        except (TypeError, ValueError):
            raise BehaviorError("field 'p' must contain only numbers") from None
        if p.shape != (64,):
            raise BehaviorError(f"field 'p' must hold 64 numbers, got {p.size}")
        meta = obj.get("meta", {})
        if not isinstance(meta, dict):
            raise BehaviorError("field 'meta' must be an object")
        return cls(p, meta)

    def to_csv_rows(self):
        rows = [("x", "y", "z", "a", "b", "c", "p")]
        for idx in itertools.product(BITS, repeat=6):
            rows.append(idx + (repr(float(self.p[idx])),))
        return rows


@dataclass(frozen=True, eq=False)
class BipartiteBehavior:
    """P(ab|xy) as an immutable array of shape (2, 2, 2, 2) indexed [x, y, a, b]."""

    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", _check_table(self.p, 2))

    @classmethod
    def from_function(cls, fn):
        p = np.zeros((2,) * 4)
        for x, y, a, b in itertools.product(BITS, repeat=4):
            p[x, y, a, b] = fn(a, b, x, y)
        return cls(p)

    def signaling_deviation(self):
        pa = self.p.sum(axis=3)  # [x, y, a]
        pb = self.p.sum(axis=2)  # [x, y, b]
        return float(max(np.max(np.abs(pa[:, 0] - pa[:, 1])), np.max(np.abs(pb[0] - pb[1]))))

    def is_no_signaling(self, tol=NS_TOL):
        dev = self.signaling_deviation()
        return dev <= tol, dev

    def correlator(self, x, y):
        signs = np.array([[1, -1], [-1, 1]])
        return float(np.sum(signs * self.p[x, y]))

    def expectation(self, side, setting, tol=NS_TOL):
        dev = self.signaling_deviation()
        if dev > tol:
            raise SignalingError("single-party marginal is input dependent", dev)
        if side == 0:
            pa = self.p[setting, 0].sum(axis=1)
        else:
            pa = self.p[0, setting].sum(axis=0)
        return float(pa[0] - pa[1])


def signaling_deviation(p):
    """Worst violation of the two-party no-signaling constraints."""
    t = p.p if isinstance(p, Behavior) else np.asarray(p).reshape((2,) * 6)
    dev = 0.0
    # each party's output summed out; result must not depend on that party's input
    for party in range(3):
        marg = t.sum(axis=3 + party)
        moved = np.moveaxis(marg, party, 0)
        dev = max(dev, float(np.max(np.abs(moved[0] - moved[1]))))
    return dev


def is_no_signaling(p, tol=NS_TOL):
    """Return ``(ok, worst_deviation)``."""
    dev = signaling_deviation(p)
    return dev <= tol, dev


def require_no_signaling(p, tol=NS_TOL, what="quantity"):
    dev = signaling_deviation(p)
    if dev > tol:
        raise SignalingError(f"{what} is undefined for a signaling behavior", dev)
    return dev


_OUTCOME_SIGN = np.array([1.0, -1.0])
_PARITY = np.einsum("a,b,c->abc", _OUTCOME_SIGN, _OUTCOME_SIGN, _OUTCOME_SIGN)


def correlator(p, x, y, z):
    """Full correlator <x y z> = sum_abc (-1)^(a+b+c) P(abc|xyz)."""
    return float(np.sum(_PARITY * p.p[x, y, z]))


def correlators(p):
    """All eight full correlators as an array E[x, y, z]."""
    return np.einsum("xyzabc,abc->xyz", p.p, _PARITY)


def single_marginal_expectation(p, party, setting, tol=NS_TOL):
    """<x_i>, <y_j> or <z_k>, read off with the other parties' inputs fixed to 0."""
    require_no_signaling(p, tol, "single-party marginal")
    k = party_index(party)
    inputs = [0, 0, 0]
    inputs[k] = setting
    block = p.p[tuple(inputs)]
    others = tuple(ax for ax in range(3) if ax != k)
    marg = block.sum(axis=others)
    return float(marg[0] - marg[1])


def pair_marginal(p, pair, tol=NS_TOL):
    """Two-party behavior on ``pair`` (e.g. "BC"), remaining input fixed to 0."""
    require_no_signaling(p, tol, "two-party marginal")
    i, j = sorted(party_index(ch) for ch in pair)
    k = 3 - i - j
    t = p.p.sum(axis=3 + k)  # drop the outcome of party k
    t = np.take(t, 0, axis=k)  # its input no longer matters
    return BipartiteBehavior(t)


def is_marginal_maximally_mixed(p, party, tol=MIXED_TOL, ns_tol=NS_TOL):
    return all(
        abs(single_marginal_expectation(p, party, s, ns_tol)) <= tol for s in BITS
    )


@dataclass(frozen=True)
class MarginalProfile:
    """Single-party expectations ``single[party][setting]`` and two-party
    correlators ``pair[name][s][t]`` for name in AB, AC, BC."""

    single: tuple
    pair: dict

    def to_json(self):
        return {
            "single": {PARTIES[k]: list(self.single[k]) for k in range(3)},
            "pair": {name: [list(row) for row in self.pair[name]] for name in PAIRS},
        }


def marginal_profile(p, tol=NS_TOL):
    require_no_signaling(p, tol, "marginal profile")
    single = tuple(
        tuple(single_marginal_expectation(p, k, s, tol) for s in BITS) for k in range(3)
    )
    pair = {}
    for name in PAIRS:
        pb = pair_marginal(p, name, tol)
        pair[name] = tuple(tuple(pb.correlator(s, t) for t in BITS) for s in BITS)
    return MarginalProfile(single, pair)


def white_noise():
    return Behavior(np.full((2,) * 6, 1 / 8), {"label": "white noise"})


def deterministic(fa, fb, fc):
    """Product of single-party deterministic strategies; ``fa[x]`` is Alice's output bit."""
    return Behavior.from_function(
        lambda a, b, c, x, y, z: float(a == fa[x] and b == fb[y] and c == fc[z]),
        {"label": f"D({fa[0]}{fa[1]},{fb[0]}{fb[1]},{fc[0]}{fc[1]})"},
    )


def product_with_pair(single, pair_box, branch):
    """Behavior ``single(party) x pair_box(other two)`` for branch 'A|BC', 'B|AC' or 'C|AB'.

    ``single`` is an array [x, a] of one-party probabilities; ``pair_box`` is a
    BipartiteBehavior whose two parties are the remaining ones in A, B, C order.
    """
    k = party_index(branch[0])
    single = np.asarray(single, dtype=float)
    q = pair_box.p  # [s, t, u, v]
    t = np.einsum("ia,stuv->istauv", single, q)  # single-party axes first
    # current axis order: (k, i, j, k_out, i_out, j_out) with i < j the pair
    i, j = [m for m in range(3) if m != k]
    order_in = [k, i, j]
    perm = [order_in.index(m) for m in range(3)]
    axes = perm + [3 + m for m in perm]
    return Behavior(np.transpose(t, axes), {"label": f"{branch} product"})
