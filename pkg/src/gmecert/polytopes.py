"""Fully-local and two-way-local polytopes, PR-type boxes and LP membership."""
from dataclasses import dataclass
import enum
import itertools
import math

import numpy as np

from . import simplex
from .behavior import (
    BITS,
    Behavior,
    BipartiteBehavior,
    deterministic,
    product_with_pair,
    require_no_signaling,
)

RECONSTRUCTION_TOL = 1e-8

# Single-party deterministic strategies: output bit for input 0 and input 1.
STRATEGIES = tuple(itertools.product(BITS, repeat=2))

BRANCH_ORDER = ("A|BC", "B|AC", "C|AB")


class PolytopeKind(str, enum.Enum):
    FULLY_LOCAL = "fully_local"
    TWO_WAY_LOCAL = "two_way_local"


@dataclass(frozen=True)
class VertexSet:
    kind: PolytopeKind
    vertices: tuple
    labels: tuple

    def __len__(self):
        return len(self.vertices)

    def matrix(self):
        """Columns are the flattened vertices (64 x n)."""
        return np.stack([v.flat for v in self.vertices], axis=1)

    def to_json(self):
        return [
            {**v.to_json(), "meta": {"label": lab, "kind": self.kind.value}}
            for v, lab in zip(self.vertices, self.labels)
        ]


@dataclass(frozen=True)
class PolytopeVerdict:
    member: bool
    weights: tuple | None  # ((vertex id, label, weight), ...)
    max_residual: float
    phase1_objective: float

    def to_json(self):
        return {
            "member": self.member,
            "weights": None if self.weights is None else [
                {"vertex": i, "label": lab, "weight": w} for i, lab, w in self.weights
            ],
            "max_residual": self.max_residual,
            "phase1_objective": self.phase1_objective,
        }


def single_strategy(f):
    """Array [x, a] of a deterministic single-party box with output ``f[x]``."""
    d = np.zeros((2, 2))
    for x in BITS:
        d[x, f[x]] = 1.0
    return d


def enumerate_fully_local():
    vertices, labels = [], []
    for fa, fb, fc in itertools.product(STRATEGIES, repeat=3):
        vertices.append(deterministic(fa, fb, fc))
        labels.append(f"D_A{fa[0]}{fa[1]} D_B{fb[0]}{fb[1]} D_C{fc[0]}{fc[1]}")
    return VertexSet(PolytopeKind.FULLY_LOCAL, tuple(vertices), tuple(labels))


def pr_box(sign_convention=0, visibility=1.0):
    """PR-type box with a XOR b = xy XOR alpha x XOR beta y XOR gamma, mixed with white noise.

    ``sign_convention`` packs (alpha, beta, gamma) as 4 alpha + 2 beta + gamma,
    so every correlator is <xy> = visibility * (-1)^(xy + alpha x + beta y + gamma).
    Convention 0 has correlators (+1, +1, +1, -1) on (00, 01, 10, 11).
    """
    if sign_convention not in range(8):
        raise ValueError(f"PR sign convention must be 0..7, got {sign_convention!r}")
    if not 0.0 <= visibility <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {visibility}")
    alpha, beta, gamma = (sign_convention >> 2) & 1, (sign_convention >> 1) & 1, sign_convention & 1

    def prob(a, b, x, y):
        hit = (a ^ b) == ((x & y) ^ (alpha & x) ^ (beta & y) ^ gamma)
        return visibility * (0.5 if hit else 0.0) + (1 - visibility) * 0.25

    return BipartiteBehavior.from_function(prob)


def bipartite_deterministic(fa, fb):
    return BipartiteBehavior.from_function(lambda a, b, x, y: float(a == fa[x] and b == fb[y]))


def enumerate_bipartite_ns_extremals():
    """16 deterministic boxes followed by the 8 PR-type boxes."""
    boxes = [bipartite_deterministic(fa, fb) for fa, fb in itertools.product(STRATEGIES, repeat=2)]
    boxes += [pr_box(k) for k in range(8)]
    return boxes


def _bipartite_labels():
    labels = [f"D{fa[0]}{fa[1]}xD{fb[0]}{fb[1]}" for fa, fb in itertools.product(STRATEGIES, repeat=2)]
    return labels + [f"PR{k}" for k in range(8)]


def two_way_local_candidates():
    """All 3 x 4 x 24 = 288 products (single deterministic) x (bipartite NS extremal)."""
    extremals = enumerate_bipartite_ns_extremals()
    names = _bipartite_labels()
    out = []
    for branch in BRANCH_ORDER:
        for f in STRATEGIES:
            for box, name in zip(extremals, names):
                beh = product_with_pair(single_strategy(f), box, branch)
                out.append((beh, f"{branch}: D_{branch[0]}{f[0]}{f[1]} x {name}"))
    return out


def enumerate_two_way_local():
    seen = {}
    for beh, label in two_way_local_candidates():
        key = beh.flat.tobytes()
        if key not in seen:
            seen[key] = (beh, label)
    vertices, labels = zip(*seen.values())
    return VertexSet(PolytopeKind.TWO_WAY_LOCAL, tuple(vertices), tuple(labels))


def canonical_l2_behavior(k1, k2, k3, lam=1 / math.sqrt(2), signs=(0, 0, 0)):
    """k1 D_A x PR^lam_BC + k2 D_B x PR^lam_AC + k3 D_C x PR^lam_AB.

    ``signs[i]`` selects the branch's (deterministic box, PR box) pair from
    ``ALIGNED_BRANCHES``; all choices there are aligned, i.e. each branch adds
    +4 lam to <x0y0z1> + <x0y1z0> + <x1y0z0> - <x1y1z1> and +4 lam to its
    companion family member.
    """
    ks = np.array([k1, k2, k3], dtype=float)
    if np.any(ks < 0) or abs(ks.sum() - 1.0) > 1e-12:
        raise ValueError(f"weights must be nonnegative and sum to 1, got {(k1, k2, k3)}")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    total = np.zeros((2,) * 6)
    for k, branch, choice in zip(ks, BRANCH_ORDER, signs):
        if k == 0:
            continue
        f, conv = ALIGNED_BRANCHES[branch][choice]
        beh = product_with_pair(single_strategy(f), pr_box(conv, lam), branch)
        total += k * beh.p
    return Behavior(total, {"label": f"canonical L2 k=({k1}, {k2}, {k3}) lambda={lam}"})


def _aligned_choices():
    # every (deterministic, PR) product whose Mermin contribution and companion
    # member are both +4, found by direct evaluation of the 4 x 8 options
    from .witnesses import mermin_family_values

    table = {}
    for branch in BRANCH_ORDER:
        found = []
        for f in STRATEGIES:
            for conv in range(8):
                beh = product_with_pair(single_strategy(f), pr_box(conv), branch)
                vals = mermin_family_values(beh)
                nonzero = [v for v in vals.values() if abs(v) > 1e-12]
                if abs(vals[0, 0, 0] - 4) < 1e-12 and len(nonzero) == 2 and all(v > 0 for v in nonzero):
                    found.append((f, conv))
        table[branch] = tuple(found)
    return table


ALIGNED_BRANCHES = _aligned_choices()


def membership(p, vertex_set, exact=False, tol=simplex.PIVOT_TOL):
    """Decide whether ``p`` is a convex combination of the vertices.

    Solves ``w >= 0, sum w = 1, sum_v w_v P_v = p`` with the two-phase simplex.
    """
    if not isinstance(p, Behavior):
        raise TypeError("membership needs a Behavior")
    require_no_signaling(p, what="polytope membership")
    vmat = vertex_set.matrix()
    if vmat.shape[0] != p.flat.size:
        raise ValueError(f"dimension mismatch: vertices {vmat.shape[0]}, behavior {p.flat.size}")
    n = vmat.shape[1]
    a = np.vstack([vmat, np.ones((1, n))])
    b = np.concatenate([p.flat, [1.0]])
    res = simplex.solve(np.zeros(n), a, b, exact=exact, tol=tol)
    if res.status == "infeasible":
        return PolytopeVerdict(False, None, float(res.phase1_objective), float(res.phase1_objective))
    w = np.array([float(v) for v in res.x])
    residual = float(np.max(np.abs(vmat @ w - p.flat)))
    member = residual <= RECONSTRUCTION_TOL
    weights = tuple(
        (int(i), vertex_set.labels[i], float(w[i])) for i in np.flatnonzero(w > 0)
    )
    return PolytopeVerdict(member, weights if member else None, residual, float(res.phase1_objective))


def svetlichny_box():
    """a XOR b XOR c = xy XOR yz XOR xz with uniform marginals."""
    return Behavior.from_function(
        lambda a, b, c, x, y, z: 0.25 if (a ^ b ^ c) == ((x & y) ^ (y & z) ^ (x & z)) else 0.0,
        {"label": "Svetlichny box"},
    )
