"""Three-qubit states, sharp qubit observables and the Born rule."""
from dataclasses import dataclass, field
import json
import math

import numpy as np

from . import linalg
from .behavior import Behavior, BehaviorError, PARTIES

UNIT_TOL = 1e-9
# Loader tolerance: published coefficients carry six decimals.
INPUT_UNIT_TOL = 1e-5
STATE_HERMITIAN_TOL = 1e-10
STATE_TRACE_TOL = 1e-10
STATE_PSD_TOL = 1e-9

BRANCHES = ("A|BC", "B|AC", "C|AB")


class StateError(ValueError):
    pass


class SettingsError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BlochObservable:
    """Sharp dichotomic qubit observable n . sigma for a unit vector n.

    Vectors within ``INPUT_UNIT_TOL`` of unit length are renormalized.
    """

    n: tuple

    def __post_init__(self):
        v = np.asarray(self.n, dtype=float).reshape(-1)
        if v.shape != (3,) or not np.all(np.isfinite(v)):
            raise SettingsError(f"Bloch vector must be three finite reals, got {self.n!r}")
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > INPUT_UNIT_TOL:
            raise SettingsError(f"Bloch vector {list(v)} has norm {norm:.6f}, expected 1")
        object.__setattr__(self, "n", tuple(float(c) for c in v / norm))

    @classmethod
    def from_angles(cls, theta, phi):
        st = math.sin(theta)
        return cls((st * math.cos(phi), st * math.sin(phi), math.cos(theta)))

    @property
    def vector(self):
        return np.array(self.n)

    @property
    def matrix(self):
        nx, ny, nz = self.n
        return linalg.frozen(nx * linalg.SIGMA_X + ny * linalg.SIGMA_Y + nz * linalg.SIGMA_Z)

    def projector(self, outcome):
        """Projector onto eigenvalue +1 (outcome 0) or -1 (outcome 1)."""
        sign = 1.0 if outcome == 0 else -1.0
        return linalg.frozen(0.5 * (linalg.I2 + sign * self.matrix))


@dataclass(frozen=True, eq=False)
class MeasurementSettings:
    """Two observables per party; ``observables[k][s]`` is party k's setting s."""

    observables: tuple

    def __post_init__(self):
        obs = tuple(tuple(o) for o in self.observables)
        if len(obs) != 3 or any(len(o) != 2 for o in obs):
            raise SettingsError("settings need exactly 3 parties x 2 observables")
        obs = tuple(
            tuple(o if isinstance(o, BlochObservable) else BlochObservable(o) for o in pair)
            for pair in obs
        )
        object.__setattr__(self, "observables", obs)

    def __getitem__(self, party):
        return self.observables[party]

    def vectors(self):
        """Array of shape (3, 2, 3): party, setting, Bloch component."""
        return np.array([[o.n for o in pair] for pair in self.observables])

    @classmethod
    def from_vectors(cls, vecs):
        vecs = np.asarray(vecs, dtype=float)
        return cls(tuple(tuple(BlochObservable(v) for v in vecs[k]) for k in range(3)))

    @classmethod
    def from_angles(cls, angles):
        """12 angles ordered (party, setting, (theta, phi))."""
        a = np.asarray(angles, dtype=float).reshape(3, 2, 2)
        return cls(
            tuple(tuple(BlochObservable.from_angles(*a[k, s]) for s in range(2)) for k in range(3))
        )

    @classmethod
    def uniform(cls, first, second):
        """Every party uses the same pair of directions."""
        return cls(tuple((BlochObservable(first), BlochObservable(second)) for _ in range(3)))

    def to_json(self):
        return {PARTIES[k]: [list(o.n) for o in self.observables[k]] for k in range(3)}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, (str, bytes)):
            obj = json.loads(obj)
        if not isinstance(obj, dict):
            raise SettingsError("settings JSON must be an object with keys A, B, C")
        parties = []
        for name in PARTIES:
            if name not in obj:
                raise SettingsError(f"settings field {name!r} is missing")
            entry = obj[name]
            if not isinstance(entry, list) or len(entry) != 2:
                raise SettingsError(f"settings field {name!r} must hold two Bloch vectors")
            pair = []
            for s, vec in enumerate(entry):
                if (
                    not isinstance(vec, list)
                    or len(vec) != 3
                    or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in vec)
                ):
                    raise SettingsError(f"settings field {name}[{s}] must be three numbers")
                try:
                    pair.append(BlochObservable(vec))
                except SettingsError as exc:
                    raise SettingsError(f"settings field {name}[{s}]: {exc}") from None
            parties.append(tuple(pair))
        return cls(tuple(parties))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated density operator (Hermitian, unit trace, PSD) on 1-3 qubits."""

    m: np.ndarray
    label: str = ""
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        m = linalg.as_square(self.m)
        if m.shape[0] not in (2, 4, 8):
            raise StateError(f"density matrix must be 2x2, 4x4 or 8x8, got {m.shape}")
        defect = linalg.hermiticity_defect(m)
        if defect > STATE_HERMITIAN_TOL:
            raise StateError(f"density matrix not Hermitian (defect {defect:.3e})")
        tr = linalg.trace(m)
        if abs(tr - 1.0) > STATE_TRACE_TOL:
            raise StateError(f"density matrix trace {tr.real:.12f} != 1")
        lowest = linalg.eigen_hermitian(m, tol=STATE_HERMITIAN_TOL)[0]
        if lowest < -STATE_PSD_TOL:
            raise StateError(f"density matrix not positive (min eigenvalue {lowest:.3e})")
        object.__setattr__(self, "m", linalg.frozen(m))

    @property
    def dim(self):
        return self.m.shape[0]

    @classmethod
    def pure(cls, psi, label="", provenance=None):
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise StateError("zero state vector")
        psi = psi / norm
        return cls(np.outer(psi, np.conj(psi)), label, provenance or {})

    def reduced(self, keep):
        return DensityMatrix(linalg.partial_trace(self.m, keep), f"Tr[{self.label}]")


def _ket(bits):
    v = np.zeros(8, dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def w_vector():
    return (_ket("001") + _ket("010") + _ket("100")) / math.sqrt(3)


def w_state():
    return DensityMatrix.pure(w_vector(), "W")


def noisy_w(v):
    """``v |W><W| + (1 - v) I/8``; the noise term is the three-qubit maximally mixed state."""
    if not (0.0 <= v <= 1.0) or not math.isfinite(v):
        raise StateError(f"visibility must lie in [0, 1], got {v}")
    w = np.outer(w_vector(), np.conj(w_vector()))
    m = v * w + (1 - v) * np.eye(8) / 8
    return DensityMatrix(
        m, f"noisy-W v={v}", {"noise": "I8/8 (three-qubit maximally mixed)", "v": v}
    )


def gghz_state(theta):
    """``cos(theta)|000> + sin(theta)|111>`` for 0 < theta <= pi/4."""
    if not (0.0 < theta <= math.pi / 4 + 1e-15):
        raise StateError(f"GGHZ angle must satisfy 0 < theta <= pi/4, got {theta}")
    psi = math.cos(theta) * _ket("000") + math.sin(theta) * _ket("111")
    return DensityMatrix.pure(psi, f"GGHZ theta={theta}")


def ghz_state():
    return gghz_state(math.pi / 4)


BELL_VECTORS = {
    "phi+": np.array([1, 0, 0, 1]) / math.sqrt(2),
    "phi-": np.array([1, 0, 0, -1]) / math.sqrt(2),
    "psi+": np.array([0, 1, 1, 0]) / math.sqrt(2),
    "psi-": np.array([0, 1, -1, 0]) / math.sqrt(2),
}


def bell_state(name="psi-"):
    try:
        return DensityMatrix.pure(BELL_VECTORS[name], name)
    except KeyError:
        raise StateError(f"unknown Bell state {name!r}") from None


def biseparable_state(branch, pure_single, bell_pair):
    """``|psi><psi|`` on the singled-out party tensored with a two-qubit state on the rest.

    ``branch`` is 'A|BC', 'B|AC' or 'C|AB'; the pair state is ordered as the two
    remaining parties in A, B, C order. The result is always ordered A x B x C.
    """
    if branch not in BRANCHES:
        raise StateError(f"branch must be one of {BRANCHES}, got {branch!r}")
    psi = np.asarray(pure_single, dtype=complex).reshape(-1)
    if psi.shape != (2,) or abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise StateError("single-party vector must be a normalized 2-vector")
    pair = bell_pair if isinstance(bell_pair, DensityMatrix) else DensityMatrix(bell_pair)
    if pair.dim != 4:
        raise StateError("pair state must be a 4x4 density matrix")
    single = np.outer(psi, np.conj(psi))
    m = linalg.kron(single, pair.m)  # factor order: singled-out, then the pair
    k = "ABC".index(branch[0])
    rest = [i for i in range(3) if i != k]
    current = [k] + rest
    m = linalg.permute_subsystems(m, [current.index(i) for i in range(3)])
    return DensityMatrix(m, f"{branch} product", {"branch": branch})


def mixture(weights, states, label="mixture"):
    m = sum(w * s.m for w, s in zip(weights, states))
    return DensityMatrix(m, label)


def _projectors(settings):
    """Array [party, setting, outcome, 2, 2]."""
    return np.array(
        [[[o.projector(a) for a in (0, 1)] for o in settings[k]] for k in range(3)]
    )


def born_behavior(rho, settings):
    """P(abc|xyz) = Tr[rho (P^x_a x P^y_b x P^z_c)] with P^x_a = (I + (-1)^a n_x.sigma)/2."""
    if not isinstance(rho, DensityMatrix):
        raise StateError("born_behavior needs a DensityMatrix")
    if rho.dim != 8:
        raise StateError("born_behavior needs a three-qubit state")
    if not isinstance(settings, MeasurementSettings):
        raise SettingsError("born_behavior needs MeasurementSettings")
    proj = _projectors(settings)
    t = rho.m.reshape((2,) * 6)  # [i, j, k, i', j', k']
    p = np.einsum(
        "ijkIJK,xaIi,ybJj,zcKk->xyzabc", t, proj[0], proj[1], proj[2], optimize=True
    ).real
    p = np.where(np.abs(p) < 1e-15, 0.0, p)
    try:
        return Behavior(p, {"state": rho.label, **rho.provenance})
    except BehaviorError as exc:  # pragma: no cover - guarded by state validation
        raise StateError(f"Born rule produced an invalid table: {exc}") from None


def correlation_tensor(rho):
    """T[i, j, k] = Tr[rho sigma_i x sigma_j x sigma_k] for i, j, k in {x, y, z}."""
    m = rho.m if isinstance(rho, DensityMatrix) else np.asarray(rho)
    t = m.reshape((2,) * 6)
    paulis = np.array(linalg.PAULIS)
    return np.einsum("ijkIJK,aIi,bJj,cKk->abc", t, paulis, paulis, paulis).real


def pair_correlation_tensor(rho2):
    m = rho2.m if isinstance(rho2, DensityMatrix) else np.asarray(rho2)
    t = m.reshape((2,) * 4)
    paulis = np.array(linalg.PAULIS)
    return np.einsum("ijIJ,aIi,bJj->ab", t, paulis, paulis).real


def expectation(rho, observable):
    """Tr[rho (n . sigma)] for a single-qubit state."""
    m = rho.m if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return float(linalg.trace(m @ observable.matrix).real)
