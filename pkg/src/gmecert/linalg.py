"""Small dense complex linear algebra for qubit systems (dimensions 2, 4, 8).

Matrices are plain ``numpy`` arrays. Every function returns a fresh,
read-only array so values can be shared freely.
"""
import math

import numpy as np

ALGEBRA_TOL = 1e-12
ITERATIVE_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

for _m in (I2, SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.flags.writeable = False


class NotHermitianError(ValueError):
    pass


def frozen(a):
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


def as_square(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def kron(a, b):
    """Tensor product; entry (i*db + k, j*db + l) is a[i, j] * b[k, l]."""
    a = as_square(a)
    b = as_square(b)
    da, db = a.shape[0], b.shape[0]
    out = a[:, None, :, None] * b[None, :, None, :]
    return frozen(out.reshape(da * db, da * db))


def kron_all(*mats):
    out = mats[0]
    for m in mats[1:]:
        out = kron(out, m)
    return frozen(out)


def trace(a):
    a = as_square(a)
    return complex(np.sum(np.diagonal(a)))


def dagger(a):
    return frozen(np.conj(as_square(a)).T)


def hermiticity_defect(a):
    a = as_square(a)
    return float(np.max(np.abs(a - np.conj(a).T))) if a.size else 0.0


def is_hermitian(a, tol=ALGEBRA_TOL):
    return hermiticity_defect(a) <= tol


def _require_hermitian(a, tol):
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NotHermitianError(f"matrix is not Hermitian (max |A - A^H| = {defect:.3e})")


def jacobi_eigh(a, tol=ITERATIVE_TOL, max_sweeps=60, vectors=True):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.

    Each rotation first removes the phase of the pivot ``a[p, q]`` and then
    applies the classical real rotation that annihilates it. Sweeps stop once
    the off-diagonal Frobenius norm drops below ``1e-15 * ||A||_F``.

    Returns ``(values, vectors)`` with eigenvalues ascending and the
    corresponding eigenvectors as columns (``None`` when ``vectors=False``).
    """
    a = as_square(a)
    _require_hermitian(a, tol)
    n = a.shape[0]
    work = 0.5 * (a + np.conj(a).T)
    vecs = np.eye(n, dtype=complex) if vectors else None
    scale = np.linalg.norm(work) or 1.0

    for _ in range(max_sweeps):
        off = np.linalg.norm(work - np.diag(np.diagonal(work)))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = complex(work[p, q])
                r = abs(apq)
                if r <= 1e-300:
                    continue
                phase = apq / r
                theta = (work[q, q].real - work[p, p].real) / (2.0 * r)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # G = [[c, s], [-s conj(phase), c conj(phase)]] on columns p, q; G^H on rows
                sp, cp = s * phase.conjugate(), c * phase.conjugate()
                colp, colq = work[:, p].copy(), work[:, q].copy()
                work[:, p] = c * colp - sp * colq
                work[:, q] = s * colp + cp * colq
                rowp, rowq = work[p, :].copy(), work[q, :].copy()
                work[p, :] = c * rowp - s * phase * rowq
                work[q, :] = s * rowp + c * phase * rowq
                work[p, q] = work[q, p] = 0.0
                if vectors:
                    vp, vq = vecs[:, p].copy(), vecs[:, q].copy()
                    vecs[:, p] = c * vp - sp * vq
                    vecs[:, q] = s * vp + cp * vq

    values = np.real(np.diagonal(work)).copy()
    order = np.argsort(values, kind="stable")
    return values[order], (vecs[:, order] if vectors else None)


def eigen_hermitian(a, tol=ITERATIVE_TOL):
    """Ascending real eigenvalues of a Hermitian matrix (cyclic Jacobi)."""
    values, _ = jacobi_eigh(a, tol=tol, vectors=False)
    return [float(v) for v in values]


def is_psd(a, tol=ITERATIVE_TOL):
    """True iff the smallest eigenvalue is >= -tol. Non-Hermitian input raises."""
    return eigen_hermitian(a, tol=tol)[0] >= -tol


def partial_trace(rho, keep, dims=(2, 2, 2)):
    """Reduced operator on the subsystems listed in ``keep`` (order preserved)."""
    rho = as_square(rho)
    n = len(dims)
    keep = sorted(keep)
    t = rho.reshape(tuple(dims) * 2)
    traced = [k for k in range(n) if k not in keep]
    for offset, k in enumerate(traced):
        axis = k - offset
        t = np.trace(t, axis1=axis, axis2=axis + t.ndim // 2)
    d = int(np.prod([dims[k] for k in keep]))
    return frozen(t.reshape(d, d))


def permute_subsystems(rho, order, dims=(2, 2, 2)):
    """Reorder tensor factors: output factor i is input factor ``order[i]``."""
    rho = as_square(rho)
    n = len(dims)
    t = rho.reshape(tuple(dims) * 2)
    axes = list(order) + [n + k for k in order]
    d = int(np.prod(dims))
    return frozen(np.transpose(t, axes).reshape(d, d))
