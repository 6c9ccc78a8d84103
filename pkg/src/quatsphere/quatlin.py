"""Real-quaternion scalars and matrices, Pfaffians and quaternion determinants.

Quaternion matrices are stored through their 2N x 2N complex block
representation, where the scalar ``q0 + i q1 + j q2 + k q3`` becomes::

    [[ w,       x      ],
     [-conj(x), conj(w)]]     w = q0 + i q1,  x = q2 + i q3

Plain complex matrices are numpy arrays throughout.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STRUCTURE_RTOL = 1e-12

_J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


class QuaternionStructureError(ValueError):
    """A complex matrix does not have quaternionic block structure."""


class NotSkewSymmetricError(ValueError):
    pass


class NotPositiveSemidefiniteError(ValueError):
    pass


class NearSingularError(ValueError):
    pass


class EigenvalueError(ArithmeticError):
    """The eigenvalue iteration failed to converge."""


@dataclass(frozen=True)
class Quaternion:
    q0: float
    q1: float = 0.0
    q2: float = 0.0
    q3: float = 0.0

    @property
    def norm2(self) -> float:
        return self.q0 ** 2 + self.q1 ** 2 + self.q2 ** 2 + self.q3 ** 2

    def conj(self) -> "Quaternion":
        return Quaternion(self.q0, -self.q1, -self.q2, -self.q3)

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        a0, a1, a2, a3 = self.q0, self.q1, self.q2, self.q3
        b0, b1, b2, b3 = other.q0, other.q1, other.q2, other.q3
        return Quaternion(
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.q0 + other.q0, self.q1 + other.q1,
                          self.q2 + other.q2, self.q3 + other.q3)


def quat_to_block(q: Quaternion) -> np.ndarray:
    w = complex(q.q0, q.q1)
    x = complex(q.q2, q.q3)
    return np.array([[w, x], [-x.conjugate(), w.conjugate()]])


def block_to_quat(b, rtol: float = STRUCTURE_RTOL) -> Quaternion:
    b = np.asarray(b, dtype=complex)
    if b.shape != (2, 2):
        raise ValueError(f"expected a 2x2 block, got shape {b.shape}")
    scale = max(np.abs(b).max(), 1.0)
    if (abs(b[1, 1] - np.conj(b[0, 0])) > rtol * scale
            or abs(b[1, 0] + np.conj(b[0, 1])) > rtol * scale):
        raise QuaternionStructureError("2x2 block violates the quaternion reality condition")
    w, x = b[0, 0], b[0, 1]
    return Quaternion(w.real, w.imag, x.real, x.imag)


def z_matrix(n: int) -> np.ndarray:
    """``1_n (x) [[0, -1], [1, 0]]``, the 2n x 2n matrix pairing each quaternion slot."""
    return np.kron(np.eye(n), _J2)


def components_to_block(comps) -> np.ndarray:
    """Map a real ``(rows, cols, 4)`` component array to its complex block matrix."""
    comps = np.asarray(comps, dtype=float)
    rows, cols, _ = comps.shape
    w = comps[..., 0] + 1j * comps[..., 1]
    x = comps[..., 2] + 1j * comps[..., 3]
    out = np.empty((2 * rows, 2 * cols), dtype=complex)
    out[0::2, 0::2] = w
    out[0::2, 1::2] = x
    out[1::2, 0::2] = -x.conj()
    out[1::2, 1::2] = w.conj()
    return out


def reality_residual(block) -> float:
    """max |Z conj(M) Z^-1 - M|, computed entrywise without forming Z."""
    m = np.asarray(block)
    w, x = m[0::2, 0::2], m[0::2, 1::2]
    y, v = m[1::2, 0::2], m[1::2, 1::2]
    return float(max(np.abs(v - w.conj()).max(initial=0.0),
                     np.abs(y + x.conj()).max(initial=0.0)))


class QuatMatrix:
    """A rows x cols matrix of real quaternions, held as its complex block form.

    Construction checks the reality condition ``Z conj(M) Z^-1 = M`` to a
    relative tolerance; it never repairs the input.
    """

    __slots__ = ("_block",)

    def __init__(self, block, rtol: float = STRUCTURE_RTOL, check: bool = True):
        block = np.array(block, dtype=complex)
        if block.ndim != 2 or block.shape[0] % 2 or block.shape[1] % 2 or block.size == 0:
            raise QuaternionStructureError(f"block shape {block.shape} is not 2r x 2c")
        if check:
            scale = max(np.abs(block).max(), 1.0)
            if reality_residual(block) > rtol * scale:
                raise QuaternionStructureError("matrix violates the quaternion reality condition")
        block.setflags(write=False)
        self._block = block

    @classmethod
    def from_components(cls, comps) -> "QuatMatrix":
        return cls(components_to_block(comps), check=False)

    @classmethod
    def from_quaternions(cls, rows) -> "QuatMatrix":
        comps = [[(q.q0, q.q1, q.q2, q.q3) for q in row] for row in rows]
        return cls.from_components(comps)

    @classmethod
    def identity(cls, n: int) -> "QuatMatrix":
        return cls(np.eye(2 * n, dtype=complex), check=False)

    @property
    def block(self) -> np.ndarray:
        return self._block

    @property
    def shape(self) -> tuple[int, int]:
        return self._block.shape[0] // 2, self._block.shape[1] // 2

    @property
    def dim(self) -> int:
        r, c = self.shape
        if r != c:
            raise ValueError(f"matrix is {r}x{c}, not square")
        return r

    def __getitem__(self, idx) -> Quaternion:
        j, k = idx
        return block_to_quat(self._block[2 * j:2 * j + 2, 2 * k:2 * k + 2])

    def components(self) -> np.ndarray:
        b = self._block
        w, x = b[0::2, 0::2], b[0::2, 1::2]
        return np.stack([w.real, w.imag, x.real, x.imag], axis=-1)

    def __matmul__(self, other: "QuatMatrix") -> "QuatMatrix":
        return QuatMatrix(self._block @ other._block, check=False)

    def __add__(self, other: "QuatMatrix") -> "QuatMatrix":
        return QuatMatrix(self._block + other._block, check=False)

    def __mul__(self, scalar: float) -> "QuatMatrix":
        if np.iscomplexobj(scalar) and np.imag(scalar) != 0:
            raise TypeError("only real scalars preserve quaternion structure")
        return QuatMatrix(self._block * float(np.real(scalar)), check=False)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, QuatMatrix) and np.array_equal(self._block, other._block)

    def __repr__(self) -> str:
        r, c = self.shape
        return f"QuatMatrix({r}x{c})"

    def dual(self) -> "QuatMatrix":
        return quat_dual(self)

    def is_self_dual(self, rtol: float = STRUCTURE_RTOL) -> bool:
        b = self._block
        scale = max(np.abs(b).max(), 1.0)
        return b.shape[0] == b.shape[1] and np.abs(b - b.conj().T).max() <= rtol * scale


def quat_dual(q: QuatMatrix) -> QuatMatrix:
    # entry (j,k) -> conj of entry (k,j); in block form this is the conjugate transpose
    return QuatMatrix(q.block.conj().T, check=False)


def qtrace(q: QuatMatrix) -> float:
    b = q.block
    if b.shape[0] != b.shape[1]:
        raise ValueError("qtrace needs a square matrix")
    return float(np.diagonal(b)[0::2].real.sum())


def _check_skew(x: np.ndarray, rtol: float) -> None:
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise NotSkewSymmetricError(f"expected a square matrix, got shape {x.shape}")
    if x.shape[0] % 2:
        raise NotSkewSymmetricError("Pfaffian of an odd-dimensional matrix")
    scale = np.abs(x).max(initial=0.0)
    if np.abs(x + x.T).max(initial=0.0) > rtol * max(scale, np.finfo(float).tiny):
        raise NotSkewSymmetricError("matrix is not antisymmetric within tolerance")


def pfaffian(x, rtol: float = STRUCTURE_RTOL) -> complex:
    """Pfaffian by Parlett-Reid skew elimination with partial pivoting, O(m^3).

    Each step pivots the largest entry of the current column into the
    subdiagonal slot (a symmetric row/column swap flips the sign) and then
    eliminates the column with a rank-2 skew update.
    """
    a = np.array(x, dtype=complex)
    _check_skew(a, rtol)
    n = a.shape[0]
    pf = 1.0 + 0.0j
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.abs(a[k + 1:, k]).argmax())
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        piv = a[k, k + 1]
        if piv == 0:
            return 0.0j
        pf *= piv
        if k + 2 < n:
            tau = a[k, k + 2:] / piv
            col = a[k + 2:, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return complex(pf)


def pfaffian_laplace(x) -> complex:
    """Pfaffian by expansion along the first row; (2m-1)!! cost, kept as an oracle."""
    a = np.asarray(x, dtype=complex)
    _check_skew(a, STRUCTURE_RTOL)

    def expand(idx: tuple[int, ...]) -> complex:
        if not idx:
            return 1.0 + 0.0j
        first, rest = idx[0], idx[1:]
        total = 0.0j
        for pos, j in enumerate(rest):
            entry = a[first, j]
            if entry != 0:
                sign = -1.0 if pos % 2 else 1.0
                total += sign * entry * expand(rest[:pos] + rest[pos + 1:])
        return total

    return expand(tuple(range(a.shape[0])))


def qdet(q: QuatMatrix, rtol: float = STRUCTURE_RTOL) -> float:
    """Quaternion determinant of a self-dual matrix, defined as Pf(Z^-1 M).

    For positive semi-definite input this is the nonnegative square root of
    det(M); for indefinite self-dual input the sign comes from the Pfaffian.
    """
    if not q.is_self_dual(rtol):
        raise QuaternionStructureError("qdet requires a self-dual matrix")
    n = q.dim
    zinv = -z_matrix(n)
    m = zinv @ q.block
    # Z^-1 M is antisymmetric exactly in exact arithmetic; round-off is symmetric noise
    return float(pfaffian(0.5 * (m - m.T), rtol=np.inf).real)


def eigenvalues(m) -> np.ndarray:
    """All eigenvalues of a dense complex matrix (LAPACK Hessenberg + shifted QR)."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"eigenvalues needs a square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise EigenvalueError("matrix has non-finite entries")
    try:
        return np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise EigenvalueError(str(exc)) from exc


def _hermitian_eig(q: QuatMatrix, rtol: float):
    if not q.is_self_dual(rtol):
        raise QuaternionStructureError("square root requires a self-dual matrix")
    b = q.block
    evals, evecs = np.linalg.eigh(0.5 * (b + b.conj().T))
    scale = max(np.abs(evals).max(initial=0.0), np.finfo(float).tiny)
    if evals.min() < -rtol * scale:
        raise NotPositiveSemidefiniteError(
            f"eigenvalue {evals.min():.3e} below -{rtol:g} * {scale:.3e}")
    return np.clip(evals, 0.0, None), evecs, scale


def _spectral(evecs, values) -> QuatMatrix:
    s = (evecs * values) @ evecs.conj().T
    s = 0.5 * (s + s.conj().T)
    # project onto quaternion structure to wipe eigh round-off; exact for spectral functions
    zm = z_matrix(s.shape[0] // 2)
    s = 0.5 * (s + zm @ s.conj() @ zm.T)
    return QuatMatrix(s, check=False)


def psd_sqrt(q: QuatMatrix, rtol: float = STRUCTURE_RTOL) -> QuatMatrix:
    """Principal (positive semi-definite) square root of a self-dual PSD matrix."""
    evals, evecs, _ = _hermitian_eig(q, rtol)
    return _spectral(evecs, np.sqrt(evals))


def psd_inv_sqrt(q: QuatMatrix, max_condition: float = 1e12,
                 rtol: float = STRUCTURE_RTOL) -> QuatMatrix:
    evals, evecs, scale = _hermitian_eig(q, rtol)
    if evals.min() <= scale / max_condition:
        raise NearSingularError(
            f"condition number exceeds {max_condition:g}; matrix is near-singular")
    return _spectral(evecs, 1.0 / np.sqrt(evals))
