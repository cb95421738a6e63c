"""
Eigenvalues of banded symmetric matrices.

The native path reduces the band to tridiagonal form with Givens rotations,
chasing bulges inside band storage, and then runs implicit-shift QL. The
lapack path hands the band storage to scipy.linalg.eigvals_banded, which runs
the same pipeline in compiled code.
"""
import math
import re
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from src.core.errors import ConvergenceError
from src.core.utils.config_manager import ConfigManager
from src.core.utils.report_logger import ReportLogger
from src.project.spectra.linalg.banded import BandedSymmetricMatrix

logger = ReportLogger()

EPS = float(np.finfo(np.float64).eps)
BACKENDS = ("auto", "native", "lapack")


def _row_band(S: BandedSymmetricMatrix, width: int) -> np.ndarray:
    """Both triangles of S by rows: band[i, width + c - i] = S[i, c], zero-padded past the edges."""
    p = S.dimension
    band = np.zeros((p, 2 * width + 1))
    for k in range(min(S.half_bandwidth, p - 1) + 1):
        values = S.bands[k, :p - k]
        band[k:, width - k] = values
        band[:p - k, width + k] = values
    return band


def _rotate(band: np.ndarray, width: int, m: int, c: float, s: float) -> None:
    """Apply the plane rotation [[c, s], [-s, c]] to rows and columns m, m+1 in place."""
    p = band.shape[0]
    span = 2 * width + 2
    # x[u], y[u] hold S[m, m - width + u] and S[m + 1, m - width + u]
    x = np.zeros(span)
    y = np.zeros(span)
    x[:-1] = band[m]
    y[1:] = band[m + 1]
    alpha, beta, gamma = x[width], x[width + 1], y[width + 1]
    new_x = c * x + s * y
    new_y = c * y - s * x
    cc, ss, cs = c * c, s * s, c * s
    new_x[width] = cc * alpha + 2.0 * cs * beta + ss * gamma
    new_y[width + 1] = ss * alpha - 2.0 * cs * beta + cc * gamma
    new_x[width + 1] = new_y[width] = (cc - ss) * beta + cs * (gamma - alpha)
    band[m] = new_x[:-1]
    band[m + 1] = new_y[1:]

    u = np.arange(span)
    rows = m - width + u
    outside = (rows >= 0) & (rows < p) & (u != width) & (u != width + 1)
    left = outside & (u <= 2 * width)
    band[rows[left], 2 * width - u[left]] = new_x[left]
    right = outside & (u >= 1)
    band[rows[right], 2 * width + 1 - u[right]] = new_y[right]


def _annihilate(band: np.ndarray, width: int, row: int, col: int) -> bool:
    """Zero S[row, col] against S[row - 1, col]; False when it is already zero."""
    m = row - 1
    x = band[m, width + col - m]
    y = band[row, width + col - row]
    if y == 0.0:
        return False
    r = math.hypot(x, y)
    _rotate(band, width, m, x / r, y / r)
    band[row, width + col - row] = 0.0
    band[col, width + row - col] = 0.0
    return True


def tridiagonalize(S: BandedSymmetricMatrix) -> Tuple[np.ndarray, np.ndarray]:
    """
    Orthogonally similar tridiagonal form: (diagonal, subdiagonal).

    Works in band storage one entry wider than S. The outermost diagonal is
    removed one entry at a time with Givens rotations; each rotation pushes a
    bulge one position outside the band, which is chased down the matrix
    before the next entry is touched. Never forms the p x p matrix.
    """
    p = S.dimension
    d = min(S.half_bandwidth, p - 1)
    if d == 0:
        return S.diagonal(0).copy(), np.zeros(max(p - 1, 0))
    if d == 1:
        return S.diagonal(0).copy(), S.diagonal(1).copy()

    width = d + 1
    band = _row_band(S, width)
    for b in range(d, 1, -1):
        for j in range(p - b):
            row, col = j + b, j
            # the rotation at (row - 1, row) leaves its bulge at (row + b, row - 1)
            while row < p and _annihilate(band, width, row, col):
                row, col = row + b, row - 1
    return band[:, width].copy(), band[1:, width - 1].copy()


def tridiagonal_eigenvalues(diag: np.ndarray, off: np.ndarray, max_iterations: int = 50) -> np.ndarray:
    """
    Implicit-shift QL on a symmetric tridiagonal matrix.

    off[m] is treated as zero once |off[m]| <= eps * (|diag[m]| + |diag[m+1]|).
    Raises ConvergenceError with the index being resolved when one eigenvalue
    needs more than max_iterations sweeps.
    """
    d = [float(x) for x in diag]
    n = len(d)
    if len(off) != max(n - 1, 0):
        raise ValueError(f"subdiagonal of length {len(off)} does not match diagonal of length {n}")
    e = [float(x) for x in off] + [0.0]

    for l in range(n):
        iterations = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= EPS * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            if iterations >= max_iterations:
                raise ConvergenceError(l, iterations)
            iterations += 1

            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            shift = 0.0
            deflated = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= shift
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - shift
                r = (d[i] - g) * s + 2.0 * c * b
                shift = s * r
                d[i + 1] = g + shift
                g = c * r - b
            if deflated:
                continue
            d[l] -= shift
            e[l] = g
            e[m] = 0.0
    return np.sort(np.array(d, dtype=np.float64))


def _failure_index(error: Exception) -> int:
    """The first integer in a LAPACK failure message (its info value), or -1 when there is none."""
    match = re.search(r"\d+", str(error))
    return int(match.group()) if match else -1


def _lapack_eigenvalues(S: BandedSymmetricMatrix) -> np.ndarray:
    try:
        values = scipy.linalg.eigvals_banded(S.bands, lower=True, check_finite=False)
    except np.linalg.LinAlgError as e:
        logger.log_error(e, "eigvals_banded")
        raise ConvergenceError(_failure_index(e), 0) from e
    return np.sort(values)


def resolve_backend(p: int, backend: Optional[str] = None) -> str:
    config = ConfigManager().get_eigensolver_config()
    backend = (backend or config['backend']).lower()
    if backend not in BACKENDS:
        raise ValueError(f"Unsupported eigensolver backend: {backend} (choose from {', '.join(BACKENDS)})")
    if backend == "auto":
        backend = "native" if p <= int(config['native_max_dimension']) else "lapack"
    return backend


def eigenvalues(S: BandedSymmetricMatrix, backend: Optional[str] = None,
                max_iterations: Optional[int] = None) -> np.ndarray:
    """All p eigenvalues of S in ascending order."""
    p = S.dimension
    if S.half_bandwidth == 0:
        return np.sort(S.diagonal(0).copy())
    backend = resolve_backend(p, backend)
    logger.debug(f"eigenvalues: p={p}, d={S.half_bandwidth}, backend={backend}")
    if backend == "lapack":
        return _lapack_eigenvalues(S)
    if max_iterations is None:
        max_iterations = int(ConfigManager().get_eigensolver_config()['max_iterations'])
    diag, off = tridiagonalize(S)
    return tridiagonal_eigenvalues(diag, off, max_iterations=max_iterations)
