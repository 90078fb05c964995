"""Even real profiles on a symmetric periodic grid and their Fourier calculus.

Conventions, fixed once and used everywhere:

* Grid points ``x_j = -L + j*h`` for ``j = 0..N-1`` with ``h = 2L/N``;
  frequencies ``k_j = j*pi/L`` in FFT ordering.
* ``coeffs[j]`` is the trapezoid-rule value of the line transform
  ``fhat(k_j) = (1/2pi) * integral f(x) exp(-i k_j x) dx`` over [-L, L);
  the inverse is ``f(x) = dk * sum_j coeffs[j] exp(i k_j x)`` with
  ``dk = pi/L``.  With this normalization ``coeff_at`` at an on-grid
  frequency reproduces the cached coefficient.
* Discrete weighted Sobolev norm:
  ``norm(f; r, q)^2 = 2*pi*dk * sum_j (1 + k_j^2)^r |ghat_j|^2`` where
  ``g = cosh(x)^q * f``; for r = q = 0 this equals ``h * sum f^2``.

Fields are immutable value objects; all operations return new fields.
"""

import csv
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    BoundaryNotDecayedError,
    NonFiniteSymbolError,
    OverflowGuardError,
    SizeMismatchError,
)

#: relative boundary-decay threshold for off-grid coefficient quadrature
BOUNDARY_RTOL = 1e-9
#: largest tolerated even-symmetry drift before symmetrization is refused
EVEN_DRIFT_TOL = 1e-8


@dataclass(frozen=True)
class Grid:
    """Symmetric truncated domain [-L, L) with N equispaced points."""

    half_length: float
    n_points: int

    def __post_init__(self):
        n = self.n_points
        if n < 8 or (n & (n - 1)) != 0:
            raise ValueError(f"n_points must be a power of two >= 8, got {n}")
        if not self.half_length > 0.0:
            raise ValueError("half_length must be positive")

    @property
    def spacing(self):
        return 2.0 * self.half_length / self.n_points

    @cached_property
    def x(self):
        x = -self.half_length + self.spacing * np.arange(self.n_points)
        x.flags.writeable = False
        return x

    @cached_property
    def k(self):
        k = 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.spacing)
        k.flags.writeable = False
        return k

    @cached_property
    def _phase(self):
        # exp(-i k_j x_0) = (-1)^j aligns the FFT with the [-L, L) origin
        p = np.where(np.arange(self.n_points) % 2 == 0, 1.0, -1.0)
        p.flags.writeable = False
        return p

    def to_coeffs(self, values):
        c = (self.spacing / (2.0 * np.pi)) * self._phase * np.fft.fft(values)
        # exact conjugate symmetry: real-even multiplier chains then preserve
        # realness bitwise instead of leaking rounding into odd/imag parts
        return 0.5 * (c + np.conj(self.reflect(c)))

    def from_coeffs(self, coeffs):
        return np.fft.ifft((2.0 * np.pi / self.spacing) * self._phase * coeffs)

    def reflect(self, values):
        """values evaluated at -x_j, i.e. index map j -> (N - j) mod N."""
        out = np.empty_like(values)
        out[0] = values[0]
        out[1:] = values[:0:-1]
        return out

    def symmetrize(self, values):
        return 0.5 * (values + self.reflect(values))


@dataclass(frozen=True)
class WeightedNorm:
    """Exponent pair for the weighted Sobolev norm ||cosh^q(x) f||_{H^r}."""

    r: float
    q: float = 0.0

    def __post_init__(self):
        if self.r < 0 or self.q < 0:
            raise ValueError("regularity and decay indices must be nonnegative")


def _log_cosh(x):
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - np.log(2.0)


class SpectralField:
    """Real profile on a Grid with lazily cached Fourier coefficients."""

    def __init__(self, grid, values, even=True):
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (grid.n_points,):
            raise SizeMismatchError(
                f"expected {grid.n_points} samples, got shape {values.shape}"
            )
        if even:
            mirrored = grid.reflect(values)
            scale = np.max(np.abs(values))
            drift = np.max(np.abs(values - mirrored))
            if scale > 0.0 and drift > EVEN_DRIFT_TOL * scale:
                raise ValueError(f"even-symmetry drift {drift / scale:.3e} too large")
            values = 0.5 * (values + mirrored)
        values = values.copy() if values.base is not None or values.flags.writeable else values
        values.flags.writeable = False
        self.grid = grid
        self.values = values
        self.even = bool(even)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_function(cls, grid, fn, even=True):
        return cls(grid, fn(grid.x), even=even)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.n_points), even=True)

    @classmethod
    def from_coeffs(cls, grid, coeffs, even=True):
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.shape != (grid.n_points,):
            raise SizeMismatchError(
                f"expected {grid.n_points} coefficients, got shape {coeffs.shape}"
            )
        vals = grid.from_coeffs(coeffs)
        scale = np.max(np.abs(vals))
        if scale > 0.0 and np.max(np.abs(vals.imag)) > 1e-10 * scale:
            raise ValueError("coefficients violate conjugate symmetry")
        return cls(grid, vals.real, even=even)

    # -- transforms ------------------------------------------------------------

    @cached_property
    def coeffs(self):
        c = self.grid.to_coeffs(self.values)
        c.flags.writeable = False
        return c

    def apply_multiplier(self, symbol, even_symbol=None):
        """Pointwise multiply coefficients by symbol(k); zeros the Nyquist mode.

        ``symbol`` is a callable of the frequency array or a precomputed
        array.  Evenness of the result is inferred by checking the symbol's
        symmetry unless ``even_symbol`` is given.
        """
        s = symbol(self.grid.k) if callable(symbol) else np.asarray(symbol, dtype=np.float64)
        if s.shape != (self.grid.n_points,):
            raise SizeMismatchError("symbol array does not match the grid")
        if not np.all(np.isfinite(s)):
            raise NonFiniteSymbolError("symbol is not finite at some grid frequency")
        if even_symbol is None:
            refl = self.grid.reflect(s)
            even_symbol = bool(np.allclose(s, refl, rtol=1e-12, atol=0.0))
        c = self.coeffs * s
        c[self.grid.n_points // 2] = 0.0  # unpaired Nyquist mode breaks evenness
        return SpectralField.from_coeffs(self.grid, c, even=self.even and even_symbol)

    def coeff_at(self, freq):
        """Trapezoid quadrature of (1/2pi) * integral f(x) exp(-i*freq*x) dx.

        Spectrally accurate for smooth profiles that decay at the domain
        ends (checked).  For even real fields the result is real; the
        imaginary part is checked against rounding scale and discarded.
        """
        v = self.values
        scale = np.max(np.abs(v))
        if scale > 0.0 and abs(v[0]) > BOUNDARY_RTOL * scale:
            raise BoundaryNotDecayedError(
                f"|f(-L)| = {abs(v[0]):.3e} exceeds {BOUNDARY_RTOL:.0e} * max|f|"
            )
        phase = freq * self.grid.x
        w = self.grid.spacing / (2.0 * np.pi)
        re = w * float(np.dot(v, np.cos(phase)))
        im = -w * float(np.dot(v, np.sin(phase)))
        if self.even:
            if abs(im) > 1e-12 * max(scale, 1e-300):
                raise ValueError(f"even field produced imaginary coefficient {im:.3e}")
            return re
        return complex(re, im)

    # -- norms -----------------------------------------------------------------

    def l2(self):
        return float(np.sqrt(self.grid.spacing * np.dot(self.values, self.values)))

    def sup(self):
        return float(np.max(np.abs(self.values)))

    def weighted_norm(self, r, q=0.0):
        """Discrete H^r norm of cosh(x)^q * f under the fixed convention."""
        if isinstance(r, WeightedNorm):
            r, q = r.r, r.q
        if q < 0 or r < 0:
            raise ValueError("indices must be nonnegative")
        if q * self.grid.half_length > 600.0:
            raise OverflowGuardError("q * L > 600 would overflow the weight")
        g = self.values
        if q > 0.0:
            g = g * np.exp(q * _log_cosh(self.grid.x))
        ghat = self.grid.to_coeffs(g)
        dk = np.pi / self.grid.half_length
        w = (1.0 + self.grid.k**2) ** r if r > 0 else 1.0
        return float(np.sqrt(2.0 * np.pi * dk * np.sum(w * np.abs(ghat) ** 2)))

    # -- arithmetic (pointwise; evenness is exact for even operands) -----------

    def _wrap(self, values, even):
        return SpectralField(self.grid, values, even=even)

    def __add__(self, other):
        if isinstance(other, SpectralField):
            return self._wrap(self.values + other.values, self.even and other.even)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, SpectralField):
            return self._wrap(self.values - other.values, self.even and other.even)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, SpectralField):
            return self._wrap(self.values * other.values, self.even and other.even)
        if np.isscalar(other):
            return self._wrap(self.values * float(other), self.even)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.values, self.even)


def solve_even_linear(grid, matvec, rhs_values):
    """Dense solve of ``matvec(v) = rhs`` restricted to even profiles.

    Linearizations about even profiles typically carry an odd
    (translational) kernel direction, so the full-grid matrix is singular;
    restricting to the even subspace (representative samples j = 0..N/2)
    removes it.  ``matvec`` must map even vectors to even vectors.
    """
    import scipy.linalg

    n = grid.n_points
    m = n // 2
    mat = np.empty((m + 1, m + 1))
    basis = np.zeros(n)
    for j in range(m + 1):
        basis[:] = 0.0
        basis[j] = 1.0
        if 0 < j < m:
            basis[n - j] = 1.0
        mat[:, j] = matvec(basis)[: m + 1]
    rep = scipy.linalg.solve(mat, rhs_values[: m + 1])
    full = np.empty(n)
    full[: m + 1] = rep
    full[m + 1 :] = rep[m - 1 : 0 : -1]
    return full


def transform(field):
    """Discrete coefficients of a field (copy of the cached array)."""
    return field.coeffs.copy()


def inverse_transform(grid, coeffs, even=True):
    """Field from discrete coefficients; inverse of ``transform``."""
    return SpectralField.from_coeffs(grid, coeffs, even=even)


# -- serialization --------------------------------------------------------------


def save_field(field, path, meta=None, kind="profile"):
    """CSV (header x,value; 16 significant digits) plus a JSON sidecar."""
    path = str(path)
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "value"])
        for x, v in zip(field.grid.x, field.values):
            writer.writerow([f"{x:.16g}", f"{v:.16g}"])
    sidecar = {
        "L": field.grid.half_length,
        "N": field.grid.n_points,
        "kind": kind,
    }
    if meta:
        sidecar.update(meta)
    with open(path + ".json", "w", newline="\n") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_field(path, even=True):
    """Field and sidecar dict from files written by ``save_field``."""
    path = str(path)
    with open(path + ".json") as fh:
        meta = json.load(fh)
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    grid = Grid(half_length=float(meta["L"]), n_points=int(meta["N"]))
    if data.shape[0] != grid.n_points:
        raise SizeMismatchError("CSV row count does not match sidecar N")
    return SpectralField(grid, data[:, 1], even=even), meta
