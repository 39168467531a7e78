"""Cell-centered finite differences on boxes with no-flux boundaries.

Cells are uniform per axis; unknowns live at cell centers x_j = (j+1/2)*h.
Neumann boundaries enter through mirror ghost cells (a_{-1} = a_0), which is
the same thing as zero boundary fluxes in the flux form used below.  The
resulting Laplacian annihilates constants exactly and conserves cell sums to
rounding, and its eigenvectors are the sampled half-grid cosines.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft
import scipy.linalg
import scipy.sparse


@dataclass(frozen=True)
class Grid:
    dim: int
    lengths: tuple[float, ...]
    cells: tuple[int, ...]
    h: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "h", tuple(L / M for L, M in zip(self.lengths, self.cells))
        )

    @property
    def shape(self) -> tuple[int, ...]:
        return self.cells

    @property
    def num_cells(self) -> int:
        return int(np.prod(self.cells))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    def coordinates(self, axis: int = 0) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        M = self.cells[axis]
        return (np.arange(M) + 0.5) * self.h[axis]

    def integrate(self, a: np.ndarray) -> float:
        """Midpoint-rule integral of a cell array over the box."""
        return float(np.sum(a) * self.cell_volume)


def build_grid(dim: int, lengths, cells) -> Grid:
    """Validate and construct a Grid.

    dim must be 1 or 2, every length positive, and every axis at least
    4 cells (coarser grids cannot represent the diagnostics meaningfully).
    """
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim!r}")
    lengths = tuple(float(L) for L in np.atleast_1d(lengths))
    cells = tuple(int(M) for M in np.atleast_1d(cells))
    if len(lengths) != dim or len(cells) != dim:
        raise ValueError(
            f"lengths and cells must each have {dim} entries, "
            f"got {len(lengths)} and {len(cells)}"
        )
    if any(L <= 0 or not np.isfinite(L) for L in lengths):
        raise ValueError(f"lengths must be positive, got {lengths}")
    if any(M < 4 for M in cells):
        raise ValueError(f"need at least 4 cells per axis, got {cells}")
    return Grid(dim=dim, lengths=lengths, cells=cells)


@dataclass
class Field:
    """State on a grid: component arrays stacked as data[(w_1..w_N, u)]."""

    grid: Grid
    data: np.ndarray  # shape (N+1, *grid.shape)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.shape[1:] != self.grid.shape:
            raise ValueError(
                f"data shape {self.data.shape} does not match grid {self.grid.shape}"
            )

    @property
    def n_packs(self) -> int:
        return self.data.shape[0] - 1

    @property
    def w(self) -> np.ndarray:
        return self.data[:-1]

    @property
    def u(self) -> np.ndarray:
        return self.data[-1]

    def copy(self) -> "Field":
        return Field(self.grid, self.data.copy())

    @classmethod
    def from_constant(cls, grid: Grid, values) -> "Field":
        """Broadcast per-component constants onto the grid."""
        values = np.asarray(values, dtype=float).ravel()
        data = np.empty((values.size,) + grid.shape)
        data[...] = values.reshape((-1,) + (1,) * grid.dim)
        return cls(grid, data)


def _axis_laplacian(a: np.ndarray, h: float, axis: int) -> np.ndarray:
    # Flux form: interior fluxes (a_{j+1}-a_j)/h, boundary fluxes zero.
    flux = np.diff(a, axis=axis) / h
    pad = [(0, 0)] * a.ndim
    pad[axis] = (1, 1)
    flux = np.pad(flux, pad)
    return np.diff(flux, axis=axis) / h


def laplacian_apply(grid: Grid, a: np.ndarray) -> np.ndarray:
    """Apply the Neumann Laplacian to one cell array (shape = grid.shape).

    Also accepts a stack of arrays with leading component axes; the operator
    acts on the trailing grid axes.
    """
    a = np.asarray(a, dtype=float)
    if a.shape[-grid.dim:] != grid.shape:
        raise ValueError(f"array shape {a.shape} does not end in grid shape {grid.shape}")
    out = np.zeros_like(a)
    for axis in range(grid.dim):
        out += _axis_laplacian(a, grid.h[axis], axis - grid.dim)
    return out


def neumann_eigenvalues(grid: Grid, mode) -> tuple[float, float]:
    """Continuous and discrete Laplacian eigenvalues for one cosine mode.

    mode is an int (1D) or tuple of ints per axis, each in [0, cells).
    Returns (nu_continuous, nu_discrete) with

        nu_cont = sum_axis (m*pi/L)^2
        nu_disc = sum_axis (2/h^2) * (1 - cos(m*pi/M))

    Both are >= 0; the discrete value is what `laplacian_apply` produces on
    the sampled eigenvector cos(m*pi*(j+1/2)/M).
    """
    modes = (mode,) if np.isscalar(mode) else tuple(mode)
    if len(modes) != grid.dim:
        raise ValueError(f"expected {grid.dim} mode indices, got {modes}")
    cont = disc = 0.0
    for m, L, M, h in zip(modes, grid.lengths, grid.cells, grid.h):
        m = int(m)
        if not 0 <= m < M:
            raise ValueError(f"mode index {m} outside [0, {M})")
        cont += (m * np.pi / L) ** 2
        disc += 2.0 / h**2 * (1.0 - np.cos(m * np.pi / M))
    return cont, disc


def neumann_eigenvector(grid: Grid, mode) -> np.ndarray:
    """Sampled cosine eigenvector for `neumann_eigenvalues` (unnormalized)."""
    modes = (mode,) if np.isscalar(mode) else tuple(mode)
    out = np.ones(grid.shape)
    for axis, m in enumerate(modes):
        M = grid.cells[axis]
        vec = np.cos(int(m) * np.pi * (np.arange(M) + 0.5) / M)
        shape = [1] * grid.dim
        shape[axis] = M
        out = out * vec.reshape(shape)
    return out


def laplacian_matrix(grid: Grid) -> scipy.sparse.csr_matrix:
    """Assembled sparse Neumann Laplacian on C-order flattened cell arrays."""
    blocks = []
    for L, M, h in zip(grid.lengths, grid.cells, grid.h):
        main = np.full(M, -2.0)
        main[0] = main[-1] = -1.0
        off = np.ones(M - 1)
        blocks.append(scipy.sparse.diags([off, main, off], [-1, 0, 1]) / h**2)
    if grid.dim == 1:
        return blocks[0].tocsr()
    eye = [scipy.sparse.identity(M) for M in grid.cells]
    return (
        scipy.sparse.kron(blocks[0], eye[1]) + scipy.sparse.kron(eye[0], blocks[1])
    ).tocsr()


def _dct_eigenvalues(M: int, h: float) -> np.ndarray:
    return 2.0 / h**2 * (1.0 - np.cos(np.arange(M) * np.pi / M))


def implicit_diffusion_solver(grid: Grid, c: float):
    """Return a callable solving (I - c*Lap) x = b on cell arrays.

    c = dt * diffusivity in a backward-Euler step; must be >= 0.  In 1D the
    tridiagonal system is solved directly (multiple right-hand sides may be
    stacked along a trailing axis via ``solver(b.T).T`` style usage; here the
    callable accepts shape (M,) or (K, M)).  In 2D the operator is
    diagonalized by the type-II cosine transform along both axes.
    """
    if c < 0 or not np.isfinite(c):
        raise ValueError(f"need finite c >= 0, got {c!r}")
    if c == 0.0:
        return lambda b: np.array(b, dtype=float, copy=True)
    if grid.dim == 1:
        (M,) = grid.cells
        (h,) = grid.h
        r = c / h**2
        ab = np.zeros((3, M))
        ab[0, 1:] = -r
        ab[1, :] = 1.0 + 2.0 * r
        ab[1, 0] = ab[1, -1] = 1.0 + r
        ab[2, :-1] = -r

        def solve_1d(b: np.ndarray) -> np.ndarray:
            b = np.asarray(b, dtype=float)
            if b.ndim == 1:
                return scipy.linalg.solve_banded((1, 1), ab, b)
            # leading component axes: solve all at once as column RHS
            flat = b.reshape(-1, M).T
            return scipy.linalg.solve_banded((1, 1), ab, flat).T.reshape(b.shape)

        return solve_1d

    nus = [_dct_eigenvalues(M, h) for M, h in zip(grid.cells, grid.h)]
    denom = 1.0 + c * (nus[0][:, None] + nus[1][None, :])

    def solve_2d(b: np.ndarray) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        axes = (-2, -1)
        coeff = scipy.fft.dctn(b, type=2, norm="ortho", axes=axes)
        coeff /= denom
        return scipy.fft.idctn(coeff, type=2, norm="ortho", axes=axes)

    return solve_2d
