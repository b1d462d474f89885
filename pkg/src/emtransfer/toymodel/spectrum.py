"""Finite joint energy-momentum spectra and the bundled model generators."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from ..spacetime import in_forward_cone

CONE_ATOL = 1e-12


@dataclass(frozen=True)
class QuantumModel:
    """Hilbert space C^d whose basis vectors are joint eigenvectors of P^mu.

    ``spectrum[m]`` is the four-momentum of basis state ``m``; every row lies
    in the closed forward cone.
    """

    spectrum: np.ndarray
    name: str = "model"

    def __post_init__(self):
        p = np.array(self.spectrum, dtype=float, ndmin=2)
        if p.ndim != 2 or p.shape[1] != 4:
            raise ValueError(f"spectrum must have shape (d, 4), got {p.shape}")
        if p.shape[0] < 1:
            raise ValueError("empty spectrum")
        if not np.all(in_forward_cone(p, CONE_ATOL)):
            bad = np.flatnonzero(~in_forward_cone(p, CONE_ATOL))
            raise ValueError(f"spectral points outside the forward cone: rows {bad.tolist()}")
        p.flags.writeable = False
        object.__setattr__(self, "spectrum", p)

    @property
    def dim(self) -> int:
        return self.spectrum.shape[0]

    @property
    def energies(self) -> np.ndarray:
        return self.spectrum[:, 0]

    def transfers(self) -> np.ndarray:
        """q[m, n] = p_m - p_n, the momentum transferred by the |m><n| element."""
        return self.spectrum[:, None, :] - self.spectrum[None, :, :]

    def bohr_frequencies(self, convention: str = "raising") -> np.ndarray:
        """Energy transfer of each matrix element.

        ``"raising"`` (default) takes ``E_m - E_n`` so the positive-frequency
        part raises energy and the negative part annihilates the lowest
        state.  ``"lowering"`` flips the sign.
        """
        w = self.energies[:, None] - self.energies[None, :]
        if convention == "raising":
            return w
        if convention == "lowering":
            return -w
        raise ValueError(f"unknown Bohr convention {convention!r}")

    def momentum_matrices(self) -> list[np.ndarray]:
        return [np.diag(self.spectrum[:, mu]).astype(complex) for mu in range(4)]

    def translation(self, x) -> np.ndarray:
        """U(x) = exp(i x.P) as a diagonal unitary."""
        x = np.asarray(x, dtype=float)
        phase = x[0] * self.spectrum[:, 0] - self.spectrum[:, 1:] @ x[1:]
        return np.diag(np.exp(1j * phase))

    @property
    def has_zero_energy(self) -> bool:
        return bool(np.any(self.energies == 0.0))

    def to_json(self) -> dict:
        return {"name": self.name, "spectrum": [[float(c) for c in row] for row in self.spectrum]}

    @classmethod
    def from_json(cls, data) -> "QuantumModel":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(np.asarray(data["spectrum"], dtype=float), data.get("name", "model"))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)

    @classmethod
    def load(cls, path) -> "QuantumModel":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def random_cone_model(dim: int, rng: np.random.Generator, scale: float = 1.0,
                      include_ground: bool = True, energy_quantum: float | None = None) -> QuantumModel:
    """Random points in the forward cone, optionally with energies on a lattice.

    Quantised energies are rounded *up* so every point stays in the cone; the
    quantised variant makes all Bohr frequencies commensurate.
    """
    n_random = dim - 1 if include_ground else dim
    pvec = rng.normal(size=(n_random, 3)) * scale / 2
    p0 = np.linalg.norm(pvec, axis=1) + rng.exponential(scale, size=n_random)
    if energy_quantum is not None:
        p0 = np.ceil(p0 / energy_quantum) * energy_quantum
    pts = np.column_stack([p0, pvec])
    if include_ground:
        pts = np.vstack([np.zeros(4), pts])
    return QuantumModel(pts, f"random-cone-{dim}")


def lattice_model(dim: int, spacing: float = 0.5, velocity: float = 0.6,
                  include_ground: bool = True) -> QuantumModel:
    """Equally spaced energies ``j * spacing`` with collinear momenta ``velocity * E``."""
    if not 0 <= velocity <= 1:
        raise ValueError("velocity must lie in [0, 1] to stay in the cone")
    start = 0 if include_ground else 1
    e = spacing * np.arange(start, start + dim)
    pts = np.zeros((dim, 4))
    pts[:, 0] = e
    pts[:, 1] = velocity * e
    return QuantumModel(pts, f"lattice-{dim}")


def mass_shell_model(mass: float = 1.0, momenta=None, include_vacuum: bool = True) -> QuantumModel:
    """States on the hyperboloid p^2 = mass^2 over a momentum grid, plus p = 0."""
    if momenta is None:
        momenta = default_shell_momenta()
    momenta = np.asarray(momenta, dtype=float)
    p0 = np.sqrt(mass**2 + np.sum(momenta**2, axis=1))
    pts = np.column_stack([p0, momenta])
    if include_vacuum:
        pts = np.vstack([np.zeros(4), pts])
    return QuantumModel(pts, f"mass-shell-{pts.shape[0]}")


def default_shell_momenta() -> np.ndarray:
    cube = np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=3)))
    extra = np.array([[2.0, 0, 0], [-2.0, 0, 0], [0, 2.0, 0], [0, -2.0, 0]])
    return np.vstack([cube, extra])


def bundled_mass_shell() -> QuantumModel:
    """The shipped 32-dimensional mass-shell model (vacuum + 31 shell states)."""
    text = resources.files("emtransfer").joinpath("data/mass_shell_32.json").read_text()
    return QuantumModel.from_json(text)


def generate(kind: str, dim: int, seed: int = 0, **kw) -> QuantumModel:
    rng = np.random.default_rng(seed)
    if kind == "random-cone":
        return random_cone_model(dim, rng, **kw)
    if kind == "lattice":
        return lattice_model(dim, **kw)
    if kind == "mass-shell":
        if dim == 32 and not kw:
            return bundled_mass_shell()
        grid = np.array(list(itertools.product(range(-2, 3), repeat=3)), dtype=float)
        if dim - 1 > grid.shape[0]:
            raise ValueError("mass-shell generator supports at most 126 states")
        pick = np.sort(rng.choice(grid.shape[0], size=dim - 1, replace=False))
        return mass_shell_model(momenta=grid[pick], **kw)
    raise ValueError(f"unknown model kind {kind!r}")


def spatially_distinct(model: QuantumModel) -> bool:
    """True when no two states share a spatial momentum."""
    return np.unique(np.round(model.spectrum[:, 1:], 12), axis=0).shape[0] == model.dim


__all__ = [
    "QuantumModel", "random_cone_model", "lattice_model", "mass_shell_model",
    "bundled_mass_shell", "generate", "spatially_distinct",
]
