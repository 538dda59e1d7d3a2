"""Physical model: parameters, pump-cavity coupling profiles, effective Hamiltonian.

The chain couples N spin-1/2 sites to a single lossy cavity mode.  After the
cavity operator is replaced by its steady-state amplitude ``alpha`` the spins
see an effective Hamiltonian

    H(alpha) = sum_n wz_n S^z_n + J sum_n S^z_n S^z_{n+1}
               + (V_p / sqrt(N)) * 2 Re(alpha) * sum_n Jpc_n S^x_n
               - Delta_c |alpha|^2

with open boundaries and hbar = 1; all energies are in units of |J|.  Site
labels are 1-based throughout the public API because the coupling profile
formula Jpc_n = cos(pi n) cos(pi n cos phi) is defined on n = 1..N.
"""

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

HALF_PI = math.pi / 2.0
GOLDEN_ANGLE = math.acos(0.2)  # three-mode pattern, repeats every 5 sites


@dataclass(frozen=True)
class ModelParams:
    """All physical parameters of the chain-cavity model.

    Units: hbar = 1, energies in units of |J| (so ``j_ising`` is normally
    +-1).  ``delta_c`` is pump minus cavity frequency; ``kappa`` is the
    cavity decay rate and must be positive so the steady-state photon
    amplitude is always well defined.
    """

    n_sites: int
    omega0: float = 0.1
    j_ising: float = -1.0
    v_pump: float = 0.0
    delta_c: float = -10.0
    kappa: float = 10.0
    phi: float = 0.0

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError("ModelParams: n_sites must be >= 2")
        if not self.kappa > 0:
            raise ValueError("ModelParams: kappa must be > 0")
        if self.omega0 < 0:
            raise ValueError("ModelParams: omega0 must be >= 0")
        for name in ("omega0", "j_ising", "v_pump", "delta_c", "kappa", "phi"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"ModelParams: {name} must be finite")
        if not 0.0 <= self.phi <= HALF_PI + 1e-12:
            raise ValueError("ModelParams: phi must lie in [0, pi/2]")


@dataclass(frozen=True)
class CouplingProfile:
    """Per-site pump-cavity overlap amplitudes Jpc_n, n = 1..N (index n-1)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=float)
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        if amps.ndim != 1 or amps.size < 1:
            raise ValueError("CouplingProfile: amplitudes must be a nonempty 1d array")
        if np.max(np.abs(amps)) > 1.0 + 1e-12:
            raise ValueError("CouplingProfile: amplitudes must lie in [-1, 1]")

    def __len__(self):
        return self.amplitudes.size


@dataclass(frozen=True)
class HamiltonianSpec:
    """Coefficients of the effective spin Hamiltonian (open boundaries).

    ``onsite_z[n-1]`` multiplies S^z_n, ``nn_zz`` multiplies every
    S^z_n S^z_{n+1} bond (N-1 bonds), ``onsite_x[n-1]`` multiplies S^x_n and
    ``constant_offset`` is the photon energy -Delta_c |alpha|^2, tracked
    separately from the spin part.
    """

    onsite_z: np.ndarray
    nn_zz: float
    onsite_x: np.ndarray
    constant_offset: float = 0.0

    def __post_init__(self):
        oz = np.asarray(self.onsite_z, dtype=float)
        ox = np.asarray(self.onsite_x, dtype=float)
        oz.flags.writeable = False
        ox.flags.writeable = False
        object.__setattr__(self, "onsite_z", oz)
        object.__setattr__(self, "onsite_x", ox)
        if oz.shape != ox.shape or oz.ndim != 1 or oz.size < 1:
            raise ValueError("HamiltonianSpec: onsite arrays must be equal-length 1d")

    @property
    def n_sites(self):
        return self.onsite_z.size

    def with_pinning(self, eps):
        """Return a copy with an extra eps * S^z field on site 1.

        Used to select one member of a degenerate pair (e.g. the two Neel
        states of the antiferromagnetic chain) deterministically at finite
        size; the pinned Hamiltonian is what gets measured.
        """
        if eps == 0.0:
            return self
        oz = self.onsite_z.copy()
        oz[0] += eps
        return replace(self, onsite_z=oz)


def _second_factor_exact(n, cos_frac):
    """cos(pi * n * p/q) with the argument reduced mod 2 in exact rationals.

    The argument is folded into [0, 1/2] before the float conversion, so
    every site whose reduced fraction coincides gets the bit-identical
    value; profiles are then exactly periodic at any chain length.
    """
    k = (Fraction(n) * cos_frac) % 2
    if k > 1:
        k = 2 - k                    # cos(2 pi - x) = cos(x)
    sign = 1.0
    if k > Fraction(1, 2):
        k = 1 - k                    # cos(pi - x) = -cos(x)
        sign = -1.0
    if k == 0:
        return sign
    if k == Fraction(1, 2):
        return 0.0
    return sign * math.cos(math.pi * float(k))


def coupling_profile(phi, n_sites):
    """Pump-cavity overlap profile Jpc_n = cos(pi n) cos(pi n cos phi), n = 1..N.

    The first factor is evaluated symbolically as (-1)^n and, whenever
    cos(phi) is (numerically) a small-denominator rational such as 1/(2M-1),
    the second factor's argument is reduced mod 2 in exact rational
    arithmetic.  This keeps the special geometries exact at any chain
    length: phi = 0 gives all ones, phi = pi/2 gives (-1)^n, and the
    three-mode angle arccos(1/5) gives the golden-ratio period-5 pattern
    without floating-point drift at large n.
    """
    if not math.isfinite(phi):
        raise ValueError("coupling_profile: phi must be finite")
    if not 0.0 <= phi <= HALF_PI + 1e-12:
        raise ValueError("coupling_profile: phi must lie in [0, pi/2]")
    n_sites = int(n_sites)
    if n_sites < 1:
        raise ValueError("coupling_profile: n_sites must be >= 1")

    if phi == 0.0:
        c = 1.0
    elif abs(phi - HALF_PI) <= 1e-15:
        c = 0.0
    else:
        c = math.cos(phi)

    frac = Fraction(c).limit_denominator(512)
    exact = abs(float(frac) - c) < 1e-12

    n = np.arange(1, n_sites + 1)
    sign = np.where(n % 2 == 0, 1.0, -1.0)  # cos(pi n) = (-1)^n
    if exact:
        second = np.array([_second_factor_exact(int(k), frac) for k in n])
    else:
        second = np.cos(np.pi * np.fmod(n * c, 2.0))
    return CouplingProfile(amplitudes=sign * second)


def mode_count_angle(m_modes):
    """Pump angle arccos(1/(2M-1)) that seeds M distinct coupling modes."""
    m_modes = int(m_modes)
    if m_modes < 1:
        raise ValueError("mode_count_angle: m_modes must be >= 1")
    if m_modes == 1:
        return 0.0
    return math.acos(1.0 / (2 * m_modes - 1))


def effective_spin_hamiltonian(params, alpha, profile):
    """Spin Hamiltonian for a frozen photon amplitude ``alpha``.

    Only 2 Re(alpha) couples to the spins; the imaginary part enters the
    constant photon-energy offset alone.  The result is real-symmetric in
    the S^z product basis.
    """
    if len(profile) != params.n_sites:
        raise ValueError("effective_spin_hamiltonian: profile length != n_sites")
    alpha = complex(alpha)
    n = params.n_sites
    hx = (params.v_pump / math.sqrt(n)) * (2.0 * alpha.real) * profile.amplitudes
    return HamiltonianSpec(
        onsite_z=np.full(n, params.omega0),
        nn_zz=params.j_ising,
        onsite_x=hx,
        constant_offset=-params.delta_c * abs(alpha) ** 2,
    )


def total_energy(spin_ground_energy, alpha, delta_c):
    """Total energy of a candidate solution: spin part plus photon energy.

    ``spin_ground_energy`` must be the pure spin energy, i.e. it must NOT
    already include the constant offset; the ground-state solvers in this
    package follow that convention.
    """
    return float(spin_ground_energy) - delta_c * abs(complex(alpha)) ** 2
