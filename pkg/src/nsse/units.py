"""Physical parameters and the internal unit system.

All heavy numerics run in a dimensionless frame with

    hbar = 1,   gamma = 1 (amplitude decay rate),   lambda0 = 1,

so the wavenumber at line center is k0 = 2*pi and every other constant
is derived from four quoted SI inputs: gamma, lambda0, v_recoil and
omega_recoil.  The atomic mass is never stored; it enters as

    M = hbar * k0**2 / (2 * omega_recoil),

which makes the recoil term of the detuning and the packet spreading
rate exact by construction.  The quoted v_recoil is used only as the
velocity unit for the switching front (the two quoted recoil constants
are mutually consistent to ~0.3%, which AtomParams checks).

User-facing times are measured in tau_natural, by default 1/(2*gamma)
(the population half-life scale for amplitude rate gamma); a convention
switch selects 1/gamma instead.  Detunings are quoted in units of gamma,
lengths in lambda0, front velocities in v_recoil.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 299792458.0  # [m/s]

#: Allowed values for the tau_natural convention switch.
TAU_CONVENTIONS = ("1/(2gamma)", "1/gamma")


@dataclass(frozen=True)
class AtomParams:
    """Quoted SI parameters of the two-level transition.

    gamma         amplitude decay rate [rad/s]; the emitted line has
                  FWHM 2*gamma in angular frequency
    lambda0       transition wavelength [m]
    v_recoil      single-photon recoil velocity hbar*k0/M [m/s]
    omega_recoil  recoil frequency hbar*k0^2/(2M) [rad/s]
    """

    gamma: float
    lambda0: float
    v_recoil: float
    omega_recoil: float

    def __post_init__(self) -> None:
        for name in ("gamma", "lambda0", "v_recoil", "omega_recoil"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        # omega_recoil = k0*v_recoil/2 up to rounding of the quoted values
        implied = self.k0 * self.v_recoil / 2.0
        if abs(implied / self.omega_recoil - 1.0) > 0.01:
            raise ValueError(
                "inconsistent recoil constants: k0*v_recoil/2 = "
                f"{implied:.6g} vs omega_recoil = {self.omega_recoil:.6g}"
            )

    @property
    def k0(self) -> float:
        """Wavenumber at line center [1/m]."""
        return 2.0 * math.pi / self.lambda0

    @property
    def omega0(self) -> float:
        """Transition angular frequency [rad/s]."""
        return SPEED_OF_LIGHT * self.k0

    @staticmethod
    def hydrogen_2p() -> "AtomParams":
        """Lyman-alpha defaults (2p1/2 -> 1s1/2)."""
        return AtomParams(
            gamma=2.0 * math.pi * 50e6,
            lambda0=121.6e-9,
            v_recoil=3.25,
            omega_recoil=2.0 * math.pi * 13.328e6,
        )


def default_atom() -> AtomParams:
    """Default transition parameters (hydrogen Lyman-alpha)."""
    return AtomParams.hydrogen_2p()


@dataclass(frozen=True)
class UnitSystem:
    """Conversion factors between user-facing units and the internal frame.

    time_unit       seconds per tau_natural
    length_unit     meters per internal length (= lambda0)
    velocity_unit   meters/second per front-velocity unit (= v_recoil)
    frequency_unit  rad/s per internal frequency (= gamma)
    eps_recoil      omega_recoil / gamma
    spread_rate     hbar/(M a^2) in units of gamma, the packet spreading
                    rate for width parameter a
    """

    time_unit: float
    length_unit: float
    velocity_unit: float
    frequency_unit: float
    eps_recoil: float
    spread_rate: float
    a: float                 # packet width in lambda0 units
    omega0_over_gamma: float
    tau_convention: str = "1/(2gamma)"

    def __post_init__(self) -> None:
        if self.tau_convention not in TAU_CONVENTIONS:
            raise ValueError(f"tau_convention must be one of {TAU_CONVENTIONS}")
        for name in ("time_unit", "length_unit", "velocity_unit",
                     "frequency_unit", "eps_recoil", "spread_rate", "a"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")

    # -- internal constants (hbar = gamma = lambda0 = 1) -------------------

    @property
    def k0(self) -> float:
        """Line-center wavenumber, exactly 2*pi internally."""
        return 2.0 * math.pi

    @property
    def mass(self) -> float:
        """Internal mass: k0^2 / (2 eps_recoil)."""
        return self.k0 ** 2 / (2.0 * self.eps_recoil)

    @property
    def hbar_over_mass(self) -> float:
        """hbar/M internally; equals 2*omega_recoil/k0^2 in gamma*lambda0^2."""
        return 2.0 * self.eps_recoil / self.k0 ** 2

    @property
    def v_recoil_internal(self) -> float:
        """Quoted recoil velocity in lambda0*gamma units."""
        return self.velocity_unit / (self.length_unit * self.frequency_unit)

    @property
    def tau_scale(self) -> float:
        """Internal time (1/gamma units) per tau_natural."""
        return self.time_unit * self.frequency_unit

    # -- conversions --------------------------------------------------------

    def time_to_internal(self, t: float) -> float:
        """tau_natural units -> internal 1/gamma units."""
        return t * self.tau_scale

    def time_from_internal(self, t_int: float) -> float:
        return t_int / self.tau_scale

    def velocity_to_internal(self, v: float) -> float:
        """v_recoil units -> internal lambda0*gamma units (inf passes through)."""
        return v * self.v_recoil_internal

    def length_to_internal(self, z: float) -> float:
        """lambda0 units are the internal length; identity by construction."""
        return z

    def detuning_to_internal(self, d: float) -> float:
        """gamma units are the internal frequency; identity by construction."""
        return d

    def seconds_to_internal(self, t_si: float) -> float:
        return t_si * self.frequency_unit

    def meters_to_internal(self, z_si: float) -> float:
        return z_si / self.length_unit


def to_internal(params: AtomParams, a: float = 1.0,
                tau_convention: str = "1/(2gamma)") -> UnitSystem:
    """Build the unit system for a packet of width ``a`` (lambda0 units).

    Parameters
    ----------
    params : AtomParams
        Quoted SI transition parameters.
    a : float
        Width parameter of the initial Gaussian packet in lambda0 units;
        the position density has r.m.s. width a/2 per axis.
    tau_convention : str
        "1/(2gamma)" (default) or "1/gamma"; sets the user time unit.
    """
    if not a > 0.0:
        raise ValueError("packet width a must be positive")
    eps = params.omega_recoil / params.gamma
    k0a = 2.0 * math.pi * a
    time_unit = 1.0 / (2.0 * params.gamma)
    if tau_convention == "1/gamma":
        time_unit = 1.0 / params.gamma
    return UnitSystem(
        time_unit=time_unit,
        length_unit=params.lambda0,
        velocity_unit=params.v_recoil,
        frequency_unit=params.gamma,
        eps_recoil=eps,
        spread_rate=2.0 * eps / k0a ** 2,
        a=a,
        omega0_over_gamma=params.omega0 / params.gamma,
        tau_convention=tau_convention,
    )
