"""Quantum-interface protocols built on the molecular level structure.

Three independent estimators: an off-resonant Raman write/read memory using
a long-lived vibron, a one-sided Fabry-Perot spin-photon interface via the
coupled/uncoupled cavity response, and the optomechanical cooperativity of
a vibrational mode read out through the zero-phonon line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, IntegrationFailure
from .units import bose_occupation

_PULSE_TAILS = 6.0  # integration window extends this many widths past centers


@dataclass(frozen=True)
class Pulse:
    """A Gaussian drive envelope: peak Rabi frequency (rad/s), center and
    width (seconds). Omega(t) = peak * exp(-(t-center)^2 / (2 width^2))."""

    peak_rabi: float
    center: float
    width: float
    shape: str = "gaussian"

    def __post_init__(self):
        if self.shape != "gaussian":
            raise ValueError(f"unsupported pulse shape {self.shape!r}")
        if self.peak_rabi < 0.0:
            raise ValueError("peak Rabi frequency must be non-negative")
        if self.width <= 0.0:
            raise ValueError("pulse width must be positive")

    def envelope(self, t):
        arg = (t - self.center) / self.width
        return self.peak_rabi * np.exp(-0.5 * arg * arg)


@dataclass(frozen=True)
class RamanMemorySpec:
    """Write/read memory on the lambda system S0 -- S1 -- stored vibron.

    gamma0 is the S1 amplitude decay (1/s), kappa_v the vibron decay (1/s),
    detuning the one-photon detuning from S1 (rad/s); storage_hold is the
    dark interval between write and read (seconds).
    """

    gamma0: float
    kappa_v: float
    detuning: float
    signal_pulse: Pulse
    control_pulse: Pulse
    storage_hold: float

    def __post_init__(self):
        if self.gamma0 < 0.0 or self.kappa_v < 0.0:
            raise ValueError("decay rates must be non-negative")
        if self.storage_hold < 0.0:
            raise ValueError("storage hold must be non-negative")


def _lambda_system_rhs(spec: RamanMemorySpec, reverse_from: float | None):
    gamma_half = 0.5 * spec.gamma0
    kappa_half = 0.5 * spec.kappa_v
    delta = spec.detuning

    def rhs(t, y):
        tau = t if reverse_from is None else reverse_from - t
        omega_s = spec.signal_pulse.envelope(tau)
        omega_c = spec.control_pulse.envelope(tau)
        c_g, c_e, c_v = y
        d_g = -0.5j * omega_s * c_e
        d_e = (
            -0.5j * omega_s * c_g
            - 0.5j * omega_c * c_v
            - (gamma_half + 1j * delta) * c_e
        )
        d_v = -0.5j * omega_c * c_e - kappa_half * c_v
        return [d_g, d_e, d_v]

    return rhs


def _solve_amplitudes(spec, y0, t_end, reverse_from=None):
    sol = solve_ivp(
        _lambda_system_rhs(spec, reverse_from),
        (0.0, t_end),
        np.asarray(y0, dtype=complex),
        method="DOP853",
        rtol=1e-10,
        atol=1e-12,
    )
    if not sol.success:
        raise IntegrationFailure(f"amplitude propagation failed: {sol.message}")
    return sol.y[:, -1]


def raman_memory_efficiency(spec: RamanMemorySpec) -> tuple[float, float]:
    """(storage efficiency, total efficiency) of one write/hold/read cycle.

    Single-excitation amplitudes start entirely in the incoming-photon
    channel; the write stage runs both pulses, storage is the vibron
    population at its end, the hold multiplies the stored amplitude by
    exp(-kappa_v * hold / 2), and the read stage replays both pulses
    time-reversed on the remaining amplitude. The evolution is contractive,
    so 0 <= total <= storage <= 1 holds identically.
    """
    pulses = (spec.signal_pulse, spec.control_pulse)
    t_start = min(p.center - _PULSE_TAILS * p.width for p in pulses)
    t_stop = max(p.center + _PULSE_TAILS * p.width for p in pulses)
    window = t_stop - t_start

    shifted = RamanMemorySpec(
        gamma0=spec.gamma0,
        kappa_v=spec.kappa_v,
        detuning=spec.detuning,
        signal_pulse=Pulse(
            spec.signal_pulse.peak_rabi,
            spec.signal_pulse.center - t_start,
            spec.signal_pulse.width,
        ),
        control_pulse=Pulse(
            spec.control_pulse.peak_rabi,
            spec.control_pulse.center - t_start,
            spec.control_pulse.width,
        ),
        storage_hold=spec.storage_hold,
    )
    written = _solve_amplitudes(shifted, [1.0, 0.0, 0.0], window)
    storage = float(abs(written[2]) ** 2)
    if storage == 0.0:
        return 0.0, 0.0

    held = written[2] * math.exp(-0.5 * spec.kappa_v * spec.storage_hold)
    read = _solve_amplitudes(
        shifted, [0.0, 0.0, held], window, reverse_from=window
    )
    total = float(abs(read[0]) ** 2)
    return storage, total


@dataclass(frozen=True)
class CavityInterfaceSpec:
    """Two-port cavity with an optionally coupled narrow-band emitter.

    kappa is the total cavity energy decay rate, kappa_in/kappa_out the
    port couplings (all 1/s, kappa_in + kappa_out <= kappa); g the
    emitter-cavity coupling and gamma the emitter linewidth. When
    emitter_coupled is False the emitter is spectrally shelved and the bare
    cavity response applies.
    """

    g: float
    kappa: float
    kappa_in: float
    kappa_out: float
    gamma: float
    emitter_coupled: bool = True

    def __post_init__(self):
        if min(self.g, self.kappa, self.kappa_in, self.kappa_out, self.gamma) < 0.0:
            raise ValueError("cavity parameters must be non-negative")
        if self.kappa <= 0.0:
            raise ValueError("total cavity linewidth must be positive")
        if self.kappa_in + self.kappa_out > self.kappa * (1.0 + 1e-12):
            raise ValueError("port couplings cannot exceed the total linewidth")

    @property
    def cooperativity(self) -> float:
        if self.gamma == 0.0:
            return math.inf if self.g > 0.0 else 0.0
        return 4.0 * self.g**2 / (self.kappa * self.gamma)


def cavity_response(spec: CavityInterfaceSpec, detunings):
    """Reflection and transmission amplitudes over detuning (rad/s).

    t(d) = sqrt(kappa_in kappa_out) / (i d + kappa/2 + g_eff^2/(i d + gamma/2))
    r(d) = -1 + kappa_in / (same denominator)

    with g_eff = g when the emitter is coupled and 0 otherwise. Satisfies
    |r|^2 + |t|^2 <= 1, with equality exactly for a lossless configuration
    (ports exhaust kappa and no emitter scattering).
    """
    detunings = np.atleast_1d(np.asarray(detunings, dtype=float))
    g_eff = spec.g if spec.emitter_coupled else 0.0
    cavity_pole = 1j * detunings + 0.5 * spec.kappa
    if g_eff > 0.0:
        emitter_pole = 1j * detunings + 0.5 * spec.gamma
        with np.errstate(divide="ignore", invalid="ignore"):
            lamb = np.where(
                np.abs(emitter_pole) > 0.0, g_eff**2 / emitter_pole, np.inf
            )
        denom = cavity_pole + lamb
    else:
        denom = cavity_pole
    finite = np.isfinite(denom)
    transmission = np.zeros_like(denom)
    reflection = np.full_like(denom, -1.0 + 0.0j)
    transmission[finite] = math.sqrt(spec.kappa_in * spec.kappa_out) / denom[finite]
    reflection[finite] = -1.0 + spec.kappa_in / denom[finite]
    return reflection, transmission


def vacuum_rabi_splitting(spec: CavityInterfaceSpec, detunings) -> float:
    """Separation of the two transmission maxima (rad/s) on the given grid."""
    _, transmission = cavity_response(spec, detunings)
    power = np.abs(transmission) ** 2
    detunings = np.atleast_1d(np.asarray(detunings, dtype=float))
    left = detunings < 0.0
    right = detunings > 0.0
    if not left.any() or not right.any():
        raise DomainError("detuning grid must straddle zero")
    peak_left = detunings[left][np.argmax(power[left])]
    peak_right = detunings[right][np.argmax(power[right])]
    return float(peak_right - peak_left)


def spin_photon_fidelity(spec: CavityInterfaceSpec) -> float:
    """Overlap fidelity of the reflection/transmission spin-photon gate.

    The singlet branch reflects with the coupled on-resonance amplitude
    r_on -> -C/(1+C); the shelved branch transmits with the bare amplitude
    t_off. The ideal map has r = -1, t = +1, giving
    F = |t_off - r_on|^2 / 4, monotone in the cooperativity.
    """
    coupled = CavityInterfaceSpec(
        spec.g, spec.kappa, spec.kappa_in, spec.kappa_out, spec.gamma, True
    )
    shelved = CavityInterfaceSpec(
        spec.g, spec.kappa, spec.kappa_in, spec.kappa_out, spec.gamma, False
    )
    r_on, _ = cavity_response(coupled, 0.0)
    _, t_off = cavity_response(shelved, 0.0)
    return float(abs(t_off[0] - r_on[0]) ** 2) / 4.0


@dataclass(frozen=True)
class OptomechParams:
    """Single-molecule optomechanics: vacuum coupling g0 and vibron
    frequency omega_v (rad/s), vibron and ZPL decay rates (1/s), bath
    temperature (kelvin)."""

    g0: float
    omega_v: float
    kappa_v: float
    gamma0: float
    temperature: float

    def __post_init__(self):
        if self.g0 < 0.0:
            raise ValueError("g0 must be non-negative")
        if self.omega_v <= 0.0:
            raise ValueError("vibron frequency must be positive")
        if self.kappa_v <= 0.0 or self.gamma0 <= 0.0:
            raise ValueError("decay rates must be positive")
        if self.temperature < 0.0:
            raise ValueError("temperature must be non-negative")


@dataclass(frozen=True)
class OptomechResult:
    cooperativity: float
    thermal_occupation: float
    ultrastrong: bool


def optomech_cooperativity(
    params: OptomechParams, n_bar: float | None = None
) -> OptomechResult:
    """Thermal cooperativity C = 4 g0^2 / (n_bar kappa_v gamma0).

    n_bar defaults to the Bose occupation of the vibron at the bath
    temperature; passing it explicitly overrides that (an explicit 0 yields
    a divergent cooperativity, reported as +inf). The ultrastrong flag marks
    g0/omega_v in [0.1, 0.5].
    """
    if n_bar is None:
        if params.temperature == 0.0:
            raise DomainError(
                "thermal occupation vanishes at T = 0; pass n_bar explicitly"
            )
        n_bar = bose_occupation(params.omega_v, params.temperature)
    if n_bar < 0.0:
        raise DomainError("n_bar must be non-negative")
    ratio = params.g0 / params.omega_v
    ultrastrong = 0.1 <= ratio <= 0.5
    if n_bar == 0.0:
        return OptomechResult(math.inf, 0.0, ultrastrong)
    coop = 4.0 * params.g0**2 / (n_bar * params.kappa_v * params.gamma0)
    return OptomechResult(coop, float(n_bar), ultrastrong)
