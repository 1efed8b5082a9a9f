"""Time-domain integration of the modulated ground-state model.

Reference path for the whole simulator: integrates the reduced equations of
motion for (rho22, rho11, rho21) with the explicitly time-dependent
two-photon detuning 2*delta_tilde + 2 a omega_m cos(omega_m t), discards the
transient, and demodulates the absorption trace kappa(t) with a software
lock-in.  Everything else in the package is validated against this path.

Also hosts the full double-lambda steady state (`steady_state_full_lambda`):
the 4-level density matrix under resonant bichromatic drive without
modulation, used to validate the adiabatic elimination behind the reduced
model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    AtomParams,
    DerivedCouplings,
    FieldSpectrum,
    LockInResult,
    ModulationParams,
    ParameterError,
    derive_couplings,
)

__all__ = [
    "GroundState",
    "IntegrationSettings",
    "TimeTrace",
    "integrate_ground_state",
    "absorption",
    "lockin",
    "FullLambdaState",
    "steady_state_full_lambda",
]


@dataclass(frozen=True)
class GroundState:
    """Reduced ground-state variables at one instant."""

    rho22: float
    rho11: float
    rho21: complex


@dataclass(frozen=True)
class IntegrationSettings:
    """Grid and duration controls for `integrate_ground_state`.

    `None` fields are resolved automatically from the working parameters:
    the step obeys dt <= (2 pi / omega_m)/200 and dt <= 0.02/Gamma_g_tilde,
    the transient covers at least 5 modulation periods and 10/Gamma_g_tilde.
    Explicit values below those floors are rejected at integration time.
    """

    steps_per_period: int | None = None
    transient_periods: int | None = None
    n_periods: int = 4

    def __post_init__(self) -> None:
        if self.steps_per_period is not None and self.steps_per_period < 200:
            raise ParameterError(
                f"steps_per_period must be >= 200, got {self.steps_per_period}"
            )
        if self.transient_periods is not None and self.transient_periods < 5:
            raise ParameterError(
                f"transient_periods must be >= 5, got {self.transient_periods}"
            )
        if self.n_periods < 1:
            raise ParameterError(f"n_periods must be >= 1, got {self.n_periods}")


@dataclass(frozen=True)
class TimeTrace:
    """Post-transient trace on a uniform grid spanning integer periods.

    t[0] = 0 coincides with a zero of the drive phase omega_m t, so the
    modulated detuning starts at its maximum.
    """

    t: np.ndarray
    rho22: np.ndarray
    rho11: np.ndarray
    rho21: np.ndarray
    kappa: np.ndarray
    omega_m: float
    dt: float
    n_periods: int

    def state(self, i: int) -> GroundState:
        return GroundState(
            rho22=float(self.rho22[i]),
            rho11=float(self.rho11[i]),
            rho21=complex(self.rho21[i]),
        )

    def write_csv(self, path: str) -> None:
        """Dump the trace as CSV: t, rho22, rho11, Re_rho21, Im_rho21, kappa."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("t,rho22,rho11,Re_rho21,Im_rho21,kappa\n")
            for i in range(self.t.size):
                row = (
                    self.t[i],
                    self.rho22[i],
                    self.rho11[i],
                    self.rho21[i].real,
                    self.rho21[i].imag,
                    self.kappa[i],
                )
                fh.write(",".join(f"{x:.12g}" for x in row) + "\n")


def absorption(
    state: GroundState, atom: AtomParams, couplings: DerivedCouplings
) -> float:
    """Excited-state population kappa fed by the resonant sidebands.

    kappa = (2P/(gamma Gamma)) (calV_L^2 rho22 + calV_R^2 rho11
            - 2 calV_L calV_R Re rho21); zero for the perfectly dark state.
    """
    pref = 2.0 * couplings.P / (atom.gamma * atom.Gamma)
    return pref * (
        couplings.calV_L**2 * state.rho22
        + couplings.calV_R**2 * state.rho11
        - 2.0 * couplings.calV_L * couplings.calV_R * state.rho21.real
    )


def _resolve_settings(
    settings: IntegrationSettings | None,
    omega_m: float,
    Gamma_g_tilde: float,
) -> tuple[int, int, int]:
    T_m = 2.0 * math.pi / omega_m
    spp_floor = max(200, math.ceil(T_m * Gamma_g_tilde / 0.02))
    transient_floor = max(5, math.ceil(10.0 / (Gamma_g_tilde * T_m)))
    if settings is None:
        settings = IntegrationSettings()
    spp = settings.steps_per_period
    if spp is None:
        spp = spp_floor
    elif spp < spp_floor:
        raise ParameterError(
            f"steps_per_period = {spp} gives dt > 0.02/Gamma_g_tilde; "
            f"need >= {spp_floor} for these parameters"
        )
    transient = settings.transient_periods
    if transient is None:
        transient = transient_floor
    elif transient < transient_floor:
        raise ParameterError(
            f"transient_periods = {transient} is shorter than 10/Gamma_g_tilde; "
            f"need >= {transient_floor} for these parameters"
        )
    return spp, transient, settings.n_periods


def integrate_ground_state(
    atom: AtomParams,
    spectrum: FieldSpectrum,
    modulation: ModulationParams,
    delta: float,
    settings: IntegrationSettings | None = None,
) -> TimeTrace:
    """Integrate the reduced model and return the post-transient trace.

    `delta` is half the two-photon detuning from the unperturbed 0-0
    resonance; the light shifts are assembled internally.  Starts from the
    relaxation equilibrium rho22 = rho11 = 1/2, rho21 = 0, integrates an
    integer number of transient periods with fixed-step 4th-order
    Runge-Kutta, then records `n_periods` periods (endpoint included).
    """
    c = derive_couplings(atom, spectrum)
    wm = modulation.omega_m
    spp, transient, n_periods = _resolve_settings(settings, wm, c.Gamma_g_tilde)

    sd = 2.0 * delta + c.delta_r + c.delta_nr
    two_aw = 2.0 * modulation.a * wm
    V_L, V_R, V_LR, K = c.V_L, c.V_R, c.V_LR, c.K
    gt = c.Gamma_g_tilde
    Gg = gt - V_L - V_R
    T_m = 2.0 * math.pi / wm
    h = T_m / spp
    cos = math.cos

    def deriv(t: float, p2: float, p1: float, u: float, v: float):
        x = sd + two_aw * cos(wm * t)
        return (
            V_R * p1 - V_L * p2 + 2.0 * K * v - Gg * (p2 - 0.5),
            V_L * p2 - V_R * p1 - 2.0 * K * v - Gg * (p1 - 0.5),
            -x * v - gt * u + V_LR,
            x * u - gt * v - K * (p2 - p1),
        )

    n_rec = n_periods * spp + 1
    rho22 = np.empty(n_rec)
    rho11 = np.empty(n_rec)
    re21 = np.empty(n_rec)
    im21 = np.empty(n_rec)

    p2, p1, u, v = 0.5, 0.5, 0.0, 0.0
    n_total = (transient + n_periods) * spp
    n_skip = transient * spp
    rec = 0
    t = -transient * T_m
    for step in range(n_total + 1):
        if step >= n_skip:
            rho22[rec] = p2
            rho11[rec] = p1
            re21[rec] = u
            im21[rec] = v
            rec += 1
        if step == n_total:
            break
        k1 = deriv(t, p2, p1, u, v)
        k2 = deriv(t + 0.5 * h, p2 + 0.5 * h * k1[0], p1 + 0.5 * h * k1[1],
                   u + 0.5 * h * k1[2], v + 0.5 * h * k1[3])
        k3 = deriv(t + 0.5 * h, p2 + 0.5 * h * k2[0], p1 + 0.5 * h * k2[1],
                   u + 0.5 * h * k2[2], v + 0.5 * h * k2[3])
        k4 = deriv(t + h, p2 + h * k3[0], p1 + h * k3[1],
                   u + h * k3[2], v + h * k3[3])
        p2 += h * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0
        p1 += h * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0
        u += h * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]) / 6.0
        v += h * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]) / 6.0
        t += h

    # Time is relabeled so t=0 is the first recorded sample; the transient
    # spans integer periods, so the drive phase is unchanged.
    times = np.arange(n_rec) * h
    rho21 = re21 + 1j * im21
    pref = 2.0 * c.P / (atom.gamma * atom.Gamma)
    kappa = pref * (
        c.calV_L**2 * rho22 + c.calV_R**2 * rho11 - 2.0 * c.calV_L * c.calV_R * re21
    )
    return TimeTrace(
        t=times,
        rho22=rho22,
        rho11=rho11,
        rho21=rho21,
        kappa=kappa,
        omega_m=wm,
        dt=h,
        n_periods=n_periods,
    )


def lockin(trace: TimeTrace, alpha: float = 0.0) -> LockInResult:
    """Demodulate kappa(t) at omega_m over the full trace span.

    S = (2/T) integral kappa cos(omega_m t + alpha) dt and Q likewise with
    sine, via the trapezoid rule; a pure cosine of amplitude c gives S = c.
    Requires the trace to span an integer number N >= 4 of periods.
    """
    span = trace.t[-1] - trace.t[0]
    n_float = span * trace.omega_m / (2.0 * math.pi)
    n = round(n_float)
    if abs(n_float - n) > 1e-9 * max(1.0, n_float):
        raise ParameterError(
            f"trace spans a non-integer period count ({n_float!r})"
        )
    if n < 4:
        raise ParameterError(f"lock-in needs >= 4 periods, trace has {n}")
    phase = trace.omega_m * trace.t + alpha
    S = 2.0 / span * np.trapezoid(trace.kappa * np.cos(phase), trace.t)
    Q = 2.0 / span * np.trapezoid(trace.kappa * np.sin(phase), trace.t)
    return LockInResult(S=float(S), Q=float(Q), alpha=alpha)


@dataclass(frozen=True)
class FullLambdaState:
    """Steady 4-level density matrix under resonant bichromatic drive.

    sigma_* are optical coherences in the rotating frame; sigma21 the ground
    coherence.  The printed relaxation model drives rho22 + rho11 to 1
    independently of the excited populations, so `trace` exceeds 1 by
    O(saturation).  `condition` is the linear-system condition number.
    """

    rho_uu: float
    rho_dd: float
    rho22: float
    rho11: float
    sigma_u2: complex
    sigma_d2: complex
    sigma_u1: complex
    sigma_d1: complex
    sigma21: complex
    trace: float
    condition: float


def steady_state_full_lambda(
    atom: AtomParams,
    E_minus1: float,
    E_plus1: float,
    delta: float,
) -> FullLambdaState:
    """Solve the unmodulated double-lambda steady state exactly.

    The drive is the resonant sideband pair alone (upper-branch Rabi rates
    `E_minus1`, `E_plus1`); the lower branch couples with the amplitude ratio
    sqrt(dipole_ratio_sq).  The excited cross coherence rho_ud is dropped
    (its drive is far off resonance for Omega >> Gamma).  Validates the
    adiabatically eliminated reduced model at low saturation.
    """
    if E_minus1 < 0 or E_plus1 < 0:
        raise ParameterError("sideband amplitudes must be >= 0")
    r = atom.dipole_ratio_sq
    sq = math.sqrt(r)
    VLu, VLd = E_minus1, sq * E_minus1
    VRu, VRd = E_plus1, sq * E_plus1
    gu, gd = atom.gamma, r * atom.gamma
    G, Gg = atom.Gamma, atom.Gamma_g
    Du = atom.Delta_L - delta
    Dd = atom.Delta_L + atom.omega_e - delta
    Du1 = atom.Delta_L + delta
    Dd1 = atom.Delta_L + atom.omega_e + delta

    # Unknowns: [ruu, rdd, r22, r11,
    #            Ru2, Iu2, Rd2, Id2, Ru1, Iu1, Rd1, Id1, R21, I21]
    (RUU, RDD, R22, R11,
     RU2, IU2, RD2, ID2, RU1, IU1, RD1, ID1, R21, I21) = range(14)
    A = np.zeros((14, 14))
    b = np.zeros(14)

    # Excited populations: spontaneous decay balances pumping.
    A[0, RUU] = gu
    A[0, IU2] = 2.0 * VLu
    A[0, IU1] = -2.0 * VRu
    A[1, RDD] = gd
    A[1, ID2] = 2.0 * VLd
    A[1, ID1] = -2.0 * VRd
    # Ground populations: pumping, relaxation toward 1/2, decay feeding.
    A[2, IU2] = 2.0 * VLu
    A[2, ID2] = 2.0 * VLd
    A[2, R22] = -Gg
    A[2, RUU] = gu / 2.0
    A[2, RDD] = gd / 2.0
    b[2] = -Gg / 2.0
    A[3, IU1] = -2.0 * VRu
    A[3, ID1] = -2.0 * VRd
    A[3, R11] = -Gg
    A[3, RUU] = gu / 2.0
    A[3, RDD] = gd / 2.0
    b[3] = -Gg / 2.0
    # Optical coherences sigma_u2, sigma_d2 (left-arm pumping).
    A[4, RU2] = -G
    A[4, IU2] = -Du
    A[4, I21] = VRu
    A[5, RU2] = Du
    A[5, IU2] = -G
    A[5, R22] = -VLu
    A[5, RUU] = VLu
    A[5, R21] = VRu
    A[6, RD2] = -G
    A[6, ID2] = -Dd
    A[6, I21] = VRd
    A[7, RD2] = Dd
    A[7, ID2] = -G
    A[7, R22] = -VLd
    A[7, RDD] = VLd
    A[7, R21] = VRd
    # Optical coherences sigma_u1, sigma_d1 (right-arm pumping).
    A[8, RU1] = -G
    A[8, IU1] = -Du1
    A[8, I21] = VLu
    A[9, RU1] = Du1
    A[9, IU1] = -G
    A[9, R21] = -VLu
    A[9, R11] = VRu
    A[9, RUU] = -VRu
    A[10, RD1] = -G
    A[10, ID1] = -Dd1
    A[10, I21] = VLd
    A[11, RD1] = Dd1
    A[11, ID1] = -G
    A[11, R21] = -VLd
    A[11, R11] = VRd
    A[11, RDD] = -VRd
    # Ground coherence sigma_21.
    A[12, I21] = -2.0 * delta
    A[12, R21] = -Gg
    A[12, IU1] = VLu
    A[12, ID1] = VLd
    A[12, IU2] = -VRu
    A[12, ID2] = -VRd
    A[13, R21] = 2.0 * delta
    A[13, I21] = -Gg
    A[13, RU1] = -VLu
    A[13, RD1] = -VLd
    A[13, RU2] = -VRu
    A[13, RD2] = -VRd

    condition = float(np.linalg.cond(A))
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise ParameterError(
            f"degenerate parameters: steady-state system singular "
            f"(condition number {condition:.3g})"
        ) from exc
    if not np.all(np.isfinite(x)):
        raise ParameterError(
            f"degenerate parameters: steady-state solve produced non-finite "
            f"values (condition number {condition:.3g})"
        )
    tr = float(x[RUU] + x[RDD] + x[R22] + x[R11])
    return FullLambdaState(
        rho_uu=float(x[RUU]),
        rho_dd=float(x[RDD]),
        rho22=float(x[R22]),
        rho11=float(x[R11]),
        sigma_u2=complex(x[RU2], x[IU2]),
        sigma_d2=complex(x[RD2], x[ID2]),
        sigma_u1=complex(x[RU1], x[IU1]),
        sigma_d1=complex(x[RD1], x[ID1]),
        sigma21=complex(x[R21], x[I21]),
        trace=tr,
        condition=condition,
    )
