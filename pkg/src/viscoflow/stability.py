"""Linearized dispersion relations about uniform equilibrium, Routh-Hurwitz
determinants, polynomial root solving, and the closed loop back to the
nonlinear solver in its linear regime.

Polynomials are in the variable x = -i*Omega where Omega = omega - v0.k is
the frequency in the frame moving with the background; stability means every
root has negative real part. Background velocity only shifts the real part
of omega, so verdicts are frame independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .materials import MaterialLaw, ReferenceState, eval_transport, sound_speed

__all__ = [
    "Background",
    "DispersionProblem",
    "StabilityVerdict",
    "ShearDispersion",
    "FitError",
    "equilibrium_background",
    "bulk_dispersion",
    "shear_dispersion",
    "routh_hurwitz",
    "hurwitz_deltas",
    "poly_roots",
    "polynomial_verdict",
    "verify_against_simulation",
    "WaveFit",
    "fit_complex_exponential",
]

MARGINAL_BAND = 1e-9  # |Re x| below this is classified marginal, never stable


@dataclass(frozen=True)
class Background:
    """Uniform equilibrium state with transport coefficients frozen at it."""

    rho0: float
    cs: float
    zeta: float
    tau: float
    eta: float = 1.0
    v0: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "v0", tuple(float(c) for c in self.v0))


def equilibrium_background(law: MaterialLaw, reference: ReferenceState) -> Background:
    zeta, eta, tau = eval_transport(law, reference.rho_bar, reference.Pi_bar,
                                    3.0 * reference.Pi_bar**2)
    return Background(rho0=reference.rho_bar, cs=sound_speed(law, reference.rho_bar),
                      zeta=zeta, tau=tau, eta=eta, v0=reference.v_bar)


@dataclass
class DispersionProblem:
    """Cubic dispersion polynomial of the bulk system at one wavenumber."""

    k_vec: np.ndarray
    background: Background
    poly: np.ndarray  # coefficients in x = -i Omega, highest degree first
    shift: float      # v0 . k, relating Omega to the lab-frame omega


@dataclass
class StabilityVerdict:
    deltas: tuple[float, ...]
    stable: bool
    roots: np.ndarray
    max_real_part: float
    marginal: bool = False


@dataclass
class ShearDispersion:
    """Factored dispersion polynomials of the 10-field system at one wavenumber."""

    k_vec: np.ndarray
    background: Background
    relaxation: np.ndarray   # (1 + tau x), root -1/tau with multiplicity 3
    transverse: np.ndarray   # rho tau x^2 + rho x + eta k^2
    acoustic: np.ndarray     # rho tau x^3 + rho x^2 + (3 zeta + 4 eta + cs^2 rho tau) k^2 x + cs^2 rho k^2
    shift: float

    @property
    def factors(self) -> dict[str, np.ndarray]:
        return {"relaxation": self.relaxation, "transverse": self.transverse,
                "acoustic": self.acoustic}


def bulk_dispersion(background: Background, k_vec) -> DispersionProblem:
    """Cubic tau x^3 + x^2 + tau k^2 (cs^2 + zeta/rho0) x + k^2 cs^2."""
    k_vec = np.asarray(k_vec, dtype=float)
    k2 = float(np.dot(k_vec, k_vec))
    b = background
    poly = np.array([b.tau, 1.0,
                     b.tau * k2 * (b.cs**2 + b.zeta / b.rho0),
                     k2 * b.cs**2])
    return DispersionProblem(k_vec, b, poly, shift=float(np.dot(b.v0, k_vec)))


def shear_dispersion(background: Background, k_vec) -> ShearDispersion:
    """The three factors of the 10x10 linearized determinant."""
    k_vec = np.asarray(k_vec, dtype=float)
    k2 = float(np.dot(k_vec, k_vec))
    b = background
    relaxation = np.array([b.tau, 1.0])
    transverse = np.array([b.rho0 * b.tau, b.rho0, b.eta * k2])
    acoustic = np.array([b.rho0 * b.tau, b.rho0,
                         (3.0 * b.zeta + 4.0 * b.eta + b.cs**2 * b.rho0 * b.tau) * k2,
                         b.cs**2 * b.rho0 * k2])
    return ShearDispersion(k_vec, b, relaxation, transverse, acoustic,
                           shift=float(np.dot(b.v0, k_vec)))


def hurwitz_deltas(poly) -> tuple[float, ...]:
    """Hurwitz-style determinants for degree <= 3 polynomials.

    Cubic [a3, a2, a1, a0]: (a0, a1 a2 - a0 a3, a3 (a1 a2 - a0 a3)), the
    convention whose positivity (together with a2 > 0) is equivalent to all
    roots lying in the open left half plane. Quadratic [a2, a1, a0]:
    (a1, a1 a0). Linear [a1, a0]: (a0,).
    """
    p = np.asarray(poly, dtype=float)
    if len(p) == 4:
        d2 = p[2] * p[1] - p[3] * p[0]
        return (p[3], d2, p[0] * d2)
    if len(p) == 3:
        return (p[1], p[1] * p[2])
    if len(p) == 2:
        return (p[1],)
    raise ValueError(f"unsupported polynomial degree {len(p) - 1}")


def _second_coefficient_positive(poly) -> bool:
    # for a cubic, delta positivity alone misses the sign of the x^2
    # coefficient; for lower degrees the leading coefficient plays that role
    p = np.asarray(poly, dtype=float)
    return bool(p[1] > 0.0) if len(p) == 4 else bool(p[0] > 0.0)


def poly_roots(poly, polish: bool = True):
    """All roots via the companion matrix, one Newton step each, sorted by
    (real, imag). Returns (roots, degree_reduced) where the flag records a
    vanishing leading coefficient that forced degree reduction.
    """
    p = np.asarray(poly, dtype=float)
    if p.size == 0 or not np.any(p != 0.0):
        raise ValueError("polynomial has no nonzero coefficients")
    scale = float(np.max(np.abs(p)))
    reduced = False
    while p.size > 1 and abs(p[0]) <= 1e-300 * scale:
        p = p[1:]
        reduced = True
    if p.size == 1:
        return np.array([], dtype=complex), reduced
    roots = np.roots(p)
    if polish:
        dp = np.polyder(p)
        val = np.polyval(p, roots)
        der = np.polyval(dp, roots)
        ok = np.abs(der) > 0
        roots[ok] = roots[ok] - val[ok] / der[ok]
    order = np.lexsort((roots.imag, roots.real))
    return roots[order], reduced


def polynomial_verdict(poly, marginal_band: float = MARGINAL_BAND) -> StabilityVerdict:
    """Stability of one factor judged by its deltas, cross-checked by roots."""
    roots, _ = poly_roots(poly)
    max_re = float(np.max(roots.real)) if roots.size else -np.inf
    deltas = hurwitz_deltas(poly)
    stable = all(d > 0.0 for d in deltas) and _second_coefficient_positive(poly)
    marginal = bool(abs(max_re) <= marginal_band)
    if marginal:
        stable = False
    return StabilityVerdict(deltas, stable, roots, max_re, marginal)


def routh_hurwitz(problem: DispersionProblem,
                  marginal_band: float = MARGINAL_BAND) -> StabilityVerdict:
    """Verdict for the bulk cubic: deltas (k^2 cs^2, a1 a2 - a0 a3, tau * that)."""
    return polynomial_verdict(problem.poly, marginal_band)


def shear_verdict(disp: ShearDispersion,
                  marginal_band: float = MARGINAL_BAND) -> dict[str, StabilityVerdict]:
    """Per-factor verdicts; the system is stable iff every factor is."""
    return {name: polynomial_verdict(p, marginal_band) for name, p in disp.factors.items()}


# ---------------------------------------------------------------------------
# closed loop against the nonlinear solver in its linear regime


class FitError(RuntimeError):
    """The recorded signal is not a clean exponential; carries the residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (fit residual {residual:.3e})")
        self.residual = residual


@dataclass
class WaveFit:
    decay_rate: float       # -Re x of the fitted exponential
    frequency: float        # |Im x|
    residual: float         # rms relative misfit of log-amplitude


def fit_complex_exponential(times: np.ndarray, signal: np.ndarray,
                            max_residual: float = 0.05) -> WaveFit:
    """Least-squares fit of signal ~ C exp(x t) for complex x.

    Fits log(signal) linearly in t with phase unwrapping; raises FitError if
    the signal has zeros or the log-linear residual exceeds `max_residual`.
    """
    mags = np.abs(signal)
    if np.any(mags <= 0.0) or not np.all(np.isfinite(mags)):
        raise FitError("signal vanished or became non-finite", np.inf)
    logmag = np.log(mags)
    phase = np.unwrap(np.angle(signal))
    a = np.vstack([times, np.ones_like(times)]).T
    (slope_re, _), res_re, *_ = np.linalg.lstsq(a, logmag, rcond=None)
    (slope_im, _), res_im, *_ = np.linalg.lstsq(a, phase, rcond=None)
    n = len(times)
    spread_mag = max(float(logmag.max() - logmag.min()), 1e-30)
    spread_ph = max(float(phase.max() - phase.min()), 1e-30)
    rms_mag = float(np.sqrt(np.sum(res_re) / n)) / spread_mag if np.size(res_re) else 0.0
    rms_ph = float(np.sqrt(np.sum(res_im) / n)) / spread_ph if np.size(res_im) else 0.0
    rms = max(rms_mag, rms_ph)
    if rms > max_residual:
        raise FitError("signal is not a single exponential", rms)
    return WaveFit(decay_rate=-float(slope_re), frequency=abs(float(slope_im)), residual=rms)


@dataclass
class SimulationComparison:
    k: float
    predicted: complex        # least-damped root x = -i Omega
    fitted_decay: float
    fitted_frequency: float
    decay_error: float        # relative
    frequency_error: float    # relative
    tolerance: float
    passed: bool
    fit_residual: float


def _least_damped_oscillatory(poly) -> complex:
    roots, _ = poly_roots(poly)
    osc = roots[np.abs(roots.imag) > 1e-12]
    pick = osc if osc.size else roots
    idx = int(np.argmax(pick.real))
    root = pick[idx]
    return complex(root.real, abs(root.imag))


def _law_for_background(background: Background) -> MaterialLaw:
    # gamma = 2 makes A = cs^2 / (2 rho0) reproduce the requested sound speed
    b = background
    return MaterialLaw(A=b.cs**2 / (2.0 * b.rho0), gamma=2.0,
                       zeta=b.zeta, eta=b.eta, tau=b.tau)


def verify_against_simulation(background: Background, k: float,
                              system: str = "bulk",
                              cells_per_wavelength: int = 256,
                              amplitude_frac: float = 1e-6,
                              tolerance: float = 0.02,
                              cfl: float = 0.4,
                              settle_periods: float = 1.0,
                              fit_periods: float = 2.0) -> SimulationComparison:
    """Run a periodic plane-wave ring-down and compare with the dispersion root.

    Seeds the linear eigenmode of the least-damped oscillatory root at
    wavenumber k with relative amplitude `amplitude_frac`, records the k-th
    spatial Fourier coefficient of the perturbed field, fits a complex
    exponential over `fit_periods` after discarding `settle_periods`, and
    checks decay rate and frequency against the prediction within `tolerance`.
    """
    from . import solver  # local import: solver sits above this module

    b = background
    law = _law_for_background(b)
    if system == "bulk":
        poly = bulk_dispersion(b, (k, 0.0, 0.0)).poly
    elif system == "shear_transverse":
        poly = shear_dispersion(b, (k, 0.0, 0.0)).transverse
    else:
        raise ValueError(f"unknown system {system!r}")
    x_fit = _least_damped_oscillatory(poly)  # seeded mode evolves as exp(x t)

    length = 2.0 * np.pi / k
    grid = solver.Grid1D(geometry="planar", n_cells=cells_per_wavelength,
                         x_min=0.0, x_max=length, bc="periodic")
    reference = ReferenceState(rho_bar=b.rho0, R=length / 4.0)
    sim = solver.Simulation.uniform(grid, system="bulk" if system == "bulk" else "shear",
                                    law=law, reference=reference, cfl=cfl)

    x_cells = grid.centers_interior
    eps = amplitude_frac * b.rho0
    wave = np.exp(1j * k * x_cells)
    if system == "bulk":
        drho = -1j * b.rho0 * k * eps / x_fit
        dpi = -1j * b.zeta * k * eps / (1.0 + b.tau * x_fit)
        sim.fields.set("rho", b.rho0 + np.real(drho * wave))
        sim.fields.set("u", np.real(eps * wave))
        sim.fields.set("Pi", np.real(dpi * wave))
        probe = "rho"
    else:
        dpi12 = -1j * b.eta * k * eps / (1.0 + b.tau * x_fit)
        sim.fields.set("v2", np.real(eps * wave))
        sim.fields.set("Pi12", np.real(dpi12 * wave))
        probe = "v2"

    period = 2.0 * np.pi / max(abs(x_fit.imag), 1e-30)
    t_settle = settle_periods * period
    t_end = t_settle + fit_periods * period
    times, coeffs = [], []

    def observer(s):
        f = s.fields.get(probe)
        base = b.rho0 if probe == "rho" else 0.0
        c = np.sum((f - base) * np.exp(-1j * k * x_cells)) * grid.dx
        times.append(s.t)
        coeffs.append(c)

    outcome, _ = solver.run(sim, t_end, observer=observer)
    if outcome.status != "ok":
        raise FitError(f"solver stopped with status {outcome.status}", np.inf)

    times_arr = np.asarray(times)
    coeffs_arr = np.asarray(coeffs)
    window = times_arr >= t_settle
    fit = fit_complex_exponential(times_arr[window], coeffs_arr[window])

    decay_pred = -x_fit.real
    freq_pred = abs(x_fit.imag)
    decay_err = abs(fit.decay_rate - decay_pred) / max(abs(decay_pred), 1e-30)
    freq_err = abs(fit.frequency - freq_pred) / max(freq_pred, 1e-30)
    return SimulationComparison(
        k=k, predicted=x_fit,
        fitted_decay=fit.decay_rate, fitted_frequency=fit.frequency,
        decay_error=decay_err, frequency_error=freq_err,
        tolerance=tolerance, passed=bool(decay_err <= tolerance and freq_err <= tolerance),
        fit_residual=fit.residual)
