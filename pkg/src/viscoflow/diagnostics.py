"""Blow-up functionals, the finite-lifespan certificate, growth-inequality
monitoring, and loss-of-regularity detection.

The certificate encodes the sufficient condition for finite-time breakdown of
classical solutions: with constant-exterior data of support radius R, front
speed c_v, and nonnegative relative mass and stress integral, an initial
weighted radial momentum

    F(0) > (16 pi / 3) c_v R^4 max(rho0)

forces the C^1 lifespan to be finite. All integrals use the midpoint rule on
cell averages with the same volume weights as the finite-volume update, so
conserved discrete quantities are conserved here too.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CertificateError",
    "InsufficientDataError",
    "BlowupCertificate",
    "DiagnosticSeries",
    "GrowthCheck",
    "quad_weights",
    "radial_momentum",
    "relative_mass",
    "stress_integral",
    "max_gradients",
    "monitor_c1",
    "certificate",
    "check_growth",
    "blowup_threshold",
]


class CertificateError(ValueError):
    """The certificate's hypotheses do not apply to this run."""


class InsufficientDataError(ValueError):
    """Too few series samples to evaluate the growth inequality."""


def blowup_threshold(c_v: float, R: float, max_rho0: float) -> float:
    """(16 pi / 3) c_v R^4 max_rho0."""
    return 16.0 * np.pi / 3.0 * c_v * R**4 * max_rho0


def quad_weights(grid) -> np.ndarray:
    """Cell integration weights: dx for planar (per unit cross-section),
    4 pi (r+^3 - r-^3)/3 for spherical shells."""
    if grid.geometry == "spherical":
        faces = grid.faces_interior
        return 4.0 * np.pi * (faces[1:] ** 3 - faces[:-1] ** 3) / 3.0
    return np.full(grid.n_cells, grid.dx)


def _moment_arm(sim) -> np.ndarray:
    x = sim.grid.centers_interior
    return x if sim.grid.geometry == "spherical" else x - sim.grid.center


def radial_momentum(sim) -> float:
    """F = integral of x . rho v: 4 pi int r^3 rho u dr in spherical symmetry,
    int (x - center) rho u dx in planar geometry (test analog, not the
    theorem's geometry)."""
    w = quad_weights(sim.grid)
    rho = sim.fields.get("rho")
    u = sim.fields.get("u" if sim.system == "bulk" else "v1")
    return float(np.sum(w * _moment_arm(sim) * rho * u))


def relative_mass(sim) -> float:
    """Delta M = integral of (rho - rho_bar); constant in time for the exact flow."""
    w = quad_weights(sim.grid)
    return float(np.sum(w * (sim.fields.get("rho") - sim.reference.rho_bar)))


def stress_integral(sim) -> float:
    """G = integral of Pi (bulk) or of the stress trace Pi_ii (shear)."""
    w = quad_weights(sim.grid)
    if sim.system == "bulk":
        return float(np.sum(w * sim.fields.get("Pi")))
    trace = sim.fields.get("Pi11") + sim.fields.get("Pi22") + sim.fields.get("Pi33")
    return float(np.sum(w * trace))


def max_gradients(sim) -> tuple[float, float]:
    """(max |du/dx|, max |drho/dx|) over adjacent interior cells; all velocity
    components participate for the 10-field system."""
    dx = sim.grid.dx
    names = ("u",) if sim.system == "bulk" else ("v1", "v2", "v3")
    gu = max(float(np.max(np.abs(np.diff(sim.fields.get(n))))) if sim.grid.n_cells > 1 else 0.0
             for n in names) / dx
    grho = float(np.max(np.abs(np.diff(sim.fields.get("rho"))))) / dx
    return gu, grho


def monitor_c1(sim) -> tuple[float, bool]:
    """Current max gradient and whether it crosses the breakdown threshold
    grad_factor * (initial max gradient + c_v / R)."""
    gu, grho = max_gradients(sim)
    max_grad = max(gu, grho)
    threshold = sim.monitor.grad_factor * (sim.initial.max_grad0 + sim.cv_bar / sim.reference.R)
    return max_grad, bool(max_grad > threshold)


@dataclass(frozen=True)
class BlowupCertificate:
    R: float
    c_bar_v: float
    max_rho0: float
    threshold: float
    F0: float
    dM0: float
    G0: float
    satisfied: bool

    def describe(self) -> str:
        lines = [
            f"support radius R        = {self.R!r}",
            f"front speed c_v         = {self.c_bar_v!r}",
            f"max initial density     = {self.max_rho0!r}",
            f"momentum threshold      = {self.threshold!r}",
            f"F(0)                    = {self.F0!r}",
            f"relative mass dM(0)     = {self.dM0!r}",
            f"stress integral G(0)    = {self.G0!r}",
            f"certificate satisfied   = {self.satisfied}",
        ]
        return "\n".join(lines)


def certificate(sim, exterior_tol: float = 1e-12) -> BlowupCertificate:
    """Evaluate the finite-lifespan certificate on initial data.

    Refused when the exterior is not exactly at the reference state, when the
    transport coefficients are state dependent (the theorem assumes
    constants), or when the background is moving.
    """
    if not sim.law.has_constant_transport:
        raise CertificateError("certificate requires constant zeta, eta, tau")
    if any(c != 0.0 for c in sim.reference.v_bar) or sim.reference.Pi_bar != 0.0:
        raise CertificateError("certificate requires v_bar = 0 and Pi_bar = 0")

    ref = sim.reference
    x = sim.grid.centers_interior
    outside = (np.abs(_moment_arm(sim)) >= ref.R) if sim.grid.geometry == "planar" \
        else (x >= ref.R)
    if np.any(outside):
        rho = sim.fields.get("rho")
        dev = np.abs(rho[outside] - ref.rho_bar) / ref.rho_bar
        for name in sim.fields.names[1:]:
            dev = np.maximum(dev, np.abs(sim.fields.get(name)[outside]))
        if float(np.max(dev)) > exterior_tol:
            raise CertificateError("initial data is not constant outside radius R")

    max_rho0 = float(np.max(sim.fields.get("rho")))
    f0 = radial_momentum(sim)
    dm0 = relative_mass(sim)
    g0 = stress_integral(sim)
    thr = blowup_threshold(sim.cv_bar, ref.R, max_rho0)
    satisfied = bool(dm0 >= 0.0 and g0 >= 0.0 and f0 > thr)
    return BlowupCertificate(ref.R, sim.cv_bar, max_rho0, thr, f0, dm0, g0, satisfied)


@dataclass
class DiagnosticSeries:
    """Per-step functional series recorded during a run."""

    t: list[float] = field(default_factory=list)
    dt: list[float] = field(default_factory=list)
    F: list[float] = field(default_factory=list)
    dM: list[float] = field(default_factory=list)
    G: list[float] = field(default_factory=list)
    max_grad_u: list[float] = field(default_factory=list)
    max_grad_rho: list[float] = field(default_factory=list)
    breakdown_time: float | None = None
    verdict: str = "ran to completion"

    def record(self, sim, dt_used: float) -> None:
        gu, grho = max_gradients(sim)
        self.t.append(sim.t)
        self.dt.append(dt_used)
        self.F.append(radial_momentum(sim))
        self.dM.append(relative_mass(sim))
        self.G.append(stress_integral(sim))
        self.max_grad_u.append(gu)
        self.max_grad_rho.append(grho)

    def mark_breakdown(self, t: float, verdict: str) -> None:
        self.breakdown_time = t
        self.verdict = verdict

    def arrays(self) -> dict[str, np.ndarray]:
        return {name: np.asarray(getattr(self, name))
                for name in ("t", "dt", "F", "dM", "G", "max_grad_u", "max_grad_rho")}

    @property
    def max_grad(self) -> np.ndarray:
        return np.maximum(np.asarray(self.max_grad_u), np.asarray(self.max_grad_rho))

    def csv_rows(self):
        header = ("t", "dt", "F", "dM", "G", "max_grad_u", "max_grad_rho")
        yield header
        for i in range(len(self.t)):
            yield tuple(getattr(self, name)[i] for name in header)


@dataclass
class GrowthCheck:
    margins: np.ndarray
    bounds: np.ndarray
    tol: float
    fraction_ok: float


def check_growth(series: DiagnosticSeries, cert: BlowupCertificate,
                 tol: float | None = None, margin_frac: float = 0.05) -> GrowthCheck:
    """Forward-difference check of dF/dt >= F^2 / ((4 pi/3)(R + c_v t)^5 max rho0).

    margins[n] = dF/dt|_n - bound_n; the default tolerance is `margin_frac`
    of the largest bound plus a small absolute floor, standing in for the
    quadrature and time-discretization error of the series.
    """
    t = np.asarray(series.t)
    f = np.asarray(series.F)
    if len(t) < 10:
        raise InsufficientDataError(f"need at least 10 series samples, have {len(t)}")
    dt = np.diff(t)
    if np.any(dt <= 0.0):
        raise ValueError("series timestamps must be strictly increasing")
    dfdt = np.diff(f) / dt
    vol = 4.0 * np.pi / 3.0 * (cert.R + cert.c_bar_v * t[:-1]) ** 5 * cert.max_rho0
    bounds = f[:-1] ** 2 / vol
    margins = dfdt - bounds
    if tol is None:
        tol = margin_frac * float(np.max(bounds)) + 1e-12
    fraction = float(np.mean(margins >= -tol))
    return GrowthCheck(margins=margins, bounds=bounds, tol=tol, fraction_ok=fraction)
