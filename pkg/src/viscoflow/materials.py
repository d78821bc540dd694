"""Fluid state types, the barotropic equation of state, and transport-coefficient laws.

All quantities are in dimensionless code units. The pressure law is the power
law P = A * rho**gamma with A > 0 and gamma > 1; transport coefficients
(bulk viscosity zeta, shear viscosity eta, relaxation time tau) are either
positive constants or functions of the rotational invariants of the state:
the density rho, the normalized stress trace pi = Pi_ii / 3, and the full
contraction pi2 = Pi_ij Pi_ij.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

__all__ = [
    "MaterialLawError",
    "ConstantCoefficient",
    "CoefficientFunction",
    "MaterialLaw",
    "BulkState",
    "ShearState",
    "ReferenceState",
    "pressure",
    "sound_speed",
    "eval_transport",
]


class MaterialLawError(ValueError):
    """A transport-coefficient law produced a non-positive or non-finite value."""


@dataclass(frozen=True)
class ConstantCoefficient:
    """Transport coefficient that does not depend on the state."""

    value: float

    def __post_init__(self):
        if not np.isfinite(self.value) or self.value <= 0.0:
            raise MaterialLawError(f"constant coefficient must be positive, got {self.value}")

    @property
    def is_constant(self) -> bool:
        return True

    def __call__(self, rho, pi=0.0, pi2=0.0):
        return self.value if np.isscalar(rho) else np.full_like(np.asarray(rho, float), self.value)


@dataclass(frozen=True)
class CoefficientFunction:
    """Transport coefficient given by a function of (rho, pi, pi2).

    `fn` must accept scalars and numpy arrays alike and return strictly
    positive, finite values on every admissible state.
    """

    fn: Callable[..., Union[float, np.ndarray]]

    @property
    def is_constant(self) -> bool:
        return False

    def __call__(self, rho, pi=0.0, pi2=0.0):
        return self.fn(rho, pi, pi2)


CoefficientLaw = Union[ConstantCoefficient, CoefficientFunction]


def _as_law(value) -> CoefficientLaw:
    if isinstance(value, (ConstantCoefficient, CoefficientFunction)):
        return value
    if callable(value):
        return CoefficientFunction(value)
    return ConstantCoefficient(float(value))


@dataclass(frozen=True)
class MaterialLaw:
    """Equation of state P = A rho**gamma plus transport-coefficient laws."""

    A: float
    gamma: float
    zeta: CoefficientLaw = field(default_factory=lambda: ConstantCoefficient(1.0))
    eta: CoefficientLaw = field(default_factory=lambda: ConstantCoefficient(1.0))
    tau: CoefficientLaw = field(default_factory=lambda: ConstantCoefficient(1.0))

    def __post_init__(self):
        if not (np.isfinite(self.A) and self.A > 0.0):
            raise ValueError(f"EOS amplitude A must be positive, got {self.A}")
        if not (np.isfinite(self.gamma) and self.gamma > 1.0):
            raise ValueError(f"adiabatic exponent gamma must exceed 1, got {self.gamma}")
        object.__setattr__(self, "zeta", _as_law(self.zeta))
        object.__setattr__(self, "eta", _as_law(self.eta))
        object.__setattr__(self, "tau", _as_law(self.tau))

    @property
    def has_constant_transport(self) -> bool:
        return self.zeta.is_constant and self.eta.is_constant and self.tau.is_constant


def pressure(law: MaterialLaw, rho):
    """Pressure P = A rho**gamma. Raises ValueError for non-positive rho."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0) or not np.all(np.isfinite(rho)):
        raise ValueError("pressure requires rho > 0 and finite")
    out = law.A * rho**law.gamma
    return float(out) if out.ndim == 0 else out


def sound_speed(law: MaterialLaw, rho):
    """Adiabatic sound speed sqrt(dP/drho) = sqrt(A gamma rho**(gamma-1))."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0) or not np.all(np.isfinite(rho)):
        raise ValueError("sound_speed requires rho > 0 and finite")
    out = np.sqrt(law.A * law.gamma * rho ** (law.gamma - 1.0))
    return float(out) if out.ndim == 0 else out


def eval_transport(law: MaterialLaw, rho, pi=0.0, pi2=0.0):
    """Evaluate (zeta, eta, tau) at a state point or array of points.

    Every returned value is checked to be strictly positive and finite; a
    violation raises MaterialLawError naming the offending coefficient.
    """
    out = []
    for name in ("zeta", "eta", "tau"):
        val = getattr(law, name)(rho, pi, pi2)
        arr = np.asarray(val, dtype=float)
        if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0):
            raise MaterialLawError(f"transport coefficient {name} evaluated non-positive "
                                   f"or non-finite at rho={rho}, pi={pi}")
        out.append(float(arr) if arr.ndim == 0 else arr)
    return tuple(out)


def _check_state_values(rho: float, values) -> None:
    if not np.isfinite(rho) or rho <= 0.0:
        raise ValueError(f"state requires rho > 0 and finite, got {rho}")
    if not np.all(np.isfinite(values)):
        raise ValueError("state fields must be finite")


@dataclass(frozen=True)
class BulkState:
    """Point state of the 5-field system: density, velocity, bulk stress scalar."""

    rho: float
    v: tuple[float, float, float] = (0.0, 0.0, 0.0)
    Pi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(float(c) for c in self.v))
        _check_state_values(self.rho, np.array(self.v + (self.Pi,)))

    @property
    def invariants(self) -> tuple[float, float, float]:
        # pure-trace stress Pi_ij = Pi * delta_ij has Pi_ij Pi_ij = 3 Pi**2
        return (self.rho, self.Pi, 3.0 * self.Pi**2)


# storage order of the six independent stress components
SYM_INDEX = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
_SYM_POS = {(i, j): n for n, (i, j) in enumerate(SYM_INDEX)}


def sym_position(i: int, j: int) -> int:
    """Storage slot of tensor component (i, j); symmetry is built in."""
    return _SYM_POS[(min(i, j), max(i, j))]


@dataclass(frozen=True)
class ShearState:
    """Point state of the 10-field system with a symmetric viscous stress tensor.

    Only the six independent components are stored (order Pi11, Pi12, Pi13,
    Pi22, Pi23, Pi33), so an asymmetric stress is unrepresentable.
    """

    rho: float
    v: tuple[float, float, float] = (0.0, 0.0, 0.0)
    Pi_sym: tuple[float, ...] = (0.0,) * 6

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(float(c) for c in self.v))
        sym = tuple(float(c) for c in self.Pi_sym)
        if len(sym) != 6:
            raise ValueError("Pi_sym must hold the 6 independent components")
        object.__setattr__(self, "Pi_sym", sym)
        _check_state_values(self.rho, np.array(self.v + sym))

    @classmethod
    def from_tensor(cls, rho, v, tensor) -> "ShearState":
        tensor = np.asarray(tensor, dtype=float)
        if tensor.shape != (3, 3) or not np.allclose(tensor, tensor.T):
            raise ValueError("stress tensor must be symmetric 3x3")
        return cls(rho, tuple(v), tuple(tensor[i, j] for i, j in SYM_INDEX))

    def component(self, i: int, j: int) -> float:
        return self.Pi_sym[sym_position(i, j)]

    def tensor(self) -> np.ndarray:
        full = np.zeros((3, 3))
        for n, (i, j) in enumerate(SYM_INDEX):
            full[i, j] = full[j, i] = self.Pi_sym[n]
        return full

    @property
    def bulk_scalar(self) -> float:
        """Normalized trace Pi_ii / 3: the scalar evolved by the 5-field system."""
        return (self.Pi_sym[0] + self.Pi_sym[3] + self.Pi_sym[5]) / 3.0

    @property
    def invariants(self) -> tuple[float, float, float]:
        t = self.tensor()
        return (self.rho, self.bulk_scalar, float(np.sum(t * t)))


@dataclass(frozen=True)
class ReferenceState:
    """Constant state outside the initially perturbed ball of radius R."""

    rho_bar: float
    R: float
    Pi_bar: float = 0.0
    v_bar: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not (np.isfinite(self.rho_bar) and self.rho_bar > 0.0):
            raise ValueError(f"reference density must be positive, got {self.rho_bar}")
        if not (np.isfinite(self.R) and self.R > 0.0):
            raise ValueError(f"support radius R must be positive, got {self.R}")
        object.__setattr__(self, "v_bar", tuple(float(c) for c in self.v_bar))
