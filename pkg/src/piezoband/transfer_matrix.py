"""Layer and unit-cell transfer matrices for the shunted bilayer.

The state vector is (displacement u, normal stress sigma). Each lossless
layer maps the state at its entry face to the state at its exit face
through a real unimodular 2x2 matrix. The electrical shunt adds a rank-1
correction to the bare piezo-layer matrix whose scalar denominator
S/C - M3(omega) can vanish for C < 0; those resonance poles are flagged,
never silently evaluated.

All functions are pure in (cell, omega) and accept scalar or ndarray
omega in the array helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .materials import ShuntedCell

__all__ = [
    "POLE_DENOM_RTOL",
    "ResonancePoleError",
    "TransferMatrix",
    "ShuntCoefficients",
    "m_elastic",
    "m_piezo_open",
    "m_piezo_shunted",
    "monodromy",
    "shunt_coefficients",
    "has_shunt_correction",
    "shunt_denominator",
    "m_elastic_entries",
    "m_piezo_shunted_entries",
    "monodromy_entries",
]

# |S/C - M3| below this fraction of d2/eps counts as a resonance pole.
POLE_DENOM_RTOL = 1e-9


class ResonancePoleError(ArithmeticError):
    """The shunt denominator vanished; the layer matrix diverges here."""

    def __init__(self, omega: float, denom: float, threshold: float):
        self.omega = omega
        self.denom = denom
        self.threshold = threshold
        super().__init__(
            f"shunt resonance pole at omega={omega!r}: |S/C - M3|={abs(denom):.3e}"
            f" below threshold {threshold:.3e}"
        )


@dataclass(frozen=True)
class TransferMatrix:
    """Real 2x2 matrix mapping (u, sigma) at a layer entry to its exit."""

    a11: float
    a12: float
    a21: float
    a22: float

    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def trace(self) -> float:
        return self.a11 + self.a22

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(
            a11=self.a11 * other.a11 + self.a12 * other.a21,
            a12=self.a11 * other.a12 + self.a12 * other.a22,
            a21=self.a21 * other.a11 + self.a22 * other.a21,
            a22=self.a21 * other.a12 + self.a22 * other.a22,
        )

    def as_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]], dtype=float)


@dataclass(frozen=True)
class ShuntCoefficients:
    """Coupling coefficients of the shunt correction at one frequency.

    Attributes:
        M1: Displacement-channel coupling, h*sin(k2*d2)/(Z2*omega).
        M2: h*(cos(k2*d2) - 1).
        M3: h*M1 - d2/eps.
        denom: S/C - M3; +inf for open circuit (c_over_s == 0), where the
            correction vanishes and callers must skip it.
        open_circuit: True when c_over_s == 0.
    """

    M1: float
    M2: float
    M3: float
    denom: float
    open_circuit: bool


def _sinc(q):
    """sin(q)/q, equal to 1 at q = 0 (elementwise)."""
    q = np.asarray(q, dtype=float)
    safe = np.where(q == 0.0, 1.0, q)
    return np.where(q == 0.0, 1.0, np.sin(safe) / safe)


def _m0_entries(rho: float, c: float, d: float, omega):
    """Entries of the bare layer matrix for a layer with modulus c.

    The (1,2) and (2,1) entries are written through sin(q)/q so the
    omega -> 0 limits [[1, d/c], [0, 1]] come out exactly.
    """
    omega = np.asarray(omega, dtype=float)
    q = omega * d * math.sqrt(rho / c)
    s = _sinc(q)
    cos_q = np.cos(q)
    a12 = (d / c) * s
    a21 = -rho * d * omega * omega * s
    return cos_q, a12, a21, cos_q


def _shunt_terms(cell: ShuntedCell, omega):
    """M1, M2, M3 of the correction (elementwise over omega)."""
    pz = cell.piezo
    omega = np.asarray(omega, dtype=float)
    q = omega * pz.d * pz.slowness
    h = pz.h
    M1 = h * (pz.d / pz.cD) * _sinc(q)
    # cos(q) - 1 written cancellation-free.
    half = 0.5 * q
    M2 = -2.0 * h * np.sin(half) * np.sin(half)
    M3 = h * M1 - pz.d / pz.eps
    return M1, M2, M3


def has_shunt_correction(cell: ShuntedCell) -> bool:
    """Whether the rank-1 shunt correction is active (e != 0 and C/S != 0)."""
    return cell.piezo.e != 0.0 and cell.c_over_s != 0.0


def pole_threshold(cell: ShuntedCell) -> float:
    """Absolute denominator magnitude below which a pole is flagged."""
    return POLE_DENOM_RTOL * cell.piezo.d / cell.piezo.eps


def shunt_denominator(cell: ShuntedCell, omega):
    """S/C - M3(omega), elementwise; requires an active shunt correction."""
    if not has_shunt_correction(cell):
        raise ValueError("shunt correction inactive (e == 0 or open circuit)")
    _, _, M3 = _shunt_terms(cell, omega)
    return 1.0 / cell.c_over_s - M3


def m_elastic(cell: ShuntedCell, omega: float) -> TransferMatrix:
    """Transfer matrix of the elastic layer at angular frequency omega >= 0."""
    el = cell.elastic
    a11, a12, a21, a22 = _m0_entries(el.rho, el.c, el.d, omega)
    return TransferMatrix(float(a11), float(a12), float(a21), float(a22))


def m_piezo_open(cell: ShuntedCell, omega: float) -> TransferMatrix:
    """Bare (open-circuit) piezo-layer matrix, built on the stiffened modulus."""
    pz = cell.piezo
    a11, a12, a21, a22 = _m0_entries(pz.rho, pz.cD, pz.d, omega)
    return TransferMatrix(float(a11), float(a12), float(a21), float(a22))


def shunt_coefficients(cell: ShuntedCell, omega: float) -> ShuntCoefficients:
    """Correction coefficients M1, M2, M3 and the denominator S/C - M3."""
    M1, M2, M3 = (float(x) for x in _shunt_terms(cell, omega))
    if cell.c_over_s == 0.0:
        return ShuntCoefficients(M1, M2, M3, math.inf, True)
    return ShuntCoefficients(M1, M2, M3, 1.0 / cell.c_over_s - M3, False)


def m_piezo_shunted(cell: ShuntedCell, omega: float) -> TransferMatrix:
    """Piezo-layer matrix including the shunt correction.

    Returns the bare matrix exactly for open circuit or e == 0.

    Raises:
        ResonancePoleError: When the correction is active and the
            denominator magnitude falls below ``pole_threshold(cell)``.
    """
    base = m_piezo_open(cell, omega)
    if not has_shunt_correction(cell):
        return base
    co = shunt_coefficients(cell, omega)
    threshold = pole_threshold(cell)
    if abs(co.denom) < threshold:
        raise ResonancePoleError(float(omega), co.denom, threshold)
    f = 1.0 / co.denom
    return TransferMatrix(
        a11=base.a11 + f * co.M1 * co.M2,
        a12=base.a12 + f * co.M1 * co.M1,
        a21=base.a21 + f * co.M2 * co.M2,
        a22=base.a22 + f * co.M2 * co.M1,
    )


def monodromy(cell: ShuntedCell, omega: float) -> TransferMatrix:
    """Unit-cell matrix m2 @ m1 (piezo after elastic, in propagation order).

    Raises:
        ResonancePoleError: Propagated from the shunted piezo matrix.
    """
    return m_piezo_shunted(cell, omega) @ m_elastic(cell, omega)


def m_elastic_entries(cell: ShuntedCell, omega):
    """Entries (a11, a12, a21, a22) of the elastic layer, elementwise."""
    el = cell.elastic
    return _m0_entries(el.rho, el.c, el.d, np.asarray(omega, dtype=float))


def m_piezo_shunted_entries(cell: ShuntedCell, omega):
    """Entries of the shunted piezo layer, elementwise over omega.

    Unchecked array path: no pole flagging, entries blow up smoothly near
    shunt resonances. Callers working near poles must consult
    ``shunt_denominator`` themselves (the frequency scanner does).
    """
    pz = cell.piezo
    omega = np.asarray(omega, dtype=float)
    b11, b12, b21, b22 = _m0_entries(pz.rho, pz.cD, pz.d, omega)
    if has_shunt_correction(cell):
        M1, M2, M3 = _shunt_terms(cell, omega)
        with np.errstate(divide="ignore"):
            f = 1.0 / (1.0 / cell.c_over_s - M3)
        b11 = b11 + f * M1 * M2
        b12 = b12 + f * M1 * M1
        b21 = b21 + f * M2 * M2
        b22 = b22 + f * M2 * M1
    return b11, b12, b21, b22


def monodromy_entries(cell: ShuntedCell, omega):
    """Entries (t11, t12, t21, t22) of m2 @ m1, elementwise over omega.

    Same unchecked-near-poles contract as ``m_piezo_shunted_entries``.
    """
    omega = np.asarray(omega, dtype=float)
    a11, a12, a21, a22 = m_elastic_entries(cell, omega)
    b11, b12, b21, b22 = m_piezo_shunted_entries(cell, omega)
    t11 = b11 * a11 + b12 * a21
    t12 = b11 * a12 + b12 * a22
    t21 = b21 * a11 + b22 * a21
    t22 = b21 * a12 + b22 * a22
    return t11, t12, t21, t22
