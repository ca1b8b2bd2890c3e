"""Scaling-Galilean symmetry transforms of hierarchy solutions.

The two-parameter family (a, b) acts on joint solutions by the argument
map (X, T_1, T_2, ...) and the unit-modulus phase factor
exp{-2ibx - i sum_m (2b)^(m+1) t_m}; composing two transforms gives
(a1 a2, a2 b1 + b2), mirroring the affine action lambda -> a lambda + b
on the spectral parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .solutions import Sampler


@dataclass(frozen=True)
class SymmetryParams:
    """a != 0 scales, b boosts.  Negative a composes the scaling with a
    parity flip and is allowed."""

    a: float
    b: float = 0.0

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("a must be nonzero")

    def compose(self, other: "SymmetryParams") -> "SymmetryParams":
        """Apply ``other`` after ``self``: lambda -> a2(a1 lambda + b1) + b2."""
        return SymmetryParams(self.a * other.a, other.a * self.b + other.b)


def transform_arguments(p: SymmetryParams, x, times: Sequence[float]):
    """X = a(x + sum_m C(m+1,1) (2b)^m t_m),
    T_j = a^(j+1) (t_j + sum_{m>j} C(m+1, j+1) (2b)^(m-j) t_m)."""
    a, b = p.a, p.b
    times = tuple(times)
    M = len(times)
    X = x + sum(
        math.comb(m + 1, 1) * (2 * b) ** m * t for m, t in enumerate(times, start=1)
    )
    X = a * X
    T = []
    for j in range(1, M + 1):
        tj = times[j - 1] + sum(
            math.comb(m + 1, j + 1) * (2 * b) ** (m - j) * times[m - 1]
            for m in range(j + 1, M + 1)
        )
        T.append(a ** (j + 1) * tj)
    return X, tuple(T)


def phase_factor(p: SymmetryParams, x, times: Sequence[float]):
    """exp{-2ibx - i sum_m (2b)^(m+1) t_m}; unit modulus for real input."""
    b = p.b
    s = sum((2 * b) ** (m + 1) * t for m, t in enumerate(times, start=1))
    return np.exp(-2j * b * np.asarray(x, dtype=float) - 1j * s)


def transform_solution(s: Sampler, p: SymmetryParams) -> Sampler:
    """New joint solution a * s(X, T_1..T_M) * phase; order preserved."""
    M = s.max_order

    def fn(x, times):
        X, T = transform_arguments(p, x, times)
        return p.a * s(X, T) * phase_factor(p, x, times)

    return Sampler(fn, M, f"{s.name}~({p.a},{p.b})", dict(s.params, a_sym=p.a, b_sym=p.b))


def mixed_arguments(p: SymmetryParams, coeffs: Sequence[float], t: float, x=0.0):
    """Arguments for the constant-coefficient mix psi_t = sum i^k b_k H_k:
    delegation to transform_arguments along the ray t_m = b_m t."""
    times = tuple(c * t for c in coeffs)
    return transform_arguments(p, x, times)


def deformed_arguments(p: SymmetryParams, schedules: Sequence, t: float, x=0.0):
    """Arguments and phase for the time-deformed mix: transform_arguments /
    phase_factor evaluated at times (alpha_1(t), ..., alpha_M(t))."""
    times = tuple(s.value(t) for s in schedules)
    X, T = transform_arguments(p, x, times)
    return X, T, phase_factor(p, x, times)


def scaling(n: int, q: float, s: Sampler) -> Sampler:
    """Pure scaling covariance of the n-th flow: psi -> q psi(qx, q^(n+1) t)."""
    if not q > 0:
        raise ValueError("q must be positive for the pure scaling form")
    if not 1 <= n <= s.max_order:
        raise ValueError(f"sampler does not support flow {n}")

    def fn(x, times):
        t = times[n - 1]
        scaled = [0.0] * s.max_order
        scaled[n - 1] = q ** (n + 1) * t
        return q * s(q * np.asarray(x, dtype=float), tuple(scaled))

    return Sampler(fn, s.max_order, f"{s.name}~scaled({q},flow{n})", dict(s.params, q=q, flow=n))


def hirota_closed_form(a: float, b: float, alpha: float, beta: float, s: Sampler) -> Sampler:
    """Explicit Hirota-ray transform:
    a s(ax + 4[alpha-3b beta]abt, [alpha-6b beta]a^2 t, -beta a^3 t)
    * exp{-2ibx - 4i(alpha-2 beta b) b^2 t}."""
    if s.max_order < 2:
        raise ValueError("Hirota transform needs a sampler of order >= 2")

    def fn(x, times):
        t = times[0]
        x = np.asarray(x, dtype=float)
        args = [0.0] * s.max_order
        args[0] = (alpha - 6 * b * beta) * a**2 * t
        args[1] = -beta * a**3 * t
        X = a * x + 4 * (alpha - 3 * b * beta) * a * b * t
        return a * s(X, tuple(args)) * np.exp(-2j * b * x - 4j * (alpha - 2 * beta * b) * b**2 * t)

    return Sampler(fn, 1, f"{s.name}~hirota", dict(s.params, a=a, b=b, alpha=alpha, beta=beta))


# -- bridge to the finite-gap moduli transform -------------------------------


def identity_errors(data, p: SymmetryParams, M: int) -> dict:
    """Coefficient-level check that the moduli transform reproduces the
    argument map and phase factor.

    Both sides are linear in (x, t_1..t_M); the comparison is per basis
    direction.  Returns max absolute errors {'argument': ..., 'phase': ...}.
    """
    from .solutions import moduli_transform

    td = moduli_transform(data, p.a, p.b)
    if len(data.V) < M + 1:
        raise ValueError("RiemannData supplies too few period vectors")

    def arg_coeffs(x, times):
        # (U, Phi) coefficients for one basis direction of (x, t_1..t_M)
        X, T = transform_arguments(p, x, times)
        U = data.V[0] * X
        Phi = -data.K[1] * X
        for j, t in enumerate(T, start=1):
            U = U + data.V[j] * t
            Phi = Phi - data.K[j + 1] * t
        return U, Phi

    err_arg = 0.0
    err_phase = 0.0
    basis = [(1.0, (0.0,) * M)] + [
        (0.0, tuple(1.0 if i == m else 0.0 for i in range(M))) for m in range(M)
    ]
    for bi, (x, times) in enumerate(basis):
        # transformed-data side
        U_t = td.V[0] * x
        Phi_t = -td.K[1] * x
        for j, t in enumerate(times, start=1):
            U_t = U_t + td.V[j] * t
            Phi_t = Phi_t - td.K[j + 1] * t
        # argument-map side
        U_s, Phi_s = arg_coeffs(x, times)
        # half the boost phase exponent: -bx - (1/2) sum (2b)^{m+1} t_m
        corr = -p.b * x - 0.5 * sum(
            (2.0 * p.b) ** (m + 1) * t for m, t in enumerate(times, start=1)
        )
        err_arg = max(err_arg, float(np.max(np.abs(U_t - U_s))))
        err_phase = max(err_phase, abs(Phi_t - (Phi_s + corr)))
    return {"argument": err_arg, "phase": err_phase}
