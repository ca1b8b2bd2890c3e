"""Time integration of mixed and time-deformed hierarchy equations,

    psi_t = sum_k i^k alpha_k'(t) H_k(psi),

with plain RK4 (guarded by the imaginary-axis stability bound) and an
integrating-factor RK4 that propagates the stiff linear phases exactly.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .spectral import Field, Grid, _cached_plan, eval_rhs, flow_evaluator, write_field

RK4_IMAG_STABILITY = 2.8  # RK4 stability interval on the imaginary axis


class EvolveError(Exception):
    pass


class Blowup(EvolveError):
    def __init__(self, message, last_good: Field | None = None):
        super().__init__(message)
        self.last_good = last_good


class StabilityViolation(EvolveError):
    pass


# -- schedules ---------------------------------------------------------------


@dataclass(frozen=True)
class Linear:
    """alpha(t) = slope*t + offset; the constant-coefficient special case."""

    slope: float
    offset: float = 0.0

    def value(self, t: float) -> float:
        return self.slope * t + self.offset

    def derivative(self, t: float) -> float:
        return self.slope


@dataclass(frozen=True)
class Poly:
    """alpha(t) = sum_m coeffs[m] * t**m."""

    coeffs: tuple

    def __init__(self, coeffs: Sequence[float]):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in coeffs))

    def value(self, t: float) -> float:
        return sum(c * t**m for m, c in enumerate(self.coeffs))

    def derivative(self, t: float) -> float:
        return sum(m * c * t ** (m - 1) for m, c in enumerate(self.coeffs) if m)


@dataclass(frozen=True)
class Sinusoid:
    """alpha(t) = amplitude * sin(frequency*t + phase)."""

    amplitude: float
    frequency: float
    phase: float = 0.0

    def value(self, t: float) -> float:
        return self.amplitude * math.sin(self.frequency * t + self.phase)

    def derivative(self, t: float) -> float:
        return self.amplitude * self.frequency * math.cos(self.frequency * t + self.phase)


@dataclass(frozen=True)
class Bump:
    """Smooth bump supported on [t0, t1], peak value ``height`` at the center.

    alpha(t) = height * exp(4 - 1/(s(1-s))) with s = (t-t0)/(t1-t0); alpha
    and alpha' vanish identically outside the support.
    """

    t0: float
    t1: float
    height: float

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise ValueError("Bump needs t1 > t0")

    def _s(self, t: float) -> float:
        return (t - self.t0) / (self.t1 - self.t0)

    def value(self, t: float) -> float:
        s = self._s(t)
        if s <= 0.0 or s >= 1.0:
            return 0.0
        return self.height * math.exp(4.0 - 1.0 / (s * (1.0 - s)))

    def derivative(self, t: float) -> float:
        s = self._s(t)
        if s <= 0.0 or s >= 1.0:
            return 0.0
        # d/ds of -1/(s(1-s)) is (1-2s)/(s(1-s))^2
        return self.value(t) * (1.0 - 2.0 * s) / (s * (1.0 - s)) ** 2 / (self.t1 - self.t0)


Schedule = Linear | Poly | Sinusoid | Bump


@dataclass(frozen=True)
class FlowSpec:
    """Which hierarchy flows participate and with what time schedules."""

    entries: tuple  # ((k, Schedule), ...)

    def __init__(self, entries):
        entries = tuple((int(k), s) for k, s in entries)
        orders = [k for k, _ in entries]
        if len(set(orders)) != len(orders):
            raise ValueError("flow orders must be distinct")
        if any(k < 1 for k in orders):
            raise ValueError("flow orders must be >= 1")
        object.__setattr__(self, "entries", entries)

    @property
    def max_order(self) -> int:
        return max((k for k, _ in self.entries), default=0)

    @property
    def is_constant(self) -> bool:
        return all(isinstance(s, Linear) for _, s in self.entries)

    @staticmethod
    def from_coeffs(coeffs: Sequence[float]) -> "FlowSpec":
        """Constant mix psi_t = sum i^k b_k H_k from b_1..b_M (zeros dropped)."""
        return FlowSpec(
            [(k + 1, Linear(b)) for k, b in enumerate(coeffs) if b != 0.0]
        )

    def alpha_values(self, t: float) -> dict:
        return {k: s.value(t) for k, s in self.entries}


def linear_symbol(spec: FlowSpec, t: float, xi) -> complex | np.ndarray:
    """mu(xi, t) = sum_k i^k alpha_k'(t) (i xi)^(k+1); purely imaginary for
    real schedules since i^k (i xi)^(k+1) = i^(2k+1) xi^(k+1)."""
    xi = np.asarray(xi, dtype=float)
    mu = np.zeros(xi.shape, dtype=complex)
    for k, sched in spec.entries:
        mu += (1j**k) * sched.derivative(t) * (1j * xi) ** (k + 1)
    return mu if mu.shape else complex(mu)


def _check_stability(spec: FlowSpec, t: float, grid: Grid, dt: float) -> None:
    mu_max = float(np.max(np.abs(linear_symbol(spec, t, grid.xi))))
    if dt * mu_max > RK4_IMAG_STABILITY:
        raise StabilityViolation(
            f"dt*max|mu| = {dt * mu_max:.3g} exceeds {RK4_IMAG_STABILITY}"
        )


def _nonlinear_plans(table, spec: FlowSpec):
    """Plans for H_k minus its leading linear monomial psi_{(k+1)x}."""
    from .diffpoly import DiffPoly

    out = []
    for k, sched in spec.entries:
        h = table.H[k] - DiffPoly.var("psi", k + 1)
        out.append((k, 1j**k, _cached_plan(h), sched))
    return out


def _rk4_step(values, grid, t, dt, rhs):
    k1 = rhs(values, grid, t)
    k2 = rhs(values + 0.5 * dt * k1, grid, t + 0.5 * dt)
    k3 = rhs(values + 0.5 * dt * k2, grid, t + 0.5 * dt)
    k4 = rhs(values + dt * k3, grid, t + dt)
    return values + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class _IfRk4Stepper:
    """Integrating-factor RK4 for constant-coefficient specs: exact phases
    e^(mu dt) for the linear part, RK4 on the nonlinear remainder."""

    def __init__(self, table, spec: FlowSpec, grid: Grid, dt: float):
        if not spec.is_constant:
            raise EvolveError("ifrk4 requires Linear (constant-coefficient) schedules")
        self.grid = grid
        self.dt = dt
        self.mu = linear_symbol(spec, 0.0, grid.xi)
        self.e_half = np.exp(0.5 * dt * self.mu)
        self.e_full = self.e_half**2
        self.plans = _nonlinear_plans(table, spec)

    def _nhat(self, values):
        f = Field(self.grid, values)
        out = np.zeros(self.grid.n, dtype=complex)
        for _, ik, plan, sched in self.plans:
            out += ik * sched.slope * eval_rhs(plan, f)
        return np.fft.fft(out)

    def step(self, values):
        dt, e, e2 = self.dt, self.e_half, self.e_full
        v = np.fft.fft(values)
        a = self._nhat(values)
        b = self._nhat(np.fft.ifft(e * (v + 0.5 * dt * a)))
        c = self._nhat(np.fft.ifft(e * v + 0.5 * dt * b))
        d = self._nhat(np.fft.ifft(e2 * v + dt * e * c))
        v_new = e2 * v + (dt / 6.0) * (e2 * a + 2.0 * e * (b + c) + d)
        return np.fft.ifft(v_new)


def step(f: Field, spec: FlowSpec, dt: float, method: str = "rk4", table=None) -> Field:
    """Advance one time step.  rk4 enforces the stability bound; ifrk4
    requires constant coefficients."""
    from .hierarchy import default_flow_table

    if dt <= 0:
        raise ValueError("dt must be positive")
    if table is None:
        table = default_flow_table(max(spec.max_order, 1))
    if method == "rk4":
        _check_stability(spec, f.time, f.grid, dt)
        rhs = flow_evaluator(table, spec)
        new = _rk4_step(f.values, f.grid, f.time, dt, rhs)
    elif method == "ifrk4":
        new = _IfRk4Stepper(table, spec, f.grid, dt).step(f.values)
    else:
        raise ValueError(f"unknown method {method!r}")
    if not np.all(np.isfinite(new.view(float))):
        raise Blowup(f"non-finite values after step at t={f.time}", last_good=f)
    return Field(f.grid, new, f.time + dt)


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    fields: list = field(default_factory=list)
    conserved: list = field(default_factory=list)  # rows: (t, c1, c2, c3)

    def append(self, f: Field, conserved_row) -> None:
        self.times.append(f.time)
        self.fields.append(f)
        self.conserved.append(conserved_row)

    @property
    def final(self) -> Field:
        return self.fields[-1]

    def write(self, outdir) -> None:
        """Directory of field files snap_<step>.txt plus conserved.csv."""
        os.makedirs(outdir, exist_ok=True)
        for i, f in enumerate(self.fields):
            write_field(f, os.path.join(outdir, f"snap_{i}.txt"))
        with open(os.path.join(outdir, "conserved.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "re_c1", "im_c1", "re_c2", "im_c2", "re_c3", "im_c3"])
            for t, row in zip(self.times, self.conserved):
                w.writerow([f"{t:.17g}"] + [f"{x:.17g}" for c in row for x in (c.real, c.imag)])


def evolve_run(
    f0: Field,
    spec: FlowSpec,
    t_end: float,
    dt: float,
    observers: Sequence = (),
    method: str = "auto",
    snapshot_stride: int | None = None,
    table=None,
) -> Trajectory:
    """Integrate from f0.time to f0.time + t_end, recording snapshots and a
    conserved-quantity log (orders 1..3) at each snapshot.

    Observers are callables invoked synchronously with each snapshot Field.
    """
    from .hierarchy import default_flow_table
    from .spectral import conserved_integral

    if table is None:
        table = default_flow_table(max(spec.max_order, 2))
    if method == "auto":
        method = "ifrk4" if spec.is_constant else "rk4"
    n_steps = int(round(t_end / dt))
    if abs(n_steps * dt - t_end) > 1e-9 * max(1.0, abs(t_end)):
        raise ValueError("t_end must be an integer multiple of dt")
    if snapshot_stride is None:
        snapshot_stride = max(1, n_steps // 64)

    stepper = None
    if method == "ifrk4":
        stepper = _IfRk4Stepper(table, spec, f0.grid, dt)
    rhs = flow_evaluator(table, spec) if method == "rk4" else None

    traj = Trajectory()

    def record(f: Field):
        row = tuple(conserved_integral(f, table, k) for k in (1, 2, 3))
        traj.append(f, row)
        for obs in observers:
            obs(f)

    record(f0)
    f = f0
    for i in range(n_steps):
        if method == "rk4":
            _check_stability(spec, f.time, f.grid, dt)
            new = _rk4_step(f.values, f.grid, f.time, dt, rhs)
        else:
            new = stepper.step(f.values)
        if not np.all(np.isfinite(new.view(float))):
            raise Blowup(f"non-finite values after step {i} (t={f.time})", last_good=f)
        f = Field(f.grid, new, f0.time + (i + 1) * dt)
        if (i + 1) % snapshot_stride == 0 or i + 1 == n_steps:
            record(f)
    return traj
