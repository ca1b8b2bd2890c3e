"""Analytic multi-time solution samplers and the algebro-geometric
machinery: general-genus theta evaluation, the finite-gap sampler, and
the affine transform of the spectral-curve moduli."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .diffpoly import DiffPoly


class SolutionError(Exception):
    pass


class NotPositiveDefinite(SolutionError):
    pass


class ThetaZeroDivision(SolutionError):
    pass


@dataclass(frozen=True)
class Sampler:
    """Joint solution psi(x, t_1..t_M); callable on scalar or array x."""

    fn: Callable
    max_order: int
    name: str
    params: dict

    def __call__(self, x, times: Sequence[float] = ()):
        times = tuple(times)
        if len(times) > self.max_order:
            raise ValueError(
                f"sampler {self.name!r} declares order {self.max_order}, "
                f"got {len(times)} times"
            )
        times = times + (0.0,) * (self.max_order - len(times))
        return self.fn(np.asarray(x, dtype=float), times)


def _pad(times, M):
    return tuple(times) + (0.0,) * (M - len(times))


# -- constants of the sech ansatz -------------------------------------------
#
# On the profile A = sech with the identities A'' = A - 2A^3 and
# (A')^2 = A^2 - A^4, every reduced flow collapses: H_k(A) = A for odd k
# and H_k(A) = A' for even k.  The derivation below reproduces that
# reduction exactly in rational arithmetic, so the soliton's phase rates
# and velocities are computed, not guessed.


def _sech_poly_reduce(p: dict) -> dict:
    out: dict = {}
    work = dict(p)
    while work:
        (i, j), c = work.popitem()
        if c == 0:
            continue
        if j >= 2:
            for di, dc in ((2, c), (4, -c)):
                key = (i + di, j - 2)
                work[key] = work.get(key, Fraction(0)) + dc
        else:
            out[(i, j)] = out.get((i, j), Fraction(0)) + c
    return {k: v for k, v in out.items() if v != 0}


def _sech_poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for (i, j), c in a.items():
        for (k, l), d in b.items():
            key = (i + k, j + l)
            out[key] = out.get(key, Fraction(0)) + c * d
    return _sech_poly_reduce(out)


def _sech_poly_dx(p: dict) -> dict:
    out: dict = {}
    for (i, j), c in p.items():
        if i:
            key = (i - 1, j + 1)
            out[key] = out.get(key, Fraction(0)) + c * i
        if j:  # j is 0 or 1 in reduced form; A'' = A - 2A^3
            for di, dc in ((1, c), (3, -2 * c)):
                key = (i + di, j - 1)
                out[key] = out.get(key, Fraction(0)) + dc
    return _sech_poly_reduce(out)


def sech_reduction(h: DiffPoly) -> tuple[Fraction, Fraction]:
    """Reduce a real flow polynomial on the unit sech profile.

    Returns (coefficient of A, coefficient of A'); raises if any other
    monomial survives, i.e. the ansatz does not close for this flow.
    """
    jets = [{(1, 0): Fraction(1)}]
    max_order = h.max_order
    for _ in range(max_order):
        jets.append(_sech_poly_dx(jets[-1]))
    total: dict = {}
    for m in h.terms:
        if m.coeff.im != 0:
            raise SolutionError("sech reduction expects real coefficients")
        term = {(0, 0): Fraction(m.coeff.re)}
        for j, e in m.factors:
            for _ in range(e):
                term = _sech_poly_mul(term, jets[j.order])
        for key, c in term.items():
            total[key] = total.get(key, Fraction(0)) + c
    total = {k: v for k, v in total.items() if v != 0}
    extra = set(total) - {(1, 0), (0, 1)}
    if extra:
        raise SolutionError(f"sech ansatz does not close; residual monomials {extra}")
    return total.get((1, 0), Fraction(0)), total.get((0, 1), Fraction(0))


@lru_cache(maxsize=16)
def _sech_flow_constants(M: int) -> tuple:
    """Per flow k: ('phase', c) with omega_k = i^(k-1) c a^(k+1), or
    ('shift', c) with v_k = -i^k c a^k (both real for the hierarchy flows)."""
    from .hierarchy import default_flow_table

    table = default_flow_table(max(M, 1))
    out = []
    for k in range(1, M + 1):
        cA, cAp = sech_reduction(table.H[k])
        if cAp == 0:
            # psi_{t_k} = i^k c A e^{i theta} = i omega_k psi
            omega = complex(1j ** (k - 1)) * float(cA)
            if abs(omega.imag) > 0:
                raise SolutionError(f"flow {k}: non-real phase rate")
            out.append(("phase", omega.real))
        elif cA == 0:
            # psi_{t_k} = i^k c A' e^{i theta} = -v_k A' e^{i theta}
            v = -complex(1j**k) * float(cAp)
            if abs(v.imag) > 0:
                raise SolutionError(f"flow {k}: non-real velocity")
            out.append(("shift", v.real))
        else:
            raise SolutionError(f"flow {k}: mixed A/A' response to sech ansatz")
    return tuple(out)


def plane_wave(q: float, M: int = 5) -> Sampler:
    """Constant-modulus background q exp(i sum_odd omega_k t_k); the phase
    rates come from evaluating each flow on the constant field."""
    from .diffpoly import dp_eval
    from .hierarchy import default_flow_table

    if not q > 0:
        raise ValueError("q must be positive")
    if not 1 <= M <= 5:
        raise ValueError("M must be in 1..5")
    table = default_flow_table(M)
    rates = []
    for k in range(1, M + 1):
        jets = {j: (q if j.order == 0 else 0.0) for j in table.H[k].jets()}
        c = dp_eval(table.H[k], jets) / q
        rate = (1j**k) * c  # psi_{t_k} = i^k H_k = (i omega_k) psi
        rates.append(rate.imag)

    def fn(x, times):
        phase = sum(w * t for w, t in zip(rates, times))
        return np.full(np.shape(x), q * np.exp(1j * phase), dtype=complex)

    return Sampler(fn, M, "plane_wave", {"q": q})


def soliton(a_amp: float, M: int = 5) -> Sampler:
    """Bright soliton a sech(a(x - drift)) exp(i phase) extended to the
    hierarchy times; even flows translate, odd flows rotate the phase."""
    if not a_amp > 0:
        raise ValueError("amplitude must be positive")
    if not 1 <= M <= 5:
        raise ValueError("M must be in 1..5")
    consts = _sech_flow_constants(M)
    a = a_amp

    def fn(x, times):
        shift = 0.0
        phase = 0.0
        for k, ((kind, c), t) in enumerate(zip(consts, times), start=1):
            if kind == "phase":
                phase += c * a ** (k + 1) * t
            else:
                shift += c * a**k * t
        return a / np.cosh(a * (x - shift)) * np.exp(1j * phase)

    return Sampler(fn, M, "soliton", {"a": a})


def peregrine() -> Sampler:
    """Quasi-rational rogue-wave solution of the first flow on the unit
    background."""

    def fn(x, times):
        t1 = times[0]
        denom = 1.0 + 4.0 * x**2 + 16.0 * t1**2
        return (1.0 - 4.0 * (1.0 + 4j * t1) / denom) * np.exp(2j * t1)

    return Sampler(fn, 1, "peregrine", {})


# -- Riemann theta -----------------------------------------------------------


def _check_riemann_matrix(B: np.ndarray) -> float:
    B = np.asarray(B, dtype=complex)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise NotPositiveDefinite("Riemann matrix must be square")
    if np.max(np.abs(B - B.T)) > 1e-12:
        raise NotPositiveDefinite("Riemann matrix must be symmetric")
    lam_min = float(np.min(np.linalg.eigvalsh(B.imag)))
    if lam_min <= 0:
        raise NotPositiveDefinite("Im B must be positive definite")
    return lam_min


def theta(z, B, tol: float = 1e-12) -> complex:
    """Riemann theta Theta(z|B) = sum_n exp{2 pi i (n.B.n/2 + n.z)}.

    The lattice sum is truncated over a box centered on the maximizer of
    the Gaussian factor, with radius set by the tail bound (decay rate
    pi * lambda_min(Im B)); accurate to ``tol`` relative to the full sum.
    """
    if not 0 < tol <= 1e-6:
        tol = min(max(tol, 1e-300), 1e-6)
    z = np.asarray(z, dtype=complex).reshape(-1)
    B = np.asarray(B, dtype=complex)
    lam_min = _check_riemann_matrix(B)
    g = len(z)
    if B.shape != (g, g):
        raise ValueError("z/B dimension mismatch")
    Y = B.imag
    y = z.imag
    # Re exponent = -2 pi (n.Y.n/2 + n.y); maximized at n* = -Y^{-1} y
    n_star = -np.linalg.solve(Y, y)
    # Tail: terms decay at least like exp(-pi lam_min r^2) beyond radius r
    # from n*; pad by the lattice dimension to cover the shell count.
    radius = math.sqrt(max(-math.log(tol * 0.1), 1.0) / (math.pi * lam_min)) + 1.5 * math.sqrt(g) + 1.0
    lo = np.floor(n_star - radius).astype(int)
    hi = np.ceil(n_star + radius).astype(int)
    ranges = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*ranges, indexing="ij")
    n = np.stack([m.reshape(-1) for m in mesh], axis=-1).astype(float)
    # Drop corners outside the ball to keep the sum near-ellipsoidal.
    keep = np.sum((n - n_star) ** 2, axis=1) <= (radius + 1e-9) ** 2
    n = n[keep]
    expo = 2j * np.pi * (0.5 * np.einsum("ni,ij,nj->n", n, B, n) + n @ z)
    return complex(np.sum(np.exp(expo)))


def theta_brute(z, B, radius: int = 30) -> complex:
    """Box-sum oracle over |n_i| <= radius (test use; exponential cost in g)."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    B = np.asarray(B, dtype=complex)
    g = len(z)
    total = 0j
    for n in itertools.product(range(-radius, radius + 1), repeat=g):
        n = np.asarray(n, dtype=float)
        total += np.exp(2j * np.pi * (0.5 * n @ B @ n + n @ z))
    return complex(total)


# -- finite-gap solutions ----------------------------------------------------


@dataclass(frozen=True)
class RiemannData:
    """User-supplied spectral data consumed by the finite-gap formula.

    V[j] is the period vector attached to the j-th phase (V[0] multiplies
    x), K[j] the expansion constants with K[0] the normalization, Z and
    delta the theta-argument shifts, rho the free scale.
    """

    genus: int
    B: np.ndarray
    V: tuple  # period vectors V^1..V^(M+1), each a g-vector
    K: tuple  # K_0..K_(M+1) complex scalars
    Z: np.ndarray
    delta: np.ndarray
    rho: complex

    def __post_init__(self):
        B = np.asarray(self.B, dtype=complex)
        _check_riemann_matrix(B)
        g = self.genus
        if B.shape != (g, g):
            raise ValueError("B has wrong shape for the declared genus")
        V = tuple(np.asarray(v, dtype=complex).reshape(g) for v in self.V)
        K = tuple(complex(k) for k in self.K)
        if K[0] == 0:
            raise ValueError("K_0 must be nonzero")
        if complex(self.rho) == 0:
            raise ValueError("rho must be nonzero")
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "Z", np.asarray(self.Z, dtype=complex).reshape(g))
        object.__setattr__(self, "delta", np.asarray(self.delta, dtype=complex).reshape(g))
        object.__setattr__(self, "rho", complex(self.rho))

    @property
    def max_flows(self) -> int:
        return len(self.V) - 1

    def to_json(self) -> str:
        def cvec(v):
            return [[x.real, x.imag] for x in np.asarray(v, dtype=complex).reshape(-1)]

        data = {
            "genus": self.genus,
            "B": [cvec(row) for row in self.B],
            "V": [cvec(v) for v in self.V],
            "K": cvec(self.K),
            "Z": cvec(self.Z),
            "Delta": cvec(self.delta),
            "rho": [self.rho.real, self.rho.imag],
        }
        return json.dumps(data, indent=2)

    @staticmethod
    def from_json(text: str) -> "RiemannData":
        data = json.loads(text)

        def cx(pair):
            return complex(pair[0], pair[1])

        def cvec(entries):
            return np.array([cx(p) for p in entries], dtype=complex)

        return RiemannData(
            genus=int(data["genus"]),
            B=np.array([cvec(row) for row in data["B"]]),
            V=tuple(cvec(v) for v in data["V"]),
            K=tuple(cx(p) for p in data["K"]),
            Z=cvec(data["Z"]),
            delta=cvec(data["Delta"]),
            rho=cx(data["rho"]),
        )


def finite_gap_sample(data: RiemannData, x: float, times: Sequence[float] = ()) -> complex:
    """psi = (2 K_0 / rho) Theta(Z) Theta(U+Z-Delta) / [Theta(Z-Delta)
    Theta(U+Z)] exp{2i Phi} with U = V^1 x + sum_j V^(j+1) t_j and
    Phi = -K_1 x - sum_j K_(j+1) t_j."""
    times = tuple(times)
    if len(times) > data.max_flows:
        raise ValueError(
            f"data supplies {data.max_flows} flow vectors, got {len(times)} times"
        )
    U = data.V[0] * x
    Phi = -data.K[1] * x
    for j, t in enumerate(times, start=1):
        U = U + data.V[j] * t
        Phi = Phi - data.K[j + 1] * t
    B = data.B
    num = theta(data.Z, B) * theta(U + data.Z - data.delta, B)
    den1 = theta(data.Z - data.delta, B)
    den2 = theta(U + data.Z, B)
    if abs(den1) < 1e-300 or abs(den2) < 1e-300:
        raise ThetaZeroDivision(f"denominator theta vanishes at x={x}, times={times}")
    return (2.0 * data.K[0] / data.rho) * num / (den1 * den2) * np.exp(2j * Phi)


def finite_gap_sampler(data: RiemannData) -> Sampler:
    def fn(x, times):
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.array([finite_gap_sample(data, float(xx), times) for xx in xs])
        return out.reshape(np.shape(x))

    return Sampler(fn, data.max_flows, "finite_gap", {"genus": data.genus})


def moduli_transform(data: RiemannData, a: float, b: float) -> RiemannData:
    """Push the affine spectral-parameter map lambda -> a lambda + b through
    the period vectors and expansion constants; B, Z, Delta, rho unchanged.

    V~^j = sum_{m=1}^{j} 2^(j-m) C(j,m) a^m b^(j-m) V^m
    K~_0 = a K_0
    K~_j = sum_{m=1}^{j} 2^(j-m) C(j,m) a^m b^(j-m) K_m + 2^(j-1) b^j
    """
    if a == 0:
        raise ValueError("a must be nonzero")
    g = data.genus
    n_vec = len(data.V)
    newV = []
    newK = [a * data.K[0]]
    for j in range(1, n_vec + 1):
        v = np.zeros(g, dtype=complex)
        kj = complex(2 ** (j - 1) * b**j)
        for m in range(1, j + 1):
            c = 2 ** (j - m) * math.comb(j, m) * a**m * b ** (j - m)
            v = v + c * data.V[m - 1]
            kj = kj + c * data.K[m]
        newV.append(v)
        newK.append(kj)
    return replace(data, V=tuple(newV), K=tuple(newK))


def random_riemann_data(genus: int, n_flows: int, rng=None, scale: float = 1.0) -> RiemannData:
    """Random well-conditioned RiemannData (identity checks, demos, tests).

    The Riemann matrix is symmetric with Im part diagonally dominant, so
    theta sums converge quickly; vectors and constants are generic complex.
    """
    rng = np.random.default_rng(rng)
    g = genus
    S = rng.normal(size=(g, g))
    Y = 0.5 * (S + S.T) * 0.2 + np.eye(g) * (1.5 + rng.uniform(0, 1))
    X = 0.3 * (lambda A: 0.5 * (A + A.T))(rng.normal(size=(g, g)))
    B = X + 1j * Y
    cx = lambda shape=(): rng.normal(size=shape) * scale + 1j * rng.normal(size=shape) * scale
    V = tuple(cx((g,)) for _ in range(n_flows + 1))
    K = tuple([complex(1.0 + abs(cx()))] + [complex(cx()) for _ in range(n_flows + 1)])
    return RiemannData(
        genus=g,
        B=B,
        V=V,
        K=K,
        Z=cx((g,)) * 0.3,
        delta=cx((g,)) * 0.3,
        rho=complex(1.0 + abs(cx())),
    )
