"""
Exact series solution c0(t) = sum_k f_k(t - k tau) H(t - k tau).

Expanding the Laplace transform of c0 geometrically in w e^{-s tau} gives the
rational kernels

    F_0(s) = 1 / (s + 1)
    F_k(s) = -2 N^k (s - 1)^{k-1} / ((s + 1)^{k+1} (s + N)^k),   k >= 1

whose inverse transforms f_k are exponentials times polynomials (poles -1 and
-N, merged when N = 1). Partial fractions come from exact Taylor expansion of
the analytic cofactor around each pole by power-series division, carried out
in ``decimal`` at a precision that grows with k: the pole contributions
cancel heavily for large k.

The phase offset and environment loss enter as c0 = e^{-gamma_0 t/2} sum w^k f_k
with w = e^{i phi + gamma_0 tau/2}.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from typing import Any, Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .constants import DOUBLE_EVAL_MAX_K, K_LIMIT, K_LIMIT_EXTENDED
from .errors import ConfigurationError, MethodValidityError, NumericalFailure
from .model import CavityParams
from .trajectory import Trajectory, as_time_grid

logger = logging.getLogger(__name__)

PRECISIONS = ("auto", "double", "extended")
_LOG10_E = math.log10(math.e)


@dataclass(frozen=True)
class RationalFunction:
    """numerator / denominator, coefficients in ascending powers of s, monic denominator."""

    numerator: tuple[complex, ...]
    denominator: tuple[complex, ...]

    def __post_init__(self) -> None:
        den = np.trim_zeros(np.asarray(self.denominator, dtype=complex), "b")
        if den.size == 0:
            raise ConfigurationError("denominator must be nonzero")
        num = np.asarray(self.numerator, dtype=complex) / den[-1]
        num = np.trim_zeros(num, "b")
        object.__setattr__(self, "numerator", tuple(complex(c) for c in num) or (0j,))
        object.__setattr__(self, "denominator", tuple(complex(c) for c in den / den[-1]))

    def __call__(self, s: Any) -> Any:
        return P.polyval(s, self.numerator) / P.polyval(s, self.denominator)

    def coefficient_distance(self, other: RationalFunction) -> float:
        """Largest coefficient-wise difference, numerator and denominator."""

        def gap(a: Sequence[complex], b: Sequence[complex]) -> float:
            n = max(len(a), len(b))
            pa = np.pad(np.asarray(a), (0, n - len(a)))
            pb = np.pad(np.asarray(b), (0, n - len(b)))
            return float(np.max(np.abs(pa - pb)))

        return max(gap(self.numerator, other.numerator), gap(self.denominator, other.denominator))


@dataclass(frozen=True)
class ExpTerm:
    """e^{pole t} * sum_j coefficients[j] t^j."""

    pole: Decimal
    coefficients: tuple[Decimal, ...]


@dataclass(frozen=True)
class ExpPolynomial:
    """
    Sum of exponential-polynomial terms times a complex scale.

    Coefficients are stored as Decimal so evaluation can run at whatever
    precision the cancellation between poles requires.
    """

    terms: tuple[ExpTerm, ...]
    scale: complex = 1.0 + 0j
    order: int = 0

    @property
    def poles(self) -> list[complex]:
        return [complex(float(term.pole)) for term in self.terms]

    def _float_coefficients(self) -> list[tuple[float, np.ndarray]]:
        out = []
        for term in self.terms:
            coeffs = np.array([float(c) for c in term.coefficients])
            if not np.all(np.isfinite(coeffs)):
                raise NumericalFailure(
                    "coefficients overflow double precision; use extended precision",
                    order=self.order,
                )
            out.append((float(term.pole), coeffs))
        return out

    def _evaluate_double(self, t: np.ndarray) -> np.ndarray:
        total = np.zeros(t.shape)
        for pole, coeffs in self._float_coefficients():
            total += np.exp(pole * t) * P.polyval(t, coeffs)
        return total

    def _evaluate_extended(self, t: np.ndarray) -> np.ndarray:
        # log10 magnitude of each coefficient, used to size the working precision
        logs = [
            [(c.adjusted() + 1) if c != 0 else -math.inf for c in term.coefficients]
            for term in self.terms
        ]
        out = np.empty(t.shape)
        for i, ti in enumerate(t):
            tf = float(ti)
            lt = math.log10(tf) if tf > 0 else -math.inf
            peak = 0.0
            for term, lc in zip(self.terms, logs):
                decay = float(term.pole) * tf * _LOG10_E
                for j, lcj in enumerate(lc):
                    if lcj == -math.inf:
                        continue
                    mag = lcj + (j * lt if j else 0.0) + decay
                    peak = max(peak, mag)
            digits = 25 + int(math.ceil(peak))
            with localcontext() as ctx:
                ctx.prec = digits
                td = Decimal(tf)
                acc = Decimal(0)
                for term in self.terms:
                    poly = Decimal(0)
                    for c in reversed(term.coefficients):
                        poly = poly * td + c
                    acc += (term.pole * td).exp() * poly
                out[i] = float(acc)
        return out

    def evaluate(self, t: Any, precision: str = "auto") -> np.ndarray:
        """
        Evaluate on times t >= 0.

        Args:
            t: Times (scalar or array)
            precision: "double" (float64), "extended" (decimal) or "auto"
                (double for orders up to 8, extended beyond)
        """
        if precision not in PRECISIONS:
            raise ConfigurationError(f"precision must be one of {PRECISIONS}", precision=precision)
        grid = np.atleast_1d(np.asarray(t, dtype=float))
        if precision == "auto":
            precision = "double" if self.order <= DOUBLE_EVAL_MAX_K else "extended"
        if precision == "double":
            real = self._evaluate_double(grid)
        else:
            real = self._evaluate_extended(grid)
        if not np.all(np.isfinite(real)):
            raise NumericalFailure("non-finite series term", order=self.order)
        return self.scale * real

    def __call__(self, t: Any, precision: str = "auto") -> np.ndarray:
        return self.evaluate(t, precision)

    def to_rational(self) -> RationalFunction:
        """Laplace transform sum_j c_j j! / (s - p)^{j+1}, recombined over a common denominator."""
        parts = []
        for term in self.terms:
            p = float(term.pole)
            num = np.zeros(1, dtype=complex)
            m = len(term.coefficients)
            for j, c in enumerate(term.coefficients):
                # c_j j! (s - p)^{m-1-j}
                piece = P.polypow([-p, 1.0], m - 1 - j) * (float(c) * math.factorial(j))
                num = P.polyadd(num, piece)
            parts.append((num, P.polypow([-p, 1.0], m)))
        numerator = np.zeros(1, dtype=complex)
        denominator = np.ones(1, dtype=complex)
        for i, (num, _) in enumerate(parts):
            term_num = num
            for k, (_, den) in enumerate(parts):
                if k != i:
                    term_num = P.polymul(term_num, den)
            numerator = P.polyadd(numerator, term_num)
        for _, den in parts:
            denominator = P.polymul(denominator, den)
        return RationalFunction(tuple(self.scale * numerator), tuple(denominator))


def kernel_weight(params: CavityParams) -> complex:
    """w = e^{i phi + gamma_0 tau / 2}."""
    return cmath.exp(1j * params.phase_offset + 0.5 * params.env_rate * params.delay_tau)


def _working_digits(k: int, n_atoms: int) -> int:
    ratio = n_atoms / (n_atoms - 1) if n_atoms > 1 else 1.0
    return 30 + int(math.ceil(k * math.log10(8.0 * max(ratio, 1.0))))


def _binomial_series(shift: Decimal, power: int, order: int) -> list[Decimal]:
    """First ``order`` Taylor coefficients of (z + shift)^power in z."""
    out = []
    for i in range(min(power, order - 1) + 1):
        out.append(Decimal(math.comb(power, i)) * shift ** (power - i))
    return out + [Decimal(0)] * (order - len(out))


def _series_product(a: list[Decimal], b: list[Decimal], order: int) -> list[Decimal]:
    out = [Decimal(0)] * order
    for i, ai in enumerate(a[:order]):
        if ai == 0:
            continue
        for j in range(order - i):
            out[i + j] += ai * b[j]
    return out


def _series_divide(num: list[Decimal], den: list[Decimal], order: int) -> list[Decimal]:
    """Power-series long division in increasing powers of z, truncated at ``order``."""
    out: list[Decimal] = []
    for i in range(order):
        acc = num[i]
        for j in range(1, i + 1):
            acc -= den[j] * out[i - j]
        out.append(acc / den[0])
    return out


def _partial_fractions(
    gain: Decimal,
    zero_power: int,
    poles: list[tuple[Decimal, int]],
) -> tuple[ExpTerm, ...]:
    """
    Inverse transform of gain * (s - 1)^zero_power / prod (s - p)^m.

    For each pole p of multiplicity m the cofactor H(s) = gain (s-1)^zero_power
    / prod_{q != p} (s - q)^{m_q} is expanded as sum h_i (s - p)^i; the t^j
    coefficient of the pole's exponential polynomial is h_{m-1-j} / j!.
    """
    terms = []
    for p, m in poles:
        num = [gain * c for c in _binomial_series(p - 1, zero_power, m)]
        den = [Decimal(1)] + [Decimal(0)] * (m - 1)
        for q, mq in poles:
            if q == p:
                continue
            den = _series_product(den, _binomial_series(p - q, mq, m), m)
        h = _series_divide(num, den, m)
        coeffs = []
        factorial = Decimal(1)
        for j in range(m):
            if j:
                factorial *= j
            coeffs.append(h[m - 1 - j] / factorial)
        terms.append(ExpTerm(p, tuple(coeffs)))
    return tuple(terms)


def _check_order(k: int, precision: str) -> None:
    if precision not in PRECISIONS:
        raise ConfigurationError(f"precision must be one of {PRECISIONS}", precision=precision)
    if k < 0:
        raise ConfigurationError("term index must be >= 0", k=k)
    limit = K_LIMIT_EXTENDED if precision == "extended" else K_LIMIT
    if k > limit:
        raise MethodValidityError(
            f"series order {k} exceeds the stability limit {limit}; use the dde method",
            k=k,
            limit=limit,
        )


def term_fk(k: int, params: CavityParams, precision: str = "auto") -> ExpPolynomial:
    """
    Inverse transform of the k-th series kernel, scaled by w^k.

    Args:
        k: Term index (>= 0)
        params: Cavity parameters; phi and gamma_0 only enter through the scale w^k
        precision: Selects the order limit (300, or 3000 for "extended")

    Raises:
        MethodValidityError: if k is beyond the order limit
    """
    _check_order(k, precision)
    n = params.n_atoms
    scale = kernel_weight(params) ** k
    with localcontext() as ctx:
        ctx.prec = _working_digits(k, n)
        if k == 0:
            terms: tuple[ExpTerm, ...] = (ExpTerm(Decimal(-1), (Decimal(1),)),)
        else:
            gain = Decimal(-2) * Decimal(n) ** k
            if n == 1:
                poles = [(Decimal(-1), 2 * k + 1)]
            else:
                poles = [(Decimal(-1), k + 1), (Decimal(-n), k)]
            terms = _partial_fractions(gain, k - 1, poles)
    return ExpPolynomial(terms, scale=scale, order=k)


def fk_transform(k: int, params: CavityParams) -> RationalFunction:
    """Rational Laplace transform of w^k f_k, built directly from its factored form."""
    if k < 0:
        raise ConfigurationError("term index must be >= 0", k=k)
    n = params.n_atoms
    scale = kernel_weight(params) ** k
    if k == 0:
        return RationalFunction((scale,), (1.0, 1.0))
    numerator = -2.0 * float(n) ** k * scale * P.polypow([-1.0, 1.0], k - 1)
    denominator = P.polymul(P.polypow([1.0, 1.0], k + 1), P.polypow([float(n), 1.0], k))
    return RationalFunction(tuple(numerator), tuple(denominator))


def laplace_transform(params: CavityParams) -> Callable[[complex], complex]:
    """
    Exact transform of c0 including the phase offset and environment loss.

        c0~(s) = [s' + N(1 - W e^{-s tau})] / [(s'+1)(s'+N) - W e^{-s tau} (s'-1) N]

    with s' = s + gamma_0/2 and W = e^{i phi}.
    """
    n = params.n_atoms
    tau = params.delay_tau
    loss = 0.5 * params.env_rate
    w = cmath.exp(1j * params.phase_offset)

    def transform(s: complex) -> complex:
        sp = s + loss
        echo = w * cmath.exp(-s * tau)
        return (sp + n * (1 - echo)) / ((sp + 1) * (sp + n) - echo * (sp - 1) * n)

    return transform


def talbot_inverse(
    transform: Callable[[complex], complex], t: Any, degree: int = 32
) -> np.ndarray:
    """
    Fixed-Talbot numerical inverse Laplace transform of a real-valued function.

    The contour must enclose every singularity; transforms with e^{-s tau}
    factors are not suitable.
    """
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(times <= 0):
        raise ConfigurationError("talbot_inverse needs t > 0")
    m = int(degree)
    r = 2.0 * m / 5.0
    theta = np.arange(m) * np.pi / m
    cot = np.zeros(m)
    cot[1:] = 1.0 / np.tan(theta[1:])
    out = np.empty(times.size)
    for i, ti in enumerate(times):
        nodes = r / ti * theta * (cot + 1j)
        nodes[0] = r / ti
        values = np.array([transform(complex(p)) for p in nodes], dtype=complex)
        weights = np.exp(ti * nodes) * (1 + 1j * theta * (1 + cot**2) - 1j * cot)
        weights[0] = np.exp(r) / 2.0
        out[i] = (2.0 / (5.0 * ti) * np.dot(weights, values)).real
    return out


def series_c0(
    params: CavityParams,
    t_grid: Any,
    k_max: int | None = None,
    precision: str = "auto",
) -> Trajectory:
    """
    Sum the series on a time grid.

    Args:
        params: Cavity parameters
        t_grid: Times >= 0
        k_max: Highest term; defaults to floor(t_max / tau) + 1. Terms that are
            gated off everywhere on the grid are never built.
        precision: "auto", "double" or "extended" (raises the order limit)

    Raises:
        MethodValidityError: if k_max exceeds the order limit
    """
    grid = as_time_grid(t_grid)
    tau = params.delay_tau
    t_max = float(grid.max())
    needed = int(math.floor(t_max / tau)) + 1
    k_top = needed if k_max is None else int(k_max)
    _check_order(k_top, precision)

    active = min(k_top, needed)
    c0 = np.zeros(grid.shape, dtype=complex)
    for k in range(active + 1):
        shift = k * tau
        mask = grid >= shift if k == 0 else grid > shift
        if not np.any(mask):
            continue
        fk = term_fk(k, params, precision)
        c0[mask] += fk.evaluate(grid[mask] - shift, precision)
        if k and k % 25 == 0:
            logger.debug("series: term %d/%d", k, active)

    if params.env_rate > 0:
        c0 *= np.exp(-0.5 * params.env_rate * grid)
    meta = {
        "method": "series",
        "k_max": k_top,
        "terms_built": active + 1,
        "precision": precision,
        **{f"param_{k}": v for k, v in params.to_dict().items()},
    }
    return Trajectory(grid, c0, None, meta)


__all__ = [
    "RationalFunction",
    "ExpTerm",
    "ExpPolynomial",
    "PRECISIONS",
    "kernel_weight",
    "term_fk",
    "fk_transform",
    "laplace_transform",
    "talbot_inverse",
    "series_c0",
]
