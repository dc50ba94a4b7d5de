"""Independent numerical cross-checks for the analytic model pieces.

The routines here deliberately avoid the closed forms in `env`: rates and
tail integrals are recomputed by adaptive quadrature of the defining
integrands, and gradients by central finite differences, so the two paths
share no code. Used by the `validate-energy` and `selftest` CLI commands
and by the test suite.
"""

from __future__ import annotations

import math

import numpy as np

from . import nn
from .env import NetworkConfig, average_update_energy, exp_tail_integral


def tail_integral_quadrature(x: float, beta: float) -> float:
    """Quadrature of int_x^inf u^-1 exp(-u/(2 beta)) du.

    Substituting u = x * (1 + s) keeps the integrand O(1) so the result
    carries full relative precision even when the value underflows toward
    1e-300.
    """
    from scipy import integrate

    scale = 2.0 * beta

    def integrand(s: float) -> float:
        return math.exp(-x * s / scale) / (1.0 + s)

    val, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-13, limit=400)
    return math.exp(-x / scale) * val


def throughput_quadrature(beta: float, config: NetworkConfig) -> float:
    """Mean throughput by direct quadrature of the truncated rate integral.

    Integrates bandwidth * log2(1+snr) against the exponential SNR density
    above the threshold, with the exponential tail factored out and the
    variable scaled to the fading mean for a well-conditioned integrand.
    """
    from scipy import integrate

    eta = config.snr_threshold
    scale = 2.0 * beta

    def integrand(v: float) -> float:
        return math.log2(1.0 + eta + scale * v) * math.exp(-v)

    val, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-11, limit=400)
    return config.bandwidth_hz * math.exp(-eta / scale) * val


def energy_quadrature(beta: float, size_bits: float, config: NetworkConfig) -> float:
    rate = throughput_quadrature(beta, config)
    if rate <= 0.0:
        return math.inf
    return config.tx_power_watts * size_bits / rate


def relative_error(value: float, reference: float) -> float:
    if math.isinf(reference) or reference == 0.0:
        return 0.0 if value == reference else math.inf
    return abs(value - reference) / abs(reference)


def energy_model_grid_error(
    betas=None, thresholds=(1.0, 10.0, 100.0), size_bits: float = 6e8
) -> float:
    """Max relative error of the closed-form energy over a (beta, eta) grid."""
    if betas is None:
        betas = np.logspace(-2, 4, 17)
    worst = 0.0
    for eta in thresholds:
        config = NetworkConfig(snr_threshold=eta)
        for beta in betas:
            closed = average_update_energy(float(beta), size_bits, config)
            oracle = energy_quadrature(float(beta), size_bits, config)
            worst = max(worst, relative_error(closed, oracle))
    return worst


def tail_integral_grid_error(arguments=None, beta: float = 0.5) -> float:
    """Max relative error of the closed-form tail integral on log-spaced x."""
    if arguments is None:
        arguments = np.logspace(-6, math.log10(60.0), 100)
    worst = 0.0
    for x in arguments:
        closed = exp_tail_integral(float(x), beta)
        oracle = tail_integral_quadrature(float(x), beta)
        worst = max(worst, relative_error(closed, oracle))
    return worst


def finite_difference_grad(loss_fn, params: nn.MlpParams, step: float = 1e-5) -> np.ndarray:
    """Central finite differences of a scalar loss over flattened params."""
    flat = params.get_flat()
    grad = np.zeros_like(flat)
    for i in range(flat.size):
        bumped = flat.copy()
        bumped[i] += step
        params.set_flat(bumped)
        hi = loss_fn()
        bumped[i] -= 2.0 * step
        params.set_flat(bumped)
        lo = loss_fn()
        grad[i] = (hi - lo) / (2.0 * step)
    params.set_flat(flat)
    return grad


def gradcheck_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-7) -> float:
    """Worst elementwise relative error with an absolute floor."""
    denom = np.maximum(np.abs(numeric), floor)
    return float(np.max(np.abs(analytic - numeric) / denom))
