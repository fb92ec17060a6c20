"""Statistics of products of Gamma-Gamma and misalignment fading factors.

The composite channel is Z = Z1 * Z2 with Z1 a product of N independent
Gamma-Gamma variates and Z2 a product of L power-law misalignment factors
(L <= N).  PDF and CDF of Z are Meijer G functions of the scaled argument
z = x * prod(alpha_i beta_i / Omega_i) / prod(A_o,i); they are evaluated
through the residue expansion in :mod:`cascade_fading.specfun`, switching to
the leading exponential asymptote deep in the upper tail where the expansion
loses precision to cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special as sp

from .specfun import (
    AccuracyError,
    DegenerateParametersError,
    DomainError,
    MeijerGSpec,
    SlaterExpansion,
    _eval_expansion,
    _perturbed_specs,
    _richardson,
    build_slater_expansion,
)

__all__ = [
    "GammaGammaParams",
    "PointingErrorParams",
    "CompositeProduct",
    "gg_pdf",
    "z1_pdf",
    "z1_cdf",
    "z2_pdf",
    "z_pdf",
    "z_cdf",
    "z_cdf_asymptotic",
    "sample_z",
]

# Upper-tail handling.  The residue expansion (with its double-double
# escalation) carries the evaluation until the complement drops to
# _TAIL_HANDOFF, beyond which an exponential tail model takes over.  The
# model is the leading asymptote of the Meijer G times a (1 + c1/t + c2/t^2)
# correction fitted per product against the expansion itself just inside the
# handoff; the raw leading order alone can be off by large factors when the
# shape parameters exceed the stretched argument t = z^(1/sigma).  Elements
# whose expansion error estimate is too coarse may be rescued by the model
# once the complement is below _TAIL_RESCUE; many-factor products keep a
# narrow band where neither representation is trustworthy, which raises
# AccuracyError rather than returning a doubtful number.
_TAIL_HANDOFF = 3e-8
_TAIL_RESCUE = 3e-2
_NEAR_ONE = 0.99
_NEAR_ONE_ERR = 3e-7

# Runtime guards on the tracked (deliberately conservative) error estimate;
# tests pin the true accuracy against independent oracles.  The PDF guard is
# looser: its Richardson estimates run ~1e-3 relative in the bulk while the
# realized error stays orders below.
_GUARD_REL = 3e-4
_GUARD_REL_PDF = 2e-3
_GUARD_ABS = 1e-9

# Misalignment factors with xi above this are quasi-deterministic: their
# residue terms would put exponents ~xi into the expansion (whose series then
# overflow), while integrating them out over a short Gauss-Laguerre rule is
# accurate to O((c/xi)^12).  l = A_o U^(1/xi) means -xi ln(l/A_o) is standard
# exponential.
_BIG_XI = 64.0
_LAGUERRE_NODES, _LAGUERRE_WEIGHTS = sp.roots_laguerre(6)


@dataclass(frozen=True)
class GammaGammaParams:
    """Shaping parameters (alpha, beta) and mean Omega of one turbulence link."""

    alpha: float
    beta: float
    omega: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0 and self.omega > 0):
            raise DomainError(f"Gamma-Gamma parameters must be positive: {self}")


@dataclass(frozen=True)
class PointingErrorParams:
    """Misalignment fading parameters of one link.

    xi is the squared ratio of equivalent beam radius to jitter standard
    deviation, a_o the collected power fraction at zero displacement.  The
    PDF is xi/A_o^xi * x^(xi-1) supported on [0, A_o].
    """

    xi: float
    a_o: float

    def __post_init__(self):
        if not self.xi > 0:
            raise DomainError(f"xi must be positive, got {self.xi}")
        if not 0.0 < self.a_o <= 1.0:
            raise DomainError(f"a_o must lie in (0, 1], got {self.a_o}")


@dataclass(frozen=True)
class CompositeProduct:
    """The composite channel Z: N Gamma-Gamma links, L of them misaligned.

    Links are stored in a canonical sorted order so that permuting the input
    sequences yields an identical object (and bit-identical statistics).
    """

    gg_links: tuple
    pe_links: tuple = ()

    def __post_init__(self):
        gg = tuple(sorted(self.gg_links, key=lambda g: (g.alpha, g.beta, g.omega)))
        pe = tuple(sorted(self.pe_links, key=lambda p: (p.xi, p.a_o)))
        object.__setattr__(self, "gg_links", gg)
        object.__setattr__(self, "pe_links", pe)
        if self.n < 1:
            raise DomainError("at least one Gamma-Gamma link is required")
        if self.l > self.n:
            raise DomainError(f"L={self.l} misaligned links exceed N={self.n}")

    @property
    def n(self):
        return len(self.gg_links)

    @property
    def l(self):
        return len(self.pe_links)

    @property
    def b_tuple(self):
        """Exponent tuple [alpha_1..alpha_N, beta_1..beta_N, xi_1..xi_L]."""
        return tuple(
            [g.alpha for g in self.gg_links]
            + [g.beta for g in self.gg_links]
            + [p.xi for p in self.pe_links]
        )

    @property
    def a_tuple(self):
        """Upper-parameter tuple [1, xi_1 + 1, .., xi_L + 1]."""
        return tuple([1.0] + [p.xi + 1.0 for p in self.pe_links])

    @property
    def rate_scale(self):
        """Maps x to the Meijer argument: prod(ab/Omega) / prod(A_o)."""
        s = 1.0
        for g in self.gg_links:
            s *= g.alpha * g.beta / g.omega
        for p in self.pe_links:
            s /= p.a_o
        return s

    @property
    def prefactor(self):
        """prod(xi) / prod(Gamma(alpha) Gamma(beta)) in front of both G's."""
        logc = 0.0
        for g in self.gg_links:
            logc -= math.lgamma(g.alpha) + math.lgamma(g.beta)
        for p in self.pe_links:
            logc += math.log(p.xi)
        return math.exp(logc)

    @property
    def is_degenerate(self):
        """True when the exponent tuple has an integer-separated pair."""
        return _machinery(self, "cdf").degenerate

    def replicated(self, times):
        """Product law of `times` independent copies multiplied together."""
        if times < 1:
            raise DomainError("need at least one copy")
        return CompositeProduct(self.gg_links * times, self.pe_links * times)


def _cdf_spec(ch: CompositeProduct) -> MeijerGSpec:
    q = 2 * ch.n + ch.l + 1
    return MeijerGSpec(q - 1, 1, ch.l + 1, q, ch.a_tuple, ch.b_tuple + (0.0,))


def _pdf_spec(ch: CompositeProduct) -> MeijerGSpec:
    q = 2 * ch.n + ch.l
    return MeijerGSpec(q, 0, ch.l, q, ch.a_tuple[1:], ch.b_tuple)


@dataclass(frozen=True)
class _Machinery:
    expansions: tuple  # one (clean) or two (perturbed +/-)
    degenerate: bool


@lru_cache(maxsize=512)
def _machinery(ch: CompositeProduct, kind: str) -> _Machinery:
    spec = _cdf_spec(ch) if kind == "cdf" else _pdf_spec(ch)
    try:
        return _Machinery((build_slater_expansion(spec),), False)
    except DegenerateParametersError:
        return _Machinery(
            tuple(build_slater_expansion(s) for s in _perturbed_specs(spec)),
            True,
        )


def _eval_machinery(mach: _Machinery, z):
    """Expansion value and error estimate at z; Richardson-extrapolated over
    the perturbation ladder in the degenerate case.  Instability shows up in
    the returned estimate, the zone logic of the callers decides what to do."""
    if not mach.degenerate:
        return _eval_expansion(mach.expansions[0], z)
    evals = [_eval_expansion(e, z) for e in mach.expansions]
    val, g1, g2, err = _richardson([e[0] for e in evals],
                                   [e[1] for e in evals])
    return val, err


def _tail_params(ch: CompositeProduct):
    """Constants of the upper-tail asymptote.

    The PDF-side G function behaves like A * z^theta * exp(-sigma z^(1/sigma))
    for large z (sigma = 2N), hence the complement of the CDF carries an extra
    z^(-1/sigma).
    """
    sigma = 2 * ch.n
    sum_b = sum(ch.b_tuple)
    theta = (1.0 - sigma) / (2.0 * sigma) + (sum_b - sum(ch.a_tuple[1:])) / sigma
    ln_amp = 0.5 * (sigma - 1) * math.log(2 * math.pi) - 0.5 * math.log(sigma)
    return sigma, theta, ln_amp + math.log(ch.prefactor)


def _ln_tail(ch: CompositeProduct, z):
    """log of the leading-order complement 1 - F at scaled argument z."""
    sigma, theta, ln_c = _tail_params(ch)
    t = np.power(z, 1.0 / sigma)
    return ln_c + (theta - 1.0 / sigma) * np.log(z) - sigma * t, t


def _leading_t_at(ch: CompositeProduct, target_ln, kind):
    """Stretched argument t where the leading tail/pdf magnitude hits a level."""
    sigma, theta, ln_c = _tail_params(ch)
    power = theta - (1.0 / sigma if kind == "cdf" else 0.0)

    def lead(t):
        return ln_c + power * sigma * math.log(t) - sigma * t

    t_lo = max(power, 0.0) + 2.0
    t_hi = t_lo
    while lead(t_hi) > target_ln:
        t_hi *= 1.5
    for _ in range(80):
        mid = 0.5 * (t_lo + t_hi)
        if lead(mid) > target_ln:
            t_lo = mid
        else:
            t_hi = mid
    return t_hi


@dataclass(frozen=True)
class _TailModel:
    kappa_a: float
    kappa_b: float
    t_min: float
    far_z: float


@lru_cache(maxsize=512)
def _tail_model(ch: CompositeProduct, kind: str) -> _TailModel:
    """Fit the exponential-tail correction against the expansion itself.

    The true tail relates to the leading asymptote through a factor of the
    form exp((kappa_a + kappa_b ln t) / t) when the shape parameters are
    comparable to the stretched argument t = z^(1/sigma) (the ln(ratio) * t
    product is nearly constant in t).  The two coefficients are fitted at a
    ladder of points shallow enough for the double-double expansion to give
    near-exact references; unusable points (tracked error above 0.5 percent
    of the reference) are dropped, and with no usable points the raw leading
    order is kept.
    """
    sigma, theta, ln_c = _tail_params(ch)
    mach = _machinery(ch, kind)
    power = theta - (1.0 / sigma if kind == "cdf" else 0.0)
    t_start = max(1.2, 0.35 * power + 0.8)
    ladder = t_start * 1.08 ** np.arange(64)
    lead_ln = ln_c + power * sigma * np.log(ladder) - sigma * ladder
    ladder = ladder[lead_ln > math.log(1e-14)]
    raw, err = _eval_machinery(mach, ladder**sigma)
    if kind == "cdf":
        refs = 1.0 - raw * ch.prefactor
    else:
        refs = raw * ch.prefactor
    ests = err * ch.prefactor
    ts, ys = [], []
    for t, ref, est in zip(ladder, refs, ests):
        if not (math.isfinite(ref) and math.isfinite(est)) or ref <= 0 or ref < 1e-7:
            continue
        if est <= 0.02 * ref and ref <= 0.5:
            lead = math.exp(ln_c + power * sigma * math.log(t) - sigma * t)
            ts.append(float(t))
            ys.append(math.log(ref / lead))
        elif ref <= 0.5 and ts:
            break  # error estimate taking over; deeper points add nothing
    if not ts:
        # last resort: stretch the raw leading order far enough out that its
        # known underestimate cannot matter at the handoff level
        t_far = _leading_t_at(ch, math.log(_TAIL_HANDOFF * 1e-3), kind)
        return _TailModel(0.0, 0.0, math.inf, t_far**sigma)
    ts, ys = ts[-6:], ys[-6:]
    if len(ts) == 1:
        ka, kb = ys[0] * ts[0], 0.0
    else:
        a = np.array([[1.0 / t, math.log(t) / t] for t in ts])
        ka, kb = np.linalg.lstsq(a, np.array(ys), rcond=None)[0]

    def model_ln(t):
        power = theta - (1.0 / sigma if kind == "cdf" else 0.0)
        return (ln_c + power * sigma * math.log(t) - sigma * t
                + (ka + kb * math.log(t)) / t)

    t_lo = min(ts)
    t_hi = t_lo
    while model_ln(t_hi) > math.log(_TAIL_HANDOFF):
        t_hi *= 1.5
    for _ in range(80):
        mid = 0.5 * (t_lo + t_hi)
        if model_ln(mid) > math.log(_TAIL_HANDOFF):
            t_lo = mid
        else:
            t_hi = mid
    return _TailModel(float(ka), float(kb), min(ts), t_hi**sigma)


def _model_tail(ch: CompositeProduct, model: _TailModel, z, kind):
    """Corrected tail (kind=cdf: complement; kind=pdf: G magnitude) at z."""
    sigma, theta, ln_c = _tail_params(ch)
    t = np.power(z, 1.0 / sigma)
    power = theta - (1.0 / sigma if kind == "cdf" else 0.0)
    lead = ln_c + power * np.log(z) - sigma * t
    corr = (model.kappa_a + model.kappa_b * np.log(t)) / t
    return np.exp(lead + corr), t


def _accuracy_fail(what, val, err):
    raise AccuracyError(
        f"{what} evaluation lost too much precision "
        f"(value ~ {val:.6e}, error estimate {err:.1e})"
    )


def _as_array(x, allow_zero=False):
    scalar = np.isscalar(x) or np.ndim(x) == 0
    xx = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xx < 0) or (not allow_zero and np.any(xx <= 0)):
        raise DomainError("argument must be positive")
    return xx, scalar


@lru_cache(maxsize=512)
def _big_xi_mixture(ch: CompositeProduct):
    """Split off quasi-deterministic misalignment links.

    Returns (rest, scales, weights): the composite without the xi >= _BIG_XI
    links, plus mixture nodes such that F(x) = sum_k w_k F_rest(x * s_k) and
    f(x) = sum_k w_k f_rest(x * s_k) * s_k.
    """
    big = tuple(p for p in ch.pe_links if p.xi >= _BIG_XI)
    if not big:
        return None
    rest = CompositeProduct(ch.gg_links,
                            tuple(p for p in ch.pe_links if p.xi < _BIG_XI))
    scales = np.array([1.0])
    weights = np.array([1.0])
    for p in big:
        s_p = np.exp(np.asarray(_LAGUERRE_NODES) / p.xi) / p.a_o
        w_p = np.asarray(_LAGUERRE_WEIGHTS, dtype=float)
        scales = (scales[:, None] * s_p[None, :]).ravel()
        weights = (weights[:, None] * w_p[None, :]).ravel()
    return rest, scales, weights / np.sum(weights)


def z_cdf(ch: CompositeProduct, x):
    """CDF of the composite product Z at x (scalar or array): the residue
    expansion of the closed form plus the fitted exponential tail model."""
    xx, scalar = _as_array(x, allow_zero=True)
    mixture = _big_xi_mixture(ch)
    if mixture is not None:
        rest_ch, scales, weights = mixture
        grid = xx[:, None] * scales[None, :]
        vals = z_cdf(rest_ch, grid.ravel()).reshape(grid.shape)
        out = vals @ weights
        return float(out[0]) if scalar else out
    out = np.zeros_like(xx)
    pos = xx > 0
    if np.any(pos):
        model = _tail_model(ch, "cdf")
        z = xx[pos] * ch.rate_scale
        vals = np.empty_like(z)
        far = z >= model.far_z
        if np.any(far):
            tail, _ = _model_tail(ch, model, z[far], "cdf")
            vals[far] = 1.0 - tail
        rest = ~far
        if np.any(rest):
            mach = _machinery(ch, "cdf")
            raw, err = _eval_machinery(mach, z[rest])
            raw = raw * ch.prefactor
            err = err * ch.prefactor
            shaky = (err > _GUARD_REL * np.abs(raw) + _GUARD_ABS) | (
                (raw > _NEAR_ONE) & (err > _NEAR_ONE_ERR)
            ) | ~np.isfinite(raw) | ~np.isfinite(err)
            if np.any(shaky):
                tail_rest, t_rest = _model_tail(ch, model, z[rest], "cdf")
                rescue = shaky & (tail_rest <= _TAIL_RESCUE) & (t_rest >= 0.95 * model.t_min)
                raw = np.where(rescue, 1.0 - tail_rest, raw)
                err = np.where(rescue, 0.02 * tail_rest, err)
                left = shaky & ~rescue
                if np.any(left):
                    i = int(np.argmax(np.where(left, np.nan_to_num(err, nan=np.inf), 0.0)))
                    _accuracy_fail("CDF", raw[i], err[i])
            vals[rest] = raw
        out[pos] = vals
    return float(out[0]) if scalar else out


def z_pdf(ch: CompositeProduct, x):
    """PDF of the composite product Z at x > 0 (scalar or array)."""
    xx, scalar = _as_array(x)
    mixture = _big_xi_mixture(ch)
    if mixture is not None:
        rest_ch, scales, weights = mixture
        grid = xx[:, None] * scales[None, :]
        vals = z_pdf(rest_ch, grid.ravel()).reshape(grid.shape)
        out = (vals * scales[None, :]) @ weights
        return float(out[0]) if scalar else out
    model = _tail_model(ch, "pdf")
    z = xx * ch.rate_scale
    vals = np.empty_like(z)
    far = z >= model.far_z
    if np.any(far):
        g_far, _ = _model_tail(ch, model, z[far], "pdf")
        vals[far] = g_far / xx[far]
    rest = ~far
    if np.any(rest):
        mach = _machinery(ch, "pdf")
        raw, err = _eval_machinery(mach, z[rest])
        raw = raw * ch.prefactor / xx[rest]
        err = err * ch.prefactor / xx[rest]
        shaky = (err > _GUARD_REL_PDF * np.abs(raw) + 1e-12) | ~np.isfinite(raw)
        if np.any(shaky):
            g_rest, t_rest = _model_tail(ch, model, z[rest], "pdf")
            rescue = shaky & (g_rest <= _TAIL_RESCUE) & (t_rest >= 0.95 * model.t_min)
            raw = np.where(rescue, g_rest / xx[rest], raw)
            left = shaky & ~rescue
            if np.any(left):
                i = int(np.argmax(np.where(left, np.nan_to_num(err, nan=np.inf), 0.0)))
                _accuracy_fail("PDF", raw[i], err[i])
        vals[rest] = raw
    return float(vals[0]) if scalar else vals


def z_cdf_asymptotic(ch: CompositeProduct, x):
    """Small-x limit of the CDF: the finite sum of x^(B_i) residue terms.

    Requires an exponent tuple free of integer separations; for coincident
    parameters use the exact z_cdf instead.
    """
    xx, scalar = _as_array(x, allow_zero=True)
    mixture = _big_xi_mixture(ch)
    if mixture is not None:
        rest_ch, scales, weights = mixture
        grid = xx[:, None] * scales[None, :]
        vals = z_cdf_asymptotic(rest_ch, grid.ravel()).reshape(grid.shape)
        out = vals @ weights
        return float(out[0]) if scalar else out
    mach = _machinery(ch, "cdf")
    if mach.degenerate:
        raise DegenerateParametersError(
            "exponent tuple has integer-separated entries; the power-law "
            "limit does not apply, use z_cdf"
        )
    z = xx * ch.rate_scale
    out = np.zeros_like(z)
    pos = z > 0
    zp = z[pos]
    acc = np.zeros_like(zp)
    for term in mach.expansions[0].terms:
        acc += term.coefficient * np.power(zp, term.exponent)
    out[pos] = acc * ch.prefactor
    return float(out[0]) if scalar else out


def z1_pdf(links, x):
    """PDF of a pure Gamma-Gamma product (no misalignment)."""
    return z_pdf(CompositeProduct(tuple(links)), x)


def z1_cdf(links, x):
    """CDF of a pure Gamma-Gamma product (no misalignment)."""
    return z_cdf(CompositeProduct(tuple(links)), x)


def gg_pdf(p: GammaGammaParams, x):
    """Single-link Gamma-Gamma PDF via the Bessel-K closed form."""
    xx, scalar = _as_array(x)
    s = 0.5 * (p.alpha + p.beta)
    rate = p.alpha * p.beta / p.omega
    arg = 2.0 * np.sqrt(rate * xx)
    nu = abs(p.alpha - p.beta)
    val = (
        2.0
        / (math.gamma(p.alpha) * math.gamma(p.beta))
        * rate**s
        * xx ** (s - 1.0)
        * sp.kv(nu, arg)
    )
    return float(val[0]) if scalar else val


def z2_pdf(links, x):
    """PDF of a product of misalignment factors (common xi).

    The log-power closed form is a valid density only when all xi agree
    (the zero-displacement fractions A_o may differ); heterogeneous xi are
    rejected.  Support is [0, prod(A_o)]; beyond it the PDF is zero.
    """
    links = tuple(links)
    if not links:
        raise DomainError("need at least one misaligned link")
    big_l = len(links)
    xis = [p.xi for p in links]
    if max(xis) - min(xis) > 1e-9 * (1.0 + max(xis)):
        raise DegenerateParametersError(
            "the log-power product form requires a common xi across links; "
            "use the composite z_pdf for heterogeneous exponents"
        )
    xi = xis[0]
    edge = 1.0
    for p in links:
        edge *= p.a_o
    xx, scalar = _as_array(x)
    out = np.zeros_like(xx)
    inside = xx <= edge
    xin = xx[inside]
    if xin.size:
        if big_l >= 5:
            log_c = -math.lgamma(big_l) + sum(math.log(p.xi) for p in links)
            log_c -= sum(p.xi * math.log(p.a_o) for p in links)
            with np.errstate(divide="ignore"):
                log_ln = np.where(
                    xin < edge, (big_l - 1) * np.log(np.log(edge / xin)), -np.inf
                )
            out[inside] = np.exp(log_c + (xi - 1.0) * np.log(xin) + log_ln)
        else:
            c = 1.0 / math.factorial(big_l - 1)
            for p in links:
                c *= p.xi / p.a_o**p.xi
            out[inside] = c * xin ** (xi - 1.0) * np.log(edge / xin) ** (big_l - 1)
    return float(out[0]) if scalar else out


def sample_z(ch: CompositeProduct, rng: np.random.Generator, count: int):
    """Draw `count` i.i.d. realizations of Z.

    Each Gamma-Gamma factor is the product of two independent gamma variates
    with shapes (alpha, beta) and scales (1/alpha, Omega/beta); each
    misalignment factor is A_o * U^(1/xi) by CDF inversion.  Deterministic
    for a given generator state.
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    z = np.ones(count)
    for g in ch.gg_links:
        z *= rng.gamma(g.alpha, 1.0 / g.alpha, count)
        z *= rng.gamma(g.beta, g.omega / g.beta, count)
    for p in ch.pe_links:
        z *= p.a_o * rng.random(count) ** (1.0 / p.xi)
    return z
