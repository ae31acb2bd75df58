"""Special functions, the Cauchy transform pair, and seeded random samplers.

Every kernel accepts a scalar or a numpy array and returns the same shape, so the
simulation harness runs whole replication blocks through the code paths the
scalar operations use. Scalars in give floats out.
"""

from typing import Optional, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy import special

from tcct.core.errors import DomainError

FloatOrArray = Union[float, np.ndarray]

SMALL_P = 1e-15  # Below this, tan((0.5 - p)pi) is replaced by its series limit 1/(p pi)
LARGE_T = 1e15  # Above this, the Cauchy survival is replaced by 1/(t pi)
_UINT64_MAX = 2**64 - 1


def _as_float_array(value: ArrayLike, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if np.isnan(arr).any():
        raise DomainError(f"{name} must not be NaN")
    return arr


def _as_probability(value: ArrayLike, name: str = "p") -> np.ndarray:
    arr = _as_float_array(value, name)
    if ((arr < 0.0) | (arr > 1.0)).any():
        raise DomainError(f"{name} must lie in [0, 1]")
    return arr


def _shaped_like(out: np.ndarray, like: ArrayLike) -> FloatOrArray:
    return float(out) if np.ndim(like) == 0 else out


def cauchy_transform(p: ArrayLike) -> FloatOrArray:
    """Map p-values to Cauchy scores tan((0.5 - p) pi).

    p = 0 maps to +inf and p = 1 to -inf. The score is evaluated as cot(p pi)
    below 0.25 and -cot((1 - p) pi) above 0.75 so that neither tail loses
    precision to the subtraction 0.5 - p.

    Raises:
        DomainError: p is NaN or outside [0, 1].
    """
    arr = _as_probability(p)
    q = 1.0 - arr  # exact for p >= 0.5
    with np.errstate(divide="ignore", invalid="ignore"):
        low = np.where(arr < SMALL_P, 1.0 / (arr * np.pi), 1.0 / np.tan(arr * np.pi))
        mid = np.tan((0.5 - arr) * np.pi)
        high = np.where(q < SMALL_P, -1.0 / (q * np.pi), -1.0 / np.tan(q * np.pi))
    out = np.select([arr < 0.25, arr <= 0.75], [low, mid], default=high)
    return _shaped_like(out, p)


def cauchy_survival(t: ArrayLike) -> FloatOrArray:
    """Standard Cauchy upper tail 0.5 - arctan(t)/pi.

    For |t| > 1 the tail is taken as arctan(1/|t|)/pi, which avoids cancellation
    against 0.5; beyond LARGE_T it is 1/(t pi). +inf gives 0 and -inf gives 1.

    Raises:
        DomainError: t is NaN.
    """
    arr = _as_float_array(t, "t")
    with np.errstate(divide="ignore"):
        inv = 1.0 / np.abs(arr)
        far = np.where(np.abs(arr) > LARGE_T, inv / np.pi, np.arctan(inv) / np.pi)
    centre = 0.5 - np.arctan(arr) / np.pi
    out = np.select([arr > 1.0, arr < -1.0], [far, 1.0 - far], default=centre)
    return _shaped_like(out, t)


def normal_cdf(x: ArrayLike) -> FloatOrArray:
    """Standard normal CDF (erf based, ~1e-16 absolute error)."""
    arr = _as_float_array(x, "x")
    return _shaped_like(special.ndtr(arr), x)


def h_transform(x: ArrayLike) -> FloatOrArray:
    """tan([2 Phi(|x|) - 3/2] pi): the Cauchy score of the two-sided p-value of z-score x.

    h(0) is -inf.
    """
    arr = _as_float_array(x, "x")
    two_sided = 2.0 * special.ndtr(-np.abs(arr))
    return _shaped_like(np.asarray(cauchy_transform(two_sided)), x)


def f_transform(x: ArrayLike) -> FloatOrArray:
    """h truncated at zero: h(x) where h(x) > 0, otherwise 0."""
    h = np.asarray(h_transform(x))
    return _shaped_like(np.where(h > 0.0, h, 0.0), x)


def _check_df(df: int, *, even: bool = False) -> int:
    if isinstance(df, bool) or not isinstance(df, (int, np.integer)) or df < 1:
        raise DomainError(f"degrees of freedom must be a positive integer, got {df!r}")
    if even and (df < 2 or df % 2):
        raise DomainError(f"degrees of freedom must be even and >= 2, got {df}")
    return int(df)


def student_t_sf(t: ArrayLike, df: int) -> FloatOrArray:
    """P(T_df > t) via the regularized incomplete beta function.

    Raises:
        DomainError: df < 1 or t NaN.
    """
    df = _check_df(df)
    arr = _as_float_array(t, "t")
    with np.errstate(over="ignore"):
        x = df / (df + arr * arr)
    tail = 0.5 * special.betainc(0.5 * df, 0.5, x)
    return _shaped_like(np.where(arr > 0.0, tail, 1.0 - tail), t)


def chisq_even_sf(x: ArrayLike, df: int) -> FloatOrArray:
    """Chi-square survival for even df: exp(-x/2) * sum_{k < df/2} (x/2)^k / k!.

    In the upper tail (x >= df) the finite sum is accumulated in log space, which
    keeps df up to several hundred free of overflow. Below that the value is at
    least about one half and is taken as the complement of the regularized lower
    incomplete gamma function, so it stays nonincreasing in x to the last bit.

    Raises:
        DomainError: df odd or < 2, or x negative or NaN.
    """
    df = _check_df(df, even=True)
    arr = _as_float_array(x, "x")
    if (arr < 0.0).any():
        raise DomainError("x must be nonnegative")
    half, shape = arr / 2.0, df / 2.0
    bulk = half < shape
    k = np.arange(df // 2, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        log_terms = special.xlogy(k, half[..., None]) - special.gammaln(k + 1.0)
        log_sf = special.logsumexp(log_terms, axis=-1) - half
        tail = np.where(np.isinf(arr), 0.0, np.minimum(np.exp(log_sf), 1.0))
    lower = special.gammainc(shape, np.where(bulk, half, 0.0))
    out = np.where(bulk, 1.0 - lower, tail)
    return _shaped_like(out, x)


class RngStream:
    """Single-owner random stream identified by (seed, stream_id).

    Backed by the counter-based Philox generator keyed with the 128-bit value
    seed:stream_id, so distinct stream ids give independent sequences and an
    identical pair reproduces the same draws bit for bit. A stream must not be
    advanced from two workers; parallel code derives its own with derive().
    """

    def __init__(self, seed: int, stream_id: int = 0) -> None:
        for name, value in (("seed", seed), ("stream_id", stream_id)):
            if not 0 <= int(value) <= _UINT64_MAX:
                raise DomainError(f"{name} must be a 64-bit unsigned integer, got {value}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self.generator = np.random.Generator(np.random.Philox(key=(self.seed << 64) | self.stream_id))

    def derive(self, stream_id: int) -> "RngStream":
        """Fresh stream under the same seed."""
        return RngStream(self.seed, stream_id)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def sample_exchangeable_normal(
    rng: RngStream, d: int, rho: float, size: Optional[int] = None
) -> np.ndarray:
    """Draw d standard normals with every pairwise correlation equal to rho.

    Uses the single-factor construction X_i = sqrt(rho) Z_0 + sqrt(1 - rho) Z_i.
    With size given, returns a (size, d) matrix of independent rows.

    Raises:
        DomainError: rho outside [0, 1] or d < 1.
    """
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [0, 1], got {rho}")
    if d < 1:
        raise DomainError(f"d must be at least 1, got {d}")
    shape: Tuple[int, ...] = (d,) if size is None else (size, d)
    common = rng.generator.standard_normal(shape[:-1] + (1,))
    own = rng.generator.standard_normal(shape)
    return np.sqrt(rho) * common + np.sqrt(1.0 - rho) * own


def sample_beta(
    rng: RngStream,
    alpha: ArrayLike,
    beta: ArrayLike,
    size: Optional[Union[int, Tuple[int, ...]]] = None,
) -> FloatOrArray:
    """Beta(alpha, beta) draws; shapes broadcast against size like numpy's sampler.

    Raises:
        DomainError: a shape parameter is not positive.
    """
    a = _as_float_array(alpha, "alpha")
    b = _as_float_array(beta, "beta")
    if (a <= 0.0).any() or (b <= 0.0).any():
        raise DomainError("Beta shape parameters must be positive")
    draws = rng.generator.beta(a, b, size=size)
    return float(draws) if np.ndim(draws) == 0 else draws
