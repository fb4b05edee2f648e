import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import pandas as pd

from .base import BadLambdaError, DOutOfRangeError, NetDescError, NTooLargeError
from .descriptors import Lambda, as_lambda

__names__ = [
    "BoundSet",
    "StationaryPoints",
    "broom_transmission_f",
    "table1_bounds",
    "stationary_points",
    "f_prime",
    "cycle_bound",
    "cycle_bound_closed_form",
    "t_n_lemma_min",
    "t_n_exhaustive_min",
]

logger = logging.getLogger(__name__)

LEMMA_EXHAUSTIVE_MAX_N = 15
SCAN_RTOL = 1e-12  # D-scan values this close are ties

# (n-1)λ cells, defined only for λ < 1/2
GATED_CELLS = (("mt", "upper"), ("mc", "upper"))

HALF_LAMBDA_NOTE = (
    "Upper bounds (n-1)λ for mt and mc hold only for λ < 1/2; "
    "they do not hold in general case."
)


#####################
# Geometric sums    #
#####################


def geometric_sum(D: int, lam: float, direct: bool = False) -> float:
    r"""
    $$ \sum_{i=1}^{D} \lambda^i = \frac{\lambda (1 - \lambda^D)}{1 - \lambda} $$

    Empty (D <= 0) sums are 0.
    """
    if D <= 0:
        return 0.0
    if direct:
        return float(sum(lam**i for i in range(1, D + 1)))
    return lam * (1 - lam**D) / (1 - lam)


def weighted_geometric_sum(D: int, lam: float, direct: bool = False) -> float:
    r"""
    $$ \sum_{i=1}^{D} i \lambda^i = \frac{\lambda \left[1 - (D+1)\lambda^D + D\lambda^{D+1}\right]}{(\lambda - 1)^2} $$
    """
    if D <= 0:
        return 0.0
    if direct:
        return float(sum(i * lam**i for i in range(1, D + 1)))
    return lam * (1 - (D + 1) * lam**D + D * lam ** (D + 1)) / (lam - 1) ** 2


def broom_transmission_f(
    n: int,
    D: Union[int, float],
    lam: Union[float, Lambda],
    direct: bool = False,
    continuous: bool = False,
) -> float:
    r"""
    Transmission of the starting vertex of a broom.

    $$ f(D) = \sum_{i=1}^{D} i \lambda^i + (n - D - 1) D \lambda^D $$

    evaluated in closed form

    $$ f(D) = \frac{\lambda \left[1 - (D+1)\lambda^D + D\lambda^{D+1}\right]}{(\lambda - 1)^2} + (n - D - 1) D \lambda^D $$

    Parameters
    ----------
    n : int
    D : int
        1 <= D <= n - 1.
    lam : float or Lambda
    direct : bool
        Sum term by term instead. Default is False.
    continuous : bool
        Evaluate the closed form at any real D, without range checks.

    Raises
    ------
    DOutOfRangeError
    """
    lam = as_lambda(lam).value
    if continuous:
        return lam * (1 - (D + 1) * lam**D + D * lam ** (D + 1)) / (
            lam - 1
        ) ** 2 + (n - D - 1) * D * lam**D
    if int(D) != D or not 1 <= D <= n - 1:
        raise DOutOfRangeError(f"D must lie in 1..{n - 1}, got {D!r}.")
    D = int(D)
    return weighted_geometric_sum(D, lam, direct) + (n - D - 1) * D * lam**D


def _networkness_term(n: int, D: int, lam: float, direct: bool = False) -> float:
    """Networkness of the starting vertex of broom(n, D), D >= 2; 1 at D = 1."""
    num = lam**D + geometric_sum(D - 1, lam, direct) / (n - D)
    den = D * lam**D + weighted_geometric_sum(D - 1, lam, direct) / (n - D)
    return num / den


def _surplus_term(n: int, D: int, lam: float, direct: bool = False) -> float:
    """Surplus of the starting vertex of broom(n, D), D >= 2; 0 at D = 1."""
    return (
        geometric_sum(D, lam, direct)
        - weighted_geometric_sum(D, lam, direct)
        + (n - D - 1) * (lam**D - D * lam**D)
    )


##########################
# Stationary points      #
##########################


def _quadratic(n: int, lam: float) -> Tuple[float, float, float]:
    L = math.log(lam)
    q = (lam - 1) ** 2
    A = -L * q
    B = -2 * q + L * (lam - 1 + n * q)
    C = n * q + lam - 1 - lam * L
    return A, B, C


def f_prime(n: int, D: float, lam: Union[float, Lambda]) -> float:
    r"""
    Derivative of the continuous broom transmission $f(D)$.

    $$ f'(D) = \frac{\lambda^D}{(\lambda - 1)^2} \left(A D^2 + B D + C\right) $$

    with, writing $L = \ln \lambda$,

    $$ A = -L (1 - \lambda)^2 $$
    $$ B = -2(\lambda - 1)^2 + L\left[\lambda - 1 + n(\lambda - 1)^2\right] $$
    $$ C = n(\lambda - 1)^2 + \lambda - 1 - \lambda L $$
    """
    lam = as_lambda(lam).value
    A, B, C = _quadratic(n, lam)
    return lam**D / (lam - 1) ** 2 * (A * D**2 + B * D + C)


@dataclass(frozen=True)
class StationaryPoints:
    n: int
    lam: Lambda
    S_lambda: float  # discriminant
    D1: Optional[float] = None  # local minimum of f
    D2: Optional[float] = None  # local maximum of f

    def min_candidates(self) -> List[int]:
        return _candidates(self.n, self.D1)

    def max_candidates(self) -> List[int]:
        return _candidates(self.n, self.D2)


def _candidates(n: int, D: Optional[float]) -> List[int]:
    cands = {1, n - 1}
    if D is not None and 1 <= D <= n - 1:
        cands.update({math.floor(D), math.ceil(D)})
    return sorted(c for c in cands if 1 <= c <= n - 1)


def stationary_points(n: int, lam: Union[float, Lambda]) -> StationaryPoints:
    r"""
    Stationary points of the continuous broom transmission $f(D)$.

    $$ S_\lambda = 4(\lambda - 1)^2 + \left[(n-1)^2 + \lambda^2 n^2 - 2\lambda(n^2 - n + 2)\right] (\ln \lambda)^2 $$

    $$ D_{1,2} = \frac{2 - 2\lambda + \left[1 + (\lambda - 1) n\right] \ln\lambda \pm \sqrt{S_\lambda}}{2 (\lambda - 1) \ln\lambda} $$

    $D_1$ (with $+$) is the local minimum, $D_2$ the local maximum. When
    $S_\lambda < 0$, $f$ is increasing and both are absent.

    Notes
    -----
    The squared logarithm is $(\ln \lambda)^2$, not $\ln(\lambda^2)$; only
    this reading makes $f'(D_1) = 0$.
    """
    lam = as_lambda(lam)
    x = lam.value
    L = math.log(x)
    S = 4 * (x - 1) ** 2 + (
        (n - 1) ** 2 + x**2 * n**2 - 2 * x * (n**2 - n + 2)
    ) * L**2

    if S < 0:
        return StationaryPoints(n=n, lam=lam, S_lambda=S)

    head = 2 - 2 * x + (1 + (x - 1) * n) * L
    den = 2 * (x - 1) * L
    root = math.sqrt(S)
    return StationaryPoints(
        n=n, lam=lam, S_lambda=S, D1=(head + root) / den, D2=(head - root) / den
    )


##########
# Cycles #
##########


def cycle_bound(n: int, lam: Union[float, Lambda]) -> float:
    r"""
    Transmission of any vertex of the cycle $C_n$.

    $$ 2 \sum_{i=1}^{(n-1)/2} i \lambda^i \quad (n \text{ odd}), \qquad
       2 \sum_{i=1}^{(n-2)/2} i \lambda^i + \frac{n}{2} \lambda^{n/2} \quad (n \text{ even}) $$

    For $\lambda < 1/2$ this is the least possible maximum transmission of
    a 2-connected graph on n vertices.
    """
    if n < 3:
        raise NetDescError(f"Cycles need n >= 3, got {n}.")
    x = as_lambda(lam).value
    if n % 2:
        return 2 * sum(i * x**i for i in range(1, (n - 1) // 2 + 1))
    return 2 * sum(i * x**i for i in range(1, (n - 2) // 2 + 1)) + n // 2 * x ** (n // 2)


def cycle_bound_closed_form(
    n: int, lam: Union[float, Lambda], printed: bool = False
) -> float:
    r"""
    Closed form of `cycle_bound()`.

    Odd n:

    $$ \frac{\sqrt{\lambda}\left[2\sqrt{\lambda} + (n-1)\lambda^{1+n/2} - (n+1)\lambda^{n/2}\right]}{(\lambda-1)^2} $$

    Even n:

    $$ \frac{2\lambda - n\lambda^{n/2} + (n-2)\lambda^{n/2+1}}{(\lambda-1)^2} + \frac{n}{2}\lambda^{n/2} $$

    Parameters
    ----------
    printed : bool
        For even n, reuse the odd expression plus $\frac{n}{2}\lambda^{n/2}$,
        as it is usually printed. That variant does not match the sum and
        is kept only for comparison.
    """
    if n < 3:
        raise NetDescError(f"Cycles need n >= 3, got {n}.")
    x = as_lambda(lam).value
    q = (x - 1) ** 2
    odd = (
        math.sqrt(x)
        * (2 * math.sqrt(x) + (n - 1) * x ** (1 + n / 2) - (n + 1) * x ** (n / 2))
        / q
    )
    if n % 2:
        return odd
    if printed:
        return n / 2 * x ** (n / 2) + odd
    return (2 * x - n * x ** (n / 2) + (n - 2) * x ** (n / 2 + 1)) / q + n / 2 * x ** (
        n / 2
    )


def _lemma_value(seq: Tuple[int, ...], lam: float) -> float:
    return float(sum(x * i * lam**i for i, x in enumerate(seq, start=1)))


def t_n_lemma_min(n: int, lam: Union[float, Lambda]) -> Tuple[Tuple[int, ...], float]:
    r"""
    Least value of the layer sum

    $$ T_n(x_1, \dots, x_{\lfloor n/2 \rfloor}) = \sum_{i=1}^{\lfloor n/2 \rfloor} x_i \, i \, \lambda^i $$

    over layer profiles of 2-connected graphs, for $\lambda < 1/2$. The
    minimiser is $(2, \dots, 2)$ for odd n and $(2, \dots, 2, 1)$ for
    even n.

    Returns
    -------
    sequence : tuple of int
    value : float

    Raises
    ------
    BadLambdaError
        If $\lambda \geq 1/2$.
    """
    if n < 3:
        raise NetDescError(f"n must be >= 3, got {n}.")
    x = as_lambda(lam).value
    if x >= 0.5:
        raise BadLambdaError(f"The layer-sum minimiser needs λ < 1/2, got {x}.")
    if n % 2:
        seq = (2,) * ((n - 1) // 2)
    else:
        seq = (2,) * ((n - 2) // 2) + (1,)
    return seq, _lemma_value(seq, x)


def lemma_sequences(n: int) -> Iterator[Tuple[int, ...]]:
    """
    Layer profiles admissible for a 2-connected graph seen from one vertex.

    Length floor(n/2), sum n - 1, and for some k: x_i >= 2 for i < k,
    x_k >= 1, zeros after k.
    """
    length = n // 2
    total = n - 1

    def rec(prefix: Tuple[int, ...], remaining: int) -> Iterator[Tuple[int, ...]]:
        pos = len(prefix)
        # close the profile here: last non-zero layer may hold 1 vertex
        if remaining >= 1 and pos < length:
            yield prefix + (remaining,) + (0,) * (length - pos - 1)
        if pos + 1 < length:
            for x in range(2, remaining):
                yield from rec(prefix + (x,), remaining - x)

    yield from rec((), total)


def t_n_exhaustive_min(
    n: int, lam: Union[float, Lambda]
) -> Tuple[Tuple[int, ...], float]:
    """Minimise the layer sum by listing every admissible profile (n <= 15)."""
    if n > LEMMA_EXHAUSTIVE_MAX_N:
        raise NTooLargeError(
            f"Exhaustive profile search is capped at n={LEMMA_EXHAUSTIVE_MAX_N}."
        )
    x = as_lambda(lam).value
    best = None
    for seq in lemma_sequences(n):
        value = _lemma_value(seq, x)
        if best is None or value < best[1]:
            best = (tuple(v for v in seq if v), value)
    return best


###############
# Bound table #
###############


@dataclass(frozen=True)
class BoundSet:
    r"""
    Extremal values of the four descriptors over connected graphs on `n`
    vertices.

    Attributes
    ----------
    mt_lower, Mt_upper : float
        $A_n$ and $B_n$, the minimum and maximum over D of the broom
        transmission $f(D)$.
    mc_lower : float
        $\sum_{i=1}^{n-1} \lambda^i$, the end vertex of the path.
    Mc_upper, MN_upper, Mnu_upper : float
        Star centre: $(n-1)[\lambda + (n-2)\lambda^2]$, $(n-2)\lambda + 1$
        and $(n-1)(n-2)\lambda^2$.
    mN_lower, mnu_lower : float
        $C_n$ and $D_n$, minima over D of the networkness and surplus of
        the broom's starting vertex.
    mt_upper_halflambda, mc_upper_halflambda : float or None
        $(n-1)\lambda$, defined only for $\lambda < 1/2$.
    cycle_conjecture_value : float or None
        `cycle_bound(n, lam)`, None for n < 3.
    witness_D : dict
        D attaining each of mt_lower, Mt_upper, mN_lower, mnu_lower. Values
        within SCAN_RTOL tie; mt_lower and Mt_upper ties go to a
        stationary-point candidate, the others to the smallest D.
    shortcut_agrees : bool
        Whether restricting D to {1, n-1, floor(D_i), ceil(D_i)} gives the
        same $A_n$ and $B_n$ as the full scan.
    printed : dict
        Printed variants not adopted here: the mc lower bound
        $(\lambda^{n-1} - \lambda)/(\lambda - 1)$ and the star centre values
        with a halved second term.
    """

    n: int
    lam: Lambda
    mt_lower: float
    Mt_upper: float
    mc_lower: float
    Mc_upper: float
    mN_lower: float
    MN_upper: float
    mnu_lower: float
    Mnu_upper: float
    mt_upper_halflambda: Optional[float] = None
    mc_upper_halflambda: Optional[float] = None
    cycle_conjecture_value: Optional[float] = None
    witness_D: Dict[str, int] = field(default_factory=dict)
    shortcut_agrees: bool = True
    printed: Dict[str, float] = field(default_factory=dict)
    notes: Tuple[str, ...] = ()

    # Mt and Mc have no known lower bound
    Mt_lower = None
    Mc_lower = None

    def cells(self) -> Dict[Tuple[str, str], Optional[float]]:
        """Every (aggregate, side) cell, None where no bound is known."""
        return {
            ("mt", "lower"): self.mt_lower,
            ("mt", "upper"): self.mt_upper_halflambda,
            ("Mt", "lower"): None,
            ("Mt", "upper"): self.Mt_upper,
            ("mc", "lower"): self.mc_lower,
            ("mc", "upper"): self.mc_upper_halflambda,
            ("Mc", "lower"): None,
            ("Mc", "upper"): self.Mc_upper,
            ("mN", "lower"): self.mN_lower,
            ("mN", "upper"): 1.0,
            ("MN", "lower"): 1.0,
            ("MN", "upper"): self.MN_upper,
            ("mnu", "lower"): self.mnu_lower,
            ("mnu", "upper"): 0.0,
            ("Mnu", "lower"): 0.0,
            ("Mnu", "upper"): self.Mnu_upper,
        }

    def table(self) -> pd.DataFrame:
        rows = {}
        for (name, side), value in self.cells().items():
            rows.setdefault(name, {})[side] = value
        df = pd.DataFrame.from_dict(rows, orient="index", columns=["lower", "upper"])
        df.index.name = "aggregate"
        return df

    def labels(self) -> pd.DataFrame:
        """
        `table()` as text: numbers to 6 decimals, "open" where no bound is
        known and "n/a" for the (n-1)λ cells when λ >= 1/2.
        """
        rows = {}
        for (name, side), value in self.cells().items():
            if value is not None:
                label = f"{value:.6f}"
            elif (name, side) in GATED_CELLS:
                label = "n/a"
            else:
                label = "open"
            rows.setdefault(name, {})[side] = label
        df = pd.DataFrame.from_dict(rows, orient="index", columns=["lower", "upper"])
        df.index.name = "aggregate"
        return df

    def to_dict(self) -> dict:
        """Scalar fields; the (n-1)λ bounds are left out for λ >= 1/2."""
        out = {
            "n": self.n,
            "lambda": self.lam.value,
            "mt_lower": self.mt_lower,
            "Mt_upper": self.Mt_upper,
            "mc_lower": self.mc_lower,
            "Mc_upper": self.Mc_upper,
            "mN_lower": self.mN_lower,
            "MN_upper": self.MN_upper,
            "mnu_lower": self.mnu_lower,
            "Mnu_upper": self.Mnu_upper,
            "Mt_lower": None,
            "Mc_lower": None,
            "cycle_conjecture_value": self.cycle_conjecture_value,
            "witness_D": dict(self.witness_D),
            "shortcut_agrees": self.shortcut_agrees,
            "printed": dict(self.printed),
            "notes": list(self.notes),
        }
        if self.mt_upper_halflambda is not None:
            out["mt_upper_halflambda"] = self.mt_upper_halflambda
            out["mc_upper_halflambda"] = self.mc_upper_halflambda
        return out

    def __repr__(self):
        docs = "Extremal Bounds\n"
        docs += "===============\n\n"
        docs += f"  n: {self.n}\n"
        docs += f"  λ: {self.lam.value}\n\n"
        docs += self.labels().to_string()
        docs += "\n"
        if self.cycle_conjecture_value is not None:
            docs += f"\n  Cycle value: {self.cycle_conjecture_value:.6f}\n"
        docs += f"  Witness D: {self.witness_D}\n"
        for note in self.notes:
            docs += f"\n  Note: {note}\n"
        return docs

    def summary(self):
        return self.__repr__()


def _scan(
    values: Dict[int, float], kind: str, prefer: Sequence[int] = ()
) -> Tuple[float, int]:
    """
    Extremum over D. Values within SCAN_RTOL of the extremum tie; a tie
    goes to the smallest D in `prefer`, else to the smallest D.
    """
    pick = min if kind == "min" else max
    best = pick(values.values())
    tied = sorted(
        D for D, v in values.items() if math.isclose(v, best, rel_tol=SCAN_RTOL)
    )
    D = next((D for D in tied if D in prefer), tied[0])
    return values[D], D


def table1_bounds(
    n: int, lam: Union[float, Lambda], verbose: bool = False
) -> BoundSet:
    r"""
    Closed-form extremal values of the descriptors over connected graphs.

    $$ A_n = \min_{1 \leq D \leq n-1} f(D), \qquad B_n = \max_{1 \leq D \leq n-1} f(D) $$

    $$ C_n = \min_{1 \leq D \leq n-1} \frac{\lambda^D + \frac{1}{n-D}\sum_{i=1}^{D-1}\lambda^i}{D\lambda^D + \frac{1}{n-D}\sum_{i=1}^{D-1} i\lambda^i} $$

    $$ D_n = \min_{1 \leq D \leq n-1} \sum_{i=1}^{D}(\lambda^i - i\lambda^i) + (n-D-1)(\lambda^D - D\lambda^D) $$

    Every extremum over D is a full scan of 1..n-1; the stationary-point
    shortcut is only compared against it.

    Parameters
    ----------
    n : int
        At least 2.
    lam : float or Lambda
    verbose : bool
        Print the table.

    Returns
    -------
    BoundSet
    """
    if int(n) != n or n < 2:
        raise NetDescError(f"n must be an integer >= 2, got {n!r}.")
    n = int(n)
    lam = as_lambda(lam)
    x = lam.value
    Ds = range(1, n)

    sp = stationary_points(n, lam)
    min_cands, max_cands = sp.min_candidates(), sp.max_candidates()

    f = {D: broom_transmission_f(n, D, lam) for D in Ds}
    A_n, D_A = _scan(f, "min", prefer=min_cands)
    B_n, D_B = _scan(f, "max", prefer=max_cands)
    C_n, D_C = _scan({D: _networkness_term(n, D, x) for D in Ds}, "min")
    D_n, D_D = _scan({D: _surplus_term(n, D, x) for D in Ds}, "min")

    shortcut_agrees = (
        D_A in min_cands
        and D_B in max_cands
        and math.isclose(min(f[D] for D in min_cands), A_n, rel_tol=SCAN_RTOL)
        and math.isclose(max(f[D] for D in max_cands), B_n, rel_tol=SCAN_RTOL)
    )
    if not shortcut_agrees:
        logger.warning("stationary-point shortcut disagrees with scan at n=%d, λ=%r", n, x)

    half = (n - 1) * x if x < 0.5 else None
    notes = () if x < 0.5 else (HALF_LAMBDA_NOTE,)

    bounds = BoundSet(
        n=n,
        lam=lam,
        mt_lower=A_n,
        Mt_upper=B_n,
        mc_lower=geometric_sum(n - 1, x),
        Mc_upper=(n - 1) * (x + (n - 2) * x**2),
        mN_lower=C_n,
        MN_upper=(n - 2) * x + 1,
        mnu_lower=D_n,
        Mnu_upper=(n - 1) * (n - 2) * x**2,
        mt_upper_halflambda=half,
        mc_upper_halflambda=half,
        cycle_conjecture_value=cycle_bound(n, lam) if n >= 3 else None,
        witness_D={"mt_lower": D_A, "Mt_upper": D_B, "mN_lower": D_C, "mnu_lower": D_D},
        shortcut_agrees=shortcut_agrees,
        printed={
            "mc_lower": (x ** (n - 1) - x) / (x - 1),
            "Mc_upper": (n - 1) * (x + 0.5 * (n - 2) * x**2),
            "MN_upper": 0.5 * (n - 2) * x + 1,
            "Mnu_upper": 0.5 * (n - 1) * (n - 2) * x**2,
        },
        notes=notes,
    )

    if verbose:
        print(bounds.summary())

    return bounds

