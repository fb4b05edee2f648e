import logging
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
import pandas as pd

from .base import (
    GivenUpAfterRetriesError,
    Graph,
    NetDescError,
    NTooLargeError,
    upper_pairs,
)
from .bounds import BoundSet, cycle_bound, table1_bounds
from .descriptors import (
    BALANCE_RTOL,
    Lambda,
    _accumulate,
    as_lambda,
    compute,
)
from .generators import broom, complete, cycle, path, star
from .utils import default_seed

__names__ = [
    "GraphCode",
    "VerificationReport",
    "enumerate_connected",
    "verify_claims",
    "probe_conjecture",
    "probe_open_problems",
    "random_connected",
    "articulation_points",
    "is_biconnected",
]

logger = logging.getLogger(__name__)

ENUMERATION_MAX_N = 7
ENUMERATION_HARD_MAX_N = 8
ATTAIN_ATOL = 1e-9
PROGRESS_EVERY = 2**16

VERIFIED = "verified"
VIOLATED = "violated"
NOT_APPLICABLE = "not-applicable"


################
# Graph codes  #
################


def _masks(n: int, bits: int) -> List[int]:
    """Neighbour bitmask of every vertex."""
    masks = [0] * n
    for k, (i, j) in enumerate(upper_pairs(n)):
        if bits >> k & 1:
            masks[i] |= 1 << j
            masks[j] |= 1 << i
    return masks


def _flood_connected(masks: Sequence[int]) -> bool:
    n = len(masks)
    seen = frontier = 1
    while frontier:
        v = (frontier & -frontier).bit_length() - 1
        frontier &= frontier - 1
        new = masks[v] & ~seen
        seen |= new
        frontier |= new
    return seen == (1 << n) - 1


@dataclass(frozen=True)
class GraphCode:
    """
    Graph on n vertices packed into the bits of its upper adjacency
    triangle: bit k is set when the k-th pair of `upper_pairs(n)` is an
    edge.
    """

    n: int
    bits: int

    @classmethod
    def from_graph(cls, g: Graph) -> "GraphCode":
        return cls(n=g.n, bits=g.code)

    def edges(self) -> List[Tuple[int, int]]:
        return [e for k, e in enumerate(upper_pairs(self.n)) if self.bits >> k & 1]

    def is_connected(self) -> bool:
        if bin(self.bits).count("1") < self.n - 1:
            return False
        return _flood_connected(_masks(self.n, self.bits))

    def decode(self) -> Graph:
        """The encoded graph; connectedness must be checked beforehand."""
        return Graph.from_edges(self.n, self.edges())


def _check_n(n: int, allow_large: bool):
    if n < 2:
        raise NetDescError(f"Enumeration needs n >= 2, got {n}.")
    cap = ENUMERATION_HARD_MAX_N if allow_large else ENUMERATION_MAX_N
    if n > cap:
        hint = "" if allow_large or n > ENUMERATION_HARD_MAX_N else " (pass allow_large)"
        raise NTooLargeError(f"Exhaustive enumeration is capped at n={cap}{hint}, got {n}.")


def _connected_codes(n: int, start: int, stop: int) -> Iterator[int]:
    for bits in range(start, stop):
        if bin(bits).count("1") < n - 1:
            continue
        if _flood_connected(_masks(n, bits)):
            yield bits
        if n >= 7 and bits and bits % PROGRESS_EVERY == 0:
            logger.info("n=%d: code %d of %d", n, bits, 1 << len(upper_pairs(n)))


def enumerate_connected(
    n: int,
    allow_large: bool = False,
) -> Iterator[Graph]:
    """
    Every labeled connected simple graph on n vertices, once each, in
    increasing code order.

    No isomorphism reduction is done; all descriptors checked downstream
    are invariant under relabelling.

    Parameters
    ----------
    n : int
        2 <= n <= 7, or 8 with `allow_large`.
    allow_large : bool
        Allow n = 8 (2**28 codes).

    Raises
    ------
    NTooLargeError
    """
    _check_n(n, allow_large)
    for bits in _connected_codes(n, 0, 1 << len(upper_pairs(n))):
        yield GraphCode(n, bits).decode()


###################
# Biconnectivity  #
###################


def articulation_points(g: Graph) -> Set[int]:
    """Cut vertices of a connected graph, by DFS low-link.

    The DFS keeps an explicit stack of neighbour iterators, so long paths
    do not hit the recursion limit.
    """
    disc = [-1] * g.n
    low = [0] * g.n
    parent = [-1] * g.n
    ap = set()

    disc[0] = low[0] = 0
    time = 1
    root_children = 0
    stack = [(0, iter(g.adjacency[0]))]
    while stack:
        u, neighbours = stack[-1]
        for v in neighbours:
            if disc[v] < 0:
                parent[v] = u
                disc[v] = low[v] = time
                time += 1
                if u == 0:
                    root_children += 1
                stack.append((v, iter(g.adjacency[v])))
                break
            if v != parent[u]:
                low[u] = min(low[u], disc[v])
        else:
            # u is finished
            stack.pop()
            p = parent[u]
            if p >= 0:
                low[p] = min(low[p], low[u])
                if p != 0 and low[u] >= disc[p]:
                    ap.add(p)

    if root_children > 1:
        ap.add(0)
    return ap


def is_biconnected(g: Graph) -> bool:
    """Connected, at least 3 vertices, and no cut vertex."""
    return g.n >= 3 and not articulation_points(g)


###########################
# Exhaustive scan         #
###########################


def _aggregate_values(g: Graph, lam: float) -> Tuple[Dict[str, float], float]:
    """Eight aggregates and the relative balance gap, without building tables."""
    t, _, b = _accumulate(g.adjacency, g.edges, lam, range(g.n))
    b = b / 2.0
    c = np.zeros(g.n)
    for (u, v), x in zip(g.edges, b):
        c[u] += x
        c[v] += x
    N = c / t
    nu = c - t
    values = {
        "mt": t.min(),
        "Mt": t.max(),
        "mc": c.min(),
        "Mc": c.max(),
        "mN": N.min(),
        "MN": N.max(),
        "mnu": nu.min(),
        "Mnu": nu.max(),
    }
    sum_t, sum_c = t.sum(), c.sum()
    gap = abs(sum_t - sum_c) / max(sum_t, 1.0)
    return {k: float(v) for k, v in values.items()}, float(gap)


@dataclass
class _Extreme:
    value: float
    code: int

    def better(self, value: float, code: int, kind: str) -> bool:
        if kind == "min":
            return value < self.value or (value == self.value and code < self.code)
        return value > self.value or (value == self.value and code < self.code)


@dataclass
class PartialScan:
    """
    Extremes over a range of graph codes. Partial scans of disjoint ranges
    merge associatively; ties keep the smaller code.
    """

    n: int
    graphs: int = 0
    lows: Dict[str, _Extreme] = field(default_factory=dict)
    highs: Dict[str, _Extreme] = field(default_factory=dict)
    worst_gap: Optional[_Extreme] = None
    biconnected: int = 0
    biconnected_Mt: Optional[_Extreme] = None

    def add(self, code: int, values: Dict[str, float], gap: float):
        self.graphs += 1
        for name, value in values.items():
            lo = self.lows.get(name)
            if lo is None or lo.better(value, code, "min"):
                self.lows[name] = _Extreme(value, code)
            hi = self.highs.get(name)
            if hi is None or hi.better(value, code, "max"):
                self.highs[name] = _Extreme(value, code)
        if self.worst_gap is None or self.worst_gap.better(gap, code, "max"):
            self.worst_gap = _Extreme(gap, code)

    def add_biconnected(self, code: int, Mt: float):
        self.biconnected += 1
        if self.biconnected_Mt is None or self.biconnected_Mt.better(Mt, code, "min"):
            self.biconnected_Mt = _Extreme(Mt, code)

    def merge(self, other: "PartialScan") -> "PartialScan":
        out = PartialScan(
            n=self.n,
            graphs=self.graphs + other.graphs,
            lows=dict(self.lows),
            highs=dict(self.highs),
            worst_gap=self.worst_gap,
            biconnected=self.biconnected + other.biconnected,
            biconnected_Mt=self.biconnected_Mt,
        )
        for name, e in other.lows.items():
            if name not in out.lows or out.lows[name].better(e.value, e.code, "min"):
                out.lows[name] = e
        for name, e in other.highs.items():
            if name not in out.highs or out.highs[name].better(e.value, e.code, "max"):
                out.highs[name] = e
        if other.worst_gap is not None and (
            out.worst_gap is None
            or out.worst_gap.better(other.worst_gap.value, other.worst_gap.code, "max")
        ):
            out.worst_gap = other.worst_gap
        if other.biconnected_Mt is not None and (
            out.biconnected_Mt is None
            or out.biconnected_Mt.better(
                other.biconnected_Mt.value, other.biconnected_Mt.code, "min"
            )
        ):
            out.biconnected_Mt = other.biconnected_Mt
        return out


def _scan_range(
    n: int, lam: float, start: int, stop: int, track_biconnected: bool
) -> PartialScan:
    scan = PartialScan(n=n)
    for bits in _connected_codes(n, start, stop):
        g = GraphCode(n, bits).decode()
        values, gap = _aggregate_values(g, lam)
        scan.add(bits, values, gap)
        if track_biconnected and is_biconnected(g):
            scan.add_biconnected(bits, values["Mt"])
    return scan


def scan_all(
    n: int,
    lam: Union[float, Lambda],
    jobs: int = 1,
    allow_large: bool = False,
    track_biconnected: bool = False,
) -> PartialScan:
    """Exhaustive scan of every connected graph on n vertices."""
    _check_n(n, allow_large)
    x = as_lambda(lam).value
    total = 1 << len(upper_pairs(n))
    logger.info("scanning %d codes for n=%d, λ=%r", total, n, x)

    if jobs <= 1:
        return _scan_range(n, x, 0, total, track_biconnected)

    n_chunks = jobs * 4
    bounds = [total * k // n_chunks for k in range(n_chunks + 1)]
    with Pool(processes=jobs) as pool:
        parts = pool.starmap(
            _scan_range,
            [(n, x, lo, hi, track_biconnected) for lo, hi in zip(bounds, bounds[1:])],
        )
    scan = parts[0]
    for part in parts[1:]:
        scan = scan.merge(part)
    return scan


###########
# Reports #
###########


@dataclass(frozen=True)
class Counterexample:
    claim_id: str
    n: int
    edges: Tuple[Tuple[int, int], ...]
    observed: float
    bound: float
    kind: str = "inequality"  # or "attainment"

    def to_dict(self) -> dict:
        return {
            "claim": self.claim_id,
            "n": self.n,
            "edges": [list(e) for e in self.edges],
            "observed": self.observed,
            "bound": self.bound,
            "kind": self.kind,
        }


@dataclass(frozen=True)
class ClaimResult:
    claim_id: str
    status: str
    bound: Optional[float] = None
    extremal_value: Optional[float] = None
    witness_code: Optional[int] = None
    witness_edges: Tuple[Tuple[int, int], ...] = ()
    family: Optional[str] = None
    family_value: Optional[float] = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "claim": self.claim_id,
            "status": self.status,
            "bound": self.bound,
            "extremal_value": self.extremal_value,
            "witness_code": self.witness_code,
            "witness_edges": [list(e) for e in self.witness_edges],
            "family": self.family,
            "family_value": self.family_value,
            "note": self.note,
        }


@dataclass(frozen=True)
class VerificationReport:
    n: int
    lam: Lambda
    mode: str
    graphs_checked: int
    claims: Tuple[ClaimResult, ...] = ()
    counterexamples: Tuple[Counterexample, ...] = ()
    extras: Dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.status != VIOLATED for c in self.claims)

    def claim(self, claim_id: str) -> ClaimResult:
        for c in self.claims:
            if c.claim_id == claim_id:
                return c
        raise KeyError(claim_id)

    def to_frame(self) -> pd.DataFrame:
        df = pd.DataFrame(
            [
                {k: v for k, v in c.to_dict().items() if k != "witness_edges"}
                for c in self.claims
            ],
            columns=[
                "claim",
                "status",
                "bound",
                "extremal_value",
                "witness_code",
                "family",
                "family_value",
                "note",
            ],
        )
        return df.set_index("claim")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "lambda": self.lam.value,
            "mode": self.mode,
            "graphs_checked": self.graphs_checked,
            "ok": self.ok,
            "claims": [c.to_dict() for c in self.claims],
            "counterexamples": [c.to_dict() for c in self.counterexamples],
            "extras": self.extras,
        }

    def __repr__(self):
        docs = "Verification Report\n"
        docs += "===================\n\n"
        docs += f"  Mode: {self.mode}\n"
        docs += f"  n: {self.n}\n"
        docs += f"  λ: {self.lam.value}\n"
        docs += f"  Graphs checked: {self.graphs_checked}\n"
        docs += f"  Result: {'all claims hold' if self.ok else 'VIOLATIONS FOUND'}\n\n"
        if self.claims:
            docs += self.to_frame()[["status", "bound", "extremal_value"]].to_string(
                na_rep="-", float_format=lambda x: f"{x:.9g}"
            )
            docs += "\n"
        for cx in self.counterexamples:
            docs += (
                f"\n  Counterexample to {cx.claim_id} ({cx.kind}): "
                f"observed {cx.observed!r}, bound {cx.bound!r}, edges {list(cx.edges)}\n"
            )
        for key, value in self.extras.items():
            if not isinstance(value, (list, dict)):
                docs += f"  {key}: {value}\n"
        return docs

    def summary(self):
        return self.__repr__()


# (aggregate, side, gated on λ < 1/2, family attaining the bound)
CLAIMS: Tuple[Tuple[str, str, bool, str], ...] = (
    ("mt", "lower", False, "broom_mt"),
    ("mt", "upper", True, "complete"),
    ("Mt", "upper", False, "broom_Mt"),
    ("mc", "lower", False, "path"),
    ("mc", "upper", True, "complete"),
    ("Mc", "upper", False, "star"),
    ("mN", "lower", False, "broom_mN"),
    ("mN", "upper", False, "complete"),
    ("MN", "lower", False, "complete"),
    ("MN", "upper", False, "star"),
    ("mnu", "lower", False, "broom_mnu"),
    ("mnu", "upper", False, "complete"),
    ("Mnu", "lower", False, "complete"),
    ("Mnu", "upper", False, "star"),
)


def _family_graph(family: str, bounds: BoundSet) -> Tuple[str, Graph]:
    n = bounds.n
    if family.startswith("broom_"):
        key = {
            "broom_mt": "mt_lower",
            "broom_Mt": "Mt_upper",
            "broom_mN": "mN_lower",
            "broom_mnu": "mnu_lower",
        }[family]
        D = bounds.witness_D[key]
        return f"broom(n={n},D={D})", broom(n, D)
    builder = {"complete": complete, "path": path, "star": star}[family]
    return f"{family}(n={n})", builder(n)


def _edges(n: int, code: int) -> Tuple[Tuple[int, int], ...]:
    return tuple(GraphCode(n, code).edges())


def _judge(
    claim_id: str,
    side: str,
    bound: float,
    extreme: _Extreme,
    family: str,
    family_value: float,
    n: int,
) -> Tuple[ClaimResult, List[Counterexample]]:
    observed = extreme.value
    if side == "lower":
        holds = observed >= bound - ATTAIN_ATOL
    else:
        holds = observed <= bound + ATTAIN_ATOL
    attained = abs(observed - bound) <= ATTAIN_ATOL
    family_ok = abs(family_value - bound) <= ATTAIN_ATOL

    counterexamples = []
    note = ""
    if not holds:
        counterexamples.append(
            Counterexample(claim_id, n, _edges(n, extreme.code), observed, bound)
        )
        logger.warning("%s violated: %r vs bound %r", claim_id, observed, bound)
    elif not (attained and family_ok):
        note = "bound holds but is not attained"
        counterexamples.append(
            Counterexample(
                claim_id, n, _edges(n, extreme.code), observed, bound, kind="attainment"
            )
        )
        logger.warning("%s not attained: best %r vs bound %r", claim_id, observed, bound)

    status = VERIFIED if holds and attained and family_ok else VIOLATED
    return (
        ClaimResult(
            claim_id=claim_id,
            status=status,
            bound=bound,
            extremal_value=observed,
            witness_code=extreme.code,
            witness_edges=_edges(n, extreme.code),
            family=family,
            family_value=family_value,
            note=note,
        ),
        counterexamples,
    )


def verify_claims(
    n: int,
    lam: Union[float, Lambda],
    jobs: int = 1,
    allow_large: bool = False,
    verbose: bool = False,
) -> VerificationReport:
    """
    Check every extremal bound against all connected graphs on n vertices.

    A bound is `verified` when no graph crosses it (tolerance 1e-9), the
    exhaustive extremum meets it, and its extremal family (broom, path,
    star or complete graph) attains it. The (n-1)λ upper bounds on mt and
    mc are `not-applicable` for λ >= 1/2. A final `balance` claim checks
    Σt = Σc on every graph.

    Parameters
    ----------
    n : int
        2 <= n <= 7 (8 with `allow_large`).
    lam : float or Lambda
    jobs : int
        Worker processes over disjoint code ranges.
    allow_large : bool
    verbose : bool
        Print the report.

    Returns
    -------
    VerificationReport
        Violations are reported, never raised.
    """
    lam = as_lambda(lam)
    bounds = table1_bounds(n, lam)
    scan = scan_all(n, lam, jobs=jobs, allow_large=allow_large)
    cells = bounds.cells()

    claims = []
    counterexamples = []
    family_cache: Dict[str, Tuple[str, Dict[str, float]]] = {}
    for name, side, gated, family in CLAIMS:
        claim_id = f"{name}_{side}"
        bound = cells[(name, side)]
        if gated and bound is None:
            claims.append(
                ClaimResult(
                    claim_id=claim_id,
                    status=NOT_APPLICABLE,
                    note="only stated for λ < 1/2",
                )
            )
            continue

        if family not in family_cache:
            label, g = _family_graph(family, bounds)
            family_cache[family] = (label, compute(g, lam)[1].values())
        label, fam_values = family_cache[family]

        extreme = scan.lows[name] if side == "lower" else scan.highs[name]
        result, cxs = _judge(
            claim_id, side, bound, extreme, label, fam_values[name], n
        )
        claims.append(result)
        counterexamples.extend(cxs)

    gap = scan.worst_gap
    if gap.value <= BALANCE_RTOL:
        claims.append(
            ClaimResult(
                claim_id="balance",
                status=VERIFIED,
                bound=BALANCE_RTOL,
                extremal_value=gap.value,
                witness_code=gap.code,
                witness_edges=_edges(n, gap.code),
            )
        )
    else:
        claims.append(
            ClaimResult(
                claim_id="balance",
                status=VIOLATED,
                bound=BALANCE_RTOL,
                extremal_value=gap.value,
                witness_code=gap.code,
                witness_edges=_edges(n, gap.code),
            )
        )
        counterexamples.append(
            Counterexample("balance", n, _edges(n, gap.code), gap.value, BALANCE_RTOL)
        )
        logger.warning("balance violated: relative gap %r", gap.value)

    report = VerificationReport(
        n=n,
        lam=lam,
        mode="claims",
        graphs_checked=scan.graphs,
        claims=tuple(claims),
        counterexamples=tuple(sorted(counterexamples, key=lambda c: (c.claim_id, c.edges))),
        extras={"shortcut_agrees": bounds.shortcut_agrees},
    )
    if verbose:
        print(report.summary())
    return report


def probe_conjecture(
    n: int,
    lam: Union[float, Lambda],
    jobs: int = 1,
    allow_large: bool = False,
    verbose: bool = False,
) -> VerificationReport:
    """
    Least maximum transmission against the cycle value.

    Over 2-connected graphs the least Mt must equal `cycle_bound(n, lam)`
    and the n-cycle must reach it; this is asserted for λ < 1/2 and only
    recorded otherwise. Over all connected graphs the least Mt is recorded
    in `extras`, together with whether some graph goes below the cycle.
    """
    if n < 3:
        raise NetDescError(f"The cycle value needs n >= 3, got {n}.")
    lam = as_lambda(lam)
    scan = scan_all(n, lam, jobs=jobs, allow_large=allow_large, track_biconnected=True)
    bound = cycle_bound(n, lam)
    cycle_Mt = compute(cycle(n), lam)[1].Mt

    best = scan.biconnected_Mt
    general = scan.lows["Mt"]
    extras = {
        "cycle_value": bound,
        "cycle_Mt": cycle_Mt,
        "biconnected_graphs": scan.biconnected,
        "general_min_Mt": general.value,
        "general_min_Mt_edges": [list(e) for e in _edges(n, general.code)],
        "general_beats_cycle": general.value < bound - ATTAIN_ATOL,
    }

    claims = []
    counterexamples = []
    if lam.value >= 0.5:
        claims.append(
            ClaimResult(
                claim_id="cycle_biconnected",
                status=NOT_APPLICABLE,
                bound=bound,
                extremal_value=best.value,
                witness_code=best.code,
                witness_edges=_edges(n, best.code),
                family=f"cycle(n={n})",
                family_value=cycle_Mt,
                note="exploratory: stated for λ < 1/2",
            )
        )
    else:
        result, counterexamples = _judge(
            "cycle_biconnected", "lower", bound, best, f"cycle(n={n})", cycle_Mt, n
        )
        claims.append(result)

    report = VerificationReport(
        n=n,
        lam=lam,
        mode="conjecture",
        graphs_checked=scan.graphs,
        claims=tuple(claims),
        counterexamples=tuple(counterexamples),
        extras=extras,
    )
    if verbose:
        print(report.summary())
    return report


def probe_open_problems(
    n: int,
    lam: Union[float, Lambda],
    jobs: int = 1,
    allow_large: bool = False,
    verbose: bool = False,
) -> VerificationReport:
    """
    Exact least Mt and least Mc over connected graphs on n vertices, with
    minimisers. Nothing is asserted; no closed form is known for either.
    """
    lam = as_lambda(lam)
    scan = scan_all(n, lam, jobs=jobs, allow_large=allow_large)
    extras = {}
    for name in ("Mt", "Mc"):
        e = scan.lows[name]
        extras[f"min_{name}"] = e.value
        extras[f"min_{name}_code"] = e.code
        extras[f"min_{name}_edges"] = [list(x) for x in _edges(n, e.code)]

    report = VerificationReport(
        n=n, lam=lam, mode="open", graphs_checked=scan.graphs, extras=extras
    )
    if verbose:
        print(report.summary())
    return report


def open_problems_table(n: int, lams: Sequence[float], jobs: int = 1) -> pd.DataFrame:
    """One row per λ: least Mt and least Mc over connected n-vertex graphs."""
    rows = []
    for lam in lams:
        extras = probe_open_problems(n, lam, jobs=jobs).extras
        rows.append(
            {
                "lambda": float(lam),
                "min_Mt": extras["min_Mt"],
                "min_Mc": extras["min_Mc"],
                "min_Mt_code": extras["min_Mt_code"],
                "min_Mc_code": extras["min_Mc_code"],
            }
        )
    return pd.DataFrame(rows)


##################
# Random graphs  #
##################


def random_connected(
    n: int,
    edge_prob: float,
    seed: Optional[int] = None,
    max_tries: int = 1000,
) -> Graph:
    """
    Erdős–Rényi G(n, p) conditioned on connectivity by rejection.

    Parameters
    ----------
    n : int
        At least 2.
    edge_prob : float
        0 < p <= 1.
    seed : int or None
        Defaults to `utils.default_seed()` (env `NETDESC_SEED`).
    max_tries : int

    Raises
    ------
    GivenUpAfterRetriesError
        If no connected sample turns up within `max_tries` draws.
    """
    if n < 2:
        raise NetDescError(f"n must be >= 2, got {n}.")
    if not 0 < edge_prob <= 1:
        raise NetDescError(f"edge_prob must lie in (0, 1], got {edge_prob!r}.")

    rng = np.random.default_rng(default_seed() if seed is None else seed)
    pairs = upper_pairs(n)
    for attempt in range(max_tries):
        keep = rng.random(len(pairs)) < edge_prob
        edges = [e for e, k in zip(pairs, keep) if k]
        masks = [0] * n
        for i, j in edges:
            masks[i] |= 1 << j
            masks[j] |= 1 << i
        if _flood_connected(masks):
            logger.debug("connected sample after %d draws", attempt + 1)
            return Graph.from_edges(n, edges)

    raise GivenUpAfterRetriesError(
        f"No connected G({n}, {edge_prob}) sample in {max_tries} draws."
    )
