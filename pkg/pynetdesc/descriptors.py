import logging
import math
from dataclasses import dataclass, field
from itertools import islice
from multiprocessing import Pool
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .base import (
    SIGMA_MAX,
    BadLambdaError,
    Graph,
    NetDescError,
    SigmaOverflowError,
    SingletonGraphError,
    TooLargeError,
    _bfs,
    distance_matrix,
)

__names__ = [
    "Lambda",
    "transmission",
    "reach",
    "pair_sum",
    "betweenness",
    "betweenness_oracle",
    "descriptor_table",
    "aggregates",
]

logger = logging.getLogger(__name__)

ORACLE_MAX_N = 10
BALANCE_RTOL = 1e-12

EdgeMap = Dict[Tuple[int, int], float]


@dataclass(frozen=True)
class Lambda:
    r"""
    Communication decay factor $\lambda \in (0, 1)$.

    Raises
    ------
    BadLambdaError
        If the value is not a finite real strictly between 0 and 1.
    """

    value: float

    def __post_init__(self):
        try:
            v = float(self.value)
        except (TypeError, ValueError):
            raise BadLambdaError(f"λ must be a real number, got {self.value!r}.")
        if not (math.isfinite(v) and 0.0 < v < 1.0):
            raise BadLambdaError(f"λ must lie strictly between 0 and 1, got {v!r}.")
        object.__setattr__(self, "value", v)

    def __float__(self):
        return self.value


def as_lambda(lam: Union[float, Lambda]) -> Lambda:
    return lam if isinstance(lam, Lambda) else Lambda(lam)


#########################
# Per-source accumulation
#########################


def _edge_index(g: Graph) -> Dict[Tuple[int, int], int]:
    return {e: k for k, e in enumerate(g.edges)}


def _accumulate(
    adjacency: Sequence[Sequence[int]],
    edges: Sequence[Tuple[int, int]],
    lam: float,
    sources: Sequence[int],
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Partial (t, reach, doubled edge betweenness) for a chunk of sources.

    Every target w seeds weight λ^d(s,w); walking the BFS order backwards
    each shortest-path edge (p, w) receives σ(p)/σ(w) · (seed(w) + δ(w)).
    """
    n = len(adjacency)
    index = {e: k for k, e in enumerate(edges)}
    t = np.zeros(n)
    r = np.zeros(n)
    b = np.zeros(len(edges))

    for s in sources:
        dist, sigma, order, preds = _bfs(adjacency, s)
        if max(sigma) > SIGMA_MAX:
            raise SigmaOverflowError(
                f"Shortest-path count from vertex {s} exceeds 2**64 - 1."
            )

        # λ^k for every layer, by repeated multiplication
        powers = [1.0]
        for _ in range(dist[order[-1]]):
            powers.append(powers[-1] * lam)

        delta = [0.0] * n
        ts = 0.0
        rs = 0.0
        for w in reversed(order):
            if w == s:
                continue
            d = dist[w]
            ts += d * powers[d]
            rs += powers[d]
            coeff = (powers[d] + delta[w]) / sigma[w]
            for p in preds[w]:
                x = sigma[p] * coeff
                b[index[(p, w) if p < w else (w, p)]] += x
                delta[p] += x
        t[s] = ts
        r[s] = rs

    return t, r, b


def _chunks(seq: Sequence[int], size: int):
    it = iter(seq)
    while True:
        chunk = tuple(islice(it, size))
        if not chunk:
            return
        yield chunk


def _accumulate_all(
    g: Graph, lam: float, jobs: int = 1
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    sources = range(g.n)
    if jobs <= 1 or g.n < 2 * jobs:
        return _accumulate(g.adjacency, g.edges, lam, sources)

    size = max(1, g.n // (jobs * 4))
    chunks = list(_chunks(sources, size))
    logger.debug("accumulating %d sources in %d chunks", g.n, len(chunks))
    with Pool(processes=jobs) as pool:
        parts = pool.starmap(
            _accumulate,
            [(g.adjacency, g.edges, lam, chunk) for chunk in chunks],
        )

    # reduce in source order
    t, r, b = parts[0]
    for tp, rp, bp in parts[1:]:
        t = t + tp
        r = r + rp
        b = b + bp
    return t, r, b


###############
# Descriptors #
###############


def transmission(g: Graph, lam: Union[float, Lambda], jobs: int = 1) -> np.ndarray:
    r"""
    Exponential transmission of every vertex.

    $$ t_\lambda(u) = \sum_{v \neq u} d(u, v) \, \lambda^{d(u, v)} $$

    The cost of a vertex to the network: how much it pays to talk to
    everyone else when messages decay by $\lambda$ per hop.

    Parameters
    ----------
    g : Graph
    lam : float or Lambda
        Decay factor in (0, 1).
    jobs : int
        Worker processes for the per-source pass. Default is 1.

    Returns
    -------
    t : np.ndarray (n,)
    """
    lam = as_lambda(lam)
    return _accumulate_all(g, lam.value, jobs)[0]


def reach(g: Graph, lam: Union[float, Lambda], jobs: int = 1) -> np.ndarray:
    r"""
    Decayed reach of every vertex.

    $$ r_\lambda(u) = \sum_{v \neq u} \lambda^{d(u, v)} $$

    The communication a vertex originates. Every shortest path leaving
    `u` uses exactly one edge incident to `u`, so $c_\lambda(u) \geq r_\lambda(u)$,
    with equality at leaves.
    """
    lam = as_lambda(lam)
    return _accumulate_all(g, lam.value, jobs)[1]


def pair_sum(g: Graph, lam: Union[float, Lambda]) -> float:
    r"""
    Distance-weighted decay summed over ordered vertex pairs.

    $$ \sum_{k \neq l} d(k, l) \, \lambda^{d(k, l)} $$

    Computed from the all-pairs distance matrix, independently of the
    per-source pass. Both total transmission and total betweenness equal
    this value.
    """
    lam = as_lambda(lam)
    D = distance_matrix(g)
    off = D > 0
    return float(np.sum(D[off] * np.power(lam.value, D[off])))


def betweenness(
    g: Graph, lam: Union[float, Lambda], jobs: int = 1
) -> Tuple[EdgeMap, np.ndarray]:
    r"""
    Exponential edge betweenness and vertex betweenness centrality.

    $$ b_\lambda(uv) = \sum_{\{k, l\}} \frac{s^{kl}_{uv}}{s^{kl}} \, \lambda^{d(k, l)} $$

    $$ c_\lambda(u) = \sum_{v \in N(u)} b_\lambda(uv) $$

    where $s^{kl}$ counts shortest k-l paths and $s^{kl}_{uv}$ those among
    them that use edge uv. Pairs range over unordered pairs of distinct
    vertices, including pairs that contain an endpoint of the edge. The
    weight is the decay over the whole pair distance, so a pair routed
    through `u` counts once for each of the two edges it uses at `u`.

    Computed with one BFS per source and a reverse dependency sweep. Each
    unordered pair is met once from either end; edge values are halved at
    the end.

    Parameters
    ----------
    g : Graph
    lam : float or Lambda
    jobs : int
        Worker processes. Partial sums are reduced in source order.

    Returns
    -------
    edge_betweenness : dict
        Maps each edge (u, v), u < v, to $b_\lambda(uv)$.
    c : np.ndarray (n,)
    """
    lam = as_lambda(lam)
    b = _accumulate_all(g, lam.value, jobs)[2] / 2.0
    return _edge_map_and_c(g, b)


def _edge_map_and_c(g: Graph, b: np.ndarray) -> Tuple[EdgeMap, np.ndarray]:
    c = np.zeros(g.n)
    edge_b = {}
    for (u, v), x in zip(g.edges, b):
        edge_b[(u, v)] = float(x)
        c[u] += x
        c[v] += x
    return edge_b, c


def betweenness_oracle(g: Graph, lam: Union[float, Lambda]) -> Tuple[EdgeMap, np.ndarray]:
    """
    Brute-force twin of `betweenness()`.

    Lists every shortest path of every unordered pair explicitly, by depth
    first search over the shortest-path DAG, and tallies edge fractions
    directly. Only for small graphs.

    Raises
    ------
    TooLargeError
        If `g.n` exceeds ORACLE_MAX_N.
    """
    if g.n > ORACLE_MAX_N:
        raise TooLargeError(
            f"Oracle path enumeration is capped at n={ORACLE_MAX_N}, got n={g.n}."
        )
    lam = as_lambda(lam)
    D = distance_matrix(g)
    index = _edge_index(g)
    b = np.zeros(g.n_edges)

    for k in range(g.n):
        for l in range(k + 1, g.n):
            counts = np.zeros(g.n_edges)
            n_paths = 0

            stack: List[Tuple[int, Tuple[int, ...]]] = [(k, ())]
            while stack:
                v, used = stack.pop()
                if v == l:
                    n_paths += 1
                    counts[list(used)] += 1
                    continue
                for w in g.adjacency[v]:
                    if D[k, w] == D[k, v] + 1 and D[w, l] == D[v, l] - 1:
                        e = index[(v, w) if v < w else (w, v)]
                        stack.append((w, used + (e,)))

            b += counts / n_paths * lam.value ** D[k, l]

    return _edge_map_and_c(g, b)


##########
# Tables #
##########


@dataclass(frozen=True)
class DescriptorTable:
    lam: Lambda
    t: np.ndarray
    c: np.ndarray
    networkness: np.ndarray
    surplus: np.ndarray
    edge_betweenness: EdgeMap
    reach: np.ndarray
    balance: Tuple[float, float, float]  # (Σt, Σc, pair sum)

    @property
    def n(self) -> int:
        return len(self.t)

    def to_frame(self) -> pd.DataFrame:
        df = pd.DataFrame(
            {
                "t": self.t,
                "c": self.c,
                "networkness": self.networkness,
                "surplus": self.surplus,
            }
        )
        df.index.name = "vertex"
        return df

    def edges_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(u, v, b) for (u, v), b in sorted(self.edge_betweenness.items())],
            columns=["u", "v", "b"],
        )

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam.value,
            "t": self.t.tolist(),
            "c": self.c.tolist(),
            "networkness": self.networkness.tolist(),
            "surplus": self.surplus.tolist(),
            "reach": self.reach.tolist(),
            "edge_betweenness": [
                [u, v, b] for (u, v), b in sorted(self.edge_betweenness.items())
            ],
            "balance": {
                "sum_t": self.balance[0],
                "sum_c": self.balance[1],
                "pair_sum": self.balance[2],
            },
        }

    def __repr__(self):
        docs = "Exponential Descriptors\n"
        docs += "=======================\n\n"
        docs += f"  λ: {self.lam.value}\n"
        docs += f"  Vertices: {self.n}\n"
        docs += f"  Σt = {self.balance[0]:.6f}, Σc = {self.balance[1]:.6f}\n\n"
        docs += self.to_frame().to_string(float_format=lambda x: f"{x:.6f}")
        docs += "\n"
        return docs

    def summary(self):
        return self.__repr__()


def descriptor_table(
    g: Graph,
    lam: Union[float, Lambda],
    jobs: int = 1,
    verbose: bool = False,
) -> DescriptorTable:
    r"""
    All four descriptors of every vertex.

    $$ N_\lambda(u) = \frac{c_\lambda(u)}{t_\lambda(u)}, \qquad \nu_\lambda(u) = c_\lambda(u) - t_\lambda(u) $$

    Parameters
    ----------
    g : Graph
        At least two vertices.
    lam : float or Lambda
    jobs : int
        Worker processes for the per-source pass. Default is 1.
    verbose : bool
        Print the table.

    Returns
    -------
    DescriptorTable

    Raises
    ------
    SingletonGraphError
        For n = 1, where transmission is zero and networkness undefined.
    """
    if g.n < 2:
        raise SingletonGraphError("Networkness is undefined on a single vertex.")
    lam = as_lambda(lam)

    t, r, b = _accumulate_all(g, lam.value, jobs)
    edge_b, c = _edge_map_and_c(g, b / 2.0)
    sum_t, sum_c = float(t.sum()), float(c.sum())

    if abs(sum_t - sum_c) > BALANCE_RTOL * max(sum_t, 1.0):
        logger.warning("balance off: Σt=%r, Σc=%r on %r", sum_t, sum_c, g)

    table = DescriptorTable(
        lam=lam,
        t=t,
        c=c,
        networkness=c / t,
        surplus=c - t,
        edge_betweenness=edge_b,
        reach=r,
        balance=(sum_t, sum_c, pair_sum(g, lam)),
    )

    if verbose:
        print(table.summary())

    return table


AGGREGATES = ("mt", "Mt", "mc", "Mc", "mN", "MN", "mnu", "Mnu")


@dataclass(frozen=True)
class AggregateSummary:
    mt: float
    Mt: float
    mc: float
    Mc: float
    mN: float
    MN: float
    mnu: float
    Mnu: float
    witnesses: Dict[str, int] = field(default_factory=dict)  # aggregate -> vertex

    def values(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in AGGREGATES}

    def __repr__(self):
        docs = "Aggregates\n"
        docs += "----------\n"
        for name in AGGREGATES:
            value, vertex = getattr(self, name), self.witnesses[name]
            docs += f"  {name:<4}: {value:.6f}  (vertex {vertex})\n"
        return docs

    def summary(self):
        return self.__repr__()

    def to_dict(self) -> dict:
        return {
            name: {"value": getattr(self, name), "vertex": self.witnesses[name]}
            for name in AGGREGATES
        }


def aggregates(table: DescriptorTable, verbose: bool = False) -> AggregateSummary:
    """
    Graph-level minima and maxima of the four descriptors.

    Ties go to the smallest vertex id.

    Returns
    -------
    AggregateSummary
        Values `mt, Mt, mc, Mc, mN, MN, mnu, Mnu` and, in `witnesses`, the
        vertex attaining each.
    """
    columns = {
        "t": table.t,
        "c": table.c,
        "N": table.networkness,
        "nu": table.surplus,
    }
    values = {}
    witnesses = {}
    for key, arr in columns.items():
        lo, hi = int(np.argmin(arr)), int(np.argmax(arr))
        values[f"m{key}"], witnesses[f"m{key}"] = float(arr[lo]), lo
        values[f"M{key}"], witnesses[f"M{key}"] = float(arr[hi]), hi

    summary = AggregateSummary(witnesses=witnesses, **values)

    if verbose:
        print(summary.summary())

    return summary


def compute(
    g: Graph, lam: Union[float, Lambda], jobs: int = 1
) -> Tuple[DescriptorTable, AggregateSummary]:
    table = descriptor_table(g, lam, jobs=jobs)
    return table, aggregates(table)


def balance_gap(table: DescriptorTable) -> float:
    """Relative gap |Σt − Σc| / max(Σt, 1)."""
    sum_t, sum_c, _ = table.balance
    return abs(sum_t - sum_c) / max(sum_t, 1.0)


def tree_edge_betweenness(g: Graph, lam: Union[float, Lambda]) -> EdgeMap:
    """
    Edge betweenness of a tree by pair partition.

    Removing tree edge uv splits the vertices in two; every pair across the
    cut has a unique path through uv and contributes $\\lambda^{d(k,l)}$.
    """
    if not g.is_tree:
        raise NetDescError("`g` is not a tree.")
    lam = as_lambda(lam)
    D = distance_matrix(g)
    W = np.power(lam.value, D.astype(float))
    out = {}
    for u, v in g.edges:
        # side of u after cutting uv: vertices closer to u than to v
        side = D[u] < D[v]
        out[(u, v)] = float(W[np.ix_(side, ~side)].sum())
    return out
