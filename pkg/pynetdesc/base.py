import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

__names__ = ["Graph", "ShortestPathData", "build_graph", "bfs_sssp"]

logger = logging.getLogger(__name__)

SIGMA_MAX = 2**64 - 1  # shortest-path counts are stored as uint64


##############
# Exceptions #
##############


class NetDescError(ValueError):
    """Base class of every input or range error raised by pynetdesc."""


class SelfLoopError(NetDescError):
    pass


class DuplicateEdgeError(NetDescError):
    pass


class VertexOutOfRangeError(NetDescError):
    pass


class DisconnectedError(NetDescError):
    pass


class SigmaOverflowError(NetDescError):
    pass


class BadLambdaError(NetDescError):
    pass


class SingletonGraphError(NetDescError):
    pass


class TooLargeError(NetDescError):
    pass


class DOutOfRangeError(NetDescError):
    pass


class NTooLargeError(NetDescError):
    pass


class GivenUpAfterRetriesError(NetDescError):
    pass


class ParseError(NetDescError):
    def __init__(self, message: str, line_no: int = 0):
        super().__init__(f"line {line_no}: {message}" if line_no else message)
        self.line_no = line_no


#########
# Graph #
#########


@lru_cache(maxsize=None)
def upper_pairs(n: int) -> Tuple[Tuple[int, int], ...]:
    """Vertex pairs (i, j), i < j, in the bit order of graph codes.

    Bit `k` of a graph code switches the k-th pair of
    (0,1), (0,2), ..., (0,n-1), (1,2), ..., (n-2,n-1).
    """
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


@dataclass(frozen=True)
class Graph:
    r"""
    Simple connected undirected graph on the vertices $0, \dots, n-1$.

    Instances are produced by `build_graph()` (validated input) or by the
    generators and the enumerator, which only emit valid graphs. A `Graph`
    is immutable; every descriptor is a pure function of it.

    Parameters
    ----------
    n : int
        Number of vertices.
    edges : tuple of (int, int)
        Canonical edge set, each pair stored as (u, v) with u < v, sorted.
    adjacency : tuple of tuple of int
        Sorted neighbour list of every vertex, symmetric with `edges`.

    Examples
    --------
    ```python
    g = build_graph(3, [(0, 1), (1, 2), (0, 2)])
    g.adjacency  # ((1, 2), (0, 2), (0, 1))
    ```
    """

    n: int
    edges: Tuple[Tuple[int, int], ...]
    adjacency: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]]) -> "Graph":
        """Assemble a graph from edges already known to be simple and connected."""
        canonical = tuple(sorted((min(u, v), max(u, v)) for u, v in edges))
        neighbours: List[List[int]] = [[] for _ in range(n)]
        for u, v in canonical:
            neighbours[u].append(v)
            neighbours[v].append(u)
        adjacency = tuple(tuple(sorted(nb)) for nb in neighbours)
        return cls(n=n, edges=canonical, adjacency=adjacency)

    @classmethod
    def from_networkx(cls, G, lenient: bool = False) -> "Graph":
        """Validated graph from a `networkx.Graph` whose nodes are 0..n-1."""
        return build_graph(G.number_of_nodes(), list(G.edges()), lenient=lenient)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def code(self) -> int:
        """Upper-triangular adjacency bit code (see `upper_pairs`)."""
        index = {pair: k for k, pair in enumerate(upper_pairs(self.n))}
        bits = 0
        for e in self.edges:
            bits |= 1 << index[e]
        return bits

    @property
    def is_tree(self) -> bool:
        return self.n_edges == self.n - 1

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Isomorphic copy in which vertex `u` becomes `perm[u]`."""
        if sorted(perm) != list(range(self.n)):
            raise NetDescError(f"`perm` is not a permutation of 0..{self.n - 1}.")
        return Graph.from_edges(self.n, [(perm[u], perm[v]) for u, v in self.edges])

    def to_networkx(self):
        import networkx as nx

        G = nx.Graph()
        G.add_nodes_from(range(self.n))
        G.add_edges_from(self.edges)
        return G

    def __repr__(self):
        return f"Graph(n={self.n}, edges={list(self.edges)})"


def build_graph(
    n: int,
    edge_list: Iterable[Tuple[int, int]],
    lenient: bool = False,
) -> Graph:
    """
    Validate an edge list and build a `Graph`.

    Parameters
    ----------
    n : int
        Number of vertices, at least 1.
    edge_list : iterable of (int, int)
        Unordered vertex pairs with endpoints in 0..n-1.
    lenient : bool
        If True, self-loops and repeated edges are dropped with a warning
        instead of raising. Default is False.

    Returns
    -------
    Graph

    Raises
    ------
    VertexOutOfRangeError
        An endpoint lies outside 0..n-1.
    SelfLoopError, DuplicateEdgeError
        Non-simple input while `lenient` is False.
    DisconnectedError
        Some vertex is unreachable from vertex 0.
    """
    if int(n) != n or n < 1:
        raise NetDescError(f"Vertex count must be a positive integer, got {n!r}.")
    n = int(n)

    seen = set()
    for line, (u, v) in enumerate(edge_list):
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise VertexOutOfRangeError(
                f"Edge #{line} ({u}, {v}) has an endpoint outside 0..{n - 1}."
            )
        if u == v:
            if not lenient:
                raise SelfLoopError(f"Edge #{line} is a self-loop on vertex {u}.")
            logger.warning("dropping self-loop on vertex %d", u)
            continue
        e = (min(u, v), max(u, v))
        if e in seen:
            if not lenient:
                raise DuplicateEdgeError(f"Edge {e} is listed more than once.")
            logger.warning("dropping duplicate edge %s", e)
            continue
        seen.add(e)

    g = Graph.from_edges(n, seen)

    dist = _bfs(g.adjacency, 0)[0]
    unreachable = [v for v in range(n) if dist[v] < 0]
    if unreachable:
        raise DisconnectedError(
            f"{len(unreachable)} vertices are unreachable from vertex 0 "
            f"(first: {unreachable[0]})."
        )

    return g


####################
# Shortest paths   #
####################


@dataclass(frozen=True)
class ShortestPathData:
    source: int
    dist: np.ndarray  # hop distance d(source, v)
    sigma: np.ndarray  # number of shortest source-v paths, uint64
    bfs_order: Tuple[int, ...]  # non-decreasing distance from source
    preds: Tuple[Tuple[int, ...], ...]  # predecessors on shortest paths


def _bfs(
    adjacency: Sequence[Sequence[int]], source: int
) -> Tuple[List[int], List[int], List[int], List[List[int]]]:
    """BFS with path counting on plain lists; unreachable vertices keep dist -1."""
    n = len(adjacency)
    dist = [-1] * n
    sigma = [0] * n
    preds: List[List[int]] = [[] for _ in range(n)]
    dist[source] = 0
    sigma[source] = 1

    # the visiting order doubles as the queue
    order = [source]
    head = 0
    while head < len(order):
        v = order[head]
        head += 1
        dw = dist[v] + 1
        for w in adjacency[v]:
            if dist[w] < 0:
                dist[w] = dw
                order.append(w)
            if dist[w] == dw:
                sigma[w] += sigma[v]
                preds[w].append(v)

    return dist, sigma, order, preds


def bfs_sssp(g: Graph, source: int) -> ShortestPathData:
    r"""
    Single-source shortest paths with path counting.

    $$ \sigma(v) = \sum_{p \in \mathrm{pred}(v)} \sigma(p), \quad \sigma(s) = 1 $$

    Parameters
    ----------
    g : Graph
    source : int
        Vertex in 0..n-1.

    Returns
    -------
    ShortestPathData

    Raises
    ------
    SigmaOverflowError
        A shortest-path count does not fit in 64 unsigned bits.
    """
    if not 0 <= source < g.n:
        raise VertexOutOfRangeError(f"Source {source} outside 0..{g.n - 1}.")

    dist, sigma, order, preds = _bfs(g.adjacency, source)

    if max(sigma) > SIGMA_MAX:
        raise SigmaOverflowError(
            f"Shortest-path count from vertex {source} exceeds 2**64 - 1."
        )

    return ShortestPathData(
        source=source,
        dist=np.array(dist, dtype=np.int64),
        sigma=np.array(sigma, dtype=np.uint64),
        bfs_order=tuple(order),
        preds=tuple(tuple(p) for p in preds),
    )


def diameter_from(g: Graph, source: int) -> int:
    """Eccentricity of `source`: the largest hop distance from it."""
    return int(bfs_sssp(g, source).dist.max())


def distance_profile(g: Graph, source: int) -> np.ndarray:
    """
    Layer sizes seen from `source`.

    Returns
    -------
    x : np.ndarray (ecc,)
        `x[i-1]` is the number of vertices at distance `i`, for
        i = 1..eccentricity.
    """
    dist = bfs_sssp(g, source).dist
    return np.bincount(dist, minlength=1)[1:]


def distance_matrix(g: Graph) -> np.ndarray:
    """All-pairs hop distances (n, n), computed by `scipy.sparse.csgraph`."""
    if g.n_edges == 0:
        return np.zeros((g.n, g.n), dtype=np.int64)
    rows, cols = np.array(g.edges, dtype=np.int64).T
    A = csr_matrix(
        (np.ones(len(rows)), (rows, cols)),
        shape=(g.n, g.n),
    )
    D = shortest_path(A, directed=False, unweighted=True)
    return D.astype(np.int64)


def shortest_path_tree(g: Graph, root: int) -> Graph:
    """
    BFS spanning tree of `g` rooted at `root`.

    Each non-root vertex keeps the edge to its smallest shortest-path
    predecessor, so every distance from `root` is preserved.
    """
    spd = bfs_sssp(g, root)
    edges = [(min(spd.preds[v]), v) for v in range(g.n) if v != root]
    return Graph.from_edges(g.n, edges)
