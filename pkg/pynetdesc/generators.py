from dataclasses import dataclass
from math import gcd
from typing import Optional, Tuple

from .base import DisconnectedError, DOutOfRangeError, Graph, NetDescError

__names__ = ["FamilySpec", "broom", "path", "star", "cycle", "complete", "circulant"]

FAMILIES = ("broom", "path", "star", "cycle", "complete", "circulant")


def _check_n(n: int, least: int = 1):
    if int(n) != n or n < least:
        raise NetDescError(f"n must be an integer >= {least}, got {n!r}.")


def broom(n: int, D: int) -> Graph:
    r"""
    Broom with `n` vertices whose starting vertex has eccentricity `D`.

    Vertices $0, 1, \dots, D$ form a path; each of the remaining
    $n - D - 1$ vertices hangs off vertex $D - 1$, so they all sit at
    distance `D` from vertex 0.

    In the star-and-path description a broom glues a star with $k$ leaves
    onto a path; here $k = n - D$ (counting the path end at distance `D`).
    `broom(n, n - 1)` is the path and `broom(n, 1)` the star centred at 0.

    Parameters
    ----------
    n : int
    D : int
        Eccentricity of vertex 0, 1 <= D <= n - 1.

    Returns
    -------
    Graph

    Raises
    ------
    DOutOfRangeError
    """
    _check_n(n, 2)
    if int(D) != D or not 1 <= D <= n - 1:
        raise DOutOfRangeError(f"D must lie in 1..{n - 1}, got {D!r}.")
    edges = [(i, i + 1) for i in range(D)]
    edges += [(D - 1, w) for w in range(D + 1, n)]
    return Graph.from_edges(n, edges)


def path(n: int) -> Graph:
    """Path 0-1-...-(n-1)."""
    _check_n(n)
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star(n: int) -> Graph:
    """Star centred at vertex 0."""
    _check_n(n)
    return Graph.from_edges(n, [(0, i) for i in range(1, n)])


def cycle(n: int) -> Graph:
    """Cycle with i adjacent to i + 1 mod n, n >= 3."""
    _check_n(n, 3)
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    _check_n(n)
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def circulant(n: int, offsets) -> Graph:
    r"""
    Circulant graph: vertex $i$ is adjacent to $i \pm s \bmod n$ for every
    offset $s$.

    Circulants are vertex-transitive, so every per-vertex descriptor is
    constant on them.

    Parameters
    ----------
    n : int
    offsets : iterable of int
        Non-empty, each in 1..floor(n/2).

    Raises
    ------
    DisconnectedError
        If gcd(n, *offsets) > 1.
    """
    _check_n(n, 2)
    offsets = tuple(sorted(set(int(s) for s in offsets)))
    if not offsets:
        raise NetDescError("Circulant needs at least one offset.")
    bad = [s for s in offsets if not 1 <= s <= n // 2]
    if bad:
        raise NetDescError(f"Offsets must lie in 1..{n // 2}, got {bad}.")

    g_ = n
    for s in offsets:
        g_ = gcd(g_, s)
    if g_ != 1:
        raise DisconnectedError(
            f"circulant({n}, {list(offsets)}) splits into {g_} components."
        )

    edges = set()
    for i in range(n):
        for s in offsets:
            j = (i + s) % n
            edges.add((min(i, j), max(i, j)))
    return Graph.from_edges(n, edges)


@dataclass(frozen=True)
class FamilySpec:
    """
    A named extremal family with its parameters.

    `str(spec)` is the `# family=` header written by `netdesc gen`, e.g.
    ``broom(n=5,D=2)`` or ``circulant(n=6,offsets=1,2)``.
    """

    family: str
    n: int
    D: Optional[int] = None
    offsets: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise NetDescError(
                f"Unknown family {self.family!r}. Choose from {', '.join(FAMILIES)}."
            )
        if self.family == "broom" and self.D is None:
            raise DOutOfRangeError("broom needs D.")
        if self.family == "circulant" and not self.offsets:
            raise NetDescError("circulant needs offsets.")

    def build(self) -> Graph:
        if self.family == "broom":
            return broom(self.n, self.D)
        if self.family == "circulant":
            return circulant(self.n, self.offsets)
        return {"path": path, "star": star, "cycle": cycle, "complete": complete}[
            self.family
        ](self.n)

    def __str__(self):
        params = f"n={self.n}"
        if self.family == "broom":
            params += f",D={self.D}"
        if self.family == "circulant":
            params += ",offsets=" + ",".join(str(s) for s in self.offsets)
        return f"{self.family}({params})"
