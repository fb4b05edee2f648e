import json
import os
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from .base import Graph, NetDescError, ParseError, build_graph

DEFAULT_SEED = 2046


def parse_edge_list(
    text: str,
) -> Tuple[Optional[int], List[Tuple[int, int]], Optional[str]]:
    """
    Parse edge-list text.

    One edge per line as two whitespace-separated non-negative integers.
    Lines starting with `#` are comments, except `# n=<k>` (vertex count)
    and `# family=<spec>` (generator description).

    Returns
    -------
    n : int or None
        Declared vertex count, if a header is present.
    edges : list of (int, int)
    family : str or None

    Raises
    ------
    ParseError
        With the 1-based number of the offending line.
    """
    n = None
    family = None
    edges = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("n="):
                try:
                    n = int(body[2:])
                except ValueError:
                    raise ParseError(f"bad vertex count {body[2:]!r}", line_no)
                if n < 1:
                    raise ParseError(f"vertex count must be >= 1, got {n}", line_no)
            elif body.startswith("family="):
                family = body[len("family=") :]
            continue

        fields = line.split()
        if len(fields) != 2:
            raise ParseError(f"expected two vertex ids, got {line!r}", line_no)
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(f"vertex ids must be integers, got {line!r}", line_no)
        if u < 0 or v < 0:
            raise ParseError(f"vertex ids must be non-negative, got {line!r}", line_no)
        edges.append((u, v))

    return n, edges, family


def read_edge_list(
    path: Union[str, Path], lenient: bool = False
) -> Tuple[Graph, Optional[str]]:
    """
    Load and validate a graph from an edge-list file.

    The vertex count is the `# n=` header if present, else max id + 1.

    Returns
    -------
    g : Graph
    family : str or None
        The `# family=` header, if any.
    """
    n, edges, family = parse_edge_list(Path(path).read_text())
    if n is None:
        if not edges:
            raise ParseError("empty edge list without a `# n=` header")
        n = max(max(e) for e in edges) + 1
    return build_graph(n, edges, lenient=lenient), family


def format_edge_list(g: Graph, family: Optional[str] = None) -> str:
    lines = [f"# n={g.n}"]
    if family is not None:
        lines.append(f"# family={family}")
    lines += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def write_edge_list(
    g: Graph, path: Union[str, Path], family: Optional[str] = None
) -> None:
    Path(path).write_text(format_edge_list(g, family))


def default_seed() -> int:
    """Seed for random graphs, overridable through `NETDESC_SEED`."""
    value = os.environ.get("NETDESC_SEED")
    if value is None or value.strip() == "":
        return DEFAULT_SEED
    try:
        return int(value)
    except ValueError:
        raise NetDescError(f"NETDESC_SEED must be an integer, got {value!r}.")


def to_builtin(obj):
    """Recursively turn numpy scalars/arrays and tuples into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): to_builtin(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_builtin(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_builtin(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps(record: dict) -> str:
    """
    Deterministic JSON text: sorted keys, floats in shortest round-trip form.
    """
    return json.dumps(to_builtin(record), sort_keys=True, indent=2, ensure_ascii=False)
