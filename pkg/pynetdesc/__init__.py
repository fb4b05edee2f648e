from .base import Graph, build_graph
from .bounds import table1_bounds
from .descriptors import Lambda, aggregates, descriptor_table
from .search import verify_claims
from .version import __version__
