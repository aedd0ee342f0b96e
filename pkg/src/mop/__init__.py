"""mop: partition a knowledge graph, infuse each part into adapters, mix them downstream."""

__version__ = "0.1.0"
