"""litgraph: domain-specific citation subgraph curation and literature-task benchmarking."""

__version__ = "0.1.0"
