"""Random-matrix theory and Monte Carlo for ridge classifiers trained on real
plus verifier-pruned synthetic Gaussian data."""

__version__ = "0.1.0"
