"""pqcbench: statevector simulation and Monte Carlo descriptors for
parameterized quantum circuit templates."""

__version__ = "0.1.0"
