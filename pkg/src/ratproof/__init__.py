"""Exact simulation of rational interactive proofs on small inputs."""

__version__ = "0.1.0"
