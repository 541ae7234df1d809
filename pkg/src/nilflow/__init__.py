"""Desk-scale numerical verification of structure theorems for torus flows,
the Heisenberg nilflow, higher-order regional proximality, suspension flows
and multiple ergodic averages."""

__version__ = "0.1.0"
