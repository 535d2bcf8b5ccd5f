"""
Unit tests package for the RadGrad benchmark.

Populate this directory with focused, fast-running tests that use tiny networks
and short horizons. Use integration tests for full-length experiment runs.
"""
