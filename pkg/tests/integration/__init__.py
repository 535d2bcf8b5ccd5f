"""
Integration tests package for the RadGrad benchmark.

Place end-to-end experiment runs here: full-size networks, many iterations,
gated behind RUN_SLOW_TESTS=1. Keep fast, tiny-network logic in tests/unit.
"""
