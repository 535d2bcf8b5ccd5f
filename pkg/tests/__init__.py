# Marks the tests package for the RadGrad benchmark.
