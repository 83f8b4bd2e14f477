"""Numerical tolerances shared by the library and its tests."""

#: agreement between two exact (non-sampled) computations
ANALYTIC_TOL = 1e-9
#: Hermiticity / trace / positivity checks on inputs
VALIDATION_TOL = 1e-10
#: unit-norm check for state vectors
NORM_TOL = 1e-12
#: post-selection probabilities below this are treated as zero
ZERO_PROBABILITY = 1e-12
#: eigenvalues below this are round-off when deciding whether a state is pure
RANK_TOL = 1e-14
