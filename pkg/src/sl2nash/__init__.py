"""Numerical toolkit for the explicit machinery of sl2(C) Poisson linearization.

Submodules
----------
matrixcore   sl2(C) matrix algebra, invariants, Hermitian functional calculus, SU(2)
skeleton     normal-matrix skeleton, retraction, desingularization
flow         gradient-like matrix flow, closed form and oracles, decay polynomials
tensors      pointwise exterior algebra on R^6 and field handles
foliation    Poisson bivectors, transversal fields, extended symplectic forms, Schouten
homotopy     flow pullback, homotopy operators by quadrature, SU(2) averaging
flatcalc     weighted flat norms and the 2d module calculus on C
smoothing    Nash smoothing operators on grids (kernel, inversion, extension, cutoffs)
nashmoser    iteration constants, schedules, inequality ledger, single-step driver
suites       batch verification suites producing machine-readable reports
service      FastAPI wrapper around the suites
cli          thin command-line client
"""

__version__ = "0.1.0"
