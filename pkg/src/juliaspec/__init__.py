"""Stochastic adding machines in base 2 and Fibonacci base.

The package builds the machines' exact Markov transition rows, finite
truncations of the transition operator, the polynomial families attached
to candidate eigenvalues, escape-time rasters of the two bounded-orbit
sets, and residual-decay evidence for spectral classification. The cli
module ties everything into reproducible command-line experiments.
"""

__version__ = "0.1.0"

from . import chain, julia, numeration, operator, qseq, spectra  # noqa: F401,E402
