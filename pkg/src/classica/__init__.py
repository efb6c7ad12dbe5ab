"""Classical ODE methods, implemented and cross-checked.

Series solutions by Picard iteration, constant-coefficient linear theory,
first-order techniques, second-order IVPs with Wronskian checks, singular
solution verification, Gauss hypergeometric series and phase-plane
analysis.
"""

from .series import BivariatePolynomial, TruncatedSeries, default_order

__version__ = "0.1.0"
__all__ = ["BivariatePolynomial", "TruncatedSeries", "default_order", "__version__"]
