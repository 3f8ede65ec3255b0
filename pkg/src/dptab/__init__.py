"""Differentially private tabulation of household type and tenure statistics.

Adaptive table shells selected by public total-population counts, exact
discrete Gaussian noise on the table bases, and zero-concentrated
differential privacy accounting, with an analytic planner for tuning the
error/privacy-loss trade-off.
"""

__version__ = "0.1.0"
