"""Shared numerical tolerance policy.

``TOL`` bounds absolute Frobenius-norm (or trace-norm, where noted)
residuals. ``RANK_TOL`` is relative: a singular value counts as nonzero
when it exceeds ``RANK_TOL * max_singular_value``. Eigenvalues below
``CLAMP_TOL`` are treated as zero inside logarithms.
"""

TOL = 1e-9
RANK_TOL = 1e-9
CLAMP_TOL = 1e-12
LOG_BASE = 2.0
