"""Exact link-pattern bases for quantum-group highest-weight spaces.

Subpackages:

* qfield  -- exact arithmetic in Q(q) (and Q(t) for the PDE side)
* linkpat -- planar link pattern combinatorics
* uqsl2   -- tensor product representations, projections and R maps
* basis   -- the link-pattern basis vectors and their verification
* coulomb -- symbolic Benoit-Saint-Aubin PDE and covariance checks
* cli     -- command line front door (enumerate / vector / verify)
"""

from . import qfield, linkpat, uqsl2, basis, coulomb  # noqa: F401

__version__ = "0.1.0"
