"""Computational geometry of elliptic K3 models and their collapsed limits.

Subpackages cover complex binary forms and their GIT stability, fiber-period
lattices and the induced base metrics, degeneration-family experiments, flat
tori and integer monodromy limits, even-lattice boundary classification, and
Gromov-Hausdorff comparison of finite metric spaces.  The ``k3`` command line
tool exposes each piece; see README.md.
"""

__version__ = "0.1.0"
