"""An executable workbench for fixed points of programs about programs.

A bijective numbering of a small tree language, a budgeted self
interpreter with oracles, stage-bounded domain views, the two classic
fixed-point constructions, and the adversarial constructions that map out
where uniform fixed-point finding stops working.
"""

import sys as _sys

__version__ = "0.1.0"

# program codes routinely run to hundreds of thousands of digits; the
# default int/str conversion guard would reject serializing them
if hasattr(_sys, "set_int_max_str_digits"):
    _sys.set_int_max_str_digits(400_000)
