"""Finite workbench for thick, syndetic and piecewise syndetic sets.

Modules: :mod:`~synwb.family` (families and S-ultrafilters on finite
grounds), :mod:`~synwb.fraisse` (structures, embeddings, exhaustions),
:mod:`~synwb.horizon` (classifiers at a finite horizon),
:mod:`~synwb.zgroup` (the classical integer case) and :mod:`~synwb.cli`.
"""

__version__ = "0.1.0"

from .errors import WorkbenchError

__all__ = ["WorkbenchError", "__version__"]
