import logging

from .field import Field
from .poly import MultiPoly, UniPoly, evaluate, sample_poly, specialize
from .roots import all_roots, sample_root
from .svs import StripSequence, SvsResult, svs_run, svs_run_with_strips

__all__ = [
    "Field",
    "MultiPoly",
    "UniPoly",
    "StripSequence",
    "SvsResult",
    "all_roots",
    "evaluate",
    "sample_poly",
    "sample_root",
    "specialize",
    "svs_run",
    "svs_run_with_strips",
]

try:
    from ._version import __version__ as version

    __version__ = version
except ModuleNotFoundError:
    logging.warning("No _version.py file")
    __version__ = "0.0.0"
