"""sigsal: DCT-signature saliency engine.

Submodules import lazily so the CLI can cap BLAS threads (SIGSAL_THREADS)
before numpy loads.
"""

import importlib

__version__ = "0.1.0"

_SUBMODULES = (
    "errors",
    "kernels",
    "micronet",
    "numutil",
    "rng",
    "saliency",
    "sanity",
    "spectral",
    "tensorio",
    "theorem",
    "wsol",
)


def __getattr__(name):
    if name in _SUBMODULES:
        return importlib.import_module(f"sigsal.{name}")
    raise AttributeError(f"module 'sigsal' has no attribute {name!r}")


def __dir__():
    return sorted(list(globals()) + list(_SUBMODULES))
