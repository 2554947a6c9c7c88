"""s-dimensional Riesz transforms and Wolff potentials on atomic measures."""

try:
    from ._rieszwolff import *  # noqa: F401,F403
    from ._rieszwolff import __doc__  # noqa: F401
except ImportError:  # in-tree builds put the extension next to the package
    from _rieszwolff import *  # noqa: F401,F403
    from _rieszwolff import __doc__  # noqa: F401

__version__ = "0.1.0"
