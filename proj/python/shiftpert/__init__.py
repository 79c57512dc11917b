"""Schatten-class perturbations of the shift semigroup from atomic Clark measures."""

try:
    from ._shiftpert import *  # noqa: F401,F403
    from . import _shiftpert as _impl
except ImportError:  # built in-tree: extension lives next to the package dir
    from _shiftpert import *  # noqa: F401,F403
    import _shiftpert as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
__version__ = "0.1.0"
