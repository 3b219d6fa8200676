"""Exact computations with derivations and endomorphisms of infinite tensor
products of matrix algebras over the rationals or a prime field.

The heavy lifting lives in the compiled extension ``_locmat``; this package
re-exports its surface. Scalars cross the boundary as exact strings such as
``"-3/7"`` or ``"4"``.
"""

try:
    from ._locmat import *  # noqa: F401,F403
    from ._locmat import __doc__ as _core_doc  # noqa: F401
except ImportError:  # in-tree builds put the extension on sys.path directly
    from _locmat import *  # noqa: F401,F403

__version__ = "0.1.0"
