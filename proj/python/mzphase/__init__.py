"""Two-parameter MZI phase estimation toolkit.

Thin python layer over the compiled core: Gaussian-state propagation,
joint homodyne statistics, Fisher-information bounds and the
maximum-likelihood estimators, plus the experiment runner.
"""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __version__  # noqa: F401
except ImportError:  # development tree: extension next to the build dir
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
