"""Exact loop homology, based-loop homology and Hochschild cohomology of finite DGAs."""


class LoopAlgError(Exception):
    """Base class for every error raised by loopalg."""
