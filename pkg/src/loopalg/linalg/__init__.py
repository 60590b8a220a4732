__all__ = ["graded", "homology", "scalars", "sparse"]
