__all__ = ["base", "bimodule", "constructions", "examples", "parse"]
