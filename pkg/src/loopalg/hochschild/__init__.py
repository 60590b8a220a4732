__all__ = ["complex", "ring", "window"]
