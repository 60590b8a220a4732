__all__ = ["format", "logging", "serial"]
