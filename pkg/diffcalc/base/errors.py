class DiffcalcError(Exception):
    """Root of every error raised by the interpreter."""
