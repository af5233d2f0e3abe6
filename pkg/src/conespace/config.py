import os

DEFAULT_TOL = 1e-9
TOL_ENV = "CONESPACE_TOL"


def tolerance(override=None):
    """Classification tolerance: explicit override, then $CONESPACE_TOL, then 1e-9."""
    if override is not None:
        return float(override)
    raw = os.environ.get(TOL_ENV)
    if raw:
        try:
            return float(raw)
        except ValueError:
            pass
    return DEFAULT_TOL
