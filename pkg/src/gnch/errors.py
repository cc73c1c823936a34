"""Exception hierarchy.

Every error carries a stable ``code`` string so the harness can report it
without parsing messages.
"""


class GnchError(Exception):
    code = "GNCH_ERROR"

    def __init__(self, message="", **details):
        super().__init__(message or self.code)
        self.details = details


class NuNonpositive(GnchError):
    code = "NU_NONPOSITIVE"


class NutNonpositive(GnchError):
    code = "NUT_NONPOSITIVE"


class H1Violated(GnchError):
    code = "H1_VIOLATED"


class H2Violated(GnchError):
    code = "H2_VIOLATED"


class NoConvergence(GnchError):
    code = "NO_CONVERGENCE"


class SingularSymbol(GnchError):
    code = "SINGULAR_SYMBOL"


class ConditionLost(GnchError):
    code = "CONDITION_LOST"

    def __init__(self, message="", t=None, **details):
        super().__init__(message, t=t, **details)
        self.t = t


class Blowup(GnchError):
    code = "BLOWUP"

    def __init__(self, message="", t=None, **details):
        super().__init__(message, t=t, **details)
        self.t = t


class ZeroState(GnchError):
    code = "ZERO_STATE"


class Degenerate(GnchError):
    code = "DEGENERATE"


class Mismatch(GnchError):
    code = "MISMATCH"


class ConfigInvalid(GnchError):
    code = "CONFIG_INVALID"


class RegimeViolation(GnchError):
    code = "REGIME_VIOLATION"
