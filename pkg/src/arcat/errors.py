"""Exception taxonomy shared by the library and the CLI exit code mapping."""


class PreconditionError(ValueError):
    """A mathematical precondition failed (CLI exit code 2)."""


class NotAdmissibleError(PreconditionError):
    """The ideal admits arbitrarily long surviving paths, proven by pumping."""


class CapExceededError(PreconditionError):
    """A search hit its configured cap before reaching a decision."""


class VerificationError(Exception):
    """A computed certificate failed its exact verification (CLI exit code 3)."""
