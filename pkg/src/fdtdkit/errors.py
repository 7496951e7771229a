"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: ValidationError (and
subclasses) exit 1, runtime failures such as InstabilityError or IO problems
exit 2.
"""


class ValidationError(ValueError):
    """Bad parameters, flags, or preconditions caught before any work runs."""


class ScriptError(ValidationError):
    """Transform script rejected; carries source position when known."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            where = "line %d" % line if col is None else "line %d, col %d" % (line, col)
            message = "%s: %s" % (where, message)
        super().__init__(message)


class InstabilityError(RuntimeError):
    """Field blow-up detected during stepping; carries the step index."""

    def __init__(self, step, detail):
        self.step = step
        super().__init__("instability detected at step %d: %s" % (step, detail))
