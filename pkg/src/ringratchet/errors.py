class RingRatchetError(Exception):
    """Base class for errors raised by this package."""


class InvalidArgument(RingRatchetError, ValueError):
    pass


class NumericalBlowup(RingRatchetError, ArithmeticError):
    """A solver produced non-finite values.

    ``step`` is the 1-based index of the offending step within the run,
    ``time`` the simulation time at that step.
    """

    def __init__(self, message, step=None, time=None, context=None):
        self.step = step
        self.time = time
        self.context = dict(context or {})
        details = []
        if step is not None:
            details.append(f"step={step}")
        if time is not None:
            details.append(f"t={time:.6g}")
        details.extend(f"{k}={v}" for k, v in self.context.items())
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)


class BracketError(InvalidArgument):
    """Both ends of a bisection bracket fall on the same branch."""
