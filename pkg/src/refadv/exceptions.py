"""Exception hierarchy shared across the package."""


class MdpError(ValueError):
    """Base class for malformed or unusable MDP descriptions."""


class BadDimensions(MdpError):
    pass


class RowNotStochastic(MdpError):
    def __init__(self, where, total, kind="transition"):
        self.where = where
        self.total = total
        super().__init__(f"{kind} row at {where} sums to {total!r}, expected 1")


class RewardOutOfRange(MdpError):
    def __init__(self, where, value):
        self.where = where
        self.value = value
        super().__init__(f"reward at (h,s,a)={where} is {value!r}, outside [0, 1]")


class DegenerateMdp(MdpError):
    """Raised when every action is optimal everywhere (no positive gap)."""


class GenerationFailed(MdpError):
    pass


class InvalidConfig(ValueError):
    pass


class MissingField(InvalidConfig):
    def __init__(self, name):
        self.name = name
        super().__init__(f"missing required field {name!r}")


class OutOfRange(InvalidConfig):
    def __init__(self, name, value=None, reason=""):
        self.name = name
        self.value = value
        msg = f"field {name!r} out of range: {value!r}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class TooShort(ValueError):
    pass
