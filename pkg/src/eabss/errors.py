"""Exception hierarchy shared across the package."""


class EabssError(Exception):
    """Base class for all domain errors."""


# --- script parsing / binding ---

class EmptyScript(EabssError):
    pass


class UnterminatedBrace(EabssError):
    def __init__(self, line_no, text):
        super().__init__(f"line {line_no}: '{{' without matching '}}': {text!r}")
        self.line_no = line_no


class MissingSlot(EabssError):
    def __init__(self, slot):
        super().__init__(f"document lacks the {slot} case slot")
        self.slot = slot


# --- templates ---

class UnboundSlot(EabssError):
    def __init__(self, name):
        super().__init__(f"slot {name!r} is required but unbound")
        self.name = name


class InvalidCount(EabssError):
    pass


class EmptyTarget(EabssError):
    pass


# --- gateway ---

class GatewayError(EabssError):
    pass


class NetworkFailure(GatewayError):
    pass


class RateLimited(GatewayError):
    def __init__(self, retry_after=None):
        super().__init__(f"rate limited (retry after {retry_after})")
        self.retry_after = retry_after


class AuthFailure(GatewayError):
    pass


class TruncationUnresolved(GatewayError):
    pass


class ReplayMismatch(GatewayError):
    def __init__(self, index, detail=""):
        super().__init__(f"replay mismatch at exchange {index}: {detail}")
        self.index = index


# --- session engine ---

class StaticCheckFailed(EabssError):
    def __init__(self, diagnostics):
        keys = ", ".join(d.message for d in diagnostics)
        super().__init__(f"static check failed: {keys}")
        self.diagnostics = diagnostics


class SilentModeFailure(EabssError):
    pass


class UnknownKey(EabssError):
    def __init__(self, key):
        super().__init__(f"no memorised key {key}")
        self.key = key


class InvalidInState(EabssError):
    pass


# --- diagrams ---

class MissingHeader(EabssError):
    pass


class UnresolvedErrors(EabssError):
    pass


# --- report ---

class RaggedRow(EabssError):
    def __init__(self, line):
        super().__init__(f"table row has wrong cell count: {line!r}")
        self.line = line


class NoTableFound(EabssError):
    pass


class MissingSection(EabssError):
    def __init__(self, sections):
        super().__init__(f"report is missing sections: {', '.join(sections)}")
        self.sections = sections


class UnknownFormat(EabssError):
    pass
