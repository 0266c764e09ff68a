"""Exception types shared across the package."""


class HarmlabError(Exception):
    """Base class for all errors raised by harmlab."""


class OutsideDisk(HarmlabError, ValueError):
    pass


class SlopeTooLarge(HarmlabError, ValueError):
    pass


class EmptyPath(HarmlabError, ValueError):
    pass


class ZeroOnPath(HarmlabError, ArithmeticError):
    pass


class BranchJump(HarmlabError, ArithmeticError):
    pass


class DegreeTooHigh(HarmlabError, ValueError):
    pass


class NonUniformGrid(HarmlabError, ValueError):
    pass


class BadParam(HarmlabError, ValueError):
    pass


class UnknownGallery(HarmlabError, KeyError):
    pass


class ZeroOnContour(HarmlabError, ArithmeticError):
    pass


class NonSimpleContour(HarmlabError, ValueError):
    pass


class BadEps(HarmlabError, ValueError):
    pass


class ArcsinDomain(HarmlabError, ValueError):
    pass


class TanBlowup(HarmlabError, ArithmeticError):
    pass


class EmptyInput(HarmlabError, ValueError):
    pass
