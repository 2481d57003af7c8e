"""Exception types shared across the package."""


class ReptileError(Exception):
    """Base class for all errors raised by this package."""


class SingularMap(ReptileError):
    pass


class NotIsometry(ReptileError):
    pass


class NoUniqueFixedPoint(ReptileError):
    pass


class NotConvex(ReptileError):
    pass


class DepthTooShallow(ReptileError):
    pass


class BudgetExceeded(ReptileError):
    pass


class VertexBudgetExceeded(BudgetExceeded):
    def __init__(self, max_vertices):
        super().__init__(f"candidate graph exceeded {max_vertices} vertices")
        self.max_vertices = max_vertices


class NotPointNeighbor(ReptileError):
    pass


class NoEdgeNeighbors(ReptileError):
    pass


class NilpotentMatrix(ReptileError):
    pass


class NotStronglyConnected(ReptileError):
    pass


class SpecFormatError(ReptileError):
    pass


class UnknownGalleryName(ReptileError):
    pass
