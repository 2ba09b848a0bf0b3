"""Exception taxonomy shared across the platform."""


class TwinError(Exception):
    """Base class for all platform errors."""


# registry
class DuplicateId(TwinError):
    pass


class UnknownItem(TwinError):
    pass


class DuplicateAttribute(TwinError):
    pass


class UnknownAttribute(TwinError):
    pass


class InvalidBinding(TwinError):
    pass


class UnboundStream(TwinError):
    pass


class NonMonotonicTimestamp(TwinError):
    pass


class MalformedPayload(TwinError):
    pass


# bus
class OverlappingPattern(TwinError):
    pass


class NoRoute(TwinError):
    pass


class BadRequest(TwinError):
    pass


class ProducerFailure(TwinError):
    pass


class UnknownResource(TwinError):
    pass


# simulator / services
class UnknownCategory(TwinError):
    pass


class InfeasibleHorizon(TwinError):
    pass


class InfeasibleScenario(TwinError):
    pass


class UnknownTask(TwinError):
    pass


class OutOfOrderConfirmation(TwinError):
    pass


# search
class DuplicateDoc(TwinError):
    pass


class UnknownDoc(TwinError):
    pass


# stats
class TooFewObservations(TwinError):
    pass


class TooFewGroups(TwinError):
    pass


class InvalidDof(TwinError):
    pass


class DivisionByZero(TwinError):
    pass


# cli
class ConfigError(TwinError):
    pass


class PortInUse(TwinError):
    pass


class UnknownCampaign(TwinError):
    pass
