"""Exception types shared across modules."""


class ServiceError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ServiceError):
    """Malformed or out-of-contract input."""


class AuthorizationError(ServiceError):
    """Missing, expired, or invalid credential. Deliberately unspecific."""


class DeliveryError(ServiceError):
    """The mail backend failed to hand off a message."""
