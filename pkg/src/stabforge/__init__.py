"""Binary codes compiled into group presentations and synchronous games, with
numerical checks of their stability, closeness and value statements."""

__version__ = "0.1.0"
