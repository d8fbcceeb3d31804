"""Exception types shared across the simulator."""


class VecSimError(Exception):
    """Base class for all simulator errors."""


class ConfigError(VecSimError):
    """Invalid configuration, unknown names, or malformed input files."""


class WorkloadError(ConfigError):
    """Malformed or inconsistent workload data."""


class CapacityError(VecSimError):
    """Admission onto a node with no free core (engine or policy bug)."""
