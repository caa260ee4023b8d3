"""Exception types shared across the simulator."""


class ConfigError(ValueError):
    """Invalid configuration: cache geometry, policy thresholds, or workload spec."""


class TraceFormatError(ValueError):
    """A trace file line that does not match the expected format."""
