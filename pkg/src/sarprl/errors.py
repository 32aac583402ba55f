class InstanceTooLarge(ValueError):
    """An input exceeds the desk-scale limits of the exact solvers."""
