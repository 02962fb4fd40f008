"""vtimeline: turn long first-person video into auditable window-level
timelines of operational context and motion intensity."""

__version__ = "0.1.0"
