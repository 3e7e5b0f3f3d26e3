"""quantdesk: an event-driven, walk-forward multi-agent trading desk simulator."""

__version__ = "0.1.0"
