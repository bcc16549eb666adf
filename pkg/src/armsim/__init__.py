"""Serial-manipulator kinematics engine and teaching simulator.

The package splits into a pure math core (transforms, model, fk, ik), a
session layer that turns the core into an event-sourced teaching simulator,
and two thin shells: a click CLI and a FastAPI service streaming session
state over websockets.
"""

from __future__ import annotations

__version__ = "0.1.0"
