"""Room, antenna, and user coordinate model.

The room occupies x in [0, d1], y in [0, d2], z in [0, h]. A single
waveguide runs along the y axis at x = 0, z = h, and every pinching
antenna (PA) sits on it at [0, y_li, h]. Users are on the floor plane
at [x, y, 0].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError

__all__ = [
    "Room",
    "PaLayout",
    "UserPosition",
    "distance_3d",
    "even_pa_placement",
]


@dataclass(frozen=True)
class Room:
    """Axis-aligned room extents in meters."""

    d1: float
    d2: float
    h: float

    def __post_init__(self) -> None:
        for name in ("d1", "d2", "h"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"room.{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class PaLayout:
    """Ordered waveguide coordinates of the pinching antennas.

    Positions must be strictly increasing; at least two antennas are
    required because the lateration system has two unknowns.
    """

    y_positions: tuple[float, ...]

    def __post_init__(self) -> None:
        ys = tuple(float(y) for y in self.y_positions)
        object.__setattr__(self, "y_positions", ys)
        if len(ys) < 2:
            raise ConfigError(f"pas require count >= 2, got {len(ys)}")
        if any(b <= a for a, b in zip(ys, ys[1:])):
            raise ConfigError("pas.positions must be strictly increasing")

    @property
    def count(self) -> int:
        return len(self.y_positions)

    def validate_in_room(self, room: Room) -> None:
        for y in self.y_positions:
            if not 0 <= y <= room.d2:
                raise ConfigError(f"pas position {y} outside [0, {room.d2}]")


@dataclass(frozen=True)
class UserPosition:
    """Ground-truth user coordinate on the floor plane."""

    x: float
    y: float

    def validate_in_room(self, room: Room) -> None:
        if not 0 <= self.x <= room.d1:
            raise ConfigError(f"users.x {self.x} outside [0, {room.d1}]")
        if not 0 <= self.y <= room.d2:
            raise ConfigError(f"users.y {self.y} outside [0, {room.d2}]")


def distance_3d(pa_y: float, user: UserPosition, h: float) -> float:
    """Euclidean distance between the antenna at [0, pa_y, h] and the user.

    Parameters
    ----------
    pa_y : float
        Waveguide coordinate of the antenna in meters.
    user : UserPosition
        User coordinate on the floor plane.
    h : float
        Antenna height above the floor in meters.

    Returns
    -------
    float
        sqrt(x^2 + (pa_y - y)^2 + h^2), always >= h.
    """
    return math.sqrt(user.x ** 2 + (pa_y - user.y) ** 2 + h ** 2)


def even_pa_placement(room: Room, count: int, rule: str = "midpoint") -> PaLayout:
    """Distribute `count` antennas evenly along the waveguide.

    The midpoint rule places antenna i at (i - 0.5) * d2 / count,
    keeping every antenna off the room corners. The endpoint rule
    spans the full guide with y_li = (i - 1) * d2 / (count - 1).

    Parameters
    ----------
    room : Room
        Room providing the guide length d2.
    count : int
        Number of antennas, at least 2.
    rule : str
        "midpoint" (default) or "endpoint".

    Returns
    -------
    PaLayout
        Strictly increasing positions.
    """
    if count < 2:
        raise ConfigError(f"pas.count must be >= 2, got {count}")
    if rule == "midpoint":
        ys = tuple((i + 0.5) * room.d2 / count for i in range(count))
    elif rule == "endpoint":
        ys = tuple(i * room.d2 / (count - 1) for i in range(count))
    else:
        raise ConfigError(f"pas.placement must be 'midpoint' or 'endpoint', got {rule!r}")
    return PaLayout(ys)
