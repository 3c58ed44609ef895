# Copyright 2024 - GitHub user: fredericks1982

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
This module contains the geometric primitives of the network topology.

All the coordinates are expressed in meters (SI), the conversion from the
kilometers used by the configuration file happens at parse time.

Raises:
    TypeError: if a coordinate is not a real number.
    ValueError: if an altitude is negative or a rectangle has zero area.
"""

import math
from numbers import Real
from typing import Iterable

import numpy as np


class Position3D:
    """Represents a point of the 3D coordinate system.

    :property x: the x coordinate (m).
    :property y: the y coordinate (m).
    :property z: the altitude (m), never negative. Users have z = 0.
    """

    def __init__(self, x: float, y: float, z: float = 0.0):
        """Constructor for the Position3D class.

        :param x: the x coordinate (m).
        :param y: the y coordinate (m).
        :param z: the altitude (m, default 0).

        :raises TypeError: if a coordinate is not a real number.
        :raises ValueError: if the altitude is negative or a coordinate is not finite.
        """
        # Validate the input.
        for value in (x, y, z):
            if isinstance(value, bool) or not isinstance(value, Real):
                raise TypeError("The coordinates must be real numbers")
            if not math.isfinite(value):
                raise ValueError("The coordinates must be finite")
        if z < 0:
            raise ValueError("The altitude must be non-negative")

        self._x = float(x)
        self._y = float(y)
        self._z = float(z)

    @property
    def x(self) -> float:
        """Returns the x coordinate (m)."""
        return self._x

    @property
    def y(self) -> float:
        """Returns the y coordinate (m)."""
        return self._y

    @property
    def z(self) -> float:
        """Returns the altitude (m)."""
        return self._z

    def as_array(self) -> np.ndarray:
        """Returns the coordinates as a numpy array [x, y, z]."""
        return np.array([self._x, self._y, self._z])

    def moved_to(self, x: float, y: float) -> "Position3D":
        """Returns a copy of the position moved horizontally, same altitude."""
        return Position3D(x, y, self._z)

    def __str__(self) -> str:
        return (
            f"{type(self).__name__}: [{self.x / 1000:.3f}, {self.y / 1000:.3f}, "
            f"{self.z / 1000:.3f}] km"
        )

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.x!r},{self.y!r},{self.z!r})"

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and self.__repr__() == other.__repr__()

    def __ne__(self, other: object) -> bool:
        return not self.__eq__(other)

    def __hash__(self) -> int:
        return hash((type(self), self.__repr__()))

    @staticmethod
    def from_km(coordinates: Iterable[float]):
        """Creates a Position3D object from a [x, y, z] triple in kilometers.

        The altitude is optional: [x, y] creates a ground position.

        :param coordinates: the coordinates, in km.

        :raises ValueError: if the triple doesn't contain 2 or 3 values.
        """
        values = [float(value) * 1000.0 for value in coordinates]
        if len(values) not in (2, 3):
            raise ValueError("A position needs 2 or 3 coordinates")
        return Position3D(*values)


def distance(a: Position3D, b: Position3D) -> float:
    """Returns the Euclidean 3D distance between two positions (m)."""
    return math.dist((a.x, a.y, a.z), (b.x, b.y, b.z))


def pairwise_distances(sources: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Returns the (len(sources), len(targets)) matrix of 3D distances.

    :param sources: array of shape (S, 3).
    :param targets: array of shape (T, 3).
    """
    sources = np.asarray(sources, dtype=float).reshape(-1, 3)
    targets = np.asarray(targets, dtype=float).reshape(-1, 3)
    deltas = sources[:, None, :] - targets[None, :, :]
    return np.sqrt(np.sum(deltas * deltas, axis=-1))


def horizontal_distances(sources: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Same as pairwise_distances, ignoring the altitudes."""
    sources = np.asarray(sources, dtype=float).reshape(-1, 3)
    targets = np.asarray(targets, dtype=float).reshape(-1, 3)
    deltas = sources[:, None, :2] - targets[None, :, :2]
    return np.sqrt(np.sum(deltas * deltas, axis=-1))


class Rectangle:
    """Represents an axis-aligned rectangle of the ground plane (m).

    :property x_min, x_max, y_min, y_max: the rectangle bounds.
    :property area: the rectangle area (m^2).
    """

    def __init__(self, x_min: float, x_max: float, y_min: float, y_max: float):
        """Constructor for the Rectangle class.

        :raises ValueError: if the rectangle has zero (or negative) area.
        """
        if not (x_max > x_min and y_max > y_min):
            raise ValueError("The rectangle must have a positive area")

        self._x_min = float(x_min)
        self._x_max = float(x_max)
        self._y_min = float(y_min)
        self._y_max = float(y_max)

    @property
    def x_min(self) -> float:
        """Returns the lower x bound (m)."""
        return self._x_min

    @property
    def x_max(self) -> float:
        """Returns the upper x bound (m)."""
        return self._x_max

    @property
    def y_min(self) -> float:
        """Returns the lower y bound (m)."""
        return self._y_min

    @property
    def y_max(self) -> float:
        """Returns the upper y bound (m)."""
        return self._y_max

    @property
    def area(self) -> float:
        """Returns the rectangle area (m^2)."""
        return (self._x_max - self._x_min) * (self._y_max - self._y_min)

    def contains(self, x, y):
        """True where the point(s) lie inside the closed rectangle."""
        return (
            (x >= self._x_min)
            & (x <= self._x_max)
            & (y >= self._y_min)
            & (y <= self._y_max)
        )

    def clip(self, x: float, y: float) -> tuple[float, float]:
        """Returns the point clipped to the rectangle."""
        return (
            min(max(x, self._x_min), self._x_max),
            min(max(y, self._y_min), self._y_max),
        )

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}({self.x_min!r},{self.x_max!r},"
            f"{self.y_min!r},{self.y_max!r})"
        )

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and self.__repr__() == other.__repr__()

    def __hash__(self) -> int:
        return hash((type(self), self.__repr__()))

    @staticmethod
    def from_km(x_range: Iterable[float], y_range: Iterable[float]):
        """Creates a Rectangle from [min, max] ranges in kilometers."""
        x_min, x_max = (float(value) * 1000.0 for value in x_range)
        y_min, y_max = (float(value) * 1000.0 for value in y_range)
        return Rectangle(x_min, x_max, y_min, y_max)
