"""Points of Z^d and the finite box with a wired (sink) boundary.

The box of radius L in dimension d holds the (2L+1)^d lattice points with
every coordinate in [-L, L]; everything outside is collapsed to a single
sink vertex, and loop edges at the sink are dropped.  Every interior vertex
keeps exactly 2d incident edges counted with multiplicity: its interior
lattice neighbors plus one sink edge per lattice neighbor outside the box.

Interior vertices are indexed row-major over coordinates shifted by +L
(last axis fastest), so for d=1, L=1 the points (-1), (0), (1) get ids
0, 1, 2, and for d=2, L=1 the point (-1,-1) gets 0 and (1,1) gets 8.
The sink id is ``interior_count``.  This convention is part of the public
report format and must not change.
"""

from __future__ import annotations

Point = tuple  # d signed integer coordinates

DEFAULT_VERTEX_CAP = 2**31


class BoxTooLargeError(ValueError):
    """(2L+1)^d exceeds the configured vertex cap."""


class OutOfBoxError(ValueError):
    """A coordinate lies outside [-L, L]."""


class InvalidVertexError(ValueError):
    """Vertex id is not an interior vertex of the box."""


def origin(dim: int) -> Point:
    return (0,) * dim


def direction_step(dim: int, direction: int) -> Point:
    """Unit step for direction k: axis k//2, +1 if k is even else -1.

    Directions are enumerated +e1, -e1, +e2, -e2, ... everywhere in this
    package; walks and neighbor loops all share this order.
    """
    if not 0 <= direction < 2 * dim:
        raise ValueError(f"direction {direction} out of range for dim {dim}")
    step = [0] * dim
    step[direction >> 1] = 1 if (direction & 1) == 0 else -1
    return tuple(step)


def add_points(a: Point, b: Point) -> Point:
    return tuple(x + y for x, y in zip(a, b))


class BoxLattice:
    """The wired box: interior ids 0..(2L+1)^d - 1 plus one sink vertex."""

    def __init__(self, dim: int, radius: int, vertex_cap: int = DEFAULT_VERTEX_CAP):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        if radius < 1:
            raise ValueError(f"radius must be >= 1, got {radius}")
        width = 2 * radius + 1
        interior = width**dim  # exact python int, no overflow
        if interior > vertex_cap:
            raise BoxTooLargeError(
                f"box (2*{radius}+1)^{dim} = {interior} exceeds vertex cap {vertex_cap}"
            )
        self.dim = dim
        self.radius = radius
        self.width = width
        self.interior_count = interior
        self.sink = interior
        self._strides = tuple(width ** (dim - 1 - a) for a in range(dim))

    def __repr__(self):
        return f"BoxLattice(dim={self.dim}, radius={self.radius})"

    def contains(self, point: Point) -> bool:
        return len(point) == self.dim and all(abs(c) <= self.radius for c in point)

    def index_of(self, point: Point) -> int:
        """Row-major id of an interior point (+L shift, last axis fastest)."""
        if len(point) != self.dim:
            raise OutOfBoxError(f"point {point} has wrong dimension for {self}")
        idx = 0
        for c, s in zip(point, self._strides):
            if abs(c) > self.radius:
                raise OutOfBoxError(f"point {point} outside box of radius {self.radius}")
            idx += (c + self.radius) * s
        return idx

    def point_of(self, index: int) -> Point:
        """Inverse of index_of; round-trips exactly."""
        if not 0 <= index < self.interior_count:
            raise InvalidVertexError(f"vertex id {index} not interior in {self}")
        return tuple((index // s) % self.width - self.radius for s in self._strides)

    def origin_index(self) -> int:
        return (self.interior_count - 1) // 2

    def sink_multiplicity(self, v: int) -> int:
        """Number of the 2d lattice neighbors of v lying outside the box."""
        self._check_interior(v)
        mult = 0
        for s in self._strides:
            digit = (v // s) % self.width
            if digit == 0:
                mult += 1
            if digit == self.width - 1:
                mult += 1
        return mult

    def interior_neighbors(self, v: int) -> list[int]:
        """Ids of the lattice neighbors of v that stay inside the box."""
        self._check_interior(v)
        out = []
        for s in self._strides:
            digit = (v // s) % self.width
            if digit < self.width - 1:
                out.append(v + s)
            if digit > 0:
                out.append(v - s)
        return out

    def neighbors(self, v: int) -> list[int]:
        """Multiset of neighbors of v: interior ids plus the sink repeated.

        Enumerated in direction order (+e1, -e1, ...); total length is
        exactly 2d.
        """
        self._check_interior(v)
        out = []
        for s in self._strides:
            digit = (v // s) % self.width
            out.append(v + s if digit < self.width - 1 else self.sink)
            out.append(v - s if digit > 0 else self.sink)
        return out

    def neighbor_or_sink(self, v: int, direction: int) -> int:
        """Vertex reached from v by one step in the given direction."""
        s = self._strides[direction >> 1]
        digit = (v // s) % self.width
        if (direction & 1) == 0:
            return v + s if digit < self.width - 1 else self.sink
        return v - s if digit > 0 else self.sink

    def _check_interior(self, v: int) -> None:
        if not 0 <= v < self.interior_count:
            raise InvalidVertexError(f"vertex id {v} is not interior (sink or out of range)")


def make_box(d: int, L: int, vertex_cap: int = DEFAULT_VERTEX_CAP) -> BoxLattice:
    """Build the wired box of radius L in dimension d."""
    return BoxLattice(d, L, vertex_cap)
