"""Exception hierarchy shared by all uavfence modules."""


class GeofenceError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(GeofenceError):
    """A scalar argument is out of range or non-finite."""


class GeometryError(GeofenceError):
    """A geometry violates a structural invariant (open ring, too few points)."""


class DegenerateGeometryError(GeometryError):
    """A geometry has no usable area (collinear or duplicate vertices)."""


class UndefinedBearingError(GeometryError):
    """Bearing requested between coincident points."""


class SridMismatchError(GeofenceError):
    """Two geometries or a geometry and a projection disagree on SRID."""


class ProjectionError(GeofenceError):
    """A planar projection is undefined at the requested latitude."""


class GeoidModelError(GeofenceError):
    """The geoid separation lookup failed or returned an implausible value."""


class ParseError(GeofenceError):
    """Malformed textual input.

    ``line`` is set for line-oriented inputs (XML, config, UAV lines),
    ``offset`` for byte-offset inputs (WKT).
    """

    def __init__(self, message, line=None, offset=None):
        super().__init__(message)
        self.line = line
        self.offset = offset


class DanglingReferenceError(ParseError):
    """An OSM way references a node that is not in the document."""

    def __init__(self, message, way_id):
        super().__init__(message)
        self.way_id = way_id


class ConfigError(ParseError):
    """A known construction-file key carries an unparseable or out-of-bound value."""

    def __init__(self, message, key=None, line=None):
        super().__init__(message, line=line)
        self.key = key


class InvalidExtentError(GeofenceError):
    """A raster extent is degenerate (min >= max on an axis)."""


class LayerMismatchError(GeofenceError):
    """Two raster layers differ in size or extent and cannot be composited."""


class BenchPreconditionError(GeofenceError):
    """The benchmark harness was invoked without a loaded feature corpus."""
