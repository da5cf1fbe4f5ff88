"""Single-object physical layouts: storage kinds, extents, address math.

Logical (b, x, y, s) coordinates translate into physical object
coordinates per storage kind:

    1D buffer     ((s*H + y)*W + x)*B + b            (scalar texel index)
    2D texture    (x*B + b, y*S + s)
    3D texture    (x*B + b, y, s)

The D axis of 5D tensors folds next to B on the width axis,
u = (x*B + b)*D + d, which keeps the H axis free for texture zero-clamp.
All texel data is linearized row-major with width fastest.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, LayoutError, ShapeError
from .tensor import LogicalShape, LogicalTensor, DataType, F32


class StorageType(enum.Enum):
    BUFFER_1D = "buffer-1d"
    IMAGE_BUFFER_1D = "image-buffer-1d"
    TEXTURE_2D = "texture-2d"
    TEXTURE_3D = "texture-3d"
    TEXTURE_ARRAY_2D = "texture-array-2d"

    @classmethod
    def parse(cls, name: str) -> "StorageType":
        for st in cls:
            if st.value == name:
                return st
        raise LayoutError(f"unknown storage type {name!r}")


ALL_STORAGE_TYPES = tuple(StorageType)

# Linearization order (outermost first, lane C4 innermost) per storage kind.
_CANONICAL_PERMUTATION: dict[StorageType, tuple[str, ...]] = {
    StorageType.BUFFER_1D: ("S", "H", "W", "B", "D", "C4"),
    StorageType.IMAGE_BUFFER_1D: ("S", "H", "W", "B", "D", "C4"),
    StorageType.TEXTURE_2D: ("H", "S", "W", "B", "D", "C4"),
    StorageType.TEXTURE_3D: ("S", "H", "W", "B", "D", "C4"),
    StorageType.TEXTURE_ARRAY_2D: ("S", "H", "W", "B", "D", "C4"),
}

# Published layout names.  DSHWBC4 names the buffer / 3D-texture family,
# HSWBDC4 the 2D-texture family; with D folded beside B the two coincide
# with the canonical permutations above whenever D = 1.
_NAMED_LAYOUTS: dict[str, tuple[StorageType, ...]] = {
    "DSHWBC4": (
        StorageType.BUFFER_1D,
        StorageType.IMAGE_BUFFER_1D,
        StorageType.TEXTURE_3D,
        StorageType.TEXTURE_ARRAY_2D,
    ),
    "HSWBDC4": (StorageType.TEXTURE_2D,),
}


@dataclass(frozen=True)
class LayoutDescriptor:
    """Storage kind plus the axis permutation and slice geometry of a tensor."""

    storage: StorageType
    permutation: tuple[str, ...]
    channels: int

    def __post_init__(self):
        if sorted(self.permutation) != sorted(("B", "H", "W", "D", "S", "C4")):
            raise LayoutError(f"bad permutation {self.permutation}")
        if self.permutation[-1] != "C4":
            raise LayoutError("C4 must be the innermost axis")

    @property
    def slices(self) -> int:
        return -(-self.channels // 4)

    @property
    def tail_lanes(self) -> int:
        """Valid lanes in the last slice (4 when channels divide evenly)."""
        return self.channels - 4 * (self.slices - 1)

    @classmethod
    def canonical(cls, storage: StorageType, channels: int) -> "LayoutDescriptor":
        return cls(storage, _CANONICAL_PERMUTATION[storage], channels)

    @classmethod
    def from_name(cls, name: str, storage: StorageType, channels: int) -> "LayoutDescriptor":
        kinds = _NAMED_LAYOUTS.get(name.upper())
        if kinds is None:
            raise LayoutError(f"unknown layout name {name!r}")
        if storage not in kinds:
            raise LayoutError(f"layout {name} does not apply to {storage.value}")
        return cls.canonical(storage, channels)


@dataclass(frozen=True)
class PhysicalExtent:
    """Texel extents, outermost dim first (width always last)."""

    dims: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= len(self.dims) <= 3:
            raise LayoutError(f"extent needs 1-3 dims, got {self.dims}")
        if any(d < 1 for d in self.dims):
            raise LayoutError(f"extent dims must be positive, got {self.dims}")

    @property
    def width(self) -> int:
        return self.dims[-1]

    @property
    def height(self) -> int:
        return self.dims[-2] if len(self.dims) >= 2 else 1

    @property
    def depth(self) -> int:
        return self.dims[-3] if len(self.dims) >= 3 else 1

    @property
    def texel_count(self) -> int:
        n = 1
        for d in self.dims:
            n *= d
        return n


def physical_extent(shape: LogicalShape, storage: StorageType) -> PhysicalExtent:
    """Texel extents of the single physical object realizing ``shape``."""
    b, h, w, d, _ = shape.extents()
    s = shape.slices
    if storage in (StorageType.BUFFER_1D, StorageType.IMAGE_BUFFER_1D):
        return PhysicalExtent((b * h * w * d * s,))
    if storage is StorageType.TEXTURE_2D:
        return PhysicalExtent((h * s, w * b * d))
    if storage is StorageType.TEXTURE_3D:
        return PhysicalExtent((s, h, w * b * d))
    if storage is StorageType.TEXTURE_ARRAY_2D:
        return PhysicalExtent((s, h, w * b * d))
    raise LayoutError(f"unknown storage {storage}")


def _check_range(name: str, value: int, limit: int) -> None:
    if not 0 <= value < limit:
        raise BoundsError(f"{name}={value} out of [0, {limit})")


def translate_coords(
    b: int, x: int, y: int, s: int, shape: LogicalShape, storage: StorageType
) -> int | tuple[int, ...]:
    """Translate logical (b, x, y, s) into physical coordinates (D must be 1).

    Returns a scalar texel index for buffer kinds, (u, v) for 2D textures
    and (u, v, w) for 3D textures.
    """
    if shape.d != 1:
        raise ShapeError("translate_coords covers 4D tensors; use texel_coords for D > 1")
    _check_range("b", b, shape.b)
    _check_range("x", x, shape.w)
    _check_range("y", y, shape.h)
    _check_range("s", s, shape.slices)
    if storage in (StorageType.BUFFER_1D, StorageType.IMAGE_BUFFER_1D):
        return ((s * shape.h + y) * shape.w + x) * shape.b + b
    if storage is StorageType.TEXTURE_2D:
        return (x * shape.b + b, y * shape.slices + s)
    if storage is StorageType.TEXTURE_3D:
        return (x * shape.b + b, y, s)
    raise LayoutError(f"translate_coords undefined for {storage.value}")


def texel_coords(
    shape: LogicalShape,
    storage: StorageType,
    b: int,
    y: int,
    x: int,
    d: int,
    s: int,
) -> tuple[int, ...]:
    """Generalized translation including the D axis, as (outer..., width) dims.

    The returned tuple indexes the extent of ``physical_extent`` directly
    (same dim order), with u = (x*B + b)*D + d on the width axis.
    """
    u = (x * shape.b + b) * shape.d + d
    if storage in (StorageType.BUFFER_1D, StorageType.IMAGE_BUFFER_1D):
        idx = (((s * shape.h + y) * shape.w + x) * shape.b + b) * shape.d + d
        return (idx,)
    if storage is StorageType.TEXTURE_2D:
        return (y * shape.slices + s, u)
    if storage in (StorageType.TEXTURE_3D, StorageType.TEXTURE_ARRAY_2D):
        return (s, y, u)
    raise LayoutError(f"unknown storage {storage}")


def texel_linear_index(extent: PhysicalExtent, coords: tuple[int, ...]) -> int:
    """Row-major (width fastest) flat index of a texel coordinate tuple."""
    if len(coords) != len(extent.dims):
        raise BoundsError(f"coords {coords} do not match extent {extent.dims}")
    idx = 0
    for coord, dim in zip(coords, extent.dims):
        if not 0 <= coord < dim:
            raise BoundsError(f"texel coord {coords} out of extent {extent.dims}")
        idx = idx * dim + coord
    return idx


@dataclass
class PackedObject:
    """One physical object: descriptor, extent and flat 4-lane texel data."""

    descriptor: LayoutDescriptor
    extent: PhysicalExtent
    data: np.ndarray  # (texel_count, 4) float32

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float32).reshape(-1, 4)
        if self.data.shape[0] != self.extent.texel_count:
            raise ShapeError(
                f"{self.data.shape[0]} texels for extent {self.extent.dims}"
            )

    def texel(self, coords: tuple[int, ...]) -> np.ndarray:
        return self.data[texel_linear_index(self.extent, coords)]


def _coordinate_grids(shape: LogicalShape):
    """Flat b, h, w, d, c index arrays in canonical element order."""
    idx = np.arange(shape.element_count, dtype=np.int64)
    c = idx % shape.c
    idx //= shape.c
    d = idx % shape.d
    idx //= shape.d
    w = idx % shape.w
    idx //= shape.w
    h = idx % shape.h
    b = idx // shape.h
    return b, h, w, d, c


def _linear_texel_indices(
    shape: LogicalShape, storage: StorageType, b, h, w, d, s
) -> np.ndarray:
    """Vectorized texel_coords + texel_linear_index (same arithmetic)."""
    u = (w * shape.b + b) * shape.d + d
    wbd = shape.w * shape.b * shape.d
    slices = shape.slices
    if storage in (StorageType.BUFFER_1D, StorageType.IMAGE_BUFFER_1D):
        return (((s * shape.h + h) * shape.w + w) * shape.b + b) * shape.d + d
    if storage is StorageType.TEXTURE_2D:
        return (h * slices + s) * wbd + u
    if storage in (StorageType.TEXTURE_3D, StorageType.TEXTURE_ARRAY_2D):
        return (s * shape.h + h) * wbd + u
    raise LayoutError(f"unknown storage {storage}")


def pack(tensor: LogicalTensor, descriptor: LayoutDescriptor) -> PackedObject:
    """Pack a logical tensor into one physical object.

    Element (b, h, w, d, c) lands in the texel addressed by the
    coordinate-translation rules at lane c mod 4; padding lanes are zero.
    """
    shape = tensor.shape
    if descriptor.channels != shape.c:
        raise ShapeError(
            f"descriptor channels {descriptor.channels} != tensor c {shape.c}"
        )
    extent = physical_extent(shape, descriptor.storage)
    data = np.zeros((extent.texel_count, 4), dtype=np.float32)
    b, h, w, d, c = _coordinate_grids(shape)
    texels = _linear_texel_indices(shape, descriptor.storage, b, h, w, d, c // 4)
    data[texels, c % 4] = tensor.values
    return PackedObject(descriptor, extent, data)


def unpack(obj: PackedObject, shape: LogicalShape, dtype: DataType = F32) -> LogicalTensor:
    """Inverse of pack: recover the logical tensor from a packed object."""
    expected = physical_extent(shape, obj.descriptor.storage)
    if expected != obj.extent:
        raise ShapeError(
            f"object extent {obj.extent.dims} does not match shape "
            f"(expected {expected.dims})"
        )
    if obj.descriptor.channels != shape.c:
        raise ShapeError(
            f"descriptor channels {obj.descriptor.channels} != shape c {shape.c}"
        )
    b, h, w, d, c = _coordinate_grids(shape)
    texels = _linear_texel_indices(shape, obj.descriptor.storage, b, h, w, d, c // 4)
    values = obj.data[texels, c % 4]
    return LogicalTensor(shape, dtype, values)


def read_element(
    obj: PackedObject, shape: LogicalShape, b: int, h: int, w: int, d: int, c: int
) -> float:
    """Read one logical element; channels at or past shape.c read as padding 0."""
    if c >= shape.padded_c:
        raise BoundsError(f"c={c} beyond padded channel count {shape.padded_c}")
    coords = texel_coords(shape, obj.descriptor.storage, b, h, w, d, c // 4)
    return float(obj.texel(coords)[c % 4])
