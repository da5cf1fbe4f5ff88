"""Tensor virtualization: one logical tensor backed by N physical objects.

Two static index rules are provided.  Activation tensors split along the
slice axis, object k holding a contiguous run of slices.  Weight tensors
in OHWI / OHWDI order rearrange into per-(O-slice, I-slice) 2D textures:
each object is an (o4 x hwd) texel grid whose lanes run over i4, the
layout a convolution kernel reads as a texture array.

Resolution from logical coordinates to (object, address, lane) is pure
arithmetic over the descriptors; no per-element tables are built.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BoundsError,
    DegenerateSplitError,
    InvalidGroupingError,
    LayoutError,
    ShapeError,
)
from .layout import (
    LayoutDescriptor,
    PackedObject,
    PhysicalExtent,
    StorageType,
    pack,
    physical_extent,
    texel_coords,
    texel_linear_index,
)
from .tensor import LogicalShape, LogicalTensor, slice_count

WEIGHT_AXIS_TOKENS = ("G", "S_O", "O4", "HWD", "S_I", "I4")
DEFAULT_WEIGHT_PERMUTATION = WEIGHT_AXIS_TOKENS


@dataclass(frozen=True)
class WeightShape:
    """Convolution / fully-connected weight extents (output, spatial, input)."""

    o: int
    h: int = 1
    w: int = 1
    d: int = 1
    i: int = 1

    def __post_init__(self):
        for name, extent in zip("ohwdi", (self.o, self.h, self.w, self.d, self.i)):
            if extent < 1:
                raise ShapeError(f"weight extent {name}={extent} must be >= 1")

    @property
    def hwd(self) -> int:
        return self.h * self.w * self.d

    @property
    def element_count(self) -> int:
        return self.o * self.hwd * self.i

    @classmethod
    def from_logical(cls, shape: LogicalShape) -> "WeightShape":
        """Reinterpret BHWDC extents as OHWDI (O <- B, I <- C)."""
        return cls(o=shape.b, h=shape.h, w=shape.w, d=shape.d, i=shape.c)


@dataclass(frozen=True)
class WeightLayout:
    """Grouped slice decomposition of a weight tensor.

    g * s_o always equals the number of O-axis slices; o4 and i4 are the
    4-element lanes inside an O and I slice.
    """

    shape: WeightShape
    g: int
    s_o: int
    s_i: int
    permutation: tuple[str, ...] = DEFAULT_WEIGHT_PERMUTATION

    o4: int = 4
    i4: int = 4

    @property
    def hwd(self) -> int:
        return self.shape.hwd

    @property
    def o_slices(self) -> int:
        return self.g * self.s_o

    @property
    def padded_o(self) -> int:
        return 4 * self.o_slices

    @property
    def padded_i(self) -> int:
        return 4 * self.s_i

    @property
    def object_count(self) -> int:
        return self.o_slices * self.s_i


def plan_weight_layout(
    shape: WeightShape,
    g: int = 1,
    permutation: tuple[str, ...] = DEFAULT_WEIGHT_PERMUTATION,
) -> WeightLayout:
    """Plan the (G, S_O, O4, HWD, S_I, I4) decomposition of a weight tensor.

    ``g`` must divide the O-axis slice count.  Only the canonical
    permutation is realizable by rearrange_weights; it is validated here
    so a bad plan fails before any data moves.
    """
    if g < 1:
        raise InvalidGroupingError(f"group count must be >= 1, got {g}")
    perm = tuple(permutation)
    if sorted(perm) != sorted(WEIGHT_AXIS_TOKENS):
        raise LayoutError(f"weight permutation must order {WEIGHT_AXIS_TOKENS}")
    if perm != DEFAULT_WEIGHT_PERMUTATION:
        raise LayoutError(
            f"unsupported weight permutation {perm}; only "
            f"{DEFAULT_WEIGHT_PERMUTATION} is realizable"
        )
    o_slices = slice_count(shape.o)
    if o_slices % g != 0:
        raise InvalidGroupingError(
            f"group count {g} does not divide O slice count {o_slices}"
        )
    return WeightLayout(
        shape=shape,
        g=g,
        s_o=o_slices // g,
        s_i=slice_count(shape.i),
        permutation=perm,
    )


@dataclass(frozen=True)
class SliceSplitRule:
    """Activation split: object k holds slices [k*chunk, (k+1)*chunk)."""

    shape: LogicalShape
    storage: StorageType
    chunk: int
    objects: int

    @property
    def total_slices(self) -> int:
        return self.shape.slices

    def object_shape(self, k: int) -> LogicalShape:
        s = self.shape
        lo = k * self.chunk
        hi = min((k + 1) * self.chunk, s.slices)
        channels = min(s.c, hi * 4) - lo * 4
        return LogicalShape(s.b, s.h, s.w, s.d, channels, s.rank)

    def locate(self, b: int, h: int, w: int, d: int, c: int) -> tuple[int, int, int]:
        s = self.shape
        for name, coord, extent in zip("bhwdc", (b, h, w, d, c), s.extents()):
            if not 0 <= coord < extent:
                raise BoundsError(f"{name}={coord} out of [0, {extent})")
        sl = c // 4
        k = sl // self.chunk
        local_shape = self.object_shape(k)
        coords = texel_coords(local_shape, self.storage, b, h, w, d, sl - k * self.chunk)
        addr = texel_linear_index(physical_extent(local_shape, self.storage), coords)
        return k, addr, c % 4


@dataclass(frozen=True)
class WeightPairRule:
    """Weight split: object for O-slice so and I-slice si is so*S_I + si."""

    layout: WeightLayout

    def locate(self, o: int, h: int, w: int, d: int, i: int) -> tuple[int, int, int]:
        shape = self.layout.shape
        for name, coord, extent in zip(
            "ohwdi", (o, h, w, d, i), (shape.o, shape.h, shape.w, shape.d, shape.i)
        ):
            if not 0 <= coord < extent:
                raise BoundsError(f"{name}={coord} out of [0, {extent})")
        hwd_idx = (h * shape.w + w) * shape.d + d
        obj = (o // 4) * self.layout.s_i + (i // 4)
        addr = hwd_idx * 4 + (o % 4)  # texel grid: y = hwd, x = o4
        return obj, addr, i % 4


@dataclass
class PhysicalObjectSet:
    """Ordered physical objects plus the static logical->physical rule."""

    objects: list[PackedObject]
    rule: SliceSplitRule | WeightPairRule

    def resolve(self, b: int, h: int, w: int, d: int, c: int) -> tuple[int, int, int]:
        return self.rule.locate(b, h, w, d, c)

    def read(self, b: int, h: int, w: int, d: int, c: int) -> float:
        obj, addr, lane = self.resolve(b, h, w, d, c)
        return float(self.objects[obj].data[addr, lane])


def resolve(coords: tuple[int, int, int, int, int], objset: PhysicalObjectSet):
    """Map logical (b,h,w,d,c) -- (o,h,w,d,i) for weights -- to storage."""
    return objset.resolve(*coords)


def virtualize(
    tensor: LogicalTensor, storage: StorageType, objects: int
) -> PhysicalObjectSet:
    """Split an activation tensor slice-wise across ``objects`` objects."""
    if objects < 1:
        raise DegenerateSplitError(f"object count must be >= 1, got {objects}")
    total = tensor.shape.slices
    if objects > total:
        raise DegenerateSplitError(
            f"cannot split {total} slice(s) across {objects} objects"
        )
    chunk = -(-total // objects)
    if chunk * (objects - 1) >= total:
        raise DegenerateSplitError(
            f"contiguous chunks of {chunk} slices leave an empty object "
            f"({total} slices across {objects} objects)"
        )
    rule = SliceSplitRule(tensor.shape, storage, chunk, objects)
    grid = tensor.to_array5d()
    packed: list[PackedObject] = []
    for k in range(objects):
        local_shape = rule.object_shape(k)
        lo = k * chunk * 4
        sub = grid[:, :, :, :, lo : lo + local_shape.c]
        local = LogicalTensor(local_shape, tensor.dtype, np.ascontiguousarray(sub).reshape(-1))
        packed.append(pack(local, LayoutDescriptor.canonical(storage, local_shape.c)))
    return PhysicalObjectSet(packed, rule)


def rearrange_weights(weights: LogicalTensor, layout: WeightLayout) -> PhysicalObjectSet:
    """Rearrange OHWI / OHWDI weights into per-slice-pair 2D textures.

    Object so*S_I + si holds the 4 output channels of O-slice so against
    the 4 input channels of I-slice si: texel (x=o4, y=hwd) with i4 lanes.
    Padded positions are exact zero.
    """
    wshape = WeightShape.from_logical(weights.shape)
    if wshape != layout.shape:
        raise ShapeError(f"layout planned for {layout.shape}, got {wshape}")
    padded = np.zeros(
        (layout.padded_o, wshape.h, wshape.w, wshape.d, layout.padded_i),
        dtype=np.float32,
    )
    padded[: wshape.o, :, :, :, : wshape.i] = weights.to_array5d()
    # (o_slices, o4, hwd, s_i, i4) -> per (o_slice, s_i): texels (hwd*4, i4)
    block = padded.reshape(layout.o_slices, 4, layout.hwd, layout.s_i, 4)
    objects: list[PackedObject] = []
    extent = PhysicalExtent((layout.hwd, 4))
    descriptor = LayoutDescriptor.canonical(StorageType.TEXTURE_2D, layout.padded_i)
    for so in range(layout.o_slices):
        for si in range(layout.s_i):
            texels = block[so, :, :, si, :].transpose(1, 0, 2).reshape(-1, 4)
            objects.append(PackedObject(descriptor, extent, texels))
    return PhysicalObjectSet(objects, WeightPairRule(layout))
