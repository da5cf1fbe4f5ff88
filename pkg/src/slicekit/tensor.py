"""Logical tensors: axis semantics, data types, slice arithmetic, padding.

A logical tensor is a rank 0-5 array whose axes carry fixed meanings
(batch, height, width, depth, channel).  Channels are grouped into
4-element slices for SIMD-friendly storage; tensors whose channel count
is not a multiple of 4 are zero-padded up to the next slice boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, InvalidExtentError, ShapeError, UnsupportedRankError

AXIS_NAMES = ("B", "H", "W", "D", "C")

# Fixed axis assignment per rank: scalar, linear, HW, HWC, BHWC, BHWDC.
_RANK_AXES: dict[int, tuple[str, ...]] = {
    0: (),
    1: ("C",),
    2: ("H", "W"),
    3: ("H", "W", "C"),
    4: ("B", "H", "W", "C"),
    5: ("B", "H", "W", "D", "C"),
}


@dataclass(frozen=True)
class AxisSemantics:
    rank: int
    axes: tuple[str, ...]


def axis_semantics(rank: int) -> AxisSemantics:
    """Return the fixed axis meaning for a tensor of the given rank.

    The 1D axis is treated as C so that linear tensors participate in
    slice packing like any other channel axis.
    """
    if rank not in _RANK_AXES:
        raise UnsupportedRankError(f"rank must be in [0, 5], got {rank}")
    return AxisSemantics(rank=rank, axes=_RANK_AXES[rank])


def slice_count(c: int) -> int:
    """Number of 4-channel slices needed to hold ``c`` channels."""
    if c <= 0:
        raise InvalidExtentError(f"channel count must be >= 1, got {c}")
    return -(-c // 4)


@dataclass(frozen=True)
class LogicalShape:
    """Extents along the five logical axes; absent axes are fixed at 1."""

    b: int = 1
    h: int = 1
    w: int = 1
    d: int = 1
    c: int = 1
    rank: int = 5

    def __post_init__(self):
        for name, extent in zip(AXIS_NAMES, self.extents()):
            if extent < 1:
                raise InvalidExtentError(f"extent {name}={extent} must be >= 1")
        if self.rank not in _RANK_AXES:
            raise UnsupportedRankError(f"rank must be in [0, 5], got {self.rank}")
        present = _RANK_AXES[self.rank]
        for name, extent in zip(AXIS_NAMES, self.extents()):
            if name not in present and extent != 1:
                raise ShapeError(
                    f"rank-{self.rank} shape has no {name} axis but {name}={extent}"
                )

    @classmethod
    def from_dims(cls, dims: tuple[int, ...]) -> "LogicalShape":
        """Build a shape from rank-length extents, e.g. (2, 3, 5) -> H,W,C."""
        axes = axis_semantics(len(dims)).axes
        kwargs = {name.lower(): extent for name, extent in zip(axes, dims)}
        return cls(rank=len(dims), **kwargs)

    def extents(self) -> tuple[int, int, int, int, int]:
        return (self.b, self.h, self.w, self.d, self.c)

    def dims(self) -> tuple[int, ...]:
        """Rank-length extents in axis order (inverse of from_dims)."""
        axes = _RANK_AXES[self.rank]
        by_name = dict(zip(AXIS_NAMES, self.extents()))
        return tuple(by_name[a] for a in axes)

    @property
    def element_count(self) -> int:
        return self.b * self.h * self.w * self.d * self.c

    @property
    def slices(self) -> int:
        return slice_count(self.c)

    @property
    def padded_c(self) -> int:
        return 4 * self.slices

    @property
    def padded_element_count(self) -> int:
        return self.b * self.h * self.w * self.d * self.padded_c


_DTYPE_BITS = {"f32": 32, "f16": 16, "i8": 8, "i4": 4}

# Symmetric integer ranges; -128/-8 are reserved so dequantization stays
# sign-symmetric.
_DTYPE_QMAX = {"i8": 127, "i4": 7}


@dataclass(frozen=True)
class DataType:
    kind: str
    bits: int = field(default=0)

    def __post_init__(self):
        if self.kind not in _DTYPE_BITS:
            raise ShapeError(f"unknown dtype kind {self.kind!r}")
        if self.bits == 0:
            object.__setattr__(self, "bits", _DTYPE_BITS[self.kind])
        elif self.bits != _DTYPE_BITS[self.kind]:
            raise ShapeError(f"dtype {self.kind} has {_DTYPE_BITS[self.kind]} bits")

    @property
    def qmax(self) -> int | None:
        return _DTYPE_QMAX.get(self.kind)

    def byte_size(self, count: int) -> int:
        return -(-count * self.bits // 8)


F32 = DataType("f32")
F16 = DataType("f16")
I8 = DataType("i8")
I4 = DataType("i4")


def round_to_f16(values: np.ndarray) -> np.ndarray:
    """Round float32 values to the nearest-even float16, kept as float32."""
    return np.asarray(values, dtype=np.float16).astype(np.float32)


@dataclass
class LogicalTensor:
    """Shape, dtype and flat element data in B-major B,H,W,D,C order.

    Values are held as float32.  f16 tensors round their values to the
    nearest representable half on construction; integer dtypes hold exact
    small integers.  Instances are treated as immutable after construction.
    """

    shape: LogicalShape
    dtype: DataType = F32
    values: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.values is None:
            self.values = np.zeros(self.shape.element_count, dtype=np.float32)
        self.values = np.asarray(self.values, dtype=np.float32).reshape(-1)
        if self.values.size != self.shape.element_count:
            raise ShapeError(
                f"{self.values.size} values for shape with "
                f"{self.shape.element_count} elements"
            )
        if self.dtype.kind == "f16":
            self.values = round_to_f16(self.values)
        qmax = self.dtype.qmax
        if qmax is not None and self.values.size and np.abs(self.values).max() > qmax:
            raise DataError(
                f"{self.dtype.kind} values must lie in [-{qmax}, {qmax}]"
            )

    @classmethod
    def from_array(cls, array: np.ndarray, dtype: DataType = F32) -> "LogicalTensor":
        array = np.asarray(array, dtype=np.float32)
        return cls(LogicalShape.from_dims(array.shape), dtype, array.reshape(-1))

    def to_array(self) -> np.ndarray:
        """Values as a rank-length ndarray (axis order per axis_semantics)."""
        return self.values.reshape(self.shape.dims())

    def to_array5d(self) -> np.ndarray:
        return self.values.reshape(self.shape.extents())

    def at(self, b: int, h: int, w: int, d: int, c: int) -> float:
        s = self.shape
        for name, coord, extent in zip(
            AXIS_NAMES, (b, h, w, d, c), s.extents()
        ):
            if not 0 <= coord < extent:
                raise ShapeError(f"coordinate {name}={coord} out of [0, {extent})")
        idx = (((b * s.h + h) * s.w + w) * s.d + d) * s.c + c
        return float(self.values[idx])


def pad_channels(tensor: LogicalTensor) -> LogicalTensor:
    """Zero-pad the channel axis up to the next multiple of 4.

    Original values keep their (b, h, w, d, c) coordinates; new lanes are
    exact zero.  Idempotent.
    """
    shape = tensor.shape
    padded_c = shape.padded_c
    if padded_c == shape.c:
        return tensor
    grid = tensor.to_array5d()
    pad = [(0, 0)] * 4 + [(0, padded_c - shape.c)]
    padded = np.pad(grid, pad, mode="constant", constant_values=0.0)
    rank = shape.rank
    if "C" not in _RANK_AXES[rank]:  # scalar -> [C], HW -> HWC
        rank = 1 if rank == 0 else 3
    new_shape = LogicalShape(shape.b, shape.h, shape.w, shape.d, padded_c, rank)
    return LogicalTensor(new_shape, tensor.dtype, padded.reshape(-1))


def element_index(shape: LogicalShape, b: int, h: int, w: int, d: int, c: int) -> int:
    """Flat index of (b,h,w,d,c) in canonical B-major order."""
    return (((b * shape.h + h) * shape.w + w) * shape.d + d) * shape.c + c
