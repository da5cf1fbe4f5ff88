import itertools

import numpy as np
import pytest

from slicekit.errors import BoundsError, LayoutError, ShapeError
from slicekit.layout import (
    ALL_STORAGE_TYPES,
    LayoutDescriptor,
    PackedObject,
    StorageType,
    pack,
    physical_extent,
    read_element,
    texel_coords,
    texel_linear_index,
    translate_coords,
    unpack,
)
from slicekit.tensor import LogicalShape, LogicalTensor


def rand_tensor(dims, rng):
    shape = LogicalShape.from_dims(tuple(dims))
    values = rng.standard_normal(shape.element_count).astype(np.float32)
    return LogicalTensor(shape, values=values)


SHAPE_12351 = LogicalShape(b=1, h=2, w=3, d=1, c=5, rank=4)


class TestPhysicalExtent:
    def test_texture_3d_size(self):
        ext = physical_extent(SHAPE_12351, StorageType.TEXTURE_3D)
        assert (ext.width, ext.height, ext.depth) == (3, 2, 2)

    def test_image_buffer_pixel_count(self):
        ext = physical_extent(SHAPE_12351, StorageType.IMAGE_BUFFER_1D)
        assert ext.dims == (12,)

    def test_texture_2d_size(self):
        ext = physical_extent(SHAPE_12351, StorageType.TEXTURE_2D)
        assert (ext.width, ext.height) == (3, 4)

    def test_tightness_for_3d_and_buffer(self):
        for dims in [(2, 3, 5), (1, 2, 3, 5), (4,), (3, 3, 3, 9)]:
            shape = LogicalShape.from_dims(dims)
            for st in (StorageType.TEXTURE_3D, StorageType.BUFFER_1D):
                ext = physical_extent(shape, st)
                assert ext.texel_count * 4 == shape.padded_element_count


class TestTranslateCoords:
    def test_buffer_scalar_index(self):
        shape = LogicalShape(b=1, h=2, w=3, d=1, c=8, rank=4)
        assert translate_coords(0, 1, 1, 1, shape, StorageType.BUFFER_1D) == 10

    def test_texture_2d(self):
        shape = LogicalShape(b=1, h=1, w=3, d=1, c=8, rank=4)
        assert translate_coords(0, 2, 0, 1, shape, StorageType.TEXTURE_2D) == (2, 1)

    def test_texture_3d(self):
        shape = LogicalShape(b=2, h=3, w=2, d=1, c=4, rank=4)
        assert translate_coords(1, 0, 2, 0, shape, StorageType.TEXTURE_3D) == (1, 2, 0)

    def test_out_of_range_rejected(self):
        shape = LogicalShape(b=1, h=2, w=3, d=1, c=5, rank=4)
        with pytest.raises(BoundsError):
            translate_coords(0, 3, 0, 0, shape, StorageType.BUFFER_1D)
        with pytest.raises(BoundsError):
            translate_coords(0, 0, 0, 2, shape, StorageType.TEXTURE_2D)

    def test_table_conformance_exhaustive(self):
        # Literal re-evaluation of the published formulas for (B,H,W,C)=(2,3,4,5).
        B, H, W, C = 2, 3, 4, 5
        S = -(-C // 4)
        shape = LogicalShape(b=B, h=H, w=W, d=1, c=C, rank=4)
        for b, x, y, s in itertools.product(range(B), range(W), range(H), range(S)):
            assert translate_coords(b, x, y, s, shape, StorageType.BUFFER_1D) == (
                (s * H + y) * W + x
            ) * B + b
            assert translate_coords(b, x, y, s, shape, StorageType.TEXTURE_2D) == (
                x * B + b,
                y * S + s,
            )
            assert translate_coords(b, x, y, s, shape, StorageType.TEXTURE_3D) == (
                x * B + b,
                y,
                s,
            )

    def test_injective_per_storage(self):
        shape = LogicalShape(b=2, h=3, w=4, d=1, c=5, rank=4)
        for st in (StorageType.BUFFER_1D, StorageType.TEXTURE_2D, StorageType.TEXTURE_3D):
            seen = set()
            for b, x, y, s in itertools.product(
                range(shape.b), range(shape.w), range(shape.h), range(shape.slices)
            ):
                coords = translate_coords(b, x, y, s, shape, st)
                assert coords not in seen
                seen.add(coords)


class TestPack:
    def test_single_texel_identity(self):
        t = LogicalTensor(
            LogicalShape.from_dims((1, 1, 1, 4)),
            values=np.array([1, 2, 3, 4], dtype=np.float32),
        )
        for st in ALL_STORAGE_TYPES:
            obj = pack(t, LayoutDescriptor.canonical(st, 4))
            assert obj.data.shape == (1, 4)
            assert np.array_equal(obj.data[0], [1, 2, 3, 4])

    def test_pack_against_translate_coords_oracle(self):
        # Oracle: place every element by calling translate_coords directly.
        rng = np.random.default_rng(7)
        t = rand_tensor((1, 2, 3, 5), rng)
        shape = t.shape
        obj = pack(t, LayoutDescriptor.canonical(StorageType.TEXTURE_2D, 5))
        assert obj.data.shape[0] == 12
        zero_lane_texels = 0
        for texel_idx in range(obj.data.shape[0]):
            lanes = obj.data[texel_idx]
            if np.any(lanes == 0.0):
                zero_lane_texels += 1
        # slice 1 holds 1 of 4 channels -> 6 texels carry 3 zero lanes each
        assert zero_lane_texels == 6
        for b, y, x, c in itertools.product(range(1), range(2), range(3), range(5)):
            u, v = translate_coords(b, x, y, c // 4, shape, StorageType.TEXTURE_2D)
            linear = v * obj.extent.width + u
            assert obj.data[linear, c % 4] == t.at(b, y, x, 0, c)

    def test_layout_independent_content(self):
        rng = np.random.default_rng(3)
        t = rand_tensor((2, 3, 4, 6), rng)
        recovered = [
            unpack(pack(t, LayoutDescriptor.canonical(st, 6)), t.shape).values
            for st in ALL_STORAGE_TYPES
        ]
        for values in recovered:
            assert np.array_equal(values, t.values)

    def test_padding_lanes_are_zero(self):
        rng = np.random.default_rng(11)
        t = rand_tensor((2, 2, 7), rng)
        for st in ALL_STORAGE_TYPES:
            obj = pack(t, LayoutDescriptor.canonical(st, 7))
            for h in range(2):
                for w in range(2):
                    for c in range(7, 8):
                        assert read_element(obj, t.shape, 0, h, w, 0, c) == 0.0


class TestUnpack:
    def test_round_trip_all_kinds(self):
        rng = np.random.default_rng(5)
        t = rand_tensor((1, 2, 3, 5), rng)
        for st in ALL_STORAGE_TYPES:
            desc = LayoutDescriptor.canonical(st, 5)
            assert np.array_equal(unpack(pack(t, desc), t.shape).values, t.values)

    def test_round_trip_randomized(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            rank = int(rng.integers(1, 6))
            dims = tuple(int(rng.integers(1, 10)) for _ in range(rank))
            t = rand_tensor(dims, rng)
            st = ALL_STORAGE_TYPES[int(rng.integers(len(ALL_STORAGE_TYPES)))]
            desc = LayoutDescriptor.canonical(st, t.shape.c)
            assert np.array_equal(unpack(pack(t, desc), t.shape).values, t.values)

    def test_extent_mismatch_rejected(self):
        rng = np.random.default_rng(1)
        t = rand_tensor((2, 3, 4), rng)
        obj = pack(t, LayoutDescriptor.canonical(StorageType.TEXTURE_2D, 4))
        with pytest.raises(ShapeError):
            unpack(obj, LogicalShape.from_dims((3, 3, 4)))


class TestDescriptors:
    def test_named_layouts(self):
        d = LayoutDescriptor.from_name("HSWBDC4", StorageType.TEXTURE_2D, 5)
        assert d.permutation == ("H", "S", "W", "B", "D", "C4")
        d = LayoutDescriptor.from_name("DSHWBC4", StorageType.TEXTURE_3D, 5)
        assert d.permutation[-1] == "C4"
        with pytest.raises(LayoutError):
            LayoutDescriptor.from_name("DSHWBC4", StorageType.TEXTURE_2D, 5)
        with pytest.raises(LayoutError):
            LayoutDescriptor.from_name("XYZZY", StorageType.TEXTURE_2D, 5)

    def test_permutation_validation(self):
        with pytest.raises(LayoutError):
            LayoutDescriptor(StorageType.TEXTURE_2D, ("C4", "H", "S", "W", "B", "D"), 4)

    def test_d_axis_folds_next_to_batch(self):
        shape = LogicalShape(b=2, h=2, w=2, d=3, c=4, rank=5)
        # u = (x*B + b)*D + d
        assert texel_coords(shape, StorageType.TEXTURE_2D, b=1, y=0, x=1, d=2, s=0) == (
            0,
            (1 * 2 + 1) * 3 + 2,
        )

    def test_texel_linear_index_bounds(self):
        ext = physical_extent(SHAPE_12351, StorageType.TEXTURE_3D)
        with pytest.raises(BoundsError):
            texel_linear_index(ext, (0, 0, 5))
