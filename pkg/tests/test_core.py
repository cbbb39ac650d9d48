import itertools

import numpy as np
import pytest

from cubepack.core import (
    Packing,
    decode,
    encode,
    free_codes,
    free_labels,
    is_packing,
    is_tiling,
    lift,
    min_nonextendible_3d,
    overlaps,
    product_packing,
    regular_tiling,
)


def cells_of(dim, label):
    """Independent oracle: unit cells covered by the cube at this label."""
    return {
        tuple((label[i] + d[i]) % 4 for i in range(dim))
        for d in itertools.product((0, 1), repeat=dim)
    }


def overlaps_oracle(dim, x, y):
    return bool(cells_of(dim, x) & cells_of(dim, y))


def test_encode_decode_bijection():
    for d in (1, 2, 3):
        seen = set()
        for coords in itertools.product(range(4), repeat=d):
            code = encode(coords)
            assert decode(code, d) == coords
            seen.add(code)
        assert seen == set(range(4**d))


def test_encode_rejects_bad_digits():
    with pytest.raises(ValueError):
        encode((0, 4))
    with pytest.raises(ValueError):
        decode(16, 1)


def test_overlaps_examples():
    assert overlaps(3, (0, 0, 0), (3, 2, 3)) is False
    assert overlaps(3, (0, 0, 0), (0, 0, 0)) is True
    assert overlaps(2, (1, 3), (0, 0)) is True
    assert overlaps(2, (1, 3), (3, 3)) is False


def test_overlaps_against_cell_oracle():
    for d in (1, 2):
        for x in itertools.product(range(4), repeat=d):
            for y in itertools.product(range(4), repeat=d):
                assert overlaps(d, x, y) == overlaps_oracle(d, x, y)


def test_overlaps_random_cell_oracle_d3_d4():
    rng = np.random.default_rng(1)
    for d in (3, 4):
        for _ in range(300):
            x = tuple(int(t) for t in rng.integers(0, 4, d))
            y = tuple(int(t) for t in rng.integers(0, 4, d))
            assert overlaps(d, x, y) == overlaps_oracle(d, x, y)


def test_overlaps_symmetric_and_translation_invariant():
    rng = np.random.default_rng(2)
    for _ in range(200):
        d = int(rng.integers(1, 5))
        x = tuple(int(t) for t in rng.integers(0, 4, d))
        y = tuple(int(t) for t in rng.integers(0, 4, d))
        shift = tuple(int(t) for t in rng.integers(0, 4, d))
        xs = tuple((a + s) % 4 for a, s in zip(x, shift))
        ys = tuple((a + s) % 4 for a, s in zip(y, shift))
        assert overlaps(d, x, y) == overlaps(d, y, x) == overlaps(d, xs, ys)


def test_overlaps_dimension_mismatch():
    with pytest.raises(ValueError):
        overlaps(2, (0, 0, 0), (1, 1))


def test_is_packing():
    assert is_packing(3, min_nonextendible_3d().labels)
    assert not is_packing(1, [0, 1])
    assert is_packing(2, [(0, 0), (0, 2), (2, 1), (2, 3)])


def test_free_labels_examples():
    assert free_labels(min_nonextendible_3d()) == ()
    assert free_labels(Packing.from_labels(1, [0])) == ((2,),)
    p = Packing.from_labels(2, [(0, 0), (0, 2)])
    assert free_labels(p) == tuple((2, c) for c in range(4))


def test_free_labels_against_bruteforce():
    rng = np.random.default_rng(3)
    for d in (1, 2, 3):
        for _ in range(30):
            labels = []
            for cand in rng.permutation(4**d):
                cand = decode(int(cand), d)
                if all(not overlaps_oracle(d, cand, m) for m in labels):
                    labels.append(cand)
                if len(labels) >= int(rng.integers(1, 2**d + 1)):
                    break
            p = Packing.from_labels(d, labels)
            expected = tuple(
                y
                for y in itertools.product(range(4), repeat=d)
                if all(not overlaps_oracle(d, y, m) for m in labels)
            )
            assert free_labels(p) == expected


def test_free_labels_of_empty_packing():
    for d in (1, 2, 3):
        assert len(free_codes(Packing(d, ()))) == 4**d


def test_free_label_extends_packing():
    rng = np.random.default_rng(4)
    for _ in range(50):
        d = int(rng.integers(1, 5))
        p = Packing(d, ())
        for _ in range(int(rng.integers(0, 2**d))):
            free = free_codes(p)
            if not free:
                break
            y = free[int(rng.integers(len(free)))]
            p = Packing(d, tuple(sorted(p.codes + (y,))))
        for y in free_codes(p):
            assert is_packing(d, p.codes + (y,))


def test_is_tiling():
    for d in range(1, 7):
        assert is_tiling(regular_tiling(d))
    assert not is_tiling(min_nonextendible_3d())
    assert is_tiling(Packing.from_labels(2, [(0, 0), (0, 2), (2, 1), (2, 3)]))


def test_regular_tiling_values():
    assert regular_tiling(1).labels == ((0,), (2,))
    assert regular_tiling(2).labels == ((0, 0), (0, 2), (2, 0), (2, 2))
    assert len(regular_tiling(3)) == 8


def test_volume_bound():
    rng = np.random.default_rng(5)
    for _ in range(20):
        d = int(rng.integers(1, 5))
        p = Packing(d, ())
        while True:
            free = free_codes(p)
            if not free:
                break
            p = Packing(d, tuple(sorted(p.codes + (free[0],))))
        assert len(p) <= 2**d


def test_product_packing():
    fig = min_nonextendible_3d()
    prod = product_packing(fig, fig)
    assert prod.dim == 6
    assert len(prod) == 16
    assert is_packing(6, prod.codes)
    assert free_codes(prod) == []

    assert product_packing(regular_tiling(1), regular_tiling(1)).codes == \
        regular_tiling(2).codes


def test_product_cardinality_random():
    rng = np.random.default_rng(6)
    from cubepack.stochastic import SearchConfig, random_packing

    for s in range(5):
        p = random_packing(2, SearchConfig(seed=s))
        q = random_packing(2, SearchConfig(seed=s + 100))
        prod = product_packing(p, q)
        assert len(prod) == len(p) * len(q)
        assert is_packing(prod.dim, prod.codes)


def test_lift():
    fig = min_nonextendible_3d()
    lifted = lift(fig, regular_tiling(3))
    assert lifted.dim == 4
    assert len(lifted) == 12
    assert free_codes(lifted) == []

    t = lift(regular_tiling(2), regular_tiling(2))
    assert is_tiling(t)


def test_lift_rejects_non_tiling():
    fig = min_nonextendible_3d()
    with pytest.raises(ValueError):
        lift(fig, fig)


def test_lift_preserves_nonextendibility_d3_and_d4():
    fig = min_nonextendible_3d()
    l4 = lift(fig, regular_tiling(3))
    assert free_codes(l4) == []
    l5 = lift(l4, regular_tiling(4))
    assert l5.dim == 5 and len(l5) == 12 + 16
    assert free_codes(l5) == []


def test_packing_validation():
    with pytest.raises(ValueError):
        Packing.from_labels(1, [0, 1])
    with pytest.raises(ValueError):
        Packing.from_labels(2, [(0, 0), (0, 0)])
