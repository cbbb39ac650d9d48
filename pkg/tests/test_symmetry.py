import itertools

import numpy as np
import pytest

from cubepack.core import Packing, is_tiling, min_nonextendible_3d, overlaps, regular_tiling
from cubepack.symmetry import (
    AFFINE_MAPS,
    CanonicalKey,
    Symmetry,
    all_symmetries,
    apply,
    are_isomorphic,
    canonical_codes,
    canonical_codes_bruteforce,
    canonical_form,
    canonical_label_set,
    compose,
    group_order,
    identity,
    inverse,
    invariant_fingerprint,
    random_symmetry,
    stabilizer_order,
)

BRICK_2D = Packing.from_labels(2, [(0, 0), (0, 2), (2, 1), (2, 3)])


def rng():
    return np.random.default_rng(11)


def test_affine_maps_are_the_8_twodiff_preserving_bijections():
    # every bijection of Z4 preserving "difference == 2" is affine with a odd
    found = set()
    for images in itertools.permutations(range(4)):
        if all(
            ((images[t] - images[(t + 2) % 4]) % 4 == 2)
            for t in range(4)
        ):
            found.add(images)
    affine = {
        tuple((a * t + b) % 4 for t in range(4)) for a, b in AFFINE_MAPS
    }
    assert found == affine
    assert len(affine) == 8


def test_group_order_small():
    assert group_order(1) == 8
    assert group_order(2) == 128
    assert group_order(3) == 3072
    assert sum(1 for _ in all_symmetries(2)) == 128
    assert sum(1 for _ in all_symmetries(3)) == 3072
    # faithful as functions on labels for d <= 2
    fns = {tuple(g.apply_code(c) for c in range(16)) for g in all_symmetries(2)}
    assert len(fns) == 128


def test_composition_convention():
    # apply(compose(g, h), p) == apply(g, apply(h, p))
    r = rng()
    for _ in range(100):
        d = int(r.integers(1, 5))
        g = random_symmetry(d, r)
        h = random_symmetry(d, r)
        codes = list(set(int(c) for c in r.integers(0, 4**d, size=6)))
        p = Packing(d, tuple(sorted(codes)))
        assert apply(compose(g, h), p) == apply(g, apply(h, p))


def test_identity_and_inverse():
    r = rng()
    for _ in range(100):
        d = int(r.integers(1, 6))
        g = random_symmetry(d, r)
        gid = compose(g, inverse(g))
        assert gid == identity(d)
        assert compose(inverse(g), g) == identity(d)


def test_closure_random():
    r = rng()
    for _ in range(50):
        g = random_symmetry(3, r)
        h = random_symmetry(3, r)
        gh = compose(g, h)
        assert all(a in (1, 3) for a, _ in gh.maps)
        assert sorted(gh.perm) == [0, 1, 2]


def test_action_preserves_overlap():
    r = rng()
    for _ in range(300):
        d = int(r.integers(1, 5))
        g = random_symmetry(d, r)
        x = tuple(int(t) for t in r.integers(0, 4, d))
        y = tuple(int(t) for t in r.integers(0, 4, d))
        assert overlaps(d, x, y) == overlaps(d, g(x), g(y))


def test_apply_identity_and_hand_example():
    p = regular_tiling(1)
    assert apply(identity(1), p) == p
    g = Symmetry((0,), ((3, 3),))
    assert apply(g, p).labels == ((1,), (3,))
    assert is_tiling(apply(g, p))


def test_apply_preserves_packing_and_size():
    r = rng()
    from cubepack.stochastic import SearchConfig, random_packing

    for s in range(20):
        d = int(r.integers(1, 5))
        p = random_packing(d, SearchConfig(seed=s))
        g = random_symmetry(d, r)
        q = apply(g, p)
        assert len(q) == len(p)
        from cubepack.core import is_packing
        assert is_packing(d, q.codes)


def test_free_labels_map_equivariantly():
    from cubepack.core import free_codes

    r = rng()
    for s in range(30):
        d = int(r.integers(1, 4))
        codes = []
        from cubepack.core import compat_masks, full_mask, mask_to_codes
        free = full_mask(d)
        masks = compat_masks(d)
        for _ in range(int(r.integers(0, 2**d))):
            opts = mask_to_codes(free)
            if not opts:
                break
            y = opts[int(r.integers(len(opts)))]
            codes.append(y)
            free &= masks[y]
        p = Packing(d, tuple(sorted(codes)))
        g = random_symmetry(d, r)
        q = apply(g, p)
        mapped_free = sorted(g.apply_code(c) for c in free_codes(p))
        assert mapped_free == free_codes(q)


def test_canonical_matches_bruteforce_d1_d2():
    r = rng()
    for d in (1, 2):
        for _ in range(300):
            n = int(r.integers(1, 8))
            codes = sorted(set(int(c) for c in r.integers(0, 4**d, size=n)))
            assert canonical_codes(d, codes) == canonical_codes_bruteforce(d, codes)


def test_canonical_matches_bruteforce_d3():
    r = rng()
    for _ in range(25):
        n = int(r.integers(1, 8))
        codes = sorted(set(int(c) for c in r.integers(0, 64, size=n)))
        assert canonical_codes(3, codes) == canonical_codes_bruteforce(3, codes)


def test_canonical_invariance_and_idempotence():
    r = rng()
    for _ in range(400):
        d = int(r.integers(1, 7))
        n = int(r.integers(1, 18))
        codes = list(set(int(c) for c in r.integers(0, 4**d, size=n)))
        g = random_symmetry(d, r)
        moved = [g.apply_code(c) for c in codes]
        key = canonical_codes(d, codes)
        assert canonical_codes(d, moved) == key
        assert canonical_codes(d, key) == key


def test_canonical_form_of_regular_tiling_invariant():
    r = rng()
    for d in (1, 2, 3, 4):
        p = regular_tiling(d)
        key = canonical_form(p)
        for _ in range(25):
            assert canonical_form(apply(random_symmetry(d, r), p)) == key


def test_two_2d_tilings_not_isomorphic():
    assert not are_isomorphic(regular_tiling(2), BRICK_2D)
    assert canonical_form(regular_tiling(2)) != canonical_form(BRICK_2D)


def test_every_2d_tiling_matches_one_of_two_keys():
    from cubepack.enumeration import enumerate_all

    keys = {canonical_form(regular_tiling(2)).codes,
            canonical_form(BRICK_2D).codes}
    res = enumerate_all(2)
    assert set(map(tuple, res.levels[4])) == keys


def test_relabelings_of_reference_packing_isomorphic():
    r = rng()
    fig = min_nonextendible_3d()
    for _ in range(20):
        a = apply(random_symmetry(3, r), fig)
        b = apply(random_symmetry(3, r), fig)
        assert are_isomorphic(a, b)


def test_three_3d_blocking_sets_have_distinct_keys():
    sets = [
        [(0, 0, 0), (1, 1, 1), (2, 2, 2), (3, 3, 3)],
        [(0, 0, 0), (1, 1, 1), (2, 2, 3), (3, 3, 2)],
        [(0, 0, 0), (3, 2, 3), (2, 1, 1), (1, 3, 2)],
    ]
    keys = {canonical_label_set(3, s) for s in sets}
    assert len(keys) == 3


def test_fingerprint_invariant_and_discriminating():
    r = rng()
    fig = min_nonextendible_3d()
    fp = invariant_fingerprint(fig)
    for _ in range(20):
        assert invariant_fingerprint(apply(random_symmetry(3, r), fig)) == fp
    assert invariant_fingerprint(regular_tiling(2)) != invariant_fingerprint(BRICK_2D)


def test_canonical_key_serialization_roundtrip():
    key = canonical_form(min_nonextendible_3d())
    text = key.serialize()
    assert CanonicalKey.parse(text) == key
    assert text.startswith("3:")
    empty = CanonicalKey(2, ())
    assert CanonicalKey.parse(empty.serialize()) == empty


def test_orbit_counting_keys_vs_full_group():
    # orbits of size-2 packings in d=2: by canonical keys and by explicit
    # full-group orbit partition
    import itertools as it

    from cubepack.core import is_packing

    pairs = [
        (a, b)
        for a, b in it.combinations(range(16), 2)
        if is_packing(2, (a, b))
    ]
    keys = {canonical_codes(2, p) for p in pairs}
    seen = set()
    explicit_orbits = 0
    for p in pairs:
        if p in seen:
            continue
        explicit_orbits += 1
        for g in all_symmetries(2):
            seen.add(tuple(sorted(g.apply_code(c) for c in p)))
    assert len(keys) == explicit_orbits == 3


def test_stabilizer_order_divides_group_order():
    for p in (regular_tiling(2), BRICK_2D):
        s = stabilizer_order(p)
        assert s >= 1 and group_order(2) % s == 0
