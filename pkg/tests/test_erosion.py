import itertools
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dyncurv.erosion import (FiberSlice, GridModule, RankMaximalGridModule, ResourceBudgetError,
                             ValidationError, acd_module_from_generators, dilated_acd_modules, erosion1d,
                             erosion_distance,
                             erosion_distance_oracle, erosion_distance_rank_maximal, erosion_matrix,
                             grid_box, is_convex, iter_fiber_slices, random_acd_module,
                             random_rank_maximal_module)
from dyncurv.erosion.oracle import _rank, segment_count

seeds = st.integers(0, 2**32 - 1)


# -- erosion1d --------------------------------------------------------------------------------

@pytest.mark.parametrize("args,expected", [
    ((0, 10, None, None), 5),
    ((0, 10, 0, 10), 0),
    ((0, 10, 0, 6), 3),
    ((0, 4, 2, 2), 1),
    ((None, None, 0, 3), 0),
    ((3, 3, None, None), 0),
    ((0, 10, -5, 20), 0),
])
def test_erosion1d_examples(args, expected):
    assert erosion1d(*args) == expected
    assert erosion1d(*args, scan=True) == expected


@given(st.integers(-20, 20), st.integers(0, 25), st.integers(-20, 30), st.integers(-1, 25))
def test_erosion1d_closed_form_matches_scan(a, la, c, lc):
    b, d = a + la, c + lc
    assert erosion1d(a, b, c, d) == erosion1d(a, b, c, d, scan=True)


# -- examples ---------------------------------------------------------------------------------

def test_one_dimensional_examples():
    full = grid_box((11,), (0,), (10,))
    empty = GridModule.empty((11,))
    assert erosion_distance(full, empty) == 5
    assert erosion_distance(full, grid_box((11,), (2,), (8,))) == 1
    assert erosion_distance(grid_box((11,), (4,), (4,)), empty) == 0


def test_box_against_its_centre():
    V = grid_box((5, 5), (0, 0), (4, 4))
    W = grid_box((5, 5), (2, 2), (2, 2))
    assert erosion_distance(V, W) == 1
    assert erosion_distance_oracle(V, W) == 1


def test_unit_scales_result():
    V = grid_box((11,), (0,), (10,), unit=0.25)
    assert erosion_distance(V, GridModule.empty((11,), unit=0.25)) == 1.25


def test_argument_errors():
    V = grid_box((4, 4), (0, 0), (3, 3))
    with pytest.raises(ValueError):
        erosion_distance(V, GridModule.empty((4, 5)))
    with pytest.raises(ValueError):
        erosion_distance(V, GridModule.empty((4, 4), unit=2.0))
    with pytest.raises(ValueError):
        erosion_distance(V, V, backend="fortran")
    nonconvex = np.zeros((4, 4), bool)
    nonconvex[0, 0] = nonconvex[3, 3] = True
    bad = GridModule.from_mask(nonconvex, validate=False)
    with pytest.raises(ValidationError):
        erosion_distance(V, bad)
    with pytest.raises(ValidationError):
        GridModule.from_mask(nonconvex)


def test_column_gap_is_rejected():
    m = np.zeros((2, 5), bool)
    m[0, [0, 2]] = True
    with pytest.raises(ValidationError):
        GridModule.from_mask(m, validate=False)


# -- oracle equivalence and axioms ------------------------------------------------------------

@given(seeds, st.sampled_from([(12, 12), (7, 9), (6, 6, 6), (1, 8), (5,), (3, 4, 2, 3)]))
def test_sweep_backends_match_oracle(seed, dims):
    rng = np.random.default_rng(seed)
    V, W = random_acd_module(dims, rng), random_acd_module(dims, rng)
    expected = erosion_distance_oracle(V, W)
    assert erosion_distance(V, W) == expected
    assert erosion_distance(V, W, backend="python") == expected
    assert erosion_distance(V, W, scan=True) == expected


@given(seeds, st.sampled_from([(10, 10), (5, 5, 5)]))
def test_identity_symmetry_and_relaxed_triangle(seed, dims):
    rng = np.random.default_rng(seed)
    U, V, W = (random_acd_module(dims, rng) for _ in range(3))
    assert erosion_distance(V, V) == 0
    assert erosion_distance(V, W) == erosion_distance(W, V)
    # each lattice value is (least working thickening) - 1, so composing two costs one extra step
    assert erosion_distance(V, W) <= erosion_distance(V, U) + erosion_distance(U, W) + V.unit


def test_lattice_values_can_break_the_exact_triangle():
    V = grid_box((5,), (0,), (2,))
    U = grid_box((5,), (0,), (1,))
    W = GridModule.empty((5,))
    assert erosion_distance_oracle(V, W) == 1
    assert erosion_distance_oracle(V, U) == 0 and erosion_distance_oracle(U, W) == 0


@given(seeds)
def test_distance_to_empty_is_largest_fiber_half_length(seed):
    rng = np.random.default_rng(seed)
    V = random_acd_module((9, 9), rng)
    empty = GridModule.empty((9, 9))
    lengths = [s.b - s.a for _, s in iter_fiber_slices(V, empty) if s.a is not None]
    assert erosion_distance(V, empty) == max([L // 2 for L in lengths], default=0)


@given(seeds)
def test_rank_is_monotone_under_inclusion(seed):
    rng = np.random.default_rng(seed)
    V = random_acd_module((6, 6, 4), rng)
    dims = np.array(V.dims)
    p = rng.integers(0, dims, size=(50, 3))
    q = p + rng.integers(0, 3, size=(50, 3))
    grow_lo = rng.integers(0, 2, size=(50, 3))
    grow_hi = rng.integers(0, 2, size=(50, 3))
    inner = _rank(V, p, q)
    outer = _rank(V, p - grow_lo, q + grow_hi)
    assert np.all(outer <= inner)


@given(seeds)
def test_segment_thresholds_follow_case_analysis(seed):
    """Equal ranks give threshold 0; otherwise the one-sided escape threshold of the ranked side."""
    rng = np.random.default_rng(seed)
    dims = (6, 6)
    V, W = random_acd_module(dims, rng), random_acd_module(dims, rng)
    _, det = erosion_distance_oracle(V, W, return_details=True)
    same = det.rank_v == det.rank_w
    assert np.all(det.threshold[same] == 0)
    for idx in np.nonzero(~same)[0]:
        M = V if det.rank_v[idx] else W
        p, q = det.p[idx], det.q[idx]
        # least eps such that [p - (eps+1), q + (eps+1)] leaves the support
        eps = 0
        while _rank(M, (p - eps - 1)[None], (q + eps + 1)[None])[0]:
            eps += 1
        assert det.threshold[idx] == eps


def test_oracle_budget():
    V = GridModule.empty((30, 30, 30))
    assert segment_count((30, 30, 30)) > 10**6
    with pytest.raises(ResourceBudgetError):
        erosion_distance_oracle(V, V, budget=10**6)


def test_erosion_matrix_matches_pairwise(rng):
    mods = [random_acd_module((7, 8), rng) for _ in range(6)]
    M = erosion_matrix(mods)
    for i, j in itertools.product(range(6), repeat=2):
        assert M[i, j] == erosion_distance(mods[i], mods[j])
    R = erosion_matrix(mods[:2], mods[2:])
    assert R.shape == (2, 4) and R[1, 3] == erosion_distance(mods[1], mods[5])


def test_fiber_slice_record():
    assert FiberSlice(0, 10).erosion() == 5
    assert FiberSlice(0, 4, 2, 2).erosion() == 1
    assert FiberSlice(None, None, 0, 4).erosion() == 2


# -- generators and storage -------------------------------------------------------------------

@given(seeds, st.sampled_from([(8, 8), (4, 5, 6), (10,)]))
def test_generated_supports_are_convex(seed, dims):
    V = random_acd_module(dims, seed)
    assert is_convex(V.mask)
    V.validate()
    assert random_acd_module(dims, seed) == V


def test_full_generators_give_whole_grid():
    V = acd_module_from_generators((4, 5, 3), [(0, 0, 0)], [(3, 4, 2)])
    assert V.mask.all()


def test_json_round_trip(tmp_path, rng):
    V = random_acd_module((5, 6, 7), rng, unit=0.5)
    V.save(tmp_path / "v.json")
    import json
    W = GridModule.from_json(json.loads((tmp_path / "v.json").read_text()))
    assert W == V


def test_membership_and_columns():
    V = grid_box((4, 6), (1, 2), (2, 4))
    assert (1, 2) in V and (2, 4) in V and (0, 2) not in V and (1, 5) not in V and (9, 9) not in V
    assert V.column((0,)) is None and V.column((1,)) == (2, 4)
    assert sorted(V.columns()) == [(1,), (2,)]


# -- rank-maximal modules ---------------------------------------------------------------------

def superlevel_oracle(V, W):
    M = max(V.max_dim, W.max_dim)
    return max([erosion_distance_oracle(V.superlevel(i), W.superlevel(i)) for i in range(1, M + 1)],
               default=0.0)


def test_rank_maximal_examples():
    V = RankMaximalGridModule((3,), np.array([1, 2, 1]))
    W = RankMaximalGridModule((3,), np.zeros(3, int))
    assert erosion_distance_rank_maximal(V, W) == 1
    assert erosion_distance_rank_maximal(V, V) == 0


@given(seeds)
def test_rank_maximal_with_one_level_is_plain_erosion(seed):
    rng = np.random.default_rng(seed)
    A, B = random_acd_module((7, 7), rng), random_acd_module((7, 7), rng)
    RA = RankMaximalGridModule(A.dims, A.mask.astype(int))
    RB = RankMaximalGridModule(B.dims, B.mask.astype(int))
    assert erosion_distance_rank_maximal(RA, RB) == erosion_distance(A, B)


@given(seeds)
def test_rank_maximal_matches_direct_rank_oracle(seed):
    """Direct min-dimension rank invariant agrees with the superlevel decomposition."""
    rng = np.random.default_rng(seed)
    V = random_rank_maximal_module((6, 6), rng, max_dim=4)
    W = random_rank_maximal_module((6, 6), rng, max_dim=4)
    d = erosion_distance_rank_maximal(V, W)
    assert d == superlevel_oracle(V, W)
    assert d == erosion_distance_oracle(V, W)


def test_rank_maximal_validation():
    dimfun = np.array([[1, 0, 1]])
    with pytest.raises(ValidationError):
        RankMaximalGridModule((1, 3), dimfun).validate()
    with pytest.raises(ValidationError):
        RankMaximalGridModule((1, 3), -np.ones((1, 3), int))


def test_dilated_shapes_are_convex_and_match_oracle():
    fams = [dilated_acd_modules((4, 8, 12), 2, s) for s in range(2 * 10)]
    for A, B in zip(fams[::2], fams[1::2]):
        for n in (4, 8, 12):
            assert A[n].dims == (n, n) and is_convex(A[n].mask)
            assert erosion_distance(A[n], B[n]) == erosion_distance_oracle(A[n], B[n])


@pytest.mark.parametrize("dims", [(11,), (5, 6), (3, 4, 5)])
def test_json_round_trip_all_dimensions(dims, tmp_path):
    M = random_acd_module(dims, 5)
    M.save(tmp_path / "m.json")
    assert GridModule.from_json(json.loads((tmp_path / "m.json").read_text())) == M
    assert M.columns() == {x: M.column(x) for x in np.ndindex(M.lo.shape) if M.column(x)}
