"""Restricted systems: enumeration, thinness, translation, extensions."""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from linremoval import (
    AbelianGroup,
    AlreadySolutionFree,
    BudgetExceededError,
    Extension,
    IntMatrix,
    PreconditionError,
    RestrictedSystem,
    compose_extensions,
    count_solutions,
    enumerate_solutions,
    homogenize,
    identity_extension,
    is_thin,
    pull_back_removal,
    remove_elements,
    verify_extension,
)


def brute_solutions(system):
    # oracle: direct product scan, no pivot solving
    out = [
        x
        for x in itertools.product(*system.restrictions)
        if system.apply(x) == system.rhs
    ]
    out.sort()
    return out


def full_sets(group, m):
    return tuple(group.elements() for _ in range(m))


def z(n):
    return AbelianGroup([n])


# ------------------------------------------------------------- construction


def test_system_validates_shapes():
    g = z(5)
    a = IntMatrix([[1, 1, 1]])
    rhs = ((0,),)
    with pytest.raises(PreconditionError):
        RestrictedSystem(g, IntMatrix([[1], [2]]), ((0,), (0,)), full_sets(g, 1))
    with pytest.raises(PreconditionError):
        RestrictedSystem(g, a, ((0,), (0,)), full_sets(g, 3))
    with pytest.raises(PreconditionError):
        RestrictedSystem(g, a, rhs, full_sets(g, 2))


def test_system_normalizes_restrictions():
    g = z(5)
    sys_ = RestrictedSystem(
        g,
        IntMatrix([[1, 1]]),
        ((0,),),
        (((7,), (2,), (0,)), ((1,), (1,), (-1,))),
    )
    # reduced into the group, deduplicated, sorted
    assert sys_.restrictions == (((0,), (2,)), ((1,), (4,)))


def test_system_divisor_fields():
    g = z(10)
    sys_ = RestrictedSystem(g, IntMatrix([[2, 4], [0, 6]]), ((0,), (0,)), full_sets(g, 2))
    assert sys_.determinantal == 12
    assert not sys_.coprime  # gcd(12, 10) == 2
    sys2 = RestrictedSystem(g, IntMatrix([[1, 1, 1]]), ((0,),), full_sets(g, 3))
    assert sys2.determinantal == 1
    assert sys2.coprime


def test_apply_and_homogeneous():
    g = z(4)
    sys_ = RestrictedSystem(g, IntMatrix([[1, 2]]), ((3,),), full_sets(g, 2))
    assert sys_.apply(((1,), (1,))) == ((3,),)
    assert sys_.apply(((1,), (3,))) == ((3,),)
    assert not sys_.is_homogeneous()
    zero = RestrictedSystem(g, IntMatrix([[1, 2]]), ((0,),), full_sets(g, 2))
    assert zero.is_homogeneous()
    assert sys_.equations == 1
    assert sys_.variables == 2


# -------------------------------------------------------------- enumeration


def test_enumerate_full_circulant_count():
    g = z(5)
    sys_ = RestrictedSystem(g, IntMatrix([[1, 1, 1]]), ((0,),), full_sets(g, 3))
    sols = enumerate_solutions(sys_)
    assert len(sols) == 25
    assert sols == sorted(sols)
    assert sols == brute_solutions(sys_)


def test_enumerate_forced_singleton():
    g = z(4)
    sys_ = RestrictedSystem(
        g,
        IntMatrix([[1, 1, 1]]),
        ((0,),),
        (((0,),), ((1,),), ((3,),)),
    )
    assert enumerate_solutions(sys_) == [((0,), (1,), (3,))]


def test_enumerate_handles_empty_restriction():
    g = z(3)
    sys_ = RestrictedSystem(g, IntMatrix([[1, 1]]), ((0,),), (((0,),), ()))
    assert enumerate_solutions(sys_) == []


def test_enumerate_slow_path_matches_oracle():
    # leading block is not the identity, so every candidate is checked
    g = z(6)
    sys_ = RestrictedSystem(
        g,
        IntMatrix([[2, 1], [1, 1]]),
        ((1,), (4,)),
        (((0,), (1,), (3,), (5,)), ((1,), (2,), (4,))),
    )
    assert enumerate_solutions(sys_) == brute_solutions(sys_)


def test_enumerate_fast_path_matches_oracle():
    g = z(6)
    sys_ = RestrictedSystem(
        g,
        IntMatrix([[1, 0, 2], [0, 1, 5]]),
        ((1,), (0,)),
        (
            ((0,), (1,), (3,)),
            ((0,), (2,), (4,), (5,)),
            ((1,), (3,), (5,)),
        ),
    )
    assert enumerate_solutions(sys_) == brute_solutions(sys_)


def test_enumerate_budget_precheck():
    g = z(5)
    sys_ = RestrictedSystem(g, IntMatrix([[1, 1, 1]]), ((0,),), full_sets(g, 3))
    with pytest.raises(BudgetExceededError):
        enumerate_solutions(sys_, budget=24)
    assert count_solutions(sys_, budget=25) == 25


@given(
    st.integers(2, 5),
    st.data(),
)
@settings(max_examples=50, deadline=None)
def test_enumeration_matches_oracle_random(n, data):
    g = z(n)
    m = data.draw(st.integers(1, 3))
    k = data.draw(st.integers(1, m))
    entries = data.draw(
        st.lists(
            st.lists(st.integers(0, n - 1), min_size=m, max_size=m),
            min_size=k,
            max_size=k,
        )
    )
    rhs = tuple((data.draw(st.integers(0, n - 1)),) for _ in range(k))
    sets = tuple(
        tuple(
            (v,)
            for v in data.draw(
                st.sets(st.integers(0, n - 1), min_size=1, max_size=n)
            )
        )
        for _ in range(m)
    )
    sys_ = RestrictedSystem(g, IntMatrix(entries), rhs, sets)
    assert enumerate_solutions(sys_) == brute_solutions(sys_)


# ----------------------------------------------------------------- thinness


def test_is_thin_fat_system():
    g = z(5)
    sys_ = RestrictedSystem(g, IntMatrix([[1, 1, 1]]), ((0,),), full_sets(g, 3))
    assert is_thin(sys_) is None


def test_is_thin_single_solution():
    g = z(4)
    sys_ = RestrictedSystem(
        g, IntMatrix([[1, 1, 1]]), ((0,),), (((0,),), ((1,),), ((3,),))
    )
    wit = is_thin(sys_)
    assert wit is not None
    assert wit.coordinate == 0
    assert wit.value == (0,)
    assert not wit.vacuous


def test_is_thin_vacuous():
    g = z(3)
    sys_ = RestrictedSystem(g, IntMatrix([[1, 1]]), ((1,),), (((0,),), ((0,),)))
    wit = is_thin(sys_)
    assert wit is not None
    assert wit.vacuous
    assert wit.coordinate == 0
    assert wit.value is None


def test_is_thin_constant_coordinate():
    # two solutions sharing their middle coordinate
    g = z(5)
    sys_ = RestrictedSystem(
        g,
        IntMatrix([[1, 1, 1]]),
        ((0,),),
        (((1,), (2,)), ((2,),), ((1,), (2,), (3,))),
    )
    sols = enumerate_solutions(sys_)
    assert len(sols) == 2
    wit = is_thin(sys_)
    assert wit is not None
    assert wit.coordinate == 1
    assert wit.value == (2,)


# -------------------------------------------------------------- translation


def test_homogenize_frozen_example():
    g = z(3)
    sys_ = RestrictedSystem(
        g,
        IntMatrix([[1, 1]]),
        ((2,),),
        (((0,), (1,)), ((1,), (2,))),
    )
    ext = homogenize(sys_)
    assert ext.target.is_homogeneous()
    assert ext.target.restrictions == (((0,), (1,)), ((0,), (2,)))
    assert enumerate_solutions(ext.target) == [((0,), (0,)), ((1,), (2,))]
    # value maps undo the shift by the witness (0, 2)
    assert ext.value_maps[0] == {(0,): (0,), (1,): (1,)}
    assert ext.value_maps[1] == {(0,): (2,), (2,): (1,)}
    report = verify_extension(ext)
    assert report.ok, report.problems


def test_homogenize_identity_when_homogeneous():
    g = z(5)
    sys_ = RestrictedSystem(g, IntMatrix([[1, 1]]), ((0,),), full_sets(g, 2))
    ext = homogenize(sys_)
    assert ext.target == sys_
    assert verify_extension(ext).ok


def test_homogenize_without_solutions():
    g = z(3)
    sys_ = RestrictedSystem(g, IntMatrix([[1, 1]]), ((1,),), (((0,),), ((0,),)))
    with pytest.raises(AlreadySolutionFree):
        homogenize(sys_)


def test_homogenize_projection_bijection():
    g = z(6)
    sys_ = RestrictedSystem(
        g,
        IntMatrix([[1, 2]]),
        ((3,),),
        (((0,), (1,), (3,)), ((0,), (1,), (3,), (4,))),
    )
    ext = homogenize(sys_)
    src = enumerate_solutions(sys_)
    tgt = enumerate_solutions(ext.target)
    assert sorted(ext.project(y) for y in tgt) == src
    assert verify_extension(ext).ok


# --------------------------------------------------------------- extensions


def test_identity_extension_verifies():
    g = z(4)
    sys_ = RestrictedSystem(g, IntMatrix([[1, 3]]), ((2,),), full_sets(g, 2))
    report = verify_extension(identity_extension(sys_))
    assert report.ok
    assert report.source_count == report.target_count == 4


def test_verify_extension_catches_bad_value_map():
    g = z(3)
    sys_ = RestrictedSystem(g, IntMatrix([[1, 1]]), ((0,),), full_sets(g, 2))
    good = identity_extension(sys_)
    broken_maps = dict(good.value_maps)
    broken_maps[0] = {v: (0,) for v in g.elements()}  # collapses everything
    bad = Extension(
        source=good.source,
        target=good.target,
        mapped_coords=good.mapped_coords,
        coord_map=good.coord_map,
        value_maps=broken_maps,
    )
    report = verify_extension(bad)
    assert not report.ok
    assert not report.bijection_ok
    assert report.problems


def test_verify_extension_catches_wrong_dimensions():
    g = z(3)
    small = RestrictedSystem(g, IntMatrix([[1, 1]]), ((0,),), full_sets(g, 2))
    big = RestrictedSystem(g, IntMatrix([[1, 1, 0]]), ((0,),), full_sets(g, 3))
    coords = (0, 1)
    ext = Extension(
        source=big,
        target=small,
        mapped_coords=coords,
        coord_map={j: j for j in coords},
        value_maps={j: {v: v for v in g.elements()} for j in coords},
    )
    report = verify_extension(ext)
    assert not report.ok
    assert not report.dimension_ok


def test_verify_extension_catches_non_full_unmapped():
    g = z(3)
    src = RestrictedSystem(g, IntMatrix([[1]]), ((0,),), (((0,),),))
    tgt = RestrictedSystem(
        g, IntMatrix([[1, 0]]), ((0,),), (((0,),), ((0,), (1,)))
    )
    ext = Extension(
        source=src,
        target=tgt,
        mapped_coords=(0,),
        coord_map={0: 0},
        value_maps={0: {(0,): (0,)}},
    )
    report = verify_extension(ext)
    assert not report.ok
    assert not report.full_group_ok


def test_compose_extensions():
    g = z(6)
    sys_ = RestrictedSystem(
        g,
        IntMatrix([[1, 2]]),
        ((3,),),
        (((0,), (1,), (3,)), ((0,), (1,), (3,), (4,))),
    )
    first = homogenize(sys_)
    second = identity_extension(first.target)
    comp = compose_extensions(first, second)
    assert comp.source == sys_
    assert comp.target == first.target
    assert verify_extension(comp).ok


def test_compose_rejects_mismatched_chain():
    g = z(3)
    a = identity_extension(
        RestrictedSystem(g, IntMatrix([[1]]), ((0,),), full_sets(g, 1))
    )
    b = identity_extension(
        RestrictedSystem(g, IntMatrix([[2]]), ((0,),), full_sets(g, 1))
    )
    with pytest.raises(PreconditionError):
        compose_extensions(a, b)


# ------------------------------------------------------------------ removal


def test_remove_elements():
    g = z(4)
    sys_ = RestrictedSystem(g, IntMatrix([[1, 1]]), ((0,),), full_sets(g, 2))
    trimmed = remove_elements(sys_, (((0,), (2,)), ()))
    assert trimmed.restrictions[0] == ((1,), (3,))
    assert trimmed.restrictions[1] == g.elements()
    with pytest.raises(PreconditionError):
        remove_elements(sys_, (((0,),),))


def test_pull_back_removal_translation():
    g = z(3)
    sys_ = RestrictedSystem(
        g,
        IntMatrix([[1, 1]]),
        ((2,),),
        (((0,), (1,)), ((1,), (2,))),
    )
    ext = homogenize(sys_)
    # killing every first-coordinate value on the target empties both sides
    gone = (tuple(ext.target.restrictions[0]), ())
    pulled = pull_back_removal(ext, gone)
    assert pulled == (((0,), (1,)), ())
    assert count_solutions(remove_elements(sys_, pulled)) == 0


def test_pull_back_rejects_unmapped_coordinate():
    g = z(3)
    src = RestrictedSystem(g, IntMatrix([[1]]), ((0,),), (((0,),),))
    tgt = RestrictedSystem(g, IntMatrix([[1, 0]]), ((0,),), (((0,),), g.elements()))
    ext = Extension(
        source=src,
        target=tgt,
        mapped_coords=(0,),
        coord_map={0: 0},
        value_maps={0: {(0,): (0,)}},
    )
    with pytest.raises(PreconditionError):
        pull_back_removal(ext, ((), ((1,),)))


def test_pull_back_rejects_value_outside_restriction():
    g = z(3)
    sys_ = RestrictedSystem(
        g, IntMatrix([[1, 1]]), ((2,),), (((0,), (1,)), ((1,), (2,)))
    )
    ext = homogenize(sys_)
    with pytest.raises(PreconditionError):
        pull_back_removal(ext, (((2,),), ()))
