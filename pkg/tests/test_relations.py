import random

import pytest

from affine_frieze.errors import (
    CalibrationFailed,
    InsufficientDepth,
    InvalidPath,
    InvalidQuiverError,
    NotAdjacent,
)
from affine_frieze.frieze import FriezeTable, extract_x_delta, frieze_specialized, frieze_symbolic
from affine_frieze.lattice import build_quiver, reoriented
from affine_frieze.laurent import RationalSpecialization
from affine_frieze.relations import (
    E7_ALIGNMENT,
    ApqShift,
    calibrate_e7_alignment,
    fold_check,
    tube_sequence,
    verify_apq,
    verify_apq_second_order,
    verify_dn_odd,
    verify_e7_chain,
    verify_e8_chain,
    verify_extending,
    verify_neighbor,
    verify_path_relation,
)


def numeric_tables(tag, count=3, seed=1):
    q = build_quiver(tag)
    rng = random.Random(seed)
    return [FriezeTable(q, RationalSpecialization.random(q.n_plus_one, rng)) for _ in range(count)]


def all_pass(tables, check):
    reports = [check(t) for t in tables]
    return all(r.passed for r in reports)


def fails_everywhere(report):
    return all(not ok for _, ok in report.rows)


def test_apq_shift_table():
    s = ApqShift(3, 2)
    assert [s.l(i) for i in range(3)] == [-2, -1, 0]
    assert s.l(3) == -1 and s.l(4) == -2
    assert all(s.r(i) == -s.l((i + 2) % 5) for i in range(5))


# symbolic checks on small instances

def test_extending_d4_symbolic():
    t = FriezeTable(build_quiver("D:4"))
    for e in (0, 1, 3, 4):
        assert verify_extending(t, e, (2, 12)).passed


def test_extending_d6_symbolic():
    assert verify_extending(FriezeTable(build_quiver("D:6")), 0, (4, 10)).passed


@pytest.mark.parametrize("tag", ["A:2,1", "A:3,1", "A:2,2", "A:3,2"])
def test_apq_symbolic(tag):
    t = FriezeTable(build_quiver(tag))
    q = t.quiver.params[1]
    assert verify_apq(t, (q, q + 8)).passed


def test_apq_examples():
    assert verify_apq(FriezeTable(build_quiver("A:2,1")), (2, 10)).passed
    assert verify_apq_second_order(FriezeTable(build_quiver("A:2,2")), (2, 10)).passed
    assert verify_apq(FriezeTable(build_quiver("A:3,2")), (3, 8)).passed


def test_dn_odd_d5_twisted_symbolic():
    assert verify_dn_odd(FriezeTable(build_quiver("D:5")), 0, (3, 10), part="twisted").passed


def test_symbolic_and_specialized_verdicts_agree():
    q = build_quiver("D:4")
    sym = FriezeTable(q)
    spec = RationalSpecialization.random(5, random.Random(2))
    num = FriezeTable(q, spec)
    good = verify_extending(sym, 0, (2, 10)), verify_extending(num, 0, (2, 10))
    bad = verify_extending(sym, 0, (2, 10), perturb=(1, 0)), verify_extending(num, 0, (2, 10), perturb=(1, 0))
    assert [r.rows for r in good] == [[(j, True) for j in range(2, 11)]] * 2
    assert good[0].rows == good[1].rows and bad[0].rows == bad[1].rows
    assert extract_x_delta(sym).value.evaluate(spec.values) == extract_x_delta(num).value


# numeric checks where the symbolic terms get large

def test_extending_e6():
    assert all_pass(numeric_tables("E:6"), lambda t: verify_extending(t, 1, (6, 12)))


@pytest.mark.parametrize("tag,e", [("E:7", 1), ("E:8", 1), ("D:8", 8)])
def test_extending_larger(tag, e):
    b = 2 * {"E:7": 12, "E:8": 30, "D:8": 6}[tag]
    assert all_pass(numeric_tables(tag), lambda t: verify_extending(t, e, (b // 2, b)))


def test_dn_odd_numeric():
    assert all_pass(numeric_tables("D:5"), lambda t: verify_dn_odd(t, 0, (6, 12)))
    assert all_pass(numeric_tables("D:7"), lambda t: verify_dn_odd(t, 7, (10, 14)))


def test_neighbor_examples():
    tables = numeric_tables("E:6")
    for t in tables:
        r = verify_neighbor(t, 1, 2, (0, 15))
        assert r.passed and r.extra["earliest_passing_row"] == 0
    t = numeric_tables("D:6", 1)[0]
    r = verify_neighbor(t, 6, 4, (0, 15))
    assert r.passed and r.extra["earliest_passing_row"] == 0
    # row 0 is the seed row: X^l_0 = x_l
    assert r.rows[0] == (0, True)


def test_neighbor_reverse_orientation_uses_offset():
    q = reoriented(build_quiver("D:4"), [(2, 0), (2, 1), (2, 3), (2, 4)])
    r = verify_neighbor(FriezeTable(q), 0, 2, (0, 10))
    assert r.passed and r.extra["row_offset"] == 1


def test_neighbor_errors():
    t = FriezeTable(build_quiver("E:6"))
    with pytest.raises(NotAdjacent):
        verify_neighbor(t, 1, 7, (0, 3))


@pytest.mark.parametrize(
    "tag,path,window", [("E:6", (1, 2, 7), (2, 12)), ("E:7", (1, 2, 3), (2, 12)), ("E:8", (1, 2, 3, 4), (2, 10))]
)
def test_path_relation(tag, path, window):
    assert all_pass(numeric_tables(tag), lambda t: verify_path_relation(t, path, window))


def test_path_relation_symbolic_e6_short():
    assert verify_path_relation(FriezeTable(build_quiver("E:6")), (1, 2, 7), (2, 4)).passed


@pytest.mark.parametrize("path", [(1, 2), (2, 1, 7), (2, 7, 4), (1, 7, 4)])
def test_invalid_paths(path):
    with pytest.raises(InvalidPath):
        verify_path_relation(FriezeTable(build_quiver("E:6")), path, (2, 4))


@pytest.mark.parametrize("tag,i", [("D:6", 3), ("D:7", 4), ("D:7", 3), ("D:8", 4), ("D:8", 5)])
def test_tube_periods(tag, i):
    for t in numeric_tables(tag):
        seq, report = tube_sequence(t, i, (0, 12))
        assert report.passed and report.extra["period"] == t.quiver.n - 2


def test_tube_d6_symbolic():
    seq, report = tube_sequence(FriezeTable(build_quiver("D:6")), 3, (0, 4))
    assert report.passed and all(v.has_positive_coefficients() for v in seq)


def test_constant_specialization_is_periodic_but_not_constant():
    q = build_quiver("D:6")
    t = FriezeTable(q, RationalSpecialization.constant(7))
    seq, report = tube_sequence(t, 3, (0, 12))
    assert report.passed
    assert len(set(seq)) > 1
    e7 = FriezeTable(build_quiver("E:7"), RationalSpecialization.constant(8))
    assert verify_e7_chain(e7, (8, 20)).passed


def test_tube_errors():
    with pytest.raises(InvalidQuiverError):
        tube_sequence(FriezeTable(build_quiver("D:6")), 2, (0, 4))
    with pytest.raises(InvalidQuiverError):
        tube_sequence(FriezeTable(build_quiver("E:6")), 3, (0, 4))


def test_e8_chain():
    for t in numeric_tables("E:8"):
        for part in ("period", "x6", "x8"):
            assert verify_e8_chain(t, (7, 20), parts=(part,)).passed


def test_e7_calibration_reproduces_frozen_alignment():
    for t in numeric_tables("E:7", 2):
        assert calibrate_e7_alignment(t) == E7_ALIGNMENT
        assert verify_e7_chain(t, (8, 20)).passed
        a, a1, a2 = E7_ALIGNMENT
        assert not verify_e7_chain(t, (8, 20), (a, a1, a2 + 1)).passed


def test_e7_calibration_can_fail():
    t = numeric_tables("E:7", 1)[0]
    with pytest.raises(CalibrationFailed):
        calibrate_e7_alignment(t, bound=1)


def test_fold_d4():
    q = reoriented(build_quiver("D:4"), [(0, 2), (1, 2), (3, 2), (4, 2)])
    assert fold_check(q, [[0, 1, 3, 4], [2]], (0, 20)).passed


def test_fold_d4_default_orientation():
    # with two sources and two sinks only the matching pairs coincide
    q = build_quiver("D:4")
    assert fold_check(q, [[0, 1], [3, 4], [2]], (0, 20)).passed
    with pytest.raises(ValueError):
        fold_check(q, [[0, 1, 3, 4], [2]], (0, 5))


def test_fold_e6_z3():
    assert fold_check(build_quiver("E:6"), [[1, 3, 5], [2, 4, 6], [7]], (0, 12)).passed


def test_fold_trivial_partition():
    q = build_quiver("E:6")
    assert fold_check(q, [[i] for i in q.labels], (0, 5)).passed


def test_fold_specialized_table_must_be_orbit_constant():
    q = build_quiver("E:6")
    t = FriezeTable(q, RationalSpecialization(range(1, 8)))
    with pytest.raises(ValueError):
        fold_check(q, [[1, 3, 5], [2, 4, 6], [7]], (0, 5), table=t)


# negative controls: any single +1 perturbation breaks every row

def _perturbations(n_terms, n_factors):
    return [(k, f) for k in range(n_terms) for f in range(n_factors[k])]


@pytest.mark.parametrize(
    "tag,check,shape",
    [
        ("D:4", lambda t, p: verify_extending(t, 0, (2, 10), perturb=p), [2, 1, 1]),
        ("E:6", lambda t, p: verify_extending(t, 1, (6, 12), perturb=p), [2, 1, 1]),
        ("D:5", lambda t, p: verify_dn_odd(t, 0, (6, 12), part="twisted", perturb=p), [2, 1, 1]),
        ("D:5", lambda t, p: verify_dn_odd(t, 0, (6, 12), part="second-order", perturb=p), [3, 1, 1, 1]),
        ("A:3,2", lambda t, p: verify_apq(t, (2, 10), perturb=p), [2, 1, 1]),
        ("A:2,2", lambda t, p: verify_apq_second_order(t, (2, 10), perturb=p), [3, 1, 1, 1]),
        ("E:6", lambda t, p: verify_neighbor(t, 1, 2, (0, 15), perturb=p), [1, 2, 1]),
        ("E:7", lambda t, p: verify_path_relation(t, (1, 2, 3), (2, 12), perturb=p), [2, 1, 1]),
        ("D:6", lambda t, p: tube_sequence(t, 3, (0, 12), perturb=p)[1], [1, 1]),
        ("E:8", lambda t, p: verify_e8_chain(t, (7, 20), parts=("x6",), perturb=p), [1, 2, 1]),
        ("E:8", lambda t, p: verify_e8_chain(t, (7, 20), parts=("period",), perturb=p), [1, 1]),
        ("E:7", lambda t, p: verify_e7_chain(t, (8, 20), perturb=p), [1, 1]),
    ],
)
def test_single_term_perturbation_fails_every_row(tag, check, shape):
    t = numeric_tables(tag, 1)[0]
    assert check(t, None).passed
    for p in _perturbations(len(shape), shape):
        assert fails_everywhere(check(t, p)), p


def test_perturbed_x_delta_fails_every_row():
    t = FriezeTable(build_quiver("D:6"))
    xd = extract_x_delta(t.extend(8)).value
    assert fails_everywhere(verify_extending(t, 0, (4, 10), x_delta=xd + 1))


def test_window_errors():
    t = FriezeTable(build_quiver("D:4"))
    with pytest.raises(InsufficientDepth):
        verify_extending(t, 0, (1, 5))
    with pytest.raises(InvalidQuiverError):
        verify_extending(t, 2, (2, 5))
    with pytest.raises(InvalidQuiverError):
        verify_extending(FriezeTable(build_quiver("D:5")), 0, (6, 8))
    with pytest.raises(InvalidQuiverError):
        verify_dn_odd(t, 0, (6, 8))


def test_report_json():
    t = FriezeTable(build_quiver("D:4"))
    data = verify_extending(t, 0, (2, 4), perturb=(1, 0)).to_json()
    assert set(data) == {"relation", "mode", "window", "passed", "failures"}
    assert data["window"] == [2, 4] and data["passed"] is False
    assert [f["j"] for f in data["failures"]] == [2, 3, 4]
