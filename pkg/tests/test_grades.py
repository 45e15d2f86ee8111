"""Rating-scale encoding: 22 ordered grades <-> notches 0..21."""

import numpy as np
import pytest

from notchcast.errors import OutOfRange, UnknownGrade
from notchcast.grades import SCALE, TOP_NOTCH, grade_to_notch, notch_to_grade, parse_rating

# Independent oracle: write the full scale out by hand, worst to best, and
# number it 0..21. Any disagreement with SCALE is a real defect.
HAND_SCALE_WORST_TO_BEST = [
    "D", "C", "CC", "CCC-", "CCC", "CCC+", "B-", "B", "B+", "BB-", "BB",
    "BB+", "BBB-", "BBB", "BBB+", "A-", "A", "A+", "AA-", "AA", "AA+", "AAA",
]


def test_scale_has_22_grades_best_first():
    assert len(SCALE) == 22
    assert SCALE[0] == "AAA"
    assert SCALE[-1] == "D"
    assert TOP_NOTCH == 21


def test_notch_assignment_matches_hand_enumeration():
    for notch, grade in enumerate(HAND_SCALE_WORST_TO_BEST):
        assert grade_to_notch(grade) == notch
        assert notch_to_grade(notch) == grade


def test_pinned_notches():
    assert grade_to_notch("AAA") == 21
    assert grade_to_notch("D") == 0
    assert grade_to_notch("A") == 16
    # counting up from D=0 through C, CC, CCC-, CCC, CCC+, B-, B, B+,
    # BB-, BB, BB+ puts BBB- at position 12
    assert grade_to_notch("BBB-") == 12
    assert notch_to_grade(12) == "BBB-"


def test_round_trip_bijection_all_grades():
    for grade in SCALE:
        assert notch_to_grade(grade_to_notch(grade)) == grade
    for notch in range(22):
        assert grade_to_notch(notch_to_grade(notch)) == notch


def test_strictly_monotone_in_credit_quality():
    notches = [grade_to_notch(g) for g in SCALE]  # best -> worst
    assert notches == sorted(notches, reverse=True)
    assert len(set(notches)) == 22


def test_parse_rating_trims_and_folds_case():
    assert parse_rating("AA+") == "AA+"
    assert parse_rating(" d ") == "D"
    assert parse_rating("bbb-") == "BBB-"


@pytest.mark.parametrize("bad", ["AA*", "AAu", "BBB-/*-", "", "  ", "notagrade", "A1"])
def test_parse_rating_rejects_unknown_symbols(bad):
    with pytest.raises(UnknownGrade):
        parse_rating(bad)


def test_grade_to_notch_rejects_unknown():
    with pytest.raises(UnknownGrade):
        grade_to_notch("AA*")


@pytest.mark.parametrize("bad", [-1, 22, 100])
def test_notch_to_grade_rejects_out_of_range(bad):
    with pytest.raises(OutOfRange):
        notch_to_grade(bad)


def test_notch_to_grade_rejects_non_integers():
    with pytest.raises(OutOfRange):
        notch_to_grade(3.5)


def test_notch_to_grade_accepts_numpy_integers():
    assert notch_to_grade(np.int64(21)) == "AAA"
