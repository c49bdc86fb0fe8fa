import csv
import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edpc.belief import OUTLIER, MassFunction, full_set, make_mass, singleton
from edpc.density import CenterSet
from edpc.evaluation import OUTLIER_LABEL, HardPartition, contingency_csv, harden, label_of, nmi
from edpc.graph_io import GroundTruth
from edpc.propagation import CredalPartition
from oracles import nmi_oracle

W1, W2 = singleton(0), singleton(1)
BRIDGE = make_mass([(W1, 0.2387), (W2, 0.2387), (full_set(2), 0.3678), (OUTLIER, 0.1548)], 2)


def test_label_of_bridge_node():
    assert label_of(BRIDGE, "singletons_only") == 0
    assert label_of(BRIDGE, "all_focal") == (0, 1)


def test_label_of_vacuous():
    for mode in ("singletons_only", "all_focal"):
        assert label_of(MassFunction.vacuous(2), mode) == OUTLIER_LABEL


def test_singletons_only_without_singleton_mass():
    m = make_mass([(full_set(2), 0.6), (OUTLIER, 0.4)], 2)
    assert label_of(m, "singletons_only") == OUTLIER_LABEL
    assert label_of(m, "all_focal") == (0, 1)


def test_harden_partition():
    part = CredalPartition(
        (MassFunction.categorical(W1, 2), BRIDGE, MassFunction.categorical(W2, 2), MassFunction.vacuous(2)),
        CenterSet((0, 2)),
    )
    hard = harden(part, "all_focal")
    assert hard.labels == (0, (0, 1), 1, OUTLIER_LABEL)
    assert hard.imprecise == [1] and hard.outliers == [3]
    assert harden(part).labels == (0, 0, 1, OUTLIER_LABEL)


def test_nmi_identical():
    assert nmi([0, 0, 1, 1, 2], [0, 0, 1, 1, 2]) == 1.0


def test_nmi_single_class_against_two():
    assert nmi([0, 0, 0, 0], [0, 0, 1, 1]) == 0.0


def test_nmi_known_value():
    a, b = [0, 0, 0, 1, 1, 1], [0, 0, 1, 1, 2, 2]
    assert nmi(a, b) == pytest.approx(nmi_oracle(a, b), abs=1e-12)


def test_nmi_outliers_are_their_own_classes():
    # two outliers are distinct classes, so they do not match each other
    a = [0, 0, OUTLIER_LABEL, OUTLIER_LABEL]
    b = [0, 0, 1, 1]
    assert nmi(a, b) == pytest.approx(nmi_oracle([0, 0, 8, 9], b), abs=1e-12)
    assert nmi(a, b) < 1.0


def test_nmi_skips_imprecise_labels():
    part = HardPartition((0, 0, (0, 1), 1, 1), "all_focal")
    truth = GroundTruth((5, 5, 5, 7, 7))
    assert nmi(part, truth) == 1.0


def test_nmi_errors():
    with pytest.raises(ValueError):
        nmi([0, 1], [0, 1, 1])
    with pytest.raises(ValueError):
        nmi([(0, 1)], [0])


def test_contingency_csv():
    text = contingency_csv(HardPartition((0, 0, 1, OUTLIER_LABEL, (0, 1)), "all_focal"), [0, 1, 1, 1, 0])
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["predicted", "0", "1"]
    assert rows[1:] == [["0", "1", "1"], ["1", "0", "1"], ["outlier", "0", "1"], ["{0 1}", "1", "0"]]
    with pytest.raises(ValueError):
        contingency_csv([0], [0, 1])


labelings = st.integers(1, 40).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(0, 4), min_size=n, max_size=n),
        st.lists(st.integers(0, 4), min_size=n, max_size=n),
    )
)


@settings(max_examples=300)
@given(labelings)
def test_nmi_bounds_symmetry_and_oracle(pair):
    a, b = pair
    v = nmi(a, b)
    assert 0.0 <= v <= 1.0 + 1e-12
    assert v == pytest.approx(nmi(b, a), abs=1e-12)
    if len(set(a)) > 1 or len(set(b)) > 1:
        assert v == pytest.approx(nmi_oracle(a, b), abs=1e-10)


@settings(max_examples=200)
@given(labelings, st.permutations(range(5)))
def test_nmi_relabel_invariance(pair, perm):
    a, b = pair
    assert nmi([perm[x] for x in a], b) == pytest.approx(nmi(a, b), abs=1e-12)
