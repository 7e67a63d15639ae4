"""The example registry's own reports must be reproducible."""

import numpy as np
import pytest

from lqglandscape import EXAMPLE_NAMES, get_example, list_examples


def test_registry_names():
    assert set(EXAMPLE_NAMES) == {
        "ex3.1", "ex3.2", "ex3.3", "ex4.1", "ex4.2", "ex4.3", "ex4.4",
        "ex4.5", "doyle", "exB.3", "exD.1",
    }
    assert [ex.name for ex in list_examples()] == list(EXAMPLE_NAMES)


def test_parameterized_lookup():
    ex = get_example("ex4.5(0.1)")
    assert ex.name == "ex4.5(0.1)"
    assert ex.plant.B[1, 0] == pytest.approx(1.1)
    assert get_example("ex4.5").plant.B[1, 0] == pytest.approx(1.5)


def test_unknown_name():
    with pytest.raises(KeyError):
        get_example("ex9.9")


def test_malformed_parameter():
    with pytest.raises(ValueError):
        get_example("ex4.5(zero)")
    with pytest.raises(ValueError):
        get_example("ex4.5(-1)")


def test_controller_lookup_error_lists_witnesses():
    ex = get_example("doyle")
    with pytest.raises(KeyError, match="optimum"):
        ex.controller("nope")


@pytest.mark.parametrize("name", EXAMPLE_NAMES)
def test_all_checks_pass(name):
    ex = get_example(name)
    results = ex.checks()
    assert results, f"{name} has no checks"
    failures = [f"{r.label}: {r.detail}" for r in results if not r.passed]
    assert not failures, f"{name} failed: " + "; ".join(failures)


def test_witness_matrices_are_copies_safe():
    # Two lookups must not share mutable state.
    a = get_example("ex3.2").plant.A
    b = get_example("ex3.2").plant.A
    assert np.array_equal(a, b)
