import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entrelax.statefile import StateFileError, format_state, parse_state_text, read_state_file
from entrelax.states import horodecki, random_density_matrix, werner


def test_round_trip_bit_exact(tmp_path):
    path = tmp_path / "h.txt"
    path.write_text(format_state(horodecki(3.5), (3, 3)))
    rho, dims = read_state_file(path)
    assert tuple(dims) == (3, 3)
    assert np.array_equal(rho, horodecki(3.5))


@given(st.integers(0, 2**32 - 1))
def test_round_trip_random(seed):
    m = random_density_matrix(6, np.random.default_rng(seed))
    rho, _ = parse_state_text(format_state(m, (2, 3)))
    assert np.array_equal(rho, 0.5 * (m + m.conj().T))


def test_comments_and_blank_lines():
    text = "# werner\n\n" + format_state(werner(0.6), (2, 2))
    rho, _ = parse_state_text(text)
    assert np.allclose(rho, werner(0.6))


def _lines(rho=None):
    return format_state(werner(0.6) if rho is None else rho, (2, 2)).splitlines()


@pytest.mark.parametrize("mutate, invariant", [
    (lambda ln: ["2"] + ln[1:], "header"),
    (lambda ln: ln[:-1], "entry count"),
    (lambda ln: ln[:3] + ["x 0"] + ln[4:], "numeric entries"),
    (lambda ln: ln[:3] + ["0.1 0.0 0.0"] + ln[4:], "numeric entries"),
    (lambda ln: ln[:2] + ["0.5 0.0"] + ln[3:], "Hermitian"),
    (lambda ln: ["2 2", "0.9 0.0"] + ln[2:], "unit trace"),
])
def test_named_invariants(mutate, invariant):
    with pytest.raises(StateFileError) as info:
        parse_state_text("\n".join(mutate(_lines())))
    assert info.value.invariant == invariant


def test_not_psd():
    bad = np.diag([1.2, -0.2, 0.0, 0.0])
    with pytest.raises(StateFileError) as info:
        parse_state_text(format_state(bad, (2, 2)))
    assert info.value.invariant == "positive semidefinite"


def test_missing_file(tmp_path):
    with pytest.raises(StateFileError) as info:
        read_state_file(tmp_path / "nope.txt")
    assert info.value.invariant == "readable file"
