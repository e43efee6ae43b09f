import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zsnft import discretize as D
from zsnft import profiles as P
from zsnft.errors import InvalidGrid


def test_midpoints():
    np.testing.assert_allclose(D.midpoints(1.0, 4), [-0.75, -0.25, 0.25, 0.75])


def test_sample_grid():
    pot = D.sample(P.over(2.0, 10.0), n=8)
    assert pot.n == 8 and pot.dt == 2.5
    np.testing.assert_allclose(pot.t, D.midpoints(10.0, 8))
    np.testing.assert_allclose(pot.samples, 2.0 / np.cosh(pot.t))


def test_rect_sampled_exactly():
    pot = D.sample(P.rect(1.5, 1.0), n=64)
    assert np.all(pot.samples == 1.5)


def test_samples_read_only():
    pot = D.sample(P.over(1.0), n=16)
    with pytest.raises(ValueError):
        pot.samples[0] = 1.0


@pytest.mark.parametrize("n, L", [(1, 1.0), (16, 0.0), (16, -2.0)])
def test_invalid_grid(n, L):
    with pytest.raises(InvalidGrid):
        D.sample(P.over(1.0), L=L, n=n)


def test_norms():
    pot = D.sample(P.rect(2.0, 1.0), n=32)
    assert abs(pot.l1_norm() - 4.0) < 1e-12
    assert abs(pot.energy() - 8.0) < 1e-12
    assert D.zero_potential().energy() == 0


def test_energy_of_sech():
    pot = D.sample(P.over(1.0, 30.0), n=4096)
    assert abs(pot.energy() - 2.0) < 1e-5


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 300), st.floats(0.1, 50.0))
def test_csv_round_trip(tmp_path_factory, n, L):
    rng = np.random.default_rng(n)
    pot = D.SampledPotential(rng.normal(size=n) + 1j * rng.normal(size=n), L)
    path = tmp_path_factory.mktemp("csv") / "q.csv"
    D.write_csv(pot, path)
    back = D.read_csv(path)
    np.testing.assert_array_equal(back.samples, pot.samples)
    assert abs(back.half_width - L) < 1e-9 * L


def test_read_csv_rejects_nonuniform(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,re_q,im_q\n-0.75,1,0\n-0.25,1,0\n0.5,1,0\n")
    with pytest.raises(InvalidGrid):
        D.read_csv(path)
