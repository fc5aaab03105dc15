import numpy as np
import pytest

from triadic import rng


def test_chunking_does_not_change_draws():
    full = rng.normals(11, 3, 0, 1000)
    pieces = np.concatenate([rng.normals(11, 3, s, min(s + 137, 1000))
                             for s in range(0, 1000, 137)])
    assert np.array_equal(full, pieces)


@pytest.mark.parametrize("start", [0, 1, 2, 3, 5, 999])
def test_single_replicate_addressing(start):
    full = rng.uniforms(4, 2, 0, 1005)
    assert np.array_equal(rng.uniforms(4, 2, start, start + 1), full[start:start + 1])


def test_coordinates_and_seeds_differ():
    a = rng.uniforms(1, 0, 0, 100)
    assert not np.array_equal(a, rng.uniforms(1, 1, 0, 100))
    assert not np.array_equal(a, rng.uniforms(2, 0, 0, 100))
    assert not np.array_equal(a, rng.uniforms(1, 0, 0, 100, stream=1))


def test_uniforms_open_interval():
    u = rng.uniforms(0, 0, 0, 100_000)
    assert u.min() > 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 4 * np.sqrt(1 / 12 / u.size)


def test_normals_moments():
    z = rng.normals(3, 2, 0, 200_000)
    assert np.all(np.abs(z.mean(axis=0)) < 4 / np.sqrt(z.shape[0]))
    assert np.all(np.abs(z.var(axis=0) - 1) < 0.02)


def test_negative_seed_rejected():
    with pytest.raises(ValueError):
        rng.philox_key(-1)
