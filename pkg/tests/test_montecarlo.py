import numpy as np
import pytest

from expsig import montecarlo as mc
from expsig import tensor as ta


def test_zero_increments_give_unit():
    sig = mc.signature_of_increments(np.zeros((3, 2)), 4)
    assert sig == ta.unit(2, 4, "float")


def test_level_one_is_total_increment():
    inc = mc.sample_increments(3, 1, 5, 7, 11)
    sig = mc.signature_of_increments(inc, 3)
    np.testing.assert_allclose(sig.block(1), inc.sum(axis=0), rtol=0, atol=1e-14)


def test_single_segment_diagonal():
    v = np.array([0.3, -1.2])
    sig = mc.segment_signature(v, 3)
    assert sig["11"] == pytest.approx(0.045, abs=1e-16)
    assert sig["22"] == pytest.approx(0.72, abs=1e-15)


def test_sample_is_deterministic():
    a = mc.sample_pwl_signature(2, 1, 4, 4, sample_index=3, master_seed=99)
    b = mc.sample_pwl_signature(2, 1, 4, 4, sample_index=3, master_seed=99)
    c = mc.sample_pwl_signature(2, 1, 4, 4, sample_index=4, master_seed=99)
    assert a == b and a != c


def test_increment_variance():
    inc = np.stack([mc.sample_increments(2, 2, 4, i, 0) for i in range(4000)])
    assert inc.var() == pytest.approx(0.5, rel=0.05)


def test_reversed_path_is_reversed_product():
    inc = mc.sample_increments(2, 1, 3, 0, 5)
    segs = [mc.segment_signature(v, 4) for v in inc[::-1]]
    expected = ta.product(ta.product(segs[0], segs[1]), segs[2])
    got = mc.signature_of_increments(inc[::-1], 4)
    for x, y in zip(got.blocks, expected.blocks):
        np.testing.assert_allclose(x, y, rtol=1e-13, atol=1e-15)


def test_reversed_path_signature_is_inverse():
    inc = mc.sample_increments(2, 1, 3, 1, 5)
    fwd = mc.signature_of_increments(inc, 4)
    back = mc.signature_of_increments(-inc[::-1], 4)
    prod = ta.product(fwd, back)
    for n, b in enumerate(prod.blocks):
        np.testing.assert_allclose(b, [1.0] if n == 0 else 0.0, atol=1e-12)


def test_batch_matches_single_sample_path():
    inc = np.stack([mc.sample_increments(3, 1, 4, i, 2) for i in range(5)])
    batch = mc.batch_signatures(inc, 4)
    for i in range(5):
        single = mc.signature_of_increments(inc[i], 4)
        np.testing.assert_allclose(batch[i], np.concatenate(single.blocks), rtol=1e-12, atol=1e-14)


def test_estimate_is_bit_identical_across_workers():
    a = mc.estimate_expected_signature(2, 1, 3, 3, 5000, 17, workers=1)
    b = mc.estimate_expected_signature(2, 1, 3, 3, 5000, 17, workers=4)
    for x, y in zip(a.mean.blocks + a.stderr.blocks, b.mean.blocks + b.stderr.blocks):
        assert x.tobytes() == y.tobytes()


def test_merge_matches_direct_statistics():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((1000, 4))
    parts = [(len(p), p.mean(axis=0), np.square(p - p.mean(axis=0)).sum(axis=0)) for p in np.split(x, [100, 350, 900])]
    acc = parts[0]
    for p in parts[1:]:
        acc = mc._merge(acc, p)
    np.testing.assert_allclose(acc[1], x.mean(axis=0), atol=1e-14)
    np.testing.assert_allclose(acc[2] / 999, x.var(axis=0, ddof=1), rtol=1e-12)


def test_level_zero_z_not_applicable():
    est = mc.estimate_expected_signature(2, 1, 2, 2, 200, 1)
    assert np.isnan(est.zscores[""])
    assert est.stderr[""] == 0
    assert est.mean[""] == 1


def test_small_estimate_is_sane():
    est = mc.estimate_expected_signature(2, 1, 2, 4, 20000, 8)
    assert abs(est.zscores["11"]) < 5
    assert np.all(est.abs_z() < 6)


def test_requires_two_samples():
    with pytest.raises(ValueError):
        mc.estimate_expected_signature(2, 1, 2, 2, 1, 0)


def test_zscores_calibrated_across_seeds():
    # pooled over independent seeds, |z| should look half-normal
    z = np.concatenate([mc.estimate_expected_signature(2, 1, 4, 4, 20_000, s).abs_z(True) for s in range(100, 112)])
    assert z.size == 120
    assert (z <= 2).mean() >= 0.88
    assert 0.75 <= np.sqrt(np.mean(z**2)) <= 1.25
