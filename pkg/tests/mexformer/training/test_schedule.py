import pytest

from mexformer.training.schedule import cosine_lr


def test_endpoints_and_midpoint():
    assert cosine_lr(0, 100, 1e-3, 1e-5) == 1e-3
    assert cosine_lr(100, 100, 1e-3, 1e-5) == 1e-5
    assert cosine_lr(50, 100, 1e-3, 1e-5) == pytest.approx((1e-3 + 1e-5) / 2, rel=1e-12)
    assert cosine_lr(0, 1, 0.1) == 0.1
    assert cosine_lr(1, 1, 0.1) == 0.0


def test_monotone_non_increasing():
    rates = [cosine_lr(step, 37, 0.5, 0.01) for step in range(38)]
    assert all(later <= earlier for earlier, later in zip(rates, rates[1:]))


@pytest.mark.parametrize("step,total", [(-1, 10), (11, 10), (0, 0)])
def test_invalid_steps(step, total):
    with pytest.raises(ValueError):
        cosine_lr(step, total, 1e-3)
