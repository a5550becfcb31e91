import numpy as np

from meshseg.nn.gradcheck import finite_difference_check
from meshseg.nn.layers import Linear


def linear_setup(rng):
    lin = Linear(3, 2, rng)
    x = rng.normal(size=(5, 3))

    def loss_fn():
        y = lin.forward(x, train=True)
        return float((y ** 2).sum())

    y = lin.forward(x, train=True)
    for _, p in lin.parameters():
        p.grad[...] = 0.0
    lin.backward(2 * y)
    return lin, loss_fn


def test_correct_gradient_passes_tightly(rng):
    lin, loss_fn = linear_setup(rng)
    report = finite_difference_check(loss_fn, lin.parameters(), tolerance=1e-6)
    assert report.passed
    assert report.max_error < 1e-7
    assert set(report.per_tensor) == {"weight", "bias"}


def test_corrupted_gradient_is_reported(rng):
    lin, loss_fn = linear_setup(rng)
    lin.weight.grad *= 1.01
    report = finite_difference_check(loss_fn, lin.parameters(), tolerance=1e-4)
    assert not report.passed
    assert report.per_tensor["weight"] > 5e-3
    assert report.per_tensor["bias"] < 1e-6


def test_report_formatting(rng):
    lin, loss_fn = linear_setup(rng)
    lin.bias.grad += 1.0
    report = finite_difference_check(loss_fn, lin.parameters(), tolerance=1e-4)
    text = str(report)
    assert "FAIL bias" in text
    assert "PASS weight" in text
    assert "tolerance 1.0e-04" in text


def test_entry_subsampling_bounds_work(rng):
    lin, loss_fn = linear_setup(rng)
    report = finite_difference_check(
        loss_fn, lin.parameters(), tolerance=1e-5,
        max_entries_per_tensor=2, rng=np.random.default_rng(3),
    )
    assert report.passed


def test_empty_parameter_list():
    report = finite_difference_check(lambda: 0.0, [], tolerance=1e-4)
    assert report.passed
    assert report.max_error == 0.0
