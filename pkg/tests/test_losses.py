import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymloss.data import Dataset
from asymloss.errors import AssumptionViolation, DegenerateLoss, SchemaError
from asymloss.losses import (
    ConstantQuartet,
    GroupQuartet,
    TabularQuartet,
    attach_weights,
    compute_net_losses,
    load_loss_spec,
    quartet_from_spec,
    residual_term,
    symmetric_quartet,
    threshold,
    validate,
    weigh_dataset,
    weight,
    weight_table,
)

finite = st.floats(min_value=-50, max_value=50, allow_nan=False)


def toy_dataset(n=3, groups=None, seed=0):
    rng = np.random.default_rng(seed)
    y = np.where(rng.random(n) < 0.5, 1, -1)
    return Dataset(
        X=rng.normal(size=(n, 2)),
        y=y,
        feature_names=["x1", "x2"],
        groups=groups,
    )


class TestNetLosses:
    def test_symmetric_zero_one(self):
        row = toy_dataset().row(0)
        pair = compute_net_losses(symmetric_quartet(), row)
        assert pair.a == 0.0
        assert pair.b == 2.0

    def test_group_baseline(self):
        q = GroupQuartet(psi={0: 3.0}, phi={0: 1.7})
        row = toy_dataset(groups=np.zeros(3, dtype=int)).row(0)
        pair = compute_net_losses(q, row)
        assert pair.a == pytest.approx(1.3, abs=1e-15)
        assert pair.b == pytest.approx(4.7, abs=1e-15)

    @given(l=st.tuples(finite, finite, finite, finite), k=finite)
    def test_constant_shift_cancels(self, l, k):
        row = toy_dataset().row(0)
        base = compute_net_losses(ConstantQuartet(*l), row)
        shifted = compute_net_losses(ConstantQuartet(*(v + k for v in l)), row)
        assert shifted.a == pytest.approx(base.a, abs=1e-9)
        assert shifted.b == pytest.approx(base.b, abs=1e-9)


class TestWeight:
    def test_symmetric_weight_is_two(self):
        row = toy_dataset().row(0)
        pair = compute_net_losses(symmetric_quartet(), row)
        assert weight(pair, 1) == 2.0
        assert weight(pair, -1) == 2.0

    def test_group_weights(self):
        q = GroupQuartet(psi={0: 3.0}, phi={0: 1.7})
        row = toy_dataset(groups=np.zeros(3, dtype=int)).row(0)
        pair = compute_net_losses(q, row)
        assert weight(pair, 1) == pytest.approx(6.0)
        assert weight(pair, -1) == pytest.approx(3.4)

    @given(k=st.floats(min_value=0.01, max_value=100, allow_nan=False))
    def test_scaling_the_quartet_scales_omega(self, k):
        row = toy_dataset().row(0)
        q = ConstantQuartet(0.0, k * 1.0, k * 1.0, 0.0)
        pair = compute_net_losses(q, row)
        assert weight(pair, 1) == pytest.approx(2 * k)
        assert threshold(q, row) == pytest.approx(0.5)


class TestThreshold:
    def test_symmetric_is_half(self):
        assert threshold(symmetric_quartet(), toy_dataset().row(0)) == 0.5

    def test_group_baseline_value(self):
        q = GroupQuartet(psi={0: 3.0}, phi={0: 1.7})
        row = toy_dataset(groups=np.zeros(3, dtype=int)).row(0)
        assert threshold(q, row) == pytest.approx(17 / 47, abs=1e-15)

    def test_symmetric_group(self):
        q = GroupQuartet(psi={0: 1.0}, phi={0: 1.0})
        row = toy_dataset(groups=np.zeros(3, dtype=int)).row(0)
        assert threshold(q, row) == 0.5

    def test_degenerate_denominator(self):
        q = ConstantQuartet(1.0, 1.0, 1.0, 1.0)  # zero net losses
        with pytest.raises(DegenerateLoss):
            threshold(q, toy_dataset().row(0))

    @given(
        psi=st.floats(min_value=0.1, max_value=20, allow_nan=False),
        phi=st.floats(min_value=0.1, max_value=20, allow_nan=False),
    )
    def test_threshold_equals_weight_fraction(self, psi, phi):
        q = GroupQuartet(psi={0: psi}, phi={0: phi})
        row = toy_dataset(groups=np.zeros(3, dtype=int)).row(0)
        pair = compute_net_losses(q, row)
        wp, wm = weight(pair, 1), weight(pair, -1)
        assert threshold(q, row) == pytest.approx(wm / (wp + wm), rel=1e-12)


class TestResidual:
    def test_symmetric_residual_vanishes(self):
        row = toy_dataset().row(0)
        assert residual_term(symmetric_quartet(), 1, row) == 0.0
        assert residual_term(symmetric_quartet(), -1, row) == 0.0


@settings(max_examples=30, deadline=None)
@given(
    cells=st.tuples(
        st.floats(min_value=-5, max_value=5, allow_nan=False),
        st.floats(min_value=-5, max_value=5, allow_nan=False),
        st.floats(min_value=-5, max_value=5, allow_nan=False),
        st.floats(min_value=-5, max_value=5, allow_nan=False),
    ),
    seed=st.integers(min_value=0, max_value=10_000),
)
def test_risk_decomposition_identity(cells, seed):
    """mean l(f,y,x) == 0.5*mean(omega*1{-yf>=0}) + mean d(y,x), exactly."""
    l_pp, l_np, l_pn, l_nn = cells
    q = ConstantQuartet(l_pp, l_np, l_pn, l_nn)
    rng = np.random.default_rng(seed)
    data = toy_dataset(n=50, seed=seed)
    decisions = np.where(rng.random(50) < 0.5, 1, -1)
    direct = float(np.mean(q.realized_losses(data, decisions)))
    cells_tab = q.cell_table(data)
    a = cells_tab[:, 1] - cells_tab[:, 0] + cells_tab[:, 3] - cells_tab[:, 2]
    b = cells_tab[:, 1] - cells_tab[:, 0] + cells_tab[:, 2] - cells_tab[:, 3]
    omega = data.y * a + b
    d_vals = np.array([residual_term(q, int(data.y[i]), data.row(i)) for i in range(50)])
    decomposed = float(np.mean(0.5 * omega * (-data.y * decisions >= 0)) + np.mean(d_vals))
    assert decomposed == pytest.approx(direct, rel=1e-10, abs=1e-12)


class TestValidate:
    def test_symmetric_passes_with_margin_one(self):
        report = validate(symmetric_quartet(), toy_dataset())
        assert report.passed
        assert report.min_margin_pos == pytest.approx(1.0)
        assert report.min_margin_neg == pytest.approx(1.0)

    def test_negative_net_loss_rejected(self):
        q = ConstantQuartet(l_pp=2.0, l_np=1.0, l_pn=1.0, l_nn=0.0)
        with pytest.raises(AssumptionViolation) as exc:
            validate(q, toy_dataset())
        assert exc.value.rows == [0, 1, 2]

    def test_magnitude_bound(self):
        q = ConstantQuartet(0.0, 1.0, 1.0, 0.0, M=0.5)
        with pytest.raises(AssumptionViolation):
            validate(q, toy_dataset())


class TestWeighDataset:
    def test_symmetric_rows(self):
        samples = weigh_dataset(symmetric_quartet(), toy_dataset())
        assert [s.omega for s in samples] == [2.0, 2.0, 2.0]
        assert [s.c for s in samples] == [0.5, 0.5, 0.5]

    def test_group_rows(self):
        data = toy_dataset(n=4, groups=np.array([0, 1, 0, 1]))
        q = GroupQuartet(psi={0: 3.0, 1: 1.0}, phi={0: 1.7, 1: 1.0})
        samples = weigh_dataset(q, data)
        for s in samples:
            expected_c = 17 / 47 if s.group == 0 else 0.5
            assert s.c == pytest.approx(expected_c)
            if s.group == 0:
                assert s.omega == pytest.approx(6.0 if s.y == 1 else 3.4)
            else:
                assert s.omega == pytest.approx(2.0)

    def test_empty_dataset(self):
        empty = Dataset(X=np.zeros((0, 2)), y=np.zeros(0), feature_names=["a", "b"])
        assert weigh_dataset(symmetric_quartet(), empty) == []

    def test_order_preserved_and_matches_table(self):
        data = toy_dataset(n=20, groups=np.arange(20) % 2, seed=3)
        q = GroupQuartet(psi={0: 3.0, 1: 1.0}, phi={0: 1.7, 1: 1.0})
        samples = weigh_dataset(q, data)
        omega, c = weight_table(q, data)
        assert np.array_equal([s.omega for s in samples], omega)
        assert np.array_equal([s.c for s in samples], c)


class TestTabularAndSpecs:
    def test_tabular_quartet_reads_columns(self):
        data = Dataset(
            X=np.zeros((2, 1)),
            y=np.array([1, -1]),
            feature_names=["x"],
            extras={
                "tp": np.array([-5.0, -5.0]),
                "fn": np.array([2.0, 2.0]),
                "fp": np.array([23.0, 23.0]),
                "tn": np.array([0.0, 0.0]),
            },
        )
        q = TabularQuartet(columns={"l_pp": "tp", "l_np": "fn", "l_pn": "fp", "l_nn": "tn"})
        assert q.cell_values(data.row(0)) == (-5.0, 2.0, 23.0, 0.0)
        omega, c = weight_table(q, data)
        assert omega[0] == pytest.approx(1 * (7 - 23) + (7 + 23))

    def test_spec_loader_round_trip(self, tmp_path):
        spec = tmp_path / "loss.json"
        spec.write_text('{"type": "group", "psi": {"0": 3, "1": 1}, "phi": {"0": 1.7, "1": 1}}')
        q = load_loss_spec(spec)
        assert isinstance(q, GroupQuartet)
        assert q.psi == {0: 3.0, 1: 1.0}

    def test_spec_loader_errors(self):
        with pytest.raises(SchemaError):
            quartet_from_spec({"type": "nope"})
        with pytest.raises(SchemaError):
            quartet_from_spec({"type": "constant", "l_pp": 0})
        with pytest.raises(SchemaError):
            quartet_from_spec({"type": "tabular"})


def test_omega_positive_after_validation():
    data = toy_dataset(n=30, groups=np.arange(30) % 2, seed=5)
    q = GroupQuartet(psi={0: 3.0, 1: 1.0}, phi={0: 1.7, 1: 1.0})
    wdata = attach_weights(q, data)
    assert (wdata.omega >= 2 * q.c_b).all()
    assert ((wdata.c > 0) & (wdata.c < 1)).all()
