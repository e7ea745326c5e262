"""Plan construction, composition, and kernel slicing."""

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from ezcrop import (
    LayerImportance,
    PlanLayer,
    PrunePlan,
    apply_plan,
    compose_plans,
    count_conv_flops,
    count_params,
    make_plan,
    prune_kernel_chain,
)


def importance_for(order, layer="conv"):
    """LayerImportance whose ranking is exactly `order`."""
    total = len(order)
    scores = [0.0] * total
    for pos, channel in enumerate(order):
        scores[channel - 1] = float(total - pos)
    return LayerImportance(
        layer=layer, metric="energy", beta=0.25, batch=1,
        scores=scores, order=list(order),
    )


def random_plan_pair(rng, layers=("a", "b", "c")):
    """A two-pass plan pair where the second pass indexes the first's survivors."""
    first, second = [], []
    for name in layers:
        total = int(rng.integers(3, 10))
        kept = int(rng.integers(2, total + 1))
        keep1 = sorted(rng.choice(np.arange(1, total + 1), size=kept, replace=False).tolist())
        kept2 = int(rng.integers(1, kept + 1))
        keep2 = sorted(rng.choice(np.arange(1, kept + 1), size=kept2, replace=False).tolist())
        first.append(PlanLayer(name, total, keep1))
        second.append(PlanLayer(name, kept, keep2))
    return PrunePlan(first), PrunePlan(second)


class TestMakePlan:
    def test_top_two(self):
        entry = make_plan(importance_for([2, 3, 1, 4]), 2)
        assert entry.keep == [2, 3]
        assert entry.channels == 4

    def test_keep_all(self):
        assert make_plan(importance_for([4, 2, 1, 3]), 4).keep == [1, 2, 3, 4]

    def test_keep_one(self):
        assert make_plan(importance_for([3, 1, 2]), 1).keep == [3]

    @pytest.mark.parametrize("count", [0, 5, -1])
    def test_count_out_of_range(self, count):
        with pytest.raises(ValueError):
            make_plan(importance_for([1, 2, 3, 4]), count)


class TestCompose:
    def test_hand_mapping(self):
        first = PrunePlan([PlanLayer("c1", 6, [1, 3, 5])])
        second = PrunePlan([PlanLayer("c1", 3, [1, 2])])
        assert compose_plans(first, second).layers[0].keep == [1, 3]

    def test_keep_all_is_identity_on_the_right(self):
        first = PrunePlan([PlanLayer("c1", 6, [2, 4, 6])])
        ident = PrunePlan([PlanLayer("c1", 3, [1, 2, 3])])
        assert compose_plans(first, ident).layers[0].keep == [2, 4, 6]

    def test_keep_all_is_identity_on_the_left(self):
        ident = PrunePlan([PlanLayer("c1", 5, [1, 2, 3, 4, 5])])
        second = PrunePlan([PlanLayer("c1", 5, [2, 5])])
        composed = compose_plans(ident, second)
        assert composed.layers[0].keep == [2, 5]
        assert composed.layers[0].channels == 5

    def test_composite_size_matches_second_pass(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            first, second = random_plan_pair(rng)
            composed = compose_plans(first, second)
            for a, b in zip(composed.layers, second.layers):
                assert len(a.keep) == len(b.keep)
                assert a.channels == first.by_id()[a.layer].channels

    def test_associative(self):
        rng = np.random.default_rng(22)
        for _ in range(25):
            first, second = random_plan_pair(rng)
            third = PrunePlan([
                PlanLayer(e.layer, len(e.keep),
                          sorted(rng.choice(np.arange(1, len(e.keep) + 1),
                                            size=max(1, len(e.keep) // 2),
                                            replace=False).tolist()))
                for e in second.layers
            ])
            left = compose_plans(compose_plans(first, second), third)
            right = compose_plans(first, compose_plans(second, third))
            assert left == right

    def test_layer_set_mismatch(self):
        first = PrunePlan([PlanLayer("c1", 4, [1, 2])])
        second = PrunePlan([PlanLayer("c2", 2, [1])])
        with pytest.raises(ValueError, match="different layers"):
            compose_plans(first, second)

    def test_channel_count_mismatch(self):
        first = PrunePlan([PlanLayer("c1", 4, [1, 2])])
        second = PrunePlan([PlanLayer("c1", 4, [1])])
        with pytest.raises(ValueError, match="mismatch"):
            compose_plans(first, second)


class TestApplyPlan:
    def test_keep_all_is_identity(self):
        kernel = np.random.default_rng(23).standard_normal((3, 3, 4, 6))
        out = apply_plan(kernel, [1, 2, 3, 4], [1, 2, 3, 4, 5, 6])
        assert_array_equal(out, kernel)

    def test_single_pair(self):
        kernel = np.random.default_rng(24).standard_normal((3, 3, 2, 2))
        assert_array_equal(apply_plan(kernel, [1], [1]), kernel[:, :, :1, :1])

    def test_matches_direct_indexing(self):
        kernel = np.random.default_rng(25).standard_normal((3, 3, 4, 6))
        out = apply_plan(kernel, [2, 4], [1, 5, 6])
        assert out.shape == (3, 3, 2, 3)
        for a, s in enumerate((2, 4)):
            for b, t in enumerate((1, 5, 6)):
                assert_array_equal(out[:, :, a, b], kernel[:, :, s - 1, t - 1])

    def test_commutes_with_composition(self):
        rng = np.random.default_rng(26)
        for _ in range(10):
            first, second = random_plan_pair(rng, layers=("x",))
            e1, e2 = first.layers[0], second.layers[0]
            kernel = rng.standard_normal((3, 3, 2, e1.channels))
            step = apply_plan(kernel, [1, 2], e1.keep)
            step = apply_plan(step, [1, 2], e2.keep)
            composed = compose_plans(first, second).layers[0]
            assert_array_equal(step, apply_plan(kernel, [1, 2], composed.keep))

    @pytest.mark.parametrize("keep", [[0], [5], [2, 2], [3, 1], []])
    def test_bad_keep_lists(self, keep):
        kernel = np.zeros((1, 1, 4, 4))
        with pytest.raises(ValueError):
            apply_plan(kernel, keep, [1])


class TestCounters:
    def test_params(self):
        assert count_params(np.zeros((3, 3, 4, 6))) == 216

    def test_flops(self):
        assert count_conv_flops(np.zeros((3, 3, 4, 6)), 32, 32) == 216 * 1024

    def test_reduction_after_pruning(self):
        kernel = np.zeros((3, 3, 8, 8))
        pruned = apply_plan(kernel, [1, 2, 3, 4], [1, 2, 3, 4])
        assert count_params(pruned) == count_params(kernel) // 4
        assert count_conv_flops(pruned, 16, 16) == count_conv_flops(kernel, 16, 16) // 4


class TestKernelChain:
    def test_keep_lists_thread_through(self):
        rng = np.random.default_rng(27)
        kernels = {
            "c1": rng.standard_normal((3, 3, 3, 8)),
            "c2": rng.standard_normal((3, 3, 8, 6)),
        }
        plan = PrunePlan([
            PlanLayer("c1", 8, [2, 5, 7]),
            PlanLayer("c2", 6, [1, 4]),
        ])
        pruned = prune_kernel_chain(kernels, plan, ["c1", "c2"])
        assert pruned["c1"].shape == (3, 3, 3, 3)
        assert pruned["c2"].shape == (3, 3, 3, 2)
        assert_array_equal(
            pruned["c2"], apply_plan(kernels["c2"], [2, 5, 7], [1, 4])
        )

    def test_mismatched_input_warns_and_keeps_all(self):
        rng = np.random.default_rng(28)
        kernels = {
            "c1": rng.standard_normal((3, 3, 3, 8)),
            "c2": rng.standard_normal((3, 3, 12, 4)),  # 12 != channels kept by c1
        }
        plan = PrunePlan([
            PlanLayer("c1", 8, [1, 2]),
            PlanLayer("c2", 4, [3]),
        ])
        with pytest.warns(UserWarning, match="does not line up"):
            pruned = prune_kernel_chain(kernels, plan, ["c1", "c2"])
        assert pruned["c2"].shape == (3, 3, 12, 1)

    def test_wrong_output_count_raises(self):
        kernels = {"c1": np.zeros((3, 3, 3, 8))}
        plan = PrunePlan([PlanLayer("c1", 6, [1])])
        with pytest.raises(ValueError, match="output"):
            prune_kernel_chain(kernels, plan, ["c1"])
