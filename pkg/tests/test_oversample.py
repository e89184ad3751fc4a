import math
import random
from collections import Counter

import pytest

from imbtext.oversample import RandomOversampler, SamplingPlan, apply_plan, make_plan, plan_report
from imbtext.wordpiece import TokenSeq


def seq(uid, label, ids=(1, 2, 3, 0)):
    return TokenSeq(ids=tuple(ids), length=3, label_id=label, uid=uid)


def build(counts):
    out = []
    for cls, n in counts.items():
        for i in range(n):
            out.append(seq(f"c{cls}-{i}", cls, ids=(cls + 1, i % 5 + 1, 3, 0)))
    return out


class TestMakePlan:
    def test_half_rate_example(self):
        plan = make_plan({0: 100, 1: 5, 2: 30}, 0.5)
        assert plan.target_count == 50
        assert plan.per_class_additions == {1: 45, 2: 20}

    def test_balanced_at_full_rate(self):
        plan = make_plan({0: 10, 1: 10}, 1.0)
        assert plan.per_class_additions == {}

    def test_tenth_rate_example(self):
        plan = make_plan({0: 1000, 1: 50, 2: 200}, 0.1)
        assert plan.target_count == 100
        assert plan.per_class_additions == {1: 50}

    def test_ceiling_rule(self):
        # 0.3 * 7 = 2.1 -> target 3
        plan = make_plan({0: 7, 1: 1}, 0.3)
        assert plan.target_count == 3
        assert plan.per_class_additions == {1: 2}

    def test_rate_validation(self):
        for bad in (0.0, -1.0, 1.01):
            with pytest.raises(ValueError):
                make_plan({0: 5}, bad)

    def test_counts_validation(self):
        with pytest.raises(ValueError):
            make_plan({}, 0.5)
        with pytest.raises(ValueError):
            make_plan({0: 0}, 0.5)


class TestApplyPlan:
    def test_empty_plan_identity(self):
        train = build({0: 4, 1: 4})
        plan = SamplingPlan(target_count=4, per_class_additions={})
        assert apply_plan(train, plan, seed=0) == train

    def test_deficit_filled(self):
        train = build({0: 100, 1: 5})
        plan = make_plan({0: 100, 1: 5}, 0.5)
        out = apply_plan(train, plan, seed=1)
        counts = Counter(s.label_id for s in out)
        assert counts == {0: 100, 1: 50}

    def test_appended_are_exact_duplicates(self):
        train = build({0: 20, 1: 3})
        plan = make_plan({0: 20, 1: 3}, 0.5)
        out = apply_plan(train, plan, seed=2)
        originals = {(s.ids, s.label_id) for s in train}
        for s in out[len(train):]:
            assert (s.ids, s.label_id) in originals
            assert s.label_id == 1

    def test_fresh_uids(self):
        train = build({0: 10, 1: 2})
        plan = make_plan({0: 10, 1: 2}, 1.0)
        out = apply_plan(train, plan, seed=3)
        uids = [s.uid for s in out]
        assert len(set(uids)) == len(uids)

    def test_original_prefix_untouched(self):
        train = build({0: 9, 1: 2})
        plan = make_plan({0: 9, 1: 2}, 1.0)
        out = apply_plan(train, plan, seed=4)
        assert out[: len(train)] == train

    def test_deterministic(self):
        train = build({0: 30, 1: 4, 2: 6})
        plan = make_plan({0: 30, 1: 4, 2: 6}, 0.8)
        assert apply_plan(train, plan, seed=5) == apply_plan(train, plan, seed=5)
        assert apply_plan(train, plan, seed=5) != apply_plan(train, plan, seed=6)

    def test_missing_class_named(self):
        train = build({0: 5})
        plan = SamplingPlan(target_count=5, per_class_additions={7: 3})
        with pytest.raises(ValueError, match="7"):
            apply_plan(train, plan, seed=0)

    def test_final_counts_max_rule_random_maps(self):
        rng = random.Random(202)
        for _ in range(50):
            k = rng.randint(2, 8)
            counts = {c: rng.randint(1, 40) for c in range(k)}
            r = rng.choice([0.1, 0.2, 0.5, 1.0])
            plan = make_plan(counts, r)
            out = apply_plan(build(counts), plan, seed=rng.randint(0, 999))
            final = Counter(s.label_id for s in out)
            target = math.ceil(r * max(counts.values()))
            for cls, n in counts.items():
                assert final[cls] == max(n, target)


class TestPlanReport:
    def test_report_lines(self):
        counts = {0: 100, 1: 5}
        plan = make_plan(counts, 0.5)
        report = plan_report(plan, counts, class_names=["maj", "min"])
        assert "target_count: 50" in report
        assert "maj\t100\t100\t0" in report
        assert "min\t5\t50\t45" in report


class TestOversamplerEstimator:
    def test_fit_resample_and_plan(self):
        train = build({0: 40, 1: 3})
        est = RandomOversampler(rate=0.5, seed=8)
        out = est.fit_resample(train)
        assert Counter(s.label_id for s in out) == {0: 40, 1: 20}
        assert est.plan_.target_count == 20
