#include <doctest.h>

#include <cmath>
#include <random>

#include "asrlab/metrics.hpp"

using namespace asrlab;
using namespace asrlab::metrics;

TEST_CASE("batch_accuracy and argmax ties") {
    Matrix logits(4, 3, {5, 0, 0, 0, 5, 0, 0, 0, 5, 5, 0, 0});
    CHECK(batch_accuracy(logits, {0, 1, 2, 0}) == 1.0);
    CHECK(batch_accuracy(logits, {1, 1, 2, 0}) == 0.75);
    CHECK(batch_accuracy(logits, {1, 0, 1, 1}) == 0.0);

    // ties resolve to the lowest class index
    Matrix tie(1, 3, {2, 2, 2});
    CHECK(argmax_rows(tie) == std::vector<int>{0});
    CHECK(batch_accuracy(tie, {0}) == 1.0);
    CHECK(batch_accuracy(tie, {1}) == 0.0);

    CHECK_THROWS_AS(batch_accuracy(logits, {0, 1}), ShapeError);
}

TEST_CASE("class_coverage") {
    CHECK(class_coverage({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, 10) == 1.0);
    CHECK(class_coverage({3, 3, 3, 3}, 10) == doctest::Approx(0.1));
    CHECK(class_coverage({0, 1, 0, 1, 1}, 10) == doctest::Approx(0.2));
    CHECK_THROWS_AS(class_coverage({}, 10), ShapeError);
}

namespace {
RunRecord record_with_accuracy(const std::vector<double>& accs,
                               const std::vector<std::size_t>& reset_at = {}) {
    RunRecord rec;
    for (std::size_t i = 0; i < accs.size(); ++i) {
        StepRow row;
        row.step = long(i) + 1;
        row.accuracy = accs[i];
        row.domain = "rotation";
        rec.rows.push_back(row);
    }
    for (std::size_t i : reset_at) rec.rows[i].reset = true;
    return rec;
}
}  // namespace

TEST_CASE("window_coverage uses per-row prediction masks") {
    RunRecord rec = record_with_accuracy(std::vector<double>(6, 1.0));
    rec.rows[0].predicted_mask = 0b0000000001;  // class 0
    rec.rows[1].predicted_mask = 0b0000000011;  // classes 0,1
    rec.rows[2].predicted_mask = 0b1000000000;  // class 9
    CHECK(window_coverage(rec, 0, 1, 10) == doctest::Approx(0.1));
    CHECK(window_coverage(rec, 0, 3, 10) == doctest::Approx(0.3));
    CHECK(window_coverage(rec, 1, 3, 10) == doctest::Approx(0.3));
    CHECK(window_coverage(rec, 3, 6, 10) == 0.0);  // empty masks
}

TEST_CASE("collapse_flag") {
    CHECK(collapse_flag(0.3, 0.5));
    CHECK_FALSE(collapse_flag(0.5, 0.5));
    CHECK_FALSE(collapse_flag(0.7, 0.5));
}

TEST_CASE("reset_drop_and_delay: beneficial reset, no delay") {
    std::vector<double> accs(40, 0.4);
    for (std::size_t i = 21; i < 40; ++i) accs[i] = 0.8;  // improves after reset at idx 20
    RunRecord rec = record_with_accuracy(accs, {20});
    auto events = reset_drop_and_delay(rec);
    REQUIRE(events.size() == 1);
    CHECK(events[0].reset_step == 21);
    CHECK(events[0].pre_accuracy == doctest::Approx(0.4));
    CHECK(events[0].post_accuracy == doctest::Approx(0.8));
    CHECK(events[0].drop == doctest::Approx(0.4));
    CHECK(events[0].recovery_delay == 0);
}

TEST_CASE("reset_drop_and_delay: detrimental reset with delay 7") {
    // pre window mean 0.8 (max 0.8); after the reset accuracy dips to 0.5 and
    // regains 0.8 on the 7th post-reset row
    std::vector<double> accs(60, 0.8);
    for (std::size_t i = 31; i < 37; ++i) accs[i] = 0.5;
    RunRecord rec = record_with_accuracy(accs, {30});
    auto events = reset_drop_and_delay(rec);
    REQUIRE(events.size() == 1);
    CHECK(events[0].pre_accuracy == doctest::Approx(0.8));
    CHECK(events[0].post_accuracy == doctest::Approx((6 * 0.5 + 4 * 0.8) / 10.0));
    CHECK(events[0].drop == doctest::Approx(-0.18));
    CHECK(events[0].recovery_delay == 7);
}

TEST_CASE("reset_drop_and_delay: boundary resets skipped, delay capped") {
    // resets at idx 5 (too close to start) and 95 (too close to end) skipped
    std::vector<double> accs(100, 0.6);
    RunRecord rec = record_with_accuracy(accs, {5, 95});
    CHECK(reset_drop_and_delay(rec).empty());

    // never recovers: delay capped at the distance to the next reset
    std::vector<double> accs2(100, 0.9);
    for (std::size_t i = 31; i < 100; ++i) accs2[i] = 0.1;
    RunRecord rec2 = record_with_accuracy(accs2, {30, 50});
    auto events = reset_drop_and_delay(rec2);
    REQUIRE(events.size() == 2);
    CHECK(events[0].recovery_delay == 20);  // capped at next reset, idx 50 - 30
    CHECK(events[1].drop == 0.0);           // flat around the second reset
    CHECK(events[1].recovery_delay == 0);

    // ...and capped at the record end when it is the last reset
    std::vector<double> accs3(100, 0.9);
    for (std::size_t i = 51; i < 100; ++i) accs3[i] = 0.1;
    RunRecord rec3 = record_with_accuracy(accs3, {50});
    auto ev3 = reset_drop_and_delay(rec3);
    REQUIRE(ev3.size() == 1);
    CHECK(ev3[0].recovery_delay == 49);  // 99 - 50
}

namespace {
RunRecord recurring_record(const std::vector<std::pair<std::string, double>>& visits,
                           std::size_t visit_len = 5) {
    RunRecord rec;
    long step = 1;
    for (const auto& [domain, acc] : visits)
        for (std::size_t i = 0; i < visit_len; ++i) {
            StepRow row;
            row.step = step++;
            row.domain = domain;
            row.accuracy = acc;
            rec.rows.push_back(row);
        }
    return rec;
}
}  // namespace

TEST_CASE("knowledge_recovery fixtures") {
    // flat: every visit identical -> 0
    RunRecord flat = recurring_record({{"a", 0.7}, {"b", 0.6}, {"a", 0.7}, {"b", 0.6}});
    CHECK(knowledge_recovery(flat) == doctest::Approx(0.0));

    // improvement: +0.03 on a, +0.01 on b -> mean +0.02
    RunRecord up = recurring_record({{"a", 0.70}, {"b", 0.60}, {"a", 0.73}, {"b", 0.61}});
    CHECK(knowledge_recovery(up) == doctest::Approx(0.02));

    // regression: final visits fall below the best prior visit
    RunRecord down =
        recurring_record({{"a", 0.70}, {"b", 0.60}, {"a", 0.75}, {"b", 0.62},
                          {"a", 0.73}, {"b", 0.62}});
    CHECK(knowledge_recovery(down) == doctest::Approx(-0.01));

    // single-visit domain refused
    RunRecord bad = recurring_record({{"a", 0.7}, {"b", 0.6}, {"a", 0.7}});
    CHECK_THROWS_AS(knowledge_recovery(bad), ConfigError);
}

TEST_CASE("pearson: closed forms and a shifted-scaled identity") {
    CHECK(pearson({1, 2, 3, 4}, {2, 4, 6, 8}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pearson({1, 2, 3, 4}, {8, 6, 4, 2}) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(pearson({1, 2, 1, 2}, {5, 5, 6, 6}) == doctest::Approx(0.0).epsilon(1e-12));

    // invariance under affine maps, random data, against a direct two-pass oracle
    std::mt19937_64 rng(17);
    std::normal_distribution<double> d(0.0, 1.0);
    std::vector<double> xs(200), ys(200);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = d(rng);
        ys[i] = 0.6 * xs[i] + 0.4 * d(rng);
    }
    const double r = pearson(xs, ys);
    std::vector<double> xs2 = xs, ys2 = ys;
    for (double& x : xs2) x = 3.0 * x - 7.0;
    for (double& y : ys2) y = 0.5 * y + 2.0;
    CHECK(pearson(xs2, ys2) == doctest::Approx(r).epsilon(1e-12));
    CHECK(r > 0.5);

    CHECK_THROWS_AS(pearson({1.0}, {2.0}), ShapeError);
    CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), NumericError);
}

TEST_CASE("coverage is monotone in window growth") {
    std::mt19937_64 rng(9);
    RunRecord rec = record_with_accuracy(std::vector<double>(50, 0.5));
    std::uniform_int_distribution<std::uint64_t> mask(0, (1u << 10) - 1);
    for (auto& row : rec.rows) row.predicted_mask = mask(rng);
    double prev = 0.0;
    for (std::size_t last = 1; last <= 50; ++last) {
        const double cov = window_coverage(rec, 0, last, 10);
        CHECK(cov >= prev);
        prev = cov;
    }
}
