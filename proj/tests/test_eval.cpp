#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "core/error.hpp"
#include "core/eval.hpp"
#include "core/rng.hpp"
#include "doctest.h"

using namespace eegsz;

namespace {

// pair-counting oracle: P(score+ > score-) + 0.5 P(tie)
double auc_pair_oracle(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0.0;
    size_t pairs = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

} // namespace

TEST_CASE("holdout split: n=100 gives 68/12/20") {
    const auto split = holdout_split(100, {0.68, 0.12, 0.20}, 1);
    CHECK(split.train.size() == 68);
    CHECK(split.val.size() == 12);
    CHECK(split.test.size() == 20);

    std::set<size_t> all;
    for (const auto* part : {&split.train, &split.val, &split.test}) {
        for (size_t i : *part) all.insert(i);
    }
    CHECK(all.size() == 100);
    CHECK(*all.rbegin() == 99);
}

TEST_CASE("holdout split rejects bad fractions") {
    CHECK_THROWS_AS(holdout_split(10, {0.5, 0.3, 0.1}, 1), Error);
}

TEST_CASE("holdout split group mode keeps subjects together") {
    std::vector<std::string> groups;
    for (int s = 0; s < 20; ++s) {
        for (int r = 0; r < 5; ++r) groups.push_back("subj" + std::to_string(s));
    }
    const auto split = holdout_split(groups.size(), {0.68, 0.12, 0.20}, 3, &groups);

    std::map<std::string, int> owner;
    auto scan = [&](const std::vector<size_t>& part, int id) {
        for (size_t i : part) {
            auto it = owner.find(groups[i]);
            if (it == owner.end()) {
                owner[groups[i]] = id;
            } else {
                CHECK(it->second == id);
            }
        }
    };
    scan(split.train, 0);
    scan(split.val, 1);
    scan(split.test, 2);
    CHECK(owner.size() == 20);

    // a single group larger than every split cannot be placed
    std::vector<std::string> one_group(100, "same");
    CHECK_THROWS_AS(holdout_split(100, {0.68, 0.12, 0.20}, 1, &one_group), Error);
}

TEST_CASE("kfold partitions the index set into near-equal folds") {
    const auto folds = kfold(10, 5, 2);
    REQUIRE(folds.size() == 5);
    std::set<size_t> seen;
    for (const auto& f : folds) {
        CHECK(f.test.size() == 2);
        CHECK(f.train.size() == 8);
        for (size_t i : f.test) CHECK(seen.insert(i).second);  // exactly once
    }
    CHECK(seen.size() == 10);

    CHECK_THROWS_AS(kfold(3, 5, 1), Error);
    CHECK_THROWS_AS(kfold(10, 1, 1), Error);
}

TEST_CASE("group kfold on 84 subjects gives folds of 16-17 subjects") {
    std::vector<std::string> groups;
    for (int s = 0; s < 84; ++s) {
        groups.push_back("s" + std::to_string(s));
        groups.push_back("s" + std::to_string(s));  // two rows per subject
    }
    const auto folds = kfold(groups.size(), 5, 9, &groups);
    for (const auto& f : folds) {
        std::set<std::string> test_subjects, train_subjects;
        for (size_t i : f.test) test_subjects.insert(groups[i]);
        for (size_t i : f.train) train_subjects.insert(groups[i]);
        CHECK((test_subjects.size() == 16 || test_subjects.size() == 17));
        // leakage guard: no subject appears on both sides
        for (const auto& s : test_subjects) CHECK(train_subjects.count(s) == 0);
    }
}

TEST_CASE("confusion matrix counts by definition") {
    const auto cm1 = confusion({1, 1, 0, 0}, {1, 1, 0, 0});
    CHECK(cm1.tp == 2);
    CHECK(cm1.tn == 2);
    CHECK(cm1.fp == 0);
    CHECK(cm1.fn == 0);

    const auto cm2 = confusion({1, 0}, {1, 1});
    CHECK(cm2.tp == 1);
    CHECK(cm2.fp == 1);
    CHECK(cm2.total() == 2);

    CHECK_THROWS_AS(confusion({1, 0}, {1}), Error);
    CHECK_THROWS_AS(confusion({2, 0}, {1, 0}), Error);
}

TEST_CASE("metrics: perfect matrix and hand-computed case") {
    const auto perfect = metrics({2, 0, 2, 0});
    CHECK(perfect.accuracy == 1.0);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);

    // tp=40, fp=10, fn=5, tn=45
    const auto m = metrics({40, 10, 45, 5});
    CHECK(m.accuracy == doctest::Approx(0.85));
    CHECK(m.precision == doctest::Approx(0.8));
    CHECK(m.recall == doctest::Approx(8.0 / 9.0).epsilon(1e-9));
    CHECK(m.f1 == doctest::Approx(0.842105263).epsilon(1e-6));
    CHECK(!m.degenerate);

    const auto degen = metrics({0, 0, 4, 2});
    CHECK(degen.precision == 0.0);
    CHECK(degen.degenerate);
}

TEST_CASE("roc auc: separated, tied, and the four-sample example") {
    CHECK(roc_auc({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}) == 1.0);
    CHECK(roc_auc({0.9, 0.8, 0.2, 0.1}, {0, 0, 1, 1}) == 0.0);
    CHECK(roc_auc({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}) == 0.5);
    CHECK(roc_auc({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK_THROWS_AS(roc_auc({0.1, 0.2}, {1, 1}), Error);
}

TEST_CASE("rank-based auc equals the trapezoid and the pair oracle") {
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const size_t n = 10 + rng.index(60);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool has0 = false, has1 = false;
        for (size_t i = 0; i < n; ++i) {
            // quantized scores force plenty of ties
            scores[i] = std::round(rng.uniform() * 8.0) / 8.0;
            labels[i] = rng.uniform() < 0.5 ? 0 : 1;
            (labels[i] ? has1 : has0) = true;
        }
        if (!has0) labels[0] = 0;
        if (!has1) labels[n - 1] = 1;

        const double fast = roc_auc(scores, labels);
        CHECK(std::abs(fast - roc_auc_trapezoid(scores, labels)) < 1e-12);
        CHECK(fast == doctest::Approx(auc_pair_oracle(scores, labels)).epsilon(1e-12));
    }
}

TEST_CASE("auc is invariant under strictly monotone score transforms") {
    Rng rng(9);
    std::vector<double> scores(40);
    std::vector<int> labels(40);
    for (size_t i = 0; i < 40; ++i) {
        scores[i] = rng.uniform(-2.0, 2.0);
        labels[i] = rng.uniform() < 0.4 ? 0 : 1;
    }
    labels[0] = 0;
    labels[1] = 1;
    const double base = roc_auc(scores, labels);
    std::vector<double> warped = scores;
    for (auto& s : warped) s = std::exp(3.0 * s) + 5.0;
    CHECK(roc_auc(warped, labels) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("cohens kappa: perfect, hand-computed, and chance-level") {
    CHECK(cohens_kappa({10, 0, 10, 0}) == 1.0);

    // po = 0.85, pe = 0.5 -> kappa = 0.7
    CHECK(cohens_kappa({40, 10, 45, 5}) == doctest::Approx(0.7).epsilon(1e-9));

    CHECK(cohens_kappa({25, 25, 25, 25}) == doctest::Approx(0.0).epsilon(1e-12));

    // all predictions identical to all labels, single cell: pe = 1
    bool degenerate = false;
    CHECK(cohens_kappa({4, 0, 0, 0}, &degenerate) == 0.0);
    CHECK(degenerate);
}

TEST_CASE("report metrics recompute exactly from stored confusion matrices") {
    Rng rng(31);
    EvalReport report;
    report.pipeline = "check";
    for (int f = 0; f < 5; ++f) {
        std::vector<int> labels(30);
        std::vector<double> scores(30);
        for (size_t i = 0; i < 30; ++i) {
            labels[i] = rng.uniform() < 0.5 ? 0 : 1;
            scores[i] = rng.uniform();
        }
        labels[0] = 0;
        labels[1] = 1;
        report.folds.push_back(evaluate_predictions(labels, scores));
    }
    report.finalize();

    for (const auto& fold : report.folds) {
        const auto m = metrics(fold.cm);
        CHECK(m.accuracy == fold.m.accuracy);
        CHECK(m.precision == fold.m.precision);
        CHECK(m.recall == fold.m.recall);
        CHECK(m.f1 == fold.m.f1);
        CHECK(cohens_kappa(fold.cm) == fold.kappa);
        CHECK(roc_auc(fold.scores, fold.labels) == fold.auc);
    }

    double mean_acc = 0.0;
    for (const auto& fold : report.folds) mean_acc += fold.m.accuracy;
    mean_acc /= 5.0;
    CHECK(report.mean[0] == doctest::Approx(mean_acc).epsilon(1e-12));

    const std::string json = report.to_json();
    CHECK(json.find("\"accuracy\"") != std::string::npos);
    CHECK(json.find("\"kappa\"") != std::string::npos);
    CHECK(json.find("\"folds\"") != std::string::npos);

    report.save_csv("test_report.csv");
    std::remove("test_report.csv");
}

TEST_CASE("cross validate: oracle pipeline scores perfectly and deterministically") {
    Rng rng(15);
    FeatureMatrix data;
    data.cols = 2;
    for (int s = 0; s < 30; ++s) {
        const int label = s % 2;
        for (int r = 0; r < 3; ++r) {
            const double row[2] = {rng.normal(), rng.normal()};
            data.add_row(row, label, "s" + std::to_string(s));
        }
    }

    // the oracle memorizes the full dataset by looking up exact rows
    Pipeline oracle;
    oracle.fit = [](const FeatureMatrix&) {};
    oracle.predict_proba = [&data](const double* x, size_t dim) -> std::array<double, 2> {
        for (size_t r = 0; r < data.rows(); ++r) {
            if (std::equal(x, x + dim, data.row(r))) {
                return data.labels[r] == 1 ? std::array<double, 2>{0.0, 1.0}
                                           : std::array<double, 2>{1.0, 0.0};
            }
        }
        return {0.5, 0.5};
    };

    const auto report = cross_validate(data, 5, 7, true, oracle, "oracle");
    CHECK(report.folds.size() == 5);
    for (size_t i = 0; i < 6; ++i) CHECK(report.mean[i] == doctest::Approx(1.0));

    const auto report2 = cross_validate(data, 5, 7, true, oracle, "oracle");
    for (size_t f = 0; f < 5; ++f) {
        CHECK(report.folds[f].test_indices == report2.folds[f].test_indices);
    }

    // group mode: no subject straddles train and test
    const auto folds = kfold(data.rows(), 5, 7, &data.groups);
    for (const auto& fold : folds) {
        std::set<std::string> in_test;
        for (size_t i : fold.test) in_test.insert(data.groups[i]);
        for (size_t i : fold.train) CHECK(in_test.count(data.groups[i]) == 0);
    }
}
