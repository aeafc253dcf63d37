#include <algorithm>
#include <cmath>

#include "core/classifiers.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"
#include "doctest.h"

using namespace eegsz;

namespace {

FeatureMatrix make_features(const std::vector<std::vector<double>>& rows,
                            const std::vector<int>& labels) {
    FeatureMatrix fm;
    fm.cols = rows[0].size();
    for (size_t i = 0; i < rows.size(); ++i) {
        fm.add_row(rows[i].data(), labels[i], "g" + std::to_string(i));
    }
    return fm;
}

FeatureMatrix random_features(size_t rows, size_t cols, uint64_t seed) {
    Rng rng(seed);
    FeatureMatrix fm;
    fm.cols = cols;
    std::vector<double> row(cols);
    for (size_t r = 0; r < rows; ++r) {
        for (auto& v : row) v = rng.uniform(-2.0, 2.0);
        fm.add_row(row.data(), rng.uniform() < 0.5 ? 0 : 1, "g" + std::to_string(r));
    }
    return fm;
}

// exhaustive KNN oracle: full scan, sort by (distance, index)
double knn_oracle_p1(const FeatureMatrix& train, const double* x, size_t k) {
    std::vector<std::pair<double, size_t>> d(train.rows());
    for (size_t r = 0; r < train.rows(); ++r) {
        double acc = 0.0;
        for (size_t c = 0; c < train.cols; ++c) {
            const double diff = train.row(r)[c] - x[c];
            acc += diff * diff;
        }
        d[r] = {acc, r};
    }
    std::sort(d.begin(), d.end());
    size_t pos = 0;
    for (size_t i = 0; i < k; ++i) pos += train.labels[d[i].second] == 1 ? 1 : 0;
    return static_cast<double>(pos) / static_cast<double>(k);
}

} // namespace

TEST_CASE("knn: zero-distance self match with k=1") {
    auto fm = make_features({{0.0, 0.0}, {5.0, 5.0}}, {1, 0});
    KnnClassifier knn(1);
    knn.fit(fm);
    const double q[2] = {0.0, 0.0};
    const auto p = knn.predict_proba(q, 2);
    CHECK(p[1] == 1.0);
    CHECK(p[0] == 0.0);
}

TEST_CASE("knn: five-neighbour vote counting") {
    // five nearest have labels [1,1,1,0,0]; a far cluster is irrelevant
    auto fm = make_features({{0.0}, {0.1}, {0.2}, {0.3}, {0.4}, {9.0}, {9.1}},
                            {1, 1, 1, 0, 0, 0, 0});
    KnnClassifier knn(5);
    knn.fit(fm);
    const double q[1] = {0.0};
    CHECK(knn.predict_proba(q, 1)[1] == doctest::Approx(0.6));
}

TEST_CASE("knn matches the exhaustive scan for 200 random queries") {
    const auto train = random_features(150, 6, 31);
    KnnClassifier knn(7);
    knn.fit(train);
    Rng rng(77);
    std::vector<double> q(6);
    for (int trial = 0; trial < 200; ++trial) {
        for (auto& v : q) v = rng.uniform(-2.0, 2.0);
        const double expected = knn_oracle_p1(train, q.data(), 7);
        CHECK(knn.predict_proba(q.data(), 6)[1] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("knn preconditions") {
    auto fm = make_features({{0.0}, {1.0}}, {0, 1});
    KnnClassifier too_big(5);
    CHECK_THROWS_AS(too_big.fit(fm), Error);
    KnnClassifier unfitted(1);
    const double q[1] = {0.0};
    CHECK_THROWS_AS(unfitted.predict_proba(q, 1), Error);
}

TEST_CASE("svc separates a linearly separable toy set") {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        const double offset = rng.uniform(0.0, 1.0);
        rows.push_back({1.0 + offset, rng.uniform(-1.0, 1.0)});
        labels.push_back(1);
        rows.push_back({-1.0 - offset, rng.uniform(-1.0, 1.0)});
        labels.push_back(0);
    }
    auto fm = make_features(rows, labels);
    LinearSvcClassifier svc(1.0);
    svc.fit(fm);
    size_t correct = 0;
    for (size_t r = 0; r < fm.rows(); ++r) {
        if (svc.predict(fm.row(r), fm.cols) == fm.labels[r]) ++correct;
    }
    CHECK(correct == fm.rows());
}

TEST_CASE("svc probabilities: zero margin gives sigmoid of the calibration bias") {
    auto fm = make_features({{1.0, 0.0}, {1.5, 0.0}, {-1.0, 0.0}, {-1.5, 0.0}}, {1, 1, 0, 0});
    LinearSvcClassifier svc(1.0);
    svc.fit(fm);

    // construct a query with margin exactly zero
    const auto& w = svc.weights();
    double q[2] = {0.0, 0.0};
    if (std::abs(w[0]) > 1e-12) {
        q[0] = -svc.bias() / w[0];
    }
    const double margin = svc.margin(q, 2);
    CHECK(std::abs(margin) < 1e-9);
    const auto p = svc.predict_proba(q, 2);
    CHECK(p[1] == doctest::Approx(1.0 / (1.0 + std::exp(-svc.calib_b()))).epsilon(1e-9));
    CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("svc objective is near the brute-force grid optimum") {
    // 10-point toy set in 2-D
    auto fm = make_features({{1.2, 0.3}, {2.0, -0.4}, {1.5, 1.0}, {0.9, -1.0}, {1.7, 0.2},
                             {-1.1, 0.5}, {-2.2, -0.3}, {-1.4, 0.9}, {-0.8, -0.7}, {-1.9, 0.1}},
                            {1, 1, 1, 1, 1, 0, 0, 0, 0, 0});
    LinearSvcClassifier svc(1.0, 4000);
    svc.fit(fm);
    const double solver_obj = svc.objective(fm);

    double best_grid = 1e18;
    double gw0 = 0, gw1 = 0, gb = 0;
    for (double w0 = -3.0; w0 <= 3.0; w0 += 0.05) {
        for (double w1 = -1.0; w1 <= 1.0; w1 += 0.05) {
            for (double b = -1.0; b <= 1.0; b += 0.05) {
                double obj = 0.5 * (w0 * w0 + w1 * w1);
                for (size_t r = 0; r < fm.rows(); ++r) {
                    const double y = fm.labels[r] == 1 ? 1.0 : -1.0;
                    const double m = w0 * fm.row(r)[0] + w1 * fm.row(r)[1] + b;
                    obj += std::max(0.0, 1.0 - y * m);
                }
                if (obj < best_grid) {
                    best_grid = obj;
                    gw0 = w0; gw1 = w1; gb = b;
                }
            }
        }
    }
    // solver should do at least as well as the grid up to tolerance
    CHECK(solver_obj <= best_grid + 1e-3);

    // and agree with the grid optimum on every decision sign
    for (size_t r = 0; r < fm.rows(); ++r) {
        const double grid_margin = gw0 * fm.row(r)[0] + gw1 * fm.row(r)[1] + gb;
        CHECK((svc.margin(fm.row(r), 2) >= 0.0) == (grid_margin >= 0.0));
    }
}

TEST_CASE("svc rejects single-class training data") {
    auto fm = make_features({{1.0}, {2.0}}, {1, 1});
    LinearSvcClassifier svc(1.0);
    CHECK_THROWS_AS(svc.fit(fm), Error);
}

TEST_CASE("gini impurity values") {
    CHECK(RandomForestClassifier::gini(4, 0) == 0.0);
    CHECK(RandomForestClassifier::gini(0, 9) == 0.0);
    CHECK(RandomForestClassifier::gini(1, 1) == doctest::Approx(0.5));
    CHECK(RandomForestClassifier::gini(1, 3) == doctest::Approx(1.0 - 0.0625 - 0.5625));
}

TEST_CASE("single unbootstrapped tree memorizes conflict-free data") {
    const auto fm = random_features(60, 4, 11);
    RandomForestClassifier rf(1, -1, 3, /*bootstrap=*/false);
    rf.fit(fm);
    for (size_t r = 0; r < fm.rows(); ++r) {
        CHECK(rf.predict(fm.row(r), fm.cols) == fm.labels[r]);
    }
}

TEST_CASE("forest is deterministic under a fixed seed") {
    const auto fm = random_features(80, 5, 17);
    RandomForestClassifier a(20, 6, 42);
    RandomForestClassifier b(20, 6, 42);
    RandomForestClassifier c(20, 6, 43);
    a.fit(fm);
    b.fit(fm);
    c.fit(fm);
    Rng rng(2);
    std::vector<double> q(5);
    bool diff_seen = false;
    for (int t = 0; t < 50; ++t) {
        for (auto& v : q) v = rng.uniform(-2.0, 2.0);
        const auto pa = a.predict_proba(q.data(), 5);
        const auto pb = b.predict_proba(q.data(), 5);
        const auto pc = c.predict_proba(q.data(), 5);
        CHECK(pa[1] == pb[1]);
        if (pa[1] != pc[1]) diff_seen = true;
    }
    CHECK(diff_seen);
}

TEST_CASE("forest vote fractions live on the 2-simplex") {
    const auto fm = random_features(50, 3, 23);
    RandomForestClassifier rf(9, 4, 5);
    rf.fit(fm);
    Rng rng(3);
    std::vector<double> q(3);
    for (int t = 0; t < 25; ++t) {
        for (auto& v : q) v = rng.uniform(-2.0, 2.0);
        const auto p = rf.predict_proba(q.data(), 3);
        CHECK(p[0] >= 0.0);
        CHECK(p[1] >= 0.0);
        CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("soft vote averages member probabilities") {
    // stub members with fixed outputs
    class Fixed : public ProbClassifier {
    public:
        explicit Fixed(double p1) : p1_(p1) { fitted_ = true; }
        const char* kind() const override { return "fixed"; }
        void fit(const FeatureMatrix&) override { fitted_ = true; }
        std::array<double, 2> predict_proba(const double*, size_t) const override {
            return {1.0 - p1_, p1_};
        }

    private:
        double p1_;
    };

    SoftVoteClassifier vote({std::make_shared<Fixed>(0.6), std::make_shared<Fixed>(0.8),
                             std::make_shared<Fixed>(0.4)});
    const double q[1] = {0.0};
    const auto p = vote.predict_proba(q, 1);
    CHECK(p[1] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));

    SoftVoteClassifier unanimous({std::make_shared<Fixed>(1.0), std::make_shared<Fixed>(1.0)});
    CHECK(unanimous.predict_proba(q, 1)[1] == 1.0);

    // identical members vote exactly like any single member
    const auto fm = random_features(40, 3, 29);
    auto m1 = std::make_shared<KnnClassifier>(3);
    auto m2 = std::make_shared<KnnClassifier>(3);
    m1->fit(fm);
    m2->fit(fm);
    SoftVoteClassifier twins({m1, m2});
    Rng rng(4);
    std::vector<double> x(3);
    for (int t = 0; t < 20; ++t) {
        for (auto& v : x) v = rng.uniform(-2.0, 2.0);
        CHECK(twins.predict_proba(x.data(), 3)[1] ==
              doctest::Approx(m1->predict_proba(x.data(), 3)[1]).epsilon(1e-12));
    }
}

TEST_CASE("soft vote preconditions") {
    CHECK_THROWS_AS(SoftVoteClassifier({std::make_shared<KnnClassifier>(1)}), Error);

    SoftVoteClassifier vote({std::make_shared<KnnClassifier>(1),
                             std::make_shared<KnnClassifier>(1)});
    const double q[1] = {0.0};
    CHECK_THROWS_AS(vote.predict_proba(q, 1), Error);  // members unfitted
}

TEST_CASE("cnn2d shape contract: 224 input pools to 14x14") {
    nn::Network net = build_cnn2d(224, 224);
    // feature map before flatten
    std::vector<size_t> shape = {1, 1, 224, 224};
    for (size_t i = 0; i + 6 < net.layer_count(); ++i) {
        shape = net.layer(i).output_shape(shape);
        if (i == 11) break;  // after the 4th maxpool
    }
    // locate the flatten input instead of hand-counting layers
    shape = {1, 1, 224, 224};
    for (size_t i = 0; i < net.layer_count(); ++i) {
        const auto next = net.layer(i).output_shape(shape);
        if (net.layer(i).kind() == "flatten") {
            CHECK(shape[2] == 14);
            CHECK(shape[3] == 14);
            CHECK(shape[1] == 64);
        }
        shape = next;
    }
    CHECK(shape == std::vector<size_t>{1, 1});

    CHECK_THROWS_AS(build_cnn2d(100, 64), Error);
}

TEST_CASE("cnn2d outputs a probability and responds to training") {
    nn::Network net = build_cnn2d(32, 32, 0.2, 5);
    Rng rng(5);
    std::vector<nn::Tensor> images;
    std::vector<int> labels;
    for (int i = 0; i < 8; ++i) {
        nn::Tensor img({1, 32, 32});
        const int label = i % 2;
        for (auto& v : img.values) {
            v = (label ? 0.8 : 0.2) + 0.05 * rng.normal();
        }
        images.push_back(std::move(img));
        labels.push_back(label);
    }
    const double before = cnn_predict(net, images[0]);
    CHECK(before > 0.0);
    CHECK(before < 1.0);

    const auto result = train_cnn2d(net, images, labels, 30, 4, 1e-3, 3);
    CHECK(result.loss_history.size() == 30);
    CHECK(result.loss_history.back() < result.loss_history.front());
    // separable-by-brightness toy: predictions order correctly
    CHECK(cnn_predict(net, images[1]) > cnn_predict(net, images[0]));
}

TEST_CASE("cnn2d gradient check on a 32x32 miniature") {
    // reduced copy of the cnn head on a tiny input keeps the check tractable
    nn::Network net;
    net.add(nn::make_conv2d(1, 2, 3, 3, 1, 1, 1, 1));
    net.add(nn::make_leaky_relu(0.2));
    net.add(nn::make_maxpool2d(2, 2));
    net.add(nn::make_conv2d(2, 4, 3, 3, 1, 1, 1, 1));
    net.add(nn::make_leaky_relu(0.2));
    net.add(nn::make_maxpool2d(2, 2));
    net.add(nn::make_flatten());
    net.add(nn::make_dense(4 * 8 * 8, 8));
    net.add(nn::make_leaky_relu(0.2));
    net.add(nn::make_dense(8, 1));
    net.add(nn::make_sigmoid());
    net.init(7);

    Rng rng(7);
    nn::Tensor x({1, 1, 32, 32});
    for (auto& v : x.values) v = rng.uniform(0.0, 1.0);
    const auto report = nn::grad_check(net, x, 1e-4, 7);
    CAPTURE(report.max_rel_error);
    CHECK(report.pass);
}

TEST_CASE("feature csv round trip") {
    const auto fm = random_features(12, 4, 55);
    save_features_csv(fm, "test_features.csv");
    const auto back = load_features_csv("test_features.csv");
    CHECK(back.rows() == fm.rows());
    CHECK(back.cols == fm.cols);
    CHECK(back.labels == fm.labels);
    CHECK(back.groups == fm.groups);
    for (size_t i = 0; i < fm.values.size(); ++i) {
        CHECK(back.values[i] == fm.values[i]);
    }
    std::remove("test_features.csv");
}
