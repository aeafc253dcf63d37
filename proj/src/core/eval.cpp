#include "core/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace eegsz {

namespace {

// groups in first-appearance order with their row indices
std::vector<std::pair<std::string, std::vector<size_t>>>
collect_groups(size_t n, const std::vector<std::string>& groups) {
    if (groups.size() != n) throw_config("split: group list length mismatch");
    std::vector<std::pair<std::string, std::vector<size_t>>> out;
    std::map<std::string, size_t> pos;
    for (size_t i = 0; i < n; ++i) {
        auto it = pos.find(groups[i]);
        if (it == pos.end()) {
            pos.emplace(groups[i], out.size());
            out.push_back({groups[i], {i}});
        } else {
            out[it->second].second.push_back(i);
        }
    }
    return out;
}

} // namespace

SplitIndices holdout_split(size_t n, std::array<double, 3> fractions, uint64_t seed,
                           const std::vector<std::string>* groups) {
    const double sum = fractions[0] + fractions[1] + fractions[2];
    if (std::abs(sum - 1.0) > 1e-9) throw_config("holdout_split: fractions must sum to 1");
    if (n == 0) throw_config("holdout_split: empty index set");

    SplitIndices split;
    Rng rng(seed);

    if (groups == nullptr) {
        std::vector<size_t> idx(n);
        std::iota(idx.begin(), idx.end(), size_t{0});
        rng.shuffle(idx);
        const size_t n_train = static_cast<size_t>(std::llround(fractions[0] * static_cast<double>(n)));
        const size_t n_val = static_cast<size_t>(std::llround(fractions[1] * static_cast<double>(n)));
        if (n_train + n_val > n) throw_config("holdout_split: rounding exceeded n");
        split.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        split.val.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                         idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
        split.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());
        return split;
    }

    auto grouped = collect_groups(n, *groups);
    rng.shuffle(grouped);
    const double targets[3] = {fractions[0] * static_cast<double>(n),
                               fractions[1] * static_cast<double>(n),
                               fractions[2] * static_cast<double>(n)};
    for (const auto& [name, rows] : grouped) {
        if (static_cast<double>(rows.size()) >
            std::max({targets[0], targets[1], targets[2]}) + 0.5) {
            throw_data("holdout_split: group '" + name + "' larger than any split");
        }
    }
    double filled[3] = {0.0, 0.0, 0.0};
    std::vector<size_t>* buckets[3] = {&split.train, &split.val, &split.test};
    for (const auto& [name, rows] : grouped) {
        // place into the bucket with the largest remaining deficit
        int best = 0;
        double best_deficit = targets[0] - filled[0];
        for (int b = 1; b < 3; ++b) {
            const double deficit = targets[b] - filled[b];
            if (deficit > best_deficit) {
                best_deficit = deficit;
                best = b;
            }
        }
        buckets[best]->insert(buckets[best]->end(), rows.begin(), rows.end());
        filled[best] += static_cast<double>(rows.size());
    }
    return split;
}

std::vector<Fold> kfold(size_t n, size_t k, uint64_t seed,
                        const std::vector<std::string>* groups) {
    if (k < 2) throw_config("kfold: k must be >= 2");

    std::vector<std::vector<size_t>> test_sets(k);
    if (groups == nullptr) {
        if (k > n) throw_config("kfold: k exceeds sample count");
        std::vector<size_t> idx(n);
        std::iota(idx.begin(), idx.end(), size_t{0});
        Rng rng(seed);
        rng.shuffle(idx);
        // first (n % k) folds take the extra element
        const size_t base = n / k, extra = n % k;
        size_t at = 0;
        for (size_t f = 0; f < k; ++f) {
            const size_t take = base + (f < extra ? 1 : 0);
            test_sets[f].assign(idx.begin() + static_cast<std::ptrdiff_t>(at),
                                idx.begin() + static_cast<std::ptrdiff_t>(at + take));
            at += take;
        }
    } else {
        auto grouped = collect_groups(n, *groups);
        if (k > grouped.size()) throw_config("kfold: k exceeds group count");
        Rng rng(seed);
        rng.shuffle(grouped);
        const size_t g = grouped.size();
        const size_t base = g / k, extra = g % k;
        size_t at = 0;
        for (size_t f = 0; f < k; ++f) {
            const size_t take = base + (f < extra ? 1 : 0);
            for (size_t gi = at; gi < at + take; ++gi) {
                test_sets[f].insert(test_sets[f].end(), grouped[gi].second.begin(),
                                    grouped[gi].second.end());
            }
            at += take;
        }
    }

    std::vector<Fold> folds(k);
    std::vector<size_t> owner(n, 0);
    for (size_t f = 0; f < k; ++f) {
        for (size_t i : test_sets[f]) owner[i] = f;
        folds[f].test = test_sets[f];
        std::sort(folds[f].test.begin(), folds[f].test.end());
    }
    for (size_t i = 0; i < n; ++i) {
        for (size_t f = 0; f < k; ++f) {
            if (owner[i] != f) folds[f].train.push_back(i);
        }
    }
    return folds;
}

ConfusionMatrix confusion(const std::vector<int>& labels, const std::vector<int>& predictions) {
    if (labels.size() != predictions.size()) {
        throw_config("confusion: labels/predictions length mismatch");
    }
    ConfusionMatrix cm;
    for (size_t i = 0; i < labels.size(); ++i) {
        if ((labels[i] != 0 && labels[i] != 1) || (predictions[i] != 0 && predictions[i] != 1)) {
            throw_config("confusion: values must be 0 or 1");
        }
        if (labels[i] == 1) {
            (predictions[i] == 1 ? cm.tp : cm.fn)++;
        } else {
            (predictions[i] == 1 ? cm.fp : cm.tn)++;
        }
    }
    return cm;
}

Metrics metrics(const ConfusionMatrix& cm) {
    Metrics m;
    const double n = static_cast<double>(cm.total());
    if (n == 0.0) throw_config("metrics: empty confusion matrix");
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / n;
    if (cm.tp + cm.fp > 0) {
        m.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    } else {
        m.degenerate = true;
    }
    if (cm.tp + cm.fn > 0) {
        m.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    } else {
        m.degenerate = true;
    }
    if (m.precision + m.recall > 0.0) {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    } else {
        m.degenerate = true;
    }
    return m;
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty()) {
        throw_config("roc_auc: scores/labels length mismatch");
    }
    size_t n_pos = 0, n_neg = 0;
    for (int l : labels) (l == 1 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) {
        throw_data("roc_auc: undefined, both classes must be present");
    }

    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    // midranks over tie groups
    double rank_sum_pos = 0.0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (size_t t = i; t < j; ++t) {
            if (labels[order[t]] == 1) rank_sum_pos += midrank;
        }
        i = j;
    }
    const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

std::vector<std::array<double, 2>> roc_curve(const std::vector<double>& scores,
                                             const std::vector<int>& labels) {
    size_t n_pos = 0, n_neg = 0;
    for (int l : labels) (l == 1 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) {
        throw_data("roc_curve: undefined, both classes must be present");
    }

    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] > scores[b]; });

    std::vector<std::array<double, 2>> pts;
    pts.push_back({0.0, 0.0});
    size_t tp = 0, fp = 0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        for (size_t t = i; t < j; ++t) {
            (labels[order[t]] == 1 ? tp : fp)++;
        }
        pts.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                       static_cast<double>(tp) / static_cast<double>(n_pos)});
        i = j;
    }
    return pts;
}

double roc_auc_trapezoid(const std::vector<double>& scores, const std::vector<int>& labels) {
    const auto pts = roc_curve(scores, labels);
    double auc = 0.0;
    for (size_t i = 1; i < pts.size(); ++i) {
        auc += (pts[i][0] - pts[i - 1][0]) * (pts[i][1] + pts[i - 1][1]) / 2.0;
    }
    return auc;
}

double cohens_kappa(const ConfusionMatrix& cm, bool* degenerate) {
    const double n = static_cast<double>(cm.total());
    if (n == 0.0) throw_config("kappa: empty confusion matrix");
    const double po = static_cast<double>(cm.tp + cm.tn) / n;
    const double actual_pos = static_cast<double>(cm.tp + cm.fn) / n;
    const double actual_neg = static_cast<double>(cm.fp + cm.tn) / n;
    const double pred_pos = static_cast<double>(cm.tp + cm.fp) / n;
    const double pred_neg = static_cast<double>(cm.fn + cm.tn) / n;
    const double pe = actual_pos * pred_pos + actual_neg * pred_neg;
    if (degenerate) *degenerate = false;
    if (std::abs(1.0 - pe) < 1e-15) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    return (po - pe) / (1.0 - pe);
}

FoldResult evaluate_predictions(const std::vector<int>& labels,
                                const std::vector<double>& scores_p1) {
    if (labels.size() != scores_p1.size() || labels.empty()) {
        throw_config("evaluate: labels/scores mismatch");
    }
    std::vector<int> preds(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) preds[i] = scores_p1[i] >= 0.5 ? 1 : 0;

    FoldResult fr;
    fr.cm = confusion(labels, preds);
    fr.m = metrics(fr.cm);
    bool single_class = true;
    for (size_t i = 1; i < labels.size(); ++i) {
        if (labels[i] != labels[0]) { single_class = false; break; }
    }
    fr.auc = single_class ? 0.0 : roc_auc(scores_p1, labels);
    fr.kappa = cohens_kappa(fr.cm);
    fr.labels = labels;
    fr.scores = scores_p1;
    return fr;
}

void EvalReport::finalize() {
    mean.fill(0.0);
    stddev.fill(0.0);
    if (folds.empty()) return;
    const double k = static_cast<double>(folds.size());
    auto value = [](const FoldResult& f, size_t i) {
        switch (i) {
            case 0: return f.m.accuracy;
            case 1: return f.m.precision;
            case 2: return f.m.recall;
            case 3: return f.m.f1;
            case 4: return f.auc;
            default: return f.kappa;
        }
    };
    for (size_t i = 0; i < 6; ++i) {
        for (const auto& f : folds) mean[i] += value(f, i);
        mean[i] /= k;
        for (const auto& f : folds) {
            const double d = value(f, i) - mean[i];
            stddev[i] += d * d;
        }
        stddev[i] = std::sqrt(stddev[i] / k);
    }
}

std::string EvalReport::to_json() const {
    static const char* names[6] = {"accuracy", "precision", "recall", "f1", "auc", "kappa"};
    std::ostringstream os;
    os.precision(12);
    os << "{\n  \"pipeline\": \"" << pipeline << "\",\n  \"folds\": [\n";
    for (size_t f = 0; f < folds.size(); ++f) {
        const auto& fr = folds[f];
        os << "    {\"fold\": " << f
           << ", \"tp\": " << fr.cm.tp << ", \"fp\": " << fr.cm.fp
           << ", \"tn\": " << fr.cm.tn << ", \"fn\": " << fr.cm.fn;
        const double vals[6] = {fr.m.accuracy, fr.m.precision, fr.m.recall,
                                fr.m.f1, fr.auc, fr.kappa};
        for (size_t i = 0; i < 6; ++i) os << ", \"" << names[i] << "\": " << vals[i];
        os << "}" << (f + 1 < folds.size() ? "," : "") << "\n";
    }
    os << "  ],\n  \"mean\": {";
    for (size_t i = 0; i < 6; ++i) {
        os << "\"" << names[i] << "\": " << mean[i] << (i < 5 ? ", " : "");
    }
    os << "},\n  \"stddev\": {";
    for (size_t i = 0; i < 6; ++i) {
        os << "\"" << names[i] << "\": " << stddev[i] << (i < 5 ? ", " : "");
    }
    os << "}\n}\n";
    return os.str();
}

void EvalReport::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw_data("cannot write report: " + path);
    out << "fold,tp,fp,tn,fn,accuracy,precision,recall,f1,auc,kappa\n";
    out.precision(12);
    for (size_t f = 0; f < folds.size(); ++f) {
        const auto& fr = folds[f];
        out << f << ',' << fr.cm.tp << ',' << fr.cm.fp << ',' << fr.cm.tn << ',' << fr.cm.fn
            << ',' << fr.m.accuracy << ',' << fr.m.precision << ',' << fr.m.recall << ','
            << fr.m.f1 << ',' << fr.auc << ',' << fr.kappa << '\n';
    }
    out << "mean,,,,";
    for (size_t i = 0; i < 6; ++i) out << ',' << mean[i];
    out << "\nstddev,,,,";
    for (size_t i = 0; i < 6; ++i) out << ',' << stddev[i];
    out << '\n';
}

EvalReport cross_validate(const FeatureMatrix& data, size_t k, uint64_t seed, bool group_mode,
                          Pipeline& pipeline, const std::string& name) {
    EvalReport report;
    report.pipeline = name;
    const auto folds = kfold(data.rows(), k, seed, group_mode ? &data.groups : nullptr);
    for (const auto& fold : folds) {
        FeatureMatrix train;
        train.cols = data.cols;
        for (size_t i : fold.train) {
            train.add_row(data.row(i), data.labels[i], data.groups[i]);
        }
        pipeline.fit(train);

        std::vector<int> labels;
        std::vector<double> scores;
        for (size_t i : fold.test) {
            labels.push_back(data.labels[i]);
            scores.push_back(pipeline.predict_proba(data.row(i), data.cols)[1]);
        }
        FoldResult fr = evaluate_predictions(labels, scores);
        fr.test_indices = fold.test;
        report.folds.push_back(std::move(fr));
    }
    report.finalize();
    return report;
}

} // namespace eegsz
