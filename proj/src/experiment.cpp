#include <neurotac/experiment.hpp>

#include <neurotac/random.hpp>
#include <neurotac/stats.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>

namespace neurotac {

void summarize(ExperimentResult& result) {
    if (result.accuracies.empty()) {
        result.mean = 0.0;
        result.dispersion = 0.0;
        return;
    }
    result.mean = mean(result.accuracies);
    if (result.accuracies.size() < 2) {
        result.dispersion = 0.0;
    } else {
        result.dispersion =
            result.kind == Dispersion::sd ? sample_sd(result.accuracies) : standard_error(result.accuracies);
    }
}

Eigen::MatrixXi confusion_matrix(std::span<const int> truth, std::span<const int> predicted,
                                 std::span<const int> classes) {
    if (truth.size() != predicted.size()) throw std::invalid_argument("truth and prediction lengths differ");
    std::map<int, Eigen::Index> index;
    for (std::size_t i = 0; i < classes.size(); ++i) index[classes[i]] = static_cast<Eigen::Index>(i);
    const auto n = static_cast<Eigen::Index>(classes.size());
    Eigen::MatrixXi m = Eigen::MatrixXi::Zero(n, n);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto t = index.find(truth[i]);
        const auto p = index.find(predicted[i]);
        if (t == index.end() || p == index.end()) {
            throw std::invalid_argument("unknown class label " +
                                        std::to_string(t == index.end() ? truth[i] : predicted[i]));
        }
        ++m(t->second, p->second);
    }
    return m;
}

SplitPredictions evaluate_split(const Eigen::MatrixXd& train, const std::vector<std::vector<int>>& train_labels,
                                const Eigen::MatrixXd& test, std::span<const int> pcs,
                                const std::optional<Eigen::RowVectorXd>& test_mean) {
    if (pcs.empty()) throw std::invalid_argument("no PC counts requested");
    const int max_pc = *std::max_element(pcs.begin(), pcs.end());
    const PcaBasis basis = pca_fit(train, max_pc);
    const Eigen::MatrixXd train_scores = pca_project(basis, train);
    Eigen::MatrixXd test_scores;
    if (test_mean) {
        if (test_mean->size() != test.cols()) throw std::invalid_argument("test mean has the wrong length");
        test_scores = (test.rowwise() - *test_mean) * basis.components;
    } else {
        test_scores = pca_project(basis, test);
    }

    SplitPredictions out;
    out.labels.resize(train_labels.size());
    for (std::size_t task = 0; task < train_labels.size(); ++task) {
        const LdaStatistics stats = lda_statistics(train_scores, train_labels[task]);
        for (int pc : pcs) {
            const LdaModel model = lda_from_statistics(stats, pc);
            out.labels[task].push_back(lda_predict(model, test_scores.leftCols(pc)));
        }
    }
    return out;
}

namespace {

std::vector<int> sorted_classes(std::span<const int> labels) {
    const std::set<int> s(labels.begin(), labels.end());
    return {s.begin(), s.end()};
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& x, std::span<const Eigen::Index> rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
    return out;
}

std::vector<int> gather(std::span<const int> labels, std::span<const Eigen::Index> rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(labels[static_cast<std::size_t>(r)]);
    return out;
}

ExperimentResult blank_result(std::string name, int pcs, const std::vector<int>& classes, Dispersion kind) {
    ExperimentResult r;
    r.name = std::move(name);
    r.pcs = pcs;
    r.classes = classes;
    r.kind = kind;
    const auto n = static_cast<Eigen::Index>(classes.size());
    r.confusion = Eigen::MatrixXi::Zero(n, n);
    return r;
}

}  // namespace

std::vector<std::vector<ExperimentResult>> kfold_eval(const Eigen::MatrixXd& x, std::span<const int> strata,
                                                      const std::vector<std::vector<int>>& tasks,
                                                      const KFoldConfig& config) {
    if (config.k < 2) throw std::invalid_argument("k-fold needs k >= 2");
    if (config.repeats < 1) throw std::invalid_argument("at least one repeat is required");
    if (static_cast<Eigen::Index>(strata.size()) != x.rows()) throw std::invalid_argument("one stratum per row required");
    for (const auto& t : tasks) {
        if (t.size() != strata.size()) throw std::invalid_argument("task labels must cover every row");
    }

    std::map<int, std::vector<Eigen::Index>> groups;
    for (Eigen::Index r = 0; r < x.rows(); ++r) groups[strata[static_cast<std::size_t>(r)]].push_back(r);
    for (const auto& [label, rows] : groups) {
        const std::size_t need = config.per_class > 0 ? static_cast<std::size_t>(config.per_class) : rows.size();
        if (rows.size() < need || need < static_cast<std::size_t>(config.k)) {
            throw std::invalid_argument("class " + std::to_string(label) + " has too few rows for " +
                                        std::to_string(config.k) + "-fold sampling");
        }
    }

    std::vector<std::vector<int>> task_classes;
    std::vector<std::vector<ExperimentResult>> results(tasks.size());
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        task_classes.push_back(sorted_classes(tasks[t]));
        for (int pc : config.pcs) results[t].push_back(blank_result("", pc, task_classes[t], config.kind));
    }

    for (int rep = 0; rep < config.repeats; ++rep) {
        Rng rng = make_rng(config.seed, "kfold", {static_cast<std::uint64_t>(rep)});
        std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(config.k));
        for (const auto& [label, rows] : groups) {
            std::vector<Eigen::Index> pick = rows;
            shuffle_in_place(pick, rng);
            if (config.per_class > 0) pick.resize(static_cast<std::size_t>(config.per_class));
            for (std::size_t i = 0; i < pick.size(); ++i) folds[i % folds.size()].push_back(pick[i]);
        }

        std::vector<std::vector<long>> correct(tasks.size(), std::vector<long>(config.pcs.size(), 0));
        long tested = 0;
        for (std::size_t f = 0; f < folds.size(); ++f) {
            std::vector<Eigen::Index> train_rows;
            for (std::size_t g = 0; g < folds.size(); ++g) {
                if (g != f) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
            }
            const auto& test_rows = folds[f];
            std::vector<std::vector<int>> train_labels;
            for (const auto& t : tasks) train_labels.push_back(gather(t, train_rows));
            const SplitPredictions pred =
                evaluate_split(gather_rows(x, train_rows), train_labels, gather_rows(x, test_rows), config.pcs);
            tested += static_cast<long>(test_rows.size());
            for (std::size_t t = 0; t < tasks.size(); ++t) {
                const std::vector<int> truth = gather(tasks[t], test_rows);
                for (std::size_t p = 0; p < config.pcs.size(); ++p) {
                    const auto& guess = pred.labels[t][p];
                    for (std::size_t i = 0; i < truth.size(); ++i) correct[t][p] += truth[i] == guess[i];
                    results[t][p].confusion += confusion_matrix(truth, guess, task_classes[t]);
                }
            }
        }
        for (std::size_t t = 0; t < tasks.size(); ++t) {
            for (std::size_t p = 0; p < config.pcs.size(); ++p) {
                results[t][p].accuracies.push_back(static_cast<double>(correct[t][p]) / static_cast<double>(tested));
                results[t][p].tested = static_cast<std::size_t>(tested);
            }
        }
    }
    for (auto& task : results) {
        for (auto& r : task) summarize(r);
    }
    return results;
}

std::vector<ExperimentResult> kfold_eval(const Eigen::MatrixXd& x, std::span<const int> labels,
                                         const KFoldConfig& config) {
    return kfold_eval(x, labels, {std::vector<int>(labels.begin(), labels.end())}, config).front();
}

SplitSizes kfold_split_sizes(int per_class, int classes, int k) {
    if (k < 2 || per_class < k || classes < 1) throw std::invalid_argument("invalid k-fold sizing");
    const int total = per_class * classes;
    const int test = total / k;
    return {total - test, test};
}

std::string bucket_name(Bucket b) {
    switch (b) {
    case Bucket::untrained_both: return "untrained-both";
    case Bucket::untrained_force: return "untrained-force";
    case Bucket::untrained_speed: return "untrained-speed";
    case Bucket::trained_both: return "trained-both";
    }
    return "unknown";
}

namespace {

bool contains(const std::vector<double>& values, double v) {
    return std::any_of(values.begin(), values.end(), [v](double x) { return std::fabs(x - v) < 1e-9; });
}

int train_count(int trials, double fraction) {
    return static_cast<int>(std::lround(fraction * static_cast<double>(trials)));
}

}  // namespace

Bucket bucket_of(double speed, double force, const ExtrapolationConfig& config) {
    const bool speed_ok = contains(config.trained_speeds, speed);
    const bool force_ok = contains(config.trained_forces, force);
    if (speed_ok && force_ok) return Bucket::trained_both;
    if (speed_ok) return Bucket::untrained_force;
    if (force_ok) return Bucket::untrained_speed;
    return Bucket::untrained_both;
}

std::array<int, 4> bucket_cell_counts(std::span<const double> speeds, std::span<const double> forces,
                                      const ExtrapolationConfig& config) {
    std::array<int, 4> counts{};
    for (double s : speeds) {
        for (double f : forces) ++counts[static_cast<std::size_t>(bucket_of(s, f, config))];
    }
    return counts;
}

int extrapolation_train_size(int textures, int trials_per_cell, const ExtrapolationConfig& config) {
    const int cells = static_cast<int>(config.trained_speeds.size() * config.trained_forces.size());
    return textures * cells * train_count(trials_per_cell, config.train_fraction);
}

int extrapolation_test_per_cell(int trials_per_cell, const ExtrapolationConfig& config) {
    return trials_per_cell - train_count(trials_per_cell, config.train_fraction);
}

std::array<std::vector<ExperimentResult>, 4> extrapolation_eval(const Eigen::MatrixXd& x,
                                                                std::span<const TrialCell> cells,
                                                                const ExtrapolationConfig& config) {
    if (static_cast<Eigen::Index>(cells.size()) != x.rows()) throw std::invalid_argument("one cell per row required");
    if (config.repeats < 1) throw std::invalid_argument("at least one repeat is required");

    using Key = std::tuple<int, double, double>;
    std::map<Key, std::vector<Eigen::Index>> groups;
    std::set<int> textures;
    std::set<double> speeds;
    std::set<double> forces;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const auto& c = cells[static_cast<std::size_t>(r)];
        groups[{c.texture, c.speed, c.force}].push_back(r);
        textures.insert(c.texture);
        speeds.insert(c.speed);
        forces.insert(c.force);
    }
    for (double s : config.trained_speeds) {
        if (!speeds.count(s)) throw std::invalid_argument("trained speed " + std::to_string(s) + " is missing");
    }
    for (double f : config.trained_forces) {
        if (!forces.count(f)) throw std::invalid_argument("trained force " + std::to_string(f) + " is missing");
    }
    for (int t : textures) {
        for (double s : speeds) {
            for (double f : forces) {
                const auto it = groups.find({t, s, f});
                if (it == groups.end() || it->second.size() < 2) {
                    throw std::invalid_argument("texture " + std::to_string(t) + " lacks trials at " +
                                                std::to_string(s) + " mm/s, " + std::to_string(f) + " g");
                }
            }
        }
    }

    const std::vector<int> classes(textures.begin(), textures.end());
    std::array<std::vector<ExperimentResult>, 4> results;
    for (Bucket b : kBuckets) {
        for (int pc : config.pcs) {
            results[static_cast<std::size_t>(b)].push_back(blank_result(bucket_name(b), pc, classes, config.kind));
        }
    }

    for (int rep = 0; rep < config.repeats; ++rep) {
        Rng rng = make_rng(config.seed, "extrapolation", {static_cast<std::uint64_t>(rep)});
        std::vector<Eigen::Index> train_rows;
        std::array<std::vector<Eigen::Index>, 4> test_rows;
        for (const auto& [key, rows] : groups) {
            std::vector<Eigen::Index> pick = rows;
            shuffle_in_place(pick, rng);
            const int n = static_cast<int>(pick.size());
            const int n_train = train_count(n, config.train_fraction);
            const Bucket b = bucket_of(std::get<1>(key), std::get<2>(key), config);
            if (b == Bucket::trained_both) {
                train_rows.insert(train_rows.end(), pick.begin(), pick.begin() + n_train);
                test_rows[3].insert(test_rows[3].end(), pick.begin() + n_train, pick.end());
            } else {
                auto& dest = test_rows[static_cast<std::size_t>(b)];
                dest.insert(dest.end(), pick.begin(), pick.begin() + (n - n_train));
            }
        }

        std::vector<Eigen::Index> all_test;
        for (const auto& rows : test_rows) all_test.insert(all_test.end(), rows.begin(), rows.end());
        std::vector<int> labels(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) labels[i] = cells[i].texture;
        const SplitPredictions pred =
            evaluate_split(gather_rows(x, train_rows), {gather(labels, train_rows)}, gather_rows(x, all_test), config.pcs);

        std::size_t offset = 0;
        for (Bucket b : kBuckets) {
            const auto& rows = test_rows[static_cast<std::size_t>(b)];
            const std::vector<int> truth = gather(labels, rows);
            for (std::size_t p = 0; p < config.pcs.size(); ++p) {
                const std::span<const int> guess(pred.labels[0][p].data() + offset, rows.size());
                long correct = 0;
                for (std::size_t i = 0; i < rows.size(); ++i) correct += truth[i] == guess[i];
                auto& r = results[static_cast<std::size_t>(b)][p];
                r.accuracies.push_back(rows.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(rows.size()));
                r.confusion += confusion_matrix(truth, guess, classes);
                r.tested = rows.size();
            }
            offset += rows.size();
        }
    }
    for (auto& bucket : results) {
        for (auto& r : bucket) summarize(r);
    }
    return results;
}

}  // namespace neurotac
