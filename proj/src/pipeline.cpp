#include <neurotac/pipeline.hpp>

#include <neurotac/error.hpp>
#include <neurotac/random.hpp>
#include <neurotac/stats.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

namespace neurotac {

std::string variant_name(Variant v) {
    switch (v) {
    case Variant::original: return "original";
    case Variant::speed: return "speed-scaled";
    case Variant::force: return "force-scaled";
    case Variant::speed_force: return "speed-force-scaled";
    }
    return "unknown";
}

std::string variant_title(Variant v) {
    switch (v) {
    case Variant::original: return "Original";
    case Variant::speed: return "Speed Scaled";
    case Variant::force: return "Force Scaled";
    case Variant::speed_force: return "Speed and Force Scaled";
    }
    return "Unknown";
}

Variant variant_of(bool force_scaling, bool speed_scaling) {
    if (force_scaling) return speed_scaling ? Variant::speed_force : Variant::force;
    return speed_scaling ? Variant::speed : Variant::original;
}

bool uses_force_scaling(Variant v) { return v == Variant::force || v == Variant::speed_force; }
bool uses_speed_scaling(Variant v) { return v == Variant::speed || v == Variant::speed_force; }

std::vector<SpikeTrain> encode_variant(const SensorTrace& trace, const ForceScalingTable* table, Variant v,
                                       const EncoderConfig& encoder, const WarpConfig& warp) {
    std::array<double, kTaxelCount> coeffs;
    coeffs.fill(1.0);
    if (uses_force_scaling(v)) {
        if (!table) throw std::invalid_argument("force scaling requested without a coefficient table");
        coeffs = apply_force_scaling(trace, *table);
    }
    std::vector<SpikeTrain> trains = encode_trial(trace, coeffs, encoder);
    if (uses_speed_scaling(v)) {
        for (auto& t : trains) t = warp_offline(t, trace.condition.speed, warp);
    }
    return trains;
}

FeatureVector variant_features(std::span<const SpikeTrain> trains, Variant v, double speed, const WarpConfig& warp) {
    if (uses_speed_scaling(v)) {
        return build_feature_vector(trains, FeatureMode::speed_scaled, speed / warp.reference_speed);
    }
    return build_feature_vector(trains, FeatureMode::unscaled);
}

TrialLabel label_of(const TraceEntry& entry) {
    TrialLabel l;
    l.texture = entry.texture;
    l.group = group_index(texture_by_id(entry.texture).group);
    l.speed = entry.condition.speed;
    l.force = entry.condition.force;
    l.trial = entry.trial;
    return l;
}

EncodedDataset encode_dataset(const Dataset& dataset, const ForceScalingTable& table, std::span<const Variant> which,
                              const EncoderConfig& encoder, const WarpConfig& warp) {
    bool need_plain = false;
    bool need_forced = false;
    for (Variant v : which) (uses_force_scaling(v) ? need_forced : need_plain) = true;

    std::array<std::vector<FeatureVector>, 4> vectors;
    std::vector<TrialLabel> labels;
    labels.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const SensorTrace trace = dataset.load(i);
        const double speed = trace.condition.speed;
        const std::array<double, kTaxelCount> coeffs = apply_force_scaling(trace, table);
        std::vector<SpikeTrain> ra(kTaxelCount);
        std::vector<SpikeTrain> sa_plain(kTaxelCount);
        std::vector<SpikeTrain> sa_forced(kTaxelCount);
        for (int c = 0; c < kTaxelCount; ++c) {
            const std::vector<double> channel = trace.channel(c);
            ra[c] = encode_ra(channel, encoder);
            if (need_plain || coeffs[c] == 1.0) sa_plain[c] = encode_sa(channel, 1.0, encoder);
            if (need_forced) sa_forced[c] = coeffs[c] == 1.0 ? sa_plain[c] : encode_sa(channel, coeffs[c], encoder);
        }
        for (Variant v : which) {
            std::vector<SpikeTrain> trains = uses_force_scaling(v) ? sa_forced : sa_plain;
            trains.insert(trains.end(), ra.begin(), ra.end());
            if (uses_speed_scaling(v)) {
                for (auto& t : trains) t = warp_offline(t, speed, warp);
            }
            vectors[static_cast<std::size_t>(v)].push_back(variant_features(trains, v, speed, warp));
        }
        labels.push_back(label_of(dataset.manifest().traces[i]));
    }

    EncodedDataset out;
    for (Variant v : which) {
        out[v] = assemble_and_center(vectors[static_cast<std::size_t>(v)], labels);
    }
    return out;
}

std::filesystem::path feature_path(const std::filesystem::path& dir, Variant v) {
    return dir / ("features_" + variant_name(v) + ".csv");
}

namespace {

std::vector<int> texture_ids(const FeatureMatrix& m) {
    std::vector<int> out;
    out.reserve(m.labels.size());
    for (const auto& l : m.labels) out.push_back(texture_index(l.texture));
    return out;
}

std::vector<int> group_ids(const FeatureMatrix& m) {
    std::vector<int> out;
    out.reserve(m.labels.size());
    for (const auto& l : m.labels) out.push_back(l.group);
    return out;
}

std::vector<int> default_pcs(const std::vector<int>& pcs) {
    if (!pcs.empty()) return pcs;
    std::vector<int> out;
    for (int p = 1; p <= 50; ++p) out.push_back(p);
    return out;
}

void require_rows(const FeatureMatrix& m, Variant v) {
    if (m.rows() == 0) throw std::invalid_argument("variant " + variant_name(v) + " has no encoded rows");
}

}  // namespace

std::array<std::array<std::vector<ExperimentResult>, 2>, 4> run_texture_tasks(const EncodedDataset& data,
                                                                             const OfflineConfig& config) {
    std::array<std::array<std::vector<ExperimentResult>, 2>, 4> out;
    for (Variant v : kVariants) {
        const FeatureMatrix& m = data[v];
        require_rows(m, v);
        const std::vector<int> textures = texture_ids(m);
        std::map<int, int> per_texture;
        for (int t : textures) ++per_texture[t];
        int smallest = std::numeric_limits<int>::max();
        for (const auto& [t, n] : per_texture) smallest = std::min(smallest, n);

        KFoldConfig kf;
        kf.k = config.k;
        kf.repeats = config.repeats;
        kf.seed = derive_seed(config.seed, "texture-tasks");
        kf.pcs = default_pcs(config.pcs);
        kf.per_class = std::max(config.k, static_cast<int>(std::lround(config.subsample * smallest)));
        auto results = kfold_eval(m.values, textures, {textures, group_ids(m)}, kf);
        for (std::size_t task = 0; task < 2; ++task) {
            for (auto& r : results[task]) r.name = variant_name(v);
            out[static_cast<std::size_t>(v)][task] = std::move(results[task]);
        }
    }
    return out;
}

std::array<std::array<std::vector<ExperimentResult>, 4>, 4> run_extrapolation(const EncodedDataset& data,
                                                                             const OfflineConfig& config) {
    std::array<std::array<std::vector<ExperimentResult>, 4>, 4> out;
    for (Variant v : kVariants) {
        const FeatureMatrix& m = data[v];
        require_rows(m, v);
        std::vector<TrialCell> cells;
        cells.reserve(m.labels.size());
        for (const auto& l : m.labels) cells.push_back({texture_index(l.texture), l.speed, l.force});
        ExtrapolationConfig ec;
        ec.repeats = config.repeats;
        ec.seed = derive_seed(config.seed, "extrapolation");
        ec.pcs = default_pcs(config.pcs);
        auto results = extrapolation_eval(m.values, cells, ec);
        for (std::size_t b = 0; b < 4; ++b) {
            for (auto& r : results[b]) r.name = variant_name(v);
            out[static_cast<std::size_t>(v)][b] = std::move(results[b]);
        }
    }
    return out;
}

namespace {

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::ofstream open_csv(const std::filesystem::path& path, const std::string& config_json) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open CSV for writing");
    out << "# config=" << config_json << '\n';
    out << "variant,pcs,mean_accuracy,dispersion,n,p,effect,marker,tested,accuracies\n";
    return out;
}

void write_row(std::ostream& out, const std::string& variant, const ExperimentResult& r, const Comparison* c) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%zu", r.pcs, r.mean, r.dispersion, r.n());
    out << variant << ',' << buf << ',';
    if (c) {
        out << fmt(c->p) << ',' << fmt(c->effect) << ',' << c->marker;
    } else {
        out << ",,";
    }
    out << ',' << r.tested << ',';
    for (std::size_t i = 0; i < r.accuracies.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", r.accuracies[i]);
        out << (i ? ";" : "") << buf;
    }
    out << '\n';
}

}  // namespace

void write_result_csv(const std::filesystem::path& path, const std::string& config_json,
                      const std::vector<ResultRow>& rows) {
    std::ofstream out = open_csv(path, config_json);
    for (const auto& row : rows) {
        if (!row.result) continue;
        if (row.baseline && row.result != row.baseline && row.result->n() >= 2 && row.baseline->n() >= 2) {
            const Comparison c = compare_means(row.result->accuracies, row.baseline->accuracies);
            write_row(out, row.variant, *row.result, &c);
        } else {
            write_row(out, row.variant, *row.result, nullptr);
        }
    }
    if (!out) throw IoError(path, "failed writing CSV");
}

void write_rt_csv(const std::filesystem::path& path, const std::string& config_json, const RtResult& result,
                  bool proportions) {
    std::ofstream out = open_csv(path, config_json);
    for (std::size_t i = 0; i < result.scaled.size(); ++i) {
        const ExperimentResult& s = result.scaled[i];
        const ExperimentResult& o = result.original[i];
        Comparison c;
        if (proportions) {
            double xs = 0.0;
            double xo = 0.0;
            for (double a : s.accuracies) xs += std::round(a * static_cast<double>(s.tested));
            for (double a : o.accuracies) xo += std::round(a * static_cast<double>(o.tested));
            const double ns = static_cast<double>(s.tested * s.n());
            const double no = static_cast<double>(o.tested * o.n());
            c = compare_proportions(xs, ns, xo, no);
        } else {
            c = compare_means(s.accuracies, o.accuracies);
        }
        write_row(out, "original", o, nullptr);
        write_row(out, "speed-scaled", s, &c);
    }
    if (!out) throw IoError(path, "failed writing CSV");
}

const std::array<std::string, 6>& SummaryTable::row_titles() {
    static const std::array<std::string, 6> titles{"Individual Textures",       "Texture Groups",
                                                   "Untrained Speed and Force", "Untrained Force",
                                                   "Untrained Speed",           "Trained Speed and Force"};
    return titles;
}

namespace {

const ExperimentResult& at_pcs(const std::vector<ExperimentResult>& sweep, int pcs) {
    for (const auto& r : sweep) {
        if (r.pcs == pcs) return r;
    }
    throw std::invalid_argument("no result at " + std::to_string(pcs) + " PCs");
}

}  // namespace

SummaryTable summarize_table(const std::array<std::array<std::vector<ExperimentResult>, 2>, 4>& tasks,
                             const std::array<std::array<std::vector<ExperimentResult>, 4>, 4>& buckets, int pcs) {
    SummaryTable t;
    t.pcs = pcs;
    for (std::size_t v = 0; v < 4; ++v) {
        for (std::size_t row = 0; row < 6; ++row) {
            const ExperimentResult& r = row < 2 ? at_pcs(tasks[v][row], pcs) : at_pcs(buckets[v][row - 2], pcs);
            t.mean[row][v] = 100.0 * r.mean;
            t.spread[row][v] = 100.0 * r.dispersion;
        }
    }
    return t;
}

void write_summary(const std::filesystem::path& csv_path, const std::filesystem::path& text_path,
                   const std::string& config_json, const SummaryTable& table) {
    if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
    std::ofstream csv(csv_path);
    if (!csv) throw IoError(csv_path, "cannot open summary CSV");
    csv << "# config=" << config_json << '\n' << "analysis";
    for (Variant v : kVariants) csv << ',' << variant_name(v) << "_mean," << variant_name(v) << "_sd";
    csv << '\n';
    char buf[64];
    for (std::size_t row = 0; row < 6; ++row) {
        csv << SummaryTable::row_titles()[row];
        for (std::size_t v = 0; v < 4; ++v) {
            std::snprintf(buf, sizeof buf, ",%.2f,%.2f", table.mean[row][v], table.spread[row][v]);
            csv << buf;
        }
        csv << '\n';
    }
    if (!csv) throw IoError(csv_path, "failed writing summary CSV");

    std::ofstream txt(text_path);
    if (!txt) throw IoError(text_path, "cannot open summary text");
    txt << "Classification accuracy with " << table.pcs << " PCs (%)\n\n";
    std::snprintf(buf, sizeof buf, "%-26s", "");
    txt << buf;
    for (Variant v : kVariants) {
        std::snprintf(buf, sizeof buf, "%24s", variant_title(v).c_str());
        txt << buf;
    }
    txt << '\n';
    for (std::size_t row = 0; row < 6; ++row) {
        std::snprintf(buf, sizeof buf, "%-26s", SummaryTable::row_titles()[row].c_str());
        txt << buf;
        for (std::size_t v = 0; v < 4; ++v) {
            std::snprintf(buf, sizeof buf, "%15.2f +- %5.2f", table.mean[row][v], table.spread[row][v]);
            txt << buf;
        }
        txt << '\n';
    }
    if (!txt) throw IoError(text_path, "failed writing summary text");
}

}  // namespace neurotac
