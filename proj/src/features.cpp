#include <neurotac/features.hpp>

#include <neurotac/error.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace neurotac {

std::size_t train_count(FeatureMode mode) {
    return mode == FeatureMode::realtime ? kRealtimeTrains : 2 * kTaxelCount;
}

std::size_t window_count(FeatureMode mode) {
    switch (mode) {
    case FeatureMode::speed_scaled: return kScaledWindows;
    case FeatureMode::unscaled: return kUnscaledWindows;
    case FeatureMode::realtime: return kRealtimeWindows;
    }
    return 0;
}

std::size_t feature_length(FeatureMode mode) { return train_count(mode) * window_count(mode); }

int window_of(double t, double window, std::size_t n_windows) {
    if (t < 0.0) return -1;
    const auto idx = static_cast<std::size_t>(std::floor(t / window + 1e-9));
    if (idx < n_windows) return static_cast<int>(idx);
    if (idx == n_windows && t <= static_cast<double>(n_windows) * window + 1e-9) {
        return static_cast<int>(n_windows) - 1;
    }
    return -1;
}

std::vector<double> windowed_sc(const SpikeTrain& train, double window, std::size_t n_windows) {
    if (!(window > 0.0)) throw std::invalid_argument("window length must be positive");
    std::vector<double> counts(n_windows, 0.0);
    for (double t : train.times) {
        const int w = window_of(t, window, n_windows);
        if (w >= 0) counts[w] += 1.0;
    }
    return counts;
}

std::vector<double> windowed_sr(const SpikeTrain& train, double window, std::size_t n_windows,
                                double norm) {
    std::vector<double> out = windowed_sc(train, window, n_windows);
    for (double& v : out) v = v / window * norm;
    return out;
}

std::vector<double> last_or_pad(std::span<const double> values, std::size_t keep) {
    std::vector<double> out(keep, 0.0);
    if (values.size() >= keep) {
        std::copy(values.end() - static_cast<std::ptrdiff_t>(keep), values.end(), out.begin());
    } else {
        std::copy(values.begin(), values.end(), out.begin());
    }
    return out;
}

FeatureVector build_feature_vector(std::span<const SpikeTrain> trains, FeatureMode mode, double norm) {
    const std::size_t n_trains = train_count(mode);
    if (trains.size() != n_trains) {
        throw std::invalid_argument("feature mode expects " + std::to_string(n_trains) + " trains, got " +
                                    std::to_string(trains.size()));
    }
    FeatureVector fv;
    fv.mode = mode;
    fv.values.reserve(feature_length(mode));
    const std::size_t windows = window_count(mode);
    for (std::size_t i = 0; i < n_trains; ++i) {
        std::vector<double> part;
        if (mode == FeatureMode::realtime) {
            const auto real_windows =
                static_cast<std::size_t>(std::ceil(trains[i].duration / kFeatureWindow - 1e-9));
            part = last_or_pad(windowed_sr(trains[i], kFeatureWindow, real_windows), windows);
        } else if (i < static_cast<std::size_t>(kTaxelCount)) {
            part = windowed_sr(trains[i], kFeatureWindow, windows, norm);
        } else {
            part = windowed_sc(trains[i], kFeatureWindow, windows);
        }
        fv.values.insert(fv.values.end(), part.begin(), part.end());
    }
    return fv;
}

std::vector<std::string> feature_names(FeatureMode mode) {
    std::vector<std::string> names;
    const std::size_t windows = window_count(mode);
    const std::size_t trains = train_count(mode);
    char buf[32];
    for (std::size_t i = 0; i < trains; ++i) {
        const bool sa = mode == FeatureMode::realtime || i < static_cast<std::size_t>(kTaxelCount);
        const std::size_t taxel = mode == FeatureMode::realtime ? i : i % kTaxelCount;
        for (std::size_t w = 0; w < windows; ++w) {
            std::snprintf(buf, sizeof buf, "%s_t%02zu_w%02zu", sa ? "sa" : "ra", taxel + 1, w);
            names.emplace_back(buf);
        }
    }
    return names;
}

Eigen::RowVectorXd column_mean(const Eigen::MatrixXd& values) {
    if (values.rows() == 0) return Eigen::RowVectorXd::Zero(values.cols());
    return values.colwise().mean();
}

namespace {

FeatureMatrix stack(std::span<const FeatureVector> vectors, std::vector<TrialLabel> labels) {
    if (labels.size() != vectors.size()) throw std::invalid_argument("one label per feature vector required");
    FeatureMatrix m;
    const std::size_t cols = vectors.empty() ? 0 : vectors.front().values.size();
    m.values.resize(static_cast<Eigen::Index>(vectors.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < vectors.size(); ++r) {
        if (vectors[r].values.size() != cols) {
            throw std::invalid_argument("feature vector " + std::to_string(r) + " has length " +
                                        std::to_string(vectors[r].values.size()) + ", expected " +
                                        std::to_string(cols));
        }
        for (std::size_t c = 0; c < cols; ++c) m.values(r, c) = vectors[r].values[c];
    }
    if (!vectors.empty() && cols == feature_length(vectors.front().mode)) {
        m.names = feature_names(vectors.front().mode);
    }
    m.labels = std::move(labels);
    return m;
}

}  // namespace

FeatureMatrix assemble_and_center(std::span<const FeatureVector> vectors, std::vector<TrialLabel> labels,
                                  Centering centering) {
    FeatureMatrix m = stack(vectors, std::move(labels));
    if (centering == Centering::fit) {
        const Eigen::RowVectorXd mean = column_mean(m.values);
        m.values.rowwise() -= mean;
        m.center = mean;
    }
    return m;
}

FeatureMatrix assemble_and_center(std::span<const FeatureVector> vectors, std::vector<TrialLabel> labels,
                                  const Eigen::RowVectorXd& mean) {
    FeatureMatrix m = stack(vectors, std::move(labels));
    if (mean.size() != m.cols()) throw std::invalid_argument("centering mean has the wrong length");
    m.values.rowwise() -= mean;
    m.center = mean;
    return m;
}

void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& matrix) {
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open feature CSV for writing");
    out << "texture,group,speed,force,trial,profile,session";
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
        out << ',' << (static_cast<std::size_t>(c) < matrix.names.size() ? matrix.names[c] : "f" + std::to_string(c));
    }
    out << '\n';
    char buf[40];
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
        const auto& l = matrix.labels[r];
        out << l.texture << ',' << l.group << ',' << l.speed << ',' << l.force << ',' << l.trial << ','
            << l.profile << ',' << l.session;
        for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
            std::snprintf(buf, sizeof buf, ",%.17g", matrix.values(r, c));
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw IoError(path, "failed writing feature CSV");
}

FeatureMatrix read_feature_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open feature CSV");
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path, "empty feature CSV");
    FeatureMatrix m;
    {
        std::istringstream header(line);
        std::string cell;
        int col = 0;
        while (std::getline(header, cell, ',')) {
            if (col++ >= 7) m.names.push_back(cell);
        }
        if (col < 7) throw FormatError(path, "feature CSV header lacks label columns");
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(fields, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (cells.size() != m.names.size() + 7) throw FormatError(path, "feature CSV row has the wrong width");
        try {
            TrialLabel l;
            l.texture = cells[0].at(0);
            l.group = std::stoi(cells[1]);
            l.speed = std::stod(cells[2]);
            l.force = std::stod(cells[3]);
            l.trial = std::stoi(cells[4]);
            l.profile = cells[5];
            l.session = std::stoi(cells[6]);
            std::vector<double> row;
            row.reserve(m.names.size());
            for (std::size_t c = 7; c < cells.size(); ++c) row.push_back(std::stod(cells[c]));
            m.labels.push_back(std::move(l));
            rows.push_back(std::move(row));
        } catch (const std::exception&) {
            throw FormatError(path, "unparseable feature CSV row");
        }
    }
    m.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m.names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) m.values(r, c) = rows[r][c];
    }
    return m;
}

}  // namespace neurotac
