#include <neurotac/lda.hpp>

#include <neurotac/error.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

namespace neurotac {

using nlohmann::json;

LdaStatistics lda_statistics(const Eigen::MatrixXd& scores, std::span<const int> labels) {
    if (static_cast<Eigen::Index>(labels.size()) != scores.rows()) {
        throw std::invalid_argument("label count does not match score rows");
    }
    std::map<int, std::vector<Eigen::Index>> members;
    for (Eigen::Index r = 0; r < scores.rows(); ++r) members[labels[r]].push_back(r);
    if (members.size() < 2) throw std::invalid_argument("LDA needs at least two classes");

    LdaStatistics s;
    s.n_samples = scores.rows();
    s.means.resize(static_cast<Eigen::Index>(members.size()), scores.cols());
    s.scatter = Eigen::MatrixXd::Zero(scores.cols(), scores.cols());
    Eigen::Index c = 0;
    for (const auto& [label, rows] : members) {
        if (rows.size() < 2) {
            throw std::invalid_argument("class " + std::to_string(label) + " has fewer than two samples");
        }
        Eigen::MatrixXd block(static_cast<Eigen::Index>(rows.size()), scores.cols());
        for (std::size_t i = 0; i < rows.size(); ++i) block.row(static_cast<Eigen::Index>(i)) = scores.row(rows[i]);
        const Eigen::RowVectorXd mean = block.colwise().mean();
        block.rowwise() -= mean;
        s.scatter.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
        s.means.row(c++) = mean;
        s.classes.push_back(label);
    }
    s.scatter.triangularView<Eigen::StrictlyUpper>() = s.scatter.transpose();
    return s;
}

LdaModel lda_from_statistics(const LdaStatistics& stats, int dims) {
    const Eigen::Index m = dims < 0 ? stats.scatter.rows() : dims;
    if (m < 1 || m > stats.scatter.rows()) throw std::invalid_argument("invalid LDA dimension");
    const auto k = static_cast<Eigen::Index>(stats.classes.size());
    const double dof = static_cast<double>(stats.n_samples - k);
    if (!(dof > 0.0)) throw std::invalid_argument("not enough samples for a pooled covariance");

    LdaModel model;
    model.classes = stats.classes;
    model.means = stats.means.leftCols(m);
    model.covariance = stats.scatter.topLeftCorner(m, m) / dof;
    model.priors = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(model.covariance, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12) {
        double ridge = 1e-6 * model.covariance.trace() / static_cast<double>(m);
        if (!(ridge > 0.0)) ridge = 1e-6;
        model.covariance.diagonal().array() += ridge;
        model.shrinkage = ridge;
    }

    const Eigen::LLT<Eigen::MatrixXd> llt(model.covariance);
    if (llt.info() != Eigen::Success) throw std::runtime_error("pooled covariance is not positive definite");
    model.weights = llt.solve(model.means.transpose());
    model.bias.resize(k);
    for (Eigen::Index c = 0; c < k; ++c) {
        model.bias(c) = -0.5 * model.means.row(c).dot(model.weights.col(c)) + std::log(model.priors(c));
    }
    return model;
}

LdaModel lda_fit(const Eigen::MatrixXd& scores, std::span<const int> labels) {
    return lda_from_statistics(lda_statistics(scores, labels));
}

std::vector<int> lda_predict(const LdaModel& model, const Eigen::MatrixXd& scores) {
    if (scores.cols() != model.weights.rows()) {
        throw std::invalid_argument("score dimension " + std::to_string(scores.cols()) + " does not match model " +
                                    std::to_string(model.weights.rows()));
    }
    const Eigen::MatrixXd d = (scores * model.weights).rowwise() + model.bias;
    std::vector<int> out(static_cast<std::size_t>(scores.rows()));
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < d.cols(); ++c) {
            if (d(r, c) > d(r, best)) best = c;
        }
        out[static_cast<std::size_t>(r)] = model.classes[static_cast<std::size_t>(best)];
    }
    return out;
}

int lda_predict_one(const LdaModel& model, const Eigen::RowVectorXd& score) {
    return lda_predict(model, Eigen::MatrixXd(score)).front();
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != cols) throw std::runtime_error("ragged matrix");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

json row_to_json(const Eigen::RowVectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::RowVectorXd row_from_json(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::RowVectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

void save_classifier(const std::filesystem::path& path, const ClassifierModel& model) {
    json j;
    j["format"] = "neurotac-classifier";
    j["version"] = 1;
    j["pca"] = {{"mean", row_to_json(model.pca.mean)},
                {"components", matrix_to_json(model.pca.components)},
                {"explained", row_to_json(model.pca.explained.transpose())},
                {"total_variance", model.pca.total_variance}};
    j["lda"] = {{"classes", model.lda.classes},
                {"means", matrix_to_json(model.lda.means)},
                {"covariance", matrix_to_json(model.lda.covariance)},
                {"priors", row_to_json(model.lda.priors.transpose())},
                {"shrinkage", model.lda.shrinkage}};
    if (model.session_mean) j["session_mean"] = row_to_json(*model.session_mean);
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open classifier file for writing");
    out << j.dump() << '\n';
    if (!out) throw IoError(path, "failed writing classifier file");
}

ClassifierModel load_classifier(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open classifier file");
    try {
        const json j = json::parse(in);
        if (j.at("format") != "neurotac-classifier") throw std::runtime_error("wrong format tag");
        ClassifierModel m;
        const auto& p = j.at("pca");
        m.pca.mean = row_from_json(p.at("mean"));
        m.pca.components = matrix_from_json(p.at("components"));
        m.pca.explained = row_from_json(p.at("explained")).transpose();
        m.pca.total_variance = p.at("total_variance").get<double>();
        const auto& l = j.at("lda");
        m.lda.classes = l.at("classes").get<std::vector<int>>();
        m.lda.means = matrix_from_json(l.at("means"));
        m.lda.covariance = matrix_from_json(l.at("covariance"));
        m.lda.priors = row_from_json(l.at("priors")).transpose();
        m.lda.shrinkage = l.at("shrinkage").get<double>();
        const Eigen::LLT<Eigen::MatrixXd> llt(m.lda.covariance);
        if (llt.info() != Eigen::Success) throw std::runtime_error("stored covariance is not positive definite");
        m.lda.weights = llt.solve(m.lda.means.transpose());
        m.lda.bias.resize(m.lda.means.rows());
        for (Eigen::Index c = 0; c < m.lda.means.rows(); ++c) {
            m.lda.bias(c) = -0.5 * m.lda.means.row(c).dot(m.lda.weights.col(c)) + std::log(m.lda.priors(c));
        }
        if (j.contains("session_mean")) m.session_mean = row_from_json(j.at("session_mean"));
        return m;
    } catch (const std::exception& e) {
        throw FormatError(path, std::string("malformed classifier file (") + e.what() + ")");
    }
}

}  // namespace neurotac
