#pragma once

#include <neurotac/dataset.hpp>
#include <neurotac/experiment.hpp>
#include <neurotac/features.hpp>
#include <neurotac/force_cal.hpp>
#include <neurotac/rt_pipeline.hpp>
#include <neurotac/speed_warp.hpp>

#include <array>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace neurotac {

/// The four dataset variants obtained by toggling the two invariance stages.
enum class Variant { original, speed, force, speed_force };
inline constexpr std::array<Variant, 4> kVariants{Variant::original, Variant::speed, Variant::force,
                                                  Variant::speed_force};

std::string variant_name(Variant v);   ///< file-friendly, e.g. "speed-force-scaled"
std::string variant_title(Variant v);  ///< e.g. "Speed and Force Scaled"
Variant variant_of(bool force_scaling, bool speed_scaling);
bool uses_force_scaling(Variant v);
bool uses_speed_scaling(Variant v);

/// Spike trains of one trial for one variant, SA 1-18 then RA 1-18. Force
/// scaling off means every SA coefficient is 1; speed scaling off leaves
/// spike times untouched.
std::vector<SpikeTrain> encode_variant(const SensorTrace& trace, const ForceScalingTable* table, Variant v,
                                       const EncoderConfig& encoder = {}, const WarpConfig& warp = {});

/// Feature vector of one variant from its trains.
FeatureVector variant_features(std::span<const SpikeTrain> trains, Variant v, double speed,
                               const WarpConfig& warp = {});

TrialLabel label_of(const TraceEntry& entry);

/// Feature matrices of all four variants (uncentered), one row per trace in
/// manifest order.
struct EncodedDataset {
    std::array<FeatureMatrix, 4> variants;

    const FeatureMatrix& operator[](Variant v) const { return variants[static_cast<std::size_t>(v)]; }
    FeatureMatrix& operator[](Variant v) { return variants[static_cast<std::size_t>(v)]; }
};

/// Encodes every trace once for RA and once or twice for SA, and builds the
/// requested variants (all four by default).
EncodedDataset encode_dataset(const Dataset& dataset, const ForceScalingTable& table,
                              std::span<const Variant> which = kVariants, const EncoderConfig& encoder = {},
                              const WarpConfig& warp = {});

std::filesystem::path feature_path(const std::filesystem::path& dir, Variant v);

struct OfflineConfig {
    std::vector<int> pcs;
    int repeats = 20;
    std::uint64_t seed = 7;
    int k = 4;
    /// Rows drawn per texture each repeat as a fraction of those available.
    double subsample = 1.0 / 3.0;
};

/// Fig. 3A (individual textures) and 3B (texture groups), sharing folds and
/// PCA fits. Returns [variant][task][pc index] with task 0 = texture,
/// task 1 = group.
std::array<std::array<std::vector<ExperimentResult>, 2>, 4> run_texture_tasks(const EncodedDataset& data,
                                                                             const OfflineConfig& config);

/// Fig. 3C-F. Returns [variant][bucket][pc index].
std::array<std::array<std::vector<ExperimentResult>, 4>, 4> run_extrapolation(const EncodedDataset& data,
                                                                             const OfflineConfig& config);

/// Row of a results CSV: one variant at one PC count, compared with a
/// baseline sample by Welch's t and Cohen's d.
struct ResultRow {
    std::string variant;
    const ExperimentResult* result = nullptr;
    const ExperimentResult* baseline = nullptr;
};

/// CSV with a leading "# config=" comment and columns
/// variant,pcs,mean_accuracy,dispersion,n,p,effect,marker,tested,accuracies.
/// `tested` is the number of test predictions per repeat and `accuracies`
/// lists every repeat, separated by ';'.
void write_result_csv(const std::filesystem::path& path, const std::string& config_json,
                      const std::vector<ResultRow>& rows);

/// Real-time CSV: p and effect from the two-proportion z test and Cohen's h
/// on pooled correct counts when `proportions` is set, else Welch and d.
void write_rt_csv(const std::filesystem::path& path, const std::string& config_json, const RtResult& result,
                  bool proportions);

/// Table-1 layout: six analyses by four variants, mean and spread in %.
struct SummaryTable {
    int pcs = 50;
    std::array<std::array<double, 4>, 6> mean{};
    std::array<std::array<double, 4>, 6> spread{};
    static const std::array<std::string, 6>& row_titles();
};

SummaryTable summarize_table(const std::array<std::array<std::vector<ExperimentResult>, 2>, 4>& tasks,
                             const std::array<std::array<std::vector<ExperimentResult>, 4>, 4>& buckets, int pcs);

void write_summary(const std::filesystem::path& csv_path, const std::filesystem::path& text_path,
                   const std::string& config_json, const SummaryTable& table);

}  // namespace neurotac
