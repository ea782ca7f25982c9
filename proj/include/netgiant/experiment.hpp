#ifndef NETGIANT_EXPERIMENT_HPP
#define NETGIANT_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netgiant/algorithms.hpp"
#include "netgiant/objectives.hpp"
#include "netgiant/run.hpp"

namespace netgiant {

// ---- data ----

enum class LabelMode {
  binary_12,  // CovType style: 1 -> +1, 2 -> -1
  binary_pm1, // labels already in {-1, +1}
  multiclass  // keep integer labels
};

struct LibsvmOptions {
  /// Feature dimension; 0 infers it from the largest index seen.
  int dim = 0;
  LabelMode labels = LabelMode::binary_12;
};

/// Parses "label idx:val idx:val ..." lines with 1-based indices into a
/// dense dataset. Missing indices are zero.
Dataset load_libsvm(const std::filesystem::path& path, const LibsvmOptions& opts = {});
Dataset parse_libsvm(const std::string& text, const LibsvmOptions& opts = {});

/// Writes binary labels as +1/-1 (or multiclass labels verbatim) with
/// round-trippable reals. Zero features are omitted.
void write_libsvm(const Dataset& ds, const std::filesystem::path& path);

/// Per-feature affine rescaling to [0, 1]; constant features map to 0.
void normalize_min_max(Dataset& ds);

/// Two-class Gaussian blobs: features ~ N(0, I) shifted by
/// label * separation * w / ||w|| for a random direction w. Labels alternate
/// in blocks so both classes are present whenever n_samples >= 2.
Dataset synth_logistic(int n_samples, int dim, std::uint64_t seed, double separation);

/// M-class Gaussian blobs around random unit centres scaled by separation;
/// labels in {1..M}.
Dataset synth_multiclass(int n_samples, int dim, int n_classes, std::uint64_t seed,
                         double separation);

/// Seeded shuffle, then contiguous blocks; the first n % N nodes get one
/// extra sample.
std::vector<Dataset> partition_uniform(const Dataset& ds, int n_nodes, std::uint64_t seed);

// ---- metrics ----

MetricsRecord metrics_from_state(const NetworkState& state, const Eigen::VectorXd& x_star,
                                 double f_star, const ObjectiveSet& objs,
                                 bool with_gamma = true);

// ---- output ----

inline constexpr const char* kCsvHeader =
    "iter,consensus_err,tracking_err,opt_gap,f_gap,gamma_k,ratio_r";

std::string format_csv(const Trajectory& traj);
void write_csv(const Trajectory& traj, const std::filesystem::path& path);

enum class SvgField { opt_gap, f_gap, consensus_err, tracking_err, gamma_k, ratio_r };

SvgField parse_svg_field(const std::string& name);

/// Line chart with one polyline per trajectory and a legend built from each
/// run's display name. On a log axis values below 1e-16 are clamped.
std::string render_svg(std::span<const Trajectory> trajs, SvgField field, bool log_scale,
                       const std::string& title = {});
void write_svg(std::span<const Trajectory> trajs, const std::filesystem::path& path,
               SvgField field, bool log_scale, const std::string& title = {});

}  // namespace netgiant

#endif  // NETGIANT_EXPERIMENT_HPP
