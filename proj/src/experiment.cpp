#include "netgiant/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace netgiant {

// ---- data ----

Dataset parse_libsvm(const std::string& text, const LibsvmOptions& opts) {
  struct Row {
    int label;
    std::vector<std::pair<int, double>> entries;
  };
  std::vector<Row> rows;
  int max_index = 0;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    throw std::runtime_error("libsvm line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    Row row{};
    try {
      std::size_t used = 0;
      const double lab = std::stod(tok, &used);
      if (used != tok.size() || lab != std::floor(lab)) fail("label '" + tok + "' is not an integer");
      row.label = static_cast<int>(lab);
    } catch (const std::invalid_argument&) {
      fail("label '" + tok + "' is not a number");
    }
    int prev_index = 0;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size()) {
        fail("expected idx:val, got '" + tok + "'");
      }
      int idx = 0;
      double val = 0.0;
      try {
        std::size_t used = 0;
        idx = std::stoi(tok.substr(0, colon), &used);
        if (used != colon) fail("bad index in '" + tok + "'");
        const std::string vs = tok.substr(colon + 1);
        val = std::stod(vs, &used);
        if (used != vs.size()) fail("bad value in '" + tok + "'");
      } catch (const std::logic_error&) {
        fail("cannot parse '" + tok + "'");
      }
      if (idx < 1) fail("feature indices are 1-based");
      if (idx <= prev_index) fail("feature indices must be increasing");
      if (opts.dim > 0 && idx > opts.dim) {
        fail("index " + std::to_string(idx) + " exceeds declared dimension " +
             std::to_string(opts.dim));
      }
      prev_index = idx;
      max_index = std::max(max_index, idx);
      row.entries.emplace_back(idx - 1, val);
    }
    switch (opts.labels) {
      case LabelMode::binary_12:
        if (row.label != 1 && row.label != 2) fail("binary label must be 1 or 2");
        row.label = row.label == 1 ? 1 : -1;
        break;
      case LabelMode::binary_pm1:
        if (row.label != 1 && row.label != -1) fail("binary label must be -1 or +1");
        break;
      case LabelMode::multiclass:
        if (row.label < 1) fail("class labels start at 1");
        break;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("libsvm input contains no samples");

  const int dim = opts.dim > 0 ? opts.dim : max_index;
  if (dim == 0) throw std::runtime_error("libsvm input has no features");
  Dataset ds;
  ds.features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), dim);
  ds.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    ds.labels(r) = rows[r].label;
    for (const auto& [j, v] : rows[r].entries) ds.features(r, j) = v;
  }
  return ds;
}

Dataset load_libsvm(const std::filesystem::path& path, const LibsvmOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_libsvm(ss.str(), opts);
}

void write_libsvm(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  char buf[64];
  for (int r = 0; r < ds.n_samples(); ++r) {
    out << ds.labels(r);
    for (int j = 0; j < ds.dim(); ++j) {
      if (ds.features(r, j) == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%.17g", ds.features(r, j));
      out << ' ' << (j + 1) << ':' << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void normalize_min_max(Dataset& ds) {
  for (int j = 0; j < ds.dim(); ++j) {
    auto col = ds.features.col(j);
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    if (hi > lo) {
      col = (col.array() - lo) / (hi - lo);
    } else {
      col.setZero();
    }
  }
}

Dataset synth_logistic(int n_samples, int dim, std::uint64_t seed, double separation) {
  if (n_samples < 2) throw std::invalid_argument("need at least two samples");
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd w(dim);
  for (int j = 0; j < dim; ++j) w(j) = gauss(rng);
  w.normalize();
  Dataset ds;
  ds.features.resize(n_samples, dim);
  ds.labels.resize(n_samples);
  for (int r = 0; r < n_samples; ++r) {
    const int label = r % 2 == 0 ? 1 : -1;
    ds.labels(r) = label;
    for (int j = 0; j < dim; ++j) ds.features(r, j) = gauss(rng) + label * separation * w(j);
  }
  return ds;
}

Dataset synth_multiclass(int n_samples, int dim, int n_classes, std::uint64_t seed,
                         double separation) {
  if (n_classes < 2) throw std::invalid_argument("need at least two classes");
  if (n_samples < n_classes) throw std::invalid_argument("fewer samples than classes");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd centres(n_classes, dim);
  for (int c = 0; c < n_classes; ++c) {
    for (int j = 0; j < dim; ++j) centres(c, j) = gauss(rng);
    centres.row(c) *= separation / centres.row(c).norm();
  }
  Dataset ds;
  ds.features.resize(n_samples, dim);
  ds.labels.resize(n_samples);
  for (int r = 0; r < n_samples; ++r) {
    const int c = r % n_classes;
    ds.labels(r) = c + 1;
    for (int j = 0; j < dim; ++j) ds.features(r, j) = gauss(rng) + centres(c, j);
  }
  return ds;
}

std::vector<Dataset> partition_uniform(const Dataset& ds, int n_nodes, std::uint64_t seed) {
  if (n_nodes < 1) throw std::invalid_argument("need at least one node");
  if (ds.n_samples() < n_nodes) {
    throw std::invalid_argument("fewer samples (" + std::to_string(ds.n_samples()) +
                                ") than nodes (" + std::to_string(n_nodes) + ")");
  }
  std::vector<int> order(ds.n_samples());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const int base = ds.n_samples() / n_nodes;
  const int extra = ds.n_samples() % n_nodes;
  std::vector<Dataset> parts(n_nodes);
  int cursor = 0;
  for (int i = 0; i < n_nodes; ++i) {
    const int size = base + (i < extra ? 1 : 0);
    parts[i].features.resize(size, ds.dim());
    parts[i].labels.resize(size);
    for (int r = 0; r < size; ++r, ++cursor) {
      parts[i].features.row(r) = ds.features.row(order[cursor]);
      parts[i].labels(r) = ds.labels(order[cursor]);
    }
  }
  return parts;
}

// ---- metrics ----

MetricsRecord metrics_from_state(const NetworkState& state, const Eigen::VectorXd& x_star,
                                 double f_star, const ObjectiveSet& objs, bool with_gamma) {
  const Eigen::RowVectorXd x_bar = state.x.colwise().mean();
  const Eigen::RowVectorXd g_bar = state.grad.colwise().mean();
  MetricsRecord rec;
  rec.iter = state.iter;
  rec.consensus_err = (state.x.rowwise() - x_bar).norm();
  rec.tracking_err = (state.s.rowwise() - g_bar).norm();
  rec.opt_gap = (x_bar - x_star.transpose()).norm();
  rec.f_gap = global_value(objs, x_bar.transpose()) - f_star;
  rec.gamma_k = with_gamma ? hessian_gap(objs, state.x) : std::numeric_limits<double>::quiet_NaN();
  rec.stacked_gap = (state.x.rowwise() - x_star.transpose()).norm() /
                    std::sqrt(static_cast<double>(state.n_nodes()));
  rec.tracking_residual = tracking_residual(state);
  return rec;
}

// ---- output ----

namespace {

void append_real(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  out += buf;
}

}  // namespace

std::string format_csv(const Trajectory& traj) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : traj.records) {
    out += std::to_string(r.iter);
    for (double v : {r.consensus_err, r.tracking_err, r.opt_gap, r.f_gap, r.gamma_k}) {
      out += ',';
      append_real(out, v);
    }
    out += ',';
    if (r.ratio_r) append_real(out, *r.ratio_r);
    out += '\n';
  }
  return out;
}

void write_csv(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << format_csv(traj);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

SvgField parse_svg_field(const std::string& name) {
  if (name == "opt_gap") return SvgField::opt_gap;
  if (name == "f_gap") return SvgField::f_gap;
  if (name == "consensus_err") return SvgField::consensus_err;
  if (name == "tracking_err") return SvgField::tracking_err;
  if (name == "gamma_k") return SvgField::gamma_k;
  if (name == "ratio_r") return SvgField::ratio_r;
  throw std::invalid_argument("unknown plot field '" + name + "'");
}

namespace {

const char* field_name(SvgField f) {
  switch (f) {
    case SvgField::opt_gap: return "opt_gap";
    case SvgField::f_gap: return "f_gap";
    case SvgField::consensus_err: return "consensus_err";
    case SvgField::tracking_err: return "tracking_err";
    case SvgField::gamma_k: return "gamma_k";
    case SvgField::ratio_r: return "ratio_r";
  }
  return "value";
}

std::optional<double> field_value(const MetricsRecord& r, SvgField f) {
  switch (f) {
    case SvgField::opt_gap: return r.opt_gap;
    case SvgField::f_gap: return r.f_gap;
    case SvgField::consensus_err: return r.consensus_err;
    case SvgField::tracking_err: return r.tracking_err;
    case SvgField::gamma_k: return r.gamma_k;
    case SvgField::ratio_r: return r.ratio_r;
  }
  return std::nullopt;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string render_svg(std::span<const Trajectory> trajs, SvgField field, bool log_scale,
                       const std::string& title) {
  if (trajs.empty()) throw std::invalid_argument("nothing to plot");
  constexpr double width = 720, height = 440;
  constexpr double left = 80, right = 20, top = 40, bottom = 60;
  constexpr double clamp = 1e-16;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  auto transform = [&](double v) { return log_scale ? std::log10(std::max(v, clamp)) : v; };

  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -y_lo;
  int x_hi = 1;
  for (const auto& t : trajs) {
    for (const auto& r : t.records) {
      x_hi = std::max(x_hi, r.iter);
      const auto v = field_value(r, field);
      if (!v || !std::isfinite(*v)) continue;
      const double y = transform(*v);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (!std::isfinite(y_lo)) {
    y_lo = 0.0;
    y_hi = 1.0;
  }
  if (log_scale) {
    y_lo = std::floor(y_lo);
    y_hi = std::ceil(y_hi);
  }
  if (y_hi - y_lo < 1e-12) {
    y_lo -= 0.5;
    y_hi += 0.5;
  }

  auto px = [&](double iter) { return left + plot_w * iter / x_hi; };
  auto py = [&](double y) { return top + plot_h * (1.0 - (y - y_lo) / (y_hi - y_lo)); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
     << "\" fill=\"white\"/>\n";
  if (!title.empty()) {
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
       << xml_escape(title) << "</text>\n";
  }
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
     << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

  // y ticks: whole decades on a log axis, five even steps otherwise.
  std::vector<double> yticks;
  if (log_scale) {
    const int span = static_cast<int>(y_hi - y_lo);
    const int stride = std::max(1, span / 8);
    for (int e = static_cast<int>(y_lo); e <= static_cast<int>(y_hi); e += stride) yticks.push_back(e);
  } else {
    for (int k = 0; k <= 5; ++k) yticks.push_back(y_lo + (y_hi - y_lo) * k / 5.0);
  }
  for (double y : yticks) {
    const std::string label = log_scale ? "1e" + std::to_string(static_cast<int>(y)) : fmt("%.3g", y);
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << left << "\" y2=\""
       << py(y) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << py(y) + 4
       << "\" text-anchor=\"end\" font-size=\"11\">" << label << "</text>\n";
  }
  for (int k = 0; k <= 5; ++k) {
    const double it = x_hi * k / 5.0;
    os << "<line x1=\"" << px(it) << "\" y1=\"" << top + plot_h << "\" x2=\"" << px(it)
       << "\" y2=\"" << top + plot_h + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << px(it) << "\" y=\"" << top + plot_h + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt("%.0f", it) << "</text>\n";
  }
  os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 20
     << "\" text-anchor=\"middle\" font-size=\"12\">iteration</text>\n";
  os << "<text x=\"18\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
     << "transform=\"rotate(-90 18 " << top + plot_h / 2 << ")\">" << field_name(field)
     << "</text>\n";

  for (std::size_t t = 0; t < trajs.size(); ++t) {
    const char* colour = kPalette[t % kPalette.size()];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& r : trajs[t].records) {
      const auto v = field_value(r, field);
      if (!v || !std::isfinite(*v)) continue;
      if (!first) os << ' ';
      os << fmt("%.2f", px(r.iter)) << ',' << fmt("%.2f", py(transform(*v)));
      first = false;
    }
    os << "\"/>\n";
    const double ly = top + 14 + 16.0 * static_cast<double>(t);
    os << "<line x1=\"" << left + plot_w - 200 << "\" y1=\"" << ly << "\" x2=\""
       << left + plot_w - 180 << "\" y2=\"" << ly << "\" stroke=\"" << colour
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + plot_w - 175 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">"
       << xml_escape(trajs[t].config.display_name()) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_svg(std::span<const Trajectory> trajs, const std::filesystem::path& path,
               SvgField field, bool log_scale, const std::string& title) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << render_svg(trajs, field, log_scale, title);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace netgiant
