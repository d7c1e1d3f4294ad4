#pragma once

// Synthetic benchmarks, image ingestion and the CSV matrix format.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sdris/error.hpp"
#include "sdris/joint_table.hpp"
#include "sdris/random.hpp"

namespace sdris {

// p(x)-weighted Pearson correlation of two vectors.
inline double weighted_correlation(const Vector& a, const Vector& b, const Vector& w) {
  if (a.size() != b.size() || a.size() != w.size())
    throw InvalidArgument("weighted_correlation: size mismatch");
  const double ws = w.sum();
  const double ma = a.dot(w) / ws, mb = b.dot(w) / ws;
  const Vector ca = a.array() - ma, cb = b.array() - mb;
  const double saa = ca.cwiseProduct(ca).dot(w), sbb = cb.cwiseProduct(cb).dot(w);
  if (!(saa > 0.0) || !(sbb > 0.0)) return 0.0;
  return ca.cwiseProduct(cb).dot(w) / std::sqrt(saa * sbb);
}

// ---------------------------------------------------------------------------
// Two competing structures

struct SynthSpec {
  Eigen::Index nx = 16;
  Eigen::Index ny = 16;
  double strong_amplitude = 4.5;
  double weak_amplitude = 2.5;
  double noise_level = 0.05;
  std::uint64_t seed = 0;

  void validate() const {
    if (nx < 4 || ny < 4) throw InvalidArgument("synthetic tables need nx, ny >= 4");
    if (!(strong_amplitude > 0.0) || !(weak_amplitude >= 0.0) ||
        !std::isfinite(strong_amplitude) || !std::isfinite(weak_amplitude))
      throw InvalidArgument("amplitudes must be finite, strong > 0, weak >= 0");
    if (!(strong_amplitude > weak_amplitude))
      throw InvalidArgument("strong_amplitude must exceed weak_amplitude");
    if (!(noise_level >= 0.0) || !std::isfinite(noise_level))
      throw InvalidArgument("noise_level must be finite and >= 0");
  }
};

struct SynthConflicting {
  JointTable plus;
  JointTable minus;
  Vector strong;  // g(x): gradient in x, centered under p+(x)
  Vector weak;    // b(x): mid-x bump, centered and orthogonal to g under p+(x)
};

namespace detail {

inline Vector linear_profile(Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v(i) = 2.0 * static_cast<double>(i) / static_cast<double>(n - 1) - 1.0;
  return v;
}

inline Vector bump_profile(Eigen::Index n) {
  Vector v(n);
  const double c = 0.5 * static_cast<double>(n - 1);
  const double s = 0.15 * static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = (static_cast<double>(i) - c) / s;
    v(i) = std::exp(-0.5 * z * z);
  }
  return v;
}

inline Matrix add_noise_and_normalize(Matrix m, double noise, Rng& rng) {
  m /= m.sum();
  const double scale = noise * m.mean();
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      m(i, j) = std::max(m(i, j) + scale * rng.normal(), 1e-9);
  return m / m.sum();
}

}  // namespace detail

// p+ has |Y| = ny: the left half couples a mid-x bump to y with amplitude
// weak_amplitude, the right half couples a top-to-bottom gradient to y with
// amplitude strong_amplitude. p- has the gradient block only.
inline SynthConflicting synth_conflicting(const SynthSpec& spec) {
  spec.validate();
  const Eigen::Index left = spec.ny / 2, right = spec.ny - left;
  const Vector g = detail::linear_profile(spec.nx);
  Vector b = detail::bump_profile(spec.nx);
  b = 2.0 * (b.array() - b.mean()) / (b.maxCoeff() - b.minCoeff());
  const Vector ul = detail::linear_profile(left), ur = detail::linear_profile(right);

  Matrix plus(spec.nx, spec.ny);
  for (Eigen::Index x = 0; x < spec.nx; ++x) {
    for (Eigen::Index y = 0; y < left; ++y)
      plus(x, y) = std::exp(spec.weak_amplitude * b(x) * ul(y));
    for (Eigen::Index y = 0; y < right; ++y)
      plus(x, left + y) = std::exp(spec.strong_amplitude * g(x) * ur(y));
  }
  Matrix minus(spec.nx, right);
  for (Eigen::Index x = 0; x < spec.nx; ++x)
    for (Eigen::Index y = 0; y < right; ++y)
      minus(x, y) = std::exp(spec.strong_amplitude * g(x) * ur(y));

  Rng rng_plus(substream_seed(spec.seed, "synth-plus"));
  Rng rng_minus(substream_seed(spec.seed, "synth-minus"));
  plus = detail::add_noise_and_normalize(std::move(plus), spec.noise_level, rng_plus);
  minus = detail::add_noise_and_normalize(std::move(minus), spec.noise_level, rng_minus);

  std::vector<std::string> xl, yl, ym;
  for (Eigen::Index x = 0; x < spec.nx; ++x) xl.push_back("x" + std::to_string(x));
  for (Eigen::Index y = 0; y < spec.ny; ++y)
    yl.push_back((y < left ? "w" : "s") + std::to_string(y));
  for (Eigen::Index y = 0; y < right; ++y) ym.push_back("s" + std::to_string(left + y));

  SynthConflicting out{JointTable::from_probabilities(plus, xl, yl),
                       JointTable::from_probabilities(minus, xl, ym), Vector(), Vector()};
  const Vector w = out.plus.marginal_x();
  Vector gc = g.array() - g.dot(w);
  Vector bc = b.array() - b.dot(w);
  bc -= gc * (gc.cwiseProduct(bc).dot(w) / gc.cwiseProduct(gc).dot(w));
  out.strong = gc / std::sqrt(gc.cwiseProduct(gc).dot(w));
  out.weak = bc / std::sqrt(bc.cwiseProduct(bc).dot(w));
  return out;
}

// ---------------------------------------------------------------------------
// Images

// Column y of the joint table is image y with p(x|y) = pixel / image total
// and p(y) uniform; x indexes pixels row-major. Zero pixels are floored at
// 1e-9 before normalization.
inline JointTable images_to_joint(const std::vector<Matrix>& images,
                                  std::vector<std::string> y_labels = {}) {
  if (images.size() < 2) throw InvalidArgument("need at least two images");
  const Eigen::Index rows = images.front().rows(), cols = images.front().cols();
  if (rows * cols < 2) throw InvalidArgument("images need at least two pixels");
  Matrix table(rows * cols, static_cast<Eigen::Index>(images.size()));
  for (std::size_t i = 0; i < images.size(); ++i) {
    const Matrix& img = images[i];
    if (img.rows() != rows || img.cols() != cols)
      throw InvalidArgument("image " + std::to_string(i) + " has a different shape");
    if (!img.allFinite() || img.minCoeff() < 0.0)
      throw InvalidArgument("image " + std::to_string(i) + " has negative or non-finite pixels");
    if (!(img.maxCoeff() > 0.0))
      throw InvalidArgument("image " + std::to_string(i) + " is all zero");
    Vector col(rows * cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) col(r * cols + c) = std::max(img(r, c), 1e-9);
    table.col(static_cast<Eigen::Index>(i)) = col / col.sum();
  }
  table /= static_cast<double>(images.size());
  table /= table.sum();
  return JointTable::from_probabilities(table, {}, std::move(y_labels));
}

// ---------------------------------------------------------------------------
// Classes hidden under a dominant nuisance

struct NuisanceSpec {
  int n_classes = 5;
  int per_class = 20;
  Eigen::Index n_features = 32;  // |X|
  int signal_dims = 2;
  int nuisance_dims = 4;
  double signal_strength = 1.2;
  double nuisance_strength = 1.5;  // must exceed signal_strength unless 0
  double within_class_spread = 0.15;
  int n_irrelevance = 60;  // nuisance-only samples in p-
  std::uint64_t seed = 0;

  void validate() const {
    if (n_classes < 2) throw InvalidArgument("need at least two classes");
    if (per_class < 4) throw InvalidArgument("need at least four samples per class");
    if (n_features < 2) throw InvalidArgument("need at least two features");
    if (signal_dims < 1 || nuisance_dims < 0 ||
        signal_dims + nuisance_dims > n_features)
      throw InvalidArgument("signal/nuisance dimensions do not fit in n_features");
    if (!(signal_strength > 0.0) || !(nuisance_strength >= 0.0) ||
        !(within_class_spread >= 0.0) || !std::isfinite(signal_strength) ||
        !std::isfinite(nuisance_strength) || !std::isfinite(within_class_spread))
      throw InvalidArgument("strengths must be finite, signal > 0, nuisance >= 0");
    if (nuisance_strength != 0.0 && !(nuisance_strength > signal_strength))
      throw InvalidArgument("nuisance_strength must exceed signal_strength (or be 0)");
    if (n_irrelevance < 2) throw InvalidArgument("need at least two irrelevance samples");
  }
};

struct NuisanceClasses {
  JointTable plus;   // one column per labelled sample
  JointTable minus;  // one column per nuisance-only sample
  std::vector<int> labels;
  Matrix signal_profiles;    // |X| x signal_dims
  Matrix nuisance_profiles;  // |X| x nuisance_dims
};

// Sample y has p(x|y) proportional to
//   exp(signal_strength * S c_y + nuisance_strength * N z_y)
// where S, N hold orthonormal profiles, c_y = class center + spread * noise,
// and z_y ~ N(0, I) varies freely within every class. p- samples use
// exp(nuisance_strength * N z) alone.
inline NuisanceClasses synth_nuisance_classes(const NuisanceSpec& spec) {
  spec.validate();
  const Eigen::Index nx = spec.n_features;
  Rng prof_rng(substream_seed(spec.seed, "nuisance-profiles"));
  const Matrix raw = prof_rng.normal_matrix(nx, spec.signal_dims + spec.nuisance_dims);
  Eigen::HouseholderQR<Matrix> qr(raw);
  const Matrix q = qr.householderQ() * Matrix::Identity(nx, raw.cols());
  // Unit RMS per profile.
  const Matrix profiles = q * std::sqrt(static_cast<double>(nx));
  const Matrix S = profiles.leftCols(spec.signal_dims);
  const Matrix N = profiles.rightCols(spec.nuisance_dims);

  // Evenly spaced on the unit circle in the first two signal coordinates (on
  // [-1, 1] when there is only one), so every seed plants the same geometry.
  Matrix centers = Matrix::Zero(spec.signal_dims, spec.n_classes);
  for (int c = 0; c < spec.n_classes; ++c) {
    if (spec.signal_dims == 1) {
      centers(0, c) = -1.0 + 2.0 * c / (spec.n_classes - 1);
    } else {
      const double a = 2.0 * std::numbers::pi * c / spec.n_classes;
      centers(0, c) = std::cos(a);
      centers(1, c) = std::sin(a);
    }
  }

  auto column = [&](const Vector& logits) {
    const Vector e = (logits.array() - logits.maxCoeff()).exp();
    return Vector(e / e.sum());
  };

  const int n = spec.n_classes * spec.per_class;
  Matrix plus(nx, n);
  std::vector<int> labels;
  std::vector<std::string> yl;
  Rng sample_rng(substream_seed(spec.seed, "nuisance-samples"));
  for (int c = 0, y = 0; c < spec.n_classes; ++c)
    for (int i = 0; i < spec.per_class; ++i, ++y) {
      const Vector coef = centers.col(c) + sample_rng.normal_matrix(spec.signal_dims, 1,
                                                                     spec.within_class_spread);
      const Vector z = sample_rng.normal_matrix(spec.nuisance_dims, 1);
      plus.col(y) = column(spec.signal_strength * S * coef + spec.nuisance_strength * N * z);
      labels.push_back(c);
      yl.push_back("c" + std::to_string(c) + "_" + std::to_string(i));
    }
  Matrix minus(nx, spec.n_irrelevance);
  std::vector<std::string> ml;
  Rng minus_rng(substream_seed(spec.seed, "nuisance-irrelevance"));
  for (int y = 0; y < spec.n_irrelevance; ++y) {
    const Vector z = minus_rng.normal_matrix(spec.nuisance_dims, 1);
    minus.col(y) = column(spec.nuisance_strength * N * z);
    ml.push_back("n" + std::to_string(y));
  }
  std::vector<std::string> xl;
  for (Eigen::Index x = 0; x < nx; ++x) xl.push_back("x" + std::to_string(x));
  auto to_table = [&](Matrix m, std::vector<std::string> labels_y) {
    m = (m.array().max(1e-9)).matrix();
    for (Eigen::Index y = 0; y < m.cols(); ++y) m.col(y) /= m.col(y).sum();
    m /= static_cast<double>(m.cols());
    m /= m.sum();
    return JointTable::from_probabilities(m, xl, std::move(labels_y));
  };
  return {to_table(std::move(plus), std::move(yl)), to_table(std::move(minus), std::move(ml)),
          std::move(labels), S, N};
}

// ---------------------------------------------------------------------------
// PGM images

namespace detail {

inline std::string pgm_token(const std::string& data, std::size_t& pos, const std::string& what) {
  for (;;) {
    while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    if (pos < data.size() && data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n' && data[pos] != '\r') ++pos;
      continue;
    }
    break;
  }
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  if (start == pos) throw ParseError(what + ": unexpected end of data");
  return data.substr(start, pos - start);
}

inline long pgm_number(const std::string& tok, const std::string& what) {
  if (tok.empty() || tok.size() > 9 ||
      !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw ParseError(what + ": bad number '" + tok + "'");
  return std::stol(tok);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace detail

// Grey levels of a binary (P5) or ASCII (P2) PGM, rows x columns.
inline Matrix parse_pgm(const std::string& data, const std::string& name = "pgm") {
  std::size_t pos = 0;
  const std::string magic = detail::pgm_token(data, pos, name);
  if (magic != "P5" && magic != "P2") throw ParseError(name + ": not a P2/P5 PGM");
  const long w = detail::pgm_number(detail::pgm_token(data, pos, name), name);
  const long h = detail::pgm_number(detail::pgm_token(data, pos, name), name);
  const long maxval = detail::pgm_number(detail::pgm_token(data, pos, name), name);
  if (w < 1 || h < 1) throw ParseError(name + ": empty image");
  if (maxval < 1 || maxval > 65535) throw ParseError(name + ": maxval out of range");
  Matrix img(h, w);
  if (magic == "P2") {
    for (long r = 0; r < h; ++r)
      for (long c = 0; c < w; ++c) {
        const long v = detail::pgm_number(detail::pgm_token(data, pos, name), name);
        if (v > maxval) throw ParseError(name + ": pixel exceeds maxval");
        img(r, c) = static_cast<double>(v);
      }
    return img;
  }
  // Exactly one whitespace byte separates the header from the raster.
  if (pos >= data.size()) throw ParseError(name + ": missing raster");
  ++pos;
  const std::size_t bytes = maxval < 256 ? 1 : 2;
  if (data.size() - pos < static_cast<std::size_t>(w * h) * bytes)
    throw ParseError(name + ": truncated raster");
  for (long r = 0; r < h; ++r)
    for (long c = 0; c < w; ++c) {
      long v = static_cast<unsigned char>(data[pos++]);
      if (bytes == 2) v = (v << 8) | static_cast<unsigned char>(data[pos++]);
      if (v > maxval) throw ParseError(name + ": pixel exceeds maxval");
      img(r, c) = static_cast<double>(v);
    }
  return img;
}

inline Matrix load_pgm(const std::filesystem::path& path) {
  return parse_pgm(detail::read_file(path), path.string());
}

struct LabeledImages {
  std::vector<Matrix> images;
  std::vector<int> labels;               // index into class_names
  std::vector<std::string> class_names;
  std::vector<std::string> image_names;  // "<class>/<file stem>"
};

// Reads root/class_<label>/<image>.pgm. Classes and files are taken in
// lexicographic order.
inline LabeledImages load_image_directory(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw ParseError(root.string() + " is not a directory");
  std::map<std::string, fs::path> classes;
  for (const auto& e : fs::directory_iterator(root)) {
    const std::string n = e.path().filename().string();
    if (e.is_directory() && n.rfind("class_", 0) == 0 && n.size() > 6)
      classes.emplace(n.substr(6), e.path());
  }
  if (classes.empty()) throw ParseError(root.string() + ": no class_<label> directories");
  LabeledImages out;
  for (const auto& [label, dir] : classes) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ParseError(dir.string() + ": no .pgm images");
    const int id = static_cast<int>(out.class_names.size());
    out.class_names.push_back(label);
    for (const auto& f : files) {
      out.images.push_back(load_pgm(f));
      out.labels.push_back(id);
      out.image_names.push_back(label + "/" + f.stem().string());
    }
  }
  return out;
}

// Every *.pgm directly inside dir, in lexicographic order, with file stems as
// names.
inline std::pair<std::vector<Matrix>, std::vector<std::string>> load_pgm_directory(
    const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ParseError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ParseError(dir.string() + ": no .pgm images");
  std::pair<std::vector<Matrix>, std::vector<std::string>> out;
  for (const auto& f : files) {
    out.first.push_back(load_pgm(f));
    out.second.push_back(f.stem().string());
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV matrix format: the first row holds an empty corner cell then the y
// labels; each further row holds an x label then nonnegative values.

struct LabeledMatrix {
  Matrix values;
  std::vector<std::string> x_labels;
  std::vector<std::string> y_labels;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline void check_csv_label(const std::string& l) {
  if (l.empty() || l.find_first_of(",\n\r\"") != std::string::npos ||
      l.front() == ' ' || l.back() == ' ' || l.front() == '\t' || l.back() == '\t')
    throw InvalidArgument("label '" + l + "' cannot be written as a CSV cell");
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline LabeledMatrix parse_csv_matrix(const std::string& text, const std::string& name = "csv") {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    rows.push_back(detail::split_csv_line(line));
  }
  if (rows.empty()) throw ParseError(name + ": empty file");
  const auto& header = rows.front();
  if (header.size() < 2 || !header.front().empty())
    throw ParseError(name + ": malformed header (expected an empty corner cell then y labels)");
  LabeledMatrix m;
  m.y_labels.assign(header.begin() + 1, header.end());
  for (const auto& l : m.y_labels)
    if (l.empty()) throw ParseError(name + ": empty y label");
  const auto ny = static_cast<Eigen::Index>(m.y_labels.size());
  m.values.resize(static_cast<Eigen::Index>(rows.size() - 1), ny);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size())
      throw ParseError(name + ": row " + std::to_string(r + 1) + " has " +
                       std::to_string(row.size()) + " cells, expected " +
                       std::to_string(header.size()));
    if (row.front().empty()) throw ParseError(name + ": empty x label on row " + std::to_string(r + 1));
    m.x_labels.push_back(row.front());
    for (Eigen::Index y = 0; y < ny; ++y) {
      const std::string& cell = row[static_cast<std::size_t>(y + 1)];
      double v = 0.0;
      std::size_t used = 0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell.size() || !std::isfinite(v))
        throw ParseError(name + ": bad number '" + cell + "' on row " + std::to_string(r + 1));
      if (v < 0.0)
        throw ParseError(name + ": negative entry on row " + std::to_string(r + 1));
      m.values(static_cast<Eigen::Index>(r - 1), y) = v;
    }
  }
  if (m.values.rows() < 1) throw ParseError(name + ": no data rows");
  return m;
}

inline LabeledMatrix load_csv_matrix(const std::filesystem::path& path) {
  return parse_csv_matrix(detail::read_file(path), path.string());
}

// Tables already normalized (within 1e-12) are taken as-is, so a saved table
// reloads bit-identically; anything else is treated as counts.
inline JointTable to_joint_table(const LabeledMatrix& m) {
  if (std::abs(m.values.sum() - 1.0) <= kNormalizationTolerance)
    return JointTable::from_probabilities(m.values, m.x_labels, m.y_labels);
  return JointTable::from_counts(m.values, m.x_labels, m.y_labels);
}

inline JointTable load_csv(const std::filesystem::path& path) {
  return to_joint_table(load_csv_matrix(path));
}

inline std::string format_csv(const Matrix& values, const std::vector<std::string>& x_labels,
                              const std::vector<std::string>& y_labels) {
  if (static_cast<Eigen::Index>(x_labels.size()) != values.rows() ||
      static_cast<Eigen::Index>(y_labels.size()) != values.cols())
    throw InvalidArgument("format_csv: label counts do not match the matrix");
  std::string out;
  for (const auto& l : y_labels) {
    detail::check_csv_label(l);
    out += "," + l;
  }
  out += "\n";
  for (Eigen::Index x = 0; x < values.rows(); ++x) {
    detail::check_csv_label(x_labels[static_cast<std::size_t>(x)]);
    out += x_labels[static_cast<std::size_t>(x)];
    for (Eigen::Index y = 0; y < values.cols(); ++y) out += "," + detail::format_double(values(x, y));
    out += "\n";
  }
  return out;
}

inline std::string format_csv(const JointTable& t) {
  return format_csv(t.probs(), t.x_labels(), t.y_labels());
}

// Writes to a sibling temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline void save_csv(const std::filesystem::path& path, const JointTable& t) {
  write_file_atomic(path, format_csv(t));
}

inline void save_csv(const std::filesystem::path& path, const LabeledMatrix& m) {
  write_file_atomic(path, format_csv(m.values, m.x_labels, m.y_labels));
}

}  // namespace sdris
