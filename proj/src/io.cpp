#include "egoe/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "egoe/errors.hpp"

namespace egoe {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Token scanner over a text file: strips '#' comments, tracks line numbers for
// error messages.
class TokenReader {
 public:
  // `lines_consumed` counts header lines already read off the stream, so
  // reported line numbers match the file as the user sees it.
  TokenReader(std::ifstream& in, std::string path, int lines_consumed = 0)
      : in_(in), path_(std::move(path)), line_no_(lines_consumed) {}

  bool next(std::string& token) {
    while (true) {
      if (line_stream_ >> token) return true;
      std::string line;
      if (!std::getline(in_, line)) return false;
      ++line_no_;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line_stream_ = std::istringstream(line);
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw IoError(path_ + ":" + std::to_string(line_no_) + ": " + what);
  }

  int line_no() const { return line_no_; }

  double next_double(const std::string& what) {
    std::string token;
    if (!next(token)) fail("unexpected end of file, " + what);
    try {
      std::size_t pos = 0;
      const double v = std::stod(token, &pos);
      if (pos != token.size()) throw std::invalid_argument(token);
      if (!std::isfinite(v)) fail("non-finite value '" + token + "'");
      return v;
    } catch (const IoError&) {
      throw;
    } catch (const std::exception&) {
      fail("expected a number, got '" + token + "'");
    }
  }

 private:
  std::ifstream& in_;
  std::string path_;
  std::istringstream line_stream_;
  int line_no_ = 0;
};

void expect_magic(std::ifstream& in, const std::string& path, const std::string& magic) {
  std::string first;
  if (!std::getline(in, first)) throw IoError(path + ":1: empty file, expected '" + magic + "'");
  if (!first.empty() && first.back() == '\r') first.pop_back();
  if (first != magic) {
    throw IoError(path + ":1: malformed header '" + first + "', expected '" + magic + "'");
  }
}

}  // namespace

std::string OutputMeta::comment_line() const {
  return "# config_hash=" + config_hash + " master_seed=" + std::to_string(master_seed);
}

void save_hamiltonian(const std::string& path, const Eigen::MatrixXd& h,
                      const std::vector<std::string>& comments) {
  if (h.rows() != h.cols() || h.rows() < 1) {
    throw ConfigError("save_hamiltonian: matrix must be square and non-empty");
  }
  auto out = open_out(path);
  out << "EGOE-H v1\n";
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "dim " << h.rows() << '\n';
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      out << format_g17(h(i, j)) << (j == i ? '\n' : ' ');
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

Eigen::MatrixXd load_external_hamiltonian(const std::string& path) {
  auto in = open_in(path);
  expect_magic(in, path, "EGOE-H v1");

  TokenReader reader(in, path, /*lines_consumed=*/1);
  std::string token;
  if (!reader.next(token)) throw IoError(path + ": unexpected end of file, expected 'dim <d>'");
  if (token != "dim") reader.fail("expected 'dim', got '" + token + "'");
  if (!reader.next(token)) reader.fail("expected a dimension after 'dim'");
  long long dim = 0;
  try {
    dim = std::stoll(token);
  } catch (const std::exception&) {
    reader.fail("dimension is not an integer: '" + token + "'");
  }
  if (dim < 1 || dim > 100000) reader.fail("dimension out of range: " + token);

  const long long expected = dim * (dim + 1) / 2;
  Eigen::MatrixXd h(dim, dim);
  long long count = 0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = reader.next_double("expected " + std::to_string(expected) +
                                          " values, got " + std::to_string(count));
      h(i, j) = v;
      h(j, i) = v;
      ++count;
    }
  }
  if (reader.next(token)) {
    reader.fail("trailing data '" + token + "' after " + std::to_string(expected) + " values");
  }
  return h;
}

StrengthHistogram ExternalStrength::to_histogram() const {
  const auto n = centers.size();
  const double width = centers(1) - centers(0);
  StrengthHistogram hist;
  hist.bin_edges.resize(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) hist.bin_edges(i) = centers(0) + (i - 0.5) * width;
  // rescale to the histogram convention: bin masses sum to one
  const double mass = density.sum() * width;
  hist.density = density / mass;
  hist.density_err = Eigen::VectorXd::Zero(n);
  hist.members = 1;
  hist.in_range_fraction = 1.0;

  double mean = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) mean += centers(i) * hist.density(i) * width;
  double var = 0.0, m4 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = centers(i) - mean;
    var += d * d * hist.density(i) * width;
    m4 += d * d * d * d * hist.density(i) * width;
  }
  hist.centroid = mean;
  hist.variance = var;
  hist.excess_kurtosis = var > 0.0 ? m4 / (var * var) - 3.0 : 0.0;
  return hist;
}

ExternalStrength load_external_strength(const std::string& path) {
  auto in = open_in(path);
  expect_magic(in, path, "EGOE-F v1");

  TokenReader reader(in, path, /*lines_consumed=*/1);
  std::vector<double> centers, density;
  std::string token;
  while (true) {
    if (!reader.next(token)) break;
    double c = 0.0;
    try {
      std::size_t pos = 0;
      c = std::stod(token, &pos);
      if (pos != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      reader.fail("expected a number, got '" + token + "'");
    }
    if (!std::isfinite(c)) reader.fail("non-finite value '" + token + "'");
    const double d = reader.next_double("each row needs 'center density'");
    centers.push_back(c);
    density.push_back(d);
  }
  if (centers.size() < 20) {
    throw IoError(path + ": needs >= 20 rows, got " + std::to_string(centers.size()));
  }
  const double width = centers[1] - centers[0];
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (i > 0 && !(centers[i] > centers[i - 1])) {
      throw IoError(path + ": centers must be strictly ascending (row " +
                    std::to_string(i + 1) + ")");
    }
    if (i > 0 && std::abs((centers[i] - centers[i - 1]) - width) > 1e-6 * std::abs(width)) {
      throw IoError(path + ": centers must form a uniform grid (row " +
                    std::to_string(i + 1) + ")");
    }
    if (density[i] < 0.0) {
      throw IoError(path + ": density must be >= 0 (row " + std::to_string(i + 1) + ")");
    }
  }

  ExternalStrength ext;
  ext.centers = Eigen::Map<const Eigen::VectorXd>(centers.data(),
                                                  static_cast<Eigen::Index>(centers.size()));
  Eigen::VectorXd dens = Eigen::Map<const Eigen::VectorXd>(
      density.data(), static_cast<Eigen::Index>(density.size()));
  // trapezoid normalization; the factor is recorded, not discarded
  double integral = 0.0;
  for (Eigen::Index i = 0; i + 1 < ext.centers.size(); ++i) {
    integral += 0.5 * (dens(i) + dens(i + 1)) * (ext.centers(i + 1) - ext.centers(i));
  }
  if (!(integral > 0.0)) throw IoError(path + ": density integrates to zero");
  ext.norm_factor = integral;
  ext.density = dens / integral;
  return ext;
}

void save_strength(const std::string& path, const Eigen::VectorXd& centers,
                   const Eigen::VectorXd& density, const std::vector<std::string>& comments) {
  if (centers.size() != density.size() || centers.size() < 2) {
    throw ConfigError("save_strength: centers/density must align, size >= 2");
  }
  auto out = open_out(path);
  out << "EGOE-F v1\n";
  for (const auto& c : comments) out << "# " << c << '\n';
  for (Eigen::Index i = 0; i < centers.size(); ++i) {
    out << format_g17(centers(i)) << ' ' << format_g17(density(i)) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::string format_g12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_histogram_csv(const std::string& path, const StrengthHistogram& hist,
                         const OutputMeta& meta) {
  auto out = open_out(path);
  out << meta.comment_line() << '\n';
  out << "e_hat,density,stderr\n";
  const auto centers = hist.bin_centers();
  for (Eigen::Index i = 0; i < centers.size(); ++i) {
    out << format_g12(centers(i)) << ',' << format_g12(hist.density(i)) << ','
        << format_g12(hist.density_err(i)) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_curves_csv(const std::string& path, std::span<const ObservableCurve> curves,
                      const OutputMeta& meta) {
  auto out = open_out(path);
  out << meta.comment_line() << '\n';
  out << "e_hat,value,stderr,basis\n";
  for (const auto& curve : curves) {
    for (Eigen::Index i = 0; i < curve.e_hat.size(); ++i) {
      out << format_g12(curve.e_hat(i)) << ',' << format_g12(curve.value(i)) << ','
          << format_g12(curve.std_error(i)) << ',' << curve.basis_tag << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_duality_csv(const std::string& path, const DualityScan& scan,
                       const OutputMeta& meta) {
  auto out = open_out(path);
  out << meta.comment_line() << '\n';
  out << "lambda,xi2_weak,xi2_strong,s_weak,s_strong,evar_weak,evar_strong,"
         "xi2_weak_err,xi2_strong_err,s_weak_err,s_strong_err,evar_weak_err,evar_strong_err\n";
  for (const auto& p : scan.points) {
    out << format_g12(p.lambda) << ',' << format_g12(p.xi2_weak) << ','
        << format_g12(p.xi2_strong) << ',' << format_g12(p.s_weak) << ','
        << format_g12(p.s_strong) << ',' << format_g12(p.evar_weak) << ','
        << format_g12(p.evar_strong) << ',' << format_g12(p.xi2_weak_err) << ','
        << format_g12(p.xi2_strong_err) << ',' << format_g12(p.s_weak_err) << ','
        << format_g12(p.s_strong_err) << ',' << format_g12(p.evar_weak_err) << ','
        << format_g12(p.evar_strong_err) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_scaling_csv(const std::string& path, std::span<const ScalingPoint> points,
                       const OutputMeta& meta) {
  auto out = open_out(path);
  out << meta.comment_line() << '\n';
  out << "m,lambda_d,err\n";
  for (const auto& p : points) {
    out << p.m << ',' << format_g12(p.lambda_d) << ',' << format_g12(p.err) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_text_file(const std::string& path, const std::string& content) {
  auto out = open_out(path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace egoe
