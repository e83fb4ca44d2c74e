// Copyright 2026 The zodp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zodp/problems.h"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace zodp {
namespace {

using nlohmann::json;

constexpr double kLabelFlipRate = 0.1;

double stable_logistic_loss(double margin) {
  // log(1 + exp(-m)) without overflow for large |m|.
  if (margin > 0) return std::log1p(std::exp(-margin));
  return -margin + std::log1p(std::exp(margin));
}

double sigmoid_neg(double margin) {
  // sigma(-m) = 1 / (1 + e^m); saturates cleanly for large |m|.
  return 1.0 / (1.0 + std::exp(margin));
}

// Thin QR of a Gaussian matrix with the sign convention diag(R) >= 0, so
// the basis is a deterministic function of the Gaussian draw.
Matrix orthonormal_basis(int d, int k, RngStream rng) {
  Matrix g(d, k);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < d; ++i) g(i, j) = rng.next_gaussian();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, k);
  Matrix r = qr.matrixQR().topLeftCorner(k, k);
  for (int j = 0; j < k; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, const char* what) {
  if (!rows.is_array() || rows.empty()) {
    throw std::invalid_argument(std::string("problem JSON: ") + what +
                                " must be a nonempty array of rows");
  }
  const auto r = rows.size();
  const auto c = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < r; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || row.size() != c) {
      throw std::invalid_argument(std::string("problem JSON: ragged rows in ") +
                                  what);
    }
    for (std::size_t j = 0; j < c; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          row[j].get<double>();
    }
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_from_json(const json& a, const char* what) {
  if (!a.is_array()) {
    throw std::invalid_argument(std::string("problem JSON: ") + what +
                                " must be an array");
  }
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  }
  return v;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

std::string_view family_name(ProblemFamily family) {
  switch (family) {
    case ProblemFamily::kLogistic: return "logistic";
    case ProblemFamily::kQuadratic: return "quadratic";
    case ProblemFamily::kQuartic: return "quartic";
  }
  return "unknown";
}

std::optional<ProblemFamily> family_from_name(std::string_view name) {
  if (name == "logistic") return ProblemFamily::kLogistic;
  if (name == "quadratic") return ProblemFamily::kQuadratic;
  if (name == "quartic") return ProblemFamily::kQuartic;
  return std::nullopt;
}

Problem Problem::low_rank_logistic(int d, int r, int n, std::uint64_t seed,
                                   double feature_scale, double start_radius) {
  if (r < 1 || r > d) {
    throw std::invalid_argument("low_rank_logistic: need 1 <= r <= d");
  }
  if (n < 1) throw std::invalid_argument("low_rank_logistic: need n >= 1");
  if (!(feature_scale > 0) || !std::isfinite(feature_scale)) {
    throw std::invalid_argument("low_rank_logistic: feature_scale must be positive");
  }
  if (!(start_radius >= 0) || !std::isfinite(start_radius)) {
    throw std::invalid_argument("low_rank_logistic: start_radius must be >= 0");
  }

  RngStream root = make_rng(seed);

  // Planted label direction inside the subspace.
  RngStream plant = root.child("plant");
  Vector theta(r);
  for (int j = 0; j < r; ++j) theta[j] = plant.next_gaussian();

  // Per-sample substreams make the first n samples independent of the
  // total count, so a larger dataset extends a smaller one.
  Matrix coords(n, r);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    RngStream s = root.child("sample:" + std::to_string(i));
    for (int j = 0; j < r; ++j) coords(i, j) = s.next_gaussian();
    int y = coords.row(i).dot(theta) >= 0 ? 1 : -1;
    if (s.next_double() < kLabelFlipRate) y = -y;
    labels[i] = y;
  }
  const double max_norm = coords.rowwise().norm().maxCoeff();
  if (max_norm == 0) {
    throw std::runtime_error("low_rank_logistic: degenerate sample draw");
  }
  coords *= feature_scale / max_norm;

  // Start point at the requested radius inside the subspace; its
  // within-subspace coordinates do not depend on d.
  Vector s0 = Vector::Zero(r);
  if (start_radius > 0) {
    RngStream start = root.child("start");
    for (int j = 0; j < r; ++j) s0[j] = start.next_gaussian();
    const double norm = s0.norm();
    if (norm == 0) throw std::runtime_error("low_rank_logistic: degenerate start");
    s0 *= start_radius / norm;
  }

  Problem p;
  p.family_ = ProblemFamily::kLogistic;
  p.d_ = d;
  p.n_ = n;
  p.seed_ = seed;
  p.feature_scale_ = feature_scale;
  p.start_radius_ = start_radius;
  p.basis_ = orthonormal_basis(d, r, root.child("basis"));
  p.coords_ = std::move(coords);
  p.labels_ = std::move(labels);
  p.x0_ = p.basis_ * s0;
  p.finalize_logistic();
  return p;
}

Problem Problem::logistic_from_data(Matrix features, std::vector<int> labels,
                                    Vector start) {
  const int n = static_cast<int>(features.rows());
  const int d = static_cast<int>(features.cols());
  if (n < 1 || d < 1) {
    throw std::invalid_argument("logistic_from_data: empty feature matrix");
  }
  if (static_cast<int>(labels.size()) != n) {
    throw std::invalid_argument("logistic_from_data: label count mismatch");
  }
  for (int y : labels) {
    if (y != 1 && y != -1) {
      throw std::invalid_argument("logistic_from_data: labels must be +/-1");
    }
  }
  if (start.size() == 0) start = Vector::Zero(d);
  if (static_cast<int>(start.size()) != d) {
    throw std::invalid_argument("logistic_from_data: start dimension mismatch");
  }

  Problem p;
  p.family_ = ProblemFamily::kLogistic;
  p.d_ = d;
  p.n_ = n;
  p.basis_ = Matrix::Identity(d, d);
  p.coords_ = std::move(features);
  p.labels_ = std::move(labels);
  p.x0_ = std::move(start);
  p.feature_scale_ = p.coords_.rowwise().norm().maxCoeff();
  p.start_radius_ = p.x0_.norm();
  p.finalize_logistic();
  return p;
}

Problem Problem::spectrum_quadratic(int d, std::vector<double> spectrum,
                                    int n, std::uint64_t seed,
                                    double start_radius,
                                    double region_radius) {
  const int k = static_cast<int>(spectrum.size());
  if (k < 1 || k > d) {
    throw std::invalid_argument("spectrum_quadratic: need 1 <= |spectrum| <= d");
  }
  if (n < 1) throw std::invalid_argument("spectrum_quadratic: need n >= 1");

  RngStream root = make_rng(seed);

  Matrix coords(n, k);
  for (int i = 0; i < n; ++i) {
    RngStream s = root.child("sample:" + std::to_string(i));
    for (int j = 0; j < k; ++j) coords(i, j) = s.next_gaussian();
  }

  Vector x0 = Vector::Zero(d);
  if (start_radius > 0) {
    RngStream start = root.child("start");
    for (int i = 0; i < d; ++i) x0[i] = start.next_gaussian();
    const double norm = x0.norm();
    if (norm == 0) throw std::runtime_error("spectrum_quadratic: degenerate start");
    x0 *= start_radius / norm;
  }

  Problem p;
  p.family_ = ProblemFamily::kQuadratic;
  p.d_ = d;
  p.n_ = n;
  p.seed_ = seed;
  p.start_radius_ = start_radius;
  p.region_radius_ = region_radius;
  p.basis_ = orthonormal_basis(d, k, root.child("basis"));
  p.spectrum_ = std::move(spectrum);
  // Samples live in the top-k eigenspace, xi_i = Q w_i, so the projected
  // coordinates are the draws themselves and ||xi_i|| = ||w_i||.
  p.sample_norms_.resize(n);
  for (int i = 0; i < n; ++i) p.sample_norms_[i] = coords.row(i).norm();
  p.coords_ = std::move(coords);
  p.x0_ = std::move(x0);
  p.finalize_quadratic();
  return p;
}

Problem Problem::quadratic_from_data(Matrix basis,
                                     std::vector<double> spectrum,
                                     Matrix samples, Vector start,
                                     double region_radius) {
  const int d = static_cast<int>(basis.rows());
  const int k = static_cast<int>(basis.cols());
  if (d < 1 || k < 1 || k > d) {
    throw std::invalid_argument("quadratic_from_data: bad basis shape");
  }
  if (static_cast<int>(spectrum.size()) != k) {
    throw std::invalid_argument("quadratic_from_data: spectrum/basis mismatch");
  }
  if ((basis.transpose() * basis - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() >
      1e-9) {
    throw std::invalid_argument("quadratic_from_data: basis not orthonormal");
  }
  const int n = static_cast<int>(samples.rows());
  if (n < 1 || static_cast<int>(samples.cols()) != d) {
    throw std::invalid_argument("quadratic_from_data: bad sample shape");
  }
  if (start.size() == 0) start = Vector::Zero(d);
  if (static_cast<int>(start.size()) != d) {
    throw std::invalid_argument("quadratic_from_data: start dimension mismatch");
  }

  Problem p;
  p.family_ = ProblemFamily::kQuadratic;
  p.d_ = d;
  p.n_ = n;
  p.start_radius_ = start.norm();
  p.region_radius_ = region_radius;
  p.coords_ = samples * basis;  // rows are Q^T xi_i
  p.basis_ = std::move(basis);
  p.spectrum_ = std::move(spectrum);
  p.sample_norms_.resize(n);
  for (int i = 0; i < n; ++i) p.sample_norms_[i] = samples.row(i).norm();
  p.x0_ = std::move(start);
  p.finalize_quadratic();
  return p;
}

Problem Problem::one_dim_quartic(double start, double region_radius) {
  if (!(region_radius > 0) || !std::isfinite(region_radius)) {
    throw std::invalid_argument("one_dim_quartic: region_radius must be positive");
  }
  Problem p;
  p.family_ = ProblemFamily::kQuartic;
  p.d_ = 1;
  p.n_ = 1;
  p.region_radius_ = region_radius;
  p.x0_ = Vector::Constant(1, start);
  p.start_radius_ = std::abs(start);
  const double r2 = region_radius * region_radius;
  p.info_.smoothness = 12.0 * r2;
  p.info_.lipschitz = 4.0 * r2 * region_radius;
  p.info_.hessian_trace = p.info_.smoothness;
  p.info_.hessian_norm = p.info_.smoothness;
  p.info_.effective_rank = 1.0;
  p.info_.min_value = 0.0;
  return p;
}

void Problem::finalize_logistic() {
  label_signs_.resize(n_);
  for (int i = 0; i < n_; ++i) label_signs_[i] = static_cast<double>(labels_[i]);

  const Vector row_norms = coords_.rowwise().norm();
  const double max_norm = row_norms.maxCoeff();
  info_.lipschitz = max_norm;
  info_.smoothness = max_norm * max_norm / 4.0;

  // Average Hessian bound H = (1/4n) sum_i a_i a_i^T shares its nonzero
  // spectrum with (1/4n) W^T W in subspace coordinates.
  const int k = static_cast<int>(coords_.cols());
  Matrix gram = (coords_.transpose() * coords_) / (4.0 * n_);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram,
                                            Eigen::EigenvaluesOnly);
  info_.hessian_norm = eig.eigenvalues()[k - 1];
  info_.hessian_trace = gram.trace();
  if (!(info_.hessian_norm > 0)) {
    throw std::invalid_argument("logistic problem: zero feature matrix");
  }
  info_.effective_rank = info_.hessian_trace / info_.hessian_norm;
  info_.min_value = std::nullopt;
  region_radius_ = std::numeric_limits<double>::infinity();
}

void Problem::finalize_quadratic() {
  const int k = static_cast<int>(spectrum_.size());
  for (int j = 0; j < k; ++j) {
    if (!(spectrum_[j] >= 0) || !std::isfinite(spectrum_[j])) {
      throw std::invalid_argument("quadratic problem: eigenvalues must be >= 0");
    }
    if (j > 0 && spectrum_[j] > spectrum_[j - 1]) {
      throw std::invalid_argument("quadratic problem: spectrum must be nonincreasing");
    }
  }
  if (!(spectrum_[0] > 0)) {
    throw std::invalid_argument("quadratic problem: top eigenvalue must be positive");
  }

  coords_mean_ = coords_.colwise().mean();

  double max_sample_norm = 0;
  for (double v : sample_norms_) max_sample_norm = std::max(max_sample_norm, v);
  if (region_radius_ == 0) {
    region_radius_ = 2.0 * (x0_.norm() + max_sample_norm);
  }
  if (!(region_radius_ > 0) || !std::isfinite(region_radius_)) {
    throw std::invalid_argument("quadratic problem: bad region radius");
  }

  double trace = 0;
  for (double v : spectrum_) trace += v;
  info_.smoothness = spectrum_[0];
  info_.hessian_norm = spectrum_[0];
  info_.hessian_trace = trace;
  info_.effective_rank = trace / spectrum_[0];
  // Quadratics are not globally Lipschitz; L is the gradient bound over
  // the configured iterate region.
  info_.lipschitz = spectrum_[0] * region_radius_;

  // F_S minimum: attained where the projected iterate equals the sample
  // mean, leaving only per-sample dispersion.
  double fstar = 0;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < k; ++j) {
      const double delta = coords_(i, j) - coords_mean_[j];
      fstar += spectrum_[j] * delta * delta;
    }
  }
  info_.min_value = fstar / (2.0 * n_);
}

double Problem::loss(const Vector& x, int i) const {
  if (i < 0 || i >= n_) throw std::out_of_range("Problem::loss: bad sample index");
  if (static_cast<int>(x.size()) != d_) {
    throw std::invalid_argument("Problem::loss: dimension mismatch");
  }
  count(1);
  switch (family_) {
    case ProblemFamily::kLogistic: {
      const Vector s = basis_.transpose() * x;
      return stable_logistic_loss(label_signs_[i] * coords_.row(i).dot(s));
    }
    case ProblemFamily::kQuadratic: {
      const Vector y = basis_.transpose() * x;
      double acc = 0;
      for (int j = 0; j < static_cast<int>(spectrum_.size()); ++j) {
        const double delta = y[j] - coords_(i, j);
        acc += spectrum_[j] * delta * delta;
      }
      return 0.5 * acc;
    }
    case ProblemFamily::kQuartic: {
      const double sq = x[0] * x[0];
      return sq * sq;
    }
  }
  return 0;
}

void Problem::batch_loss(const Vector& x, std::vector<double>& out) const {
  if (static_cast<int>(x.size()) != d_) {
    throw std::invalid_argument("Problem::batch_loss: dimension mismatch");
  }
  count(n_);
  out.resize(n_);
  switch (family_) {
    case ProblemFamily::kLogistic: {
      const Vector s = basis_.transpose() * x;
      const Vector margins = label_signs_.cwiseProduct(coords_ * s);
      for (int i = 0; i < n_; ++i) out[i] = stable_logistic_loss(margins[i]);
      return;
    }
    case ProblemFamily::kQuadratic: {
      const Vector y = basis_.transpose() * x;
      const int k = static_cast<int>(spectrum_.size());
      for (int i = 0; i < n_; ++i) {
        double acc = 0;
        for (int j = 0; j < k; ++j) {
          const double delta = y[j] - coords_(i, j);
          acc += spectrum_[j] * delta * delta;
        }
        out[i] = 0.5 * acc;
      }
      return;
    }
    case ProblemFamily::kQuartic: {
      const double sq = x[0] * x[0];
      out[0] = sq * sq;
      return;
    }
  }
}

Vector Problem::gradient(const Vector& x, int i) const {
  if (i < 0 || i >= n_) {
    throw std::out_of_range("Problem::gradient: bad sample index");
  }
  switch (family_) {
    case ProblemFamily::kLogistic: {
      const Vector s = basis_.transpose() * x;
      const double margin = label_signs_[i] * coords_.row(i).dot(s);
      const double coeff = -sigmoid_neg(margin) * label_signs_[i];
      return basis_ * (coords_.row(i).transpose() * coeff);
    }
    case ProblemFamily::kQuadratic: {
      const Vector y = basis_.transpose() * x;
      const int k = static_cast<int>(spectrum_.size());
      Vector proj(k);
      for (int j = 0; j < k; ++j) {
        proj[j] = spectrum_[j] * (y[j] - coords_(i, j));
      }
      return basis_ * proj;
    }
    case ProblemFamily::kQuartic:
      return Vector::Constant(1, 4.0 * x[0] * x[0] * x[0]);
  }
  return Vector();
}

double Problem::average_loss(const Vector& x) const {
  std::vector<double> losses;
  batch_loss(x, losses);
  double acc = 0;
  for (double v : losses) acc += v;
  return acc / n_;
}

Vector Problem::average_gradient(const Vector& x) const {
  switch (family_) {
    case ProblemFamily::kLogistic: {
      const Vector s = basis_.transpose() * x;
      const Vector margins = label_signs_.cwiseProduct(coords_ * s);
      Vector coeffs(n_);
      for (int i = 0; i < n_; ++i) {
        coeffs[i] = -sigmoid_neg(margins[i]) * label_signs_[i] / n_;
      }
      return basis_ * (coords_.transpose() * coeffs);
    }
    case ProblemFamily::kQuadratic: {
      const Vector y = basis_.transpose() * x;
      const int k = static_cast<int>(spectrum_.size());
      Vector proj(k);
      for (int j = 0; j < k; ++j) {
        proj[j] = spectrum_[j] * (y[j] - coords_mean_[j]);
      }
      return basis_ * proj;
    }
    case ProblemFamily::kQuartic:
      return gradient(x, 0);
  }
  return Vector();
}

double Problem::avg_grad_norm_sq(const Vector& x) const {
  return average_gradient(x).squaredNorm();
}

std::string Problem::to_json() const {
  json doc;
  doc["schema_version"] = 1;
  doc["family"] = std::string(family_name(family_));
  doc["d"] = d_;
  doc["n"] = n_;
  doc["seed"] = seed_;
  doc["start_radius"] = start_radius_;
  doc["x0"] = vector_to_json(x0_);
  switch (family_) {
    case ProblemFamily::kLogistic:
      doc["r"] = static_cast<int>(coords_.cols());
      doc["feature_scale"] = feature_scale_;
      doc["basis"] = matrix_to_json(basis_);
      doc["coords"] = matrix_to_json(coords_);
      doc["labels"] = labels_;
      break;
    case ProblemFamily::kQuadratic:
      doc["k"] = static_cast<int>(spectrum_.size());
      doc["eigenvalues"] = spectrum_;
      doc["basis"] = matrix_to_json(basis_);
      doc["projections"] = matrix_to_json(coords_);
      doc["sample_norms"] = sample_norms_;
      doc["region_radius"] = region_radius_;
      break;
    case ProblemFamily::kQuartic:
      doc["region_radius"] = region_radius_;
      break;
  }
  return doc.dump();
}

Problem Problem::from_json(const std::string& text) {
  json doc = json::parse(text);
  if (!doc.is_object() || doc.value("schema_version", -1) != 1) {
    throw std::invalid_argument("problem JSON: unsupported schema_version");
  }
  const auto family = family_from_name(doc.at("family").get<std::string>());
  if (!family) throw std::invalid_argument("problem JSON: unknown family");

  Problem p;
  p.family_ = *family;
  p.d_ = doc.at("d").get<int>();
  p.n_ = doc.at("n").get<int>();
  p.seed_ = doc.at("seed").get<std::uint64_t>();
  p.start_radius_ = doc.at("start_radius").get<double>();
  p.x0_ = vector_from_json(doc.at("x0"), "x0");
  if (static_cast<int>(p.x0_.size()) != p.d_) {
    throw std::invalid_argument("problem JSON: x0 dimension mismatch");
  }

  switch (*family) {
    case ProblemFamily::kLogistic: {
      p.feature_scale_ = doc.at("feature_scale").get<double>();
      p.basis_ = matrix_from_json(doc.at("basis"), "basis");
      p.coords_ = matrix_from_json(doc.at("coords"), "coords");
      p.labels_ = doc.at("labels").get<std::vector<int>>();
      const int r = doc.at("r").get<int>();
      if (p.basis_.rows() != p.d_ || p.basis_.cols() != r ||
          p.coords_.rows() != p.n_ || p.coords_.cols() != r ||
          static_cast<int>(p.labels_.size()) != p.n_) {
        throw std::invalid_argument("problem JSON: inconsistent logistic shapes");
      }
      p.finalize_logistic();
      break;
    }
    case ProblemFamily::kQuadratic: {
      p.spectrum_ = doc.at("eigenvalues").get<std::vector<double>>();
      p.basis_ = matrix_from_json(doc.at("basis"), "basis");
      p.coords_ = matrix_from_json(doc.at("projections"), "projections");
      p.sample_norms_ = doc.at("sample_norms").get<std::vector<double>>();
      p.region_radius_ = doc.at("region_radius").get<double>();
      const int k = doc.at("k").get<int>();
      if (p.basis_.rows() != p.d_ || p.basis_.cols() != k ||
          p.coords_.rows() != p.n_ || p.coords_.cols() != k ||
          static_cast<int>(p.spectrum_.size()) != k ||
          static_cast<int>(p.sample_norms_.size()) != p.n_) {
        throw std::invalid_argument("problem JSON: inconsistent quadratic shapes");
      }
      p.finalize_quadratic();
      break;
    }
    case ProblemFamily::kQuartic: {
      if (p.d_ != 1 || p.n_ != 1) {
        throw std::invalid_argument("problem JSON: quartic must have d = n = 1");
      }
      return one_dim_quartic(p.x0_[0], doc.at("region_radius").get<double>());
    }
  }
  return p;
}

std::string Problem::fingerprint() const {
  const std::uint64_t h = fnv1a64(to_json());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

double hutchinson_hessian_trace(const Problem& p, int num_probes,
                                RngStream& rng) {
  if (p.family() != ProblemFamily::kQuadratic) {
    throw std::invalid_argument(
        "hutchinson_hessian_trace: analytic Hessian is only available for "
        "quadratic problems");
  }
  if (num_probes < 1) {
    throw std::invalid_argument(
        "hutchinson_hessian_trace: num_probes must be >= 1");
  }
  const Matrix& q = p.basis();
  const std::vector<double>& spectrum = p.spectrum();
  Vector v(p.dimension());
  double sum = 0;
  for (int k = 0; k < num_probes; ++k) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      v[i] = rng.next_below(2) == 0 ? -1.0 : 1.0;
    }
    const Vector w = q.transpose() * v;
    double quad = 0;
    for (std::size_t j = 0; j < spectrum.size(); ++j) {
      quad += spectrum[j] * w[static_cast<Eigen::Index>(j)] *
              w[static_cast<Eigen::Index>(j)];
    }
    sum += quad;
  }
  return sum / num_probes;
}

}  // namespace zodp
