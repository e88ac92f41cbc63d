#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "hsi/error.hpp"
#include "hsi/features.hpp"

namespace hsi::features {

PcaModel pca_fit(const HyperCube& cube) {
  const std::size_t n = cube.pixels();
  const std::size_t b = cube.bands();
  if (n < 2) throw DataError("PCA needs at least 2 pixels");

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(b));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < b; ++k) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = cube.values()[i * b + k];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw DataError("covariance eigendecomposition failed");

  PcaModel model;
  model.mean.assign(mean.data(), mean.data() + b);
  // Eigen returns ascending eigenvalues.
  for (std::size_t j = 0; j < b; ++j) {
    const auto col = static_cast<Eigen::Index>(b - 1 - j);
    model.eigenvalues.push_back(std::max(0.0, solver.eigenvalues()(col)));
    std::vector<double> v(b);
    std::size_t big = 0;
    for (std::size_t k = 0; k < b; ++k) {
      v[k] = solver.eigenvectors()(static_cast<Eigen::Index>(k), col);
      if (std::abs(v[k]) > std::abs(v[big])) big = k;
    }
    if (v[big] < 0.0) {
      for (auto& e : v) e = -e;
    }
    model.components.push_back(std::move(v));
  }
  const double top = model.eigenvalues.front();
  model.rank = static_cast<std::size_t>(
      std::count_if(model.eigenvalues.begin(), model.eigenvalues.end(), [&](double e) { return top > 0.0 && e > 1e-10 * top; }));
  return model;
}

std::vector<Plane> pca_scores(const HyperCube& cube, const PcaModel& model, std::size_t m) {
  const std::size_t b = cube.bands();
  if (m == 0 || m > b) throw InvalidArgument("PCA component count must lie in 1.." + std::to_string(b));
  if (m > model.rank) {
    throw DataError("requested " + std::to_string(m) + " components but covariance has rank " +
                    std::to_string(model.rank));
  }
  std::vector<Plane> planes(m, Plane(cube.height(), cube.width()));
  const std::size_t n = cube.pixels();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t c = 0; c < m; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < b; ++k) s += (cube.values()[i * b + k] - model.mean[k]) * model.components[c][k];
      planes[c].data[i] = s;
    }
  }
  return planes;
}

HyperCube pca_project(const HyperCube& cube, std::size_t m) {
  const auto model = pca_fit(cube);
  const auto planes = pca_scores(cube, model, m);
  std::vector<std::vector<double>> data;
  data.reserve(planes.size());
  for (const auto& p : planes) data.push_back(p.data);
  return cube_from_planes(cube.height(), cube.width(), data);
}

}  // namespace hsi::features
