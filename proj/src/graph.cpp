#include "auvtrack/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace auvtrack {

double link_gain(double rho_db, double detection_threshold) {
  return rho_db >= detection_threshold ? rho_db : 0.0;
}

CommGraph graph_from_positions(std::span<const Vec2> positions,
                               const ModemConfig& modem) {
  const auto n = static_cast<Eigen::Index>(positions.size());
  CommGraph g;
  g.rho_max = modem.ideal_snr();
  g.gains = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (positions[i] - positions[j]).norm();
      // Co-located nodes: treat as an ideal link.
      const double rho = d > 0.0 ? snr(modem, d) : g.rho_max;
      g.gains(i, j) = g.gains(j, i) = link_gain(rho, modem.detection_threshold);
    }
  }
  return g;
}

Eigen::MatrixXd laplacian(const CommGraph& g) {
  const Eigen::Index n = g.gains.rows();
  Eigen::MatrixXd L = -g.gains / g.rho_max;
  L.diagonal().setZero();
  for (Eigen::Index i = 0; i < n; ++i) L(i, i) = -L.row(i).sum();
  return L;
}

double fiedler(const Eigen::MatrixXd& L) {
  const Eigen::Index n = L.rows();
  if (L.cols() != n) throw std::invalid_argument("fiedler: non-square input");
  if (n < 2) return 0.0;
  const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
  if ((L - L.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw std::invalid_argument("fiedler: Laplacian is not symmetric");
  }
  if (L.rowwise().sum().cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw std::invalid_argument("fiedler: rows do not sum to zero");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L,
                                                     Eigen::EigenvaluesOnly);
  const double s2 = eig.eigenvalues()(1);
  return s2 > kFiedlerZeroTol ? s2 : 0.0;
}

std::vector<std::size_t> neighbors(const CommGraph& g, std::size_t i) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (j != i && g.gains(static_cast<Eigen::Index>(i),
                          static_cast<Eigen::Index>(j)) > 0.0) {
      out.push_back(j);
    }
  }
  return out;
}

std::size_t connected_components(const CommGraph& g) {
  const std::size_t n = g.size();
  std::vector<bool> seen(n, false);
  std::size_t components = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++components;
    std::queue<std::size_t> frontier;
    frontier.push(s);
    seen[s] = true;
    while (!frontier.empty()) {
      const std::size_t u = frontier.front();
      frontier.pop();
      for (std::size_t v : neighbors(g, u)) {
        if (!seen[v]) {
          seen[v] = true;
          frontier.push(v);
        }
      }
    }
  }
  return components;
}

}  // namespace auvtrack
