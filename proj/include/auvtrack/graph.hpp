#pragma once

/**
 * @file graph.hpp
 * @brief SNR-weighted communication graph and its algebraic connectivity.
 */

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "auvtrack/channel.hpp"

namespace auvtrack {

/// Threshold below which the Fiedler value is treated as zero.
inline constexpr double kFiedlerZeroTol = 1e-9;

/// Undirected graph whose edge weights are SNR gains in dB.
struct CommGraph {
  Eigen::MatrixXd gains;  ///< symmetric, zero diagonal, 0 where no link
  double rho_max = 1.0;   ///< normalization constant

  std::size_t size() const { return static_cast<std::size_t>(gains.rows()); }
};

/// rho if rho >= DT (inclusive), else 0.
double link_gain(double rho_db, double detection_threshold);

/// Builds the graph for nodes at the given positions with one modem model.
CommGraph graph_from_positions(std::span<const Vec2> positions,
                               const ModemConfig& modem);

/// Normalized Laplacian: off-diagonal -g_ij / rho_max, rows sum to zero.
Eigen::MatrixXd laplacian(const CommGraph& g);

/// Second-smallest Laplacian eigenvalue. Throws on asymmetric input or
/// non-zero row sums.
double fiedler(const Eigen::MatrixXd& L);

/// All j != i with a positive link gain.
std::vector<std::size_t> neighbors(const CommGraph& g, std::size_t i);

/// Number of connected components by breadth-first search.
std::size_t connected_components(const CommGraph& g);

}  // namespace auvtrack
