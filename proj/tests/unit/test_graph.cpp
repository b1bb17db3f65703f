#include <gtest/gtest.h>

#include <random>

#include "auvtrack/graph.hpp"

using namespace auvtrack;

namespace {

CommGraph from_weights(const Eigen::MatrixXd& w, double rho_max = 1.0) {
  return {w, rho_max};
}

Eigen::VectorXd spectrum(const Eigen::MatrixXd& L) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(L).eigenvalues();
}

}  // namespace

TEST(Graph, LinkGainThresholdInclusive) {
  EXPECT_DOUBLE_EQ(link_gain(10.0, 10.0), 10.0);
  EXPECT_DOUBLE_EQ(link_gain(9.999, 10.0), 0.0);
  EXPECT_DOUBLE_EQ(link_gain(80.0, 10.0), 80.0);
}

TEST(Graph, CompleteTriangleSpectrum) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(3, 3, 146.0);
  w.diagonal().setZero();
  const Eigen::MatrixXd L = laplacian(from_weights(w, 146.0));
  const Eigen::VectorXd ev = spectrum(L);
  EXPECT_NEAR(ev(0), 0.0, 1e-12);
  EXPECT_NEAR(ev(1), 3.0, 1e-12);
  EXPECT_NEAR(ev(2), 3.0, 1e-12);
  EXPECT_NEAR(fiedler(L), 3.0, 1e-12);
}

TEST(Graph, PathSpectrum) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
  w(0, 1) = w(1, 0) = w(1, 2) = w(2, 1) = 1.0;
  const Eigen::VectorXd ev = spectrum(laplacian(from_weights(w)));
  EXPECT_NEAR(ev(1), 1.0, 1e-12);
  EXPECT_NEAR(ev(2), 3.0, 1e-12);
  EXPECT_EQ(neighbors(from_weights(w), 1), (std::vector<std::size_t>{0, 2}));
}

TEST(Graph, DisconnectedHasZeroFiedler) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
  w(0, 1) = w(1, 0) = 5.0;
  w(2, 3) = w(3, 2) = 5.0;
  const CommGraph g = from_weights(w, 10.0);
  EXPECT_EQ(connected_components(g), 2u);
  EXPECT_EQ(fiedler(laplacian(g)), 0.0);
}

TEST(Graph, FiedlerRejectsInvalidLaplacian) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(fiedler(L), std::invalid_argument);
  Eigen::MatrixXd A(2, 2);
  A << 1, -1, -0.5, 0.5;
  EXPECT_THROW(fiedler(A), std::invalid_argument);
}

TEST(Graph, FromPositionsUsesChannel) {
  ModemConfig m;
  std::vector<Vec2> pos{Vec2(0, 0), Vec2(100, 0), Vec2(1e9, 0)};
  const CommGraph g = graph_from_positions(pos, m);
  EXPECT_NEAR(g.gains(0, 1), snr(m, 100.0), 1e-12);
  EXPECT_EQ(g.gains(0, 2), 0.0);
  EXPECT_DOUBLE_EQ(g.rho_max, m.ideal_snr());
  EXPECT_EQ(connected_components(g), 2u);
}

// Fiedler value is positive exactly when BFS finds a single component, and
// rows of the Laplacian sum to zero.
TEST(GraphProperty, ConnectivityAgreesWithBfs) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> size(2, 8);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = size(rng);
    const double density = u(rng);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (u(rng) < density) w(i, j) = w(j, i) = 10.0 + 100.0 * u(rng);
    const CommGraph g = from_weights(w, 146.0);
    const Eigen::MatrixXd L = laplacian(g);
    EXPECT_LT(L.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(fiedler(L) > 0.0, connected_components(g) == 1);
  }
}

TEST(GraphProperty, FiedlerMonotoneInGains) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 4;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) w(i, j) = w(j, i) = 100.0 * u(rng);
    const double before = fiedler(laplacian(from_weights(w, 146.0)));
    const int i = 0, j = 1 + static_cast<int>(u(rng) * 3);
    w(i, j) = w(j, i) = w(i, j) + 20.0 * u(rng);
    EXPECT_GE(fiedler(laplacian(from_weights(w, 146.0))), before - 1e-12);
  }
}
