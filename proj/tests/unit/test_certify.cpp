#include <gtest/gtest.h>

#include <random>

#include "monopoa/certify.hpp"
#include "monopoa/lp.hpp"
#include "support.hpp"

using namespace monopoa;
namespace nn = monopoa::neural;
namespace mt = monopoa::testing;

namespace {

certify::CertifyConfig unit_box(std::size_t n, double delta = 0.0, double tau = 0.0) {
  certify::CertifyConfig cfg;
  cfg.lo.assign(n, 0.0);
  cfg.hi.assign(n, 1.0);
  cfg.signs.assign(n, 1);
  cfg.delta = delta;
  cfg.tau = tau;
  return cfg;
}

}  // namespace

TEST(Lp, SmallMaximisation) {
  // max x + y s.t. x + 2y <= 4, 3x + y <= 6 -> (1.6, 1.2), 2.8
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 3, 1;
  const auto r = lp::maximize(a, Eigen::Vector2d(4, 6), Eigen::Vector2d(1, 1));
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_NEAR(r.objective, 2.8, 1e-12);
  EXPECT_NEAR(r.x(0), 1.6, 1e-12);
  EXPECT_NEAR(r.x(1), 1.2, 1e-12);
}

TEST(Lp, InfeasibleAndUnbounded) {
  Eigen::MatrixXd a(1, 1);
  a << 1;
  EXPECT_EQ(lp::maximize(a, Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Ones(1)).status,
            lp::Status::Infeasible);
  a << -1;
  EXPECT_EQ(lp::maximize(a, Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Ones(1)).status,
            lp::Status::Unbounded);
}

TEST(Lp, NegativeRightHandSideNeedsPhaseOne) {
  // x >= 1 (as -x <= -1), x <= 3: max x = 3
  Eigen::MatrixXd a(2, 1);
  a << -1, 1;
  const auto r = lp::maximize(a, Eigen::Vector2d(-1, 3), Eigen::VectorXd::Ones(1));
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_NEAR(r.objective, 3.0, 1e-12);
}

TEST(RegionFeasible, MatchesGridOnRandomPatterns) {
  std::mt19937_64 rng(81);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::vector<double> lo{0, 0}, hi{1, 1}, margins(4, 0.0);
  for (int t = 0; t < 100; ++t) {
    Eigen::MatrixXd w(4, 2);
    Eigen::VectorXd b(4);
    for (int j = 0; j < 4; ++j) {
      w(j, 0) = g(rng);
      w(j, 1) = g(rng);
      b(j) = 0.5 * g(rng);
    }
    std::vector<int> pattern(4);
    for (auto& p : pattern) p = static_cast<int>(rng() % 2);
    const auto res = certify::region_feasible(pattern, w, b, lo, hi, margins);
    // the region has interior iff some grid point satisfies every sign strictly (up to grid resolution)
    bool grid_hit = false;
    for (int i = 0; i <= 100 && !grid_hit; ++i)
      for (int k = 0; k <= 100 && !grid_hit; ++k) {
        const Eigen::Vector2d x(i / 100.0, k / 100.0);
        bool ok = true;
        for (int j = 0; j < 4; ++j) {
          const double a = w.row(j).dot(x) + b(j);
          ok = ok && (pattern[static_cast<std::size_t>(j)] ? a > 1e-3 : a < -1e-3);
        }
        grid_hit = ok;
      }
    if (grid_hit) {
      EXPECT_EQ(res.status, certify::RegionStatus::Feasible) << "trial " << t;
    }
    if (res.status == certify::RegionStatus::Feasible) {
      ASSERT_EQ(res.witness.size(), 2U);
      const Eigen::Vector2d x(res.witness[0], res.witness[1]);
      for (int j = 0; j < 4; ++j) {
        const double a = w.row(j).dot(x) + b(j);
        if (pattern[static_cast<std::size_t>(j)]) {
          EXPECT_GE(a, -1e-9);
        } else {
          EXPECT_LE(a, 1e-9);
        }
      }
    }
  }
}

TEST(Certify, PlantedMonotoneCertified) {
  std::mt19937_64 rng(91);
  for (int t = 0; t < 20; ++t) {
    const auto net = mt::planted_monotone(rng, 3, 10);
    const auto rep = certify::certify_two_layer(net, unit_box(3));
    EXPECT_TRUE(rep.certified);
    EXPECT_TRUE(rep.counterexamples.empty());
    EXPECT_EQ(rep.regions_total(), 1ULL << 10);
  }
}

TEST(Certify, PlantedViolationYieldsVerifiedCounterexample) {
  const auto net = mt::planted_violation();
  const auto rep = certify::certify_two_layer(net, unit_box(2));
  ASSERT_FALSE(rep.certified);
  ASSERT_FALSE(rep.counterexamples.empty());
  for (const auto& c : rep.counterexamples) {
    EXPECT_LT(c.gradient, 0.0);
    const Eigen::Vector2d x(c.witness[0], c.witness[1]);
    EXPECT_GT(x(0), 0.5);
    EXPECT_NEAR(net.input_gradient(x)(static_cast<Eigen::Index>(c.coordinate)), c.gradient, 1e-12);
    Eigen::Vector2d d = Eigen::Vector2d::Zero();
    d(static_cast<Eigen::Index>(c.coordinate)) = 1e-6;
    const double fd = (net.forward(Eigen::VectorXd(x + d))(0) - net.forward(Eigen::VectorXd(x - d))(0)) / 2e-6;
    EXPECT_NEAR(fd, c.gradient, 1e-6);
  }
}

TEST(Certify, DeltaRelaxationAdmitsSmallNegativeSlopes) {
  // slope -0.05 beyond x1 = 0.5
  Eigen::MatrixXd w(2, 2);
  w << 1, 0, 1, 0;
  const auto net = mt::two_layer(w, Eigen::Vector2d(0, -0.5), Eigen::RowVector2d(1, -1.05));
  EXPECT_FALSE(certify::certify_two_layer(net, unit_box(2, 0.0)).certified);
  EXPECT_TRUE(certify::certify_two_layer(net, unit_box(2, -0.1)).certified);
}

TEST(Certify, SliverSeparatesTau) {
  const auto net = mt::planted_sliver();
  const auto strict = certify::certify_two_layer(net, unit_box(2, 0.0, 0.0));
  EXPECT_FALSE(strict.certified);
  const auto relaxed = certify::certify_two_layer(net, unit_box(2, 0.0, 0.01));
  EXPECT_TRUE(relaxed.certified);
  EXPECT_GT(relaxed.regions_skipped_by_tau, 0U);

  // the violating region is thinner than 0.01 along both axes
  ASSERT_FALSE(strict.counterexamples.empty());
  const auto& pattern = strict.counterexamples.front().pattern;
  const auto& w = net.layers()[0].weight;
  const auto& b = net.layers()[0].bias;
  for (int axis = 0; axis < 2; ++axis) {
    // max and min x_axis over the region, as LPs in x >= 0
    Eigen::MatrixXd a(3 + 2, 2);
    Eigen::VectorXd rhs(3 + 2);
    for (int j = 0; j < 3; ++j) {
      const double s = pattern[static_cast<std::size_t>(j)] ? -1.0 : 1.0;  // active: -(w.x + b) <= 0
      a.row(j) = s * w.row(j);
      rhs(j) = -s * b(j);
    }
    a.row(3) << 1, 0;
    a.row(4) << 0, 1;
    rhs(3) = 1;
    rhs(4) = 1;
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    c(axis) = 1;
    // width along the axis at a fixed other coordinate: a 1-D slice
    const double other = 0.5;
    Eigen::MatrixXd a2(a.rows() + 2, 2);
    Eigen::VectorXd r2(a.rows() + 2);
    a2 << a, Eigen::RowVector2d::Zero(), Eigen::RowVector2d::Zero();
    r2 << rhs, other, -other;
    a2(a.rows(), 1 - axis) = 1;
    a2(a.rows() + 1, 1 - axis) = -1;
    const auto hi = lp::maximize(a2, r2, c);
    const auto lo = lp::maximize(a2, r2, -c);
    ASSERT_EQ(hi.status, lp::Status::Optimal);
    EXPECT_LT(hi.objective + lo.objective, 0.01);
  }
}

TEST(Certify, RegionAccountingAddsUp) {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 10; ++t) {
    const auto net = nn::Mlp::random({3, 9, 1}, false, false, rng);
    auto cfg = unit_box(3);
    cfg.max_counterexamples = 1000;
    for (bool prune : {false, true}) {
      cfg.bound_pruning = prune;
      const auto rep = certify::certify_two_layer(net, cfg);
      EXPECT_EQ(rep.regions_total(), 1ULL << 9);
      EXPECT_TRUE(rep.complete);
    }
  }
}

TEST(Certify, PruningDoesNotChangeVerdict) {
  std::mt19937_64 rng(111);
  for (int t = 0; t < 30; ++t) {
    const auto net = nn::Mlp::random({2, 8, 1}, false, false, rng);
    auto cfg = unit_box(2, -0.2);
    cfg.bound_pruning = false;
    const bool a = certify::certify_two_layer(net, cfg).certified;
    cfg.bound_pruning = true;
    EXPECT_EQ(certify::certify_two_layer(net, cfg).certified, a);
  }
}

TEST(Certify, WidthLimitEnforced) {
  std::mt19937_64 rng(121);
  const auto net = nn::Mlp::random({2, 13, 1}, false, false, rng);
  auto cfg = unit_box(2);
  cfg.max_width = 12;
  EXPECT_THROW((void)certify::certify_two_layer(net, cfg), std::invalid_argument);
}

TEST(Certify, SamplingAuditOnCertifiedNets) {
  std::mt19937_64 rng(131);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int certified = 0;
  for (int t = 0; t < 400 && certified < 5; ++t) {
    // mostly positive weights so some nets certify and some do not
    Eigen::MatrixXd w(6, 2);
    Eigen::VectorXd b(6);
    Eigen::RowVectorXd a(6);
    for (int j = 0; j < 6; ++j) {
      w(j, 0) = g(rng) + 0.8;
      w(j, 1) = g(rng) + 0.8;
      b(j) = g(rng) * 0.5;
      a(j) = g(rng) + 0.5;
    }
    const auto net = mt::two_layer(w, b, a);
    if (!certify::certify_two_layer(net, unit_box(2)).certified) continue;
    ++certified;
    for (int s = 0; s < 10000; ++s) {
      const Eigen::Vector2d x(u(rng), u(rng));
      const Eigen::VectorXd grad = net.input_gradient(x);
      EXPECT_GE(grad.minCoeff(), 0.0);
    }
  }
  EXPECT_GE(certified, 1);
}

TEST(Certify, DeepNetIntervalPropagationIsSound) {
  std::mt19937_64 rng(141);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto net = nn::Mlp::random({2, 6, 6, 1}, false, false, rng);
  const auto boxes = certify::propagate_intervals(net, {0, 0}, {1, 1});
  ASSERT_EQ(boxes.size(), net.depth());
  nn::Mlp::Trace trace;
  Eigen::MatrixXd pts(2, 500);
  for (Eigen::Index c = 0; c < pts.cols(); ++c) pts.col(c) << u(rng), u(rng);
  (void)net.forward_batch(pts, trace);
  for (std::size_t l = 1; l < net.depth(); ++l) {
    const auto& [lo, hi] = boxes[l - 1];
    const Eigen::MatrixXd& in = trace.inputs[l];
    for (Eigen::Index r = 0; r < in.rows(); ++r)
      for (Eigen::Index c = 0; c < in.cols(); ++c) {
        EXPECT_GE(in(r, c), lo[static_cast<std::size_t>(r)] - 1e-12);
        EXPECT_LE(in(r, c), hi[static_cast<std::size_t>(r)] + 1e-12);
      }
  }
}

TEST(Certify, DeepPlantedMonotone) {
  std::mt19937_64 rng(151);
  const std::vector<int> signs{1, 1};
  const auto net = nn::Mlp::random({2, 8, 8, 8, 1}, false, false, rng, nn::InitScheme::SignStructured, signs);
  const auto rep = certify::certify_deep(net, unit_box(2));
  EXPECT_TRUE(rep.certified);
  EXPECT_EQ(rep.blocks, 2U);
}
