#include <gtest/gtest.h>

#include <random>

#include "greedyrec/greedyrec.hpp"
#include "oracles.hpp"

using namespace greedyrec;

namespace {

Eigen::VectorXd gaussian(std::mt19937_64& rng, Eigen::Index m) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(m);
  for (Eigen::Index i = 0; i < m; ++i) v(i) = normal(rng);
  return v;
}

// max_{i outside qstar} || (C^T C)^{-1} C^T c_i ||_1 by normal equations.
double erc_oracle(const Eigen::MatrixXd& family, const std::vector<AtomIndex>& cols,
                  const std::vector<AtomIndex>& outside) {
  const Eigen::MatrixXd c = oracle::cols(family, cols);
  double lhs = 0.0;
  for (AtomIndex i : outside) {
    if (family.col(i).norm() == 0.0) continue;
    lhs = std::max(lhs, oracle::normal_equations(c, family.col(i)).lpNorm<1>());
  }
  return lhs;
}

}  // namespace

TEST(PlainErc, Orthonormal) {
  std::mt19937_64 rng(1);
  const Dictionary d = oracle::orthonormal_dictionary(rng, 6, 6);
  const ErcReport r = tropp_erc(d, Support{1, 4});
  EXPECT_LE(r.lhs, 1e-12);
  EXPECT_TRUE(r.satisfied);
  EXPECT_TRUE(r.binding_atom.has_value());
}

TEST(PlainErc, WorstCaseSitsOnBoundary) {
  // Oracle: normal-equation pseudo-inverse gives exactly 1 for every Q* of size k.
  for (int k = 2; k <= 4; ++k) {
    const Dictionary d = build_worst_case(k, 0);
    for_each_subset(Support::range(0, d.cols()), static_cast<std::size_t>(k), [&](const Support& qstar) {
      const double lhs = tropp_erc(d, qstar).lhs;
      EXPECT_NEAR(lhs, erc_oracle(d.atoms(), qstar.indices(), complement(qstar, d.cols()).indices()), 1e-10);
      EXPECT_NEAR(lhs, 1.0, 1e-9);
    });
    EXPECT_NEAR(omp_partial_bound(k, 0, coherence_threshold(k, 0)), 1.0, 1e-15);
  }
}

TEST(PlainErc, DuplicateOutsideSupport) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 4);
  a.col(3) = a.col(0);
  const ErcReport r = tropp_erc(Dictionary(a), Support{0, 1});
  EXPECT_GE(r.lhs, 1.0);
  EXPECT_FALSE(r.satisfied);
  EXPECT_EQ(r.binding_atom, 3);
}

TEST(PlainErc, Errors) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 4);
  a.col(3) = a.col(0);
  EXPECT_THROW(tropp_erc(Dictionary(a), Support{0, 3}), RankDeficient);
  EXPECT_THROW(tropp_erc(Dictionary(a), Support{}), InvalidArgs);
}

TEST(PartialErc, EmptyPartialSupportIsPlainErc) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dictionary d = random_dictionary(10, 16, std::nullopt, seed);
    const Support qstar{3, 8, 1};
    const ErcReport t = tropp_erc(d, qstar);
    for (SolverVariant v : kAllVariants) {
      const ErcReport p = partial_erc(v, d, Support{}, qstar);
      EXPECT_NEAR(p.lhs, t.lhs, 1e-12);
      EXPECT_EQ(p.binding_atom, t.binding_atom);
      EXPECT_EQ(p.satisfied, t.satisfied);
    }
  }
}

TEST(PartialErc, MatchesNormalEquationsOracle) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 30; ++t) {
    const Dictionary d = random_dictionary(9, 14, std::nullopt, 50 + t);
    const auto order = oracle::random_subset(rng, 14, 4);
    const Support qstar(order);
    const Support q(std::vector<AtomIndex>(order.begin(), order.begin() + t % 4));
    const ProjectedDictionary pd = project_atoms(d, q);
    for (SolverVariant v : kAllVariants) {
      const double expect =
          erc_oracle(pd.family(v), qstar.minus(q).indices(), complement(qstar, d.cols()).indices());
      EXPECT_NEAR(partial_erc(v, d, q, qstar).lhs, expect, 1e-9 * std::max(1.0, expect));
    }
  }
}

TEST(PartialErc, WorstCaseScenarioViolates) {
  for (SolverVariant v : kAllVariants) {
    const WorstCaseScenario s = build_scenario(3, 1, v);
    const ErcReport r = partial_erc(v, s.dict, s.partial, s.truth);
    // Oracle value on the equiangular construction: exactly 1.
    EXPECT_NEAR(r.lhs, 1.0, 1e-9);
    EXPECT_FALSE(r.satisfied);
  }
}

TEST(PartialErc, BelowThresholdObeysBound) {
  std::mt19937_64 rng(3);
  const int k = 4;
  const int l = 2;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dictionary d = random_dictionary(20, 30, coherence_threshold(k, l) * 0.999, 70 + seed);
    const double mu = coherence(d);
    ASSERT_LT(mu, coherence_threshold(k, l));
    const auto order = oracle::random_subset(rng, 30, k);
    const Support qstar(order);
    const Support q(std::vector<AtomIndex>(order.begin(), order.begin() + l));
    const double lhs = partial_erc(SolverVariant::Omp, d, q, qstar).lhs;
    EXPECT_LE(lhs, omp_partial_bound(k, l, mu) + 1e-10);
    EXPECT_LT(omp_partial_bound(k, l, mu), 1.0);
  }
}

TEST(PartialErc, Preconditions) {
  const Dictionary d = random_dictionary(6, 9, std::nullopt, 1);
  EXPECT_THROW(partial_erc(SolverVariant::Omp, d, Support{0, 1}, Support{0, 1}), InvalidArgs);
  EXPECT_THROW(partial_erc(SolverVariant::Omp, d, Support{5}, Support{0, 1}), InvalidArgs);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 4);
  a.col(3) = a.col(0);
  EXPECT_THROW(partial_erc(SolverVariant::Ols, Dictionary(a), Support{0}, Support{0, 3}), RankDeficient);
}

TEST(Thresholds, CoherenceThreshold) {
  for (int k = 1; k <= 6; ++k) EXPECT_DOUBLE_EQ(coherence_threshold(k, 0), 1.0 / (2 * k - 1));
  EXPECT_DOUBLE_EQ(coherence_threshold(3, 1), 0.25);
  EXPECT_DOUBLE_EQ(coherence_threshold(2, 1), 0.5);
  EXPECT_THROW(coherence_threshold(2, 2), InvalidArgs);
  EXPECT_THROW(coherence_threshold(0, 0), InvalidArgs);
}

TEST(Thresholds, OmpPartialBound) {
  EXPECT_NEAR(omp_partial_bound(3, 1, 0.1), 0.25, 1e-15);
  for (int k = 1; k <= 6; ++k) {
    for (int l = 0; l < k; ++l) {
      EXPECT_EQ(omp_partial_bound(k, l, 0.0), 0.0);
      if (2 * k - l - 1 > 0) EXPECT_NEAR(omp_partial_bound(k, l, coherence_threshold(k, l)), 1.0, 1e-14);
    }
  }
  EXPECT_THROW(omp_partial_bound(3, 1, 0.5), OutOfDomain);
  EXPECT_THROW(omp_partial_bound(3, 1, -0.1), OutOfDomain);
}

TEST(Thresholds, OlsCoherenceBound) {
  EXPECT_DOUBLE_EQ(ols_coherence_bound(0, 0.3), 0.3);
  EXPECT_NEAR(ols_coherence_bound(2, 0.1), 0.125, 1e-15);
  EXPECT_NEAR(ols_coherence_bound(3, 0.25), 1.0, 1e-15);
  EXPECT_THROW(ols_coherence_bound(2, 0.5), OutOfDomain);
}

TEST(Prip, CoherenceBounds) {
  for (int q = 1; q <= 5; ++q) {
    const PripConstants c = prip_coherence_bounds(q, 0, 0.13);
    EXPECT_DOUBLE_EQ(c.upper, (q - 1) * 0.13);
    EXPECT_DOUBLE_EQ(c.lower, (q - 1) * 0.13);
  }
  const PripConstants a = prip_coherence_bounds(2, 1, 0.2);
  EXPECT_NEAR(a.upper, 0.2, 1e-15);
  EXPECT_NEAR(a.lower, 0.28, 1e-15);
  const PripConstants b = prip_coherence_bounds(2, 2, 0.1);
  EXPECT_NEAR(b.upper, 0.1, 1e-15);
  EXPECT_NEAR(b.lower, 0.1 + 0.04 / 0.9, 1e-15);
  EXPECT_EQ(b.kind, PripConstants::Kind::CoherenceBound);
  EXPECT_THROW(prip_coherence_bounds(2, 3, 0.5), OutOfDomain);
}

TEST(Prip, ExactOrthonormal) {
  std::mt19937_64 rng(4);
  const Dictionary d = oracle::orthonormal_dictionary(rng, 7, 7);
  for (int q = 1; q <= 3; ++q) {
    for (int l = 0; l <= 2; ++l) {
      const PripConstants c = prip_exact(d, q, l);
      EXPECT_NEAR(c.lower, 0.0, 1e-12);
      EXPECT_NEAR(c.upper, 0.0, 1e-12);
      EXPECT_EQ(c.kind, PripConstants::Kind::Exact);
    }
  }
}

TEST(Prip, ExactMatchesRicBruteForce) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const Dictionary d = oracle::planted_dictionary(rng, 6, 9, 0);
    for (int q = 2; q <= 3; ++q) {
      const auto [lo, hi] = oracle::ric_bruteforce(d, q);
      const PripConstants c = prip_exact(d, q, 0);
      EXPECT_NEAR(c.lower, lo, 1e-10);
      EXPECT_NEAR(c.upper, hi, 1e-10);
    }
    // For pairs the constants are the coherence itself.
    const PripConstants pair = prip_exact(d, 2, 0);
    EXPECT_NEAR(pair.lower, coherence(d), 1e-12);
    EXPECT_NEAR(pair.upper, coherence(d), 1e-12);
  }
}

TEST(Prip, ExactDominatedByCoherenceBounds) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Dictionary d = random_dictionary(12, 16, std::nullopt, 200 + seed);
    const PripConstants exact = prip_exact(d, 2, 1);
    const PripConstants bound = prip_coherence_bounds(2, 1, coherence(d));
    EXPECT_LE(exact.lower, bound.lower + 1e-10);
    EXPECT_LE(exact.upper, bound.upper + 1e-10);
    EXPECT_LE(exact.lower, 1.0);
  }
}

TEST(Prip, Errors) {
  const Dictionary d = random_dictionary(10, 40, std::nullopt, 1);
  EXPECT_THROW(prip_exact(d, 4, 3), CapExceeded);
  EXPECT_THROW(prip_exact(d, 0, 1), InvalidArgs);
  EXPECT_THROW(projected_coherence(SolverVariant::Omp, d, 6), CapExceeded);
  EXPECT_NO_THROW(prip_exact(d, 2, 1, 1e6));
}

TEST(ProjectedCoherence, Examples) {
  const Dictionary d = random_dictionary(8, 11, std::nullopt, 3);
  for (SolverVariant v : kAllVariants) {
    EXPECT_NEAR(projected_coherence(v, d, 0), coherence(d), 1e-15);
  }
  std::mt19937_64 rng(6);
  const Dictionary o = oracle::orthonormal_dictionary(rng, 6, 6);
  for (int l = 0; l <= 3; ++l) EXPECT_LE(projected_coherence(SolverVariant::Ols, o, l), 1e-12);
  EXPECT_NEAR(projected_coherence(SolverVariant::Omp, build_worst_case(3, 1), 1), 0.3125, 1e-12);
}

TEST(ProjectedCoherence, OlsCoherenceBound) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dictionary d = random_dictionary(10, 12, 0.2 + 0.01 * static_cast<double>(seed), 400 + seed);
    const double mu = coherence(d);
    for (int l = 0; l <= 2; ++l) {
      if (l > 0 && mu >= 1.0 / l) continue;
      EXPECT_LE(projected_coherence(SolverVariant::Ols, d, l), ols_coherence_bound(l, mu) + 1e-10);
    }
  }
}

TEST(PripErcBound, Bound) {
  const PripConstants zero2{2, 1, 0.0, 0.0, PripConstants::Kind::Exact};
  const PripConstants zero3{3, 1, 0.0, 0.0, PripConstants::Kind::Exact};
  EXPECT_EQ(prop1_bound(4, 1, zero2, zero3), 0.0);
  EXPECT_THROW(prop1_bound(4, 1, zero3, zero3), InvalidArgs);
  EXPECT_THROW(prop1_bound(4, 1, zero2, PripConstants{3, 1, 1.0, 0.0, PripConstants::Kind::Exact}), OutOfDomain);

  for (int k = 1; k <= 6; ++k) {
    for (int l = 0; l < k; ++l) {
      for (double frac : {0.0, 0.2, 0.5, 0.9}) {
        const double mu = k == 1 ? frac : frac / (k - 1);
        const double p = prop1_bound(k, l, prip_coherence_bounds(2, l, mu), prip_coherence_bounds(k - l, l, mu));
        EXPECT_NEAR(p, omp_partial_bound(k, l, mu), 1e-12) << k << "," << l << "," << mu;
      }
    }
  }
}

TEST(PripErcBound, ExactConstantsBoundPartialErc) {
  std::mt19937_64 rng(7);
  const int k = 4;
  const int l = 1;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Dictionary d = random_dictionary(12, 16, 0.35, 600 + seed);
    const PripConstants pair = prip_exact(d, 2, l);
    const PripConstants block = prip_exact(d, k - l, l);
    ASSERT_LT(block.lower, 1.0);
    const auto order = oracle::random_subset(rng, 16, k);
    const Support qstar(order);
    const Support q(std::vector<AtomIndex>(order.begin(), order.begin() + l));
    const double lhs = partial_erc(SolverVariant::Omp, d, q, qstar).lhs;
    EXPECT_LE(lhs, prop1_bound(k, l, pair, block) + 1e-10);
  }
}

TEST(CrossGramBound, Examples) {
  const Dictionary d = random_dictionary(8, 12, std::nullopt, 2);
  const auto zero = lemma5_bound_check(d, Support{0}, Support{1, 2}, Support{3}, Eigen::VectorXd::Zero(1));
  EXPECT_EQ(zero.first, 0.0);
  EXPECT_EQ(zero.second, 0.0);
  std::mt19937_64 rng(8);
  const Dictionary o = oracle::orthonormal_dictionary(rng, 6, 6);
  const auto orth = lemma5_bound_check(o, Support{0}, Support{1, 2}, Support{3, 4}, Eigen::Vector2d(1, -2));
  EXPECT_LE(orth.first, 1e-12);
  EXPECT_LE(orth.second, 1e-12);
  EXPECT_THROW(lemma5_bound_check(d, Support{0}, Support{1, 2}, Support{2}, Eigen::VectorXd::Ones(1)), InvalidArgs);
  EXPECT_THROW(lemma5_bound_check(d, Support{0}, Support{1}, Support{2}, Eigen::VectorXd::Ones(2)), InvalidArgs);
}

TEST(CrossGramBound, RandomDraws) {
  std::mt19937_64 rng(9);
  const Dictionary d = random_dictionary(9, 12, 0.4, 31);
  std::vector<double> mu_l;
  for (int l = 0; l <= 2; ++l) mu_l.push_back(projected_coherence(SolverVariant::Omp, d, l));
  for (int t = 0; t < 200; ++t) {
    const std::size_t l = static_cast<std::size_t>(t % 3);
    const auto pick = oracle::random_subset(rng, 12, l + 5);
    const Support q(std::vector<AtomIndex>(pick.begin(), pick.begin() + static_cast<long>(l)));
    const std::size_t a = 1 + static_cast<std::size_t>(t % 3);
    const Support qp(std::vector<AtomIndex>(pick.begin() + static_cast<long>(l), pick.begin() + static_cast<long>(l + a)));
    const Support qpp(std::vector<AtomIndex>(pick.begin() + static_cast<long>(l + a), pick.end()));
    const Eigen::VectorXd u = gaussian(rng, static_cast<Eigen::Index>(qpp.size()));
    const auto [lhs, rhs] = lemma5_bound_check(d, q, qp, qpp, u, mu_l[l]);
    EXPECT_LE(lhs, rhs + 1e-10);
  }
}

TEST(BoundChain, EachInequalityHolds) {
  std::mt19937_64 rng(10);
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const Dictionary d = random_dictionary(10, 12, 0.3, 800 + seed);
    for (int l = 0; l <= 2; ++l) {
      const int k = l + 2;
      const PripConstants pair = prip_exact(d, 2, l);
      const PripConstants block = prip_exact(d, k - l, l);
      if (!(block.lower < 1.0)) continue;
      const double mu_l = projected_coherence(SolverVariant::Omp, d, l);
      const auto order = oracle::random_subset(rng, 12, static_cast<std::size_t>(k));
      const Support qstar(order);
      const Support q(std::vector<AtomIndex>(order.begin(), order.begin() + l));
      const double lhs = partial_erc(SolverVariant::Omp, d, q, qstar).lhs;
      double max_l1 = 0.0;
      for (const BoundChain& c : omp_bound_chain(d, q, qstar, pair, block, mu_l)) {
        EXPECT_LE(c.l1, c.l2_scaled + 1e-10);
        EXPECT_LE(c.l2_scaled, c.gram_scaled + 1e-10);
        EXPECT_LE(c.gram_scaled, c.coherence_scaled + 1e-10);
        EXPECT_LE(c.coherence_scaled, c.prip_scaled + 1e-10);
        max_l1 = std::max(max_l1, c.l1);
      }
      EXPECT_NEAR(max_l1, lhs, 1e-10);
    }
  }
}

TEST(RankImplication, LowCoherenceSupportsAreFullRank) {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int k = 2 + static_cast<int>(seed % 4);
    const Dictionary d = random_dictionary(12, 18, 0.999 / (k - 1), 900 + seed);
    for (int t = 0; t < 10; ++t) {
      const Support qstar(oracle::random_subset(rng, 18, static_cast<std::size_t>(k)));
      EXPECT_TRUE(full_column_rank(d.columns(qstar)));
    }
  }
}

TEST(OmpBound, HoldsBelowRankThreshold) {
  std::mt19937_64 rng(12);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int k = 2 + static_cast<int>(seed % 4);
    const Dictionary d = random_dictionary(20, 30, 0.999 / (k - 1), 1000 + seed);
    const double mu = coherence(d);
    const auto order = oracle::random_subset(rng, 30, static_cast<std::size_t>(k));
    for (int l = 0; l < k; ++l) {
      const Support q(std::vector<AtomIndex>(order.begin(), order.begin() + l));
      EXPECT_LE(partial_erc(SolverVariant::Omp, d, q, Support(order)).lhs, omp_partial_bound(k, l, mu) + 1e-10);
    }
  }
}

TEST(ErcReport, BoundaryIsNotCertified) {
  EXPECT_TRUE(tol::strictly_below(0.999, 1.0));
  EXPECT_FALSE(tol::strictly_below(1.0 - 1e-15, 1.0));
  EXPECT_FALSE(tol::strictly_below(1.0, 1.0));
  std::mt19937_64 rng(13);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dictionary d = random_dictionary(8, 12, std::nullopt, 1300 + seed);
    const ErcReport r = tropp_erc(d, Support(oracle::random_subset(rng, 12, 3)));
    EXPECT_GE(r.lhs, 0.0);
    EXPECT_EQ(r.satisfied, tol::strictly_below(r.lhs, 1.0));
  }
}
