#include <gtest/gtest.h>

#include <cmath>

#include "agmcs/checks.hpp"
#include "agmcs/random.hpp"
#include "oracle.hpp"

using namespace agmcs;

namespace {

const std::vector<double> kQGrid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

template <Scalar T>
PsdMatrix<T> diag_psd(std::vector<double> d) {
  return PsdMatrix<T>(Matrix<T>::diagonal(d));
}

// Two-by-two oracle: eigenvalues of a real 2x2 matrix with real spectrum.
std::pair<double, double> eig2(const RealMatrix& m) {
  const double tr = m(0, 0) + m(1, 1);
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  return {tr / 2 + disc, tr / 2 - disc};
}

}  // namespace

template <class T>
class ChecksTyped : public ::testing::Test {};
using Fields = ::testing::Types<double, cplx>;
TYPED_TEST_SUITE(ChecksTyped, Fields);

TEST(CqMix, Examples) {
  const auto a = random_psd<double>(3, 3, 1);
  const auto b = random_psd<double>(3, 2, 2);
  EXPECT_EQ(cq_mix(a, b, 1.0).matrix(), a.matrix());
  EXPECT_LE((cq_mix(a, a, 0.5).matrix() - a.matrix()).max_abs(), 1e-15);
  for (double q : kQGrid) {
    const auto s = cq_mix(a, b, q).matrix() + cq_mix(a, b, 1 - q).matrix();
    EXPECT_LE((s - (a.matrix() + b.matrix())).max_abs(), 1e-14);
  }
  EXPECT_THROW(cq_mix(a, random_psd<double>(2, 2, 3), 0.5), DimensionMismatch);
  EXPECT_THROW(cq_mix(a, b, 1.5), InvalidArgument);
}

TEST(Theorem2, Examples) {
  const auto i = PsdMatrix<double>::identity(3);
  for (double q : {0.0, 0.3, 1.0})
    for (std::size_t k = 1; k <= 3; ++k) {
      const auto r = check_theorem2(i, i, q, k);
      EXPECT_NEAR(r.lhs, 1.0, 1e-14);
      EXPECT_NEAR(r.rhs, 1.0, 1e-14);
      EXPECT_TRUE(r.holds);
    }
  const auto r = check_theorem2(diag_psd<double>({2, 0}), diag_psd<double>({0, 2}), 0.5, 1);
  EXPECT_NEAR(r.lhs, 0.0, 1e-15);
  EXPECT_NEAR(r.rhs, 1.0, 1e-14);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.instance.k, 1u);
  EXPECT_EQ(r.instance.q, 0.5);
  EXPECT_THROW(check_theorem2(i, i, 0.5, 0), InvalidArgument);
  EXPECT_THROW(check_theorem2(i, i, 0.5, 4), InvalidArgument);
}

TEST(Theorem2, TwoByTwoClosedForm) {
  auto rng = make_rng(21);
  std::uniform_real_distribution<double> uq(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_psd<double>(2, 1 + trial % 2, rng);
    const auto b = random_psd<double>(2, 2, rng);
    const double q = uq(rng);
    const auto lhs = eig2(a.matrix() * b.matrix());
    const auto rhs = eig2(cq_mix(a, b, q).matrix() * cq_mix(a, b, 1 - q).matrix());
    const auto all = check_theorem2_all(a, b, q);
    const double scale = std::max(1.0, rhs.first);
    EXPECT_NEAR(all[0].lhs, lhs.first, 1e-10 * scale);
    EXPECT_NEAR(all[1].lhs, lhs.second, 1e-10 * scale);
    EXPECT_NEAR(all[0].rhs, rhs.first, 1e-10 * scale);
    EXPECT_NEAR(all[1].rhs, rhs.second, 1e-10 * scale);
    EXPECT_TRUE(all[0].holds && all[1].holds);
  }
}

TYPED_TEST(ChecksTyped, Theorem2Properties) {
  auto rng = make_rng(22);
  std::uniform_real_distribution<double> uq(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const auto a = random_psd<TypeParam>(n, 1 + trial % n, rng);
    const auto b = random_psd<TypeParam>(n, n, rng);
    const double q = uq(rng);
    const auto r = check_theorem2_all(a, b, q);
    const auto flipped = check_theorem2_all(a, b, 1 - q);
    const auto swapped = check_theorem2_all(b, a, q);
    const double t = 2.5;
    const auto scaled = check_theorem2_all(PsdMatrix<TypeParam>(a.matrix() * TypeParam{t}),
                                           PsdMatrix<TypeParam>(b.matrix() * TypeParam{t}), q);
    for (std::size_t k = 0; k < n; ++k) {
      const double s = std::max(1.0, r[k].rhs);
      EXPECT_TRUE(r[k].holds) << "margin " << r[k].margin;
      EXPECT_NEAR(flipped[k].rhs, r[k].rhs, 1e-10 * s);
      EXPECT_NEAR(swapped[k].lhs, r[k].lhs, 1e-10 * s);
      EXPECT_NEAR(swapped[k].rhs, r[k].rhs, 1e-10 * s);
      EXPECT_NEAR(scaled[k].lhs, t * t * r[k].lhs, 1e-10 * t * t * s);
      EXPECT_NEAR(scaled[k].rhs, t * t * r[k].rhs, 1e-10 * t * t * s);
      EXPECT_EQ(scaled[k].holds, r[k].holds);
    }
  }
}

TEST(Theorem2, EndpointsAreEqualities) {
  const auto a = random_psd<cplx>(4, 4, 31);
  const auto b = random_psd<cplx>(4, 3, 32);
  for (double q : {0.0, 1.0})
    for (const auto& r : check_theorem2_all(a, b, q)) EXPECT_NEAR(r.margin, 0.0, 1e-10 * std::max(1.0, r.rhs));
}

TEST(SingularForm, Examples) {
  const auto i = RealMatrix::identity(3);
  const auto r = check_singular_form(i, i, 0.3, 2);
  EXPECT_NEAR(r.lhs, 1.0, 1e-14);
  EXPECT_NEAR(r.rhs, 1.0, 1e-14);
  const auto z = check_singular_form(i, RealMatrix(3, 3), 0.3, 1);
  EXPECT_EQ(z.lhs, 0.0);
  EXPECT_TRUE(z.holds);
  EXPECT_THROW(check_singular_form(i, RealMatrix(3, 2), 0.3, 1), DimensionMismatch);
}

TEST(SingularForm, AgreesWithTheorem2OnGramMatrices) {
  auto rng = make_rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_gaussian<cplx>(5, 5, rng);
    const auto y = random_gaussian<cplx>(5, 5, rng);
    const PsdMatrix<cplx> a(x.adjoint() * x);
    const PsdMatrix<cplx> b(y.adjoint() * y);
    for (double q : kQGrid) {
      const auto sf = check_singular_form_all(x, y, q);
      const auto t2 = check_theorem2_all(a, b, q);
      for (std::size_t k = 0; k < 5; ++k) {
        const double s = std::max(1.0, t2[k].rhs);
        EXPECT_TRUE(sf[k].holds);
        EXPECT_NEAR(sf[k].lhs, t2[k].lhs, 1e-10 * s);
        EXPECT_NEAR(sf[k].rhs, t2[k].rhs, 1e-10 * s);
      }
    }
  }
}

TEST(AgmSingular, Examples) {
  auto rng = make_rng(42);
  const auto x = random_gaussian<double>(3, 3, rng);
  for (const auto& r : check_agm_singular_all(x, x)) EXPECT_NEAR(r.margin, 0.0, 1e-12 * std::max(1.0, r.rhs));
  const auto r = check_agm_singular(RealMatrix::identity(2), RealMatrix(2, 2), 1);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_NEAR(r.rhs, 0.5, 1e-15);
}

TEST(AgmSingular, EqualityForUnitaryMultiples) {
  auto rng = make_rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const auto y = random_gaussian<cplx>(4, 4, rng);
    const ComplexMatrix x = random_unitary<cplx>(4, rng) * y;
    for (const auto& r : check_agm_singular_all(x, y)) {
      EXPECT_TRUE(r.holds);
      EXPECT_NEAR(r.margin, 0.0, 1e-10 * std::max(1.0, r.rhs));
    }
  }
}

TEST(AgmSingular, SquaredMatchesSingularFormAtHalf) {
  auto rng = make_rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_gaussian<cplx>(4, 4, rng);
    const auto y = random_gaussian<cplx>(4, 4, rng);
    const auto agm = check_agm_singular_all(x, y);
    const auto sf = check_singular_form_all(x, y, 0.5);
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_NEAR(agm[k].lhs * agm[k].lhs, sf[k].lhs, 1e-10 * std::max(1.0, sf[k].rhs));
      EXPECT_NEAR(agm[k].rhs * agm[k].rhs, sf[k].rhs, 1e-10 * std::max(1.0, sf[k].rhs));
    }
  }
}

TEST(Theorem1, Examples) {
  const auto i = ComplexMatrix::identity(3);
  for (double q : {0.0, 0.2, 0.5, 1.0}) {
    const auto r = check_theorem1(i, i, q, GaugeSpec::spectral());
    EXPECT_NEAR(r.lhs, 1.0, 1e-14);
    EXPECT_NEAR(r.rhs, 1.0, 1e-14);
  }
  auto rng = make_rng(51);
  const auto x = random_gaussian<double>(3, 3, rng);
  const auto r = check_theorem1(x, x, 0.5, GaugeSpec::schatten(1));
  EXPECT_NEAR(r.margin, 0.0, 1e-12 * r.rhs);
  EXPECT_EQ(r.instance.phi, "schatten:1");
}

TEST(Theorem1, EndpointNames) {
  EXPECT_EQ(theorem1_name(0.0), "theorem1 (cauchy-schwarz endpoint)");
  EXPECT_EQ(theorem1_name(1.0), "theorem1 (cauchy-schwarz endpoint)");
  EXPECT_EQ(theorem1_name(0.5), "theorem1 (agm endpoint)");
  EXPECT_EQ(theorem1_name(0.3), "theorem1");
}

TYPED_TEST(ChecksTyped, Theorem1GridAndEndpointConsistency) {
  auto rng = make_rng(52);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 5;
    const auto x = random_gaussian<TypeParam>(n, n, rng);
    const auto y = random_gaussian<TypeParam>(n, n, rng);
    const auto grid = norm_grid(n);
    for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const auto reports = check_theorem1_grid(x, y, q, grid);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        EXPECT_TRUE(reports[g].holds) << grid[g].to_string() << " q=" << q;
        if (q == 0.0 || q == 1.0) {
          const auto cs = check_cauchy_schwarz(x, y, grid[g]);
          EXPECT_NEAR(reports[g].lhs, cs.lhs, 1e-10 * std::max(1.0, cs.rhs));
          EXPECT_NEAR(reports[g].rhs, cs.rhs, 1e-10 * std::max(1.0, cs.rhs));
        }
        if (q == 0.5) {
          const auto agm = check_agm_norm(x, y, grid[g]);
          EXPECT_NEAR(std::sqrt(reports[g].lhs), agm.lhs, 1e-10 * std::max(1.0, agm.rhs));
          EXPECT_NEAR(std::sqrt(reports[g].rhs), agm.rhs, 1e-10 * std::max(1.0, agm.rhs));
        }
      }
    }
  }
}

TEST(WeylMajorant, Examples) {
  const auto i = PsdMatrix<double>::identity(3);
  const auto r = check_weyl_majorant(i, i, 0.5);
  EXPECT_NEAR(r.margin, 0.0, 1e-14);
  const auto d = check_weyl_majorant(diag_psd<double>({3, 2, 1}), diag_psd<double>({1, 4, 0}), 1.0);
  EXPECT_NEAR(d.margin, 0.0, 1e-14);
  EXPECT_TRUE(d.holds);
  EXPECT_THROW(check_weyl_majorant(i, i, 0.0), InvalidArgument);
}

TEST(WeylMajorant, RandomAgainstLiteralProduct) {
  auto rng = make_rng(61);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const auto a = random_psd<cplx>(n, 1 + trial % n, rng);
    const auto b = random_psd<cplx>(n, n, rng);
    const ComplexMatrix ab = a.matrix() * b.matrix();
    const auto lam = oracle::real_spectrum_general(ab);
    const auto sv = oracle::singular_values(ab);
    for (double r : {0.5, 1.0, 2.0}) {
      const auto rep = check_weyl_majorant(a, b, r);
      EXPECT_TRUE(rep.holds) << "r=" << r << " margin " << rep.margin;
      // direct prefix-sum comparison with the oracle spectra
      double sx = 0, sy = 0;
      for (std::size_t j = 0; j < n; ++j) {
        sx += std::pow(std::abs(lam[j]), r);
        sy += std::pow(sv[j], r);
        EXPECT_LE(sx, sy + 1e-8 * std::max(1.0, sy));
      }
    }
  }
}

TEST(SvMajorization, Examples) {
  auto rng = make_rng(62);
  const auto a = random_gaussian<double>(3, 3, rng);
  EXPECT_NEAR(check_sv_product_majorization(a, RealMatrix::identity(3), 1.0).margin, 0.0, 1e-12);
  const auto d = check_sv_product_majorization(RealMatrix::diagonal({3, 2, 1}), RealMatrix::diagonal({5, 4, 0.5}), 0.5);
  EXPECT_NEAR(d.margin, 0.0, 1e-12);
  EXPECT_THROW(check_sv_product_majorization(a, RealMatrix(2, 2), 1.0), DimensionMismatch);
}

TYPED_TEST(ChecksTyped, SvMajorizationRandom) {
  auto rng = make_rng(63);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const auto a = random_gaussian<TypeParam>(n, n, rng);
    const auto b = random_gaussian<TypeParam>(n, n, rng);
    for (double r : {0.5, 1.0, 2.0}) EXPECT_TRUE(check_sv_product_majorization(a, b, r).holds);
  }
}

TEST(MajorizationChain, Identity) {
  const auto i = ComplexMatrix::identity(3);
  const auto reps = check_majorization_chain(i, i, 0.3, 0.5);
  ASSERT_EQ(reps.size(), 3u);
  EXPECT_EQ(reps[0].name, "chain.eigenvalue-step");
  EXPECT_EQ(reps[1].name, "chain.product-spectra");
  EXPECT_EQ(reps[2].name, "chain.combined");
  for (const auto& r : reps) EXPECT_NEAR(r.margin, 0.0, 1e-13);
}

TYPED_TEST(ChecksTyped, MajorizationChainRandom) {
  auto rng = make_rng(64);
  std::uniform_real_distribution<double> uq(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const auto x = random_gaussian<TypeParam>(n, n, rng);
    const auto y = random_gaussian<TypeParam>(n, 1 + trial % n, rng) * random_gaussian<TypeParam>(1 + trial % n, n, rng);
    const double q = uq(rng);
    for (double r : {0.5, 1.0, 2.0})
      for (const auto& rep : check_majorization_chain(x, y, q, r)) EXPECT_TRUE(rep.holds) << rep.name;
  }
}

TEST(FalseVariant, Examples) {
  const auto a = random_psd<cplx>(3, 3, 71);
  for (const auto& r : check_false_variant_all(a, a, 0.3)) EXPECT_NEAR(r.margin, 0.0, 1e-12 * std::max(1.0, r.rhs));
  auto urng = make_rng(72);
  const auto u = random_unitary<cplx>(3, urng);
  auto commuting = [&](std::vector<double> d) {
    return PsdMatrix<cplx>(ComplexMatrix(u * ComplexMatrix::diagonal({d[0], d[1], d[2]}) * u.adjoint()));
  };
  const auto ca = commuting({3, 1, 0.2});
  const auto cb = commuting({0.5, 2, 4});
  for (double q : kQGrid)
    for (const auto& r : check_false_variant_all(ca, cb, q)) EXPECT_TRUE(r.holds) << "q=" << q;
}

TEST(FalseVariant, RatesTheLiteralProduct) {
  const auto a = random_psd<double>(3, 3, 73);
  const auto b = random_psd<double>(3, 2, 74);
  const auto sv = oracle::singular_values(RealMatrix(a.matrix() * b.matrix()));
  const auto reps = check_false_variant_all(a, b, 0.4);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(reps[k].lhs, sv[k], 1e-12 * sv[0]);
}
