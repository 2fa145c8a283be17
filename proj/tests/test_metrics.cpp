#include <cmath>
#include <random>

#include "mhspectral/maps.hpp"
#include "mhspectral/metrics.hpp"
#include "support.hpp"

using namespace mhs;

namespace {

ProductVector single_block(std::vector<double> v) { return ProductVector::from_blocks({v}); }

ProductVector flatten(const ProductVector& x) {
  return single_block(std::vector<double>(x.flat().begin(), x.flat().end()));
}

}  // namespace

TEST_CASE("weight vector") {
  CHECK_THROWS_AS(WeightVector({1, 0}), DomainError);
  CHECK(WeightVector::uniform(4).normalized());
  const WeightVector b{0.25, 1};
  CHECK(!b.normalized());
  CHECK(b.normalized_copy()[0] == doctest::Approx(0.2));
}

TEST_CASE("ratio extrema") {
  const auto x = ProductVector::from_blocks({{2, 1}, {3, 3}});
  const auto y = ProductVector::from_blocks({{1, 1}, {1, 3}});
  const RatioExtrema r = ratio_extrema(x, y);
  CHECK(r.maxima == BlockScaling{2, 3});
  CHECK(r.minima == BlockScaling{1, 1});
  const RatioExtrema same = ratio_extrema(x, x);
  CHECK(same.maxima == BlockScaling{1, 1});
  CHECK(same.minima == BlockScaling{1, 1});
  const RatioExtrema scaled = ratio_extrema(scale_blocks({5, 0.5}, x), y);
  CHECK(scaled.maxima[0] == doctest::Approx(10));
  CHECK(scaled.maxima[1] == doctest::Approx(1.5));
  CHECK_THROWS(ratio_extrema(x, ProductVector::from_blocks({{1, 0}, {1, 3}})));

  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const ProductVector a = random_positive(Shape{3, 2}, rng, 0.1, 4);
    const ProductVector c = random_positive(Shape{3, 2}, rng, 0.1, 4);
    const RatioExtrema e = ratio_extrema(a, c);
    // one rounding in the quotient and one in the product
    const double slack = 1.0 + 4.5e-16;
    const BlockScaling lo = e.minima * BlockScaling{1 / slack, 1 / slack};
    const BlockScaling hi = e.maxima * BlockScaling{slack, slack};
    CHECK(leq(scale_blocks(lo, c), a));
    CHECK(leq(a, scale_blocks(hi, c)));
  }
}

TEST_CASE("hilbert and thompson examples") {
  const auto x = single_block({1, 1, 1, 1});
  const auto y = single_block({1, 1, 1, 2});
  const WeightVector one{1};
  CHECK(hilbert_metric(x, x, one) == 0.0);
  CHECK(thompson_metric(x, x, one) == 0.0);
  CHECK(hilbert_metric(x, y, one) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(thompson_metric(x, y, one) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(thompson_metric(x, single_block({2, 2, 2, 2}), one) == doctest::Approx(std::log(2.0)));
  CHECK(hilbert_metric(ProductVector::from_blocks({{1, 1}, {1, 1}}),
                       ProductVector::from_blocks({{1, 1}, {1, 2}}), WeightVector{0.25, 1}) ==
        doctest::Approx(std::log(2.0)));
  CHECK_THROWS(hilbert_metric(x, single_block({1, 0, 1, 1}), one));
  CHECK_THROWS(thompson_metric(single_block({1, 1e-301, 1, 1}), x, one));
}

TEST_CASE("metric axioms on random triples") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  const Shape s{3, 2, 4};
  const WeightVector b{0.2, 0.5, 0.3};
  for (int t = 0; t < 500; ++t) {
    const ProductVector x = random_positive(s, rng, 0.01, 5);
    const ProductVector y = random_positive(s, rng, 0.01, 5);
    const ProductVector z = random_positive(s, rng, 0.01, 5);
    for (auto metric : {hilbert_metric, thompson_metric}) {
      CHECK(metric(x, y, b) >= 0.0);
      CHECK(std::abs(metric(x, y, b) - metric(y, x, b)) < 1e-10);
      CHECK(metric(x, z, b) <= metric(x, y, b) + metric(y, z, b) + 1e-10);
    }
    const BlockScaling alpha{u(rng), u(rng), u(rng)}, beta{u(rng), u(rng), u(rng)};
    CHECK(std::abs(hilbert_metric(scale_blocks(alpha, x), scale_blocks(beta, y), b) -
                   hilbert_metric(x, y, b)) < 1e-12);
    CHECK(hilbert_metric(x, scale_blocks(alpha, x), b) < 1e-13);
    CHECK(thompson_metric(x, scale_blocks(alpha, x), b) > 0.0);
  }
}

TEST_CASE("hilbert metric scale invariance on the motivating pair") {
  const MapInstance F = motivating_map();
  const auto x = ProductVector::from_blocks({{1, 1}, {1, 1}});
  const auto y = ProductVector::from_blocks({{1, 1}, {1, 2}});
  const WeightVector one{1};
  CHECK(hilbert_metric(flatten(x), flatten(y), one) == doctest::Approx(std::log(2.0)));
  CHECK(hilbert_metric(flatten(F(x)), flatten(F(y)), one) == doctest::Approx(std::log(4.0)));
  CHECK(thompson_metric(flatten(F(x)), flatten(F(y)), one) == doctest::Approx(std::log(4.0)));
}

TEST_CASE("lipschitz inequality for built-in families") {
  std::mt19937_64 rng(99);
  Matrix M(2, 3);
  M << 1, 2, 0.5, 0.3, 1, 2;
  const std::vector<MapInstance> maps{
      motivating_map(),
      linear_map(testing::random_positive_matrix(rng, 3, 3)),
      singular_map(M),
      pq_singular_map(M, 4, 3),
      tensor_eigen_map(CubicalTensor::constant(3, 3, 1.0), 4),
      irrex_map(),
      max_example_map(0.3),
      tight_map({{0.5, 1.5}, {0.2, 0.1}}, {2, 3}),
  };
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (const MapInstance& F : maps) {
    CAPTURE(F.label());
    for (int t = 0; t < 200; ++t) {
      std::vector<double> bv(F.shape().blocks());
      for (double& v : bv) v = u(rng);
      const WeightVector b(bv);
      const double C = lipschitz_bound(F.A().matrix(), b);
      const ProductVector x = random_positive(F.shape(), rng, 0.05, 4);
      const ProductVector y = random_positive(F.shape(), rng, 0.05, 4);
      const ProductVector Fx = F(x), Fy = F(y);
      CHECK(hilbert_metric(Fx, Fy, b) <= C * hilbert_metric(x, y, b) + 1e-10);
      CHECK(thompson_metric(Fx, Fy, b) <= C * thompson_metric(x, y, b) + 1e-10);
    }
  }
}

TEST_CASE("tight map attains the lipschitz bound") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 2.0), w(0.2, 3.0);
  for (int t = 0; t < 100; ++t) {
    Matrix A(3, 3);
    for (Eigen::Index k = 0; k < 9; ++k) A.data()[k] = u(rng);
    const MapInstance F = tight_map(HomogeneityMatrix(A), {2, 3, 2});
    const WeightVector b{w(rng), w(rng), w(rng)};
    const Vector ratios = (A.transpose() * Eigen::Map<const Vector>(b.values().data(), 3))
                              .cwiseQuotient(Eigen::Map<const Vector>(b.values().data(), 3));
    Eigen::Index k = 0;
    const double C = ratios.maxCoeff(&k);
    CHECK(C == doctest::Approx(lipschitz_bound(A, b)).epsilon(1e-14));
    const ProductVector x = random_positive(F.shape(), rng);
    ProductVector y = x;
    y(static_cast<std::size_t>(k), 0) *= 1.0 + w(rng);
    CHECK(std::abs(thompson_metric(F(x), F(y), b) - C * thompson_metric(x, y, b)) < 1e-10);
    // images are constant on every block, so their Hilbert distance vanishes
    CHECK(hilbert_metric(x, y, b) > 0.0);
    CHECK(hilbert_metric(F(x), F(y), b) < 1e-12);
  }
}
