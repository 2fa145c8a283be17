#include <cmath>
#include <random>

#include "mhspectral/cone.hpp"
#include "support.hpp"

using namespace mhs;

TEST_CASE("shape and product vector layout") {
  const Shape s{2, 3};
  CHECK(s.blocks() == 2);
  CHECK(s.total() == 5);
  CHECK(s.offset(1) == 2);
  CHECK(s.block_of(4) == 1);
  CHECK_THROWS_AS(Shape({}), DomainError);
  CHECK_THROWS_AS(Shape({2, 0}), DomainError);
  const auto x = ProductVector::from_blocks({{1, 2}, {3, 4, 5}});
  CHECK(x(1, 2) == 5);
  CHECK(x.to_blocks() == std::vector<std::vector<double>>{{1, 2}, {3, 4, 5}});
  CHECK_THROWS_AS(ProductVector(s, std::vector<double>{1, 2}), ShapeError);
}

TEST_CASE("membership predicates nest") {
  const auto pos = ProductVector::from_blocks({{1, 2}, {3}});
  const auto semi = ProductVector::from_blocks({{0, 2}, {3}});
  const auto nonneg = ProductVector::from_blocks({{0, 0}, {3}});
  const auto neg = ProductVector::from_blocks({{-1, 2}, {3}});
  CHECK((pos.pos() && pos.semipos() && pos.nonneg()));
  CHECK((!semi.pos() && semi.semipos() && semi.nonneg()));
  CHECK((!nonneg.semipos() && nonneg.nonneg()));
  CHECK(!neg.nonneg());
  CHECK(ProductVector::from_blocks({{1e-20, 1}}).pos());
  CHECK(!ProductVector::from_blocks({{1e-20, 1}}).approx_pos());
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(0, 3);
  for (int t = 0; t < 500; ++t) {
    ProductVector x(Shape{2, 3});
    for (double& v : x.flat()) v = pick(rng) - 1.0;
    if (x.pos()) CHECK(x.semipos());
    if (x.semipos()) CHECK(x.nonneg());
  }
}

TEST_CASE("scale_blocks examples") {
  const auto x = ProductVector::from_blocks({{1, 2}, {3, 4}});
  CHECK(scale_blocks({1, 1}, x) == x);
  CHECK(scale_blocks({0, 1}, x) == ProductVector::from_blocks({{0, 0}, {3, 4}}));
  CHECK(scale_blocks({2, 3}, ProductVector::from_blocks({{1, 1}, {1, 2}})) ==
        ProductVector::from_blocks({{2, 2}, {3, 6}}));
  CHECK_THROWS_AS(scale_blocks({1, 2, 3}, x), ShapeError);
}

TEST_CASE("scale_blocks associativity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int t = 0; t < 200; ++t) {
    ProductVector x(Shape{3, 2});
    for (double& v : x.flat()) v = u(rng);
    const BlockScaling a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const ProductVector lhs = scale_blocks(a, scale_blocks(b, x));
    const ProductVector rhs = scale_blocks(a * b, x);
    for (std::size_t k = 0; k < lhs.flat().size(); ++k)
      CHECK(testing::rel_err(lhs.flat()[k], rhs.flat()[k]) <= 4.5e-16);
    // dyadic scales multiply without rounding
    const BlockScaling p{0.5, 4}, q{8, 0.25};
    CHECK(scale_blocks(p, scale_blocks(q, x)) == scale_blocks(p * q, x));
  }
}

TEST_CASE("matrix_power_scale examples") {
  const BlockScaling id = matrix_power_scale({2, 3}, Matrix::Identity(2, 2));
  CHECK(id[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(id[1] == doctest::Approx(3.0).epsilon(1e-15));
  Matrix B(2, 2);
  B << 0, 2, 0.125, 0;
  const BlockScaling r = matrix_power_scale({4, 2}, B);
  CHECK(r[0] == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(r[1] == doctest::Approx(std::pow(4.0, 0.125)).epsilon(1e-15));
  CHECK(r[1] == doctest::Approx(1.1892).epsilon(1e-4));
}

TEST_CASE("matrix_power_scale boundary conventions") {
  Matrix B(2, 2);
  B << 1, 0, 0, 1;
  const BlockScaling r = matrix_power_scale({0, 5}, B);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == doctest::Approx(5.0));
  Matrix C(1, 1);
  C << 0;
  CHECK(matrix_power_scale({0}, C)[0] == 1.0);
  Matrix N(1, 1);
  N << -1;
  CHECK_THROWS_AS(matrix_power_scale({0}, N), DomainError);
  CHECK(matrix_power_scale({4}, N)[0] == doctest::Approx(0.25));
}

TEST_CASE("matrix_power_scale identities on random inputs") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 5.0), e(0.0, 2.0);
  for (int t = 0; t < 500; ++t) {
    const BlockScaling a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
    Matrix B(3, 3), C(3, 3);
    for (Eigen::Index k = 0; k < 9; ++k) {
      B.data()[k] = e(rng);
      C.data()[k] = e(rng);
    }
    const auto lhs1 = matrix_power_scale(a, B) * matrix_power_scale(a, C);
    const auto rhs1 = matrix_power_scale(a, B + C);
    const auto lhs2 = matrix_power_scale(matrix_power_scale(a, C), B);
    const auto rhs2 = matrix_power_scale(a, B * C);
    const auto lhs3 = matrix_power_scale(a * b, B);
    const auto rhs3 = matrix_power_scale(a, B) * matrix_power_scale(b, B);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(testing::rel_err(lhs1[i], rhs1[i]) < 1e-12);
      CHECK(testing::rel_err(lhs2[i], rhs2[i]) < 1e-12);
      CHECK(testing::rel_err(lhs3[i], rhs3[i]) < 1e-12);
    }
  }
}

TEST_CASE("block norms") {
  CHECK(block_norms(ProductVector::from_blocks({{3, 4}, {1, 0}}), NormSpec::uniform(2)) ==
        BlockScaling{5, 1});
  const NormSpec inf({BlockNorm::infinity(), BlockNorm::infinity()});
  CHECK(block_norms(ProductVector::from_blocks({{1, 1}, {1, 1}}), inf) == BlockScaling{1, 1});
  const NormSpec mixed({BlockNorm::p_norm(1), BlockNorm::p_norm(2)});
  const auto n = block_norms(ProductVector::from_blocks({{1, 2}, {3, 4}}), mixed);
  CHECK(n[0] == doctest::Approx(3.0));
  CHECK(n[1] == doctest::Approx(5.0));
  const NormSpec phi({BlockNorm::weighted_l1({1, 2})});
  CHECK(block_norms(ProductVector::from_blocks({{3, 4}}), phi)[0] == doctest::Approx(11.0));
  CHECK(BlockNorm::p_norm(4)(std::vector<double>{1e200, 1e200}) ==
        doctest::Approx(1e200 * std::pow(2.0, 0.25)));
  CHECK_THROWS_AS(BlockNorm::p_norm(0.5), DomainError);
  CHECK_THROWS_AS(BlockNorm::weighted_l1({1, 0}), DomainError);
  CHECK_THROWS(NormSpec::uniform(3).check(Shape{2, 2}));
}

TEST_CASE("norms are monotone") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  const std::vector<BlockNorm> norms{BlockNorm::p_norm(1), BlockNorm::p_norm(2.5),
                                     BlockNorm::infinity(), BlockNorm::weighted_l1({1, 3, 0.5})};
  for (int t = 0; t < 300; ++t) {
    std::vector<double> x(3), y(3);
    for (int j = 0; j < 3; ++j) {
      x[j] = u(rng);
      y[j] = x[j] + u(rng);
    }
    for (const auto& n : norms) CHECK(n(x) <= n(y) * (1 + 1e-15));
  }
}

TEST_CASE("normalize") {
  const NormSpec two = NormSpec::uniform(2);
  const auto s = ProductVector::from_blocks({{0.6, 0.8}, {0, 1}});
  CHECK(testing::max_abs_diff(normalize(s, two), s) < 1e-16);
  CHECK(testing::max_abs_diff(normalize(ProductVector::from_blocks({{3, 4}, {0, 2}}), two), s) <
        2.3e-16);
  CHECK_THROWS_AS(normalize(ProductVector::from_blocks({{0, 0}, {1, 1}}), two), DomainError);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  const NormSpec mixed({BlockNorm::p_norm(1), BlockNorm::infinity(), BlockNorm::p_norm(3)});
  for (int t = 0; t < 200; ++t) {
    ProductVector x(Shape{2, 3, 1});
    for (double& v : x.flat()) v = u(rng) + 1e-3;
    const auto n1 = normalize(x, mixed);
    CHECK(testing::max_abs_diff(normalize(n1, mixed), n1) < 1e-15);
    const auto norms = block_norms(n1, mixed);
    for (std::size_t i = 0; i < 3; ++i) CHECK(norms[i] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("weighted_norm_product") {
  const NormSpec inf({BlockNorm::infinity(), BlockNorm::infinity()});
  const std::vector<double> half{0.5, 0.5};
  CHECK(weighted_norm_product(ProductVector::from_blocks({{2, 0}, {0, 3}}), half, inf) ==
        doctest::Approx(std::sqrt(6.0)));
  CHECK(weighted_norm_product(ProductVector::from_blocks({{0.6, 0.8}, {1, 0}}),
                              std::vector<double>{0.3, 0.7}, NormSpec::uniform(2)) ==
        doctest::Approx(1.0));
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  const NormSpec two = NormSpec::uniform(3);
  for (int t = 0; t < 300; ++t) {
    ProductVector x(Shape{2, 2, 3});
    for (double& v : x.flat()) v = u(rng);
    const std::vector<double> b{u(rng), u(rng), u(rng)};
    const BlockScaling a{u(rng), u(rng), u(rng)};
    const double lhs = weighted_norm_product(scale_blocks(a, x), b, two);
    const double rhs = weighted_norm_product(x, b, two) * std::pow(a[0], b[0]) *
                       std::pow(a[1], b[1]) * std::pow(a[2], b[2]);
    CHECK(testing::rel_err(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("partial order") {
  const auto x = ProductVector::from_blocks({{1, 1}, {1, 1}});
  CHECK(partial_order_compare(x, x) == Order::eq);
  CHECK(partial_order_compare(x, ProductVector::from_blocks({{1, 1}, {1, 2}})) == Order::lneq);
  CHECK(partial_order_compare(ProductVector::from_blocks({{0, 2}, {1, 1}}),
                              ProductVector::from_blocks({{1, 1}, {2, 2}})) ==
        Order::incomparable);
  CHECK(partial_order_compare(x, ProductVector::from_blocks({{2, 2}, {2, 2}})) == Order::lt);
  CHECK(partial_order_compare(ProductVector::from_blocks({{2, 2}, {2, 2}}), x) == Order::gt);
  CHECK(partial_order_compare(ProductVector::from_blocks({{1, 2}, {1, 1}}), x) == Order::gneq);
  CHECK(leq(x, x));
  CHECK(!leq(ProductVector::from_blocks({{0, 2}, {1, 1}}), x));
  CHECK_THROWS_AS(partial_order_compare(x, ProductVector::from_blocks({{1, 1, 1}, {1}})),
                  ShapeError);
}
