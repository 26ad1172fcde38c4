#include <gtest/gtest.h>

#include <cmath>

#include "firesim/fields.hpp"
#include "support/errors.hpp"
#include "support/oracles.hpp"

using namespace firesim;

TEST(GridSpec, RejectsTinyOrBadSpacing) {
  EXPECT_EQ(code_of([] { GridSpec(2, 5, 1.0); }), ErrorCode::InvalidGrid);
  EXPECT_EQ(code_of([] { GridSpec(5, 2, 1.0); }), ErrorCode::InvalidGrid);
  EXPECT_EQ(code_of([] { GridSpec(3, 3, 0.0); }), ErrorCode::InvalidGrid);
  EXPECT_EQ(code_of([] { GridSpec(3, 3, -1.0); }), ErrorCode::InvalidGrid);
  EXPECT_EQ(code_of([] { GridSpec(3, 3, NAN); }), ErrorCode::InvalidGrid);
  EXPECT_EQ(code_of([] { GridSpec(3, 3, INFINITY); }), ErrorCode::InvalidGrid);
  const GridSpec s(3, 4, 0.5);
  EXPECT_EQ(s.cells(), 12u);
  EXPECT_EQ(s.index(2, 1), 9u);
}

TEST(ScalarField, RejectsNonFiniteAndWrongLength) {
  const GridSpec s(3, 3, 1.0);
  std::vector<double> v(9, 0.0);
  v[5] = NAN;
  EXPECT_EQ(code_of([&] { ScalarField(s, v); }), ErrorCode::NonFinite);
  EXPECT_EQ(code_of([&] { ScalarField(s, std::vector<double>(8, 0.0)); }), ErrorCode::SpecMismatch);
  EXPECT_EQ(code_of([&] { ScalarField(s, INFINITY); }), ErrorCode::NonFinite);
  EXPECT_EQ(code_of([&] { VectorField(s, std::vector<double>(9, 0.0), std::vector<double>(9, INFINITY)); }),
            ErrorCode::NonFinite);
}

TEST(ScalarField, GenerateUsesEastNorthCoordinates) {
  const GridSpec s(4, 5, 2.0);
  const auto f = ScalarField::generate(s, [](double x, double y) { return x + 100.0 * y; });
  // row 0 is the north edge: y = (height - 1) * dx
  EXPECT_EQ(f(0, 0), 600.0);
  EXPECT_EQ(f(3, 0), 0.0);
  EXPECT_EQ(f(3, 4), 8.0);
}

TEST(MaskFrame, RejectsNonBinaryCells) {
  const GridSpec s(3, 3, 1.0);
  std::vector<std::uint8_t> bits(9, 0);
  bits[4] = 2;
  EXPECT_EQ(code_of([&] { MaskFrame(s, bits); }), ErrorCode::BadRange);
}

TEST(MaskSequence, Invariants) {
  const GridSpec a(3, 3, 1.0), b(3, 4, 1.0);
  EXPECT_EQ(code_of([] { MaskSequence({}, 5.0); }), ErrorCode::EmptyInput);
  EXPECT_EQ(code_of([&] { MaskSequence({MaskFrame::filled(a, false)}, 0.0); }), ErrorCode::BadRange);
  EXPECT_EQ(code_of([&] { MaskSequence({MaskFrame::filled(a, false), MaskFrame::filled(b, false)}, 5.0); }),
            ErrorCode::SpecMismatchAcrossFrames);
}

TEST(FieldMap2, ConstantAlgebraAndIdentity) {
  const GridSpec s(4, 4, 1.0);
  const auto sum = field_map2(ScalarField(s, 1.0), ScalarField(s, 2.0), std::plus<>());
  for (double v : sum.values()) EXPECT_EQ(v, 3.0);
  SplitRng rng(3);
  const auto f = oracle::random_field(s, rng, -5, 5);
  EXPECT_EQ(field_map2(f, ScalarField(s, 0.0), std::plus<>()), f);
}

TEST(FieldMap2, PaddedSquaresMatchHandComputation) {
  const GridSpec s(3, 3, 1.0);
  // [[1,2],[3,4]] padded with zeros to 3x3
  const ScalarField a(s, std::vector<double>{1, 2, 0, 3, 4, 0, 0, 0, 0});
  const auto sq = field_map2(a, a, std::multiplies<>());
  const double expected[9] = {1, 4, 0, 9, 16, 0, 0, 0, 0};
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(sq[i], expected[i]) << i;
}

TEST(FieldMap2, Errors) {
  const GridSpec s(3, 3, 1.0), t(3, 3, 2.0);
  EXPECT_EQ(code_of([&] { field_map2(ScalarField(s, 1.0), ScalarField(t, 1.0), std::plus<>()); }),
            ErrorCode::SpecMismatch);
  EXPECT_EQ(code_of([&] { field_map2(ScalarField(s, 1.0), ScalarField(s, 0.0), std::divides<>()); }),
            ErrorCode::NonFinite);
}

TEST(FieldMap2, AddCommutativeAndAssociativeOnRandomFields) {
  const GridSpec s(6, 7, 1.0);
  SplitRng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    // dyadic values keep every partial sum exact, so associativity is exact too
    const auto dyadic = [&] {
      return field_map(oracle::random_field(s, rng, -8, 8), [](double v) { return std::round(v * 64.0) / 64.0; });
    };
    const auto a = dyadic(), b = dyadic(), c = dyadic();
    EXPECT_EQ(field_map2(a, b, std::plus<>()), field_map2(b, a, std::plus<>()));
    EXPECT_EQ(field_map2(field_map2(a, b, std::plus<>()), c, std::plus<>()),
              field_map2(a, field_map2(b, c, std::plus<>()), std::plus<>()));
  }
}

TEST(MaskFromField, Examples) {
  const GridSpec s(5, 11, 1.0);
  EXPECT_EQ(mask_from_field(ScalarField(s, 1.0), 0.5).count(), s.cells());
  EXPECT_EQ(mask_from_field(ScalarField(s, 0.0), 0.5).count(), 0u);
  const auto ramp = ScalarField::generate(s, [](double x, double) { return x / 10.0; });
  const auto m = mask_from_field(ramp, 0.5);
  for (std::size_t r = 0; r < s.height; ++r)
    for (std::size_t c = 0; c < s.width; ++c) EXPECT_EQ(m(r, c), c >= 5) << r << "," << c;
  EXPECT_EQ(m.count(), 6u * s.height);
}

TEST(FieldFromMask, Examples) {
  const GridSpec s(9, 9, 1.0);
  const auto ones = field_from_mask(MaskFrame::filled(s, true), 0.2, 3.0, 0.0);
  for (double v : ones.values()) EXPECT_EQ(v, 3.0);
  for (double radius : {0.0, 1.0, 2.5}) {
    const auto zeros = field_from_mask(MaskFrame::filled(s, false), 0.2, 3.0, radius);
    for (double v : zeros.values()) EXPECT_EQ(v, 0.2);
  }
  // an all-ones mask stays exactly t_burn under any smoothing
  for (double v : field_from_mask(MaskFrame::filled(s, true), 0.0, 1.0, 2.0).values()) EXPECT_EQ(v, 1.0);
}

TEST(FieldFromMask, SingleCellMatchesDirectConvolution) {
  const GridSpec s(9, 9, 1.0);
  std::vector<std::uint8_t> bits(81, 0);
  bits[s.index(4, 4)] = 1;
  const MaskFrame m(s, bits);
  const double radius = 1.0;
  const auto f = field_from_mask(m, 0.0, 1.0, radius);

  // sigma = radius / 2, truncated to offsets within 3 sigma, normalised
  const double sigma = radius / 2.0;
  double norm = 0.0;
  for (int i = -3; i <= 3; ++i)
    for (int j = -3; j <= 3; ++j)
      if (i * i + j * j <= 9.0 * sigma * sigma) norm += std::exp(-(i * i + j * j) / (2.0 * sigma * sigma));
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c) {
      const int di = r - 4, dj = c - 4;
      const double d2 = di * di + dj * dj;
      const double expected = d2 <= 9.0 * sigma * sigma ? std::exp(-d2 / (2.0 * sigma * sigma)) / norm : 0.0;
      EXPECT_NEAR(f(r, c), expected, 1e-15) << r << "," << c;
    }
  // peak at the centre, non-increasing along each ray
  for (int d = 0; d < 4; ++d) {
    EXPECT_GE(f(4, 4 + d), f(4, 5 + d));
    EXPECT_GE(f(4 + d, 4), f(5 + d, 4));
    EXPECT_GE(f(4 - d, 4 - d), f(3 - d, 3 - d));
  }
  EXPECT_GT(f(4, 4), f(4, 5));
}

TEST(FieldFromMask, BadRange) {
  const GridSpec s(3, 3, 1.0);
  EXPECT_EQ(code_of([&] { field_from_mask(MaskFrame::filled(s, true), 1.0, 1.0, 0.0); }), ErrorCode::BadRange);
  EXPECT_EQ(code_of([&] { field_from_mask(MaskFrame::filled(s, true), 1.0, 0.5, 0.0); }), ErrorCode::BadRange);
  EXPECT_EQ(code_of([&] { field_from_mask(MaskFrame::filled(s, true), 0.0, 1.0, -1.0); }), ErrorCode::BadRange);
}

TEST(FieldFromMask, RoundTripAndBoundsOnRandomMasks) {
  SplitRng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const GridSpec s(3 + trial % 9, 3 + (trial / 9) % 7, 1.0);
    const auto m = oracle::random_mask(s, rng, rng.uniform());
    EXPECT_EQ(mask_from_field(field_from_mask(m, 0.0, 1.0, 0.0), 0.5), m);
    const double ta = rng.uniform(-2, 2);
    const double tb = ta + rng.uniform(0.1, 3);
    const double radius = rng.uniform(0, 4);
    const auto f = field_from_mask(m, ta, tb, radius);
    EXPECT_GE(f.min(), ta);
    EXPECT_LE(f.max(), tb);
  }
}
