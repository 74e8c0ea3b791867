#include <gtest/gtest.h>

#include <sstream>

#include "hartree/config.hpp"
#include "hartree/errors.hpp"

using namespace hartree;

namespace {

const char* kMinimal = R"(
[domain]
side_length = 2
nodes_per_side = 9

[time]
horizon = 0.5
steps = 10
scheme = coherent

[initial]
family = dirichlet-eigenmode
p = 1
q = 2
)";

ProblemSpec parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, MinimalEchoesValues) {
  const auto spec = parse(kMinimal);
  EXPECT_DOUBLE_EQ(spec.side_length, 2.0);
  EXPECT_EQ(spec.nodes_per_side, 9);
  EXPECT_DOUBLE_EQ(spec.horizon, 0.5);
  EXPECT_EQ(spec.steps, 10u);
  EXPECT_EQ(spec.scheme, SchemeKind::coherent);
  EXPECT_EQ(spec.initial.family, InitialSpec::Family::eigenmode);
  EXPECT_EQ(spec.initial.p, 1);
  EXPECT_EQ(spec.initial.q, 2);
  EXPECT_TRUE(spec.coupling.is_zero());
  EXPECT_EQ(spec.potential.family, PotentialSpec::Family::none);
  EXPECT_DOUBLE_EQ(spec.relative_tolerance, 1e-13);
  EXPECT_EQ(spec.output_directory, "output");
  EXPECT_TRUE(spec.exact_solution().has_value());
}

TEST(Config, IncoherentScheme) {
  std::string text = kMinimal;
  text.replace(text.find("coherent"), 8, "incoherent");
  EXPECT_EQ(parse(text).scheme, SchemeKind::incoherent);
}

TEST(Config, FullNonlinearSpec) {
  const auto spec = parse(std::string(kMinimal) + R"(
[potential]
family = gaussian-well
depth = 3
sigma = 0.2
[kernel]
family = smoothed-indicator
radius = 0.3
width = 0.05
amplitude = 2
[coupling]
family = plateau
value = 5
[solver]
relative_tolerance = 1e-12
initial_guess = extrapolated
[output]
directory = runs/a   # trailing comment
snapshot_stride = 5
)");
  EXPECT_EQ(spec.potential.family, PotentialSpec::Family::gaussian_well);
  EXPECT_EQ(spec.kernel.family, KernelSpec::Family::smoothed_indicator);
  EXPECT_DOUBLE_EQ(spec.kernel.amplitude, 2.0);
  EXPECT_EQ(spec.coupling.family, CouplingField::Family::plateau);
  EXPECT_DOUBLE_EQ(spec.coupling.margin, 0.2);  // 10% of the side
  EXPECT_DOUBLE_EQ(spec.relative_tolerance, 1e-12);
  EXPECT_TRUE(spec.fixed_point.extrapolate_guess);
  EXPECT_EQ(spec.output_directory, "runs/a");
  EXPECT_EQ(spec.snapshot_stride, 5u);
  EXPECT_FALSE(spec.exact_solution().has_value());
}

TEST(Config, OddKernelTableRejected) {
  const auto msg = error_of(std::string(kMinimal) + R"(
[kernel]
family = table
table_radius = 1
values = 0 0 0  0 1 0.5  0 0 0
[coupling]
value = 1
)");
  EXPECT_NE(msg.find("kernel.values"), std::string::npos) << msg;
  EXPECT_NE(msg.find("V(-x) = V(x)"), std::string::npos) << msg;
}

TEST(Config, EvenKernelTableAccepted) {
  const auto spec = parse(std::string(kMinimal) + R"(
[kernel]
family = table
table_radius = 1
values = 0 0.25 0  0.25 1 0.25  0 0.25 0
[coupling]
value = 1
)");
  EXPECT_EQ(spec.kernel.family, KernelSpec::Family::table);
}

TEST(Config, UnknownKeyRejected) {
  const auto msg = error_of(std::string(kMinimal) + "[solver]\nrelative_tolerence = 1e-9\n");
  EXPECT_NE(msg.find("unknown key 'solver.relative_tolerence'"), std::string::npos) << msg;
}

TEST(Config, KeyOfOtherFamilyRejected) {
  const auto msg = error_of(std::string(kMinimal) + "[potential]\nfamily = none\nstrength = 3\n");
  EXPECT_NE(msg.find("potential.strength"), std::string::npos) << msg;
}

TEST(Config, ErrorsCarryLineNumbers) {
  const auto msg = error_of(std::string(kMinimal) + "[output]\nthis line has no equals sign\n");
  EXPECT_NE(msg.find("test.cfg:16"), std::string::npos) << msg;
  EXPECT_NE(error_of(std::string(kMinimal) + "[bogus]\n").find("test.cfg:15"), std::string::npos);
  const auto bad_number = error_of(std::string(kMinimal) + "[solver]\nrelative_tolerance = 1e-1x3\n");
  EXPECT_NE(bad_number.find("test.cfg:16"), std::string::npos) << bad_number;
}

TEST(Config, MissingAndDuplicateKeys) {
  std::string text = kMinimal;
  text.erase(text.find("horizon = 0.5\n"), 14);
  EXPECT_NE(error_of(text).find("time.horizon"), std::string::npos);
  EXPECT_NE(error_of(std::string(kMinimal) + "[solver]\nmax_iterations = 3\nmax_iterations = 4\n").find("duplicate"),
            std::string::npos);
}

TEST(Config, EigenmodeIndicesValidated) {
  std::string text = kMinimal;
  text.replace(text.find("p = 1"), 5, "p = 0");
  EXPECT_NE(error_of(text).find("initial.p"), std::string::npos);
}

TEST(Config, CouplingNeedsKernel) {
  EXPECT_NE(error_of(std::string(kMinimal) + "[coupling]\nvalue = 2\n").find("kernel.family"), std::string::npos);
}

TEST(Config, MissingFileIsConfigError) {
  EXPECT_THROW(load_config("/nonexistent/config.cfg"), ConfigError);
}
