#include <gtest/gtest.h>

#include "property_checks.hpp"

namespace mzqfi::props {
namespace {

constexpr std::uint64_t kSeed = 20240611;

void expect_ok(const PropertyResult& r) {
  EXPECT_GE(r.cases, kDefaultCases);
  EXPECT_EQ(r.failures, 0) << r.name << ": " << r.first_failure;
}

TEST(Property, ProbabilityNormalization) { expect_ok(probability_normalization(kSeed)); }
TEST(Property, FimRankOne) { expect_ok(fim_rank_one(kSeed)); }
TEST(Property, GradientMatchesFiniteDifference) { expect_ok(gradient_matches_finite_difference(kSeed)); }
TEST(Property, CircuitMatchesFringe) { expect_ok(circuit_matches_fringe(kSeed)); }
TEST(Property, GatesAreUnitary) { expect_ok(gates_are_unitary(kSeed)); }
TEST(Property, LossChannelIsCptp) { expect_ok(loss_channel_is_cptp(kSeed)); }
TEST(Property, DephasingChannelsAreCptp) { expect_ok(dephasing_channels_are_cptp(kSeed)); }
TEST(Property, EncodingPreservesState) { expect_ok(encoding_preserves_state(kSeed)); }
TEST(Property, ProbeStatesNormalized) { expect_ok(probe_states_normalized(kSeed)); }
TEST(Property, SldSaturatesCircuitFim) { expect_ok(sld_saturates_circuit_fim(kSeed)); }
TEST(Property, VisibilityRoundTrip) { expect_ok(visibility_round_trip(kSeed)); }
TEST(Property, ShrinkageContractsAndCorrects) { expect_ok(shrinkage_contracts_and_corrects(kSeed)); }
TEST(Property, XEstimateRoundTrip) { expect_ok(x_estimate_round_trip(kSeed)); }
TEST(Property, FringeFitRecoversVisibility) { expect_ok(fringe_fit_recovers_visibility(kSeed)); }
TEST(Property, SamplingIsDeterministic) { expect_ok(sampling_is_deterministic(kSeed)); }
TEST(Property, BootstrapIsDeterministic) { expect_ok(bootstrap_is_deterministic(kSeed)); }
TEST(Property, CsvNumbersRoundTrip) { expect_ok(csv_numbers_round_trip(kSeed)); }

TEST(Property, SeedStreamsAreReproducible) {
  const auto a = fim_rank_one(7, 50), b = fim_rank_one(7, 50);
  EXPECT_EQ(a.failures, b.failures);
  EXPECT_EQ(a.cases, 50);
}

}  // namespace
}  // namespace mzqfi::props
