#include "telesched/scheduling.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"

using namespace telesched;

namespace {

CondErrorProbs operating_probs() {
  return CondErrorProbs::from_flip_prob(phase_flip_prob(50.0, 0.003));
}

QubitRecord make(std::uint64_t id, double t, SyndromeHistory h = {}) {
  QubitRecord q = QubitRecord::fresh(id, t);
  q.history = h;
  return q;
}

std::vector<QubitRecord> random_buffer(std::mt19937_64& rng, std::size_t n, bool equal_rounds) {
  std::uniform_int_distribution<std::uint64_t> count(0, 12);
  std::uniform_real_distribution<double> time(0.0, 1.0);
  const std::uint64_t rounds = count(rng);
  std::vector<QubitRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    SyndromeHistory h;
    if (equal_rounds) {
      h.n_minus = std::uniform_int_distribution<std::uint64_t>(0, rounds)(rng);
      h.n_plus = rounds - h.n_minus;
    } else {
      h = {count(rng), count(rng)};
    }
    out.push_back(make(i, equal_rounds ? 0.0 : time(rng), h));
  }
  return out;
}

}  // namespace

TEST(ParsePolicy, NamesRoundTrip) {
  for (auto p : {PolicyKind::kOqf, PolicyKind::kYqf, PolicyKind::kFqf}) {
    EXPECT_EQ(parse_policy(policy_name(p)), p);
  }
  EXPECT_EQ(parse_policy("FQF"), PolicyKind::kFqf);
  EXPECT_THROW(parse_policy("lifo"), std::invalid_argument);
}

TEST(SelectForService, FqfPrefersFreshHistory) {
  const std::vector<QubitRecord> buffer{make(1, 0.0, {5, 0}), make(2, 0.0, {3, 1})};
  EXPECT_EQ(select_for_service(PolicyKind::kFqf, buffer, operating_probs()), 1U);
}

TEST(SelectForService, TimingPolicies) {
  const std::vector<QubitRecord> buffer{make(1, 0.0), make(2, 0.1)};
  EXPECT_EQ(select_for_service(PolicyKind::kYqf, buffer, operating_probs()), 2U);
  EXPECT_EQ(select_for_service(PolicyKind::kOqf, buffer, operating_probs()), 1U);
}

TEST(SelectForService, TiesGoToLowestId) {
  const std::vector<QubitRecord> buffer{make(7, 0.0, {2, 1}), make(3, 0.0, {2, 1}), make(5, 0.0, {2, 1})};
  for (auto p : {PolicyKind::kOqf, PolicyKind::kYqf, PolicyKind::kFqf}) {
    EXPECT_EQ(select_for_service(p, buffer, operating_probs()), 3U);
    EXPECT_EQ(select_for_pushout(p, buffer, operating_probs()), 3U);
  }
}

TEST(SelectForService, EmptyBufferIsCallerError) {
  const std::vector<QubitRecord> empty;
  EXPECT_THROW(select_for_service(PolicyKind::kFqf, empty, operating_probs()), std::invalid_argument);
  EXPECT_THROW(select_for_pushout(PolicyKind::kOqf, empty, operating_probs()), std::invalid_argument);
}

TEST(SelectForPushout, TimingPoliciesDropOldest) {
  const std::vector<QubitRecord> buffer{make(0, 0.1), make(1, 0.0), make(2, 0.2)};
  EXPECT_EQ(select_for_pushout(PolicyKind::kYqf, buffer, operating_probs()), 1U);
  EXPECT_EQ(select_for_pushout(PolicyKind::kOqf, buffer, operating_probs()), 1U);
}

TEST(SelectForPushout, FqfDropsMostMinusOutcomes) {
  const std::vector<QubitRecord> buffer{make(0, 0.0, {0, 3}), make(1, 0.0, {2, 1}), make(2, 0.0, {6, 0})};
  EXPECT_EQ(select_for_pushout(PolicyKind::kFqf, buffer, operating_probs()), 0U);
}

TEST(SelectForPushout, OqfAndYqfAgreeOnRandomBuffers) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const auto buffer = random_buffer(rng, 1 + trial % 9, false);
    EXPECT_EQ(select_for_pushout(PolicyKind::kOqf, buffer, operating_probs()),
              select_for_pushout(PolicyKind::kYqf, buffer, operating_probs()));
  }
}

TEST(SelectForService, FqfIsArgmaxUnderMonotoneTransforms) {
  std::mt19937_64 rng(4);
  const auto probs = operating_probs();
  for (int trial = 0; trial < 500; ++trial) {
    const auto buffer = random_buffer(rng, 1 + trial % 8, false);
    const auto chosen = select_for_service(PolicyKind::kFqf, buffer, probs);
    // Error likelihood is 1 - success, so argmax success == argmin log-error.
    auto log_error = [&](const QubitRecord& q) { return std::log(1.0 - success_prob(q.history, probs)); };
    const auto it = std::min_element(buffer.begin(), buffer.end(), [&](const auto& a, const auto& b) {
      const double la = log_error(a), lb = log_error(b);
      return la < lb || (la == lb && a.id < b.id);
    });
    EXPECT_EQ(chosen, it->id);
  }
}

TEST(SelectForService, FqfWithinBatchPicksFewestMinus) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    const auto buffer = random_buffer(rng, 2 + trial % 6, true);
    const auto chosen = select_for_service(PolicyKind::kFqf, buffer, operating_probs());
    std::uint64_t fewest = buffer[0].history.n_minus;
    std::uint64_t fewest_id = buffer[0].id;
    for (const auto& q : buffer) {
      if (q.history.n_minus < fewest) {
        fewest = q.history.n_minus;
        fewest_id = q.id;
      }
    }
    EXPECT_EQ(chosen, fewest_id);
  }
}

TEST(Admit, FullBufferYqfEvictsOldest) {
  std::vector<QubitRecord> buffer;
  for (std::uint64_t i = 0; i < 5; ++i) buffer.push_back(make(i, 0.1 * static_cast<double>(i), {i, 0}));
  const std::vector<QubitRecord> arrival{make(5, 1.0)};
  const auto evicted = admit(buffer, arrival, 5, PolicyKind::kYqf, operating_probs());
  ASSERT_EQ(evicted, std::vector<std::uint64_t>{0});
  EXPECT_EQ(buffer.size(), 5U);
  EXPECT_TRUE(std::any_of(buffer.begin(), buffer.end(), [](const auto& q) { return q.id == 5; }));
}

TEST(Admit, EmptyBufferAdmitsWholeBatch) {
  std::vector<QubitRecord> buffer;
  std::vector<QubitRecord> batch;
  for (std::uint64_t i = 0; i < 5; ++i) batch.push_back(make(i, 0.0));
  EXPECT_TRUE(admit(buffer, batch, 5, PolicyKind::kFqf, operating_probs()).empty());
  EXPECT_EQ(buffer.size(), 5U);
}

TEST(Admit, FqfEvictsStaleResidentsForFreshBatch) {
  std::vector<QubitRecord> buffer;
  for (std::uint64_t i = 0; i < 4; ++i) buffer.push_back(make(i, 0.0, {0, 2}));
  std::vector<QubitRecord> batch;
  for (std::uint64_t i = 4; i < 8; ++i) batch.push_back(make(i, 0.006));
  const auto evicted = admit(buffer, batch, 5, PolicyKind::kFqf, operating_probs());
  EXPECT_EQ(evicted, (std::vector<std::uint64_t>{0, 1, 2}));
  EXPECT_EQ(buffer.size(), 5U);
}

TEST(Admit, FreshArrivalsNeverEvictedOverWorseResident) {
  std::mt19937_64 rng(17);
  const auto probs = operating_probs();
  for (int trial = 0; trial < 300; ++trial) {
    auto buffer = random_buffer(rng, 6, false);
    // Make sure at least one resident has seen a "-1".
    buffer[trial % 6].history.n_minus += 1;
    std::vector<QubitRecord> batch{make(100, 2.0), make(101, 2.0)};
    const auto evicted = admit(buffer, batch, 6, PolicyKind::kFqf, probs);
    EXPECT_EQ(evicted.size(), 2U);
    for (auto id : evicted) EXPECT_LT(id, 100U);
  }
}

TEST(Admit, RejectsZeroCapacity) {
  std::vector<QubitRecord> buffer;
  const std::vector<QubitRecord> batch{make(0, 0.0)};
  EXPECT_THROW(admit(buffer, batch, 0, PolicyKind::kFqf, operating_probs()), std::invalid_argument);
}

TEST(Admit, UnboundedCapacityNeverEvicts) {
  std::vector<QubitRecord> buffer;
  std::vector<QubitRecord> batch;
  for (std::uint64_t i = 0; i < 1000; ++i) batch.push_back(make(i, 0.0));
  EXPECT_TRUE(admit(buffer, batch, kUnboundedCapacity, PolicyKind::kOqf, operating_probs()).empty());
}

TEST(Determinism, SameInputSameChoice) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto buffer = random_buffer(rng, 5, trial % 2 == 0);
    for (auto p : {PolicyKind::kOqf, PolicyKind::kYqf, PolicyKind::kFqf}) {
      EXPECT_EQ(select_for_service(p, buffer, operating_probs()), select_for_service(p, buffer, operating_probs()));
      auto reversed = buffer;
      std::reverse(reversed.begin(), reversed.end());
      EXPECT_EQ(select_for_service(p, buffer, operating_probs()),
                select_for_service(p, reversed, operating_probs()));
      EXPECT_EQ(select_for_pushout(p, buffer, operating_probs()),
                select_for_pushout(p, reversed, operating_probs()));
    }
  }
}
