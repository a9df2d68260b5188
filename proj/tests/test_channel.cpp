#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "icpower/channel.hpp"

using namespace icpower;

namespace {

// Test-side oracle: re-evaluates the SINR definition with an explicit
// interference accumulation pass, independent of the library loop.
std::vector<double> sinr_oracle(const Matrix& g, const std::vector<double>& p,
                                const std::vector<double>& sigma2) {
    const std::size_t K = p.size();
    std::vector<double> denom(K, 0.0);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < K; ++j) denom[k] += g(k, j) * p[j];
    std::vector<double> out(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double signal = g(k, k) * p[k];
        out[k] = signal / (denom[k] - signal + sigma2[k]);
    }
    return out;
}

ChannelRealization random_channel(std::size_t K, std::uint64_t seed) {
    auto cfg = SystemConfig::make(K);
    auto rng = make_rng(seed);
    return sample_channel(cfg, rng);
}

} // namespace

TEST_CASE("sampler is deterministic under a fixed seed", "[channel]") {
    auto cfg = SystemConfig::make(3);
    auto rng_a = make_rng(42);
    auto rng_b = make_rng(42);
    auto ch_a = sample_channel(cfg, rng_a);
    auto ch_b = sample_channel(cfg, rng_b);
    REQUIRE(ch_a.gains == ch_b.gains);

    auto ch_c = sample_channel(cfg, rng_a);
    REQUIRE_FALSE(ch_c.gains == ch_a.gains);
}

TEST_CASE("sampled gains have the configured exponential means", "[channel]") {
    auto cfg = SystemConfig::make(2);
    cfg.mean_gains(0, 0) = 4.0;
    auto rng = make_rng(7);
    const std::size_t draws = 1'000'000;
    Matrix mean_acc(2, 2, 0.0);
    for (std::size_t n = 0; n < draws; ++n) {
        auto ch = sample_channel(cfg, rng);
        for (std::size_t i = 0; i < mean_acc.size(); ++i)
            mean_acc.data()[i] += ch.gains.data()[i];
    }
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t j = 0; j < 2; ++j) {
            const double mean = mean_acc(k, j) / static_cast<double>(draws);
            REQUIRE(mean == Catch::Approx(cfg.mean_gains(k, j)).epsilon(0.01));
        }

    // positivity invariant, diagonal strictly positive
    auto ch = sample_channel(cfg, rng);
    for (std::size_t i = 0; i < ch.gains.size(); ++i) REQUIRE(ch.gains.data()[i] >= 0.0);
    REQUIRE(ch.gains(0, 0) > 0.0);
    REQUIRE(ch.gains(1, 1) > 0.0);
}

TEST_CASE("sinr without interference reduces to SNR", "[channel]") {
    ChannelRealization ch{Matrix::identity(2)};
    PowerAllocation p(2, 2.0);
    auto gammas = sinr(ch, p, {1.0, 1.0});
    REQUIRE(gammas[0] == Catch::Approx(2.0));
    REQUIRE(gammas[1] == Catch::Approx(2.0));
}

TEST_CASE("symmetric all-ones channel splits SINR evenly", "[channel]") {
    ChannelRealization ch{Matrix::constant(2, 2, 1.0)};
    PowerAllocation p(2, 1.0);
    auto gammas = sinr(ch, p, {1.0, 1.0});
    REQUIRE(gammas[0] == Catch::Approx(0.5));
    REQUIRE(gammas[1] == Catch::Approx(0.5));
}

TEST_CASE("sinr matches the independent oracle on a random instance", "[channel]") {
    auto ch = random_channel(3, 11);
    PowerAllocation p({0.7, 1.9, 1.2});
    std::vector<double> sigma2{0.5, 1.0, 2.0};
    auto got = sinr(ch, p, sigma2);
    auto want = sinr_oracle(ch.gains, p.p, sigma2);
    for (std::size_t k = 0; k < 3; ++k)
        REQUIRE(got[k] == Catch::Approx(want[k]).epsilon(1e-12));
}

TEST_CASE("sinr rejects mismatched dimensions", "[channel]") {
    ChannelRealization ch{Matrix::identity(2)};
    REQUIRE_THROWS_AS(sinr(ch, PowerAllocation(3, 1.0), {1.0, 1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(sinr(ch, PowerAllocation(2, 1.0), {1.0}), std::invalid_argument);
}

TEST_CASE("interference-limited SINR on the symmetric channel", "[channel]") {
    ChannelRealization ch{Matrix::constant(2, 2, 1.0)};
    auto gammas = sinr_interference_limited(ch, PowerAllocation(2, 1.0));
    REQUIRE(gammas[0] == Catch::Approx(1.0));
    REQUIRE(gammas[1] == Catch::Approx(1.0));
}

TEST_CASE("interference-limited SINR guards degenerate inputs", "[channel]") {
    ChannelRealization single{Matrix::identity(1)};
    REQUIRE_THROWS_AS(sinr_interference_limited(single, PowerAllocation(1, 1.0)),
                      std::invalid_argument);

    // exactly-zero interference sum
    ChannelRealization ch{Matrix::identity(2)};
    REQUIRE_THROWS_AS(sinr_interference_limited(ch, PowerAllocation(2, 1.0)), std::domain_error);
}

TEST_CASE("interference-limited SINR matches direct evaluation at K=4", "[channel]") {
    auto ch = random_channel(4, 23);
    PowerAllocation p({1.0, 2.0, 0.5, 1.5});
    auto got = sinr_interference_limited(ch, p);
    for (std::size_t k = 0; k < 4; ++k) {
        double denom = 0.0;
        for (std::size_t j = 0; j < 4; ++j)
            if (j != k) denom += ch.gains(k, j) * p[j];
        REQUIRE(got[k] == Catch::Approx(ch.gains(k, k) * p[k] / denom).epsilon(1e-12));
    }
}

TEST_CASE("single-user rate equals log2(1 + SNR)", "[channel]") {
    ChannelRealization ch{Matrix::identity(2)};
    PowerAllocation p({3.0, 3.0});
    auto rates = sum_rate(ch, p, {1.0, 1.0});
    REQUIRE(rates.per_user[0] == Catch::Approx(2.0));
    REQUIRE(rates.per_user[1] == Catch::Approx(2.0));
    REQUIRE(rates.sum == Catch::Approx(4.0));
}

TEST_CASE("zero powers give zero sum rate", "[channel]") {
    auto ch = random_channel(3, 5);
    auto rates = sum_rate(ch, PowerAllocation(3, 0.0), {1.0, 1.0, 1.0});
    REQUIRE(rates.sum == 0.0);
}

TEST_CASE("sum rate equals the sum of per-user rates", "[channel]") {
    auto ch = random_channel(4, 31);
    PowerAllocation p({1.0, 2.5, 0.9, 1.1});
    std::vector<double> sigma2(4, 1.0);
    auto rates = sum_rate(ch, p, sigma2);
    auto gammas = sinr(ch, p, sigma2);
    double total = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        REQUIRE(rates.per_user[k] >= 0.0);
        REQUIRE(rates.per_user[k] == Catch::Approx(std::log2(1.0 + gammas[k])).epsilon(1e-12));
        total += rates.per_user[k];
    }
    REQUIRE(rates.sum == total);
}
