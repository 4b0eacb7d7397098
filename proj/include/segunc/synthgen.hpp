#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "segunc/datamodel.hpp"

namespace segunc {

enum class Regime { Calibrated, Overconfident, Underconfident };

[[nodiscard]] Regime parse_regime(std::string_view name);
[[nodiscard]] std::string_view to_string(Regime regime) noexcept;

struct SynthSpec {
    std::string case_id = "synth";
    std::uint32_t height = 1;
    std::uint32_t width = 1;
    std::uint32_t k = 1;
    std::uint32_t t = 1;
    std::uint64_t seed = 0;
    Regime regime = Regime::Calibrated;
    // Sharpening exponent: the reported probability is p^g / (p^g + (1-p)^g).
    // Must be 1 for Calibrated, > 1 for Overconfident, < 1 for Underconfident.
    double gamma = 1.0;
    double noise_scale = 0.0; // std of per-sample logit jitter

    void validate() const; // throws InvalidSpec
};

struct SynthCase {
    SampleStack stack;
    BinaryMask truth;
};

// Pixels are generated in row-major order from one mt19937_64 seeded with
// `seed`. Per pixel the draws are: base probability p = U(0,1), truth = U(0,1) < p,
// then K*T standard normals (Box-Muller, pairs consumed in order) for the logit
// jitter, sample[k][t] = sigmoid(gamma * logit(p) + noise_scale * z). The normals
// are drawn even when noise_scale is 0, so p and truth depend only on the seed.
// Uniforms are ((x >> 11) + 0.5) * 2^-53, so they never hit 0 or 1.
[[nodiscard]] SynthCase generate(const SynthSpec& spec);

// Portable normal source over mt19937_64; std::normal_distribution is
// implementation-defined, this is not.
class PortableRandom {
public:
    explicit PortableRandom(std::uint64_t seed) : engine_(seed) {}

    double uniform_open() noexcept;
    double normal() noexcept;

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace segunc
