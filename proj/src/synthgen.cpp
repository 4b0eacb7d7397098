#include "segunc/synthgen.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "segunc/error.hpp"

namespace segunc {

Regime parse_regime(std::string_view name)
{
    if (name == "calibrated") {
        return Regime::Calibrated;
    }
    if (name == "overconfident") {
        return Regime::Overconfident;
    }
    if (name == "underconfident") {
        return Regime::Underconfident;
    }
    throw Error(ErrorCode::InvalidSpec, "unknown regime '" + std::string(name) + "'");
}

std::string_view to_string(Regime regime) noexcept
{
    switch (regime) {
    case Regime::Calibrated: return "calibrated";
    case Regime::Overconfident: return "overconfident";
    case Regime::Underconfident: return "underconfident";
    }
    return "unknown";
}

void SynthSpec::validate() const
{
    std::ostringstream msg;
    if (height == 0 || width == 0 || k == 0 || t == 0) {
        msg << "height, width, k and t must all be positive";
    } else if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
        msg << "noise_scale must be a finite value >= 0, got " << noise_scale;
    } else if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        msg << "gamma must be a finite value > 0, got " << gamma;
    } else if (regime == Regime::Calibrated && gamma != 1.0) {
        msg << "calibrated regime requires gamma = 1, got " << gamma;
    } else if (regime == Regime::Overconfident && !(gamma > 1.0)) {
        msg << "overconfident regime requires gamma > 1, got " << gamma;
    } else if (regime == Regime::Underconfident && !(gamma < 1.0)) {
        msg << "underconfident regime requires gamma < 1, got " << gamma;
    } else {
        return;
    }
    throw Error(ErrorCode::InvalidSpec, msg.str());
}

double PortableRandom::uniform_open() noexcept
{
    return (static_cast<double>(engine_() >> 11U) + 0.5) * 0x1.0p-53;
}

double PortableRandom::normal() noexcept
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
    const double angle = 2.0 * std::numbers::pi * uniform_open();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

SynthCase generate(const SynthSpec& spec)
{
    spec.validate();
    const auto pixels = static_cast<std::size_t>(spec.height) * spec.width;
    const auto samples = static_cast<std::size_t>(spec.k) * spec.t;
    std::vector<float> values(pixels * samples);
    std::vector<std::uint8_t> truth(pixels);

    PortableRandom rng(spec.seed);
    for (std::size_t i = 0; i < pixels; ++i) {
        const double p = rng.uniform_open();
        truth[i] = rng.uniform_open() < p ? 1 : 0;
        // gamma * logit(p) is the logit of p^g / (p^g + (1-p)^g).
        const double logit = spec.gamma * (std::log(p) - std::log1p(-p));
        for (std::size_t s = 0; s < samples; ++s) {
            const double jitter = spec.noise_scale * rng.normal();
            values[s * pixels + i] = static_cast<float>(1.0 / (1.0 + std::exp(-(logit + jitter))));
        }
    }
    return {SampleStack(spec.case_id, spec.k, spec.t, spec.height, spec.width, std::move(values)),
            BinaryMask(spec.height, spec.width, std::move(truth))};
}

} // namespace segunc
