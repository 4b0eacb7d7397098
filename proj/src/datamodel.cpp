#include "segunc/datamodel.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "segunc/error.hpp"

namespace segunc {

namespace {

void require_positive(std::uint32_t height, std::uint32_t width)
{
    if (height == 0 || width == 0) {
        std::ostringstream msg;
        msg << "dimensions must be positive, got " << height << "x" << width;
        throw Error(ErrorCode::InvalidDimensions, msg.str());
    }
}

void require_count(std::size_t expected, std::size_t actual)
{
    if (expected != actual) {
        std::ostringstream msg;
        msg << "expected " << expected << " values, got " << actual;
        throw Error(ErrorCode::InvalidDimensions, msg.str());
    }
}

template <typename T>
void require_in_range(std::span<const T> values, T low, T high)
{
    for (std::size_t i = 0; i < values.size(); ++i) {
        // Negated comparison so NaN is rejected as well.
        if (!(values[i] >= low && values[i] <= high)) {
            std::ostringstream msg;
            msg << "value " << values[i] << " at index " << i << " outside [" << low << ", "
                << high << "]";
            throw Error(ErrorCode::ValueOutOfRange, msg.str());
        }
    }
}

} // namespace

SampleStack::SampleStack(std::string case_id, std::uint32_t k, std::uint32_t t,
                         std::uint32_t height, std::uint32_t width, std::vector<float> values)
    : case_id_(std::move(case_id)), k_(k), t_(t), height_(height), width_(width),
      values_(std::move(values))
{
    if (k_ == 0 || t_ == 0) {
        throw Error(ErrorCode::InvalidDimensions, "K and T must be at least 1");
    }
    require_positive(height_, width_);
    require_count(sample_count() * pixel_count(), values_.size());
    require_in_range<float>(values_, 0.0F, 1.0F);
}

ProbabilityMap::ProbabilityMap(std::uint32_t height, std::uint32_t width,
                               std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values))
{
    require_positive(height_, width_);
    require_count(static_cast<std::size_t>(height_) * width_, values_.size());
    require_in_range<double>(values_, 0.0, 1.0);
}

BinaryMask::BinaryMask(std::uint32_t height, std::uint32_t width,
                       std::vector<std::uint8_t> values)
    : height_(height), width_(width), values_(std::move(values))
{
    require_positive(height_, width_);
    require_count(static_cast<std::size_t>(height_) * width_, values_.size());
    for (auto& v : values_) {
        v = v != 0 ? 1 : 0;
    }
}

std::size_t BinaryMask::foreground_count() const noexcept
{
    return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), std::uint8_t{1}));
}

PerPassEntropyStack::PerPassEntropyStack(std::uint32_t k, std::uint32_t t, std::uint32_t height,
                                         std::uint32_t width, std::vector<double> values)
    : k_(k), t_(t), height_(height), width_(width), values_(std::move(values))
{
    if (k_ == 0 || t_ == 0) {
        throw Error(ErrorCode::InvalidDimensions, "K and T must be at least 1");
    }
    require_positive(height_, width_);
    require_count(static_cast<std::size_t>(k_) * t_ * height_ * width_, values_.size());
    require_in_range<double>(values_, 0.0, std::numbers::ln2 + 1e-12);
}

void require_same_shape(std::uint32_t h1, std::uint32_t w1, std::uint32_t h2, std::uint32_t w2,
                        const char* what)
{
    if (h1 != h2 || w1 != w2) {
        std::ostringstream msg;
        msg << what << ": " << h1 << "x" << w1 << " vs " << h2 << "x" << w2;
        throw Error(ErrorCode::ShapeMismatch, msg.str());
    }
}

} // namespace segunc
