#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace segunc {

// Per-pass foreground probabilities for one case, laid out [member][pass][row][col].
// Immutable once constructed; the constructor rejects anything outside [0, 1].
class SampleStack {
public:
    SampleStack(std::string case_id, std::uint32_t k, std::uint32_t t,
                std::uint32_t height, std::uint32_t width, std::vector<float> values);

    [[nodiscard]] const std::string& case_id() const noexcept { return case_id_; }
    [[nodiscard]] std::uint32_t members() const noexcept { return k_; }
    [[nodiscard]] std::uint32_t passes() const noexcept { return t_; }
    [[nodiscard]] std::uint32_t height() const noexcept { return height_; }
    [[nodiscard]] std::uint32_t width() const noexcept { return width_; }

    [[nodiscard]] std::size_t pixel_count() const noexcept
    {
        return static_cast<std::size_t>(height_) * width_;
    }
    [[nodiscard]] std::size_t sample_count() const noexcept
    {
        return static_cast<std::size_t>(k_) * t_;
    }

    [[nodiscard]] std::span<const float> values() const noexcept { return values_; }

    // Flat sample index s = member * T + pass.
    [[nodiscard]] std::span<const float> sample(std::size_t s) const noexcept
    {
        return std::span<const float>(values_).subspan(s * pixel_count(), pixel_count());
    }

    [[nodiscard]] float at(std::uint32_t member, std::uint32_t pass, std::uint32_t row,
                           std::uint32_t col) const noexcept
    {
        return values_[((static_cast<std::size_t>(member) * t_ + pass) * height_ + row) * width_ + col];
    }

private:
    std::string case_id_;
    std::uint32_t k_;
    std::uint32_t t_;
    std::uint32_t height_;
    std::uint32_t width_;
    std::vector<float> values_;
};

// H×W mean foreground probability. Accumulated in double, so stored in double.
class ProbabilityMap {
public:
    ProbabilityMap(std::uint32_t height, std::uint32_t width, std::vector<double> values);

    [[nodiscard]] std::uint32_t height() const noexcept { return height_; }
    [[nodiscard]] std::uint32_t width() const noexcept { return width_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

private:
    std::uint32_t height_;
    std::uint32_t width_;
    std::vector<double> values_;
};

// Unconstrained real-valued H×W field (entropy, mutual information, confidence).
struct ScalarField {
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

// Foreground/background mask; stored as 0/1 bytes.
class BinaryMask {
public:
    // Any nonzero input byte becomes foreground.
    BinaryMask(std::uint32_t height, std::uint32_t width, std::vector<std::uint8_t> values);

    [[nodiscard]] std::uint32_t height() const noexcept { return height_; }
    [[nodiscard]] std::uint32_t width() const noexcept { return width_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const std::uint8_t> values() const noexcept { return values_; }
    [[nodiscard]] bool operator[](std::size_t i) const noexcept { return values_[i] != 0; }
    [[nodiscard]] std::size_t foreground_count() const noexcept;

private:
    std::uint32_t height_;
    std::uint32_t width_;
    std::vector<std::uint8_t> values_;
};

// Binary entropy of every individual pass, same layout as SampleStack.
class PerPassEntropyStack {
public:
    PerPassEntropyStack(std::uint32_t k, std::uint32_t t, std::uint32_t height,
                        std::uint32_t width, std::vector<double> values);

    [[nodiscard]] std::uint32_t members() const noexcept { return k_; }
    [[nodiscard]] std::uint32_t passes() const noexcept { return t_; }
    [[nodiscard]] std::uint32_t height() const noexcept { return height_; }
    [[nodiscard]] std::uint32_t width() const noexcept { return width_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

private:
    std::uint32_t k_;
    std::uint32_t t_;
    std::uint32_t height_;
    std::uint32_t width_;
    std::vector<double> values_;
};

// Throws ShapeMismatch naming `what` when the two extents differ.
void require_same_shape(std::uint32_t h1, std::uint32_t w1, std::uint32_t h2, std::uint32_t w2,
                        const char* what);

} // namespace segunc
