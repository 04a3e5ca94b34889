#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "ratekit/common.hpp"

namespace ratekit {

// The 9 aggregated rating classes. The enum value IS the regression target
// (0 = best credit quality, 8 = worst).
enum class RatingClass : int {
    Aaa = 0,
    Aa = 1,
    A = 2,
    Baa = 3,
    Ba = 4,
    B = 5,
    Caa = 6,
    Ca = 7,
    C = 8,
};

inline constexpr int kNumClasses = 9;

std::string_view class_name(RatingClass c);

constexpr int class_target(RatingClass c) { return static_cast<int>(c); }

// Inverse of class_target; throws DataError outside 0..8.
RatingClass target_to_class(int target);

// Aaa..Baa are investment grade, Ba..C speculative.
bool investment_grade(RatingClass c);

// The 21 admissible notch codes, best to worst.
const std::array<std::string_view, 21>& notch_codes();

// One of the 21 fine-grained Moody's notches. Construction validates the
// code; any other string is rejected at ingestion.
class NotchRating {
public:
    static NotchRating parse(std::string_view code); // throws DataError
    static std::optional<NotchRating> try_parse(std::string_view code);

    std::string_view code() const { return notch_codes()[index_]; }

    // Class aggregation: strip the numeric modifier; Aaa, Ca, C map to themselves.
    RatingClass aggregated() const;

private:
    explicit NotchRating(int index) : index_(index) {}
    int index_;
};

inline RatingClass aggregate_notch(const NotchRating& notch) { return notch.aggregated(); }

// Parse a class name ("Baa"), or nullopt.
std::optional<RatingClass> try_parse_class(std::string_view name);

// Accepts either a notch code ("Baa2") or a class name ("Baa"); notches are
// aggregated. Throws DataError naming the offending value otherwise.
RatingClass parse_label(std::string_view value);

// Continuous 0-8 model score -> class: clamp to [0, 8], round to nearest
// integer with ties away from zero. Throws NumericError on non-finite input.
RatingClass discretize(double score);

} // namespace ratekit
