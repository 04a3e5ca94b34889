#include "ratekit/domain.hpp"

#include <algorithm>
#include <cmath>

namespace ratekit {

namespace {

constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "Aaa", "Aa", "A", "Baa", "Ba", "B", "Caa", "Ca", "C"};

// Aggregated class per notch, order matching notch_codes().
constexpr std::array<RatingClass, 21> kNotchClass = {
    RatingClass::Aaa,                                    // Aaa
    RatingClass::Aa,  RatingClass::Aa,  RatingClass::Aa, // Aa1..Aa3
    RatingClass::A,   RatingClass::A,   RatingClass::A,  // A1..A3
    RatingClass::Baa, RatingClass::Baa, RatingClass::Baa,
    RatingClass::Ba,  RatingClass::Ba,  RatingClass::Ba,
    RatingClass::B,   RatingClass::B,   RatingClass::B,
    RatingClass::Caa, RatingClass::Caa, RatingClass::Caa,
    RatingClass::Ca,
    RatingClass::C,
};

} // namespace

std::string_view class_name(RatingClass c) {
    return kClassNames[static_cast<std::size_t>(class_target(c))];
}

RatingClass target_to_class(int target) {
    if (target < 0 || target >= kNumClasses)
        throw DataError("rating target out of range 0..8: " + std::to_string(target));
    return static_cast<RatingClass>(target);
}

bool investment_grade(RatingClass c) { return class_target(c) <= class_target(RatingClass::Baa); }

const std::array<std::string_view, 21>& notch_codes() {
    static const std::array<std::string_view, 21> codes = {
        "Aaa",  "Aa1",  "Aa2",  "Aa3", "A1",  "A2",  "A3",
        "Baa1", "Baa2", "Baa3", "Ba1", "Ba2", "Ba3", "B1",
        "B2",   "B3",   "Caa1", "Caa2", "Caa3", "Ca", "C"};
    return codes;
}

std::optional<NotchRating> NotchRating::try_parse(std::string_view code) {
    const auto& codes = notch_codes();
    const auto it = std::find(codes.begin(), codes.end(), code);
    if (it == codes.end()) return std::nullopt;
    return NotchRating(static_cast<int>(it - codes.begin()));
}

NotchRating NotchRating::parse(std::string_view code) {
    auto parsed = try_parse(code);
    if (!parsed) throw DataError("unknown rating notch code: \"" + std::string(code) + "\"");
    return *parsed;
}

RatingClass NotchRating::aggregated() const { return kNotchClass[static_cast<std::size_t>(index_)]; }

std::optional<RatingClass> try_parse_class(std::string_view name) {
    const auto it = std::find(kClassNames.begin(), kClassNames.end(), name);
    if (it == kClassNames.end()) return std::nullopt;
    return static_cast<RatingClass>(it - kClassNames.begin());
}

RatingClass parse_label(std::string_view value) {
    if (auto notch = NotchRating::try_parse(value)) return notch->aggregated();
    if (auto cls = try_parse_class(value)) return *cls;
    throw DataError("unknown rating label: \"" + std::string(value) + "\"");
}

RatingClass discretize(double score) {
    if (!std::isfinite(score)) throw NumericError("cannot discretize non-finite score");
    const double clamped = std::clamp(score, 0.0, 8.0);
    // llround rounds halfway cases away from zero.
    return static_cast<RatingClass>(static_cast<int>(std::llround(clamped)));
}

} // namespace ratekit
