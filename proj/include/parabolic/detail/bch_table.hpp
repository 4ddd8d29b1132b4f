#pragma once

#include <array>
#include <string_view>

namespace parabolic::detail {

// Coefficients of log(exp(X) exp(Y)) on associative words in X, Y through
// degree 6. Zero coefficients are omitted.
struct BchTerm {
  std::string_view word;
  long numerator;
  long denominator;
};

inline constexpr std::array<BchTerm, 72> kBchTerms = {{
    {"X", 1, 1},
    {"Y", 1, 1},
    {"XY", 1, 2},
    {"YX", -1, 2},
    {"XXY", 1, 12},
    {"XYX", -1, 6},
    {"XYY", 1, 12},
    {"YXX", 1, 12},
    {"YXY", -1, 6},
    {"YYX", 1, 12},
    {"XXYY", 1, 24},
    {"XYXY", -1, 12},
    {"YXYX", 1, 12},
    {"YYXX", -1, 24},
    {"XXXXY", -1, 720},
    {"XXXYX", 1, 180},
    {"XXXYY", 1, 180},
    {"XXYXX", -1, 120},
    {"XXYXY", -1, 120},
    {"XXYYX", -1, 120},
    {"XXYYY", 1, 180},
    {"XYXXX", 1, 180},
    {"XYXXY", -1, 120},
    {"XYXYX", 1, 30},
    {"XYXYY", -1, 120},
    {"XYYXX", -1, 120},
    {"XYYXY", -1, 120},
    {"XYYYX", 1, 180},
    {"XYYYY", -1, 720},
    {"YXXXX", -1, 720},
    {"YXXXY", 1, 180},
    {"YXXYX", -1, 120},
    {"YXXYY", -1, 120},
    {"YXYXX", -1, 120},
    {"YXYXY", 1, 30},
    {"YXYYX", -1, 120},
    {"YXYYY", 1, 180},
    {"YYXXX", 1, 180},
    {"YYXXY", -1, 120},
    {"YYXYX", -1, 120},
    {"YYXYY", -1, 120},
    {"YYYXX", 1, 180},
    {"YYYXY", 1, 180},
    {"YYYYX", -1, 720},
    {"XXXXYY", -1, 1440},
    {"XXXYXY", 1, 360},
    {"XXXYYY", 1, 360},
    {"XXYXXY", -1, 240},
    {"XXYXYY", -1, 240},
    {"XXYYXY", -1, 240},
    {"XXYYYY", -1, 1440},
    {"XYXXXY", 1, 360},
    {"XYXXYY", -1, 240},
    {"XYXYXY", 1, 60},
    {"XYXYYY", 1, 360},
    {"XYYXXY", -1, 240},
    {"XYYXYY", -1, 240},
    {"XYYYXY", 1, 360},
    {"YXXXYX", -1, 360},
    {"YXXYXX", 1, 240},
    {"YXXYYX", 1, 240},
    {"YXYXXX", -1, 360},
    {"YXYXYX", -1, 60},
    {"YXYYXX", 1, 240},
    {"YXYYYX", -1, 360},
    {"YYXXXX", 1, 1440},
    {"YYXXYX", 1, 240},
    {"YYXYXX", 1, 240},
    {"YYXYYX", 1, 240},
    {"YYYXXX", -1, 360},
    {"YYYXYX", -1, 360},
    {"YYYYXX", 1, 1440},
}};

}  // namespace parabolic::detail
