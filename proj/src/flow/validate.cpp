#include "surveybot/flow/validate.hpp"

#include <charconv>

#include "surveybot/localization/text.hpp"

namespace surveybot::flow {

AnswerResult validate_answer(const QuestionSpec& spec, std::string_view text) {
    const std::string_view token = text::trim(text);
    const ValidationError non_numeric{ValidationErrorCode::non_numeric, spec.scale_min, spec.scale_max};
    const ValidationError out_of_range{ValidationErrorCode::out_of_range, spec.scale_min, spec.scale_max};
    if (token.empty()) return non_numeric;

    int value = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec == std::errc::result_out_of_range) return out_of_range;
    if (ec != std::errc{} || end != token.data() + token.size()) return non_numeric;
    if (value < spec.scale_min || value > spec.scale_max) return out_of_range;
    return value;
}

}  // namespace surveybot::flow
