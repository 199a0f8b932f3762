#pragma once

#include <string_view>
#include <variant>

#include "surveybot/flow/types.hpp"

namespace surveybot::flow {

enum class ValidationErrorCode { non_numeric, out_of_range };

/// Carries the valid range so the re-prompt can repeat it.
struct ValidationError {
    ValidationErrorCode code = ValidationErrorCode::non_numeric;
    int scale_min = 0;
    int scale_max = 0;

    bool operator==(const ValidationError&) const = default;
};

using AnswerResult = std::variant<int, ValidationError>;

/// Accepts exactly one integer token (after trimming whitespace) inside
/// [scale_min, scale_max].
AnswerResult validate_answer(const QuestionSpec& spec, std::string_view text);

}  // namespace surveybot::flow
