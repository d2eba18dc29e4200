#ifndef MONOPOA_MODEL_IO_HPP
#define MONOPOA_MODEL_IO_HPP

#include <filesystem>
#include <string>
#include <variant>

#include "monopoa/hmri.hpp"

namespace monopoa::neural {

inline constexpr int kModelFormatVersion = 1;

using AnyModel = std::variant<HmRiModel, ConstraintNet>;

/// Versioned JSON with architecture, flags, scaling and every weight; reals
/// round-trip bit for bit.
[[nodiscard]] std::string model_to_json(const AnyModel& model);
[[nodiscard]] AnyModel model_from_json(const std::string& text);

void save_model(const AnyModel& model, const std::filesystem::path& path);
[[nodiscard]] AnyModel load_model(const std::filesystem::path& path);

}  // namespace monopoa::neural

#endif  // MONOPOA_MODEL_IO_HPP
