#ifndef MONOPOA_INSTANCE_IO_HPP
#define MONOPOA_INSTANCE_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "monopoa/problem.hpp"

namespace monopoa {

inline constexpr int kInstanceFormatVersion = 1;

/// Self-describing JSON document; reals use shortest round-trip decimals, so
/// parsing reproduces every value bit for bit.
[[nodiscard]] std::string instance_to_json(const Instance& instance);
[[nodiscard]] Instance instance_from_json(const std::string& text);

void save_instance(const Instance& instance, const std::filesystem::path& path);
[[nodiscard]] Instance load_instance(const std::filesystem::path& path);

/// One instance document per line.
void save_corpus(const std::vector<Instance>& corpus, const std::filesystem::path& path);
[[nodiscard]] std::vector<Instance> load_corpus(const std::filesystem::path& path);

}  // namespace monopoa

#endif  // MONOPOA_INSTANCE_IO_HPP
