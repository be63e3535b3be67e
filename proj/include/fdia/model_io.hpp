#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "fdia/aae.hpp"

namespace fdia {

inline constexpr int kModelSchemaVersion = 1;

/// Unreadable, malformed or wrong-version model document.
class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON document: schema_version, architecture, provenance, normalization and
/// one flat parameter array per network.
std::string model_to_string(const AAEModel& model);
AAEModel model_from_string(const std::string& text);

void save_model(const AAEModel& model, const std::filesystem::path& path);
AAEModel load_model(const std::filesystem::path& path);

}  // namespace fdia
