#pragma once

// Batch commands behind the modinv executable. Each returns the rendered output and an exit code.

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace modinv {

inline constexpr const char* kArtifactVersion = "modinv 1.0.0";
inline constexpr const char* kSchemaVersion = "1";

enum ExitCode : int { kExitOk = 0, kExitInvalid = 2, kExitTruncated = 3, kExitVerification = 4 };

struct RunOptions {
  std::string format = "json";
  double tolerance = 1e-8;
  std::int64_t max_nodes = 200'000'000;
  /// Worker threads; never part of the manifest, since output does not depend on it.
  int jobs = 1;
};

struct CommandResult {
  int exit_code = kExitOk;
  std::string output;
  /// Message for stderr; set for invalid input, truncation and failed verification.
  std::string error;
  /// {"manifest": ..., "result": ...} in every format; null on input errors.
  nlohmann::json document;
};

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

CommandResult cmd_data(const std::string& model, const RunOptions& opt);
CommandResult cmd_classify(const std::string& model, const RunOptions& opt);

struct NimrepRequest {
  std::string model;
  /// classify output (with an invariant index) or {"matrix": [[...]]}.
  nlohmann::json invariant;
  int index = 0;
  /// "verify" needs a graph; "search" enumerates.
  std::string mode = "search";
  std::optional<nlohmann::json> graph;
  /// Label descriptor; defaults to the graph's generator or the single generator.
  std::string generator;
};
CommandResult cmd_nimrep(const NimrepRequest& req, const RunOptions& opt);

/// action: a name listed under "actions" in the graph file, or a comma-separated permutation.
CommandResult cmd_orbifold(const nlohmann::json& graph, const std::string& action, const RunOptions& opt);

/// ext: "identity", "conjugation", or a named automorphism of the fixture.
CommandResult cmd_embeddings(const std::string& name, const std::string& ext, const RunOptions& opt);

/// Names of the shipped embedding fixtures.
std::vector<std::string> embedding_names();

}  // namespace modinv
