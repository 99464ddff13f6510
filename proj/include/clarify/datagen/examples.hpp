#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace clarify {

enum class ClarificationCategory { CodeOnlyUnderspecified, NaturalLanguageCodeRelated };

std::string_view to_string(ClarificationCategory category);
ClarificationCategory category_from_string(std::string_view s);

struct ClassifierExample {
  std::string prompt;
  int clarity_label = 1;  // 1..4

  friend bool operator==(const ClassifierExample&, const ClassifierExample&) = default;
};

struct ClarificationExample {
  std::string prompt;
  std::vector<std::string> questions;
  ClarificationCategory category = ClarificationCategory::CodeOnlyUnderspecified;

  friend bool operator==(const ClarificationExample&, const ClarificationExample&) = default;
};

struct GenerationCampaignReport {
  int attempted = 0;
  int parsed = 0;
  int failed_parse = 0;
  int failed_timeout = 0;

  double parse_rate() const {
    return attempted == 0 ? 0.0 : static_cast<double>(parsed) / static_cast<double>(attempted);
  }
  bool balanced() const { return attempted == parsed + failed_parse + failed_timeout; }

  friend bool operator==(const GenerationCampaignReport&, const GenerationCampaignReport&) = default;
};

nlohmann::json to_json(const GenerationCampaignReport& report);

/// Teacher replies must be exactly one JSON object, optionally surrounded
/// by whitespace. Anything else yields nullopt and a reason in `why`.
std::optional<ClassifierExample> parse_classifier_reply(std::string_view reply, std::string* why = nullptr);
/// Category is assigned by the campaign, not read from the reply.
std::optional<ClarificationExample> parse_clarification_reply(std::string_view reply,
                                                              ClarificationCategory category,
                                                              std::string* why = nullptr);

// Dataset files: a header line {"schema": ..., "version": 1} followed by
// one example per line carrying its campaign "index".
inline constexpr std::string_view kClassifierSchema = "clarify.classifier_dataset";
inline constexpr std::string_view kClarificationSchema = "clarify.clarification_dataset";
inline constexpr int kDatasetVersion = 1;

nlohmann::json dataset_header(std::string_view schema);
nlohmann::json to_json(const ClassifierExample& e, int index);
nlohmann::json to_json(const ClarificationExample& e, int index);
ClassifierExample classifier_example_from_json(const nlohmann::json& j);
ClarificationExample clarification_example_from_json(const nlohmann::json& j);

struct DatasetViolation {
  int line = 0;  // 1-based; 0 for file-level problems
  std::string message;
};

struct DatasetValidation {
  std::string schema;  // empty when the header is missing
  int records = 0;
  std::vector<DatasetViolation> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks the header and every record against the example invariants.
/// Throws PreconditionError only if the file cannot be read.
DatasetValidation validate_dataset(const std::filesystem::path& path);

/// Examples in file order. Throws PreconditionError if validation fails.
std::vector<ClassifierExample> load_classifier_dataset(const std::filesystem::path& path);
std::vector<ClarificationExample> load_clarification_dataset(const std::filesystem::path& path);

/// Chat-format fine-tuning records: {"messages": [user prompt, assistant
/// numbered questions]}. An empty list writes an empty file.
void export_finetune_format(const std::vector<ClarificationExample>& examples,
                            const std::filesystem::path& out);

struct FinetunePair {
  std::string prompt;
  std::vector<std::string> questions;

  friend bool operator==(const FinetunePair&, const FinetunePair&) = default;
};

/// Inverse of export_finetune_format (category is not part of the format).
std::vector<FinetunePair> import_finetune_format(const std::filesystem::path& path);

/// Sequence-classification records {"text": prompt, "label": 1..4}.
void export_classifier_format(const std::vector<ClassifierExample>& examples,
                              const std::filesystem::path& out);

/// "1. q1\n2. q2" as the assistant turn of a fine-tuning record.
std::string numbered_questions(const std::vector<std::string>& questions);

}  // namespace clarify
