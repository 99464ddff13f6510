#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "clarify/backend/client.hpp"
#include "clarify/datagen/campaign.hpp"
#include "clarify/datagen/examples.hpp"
#include "clarify/util/prompt_template.hpp"

namespace clarify {

struct DatagenOptions {
  int width = 4;  // concurrent teacher requests
  // With an output path the dataset is written there together with
  // <out>.failures.jsonl and <out>.report.json. Indices already recorded in
  // either file are not attempted again.
  std::optional<std::filesystem::path> out;
};

struct ClassifierDataset {
  std::vector<ClassifierExample> examples;  // request order
  GenerationCampaignReport report;
};

struct ClarificationDataset {
  std::vector<ClarificationExample> examples;  // request order
  GenerationCampaignReport report;
};

/// Share of each category; must sum to 1.
struct CategoryMix {
  double code_only = 0.5;
  double natural_language = 0.5;

  void validate() const;
};

/// Category of request `index` under `mix`: code-only exactly when
/// floor((index + 1) * p) > floor(index * p) with p = mix.code_only, which
/// spreads the categories evenly through the campaign.
ClarificationCategory category_for(int index, const CategoryMix& mix);

/// Target clarity label requested for sample `index` (cycles 1..4).
int target_label_for(int index);

/// Template slots: {{target_label}} and {{index}} (both optional).
ClassifierDataset generate_classifier_dataset(const std::shared_ptr<ChatClient>& teacher,
                                              const PromptTemplate& tpl, int n,
                                              const DatagenOptions& options = {});

/// Template slots: {{category}} and {{index}} (both optional).
ClarificationDataset generate_clarification_dataset(const std::shared_ptr<ChatClient>& teacher,
                                                    const PromptTemplate& tpl, int n,
                                                    const CategoryMix& mix = {},
                                                    const DatagenOptions& options = {});

std::filesystem::path failures_path(const std::filesystem::path& out);
std::filesystem::path report_path(const std::filesystem::path& out);

}  // namespace clarify
